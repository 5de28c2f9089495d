//! Empirical checks of the differential inequalities and of the estimates
//! they rest on.
//!
//! The inequalities assert the existence of constants depending on `w`
//! only. A check measures the best constant at each `n` and passes when the
//! measurements do not drift: an upper constant may not exceed twice its
//! `n = 4` value, a lower constant may not fall below half of it.

mod appendix;
mod geometry;
mod localization;
pub mod oracle;
mod polynomials;
mod quantity;
mod report;
mod suite;
mod theorems;

pub use appendix::appendix_consistency;
pub use geometry::{check_node_geometry, check_pa_prime};
pub use localization::{check_qx_localization, qx_pairs};
pub use polynomials::{badkov_grid, check_polynomial_bounds};
pub use quantity::{Ctx, Quantity};
pub use report::{write_reports_csv, write_reports_text, CheckReport, Constant, Witness};
pub use suite::{default_suites, run_suite, Suite, SuiteConfig, SUITE_NAMES};
pub use theorems::{
    check_cms, check_exactness, check_lambda_bounds, check_oracle_gates, check_pi_prime_fd, check_thm_abs_cont,
    check_thm_discont, check_thm_lipschitz, DiscontOutcome,
};

/// Degrees whose constants are compared against the `n = 4` baseline.
pub const STABILITY_NS: [usize; 4] = [4, 8, 16, 32];
/// Allowed drift factor relative to the baseline.
pub const DRIFT: f64 = 2.0;
/// Tolerance for the sandwich and the identity, relative to the mass.
pub const CMS_TOL: f64 = 1e-9;
/// Witness re-evaluation tolerance, relative.
pub const WITNESS_TOL: f64 = 1e-9;
/// Rounding allowance for bounds that hold exactly in exact arithmetic.
pub const ROUNDING: f64 = 1e-12;

/// Whether a measured constant bounds from above or from below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Upper,
    Lower,
}

/// A per-`n` measurement of one constant with the point realizing it.
#[derive(Debug, Clone)]
pub(crate) struct Series {
    pub name: String,
    pub direction: Direction,
    pub points: Vec<(usize, f64, Option<Witness>)>,
}

impl Series {
    pub fn new(name: impl Into<String>, direction: Direction) -> Self {
        Self {
            name: name.into(),
            direction,
            points: Vec::new(),
        }
    }

    pub fn push(&mut self, n: usize, value: f64, witness: Option<Witness>) {
        self.points.push((n, value, witness));
    }

    /// Applies the fault: the last measurement moves past the drift
    /// tolerance by a factor of ten.
    pub fn inject_fault(&mut self) {
        let base = self.points.first().map(|p| p.1).unwrap_or(0.0);
        if let Some(last) = self.points.last_mut() {
            last.1 = match self.direction {
                Direction::Upper => 10.0 * DRIFT * base.abs().max(last.1.abs()).max(f64::MIN_POSITIVE),
                Direction::Lower => base.abs().min(last.1.abs()) / (10.0 * DRIFT),
            };
            if let Some(w) = last.2.as_mut() {
                w.value = last.1;
            }
        }
    }

    /// Drift of each later point relative to the first; larger is worse.
    fn drifts(&self) -> Vec<f64> {
        let Some(&(_, base, _)) = self.points.first() else {
            return Vec::new();
        };
        self.points
            .iter()
            .skip(1)
            .map(|&(_, v, _)| match self.direction {
                Direction::Upper if v <= 0.0 => 0.0,
                Direction::Upper if base <= 0.0 => f64::INFINITY,
                Direction::Upper => v / base,
                Direction::Lower if base <= 0.0 => f64::INFINITY,
                Direction::Lower if v <= 0.0 => f64::INFINITY,
                Direction::Lower => base / v,
            })
            .collect()
    }

    pub fn stable(&self) -> bool {
        !self.points.is_empty()
            && self.points.iter().all(|p| p.1.is_finite())
            && self.drifts().iter().all(|&d| d <= DRIFT)
            && (self.direction == Direction::Upper || self.points[0].1 > 0.0)
    }

    /// Witness at the point of worst drift, or at the baseline when nothing drifts.
    pub fn worst(&self) -> Option<(f64, &Witness)> {
        let drifts = self.drifts();
        let k = drifts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k + 1)
            .unwrap_or(0);
        let d = if k == 0 { 1.0 } else { drifts[k - 1] };
        self.points.get(k).and_then(|p| p.2.as_ref()).map(|w| (d, w))
    }

    pub fn constants(&self) -> impl Iterator<Item = Constant> + '_ {
        self.points.iter().map(|&(n, value, _)| Constant {
            name: self.name.clone(),
            n,
            value,
        })
    }
}

/// Combines several series into a stability report.
pub(crate) fn stability_report(name: &str, series: &[Series], extra_pass: bool) -> CheckReport {
    let pass = extra_pass && series.iter().all(Series::stable);
    let notes = series
        .iter()
        .filter(|s| !s.stable())
        .map(|s| format!("unstable: {}", s.name))
        .collect();
    let witness = series
        .iter()
        .filter_map(|s| s.worst().map(|(d, w)| (d, s.stable(), w)))
        .max_by(|a, b| {
            (!a.1, a.0)
                .partial_cmp(&(!b.1, b.0))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(_, _, w)| w.clone());
    CheckReport {
        name: name.to_string(),
        constants: series.iter().flat_map(Series::constants).collect(),
        witness,
        pass,
        tolerance: format!("upper constants <= {DRIFT} x baseline, lower constants >= baseline / {DRIFT}"),
        gating: true,
        notes,
    }
}

/// A bound that must hold at every sample, up to an allowance.
#[derive(Debug, Clone)]
pub(crate) struct Exact {
    pub name: String,
    pub direction: Direction,
    pub bound: f64,
    pub allowance: f64,
    /// Equality with the bound counts as a failure.
    pub strict: bool,
    pub points: Vec<(usize, f64, Option<Witness>)>,
}

impl Exact {
    pub fn new(name: impl Into<String>, direction: Direction, bound: f64, allowance: f64, strict: bool) -> Self {
        Self {
            name: name.into(),
            direction,
            bound,
            allowance,
            strict,
            points: Vec::new(),
        }
    }

    pub fn push(&mut self, n: usize, extreme: Extreme) {
        self.points.push((n, extreme.value, extreme.witness));
    }

    fn holds(&self, v: f64) -> bool {
        match (self.direction, self.strict) {
            (Direction::Upper, false) => v <= self.bound + self.allowance,
            (Direction::Upper, true) => v < self.bound + self.allowance,
            (Direction::Lower, false) => v >= self.bound - self.allowance,
            (Direction::Lower, true) => v > self.bound - self.allowance,
        }
    }

    /// Moves the last measurement past the bound by ten allowances.
    pub fn inject_fault(&mut self) {
        let step = 10.0 * self.allowance.max(ROUNDING);
        let (bound, allowance, direction) = (self.bound, self.allowance, self.direction);
        if let Some(last) = self.points.last_mut() {
            last.1 = match direction {
                Direction::Upper => bound + allowance + step,
                Direction::Lower => bound - allowance - step,
            };
            if let Some(w) = last.2.as_mut() {
                w.value = last.1;
            }
        }
    }

    pub fn pass(&self) -> bool {
        !self.points.is_empty() && self.points.iter().all(|p| self.holds(p.1))
    }

    fn first_failure(&self) -> Option<&Witness> {
        self.points.iter().find(|p| !self.holds(p.1)).and_then(|p| p.2.as_ref())
    }
}

/// Stability report extended by exact bounds; a failed exact bound takes
/// the witness.
pub(crate) fn combined_report(name: &str, series: &[Series], exact: &[Exact], extra_pass: bool) -> CheckReport {
    let mut report = stability_report(name, series, extra_pass);
    for e in exact {
        report.constants.extend(e.points.iter().map(|&(n, value, _)| Constant {
            name: e.name.clone(),
            n,
            value,
        }));
        if !e.pass() {
            report.pass = false;
            report.notes.push(format!("violated: {}", e.name));
            if let Some(w) = e.first_failure() {
                if report.notes.iter().filter(|n| n.starts_with("violated")).count() == 1 {
                    report.witness = Some(w.clone());
                }
            }
        }
    }
    if !exact.is_empty() {
        report
            .tolerance
            .push_str(&format!("; exact bounds within {ROUNDING:e}"));
    }
    report
}

/// Keeps the running extreme of a measured ratio with its location.
#[derive(Debug, Clone)]
pub(crate) struct Extreme {
    pub direction: Direction,
    pub value: f64,
    pub witness: Option<Witness>,
}

impl Extreme {
    pub fn new(direction: Direction) -> Self {
        Self {
            direction,
            value: match direction {
                Direction::Upper => f64::NEG_INFINITY,
                Direction::Lower => f64::INFINITY,
            },
            witness: None,
        }
    }

    pub fn offer(&mut self, value: f64, witness: impl FnOnce() -> Witness) {
        let better = match self.direction {
            Direction::Upper => value > self.value,
            Direction::Lower => value < self.value,
        };
        if better || (value.is_nan() && !self.value.is_nan()) {
            self.value = value;
            self.witness = Some(witness());
        }
    }

    pub fn into_series_point(self, series: &mut Series, n: usize) {
        series.push(n, self.value, self.witness);
    }
}

#[cfg(test)]
mod tests;
