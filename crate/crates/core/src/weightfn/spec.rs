use std::fmt;

use super::piece::Piece;
use crate::{Error, Result};

/// Regularity class assumed of the weight, with its constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularity {
    /// `|w(s) - w(t)| <= r |s - t|`.
    Lipschitz { r: f64 },
    /// `w` absolutely continuous with `||w'||_p = derivative_norm`.
    Sobolev { p: f64, derivative_norm: f64 },
    /// Absolutely continuous between the breakpoints.
    PiecewiseAbsCont,
}

impl Regularity {
    pub fn name(&self) -> &'static str {
        match self {
            Regularity::Lipschitz { .. } => "lipschitz",
            Regularity::Sobolev { .. } => "sobolev",
            Regularity::PiecewiseAbsCont => "piecewise-abs-cont",
        }
    }
}

/// Piecewise description of a weight on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    pub pieces: Vec<Piece>,
    pub breakpoints: Vec<f64>,
    pub regularity: Regularity,
    /// Lower bound `m`.
    pub lower: f64,
    /// Upper bound `M`.
    pub upper: f64,
}

/// Outcome of one validation invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<f64>,
    pub detail: String,
}

/// Pass/fail per invariant, produced by [`WeightSpec::validate`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub checks: Vec<InvariantCheck>,
}

impl Diagnostics {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn record(&mut self, name: &'static str, witness: Option<f64>, detail: String) {
        self.checks.push(InvariantCheck {
            name,
            passed: witness.is_none() && detail.is_empty(),
            witness,
            detail,
        });
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.checks.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", if c.passed { "pass" } else { "FAIL" }, c.name)?;
            if let Some(t) = c.witness {
                write!(f, " at t = {t}")?;
            }
            if !c.detail.is_empty() {
                write!(f, " ({})", c.detail)?;
            }
        }
        Ok(())
    }
}

pub const BREAKPOINT_ORDER: &str = "breakpoints strictly increasing";
pub const BREAKPOINT_RANGE: &str = "breakpoint outside (-1,1)";
pub const TILING: &str = "pieces tile [-1,1]";
pub const JUNCTIONS: &str = "breakpoints match piece junctions";
pub const FINITE: &str = "piece finite on its support";
pub const BOUNDS: &str = "m <= w <= M";

/// Samples per piece for the dense bound check.
const DENSE_SAMPLES: usize = 2001;

impl WeightSpec {
    /// Checks the piece list structurally, then every invariant.
    ///
    /// A malformed piece yields [`Error::Structural`]; invariant violations
    /// are reported in the returned [`Diagnostics`].
    pub fn validate(&self) -> Result<Diagnostics> {
        if self.pieces.is_empty() {
            return Err(Error::Structural {
                index: 0,
                reason: "empty piece list".into(),
            });
        }
        for (i, p) in self.pieces.iter().enumerate() {
            p.check_structure(i)?;
        }

        let mut diag = Diagnostics::default();

        let unordered = self.breakpoints.windows(2).find(|b| !(b[0] < b[1])).map(|b| b[1]);
        diag.record(BREAKPOINT_ORDER, unordered, String::new());

        let outside = self.breakpoints.iter().copied().find(|&s| !(s > -1.0 && s < 1.0));
        diag.record(BREAKPOINT_RANGE, outside, String::new());

        let mut tiling_witness = None;
        let mut tiling_detail = String::new();
        if self.pieces[0].lo != -1.0 {
            tiling_witness = Some(self.pieces[0].lo);
            tiling_detail = "first piece does not start at -1".into();
        } else if self.pieces[self.pieces.len() - 1].hi != 1.0 {
            tiling_witness = Some(self.pieces[self.pieces.len() - 1].hi);
            tiling_detail = "last piece does not end at 1".into();
        } else if let Some(w) = self.pieces.windows(2).find(|w| w[0].hi != w[1].lo) {
            tiling_witness = Some(w[0].hi);
            tiling_detail = if w[0].hi < w[1].lo {
                "gap between pieces".into()
            } else {
                "overlapping pieces".into()
            };
        }
        diag.record(TILING, tiling_witness, tiling_detail);

        let junctions: Vec<f64> = self.pieces.windows(2).map(|w| w[0].hi).collect();
        let mismatch = if junctions.len() != self.breakpoints.len() {
            Some(
                junctions
                    .iter()
                    .chain(&self.breakpoints)
                    .copied()
                    .find(|s| !junctions.contains(s) || !self.breakpoints.contains(s))
                    .unwrap_or(0.0),
            )
        } else {
            junctions
                .iter()
                .zip(&self.breakpoints)
                .find(|(a, b)| a != b)
                .map(|(a, _)| *a)
        };
        diag.record(JUNCTIONS, mismatch, String::new());

        let mut nonfinite = None;
        let mut out_of_bounds = None;
        let mut extreme = (f64::INFINITY, f64::NEG_INFINITY);
        let slack = 1e-12 * self.upper.abs().max(1.0);
        for p in &self.pieces {
            for k in 0..DENSE_SAMPLES {
                let t = p.lo + (p.hi - p.lo) * k as f64 / (DENSE_SAMPLES - 1) as f64;
                let v = p.eval(t);
                if !v.is_finite() {
                    nonfinite.get_or_insert(t);
                    continue;
                }
                extreme = (extreme.0.min(v), extreme.1.max(v));
                if (v < self.lower - slack || v > self.upper + slack) && out_of_bounds.is_none() {
                    out_of_bounds = Some(t);
                }
            }
        }
        diag.record(FINITE, nonfinite, String::new());

        let bounds_detail = if !(self.lower > 0.0 && self.lower.is_finite()) {
            format!("m = {} is not positive", self.lower)
        } else if !(self.upper >= self.lower && self.upper.is_finite()) {
            format!("M = {} is below m = {}", self.upper, self.lower)
        } else if out_of_bounds.is_some() {
            format!("sampled range [{}, {}]", extreme.0, extreme.1)
        } else {
            String::new()
        };
        diag.record(BOUNDS, out_of_bounds, bounds_detail);

        Ok(diag)
    }

    /// The weight `t -> w(-t)`.
    pub fn reversed(&self) -> Self {
        Self {
            pieces: self.pieces.iter().rev().map(Piece::reversed).collect(),
            breakpoints: self.breakpoints.iter().rev().map(|s| -s).collect(),
            regularity: self.regularity,
            lower: self.lower,
            upper: self.upper,
        }
    }

    /// The weight `c w` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let regularity = match self.regularity {
            Regularity::Lipschitz { r } => Regularity::Lipschitz { r: r * c },
            Regularity::Sobolev { p, derivative_norm } => Regularity::Sobolev {
                p,
                derivative_norm: derivative_norm * c,
            },
            Regularity::PiecewiseAbsCont => Regularity::PiecewiseAbsCont,
        };
        Self {
            pieces: self.pieces.iter().map(|p| p.scaled(c)).collect(),
            breakpoints: self.breakpoints.clone(),
            regularity,
            lower: self.lower * c,
            upper: self.upper * c,
        }
    }
}
