use rayon::prelude::*;

use super::quantity::{Ctx, Quantity, FD_STEP};
use super::{stability_report, CheckReport, Constant, Direction, Extreme, Series, Witness, CMS_TOL};
use crate::canonical::CanonicalSystem;
use crate::extremal::Profile;
use crate::orthopoly::{RecurrenceTable, Which};
use crate::weightfn::{presets, Regularity, Weight};
use crate::{Error, Result};

/// Points per degree in the exactness check.
pub const EXACTNESS_POINTS: usize = 50;
pub const EXACTNESS_TOL: f64 = 1e-8;
/// Agreement of `π'` with the centered difference, absolute.
pub const FD_TOL: f64 = 1e-4;
/// Fraction of non-excluded points that must meet [`FD_TOL`].
pub const FD_FRACTION: f64 = 0.99;
/// Fraction of the grid the pass region must cover in the discontinuous case.
pub const COVERAGE: f64 = 0.9;
/// Tolerance on the jump of `π' - w` at a discontinuity of `w`.
pub const JUMP_TOL: f64 = 0.2;
/// Degree at which the jump is measured.
pub const JUMP_N: usize = 32;
/// Offset on either side of a discontinuity when measuring the jump.
pub const JUMP_OFFSET: f64 = 1e-6;
pub const ORACLE_TOL: f64 = 1e-12;

fn errors_note(profiles: &[&Profile]) -> Option<String> {
    let failed: usize = profiles.iter().map(|p| p.failures().count()).sum();
    (failed > 0).then(|| format!("{failed} samples failed to evaluate"))
}

pub fn check_cms(profile: &Profile, fault: bool) -> CheckReport {
    let ctx = Ctx {
        n: profile.n,
        mass: profile.mass,
        lower: f64::NAN,
        upper: f64::NAN,
    };
    let mut worst = Extreme::new(Direction::Upper);
    for s in &profile.samples {
        let mut s = s.clone();
        if fault {
            s.lambda += 10.0 * CMS_TOL * profile.mass;
        }
        if let Some(v) = Quantity::Cms.from_sample(&s, &ctx) {
            worst.offer(v, || Witness {
                quantity: Quantity::Cms,
                n: profile.n,
                x: s.x,
                aux: 0.0,
                value: v,
            });
        }
    }
    let note = errors_note(&[profile]);
    CheckReport {
        name: "cms".into(),
        constants: vec![Constant {
            name: "max-violation/mass".into(),
            n: profile.n,
            value: worst.value,
        }],
        witness: worst.witness,
        pass: note.is_none() && worst.value <= CMS_TOL,
        tolerance: format!("sandwich and identity violations <= {CMS_TOL:e} x mass"),
        gating: true,
        notes: note.into_iter().collect(),
    }
}

fn sorted(profiles: &[Profile]) -> Vec<&Profile> {
    let mut v: Vec<&Profile> = profiles.iter().collect();
    v.sort_by_key(|p| p.n);
    v
}

fn ctx_of(weight: &Weight, profile: &Profile) -> Ctx {
    Ctx {
        n: profile.n,
        mass: profile.mass,
        lower: weight.spec().lower,
        upper: weight.spec().upper,
    }
}

/// Measures the upper and lower constants of a two-sided bound on `π' - w`.
fn two_sided(
    name: &str,
    weight: &Weight,
    profiles: &[Profile],
    upper: Quantity,
    lower: Quantity,
    fault: bool,
) -> CheckReport {
    let profiles = sorted(profiles);
    let mut plus = Series::new("K+", Direction::Upper);
    let mut minus = Series::new("K-", Direction::Upper);
    for p in &profiles {
        let ctx = ctx_of(weight, p);
        for (q, series) in [(upper, &mut plus), (lower, &mut minus)] {
            let mut e = Extreme::new(Direction::Upper);
            for s in &p.samples {
                if let Some(v) = q.from_sample(s, &ctx) {
                    e.offer(v, || Witness {
                        quantity: q,
                        n: p.n,
                        x: s.x,
                        aux: 0.0,
                        value: v,
                    });
                }
            }
            e.into_series_point(series, p.n);
        }
    }
    if fault {
        plus.inject_fault();
        minus.inject_fault();
    }
    let note = errors_note(&profiles);
    let mut report = stability_report(name, &[plus, minus], note.is_none());
    report.notes.extend(note);
    report
}

/// Constants of the Lipschitz-case bound
/// `-K₋ λ/(1-x) <= π' - w <= K₊ λ min{1/(1+x), n²}`.
pub fn check_thm_lipschitz(weight: &Weight, profiles: &[Profile], fault: bool) -> Result<CheckReport> {
    if !matches!(weight.spec().regularity, Regularity::Lipschitz { .. }) {
        return Err(Error::Precondition(format!(
            "the Lipschitz bound needs a Lipschitz weight, got {}",
            weight.spec().regularity.name()
        )));
    }
    Ok(two_sided(
        "thm-lipschitz",
        weight,
        profiles,
        Quantity::LipschitzUpper,
        Quantity::LipschitzLower,
        fault,
    ))
}

/// Constants of the Sobolev-case bound, whose scales carry the extra
/// `λ̂^{1-1/p}` term with `λ̂ = λ/(mass/2)`. A Lipschitz weight is
/// checked with `p = ∞`.
pub fn check_thm_abs_cont(weight: &Weight, profiles: &[Profile], fault: bool) -> Result<CheckReport> {
    let p = match weight.spec().regularity {
        Regularity::Sobolev { p, .. } => p,
        Regularity::Lipschitz { .. } => f64::INFINITY,
        other => {
            return Err(Error::Precondition(format!(
                "the Sobolev bound needs an absolutely continuous weight, got {}",
                other.name()
            )))
        }
    };
    Ok(two_sided(
        "thm-abs-cont",
        weight,
        profiles,
        Quantity::SobolevUpper { p },
        Quantity::SobolevLower { p },
        fault,
    ))
}

/// Per-degree result of the discontinuous-case search.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscontOutcome {
    /// `(n, smallest C, fraction of the grid inside the region)`.
    pub per_n: Vec<(usize, f64, f64)>,
    /// First degree whose region covers [`COVERAGE`] of the grid.
    pub n0: Option<usize>,
    /// `(s, measured jump of π' - w, |w(s+) - w(s-)|)`.
    pub jumps: Vec<(f64, f64, f64)>,
}

/// Searches the degrees of `profiles` for the first at which
/// `|π' - w| <= eps` holds on `{1 - x² >= C/n², |s - x| >= C/n}` for a `C`
/// leaving at least [`COVERAGE`] of the grid in the region.
///
/// A violation above `w` may be cleared by closeness to an upward jump and
/// one below `w` by closeness to a downward jump; closeness to the
/// endpoints clears either. The jump of `π' - w` at each discontinuity is
/// measured at `n = JUMP_N` and compared with the jump of `w`.
pub fn check_thm_discont(
    weight: &Weight,
    profiles: &[Profile],
    eps: f64,
    fault: bool,
) -> Result<(CheckReport, DiscontOutcome)> {
    let profiles = sorted(profiles);
    let jumps = weight.jumps();
    let mut report = CheckReport {
        name: "thm-discont".into(),
        constants: Vec::new(),
        witness: None,
        pass: false,
        tolerance: format!(
            "|pi' - w| <= {eps} on a region covering >= {COVERAGE} of the grid for some n; jump within {JUMP_TOL} at n = {JUMP_N}"
        ),
        gating: true,
        notes: Vec::new(),
    };
    let mut outcome = DiscontOutcome {
        per_n: Vec::new(),
        n0: None,
        jumps: Vec::new(),
    };
    let mut witness_at_n0 = None;
    for p in &profiles {
        let nf = p.n as f64;
        let mut need = Extreme::new(Direction::Upper);
        need.offer(0.0, || Witness {
            quantity: Quantity::Deviation,
            n: p.n,
            x: f64::NAN,
            aux: 0.0,
            value: 0.0,
        });
        for s in &p.samples {
            let Some(mut dev) = Quantity::Deviation.from_sample(s, &ctx_of(weight, p)) else {
                continue;
            };
            if fault {
                dev += 10.0 * eps;
            }
            if dev.abs() <= eps {
                continue;
            }
            let x = s.x;
            let up = dev > 0.0;
            let c = jumps
                .iter()
                .filter(|j| (j.size() > 0.0) == up)
                .map(|j| nf * (j.at - x).abs())
                .fold(nf * nf * (1.0 - x * x), f64::min);
            need.offer(c, || Witness {
                quantity: Quantity::Deviation,
                n: p.n,
                x,
                aux: 0.0,
                value: dev,
            });
        }
        let c = need.value;
        let inside = p
            .samples
            .iter()
            .filter(|s| nf * nf * (1.0 - s.x * s.x) > c && jumps.iter().all(|j| nf * (j.at - s.x).abs() > c))
            .count();
        let coverage = inside as f64 / p.samples.len().max(1) as f64;
        report.constants.push(Constant {
            name: "C".into(),
            n: p.n,
            value: c,
        });
        report.constants.push(Constant {
            name: "coverage".into(),
            n: p.n,
            value: coverage,
        });
        outcome.per_n.push((p.n, c, coverage));
        if outcome.n0.is_none() && coverage >= COVERAGE {
            outcome.n0 = Some(p.n);
            witness_at_n0 = need.witness.clone();
        }
        if witness_at_n0.is_none() && p.n == profiles.last().map(|q| q.n).unwrap_or(0) {
            witness_at_n0 = need.witness.clone();
        }
    }

    let mut jumps_ok = true;
    if !jumps.is_empty() {
        let system = CanonicalSystem::new(weight.clone(), JUMP_N)?;
        for j in &jumps {
            let measured = Quantity::JumpOfDeviation
                .evaluate(&system, j.at, JUMP_OFFSET)?
                .unwrap_or(f64::NAN);
            let measured = if fault { measured + 10.0 * JUMP_TOL } else { measured };
            let expected = j.size().abs();
            jumps_ok &= (measured - expected).abs() <= JUMP_TOL;
            report.constants.push(Constant {
                name: format!("jump@{}", j.at),
                n: JUMP_N,
                value: measured,
            });
            outcome.jumps.push((j.at, measured, expected));
        }
    }

    let note = errors_note(&profiles);
    report.pass = note.is_none() && outcome.n0.is_some() && jumps_ok;
    report.notes.extend(note);
    if let Some(n0) = outcome.n0 {
        report.notes.push(format!("n0 = {n0}"));
    } else {
        report.notes.push("n0 not reached".into());
    }
    report.witness = witness_at_n0.filter(|w| w.x.is_finite());
    Ok((report, outcome))
}

/// Points at which the exactness of `Σ_x` is checked.
pub fn exactness_points() -> Vec<f64> {
    (0..EXACTNESS_POINTS)
        .map(|k| -0.995 + 1.99 * (k as f64 + 0.5) / EXACTNESS_POINTS as f64)
        .collect()
}

/// Exactness of `Σ_x` through degree `2n - 1` at [`EXACTNESS_POINTS`] points per degree.
pub fn check_exactness(weight: &Weight, ns: &[usize], fault: bool) -> Result<CheckReport> {
    let xs = exactness_points();
    let mut constants = Vec::new();
    let mut worst = Extreme::new(Direction::Upper);
    for &n in ns {
        let system = CanonicalSystem::new(weight.clone(), n)?;
        let residuals: Vec<Result<f64>> = xs
            .par_iter()
            .map(|&x| Ok(Quantity::Exactness.evaluate(&system, x, 0.0)?.unwrap_or(f64::NAN)))
            .collect();
        let mut at_n = Extreme::new(Direction::Upper);
        for (&x, r) in xs.iter().zip(residuals) {
            let mut v = r?;
            if fault {
                v += 10.0 * EXACTNESS_TOL;
            }
            let w = Witness {
                quantity: Quantity::Exactness,
                n,
                x,
                aux: 0.0,
                value: v,
            };
            at_n.offer(v, || w.clone());
            worst.offer(v, || w);
        }
        constants.push(Constant {
            name: "max-residual".into(),
            n,
            value: at_n.value,
        });
    }
    Ok(CheckReport {
        name: "exactness".into(),
        constants,
        pass: worst.value <= EXACTNESS_TOL,
        witness: worst.witness,
        tolerance: format!("residual <= {EXACTNESS_TOL:e} at {EXACTNESS_POINTS} points per n"),
        gating: true,
        notes: Vec::new(),
    })
}

/// Stability of `C` in `λ <= (CM/n) max{√(1-x²), 1/n}`, of `c` in
/// `λ >= (cm/n) max{…}` and of the endpoint-weight constant.
pub fn check_lambda_bounds(weight: &Weight, profiles: &[Profile], fault: bool) -> Result<CheckReport> {
    let profiles = sorted(profiles);
    let mut upper = Series::new("C", Direction::Upper);
    let mut lower = Series::new("c", Direction::Lower);
    let mut endpoint = Series::new("endpoint", Direction::Upper);
    for p in &profiles {
        let ctx = ctx_of(weight, p);
        let mut up = Extreme::new(Direction::Upper);
        let mut lo = Extreme::new(Direction::Lower);
        for s in &p.samples {
            for (q, e) in [(Quantity::LambdaUpper, &mut up), (Quantity::LambdaLower, &mut lo)] {
                if let Some(v) = q.from_sample(s, &ctx) {
                    e.offer(v, || Witness {
                        quantity: q,
                        n: p.n,
                        x: s.x,
                        aux: 0.0,
                        value: v,
                    });
                }
            }
        }
        up.into_series_point(&mut upper, p.n);
        lo.into_series_point(&mut lower, p.n);

        let system = CanonicalSystem::new(weight.clone(), p.n)?;
        let values: Vec<Result<Option<f64>>> = p
            .samples
            .par_iter()
            .map(|s| Quantity::EndpointWeight.evaluate(&system, s.x, 0.0))
            .collect();
        let mut ep = Extreme::new(Direction::Upper);
        for (s, v) in p.samples.iter().zip(values) {
            if let Some(v) = v? {
                ep.offer(v, || Witness {
                    quantity: Quantity::EndpointWeight,
                    n: p.n,
                    x: s.x,
                    aux: 0.0,
                    value: v,
                });
            }
        }
        ep.into_series_point(&mut endpoint, p.n);
    }
    let mut series = [upper, lower, endpoint];
    if fault {
        series.iter_mut().for_each(Series::inject_fault);
    }
    let note = errors_note(&profiles);
    let mut report = stability_report("lambda-bounds", &series, note.is_none());
    report.notes.extend(note);
    Ok(report)
}

/// `π'` against centered differences of `π` with step [`FD_STEP`].
pub fn check_pi_prime_fd(system: &CanonicalSystem, profile: &Profile, fault: bool) -> Result<CheckReport> {
    let points: Vec<f64> = profile
        .samples
        .iter()
        .filter(|s| s.pi_prime.is_some())
        .map(|s| s.x)
        .collect();
    let diffs: Vec<Result<Option<f64>>> = points
        .par_iter()
        .map(|&x| Quantity::FdAgreement.evaluate(system, x, 0.0))
        .collect();
    let mut worst = Extreme::new(Direction::Upper);
    let mut good = 0usize;
    for (&x, d) in points.iter().zip(diffs) {
        let Some(mut d) = d? else { continue };
        if fault {
            d += 10.0 * FD_TOL;
        }
        if d <= FD_TOL {
            good += 1;
        }
        worst.offer(d, || Witness {
            quantity: Quantity::FdAgreement,
            n: profile.n,
            x,
            aux: 0.0,
            value: d,
        });
    }
    let fraction = good as f64 / points.len().max(1) as f64;
    Ok(CheckReport {
        name: "pi-prime-fd".into(),
        constants: vec![
            Constant {
                name: "fraction-within".into(),
                n: profile.n,
                value: fraction,
            },
            Constant {
                name: "max-difference".into(),
                n: profile.n,
                value: worst.value,
            },
        ],
        witness: worst.witness,
        pass: !points.is_empty() && fraction >= FD_FRACTION,
        tolerance: format!("|pi' - fd| <= {FD_TOL:e} at >= {FD_FRACTION} of non-excluded points, h = {FD_STEP:e}"),
        gating: true,
        notes: Vec::new(),
    })
}

/// Closed-form values for the unit weight: `β_k = k²/(4k² - 1)` for
/// `k <= 12`, Gaussian nodes `±1/√3` at `n = 2` and Lobatto weights
/// `(1/3, 4/3, 1/3)` at `n = 2`.
pub fn check_oracle_gates(fault: bool) -> Result<CheckReport> {
    let unit = presets::constant(1.0);
    let table = RecurrenceTable::compute(&unit, 12, Which::Plain)?;
    let recurrence = (1..=12)
        .map(|k| {
            let k2 = (k * k) as f64;
            (table.beta[k] - k2 / (4.0 * k2 - 1.0)).abs()
        })
        .fold(0.0, f64::max);
    let system = CanonicalSystem::new(unit, 2)?;
    let s3 = 1.0 / 3f64.sqrt();
    let g = system.gaussian_nodes();
    let gauss = (g[0] + s3).abs().max((g[1] - s3).abs());
    let lob = system.lobatto_rep().weights();
    let lobatto = lob
        .iter()
        .zip([1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut errors = [("recurrence", recurrence), ("gauss-n2", gauss), ("lobatto-n2", lobatto)];
    if fault {
        errors.iter_mut().for_each(|e| e.1 += 10.0 * ORACLE_TOL);
    }
    Ok(CheckReport {
        name: "oracle-gates".into(),
        constants: errors
            .iter()
            .map(|&(name, value)| Constant {
                name: name.into(),
                n: if name == "recurrence" { 12 } else { 2 },
                value,
            })
            .collect(),
        witness: None,
        pass: lob.len() == 3 && errors.iter().all(|e| e.1 <= ORACLE_TOL),
        tolerance: format!("absolute error <= {ORACLE_TOL:e}"),
        gating: true,
        notes: Vec::new(),
    })
}
