use rayon::prelude::*;

use super::quantity::Quantity;
use super::{combined_report, CheckReport, Direction, Extreme, Series, Witness};
use crate::canonical::CanonicalSystem;
use crate::weightfn::Weight;
use crate::Result;

pub const BADKOV_POINTS: usize = 2000;

/// Midpoints of a uniform partition of `[-1, 1]` into [`BADKOV_POINTS`] cells.
pub fn badkov_grid() -> Vec<f64> {
    (0..BADKOV_POINTS)
        .map(|k| -1.0 + 2.0 * (k as f64 + 0.5) / BADKOV_POINTS as f64)
        .collect()
}

/// The two-sided band of `(|φ| + √(1-x²)|ψ|) / min{n, 1/√(1-x²)}^{1/2}` and
/// the constant of `|φ'| <= C n min{n, 1/√(1-x²)}^{3/2}`, per degree.
pub fn check_polynomial_bounds(weight: &Weight, ns: &[usize], fault: bool) -> Result<CheckReport> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    let grid = badkov_grid();
    let mut upper = Series::new("badkov-upper", Direction::Upper);
    let mut lower = Series::new("badkov-lower", Direction::Lower);
    let mut bernstein = Series::new(Quantity::Bernstein.to_string(), Direction::Upper);
    for &n in &ns {
        let system = CanonicalSystem::new(weight.clone(), n)?;
        let values: Vec<Result<(Option<f64>, Option<f64>)>> = grid
            .par_iter()
            .map(|&x| {
                Ok((
                    Quantity::Badkov.evaluate(&system, x, 0.0)?,
                    Quantity::Bernstein.evaluate(&system, x, 0.0)?,
                ))
            })
            .collect();
        let mut hi = Extreme::new(Direction::Upper);
        let mut lo = Extreme::new(Direction::Lower);
        let mut der = Extreme::new(Direction::Upper);
        for (&x, v) in grid.iter().zip(values) {
            let (b, d) = v?;
            let witness = |quantity, value| Witness {
                quantity,
                n,
                x,
                aux: 0.0,
                value,
            };
            if let Some(b) = b {
                hi.offer(b, || witness(Quantity::Badkov, b));
                lo.offer(b, || witness(Quantity::Badkov, b));
            }
            if let Some(d) = d {
                der.offer(d, || witness(Quantity::Bernstein, d));
            }
        }
        hi.into_series_point(&mut upper, n);
        lo.into_series_point(&mut lower, n);
        der.into_series_point(&mut bernstein, n);
    }
    let mut series = [upper, lower, bernstein];
    if fault {
        series.iter_mut().for_each(Series::inject_fault);
    }
    Ok(combined_report("polynomial-bounds", &series, &[], true))
}
