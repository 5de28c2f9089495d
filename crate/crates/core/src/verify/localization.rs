use rayon::prelude::*;

use super::quantity::{Ctx, Quantity};
use super::{combined_report, CheckReport, Direction, Exact, Extreme, Series, Witness, ROUNDING};
use crate::canonical::CanonicalSystem;
use crate::extremal::build_qx;
use crate::weightfn::Weight;
use crate::Result;

/// Number of `x` values, and of `t` values per `x`, in [`qx_pairs`].
pub const QX_SIDE: usize = 10;

/// `x ∈ {-0.9, -0.7, …, 0.9}` against the Chebyshev points
/// `t_j = cos((2j+1)π/20)`.
pub fn qx_pairs() -> Vec<(f64, f64)> {
    let xs = (0..QX_SIDE).map(|k| -0.9 + 0.2 * k as f64);
    let ts: Vec<f64> = (0..QX_SIDE)
        .map(|j| ((2 * j + 1) as f64 * std::f64::consts::PI / (2 * QX_SIDE) as f64).cos())
        .collect();
    xs.flat_map(|x| ts.iter().map(move |&t| (x, t))).collect()
}

/// `q_x(t) <= (M/m)(1 + sgn(x-t)x)/(1 + sgn(x-t)t)` at every pair, and
/// stability of `sup q_x` and of the decay constant in
/// `q_x(t) <= C/(n max{1, n√(1-t²)}(t-x)²)`.
pub fn check_qx_localization(weight: &Weight, pairs: &[(f64, f64)], ns: &[usize], fault: bool) -> Result<CheckReport> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    let mut xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut naive = Exact::new(Quantity::QxNaive.to_string(), Direction::Upper, 1.0, ROUNDING, false);
    let mut sup = Series::new(Quantity::QxSup.to_string(), Direction::Upper);
    let mut decay = Series::new(Quantity::QxDecay.to_string(), Direction::Upper);
    for &n in &ns {
        let system = CanonicalSystem::new(weight.clone(), n)?;
        let ctx = Ctx::of(&system);
        let built: Vec<Result<_>> = xs
            .par_iter()
            .map(|&x| build_qx(&system, &system.rep_of_x(x)?))
            .collect();
        let mut extremes = [
            Extreme::new(Direction::Upper),
            Extreme::new(Direction::Upper),
            Extreme::new(Direction::Upper),
        ];
        for (&x, q) in xs.iter().zip(built) {
            let q = q?;
            for &(_, t) in pairs.iter().filter(|p| p.0 == x) {
                let value = q.value(t);
                for (quantity, e) in [Quantity::QxNaive, Quantity::QxSup, Quantity::QxDecay]
                    .into_iter()
                    .zip(extremes.iter_mut())
                {
                    if let Some(v) = quantity.from_qx(value, x, t, &ctx) {
                        e.offer(v, || Witness {
                            quantity,
                            n,
                            x,
                            aux: t,
                            value: v,
                        });
                    }
                }
            }
        }
        let [e_naive, e_sup, e_decay] = extremes;
        naive.push(n, e_naive);
        e_sup.into_series_point(&mut sup, n);
        e_decay.into_series_point(&mut decay, n);
    }
    let mut series = [sup, decay];
    let mut exact = [naive];
    if fault {
        series.iter_mut().for_each(Series::inject_fault);
        exact.iter_mut().for_each(Exact::inject_fault);
    }
    Ok(combined_report("qx-localization", &series, &exact, true))
}
