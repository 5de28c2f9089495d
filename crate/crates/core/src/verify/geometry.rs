use rayon::prelude::*;

use super::quantity::Quantity;
use super::{combined_report, CheckReport, Direction, Exact, Extreme, Series, Witness, ROUNDING};
use crate::canonical::CanonicalSystem;
use crate::weightfn::Weight;
use crate::Result;

/// Parameters at which interlacing, spacing and the node bounds are sampled.
pub const GEOMETRY_A: [f64; 9] = [-100.0, -10.0, -1.0, -0.1, 0.0, 0.1, 1.0, 10.0, 100.0];
/// Pairs `(lo, hi)` for the separation bound.
pub const SEPARATION_PAIRS: [(f64, f64); 4] = [(0.0, 1.0), (1.0, 10.0), (-1.0, 0.0), (-10.0, -1.0)];
/// Largest degree at which the Legendre-root bracket is checked.
pub const LEGENDRE_MAX_N: usize = 16;
/// Points in the grid on which `|P_a'|` is bounded from below.
pub const PA_PRIME_POINTS: usize = 200;

fn is_constant(weight: &Weight) -> bool {
    weight.lower == weight.upper
}

/// Extreme of `q` over the given `(x, aux)` points at degree `n`.
fn extreme(system: &CanonicalSystem, q: Quantity, direction: Direction, points: &[(f64, f64)]) -> Result<Extreme> {
    let values: Vec<Result<Option<f64>>> = points.par_iter().map(|&(x, aux)| q.evaluate(system, x, aux)).collect();
    let mut e = Extreme::new(direction);
    for (&(x, aux), v) in points.iter().zip(values) {
        if let Some(v) = v? {
            e.offer(v, || Witness {
                quantity: q,
                n: system.n(),
                x,
                aux,
                value: v,
            });
        }
    }
    Ok(e)
}

fn indices(lo: usize, hi: usize) -> Vec<(f64, f64)> {
    (lo..=hi).map(|i| (0.0, i as f64)).collect()
}

/// Node geometry: interlacing with `η`, the Legendre-root bracket (constant
/// weights), the comparison with Legendre roots, node-to-endpoint distances
/// at `a = 0` and at every sampled `a`, spacing, separation in `a` and the
/// segment lower bounds for `φ` near `η_r` and `ψ` near `ξ_r(0)`.
pub fn check_node_geometry(weight: &Weight, ns: &[usize], fault: bool) -> Result<CheckReport> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    let mut series: Vec<Series> = Vec::new();
    let mut exact: Vec<Exact> = Vec::new();

    let mut add_series = |name: String, direction: Direction, n: usize, e: Extreme| {
        let s = match series.iter_mut().find(|s| s.name == name) {
            Some(s) => s,
            None => {
                series.push(Series::new(name, direction));
                series.last_mut().expect("just pushed")
            }
        };
        e.into_series_point(s, n);
    };
    let mut exact_interlacing = Exact::new("interlacing", Direction::Lower, 0.0, 0.0, true);
    let mut exact_bracket = Exact::new("legendre-bracket", Direction::Lower, 0.0, 0.0, false);
    let mut exact_comparison = Exact::new("legendre-comparison", Direction::Lower, 0.0, ROUNDING, false);

    for &n in &ns {
        let system = CanonicalSystem::new(weight.clone(), n)?;
        let all = indices(1, n);

        let mut inter = Extreme::new(Direction::Lower);
        for &a in &GEOMETRY_A {
            let e = extreme(&system, Quantity::Interlacing { a }, Direction::Lower, &all)?;
            if let Some(w) = e.witness {
                inter.offer(e.value, || w);
            }
        }
        exact_interlacing.push(n, inter);

        if is_constant(weight) && n <= LEGENDRE_MAX_N {
            exact_bracket.push(n, extreme(&system, Quantity::LegendreBracket, Direction::Lower, &all)?);
        }
        let mut cmp = Extreme::new(Direction::Lower);
        for right in [false, true] {
            let e = extreme(&system, Quantity::LegendreComparison { right }, Direction::Lower, &all)?;
            if let Some(w) = e.witness {
                cmp.offer(e.value, || w);
            }
        }
        exact_comparison.push(n, cmp);

        for upper in [true, false] {
            let direction = if upper { Direction::Upper } else { Direction::Lower };
            for right in [false, true] {
                let q = Quantity::NodeEndpoint { upper, right };
                add_series(q.to_string(), direction, n, extreme(&system, q, direction, &all)?);
            }
        }

        let extended: Vec<f64> = [f64::NEG_INFINITY]
            .into_iter()
            .chain(GEOMETRY_A)
            .chain([f64::INFINITY])
            .collect();
        for upper in [true, false] {
            let direction = if upper { Direction::Upper } else { Direction::Lower };
            for right in [false, true] {
                let mut e = Extreme::new(direction);
                for &a in &extended {
                    let q = Quantity::GaussNode { a, upper, right };
                    let ea = extreme(&system, q, direction, &all)?;
                    if let Some(w) = ea.witness {
                        e.offer(ea.value, || w);
                    }
                }
                let side = if right { "right" } else { "left" };
                let bound = if upper { "upper" } else { "lower" };
                add_series(format!("gauss-node({bound},{side})"), direction, n, e);
            }
        }

        if n >= 2 {
            let gaps = indices(1, n - 1);
            let mut e = Extreme::new(Direction::Upper);
            for &a in &extended {
                let ea = extreme(&system, Quantity::Spacing { a }, Direction::Upper, &gaps)?;
                if let Some(w) = ea.witness {
                    e.offer(ea.value, || w);
                }
            }
            add_series("spacing".into(), Direction::Upper, n, e);
        }

        for (lo, hi) in SEPARATION_PAIRS {
            let q = Quantity::Separation { lo, hi };
            add_series(
                q.to_string(),
                Direction::Lower,
                n,
                extreme(&system, q, Direction::Lower, &all)?,
            );
        }

        if n >= 2 {
            add_series(
                Quantity::SegmentPhi.to_string(),
                Direction::Lower,
                n,
                extreme(&system, Quantity::SegmentPhi, Direction::Lower, &indices(1, n - 1))?,
            );
        }
        add_series(
            Quantity::SegmentPsi.to_string(),
            Direction::Lower,
            n,
            extreme(&system, Quantity::SegmentPsi, Direction::Lower, &all)?,
        );
    }

    exact.push(exact_interlacing);
    if !exact_bracket.points.is_empty() {
        exact.push(exact_bracket);
    }
    exact.push(exact_comparison);
    if fault {
        series.iter_mut().for_each(Series::inject_fault);
        exact.iter_mut().for_each(Exact::inject_fault);
    }
    Ok(combined_report("node-geometry", &series, &exact, true))
}

/// Points of the `|P_a'|` grid, interior to `(-1, 1)`.
pub fn pa_prime_grid() -> Vec<f64> {
    (0..PA_PRIME_POINTS)
        .map(|k| -1.0 + 2.0 * (k as f64 + 0.5) / PA_PRIME_POINTS as f64)
        .collect()
}

/// Stability of the lower bound on `|P_a'|` at `x = ξ_r(a)`, and on `|ψ'|`
/// at `x = η_r`, over [`pa_prime_grid`] and the zeros of `ψ`.
pub fn check_pa_prime(weight: &Weight, ns: &[usize], fault: bool) -> Result<CheckReport> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    let mut series = Series::new(Quantity::PaPrime.to_string(), Direction::Lower);
    for &n in &ns {
        let system = CanonicalSystem::new(weight.clone(), n)?;
        let eta = system.eta();
        let points: Vec<(f64, f64)> = pa_prime_grid()
            .into_iter()
            .chain(eta[1..n].iter().copied())
            .map(|x| (x, 0.0))
            .collect();
        extreme(&system, Quantity::PaPrime, Direction::Lower, &points)?.into_series_point(&mut series, n);
    }
    if fault {
        series.inject_fault();
    }
    Ok(combined_report("pa-prime", &[series], &[], true))
}
