//! Weights used throughout the examples and test suites.

use super::{Piece, Regularity, Weight, WeightSpec};

fn build(spec: WeightSpec) -> Weight {
    Weight::new(spec).expect("preset weights are valid")
}

/// `w ≡ c`.
pub fn constant(c: f64) -> Weight {
    build(WeightSpec {
        pieces: vec![Piece::polynomial(vec![c], -1.0, 1.0)],
        breakpoints: vec![],
        regularity: Regularity::Lipschitz { r: 0.0 },
        lower: c,
        upper: c,
    })
}

/// `w(t) = max{1, 1 + 4t}`, split into two polynomial pieces at 0.
pub fn ramp() -> Weight {
    build(WeightSpec {
        pieces: vec![
            Piece::polynomial(vec![1.0], -1.0, 0.0),
            Piece::polynomial(vec![1.0, 4.0], 0.0, 1.0),
        ],
        breakpoints: vec![0.0],
        regularity: Regularity::Lipschitz { r: 4.0 },
        lower: 1.0,
        upper: 5.0,
    })
}

/// `w(t) = 1` for `t < 0` and `5` for `t >= 0`.
pub fn step() -> Weight {
    build(WeightSpec {
        pieces: vec![
            Piece::polynomial(vec![1.0], -1.0, 0.0),
            Piece::polynomial(vec![5.0], 0.0, 1.0),
        ],
        breakpoints: vec![0.0],
        regularity: Regularity::PiecewiseAbsCont,
        lower: 1.0,
        upper: 5.0,
    })
}

/// `w(t) = 1 + √|t|` as a tabulated piece, sampled densely near the cusp.
/// Its derivative lies in `L_p` for `p < 2`; the regularity records `p = 3/2`.
pub fn sqrt_ramp() -> Weight {
    const K: usize = 40;
    let mut samples = Vec::with_capacity(2 * K + 1);
    for k in (1..=K).rev() {
        let t = -((k as f64 / K as f64).powi(2));
        samples.push((t, 1.0 + t.abs().sqrt()));
    }
    for k in 0..=K {
        let t = (k as f64 / K as f64).powi(2);
        samples.push((t, 1.0 + t.sqrt()));
    }
    build(WeightSpec {
        pieces: vec![Piece::tabulated(samples, -1.0, 1.0)],
        breakpoints: vec![],
        regularity: Regularity::Sobolev {
            p: 1.5,
            derivative_norm: 2.0,
        },
        lower: 1.0,
        upper: 2.0,
    })
}

/// `w(t) = 1 / (2 + t)`, a smooth non-polynomial weight.
pub fn reciprocal() -> Weight {
    build(WeightSpec {
        pieces: vec![Piece::reciprocal(vec![2.0, 1.0], -1.0, 1.0)],
        breakpoints: vec![],
        regularity: Regularity::Lipschitz { r: 1.0 },
        lower: 1.0 / 3.0,
        upper: 1.0,
    })
}

/// Looks a preset up by name.
pub fn by_name(name: &str) -> Option<Weight> {
    match name {
        "constant" => Some(constant(1.0)),
        "ramp" => Some(ramp()),
        "step" => Some(step()),
        "sqrt-ramp" | "sqrt_ramp" => Some(sqrt_ramp()),
        "reciprocal" => Some(reciprocal()),
        _ => None,
    }
}
