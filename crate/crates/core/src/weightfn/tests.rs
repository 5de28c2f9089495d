use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::verify::oracle;

fn bad_breakpoint_spec() -> WeightSpec {
    WeightSpec {
        pieces: vec![Piece::polynomial(vec![1.0], -1.0, 1.0)],
        breakpoints: vec![1.5],
        regularity: Regularity::PiecewiseAbsCont,
        lower: 1.0,
        upper: 1.0,
    }
}

#[test]
fn constant_spec_validates() {
    let diag = presets::constant(1.0).validate().unwrap();
    assert!(diag.passed(), "{diag}");
}

#[test]
fn breakpoint_outside_interval_fails_with_witness() {
    let diag = bad_breakpoint_spec().validate().unwrap();
    assert!(!diag.passed());
    let fail: Vec<_> = diag.failures().map(|c| c.name).collect();
    assert!(fail.contains(&"breakpoint outside (-1,1)"), "{diag}");
    let c = diag.failures().find(|c| c.name == spec::BREAKPOINT_RANGE).unwrap();
    assert_eq!(c.witness, Some(1.5));
    assert!(matches!(Weight::new(bad_breakpoint_spec()), Err(Error::Invalid(_))));
}

#[test]
fn ramp_validates() {
    assert!(presets::ramp().validate().unwrap().passed());
    assert!(presets::step().validate().unwrap().passed());
    assert!(presets::sqrt_ramp().validate().unwrap().passed());
    assert!(presets::reciprocal().validate().unwrap().passed());
}

#[test]
fn bound_violation_is_witnessed() {
    let mut spec = presets::ramp().into_spec();
    spec.upper = 4.0;
    let diag = spec.validate().unwrap();
    let c = diag.failures().find(|c| c.name == spec::BOUNDS).unwrap();
    let t = c.witness.unwrap();
    assert!(1.0 + 4.0 * t > 4.0);
}

#[test]
fn gaps_and_overlaps_are_reported() {
    let mut spec = presets::ramp().into_spec();
    spec.pieces[1].lo = 0.1;
    let diag = spec.validate().unwrap();
    assert!(diag.failures().any(|c| c.name == spec::TILING));
    spec.pieces[1].lo = -0.1;
    let diag = spec.validate().unwrap();
    assert!(diag.failures().any(|c| c.detail.contains("overlapping")));
}

#[test]
fn malformed_piece_list_names_index() {
    let mut spec = presets::ramp().into_spec();
    spec.pieces[1] = Piece::polynomial(vec![], 0.0, 1.0);
    match spec.validate() {
        Err(Error::Structural { index, .. }) => assert_eq!(index, 1),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn eval_examples() {
    assert_eq!(presets::constant(1.0).eval(0.3).unwrap(), 1.0);
    assert_eq!(presets::ramp().eval(0.5).unwrap(), 3.0);
    let step = presets::step();
    assert_eq!(step.eval(0.0).unwrap(), 5.0);
    assert_eq!(step.left_limit(0.0).unwrap(), 1.0);
    assert_eq!(step.eval(-1.0).unwrap(), 1.0);
    assert_eq!(step.eval(1.0).unwrap(), 5.0);
    assert!(matches!(step.eval(1.5), Err(Error::Domain { .. })));
}

#[test]
fn jumps_only_where_limits_differ() {
    assert!(presets::ramp().jumps().is_empty());
    let j = presets::step().jumps();
    assert_eq!(j.len(), 1);
    assert_eq!(j[0].size(), 4.0);
}

#[test]
fn integration_examples() {
    let one = presets::constant(1.0);
    assert_eq!(one.integrate_poly(&[1.0], -1.0, 1.0).unwrap(), 2.0);
    assert!((one.integrate_poly(&[0.0, 0.0, 1.0], -1.0, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-16);
    assert_eq!(presets::ramp().total_mass().unwrap(), 4.0);
    assert_eq!(presets::step().total_mass().unwrap(), 6.0);
    assert!(matches!(
        one.integrate_poly(&[1.0], 0.5, 0.2),
        Err(Error::Domain { .. })
    ));
}

#[test]
fn non_polynomial_pieces_integrate_accurately() {
    let r = presets::reciprocal();
    let mass = r.total_mass().unwrap();
    assert!((mass - 3f64.ln()).abs() < 1e-14);
    // ∫ t/(2+t) = 2 - 2 ln 3
    let m1 = r.integrate_poly(&[0.0, 1.0], -1.0, 1.0).unwrap();
    assert!((m1 - (2.0 - 2.0 * 3f64.ln())).abs() < 1e-14);
    let s = presets::sqrt_ramp();
    // interpolant is close to 1 + √|t|, whose mass is 2 + 4/3
    assert!((s.total_mass().unwrap() - 10.0 / 3.0).abs() < 1e-3);
}

#[test]
fn discretization_reproduces_moments() {
    for w in [
        presets::ramp(),
        presets::step(),
        presets::sqrt_ramp(),
        presets::reciprocal(),
    ] {
        let d = w.discretize(40);
        assert!(d.weights.iter().all(|&x| x > 0.0));
        for k in 0..=40 {
            let mut mono = vec![0.0; k + 1];
            mono[k] = 1.0;
            let exact = w.integrate_poly(&mono, -1.0, 1.0).unwrap();
            let got = d.integrate(|t| t.powi(k as i32));
            assert!((got - exact).abs() < 1e-13 * d.mass(), "k={k} {got} {exact}");
        }
    }
}

#[test]
fn dense_random_evaluation_respects_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for w in [
        presets::constant(1.0),
        presets::ramp(),
        presets::step(),
        presets::sqrt_ramp(),
    ] {
        for _ in 0..10_000 {
            let t: f64 = rng.random_range(-1.0..=1.0);
            let v = w.eval(t).unwrap();
            assert!(v >= w.lower - 1e-12 && v <= w.upper + 1e-12);
        }
    }
}

#[test]
fn file_round_trip_is_bit_exact() {
    let mut spec = presets::sqrt_ramp().into_spec();
    spec.lower = 0.1 + 0.2;
    for s in [spec, presets::ramp().into_spec(), presets::reciprocal().into_spec()] {
        let text = to_json(&s);
        let back = from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(to_json(&back), text);
        assert_eq!(digest(&back), digest(&s));
    }
}

#[test]
fn file_errors() {
    assert!(matches!(from_json("{"), Err(Error::Format(_))));
    let text = to_json(presets::ramp().spec()).replace("\"polynomial\"", "\"spline\"");
    assert!(matches!(from_json(&text), Err(Error::Structural { index: 0, .. })));
}

#[test]
fn reversal_mirrors_integrals() {
    let w = presets::ramp();
    let r = w.reversed();
    assert!(r.validate().unwrap().passed());
    let a = w.integrate_poly(&[0.0, 1.0], -1.0, 0.3).unwrap();
    let b = r.integrate_poly(&[0.0, -1.0], -0.3, 1.0).unwrap();
    assert!((a - b).abs() < 1e-15);
}

/// `∫ Σ |c_k| |t|^k w`, the natural scale for the rounding error.
fn abs_scale(w: &Weight, coeffs: &[f64], lo: f64, hi: f64) -> f64 {
    let f = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t.abs() + c.abs());
    w.integrate(f, lo, hi).unwrap().max(f64::MIN_POSITIVE)
}

fn random_poly(max_degree: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..=max_degree + 1)
}

proptest! {
    #[test]
    fn polynomial_pieces_match_rational_oracle(
        coeffs in random_poly(10),
        a in -1.0f64..1.0,
        b in -1.0f64..1.0,
        which in 0usize..3,
    ) {
        let w = [presets::constant(1.0), presets::ramp(), presets::step()][which].clone();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let got = w.integrate_poly(&coeffs, lo, hi).unwrap();
        let exact = oracle::to_f64(&oracle::poly_integral(&w, &coeffs, lo, hi).unwrap());
        let scale = abs_scale(&w, &coeffs, lo, hi);
        prop_assert!((got - exact).abs() <= 1e-14 * scale, "{got} vs {exact}");
    }

    #[test]
    fn integration_is_additive(
        coeffs in random_poly(6),
        a in -1.0f64..1.0,
        b in -1.0f64..1.0,
        split in 0.0f64..1.0,
        on_breakpoint in any::<bool>(),
        which in 0usize..5,
    ) {
        let w = [
            presets::constant(1.0),
            presets::ramp(),
            presets::step(),
            presets::sqrt_ramp(),
            presets::reciprocal(),
        ][which].clone();
        let (lo, hi) = (a.min(b).min(-0.01), a.max(b).max(0.01));
        let mid = if on_breakpoint { 0.0 } else { lo + split * (hi - lo) };
        let whole = w.integrate_poly(&coeffs, lo, hi).unwrap();
        let parts = w.integrate_poly(&coeffs, lo, mid).unwrap() + w.integrate_poly(&coeffs, mid, hi).unwrap();
        let scale = abs_scale(&w, &coeffs, lo, hi);
        prop_assert!((whole - parts).abs() <= 1e-12 * scale);
    }
}
