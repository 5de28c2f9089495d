use cms_core::canonical::CanonicalSystem;
use cms_core::extremal::{self, pi_at, read_samples};
use cms_core::orthopoly::{RecurrenceTable, Which};
use cms_core::verify::oracle;
use cms_core::weightfn::{self, presets, Weight};
use proptest::prelude::*;

fn system(weight: Weight, n: usize) -> CanonicalSystem {
    CanonicalSystem::new(weight, n).unwrap()
}

#[test]
fn ramp_recurrence_matches_exact_gram_schmidt() {
    let ramp = presets::ramp();
    for which in [Which::Plain, Which::Modified] {
        let table = RecurrenceTable::compute(&ramp, 12, which).unwrap();
        let (alpha, beta) = oracle::recurrence(ramp.spec(), 12, which == Which::Modified).unwrap();
        for k in 0..12 {
            let a = oracle::to_f64(&alpha[k]);
            let b = oracle::to_f64(&beta[k]);
            assert!((table.alpha[k] - a).abs() < 1e-12, "{which:?} alpha[{k}]");
            assert!((table.beta[k] - b).abs() < 1e-12 * b.max(1.0), "{which:?} beta[{k}]");
        }
    }
}

#[test]
fn unit_weight_degree_one_in_closed_form() {
    // Moments 2, 0: the largest atom at x sits opposite a single atom at the far endpoint.
    let s = system(presets::constant(1.0), 1);
    for x in [-0.9, -0.5, -0.1, 0.3, 0.75] {
        let rep = s.rep_of_x(x).unwrap();
        let (pi, pi_lower, lambda) = pi_at(&s, &rep).unwrap();
        let expected = 2.0 / (1.0 + f64::abs(x));
        assert!((lambda - expected).abs() < 1e-13, "{x}");
        let (lo, hi) = if x > 0.0 {
            (2.0 - expected, 2.0)
        } else {
            (0.0, expected)
        };
        assert!((pi_lower - lo).abs() < 1e-13 && (pi - hi).abs() < 1e-13, "{x}");
    }
}

#[test]
fn profile_csv_reads_back() {
    let profile = extremal::profile(&presets::step(), 4, 120).unwrap();
    let mut buf = Vec::new();
    profile.write_csv(&mut buf).unwrap();
    let back = read_samples(&buf[..]).unwrap();
    assert_eq!(back.len(), profile.samples.len());
    for (a, b) in back.iter().zip(&profile.samples) {
        assert_eq!((a.x, a.pi, a.pi_lower, a.lambda), (b.x, b.pi, b.pi_lower, b.lambda));
        assert_eq!((a.pi_prime, a.w, a.excluded), (b.pi_prime, b.w, b.excluded));
    }
    assert_eq!(profile.monotonicity_defect(), (0.0, 0.0));
}

#[test]
fn weight_file_keeps_the_digest() {
    let dir = tempfile::tempdir().unwrap();
    for w in [presets::ramp(), presets::step(), presets::sqrt_ramp()] {
        let path = dir.path().join("w.json");
        weightfn::write_file(w.spec(), &path).unwrap();
        let back = weightfn::read_file(&path).unwrap();
        assert_eq!(weightfn::digest(back.spec()), weightfn::digest(w.spec()));
    }
}

fn polynomial_weight() -> impl Strategy<Value = (Weight, &'static str)> {
    prop_oneof![
        Just((presets::constant(1.0), "constant")),
        Just((presets::ramp(), "ramp")),
        Just((presets::step(), "step")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn representation_reproduces_exact_moments(
        (w, name) in polynomial_weight(),
        n in 1usize..7,
        x in -0.98f64..0.98,
    ) {
        let s = system(w.clone(), n);
        let rep = s.rep_of_x(x).unwrap();
        let moments = oracle::moments(w.spec(), 2 * n).unwrap();
        for (j, m) in moments.iter().enumerate() {
            let quad: f64 = rep.positions().iter().zip(rep.weights()).map(|(t, c)| c * t.powi(j as i32)).sum();
            let exact = oracle::to_f64(m);
            prop_assert!((quad - exact).abs() < 1e-11 * s.mass(), "{name} n={n} x={x} j={j}: {quad} vs {exact}");
        }
    }

    #[test]
    fn reflection_swaps_upper_and_lower(
        (w, name) in polynomial_weight(),
        n in 1usize..7,
        x in -0.95f64..0.95,
    ) {
        let s = system(w.clone(), n);
        let r = system(w.reversed(), n);
        let (pi, pi_lower, lambda) = pi_at(&s, &s.rep_of_x(x).unwrap()).unwrap();
        let (rpi, rpi_lower, rlambda) = pi_at(&r, &r.rep_of_x(-x).unwrap()).unwrap();
        let tol = 1e-10 * s.mass();
        prop_assert!((lambda - rlambda).abs() < tol, "{name} n={n} x={x}");
        prop_assert!((rpi - (s.mass() - pi_lower)).abs() < tol, "{name} n={n} x={x}");
        prop_assert!((rpi_lower - (s.mass() - pi)).abs() < tol, "{name} n={n} x={x}");
    }
}
