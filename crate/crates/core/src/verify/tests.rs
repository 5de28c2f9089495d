use super::*;
use crate::canonical::CanonicalSystem;
use crate::extremal::{profile, Profile};
use crate::weightfn::{presets, Regularity, Weight};
use crate::Error;

fn profiles(weight: &Weight, ns: &[usize], grid: usize) -> Vec<Profile> {
    ns.iter().map(|&n| profile(weight, n, grid).unwrap()).collect()
}

/// Re-evaluates the witness from a fresh system and compares.
fn assert_witness_reproduces(weight: &Weight, report: &CheckReport) {
    let Some(w) = &report.witness else { return };
    let system = CanonicalSystem::new(weight.clone(), w.n).unwrap();
    let again = w
        .quantity
        .evaluate(&system, w.x, w.aux)
        .unwrap()
        .unwrap_or_else(|| panic!("{}: witness {w} does not evaluate", report.name));
    let scale = w.value.abs().max(again.abs()).max(f64::MIN_POSITIVE);
    assert!(
        (again - w.value).abs() <= WITNESS_TOL * scale || (again - w.value).abs() <= 1e-15,
        "{}: witness {w} re-evaluates to {again}",
        report.name
    );
}

fn small_config() -> SuiteConfig {
    SuiteConfig {
        n: 6,
        grid: 300,
        ns: Some(vec![4, 8, 16]),
        eps: 1.0,
        fault: false,
    }
}

#[test]
fn unit_weight_cms_passes() {
    let w = presets::constant(1.0);
    let r = check_cms(&profile(&w, 4, 1000).unwrap(), false);
    assert!(r.pass, "{r}");
    assert!(r.witness.is_some());
    assert_witness_reproduces(&w, &r);
}

#[test]
fn cms_at_degree_one() {
    let r = check_cms(&profile(&presets::constant(1.0), 1, 200).unwrap(), false);
    assert!(r.pass, "{r}");
}

#[test]
fn perturbed_lambda_fails_cms() {
    let mut p = profile(&presets::ramp(), 4, 200).unwrap();
    p.samples[57].lambda += 1e-6;
    let r = check_cms(&p, false);
    assert!(!r.pass);
    let w = r.witness.expect("witness");
    assert_eq!(w.x, p.samples[57].x);
    assert!(w.value > CMS_TOL);
}

#[test]
fn ramp_constants_are_stable() {
    let w = presets::ramp();
    let ps = profiles(&w, &STABILITY_NS, 400);
    for r in [
        check_thm_lipschitz(&w, &ps, false).unwrap(),
        check_thm_abs_cont(&w, &ps, false).unwrap(),
    ] {
        assert!(r.pass, "{r}");
        for n in STABILITY_NS {
            assert!(r.constant("K+", n).unwrap() > 0.0, "{r}");
            assert!(r.constant("K-", n).unwrap() > 0.0, "{r}");
        }
        assert_witness_reproduces(&w, &r);
    }
}

#[test]
fn lipschitz_checks_need_a_regular_weight() {
    let w = presets::step();
    let ps = profiles(&w, &[4], 100);
    assert!(matches!(
        check_thm_lipschitz(&w, &ps, false),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        check_thm_abs_cont(&w, &ps, false),
        Err(Error::Precondition(_))
    ));
    let sobolev = presets::sqrt_ramp();
    let ps = profiles(&sobolev, &[4], 100);
    assert!(matches!(
        check_thm_lipschitz(&sobolev, &ps, false),
        Err(Error::Precondition(_))
    ));
    assert!(check_thm_abs_cont(&sobolev, &ps, false).is_ok());
}

#[test]
fn step_jump_matches_the_weight() {
    let w = presets::step();
    let (r, out) = check_thm_discont(&w, &profiles(&w, &[8, 16], 200), 0.2, false).unwrap();
    assert_eq!(out.jumps.len(), 1);
    let (s, measured, expected) = out.jumps[0];
    assert_eq!(s, 0.0);
    assert!((measured - expected).abs() <= 0.2, "{r}");
}

#[test]
fn step_reaches_a_coarse_eps() {
    let w = presets::step();
    let (r, out) = check_thm_discont(&w, &profiles(&w, &[8, 16, 32], 400), 3.0, false).unwrap();
    assert!(r.pass, "{r}");
    let n0 = out.n0.unwrap();
    assert!(n0 > 8);
    let &(_, c, coverage) = out.per_n.iter().find(|p| p.0 == n0).unwrap();
    assert!(coverage >= 0.9 && c >= 0.0);
    assert!(r.notes.contains(&format!("n0 = {n0}")));
    assert_witness_reproduces(&w, &r);
}

#[test]
fn step_misses_the_fine_eps_below_the_degree_cap() {
    let w = presets::step();
    let (r, out) = check_thm_discont(&w, &profiles(&w, &[8, 16, 32, 64], 1000), 0.2, false).unwrap();
    assert!(!r.pass);
    assert_eq!(out.n0, None);
    assert!(out.per_n.iter().all(|p| p.2 < 0.9), "{r}");
    assert!(r.notes.iter().any(|n| n == "n0 not reached"));
}

#[test]
fn deviation_is_within_eps_on_the_region() {
    let w = presets::step();
    let eps = 3.0;
    let ps = profiles(&w, &[16, 32], 400);
    let (_, out) = check_thm_discont(&w, &ps, eps, false).unwrap();
    for (p, &(n, c, _)) in ps.iter().zip(&out.per_n) {
        let nf = n as f64;
        for s in &p.samples {
            let Some(pp) = s.pi_prime else { continue };
            if nf * nf * (1.0 - s.x * s.x) > c && nf * s.x.abs() > c {
                assert!((pp - s.w).abs() <= eps, "n={n} x={}", s.x);
            }
        }
    }
}

#[test]
fn exactness_and_derivative_pass() {
    for w in [presets::constant(1.0), presets::ramp(), presets::step()] {
        let r = check_exactness(&w, &[1, 2, 5, 9], false).unwrap();
        assert!(r.pass, "{r}");
        assert_witness_reproduces(&w, &r);
        let system = CanonicalSystem::new(w.clone(), 4).unwrap();
        let r = check_pi_prime_fd(&system, &profile(&w, 4, 300).unwrap(), false).unwrap();
        assert!(r.pass, "{r}");
        assert_witness_reproduces(&w, &r);
    }
}

#[test]
fn oracle_gates_pass() {
    let r = check_oracle_gates(false).unwrap();
    assert!(r.pass, "{r}");
    assert_eq!(r.constants.len(), 3);
    assert!(!check_oracle_gates(true).unwrap().pass);
}

#[test]
fn circle_relation_for_unit_weight() {
    let w = presets::constant(1.0);
    let r = appendix_consistency(&CanonicalSystem::new(w.clone(), 2).unwrap(), false).unwrap();
    assert!(r.pass && !r.gating, "{r}");
    assert!(r.constant("max-relative-mismatch", 2).unwrap() <= 1e-6);
    assert_witness_reproduces(&w, &r);
}

#[test]
fn circle_relation_skips_tabulated_weights() {
    let r = appendix_consistency(&CanonicalSystem::new(presets::sqrt_ramp(), 4).unwrap(), false).unwrap();
    assert!(r.pass && r.constants.is_empty());
    assert_eq!(r.notes, ["skipped: weight has tabulated pieces"]);
}

#[test]
fn report_only_failures_do_not_gate() {
    let r = appendix_consistency(&CanonicalSystem::new(presets::ramp(), 3).unwrap(), true).unwrap();
    assert!(!r.pass && !r.failed_gate());
    assert!(r.to_string().contains("result: FAIL (report only)"));
}

#[test]
fn every_suite_fails_under_fault_injection() {
    for w in [presets::ramp(), presets::step()] {
        for suite in default_suites(&w.regularity) {
            let config = SuiteConfig {
                fault: true,
                ..small_config()
            };
            let reports = run_suite(&w, &[suite], &config).unwrap();
            assert!(!reports.is_empty());
            for r in reports {
                assert!(!r.pass, "{suite} on {:?} survives the fault:\n{r}", w.regularity);
            }
        }
    }
}

#[test]
fn witnesses_reproduce_for_every_suite() {
    for w in [presets::ramp(), presets::step(), presets::sqrt_ramp()] {
        let suites = default_suites(&w.regularity);
        for r in run_suite(&w, &suites, &small_config()).unwrap() {
            assert_witness_reproduces(&w, &r);
        }
    }
}

#[test]
fn constants_are_invariant_under_rescaling() {
    let w = presets::ramp();
    let w7 = w.scaled(7.0).unwrap();
    let suites = [
        Suite::Lipschitz,
        Suite::AbsCont,
        Suite::Polynomial,
        Suite::Geometry,
        Suite::Lambda,
        Suite::Qx,
        Suite::PaPrime,
    ];
    let config = SuiteConfig {
        ns: Some(vec![4, 8]),
        ..small_config()
    };
    let a = run_suite(&w, &suites, &config).unwrap();
    let b = run_suite(&w7, &suites, &config).unwrap();
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(&b) {
        assert_eq!(ra.pass, rb.pass, "{ra}\n{rb}");
        assert_eq!(ra.constants.len(), rb.constants.len());
        for (ca, cb) in ra.constants.iter().zip(&rb.constants) {
            assert_eq!((&ca.name, ca.n), (&cb.name, cb.n));
            let scale = ca.value.abs().max(cb.value.abs()).max(f64::MIN_POSITIVE);
            assert!(
                (ca.value - cb.value).abs() <= 1e-9 * scale,
                "{} {} n={}: {} vs {}",
                ra.name,
                ca.name,
                ca.n,
                ca.value,
                cb.value
            );
        }
    }
}

#[test]
fn unit_weight_geometry_passes() {
    let r = check_node_geometry(&presets::constant(1.0), &[4, 8, 16], false).unwrap();
    assert!(r.pass, "{r}");
    assert!(!r.notes.iter().any(|n| n.starts_with("violated")));
    assert_witness_reproduces(&presets::constant(1.0), &r);
}

#[test]
fn qx_naive_bound_holds() {
    let w = presets::ramp();
    let pairs = qx_pairs();
    assert_eq!(pairs.len(), 100);
    let r = check_qx_localization(&w, &pairs, &[8, 16], false).unwrap();
    assert!(r.pass, "{r}");
    assert!(r.constant("qx-naive", 8).unwrap() <= 1.0 + ROUNDING);
    assert_witness_reproduces(&w, &r);
}

#[test]
fn badkov_band_is_two_sided() {
    let w = presets::step();
    let r = check_polynomial_bounds(&w, &[4, 8, 16], false).unwrap();
    assert!(r.pass, "{r}");
    assert_eq!(badkov_grid().len(), 2000);
    let lo = r.constant("badkov-lower", 4).unwrap();
    let hi = r.constant("badkov-upper", 4).unwrap();
    assert!(0.0 < lo && lo < hi);
}

#[test]
fn suite_names_round_trip() {
    assert_eq!(SUITE_NAMES.len(), Suite::all().len());
    for (name, suite) in SUITE_NAMES.iter().zip(Suite::all()) {
        assert_eq!(name.parse::<Suite>().unwrap(), *suite);
        assert_eq!(suite.to_string(), *name);
    }
    assert!(matches!("bogus".parse::<Suite>(), Err(Error::Misuse(_))));
}

#[test]
fn default_suites_follow_regularity() {
    let lip = default_suites(&Regularity::Lipschitz { r: 1.0 });
    assert!(lip.contains(&Suite::Lipschitz) && lip.contains(&Suite::AbsCont) && !lip.contains(&Suite::Discont));
    let sob = default_suites(&Regularity::Sobolev {
        p: 2.0,
        derivative_norm: 1.0,
    });
    assert!(!sob.contains(&Suite::Lipschitz) && sob.contains(&Suite::AbsCont));
    let pw = default_suites(&Regularity::PiecewiseAbsCont);
    assert!(pw.contains(&Suite::Discont) && !pw.contains(&Suite::AbsCont) && !pw.contains(&Suite::Lipschitz));
    assert_eq!(lip.len(), 12);
}

#[test]
fn reports_render_as_text_and_csv() {
    let w = presets::constant(1.0);
    let reports = vec![
        check_cms(&profile(&w, 2, 50).unwrap(), false),
        check_oracle_gates(false).unwrap(),
    ];
    let mut text = Vec::new();
    write_reports_text(&reports, &mut text).unwrap();
    let text = String::from_utf8(text).unwrap();
    assert!(text.starts_with("check: cms\n"));
    assert!(text.contains("\n\ncheck: oracle-gates\n"));
    assert_eq!(text.matches("result: PASS").count(), 2);
    let mut csv = Vec::new();
    write_reports_csv(&reports, &mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert_eq!(csv.lines().next(), Some("check,kind,n,name,value"));
    assert!(csv.lines().any(|l| l.starts_with("cms,witness,2,x,")));
    assert!(csv.lines().any(|l| l == "oracle-gates,result,,pass,1"));
}

#[test]
fn drift_limits() {
    let mut s = Series::new("K", Direction::Upper);
    s.push(4, 1.0, None);
    s.push(8, 2.0, None);
    assert!(s.stable());
    s.push(16, 2.1, None);
    assert!(!s.stable());
    let mut l = Series::new("c", Direction::Lower);
    l.push(4, 1.0, None);
    l.push(8, 0.5, None);
    assert!(l.stable());
    l.push(16, 0.4, None);
    assert!(!l.stable());
    let mut zero = Series::new("c", Direction::Lower);
    zero.push(4, 0.0, None);
    assert!(!zero.stable());
}

#[test]
fn exact_bounds_fail_past_the_allowance() {
    let point = |v: f64| Extreme {
        direction: Direction::Upper,
        value: v,
        witness: None,
    };
    let mut e = Exact::new("b", Direction::Upper, 1.0, ROUNDING, false);
    e.push(4, point(1.0 + 0.5 * ROUNDING));
    assert!(e.pass());
    e.push(8, point(1.0 + 2.0 * ROUNDING));
    assert!(!e.pass());
    let mut strict = Exact::new("s", Direction::Lower, 0.0, 0.0, true);
    strict.push(4, point(0.0));
    assert!(!strict.pass());
}
