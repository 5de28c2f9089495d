use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::geometry::{check_node_geometry, check_pa_prime};
use super::localization::{check_qx_localization, qx_pairs};
use super::polynomials::check_polynomial_bounds;
use super::theorems::{
    check_cms, check_exactness, check_lambda_bounds, check_oracle_gates, check_pi_prime_fd, check_thm_abs_cont,
    check_thm_discont, check_thm_lipschitz,
};
use super::{appendix_consistency, CheckReport, STABILITY_NS};
use crate::canonical::CanonicalSystem;
use crate::extremal::{profile, Profile};
use crate::weightfn::{Regularity, Weight};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Cms,
    Lipschitz,
    AbsCont,
    Discont,
    Polynomial,
    Geometry,
    Lambda,
    Qx,
    PaPrime,
    Exactness,
    Derivative,
    Oracle,
    Appendix,
}

pub const SUITE_NAMES: [&str; 13] = [
    "cms",
    "lipschitz",
    "abs-cont",
    "discont",
    "polynomial",
    "geometry",
    "lambda",
    "qx",
    "pa-prime",
    "exactness",
    "derivative",
    "oracle",
    "appendix",
];

const ALL: [Suite; 13] = [
    Suite::Cms,
    Suite::Lipschitz,
    Suite::AbsCont,
    Suite::Discont,
    Suite::Polynomial,
    Suite::Geometry,
    Suite::Lambda,
    Suite::Qx,
    Suite::PaPrime,
    Suite::Exactness,
    Suite::Derivative,
    Suite::Oracle,
    Suite::Appendix,
];

impl Suite {
    pub fn all() -> &'static [Suite] {
        &ALL
    }

    pub fn name(&self) -> &'static str {
        SUITE_NAMES[ALL.iter().position(|s| s == self).expect("every suite is listed")]
    }

    /// Degrees the suite runs at unless overridden.
    pub fn default_ns(&self, n: usize) -> Vec<usize> {
        match self {
            Suite::Lipschitz | Suite::AbsCont | Suite::Polynomial | Suite::Geometry | Suite::PaPrime => {
                STABILITY_NS.to_vec()
            }
            Suite::Lambda => vec![4, 8, 16],
            Suite::Qx => vec![8, 16],
            Suite::Discont => vec![8, 16, 32, 64],
            Suite::Exactness => (1..=16).collect(),
            Suite::Cms | Suite::Derivative | Suite::Appendix => vec![n],
            Suite::Oracle => Vec::new(),
        }
    }

    fn uses_profiles(&self) -> bool {
        matches!(
            self,
            Suite::Cms | Suite::Lipschitz | Suite::AbsCont | Suite::Discont | Suite::Lambda | Suite::Derivative
        )
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SUITE_NAMES
            .iter()
            .position(|&name| name == s)
            .map(|k| ALL[k])
            .ok_or_else(|| Error::Misuse(format!("unknown suite '{s}'; known: {}", SUITE_NAMES.join(", "))))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Degree for the single-degree suites.
    pub n: usize,
    pub grid: usize,
    /// Overrides the per-suite degree lists.
    pub ns: Option<Vec<usize>>,
    /// `ε` of the discontinuous case.
    pub eps: f64,
    /// Perturb every measured quantity past its tolerance.
    pub fault: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n: 8,
            grid: 1000,
            ns: None,
            eps: 0.2,
            fault: false,
        }
    }
}

impl SuiteConfig {
    pub fn ns(&self, suite: Suite) -> Vec<usize> {
        let mut ns = self.ns.clone().unwrap_or_else(|| suite.default_ns(self.n));
        if suite == Suite::Oracle {
            ns.clear();
        }
        ns.sort_unstable();
        ns.dedup();
        ns
    }
}

/// Suites that apply to a weight of the given regularity.
pub fn default_suites(regularity: &Regularity) -> Vec<Suite> {
    ALL.iter()
        .copied()
        .filter(|s| match s {
            Suite::Lipschitz => matches!(regularity, Regularity::Lipschitz { .. }),
            Suite::AbsCont => !matches!(regularity, Regularity::PiecewiseAbsCont),
            Suite::Discont => matches!(regularity, Regularity::PiecewiseAbsCont),
            _ => true,
        })
        .collect()
}

/// Runs the suites, sharing profiles between them; reports are ordered by
/// check name.
pub fn run_suite(weight: &Weight, suites: &[Suite], config: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let mut wanted: Vec<usize> = suites
        .iter()
        .filter(|s| s.uses_profiles())
        .flat_map(|&s| config.ns(s))
        .collect();
    wanted.sort_unstable();
    wanted.dedup();
    let profiles: BTreeMap<usize, Profile> = wanted
        .par_iter()
        .map(|&n| Ok((n, profile(weight, n, config.grid)?)))
        .collect::<Result<_>>()?;
    let at = |ns: &[usize]| -> Vec<Profile> { ns.iter().map(|n| profiles[n].clone()).collect() };

    let fault = config.fault;
    let mut reports = Vec::new();
    for &suite in suites {
        let ns = config.ns(suite);
        match suite {
            Suite::Cms => reports.extend(ns.iter().map(|n| check_cms(&profiles[n], fault))),
            Suite::Lipschitz => reports.push(check_thm_lipschitz(weight, &at(&ns), fault)?),
            Suite::AbsCont => reports.push(check_thm_abs_cont(weight, &at(&ns), fault)?),
            Suite::Discont => reports.push(check_thm_discont(weight, &at(&ns), config.eps, fault)?.0),
            Suite::Polynomial => reports.push(check_polynomial_bounds(weight, &ns, fault)?),
            Suite::Geometry => reports.push(check_node_geometry(weight, &ns, fault)?),
            Suite::Lambda => reports.push(check_lambda_bounds(weight, &at(&ns), fault)?),
            Suite::Qx => reports.push(check_qx_localization(weight, &qx_pairs(), &ns, fault)?),
            Suite::PaPrime => reports.push(check_pa_prime(weight, &ns, fault)?),
            Suite::Exactness => reports.push(check_exactness(weight, &ns, fault)?),
            Suite::Derivative => {
                for &n in &ns {
                    let system = CanonicalSystem::new(weight.clone(), n)?;
                    reports.push(check_pi_prime_fd(&system, &profiles[&n], fault)?);
                }
            }
            Suite::Oracle => reports.push(check_oracle_gates(fault)?),
            Suite::Appendix => {
                for &n in &ns {
                    reports.push(appendix_consistency(&CanonicalSystem::new(weight.clone(), n)?, fault)?);
                }
            }
        }
    }
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(reports)
}
