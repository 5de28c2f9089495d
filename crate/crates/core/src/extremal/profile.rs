use std::io::{Read, Write};

use rayon::prelude::*;

use super::{sample_or_record, ExtremalSample};
use crate::canonical::CanonicalSystem;
use crate::fmt::{parse_real, real17};
use crate::weightfn::{digest, Weight};
use crate::{Error, Result};

pub const PROFILE_HEADER: [&str; 7] = ["x", "pi", "pi_lower", "lambda", "pi_prime", "w", "excluded"];

/// Extremal samples on the interior points of a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    /// SHA-256 of the canonical weight-spec serialization.
    pub digest: String,
    pub n: usize,
    pub grid: usize,
    pub mass: f64,
    pub samples: Vec<ExtremalSample>,
    /// Sample points at which `π'` was not evaluated.
    pub excluded: Vec<f64>,
    pub gaussian_nodes: Vec<f64>,
    /// Interior Lobatto nodes `η_1, …, η_{n-1}`.
    pub lobatto_nodes: Vec<f64>,
}

/// Interior points of the `grid`-point uniform grid on `[-1, 1]`. A grid
/// without two interior points is replaced by `±1/3`.
pub fn grid_points(grid: usize) -> Vec<f64> {
    if grid < 4 {
        return vec![-1.0 / 3.0, 1.0 / 3.0];
    }
    let step = 2.0 / (grid - 1) as f64;
    (1..grid - 1).map(|k| -1.0 + step * k as f64).collect()
}

/// Grid spacing used for the exclusion radius.
pub fn grid_step(grid: usize) -> f64 {
    if grid < 4 {
        2.0 / 3.0
    } else {
        2.0 / (grid - 1) as f64
    }
}

pub fn profile(weight: &Weight, n: usize, grid: usize) -> Result<Profile> {
    let system = CanonicalSystem::new(weight.clone(), n)?;
    profile_with(&system, grid)
}

/// Samples every grid point concurrently; order is the grid order.
/// `π'` is skipped within half a grid step of a Gaussian or Lobatto node.
pub fn profile_with(system: &CanonicalSystem, grid: usize) -> Result<Profile> {
    if grid < 2 {
        return Err(Error::Domain {
            what: "grid size",
            value: grid as f64,
            domain: ">= 2",
        });
    }
    let radius = 0.5 * grid_step(grid);
    let samples: Vec<ExtremalSample> = grid_points(grid)
        .into_par_iter()
        .map(|x| sample_or_record(system, x, radius))
        .collect();
    let n = system.n();
    Ok(Profile {
        digest: digest(system.weight().spec()),
        n,
        grid,
        mass: system.mass(),
        excluded: samples.iter().filter(|s| s.excluded).map(|s| s.x).collect(),
        samples,
        gaussian_nodes: system.gaussian_nodes(),
        lobatto_nodes: system.eta()[1..n].to_vec(),
    })
}

impl Profile {
    /// Samples whose evaluation failed.
    pub fn failures(&self) -> impl Iterator<Item = &ExtremalSample> {
        self.samples.iter().filter(|s| s.error.is_some())
    }

    /// Largest decrease of `π` and of `π̲` between consecutive samples.
    pub fn monotonicity_defect(&self) -> (f64, f64) {
        let drop =
            |f: fn(&ExtremalSample) -> f64| self.samples.windows(2).map(|w| f(&w[0]) - f(&w[1])).fold(0.0, f64::max);
        (drop(|s| s.pi), drop(|s| s.pi_lower))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(PROFILE_HEADER)?;
        for s in &self.samples {
            w.write_record([
                real17(s.x),
                real17(s.pi),
                real17(s.pi_lower),
                real17(s.lambda),
                s.pi_prime.map(real17).unwrap_or_default(),
                real17(s.w),
                if s.excluded { "1" } else { "0" }.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads the samples of a profile CSV. Parameters, cumulative integrals
/// and error messages are not stored in the file and come back empty.
pub fn read_samples<R: Read>(input: R) -> Result<Vec<ExtremalSample>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != PROFILE_HEADER {
        return Err(Error::Format(format!("unexpected profile header {header:?}")));
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let real = |i: usize| {
            parse_real(&rec[i]).ok_or_else(|| Error::Format(format!("row {}: cannot parse {:?}", line + 2, &rec[i])))
        };
        let pi_prime = if rec[4].is_empty() { None } else { Some(real(4)?) };
        out.push(ExtremalSample {
            x: real(0)?,
            pi: real(1)?,
            pi_lower: real(2)?,
            lambda: real(3)?,
            pi_prime,
            w: real(5)?,
            cumulative: f64::NAN,
            param: None,
            excluded: &rec[6] == "1",
            error: None,
        });
    }
    Ok(out)
}
