//! Orthonormal polynomials for `w` and `(1 - t²) w`.
//!
//! `φ` is the degree-`n` orthonormal polynomial for `w`; `ψ` is the
//! degree-`(n - 1)` orthonormal polynomial for `(1 - t²) w`, i.e.
//! `ψ = eval_psi(modified_table, n - 1, ·)`. Leading coefficients are positive.

use std::io::Write;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fmt::real17;
use crate::weightfn::{compensated_sum, DiscreteMeasure, Weight};
use crate::{degree_cap, Error, Result};

/// Which weight a [`RecurrenceTable`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// `w(t)`.
    Plain,
    /// `(1 - t²) w(t)`.
    Modified,
}

/// Value and derivative of a polynomial at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEval {
    pub value: f64,
    pub derivative: f64,
}

/// Three-term recurrence of the monic orthogonal polynomials,
/// `p_{k+1} = (t - alpha[k]) p_k - beta[k] p_{k-1}`, for `k = 0..=K`.
///
/// `beta[0]` is the mass of the weight and `norms[k]` the norm of `p_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    pub which: Which,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub norms: Vec<f64>,
}

/// Pairs checked for orthogonality after construction.
const ORTHOGONALITY_SAMPLES: usize = 48;
const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Discretization degree needed for a table of degree `k`.
pub fn required_degree(k: usize, which: Which) -> usize {
    match which {
        Which::Plain => 2 * k + 1,
        Which::Modified => 2 * k + 3,
    }
}

impl RecurrenceTable {
    /// Runs the Stieltjes procedure to degree `k` on a discretization of `w`.
    pub fn compute(weight: &Weight, k: usize, which: Which) -> Result<Self> {
        check_cap(k)?;
        let measure = weight.discretize(required_degree(k, which) + 8);
        let table = Self::from_measure(&measure, k, which)?;
        let finer = weight.discretize(required_degree(k, which) + 24);
        table.check_orthogonality(&finer, k as u64)?;
        Ok(table)
    }

    /// Stieltjes procedure on a discrete measure, in Lanczos form with full
    /// reorthogonalization. `measure.degree` must cover the table.
    pub fn from_measure(measure: &DiscreteMeasure, k: usize, which: Which) -> Result<Self> {
        check_cap(k)?;
        if measure.degree < required_degree(k, which) || measure.len() <= k + 1 {
            return Err(Error::Misuse(format!(
                "discrete measure of degree {} cannot support a table of degree {k}",
                measure.degree
            )));
        }
        let x = &measure.nodes;
        let w: Vec<f64> = match which {
            Which::Plain => measure.weights.clone(),
            Which::Modified => x
                .iter()
                .zip(&measure.weights)
                .map(|(t, w)| w * (1.0 - t) * (1.0 + t))
                .collect(),
        };
        let mass = compensated_sum(w.iter().copied());
        let mut q: Vec<Vec<f64>> = vec![w.iter().map(|v| (v / mass).sqrt()).collect()];
        let mut alpha = Vec::with_capacity(k + 1);
        let mut beta = vec![mass];
        for j in 0..=k {
            let qj = &q[j];
            let a = compensated_sum(qj.iter().zip(x).map(|(q, t)| q * q * t));
            alpha.push(a);
            if j == k {
                break;
            }
            let mut r: Vec<f64> = qj.iter().zip(x).map(|(q, t)| (t - a) * q).collect();
            if j > 0 {
                let b = beta[j].sqrt();
                for (ri, qp) in r.iter_mut().zip(&q[j - 1]) {
                    *ri -= b * qp;
                }
            }
            for _ in 0..2 {
                for qi in &q {
                    let c = compensated_sum(r.iter().zip(qi).map(|(a, b)| a * b));
                    for (ri, qv) in r.iter_mut().zip(qi) {
                        *ri -= c * qv;
                    }
                }
            }
            let norm2 = compensated_sum(r.iter().map(|v| v * v));
            if !(norm2 > 0.0) || !norm2.is_finite() {
                return Err(Error::IllConditioned {
                    k: j + 1,
                    reason: format!("beta = {norm2} is not positive"),
                });
            }
            let norm = norm2.sqrt();
            beta.push(norm2);
            q.push(r.into_iter().map(|v| v / norm).collect());
        }
        if let Some(j) = alpha.iter().position(|a| !(a.abs() < 1.0)) {
            return Err(Error::IllConditioned {
                k: j,
                reason: format!("alpha = {} outside (-1, 1)", alpha[j]),
            });
        }
        let mut norms = Vec::with_capacity(k + 1);
        let mut acc = 1.0;
        for b in &beta {
            acc *= b;
            norms.push(acc.sqrt());
        }
        Ok(Self {
            which,
            alpha,
            beta,
            norms,
        })
    }

    /// Degree bound `K`.
    pub fn degree(&self) -> usize {
        self.alpha.len() - 1
    }

    /// Orthonormal polynomial of degree `n` and its derivative at `x`.
    /// No domain checks.
    pub fn eval_unchecked(&self, n: usize, x: f64) -> PolyEval {
        let mut p_prev = 0.0;
        let mut d_prev = 0.0;
        let mut p = 1.0 / self.beta[0].sqrt();
        let mut d = 0.0;
        for k in 0..n {
            let b_next = self.beta[k + 1].sqrt();
            let b = if k == 0 { 0.0 } else { self.beta[k].sqrt() };
            let p_next = ((x - self.alpha[k]) * p - b * p_prev) / b_next;
            let d_next = (p + (x - self.alpha[k]) * d - b * d_prev) / b_next;
            p_prev = p;
            d_prev = d;
            p = p_next;
            d = d_next;
        }
        PolyEval {
            value: p,
            derivative: d,
        }
    }

    /// Values of the orthonormal polynomials of degrees `0..=n` at `x`.
    pub fn eval_all(&self, n: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut p_prev = 0.0;
        let mut p = 1.0 / self.beta[0].sqrt();
        out.push(p);
        for k in 0..n {
            let b = if k == 0 { 0.0 } else { self.beta[k].sqrt() };
            let p_next = ((x - self.alpha[k]) * p - b * p_prev) / self.beta[k + 1].sqrt();
            p_prev = p;
            p = p_next;
            out.push(p);
        }
        out
    }

    fn checked_eval(&self, n: usize, x: f64, which: Which) -> Result<PolyEval> {
        if self.which != which {
            return Err(Error::Misuse(format!(
                "table is for the {:?} weight, expected {which:?}",
                self.which
            )));
        }
        if n > self.degree() {
            return Err(Error::Misuse(format!(
                "degree {n} exceeds table degree {}",
                self.degree()
            )));
        }
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain {
                what: "x",
                value: x,
                domain: "[-1, 1]",
            });
        }
        Ok(self.eval_unchecked(n, x))
    }

    fn check_orthogonality(&self, measure: &DiscreteMeasure, seed: u64) -> Result<()> {
        let k = self.degree();
        let values: Vec<Vec<f64>> = measure.nodes.iter().map(|&t| self.eval_all(k, t)).collect();
        let weights: Vec<f64> = match self.which {
            Which::Plain => measure.weights.clone(),
            Which::Modified => measure
                .nodes
                .iter()
                .zip(&measure.weights)
                .map(|(t, w)| w * (1.0 - t) * (1.0 + t))
                .collect(),
        };
        let pairs = (k + 1) * (k + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chosen = sample(&mut rng, pairs, ORTHOGONALITY_SAMPLES.min(pairs));
        for idx in chosen.iter().chain([pairs - 1]) {
            let (i, j) = (idx / (k + 1), idx % (k + 1));
            let ip = compensated_sum(values.iter().zip(&weights).map(|(v, w)| w * v[i] * v[j]));
            let target = if i == j { 1.0 } else { 0.0 };
            if (ip - target).abs() > ORTHOGONALITY_TOL {
                return Err(Error::IllConditioned {
                    k: i.max(j),
                    reason: format!("<p_{i}, p_{j}> = {ip:e}"),
                });
            }
        }
        Ok(())
    }

    /// Writes `k,alpha,beta,norm` rows with 17-digit reals.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "alpha", "beta", "norm"])?;
        for k in 0..=self.degree() {
            w.write_record([
                k.to_string(),
                real17(self.alpha[k]),
                real17(self.beta[k]),
                real17(self.norms[k]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_cap(k: usize) -> Result<()> {
    let cap = degree_cap();
    if k > cap {
        Err(Error::DegreeCap { requested: k, cap })
    } else {
        Ok(())
    }
}

/// Orthonormal polynomial of degree `n` for `w`.
pub fn eval_phi(table: &RecurrenceTable, n: usize, x: f64) -> Result<PolyEval> {
    table.checked_eval(n, x, Which::Plain)
}

/// Orthonormal polynomial of degree `n` for `(1 - t²) w`. The `ψ` paired
/// with `φ` of degree `n` is `eval_psi(table, n - 1, x)`.
pub fn eval_psi(table: &RecurrenceTable, n: usize, x: f64) -> Result<PolyEval> {
    table.checked_eval(n, x, Which::Modified)
}

/// `sgn(0) = 0`.
pub fn sgn(a: f64) -> f64 {
    if a > 0.0 {
        1.0
    } else if a < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// The plain and modified tables for a fixed degree `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoPair {
    pub n: usize,
    pub plain: RecurrenceTable,
    pub modified: RecurrenceTable,
}

impl OrthoPair {
    pub fn compute(weight: &Weight, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Misuse("degree n must be at least 1".into()));
        }
        Ok(Self {
            n,
            plain: RecurrenceTable::compute(weight, n, Which::Plain)?,
            modified: RecurrenceTable::compute(weight, n - 1, Which::Modified)?,
        })
    }

    pub fn from_measure(measure: &DiscreteMeasure, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Misuse("degree n must be at least 1".into()));
        }
        Ok(Self {
            n,
            plain: RecurrenceTable::from_measure(measure, n, Which::Plain)?,
            modified: RecurrenceTable::from_measure(measure, n - 1, Which::Modified)?,
        })
    }

    pub fn phi(&self, x: f64) -> PolyEval {
        self.plain.eval_unchecked(self.n, x)
    }

    pub fn psi(&self, x: f64) -> PolyEval {
        self.modified.eval_unchecked(self.n - 1, x)
    }

    /// `P_a = φ - a (1 - sgn(a) x) ψ` for finite `a`.
    pub fn eval_p(&self, a: f64, x: f64) -> Result<PolyEval> {
        if !a.is_finite() {
            return Err(Error::Misuse(
                "P_a is undefined for infinite a; evaluate psi instead".into(),
            ));
        }
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain {
                what: "x",
                value: x,
                domain: "[-1, 1]",
            });
        }
        Ok(self.p_unchecked(a, x))
    }

    pub(crate) fn p_unchecked(&self, a: f64, x: f64) -> PolyEval {
        let phi = self.phi(x);
        if a == 0.0 {
            return phi;
        }
        let psi = self.psi(x);
        let s = sgn(a);
        PolyEval {
            value: phi.value - a * (1.0 - s * x) * psi.value,
            derivative: phi.derivative - a * (1.0 - s * x) * psi.derivative + a * s * psi.value,
        }
    }
}

/// Clamps `x` to `[ξ_1(0), ξ_n(0)]`.
pub fn truncate_x(x: f64, gaussian_nodes: &[f64]) -> f64 {
    match (gaussian_nodes.first(), gaussian_nodes.last()) {
        (Some(&lo), Some(&hi)) => x.clamp(lo, hi),
        _ => x,
    }
}
