//! Hermite interpolation in barycentric form.

use crate::orthopoly::PolyEval;
use crate::{Error, Result};

/// An interpolation condition: `p(position) = value`, and `p'(position) = 0`
/// when `flat`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteNode {
    pub position: f64,
    pub value: f64,
    pub flat: bool,
}

/// The least-degree polynomial meeting a set of [`HermiteNode`] conditions.
///
/// Only zero slopes are ever prescribed, so the constant 1 is the sum of the
/// value basis polynomials and the second barycentric form applies:
/// `p = Σ v_u T_u / Σ T_u` with `T_u = w_u h_u(t) / (t - u)^{m_u}`, where
/// `m_u` is the multiplicity, `h_u(t) = 1 - c_u (t - u)` corrects the slope of
/// a flat node and `w_u = 1 / Π_{j≠u} (u - u_j)^{m_j}`. The weights are kept
/// normalized by their largest magnitude, which cancels in the quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteInterpolant {
    nodes: Vec<HermiteNode>,
    weights: Vec<f64>,
    slopes: Vec<f64>,
    degree: usize,
}

/// Tolerance for reproducing the conditions after construction.
pub const REPRODUCTION_TOL: f64 = 1e-11;

fn multiplicity(node: &HermiteNode) -> i32 {
    if node.flat {
        2
    } else {
        1
    }
}

impl HermiteInterpolant {
    pub fn new(nodes: Vec<HermiteNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Construction("no interpolation conditions".into()));
        }
        if nodes.iter().any(|n| !n.position.is_finite() || !n.value.is_finite()) {
            return Err(Error::Construction("non-finite interpolation condition".into()));
        }
        let mut sorted: Vec<f64> = nodes.iter().map(|n| n.position).collect();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::Construction("repeated interpolation node".into()));
        }

        let mut log_w = Vec::with_capacity(nodes.len());
        let mut sign = Vec::with_capacity(nodes.len());
        let mut slopes = Vec::with_capacity(nodes.len());
        for (i, a) in nodes.iter().enumerate() {
            let (mut lg, mut sg, mut c) = (0.0, 1.0, 0.0);
            for (j, b) in nodes.iter().enumerate() {
                if i != j {
                    let d = a.position - b.position;
                    let m = multiplicity(b);
                    lg -= f64::from(m) * d.abs().ln();
                    if d < 0.0 && m == 1 {
                        sg = -sg;
                    }
                    c += f64::from(m) / d;
                }
            }
            log_w.push(lg);
            sign.push(sg);
            slopes.push(if a.flat { c } else { 0.0 });
        }
        let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights = log_w.iter().zip(&sign).map(|(l, s)| s * (l - top).exp()).collect();
        let degree = nodes.iter().map(|n| multiplicity(n) as usize).sum::<usize>() - 1;

        let interp = Self {
            nodes,
            weights,
            slopes,
            degree,
        };
        for node in &interp.nodes {
            let e = interp.eval(node.position);
            let scale = node.value.abs().max(1.0);
            let value_err = (e.value - node.value).abs();
            let slope_err = if node.flat { e.derivative.abs() } else { 0.0 };
            if !(value_err <= REPRODUCTION_TOL * scale && slope_err <= REPRODUCTION_TOL * interp.slope_scale()) {
                return Err(Error::Construction(format!(
                    "interpolant misses its condition at {}: value error {value_err:e}, slope error {slope_err:e}",
                    node.position
                )));
            }
        }
        Ok(interp)
    }

    /// Scale against which derivative residuals are judged: the derivative
    /// of a unit bump over the smallest node gap.
    fn slope_scale(&self) -> f64 {
        let mut p: Vec<f64> = self.nodes.iter().map(|n| n.position).collect();
        p.sort_by(f64::total_cmp);
        let gap = p.windows(2).map(|w| w[1] - w[0]).fold(2.0, f64::min);
        1.0 / gap
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[HermiteNode] {
        &self.nodes
    }

    /// Value and derivative at `t`.
    pub fn eval(&self, t: f64) -> PolyEval {
        if let Some(k) = self.nodes.iter().position(|n| n.position == t) {
            return self.eval_at_node(k);
        }
        let (mut num, mut den) = (0.0, 0.0);
        let mut terms = Vec::with_capacity(self.nodes.len());
        for (i, node) in self.nodes.iter().enumerate() {
            let s = t - node.position;
            let h = 1.0 - self.slopes[i] * s;
            let (tv, td) = if node.flat {
                let s2 = s * s;
                let v = self.weights[i] * h / s2;
                (v, -self.weights[i] * self.slopes[i] / s2 - 2.0 * v / s)
            } else {
                let v = self.weights[i] / s;
                (v, -v / s)
            };
            num += node.value * tv;
            den += tv;
            terms.push(td);
        }
        let value = num / den;
        let slope: f64 = self
            .nodes
            .iter()
            .zip(&terms)
            .map(|(node, td)| (node.value - value) * td)
            .sum();
        PolyEval {
            value,
            derivative: slope / den,
        }
    }

    /// At node `k` the value is prescribed; the slope follows from the
    /// derivatives of the value basis, which sum to zero.
    fn eval_at_node(&self, k: usize) -> PolyEval {
        let at = self.nodes[k];
        if at.flat {
            return PolyEval {
                value: at.value,
                derivative: 0.0,
            };
        }
        let mut slope = 0.0;
        for (i, node) in self.nodes.iter().enumerate() {
            if i == k {
                continue;
            }
            let d = at.position - node.position;
            let basis = if node.flat {
                self.weights[i] * (1.0 - self.slopes[i] * d) / (d * d)
            } else {
                self.weights[i] / d
            };
            slope += (node.value - at.value) * basis / self.weights[k];
        }
        PolyEval {
            value: at.value,
            derivative: slope,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).value
    }
}
