//! Piecewise-regular weight functions on `[-1, 1]`.

mod file;
mod piece;
pub mod presets;
pub mod quad;
mod spec;

use std::ops::Deref;

pub use file::{digest, from_json, read_file, to_json, write_file};
pub use piece::{Piece, PieceKind};
pub use quad::{compensated_sum, CompensatedSum};
pub use spec::{Diagnostics, InvariantCheck, Regularity, WeightSpec};

use crate::{Error, Result};
use piece::horner;
use quad::{adaptive, gauss_legendre, gauss_legendre_on, Tolerance};

/// A weight that passed validation. Immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight(WeightSpec);

/// A discontinuity of the weight at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub at: f64,
    pub left: f64,
    pub right: f64,
}

impl Jump {
    /// `w(s+) - w(s-)`.
    pub fn size(&self) -> f64 {
        self.right - self.left
    }
}

impl Deref for Weight {
    type Target = WeightSpec;
    fn deref(&self) -> &WeightSpec {
        &self.0
    }
}

impl TryFrom<WeightSpec> for Weight {
    type Error = Error;
    fn try_from(spec: WeightSpec) -> Result<Self> {
        Weight::new(spec)
    }
}

impl Weight {
    pub fn new(spec: WeightSpec) -> Result<Self> {
        let diag = spec.validate()?;
        if diag.passed() {
            Ok(Weight(spec))
        } else {
            Err(Error::Invalid(diag))
        }
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.0
    }

    pub fn into_spec(self) -> WeightSpec {
        self.0
    }

    pub fn reversed(&self) -> Weight {
        Weight(self.0.reversed())
    }

    pub fn scaled(&self, c: f64) -> Result<Weight> {
        Weight::new(self.0.scaled(c))
    }

    fn check_domain(t: f64) -> Result<()> {
        if (-1.0..=1.0).contains(&t) {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "t",
                value: t,
                domain: "[-1, 1]",
            })
        }
    }

    /// `w(t)`, the right limit at a breakpoint.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Self::check_domain(t)?;
        Ok(self.value(t))
    }

    /// `w(t-)`; equals `w(-1)` at `t = -1`.
    pub fn left_limit(&self, t: f64) -> Result<f64> {
        Self::check_domain(t)?;
        let k = self.pieces.partition_point(|p| p.lo < t);
        Ok(self.pieces[k.max(1) - 1].eval(t))
    }

    /// Unchecked evaluation; `t` is clamped into `[-1, 1]`.
    pub fn value(&self, t: f64) -> f64 {
        let t = t.clamp(-1.0, 1.0);
        let k = self.pieces.partition_point(|p| p.lo <= t);
        self.pieces[k.max(1) - 1].eval(t)
    }

    /// Right derivative `w'(t+)`.
    pub fn derivative(&self, t: f64) -> f64 {
        let t = t.clamp(-1.0, 1.0);
        let k = self.pieces.partition_point(|p| p.lo <= t);
        self.pieces[k.max(1) - 1].derivative(t)
    }

    /// Breakpoints at which the one-sided limits differ.
    pub fn jumps(&self) -> Vec<Jump> {
        let tol = 1e-12 * self.upper;
        self.breakpoints
            .iter()
            .map(|&s| Jump {
                at: s,
                left: self.left_limit(s).unwrap_or(f64::NAN),
                right: self.value(s),
            })
            .filter(|j| j.size().abs() > tol)
            .collect()
    }

    /// `∫_lo^hi p(t) w(t) dt` for `p(t) = Σ coeffs[k] t^k`.
    ///
    /// Exact over polynomial pieces, adaptive Gauss–Kronrod over the others.
    pub fn integrate_poly(&self, coeffs: &[f64], lo: f64, hi: f64) -> Result<f64> {
        self.integrate_impl(lo, hi, |piece, a, b| {
            if let PieceKind::Polynomial { coeffs: w } = &piece.kind {
                Ok(poly_integral(&poly_mul(coeffs, w), a, b))
            } else {
                let f = |t: f64| horner(coeffs, t) * piece.eval(t);
                integrate_segments(piece, a, b, &f)
            }
        })
    }

    /// `∫_lo^hi f(t) w(t) dt` for a smooth `f`, one adaptive run per smooth segment.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> Result<f64> {
        self.integrate_impl(lo, hi, |piece, a, b| {
            let g = |t: f64| f(t) * piece.eval(t);
            integrate_segments(piece, a, b, &g)
        })
    }

    fn integrate_impl<G>(&self, lo: f64, hi: f64, mut on_piece: G) -> Result<f64>
    where
        G: FnMut(&Piece, f64, f64) -> Result<f64>,
    {
        Self::check_domain(lo)?;
        Self::check_domain(hi)?;
        if lo > hi {
            return Err(Error::Domain {
                what: "integration bounds (lo > hi)",
                value: lo,
                domain: "lo <= hi",
            });
        }
        let mut sum = CompensatedSum::default();
        for piece in &self.pieces {
            let a = piece.lo.max(lo);
            let b = piece.hi.min(hi);
            if a < b {
                sum.add(on_piece(piece, a, b)?);
            }
        }
        Ok(sum.value())
    }

    /// `∫ w` over `[-1, 1]`.
    pub fn total_mass(&self) -> Result<f64> {
        self.integrate_poly(&[1.0], -1.0, 1.0)
    }

    /// `∫_{-1}^x w`.
    pub fn cumulative(&self, x: f64) -> Result<f64> {
        self.integrate_poly(&[1.0], -1.0, x)
    }

    /// A positive discrete measure that reproduces `∫ p w` for every
    /// polynomial `p` of degree at most `degree`: exactly on polynomial and
    /// tabulated pieces, to rounding on reciprocal pieces.
    pub fn discretize(&self, degree: usize) -> DiscreteMeasure {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for piece in &self.pieces {
            for seg in piece.segments() {
                match seg.degree {
                    Some(d) => {
                        let npts = (degree + d) / 2 + 1;
                        for (t, h) in gauss_legendre_on(npts, seg.lo, seg.hi) {
                            nodes.push(t);
                            weights.push(h * piece.eval(t));
                        }
                    }
                    None => smooth_panels(piece, seg.lo, seg.hi, degree, &mut nodes, &mut weights),
                }
            }
        }
        DiscreteMeasure { nodes, weights, degree }
    }
}

/// Nodes and positive weights standing in for `w(t) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Polynomial degree up to which the measure reproduces `w`.
    pub degree: usize,
}

impl DiscreteMeasure {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        compensated_sum(self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)))
    }

    pub fn mass(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }
}

fn integrate_segments<F: Fn(f64) -> f64>(piece: &Piece, a: f64, b: f64, f: &F) -> Result<f64> {
    let mut sum = CompensatedSum::default();
    for seg in piece.segments() {
        let lo = seg.lo.max(a);
        let hi = seg.hi.min(b);
        if lo < hi {
            sum.add(adaptive(f, lo, hi, Tolerance::default())?);
        }
    }
    Ok(sum.value())
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn poly_integral(c: &[f64], a: f64, b: f64) -> f64 {
    // d = b^{k+1} - a^{k+1} via d_k = b d_{k-1} + a^k (b - a), which avoids
    // cancellation on short intervals
    let h = b - a;
    let mut ak = 1.0;
    let mut d = 0.0;
    let mut sum = CompensatedSum::default();
    for (k, ck) in c.iter().enumerate() {
        d = b * d + ak * h;
        ak *= a;
        sum.add(ck * d / (k + 1) as f64);
    }
    sum.value()
}

/// Bisects `[lo, hi]` until a Gauss–Legendre panel integrates the smooth
/// piece against Legendre test polynomials of the requested degree as well
/// as a rule with eight extra points.
fn smooth_panels(piece: &Piece, lo: f64, hi: f64, degree: usize, nodes: &mut Vec<f64>, weights: &mut Vec<f64>) {
    let base = degree / 2 + 8;
    let (xs, ws) = gauss_legendre(base);
    let (xf, wf) = gauss_legendre(base + 8);
    let moments = |x: &[f64], w: &[f64], a: f64, b: f64| -> Vec<f64> {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut m = vec![0.0; degree + 1];
        for (xi, wi) in x.iter().zip(w) {
            let t = c + h * xi;
            let v = h * wi * piece.eval(t);
            // Legendre polynomials in the global variable
            let (mut p0, mut p1) = (1.0, t);
            m[0] += v;
            if degree >= 1 {
                m[1] += v * t;
            }
            for k in 2..=degree {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
                m[k] += v * p2;
                p0 = p1;
                p1 = p2;
            }
        }
        m
    };
    let mut stack = vec![(lo, hi, 0u32)];
    let mut accepted = Vec::new();
    while let Some((a, b, depth)) = stack.pop() {
        let coarse = moments(&xs, &ws, a, b);
        let fine = moments(&xf, &wf, a, b);
        let scale = coarse[0].abs();
        let ok = coarse.iter().zip(&fine).all(|(c, f)| (c - f).abs() <= 1e-14 * scale);
        if ok || depth >= 40 {
            accepted.push((a, b));
        } else {
            let m = 0.5 * (a + b);
            stack.push((m, b, depth + 1));
            stack.push((a, m, depth + 1));
        }
    }
    accepted.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (a, b) in accepted {
        for (t, h) in gauss_legendre_on(base + 8, a, b) {
            nodes.push(t);
            weights.push(h * piece.eval(t));
        }
    }
}

#[cfg(test)]
mod tests;
