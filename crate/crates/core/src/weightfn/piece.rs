use crate::{Error, Result};

/// How a piece of the weight is described on its support.
#[derive(Debug, Clone, PartialEq)]
pub enum PieceKind {
    /// `w(t) = Σ c_k t^k`, coefficients in the global variable `t`.
    Polynomial { coeffs: Vec<f64> },
    /// `w(t) = 1 / Σ c_k t^k`.
    ReciprocalPolynomial { coeffs: Vec<f64> },
    /// Samples `(t, w(t))`, reconstructed by monotone piecewise-cubic
    /// (Fritsch–Carlson) interpolation.
    Tabulated { samples: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub kind: PieceKind,
    pub lo: f64,
    pub hi: f64,
    /// Hermite slopes at the samples, tabulated pieces only.
    slopes: Vec<f64>,
}

/// A sub-interval on which a piece is either a polynomial of known degree
/// or merely smooth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub degree: Option<usize>,
}

impl Piece {
    pub fn polynomial(coeffs: Vec<f64>, lo: f64, hi: f64) -> Self {
        Self {
            kind: PieceKind::Polynomial { coeffs },
            lo,
            hi,
            slopes: Vec::new(),
        }
    }

    pub fn reciprocal(coeffs: Vec<f64>, lo: f64, hi: f64) -> Self {
        Self {
            kind: PieceKind::ReciprocalPolynomial { coeffs },
            lo,
            hi,
            slopes: Vec::new(),
        }
    }

    pub fn tabulated(samples: Vec<(f64, f64)>, lo: f64, hi: f64) -> Self {
        let slopes = pchip_slopes(&samples);
        Self {
            kind: PieceKind::Tabulated { samples },
            lo,
            hi,
            slopes,
        }
    }

    /// Structural sanity of a single piece; `index` is reported on failure.
    pub(crate) fn check_structure(&self, index: usize) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::Structural {
                index,
                reason: reason.to_string(),
            })
        };
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return fail("non-finite support endpoint");
        }
        if self.lo >= self.hi {
            return fail("empty support (lo >= hi)");
        }
        match &self.kind {
            PieceKind::Polynomial { coeffs } | PieceKind::ReciprocalPolynomial { coeffs } => {
                if coeffs.is_empty() {
                    return fail("empty coefficient list");
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return fail("non-finite coefficient");
                }
            }
            PieceKind::Tabulated { samples } => {
                if samples.len() < 2 {
                    return fail("fewer than two samples");
                }
                if samples.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
                    return fail("non-finite sample");
                }
                if samples.windows(2).any(|p| p[0].0 >= p[1].0) {
                    return fail("sample abscissae not strictly increasing");
                }
                let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
                if first > self.lo || last < self.hi {
                    return fail("samples do not cover the support");
                }
            }
        }
        Ok(())
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.kind, PieceKind::Polynomial { .. })
    }

    /// Value at `t`; `t` is clamped to the closed support.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(self.lo, self.hi);
        match &self.kind {
            PieceKind::Polynomial { coeffs } => horner(coeffs, t),
            PieceKind::ReciprocalPolynomial { coeffs } => 1.0 / horner(coeffs, t),
            PieceKind::Tabulated { samples } => pchip_eval(samples, &self.slopes, t),
        }
    }

    /// Derivative at `t` (clamped to the support).
    pub fn derivative(&self, t: f64) -> f64 {
        let t = t.clamp(self.lo, self.hi);
        match &self.kind {
            PieceKind::Polynomial { coeffs } => horner_derivative(coeffs, t).1,
            PieceKind::ReciprocalPolynomial { coeffs } => {
                let (p, dp) = horner_derivative(coeffs, t);
                -dp / (p * p)
            }
            PieceKind::Tabulated { samples } => pchip_derivative(samples, &self.slopes, t),
        }
    }

    pub(crate) fn segments(&self) -> Vec<Segment> {
        match &self.kind {
            PieceKind::Polynomial { coeffs } => vec![Segment {
                lo: self.lo,
                hi: self.hi,
                degree: Some(coeffs.len() - 1),
            }],
            PieceKind::ReciprocalPolynomial { .. } => vec![Segment {
                lo: self.lo,
                hi: self.hi,
                degree: None,
            }],
            PieceKind::Tabulated { samples } => {
                let mut cuts: Vec<f64> = vec![self.lo];
                cuts.extend(samples.iter().map(|s| s.0).filter(|&t| t > self.lo && t < self.hi));
                cuts.push(self.hi);
                cuts.windows(2)
                    .map(|c| Segment {
                        lo: c[0],
                        hi: c[1],
                        degree: Some(3),
                    })
                    .collect()
            }
        }
    }

    /// The same piece seen through `t -> -t`.
    pub fn reversed(&self) -> Self {
        let (lo, hi) = (-self.hi, -self.lo);
        match &self.kind {
            PieceKind::Polynomial { coeffs } => Piece::polynomial(alternate(coeffs), lo, hi),
            PieceKind::ReciprocalPolynomial { coeffs } => Piece::reciprocal(alternate(coeffs), lo, hi),
            PieceKind::Tabulated { samples } => {
                let s = samples.iter().rev().map(|&(t, v)| (-t, v)).collect();
                Piece::tabulated(s, lo, hi)
            }
        }
    }

    /// The piece multiplied by a positive constant.
    pub fn scaled(&self, factor: f64) -> Self {
        match &self.kind {
            PieceKind::Polynomial { coeffs } => {
                Piece::polynomial(coeffs.iter().map(|c| c * factor).collect(), self.lo, self.hi)
            }
            PieceKind::ReciprocalPolynomial { coeffs } => {
                Piece::reciprocal(coeffs.iter().map(|c| c / factor).collect(), self.lo, self.hi)
            }
            PieceKind::Tabulated { samples } => Piece::tabulated(
                samples.iter().map(|&(t, v)| (t, v * factor)).collect(),
                self.lo,
                self.hi,
            ),
        }
    }
}

fn alternate(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
        .collect()
}

pub(crate) fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn horner_derivative(coeffs: &[f64], t: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs.iter().rev() {
        dp = dp * t + p;
        p = p * t + c;
    }
    (p, dp)
}

fn pchip_slopes(samples: &[(f64, f64)]) -> Vec<f64> {
    let n = samples.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let h: Vec<f64> = samples.windows(2).map(|p| p[1].0 - p[0].0).collect();
    let delta: Vec<f64> = samples
        .windows(2)
        .zip(&h)
        .map(|(p, &h)| (p[1].1 - p[0].1) / h)
        .collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    d[0] = pchip_end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip_end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

fn pchip_interval(samples: &[(f64, f64)], t: f64) -> usize {
    let k = samples.partition_point(|s| s.0 <= t);
    k.clamp(1, samples.len() - 1) - 1
}

fn pchip_eval(samples: &[(f64, f64)], slopes: &[f64], t: f64) -> f64 {
    let k = pchip_interval(samples, t);
    let (x0, y0) = samples[k];
    let (x1, y1) = samples[k + 1];
    let h = x1 - x0;
    let s = (t - x0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    h00 * y0 + h10 * h * slopes[k] + h01 * y1 + h11 * h * slopes[k + 1]
}

fn pchip_derivative(samples: &[(f64, f64)], slopes: &[f64], t: f64) -> f64 {
    let k = pchip_interval(samples, t);
    let (x0, y0) = samples[k];
    let (x1, y1) = samples[k + 1];
    let h = x1 - x0;
    let s = (t - x0) / h;
    let d00 = 6.0 * s * (s - 1.0);
    let d10 = (1.0 - s) * (1.0 - 3.0 * s);
    let d01 = -d00;
    let d11 = s * (3.0 * s - 2.0);
    (d00 * y0 + d01 * y1) / h + d10 * slopes[k] + d11 * slopes[k + 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pchip_reproduces_samples_and_stays_monotone() {
        let samples: Vec<(f64, f64)> = (0..=20)
            .map(|k| {
                let t = -1.0 + 0.1 * k as f64;
                (t, 1.0 + t.abs().sqrt())
            })
            .collect();
        let p = Piece::tabulated(samples.clone(), -1.0, 1.0);
        for &(t, v) in &samples {
            assert!((p.eval(t) - v).abs() < 1e-14);
        }
        // monotone on [0, 1]
        let mut prev = p.eval(0.0);
        for k in 1..=1000 {
            let v = p.eval(k as f64 / 1000.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn pchip_derivative_matches_difference_quotient() {
        let samples = vec![(-1.0, 1.0), (-0.2, 1.5), (0.3, 1.7), (1.0, 3.0)];
        let p = Piece::tabulated(samples, -1.0, 1.0);
        for &t in &[-0.7, -0.1, 0.5, 0.9] {
            let h = 1e-6;
            let fd = (p.eval(t + h) - p.eval(t - h)) / (2.0 * h);
            assert!((fd - p.derivative(t)).abs() < 1e-6);
        }
    }

    #[test]
    fn reversal_mirrors_values() {
        let p = Piece::polynomial(vec![1.0, 4.0, -2.0], 0.0, 1.0);
        let r = p.reversed();
        assert_eq!((r.lo, r.hi), (-1.0, 0.0));
        for &t in &[0.0, 0.25, 0.9] {
            assert!((r.eval(-t) - p.eval(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn structure_errors_carry_index() {
        let p = Piece::tabulated(vec![(0.0, 1.0)], 0.0, 1.0);
        match p.check_structure(3) {
            Err(Error::Structural { index, .. }) => assert_eq!(index, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
