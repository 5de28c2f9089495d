use std::fmt;

use super::appendix;
use crate::canonical::CanonicalSystem;
use crate::extremal::{build_qx, sample, ExtremalSample};
use crate::orthopoly::{sgn, truncate_x};
use crate::verify::oracle::fd_pi_prime;
use crate::weightfn::presets;
use crate::{Error, Result};

/// Step of the centered difference compared against `π'`.
pub const FD_STEP: f64 = 1e-5;
/// Half-width factor of the intervals in the segment estimates:
/// `|x - u| <= SEGMENT_WIDTH · r(n+1-r)/n³`.
pub const SEGMENT_WIDTH: f64 = 0.25;
/// Points per interval in the segment estimates.
pub const SEGMENT_SAMPLES: usize = 21;

/// Degree and weight data every ratio needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ctx {
    pub n: usize,
    pub mass: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Ctx {
    pub fn of(system: &CanonicalSystem) -> Self {
        let spec = system.weight().spec();
        Self {
            n: system.n(),
            mass: system.mass(),
            lower: spec.lower,
            upper: spec.upper,
        }
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Normalizes orthonormal polynomials to the scale of the unit weight.
    fn poly_scale(&self) -> f64 {
        (self.mass / 2.0).sqrt()
    }

    /// `min{n, 1/√(1-x²)}`.
    fn cap(&self, x: f64) -> f64 {
        let s = (1.0 - x * x).sqrt();
        if s * self.nf() <= 1.0 {
            self.nf()
        } else {
            1.0 / s
        }
    }

    /// `max{√(1-x²), 1/n} / n`.
    fn christoffel_scale(&self, x: f64) -> f64 {
        (1.0 - x * x).sqrt().max(1.0 / self.nf()) / self.nf()
    }
}

/// Every ratio or margin a check measures. Each one can be re-evaluated
/// from the weight at a witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    /// Worst of `π̲ - ∫w`, `∫w - π`, `|π - π̲ - λ|`, over the mass.
    Cms,
    /// `(π' - w) / (λ min{1/(1+x), n²})`.
    LipschitzUpper,
    /// `(w - π') / (λ/(1-x))`.
    LipschitzLower,
    /// As [`Quantity::LipschitzUpper`] with `λ̂^{1-1/p}` added to the scale.
    SobolevUpper {
        p: f64,
    },
    SobolevLower {
        p: f64,
    },
    /// `π' - w`.
    Deviation,
    /// `|(π' - w)(s + δ) - (π' - w)(s - δ)|` at `x = s`, `aux = δ`.
    JumpOfDeviation,
    /// `|π' - (π(x+h) - π(x-h))/2h|`.
    FdAgreement,
    /// Exactness residual of `Σ_x`.
    Exactness,
    /// `λ / ((M/n) max{√(1-x²), 1/n})`.
    LambdaUpper,
    /// `λ / ((m/n) max{√(1-x²), 1/n})`.
    LambdaLower,
    /// `max{λ_x(-1), λ_x(1)} / ((M²/m)/n²)`.
    EndpointWeight,
    /// `(|φ| + √(1-x²)|ψ|) / min{n, 1/√(1-x²)}^{1/2}`, normalized.
    Badkov,
    /// `|φ'| / (n min{n, 1/√(1-x²)}^{3/2})`, normalized.
    Bernstein,
    /// `√(1∓ξ_i(0))` against `√(M/m)` (upper) or `√(m/M)` (lower) times the
    /// index fraction; `aux = i`.
    NodeEndpoint {
        upper: bool,
        right: bool,
    },
    /// The same ratios at `ξ_i(a)`; lower bounds only where they apply.
    GaussNode {
        a: f64,
        upper: bool,
        right: bool,
    },
    /// `(ξ_{i+1}(a) - ξ_i(a)) / ((M/m)² i(n-i)/n³)`; `aux = i`.
    Spacing {
        a: f64,
    },
    /// `(ξ_i(hi) - ξ_i(lo))` over its predicted lower bound; `aux = i`.
    Separation {
        lo: f64,
        hi: f64,
    },
    /// `min |φ|` near `η_r` over `n/√(r(n+1-r))`; `aux = r`.
    SegmentPhi,
    /// `min |ψ|` near `ξ_r(0)` over `(n/√(r(n+1-r)))³`; `aux = r`.
    SegmentPsi,
    /// `min(ξ_i(a) - η_{i-1}, η_i - ξ_i(a))`; `aux = i`.
    Interlacing {
        a: f64,
    },
    /// Margin of `ξ_i(0)` inside the Legendre-root bracket; `aux = i`.
    LegendreBracket,
    /// Margin of `(1∓ξ_i^w)/(1∓ξ_i^u)` inside `[m/M, M/m]`; `aux = i`.
    LegendreComparison {
        right: bool,
    },
    /// `|P_a'(x)|` over its predicted lower bound, or `|ψ'(x)|` at `η_r`.
    PaPrime,
    /// `q_x(t)` over `(M/m)(1 + sgn(x-t)x)/(1 + sgn(x-t)t)`; `aux = t`.
    QxNaive,
    /// `q_x(t)`; `aux = t`.
    QxSup,
    /// `q_x(t) n max{1, n√(1-t²)} (t-x)²`; `aux = t`.
    QxDecay,
    /// Relative mismatch of the circle-polynomial relation at `x = cos θ`.
    Appendix,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |right: bool| if right { "right" } else { "left" };
        let bound = |upper: bool| if upper { "upper" } else { "lower" };
        match self {
            Quantity::Cms => write!(f, "cms-violation"),
            Quantity::LipschitzUpper => write!(f, "lipschitz-upper"),
            Quantity::LipschitzLower => write!(f, "lipschitz-lower"),
            Quantity::SobolevUpper { p } => write!(f, "sobolev-upper(p={p})"),
            Quantity::SobolevLower { p } => write!(f, "sobolev-lower(p={p})"),
            Quantity::Deviation => write!(f, "pi-prime-minus-w"),
            Quantity::JumpOfDeviation => write!(f, "jump-of-pi-prime-minus-w"),
            Quantity::FdAgreement => write!(f, "pi-prime-vs-difference"),
            Quantity::Exactness => write!(f, "exactness-residual"),
            Quantity::LambdaUpper => write!(f, "lambda-upper"),
            Quantity::LambdaLower => write!(f, "lambda-lower"),
            Quantity::EndpointWeight => write!(f, "endpoint-weight"),
            Quantity::Badkov => write!(f, "badkov"),
            Quantity::Bernstein => write!(f, "bernstein"),
            Quantity::NodeEndpoint { upper, right } => {
                write!(f, "node-endpoint({},{})", bound(*upper), side(*right))
            }
            Quantity::GaussNode { a, upper, right } => {
                write!(f, "gauss-node(a={a},{},{})", bound(*upper), side(*right))
            }
            Quantity::Spacing { a } => write!(f, "spacing(a={a})"),
            Quantity::Separation { lo, hi } => write!(f, "separation({lo},{hi})"),
            Quantity::SegmentPhi => write!(f, "segment-phi"),
            Quantity::SegmentPsi => write!(f, "segment-psi"),
            Quantity::Interlacing { a } => write!(f, "interlacing(a={a})"),
            Quantity::LegendreBracket => write!(f, "legendre-bracket"),
            Quantity::LegendreComparison { right } => write!(f, "legendre-comparison({})", side(*right)),
            Quantity::PaPrime => write!(f, "pa-prime"),
            Quantity::QxNaive => write!(f, "qx-naive"),
            Quantity::QxSup => write!(f, "qx-sup"),
            Quantity::QxDecay => write!(f, "qx-decay"),
            Quantity::Appendix => write!(f, "circle-relation"),
        }
    }
}

/// `ξ_i(a)` for any extended real `a`.
pub(crate) fn node(system: &CanonicalSystem, i: usize, a: f64) -> Result<f64> {
    if a.is_infinite() {
        let eta = system.eta();
        return Ok(if a > 0.0 { eta[i] } else { eta[i - 1] });
    }
    system.xi_of_a(i, a)
}

fn index(aux: f64) -> usize {
    aux as usize
}

impl Quantity {
    /// Whether the value comes from an extremal sample at `x`.
    pub fn uses_sample(&self) -> bool {
        matches!(
            self,
            Quantity::Cms
                | Quantity::LipschitzUpper
                | Quantity::LipschitzLower
                | Quantity::SobolevUpper { .. }
                | Quantity::SobolevLower { .. }
                | Quantity::Deviation
                | Quantity::LambdaUpper
                | Quantity::LambdaLower
        )
    }

    /// The value on a precomputed sample; `None` where it is undefined
    /// (excluded points, failed samples).
    pub fn from_sample(&self, s: &ExtremalSample, ctx: &Ctx) -> Option<f64> {
        if s.error.is_some() {
            return None;
        }
        let x = s.x;
        let nf = ctx.nf();
        let lam_hat = s.lambda / (ctx.mass / 2.0);
        let sob = |p: f64| (ctx.mass / 2.0) * lam_hat.powf(1.0 - 1.0 / p);
        let v = match *self {
            Quantity::Cms => {
                let f = s.cumulative;
                (s.pi_lower - f).max(f - s.pi).max((s.pi - s.pi_lower - s.lambda).abs()) / ctx.mass
            }
            Quantity::LipschitzUpper => (s.pi_prime? - s.w) / (s.lambda * (1.0 / (1.0 + x)).min(nf * nf)),
            Quantity::LipschitzLower => (s.w - s.pi_prime?) / (s.lambda / (1.0 - x)),
            Quantity::SobolevUpper { p } => (s.pi_prime? - s.w) / (s.lambda * (1.0 / (1.0 + x)).min(nf * nf) + sob(p)),
            Quantity::SobolevLower { p } => (s.w - s.pi_prime?) / (s.lambda / (1.0 - x) + sob(p)),
            Quantity::Deviation => s.pi_prime? - s.w,
            Quantity::LambdaUpper => s.lambda / (ctx.upper * ctx.christoffel_scale(x)),
            Quantity::LambdaLower => s.lambda / (ctx.lower * ctx.christoffel_scale(x)),
            _ => return None,
        };
        Some(v)
    }

    /// Recomputes the value at `(x, aux)` from scratch.
    pub fn evaluate(&self, system: &CanonicalSystem, x: f64, aux: f64) -> Result<Option<f64>> {
        let ctx = Ctx::of(system);
        if self.uses_sample() {
            let s = sample(system, x, 0.0)?;
            return Ok(self.from_sample(&s, &ctx));
        }
        let n = system.n();
        let nf = n as f64;
        let pair = system.pair();
        let ratio_mm = ctx.upper / ctx.lower;
        let v = match *self {
            Quantity::JumpOfDeviation => {
                let dev = |t: f64| -> Result<Option<f64>> { Quantity::Deviation.evaluate(system, t, 0.0) };
                match (dev(x + aux)?, dev(x - aux)?) {
                    (Some(r), Some(l)) => (r - l).abs(),
                    _ => return Ok(None),
                }
            }
            Quantity::FdAgreement => {
                let s = sample(system, x, 0.0)?;
                let Some(pp) = s.pi_prime else { return Ok(None) };
                (pp - fd_pi_prime(system, x, FD_STEP)?).abs()
            }
            Quantity::Exactness => system.exactness_residual(&system.rep_of_x(x)?)?,
            Quantity::EndpointWeight => {
                let rep = system.rep_of_x(x)?;
                rep.weight_at(-1.0).max(rep.weight_at(1.0)) / (ctx.upper * ratio_mm / (nf * nf))
            }
            Quantity::Badkov => {
                let s = (1.0 - x * x).sqrt();
                (pair.phi(x).value.abs() + s * pair.psi(x).value.abs()) * ctx.poly_scale() / ctx.cap(x).sqrt()
            }
            Quantity::Bernstein => pair.phi(x).derivative.abs() * ctx.poly_scale() / (nf * ctx.cap(x).powf(1.5)),
            Quantity::NodeEndpoint { upper, right } => {
                let i = index(aux);
                let xi = system.gaussian_nodes()[i - 1];
                endpoint_ratio(xi, i, n, ratio_mm, upper, right)
            }
            Quantity::GaussNode { a, upper, right } => {
                let i = index(aux);
                let xi = node(system, i, a)?;
                let g = system.gaussian_nodes();
                if !upper && right && xi > g[n - 1] {
                    return Ok(None);
                }
                if !upper && !right && xi < g[0] {
                    return Ok(None);
                }
                endpoint_ratio(xi, i, n, ratio_mm, upper, right)
            }
            Quantity::Spacing { a } => {
                let i = index(aux);
                let gap = node(system, i + 1, a)? - node(system, i, a)?;
                let fi = i as f64;
                gap / (ratio_mm * ratio_mm * fi * (nf - fi) / nf.powi(3))
            }
            Quantity::Separation { lo, hi } => {
                let i = index(aux);
                let fi = i as f64;
                let k = nf + 1.0 - fi;
                let gap = node(system, i, hi)? - node(system, i, lo)?;
                let predicted = if lo >= 0.0 {
                    k * k * (hi - lo) / (nf.powi(3) * (1.0 + k / fi * lo) * (1.0 + k / fi * hi))
                } else {
                    fi * fi * (hi - lo) / (nf.powi(3) * (1.0 + fi / k * -lo) * (1.0 + fi / k * -hi))
                };
                gap / predicted
            }
            Quantity::SegmentPhi => {
                let r = index(aux);
                let center = system.eta()[r];
                let m = segment_min(center, r, n, |t| pair.phi(t).value);
                let rf = r as f64;
                m * ctx.poly_scale() / (nf / (rf * (nf + 1.0 - rf)).sqrt())
            }
            Quantity::SegmentPsi => {
                let r = index(aux);
                let center = system.gaussian_nodes()[r - 1];
                let m = segment_min(center, r, n, |t| pair.psi(t).value);
                let rf = r as f64;
                m * ctx.poly_scale() / (nf / (rf * (nf + 1.0 - rf)).sqrt()).powi(3)
            }
            Quantity::Interlacing { a } => {
                let i = index(aux);
                let xi = node(system, i, a)?;
                let eta = system.eta();
                (xi - eta[i - 1]).min(eta[i] - xi)
            }
            Quantity::LegendreBracket => {
                let i = index(aux);
                let xi = system.gaussian_nodes()[i - 1];
                let d = 2.0 * nf + 1.0;
                let lo = -((2.0 * i as f64 - 1.0) / d * std::f64::consts::PI).cos();
                let hi = -((2.0 * i as f64) / d * std::f64::consts::PI).cos();
                (xi - lo).min(hi - xi)
            }
            Quantity::LegendreComparison { right } => {
                let i = index(aux);
                let legendre = CanonicalSystem::new(presets::constant(1.0), n)?;
                let u = legendre.gaussian_nodes()[i - 1];
                let xi = system.gaussian_nodes()[i - 1];
                let ratio = if right {
                    (1.0 - xi) / (1.0 - u)
                } else {
                    (1.0 + xi) / (1.0 + u)
                };
                (ratio - 1.0 / ratio_mm).min(ratio_mm - ratio)
            }
            Quantity::PaPrime => {
                let rep = system.rep_of_x(x)?;
                let lambda = rep
                    .lambda()
                    .ok_or_else(|| Error::Misuse("rep is not anchored".into()))?;
                let Some(param) = rep.param else { return Ok(None) };
                let scale = (nf / lambda).sqrt();
                if param.is_lobatto() {
                    pair.psi(x).derivative.abs() / (scale / (1.0 - x * x))
                } else {
                    let a = param.a;
                    let xbar = truncate_x(x, &system.gaussian_nodes());
                    let bound = (a.abs() / (1.0 + sgn(a) * x)).max(1.0 / (1.0 - xbar * xbar).sqrt());
                    pair.p_unchecked(a, x).derivative.abs() / (scale * bound)
                }
            }
            Quantity::QxNaive | Quantity::QxSup | Quantity::QxDecay => {
                let q = build_qx(system, &system.rep_of_x(x)?)?.value(aux);
                return Ok(self.from_qx(q, x, aux, &ctx));
            }
            Quantity::Appendix => match appendix::relative_mismatch(system, x)? {
                Some(v) => v,
                None => return Ok(None),
            },
            _ => return Ok(None),
        };
        Ok(Some(v))
    }
}

impl Quantity {
    /// The `q_x` ratios from `q = q_x(t)`.
    pub(crate) fn from_qx(&self, q: f64, x: f64, t: f64, ctx: &Ctx) -> Option<f64> {
        let nf = ctx.nf();
        let v = match self {
            Quantity::QxNaive => {
                let s = sgn(x - t);
                q / (ctx.upper / ctx.lower * (1.0 + s * x) / (1.0 + s * t))
            }
            Quantity::QxSup => q,
            Quantity::QxDecay => q * nf * (nf * (1.0 - t * t).sqrt()).max(1.0) * (t - x) * (t - x),
            _ => return None,
        };
        Some(v)
    }
}

fn endpoint_ratio(xi: f64, i: usize, n: usize, ratio_mm: f64, upper: bool, right: bool) -> f64 {
    let (nf, fi) = (n as f64, i as f64);
    let (dist, frac) = if right {
        ((1.0 - xi).max(0.0).sqrt(), (nf + 1.0 - fi) / nf)
    } else {
        ((1.0 + xi).max(0.0).sqrt(), fi / nf)
    };
    let factor = if upper { ratio_mm.sqrt() } else { 1.0 / ratio_mm.sqrt() };
    dist / (factor * frac)
}

fn segment_min(center: f64, r: usize, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (nf, rf) = (n as f64, r as f64);
    let half = SEGMENT_WIDTH * rf * (nf + 1.0 - rf) / nf.powi(3);
    (0..SEGMENT_SAMPLES)
        .map(|k| center - half + 2.0 * half * k as f64 / (SEGMENT_SAMPLES - 1) as f64)
        .map(|t| f(t.clamp(-1.0, 1.0)).abs())
        .fold(f64::INFINITY, f64::min)
}
