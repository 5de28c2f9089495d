//! The extremal functions `π`, `π̲`, `λ` and the derivative `π'`, through
//! the interpolants `q_x`, `p_x`, `p̲_x` on the nodes of `Σ_x`.

mod hermite;
mod profile;

pub use hermite::{HermiteInterpolant, HermiteNode};
pub use profile::{grid_points, grid_step, profile, profile_with, read_samples, Profile, PROFILE_HEADER};

use crate::canonical::{CanonicalParam, CanonicalRep, CanonicalSystem};
use crate::weightfn::compensated_sum;
use crate::{Error, Result};

/// Slack for `q_x >= 0` on the scan.
pub const NONNEGATIVITY_SLACK: f64 = 1e-10;
/// Tolerance for `p_x - p̲_x = q_x` on the scan.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Slack for `p̲_x <= χ <= p_x` on the scan.
pub const SANDWICH_SLACK: f64 = 1e-9;
/// Agreement of `q_x` with its product and pencil forms, relative.
pub const FORM_TOL: f64 = 1e-9;
/// Agreement of `π = Σ λ_x(u)` with `∫ p_x w`, relative to the mass.
pub const PI_CROSS_TOL: f64 = 1e-9;
/// Agreement of the two expressions for `π'`, relative.
pub const PI_PRIME_CROSS_TOL: f64 = 1e-8;

/// Number of interior Chebyshev points in the scans.
pub const SCAN_POINTS: usize = 1000;

/// Chebyshev points of the first kind on `[-1, 1]`, plus both endpoints.
pub fn scan_points() -> Vec<f64> {
    let mut pts = vec![-1.0];
    pts.extend((0..SCAN_POINTS).map(|k| -((std::f64::consts::PI * (k as f64 + 0.5)) / SCAN_POINTS as f64).cos()));
    pts.push(1.0);
    pts
}

fn anchor(rep: &CanonicalRep) -> Result<(usize, f64)> {
    rep.anchor
        .map(|k| (k, rep.nodes[k].position))
        .ok_or_else(|| Error::Misuse("representation is not anchored at a point x".into()))
}

fn interpolant(rep: &CanonicalRep, value: impl Fn(usize) -> f64) -> Result<HermiteInterpolant> {
    let (k, _) = anchor(rep)?;
    HermiteInterpolant::new(
        rep.nodes
            .iter()
            .enumerate()
            .map(|(i, e)| HermiteNode {
                position: e.position,
                value: value(i),
                flat: e.index == 2 && i != k,
            })
            .collect(),
    )
}

/// `q_x` without the scan checks.
pub fn qx_interpolant(rep: &CanonicalRep) -> Result<HermiteInterpolant> {
    let (k, _) = anchor(rep)?;
    interpolant(rep, |i| if i == k { 1.0 } else { 0.0 })
}

/// `p_x` (or `p̲_x` with `lower`) without the scan checks.
pub fn px_interpolant(rep: &CanonicalRep, lower: bool) -> Result<HermiteInterpolant> {
    let (k, _) = anchor(rep)?;
    interpolant(rep, |i| if i < k || (i == k && !lower) { 1.0 } else { 0.0 })
}

/// `q_x(t) = Π_{u ∈ S_x, u ≠ x} ((t - u)/(x - u))^{I(u)}`.
pub fn qx_product(rep: &CanonicalRep, t: f64) -> Result<f64> {
    let (k, x) = anchor(rep)?;
    Ok(rep
        .nodes
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, e)| ((t - e.position) / (x - e.position)).powi(i32::from(e.index)))
        .product())
}

/// `q_x(t)` from the pencil: `(1 + sgn(a) t)/(1 + sgn(a) x) (P_a(t)/((t - x) P_a'(x)))²`,
/// or the `ψ` form when `a` is infinite. Singular at `t = x`.
pub fn qx_pencil(system: &CanonicalSystem, rep: &CanonicalRep, t: f64) -> Result<f64> {
    let (_, x) = anchor(rep)?;
    let param = rep
        .param
        .ok_or_else(|| Error::Misuse("representation has no parameter".into()))?;
    let pair = system.pair();
    if param.is_lobatto() {
        let psi_t = pair.psi(t).value;
        let dpsi_x = pair.psi(x).derivative;
        let r = psi_t / ((t - x) * dpsi_x);
        return Ok((1.0 - t * t) / (1.0 - x * x) * r * r);
    }
    let s = crate::orthopoly::sgn(param.a);
    let p_t = pair.p_unchecked(param.a, t).value;
    let dp_x = pair.p_unchecked(param.a, x).derivative;
    let r = p_t / ((t - x) * dp_x);
    Ok((1.0 + s * t) / (1.0 + s * x) * r * r)
}

/// `q_x`, checked for nonnegativity on the scan and against its product
/// and pencil forms.
pub fn build_qx(system: &CanonicalSystem, rep: &CanonicalRep) -> Result<HermiteInterpolant> {
    let q = qx_interpolant(rep)?;
    let (_, x) = anchor(rep)?;
    for t in scan_points() {
        let v = q.value(t);
        if v < -NONNEGATIVITY_SLACK {
            return Err(Error::Construction(format!("q_x({t}) = {v:e} < 0 for x = {x}")));
        }
        let prod = qx_product(rep, t)?;
        if (v - prod).abs() > FORM_TOL * v.abs().max(1.0) {
            return Err(Error::Construction(format!(
                "q_x({t}) = {v} disagrees with the product form {prod} for x = {x}"
            )));
        }
        if (t - x).abs() > 1e-6 {
            let pencil = qx_pencil(system, rep, t)?;
            if (v - pencil).abs() > FORM_TOL * v.abs().max(1.0) {
                return Err(Error::Construction(format!(
                    "q_x({t}) = {v} disagrees with the pencil form {pencil} for x = {x}"
                )));
            }
        }
    }
    Ok(q)
}

/// `p_x`, `p̲_x` and `q_x` for one representation.
#[derive(Debug, Clone)]
pub struct PxFamily {
    pub px: HermiteInterpolant,
    pub px_lower: HermiteInterpolant,
    pub qx: HermiteInterpolant,
}

/// Builds the family and checks `p_x - p̲_x = q_x` and `p̲_x <= χ <= p_x` on the scan.
pub fn build_family(rep: &CanonicalRep) -> Result<PxFamily> {
    let (_, x) = anchor(rep)?;
    let family = PxFamily {
        px: px_interpolant(rep, false)?,
        px_lower: px_interpolant(rep, true)?,
        qx: qx_interpolant(rep)?,
    };
    for t in scan_points() {
        let p = family.px.value(t);
        let pl = family.px_lower.value(t);
        let q = family.qx.value(t);
        if (p - pl - q).abs() > IDENTITY_TOL * p.abs().max(1.0) {
            return Err(Error::Construction(format!(
                "p_x - p̲_x - q_x = {:e} at t = {t} for x = {x}",
                p - pl - q
            )));
        }
        let upper = if t <= x { 1.0 } else { 0.0 };
        let lower = if t < x { 1.0 } else { 0.0 };
        if p < upper - SANDWICH_SLACK || pl > lower + SANDWICH_SLACK {
            return Err(Error::Construction(format!(
                "sandwich fails at t = {t} for x = {x}: p̲_x = {pl}, p_x = {p}"
            )));
        }
    }
    Ok(family)
}

pub fn build_px(rep: &CanonicalRep) -> Result<HermiteInterpolant> {
    Ok(build_family(rep)?.px)
}

pub fn build_px_lower(rep: &CanonicalRep) -> Result<HermiteInterpolant> {
    Ok(build_family(rep)?.px_lower)
}

/// `(π(x), π̲(x), λ(x))` as partial sums of the weights of `Σ_x`,
/// cross-checked against `∫ p_x w` and `∫ p̲_x w`.
pub fn pi_at(system: &CanonicalSystem, rep: &CanonicalRep) -> Result<(f64, f64, f64)> {
    let (k, x) = anchor(rep)?;
    let pi_lower = compensated_sum(rep.nodes[..k].iter().map(|e| e.weight));
    let lambda = rep.nodes[k].weight;
    let pi = compensated_sum(rep.nodes[..=k].iter().map(|e| e.weight));
    let px = px_interpolant(rep, false)?;
    let pl = px_interpolant(rep, true)?;
    let int_p = system.integrate(|t| px.value(t));
    let int_pl = system.integrate(|t| pl.value(t));
    let tol = PI_CROSS_TOL * system.mass();
    if (int_p - pi).abs() > tol || (int_pl - pi_lower).abs() > tol {
        return Err(Error::Inconsistency(format!(
            "at x = {x}: π = {pi} vs ∫p_x w = {int_p}, π̲ = {pi_lower} vs ∫p̲_x w = {int_pl}"
        )));
    }
    Ok((pi, pi_lower, lambda))
}

/// The two sides of `π'(x) = -λ(x) p_x'(x) = λ_x(-1) p_x'(-1) + λ_x(1) p_x'(1) - ∫ p_x' w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiPrimeForms {
    pub local: f64,
    pub endpoint: f64,
    pub scale: f64,
}

pub fn pi_prime_forms(system: &CanonicalSystem, rep: &CanonicalRep) -> Result<PiPrimeForms> {
    let (k, x) = anchor(rep)?;
    let px = px_interpolant(rep, false)?;
    let lambda = rep.nodes[k].weight;
    let local = -lambda * px.eval(x).derivative;
    let lo = rep.weight_at(-1.0) * px.eval(-1.0).derivative;
    let hi = rep.weight_at(1.0) * px.eval(1.0).derivative;
    let int = system.integrate(|t| px.eval(t).derivative);
    Ok(PiPrimeForms {
        local,
        endpoint: lo + hi - int,
        scale: system.mass().max(lo.abs() + hi.abs() + int.abs()),
    })
}

/// `π'(x)`, or `None` when `Σ_x` is the Gaussian or Lobatto rule, where
/// `π` need not be differentiable.
pub fn pi_prime_at(system: &CanonicalSystem, rep: &CanonicalRep) -> Result<Option<f64>> {
    let param = rep
        .param
        .ok_or_else(|| Error::Misuse("representation has no parameter".into()))?;
    if param.is_gaussian() || param.is_lobatto() {
        return Ok(None);
    }
    let f = pi_prime_forms(system, rep)?;
    if (f.local - f.endpoint).abs() > PI_PRIME_CROSS_TOL * f.scale {
        return Err(Error::Inconsistency(format!(
            "π' at x = {:?}: -λ p_x'(x) = {} but the endpoint form gives {}",
            rep.x(),
            f.local,
            f.endpoint
        )));
    }
    Ok(Some(f.local))
}

/// `p_x'(x)` from the Hermite basis, summed over the nodes at or left of
/// `x` and, separately, minus the sum over the nodes right of `x`.
pub fn px_prime_closed_form(rep: &CanonicalRep) -> Result<(f64, f64)> {
    let (k, x) = anchor(rep)?;
    let order = |i: usize| -> i32 {
        if i == k {
            1
        } else {
            i32::from(rep.nodes[i].index)
        }
    };
    let mut left = compensated_sum(
        rep.nodes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, e)| f64::from(e.index) / (x - e.position)),
    );
    let mut right = 0.0;
    for (i, e) in rep.nodes.iter().enumerate() {
        if i == k {
            continue;
        }
        let u = e.position;
        let mut prod = 1.0 / (u - x);
        for (j, v) in rep.nodes.iter().enumerate() {
            if j != i && j != k {
                prod *= ((x - v.position) / (u - v.position)).powi(order(j));
            }
        }
        let h = if e.index == 2 {
            let slope = compensated_sum(
                rep.nodes
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(j, v)| f64::from(order(j)) / (u - v.position)),
            );
            prod * (1.0 - slope * (x - u))
        } else {
            prod
        };
        if i < k {
            left += h;
        } else {
            right -= h;
        }
    }
    Ok((left, right))
}

/// One point of a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSample {
    pub x: f64,
    pub pi: f64,
    pub pi_lower: f64,
    pub lambda: f64,
    /// `None` at excluded points.
    pub pi_prime: Option<f64>,
    /// `w(x)`, the right limit at a breakpoint.
    pub w: f64,
    /// `∫_{-1}^x w`.
    pub cumulative: f64,
    pub param: Option<CanonicalParam>,
    pub excluded: bool,
    /// Set when the point could not be evaluated; the reals are then NaN.
    pub error: Option<String>,
}

impl ExtremalSample {
    fn failed(x: f64, w: f64, excluded: bool, e: &Error) -> Self {
        Self {
            x,
            pi: f64::NAN,
            pi_lower: f64::NAN,
            lambda: f64::NAN,
            pi_prime: None,
            w,
            cumulative: f64::NAN,
            param: None,
            excluded,
            error: Some(e.to_string()),
        }
    }
}

/// Evaluates everything at `x`; `π'` is skipped when `x` is within
/// `exclusion_radius` of a Gaussian or interior Lobatto node.
pub fn sample(system: &CanonicalSystem, x: f64, exclusion_radius: f64) -> Result<ExtremalSample> {
    let near_node = system
        .gaussian_nodes()
        .iter()
        .chain(&system.eta()[1..system.n()])
        .any(|&u| (u - x).abs() < exclusion_radius);
    let rep = system.rep_of_x(x)?;
    let (pi, pi_lower, lambda) = pi_at(system, &rep)?;
    let pi_prime = if near_node { None } else { pi_prime_at(system, &rep)? };
    Ok(ExtremalSample {
        x,
        pi,
        pi_lower,
        lambda,
        pi_prime,
        w: system.weight().value(x),
        cumulative: system.weight().cumulative(x)?,
        param: rep.param,
        excluded: pi_prime.is_none(),
        error: None,
    })
}

/// Like [`sample`], but records a failure in the sample instead of returning it.
pub fn sample_or_record(system: &CanonicalSystem, x: f64, exclusion_radius: f64) -> ExtremalSample {
    sample(system, x, exclusion_radius)
        .unwrap_or_else(|e| ExtremalSample::failed(x, system.weight().value(x), true, &e))
}
