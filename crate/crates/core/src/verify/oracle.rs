//! Brute-force reference computations in exact rational arithmetic.
//!
//! Inputs are converted from `f64` exactly, so the only rounding happens
//! when a result is converted back.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::canonical::CanonicalSystem;
use crate::weightfn::{PieceKind, WeightSpec};
use crate::Result;

pub type Rational = BigRational;

pub fn rational(x: f64) -> Rational {
    BigRational::from_float(x).expect("finite input")
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn pow(x: &Rational, k: usize) -> Rational {
    num_traits::pow(x.clone(), k)
}

/// Exact `∫_lo^hi p w` when every overlapped piece is a polynomial;
/// `None` otherwise.
pub fn poly_integral(spec: &WeightSpec, coeffs: &[f64], lo: f64, hi: f64) -> Option<Rational> {
    let p: Vec<Rational> = coeffs.iter().map(|&c| rational(c)).collect();
    let mut total = Rational::zero();
    for piece in &spec.pieces {
        let a = piece.lo.max(lo);
        let b = piece.hi.min(hi);
        if a >= b {
            continue;
        }
        let PieceKind::Polynomial { coeffs: w } = &piece.kind else {
            return None;
        };
        let w: Vec<Rational> = w.iter().map(|&c| rational(c)).collect();
        let prod = mul(&p, &w);
        total += integrate_monomials(&prod, &rational(a), &rational(b));
    }
    Some(total)
}

fn mul(p: &[Rational], q: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn integrate_monomials(c: &[Rational], a: &Rational, b: &Rational) -> Rational {
    c.iter()
        .enumerate()
        .map(|(k, ck)| ck * (pow(b, k + 1) - pow(a, k + 1)) / Rational::from_integer(BigInt::from(k + 1)))
        .fold(Rational::zero(), |acc, x| acc + x)
}

/// Exact moments `∫ t^j w`, `j = 0..count`, of an all-polynomial spec.
pub fn moments(spec: &WeightSpec, count: usize) -> Option<Vec<Rational>> {
    (0..count)
        .map(|j| {
            let mut mono = vec![0.0; j + 1];
            mono[j] = 1.0;
            poly_integral(spec, &mono, -1.0, 1.0)
        })
        .collect()
}

/// Recurrence coefficients `(alpha[0..k_max], beta[0..k_max])` of the monic
/// orthogonal polynomials, by exact Gram–Schmidt on the monomials.
///
/// `beta[0]` is the mass. With `modified`, the weight is `(1 - t²) w`.
pub fn recurrence(spec: &WeightSpec, k_max: usize, modified: bool) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let raw = moments(spec, 2 * k_max + 3)?;
    let mu: Vec<Rational> = if modified {
        (0..2 * k_max + 1).map(|j| &raw[j] - &raw[j + 2]).collect()
    } else {
        raw[..2 * k_max + 1].to_vec()
    };
    let inner = |p: &[Rational], q: &[Rational]| -> Rational {
        let mut s = Rational::zero();
        for (i, a) in p.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in q.iter().enumerate() {
                s += a * b * &mu[i + j];
            }
        }
        s
    };
    // Gram–Schmidt: p_k = t^k - Σ_{j<k} <t^k, p_j>/<p_j, p_j> p_j.
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    let mut norms: Vec<Rational> = Vec::new();
    for k in 0..=k_max {
        let mut p = vec![Rational::zero(); k + 1];
        p[k] = Rational::one();
        let mono = p.clone();
        for (q, nq) in basis.iter().zip(&norms) {
            let c = inner(&mono, q) / nq;
            for (i, qi) in q.iter().enumerate() {
                p[i] -= &c * qi;
            }
        }
        norms.push(inner(&p, &p));
        basis.push(p);
    }
    let mut alpha = Vec::with_capacity(k_max);
    let mut beta = Vec::with_capacity(k_max);
    for k in 0..k_max {
        let mut tp = vec![Rational::zero()];
        tp.extend(basis[k].iter().cloned());
        alpha.push(inner(&tp, &basis[k]) / &norms[k]);
        beta.push(if k == 0 {
            norms[0].clone()
        } else {
            &norms[k] / &norms[k - 1]
        });
    }
    Some((alpha, beta))
}

/// Centered difference `(π(x + h) - π(x - h)) / 2h`.
pub fn fd_pi_prime(system: &CanonicalSystem, x: f64, h: f64) -> Result<f64> {
    let pi = |t: f64| -> Result<f64> {
        let rep = system.rep_of_x(t)?;
        Ok(crate::extremal::pi_at(system, &rep)?.0)
    };
    Ok((pi(x + h)? - pi(x - h)?) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weightfn::presets;

    #[test]
    fn legendre_recurrence_is_exact() {
        let (alpha, beta) = recurrence(presets::constant(1.0).spec(), 8, false).unwrap();
        for k in 1..8 {
            assert!(alpha[k].is_zero());
            let k2 = BigInt::from(k * k);
            let expect = Rational::new(k2.clone(), BigInt::from(4) * k2 - BigInt::one());
            assert_eq!(beta[k], expect);
        }
        assert_eq!(beta[0], Rational::from_integer(BigInt::from(2)));
    }

    #[test]
    fn ramp_mass_is_four() {
        let m = poly_integral(presets::ramp().spec(), &[1.0], -1.0, 1.0).unwrap();
        assert_eq!(m, Rational::from_integer(BigInt::from(4)));
    }
}
