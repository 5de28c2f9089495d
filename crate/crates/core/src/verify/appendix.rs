//! The relation between the orthonormal polynomials on the circle for
//! `w(cos θ)|sin θ|` and the pair `φ, ψ`:
//! `(2/π)|Φ_{2n}(e^{iθ})|² = (1 + f/ℓ) φ(x)² + (1 - f/ℓ)(1 - x²) ψ(x)²`
//! at `x = cos θ`, where `ℓ` is the leading coefficient of `Φ_{2n}` and
//! `f = Φ_{2n}(0)`.

use nalgebra::DMatrix;

use super::quantity::Quantity;
use super::{CheckReport, Constant, Direction, Extreme, Witness};
use crate::canonical::CanonicalSystem;
use crate::weightfn::PieceKind;
use crate::{Error, Result};

pub const APPENDIX_POINTS: usize = 64;
pub const APPENDIX_TOL: f64 = 1e-6;

/// Coefficients of `Φ_{2n}` in powers of `z`.
fn circle_polynomial(system: &CanonicalSystem) -> Result<Vec<f64>> {
    let k = 2 * system.n();
    // c_j = (1/2π) ∫ w(cos θ)|sin θ| cos(jθ) dθ = (1/π) ∫ w(t) T_j(t) dt
    let moments: Vec<f64> = (0..=k)
        .map(|j| system.integrate(|t| (j as f64 * t.clamp(-1.0, 1.0).acos()).cos()) / std::f64::consts::PI)
        .collect();
    let gram = DMatrix::from_fn(k + 1, k + 1, |a, b| moments[a.abs_diff(b)]);
    let chol = gram.cholesky().ok_or_else(|| Error::IllConditioned {
        k,
        reason: "Toeplitz moment matrix is not positive definite".into(),
    })?;
    let inv = chol.l().try_inverse().ok_or_else(|| Error::IllConditioned {
        k,
        reason: "singular Cholesky factor".into(),
    })?;
    Ok(inv.row(k).iter().copied().collect())
}

fn has_tabulated_piece(system: &CanonicalSystem) -> bool {
    system
        .weight()
        .pieces
        .iter()
        .any(|p| matches!(p.kind, PieceKind::Tabulated { .. }))
}

fn mismatch(system: &CanonicalSystem, coeffs: &[f64], x: f64) -> f64 {
    let k = coeffs.len() - 1;
    let (lead, constant) = (coeffs[k], coeffs[0]);
    let theta = x.clamp(-1.0, 1.0).acos();
    let (re, im) = coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (j, &c)| {
        let (s, co) = (j as f64 * theta).sin_cos();
        (re + c * co, im + c * s)
    });
    let lhs = 2.0 / std::f64::consts::PI * (re * re + im * im);
    let ratio = constant / lead;
    let phi = system.pair().phi(x).value;
    let psi = system.pair().psi(x).value;
    let rhs = (1.0 + ratio) * phi * phi + (1.0 - ratio) * (1.0 - x * x) * psi * psi;
    (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE)
}

/// Relative mismatch at `x`; `None` for weights with tabulated pieces.
pub(crate) fn relative_mismatch(system: &CanonicalSystem, x: f64) -> Result<Option<f64>> {
    if has_tabulated_piece(system) {
        return Ok(None);
    }
    Ok(Some(mismatch(system, &circle_polynomial(system)?, x)))
}

/// The circle relation on `θ_j = π(j + 1/2)/64`. Report-only.
pub fn appendix_consistency(system: &CanonicalSystem, fault: bool) -> Result<CheckReport> {
    let n = system.n();
    let mut report = CheckReport {
        name: "appendix-consistency".into(),
        constants: Vec::new(),
        witness: None,
        pass: true,
        tolerance: format!("relative mismatch <= {APPENDIX_TOL:e} on {APPENDIX_POINTS} angles"),
        gating: false,
        notes: Vec::new(),
    };
    if has_tabulated_piece(system) {
        report.notes.push("skipped: weight has tabulated pieces".into());
        return Ok(report);
    }
    let coeffs = circle_polynomial(system)?;
    let mut worst = Extreme::new(Direction::Upper);
    for j in 0..APPENDIX_POINTS {
        let x = (std::f64::consts::PI * (j as f64 + 0.5) / APPENDIX_POINTS as f64).cos();
        let mut v = mismatch(system, &coeffs, x);
        if fault {
            v += 10.0 * APPENDIX_TOL;
        }
        worst.offer(v, || Witness {
            quantity: Quantity::Appendix,
            n,
            x,
            aux: 0.0,
            value: v,
        });
    }
    report.constants.push(Constant {
        name: "max-relative-mismatch".into(),
        n,
        value: worst.value,
    });
    report.pass = worst.value <= APPENDIX_TOL;
    report.witness = worst.witness;
    Ok(report)
}
