//! Two-mode Gaussian states with zero mean.
//!
//! A zero-mean two-mode Gaussian state is fully described by its 4×4
//! covariance matrix `S`. Throughout the crate `S` is the covariance of the
//! quadrature vector `X' = (q₁, −p₁, q₂, −p₂)`, which is the ordering the
//! characteristic function consumes:
//!
//! ```text
//! ⟨W(γ¹) ⊗ W(γ²)⟩ = exp(−λᵀ S λ),   λ = (Im γ¹, Re γ¹, Im γ², Re γ²)
//! ```
//!
//! Matrices quoted in the `(q₁, p₁, q₂, p₂)` ordering go through
//! [`CovarianceMatrix::from_qp_ordering`], which flips the momentum signs.
//! Vacuum has `S = I/2`.

use nalgebra::{Matrix4, Vector4};

use crate::error::{validity, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::C64;

/// Absolute tolerance on the smallest eigenvalue of `S + (i/2)Ω`.
pub const RS_TOLERANCE: f64 = 1e-10;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Covariance matrix of `(q₁, −p₁, q₂, −p₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(Matrix4<f64>);

impl CovarianceMatrix {
    /// Wraps a matrix already expressed in the `X'` ordering. Rejects
    /// non-symmetric input; physical validity is checked separately by
    /// [`check_rs_uncertainty`].
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        let scale = m.amax().max(1.0);
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOLERANCE * scale {
                    return Err(validity(format!(
                        "covariance matrix is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(validity("covariance matrix has non-finite entries"));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(Matrix4::from_fn(|i, j| rows[i][j]))
    }

    /// Converts a covariance quoted for `(q₁, p₁, q₂, p₂)`.
    pub fn from_qp_ordering(m: Matrix4<f64>) -> Result<Self> {
        let flip = Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, 1.0, -1.0));
        Self::new(flip * m * flip)
    }

    pub fn vacuum() -> Self {
        Self(Matrix4::identity() * 0.5)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// `vᵀ S v`.
    pub fn quadratic_form(&self, v: &Vector4<f64>) -> f64 {
        v.dot(&(self.0 * v))
    }
}

/// Parameters `a, b, c₊, c₋` of a covariance matrix in standard form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardFormParams {
    pub a: f64,
    pub b: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

impl StandardFormParams {
    pub fn new(a: f64, b: f64, c_plus: f64, c_minus: f64) -> Result<Self> {
        let p = Self { a, b, c_plus, c_minus };
        p.validate()?;
        Ok(p)
    }

    /// Standard-form parameters of the two-mode squeezed vacuum.
    pub fn epr(r: SqueezingParam) -> Self {
        let ch = (2.0 * r.r()).cosh() / 2.0;
        let sh = (2.0 * r.r()).sinh() / 2.0;
        Self { a: ch, b: ch, c_plus: sh, c_minus: -sh }
    }

    pub fn uncorrelated_vacuum() -> Self {
        Self { a: 0.5, b: 0.5, c_plus: 0.0, c_minus: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.a, self.b, self.c_plus, self.c_minus];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(validity("standard-form parameters must be finite"));
        }
        if self.a < 0.5 || self.b < 0.5 {
            return Err(validity(format!(
                "standard form requires a, b >= 1/2 (got a = {}, b = {})",
                self.a, self.b
            )));
        }
        Ok(())
    }
}

/// Two-mode squeezing parameter `r`, with `u = tanh r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingParam(f64);

impl SqueezingParam {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(validity("squeezing parameter must be finite"));
        }
        Ok(Self(r))
    }

    pub fn r(&self) -> f64 {
        self.0
    }

    pub fn u(&self) -> f64 {
        self.0.tanh()
    }
}

/// Outcome of the Robertson–Schrödinger check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    pub passes: bool,
    /// Smallest eigenvalue of `S + (i/2)Ω`.
    pub min_eigenvalue: f64,
}

pub fn make_standard_form(p: StandardFormParams) -> Result<CovarianceMatrix> {
    p.validate()?;
    let StandardFormParams { a, b, c_plus, c_minus } = p;
    CovarianceMatrix::from_rows([
        [a, 0.0, c_plus, 0.0],
        [0.0, a, 0.0, c_minus],
        [c_plus, 0.0, b, 0.0],
        [0.0, c_minus, 0.0, b],
    ])
}

/// Covariance of the two-mode squeezed vacuum `√(1−u²) Σ uⁿ |n,n⟩`.
pub fn make_epr_covariance(r: SqueezingParam) -> CovarianceMatrix {
    let ch = (2.0 * r.r()).cosh() / 2.0;
    let sh = (2.0 * r.r()).sinh() / 2.0;
    // (q₁, p₁, q₂, p₂) ordering; the momentum flip happens at the boundary.
    let qp = Matrix4::new(
        ch, 0.0, sh, 0.0, //
        0.0, ch, 0.0, -sh, //
        sh, 0.0, ch, 0.0, //
        0.0, -sh, 0.0, ch,
    );
    CovarianceMatrix::from_qp_ordering(qp).expect("EPR covariance is symmetric and finite")
}

/// `Ω₂ = ω ⊕ ω`, `ω = [[0, 1], [−1, 0]]`.
pub fn symplectic_form() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

fn rs_min_eigenvalue(s: &CovarianceMatrix, sign: f64) -> f64 {
    let omega = symplectic_form();
    let m = Matrix4::from_fn(|i, j| C64::new(s.0[(i, j)], sign * 0.5 * omega[(i, j)]));
    hermitian_eigenvalues(&m)[0]
}

/// Checks `S + (i/2)Ω ≥ 0` up to [`RS_TOLERANCE`].
pub fn check_rs_uncertainty(s: &CovarianceMatrix) -> ValidityReport {
    let min_eigenvalue = rs_min_eigenvalue(s, 1.0);
    ValidityReport { passes: min_eigenvalue >= -RS_TOLERANCE, min_eigenvalue }
}

/// Same check with `−(i/2)Ω`; always agrees with [`check_rs_uncertainty`].
pub fn check_rs_uncertainty_conjugate(s: &CovarianceMatrix) -> ValidityReport {
    let min_eigenvalue = rs_min_eigenvalue(s, -1.0);
    ValidityReport { passes: min_eigenvalue >= -RS_TOLERANCE, min_eigenvalue }
}

/// True iff `S` has the standard-form sparsity and equality pattern.
pub fn is_standard_form(s: &CovarianceMatrix, tol: f64) -> bool {
    let m = s.matrix();
    let zeros = [(0, 1), (0, 3), (1, 2), (2, 3)];
    zeros.iter().all(|&(i, j)| m[(i, j)].abs() <= tol && m[(j, i)].abs() <= tol)
        && (m[(0, 0)] - m[(1, 1)]).abs() <= tol
        && (m[(2, 2)] - m[(3, 3)]).abs() <= tol
}

/// `(Im γ¹, Re γ¹, Im γ², Re γ²)`.
pub fn lambda_vector(gamma1: C64, gamma2: C64) -> Vector4<f64> {
    Vector4::new(gamma1.im, gamma1.re, gamma2.im, gamma2.re)
}

/// `λᵀ S λ`, the negative log of the characteristic function.
pub fn characteristic_exponent(s: &CovarianceMatrix, gamma1: C64, gamma2: C64) -> f64 {
    s.quadratic_form(&lambda_vector(gamma1, gamma2))
}

/// `exp(−λᵀ S λ)`; rejects covariance matrices that violate the
/// Robertson–Schrödinger condition.
pub fn characteristic_value(s: &CovarianceMatrix, gamma1: C64, gamma2: C64) -> Result<f64> {
    let report = check_rs_uncertainty(s);
    if !report.passes {
        return Err(validity(format!(
            "covariance violates the Robertson-Schroedinger condition (min eigenvalue {:e})",
            report.min_eigenvalue
        )));
    }
    Ok((-characteristic_exponent(s, gamma1, gamma2)).exp())
}

/// A zero-mean two-mode Gaussian state whose covariance passed the RS check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeGaussianState {
    covariance: CovarianceMatrix,
}

impl TwoModeGaussianState {
    pub fn new(covariance: CovarianceMatrix) -> Result<Self> {
        let report = check_rs_uncertainty(&covariance);
        if !report.passes {
            return Err(validity(format!(
                "covariance violates the Robertson-Schroedinger condition (min eigenvalue {:e})",
                report.min_eigenvalue
            )));
        }
        Ok(Self { covariance })
    }

    pub fn epr(r: SqueezingParam) -> Self {
        Self { covariance: make_epr_covariance(r) }
    }

    pub fn covariance(&self) -> &CovarianceMatrix {
        &self.covariance
    }

    pub fn characteristic(&self, gamma1: C64, gamma2: C64) -> f64 {
        (-characteristic_exponent(&self.covariance, gamma1, gamma2)).exp()
    }
}
