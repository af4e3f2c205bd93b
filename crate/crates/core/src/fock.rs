//! Truncated Fock-space oracle.
//!
//! Builds the two-mode squeezed vacuum and single-mode displacement operators
//! as explicit matrices on `{|0⟩, …, |N−1⟩}` and evaluates the bath overlaps
//! `⟨η| D(α₁) ⊗ D(α₂) |η⟩` by brute force. Nothing here uses the covariance
//! matrix, so agreement with [`crate::gaussian`] is an independent check of
//! the covariance entries, the quadrature ordering and the quadratic form.

use nalgebra::DMatrix;

use crate::coherence::{
    beta, gamma_pair, CoherenceSet, DiscreteModes, InteractionSchedule, Qubit, QubitParams, PATTERNS,
};
use crate::error::{validity, Error, Result};
use crate::gaussian::SqueezingParam;
use crate::C64;

pub const DEFAULT_CUTOFF: usize = 40;

/// Largest acceptable truncation-error estimate for an overlap.
pub const TRUNCATION_THRESHOLD: f64 = 1e-8;

/// A two-mode state with amplitudes indexed by `(n₁, n₂)`, `nⱼ < cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    cutoff: usize,
    /// Row `n₁`, column `n₂`.
    amplitudes: DMatrix<C64>,
}

impl FockVector {
    pub fn new(amplitudes: DMatrix<C64>) -> Result<Self> {
        let cutoff = amplitudes.nrows();
        if cutoff == 0 || amplitudes.ncols() != cutoff {
            return Err(validity("Fock amplitudes must form a non-empty square array"));
        }
        Ok(Self { cutoff, amplitudes })
    }

    pub fn vacuum(cutoff: usize) -> Result<Self> {
        tmsv(SqueezingParam::new(0.0)?, cutoff)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitude(&self, n1: usize, n2: usize) -> C64 {
        self.amplitudes[(n1, n2)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability weight carried by states whose larger occupation is `n`.
    fn shell_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.cutoff];
        for i in 0..self.cutoff {
            for j in 0..self.cutoff {
                w[i.max(j)] += self.amplitudes[(i, j)].norm_sqr();
            }
        }
        w
    }
}

/// `u^{2N} / (1 − u²)`, an upper bound on the probability the squeezed vacuum
/// places outside the truncated space.
pub fn tmsv_tail_bound(r: SqueezingParam, cutoff: usize) -> f64 {
    let u2 = r.u() * r.u();
    u2.powi(cutoff as i32) / (1.0 - u2)
}

/// `√(1−u²) Σ_{n<N} uⁿ |n, n⟩`, not renormalized after truncation.
pub fn tmsv(r: SqueezingParam, cutoff: usize) -> Result<FockVector> {
    if cutoff == 0 {
        return Err(validity("cutoff must be at least 1"));
    }
    let u = r.u();
    let mut amplitudes = DMatrix::zeros(cutoff, cutoff);
    let mut a = (1.0 - u * u).sqrt();
    for n in 0..cutoff {
        amplitudes[(n, n)] = C64::new(a, 0.0);
        a *= u;
    }
    FockVector::new(amplitudes)
}

/// A single-mode operator on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub matrix: DMatrix<C64>,
}

impl TruncatedOperator {
    pub fn cutoff(&self) -> usize {
        self.matrix.nrows()
    }

    /// Lowering operator `b` with `b|n⟩ = √n |n−1⟩`.
    pub fn lowering(cutoff: usize) -> Self {
        let mut m = DMatrix::zeros(cutoff, cutoff);
        for n in 1..cutoff {
            m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        Self { matrix: m }
    }

    /// Largest deviation of `D†D` from the identity on the leading
    /// `block × block` corner.
    pub fn unitarity_defect(&self, block: usize) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0_f64;
        for i in 0..block.min(self.cutoff()) {
            for j in 0..block.min(self.cutoff()) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// `exp(α b† − α* b)` on the truncated space (Padé scaling and squaring).
pub fn displacement_matrix(alpha: C64, cutoff: usize) -> Result<TruncatedOperator> {
    if cutoff == 0 {
        return Err(validity("cutoff must be at least 1"));
    }
    let b = TruncatedOperator::lowering(cutoff).matrix;
    let generator = b.adjoint() * alpha - b * alpha.conj();
    Ok(TruncatedOperator { matrix: generator.exp() })
}

/// Rough bound on the error the truncation introduces in
/// `⟨state| D(α₁) ⊗ D(α₂) |state⟩`: each shell `n` leaks roughly
/// `|α|^{N−n}/√((N−n)!)` of amplitude to the cutoff.
pub fn truncation_estimate(state: &FockVector, alpha_max: f64) -> f64 {
    let n = state.cutoff;
    state
        .shell_weights()
        .iter()
        .enumerate()
        .map(|(shell, &w)| {
            let gap = (n - shell) as i32;
            let ln_leak = gap as f64 * alpha_max.max(1e-300).ln() - 0.5 * ln_factorial(gap as usize);
            w * (2.0 * ln_leak.exp()).min(2.0)
        })
        .sum()
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// `⟨state| D(α₁) ⊗ D(α₂) |state⟩`.
pub fn overlap(state: &FockVector, alpha1: C64, alpha2: C64) -> Result<C64> {
    let alpha_max = alpha1.norm().max(alpha2.norm());
    let estimate = truncation_estimate(state, alpha_max);
    if estimate > TRUNCATION_THRESHOLD {
        return Err(Error::Truncation {
            message: format!(
                "estimated truncation error {estimate:e} for |alpha| = {alpha_max} at cutoff {}",
                state.cutoff
            ),
            suggested_cutoff: 2 * state.cutoff,
        });
    }
    let d1 = displacement_matrix(alpha1, state.cutoff)?.matrix;
    let d2 = displacement_matrix(alpha2, state.cutoff)?.matrix;
    // (D₁ Ψ D₂ᵀ)_{n₁n₂} = Σ D₁[n₁,m₁] Ψ[m₁,m₂] D₂[n₂,m₂]
    let applied = d1 * &state.amplitudes * d2.transpose();
    Ok(state.amplitudes.iter().zip(applied.iter()).map(|(a, b)| a.conj() * b).sum())
}

/// Coherence factors for a handful of bath mode pairs, each prepared in the
/// same squeezed vacuum, evaluated overlap by overlap.
pub fn discrete_model_oracle(
    modes: &DiscreteModes,
    r: SqueezingParam,
    schedule: &InteractionSchedule,
    qubits: &QubitParams,
    t: f64,
    cutoff: usize,
) -> Result<CoherenceSet> {
    if modes.modes().len() > 3 {
        return Err(validity("the Fock oracle handles at most three mode pairs"));
    }
    let state = tmsv(r, cutoff)?;
    let mut products = [C64::new(1.0, 0.0); 4];
    for mode in modes.modes() {
        let b1 = beta(mode.omega, mode.g1, schedule, Qubit::First, t);
        let b2 = beta(mode.omega, mode.g2, schedule, Qubit::Second, t);
        for (acc, &[n, m, rr, s]) in products.iter_mut().zip(PATTERNS.iter()) {
            let (g1, g2) = gamma_pair(n, m, rr, s, b1, b2);
            *acc *= overlap(&state, g1, g2)?;
        }
    }
    Ok(CoherenceSet::from_characteristics(products, qubits, t))
}
