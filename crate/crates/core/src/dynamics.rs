//! Reduced two-qubit states under pure dephasing.
//!
//! Density matrices use the basis order `(|11⟩, |10⟩, |01⟩, |00⟩)`. Starting
//! from a pure product state `Σ a_nm |nm⟩ ⊗ |η⟩`, populations never change and
//! each coherence `a_nm a_rs*` is multiplied by its coherence factor:
//!
//! ```text
//!        |11⟩     |10⟩     |01⟩     |00⟩
//! |11⟩   1        κ̃₂       κ̃₁       κ₁₂
//! |10⟩            1        Λ₁₂      κ₁
//! |01⟩                     1        κ₂
//! |00⟩   (Hermitian conjugate)      1
//! ```

use nalgebra::{Matrix4, Vector4};

use crate::coherence::CoherenceSet;
use crate::error::{validity, Result};
use crate::linalg::{hermitian_eigenvalues, hermitian_trace_norm, max_hermitian_defect};
use crate::C64;

const NORM_TOLERANCE: f64 = 1e-12;

/// Amplitudes of a pure two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureAmplitudes {
    pub a00: C64,
    pub a01: C64,
    pub a10: C64,
    pub a11: C64,
}

impl PureAmplitudes {
    pub fn new(a00: C64, a01: C64, a10: C64, a11: C64) -> Result<Self> {
        let amps = Self { a00, a01, a10, a11 };
        let norm = amps.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(validity(format!("amplitudes are not normalized (Σ|a|² = {norm})")));
        }
        Ok(amps)
    }

    /// Builds from a vector in density-matrix basis order.
    pub fn from_vector(v: &Vector4<C64>) -> Result<Self> {
        Self::new(v[3], v[2], v[1], v[0])
    }

    pub fn to_vector(&self) -> Vector4<C64> {
        Vector4::new(self.a11, self.a10, self.a01, self.a00)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a00.norm_sqr() + self.a01.norm_sqr() + self.a10.norm_sqr() + self.a11.norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.to_vector().dotc(&other.to_vector())
    }

    pub fn projector(&self) -> Matrix4<C64> {
        let v = self.to_vector();
        v * v.adjoint()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellSector {
    /// Span of `|00⟩, |11⟩`.
    I,
    /// Span of `|01⟩, |10⟩`.
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellSign {
    Plus,
    Minus,
}

pub fn bell_state(sector: BellSector, sign: BellSign) -> PureAmplitudes {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let s = match sign {
        BellSign::Plus => h,
        BellSign::Minus => -h,
    };
    let zero = C64::new(0.0, 0.0);
    match sector {
        BellSector::I => PureAmplitudes { a00: h, a01: zero, a10: zero, a11: s },
        BellSector::II => PureAmplitudes { a00: zero, a01: h, a10: s, a11: zero },
    }
}

/// A two-qubit density matrix in `(|11⟩, |10⟩, |01⟩, |00⟩)` order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    rho: Matrix4<C64>,
}

impl TwoQubitState {
    /// Wraps a matrix without checking it; see [`TwoQubitState::validate`].
    pub fn from_matrix(rho: Matrix4<C64>) -> Self {
        Self { rho }
    }

    pub fn pure(amps: &PureAmplitudes) -> Self {
        Self { rho: amps.projector() }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.rho
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_hermitian_defect(&self.rho)
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.rho)[0]
    }

    /// Checks hermiticity and unit trace to `1e−12` and positivity to `−1e−10`.
    pub fn validate(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > 1e-12 {
            return Err(validity(format!("density matrix is not Hermitian (defect {defect:e})")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(validity(format!("density matrix trace is {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-10 {
            return Err(validity(format!("density matrix has negative eigenvalue {min:e}")));
        }
        Ok(())
    }
}

/// The Hermitian matrix of coherence factors that multiplies `|ψ⟩⟨ψ|`
/// entrywise.
pub fn coherence_matrix(coh: &CoherenceSet) -> Matrix4<C64> {
    let one = C64::new(1.0, 0.0);
    let upper = [
        [one, coh.kappa2_tilde, coh.kappa1_tilde, coh.kappa12],
        [C64::default(), one, coh.lambda12, coh.kappa1],
        [C64::default(), C64::default(), one, coh.kappa2],
        [C64::default(), C64::default(), C64::default(), one],
    ];
    Matrix4::from_fn(|i, j| if i <= j { upper[i][j] } else { upper[j][i].conj() })
}

/// Reduced state at the instant described by `coh`.
pub fn evolve(amps: &PureAmplitudes, coh: &CoherenceSet) -> TwoQubitState {
    TwoQubitState { rho: amps.projector().component_mul(&coherence_matrix(coh)) }
}

/// Half the trace norm of `ρ₁ − ρ₂`.
pub fn trace_distance(rho1: &TwoQubitState, rho2: &TwoQubitState) -> f64 {
    0.5 * hermitian_trace_norm(&(rho1.rho - rho2.rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample_coherence(lambda: C64) -> CoherenceSet {
        CoherenceSet {
            kappa1: c(0.6, 0.1),
            kappa2: c(-0.2, 0.5),
            kappa1_tilde: c(0.6, 0.1),
            kappa2_tilde: c(-0.2, 0.5),
            kappa12: c(0.05, -0.3),
            lambda12: lambda,
        }
    }

    #[test]
    fn unit_coherence_leaves_pure_state() {
        let amps = PureAmplitudes::new(c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.5, 0.0)).unwrap();
        let rho = evolve(&amps, &CoherenceSet::unity());
        assert_eq!(rho, TwoQubitState::pure(&amps));
    }

    #[test]
    fn full_dephasing_of_sector_one() {
        let mut coh = CoherenceSet::unity();
        coh.kappa12 = c(0.0, 0.0);
        let rho = evolve(&bell_state(BellSector::I, BellSign::Plus), &coh);
        let expected = Matrix4::from_diagonal(&Vector4::new(c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)));
        assert!((rho.matrix() - expected).norm() < 1e-15);
    }

    #[test]
    fn basis_state_is_untouched() {
        let amps = PureAmplitudes::from_vector(&Vector4::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))).unwrap();
        assert_eq!(amps.a11, c(1.0, 0.0));
        let rho = evolve(&amps, &sample_coherence(c(0.2, 0.2)));
        assert_eq!(rho, TwoQubitState::pure(&amps));
    }

    #[test]
    fn eleven_to_zero_zero_entry() {
        let amps = PureAmplitudes::new(c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.5)).unwrap();
        let coh = sample_coherence(c(0.3, 0.0));
        let rho = evolve(&amps, &coh);
        let expected = amps.a11 * amps.a00.conj() * coh.kappa12;
        assert!((rho.matrix()[(0, 3)] - expected).norm() < 1e-15);
        let expected = amps.a10 * amps.a01.conj() * coh.lambda12;
        assert!((rho.matrix()[(1, 2)] - expected).norm() < 1e-15);
    }

    #[test]
    fn bell_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ip = bell_state(BellSector::I, BellSign::Plus);
        assert_eq!((ip.a00.re, ip.a11.re, ip.a01.re, ip.a10.re), (h, h, 0.0, 0.0));
        let iim = bell_state(BellSector::II, BellSign::Minus);
        assert_eq!((iim.a01.re, iim.a10.re), (h, -h));
        assert!(ip.inner(&bell_state(BellSector::I, BellSign::Minus)).norm() < 1e-16);
        assert!((ip.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_amplitudes_rejected() {
        assert!(PureAmplitudes::new(c(1.0, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn trace_distance_basics() {
        let p = TwoQubitState::pure(&bell_state(BellSector::I, BellSign::Plus));
        let m = TwoQubitState::pure(&bell_state(BellSector::I, BellSign::Minus));
        assert_eq!(trace_distance(&p, &p), 0.0);
        assert!((trace_distance(&p, &m) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sector_two_distance_is_lambda_modulus() {
        let coh = sample_coherence(c(0.3, 0.0));
        let p = evolve(&bell_state(BellSector::II, BellSign::Plus), &coh);
        let m = evolve(&bell_state(BellSector::II, BellSign::Minus), &coh);
        assert!((trace_distance(&p, &m) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn validation_flags_bad_matrices() {
        let mut rho = Matrix4::from_diagonal(&Vector4::new(c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        assert!(TwoQubitState::from_matrix(rho).validate().is_ok());
        rho[(0, 1)] = c(0.6, 0.0);
        rho[(1, 0)] = c(0.6, 0.0);
        assert!(TwoQubitState::from_matrix(rho).validate().is_err());
        rho[(1, 0)] = c(0.0, 0.0);
        assert!(TwoQubitState::from_matrix(rho).validate().is_err());
    }

    fn amplitudes() -> impl Strategy<Value = PureAmplitudes> {
        prop::array::uniform8(-1.0f64..1.0)
            .prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
            .prop_map(|v| {
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                PureAmplitudes {
                    a00: c(v[0] / n, v[1] / n),
                    a01: c(v[2] / n, v[3] / n),
                    a10: c(v[4] / n, v[5] / n),
                    a11: c(v[6] / n, v[7] / n),
                }
            })
    }

    proptest! {
        #[test]
        fn populations_invariant(amps in amplitudes(), re in -0.7f64..0.7, im in -0.7f64..0.7) {
            let rho = evolve(&amps, &sample_coherence(c(re, im)));
            let pure = amps.projector();
            for i in 0..4 {
                prop_assert_eq!(rho.matrix()[(i, i)], pure[(i, i)]);
            }
        }

        #[test]
        fn trace_distance_is_a_metric(a in amplitudes(), b in amplitudes(), d in amplitudes()) {
            let coh = sample_coherence(c(0.1, -0.4));
            let (ra, rb, rd) = (evolve(&a, &coh), evolve(&b, &coh), evolve(&d, &coh));
            let ab = trace_distance(&ra, &rb);
            prop_assert!((ab - trace_distance(&rb, &ra)).abs() < 1e-10);
            prop_assert!(trace_distance(&ra, &ra) < 1e-10);
            prop_assert!(ab <= trace_distance(&ra, &rd) + trace_distance(&rd, &rb) + 1e-10);
            prop_assert!((-1e-12..=1.0 + 1e-10).contains(&ab));
        }
    }
}
