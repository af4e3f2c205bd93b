//! Coherence factors of the reduced two-qubit state.
//!
//! Qubit `j` couples to its own bath only while its interaction window
//! `[t_start[j], t_end[j]]` is open. Each bath mode `k` then picks up the
//! displacement amplitude
//!
//! ```text
//! β_k^j(t) = (g_k^j / ω_k) · e^{iω_k t_start[j]} · (1 − e^{iω_k t_j(t)})
//! ```
//!
//! where `t_j(t)` is the time the window has been open so far. The
//! off-diagonal element `|nm⟩⟨rs|` of the reduced state is multiplied by a
//! phase from the qubit splittings times the bath characteristic function
//! evaluated at `γ^j = ((−1)^n − (−1)^r) β^1`, `((−1)^m − (−1)^s) β^2`.
//!
//! Three evaluation routes are provided and cross-checked in the tests:
//!
//! * [`coherence_closed_form`]: closed-form products of `(1 + ω_c² τ²)`
//!   factors for ohmic baths, valid when the first window opens at `t = 0`;
//! * [`coherence_quadrature`]: the continuum-limit exponent integrated
//!   numerically, any schedule;
//! * [`coherence_discrete`]: an explicit finite sum over bath modes with an
//!   arbitrary covariance matrix.

use crate::error::{validity, Error, Result};
use crate::gaussian::{
    characteristic_exponent, check_rs_uncertainty, make_standard_form, CovarianceMatrix,
    StandardFormParams,
};
use crate::quadrature::{integrate, QuadratureSettings};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    First,
    Second,
}

impl Qubit {
    fn index(self) -> usize {
        match self {
            Qubit::First => 0,
            Qubit::Second => 1,
        }
    }
}

/// Per-qubit interaction windows, times in units of `1/ω_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionSchedule {
    start: [f64; 2],
    end: [f64; 2],
}

impl InteractionSchedule {
    pub fn new(first: (f64, f64), second: (f64, f64)) -> Result<Self> {
        for (name, (s, e)) in [("first", first), ("second", second)] {
            if !(s.is_finite() && e.is_finite()) || s < 0.0 || s >= e {
                return Err(validity(format!(
                    "{name} interaction window must satisfy 0 <= start < end (got [{s}, {e}])"
                )));
            }
        }
        if first.0 > second.0 {
            return Err(validity("the first qubit's window must not open after the second's"));
        }
        Ok(Self { start: [first.0, second.0], end: [first.1, second.1] })
    }

    /// Back-to-back windows `[0, Δt]` and `[Δt, 2Δt]`.
    pub fn sequential(length: f64) -> Result<Self> {
        Self::new((0.0, length), (length, 2.0 * length))
    }

    pub fn start(&self, q: Qubit) -> f64 {
        self.start[q.index()]
    }

    pub fn end(&self, q: Qubit) -> f64 {
        self.end[q.index()]
    }

    /// Time after which both couplings are off.
    pub fn last_end(&self) -> f64 {
        self.end[0].max(self.end[1])
    }
}

/// Window indicator `χ_j(t)`; the interval is closed.
pub fn chi(schedule: &InteractionSchedule, q: Qubit, t: f64) -> u8 {
    u8::from(t >= schedule.start(q) && t <= schedule.end(q))
}

/// `t_j(t) = ∫₀ᵗ χ_j(s) ds = max(min(t, t_end) − t_start, 0)`.
pub fn elapsed_time(schedule: &InteractionSchedule, q: Qubit, t: f64) -> f64 {
    (t.min(schedule.end(q)) - schedule.start(q)).max(0.0)
}

/// Ohmic spectral densities `J_j(ω) = α_j ω e^{−ω/ω_c}` with a shared cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicBath {
    alpha: [f64; 2],
    omega_c: f64,
}

impl OhmicBath {
    pub fn new(alpha1: f64, alpha2: f64, omega_c: f64) -> Result<Self> {
        if !(alpha1 > 0.0 && alpha2 > 0.0 && alpha1.is_finite() && alpha2.is_finite()) {
            return Err(validity("bath couplings alpha1, alpha2 must be positive"));
        }
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(validity("cutoff frequency omega_c must be positive"));
        }
        Ok(Self { alpha: [alpha1, alpha2], omega_c })
    }

    pub fn alpha(&self, q: Qubit) -> f64 {
        self.alpha[q.index()]
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn spectral_density(&self, q: Qubit, omega: f64) -> f64 {
        self.alpha(q) * omega * (-omega / self.omega_c).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub g1: f64,
    pub g2: f64,
}

/// A finite set of bath mode pairs. Mode `k` of bath 1 and mode `k` of
/// bath 2 share a frequency and a two-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModes(Vec<Mode>);

impl DiscreteModes {
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(validity("mode list is empty"));
        }
        let mut previous = 0.0;
        for m in &modes {
            if !(m.omega > previous) || !m.omega.is_finite() {
                return Err(validity("mode frequencies must be positive and strictly increasing"));
            }
            if !(m.g1.is_finite() && m.g2.is_finite()) {
                return Err(validity("mode couplings must be finite"));
            }
            previous = m.omega;
        }
        Ok(Self(modes))
    }

    /// Midpoint sampling of an ohmic bath on `[0, omega_max]` with
    /// `g_k² = J(ω_k) Δω`.
    pub fn ohmic_midpoint(bath: &OhmicBath, n_modes: usize, omega_max: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(validity("mode list is empty"));
        }
        let dw = omega_max / n_modes as f64;
        let modes = (0..n_modes)
            .map(|k| {
                let omega = (k as f64 + 0.5) * dw;
                Mode {
                    omega,
                    g1: (bath.spectral_density(Qubit::First, omega) * dw).sqrt(),
                    g2: (bath.spectral_density(Qubit::Second, omega) * dw).sqrt(),
                }
            })
            .collect();
        Self::new(modes)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.0
    }
}

/// Level splittings `ε₁, ε₂` (units of `ω_c`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QubitParams {
    pub epsilon: [f64; 2],
}

impl QubitParams {
    pub fn new(epsilon1: f64, epsilon2: f64) -> Self {
        Self { epsilon: [epsilon1, epsilon2] }
    }
}

/// The six coherence factors at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceSet {
    pub kappa1: C64,
    pub kappa2: C64,
    pub kappa1_tilde: C64,
    pub kappa2_tilde: C64,
    pub kappa12: C64,
    pub lambda12: C64,
}

/// Index patterns `(n, m, r, s)` for κ₁, κ₂, κ₁₂ and Λ₁₂.
pub const PATTERNS: [[u8; 4]; 4] = [[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 0, 0], [1, 0, 0, 1]];

fn sign_difference(x: u8, y: u8) -> f64 {
    let s = |b: u8| if b.is_multiple_of(2) { 1.0 } else { -1.0 };
    s(x) - s(y)
}

impl CoherenceSet {
    pub fn unity() -> Self {
        let one = C64::new(1.0, 0.0);
        Self { kappa1: one, kappa2: one, kappa1_tilde: one, kappa2_tilde: one, kappa12: one, lambda12: one }
    }

    /// Builds the set from the four decay exponents `Σ λᵀSλ` (ordered as
    /// κ₁, κ₂, κ₁₂, Λ₁₂) and the qubit phases at time `t`.
    fn from_exponents(exponents: [f64; 4], qubits: &QubitParams, t: f64) -> Self {
        Self::from_characteristics(exponents.map(|e| C64::new((-e).exp(), 0.0)), qubits, t)
    }

    /// Builds the set from the bath overlaps `⟨η^{nm}|η^{rs}⟩` (ordered as
    /// κ₁, κ₂, κ₁₂, Λ₁₂) by attaching the qubit phases at time `t`.
    pub fn from_characteristics(overlaps: [C64; 4], qubits: &QubitParams, t: f64) -> Self {
        let factor = |k: usize| {
            let [n, m, r, s] = PATTERNS[k];
            let phase = t
                * (sign_difference(n, r) * qubits.epsilon[0]
                    + sign_difference(m, s) * qubits.epsilon[1]);
            overlaps[k] * C64::from_polar(1.0, phase)
        };
        let (kappa1, kappa2) = (factor(0), factor(1));
        Self {
            kappa1,
            kappa2,
            kappa1_tilde: kappa1,
            kappa2_tilde: kappa2,
            kappa12: factor(2),
            lambda12: factor(3),
        }
    }

    pub fn max_modulus(&self) -> f64 {
        [self.kappa1, self.kappa2, self.kappa1_tilde, self.kappa2_tilde, self.kappa12, self.lambda12]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// `e^{iωs}(1 − e^{iωτ})` written as `−2i sin(ωτ/2) e^{iω(s + τ/2)}`, which
/// keeps full relative precision for small `ωτ`.
fn window_phase_factor(omega: f64, start: f64, elapsed: f64) -> C64 {
    let half = 0.5 * omega * elapsed;
    C64::new(0.0, -2.0 * half.sin()) * C64::from_polar(1.0, omega * start + half)
}

/// Displacement amplitude of one bath mode.
pub fn beta(omega: f64, g: f64, schedule: &InteractionSchedule, q: Qubit, t: f64) -> C64 {
    let elapsed = elapsed_time(schedule, q, t);
    if elapsed == 0.0 {
        return C64::new(0.0, 0.0);
    }
    window_phase_factor(omega, schedule.start(q), elapsed) * (g / omega)
}

/// `γ¹ = ((−1)ⁿ − (−1)ʳ) β¹`, `γ² = ((−1)ᵐ − (−1)ˢ) β²`.
pub fn gamma_pair(n: u8, m: u8, r: u8, s: u8, beta1: C64, beta2: C64) -> (C64, C64) {
    (beta1 * sign_difference(n, r), beta2 * sign_difference(m, s))
}

fn require_rs(s: &CovarianceMatrix) -> Result<()> {
    let report = check_rs_uncertainty(s);
    if report.passes {
        Ok(())
    } else {
        Err(validity(format!(
            "covariance violates the Robertson-Schroedinger condition (min eigenvalue {:e})",
            report.min_eigenvalue
        )))
    }
}

fn require_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(validity(format!("time must be finite and non-negative (got {t})")))
    }
}

/// Closed-form coherence factors for identical standard-form mode states and
/// ohmic baths. Requires the first window to open at `t = 0`.
pub fn coherence_closed_form(
    s: &StandardFormParams,
    bath: &OhmicBath,
    schedule: &InteractionSchedule,
    qubits: &QubitParams,
    t: f64,
) -> Result<CoherenceSet> {
    require_rs(&make_standard_form(*s)?)?;
    require_time(t)?;
    if schedule.start(Qubit::First) != 0.0 {
        return Err(Error::Unsupported(
            "the closed form needs the first window to open at t = 0; use the quadrature or \
             discrete engine for other schedules"
                .into(),
        ));
    }
    Ok(closed_form_unchecked(s, bath, schedule, qubits, t))
}

fn closed_form_unchecked(
    s: &StandardFormParams,
    bath: &OhmicBath,
    schedule: &InteractionSchedule,
    qubits: &QubitParams,
    t: f64,
) -> CoherenceSet {
    let wc = bath.omega_c();
    // ln(1 + ω_c² x²)
    let ln_l = |x: f64| (wc * x * wc * x).ln_1p();
    let t1 = elapsed_time(schedule, Qubit::First, t);
    let t2 = elapsed_time(schedule, Qubit::Second, t);
    let s2 = schedule.start(Qubit::Second);
    let (a1, a2) = (bath.alpha(Qubit::First), bath.alpha(Qubit::Second));
    let q = (a1 * a2).sqrt();

    let local1 = 4.0 * s.a * a1 * ln_l(t1);
    let local2 = 4.0 * s.b * a2 * ln_l(t2);
    let ln_first = ln_l(s2) + ln_l(t1 - t2 - s2) - ln_l(t1 - s2) - ln_l(t2 + s2);
    let ln_second = ln_l(t1 - s2) + ln_l(t2 + s2 + t1) - ln_l(t1 + s2) - ln_l(t2 + s2 - t1);

    let kappa12 = local1 + local2 - 4.0 * s.c_minus * q * ln_first
        - 2.0 * (s.c_minus - s.c_plus) * q * ln_second;
    let lambda12 = local1 + local2 + 4.0 * s.c_minus * q * ln_first
        - 2.0 * (s.c_plus - s.c_minus) * q * ln_second;
    CoherenceSet::from_exponents([local1, local2, kappa12, lambda12], qubits, t)
}

/// Coherence factors from an explicit finite set of bath modes, each mode
/// pair in the zero-mean Gaussian state with covariance `s`.
pub fn coherence_discrete(
    modes: &DiscreteModes,
    s: &CovarianceMatrix,
    schedule: &InteractionSchedule,
    qubits: &QubitParams,
    t: f64,
) -> Result<CoherenceSet> {
    require_rs(s)?;
    require_time(t)?;
    Ok(discrete_unchecked(modes, s, schedule, qubits, t))
}

fn discrete_unchecked(
    modes: &DiscreteModes,
    s: &CovarianceMatrix,
    schedule: &InteractionSchedule,
    qubits: &QubitParams,
    t: f64,
) -> CoherenceSet {
    let mut exponents = [0.0; 4];
    for mode in modes.modes() {
        let b1 = beta(mode.omega, mode.g1, schedule, Qubit::First, t);
        let b2 = beta(mode.omega, mode.g2, schedule, Qubit::Second, t);
        for (acc, &[n, m, r, ss]) in exponents.iter_mut().zip(PATTERNS.iter()) {
            let (g1, g2) = gamma_pair(n, m, r, ss, b1, b2);
            *acc += characteristic_exponent(s, g1, g2);
        }
    }
    CoherenceSet::from_exponents(exponents, qubits, t)
}

/// Frequency beyond which `e^{−ω/ω_c} < 1e−16`.
pub fn quadrature_upper_limit(omega_c: f64) -> f64 {
    omega_c * 16.0 * std::f64::consts::LN_10
}

/// Error estimate above which the quadrature engine reports failure.
pub const QUADRATURE_FAILURE_THRESHOLD: f64 = 1e-9;

/// Continuum-limit coherence factors by adaptive quadrature of the decay
/// exponents. Works for any schedule.
pub fn coherence_quadrature(
    s: &StandardFormParams,
    bath: &OhmicBath,
    schedule: &InteractionSchedule,
    qubits: &QubitParams,
    t: f64,
) -> Result<CoherenceSet> {
    require_rs(&make_standard_form(*s)?)?;
    require_time(t)?;
    let (a1, a2) = (bath.alpha(Qubit::First), bath.alpha(Qubit::Second));
    let wc = bath.omega_c();
    let (s1, s2) = (schedule.start(Qubit::First), schedule.start(Qubit::Second));
    let t1 = elapsed_time(schedule, Qubit::First, t);
    let t2 = elapsed_time(schedule, Qubit::Second, t);
    let upper = quadrature_upper_limit(wc);
    let settings = QuadratureSettings::default();

    let mut exponents = [0.0; 4];
    for (k, &[n, m, r, ss]) in PATTERNS.iter().enumerate() {
        let c1 = sign_difference(n, r);
        let c2 = sign_difference(m, ss);
        // Σ_k λ_kᵀ S λ_k → ∫ dω (e^{−ω/ω_c}/ω) · [quadratic form in ω·β/g],
        // with g₁g₂ → √(J₁J₂) on the cross terms.
        let integrand = |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            let u1 = window_phase_factor(w, s1, t1) * c1;
            let u2 = window_phase_factor(w, s2, t2) * c2;
            let form = s.a * a1 * u1.norm_sqr()
                + s.b * a2 * u2.norm_sqr()
                + 2.0 * (a1 * a2).sqrt() * (s.c_plus * u1.im * u2.im + s.c_minus * u1.re * u2.re);
            form * (-w / wc).exp() / w
        };
        let res = integrate(integrand, 0.0, upper, settings);
        if res.abs_error > QUADRATURE_FAILURE_THRESHOLD || !res.value.is_finite() {
            return Err(Error::Numerical(format!(
                "quadrature did not converge at t = {t} (error estimate {:e} after {} subdivisions)",
                res.abs_error, res.subdivisions
            )));
        }
        exponents[k] = res.value;
    }
    Ok(CoherenceSet::from_exponents(exponents, qubits, t))
}

/// How coherence factors are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    ClosedForm,
    Quadrature,
    /// Midpoint-sampled ohmic bath on `[0, 40 ω_c]`.
    Discrete { n_modes: usize },
}

impl Engine {
    pub const DISCRETE_OMEGA_MAX: f64 = 40.0;
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Engine::ClosedForm => write!(f, "closed_form"),
            Engine::Quadrature => write!(f, "quadrature"),
            Engine::Discrete { n_modes } => write!(f, "discrete:{n_modes}"),
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "closed_form" => Ok(Engine::ClosedForm),
            "quadrature" => Ok(Engine::Quadrature),
            other => {
                let n = other
                    .strip_prefix("discrete:")
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n > 0)
                    .ok_or_else(|| {
                        validity(format!(
                            "unknown engine '{other}' (expected closed_form, quadrature or discrete:<n>)"
                        ))
                    })?;
                Ok(Engine::Discrete { n_modes: n })
            }
        }
    }
}

/// Everything needed to evaluate the coherence factors of one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingModel {
    pub covariance: StandardFormParams,
    pub bath: OhmicBath,
    pub schedule: InteractionSchedule,
    pub qubits: QubitParams,
}

impl DephasingModel {
    pub fn coherence(&self, engine: Engine, t: f64) -> Result<CoherenceSet> {
        match engine {
            Engine::ClosedForm => {
                coherence_closed_form(&self.covariance, &self.bath, &self.schedule, &self.qubits, t)
            }
            Engine::Quadrature => {
                coherence_quadrature(&self.covariance, &self.bath, &self.schedule, &self.qubits, t)
            }
            Engine::Discrete { n_modes } => {
                let modes = self.discrete_modes(n_modes)?;
                let s = make_standard_form(self.covariance)?;
                coherence_discrete(&modes, &s, &self.schedule, &self.qubits, t)
            }
        }
    }

    fn discrete_modes(&self, n_modes: usize) -> Result<DiscreteModes> {
        DiscreteModes::ohmic_midpoint(
            &self.bath,
            n_modes,
            Engine::DISCRETE_OMEGA_MAX * self.bath.omega_c(),
        )
    }

    /// Coherence factors on a whole time grid. Input validation happens once;
    /// each time point is then evaluated independently.
    pub fn trajectory(&self, engine: Engine, times: &[f64]) -> Result<Vec<CoherenceSet>> {
        times.iter().try_for_each(|&t| require_time(t))?;
        let s = make_standard_form(self.covariance)?;
        require_rs(&s)?;
        match engine {
            Engine::ClosedForm => {
                if self.schedule.start(Qubit::First) != 0.0 {
                    // Reuse the single-point error message.
                    return self.coherence(engine, 0.0).map(|_| Vec::new());
                }
                Ok(times
                    .iter()
                    .map(|&t| {
                        closed_form_unchecked(&self.covariance, &self.bath, &self.schedule, &self.qubits, t)
                    })
                    .collect())
            }
            Engine::Quadrature => times.iter().map(|&t| self.coherence(engine, t)).collect(),
            Engine::Discrete { n_modes } => {
                let modes = self.discrete_modes(n_modes)?;
                Ok(times
                    .iter()
                    .map(|&t| discrete_unchecked(&modes, &s, &self.schedule, &self.qubits, t))
                    .collect())
            }
        }
    }
}
