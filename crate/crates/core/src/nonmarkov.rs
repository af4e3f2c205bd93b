//! Trace-distance non-Markovianity.
//!
//! For a pair of initial states the trace distance `D(t)` between their
//! evolved versions can only shrink under Markovian (divisible) dynamics.
//! Every stretch where it grows again is information flowing back from the
//! environment. The measure is the total growth,
//!
//! ```text
//! N = max over orthogonal pairs  ∫_{dD/dt > 0} dD/dt dt,
//! ```
//!
//! evaluated here as the positive variation of a sampled trajectory and
//! maximised over pure orthogonal pairs with a multi-start simplex search.

use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coherence::{CoherenceSet, DephasingModel, Engine};
use crate::dynamics::{bell_state, coherence_matrix, evolve, trace_distance, BellSector, BellSign, PureAmplitudes};
use crate::error::{validity, Error, Result};
use crate::linalg::hermitian_trace_norm;
use crate::simplex::{minimize, SimplexSettings};
use crate::C64;

const ORTHOGONALITY_TOLERANCE: f64 = 1e-12;
const RANGE_SLACK: f64 = 1e-10;

/// Which function of the trace distance is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    /// `D(t)` itself.
    Linear,
    /// `D(t)²`, the square of the coherence modulus for Bell pairs.
    Squared,
}

impl Convention {
    fn apply(self, d: f64) -> f64 {
        match self {
            Convention::Linear => d,
            Convention::Squared => d * d,
        }
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Convention::Linear => "linear",
            Convention::Squared => "squared",
        })
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" => Ok(Convention::Linear),
            "squared" => Ok(Convention::Squared),
            other => Err(validity(format!("unknown convention '{other}' (expected linear or squared)"))),
        }
    }
}

/// Sampled trace-distance curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(validity("trajectory times and values differ in length"));
        }
        if times.len() < 2 {
            return Err(validity("trajectory needs at least two samples"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(validity("trajectory times must be strictly increasing"));
        }
        if values.iter().any(|v| !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(v)) {
            return Err(validity("trajectory values must lie in [0, 1]"));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Sum of all positive increments of the sampled curve.
pub fn backflow_integral(traj: &Trajectory) -> f64 {
    positive_variation(&traj.values)
}

fn positive_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum()
}

/// Two orthonormal pure states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePair {
    pub first: PureAmplitudes,
    pub second: PureAmplitudes,
}

impl StatePair {
    pub fn new(first: PureAmplitudes, second: PureAmplitudes) -> Result<Self> {
        let overlap = first.inner(&second).norm();
        if overlap > ORTHOGONALITY_TOLERANCE {
            return Err(validity(format!("state pair is not orthogonal (|<a|b>| = {overlap:e})")));
        }
        Ok(Self { first, second })
    }

    pub fn bell(sector: BellSector) -> Self {
        Self { first: bell_state(sector, BellSign::Plus), second: bell_state(sector, BellSign::Minus) }
    }

    /// `(|00⟩ ± i|11⟩)/√2` or `(|01⟩ ± i|10⟩)/√2`.
    pub fn bell_imaginary(sector: BellSector) -> Self {
        let rotate = |mut a: PureAmplitudes| {
            match sector {
                BellSector::I => a.a11 *= C64::i(),
                BellSector::II => a.a10 *= C64::i(),
            }
            a
        };
        let b = Self::bell(sector);
        Self { first: rotate(b.first), second: rotate(b.second) }
    }

    /// `P₁ − P₂` in density-matrix basis order.
    fn projector_difference(&self) -> Matrix4<C64> {
        self.first.projector() - self.second.projector()
    }
}

/// The four Bell-type pairs used as deterministic starting points.
pub fn bell_pairs() -> [(&'static str, StatePair); 4] {
    [
        ("bell_I", StatePair::bell(BellSector::I)),
        ("bell_II", StatePair::bell(BellSector::II)),
        ("bell_I_imag", StatePair::bell_imaginary(BellSector::I)),
        ("bell_II_imag", StatePair::bell_imaginary(BellSector::II)),
    ]
}

/// Coherence factors sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceTrajectory {
    times: Vec<f64>,
    sets: Vec<CoherenceSet>,
}

impl CoherenceTrajectory {
    pub fn new(times: Vec<f64>, sets: Vec<CoherenceSet>) -> Result<Self> {
        if times.len() != sets.len() {
            return Err(validity("time grid and coherence samples differ in length"));
        }
        if times.len() < 2 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(validity("time grid needs at least two strictly increasing points"));
        }
        Ok(Self { times, sets })
    }

    pub fn compute(model: &DephasingModel, engine: Engine, times: Vec<f64>) -> Result<Self> {
        let sets = model.trajectory(engine, &times)?;
        Self::new(times, sets)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sets(&self) -> &[CoherenceSet] {
        &self.sets
    }
}

/// `n` equally spaced points on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(validity("a time grid needs at least two points"));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(validity("t_max must be positive"));
    }
    let intervals = (n - 1) as f64;
    Ok((0..n).map(|i| t_max * i as f64 / intervals).collect())
}

/// Trace distance (or its square) between the evolved members of `pair`.
pub fn pair_trajectory(pair: &StatePair, coherences: &CoherenceTrajectory, convention: Convention) -> Result<Trajectory> {
    let values = coherences
        .sets
        .iter()
        .map(|coh| {
            let d = trace_distance(&evolve(&pair.first, coh), &evolve(&pair.second, coh));
            convention.apply(d.clamp(0.0, 1.0))
        })
        .collect();
    Trajectory::new(coherences.times.clone(), values)
}

/// Ten real parameters covering every orthonormal pair up to phases: six
/// for the first state (three hyperspherical angles, three relative phases)
/// and four for a unit vector in its orthogonal complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairParametrization(pub [f64; 10]);

impl PairParametrization {
    pub const DIMENSION: usize = 10;

    fn first_vector(&self) -> Vector4<C64> {
        let p = &self.0;
        let (s1, c1) = p[0].sin_cos();
        let (s2, c2) = p[1].sin_cos();
        let (s3, c3) = p[2].sin_cos();
        Vector4::new(
            C64::new(c1, 0.0),
            C64::from_polar(s1 * c2, p[3]),
            C64::from_polar(s1 * s2 * c3, p[4]),
            C64::from_polar(s1 * s2 * s3, p[5]),
        )
    }

    /// Householder reflection mapping `e₀` onto `psi` (whose first component
    /// is real); its remaining columns span the orthogonal complement.
    fn complement_map(psi: &Vector4<C64>) -> Matrix4<C64> {
        let mut v = -psi;
        v[0] += C64::new(1.0, 0.0);
        let vv = v.norm_squared();
        if vv < 1e-24 {
            return Matrix4::identity();
        }
        Matrix4::identity() - v * v.adjoint() * C64::new(2.0 / vv, 0.0)
    }

    fn vectors(&self) -> (Vector4<C64>, Vector4<C64>) {
        let p = &self.0;
        let psi = self.first_vector();
        let (s4, c4) = p[6].sin_cos();
        let (s5, c5) = p[7].sin_cos();
        let w = Vector4::new(
            C64::new(0.0, 0.0),
            C64::new(c4, 0.0),
            C64::from_polar(s4 * c5, p[8]),
            C64::from_polar(s4 * s5, p[9]),
        );
        let phi = Self::complement_map(&psi) * w;
        (psi, phi)
    }

    pub fn to_pair(&self) -> StatePair {
        let (psi, phi) = self.vectors();
        let first = PureAmplitudes::from_vector(&psi).expect("parametrized state is normalized");
        let second = PureAmplitudes::from_vector(&phi).expect("parametrized state is normalized");
        StatePair { first, second }
    }

    /// Parameters reproducing `pair` up to a global phase on each state.
    pub fn from_pair(pair: &StatePair) -> Self {
        let mut p = [0.0; 10];
        let psi = real_leading(pair.first.to_vector());
        p[0] = psi[0].re.clamp(-1.0, 1.0).acos();
        p[1] = psi[2].norm().hypot(psi[3].norm()).atan2(psi[1].norm());
        p[2] = psi[3].norm().atan2(psi[2].norm());
        p[3] = psi[1].arg();
        p[4] = psi[2].arg();
        p[5] = psi[3].arg();
        let rebuilt = Self(p).first_vector();
        let w = Self::complement_map(&rebuilt) * pair.second.to_vector();
        let w = real_leading(Vector4::new(w[1], w[2], w[3], C64::new(0.0, 0.0)));
        p[6] = w[0].re.clamp(-1.0, 1.0).acos();
        p[7] = w[2].norm().atan2(w[1].norm());
        p[8] = w[1].arg();
        p[9] = w[2].arg();
        Self(p)
    }
}

/// Removes the global phase so the first component is real and non-negative.
fn real_leading(v: Vector4<C64>) -> Vector4<C64> {
    let lead = v[0];
    if lead.norm() > 1e-14 {
        v * (lead.conj() / lead.norm())
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub random_starts: usize,
    pub max_evaluations: usize,
    pub x_tolerance: f64,
    pub f_tolerance: f64,
    pub initial_step: f64,
    pub seed: u64,
    /// The local searches see every `search_stride`-th grid point; the final
    /// candidates are re-scored on the full grid.
    pub search_stride: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            random_starts: 20,
            max_evaluations: 5000,
            x_tolerance: 1e-8,
            f_tolerance: 1e-12,
            initial_step: 0.25,
            seed: 0x5eed,
            search_stride: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub n_value: f64,
    pub pair: StatePair,
    pub trajectory: Trajectory,
    pub convention: Convention,
    /// False when the local search that produced the winner ran out of budget.
    pub converged: bool,
    pub evaluations: usize,
}

/// Positive variation of `D` (or `D²`) for the pair `P₁ − P₂`, evaluated
/// directly from the coherence matrices.
fn search_objective(diff: &Matrix4<C64>, coherence: &[Matrix4<C64>], convention: Convention) -> f64 {
    let mut total = 0.0;
    let mut previous: Option<f64> = None;
    for e in coherence {
        let d = convention.apply(0.5 * hermitian_trace_norm(&diff.component_mul(e)));
        if let Some(p) = previous {
            total += (d - p).max(0.0);
        }
        previous = Some(d);
    }
    total
}

struct Candidate {
    pair: StatePair,
    converged: bool,
}

/// Maximises the backflow over orthogonal pure-state pairs. The four Bell
/// pairs are always among the scored candidates, so the result is never
/// below the best Bell pair.
pub fn maximize_measure(
    coherences: &CoherenceTrajectory,
    convention: Convention,
    config: &OptimizerConfig,
) -> Result<MeasureResult> {
    let stride = config.search_stride.max(1);
    let mut search_grid: Vec<Matrix4<C64>> =
        coherences.sets.iter().step_by(stride).map(coherence_matrix).collect();
    if !(coherences.sets.len() - 1).is_multiple_of(stride) {
        search_grid.push(coherence_matrix(coherences.sets.last().expect("non-empty")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut starts: Vec<PairParametrization> =
        bell_pairs().iter().map(|(_, pair)| PairParametrization::from_pair(pair)).collect();
    for _ in 0..config.random_starts {
        let mut p = [0.0; 10];
        for (k, slot) in p.iter_mut().enumerate() {
            let is_phase = matches!(k, 3 | 4 | 5 | 8 | 9);
            *slot = if is_phase {
                rng.gen_range(0.0..std::f64::consts::TAU)
            } else {
                rng.gen_range(0.0..std::f64::consts::FRAC_PI_2)
            };
        }
        starts.push(PairParametrization(p));
    }

    let settings = SimplexSettings {
        max_evaluations: config.max_evaluations,
        x_tolerance: config.x_tolerance,
        f_tolerance: config.f_tolerance,
        initial_step: config.initial_step,
    };
    let mut evaluations = 0;
    let mut candidates: Vec<Candidate> = Vec::new();
    for (k, start) in starts.iter().enumerate() {
        let res = minimize(
            |x| {
                let params = PairParametrization(x.try_into().expect("ten parameters"));
                -search_objective(&params.to_pair().projector_difference(), &search_grid, convention)
            },
            &start.0,
            settings,
        );
        evaluations += res.evaluations;
        if k < 4 {
            // Exact Bell pairs, free of parametrization round-off.
            candidates.push(Candidate { pair: bell_pairs()[k].1, converged: res.converged });
        }
        let found = PairParametrization(res.x.as_slice().try_into().expect("ten parameters"));
        candidates.push(Candidate { pair: found.to_pair(), converged: res.converged });
    }

    let mut best: Option<(f64, Trajectory, &Candidate)> = None;
    for cand in &candidates {
        let traj = pair_trajectory(&cand.pair, coherences, convention)?;
        let value = backflow_integral(&traj);
        if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
            best = Some((value, traj, cand));
        }
    }
    let (n_value, trajectory, winner) = best.expect("at least the Bell candidates exist");
    Ok(MeasureResult {
        n_value,
        pair: winner.pair,
        trajectory,
        convention,
        converged: winner.converged,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::{InteractionSchedule, OhmicBath, QubitParams};
    use crate::gaussian::{SqueezingParam, StandardFormParams};
    use proptest::prelude::*;

    fn traj(values: &[f64]) -> Trajectory {
        Trajectory::new((0..values.len()).map(|k| k as f64).collect(), values.to_vec()).unwrap()
    }

    #[test]
    fn backflow_examples() {
        assert_eq!(backflow_integral(&traj(&[1.0, 0.8, 0.5, 0.1])), 0.0);
        assert!((backflow_integral(&traj(&[1.0, 0.2, 0.9, 0.9])) - 0.7).abs() < 1e-15);
        assert!((backflow_integral(&traj(&[1.0, 0.4, 0.6, 0.3, 0.5])) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn trajectory_invariants() {
        assert!(Trajectory::new(vec![0.0], vec![1.0]).is_err());
        assert!(Trajectory::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Trajectory::new(vec![0.0, 1.0], vec![1.0, 1.5]).is_err());
        assert!(Trajectory::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn conventions_parse() {
        assert_eq!("linear".parse::<Convention>().unwrap(), Convention::Linear);
        assert_eq!("squared".parse::<Convention>().unwrap(), Convention::Squared);
        assert!("cubic".parse::<Convention>().is_err());
    }

    #[test]
    fn bell_pairs_are_orthonormal() {
        for (_, pair) in bell_pairs() {
            assert!(StatePair::new(pair.first, pair.second).is_ok());
        }
        let a = bell_state(BellSector::I, BellSign::Plus);
        assert!(StatePair::new(a, a).is_err());
    }

    #[test]
    fn parametrization_round_trips_bell_pairs() {
        for (name, pair) in bell_pairs() {
            let back = PairParametrization::from_pair(&pair).to_pair();
            let d1 = (back.first.projector() - pair.first.projector()).norm();
            let d2 = (back.second.projector() - pair.second.projector()).norm();
            assert!(d1 < 1e-12 && d2 < 1e-12, "{name}: {d1} {d2}");
        }
    }

    proptest! {
        #[test]
        fn parametrized_pairs_are_orthonormal(p in prop::array::uniform10(-7.0f64..7.0)) {
            let pair = PairParametrization(p).to_pair();
            prop_assert!((pair.first.norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert!((pair.second.norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert!(pair.first.inner(&pair.second).norm() < 1e-12);
        }

        #[test]
        fn parametrization_inverse(p in prop::array::uniform10(0.05f64..1.5)) {
            let pair = PairParametrization(p).to_pair();
            let back = PairParametrization::from_pair(&pair).to_pair();
            prop_assert!((back.first.projector() - pair.first.projector()).norm() < 1e-10);
            prop_assert!((back.second.projector() - pair.second.projector()).norm() < 1e-10);
        }
    }

    fn model(r: f64) -> DephasingModel {
        DephasingModel {
            covariance: StandardFormParams::epr(SqueezingParam::new(r).unwrap()),
            bath: OhmicBath::new(1.0, 1.0, 1.0).unwrap(),
            schedule: InteractionSchedule::sequential(0.025).unwrap(),
            qubits: QubitParams::default(),
        }
    }

    fn coherences(r: f64, n: usize) -> CoherenceTrajectory {
        CoherenceTrajectory::compute(&model(r), Engine::ClosedForm, uniform_grid(0.06, n).unwrap()).unwrap()
    }

    #[test]
    fn uncorrelated_bath_has_no_backflow() {
        let mut m = model(0.0);
        m.covariance = StandardFormParams::new(1.3, 0.8, 0.0, 0.0).unwrap();
        let coh = CoherenceTrajectory::compute(&m, Engine::ClosedForm, uniform_grid(0.06, 400).unwrap()).unwrap();
        for conv in [Convention::Linear, Convention::Squared] {
            let t = pair_trajectory(&StatePair::bell(BellSector::II), &coh, conv).unwrap();
            assert!(t.values().windows(2).all(|w| w[1] <= w[0] + 1e-15));
            assert!(backflow_integral(&t) < 1e-12);
        }
    }

    #[test]
    fn search_objective_matches_pair_trajectory() {
        let coh = coherences(2.0, 200);
        let mats: Vec<_> = coh.sets().iter().map(coherence_matrix).collect();
        let pair = PairParametrization([0.3, 1.1, 0.4, 0.2, 2.0, -1.0, 0.7, 0.9, 0.5, 1.5]).to_pair();
        for conv in [Convention::Linear, Convention::Squared] {
            let direct = backflow_integral(&pair_trajectory(&pair, &coh, conv).unwrap());
            let fast = search_objective(&pair.projector_difference(), &mats, conv);
            assert!((direct - fast).abs() < 1e-12, "{direct} vs {fast}");
        }
    }

    #[test]
    fn small_search_never_below_bell_pairs() {
        let coh = coherences(3.0, 300);
        let config = OptimizerConfig { random_starts: 2, max_evaluations: 400, ..Default::default() };
        let res = maximize_measure(&coh, Convention::Squared, &config).unwrap();
        for (_, pair) in bell_pairs() {
            let v = backflow_integral(&pair_trajectory(&pair, &coh, Convention::Squared).unwrap());
            assert!(res.n_value >= v - 1e-9);
        }
        assert!(res.n_value > 0.1);
    }
}
