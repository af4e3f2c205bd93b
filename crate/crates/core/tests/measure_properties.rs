use nlmem::coherence::{DephasingModel, Engine, InteractionSchedule, OhmicBath, QubitParams};
use nlmem::dynamics::BellSector;
use nlmem::gaussian::{SqueezingParam, StandardFormParams};
use nlmem::nonmarkov::{backflow_integral, pair_trajectory, uniform_grid, CoherenceTrajectory, Convention, StatePair};

fn measure(r: f64, grid_points: usize, convention: Convention) -> f64 {
    let model = DephasingModel {
        covariance: StandardFormParams::epr(SqueezingParam::new(r).unwrap()),
        bath: OhmicBath::new(1.0, 1.0, 1.0).unwrap(),
        schedule: InteractionSchedule::sequential(0.025).unwrap(),
        qubits: QubitParams::default(),
    };
    let coh = CoherenceTrajectory::compute(&model, Engine::ClosedForm, uniform_grid(0.06, grid_points).unwrap()).unwrap();
    backflow_integral(&pair_trajectory(&StatePair::bell(BellSector::II), &coh, convention).unwrap())
}

#[test]
fn stable_under_grid_refinement() {
    for r in [1.0, 2.0, 3.0, 4.0, 5.0] {
        for conv in [Convention::Squared, Convention::Linear] {
            let coarse = measure(r, 4000, conv);
            let fine = measure(r, 7999, conv);
            assert!((coarse - fine).abs() <= 1e-4, "r = {r} {conv}: {coarse} vs {fine}");
        }
    }
}

#[test]
fn non_decreasing_in_squeezing() {
    for conv in [Convention::Squared, Convention::Linear] {
        let values: Vec<f64> = [1.0, 2.0, 3.0, 4.0].iter().map(|&r| measure(r, 4000, conv)).collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0]), "{conv}: {values:?}");
    }
}

#[test]
fn squeezing_sign_moves_backflow_between_sectors() {
    let model = |r: f64| DephasingModel {
        covariance: StandardFormParams::epr(SqueezingParam::new(r).unwrap()),
        bath: OhmicBath::new(1.0, 1.0, 1.0).unwrap(),
        schedule: InteractionSchedule::sequential(0.025).unwrap(),
        qubits: QubitParams::default(),
    };
    let grid = uniform_grid(0.06, 2000).unwrap();
    let plus = CoherenceTrajectory::compute(&model(3.0), Engine::ClosedForm, grid.clone()).unwrap();
    let minus = CoherenceTrajectory::compute(&model(-3.0), Engine::ClosedForm, grid).unwrap();
    let n = |coh: &CoherenceTrajectory, sector| {
        backflow_integral(&pair_trajectory(&StatePair::bell(sector), coh, Convention::Squared).unwrap())
    };
    assert!((n(&plus, BellSector::II) - n(&minus, BellSector::I)).abs() < 1e-12);
    assert!(n(&plus, BellSector::I) < 1e-12);
}
