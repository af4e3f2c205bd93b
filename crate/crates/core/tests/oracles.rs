use nlmem::coherence::{coherence_discrete, DiscreteModes, InteractionSchedule, Mode, QubitParams};
use nlmem::fock::{discrete_model_oracle, overlap, tmsv, DEFAULT_CUTOFF};
use nlmem::gaussian::{characteristic_value, make_epr_covariance, SqueezingParam};
use nlmem::C64;
use proptest::prelude::*;

fn modes() -> DiscreteModes {
    DiscreteModes::new(vec![
        Mode { omega: 0.7, g1: 0.12, g2: 0.08 },
        Mode { omega: 2.3, g1: 0.2, g2: 0.15 },
        Mode { omega: 5.1, g1: 0.3, g2: 0.25 },
    ])
    .unwrap()
}

#[test]
fn fock_oracle_reproduces_discrete_engine() {
    let schedule = InteractionSchedule::new((0.0, 0.4), (0.3, 0.9)).unwrap();
    let qubits = QubitParams::new(0.5, -0.2);
    for r in [0.0, 0.5, -0.8, 1.0] {
        let sq = SqueezingParam::new(r).unwrap();
        let s = make_epr_covariance(sq);
        for k in 0..=10 {
            let t = 0.1 * k as f64;
            let gaussian = coherence_discrete(&modes(), &s, &schedule, &qubits, t).unwrap();
            let brute = discrete_model_oracle(&modes(), sq, &schedule, &qubits, t, DEFAULT_CUTOFF).unwrap();
            for (x, y) in [
                (gaussian.kappa1, brute.kappa1),
                (gaussian.kappa2, brute.kappa2),
                (gaussian.kappa1_tilde, brute.kappa1_tilde),
                (gaussian.kappa2_tilde, brute.kappa2_tilde),
                (gaussian.kappa12, brute.kappa12),
                (gaussian.lambda12, brute.lambda12),
            ] {
                assert!((x - y).norm() < 1e-8, "r = {r}, t = {t}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn fock_oracle_rejects_too_many_modes() {
    let mut list = modes().modes().to_vec();
    list.push(Mode { omega: 7.0, g1: 0.1, g2: 0.1 });
    let four = DiscreteModes::new(list).unwrap();
    let schedule = InteractionSchedule::sequential(0.1).unwrap();
    let sq = SqueezingParam::new(0.5).unwrap();
    assert!(discrete_model_oracle(&four, sq, &schedule, &QubitParams::default(), 0.1, 20).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overlap_matches_characteristic_function(
        r in -1.0f64..1.0,
        re1 in -0.35f64..0.35, im1 in -0.35f64..0.35,
        re2 in -0.35f64..0.35, im2 in -0.35f64..0.35,
    ) {
        let sq = SqueezingParam::new(r).unwrap();
        let (g1, g2) = (C64::new(re1, im1), C64::new(re2, im2));
        let brute = overlap(&tmsv(sq, DEFAULT_CUTOFF).unwrap(), g1, g2).unwrap();
        let gaussian = characteristic_value(&make_epr_covariance(sq), g1, g2).unwrap();
        prop_assert!((brute - C64::new(gaussian, 0.0)).norm() < 1e-6);
        prop_assert!(brute.im.abs() < 1e-10);
    }
}
