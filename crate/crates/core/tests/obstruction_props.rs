use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rpn_geodesics::interval::Parity;
use rpn_geodesics::obstruction::obstruction_scenario;
use rpn_geodesics::{sample, Error};

// Density guarantees the pair exists; a finite budget can still run out on
// models with large denominators, which must surface as BudgetExhausted.
#[test]
fn random_models_reach_a_conflict_or_exhaust_the_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut conflicts = 0;
    for parity in [Parity::Odd, Parity::Even] {
        for _ in 0..10 {
            let model = sample::rank1_model(&mut rng, parity, 3);
            match obstruction_scenario(&model, 100_000) {
                Ok(r) => {
                    assert!(r.routes_agree);
                    assert!(r.conflict);
                    assert_ne!(r.i_prime, r.i_double_prime);
                    assert_eq!(r.betti_near_l1, r.betti_near_l2);
                    assert_eq!(r.morse_near_l2, r.morse_near_l1 + 1);
                    assert!(r.effective_difference >= 1);
                    conflicts += 1;
                }
                Err(e) => assert!(matches!(e, Error::BudgetExhausted { .. }), "{e}"),
            }
        }
    }
    assert!(conflicts >= 15);
}

#[test]
fn report_degrees_match_the_index_routes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let model = sample::rank1_model(&mut rng, Parity::Odd, 2);
    let r = obstruction_scenario(&model, 100_000).unwrap();
    let m1 = r.step * r.l1 + 1;
    let m2 = r.step * r.l2 + 1;
    assert_eq!(model.direct_index(m1).unwrap(), r.index_l1);
    assert_eq!(model.direct_index(m2).unwrap(), r.degree_near_l2);
    // D1' and D2 differ by a multiple of 2n·q̄, so they share a Betti number
    assert_eq!((r.degree_near_l2 - r.degree_near_l1) % (2 * model.n as i64 * r.q_bar), 0);
}
