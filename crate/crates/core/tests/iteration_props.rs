use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rpn_geodesics::iteration::{
    index, index_minus1, index_minus1_closed_form, index_minus1_from_prime, index_nonorientable, index_orientable,
    mean_index_bound_check, nullity, nullity_minus1, nullity_minus1_closed_form, nullity_orientable,
};
use rpn_geodesics::normal_form::GeodesicModel;
use rpn_geodesics::sample::normal_form;

fn model(seed: u64, orientable: bool) -> GeodesicModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (nf, i1) = normal_form(&mut rng);
    let dim = nf.half_dim + 1;
    let mut g = GeodesicModel { nf, ind1: i1.max(0) + rng.gen_range(0..2), null1: 0, dim, orientable, type_numbers: None, period: None };
    g.null1 = g.expected_null1();
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn doubled_iterate_matches_half_shifted_form(seed in any::<u64>(), m in 1u64..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (nf, i1) = normal_form(&mut rng);
        prop_assert_eq!(index_minus1(&nf, i1, m).unwrap(), index_minus1_closed_form(&nf, i1, m).unwrap());
        let nu1 = nf.eigenvalue_one_nullity() as i64;
        prop_assert_eq!(nullity_minus1(&nf, nu1, m).unwrap(), nullity_minus1_closed_form(&nf, m).unwrap());
    }

    #[test]
    fn first_iterate_recovers_prime_data(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (nf, i1) = normal_form(&mut rng);
        prop_assert_eq!(index_orientable(&nf, i1, 1).unwrap(), i1);
        prop_assert_eq!(nullity_orientable(&nf, 3, 1).unwrap(), 3);
        prop_assert_eq!(index_minus1_from_prime(&nf, i1, 1).unwrap(), i1);
    }

    #[test]
    fn non_orientable_odd_iterates_follow_minus_one_form(seed in any::<u64>(), half in 0u64..30) {
        let g = model(seed, false);
        let m = 2 * half + 1;
        prop_assert_eq!(index_nonorientable(&g, m).unwrap(), index_minus1_from_prime(&g.nf, g.ind1, m).unwrap());
    }

    #[test]
    fn index_stays_near_mean_line(seed in any::<u64>(), orientable in any::<bool>()) {
        let g = model(seed, orientable);
        prop_assert!(mean_index_bound_check(&g, 60).unwrap());
    }

    #[test]
    fn nullity_is_periodic(seed in any::<u64>(), orientable in any::<bool>(), m in 1u64..40) {
        let g = model(seed, orientable);
        let period = g.analytical_period();
        prop_assert_eq!(nullity(&g, m).unwrap(), nullity(&g, m + period).unwrap());
        prop_assert!(nullity(&g, m).unwrap() <= nullity(&g, period).unwrap());
    }
}

#[test]
fn index_is_nondecreasing_on_doubling_for_bumpy_rp3() {
    let g = GeodesicModel::from_json(include_str!("../../cli/data/bumpy_rp3_model.json")).unwrap();
    for m in 1..50 {
        assert!(index(&g, 2 * m).unwrap() >= index(&g, m).unwrap());
    }
}
