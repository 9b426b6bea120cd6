use std::cmp::Ordering;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rpn_geodesics::exact::half_identities_check;
use rpn_geodesics::sample::exact_sample;
use rpn_geodesics::{rat, ExactReal};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn floor_brackets_the_value(seed in any::<u64>(), irrational in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = exact_sample(&mut rng, irrational);
        let f = ExactReal::from_integer(0).add_int(&x.floor());
        prop_assert_ne!(x.compare(&f).unwrap(), Ordering::Less);
        prop_assert_eq!(x.compare(&f.add_int(&BigInt::from(1))).unwrap(), Ordering::Less);
        let frac = x.frac();
        prop_assert_ne!(frac.signum(), Ordering::Less);
        prop_assert_eq!(frac.cmp_rational(&rat(1, 1)), Ordering::Less);
        prop_assert!((x.to_f64() - x.floor().to_string().parse::<f64>().unwrap() - frac.to_f64()).abs() < 1e-9);
    }

    #[test]
    fn half_identities(seed in any::<u64>(), irrational in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = exact_sample(&mut rng, irrational);
        prop_assert_eq!(half_identities_check(&x), (true, true));
    }

    #[test]
    fn arithmetic_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = exact_sample(&mut rng, true);
        let b = ExactReal::from(exact_sample(&mut rng, false).to_rational().unwrap());
        let sum = a.checked_add(&b).unwrap();
        prop_assert_eq!(sum.checked_sub(&b).unwrap(), a.clone());
        let prod = a.checked_mul(&b).unwrap();
        prop_assert_eq!(prod.checked_div(&b).unwrap(), a.clone());
        prop_assert!((prod.to_f64() - a.to_f64() * b.to_f64()).abs() < 1e-6 * (1.0 + prod.to_f64().abs()));
        let text = a.to_string();
        prop_assert_eq!(text.parse::<ExactReal>().unwrap(), a);
    }
}
