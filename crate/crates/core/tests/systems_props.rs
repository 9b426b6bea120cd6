use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rpn_geodesics::sample::admissible_system;
use rpn_geodesics::systems::{classify, effective_difference_number, reduce, IrrationalSystem};
use rpn_geodesics::Rational;

/// Maximum of `|#zero offsets with p > 0 − #zero offsets with p < 0|` over
/// `η = a/G`, where `G` is the lcm of all offset denominators times the lcm
/// of all `|p_j|`. Every `η` with a vanishing offset lies on this grid.
fn grid_oracle(sys: &IrrationalSystem) -> u64 {
    let eqs = sys.equations();
    let dens = eqs.iter().fold(1i64, |acc, (_, x)| acc.lcm(&x.denom().to_i64().unwrap()));
    let coeffs = eqs.iter().fold(1i64, |acc, (p, _)| acc.lcm(&p.abs()));
    let grid = dens * coeffs;
    (0..grid)
        .map(|a| {
            let eta = Rational::new(a.into(), grid.into());
            let mut diff = 0i64;
            for (p, x) in &eqs {
                let v = x - Rational::from_integer((*p).into()) * &eta;
                if (&v - v.floor()).is_zero() {
                    diff += p.signum();
                }
            }
            diff.unsigned_abs()
        })
        .max()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edn_matches_grid_and_is_positive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = admissible_system(&mut rng, 6, 4, 8);
        let edn = effective_difference_number(&sys).unwrap();
        prop_assert!(edn.value >= 1);
        prop_assert_eq!(edn.value, grid_oracle(&sys));
        prop_assert_eq!(classify(&sys, &edn.witness).unwrap().absolute_difference(), edn.value);
    }

    #[test]
    fn reduction_preserves_edn(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = admissible_system(&mut rng, 5, 4, 6);
        let red = reduce(&sys).unwrap();
        let edn = effective_difference_number(&sys).unwrap().value;
        prop_assert_eq!(red.effective_difference, edn);
        prop_assert_eq!(effective_difference_number(&red.result).unwrap().value, edn);
        prop_assert!(red.result.equations().iter().all(|(p, _)| p.abs() == 1));
        // the composed η separates the input, though not necessarily maximally
        prop_assert!(classify(&sys, &red.total_eta).unwrap().absolute_difference() >= 1);
        // expanding pθ adds (|p| − 1)/2 to the offset sum, so only the sum
        // mod 1/2 survives
        prop_assert!(red.result.coefficient_sums_vanish());
        let doubled = |s: &IrrationalSystem| {
            let v = s.offset_sum_fraction() * Rational::from_integer(2.into());
            &v - v.floor()
        };
        prop_assert_eq!(doubled(&red.result), doubled(&sys));
        prop_assert!(red.result.offset_condition_holds());
    }
}
