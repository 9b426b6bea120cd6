//! Seeded generators of random inputs for property suites and the self-test.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::exact::{rat, ExactReal, Rational};
use crate::interval::{Parity, Rank1Model};
use crate::normal_form::NormalFormDecomposition;
use crate::systems::IrrationalSystem;

/// Square-free radicands used for random quadratic irrationals.
pub const RADICANDS: [u64; 8] = [2, 3, 5, 6, 7, 10, 11, 13];

/// `a/b` with `1 ≤ b ≤ max_den` and `|a/b| ≤ bound`.
pub fn rational<R: Rng>(rng: &mut R, max_den: i64, bound: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    rat(rng.gen_range(-bound * den..=bound * den), den)
}

/// A value in `[0, 1)` with denominator at most `max_den`.
pub fn unit_rational<R: Rng>(rng: &mut R, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    rat(rng.gen_range(0..den), den)
}

/// `a + b√d` with `b ≠ 0` and `d` drawn from [`RADICANDS`] unless given.
pub fn quadratic_irrational<R: Rng>(rng: &mut R, radicand: Option<u64>) -> ExactReal {
    let d = radicand.unwrap_or_else(|| *RADICANDS.choose(rng).expect("non-empty"));
    let mut b = rational(rng, 9, 3);
    while b.is_zero() {
        b = rational(rng, 9, 3);
    }
    ExactReal::new(rational(rng, 9, 5), b, d)
}

fn proper_rational_angle<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let x = unit_rational(rng, 12);
        if !x.is_zero() && x != rat(1, 2) {
            return x;
        }
    }
}

fn proper_angle<R: Rng>(rng: &mut R, radicand: u64) -> ExactReal {
    if rng.gen_bool(0.5) {
        proper_rational_angle(rng).into()
    } else {
        quadratic_irrational(rng, Some(radicand)).frac()
    }
}

/// Nonzero integers in `[-max_abs, max_abs]` of length `k` summing to zero.
fn zero_sum_coefficients<R: Rng>(rng: &mut R, k: usize, max_abs: i64) -> Vec<i64> {
    loop {
        let mut p: Vec<i64> = (0..k - 1)
            .map(|_| {
                let v = rng.gen_range(1..=max_abs);
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let last = -p.iter().sum::<i64>();
        if last != 0 && last.abs() <= max_abs {
            p.push(last);
            return p;
        }
    }
}

/// Rank-one system with `2 ≤ k ≤ max_k`, `|p_j| ≤ max_abs`, offset
/// denominators at most `max_den`, zero coefficient sum and offset sum off
/// `{0, 1/2}` mod 1.
pub fn admissible_system<R: Rng>(rng: &mut R, max_k: usize, max_abs: i64, max_den: i64) -> IrrationalSystem {
    loop {
        let k = rng.gen_range(2..=max_k);
        let p = zero_sum_coefficients(rng, k, max_abs);
        let xi = (0..k).map(|_| unit_rational(rng, max_den)).collect();
        let sys = IrrationalSystem::rank_one(p, xi).expect("offsets are in [0, 1)");
        if sys.offset_condition_holds() {
            return sys;
        }
    }
}

/// A valid rank-one model of the given parity, with formula parameter at
/// most `max_n` (odd parity) or `2·max_n − 1` (even parity).
pub fn rank1_model<R: Rng>(rng: &mut R, parity: Parity, max_n: u32) -> Rank1Model {
    let (n, k) = match parity {
        Parity::Odd => {
            let n = rng.gen_range(1..=max_n);
            (n, rng.gen_range(2..=2 * n as usize))
        }
        Parity::Even => {
            let n = 2 * rng.gen_range(1..=max_n) - 1;
            (n, 2 * rng.gen_range(1..=n as usize))
        }
    };
    let p = zero_sum_coefficients(rng, k, 4);
    let theta = quadratic_irrational(rng, None);
    let mut xi: Vec<Rational> = (0..k - 1).map(|_| unit_rational(rng, 12)).collect();
    let target = (Rational::from_integer(k.into()) + rat(n as i64, n as i64 + 1)) / Rational::from_integer(2.into());
    let rest = xi.iter().fold(target, |acc, x| acc - x);
    xi.push(rest);
    Rank1Model::new(n, parity, theta, p, xi).expect("generated model satisfies every constraint")
}

/// Random basic normal form with a shared radicand, together with a prime
/// index in `[-4, 12]`.
pub fn normal_form<R: Rng>(rng: &mut R) -> (NormalFormDecomposition, i64) {
    let d = *RADICANDS.choose(rng).expect("non-empty");
    let mut count = |hi: u32| rng.gen_range(0..=hi);
    let mut nf = NormalFormDecomposition {
        p_minus: count(2),
        p_zero: count(2),
        p_plus: count(2),
        q_minus: count(2),
        q_zero: count(2),
        q_plus: count(2),
        h: count(2),
        ..Default::default()
    };
    let r = rng.gen_range(0..=3);
    let thetas = (0..r).map(|_| proper_angle(rng, d)).collect();
    nf = nf.with_thetas(thetas);
    nf.alphas = (0..rng.gen_range(0..=2)).map(|_| proper_angle(rng, d)).collect();
    nf.betas = (0..rng.gen_range(0..=2)).map(|_| proper_angle(rng, d)).collect();
    if nf.block_dimension() == 0 {
        nf.h = 1;
    }
    nf.half_dim = nf.block_dimension() as u32;
    (nf, rng.gen_range(-4..=12))
}

/// A nonzero rational with denominator at most 60, or a quadratic
/// irrational, for floor-law checks.
pub fn exact_sample<R: Rng>(rng: &mut R, irrational: bool) -> ExactReal {
    if irrational {
        quadratic_irrational(rng, None)
    } else {
        let mut q = rational(rng, 60, 20);
        if q.is_zero() {
            q = Rational::one();
        }
        q.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::validate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_inputs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let s = admissible_system(&mut rng, 6, 5, 12);
            assert!(s.check_preconditions().is_ok());
            let (nf, _) = normal_form(&mut rng);
            assert!(validate(&nf).is_valid(), "{:?}", validate(&nf));
            rank1_model(&mut rng, Parity::Odd, 4);
            rank1_model(&mut rng, Parity::Even, 3);
            assert!(!quadratic_irrational(&mut rng, None).is_rational());
        }
    }
}
