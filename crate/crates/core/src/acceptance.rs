//! The ten acceptance criteria as runnable checks, shared by the `selftest`
//! subcommand and the acceptance test target.

use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::exact::{half_identities_check, rat, ExactReal, Rational};
use crate::homology::{
    average_betti, betti, betti_series_oracle, partial_alternating_average, resonance_check, resonance_check_bumpy,
};
use crate::interval::{bound_implication, index_via_interval, Parity, Rank1Model};
use crate::iteration::{
    index_minus1_closed_form, index_orientable, nullity_minus1_closed_form, nullity_orientable,
};
use crate::normal_form::{splitting_consistency, GeodesicModel};
use crate::obstruction::obstruction_scenario;
use crate::sample;
use crate::systems::{classify, effective_difference_number, reduce, IrrationalSystem};

/// Wall-clock limit for the worked reduction.
pub const REDUCTION_TIME_LIMIT: Duration = Duration::from_secs(1);
/// Wall-clock limit for the 200-system property suite.
pub const PROPERTY_SUITE_TIME_LIMIT: Duration = Duration::from_secs(30);
/// Scan budget of the obstruction demonstration.
pub const OBSTRUCTION_BUDGET: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

fn outcome(id: u8, name: &'static str, result: Result<(bool, String)>) -> CriterionOutcome {
    match result {
        Ok((passed, detail)) => CriterionOutcome { id, name, passed, detail },
        Err(e) => CriterionOutcome { id, name, passed: false, detail: format!("error: {e}") },
    }
}

/// `θ̂ = −θ + 5/6, −2θ + 1/3, 3θ + 1/2`.
pub fn three_equation_system() -> IrrationalSystem {
    IrrationalSystem::rank_one(vec![-1, -2, 3], vec![rat(5, 6), rat(1, 3), rat(1, 2)]).expect("valid")
}

/// `θ̂ = −θ + 1/2, −θ, 2θ`: zero coefficient sum, offsets summing to 1/2.
pub fn zero_difference_system() -> IrrationalSystem {
    IrrationalSystem::rank_one(vec![-1, -1, 2], vec![rat(1, 2), rat(0, 1), rat(0, 1)]).expect("valid")
}

/// `n = 1, k = 2`: `θ̂ = θ + 1/2, −θ + 3/4` with `θ = √2 − 1`.
pub fn rp3_model() -> Rank1Model {
    Rank1Model::new(1, Parity::Odd, ExactReal::new(rat(-1, 1), rat(1, 1), 2), vec![1, -1], vec![rat(1, 2), rat(3, 4)])
        .expect("valid")
}

/// Systems after each step of the worked reduction, as `(p, ξ)` lists.
pub fn expected_reduction_trace() -> Vec<Vec<(i64, Rational)>> {
    let e = |v: &[(i64, i64, i64)]| v.iter().map(|&(p, a, b)| (p, rat(a, b))).collect::<Vec<_>>();
    vec![
        e(&[(-1, 0, 1), (-2, 2, 3), (3, 0, 1)]),
        e(&[(-1, 0, 1), (-2, 2, 3), (1, 0, 1), (1, 1, 3), (1, 2, 3)]),
        e(&[(-1, 2, 3), (-2, 0, 1), (1, 1, 3), (1, 2, 3), (1, 0, 1)]),
        e(&[(-1, 2, 3), (-1, 0, 1), (-1, 1, 2), (1, 1, 3), (1, 2, 3), (1, 0, 1)]),
        e(&[(-1, 1, 2), (1, 2, 3)]),
    ]
}

/// Equal as multisets of equations, ignoring labels and order.
pub fn same_equations(a: &[(i64, Rational)], b: &[(i64, Rational)]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

/// Largest `|k₀⁺ − k₀⁻|` over the grid `η = a/L`, `L = lcm_j(den ξ_j · |p_j|)`,
/// using integer arithmetic only. Every candidate η lies on this grid.
pub fn dense_grid_edn(sys: &IrrationalSystem) -> u64 {
    let eqs = sys.equations();
    let grid = eqs.iter().fold(1i64, |acc, (p, x)| acc.lcm(&(x.denom().to_i64().expect("small") * p.abs())));
    let scaled: Vec<(i64, i64)> = eqs
        .iter()
        .map(|(p, x)| (*p, (x * Rational::from_integer(grid.into())).to_integer().to_i64().expect("small")))
        .collect();
    (0..grid)
        .map(|a| {
            let diff: i64 = scaled
                .iter()
                .filter(|(p, u)| (u - p * a).rem_euclid(grid) == 0)
                .map(|(p, _)| p.signum())
                .sum();
            diff.unsigned_abs()
        })
        .max()
        .unwrap_or(0)
}

pub fn worked_reduction() -> CriterionOutcome {
    outcome(1, "worked reduction and EDN", (|| {
        let start = Instant::now();
        let sys = three_equation_system();
        let red = reduce(&sys)?;
        let edn = effective_difference_number(&sys)?;
        let elapsed = start.elapsed();
        let trace: Vec<_> = red.steps.iter().map(|s| s.system.equations()).collect();
        let expected = expected_reduction_trace();
        let trace_ok = trace.len() == expected.len() && trace.iter().zip(&expected).all(|(a, b)| same_equations(a, b));
        let witness_ok = classify(&sys, &edn.witness)?.absolute_difference() == 1;
        let passed = trace_ok && edn.value == 1 && witness_ok && elapsed < REDUCTION_TIME_LIMIT;
        Ok((
            passed,
            format!(
                "{} steps match: {trace_ok}, EDN = {} at eta = {}, composed eta = {}, {:?} (limit {:?})",
                trace.len(),
                edn.value,
                edn.witness,
                red.total_eta,
                elapsed,
                REDUCTION_TIME_LIMIT
            ),
        ))
    })())
}

pub fn zero_difference_counterexample() -> CriterionOutcome {
    outcome(2, "zero-difference counterexample", (|| {
        let sys = zero_difference_system();
        let edn = effective_difference_number(&sys)?;
        let violated = !sys.offset_condition_holds();
        Ok((
            edn.value == 0 && violated,
            format!("EDN = {}, offset sum = {}, offset condition violated: {violated}", edn.value, sys.offset_sum_fraction()),
        ))
    })())
}

pub fn edn_property_suite() -> CriterionOutcome {
    outcome(3, "EDN >= 1 on admissible systems", (|| {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
        let mut min_edn = u64::MAX;
        let mut grid_mismatches = 0;
        for i in 0..200 {
            let sys = sample::admissible_system(&mut rng, 6, 5, 12);
            let edn = effective_difference_number(&sys)?.value;
            min_edn = min_edn.min(edn);
            if i % 10 == 0 && dense_grid_edn(&sys) != edn {
                grid_mismatches += 1;
            }
        }
        let elapsed = start.elapsed();
        Ok((
            min_edn >= 1 && grid_mismatches == 0 && elapsed < PROPERTY_SUITE_TIME_LIMIT,
            format!("200 systems, min EDN = {min_edn}, grid oracle mismatches on 20: {grid_mismatches}, {elapsed:?}"),
        ))
    })())
}

pub fn bott_halving() -> CriterionOutcome {
    outcome(4, "minus-one index via doubled iterates", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
        let mut failures = 0;
        for _ in 0..100 {
            let (nf, i1) = sample::normal_form(&mut rng);
            let nu1 = nf.eigenvalue_one_nullity() as i64;
            for m in 1..=50 {
                let index = index_orientable(&nf, i1, 2 * m)? - index_orientable(&nf, i1, m)?;
                let nullity = nullity_orientable(&nf, nu1, 2 * m)? - nullity_orientable(&nf, nu1, m)?;
                if index != index_minus1_closed_form(&nf, i1, m)? || nullity != nullity_minus1_closed_form(&nf, m)? {
                    failures += 1;
                }
            }
            if !splitting_consistency(&nf, i1, index_minus1_closed_form(&nf, i1, 1)?) {
                failures += 1;
            }
        }
        Ok((failures == 0, format!("100 normal forms, m <= 50, {failures} disagreements")))
    })())
}

pub fn betti_tables() -> CriterionOutcome {
    outcome(5, "Betti series and averages", {
        let mut mismatches = 0;
        for n in [2, 3, 4, 5, 7, 8] {
            let series = betti_series_oracle(n, 200);
            mismatches += (0..=200u64).filter(|&q| series[q as usize] != betti(n, q) as i64).count();
        }
        let q = 200;
        let tolerance = rat(5, q as i64);
        let mut detail = Vec::new();
        let mut averages_ok = true;
        for (n, expected) in [(3, rat(1, 1)), (2, rat(1, 1)), (4, rat(2, 3)), (5, rat(3, 4))] {
            let partial = partial_alternating_average(n, q);
            let ok = average_betti(n) == expected && (&partial - &expected).abs() <= tolerance;
            averages_ok &= ok;
            detail.push(format!("n={n}: {partial}"));
        }
        Ok((
            mismatches == 0 && averages_ok,
            format!("{mismatches} series mismatches to degree 200; partial averages at q = 200 [{}], tolerance 5/q", detail.join(", ")),
        ))
    })
}

pub fn interval_equivalence() -> CriterionOutcome {
    outcome(6, "interval route equals direct formula", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
        let mut compared = 0;
        let mut disagreements = 0;
        for parity in [Parity::Odd, Parity::Even] {
            for _ in 0..20 {
                let model = sample::rank1_model(&mut rng, parity, 3);
                let n = model.n as i64;
                for l in 0..=50i64 {
                    for shift in -20..=20i64 {
                        let m = 2 * (n + 1) * l + 2 * shift + 1;
                        if m < 1 {
                            continue;
                        }
                        // rotate the omitted angle to cover arbitrary orderings
                        let excluded = (l + shift).rem_euclid(model.k() as i64) as usize;
                        let via = index_via_interval(&model, l, shift, excluded)?;
                        compared += 1;
                        if via.index != model.direct_index(m)? {
                            disagreements += 1;
                        }
                    }
                }
            }
        }
        Ok((disagreements == 0, format!("{compared} iterates over 40 models, {disagreements} disagreements")))
    })())
}

pub fn bound_lemmas() -> CriterionOutcome {
    outcome(7, "index gap bounds", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
        let mut checked = 0;
        let mut failures = 0;
        for parity in [Parity::Odd, Parity::Even] {
            for _ in 0..20 {
                let model = sample::rank1_model(&mut rng, parity, 3);
                let step = if parity == Parity::Odd { 1 } else { 2 };
                let indices: Vec<(i64, i64)> =
                    (1..=500).step_by(step).map(|m| Ok((m, model.direct_index(m)?))).collect::<Result<_>>()?;
                for l in 1..=30 {
                    for &(m, index) in &indices {
                        checked += 1;
                        if !bound_implication(model.n, l, m, index) {
                            failures += 1;
                        }
                    }
                }
            }
        }
        Ok((failures == 0, format!("{checked} (l, m) pairs over 40 models, {failures} failures")))
    })())
}

/// Orientable bumpy model of dimension `dim` with prime index 0 and mean
/// index `mean`, built from two rotations `√2 − 1/2` and `3/2 + mean/2 − √2`.
pub fn single_bumpy_model(dim: u32, mean: &Rational) -> Result<GeodesicModel> {
    let first = ExactReal::new(rat(-1, 2), rat(1, 1), 2);
    let second = ExactReal::new(rat(3, 2) + mean / rat(2, 1), rat(-1, 1), 2);
    GeodesicModel::bumpy(dim, true, 0, vec![first, second])
}

/// Mean index making a single geodesic satisfy the identity in dimension
/// `dim`: `(d−1)/(d+1)` for odd `d`, `(d−1)/d` for even `d`.
pub fn resonant_mean_index(dim: u32) -> Rational {
    let d = dim as i64;
    if d % 2 == 1 {
        rat(d - 1, d + 1)
    } else {
        rat(d - 1, d)
    }
}

pub fn resonance() -> CriterionOutcome {
    outcome(8, "resonance identity for one bumpy geodesic", (|| {
        let mut passed = true;
        let mut detail = Vec::new();
        for dim in [3u32, 4, 5, 6, 7] {
            let mean = resonant_mean_index(dim);
            let g = single_bumpy_model(dim, &mean)?;
            let full = resonance_check(std::slice::from_ref(&g), dim)?;
            let bumpy = resonance_check_bumpy(std::slice::from_ref(&g), dim)?;
            let perturbed = single_bumpy_model(dim, &(&mean + rat(1, 100)))?;
            let off = resonance_check(std::slice::from_ref(&perturbed), dim)?;
            let off_bumpy = resonance_check_bumpy(&[perturbed], dim)?;
            let ok = full.residual.is_zero() && bumpy.residual.is_zero() && !off.holds && !off_bumpy.holds;
            passed &= ok;
            detail.push(format!("d={dim} mean {mean}: {} / perturbed {}", full.residual, off.residual));
        }
        Ok((passed, detail.join("; ")))
    })())
}

pub fn obstruction_demo() -> CriterionOutcome {
    outcome(9, "obstruction scenario on RP^3 data", (|| {
        let r = obstruction_scenario(&rp3_model(), OBSTRUCTION_BUDGET)?;
        Ok((
            r.conflict && r.routes_agree,
            format!(
                "l1 = {}, l2 = {}, intervals {} / {}, Morse {} vs {} at Betti {}, {} iterates checked, scanned {} of {}",
                r.l1,
                r.l2,
                r.i_prime,
                r.i_double_prime,
                r.morse_near_l1,
                r.morse_near_l2,
                r.betti_near_l1,
                r.checks.len(),
                r.scanned,
                OBSTRUCTION_BUDGET
            ),
        ))
    })())
}

/// Floor, ceiling, `φ` and fractional-part laws at one value.
pub fn floor_laws_hold(x: &ExactReal) -> bool {
    let fl = ExactReal::from(x.floor());
    let ce = ExactReal::from(x.ceil());
    let fr = x.frac();
    let below = fl.compare(x).is_ok_and(|o| o.is_le());
    let above = x.checked_sub(&fl).is_ok_and(|d| d.cmp_rational(&rat(1, 1)).is_lt());
    let ceil_ok = ce.compare(x).is_ok_and(|o| o.is_ge())
        && ce.checked_sub(x).is_ok_and(|d| d.cmp_rational(&rat(1, 1)).is_lt());
    let phi_ok = x.phi() == (x.ceil() - x.floor()).to_i64().unwrap_or(-1);
    let frac_ok = x.checked_sub(&fl).is_ok_and(|d| d == fr) && !fr.signum().is_lt();
    let neg_ok = (-x).floor() == -x.ceil();
    let shift_ok = x.add_int(&7.into()).floor() == x.floor() + 7;
    let odd_ok = x.ceil_shifted(3) == x.add_rational(&rat(-1, 2)).ceil() && x.phi_shifted(3) == x.add_rational(&rat(-1, 2)).phi();
    let even_ok = x.ceil_shifted(4) == x.ceil() && x.phi_shifted(4) == x.phi();
    below && above && ceil_ok && phi_ok && frac_ok && neg_ok && shift_ok && odd_ok && even_ok
}

pub fn exact_core_identities() -> CriterionOutcome {
    outcome(10, "half identities and floor laws", {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
        let mut failures = 0;
        for irrational in [false, true] {
            for _ in 0..1000 {
                let x = sample::exact_sample(&mut rng, irrational);
                let (ceil_ok, phi_ok) = half_identities_check(&x);
                if !(ceil_ok && phi_ok && floor_laws_hold(&x)) {
                    failures += 1;
                }
            }
        }
        Ok((failures == 0, format!("1000 rationals and 1000 quadratic irrationals, {failures} failures")))
    })
}

/// All ten criteria in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        worked_reduction(),
        zero_difference_counterexample(),
        edn_property_suite(),
        bott_halving(),
        betti_tables(),
        interval_equivalence(),
        bound_lemmas(),
        resonance(),
        obstruction_demo(),
        exact_core_identities(),
    ]
}
