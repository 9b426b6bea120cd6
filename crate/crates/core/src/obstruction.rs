//! Desk-scale run of the rank-one contradiction argument: if a single
//! geodesic with the given angle data were the only non-contractible one,
//! two iterates far apart would force different Morse numbers in degrees
//! carrying the same Betti number.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{rat, rational_serde, ExactReal, Rational};
use crate::homology::betti;
use crate::interval::{index_via_interval, AuxFunction, IntervalPattern, Parity, Rank1Model};
use crate::systems::effective_difference_number;

/// Half-width of the first pair of windows near 0 and 1.
const INITIAL_WINDOW: (i64, i64) = (1, 4);
/// Windows are halved at most this many times.
const MAX_HALVINGS: u32 = 60;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterateCheck {
    pub l: i64,
    pub shift: i64,
    pub m: i64,
    pub direct: i64,
    pub via_interval: i64,
    pub interval: usize,
    /// Interval predicted from the window image of `f_L`.
    pub predicted_interval: usize,
}

impl IterateCheck {
    pub fn agrees(&self) -> bool {
        self.direct == self.via_interval && self.interval == self.predicted_interval
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub n: u32,
    pub parity: Parity,
    pub manifold_dimension: u32,
    pub effective_difference: u64,
    #[serde(with = "rational_serde")]
    pub witness_eta: Rational,
    /// `θ + η`.
    pub shifted_theta: ExactReal,
    /// `{ξ_j − p_j η}`.
    #[serde(with = "rational_serde::vec")]
    pub shifted_offsets: Vec<Rational>,
    /// Omitted angle, the first one with a nonzero shifted offset.
    pub excluded: usize,
    /// Product of the denominators of the nonzero shifted offsets.
    pub q_bar: i64,
    /// `m_l = step·l + 1`, `step = 2(n+1)q̄`.
    pub step: i64,
    /// Shifts `1 ≤ |L| ≤ n_bar` are checked for stability.
    pub n_bar: i64,
    /// Window width is `1/4` halved `halvings − 1` times.
    pub halvings: u32,
    #[serde(with = "rational_serde")]
    pub window: Rational,
    pub l1: i64,
    pub l2: i64,
    /// `{m_{l1} θ'}` inside `(0, window)`.
    pub x1: ExactReal,
    /// `{m_{l2} θ'}` inside `(1 − window, 1)`.
    pub x2: ExactReal,
    pub i_prime: usize,
    pub i_double_prime: usize,
    pub index_l1: i64,
    pub index_l2: i64,
    /// `2nq̄l₁ + 2[Q₀] − 2i″`.
    pub degree_near_l1: i64,
    /// `2nq̄l₂ + 2[Q₀] − 2i″`, the index of `c^{m_{l2}}`.
    pub degree_near_l2: i64,
    pub betti_near_l1: u32,
    pub betti_near_l2: u32,
    /// Odd iterates whose index equals the degree.
    pub morse_near_l1: u64,
    pub morse_near_l2: u64,
    pub checks: Vec<IterateCheck>,
    pub routes_agree: bool,
    /// Equal Betti numbers but `morse_near_l2 ≥ morse_near_l1 + 1`.
    pub conflict: bool,
    pub scanned: u64,
}

struct Windows {
    halvings: u32,
    width: Rational,
    /// Interval index per shift `L` at the window near 0, `L = −N̄..=N̄`.
    near_zero: Vec<usize>,
    near_one: Vec<usize>,
}

fn find_windows(f: &AuxFunction, n: u32, k: usize, n_bar: i64) -> Result<Option<Windows>> {
    let patterns: Vec<IntervalPattern> =
        (-n_bar..=n_bar).map(|s| IntervalPattern::new(n, k, s)).collect::<Result<_>>()?;
    let mut width = rat(INITIAL_WINDOW.0, INITIAL_WINDOW.1);
    'halving: for halvings in 1..=MAX_HALVINGS {
        if halvings > 1 {
            width /= rat(2, 1);
        }
        let one = Rational::one();
        let mut near_zero = Vec::new();
        let mut near_one = Vec::new();
        for (pattern, shift) in patterns.iter().zip(-n_bar..=n_bar) {
            let a = f.window_image(shift, &Rational::zero(), &width)?;
            let b = f.window_image(shift, &(&one - &width), &one)?;
            let (Some(a), Some(b)) = (a, b) else { continue 'halving };
            let (Some(ia), Some(ib)) = (pattern.locate_range(&a.0, &a.1), pattern.locate_range(&b.0, &b.1)) else {
                continue 'halving;
            };
            // separated at L = 0, glued for every other shift
            if (shift == 0) == (ia == ib) {
                continue 'halving;
            }
            near_zero.push(ia);
            near_one.push(ib);
        }
        return Ok(Some(Windows { halvings, width, near_zero, near_one }));
    }
    Ok(None)
}

/// Odd iterates with index `degree`. `ind(c^m) − m·n/(n+1)` lies strictly
/// inside `(−k, k)`, which bounds the iterates worth evaluating.
fn morse_count(model: &Rank1Model, degree: i64) -> Result<u64> {
    let n = model.n as i64;
    let k = model.k() as i64;
    let lo = ((degree - k) * (n + 1)).div_euclid(n).max(1);
    let hi = ((degree + k) * (n + 1)).div_euclid(n) + 1;
    let mut count = 0;
    for m in lo..=hi {
        if m % 2 == 1 && model.direct_index(m)? == degree {
            count += 1;
        }
    }
    Ok(count)
}

fn betti_at(dim: u32, degree: i64) -> Option<u32> {
    u64::try_from(degree).ok().map(|q| betti(dim, q))
}

struct Setup {
    edn: u64,
    eta: Rational,
    shifted_theta: ExactReal,
    shifted: Vec<Rational>,
    excluded: usize,
    q_bar: i64,
    step: i64,
    n_bar: i64,
    windows: Windows,
}

/// Runs the contradiction pipeline on `model`, scanning at most `budget`
/// values of `l`.
pub fn obstruction_scenario(model: &Rank1Model, budget: u64) -> Result<ObstructionReport> {
    let system = model.system();
    let edn = effective_difference_number(&system)?;
    if edn.value == 0 {
        return Err(Error::ZeroEffectiveDifference);
    }
    system.check_preconditions()?;

    let eta = edn.witness;
    let shifted_theta = model.theta.add_rational(&eta);
    let shifted: Vec<Rational> = model
        .p
        .iter()
        .zip(&model.xi)
        .map(|(&p, x)| {
            let v = x - Rational::from_integer(BigInt::from(p)) * &eta;
            &v - v.floor()
        })
        .collect();
    let k1: Vec<usize> = (0..model.k()).filter(|&j| !shifted[j].is_zero()).collect();
    let excluded = *k1.first().ok_or_else(|| Error::Precondition("every shifted offset vanishes".into()))?;
    let q_bar = k1
        .iter()
        .map(|&j| shifted[j].denom().clone())
        .product::<BigInt>()
        .to_i64()
        .ok_or_else(|| Error::Precondition("denominator product overflows".into()))?;
    let n = model.n as i64;
    let step = 2 * (n + 1) * q_bar;
    let n_bar = 4 * (n + 1) + 1;

    let f = AuxFunction::new(model, &eta, excluded)?;
    let windows = find_windows(&f, model.n, model.k(), n_bar)?
        .ok_or_else(|| Error::Precondition("no pair of windows separates the L = 0 intervals".into()))?;
    let width = windows.width.clone();
    let upper = Rational::one() - &width;
    let increment = shifted_theta.scale(step).frac();
    let mut x = shifted_theta.frac();
    let setup = Setup { edn: edn.value, eta, shifted_theta, shifted, excluded, q_bar, step, n_bar, windows };

    let mut near_zero: Option<(i64, ExactReal)> = None;
    let mut near_one: Option<(i64, ExactReal)> = None;
    let one = BigInt::one();
    for l in 1..=budget as i64 {
        x = x.checked_add(&increment)?;
        if x.cmp_rational(&Rational::one()) != Ordering::Less {
            x = x.add_int(&-&one);
        }
        if near_zero.is_none() && x.cmp_rational(&width) == Ordering::Less && !x.is_zero() {
            near_zero = Some((l, x.clone()));
        }
        if near_one.is_none() && x.cmp_rational(&upper) == Ordering::Greater {
            near_one = Some((l, x.clone()));
        }
        let (Some(first), Some(second)) = (&near_zero, &near_one) else { continue };
        let report = assemble(model, &setup, first, second, l as u64)?;
        if report.betti_near_l1 == report.betti_near_l2 {
            return Ok(report);
        }
        // degenerate low degree; look for a later iterate near 0
        near_zero = None;
    }
    Err(Error::BudgetExhausted { budget, scanned: budget })
}

fn assemble(
    model: &Rank1Model,
    setup: &Setup,
    (l1, x1): &(i64, ExactReal),
    (l2, x2): &(i64, ExactReal),
    scanned: u64,
) -> Result<ObstructionReport> {
    let (l1, l2) = (*l1, *l2);
    let Setup { q_bar, step, n_bar, excluded, ref windows, .. } = *setup;
    let n = model.n as i64;
    let mut checks = Vec::new();
    for (l, predicted) in [(l1, &windows.near_zero), (l2, &windows.near_one)] {
        for (shift, &predicted_interval) in (-n_bar..=n_bar).zip(predicted) {
            let m = step * l + 2 * shift + 1;
            if m < 1 {
                continue;
            }
            let via = index_via_interval(model, q_bar * l, shift, excluded)?;
            checks.push(IterateCheck {
                l,
                shift,
                m,
                direct: model.direct_index(m)?,
                via_interval: via.index,
                interval: via.interval,
                predicted_interval,
            });
        }
    }
    let at = |l: i64| checks.iter().find(|c| c.l == l && c.shift == 0).expect("L = 0 is always checked");
    let (first, second) = (at(l1), at(l2));
    let (i_prime, i_double_prime) = (first.interval, second.interval);
    let (index_l1, index_l2) = (first.direct, second.direct);
    let q_floor = IntervalPattern::new(model.n, model.k(), 0)?.q_floor().to_i64().expect("small");
    let degree_near_l1 = 2 * n * q_bar * l1 + 2 * q_floor - 2 * i_double_prime as i64;
    let degree_near_l2 = index_l2;
    let dim = model.manifold_dimension();
    let betti_near_l1 = betti_at(dim, degree_near_l1).unwrap_or(u32::MAX);
    let betti_near_l2 = betti_at(dim, degree_near_l2).unwrap_or(u32::MAX - 1);
    let morse_near_l1 = morse_count(model, degree_near_l1)?;
    let morse_near_l2 = morse_count(model, degree_near_l2)?;
    let routes_agree = checks.iter().all(IterateCheck::agrees);
    let conflict =
        routes_agree && i_prime != i_double_prime && betti_near_l1 == betti_near_l2 && morse_near_l2 > morse_near_l1;
    Ok(ObstructionReport {
        n: model.n,
        parity: model.parity,
        manifold_dimension: dim,
        effective_difference: setup.edn,
        witness_eta: setup.eta.clone(),
        shifted_theta: setup.shifted_theta.clone(),
        shifted_offsets: setup.shifted.clone(),
        excluded,
        q_bar,
        step,
        n_bar,
        halvings: windows.halvings,
        window: windows.width.clone(),
        l1,
        l2,
        x1: x1.clone(),
        x2: x2.clone(),
        i_prime,
        i_double_prime,
        index_l1,
        index_l2,
        degree_near_l1,
        degree_near_l2,
        betti_near_l1,
        betti_near_l2,
        morse_near_l1,
        morse_near_l2,
        checks,
        routes_agree,
        conflict,
        scanned,
    })
}
