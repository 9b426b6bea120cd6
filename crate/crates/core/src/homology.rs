//! S¹-equivariant Betti numbers of the non-contractible loop space of RP^n,
//! Morse-type numbers of hypothetical geodesic families, and the exact
//! resonance-identity checker.

use std::cmp::Ordering;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{rat, ExactReal, Rational};
use crate::iteration::{index, mean_index};
use crate::normal_form::GeodesicModel;

/// `β̄_q` of the non-contractible component of the loop space of RP^n.
pub fn betti(n: u32, q: u64) -> u32 {
    assert!(n >= 2, "betti numbers are defined for n >= 2");
    if q % 2 == 1 {
        return 0;
    }
    let step = if n % 2 == 1 { (n - 1) as u64 } else { 2 * (n - 1) as u64 };
    if q > 0 && q.is_multiple_of(step) {
        2
    } else {
        1
    }
}

/// Power-series coefficients of the equivariant Poincaré series up to degree
/// `max_q`, expanded by long division of the rational generating function.
pub fn betti_series_oracle(n: u32, max_q: usize) -> Vec<i64> {
    assert!(n >= 2, "betti numbers are defined for n >= 2");
    // (1 − t^a) / ((1 − t²)(1 − t^b))
    let (a, b) = if n % 2 == 1 {
        let k = ((n - 1) / 2) as usize;
        (2 * k + 2, 2 * k)
    } else {
        let k = (n / 2) as usize;
        (4 * k, 4 * k - 2)
    };
    let len = max_q + 1;
    let mut numer = vec![0i64; len];
    numer[0] = 1;
    if a < len {
        numer[a] -= 1;
    }
    let mut denom = vec![0i64; len.max(b + 3)];
    denom[0] = 1;
    denom[2] -= 1;
    denom[b] -= 1;
    denom[b + 2] += 1;
    let mut coeffs = vec![0i64; len];
    for q in 0..len {
        let mut c = numer[q];
        for i in 1..=q.min(denom.len() - 1) {
            c -= denom[i] * coeffs[q - i];
        }
        coeffs[q] = c;
    }
    coeffs
}

/// `B̄ = (n+1)/(2(n−1))` for odd `n`, `n/(2(n−1))` for even `n`.
pub fn average_betti(n: u32) -> Rational {
    assert!(n >= 2, "betti numbers are defined for n >= 2");
    let n = n as i64;
    if n % 2 == 1 {
        rat(n + 1, 2 * (n - 1))
    } else {
        rat(n, 2 * (n - 1))
    }
}

/// `(1/q) Σ_{k ≤ q} (−1)^k β̄_k`.
pub fn partial_alternating_average(n: u32, q: u64) -> Rational {
    assert!(q > 0);
    let sum: i64 = (0..=q).map(|k| if k % 2 == 0 { 1 } else { -1 } * betti(n, k) as i64).sum();
    rat(sum, q as i64)
}

/// Betti table `β̄_0 … β̄_max_q` with its average.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    pub n: u32,
    pub values: Vec<u32>,
    #[serde(with = "crate::exact::rational_serde")]
    pub average: Rational,
}

impl BettiTable {
    pub fn new(n: u32, max_q: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(format!("dimension n = {n} must be at least 2")));
        }
        Ok(BettiTable { n, values: (0..=max_q).map(|q| betti(n, q)).collect(), average: average_betti(n) })
    }
}

fn positive_mean_index(g: &GeodesicModel) -> Result<ExactReal> {
    let mean = mean_index(g)?;
    if mean.signum() != Ordering::Greater {
        return Err(Error::NonPositiveMeanIndex(mean.to_string()));
    }
    Ok(mean)
}

/// Contribution of one model to `m_0 … m_max_degree`.
pub fn morse_contributions(g: &GeodesicModel, max_degree: u64) -> Result<Vec<u64>> {
    g.validate()?;
    let mean = positive_mean_index(g)?;
    let period = g.period()?;
    let types = g.type_numbers()?;
    let stop = Rational::from_integer(BigInt::from(max_degree + 2 * g.dim as u64));
    let mut out = vec![0u64; max_degree as usize + 1];
    for (&first, degrees) in &types {
        let mut iterate = first;
        // the index stays within 2·dim of iterate·î, so nothing reaches
        // degree ≤ max_degree once iterate·î exceeds max_degree + 2·dim
        while mean.scale(iterate as i64).cmp_rational(&stop) != Ordering::Greater {
            let ind = index(g, iterate)?;
            for (&l, &k) in degrees {
                let h = ind + l as i64;
                if (0..=max_degree as i64).contains(&h) {
                    out[h as usize] += k;
                }
            }
            iterate += period;
        }
    }
    Ok(out)
}

/// Morse-type numbers `m_0 … m_max_degree` of a finite family of geodesics.
pub fn morse_type_numbers(models: &[GeodesicModel], max_degree: u64) -> Result<Vec<u64>> {
    let mut total = vec![0u64; max_degree as usize + 1];
    for g in models {
        for (t, c) in total.iter_mut().zip(morse_contributions(g, max_degree)?) {
            *t += c;
        }
    }
    Ok(total)
}

/// Upper bound `Σ_{m,l} k_l(c^{2m−1}) · ((4·dim − 4)/(n_c·î) + 1)` on one
/// model's contribution to any single Morse-type number.
pub fn morse_bound(g: &GeodesicModel) -> Result<ExactReal> {
    let mean = positive_mean_index(g)?;
    let period = g.period()?;
    let weight: u64 = g.type_numbers()?.values().flat_map(|d| d.values()).sum();
    let spread = ExactReal::from(4 * g.dim as i64 - 4).checked_div(&mean.scale(period as i64))?;
    Ok(spread.add_int(&BigInt::from(1)).scale(weight as i64))
}

/// `(1/q) Σ_{h ≤ q} (−1)^h m_h`, which tends to `Σ χ̂/î` for large `q`.
pub fn alternating_morse_average(models: &[GeodesicModel], q: u64) -> Result<Rational> {
    if q == 0 {
        return Err(Error::Precondition("degree bound must be positive".into()));
    }
    let morse = morse_type_numbers(models, q)?;
    let sum: i64 = morse
        .iter()
        .enumerate()
        .map(|(h, &m)| if h % 2 == 0 { m as i64 } else { -(m as i64) })
        .sum();
    Ok(rat(sum, q as i64))
}

/// One degree at which Morse and Betti numbers differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeMismatch {
    pub degree: u64,
    pub morse: u64,
    pub betti: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorseBettiReport {
    pub n: u32,
    pub max_degree: u64,
    pub mismatches: Vec<DegreeMismatch>,
}

impl MorseBettiReport {
    pub fn consistent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares `m_h` of a single bumpy geodesic with `β̄_h` for `h ≤ max_degree`.
pub fn bumpy_morse_equals_betti(g: &GeodesicModel, n: u32, max_degree: u64) -> Result<MorseBettiReport> {
    if !g.is_bumpy() {
        return Err(Error::Precondition("model is not bumpy".into()));
    }
    if g.dim != n {
        return Err(Error::Precondition(format!("model dimension {} differs from n = {n}", g.dim)));
    }
    if n < 2 {
        return Err(Error::Precondition(format!("dimension n = {n} must be at least 2")));
    }
    let morse = morse_contributions(g, max_degree)?;
    let mismatches = morse
        .iter()
        .enumerate()
        .filter_map(|(h, &m)| {
            let b = betti(n, h as u64);
            (m != b as u64).then_some(DegreeMismatch { degree: h as u64, morse: m, betti: b })
        })
        .collect();
    Ok(MorseBettiReport { n, max_degree, mismatches })
}

/// Per-geodesic data of a resonance check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonanceTerm {
    #[serde(with = "crate::exact::rational_serde")]
    pub mean_euler: Rational,
    pub mean_index: ExactReal,
    pub contribution: ExactReal,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonanceReport {
    pub n: u32,
    #[serde(with = "crate::exact::rational_serde")]
    pub average_betti: Rational,
    pub terms: Vec<ResonanceTerm>,
    pub total: ExactReal,
    pub residual: ExactReal,
    pub holds: bool,
}

fn check_family(models: &[GeodesicModel], n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::Precondition(format!("dimension n = {n} must be at least 2")));
    }
    for g in models {
        g.validate()?;
        if g.dim != n {
            return Err(Error::Precondition(format!("model dimension {} differs from n = {n}", g.dim)));
        }
    }
    Ok(())
}

/// `χ̂(c) = (1/n_c) Σ_{m ≤ n_c/2} Σ_l (−1)^{l + i(c)} k_l(c^{2m−1})`.
pub fn mean_euler_number(g: &GeodesicModel) -> Result<Rational> {
    let period = g.period()?;
    let sign = g.index_sign();
    let mut sum = 0i64;
    for (&m, degrees) in &g.type_numbers()? {
        if m >= period {
            continue;
        }
        for (&l, &k) in degrees {
            let s = if l % 2 == 0 { sign } else { -sign };
            sum += s * k as i64;
        }
    }
    Ok(rat(sum, period as i64))
}

fn finish(n: u32, target: Rational, terms: Vec<ResonanceTerm>) -> Result<ResonanceReport> {
    let mut total = ExactReal::zero();
    for t in &terms {
        total = total.checked_add(&t.contribution)?;
    }
    let residual = total.add_rational(&-target);
    let holds = residual.is_zero();
    Ok(ResonanceReport { n, average_betti: average_betti(n), terms, total, residual, holds })
}

/// Exact residual `Σ χ̂(c_j)/î(c_j) − B̄` of the resonance identity.
pub fn resonance_check(models: &[GeodesicModel], n: u32) -> Result<ResonanceReport> {
    check_family(models, n)?;
    let mut terms = Vec::with_capacity(models.len());
    for g in models {
        let mean = positive_mean_index(g)?;
        let chi = mean_euler_number(g)?;
        let contribution = ExactReal::from(chi.clone()).checked_div(&mean)?;
        terms.push(ResonanceTerm { mean_euler: chi, mean_index: mean, contribution });
    }
    finish(n, average_betti(n), terms)
}

/// The bumpy form `Σ (−1)^{i(c_j)}/î(c_j) − 2B̄`, requiring every model to be
/// bumpy.
pub fn resonance_check_bumpy(models: &[GeodesicModel], n: u32) -> Result<ResonanceReport> {
    check_family(models, n)?;
    let mut terms = Vec::with_capacity(models.len());
    for g in models {
        if !g.is_bumpy() {
            return Err(Error::Precondition("bumpy resonance form needs bumpy models".into()));
        }
        let mean = positive_mean_index(g)?;
        let sign = Rational::from_integer(g.index_sign().into());
        let contribution = ExactReal::from(sign.clone()).checked_div(&mean)?;
        // period 2 and k₀ = 1 give χ̂ = ±1/2
        let mean_euler = sign * rat(1, 2);
        terms.push(ResonanceTerm { mean_euler, mean_index: mean, contribution });
    }
    let target = average_betti(n) * Rational::from_integer(2.into());
    finish(n, target, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::NormalFormDecomposition;

    fn x(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    #[test]
    fn betti_examples() {
        assert_eq!([0, 2, 3, 4].map(|q| betti(3, q)), [1, 2, 0, 2]);
        assert_eq!([6, 2, 12].map(|q| betti(4, q)), [2, 1, 2]);
        assert_eq!([4, 6].map(|q| betti(5, q)), [2, 1]);
    }

    #[test]
    fn series_examples() {
        assert_eq!(betti_series_oracle(3, 6), vec![1, 0, 2, 0, 2, 0, 2]);
        assert_eq!(betti_series_oracle(2, 4), vec![1, 0, 2, 0, 2]);
        for n in 2..10 {
            assert_eq!(betti_series_oracle(n, 0), vec![1]);
        }
    }

    #[test]
    fn averages() {
        assert_eq!(average_betti(3), rat(1, 1));
        assert_eq!(average_betti(2), rat(1, 1));
        assert_eq!(average_betti(4), rat(2, 3));
        assert_eq!(average_betti(5), rat(3, 4));
    }

    fn bumpy(dim: u32, ind1: i64, thetas: &[&str]) -> GeodesicModel {
        GeodesicModel::bumpy(dim, true, ind1, thetas.iter().map(|t| x(t)).collect()).unwrap()
    }

    #[test]
    fn empty_family_has_no_morse_numbers() {
        assert_eq!(morse_type_numbers(&[], 5).unwrap(), vec![0; 6]);
    }

    #[test]
    fn single_rotation_morse_pattern() {
        // θ = √2 − 1 with i1 = 1 on a 2-manifold: î = 2√2 − 2 ≈ 0.83
        let g = bumpy(2, 1, &["sqrt(2) - 1"]);
        let morse = morse_contributions(&g, 10).unwrap();
        let mut expect = vec![0u64; 11];
        let mut m = 1;
        loop {
            let i = index(&g, m).unwrap();
            if i > 14 {
                break;
            }
            if (0..=10).contains(&i) {
                expect[i as usize] += 1;
            }
            m += 2;
        }
        assert_eq!(morse, expect);
    }

    #[test]
    fn non_positive_mean_index_rejected() {
        let g = GeodesicModel { nf: NormalFormDecomposition::hyperbolic(1), ..bumpy(2, 0, &[]) };
        assert!(matches!(morse_type_numbers(&[g], 4), Err(Error::NonPositiveMeanIndex(_))));
    }

    #[test]
    fn odd_index_breaks_betti_match() {
        let g = bumpy(3, 1, &["sqrt(2) - 1/2", "7/4 - sqrt(2)"]);
        let report = bumpy_morse_equals_betti(&g, 3, 6).unwrap();
        assert!(report.mismatches.iter().any(|d| d.degree == 1 && d.betti == 0));
    }

    #[test]
    fn resonance_single_bumpy() {
        // î = 1/2 = (3 − 1)/(3 + 1)
        let g = bumpy(3, 0, &["sqrt(2) - 1/2", "7/4 - sqrt(2)"]);
        assert_eq!(mean_index(&g).unwrap(), real_half());
        assert!(resonance_check(std::slice::from_ref(&g), 3).unwrap().holds);
        assert!(resonance_check_bumpy(&[g], 3).unwrap().holds);
    }

    fn real_half() -> ExactReal {
        ExactReal::from(rat(1, 2))
    }

    #[test]
    fn resonance_rejects_zero_mean() {
        let g = GeodesicModel { nf: NormalFormDecomposition::hyperbolic(2), ..bumpy(3, 0, &[]) };
        assert!(matches!(resonance_check(&[g], 3), Err(Error::NonPositiveMeanIndex(_))));
    }
}
