//! Index and nullity of iterated closed geodesics.
//!
//! Orientable geodesics follow the ω = 1 iteration formula of the underlying
//! symplectic path; the ω = −1 index is obtained from the Bott-type relation
//! `i₋₁(γ^m) = i(γ^{2m}) − i(γ^m)`, and non-orientable geodesics use the
//! shifted ceiling `E_m` form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exact::{rat, ExactReal, Rational};
use crate::normal_form::{validate, GeodesicModel, NormalFormDecomposition};

fn to_i64(v: BigInt) -> i64 {
    v.to_i64().expect("index value overflows i64")
}

/// `(1 + (−1)^m) / 2`.
fn even_indicator(m: u64) -> i64 {
    m.is_multiple_of(2) as i64
}

fn sum_ceil(angles: &[ExactReal], m: u64, shift: &Rational) -> i64 {
    angles.iter().map(|a| to_i64(a.scale(m as i64).add_rational(shift).ceil())).sum()
}

fn sum_phi(angles: &[ExactReal], m: u64, shift: &Rational) -> i64 {
    angles.iter().map(|a| a.scale(m as i64).add_rational(shift).phi()).sum()
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::Precondition("iterate m must be positive".into()));
    }
    Ok(())
}

fn counts(nf: &NormalFormDecomposition) -> [i64; 9] {
    [
        nf.p_minus as i64,
        nf.p_zero as i64,
        nf.p_plus as i64,
        nf.q_minus as i64,
        nf.q_zero as i64,
        nf.q_plus as i64,
        nf.r() as i64,
        nf.r_star() as i64,
        nf.r_zero() as i64,
    ]
}

/// `i(γ^m)` of an orientable closed geodesic with `i(γ) = i1`.
pub fn index_orientable(nf: &NormalFormDecomposition, i1: i64, m: u64) -> Result<i64> {
    validate(nf).into_result()?;
    check_m(m)?;
    let [pm, p0, _, _, q0, qp, r, rs, _] = counts(nf);
    let zero = Rational::from_integer(0.into());
    let mi = m as i64;
    Ok(mi * (i1 + pm + p0 - r) - (pm + p0 + r) - even_indicator(m) * (q0 + qp)
        + 2 * sum_ceil(&nf.thetas, m, &zero)
        + 2 * sum_phi(&nf.alphas, m, &zero)
        - 2 * rs)
}

/// `ν(γ^m)` of an orientable closed geodesic with `ν(γ) = nu1`.
pub fn nullity_orientable(nf: &NormalFormDecomposition, nu1: i64, m: u64) -> Result<i64> {
    validate(nf).into_result()?;
    check_m(m)?;
    let [_, _, _, qm, q0, qp, r, rs, r0] = counts(nf);
    let zero = Rational::from_integer(0.into());
    let varsigma = (r - sum_phi(&nf.thetas, m, &zero))
        + (rs - sum_phi(&nf.alphas, m, &zero))
        + (r0 - sum_phi(&nf.betas, m, &zero));
    Ok(nu1 + even_indicator(m) * (qm + 2 * q0 + qp) + 2 * varsigma)
}

/// `i₋₁(γ^m) = i(γ^{2m}) − i(γ^m)`.
pub fn index_minus1(nf: &NormalFormDecomposition, i1: i64, m: u64) -> Result<i64> {
    Ok(index_orientable(nf, i1, 2 * m)? - index_orientable(nf, i1, m)?)
}

/// `ν₋₁(γ^m) = ν(γ^{2m}) − ν(γ^m)`.
pub fn nullity_minus1(nf: &NormalFormDecomposition, nu1: i64, m: u64) -> Result<i64> {
    Ok(nullity_orientable(nf, nu1, 2 * m)? - nullity_orientable(nf, nu1, m)?)
}

/// `i₋₁(γ^m)` through the half-shifted ceiling form, without going through
/// the doubled iterate:
/// `m(i1 + p₋ + p₀ − r) − ((1 − (−1)^m)/2)(q₀ + q₊) + 2ΣE(mθ − 1/2) + 2Σφ(mα − 1/2) − 2r*`.
pub fn index_minus1_closed_form(nf: &NormalFormDecomposition, i1: i64, m: u64) -> Result<i64> {
    validate(nf).into_result()?;
    check_m(m)?;
    let [pm, p0, _, _, q0, qp, r, rs, _] = counts(nf);
    let half = rat(-1, 2);
    let mi = m as i64;
    Ok(mi * (i1 + pm + p0 - r) - (1 - even_indicator(m)) * (q0 + qp)
        + 2 * sum_ceil(&nf.thetas, m, &half)
        + 2 * sum_phi(&nf.alphas, m, &half)
        - 2 * rs)
}

/// The same closed form written through `i₋₁(γ)`; agrees with
/// [`index_minus1_closed_form`] for odd `m`.
pub fn index_minus1_from_prime(nf: &NormalFormDecomposition, i_minus1: i64, m: u64) -> Result<i64> {
    validate(nf).into_result()?;
    check_m(m)?;
    let [_, _, _, _, q0, qp, _, rs, _] = counts(nf);
    let half = rat(-1, 2);
    let mi = m as i64;
    Ok(mi * (i_minus1 + q0 + qp - 2 * nf.r_prime as i64) - (q0 + qp)
        + 2 * sum_ceil(&nf.thetas, m, &half)
        + 2 * sum_phi(&nf.alphas, m, &half)
        - 2 * rs)
}

/// `ν₋₁(γ^m)` through the half-shifted form:
/// `((1 − (−1)^m)/2)(q₋ + 2q₀ + q₊) + 2Σ(1 − φ(mθ − 1/2)) + …` over all angle lists.
pub fn nullity_minus1_closed_form(nf: &NormalFormDecomposition, m: u64) -> Result<i64> {
    validate(nf).into_result()?;
    check_m(m)?;
    let [_, _, _, qm, q0, qp, r, rs, r0] = counts(nf);
    let half = rat(-1, 2);
    let varsigma = (r - sum_phi(&nf.thetas, m, &half))
        + (rs - sum_phi(&nf.alphas, m, &half))
        + (r0 - sum_phi(&nf.betas, m, &half));
    Ok((1 - even_indicator(m)) * (qm + 2 * q0 + qp) + 2 * varsigma)
}

fn sum_ceil_shifted(angles: &[ExactReal], m: u64) -> i64 {
    angles.iter().map(|a| to_i64(a.scale(m as i64).ceil_shifted(m))).sum()
}

fn sum_phi_shifted(angles: &[ExactReal], m: u64) -> i64 {
    angles.iter().map(|a| a.scale(m as i64).phi_shifted(m)).sum()
}

fn require_nonorientable(g: &GeodesicModel) -> Result<()> {
    if g.orientable {
        return Err(Error::WrongFormula { expected: "non-orientable" });
    }
    validate(&g.nf).into_result()
}

/// Parity term `(1 − (−1)^d)/2` of the manifold dimension.
fn odd_dimension(g: &GeodesicModel) -> i64 {
    (g.dim % 2) as i64
}

/// `ind(c^m)` of a non-orientable closed geodesic.
pub fn index_nonorientable(g: &GeodesicModel, m: u64) -> Result<i64> {
    require_nonorientable(g)?;
    check_m(m)?;
    let nf = &g.nf;
    let [pm, p0, _, _, q0, qp, r, rs, _] = counts(nf);
    let mi = m as i64;
    Ok(mi * (g.ind1 + q0 + qp - 2 * nf.r_prime as i64) - (q0 + qp)
        - even_indicator(m) * (r + pm + p0 + odd_dimension(g))
        + 2 * sum_ceil_shifted(&nf.thetas, m)
        + 2 * sum_phi_shifted(&nf.alphas, m)
        - 2 * rs)
}

/// `null(c^m)` of a non-orientable closed geodesic.
pub fn nullity_nonorientable(g: &GeodesicModel, m: u64) -> Result<i64> {
    require_nonorientable(g)?;
    check_m(m)?;
    let nf = &g.nf;
    let [pm, p0, pp, _, _, _, r, rs, r0] = counts(nf);
    let varsigma = (r - sum_phi_shifted(&nf.thetas, m))
        + (rs - sum_phi_shifted(&nf.alphas, m))
        + (r0 - sum_phi_shifted(&nf.betas, m));
    Ok(g.null1 as i64 + even_indicator(m) * (pm + 2 * p0 + pp + odd_dimension(g)) + 2 * varsigma)
}

/// Index of the `m`-th iterate, dispatching on orientability.
pub fn index(g: &GeodesicModel, m: u64) -> Result<i64> {
    if g.orientable {
        index_orientable(&g.nf, g.ind1, m)
    } else {
        index_nonorientable(g, m)
    }
}

/// Nullity of the `m`-th iterate, dispatching on orientability.
pub fn nullity(g: &GeodesicModel, m: u64) -> Result<i64> {
    if g.orientable {
        nullity_orientable(&g.nf, g.null1 as i64, m)
    } else {
        nullity_nonorientable(g, m)
    }
}

/// `î(c) = lim ind(c^m)/m`, the linear coefficient of the index formula.
pub fn mean_index(g: &GeodesicModel) -> Result<ExactReal> {
    validate(&g.nf).into_result()?;
    let nf = &g.nf;
    let base = if g.orientable {
        g.ind1 + nf.p_minus as i64 + nf.p_zero as i64 - nf.r() as i64
    } else {
        g.ind1 + nf.q_zero as i64 + nf.q_plus as i64 - 2 * nf.r_prime as i64
    };
    let mut acc = ExactReal::from(base);
    for t in &nf.thetas {
        acc = acc.checked_add(&t.scale(2))?;
    }
    Ok(acc)
}

/// Whether `|ind(c^m) − m·mean| ≤ 2·dim − 2` for every `m ≤ max_m`.
pub fn mean_index_bound_check_with(g: &GeodesicModel, mean: &ExactReal, max_m: u64) -> Result<bool> {
    let bound = Rational::from_integer((2 * g.dim as i64 - 2).into());
    for m in 1..=max_m {
        let ind = ExactReal::from(index(g, m)?);
        let gap = ind.checked_sub(&mean.scale(m as i64))?;
        let abs = if gap.signum().is_lt() { -gap } else { gap };
        if abs.cmp_rational(&bound).is_gt() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// [`mean_index_bound_check_with`] at the model's own mean index.
pub fn mean_index_bound_check(g: &GeodesicModel, max_m: u64) -> Result<bool> {
    mean_index_bound_check_with(g, &mean_index(g)?, max_m)
}

/// Index/nullity table of one model, extended on demand.
#[derive(Clone, Debug)]
pub struct IndexSequence {
    model: GeodesicModel,
    values: BTreeMap<u64, (i64, i64)>,
}

impl IndexSequence {
    pub fn new(model: GeodesicModel) -> Result<Self> {
        model.validate()?;
        Ok(IndexSequence { model, values: BTreeMap::new() })
    }

    pub fn model(&self) -> &GeodesicModel {
        &self.model
    }

    /// `(ind(c^m), null(c^m))`, cached.
    pub fn get(&mut self, m: u64) -> Result<(i64, i64)> {
        if let Some(&v) = self.values.get(&m) {
            return Ok(v);
        }
        let v = (index(&self.model, m)?, nullity(&self.model, m)?);
        self.values.insert(m, v);
        Ok(v)
    }

    /// Rows `(m, ind, null)` for `1 ≤ m ≤ max_m`.
    pub fn table(&mut self, max_m: u64) -> Result<Vec<(u64, i64, i64)>> {
        (1..=max_m).map(|m| self.get(m).map(|(i, n)| (m, i, n))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    fn one_theta(t: &str) -> NormalFormDecomposition {
        NormalFormDecomposition { half_dim: 1, ..Default::default() }.with_thetas(vec![x(t)])
    }

    #[test]
    fn empty_form_is_flat() {
        let nf = NormalFormDecomposition::default();
        for m in 1..20 {
            assert_eq!(index_orientable(&nf, 0, m).unwrap(), 0);
            assert_eq!(nullity_orientable(&nf, 3, m).unwrap(), 3);
            assert_eq!(index_minus1(&nf, 0, m).unwrap(), 0);
        }
    }

    #[test]
    fn single_rotation_orientable() {
        // θ = √2 − 1 ≈ 0.4142: E(θ)=1, E(2θ)=1, E(3θ)=2
        let nf = one_theta("sqrt(2) - 1");
        assert_eq!(index_orientable(&nf, 1, 1).unwrap(), 1);
        assert_eq!(index_orientable(&nf, 1, 2).unwrap(), 1);
        assert_eq!(index_orientable(&nf, 1, 3).unwrap(), 3);
        assert_eq!(index_minus1(&nf, 1, 1).unwrap(), 0);
    }

    #[test]
    fn minus_one_nullity_at_prime() {
        let nf = NormalFormDecomposition { q_minus: 1, q_zero: 2, q_plus: 1, half_dim: 4, ..Default::default() };
        assert_eq!(nullity_minus1(&nf, 0, 1).unwrap(), 1 + 4 + 1);
    }

    #[test]
    fn nonorientable_single_rotation() {
        let g = GeodesicModel {
            nf: NormalFormDecomposition { h: 2, half_dim: 3, ..Default::default() }
                .with_thetas(vec![x("sqrt(2) - 1")]),
            ind1: 0,
            null1: 0,
            dim: 4,
            orientable: false,
            type_numbers: None,
            period: None,
        };
        // 3θ − 1/2 ≈ 0.743, so E = 1 and the index is 2·1; the doubled-path
        // route gives i(γ⁶) − i(γ³) = 5 − 3 with i(γ) = 1
        assert_eq!(index_nonorientable(&g, 3).unwrap(), 2);
        assert_eq!(index_minus1(&g.nf, 1, 3).unwrap(), 2);
        assert_eq!(index_nonorientable(&g, 1).unwrap(), 0);
        assert!(matches!(
            index_nonorientable(&GeodesicModel { orientable: true, ..g }, 1),
            Err(Error::WrongFormula { .. })
        ));
    }

    #[test]
    fn nonorientable_mean_index() {
        let g = GeodesicModel {
            nf: one_theta("sqrt(2) - 1"),
            ind1: 0,
            null1: 0,
            dim: 2,
            orientable: false,
            type_numbers: None,
            period: None,
        };
        let mean = mean_index(&g).unwrap();
        assert_eq!(mean, x("2*sqrt(2) - 2"));
        let m = 10_000u64;
        let ratio = index(&g, m).unwrap() as f64 / m as f64;
        assert!((ratio - mean.to_f64()).abs() < 1e-3);
    }

    #[test]
    fn bound_check_detects_corruption() {
        let g = GeodesicModel {
            nf: one_theta("sqrt(2) - 1"),
            ind1: 1,
            null1: 0,
            dim: 2,
            orientable: true,
            type_numbers: None,
            period: None,
        };
        assert!(mean_index_bound_check(&g, 200).unwrap());
        let wrong = mean_index(&g).unwrap().add_int(&1.into());
        assert!(!mean_index_bound_check_with(&g, &wrong, 200).unwrap());
    }

    #[test]
    fn zero_iterate_rejected() {
        let nf = NormalFormDecomposition::default();
        assert!(matches!(index_orientable(&nf, 0, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn sequence_caches() {
        let g = GeodesicModel {
            nf: one_theta("sqrt(2) - 1"),
            ind1: 1,
            null1: 0,
            dim: 2,
            orientable: true,
            type_numbers: None,
            period: None,
        };
        let mut seq = IndexSequence::new(g).unwrap();
        let rows = seq.table(3).unwrap();
        assert_eq!(rows, vec![(1, 1, 0), (2, 1, 0), (3, 3, 0)]);
    }
}
