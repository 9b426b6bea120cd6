//! Basic normal-form data of a linearized Poincaré map and the closed-geodesic
//! models built on top of it.
//!
//! Rotation angles are stored divided by 2π, so a rotation by θ ∈ (0, 2π)
//! becomes a value in (0, 1) and the excluded angle π becomes 1/2.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rat, ExactReal, Rational};

/// Block counts and angle lists of a basic normal form in `Sp(2·half_dim)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalFormDecomposition {
    /// `N₁(1, 1)` blocks.
    #[serde(default)]
    pub p_minus: u32,
    /// `I₂` blocks.
    #[serde(default)]
    pub p_zero: u32,
    /// `N₁(1, −1)` blocks.
    #[serde(default)]
    pub p_plus: u32,
    /// `N₁(−1, 1)` blocks.
    #[serde(default)]
    pub q_minus: u32,
    /// `−I₂` blocks.
    #[serde(default)]
    pub q_zero: u32,
    /// `N₁(−1, −1)` blocks.
    #[serde(default)]
    pub q_plus: u32,
    /// Hyperbolic blocks; dimension bookkeeping only.
    #[serde(default)]
    pub h: u32,
    /// Rotation angles over 2π; the first `r_prime` lie in (1/2, 1).
    #[serde(default)]
    pub thetas: Vec<ExactReal>,
    #[serde(default)]
    pub r_prime: u32,
    /// Angles of the non-trivial `N₂` blocks.
    #[serde(default)]
    pub alphas: Vec<ExactReal>,
    /// Angles of the trivial `N₂` blocks.
    #[serde(default)]
    pub betas: Vec<ExactReal>,
    pub half_dim: u32,
}

/// Every invariant violation found by [`validate`]; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidNormalForm(self.violations))
        }
    }
}

fn is_proper_angle(x: &ExactReal) -> bool {
    x.signum() == Ordering::Greater
        && x.cmp_rational(&Rational::one()) == Ordering::Less
        && x.cmp_rational(&rat(1, 2)) != Ordering::Equal
}

impl NormalFormDecomposition {
    /// Empty decomposition padded with `half_dim` hyperbolic blocks.
    pub fn hyperbolic(half_dim: u32) -> Self {
        NormalFormDecomposition { h: half_dim, half_dim, ..Default::default() }
    }

    /// Replaces the rotation angles, ordering them so that those above 1/2
    /// come first, and sets `r_prime` accordingly.
    pub fn with_thetas(mut self, thetas: Vec<ExactReal>) -> Self {
        let half = rat(1, 2);
        let (mut upper, lower): (Vec<_>, Vec<_>) =
            thetas.into_iter().partition(|t| t.cmp_rational(&half) == Ordering::Greater);
        self.r_prime = upper.len() as u32;
        upper.extend(lower);
        self.thetas = upper;
        self
    }

    pub fn r(&self) -> u32 {
        self.thetas.len() as u32
    }

    pub fn r_star(&self) -> u32 {
        self.alphas.len() as u32
    }

    pub fn r_zero(&self) -> u32 {
        self.betas.len() as u32
    }

    /// Dimension count implied by the blocks.
    pub fn block_dimension(&self) -> u64 {
        [self.p_minus, self.p_zero, self.p_plus, self.q_minus, self.q_zero, self.q_plus, self.r(), self.h]
            .iter()
            .map(|&c| c as u64)
            .sum::<u64>()
            + 2 * (self.r_star() as u64 + self.r_zero() as u64)
    }

    pub fn angles(&self) -> impl Iterator<Item = &ExactReal> {
        self.thetas.iter().chain(&self.alphas).chain(&self.betas)
    }

    /// The common radicand of all irrational angles (0 if all are rational).
    pub fn radicand(&self) -> u64 {
        self.angles().map(ExactReal::radicand).find(|&d| d != 0).unwrap_or(0)
    }

    /// Eigenvalue-one count `ν₁ = p₋ + 2p₀ + p₊` of the orientable path.
    pub fn eigenvalue_one_nullity(&self) -> u32 {
        self.p_minus + 2 * self.p_zero + self.p_plus
    }

    /// Eigenvalue-minus-one count `q₋ + 2q₀ + q₊`.
    pub fn eigenvalue_minus_one_nullity(&self) -> u32 {
        self.q_minus + 2 * self.q_zero + self.q_plus
    }

    /// No `±1` eigenvalue blocks and no rational angle.
    pub fn is_bumpy(&self) -> bool {
        self.eigenvalue_one_nullity() == 0
            && self.eigenvalue_minus_one_nullity() == 0
            && self.angles().all(|a| !a.is_rational())
    }
}

/// Checks every invariant of a decomposition and lists each violation.
pub fn validate(nf: &NormalFormDecomposition) -> ValidationReport {
    let mut v = Vec::new();
    let dim = nf.block_dimension();
    if dim != nf.half_dim as u64 {
        v.push(format!("block dimension {dim} does not match half_dim {}", nf.half_dim));
    }
    if nf.r_prime > nf.r() {
        v.push(format!("r_prime {} exceeds the number of thetas {}", nf.r_prime, nf.r()));
    }
    let half = rat(1, 2);
    for (j, t) in nf.thetas.iter().enumerate() {
        if !is_proper_angle(t) {
            v.push(format!("theta[{j}] = {t} is not in (0, 1) \\ {{1/2}}"));
            continue;
        }
        let upper = t.cmp_rational(&half) == Ordering::Greater;
        if (j < nf.r_prime as usize) != upper {
            v.push(format!(
                "theta[{j}] = {t} breaks the ordering: exactly the first {} thetas must exceed 1/2",
                nf.r_prime
            ));
        }
    }
    for (name, list) in [("alpha", &nf.alphas), ("beta", &nf.betas)] {
        for (j, a) in list.iter().enumerate() {
            if !is_proper_angle(a) {
                v.push(format!("{name}[{j}] = {a} is not in (0, 1) \\ {{1/2}}"));
            }
        }
    }
    let mut radicands: Vec<u64> = nf.angles().map(ExactReal::radicand).filter(|&d| d != 0).collect();
    radicands.sort_unstable();
    radicands.dedup();
    if radicands.len() > 1 {
        v.push(format!("angles mix radicands {radicands:?}"));
    }
    ValidationReport { violations: v }
}

/// Whether `i1 = i_minus1 + (q₀ + q₊) + (r − 2r′) − (p₀ + p₋)`.
pub fn splitting_consistency(nf: &NormalFormDecomposition, i1: i64, i_minus1: i64) -> bool {
    let offset = (nf.q_zero + nf.q_plus) as i64 + nf.r() as i64 - 2 * nf.r_prime as i64
        - (nf.p_zero + nf.p_minus) as i64;
    i1 == i_minus1 + offset
}

/// A hypothetical closed geodesic, described by index data only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicModel {
    pub nf: NormalFormDecomposition,
    /// Morse index of the prime geodesic.
    pub ind1: i64,
    /// Nullity of the prime geodesic.
    #[serde(default)]
    pub null1: u32,
    /// Manifold dimension.
    pub dim: u32,
    pub orientable: bool,
    /// Sparse local type numbers as `[m, l, k]`: `k_l(c^m) = k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_numbers: Option<Vec<[u64; 3]>>,
    /// Analytical period; computed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<u64>,
}

/// Local type numbers keyed by odd iterate, then degree.
pub type TypeNumbers = BTreeMap<u64, BTreeMap<u64, u64>>;

fn lcm_of_rational_denominators<'a>(angles: impl Iterator<Item = &'a ExactReal>) -> BigInt {
    angles
        .filter_map(ExactReal::to_rational)
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

impl GeodesicModel {
    /// A non-degenerate model of the given dimension with default type
    /// numbers; `thetas` are reordered as needed.
    pub fn bumpy(dim: u32, orientable: bool, ind1: i64, thetas: Vec<ExactReal>) -> Result<Self> {
        let half_dim = dim
            .checked_sub(1)
            .ok_or_else(|| Error::InvalidModel("dimension must be positive".into()))?;
        let r = thetas.len() as u32;
        if r > half_dim {
            return Err(Error::InvalidModel(format!(
                "{r} rotation blocks do not fit in half dimension {half_dim}"
            )));
        }
        let nf = NormalFormDecomposition { h: half_dim - r, half_dim, ..Default::default() }.with_thetas(thetas);
        let model = GeodesicModel { nf, ind1, null1: 0, dim, orientable, type_numbers: None, period: None };
        model.validate()?;
        Ok(model)
    }

    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Self> {
        let model: GeodesicModel = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    /// Required prime nullity: the eigenvalue-one count for orientable
    /// geodesics, the eigenvalue-minus-one count otherwise.
    pub fn expected_null1(&self) -> u32 {
        if self.orientable {
            self.nf.eigenvalue_one_nullity()
        } else {
            self.nf.eigenvalue_minus_one_nullity()
        }
    }

    pub fn is_bumpy(&self) -> bool {
        self.nf.is_bumpy() && self.null1 == 0
    }

    /// Smallest even iterate at which the nullity reaches its maximum: the
    /// smallest even multiple of the lcm of all rational angle denominators.
    pub fn analytical_period(&self) -> u64 {
        let lcm = lcm_of_rational_denominators(self.nf.angles());
        let period = if lcm.is_even() { lcm } else { lcm * 2 };
        u64::try_from(period).expect("analytical period overflows u64")
    }

    /// The stored period if consistent, the computed one if absent.
    pub fn period(&self) -> Result<u64> {
        let computed = self.analytical_period();
        match self.period {
            Some(p) if p != computed => Err(Error::InvalidModel(format!(
                "declared analytical period {p} differs from computed {computed}"
            ))),
            _ => Ok(computed),
        }
    }

    /// Full validation: normal form, dimension, nullity, period, type numbers.
    pub fn validate(&self) -> Result<()> {
        validate(&self.nf).into_result()?;
        if self.dim == 0 || self.nf.half_dim != self.dim - 1 {
            return Err(Error::InvalidModel(format!(
                "normal form half dimension {} does not match manifold dimension {}",
                self.nf.half_dim, self.dim
            )));
        }
        let expected = self.expected_null1();
        if self.null1 != expected {
            return Err(Error::InvalidModel(format!(
                "null1 = {} but the normal form forces {expected}",
                self.null1
            )));
        }
        let period = self.period()?;
        if let Some(entries) = &self.type_numbers {
            let top = 2 * self.dim as u64 - 2;
            for &[m, l, _] in entries {
                if m % 2 == 0 || m == 0 || m >= period {
                    return Err(Error::InvalidModel(format!(
                        "type number iterate {m} must be odd and below the period {period}"
                    )));
                }
                if l > top {
                    return Err(Error::InvalidModel(format!("type number degree {l} exceeds {top}")));
                }
            }
        }
        Ok(())
    }

    /// Type numbers with defaults filled in: a bumpy model without explicit
    /// data gets `k₀ = 1` at every odd iterate below the period.
    pub fn type_numbers(&self) -> Result<TypeNumbers> {
        let mut out = TypeNumbers::new();
        match &self.type_numbers {
            Some(entries) => {
                for &[m, l, k] in entries {
                    if k > 0 {
                        *out.entry(m).or_default().entry(l).or_default() += k;
                    }
                }
            }
            None if self.is_bumpy() => {
                let period = self.period()?;
                for m in (1..period).step_by(2) {
                    out.entry(m).or_default().insert(0, 1);
                }
            }
            None => {
                return Err(Error::InvalidModel(
                    "type numbers are required for degenerate models".into(),
                ))
            }
        }
        Ok(out)
    }

    /// `(−1)^{ind1}`.
    pub fn index_sign(&self) -> i64 {
        if self.ind1.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&NormalFormDecomposition::default()).is_valid());

        let one_theta = NormalFormDecomposition {
            thetas: vec![x("sqrt(2) - 1")],
            half_dim: 1,
            ..Default::default()
        };
        assert!(validate(&one_theta).is_valid());

        let bad = NormalFormDecomposition { p_plus: 1, half_dim: 0, ..Default::default() };
        let report = validate(&bad);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].contains("half_dim"));
    }

    #[test]
    fn validate_rejects_angles() {
        let nf = NormalFormDecomposition {
            thetas: vec![x("1/2"), x("3/4")],
            alphas: vec![x("1")],
            half_dim: 4,
            ..Default::default()
        };
        let report = validate(&nf);
        // 1/2 excluded, 3/4 above 1/2 with r_prime 0, alpha = 1 excluded
        assert_eq!(report.violations.len(), 3, "{report:?}");
    }

    #[test]
    fn validate_rejects_mixed_radicands() {
        let nf = NormalFormDecomposition {
            thetas: vec![x("sqrt(2) - 1"), x("sqrt(3) - 1")],
            r_prime: 1,
            half_dim: 2,
            ..Default::default()
        };
        assert!(!validate(&nf).is_valid());
    }

    #[test]
    fn with_thetas_orders() {
        let nf = NormalFormDecomposition { half_dim: 2, ..Default::default() }
            .with_thetas(vec![x("1/3"), x("sqrt(2) - 1/2")]);
        assert_eq!(nf.r_prime, 1);
        assert_eq!(nf.thetas[0], x("sqrt(2) - 1/2"));
        assert!(validate(&nf).is_valid());
    }

    #[test]
    fn splitting_examples() {
        let empty = NormalFormDecomposition::default();
        assert!(splitting_consistency(&empty, 0, 0));
        let one = NormalFormDecomposition { thetas: vec![x("sqrt(2) - 1")], half_dim: 1, ..Default::default() };
        assert!(splitting_consistency(&one, 1, 0));
        let q = NormalFormDecomposition { q_plus: 1, half_dim: 1, ..Default::default() };
        assert!(!splitting_consistency(&q, 0, 0));
        assert!(splitting_consistency(&q, 1, 0));
    }

    fn model_with_thetas(thetas: &[&str]) -> GeodesicModel {
        let nf = NormalFormDecomposition { half_dim: thetas.len() as u32, ..Default::default() }
            .with_thetas(thetas.iter().map(|t| x(t)).collect());
        GeodesicModel {
            nf,
            ind1: 0,
            null1: 0,
            dim: thetas.len() as u32 + 1,
            orientable: true,
            type_numbers: Some(vec![]),
            period: None,
        }
    }

    #[test]
    fn period_examples() {
        assert_eq!(model_with_thetas(&["sqrt(2) - 1"]).analytical_period(), 2);
        assert_eq!(model_with_thetas(&["1/3"]).analytical_period(), 6);
        assert_eq!(model_with_thetas(&["1/3", "1/4"]).analytical_period(), 12);
        assert_eq!(model_with_thetas(&[]).analytical_period(), 2);
    }

    #[test]
    fn declared_period_mismatch_is_error() {
        let mut m = model_with_thetas(&["1/3"]);
        m.period = Some(12);
        assert!(matches!(m.validate(), Err(Error::InvalidModel(_))));
        m.period = Some(6);
        assert!(m.validate().is_ok());
    }

    #[test]
    fn bumpy_defaults() {
        let m = GeodesicModel::bumpy(3, true, 0, vec![x("sqrt(2) - 1/2"), x("7/4 - sqrt(2)")]).unwrap();
        assert!(m.is_bumpy());
        assert_eq!(m.analytical_period(), 2);
        let tn = m.type_numbers().unwrap();
        assert_eq!(tn.len(), 1);
        assert_eq!(tn[&1][&0], 1);
    }

    #[test]
    fn null1_consistency() {
        let mut m = GeodesicModel {
            nf: NormalFormDecomposition { p_zero: 1, q_plus: 1, half_dim: 2, ..Default::default() },
            ind1: 0,
            null1: 2,
            dim: 3,
            orientable: true,
            type_numbers: Some(vec![[1, 0, 1]]),
            period: None,
        };
        assert!(m.validate().is_ok());
        m.orientable = false;
        assert!(m.validate().is_err());
        m.null1 = 1;
        assert!(m.validate().is_ok());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"nf": {"thetas": ["-1 + sqrt(2)"], "half_dim": 1}, "ind1": 1, "dim": 2, "orientable": true}"#;
        let m: GeodesicModel = serde_json::from_str(text).unwrap();
        assert_eq!(m.nf.thetas[0], x("sqrt(2) - 1"));
        let back: GeodesicModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
