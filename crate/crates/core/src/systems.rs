//! Systems of irrational numbers `θ̂_j = Σ_l p_jl θ_l + ξ_j` with integer
//! coefficients and rational offsets, and the exact calculus on rank-one
//! systems: η-actions, the effective difference number, equation expansion,
//! pair cut-off and the full reduction to unit coefficients.
//!
//! Nothing irrational is ever evaluated here; only coefficients and offsets.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rat, rational_serde, Rational};

fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Raw JSON shape, checked on conversion.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(rename = "P")]
    coeffs: Vec<Vec<i64>>,
    #[serde(with = "rational_serde::vec")]
    xi: Vec<Rational>,
    #[serde(default)]
    labels: Vec<String>,
}

/// `k` equations over an `r`-element irrational basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem")]
pub struct IrrationalSystem {
    #[serde(rename = "P")]
    coeffs: Vec<Vec<i64>>,
    #[serde(with = "rational_serde::vec")]
    xi: Vec<Rational>,
    labels: Vec<String>,
}

impl TryFrom<RawSystem> for IrrationalSystem {
    type Error = Error;

    fn try_from(raw: RawSystem) -> Result<Self> {
        let labels = if raw.labels.is_empty() { None } else { Some(raw.labels) };
        IrrationalSystem::with_labels(raw.coeffs, raw.xi, labels)
    }
}

impl IrrationalSystem {
    /// Checks shapes and that every offset lies in `[0, 1)`.
    pub fn new(coeffs: Vec<Vec<i64>>, xi: Vec<Rational>) -> Result<Self> {
        Self::with_labels(coeffs, xi, None)
    }

    pub fn with_labels(coeffs: Vec<Vec<i64>>, xi: Vec<Rational>, labels: Option<Vec<String>>) -> Result<Self> {
        if coeffs.len() != xi.len() {
            return Err(Error::Parse(format!(
                "{} coefficient rows but {} offsets",
                coeffs.len(),
                xi.len()
            )));
        }
        if let Some(first) = coeffs.first() {
            if first.is_empty() || coeffs.iter().any(|row| row.len() != first.len()) {
                return Err(Error::Parse("coefficient rows must be non-empty and of equal length".into()));
            }
        }
        for (j, x) in xi.iter().enumerate() {
            if x.is_negative() || *x >= Rational::one() {
                return Err(Error::Parse(format!("offset {j} = {x} is not in [0, 1)")));
            }
        }
        let labels = match labels {
            Some(l) if l.len() != xi.len() => {
                return Err(Error::Parse(format!("{} labels for {} equations", l.len(), xi.len())))
            }
            Some(l) => l,
            None => (1..=xi.len()).map(|j| j.to_string()).collect(),
        };
        Ok(IrrationalSystem { coeffs, xi, labels })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Rank-one system `θ̂_j = p_j θ + ξ_j`.
    pub fn rank_one(p: Vec<i64>, xi: Vec<Rational>) -> Result<Self> {
        Self::new(p.into_iter().map(|c| vec![c]).collect(), xi)
    }

    fn rank_one_labeled(p: Vec<i64>, xi: Vec<Rational>, labels: Vec<String>) -> Self {
        Self::with_labels(p.into_iter().map(|c| vec![c]).collect(), xi, Some(labels))
            .expect("internally built systems are well formed")
    }

    /// Number of equations.
    pub fn k(&self) -> usize {
        self.xi.len()
    }

    /// Number of basis elements (columns of the coefficient matrix).
    pub fn columns(&self) -> usize {
        self.coeffs.first().map_or(0, Vec::len)
    }

    pub fn coeffs(&self) -> &[Vec<i64>] {
        &self.coeffs
    }

    pub fn xi(&self) -> &[Rational] {
        &self.xi
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Coefficients of a single-column system.
    pub fn p(&self) -> Vec<i64> {
        self.coeffs.iter().map(|row| row[0]).collect()
    }

    /// `(p_j, ξ_j)` pairs of a single-column system, in order.
    pub fn equations(&self) -> Vec<(i64, Rational)> {
        self.coeffs.iter().zip(&self.xi).map(|(row, x)| (row[0], x.clone())).collect()
    }

    fn require_rank_one(&self) -> Result<()> {
        if self.k() > 0 && self.columns() != 1 {
            return Err(Error::Precondition(format!(
                "operation needs a single-generator system, got {} columns",
                self.columns()
            )));
        }
        if let Some(j) = self.coeffs.iter().position(|row| row[0] == 0) {
            return Err(Error::ZeroRow(j + 1));
        }
        Ok(())
    }

    /// Every column of the coefficient matrix sums to zero.
    pub fn coefficient_sums_vanish(&self) -> bool {
        (0..self.columns()).all(|l| self.coeffs.iter().map(|row| row[l]).sum::<i64>() == 0)
    }

    /// `{ξ_1 + … + ξ_k}`.
    pub fn offset_sum_fraction(&self) -> Rational {
        frac(&self.xi.iter().fold(Rational::zero(), |acc, x| acc + x))
    }

    /// `{Σ ξ_j} ∈ (0, 1) \ {1/2}`.
    pub fn offset_condition_holds(&self) -> bool {
        let s = self.offset_sum_fraction();
        !s.is_zero() && s != rat(1, 2)
    }

    /// Nonzero coefficients, zero coefficient sum and the offset condition.
    pub fn check_preconditions(&self) -> Result<()> {
        self.require_rank_one()?;
        if !self.coefficient_sums_vanish() {
            return Err(Error::Precondition("coefficients do not sum to zero".into()));
        }
        if !self.offset_condition_holds() {
            return Err(Error::Precondition(format!(
                "fractional offset sum {} is not in (0, 1) \\ {{1/2}}",
                self.offset_sum_fraction()
            )));
        }
        Ok(())
    }
}

/// Result of clearing denominators column-wise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedSystem {
    pub system: IrrationalSystem,
    /// Basis element `l` was divided by `column_scales[l]`.
    pub column_scales: Vec<BigInt>,
    /// Integer part removed from each offset (and from `θ̂_j`).
    pub integer_shifts: Vec<BigInt>,
}

/// Integer representation of rational coefficients: column `l` is scaled by
/// the lcm of its denominators, which rescales the basis element by the
/// inverse; offsets are reduced mod 1.
pub fn normalize_representation(coeffs: &[Vec<Rational>], offsets: &[Rational]) -> Result<NormalizedSystem> {
    let cols = coeffs.first().map_or(0, Vec::len);
    let scales: Vec<BigInt> = (0..cols)
        .map(|l| coeffs.iter().fold(BigInt::one(), |acc, row| acc.lcm(row[l].denom())))
        .collect();
    let mut rows = Vec::with_capacity(coeffs.len());
    for row in coeffs {
        if row.len() != cols {
            return Err(Error::Parse("coefficient rows must be of equal length".into()));
        }
        let ints = row
            .iter()
            .zip(&scales)
            .map(|(c, q)| {
                let v = c * Rational::from_integer(q.clone());
                v.to_integer().to_i64().ok_or_else(|| Error::Precondition("coefficient overflows i64".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(ints);
    }
    let shifts: Vec<BigInt> = offsets.iter().map(|x| x.floor().to_integer()).collect();
    let xi = offsets.iter().map(frac).collect();
    Ok(NormalizedSystem { system: IrrationalSystem::new(rows, xi)?, column_scales: scales, integer_shifts: shifts })
}

/// Rank of the coefficient matrix over the rationals (Bareiss elimination).
pub fn rank(sys: &IrrationalSystem) -> usize {
    let mut a: Vec<Vec<BigInt>> = sys.coeffs.iter().map(|row| row.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let rows = a.len();
    let cols = sys.columns();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// The system obtained from the substitution `θ ↦ θ + η`: offsets become
/// `{ξ_j − p_j η}`.
pub fn eta_action(sys: &IrrationalSystem, eta: &Rational) -> Result<IrrationalSystem> {
    sys.require_rank_one()?;
    let xi = sys.equations().iter().map(|(p, x)| frac(&(x - int(*p) * eta))).collect();
    Ok(IrrationalSystem { coeffs: sys.coeffs.clone(), xi, labels: sys.labels.clone() })
}

/// Partition of the equations by the offsets after an η-action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtaClassification {
    #[serde(with = "rational_serde")]
    pub eta: Rational,
    /// Zero offset and positive coefficient (0-based positions).
    pub k0_plus: Vec<usize>,
    /// Zero offset and negative coefficient.
    pub k0_minus: Vec<usize>,
    /// Nonzero offset.
    pub k1: Vec<usize>,
}

impl EtaClassification {
    /// `|k₀⁺ − k₀⁻|`.
    pub fn absolute_difference(&self) -> u64 {
        (self.k0_plus.len() as i64 - self.k0_minus.len() as i64).unsigned_abs()
    }
}

pub fn classify(sys: &IrrationalSystem, eta: &Rational) -> Result<EtaClassification> {
    let moved = eta_action(sys, eta)?;
    let mut c = EtaClassification { eta: eta.clone(), k0_plus: vec![], k0_minus: vec![], k1: vec![] };
    for (j, (p, x)) in moved.equations().into_iter().enumerate() {
        if !x.is_zero() {
            c.k1.push(j);
        } else if p > 0 {
            c.k0_plus.push(j);
        } else {
            c.k0_minus.push(j);
        }
    }
    Ok(c)
}

/// All `η ∈ [0, 1)` that zero at least one offset: `(ξ_j + t)/p_j mod 1`.
pub fn candidate_etas(sys: &IrrationalSystem) -> Result<BTreeSet<Rational>> {
    sys.require_rank_one()?;
    let mut out = BTreeSet::new();
    for (p, x) in sys.equations() {
        for t in 0..p.abs() {
            out.insert(frac(&((&x + int(t)) / int(p))));
        }
    }
    Ok(out)
}

/// Effective difference number with its smallest maximizing `η ∈ [0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EffectiveDifference {
    pub value: u64,
    #[serde(with = "rational_serde")]
    pub witness: Rational,
}

/// `max_η |k₀⁺(η) − k₀⁻(η)|`, searched over [`candidate_etas`]; every other
/// η leaves all offsets nonzero and contributes 0.
pub fn effective_difference_number(sys: &IrrationalSystem) -> Result<EffectiveDifference> {
    let mut best = EffectiveDifference { value: 0, witness: Rational::zero() };
    for eta in candidate_etas(sys)? {
        let d = classify(sys, &eta)?.absolute_difference();
        if d > best.value {
            best = EffectiveDifference { value: d, witness: eta };
        }
    }
    Ok(best)
}

/// Replaces equation `j` (with zero offset) by the `|p_j|` unit equations
/// `sgn(p_j)θ + l/|p_j|`, `0 ≤ l < |p_j|`.
pub fn expand_equation(sys: &IrrationalSystem, j: usize) -> Result<IrrationalSystem> {
    sys.require_rank_one()?;
    if j >= sys.k() {
        return Err(Error::Precondition(format!("no equation at position {j}")));
    }
    if !sys.xi[j].is_zero() {
        return Err(Error::Precondition(format!(
            "equation {} has offset {}; expansion needs offset 0",
            sys.labels[j], sys.xi[j]
        )));
    }
    let p = sys.coeffs[j][0];
    if p.abs() == 1 {
        return Ok(sys.clone());
    }
    let mut eqs = sys.equations();
    let mut labels = sys.labels.clone();
    let n = p.abs();
    let parts: Vec<(i64, Rational)> = (0..n).map(|l| (p.signum(), rat(l, n))).collect();
    let part_labels: Vec<String> = (1..=n).map(|l| format!("{}.{l}", sys.labels[j])).collect();
    eqs.splice(j..=j, parts);
    labels.splice(j..=j, part_labels);
    let (p, xi) = eqs.into_iter().unzip();
    Ok(IrrationalSystem::rank_one_labeled(p, xi, labels))
}

/// Outcome of removing cancelling pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cutoff {
    pub system: IrrationalSystem,
    /// Removed pairs as 0-based positions in the input system.
    pub removed: Vec<(usize, usize)>,
}

/// Greedily removes disjoint pairs with `p_{j'} p_{j''} = −1` and
/// `{ξ_{j'} + ξ_{j''}} = 0`, scanning in index order.
pub fn cutoff_pairs(sys: &IrrationalSystem) -> Result<Cutoff> {
    sys.require_rank_one()?;
    let eqs = sys.equations();
    let mut gone = vec![false; eqs.len()];
    let mut removed = Vec::new();
    for a in 0..eqs.len() {
        if gone[a] {
            continue;
        }
        let partner = (a + 1..eqs.len())
            .find(|&b| !gone[b] && eqs[a].0 * eqs[b].0 == -1 && frac(&(&eqs[a].1 + &eqs[b].1)).is_zero());
        if let Some(b) = partner {
            gone[a] = true;
            gone[b] = true;
            removed.push((a, b));
        }
    }
    let mut p = Vec::new();
    let mut xi = Vec::new();
    let mut labels = Vec::new();
    for (j, (c, x)) in eqs.into_iter().enumerate() {
        if !gone[j] {
            p.push(c);
            xi.push(x);
            labels.push(sys.labels[j].clone());
        }
    }
    Ok(Cutoff { system: IrrationalSystem::rank_one_labeled(p, xi, labels), removed })
}

/// One transformation of the reduction pipeline and the system it produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    #[serde(flatten)]
    pub action: ReductionAction,
    pub system: IrrationalSystem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum ReductionAction {
    EtaAction {
        #[serde(with = "rational_serde")]
        eta: Rational,
    },
    Expand {
        label: String,
    },
    Cutoff {
        pairs: Vec<(String, String)>,
    },
}

/// Full reduction of a rank-one system to unit coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub steps: Vec<ReductionStep>,
    /// Unit-coefficient system without cancelling pairs.
    pub result: IrrationalSystem,
    /// η applied to `result` to produce a nonzero difference.
    #[serde(with = "rational_serde")]
    pub final_eta: Rational,
    /// `result` after `final_eta`.
    pub witness_system: IrrationalSystem,
    /// Composition of all η-actions, as an η for the input system.
    #[serde(with = "rational_serde")]
    pub total_eta: Rational,
    /// Effective difference number, shared by input and result.
    pub effective_difference: u64,
}

/// Zeroes the offsets one equation at a time from the last to the first
/// (η-action by `ξ_j / p_j`), expands each non-unit equation, then cuts off
/// cancelling pairs. Equations with `|p_j| = 1` need no expansion and are
/// left for the cut-off.
pub fn reduce(sys: &IrrationalSystem) -> Result<Reduction> {
    sys.check_preconditions()?;
    let mut steps = Vec::new();
    let mut current = sys.clone();
    let mut total_eta = Rational::zero();
    for j in (0..sys.k()).rev() {
        let p = current.coeffs[j][0];
        if p.abs() < 2 {
            continue;
        }
        let eta = &current.xi[j] / int(p);
        if !eta.is_zero() {
            current = eta_action(&current, &eta)?;
            total_eta += &eta;
            steps.push(ReductionStep { action: ReductionAction::EtaAction { eta }, system: current.clone() });
        }
        let label = current.labels[j].clone();
        current = expand_equation(&current, j)?;
        steps.push(ReductionStep { action: ReductionAction::Expand { label }, system: current.clone() });
    }
    let cut = cutoff_pairs(&current)?;
    if !cut.removed.is_empty() {
        let pairs = cut
            .removed
            .iter()
            .map(|&(a, b)| (current.labels[a].clone(), current.labels[b].clone()))
            .collect();
        steps.push(ReductionStep { action: ReductionAction::Cutoff { pairs }, system: cut.system.clone() });
    }
    let result = cut.system;
    if result.k() == 0 {
        return Err(Error::Precondition("reduction removed every equation".into()));
    }
    debug_assert!(result.p().iter().all(|p| p.abs() == 1));
    debug_assert!(result.coefficient_sums_vanish());
    debug_assert!(result.offset_condition_holds());

    // after the cut-off no pair cancels, so zeroing one positive equation
    // leaves every negative one nonzero
    let at_zero = classify(&result, &Rational::zero())?;
    let final_eta = if at_zero.absolute_difference() > 0 {
        Rational::zero()
    } else {
        let first_positive = result.p().iter().position(|&p| p > 0).expect("coefficients sum to zero");
        result.xi[first_positive].clone()
    };
    let witness_system = eta_action(&result, &final_eta)?;
    total_eta = frac(&(total_eta + &final_eta));

    let before = effective_difference_number(sys)?.value;
    let after = effective_difference_number(&result)?.value;
    assert_eq!(before, after, "reduction changed the effective difference number");
    assert!(classify(sys, &total_eta)?.absolute_difference() >= 1);

    Ok(Reduction { steps, result, final_eta, witness_system, total_eta, effective_difference: before })
}

/// Change of basis making the first column nonzero everywhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankCollapse {
    /// `s_2, …, s_r`.
    pub shifts: Vec<i64>,
    /// `p̃_j = p_j1 + Σ_l s_l p_jl`.
    pub collapsed: Vec<i64>,
    /// Rank-one system `p̃_j θ̃ + ξ_j`.
    pub system: IrrationalSystem,
}

/// Integer vectors of `L∞` radius exactly `radius`, in lexicographic order of
/// the value sequence `0, 1, −1, 2, −2, …`.
fn shells(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    let order: Vec<i64> = std::iter::once(0).chain((1..=radius).flat_map(|v| [v, -v])).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let v: Vec<i64> = idx.iter().map(|&i| order[i]).collect();
        if v.iter().map(|x| x.abs()).max().unwrap_or(0) == radius {
            out.push(v);
        }
        let mut pos = dim;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < order.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Finds `s_2, …, s_r` with every `p_j1 + Σ s_l p_jl ≠ 0`: a direction `s̄`
/// off all hyperplanes `Σ_l p_jl x_l = 0` of rows with `p_j1 = 0` (smallest
/// `L∞` radius first), scaled by the smallest `N̄ ≥ 1` that clears the
/// remaining rows.
pub fn collapse_rank(sys: &IrrationalSystem) -> Result<RankCollapse> {
    if sys.k() == 0 {
        return Err(Error::Precondition("empty system".into()));
    }
    if !sys.coefficient_sums_vanish() {
        return Err(Error::Precondition("column sums of the coefficient matrix must vanish".into()));
    }
    if let Some(j) = sys.coeffs.iter().position(|row| row.iter().all(|&v| v == 0)) {
        return Err(Error::ZeroRow(j + 1));
    }
    let r = sys.columns();
    let rest = |row: &[i64], s: &[i64]| -> i64 { row[1..].iter().zip(s).map(|(p, s)| p * s).sum() };
    let mut shifts = vec![0i64; r - 1];
    let zero_rows: Vec<&Vec<i64>> = sys.coeffs.iter().filter(|row| row[0] == 0).collect();
    if !zero_rows.is_empty() {
        let mut radius = 1;
        let direction = loop {
            if let Some(v) = shells(r - 1, radius).into_iter().find(|v| zero_rows.iter().all(|row| rest(row, v) != 0)) {
                break v;
            }
            radius += 1;
        };
        let mut scale = 1i64;
        loop {
            let s: Vec<i64> = direction.iter().map(|v| v * scale).collect();
            if sys.coeffs.iter().all(|row| row[0] + rest(row, &s) != 0) {
                shifts = s;
                break;
            }
            scale += 1;
        }
    }
    let collapsed: Vec<i64> = sys.coeffs.iter().map(|row| row[0] + rest(row, &shifts)).collect();
    let system = IrrationalSystem::rank_one_labeled(collapsed.clone(), sys.xi.clone(), sys.labels.clone());
    Ok(RankCollapse { shifts, collapsed, system })
}
