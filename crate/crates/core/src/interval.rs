//! Interval form of the precise iteration formula for a single bumpy
//! non-contractible geodesic, with its rank-one angle data.
//!
//! For `m = 2(n+1)l + 2L + 1` the index is `2nl + 2[Q_L] − 2i` exactly when
//! `Σ_{j≠j₀} {m θ̂_j}` lies in the `i`-th interval cut out of `(0, k−1)` by
//! the points `0, {Q_L}, 1+{Q_L}, …, k−2+{Q_L}, k−1`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rat, rational_serde, ExactReal, Rational};
use crate::systems::IrrationalSystem;

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// `Q_L = k/2 + (2L+1)n / (2(n+1))`.
pub fn q_value(n: u32, k: usize, shift: i64) -> Rational {
    rat(k as i64, 2) + rat((2 * shift + 1) * n as i64, 2 * (n as i64 + 1))
}

/// Partition of `(0, k−1)` attached to `(n, k, L)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalPattern {
    pub n: u32,
    pub k: usize,
    pub shift: i64,
    #[serde(with = "rational_serde")]
    pub q: Rational,
    /// `0, {Q_L}, 1+{Q_L}, …, k−2+{Q_L}, k−1`.
    #[serde(with = "rational_serde::vec")]
    pub dividing_points: Vec<Rational>,
}

impl IntervalPattern {
    pub fn new(n: u32, k: usize, shift: i64) -> Result<Self> {
        if n == 0 || k < 2 {
            return Err(Error::Precondition(format!("interval pattern needs n ≥ 1 and k ≥ 2, got n = {n}, k = {k}")));
        }
        let q = q_value(n, k, shift);
        let f = frac(&q);
        let mut pts = vec![Rational::zero()];
        pts.extend((0..k as i64 - 1).map(|i| int(i) + &f));
        pts.push(int(k as i64 - 1));
        Ok(IntervalPattern { n, k, shift, q, dividing_points: pts })
    }

    pub fn q_floor(&self) -> BigInt {
        self.q.floor().to_integer()
    }

    pub fn q_frac(&self) -> Rational {
        frac(&self.q)
    }

    /// `I_i = (point_i, point_{i+1})`. `I_0` is empty when `{Q_L} = 0`,
    /// which happens for even `n` and suitable `L`.
    pub fn interval(&self, i: usize) -> (Rational, Rational) {
        (self.dividing_points[i].clone(), self.dividing_points[i + 1].clone())
    }

    /// Index `i` with `x ∈ I_i`; dividing points and values outside
    /// `(0, k−1)` are boundary hits.
    pub fn locate(&self, x: &ExactReal) -> Result<usize> {
        let hit = || Error::BoundaryHit { value: x.to_string() };
        if x.cmp_rational(&self.dividing_points[0]) != Ordering::Greater {
            return Err(hit());
        }
        for i in 0..self.k {
            match x.cmp_rational(&self.dividing_points[i + 1]) {
                Ordering::Less => return Ok(i),
                Ordering::Equal => return Err(hit()),
                Ordering::Greater => {}
            }
        }
        Err(hit())
    }

    /// Interval containing the whole open range `(lo, hi)`, or the point
    /// `lo` when `lo == hi`.
    pub fn locate_range(&self, lo: &ExactReal, hi: &ExactReal) -> Option<usize> {
        match lo.compare(hi).ok()? {
            Ordering::Equal => self.locate(lo).ok(),
            Ordering::Greater => None,
            Ordering::Less => (0..self.k).find(|&i| {
                let (a, b) = self.interval(i);
                lo.cmp_rational(&a) != Ordering::Less && hi.cmp_rational(&b) != Ordering::Greater
            }),
        }
    }
}

/// Which real projective space the data describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// `RP^{2n+1}`; the formula holds for every iterate.
    Odd,
    /// `RP^{2n'}` written with `n = 2n' − 1` and `k = 2r`; odd iterates only.
    Even,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRank1Model {
    n: u32,
    #[serde(default = "default_parity")]
    parity: Parity,
    theta: ExactReal,
    p: Vec<i64>,
    #[serde(with = "rational_serde::vec")]
    xi: Vec<Rational>,
}

fn default_parity() -> Parity {
    Parity::Odd
}

/// `θ̂_j = p_j θ + ξ_j` with `Σ p_j = 0` and `Σ θ̂_j = (k + n/(n+1))/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRank1Model")]
pub struct Rank1Model {
    /// Parameter of the iteration formula: `n` for `RP^{2n+1}`, `2n'−1` for
    /// `RP^{2n'}`.
    pub n: u32,
    pub parity: Parity,
    pub theta: ExactReal,
    pub p: Vec<i64>,
    /// Offsets, not reduced mod 1.
    #[serde(with = "rational_serde::vec")]
    pub xi: Vec<Rational>,
}

impl TryFrom<RawRank1Model> for Rank1Model {
    type Error = Error;

    fn try_from(raw: RawRank1Model) -> Result<Self> {
        Rank1Model::new(raw.n, raw.parity, raw.theta, raw.p, raw.xi)
    }
}

impl Rank1Model {
    pub fn new(n: u32, parity: Parity, theta: ExactReal, p: Vec<i64>, xi: Vec<Rational>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        let k = p.len();
        if n == 0 {
            return bad("n must be positive".into());
        }
        if theta.is_rational() {
            return bad(format!("generator {theta} is rational"));
        }
        if xi.len() != k {
            return bad(format!("{k} coefficients but {} offsets", xi.len()));
        }
        if k < 2 || k > 2 * n as usize {
            return bad(format!("need 2 ≤ k ≤ 2n, got k = {k}, n = {n}"));
        }
        if parity == Parity::Even && (n.is_multiple_of(2) || k % 2 == 1) {
            return bad(format!("even-dimensional data needs odd n and even k, got n = {n}, k = {k}"));
        }
        if let Some(j) = p.iter().position(|&c| c == 0) {
            return bad(format!("coefficient {} is zero, so that angle is rational", j + 1));
        }
        if p.iter().sum::<i64>() != 0 {
            return bad("coefficients do not sum to zero".into());
        }
        let model = Rank1Model { n, parity, theta, p, xi };
        let sum: Rational = model.xi.iter().sum();
        let target = model.mean_condition_target();
        if sum != target {
            return bad(format!("offsets sum to {sum}, the mean condition needs {target}"));
        }
        Ok(model)
    }

    /// Schema problems are parse errors; violated constraints are model
    /// errors.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawRank1Model = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(raw.n, raw.parity, raw.theta, raw.p, raw.xi)
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    /// Dimension of the projective space.
    pub fn manifold_dimension(&self) -> u32 {
        match self.parity {
            Parity::Odd => 2 * self.n + 1,
            Parity::Even => self.n + 1,
        }
    }

    /// `(k + n/(n+1)) / 2`.
    pub fn mean_condition_target(&self) -> Rational {
        (int(self.k() as i64) + rat(self.n as i64, self.n as i64 + 1)) / int(2)
    }

    /// `n/(n+1)`.
    pub fn mean_index(&self) -> Rational {
        rat(self.n as i64, self.n as i64 + 1)
    }

    pub fn theta_hats(&self) -> Vec<ExactReal> {
        self.p.iter().zip(&self.xi).map(|(&p, x)| self.theta.scale(p).add_rational(x)).collect()
    }

    /// The underlying rank-one system with offsets reduced mod 1.
    pub fn system(&self) -> IrrationalSystem {
        IrrationalSystem::rank_one(self.p.clone(), self.xi.iter().map(frac).collect())
            .expect("validated model gives a well-formed system")
    }

    fn check_iterate(&self, m: i64) -> Result<()> {
        if m < 1 {
            return Err(Error::Precondition(format!("iterate {m} is not positive")));
        }
        if self.parity == Parity::Even && m % 2 == 0 {
            return Err(Error::Precondition(format!("even-dimensional data covers odd iterates only, got {m}")));
        }
        Ok(())
    }

    /// `ind(c^m) = m·n/(n+1) + k − 2 Σ_j {m θ̂_j}`.
    pub fn direct_index(&self, m: i64) -> Result<i64> {
        self.check_iterate(m)?;
        let mut total = ExactReal::from(int(m) * self.mean_index() + int(self.k() as i64));
        for t in self.theta_hats() {
            total = total.checked_sub(&t.scale(m).frac().scale(2))?;
        }
        let value = total.to_rational().filter(|v| v.is_integer()).expect("mean condition makes the index integral");
        Ok(value.to_integer().to_i64().expect("index fits in i64"))
    }
}

/// One evaluation of the interval route.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalIndex {
    pub m: i64,
    pub l: i64,
    pub shift: i64,
    /// Position of the omitted angle.
    pub excluded: usize,
    pub interval: usize,
    pub index: i64,
}

/// `Σ_{j ≠ excluded} {m θ̂_j}`.
pub fn partial_fraction_sum(model: &Rank1Model, m: i64, excluded: usize) -> Result<ExactReal> {
    let mut s = ExactReal::zero();
    for (j, t) in model.theta_hats().iter().enumerate() {
        if j != excluded {
            s = s.checked_add(&t.scale(m).frac())?;
        }
    }
    Ok(s)
}

/// Index of `c^m`, `m = 2(n+1)l + 2L + 1`, read off from the interval that
/// contains the partial sum. Any angle may be the omitted one.
pub fn index_via_interval(model: &Rank1Model, l: i64, shift: i64, excluded: usize) -> Result<IntervalIndex> {
    let n = model.n as i64;
    let m = 2 * (n + 1) * l + 2 * shift + 1;
    model.check_iterate(m)?;
    if excluded >= model.k() {
        return Err(Error::Precondition(format!("no angle at position {excluded}")));
    }
    let pattern = IntervalPattern::new(model.n, model.k(), shift)?;
    let s = partial_fraction_sum(model, m, excluded)?;
    let interval = pattern.locate(&s)?;
    let q_floor = pattern.q_floor().to_i64().expect("small");
    let index = 2 * n * l + 2 * q_floor - 2 * interval as i64;
    Ok(IntervalIndex { m, l, shift, excluded, interval, index })
}

/// Truth of "`|m − 2(n+1)l| > 4(n+1)` implies `|index − 2nl| > 2n`".
pub fn bound_implication(n: u32, l: i64, m: i64, index: i64) -> bool {
    let n = n as i64;
    (m - 2 * (n + 1) * l).abs() <= 4 * (n + 1) || (index - 2 * n * l).abs() > 2 * n
}

/// [`bound_implication`] at the model's own index of `c^m`.
pub fn bound_check(model: &Rank1Model, l: i64, m: i64) -> Result<bool> {
    Ok(bound_implication(model.n, l, m, model.direct_index(m)?))
}

/// `f_L(x) = Σ_{j≠j₀} {{p_j x + ξ_j} + 2L θ̂_j}` for a model whose generator
/// has been moved by `η` (offsets `{ξ_j − p_j η}`).
#[derive(Clone, Debug, PartialEq)]
pub struct AuxFunction {
    p: Vec<i64>,
    xi: Vec<Rational>,
    theta_hats: Vec<ExactReal>,
    excluded: usize,
}

impl AuxFunction {
    pub fn new(model: &Rank1Model, eta: &Rational, excluded: usize) -> Result<Self> {
        if excluded >= model.k() {
            return Err(Error::Precondition(format!("no angle at position {excluded}")));
        }
        let xi = model.p.iter().zip(&model.xi).map(|(&p, x)| frac(&(x - int(p) * eta))).collect();
        Ok(AuxFunction { p: model.p.clone(), xi, theta_hats: model.theta_hats(), excluded })
    }

    pub fn eval(&self, shift: i64, x: &ExactReal) -> Result<ExactReal> {
        let mut total = ExactReal::zero();
        for j in self.terms() {
            let inner = x.scale(self.p[j]).add_rational(&self.xi[j]).frac();
            total = total.checked_add(&inner.checked_add(&self.theta_hats[j].scale(2 * shift))?.frac())?;
        }
        Ok(total)
    }

    fn terms(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.p.len()).filter(move |&j| j != self.excluded)
    }

    /// If every brace is continuous on the open window `(u, v)`, the image
    /// of the window as `(lo, hi)` (equal ends when `f_L` is flat there).
    pub fn window_image(&self, shift: i64, u: &Rational, v: &Rational) -> Result<Option<(ExactReal, ExactReal)>> {
        let mut at_u = ExactReal::zero();
        let mut at_v = ExactReal::zero();
        for j in self.terms() {
            let pu = int(self.p[j]) * u + &self.xi[j];
            let pv = int(self.p[j]) * v + &self.xi[j];
            let (lo, hi) = if pu <= pv { (&pu, &pv) } else { (&pv, &pu) };
            let c = lo.floor();
            // no integer strictly inside (lo, hi)
            if &c + int(1) < *hi {
                return Ok(None);
            }
            let lift = self.theta_hats[j].scale(2 * shift);
            let eu = lift.add_rational(&(&pu - &c));
            let ev = lift.add_rational(&(&pv - &c));
            let (lo, hi) = if eu.compare(&ev)? != Ordering::Greater { (&eu, &ev) } else { (&ev, &eu) };
            let c2 = lo.floor();
            if hi.add_int(&-&c2).cmp_rational(&int(1)) == Ordering::Greater {
                return Ok(None);
            }
            at_u = at_u.checked_add(&eu.add_int(&-&c2))?;
            at_v = at_v.checked_add(&ev.add_int(&-&c2))?;
        }
        Ok(Some(if at_u.compare(&at_v)? != Ordering::Greater { (at_u, at_v) } else { (at_v, at_u) }))
    }
}

/// `f_L(x)` with `η = 0`.
pub fn aux_function_f(model: &Rank1Model, shift: i64, x: &ExactReal, excluded: usize) -> Result<ExactReal> {
    AuxFunction::new(model, &Rational::zero(), excluded)?.eval(shift, x)
}

/// `g_L(x) = Σ_{j≠j₀} {Σ_l p_jl x_l + ξ_j + 2L θ̂_j}` for a system of any
/// rank with basis `thetas`. For `L ≠ 0` the angles must share a radicand.
pub fn aux_function_g(
    sys: &IrrationalSystem,
    thetas: &[ExactReal],
    shift: i64,
    x: &[ExactReal],
    excluded: usize,
) -> Result<ExactReal> {
    if thetas.len() != sys.columns() || x.len() != sys.columns() {
        return Err(Error::Precondition(format!(
            "system has {} columns, got {} generators and a {}-point",
            sys.columns(),
            thetas.len(),
            x.len()
        )));
    }
    let mut total = ExactReal::zero();
    for (j, (row, xi)) in sys.coeffs().iter().zip(sys.xi()).enumerate() {
        if j == excluded {
            continue;
        }
        let mut term = ExactReal::from(xi.clone());
        for (l, &c) in row.iter().enumerate() {
            term = term.checked_add(&x[l].scale(c))?;
            if shift != 0 {
                term = term.checked_add(&thetas[l].scale(2 * shift * c))?;
            }
        }
        if shift != 0 {
            term = term.add_rational(&(xi * int(2 * shift)));
        }
        total = total.checked_add(&term.frac())?;
    }
    Ok(total)
}

/// Points near `(0, …, 0)` and `(1, 0, …, 0)` whose later coordinates are
/// much smaller than the distance of the first one to its limit:
/// `(a, a², …, a²)` and `(1 − a, a², …, a²)`.
pub fn anisotropic_points(a: &Rational, r: usize) -> (Vec<Rational>, Vec<Rational>) {
    let small = a * a;
    let mut near_zero = vec![small.clone(); r];
    let mut near_one = vec![small; r];
    near_zero[0] = a.clone();
    near_one[0] = int(1) - a;
    (near_zero, near_one)
}

/// Outcome of a fractional-orbit search.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum KroneckerOutcome {
    Found { m: u64, point: Vec<ExactReal> },
    NotFound { scanned: u64 },
}

/// Smallest `1 ≤ m ≤ budget` with `{m θ_i} ∈ (lo_i, hi_i)` for every `i`.
/// Fractional parts are updated incrementally and compared exactly.
pub fn kronecker_scan(thetas: &[ExactReal], boxes: &[(Rational, Rational)], budget: u64) -> Result<KroneckerOutcome> {
    if thetas.len() != boxes.len() {
        return Err(Error::Precondition(format!("{} generators but {} box sides", thetas.len(), boxes.len())));
    }
    if boxes.iter().any(|(lo, hi)| lo >= hi) {
        return Ok(KroneckerOutcome::NotFound { scanned: 0 });
    }
    let steps: Vec<ExactReal> = thetas.iter().map(ExactReal::frac).collect();
    let mut point = vec![ExactReal::zero(); thetas.len()];
    for m in 1..=budget {
        let mut inside = true;
        for ((x, step), (lo, hi)) in point.iter_mut().zip(&steps).zip(boxes) {
            *x = x.checked_add(step)?;
            if x.cmp_rational(&int(1)) != Ordering::Less {
                *x = x.add_int(&BigInt::from(-1));
            }
            inside &= x.cmp_rational(lo) == Ordering::Greater && x.cmp_rational(hi) == Ordering::Less;
        }
        if inside {
            return Ok(KroneckerOutcome::Found { m, point });
        }
    }
    Ok(KroneckerOutcome::NotFound { scanned: budget })
}
