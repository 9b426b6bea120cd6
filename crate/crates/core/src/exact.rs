//! Exact arithmetic over the rationals and a single quadratic field Q(√d).
//!
//! Every value is stored as `(a + b·√d) / c` with integers `a, b`, a positive
//! denominator `c`, `gcd(a, b, c) = 1` and a square-free radicand `d`. Pure
//! rationals carry `b = 0, d = 0`. Because the representation is canonical,
//! structural equality is numeric equality.
//!
//! Sign decisions (and therefore floor, ceiling and comparison) are exact: the
//! sign of `a + b√d` is read off from the signs of `a` and `b`, and when they
//! disagree from the comparison of `a²` with `b²d`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for the rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `num/den` as an [`ExactReal`].
pub fn real(num: i64, den: i64) -> ExactReal {
    ExactReal::from(rat(num, den))
}

/// `a/b + c/e·√d`, canonicalized.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactReal {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: u64,
}

/// Writes `d = s²·f` with `f` square-free and returns `(s, f)`.
fn split_square(mut d: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut f = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= d {
        let mut e = 0;
        while d.is_multiple_of(p) {
            d /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            f *= p;
        }
        p += 1;
    }
    (s, f * d)
}

/// Sign of `a + b√d` for a square-free `d` (or `b = 0`).
fn surd_sign(a: &BigInt, b: &BigInt, d: u64) -> Ordering {
    let sa = a.sign();
    let sb = b.sign();
    if sb == Sign::NoSign || d == 0 {
        return a.cmp(&BigInt::zero());
    }
    if sa == Sign::NoSign {
        return b.cmp(&BigInt::zero());
    }
    if sa == sb {
        return a.cmp(&BigInt::zero());
    }
    let a2 = a * a;
    let b2d = b * b * BigInt::from(d);
    match sa {
        // a > 0 > b: positive iff a² > b²d
        Sign::Plus => a2.cmp(&b2d),
        // a < 0 < b: positive iff b²d > a²
        _ => b2d.cmp(&a2),
    }
}

/// ⌊b·√d⌋ for square-free `d ≥ 2` (exact integer square root).
fn floor_coeff_sqrt(b: &BigInt, d: u64) -> BigInt {
    let n = (b * b * BigInt::from(d)).magnitude().clone();
    let s = BigInt::from(n.sqrt());
    if !b.is_negative() {
        s
    } else if &s * &s == BigInt::from(n) {
        -s
    } else {
        -s - 1
    }
}

impl ExactReal {
    fn from_parts(mut a: BigInt, mut b: BigInt, mut c: BigInt, mut d: u64) -> Self {
        debug_assert!(!c.is_zero());
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        if b.is_zero() || d == 0 {
            b = BigInt::zero();
            d = 0;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        ExactReal { a, b, c, d }
    }

    /// `rational + coeff·√radicand`. Square factors are pulled out of the
    /// radicand; radicands 0 and perfect squares yield a rational.
    pub fn new(rational: Rational, coeff: Rational, radicand: u64) -> Self {
        let (s, f) = if radicand == 0 { (0, 1) } else { split_square(radicand) };
        let coeff = coeff * Rational::from_integer(BigInt::from(s));
        if f == 1 {
            return ExactReal::from(rational + coeff);
        }
        let c = rational.denom().lcm(coeff.denom());
        let a = rational.numer() * (&c / rational.denom());
        let b = coeff.numer() * (&c / coeff.denom());
        Self::from_parts(a, b, c, f)
    }

    /// `√radicand`.
    pub fn sqrt(radicand: u64) -> Self {
        Self::new(Rational::zero(), Rational::one(), radicand)
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_parts(BigInt::from(n), BigInt::zero(), BigInt::one(), 0)
    }

    /// Square-free radicand, `0` for rationals.
    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn rational_part(&self) -> Rational {
        Rational::new(self.a.clone(), self.c.clone())
    }

    pub fn irrational_coeff(&self) -> Rational {
        Rational::new(self.b.clone(), self.c.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.d == 0
    }

    pub fn is_zero(&self) -> bool {
        self.d == 0 && self.a.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.d == 0 && self.c.is_one()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.rational_part())
    }

    /// Floating-point approximation, for reports only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let c = self.c.to_f64().unwrap_or(f64::NAN);
        (a + b * (self.d as f64).sqrt()) / c
    }

    fn common_radicand(&self, other: &Self) -> Result<u64> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(Error::MixedRadicands { left: x, right: y }),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        Ok(Self::from_parts(
            &self.a * &other.c + &other.a * &self.c,
            &self.b * &other.c + &other.b * &self.c,
            &self.c * &other.c,
            d,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.common_radicand(other)?;
        let dd = BigInt::from(d);
        Ok(Self::from_parts(
            &self.a * &other.a + &self.b * &other.b * dd,
            &self.a * &other.b + &self.b * &other.a,
            &self.c * &other.c,
            d,
        ))
    }

    /// Multiplicative inverse via the conjugate.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // c / (a + b√d) = c(a - b√d) / (a² - b²d)
        let norm = &self.a * &self.a - &self.b * &self.b * BigInt::from(self.d);
        Ok(Self::from_parts(
            &self.c * &self.a,
            -(&self.c * &self.b),
            norm,
            self.d,
        ))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.recip()?)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::from_parts(&self.a * k, &self.b * k, self.c.clone(), self.d)
    }

    pub fn scale(&self, k: i64) -> Self {
        self.mul_int(&BigInt::from(k))
    }

    pub fn add_rational(&self, q: &Rational) -> Self {
        Self::from_parts(
            &self.a * q.denom() + q.numer() * &self.c,
            &self.b * q.denom(),
            &self.c * q.denom(),
            self.d,
        )
    }

    pub fn add_int(&self, k: &BigInt) -> Self {
        Self::from_parts(&self.a + k * &self.c, self.b.clone(), self.c.clone(), self.d)
    }

    pub fn signum(&self) -> Ordering {
        surd_sign(&self.a, &self.b, self.d)
    }

    /// Exact total order on a common field; mixed radicands are an error.
    pub fn compare(&self, other: &Self) -> Result<Ordering> {
        Ok(self.checked_sub(other)?.signum())
    }

    /// Comparison with a rational never fails.
    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        self.add_rational(&-q).signum()
    }

    /// `[x] = max{k ∈ ℤ | k ≤ x}`.
    pub fn floor(&self) -> BigInt {
        if self.d == 0 {
            return self.a.div_floor(&self.c);
        }
        // a is an integer, so ⌊(a + y)/c⌋ = ⌊(a + ⌊y⌋)/c⌋.
        (&self.a + floor_coeff_sqrt(&self.b, self.d)).div_floor(&self.c)
    }

    /// `E(x) = min{k ∈ ℤ | k ≥ x}`.
    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// `φ(x) = E(x) − [x]`: 0 on integers, 1 elsewhere.
    pub fn phi(&self) -> i64 {
        if self.is_integer() {
            0
        } else {
            1
        }
    }

    /// `{x} = x − [x] ∈ [0, 1)`.
    pub fn frac(&self) -> Self {
        self.add_int(&-self.floor())
    }

    fn iterate_shift(&self, m: u64) -> Self {
        if m % 2 == 1 {
            self.add_rational(&rat(-1, 2))
        } else {
            self.clone()
        }
    }

    /// `E_m(x) = E(x − (1 − (−1)^m)/4)`.
    pub fn ceil_shifted(&self, m: u64) -> BigInt {
        self.iterate_shift(m).ceil()
    }

    /// `φ_m(x) = φ(x − (1 − (−1)^m)/4)`.
    pub fn phi_shifted(&self, m: u64) -> i64 {
        self.iterate_shift(m).phi()
    }
}

/// Truth of `E(2a) − E(a) = E(a − 1/2)` and `φ(2a) − φ(a) = φ(a − 1/2) − 1`.
pub fn half_identities_check(a: &ExactReal) -> (bool, bool) {
    let double = a.scale(2);
    let shifted = a.add_rational(&rat(-1, 2));
    let ceil_ok = double.ceil() - a.ceil() == shifted.ceil();
    let phi_ok = double.phi() - a.phi() == shifted.phi() - 1;
    (ceil_ok, phi_ok)
}

impl From<Rational> for ExactReal {
    fn from(q: Rational) -> Self {
        let (n, d) = q.into();
        Self::from_parts(n, BigInt::zero(), d, 0)
    }
}

impl From<i64> for ExactReal {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for ExactReal {
    fn from(n: BigInt) -> Self {
        Self::from_parts(n, BigInt::zero(), BigInt::one(), 0)
    }
}

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal {
            a: -&self.a,
            b: -&self.b,
            c: self.c.clone(),
            d: self.d,
        }
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        -&self
    }
}

// Operator forms panic on mixed radicands; use the `checked_*` methods when
// the operands come from independent inputs.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&ExactReal> for &ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &ExactReal) -> ExactReal {
                self.$checked(rhs).expect("mixed radicands in ExactReal arithmetic")
            }
        }
        impl $tr<ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: ExactReal) -> ExactReal {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &ExactReal) -> ExactReal {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl PartialOrd for ExactReal {
    /// `None` when the operands live in different quadratic fields.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.compare(other).ok()
    }
}

fn write_coeff_sqrt(f: &mut fmt::Formatter<'_>, coeff: &Rational, d: u64) -> fmt::Result {
    if coeff.is_one() {
        write!(f, "sqrt({d})")
    } else if (-coeff).is_one() {
        write!(f, "-sqrt({d})")
    } else {
        write!(f, "{coeff}*sqrt({d})")
    }
}

impl fmt::Display for ExactReal {
    /// Canonical text: `a/b`, `c/e*sqrt(d)` or `a/b + c/e*sqrt(d)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rational_part();
        if self.d == 0 {
            return write!(f, "{r}");
        }
        let coeff = self.irrational_coeff();
        if r.is_zero() {
            return write_coeff_sqrt(f, &coeff, self.d);
        }
        if coeff.is_negative() {
            write!(f, "{r} - ")?;
            write_coeff_sqrt(f, &-coeff, self.d)
        } else {
            write!(f, "{r} + ")?;
            write_coeff_sqrt(f, &coeff, self.d)
        }
    }
}

/// Parses `p`, `p/q` or a finite decimal such as `-0.43`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let digits = format!("{int_digits}{frac}");
        let mut n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n, d));
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

fn parse_term(term: &str, original: &str) -> Result<ExactReal> {
    let Some(pos) = term.find("sqrt(") else {
        return parse_rational(term).map(ExactReal::from);
    };
    let bad = || Error::Parse(format!("malformed term {term:?} in {original:?}"));
    let inner = term[pos + 5..].strip_suffix(')').ok_or_else(bad)?;
    let radicand: u64 = inner.trim().parse().map_err(|_| bad())?;
    let prefix = term[..pos].trim();
    let coeff = match prefix {
        "" | "+" => Rational::one(),
        "-" => -Rational::one(),
        p => parse_rational(p.strip_suffix('*').ok_or_else(bad)?)?,
    };
    Ok(ExactReal::new(Rational::zero(), coeff, radicand))
}

impl FromStr for ExactReal {
    type Err = Error;

    /// Accepts sums of rational and `c*sqrt(d)` terms, e.g. `-1 + sqrt(2)`,
    /// `3/4 - 1/2*sqrt(5)` or `0.25`.
    fn from_str(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let mut depth = 0;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if depth == 0 && i > start && !s[..i].ends_with(['*', '/']) => {
                    terms.push(&s[start..i]);
                    start = i;
                }
                _ => {}
            }
        }
        terms.push(&s[start..]);
        let mut acc = ExactReal::zero();
        for term in terms {
            let term = term.strip_prefix('+').unwrap_or(term);
            acc = acc.checked_add(&parse_term(term, text)?)?;
        }
        Ok(acc)
    }
}

impl serde::Serialize for ExactReal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for ExactReal {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapters for [`Rational`] as `"a/b"` strings.
pub mod rational_serde {
    use super::{parse_rational, Rational};

    pub fn serialize<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(q)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = <String as serde::Deserialize>::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::super::{parse_rational, Rational};
        use serde::ser::SerializeSeq;

        pub fn serialize<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&q.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let texts = <Vec<String> as serde::Deserialize>::deserialize(d)?;
            texts
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}
