//! Exact scalar and polynomial arithmetic: Gaussian rationals ℚ(i), Laurent
//! polynomials in one variable over ℚ(i), and Laurent functions on a torus
//! (or on a quotient torus ℤⁿ/ℤκ for κ = (1,…,1)).
//!
//! Everything here is exact; no floating point, no tolerances. Values are
//! immutable and freely shareable between threads.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Errors raised by exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    /// Division by zero: inverting 0, or evaluating at a point with a zero
    /// coordinate (torus coordinates and the Hecke parameter live in ℂ×).
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    /// A malformed scalar/polynomial literal.
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
    /// A quotient-lattice kernel this module does not canonicalize.
    #[error("unsupported kernel vector {0:?}: only (1,…,1) quotients are canonicalized")]
    UnsupportedKernel(Vec<i64>),
    /// Mismatched ranks or kernels in a binary operation.
    #[error("rank/kernel mismatch: {0}")]
    Mismatch(String),
}

// ---------------------------------------------------------------------------
// Gaussian rationals
// ---------------------------------------------------------------------------

/// An element a + b·i of ℚ(i), stored as two reduced fractions.
///
/// Equality is structural; fractions are kept in lowest terms with positive
/// denominator (inherited from [`BigRational`]). The string form is
/// `"a/b+c/d*i"` with integer parts shortened (`"2"`, `"-1/2*i"`, `"i"`, …)
/// and round-trips through [`FromStr`]/[`fmt::Display`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit i.
    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// The fraction p/q (q ≠ 0).
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Self::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::zero(),
        )
    }

    /// p/q + r/s·i.
    pub fn from_parts(p: i64, q: i64, r: i64, s: i64) -> Self {
        assert!(q != 0 && s != 0, "zero denominator");
        Self::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::new(BigInt::from(r), BigInt::from(s)),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// True when the imaginary part vanishes.
    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// The rational number |z|² = z·z̄.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero("inv(0)".into()));
        }
        let n = self.norm_sqr();
        Ok(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn div(&self, other: &Self) -> Result<Self, ExactError> {
        Ok(self * &other.inv()?)
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, k: i64) -> Result<Self, ExactError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }
}

impl std::ops::Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl std::ops::Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl std::ops::Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl std::ops::Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        if !self.re.is_zero() {
            out.push_str(&fmt_rational(&self.re));
        }
        if !self.im.is_zero() {
            let mag = self.im.abs();
            let sign = if self.im.is_negative() { "-" } else if out.is_empty() { "" } else { "+" };
            out.push_str(sign);
            if mag.is_one() {
                out.push('i');
            } else {
                out.push_str(&fmt_rational(&mag));
                out.push_str("*i");
            }
        }
        write!(f, "{out}")
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    BigRational::from_str(s).ok()
}

impl FromStr for GaussianRational {
    type Err = ExactError;

    /// Parses the canonical forms emitted by `Display`: `"0"`, `"3"`,
    /// `"-1/2"`, `"i"`, `"-i"`, `"2*i"`, `"1/2+1/2*i"`, `"3-i"`, ….
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ExactError::Parse { what: "Gaussian rational", input: s.to_string() };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        // Split at the last top-level '+' or '-' that is not a leading sign:
        // fraction slashes never contain signs after normalization.
        let bytes = t.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'+' && bytes[k - 1] != b'-'
            {
                split = Some(k);
                break;
            }
        }
        let parse_im = |p: &str| -> Option<BigRational> {
            let body = p.strip_suffix("*i").or_else(|| p.strip_suffix('i'))?;
            match body {
                "" => Some(BigRational::one()),
                "-" => Some(-BigRational::one()),
                "+" => Some(BigRational::one()),
                _ => parse_rational(body),
            }
        };
        if t.ends_with('i') {
            if let Some(k) = split {
                let (head, tail) = t.split_at(k);
                // tail begins with the sign character
                let re = parse_rational(head).ok_or_else(err)?;
                let im = parse_im(tail).ok_or_else(err)?;
                Ok(Self::new(re, im))
            } else {
                let im = parse_im(&t).ok_or_else(err)?;
                Ok(Self::new(BigRational::zero(), im))
            }
        } else {
            let re = parse_rational(&t).ok_or_else(err)?;
            Ok(Self::new(re, BigRational::zero()))
        }
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(|e| D::Error::custom(format!("{e}")))
    }
}

// ---------------------------------------------------------------------------
// Laurent polynomials in q
// ---------------------------------------------------------------------------

/// A Laurent polynomial Σ c_k·q^k with Gaussian-rational coefficients.
///
/// No zero coefficient is ever stored; the zero polynomial has an empty term
/// map. Negative exponents are first-class since q ranges over ℂ×.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct LaurentQ {
    terms: BTreeMap<i64, GaussianRational>,
}

impl LaurentQ {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, GaussianRational::one())
    }

    /// The variable q.
    pub fn q() -> Self {
        Self::monomial(1, GaussianRational::one())
    }

    /// q⁻¹.
    pub fn q_inv() -> Self {
        Self::monomial(-1, GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i64, coeff: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &GaussianRational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, exp: i64) -> GaussianRational {
        self.terms.get(&exp).cloned().unwrap_or_else(GaussianRational::zero)
    }

    fn insert_add(&mut self, exp: i64, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(GaussianRational::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero();
        for (k, a) in &self.terms {
            out.insert_add(*k, &(a * c));
        }
        out
    }

    /// Exact substitution q := ζ. Rejects ζ = 0 regardless of the exponent
    /// support, since q is a coordinate on ℂ×.
    pub fn eval(&self, zeta: &GaussianRational) -> Result<GaussianRational, ExactError> {
        if zeta.is_zero() {
            return Err(ExactError::DivisionByZero("evaluation of q at 0".into()));
        }
        let mut acc = GaussianRational::zero();
        for (k, c) in &self.terms {
            acc = &acc + &(c * &zeta.pow(*k)?);
        }
        Ok(acc)
    }
}

impl std::ops::Add for &LaurentQ {
    type Output = LaurentQ;
    fn add(self, rhs: &LaurentQ) -> LaurentQ {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert_add(*k, c);
        }
        out
    }
}

impl std::ops::Sub for &LaurentQ {
    type Output = LaurentQ;
    fn sub(self, rhs: &LaurentQ) -> LaurentQ {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert_add(*k, &-c);
        }
        out
    }
}

impl std::ops::Mul for &LaurentQ {
    type Output = LaurentQ;
    fn mul(self, rhs: &LaurentQ) -> LaurentQ {
        let mut out = LaurentQ::zero();
        for (j, a) in &self.terms {
            for (k, b) in &rhs.terms {
                out.insert_add(j + k, &(a * b));
            }
        }
        out
    }
}

impl std::ops::Neg for &LaurentQ {
    type Output = LaurentQ;
    fn neg(self) -> LaurentQ {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }
}

impl fmt::Display for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Highest exponent first, as one writes polynomials by hand.
        for (k, c) in self.terms.iter().rev() {
            let cs = c.to_string();
            let (sign, mag) = match cs.strip_prefix('-') {
                Some(rest) if !cs.contains('+') && cs.matches('-').count() == 1 => {
                    ("-", rest.to_string())
                }
                _ => ("+", if cs.contains('+') || cs.contains('-') { format!("({cs})") } else { cs }),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            match (*k, mag.as_str()) {
                (0, m) => write!(f, "{m}")?,
                (1, "1") => write!(f, "q")?,
                (1, m) => write!(f, "{m}*q")?,
                (e, "1") => write!(f, "q^{e}")?,
                (e, m) => write!(f, "{m}*q^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentQ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.terms.len()))?;
        for (k, c) in &self.terms {
            map.serialize_entry(&k.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LaurentQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        let mut out = LaurentQ::zero();
        for (k, c) in raw {
            let exp: i64 = k.parse().map_err(|_| D::Error::custom(format!("bad exponent {k:?}")))?;
            let coeff: GaussianRational =
                c.parse().map_err(|e| D::Error::custom(format!("{e}")))?;
            out.insert_add(exp, &coeff);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Laurent functions on a torus
// ---------------------------------------------------------------------------

/// A Laurent polynomial in z₁,…,zₙ over ℚ(i): an element of O(T) for
/// T = Hom(L, ℂ×), where L is ℤⁿ or the quotient ℤⁿ/ℤ(1,…,1).
///
/// Exponent keys are kept in canonical form: for the quotient lattice the
/// representative has last coordinate 0 (subtract the last coordinate from
/// all coordinates). Only the all-ones kernel is canonicalized; other kernel
/// vectors are rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TorusLaurent {
    rank: usize,
    kernel: Option<Vec<i64>>,
    terms: BTreeMap<Vec<i64>, GaussianRational>,
}

impl TorusLaurent {
    pub fn zero(rank: usize, kernel: Option<Vec<i64>>) -> Result<Self, ExactError> {
        if let Some(k) = &kernel {
            if k.len() != rank || k.iter().any(|&x| x != 1) {
                return Err(ExactError::UnsupportedKernel(k.clone()));
            }
        }
        Ok(Self { rank, kernel, terms: BTreeMap::new() })
    }

    pub fn one(rank: usize, kernel: Option<Vec<i64>>) -> Result<Self, ExactError> {
        Self::monomial(rank, kernel, &vec![0; rank], GaussianRational::one())
    }

    pub fn monomial(
        rank: usize,
        kernel: Option<Vec<i64>>,
        exp: &[i64],
        coeff: GaussianRational,
    ) -> Result<Self, ExactError> {
        let mut out = Self::zero(rank, kernel)?;
        if exp.len() != rank {
            return Err(ExactError::Mismatch(format!(
                "exponent length {} vs rank {rank}",
                exp.len()
            )));
        }
        out.insert_add(out.canonical_exponent(exp), &coeff);
        Ok(out)
    }

    /// The coordinate function z_i (0-based index).
    pub fn coordinate(rank: usize, kernel: Option<Vec<i64>>, i: usize) -> Result<Self, ExactError> {
        let mut e = vec![0; rank];
        e[i] = 1;
        Self::monomial(rank, kernel, &e, GaussianRational::one())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kernel(&self) -> Option<&[i64]> {
        self.kernel.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], &GaussianRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Canonical representative of an exponent class modulo ℤκ.
    pub fn canonical_exponent(&self, exp: &[i64]) -> Vec<i64> {
        canonical_exponent(exp, self.kernel.as_deref())
    }

    fn compatible(&self, other: &Self) -> Result<(), ExactError> {
        if self.rank != other.rank || self.kernel != other.kernel {
            return Err(ExactError::Mismatch(format!(
                "rank {}/kernel {:?} vs rank {}/kernel {:?}",
                self.rank, self.kernel, other.rank, other.kernel
            )));
        }
        Ok(())
    }

    fn insert_add(&mut self, exp: Vec<i64>, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp.clone()).or_insert_with(GaussianRational::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExactError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_add(e.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ExactError> {
        self.compatible(other)?;
        let mut out = Self { rank: self.rank, kernel: self.kernel.clone(), terms: BTreeMap::new() };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let sum: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert_add(out.canonical_exponent(&sum), &(c1 * c2));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self { rank: self.rank, kernel: self.kernel.clone(), terms: BTreeMap::new() };
        for (e, a) in &self.terms {
            out.insert_add(e.clone(), &(a * c));
        }
        out
    }

    /// Applies a coordinate permutation: `perm[i]` is the 0-based image of
    /// coordinate i, i.e. the monomial exponent moves from slot i to
    /// `perm[i]`.
    pub fn act_permutation(&self, perm: &[usize]) -> Self {
        let mut out = Self { rank: self.rank, kernel: self.kernel.clone(), terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            let mut moved = vec![0i64; self.rank];
            for (i, &x) in e.iter().enumerate() {
                moved[perm[i]] = x;
            }
            out.insert_add(out.canonical_exponent(&moved), c);
        }
        out
    }

    /// True when the function is invariant under every listed permutation.
    pub fn is_invariant(&self, perms: &[Vec<usize>]) -> bool {
        perms.iter().all(|p| self.act_permutation(p) == *self)
    }

    /// Σ over the listed permutations of the permuted function.
    pub fn symmetrize(&self, perms: &[Vec<usize>]) -> Result<Self, ExactError> {
        let mut acc = Self::zero(self.rank, self.kernel.clone())?;
        for p in perms {
            acc = acc.add(&self.act_permutation(p))?;
        }
        Ok(acc)
    }

    /// Exact evaluation at a torus point (all coordinates nonzero; points of
    /// the quotient torus satisfy Π zᵢ = 1, but any representative with the
    /// same character values gives the same answer on canonical exponents).
    pub fn eval(&self, point: &[GaussianRational]) -> Result<GaussianRational, ExactError> {
        if point.len() != self.rank {
            return Err(ExactError::Mismatch(format!(
                "point length {} vs rank {}",
                point.len(),
                self.rank
            )));
        }
        if point.iter().any(|c| c.is_zero()) {
            return Err(ExactError::DivisionByZero("torus point with zero coordinate".into()));
        }
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (i, &k) in e.iter().enumerate() {
                m = &m * &point[i].pow(k)?;
            }
            acc = &acc + &m;
        }
        Ok(acc)
    }
}

/// Canonicalizes an exponent vector modulo ℤκ (κ = all ones): subtracts the
/// last coordinate from every coordinate. Idempotent; identity when κ absent.
pub fn canonical_exponent(exp: &[i64], kernel: Option<&[i64]>) -> Vec<i64> {
    match kernel {
        None => exp.to_vec(),
        Some(_) => {
            let last = *exp.last().expect("nonempty exponent");
            exp.iter().map(|x| x - last).collect()
        }
    }
}

impl fmt::Display for TorusLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = c.to_string();
            let coeff = if cs.contains('+') || (cs.contains('-') && !cs.starts_with('-')) {
                format!("({cs})")
            } else {
                cs
            };
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(i, &k)| if k == 1 { format!("z{}", i + 1) } else { format!("z{}^{}", i + 1, k) })
                .collect();
            if mono.is_empty() {
                write!(f, "{coeff}")?;
            } else if coeff == "1" {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", coeff, mono.join("*"))?;
            }
        }
        Ok(())
    }
}
