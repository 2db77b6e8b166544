//! The affine Hecke algebra H_q in the T_x basis, with exact multiplication
//! by reduced-word peeling, specialization at q = 1 onto the group algebra
//! O(T)⋊W, and centrality checks for Weyl-invariant functions at q = 1.
//!
//! The product T_x·T_y is computed by peeling a reduced word of y from the
//! left: T_x·T_ω = T_{xω}, and T_x·T_s = T_{xs} when ℓ(xs) = ℓ(x)+1, else
//! q·T_{xs} + (q−1)·T_x. The result is independent of the chosen reduced
//! word; the property tests exercise this directly.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExactError, GaussianRational, LaurentQ, TorusLaurent};
use crate::weyl::{
    ball, ExtendedAffineWeylElt, Perm, RootSystemSpec, WeylEltJson, WeylError, ENUMERATION_RADIUS,
};

/// Errors raised by Hecke-algebra operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeckeError {
    /// Operands built over different root-system specs.
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),
    /// A product would involve basis elements beyond the enumeration radius.
    #[error("product support exceeds the enumeration radius {radius} (length budget {needed})")]
    BallExceeded { radius: usize, needed: u64 },
    /// Evaluation of q at zero.
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    /// A claimed Weyl-invariant function fails invariance.
    #[error("not W-invariant: {0}")]
    NotWInvariant(String),
    /// Malformed input.
    #[error("cannot parse Hecke data: {0}")]
    Parse(String),
}

impl From<WeylError> for HeckeError {
    fn from(err: WeylError) -> Self {
        match err {
            WeylError::SpecMismatch(s) => HeckeError::SpecMismatch(s),
            WeylError::BallExceeded { radius, hint } => {
                HeckeError::BallExceeded { radius, needed: hint.unwrap_or(0) }
            }
            other => HeckeError::Parse(other.to_string()),
        }
    }
}

impl From<ExactError> for HeckeError {
    fn from(err: ExactError) -> Self {
        match err {
            ExactError::DivisionByZero(s) => HeckeError::DivisionByZero(s),
            other => HeckeError::Parse(other.to_string()),
        }
    }
}

/// Multiplication rule selector; the corrupted variant exists only as a
/// negative control for `verify_quadratic`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum MulRule {
    Standard,
    /// Flips the (q−1) coefficient to (q+1): the quadratic relation fails.
    #[allow(dead_code)] // negative control, constructed only by tests
    Corrupted,
}

/// An element of H_q: a sparse sum Σ c_x(q)·T_x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeElt {
    spec: RootSystemSpec,
    terms: BTreeMap<ExtendedAffineWeylElt, LaurentQ>,
}

impl HeckeElt {
    pub fn zero(spec: RootSystemSpec) -> Self {
        Self { spec, terms: BTreeMap::new() }
    }

    /// The basis element T_x.
    pub fn basis(x: &ExtendedAffineWeylElt) -> Self {
        let mut elt = Self::zero(x.spec());
        elt.insert_add(x.clone(), LaurentQ::one());
        elt
    }

    /// The identity T_e.
    pub fn one(spec: RootSystemSpec) -> Self {
        Self::basis(&ExtendedAffineWeylElt::identity(spec))
    }

    pub fn spec(&self) -> RootSystemSpec {
        self.spec
    }

    pub fn terms(&self) -> &BTreeMap<ExtendedAffineWeylElt, LaurentQ> {
        &self.terms
    }

    pub fn coeff(&self, x: &ExtendedAffineWeylElt) -> LaurentQ {
        self.terms.get(x).cloned().unwrap_or_else(LaurentQ::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert_add(&mut self, x: ExtendedAffineWeylElt, c: LaurentQ) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(x.clone()).or_insert_with(LaurentQ::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&x);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, HeckeError> {
        if self.spec != other.spec {
            return Err(HeckeError::SpecMismatch(format!("{} vs {}", self.spec, other.spec)));
        }
        let mut out = self.clone();
        for (x, c) in &other.terms {
            out.insert_add(x.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, HeckeError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { spec: self.spec, terms: self.terms.iter().map(|(x, c)| (x.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &LaurentQ) -> Self {
        if c.is_zero() {
            return Self::zero(self.spec);
        }
        Self { spec: self.spec, terms: self.terms.iter().map(|(x, d)| (x.clone(), c * d)).collect() }
    }

    /// Maximum BFS length over the support (0 for the zero element).
    pub fn max_length(&self) -> Result<u64, HeckeError> {
        let mut max = 0;
        for x in self.terms.keys() {
            max = max.max(x.length()?);
        }
        Ok(max)
    }

    /// Serializable form with translation/perm element keys.
    pub fn to_json(&self) -> HeckeEltJson {
        HeckeEltJson {
            spec: self.spec.to_string(),
            terms: self
                .terms
                .iter()
                .map(|(x, c)| HeckeTermJson { elt: x.to_translation_perm(), coeff: c.clone() })
                .collect(),
        }
    }

    pub fn from_json(json: &HeckeEltJson) -> Result<Self, HeckeError> {
        let spec = RootSystemSpec::parse(&json.spec).map_err(|e| HeckeError::Parse(e.to_string()))?;
        let mut out = Self::zero(spec);
        for term in &json.terms {
            let x = ExtendedAffineWeylElt::from_json(spec, &term.elt)?;
            out.insert_add(x, term.coeff.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for HeckeElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (x, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*T{x}")?;
        }
        Ok(())
    }
}

/// JSON form of a [`HeckeElt`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeckeEltJson {
    pub spec: String,
    pub terms: Vec<HeckeTermJson>,
}

/// One term of the JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeckeTermJson {
    pub elt: WeylEltJson,
    pub coeff: LaurentQ,
}

/// Exact product in H_q.
///
/// Every pair (x, y) of support elements must satisfy
/// ℓ(x) + ℓ(y) ≤ [`ENUMERATION_RADIUS`]; beyond that the intermediate
/// elements could leave the enumerable window and `BallExceeded` is raised.
pub fn hecke_mul(a: &HeckeElt, b: &HeckeElt) -> Result<HeckeElt, HeckeError> {
    hecke_mul_with_rule(a, b, MulRule::Standard)
}

pub(crate) fn hecke_mul_with_rule(
    a: &HeckeElt,
    b: &HeckeElt,
    rule: MulRule,
) -> Result<HeckeElt, HeckeError> {
    if a.spec != b.spec {
        return Err(HeckeError::SpecMismatch(format!("{} vs {}", a.spec, b.spec)));
    }
    let spec = a.spec;
    let max_a = a.max_length()?;
    let max_b = b.max_length()?;
    let needed = max_a + max_b;
    if needed > ENUMERATION_RADIUS as u64 {
        return Err(HeckeError::BallExceeded { radius: ENUMERATION_RADIUS, needed });
    }

    let mut result = HeckeElt::zero(spec);
    for (y, cb) in &b.terms {
        let (omega, word) = y.reduced_word()?;
        // Seed with a · T_{ω^k}: lengths are unchanged by ω.
        let shift = ExtendedAffineWeylElt::omega_pow(spec, omega);
        let mut cur = HeckeElt::zero(spec);
        for (x, ca) in &a.terms {
            cur.insert_add(x.compose(&shift)?, ca.clone());
        }
        for &i in &word {
            cur = mul_simple_right(&cur, i, rule)?;
        }
        result = result.add(&cur.scale(cb))?;
    }
    Ok(result)
}

/// One peel step: multiplies every term by T_{s_i} on the right.
fn mul_simple_right(a: &HeckeElt, i: usize, rule: MulRule) -> Result<HeckeElt, HeckeError> {
    let spec = a.spec;
    let s = ExtendedAffineWeylElt::simple(spec, i)?;
    let q = LaurentQ::q();
    let lower_coeff = match rule {
        MulRule::Standard => &q - &LaurentQ::one(),
        MulRule::Corrupted => &q + &LaurentQ::one(),
    };
    let mut out = HeckeElt::zero(spec);
    for (x, c) in &a.terms {
        let xs = x.compose(&s)?;
        if xs.length()? == x.length()? + 1 {
            out.insert_add(xs, c.clone());
        } else {
            out.insert_add(xs, &q * c);
            out.insert_add(x.clone(), &lower_coeff * c);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Specialization and the q = 1 crossed product
// ---------------------------------------------------------------------------

/// An element of the q = 1 crossed product O(T)⋊W = ℂ[X ⋊ W]: a sparse sum
/// of group-basis elements (λ, w) with Gaussian-rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossedProductElt {
    spec: RootSystemSpec,
    terms: BTreeMap<ExtendedAffineWeylElt, GaussianRational>,
}

impl CrossedProductElt {
    pub fn zero(spec: RootSystemSpec) -> Self {
        Self { spec, terms: BTreeMap::new() }
    }

    pub fn basis(x: &ExtendedAffineWeylElt) -> Self {
        let mut elt = Self::zero(x.spec());
        elt.insert_add(x.clone(), GaussianRational::one());
        elt
    }

    pub fn one(spec: RootSystemSpec) -> Self {
        Self::basis(&ExtendedAffineWeylElt::identity(spec))
    }

    pub fn spec(&self) -> RootSystemSpec {
        self.spec
    }

    pub fn terms(&self) -> &BTreeMap<ExtendedAffineWeylElt, GaussianRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert_add(&mut self, x: ExtendedAffineWeylElt, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(x.clone()).or_insert_with(GaussianRational::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&x);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, HeckeError> {
        if self.spec != other.spec {
            return Err(HeckeError::SpecMismatch(format!("{} vs {}", self.spec, other.spec)));
        }
        let mut out = self.clone();
        for (x, c) in &other.terms {
            out.insert_add(x.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Self { spec: self.spec, terms: self.terms.iter().map(|(x, c)| (x.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, HeckeError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.spec);
        }
        Self {
            spec: self.spec,
            terms: self.terms.iter().map(|(x, d)| (x.clone(), c * d)).collect(),
        }
    }

    /// Group-algebra product: (λ₁,w₁)(λ₂,w₂) = (λ₁+w₁λ₂, w₁w₂), bilinearly.
    pub fn mul(&self, other: &Self) -> Result<Self, HeckeError> {
        if self.spec != other.spec {
            return Err(HeckeError::SpecMismatch(format!("{} vs {}", self.spec, other.spec)));
        }
        let mut out = Self::zero(self.spec);
        for (x, c) in &self.terms {
            for (y, d) in &other.terms {
                out.insert_add(x.compose(y)?, c * d);
            }
        }
        Ok(out)
    }

    /// Embeds a function on T: each monomial t^λ becomes the basis element
    /// (λ, e). The function's lattice must match the spec's.
    pub fn from_torus_laurent(
        spec: RootSystemSpec,
        f: &TorusLaurent,
    ) -> Result<Self, HeckeError> {
        if f.rank() != spec.rank() || f.kernel() != spec.kernel().as_deref() {
            return Err(HeckeError::SpecMismatch(format!(
                "function lattice (rank {}, kernel {:?}) does not match {}",
                f.rank(),
                f.kernel(),
                spec
            )));
        }
        let e = Perm::identity(spec.rank());
        let mut out = Self::zero(spec);
        for (exp, c) in f.terms() {
            out.insert_add(ExtendedAffineWeylElt::new(spec, exp, e.clone())?, c.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for CrossedProductElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (x, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{x}")?;
        }
        Ok(())
    }
}

/// Coefficientwise evaluation of q at ζ ≠ 0. At ζ = 1 this is the algebra
/// map onto the group algebra (T_{(λ,w)} ↦ (λ,w)); at other ζ it is only a
/// linear map onto the same basis.
pub fn specialize(a: &HeckeElt, zeta: &GaussianRational) -> Result<CrossedProductElt, HeckeError> {
    let mut out = CrossedProductElt::zero(a.spec);
    for (x, c) in &a.terms {
        out.insert_add(x.clone(), c.eval(zeta)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Check suites
// ---------------------------------------------------------------------------

/// Per-generator outcome of the quadratic-relation check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticCheck {
    pub generator: usize,
    pub pass: bool,
}

/// Report of `verify_quadratic`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticReport {
    pub spec: String,
    pub radius: usize,
    pub checks: Vec<QuadraticCheck>,
}

impl QuadraticReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Checks (T_s − q)(T_s + 1) = 0 exactly for every affine simple generator.
pub fn verify_quadratic(spec: RootSystemSpec, radius: usize) -> Result<QuadraticReport, HeckeError> {
    verify_quadratic_with_rule(spec, radius, MulRule::Standard)
}

pub(crate) fn verify_quadratic_with_rule(
    spec: RootSystemSpec,
    radius: usize,
    rule: MulRule,
) -> Result<QuadraticReport, HeckeError> {
    if radius < 1 {
        return Err(HeckeError::Parse("radius must be at least 1".into()));
    }
    let q = LaurentQ::q();
    let mut checks = Vec::new();
    for i in 0..spec.num_affine_generators() {
        let ts = HeckeElt::basis(&ExtendedAffineWeylElt::simple(spec, i)?);
        let lhs = ts.sub(&HeckeElt::one(spec).scale(&q))?;
        let rhs = ts.add(&HeckeElt::one(spec))?;
        let product = hecke_mul_with_rule(&lhs, &rhs, rule)?;
        checks.push(QuadraticCheck { generator: i, pass: product.is_zero() });
    }
    Ok(QuadraticReport { spec: spec.to_string(), radius, checks })
}

/// Report of the randomized associativity / specialization suites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    pub spec: String,
    pub radius: usize,
    pub trials: usize,
    pub failures: usize,
}

impl SampleReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

fn sample_elements(
    spec: RootSystemSpec,
    radius: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<ExtendedAffineWeylElt>, HeckeError> {
    use rand::prelude::*;
    let pool = ball(spec, radius)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect())
}

/// Checks (T_x·T_y)·T_z = T_x·(T_y·T_z) for random basis triples drawn from
/// the radius ball.
pub fn associativity_sample(
    spec: RootSystemSpec,
    radius: usize,
    trials: usize,
    seed: u64,
) -> Result<SampleReport, HeckeError> {
    let elements = sample_elements(spec, radius, trials * 3, seed)?;
    let mut failures = 0;
    for triple in elements.chunks_exact(3) {
        let (x, y, z) =
            (HeckeElt::basis(&triple[0]), HeckeElt::basis(&triple[1]), HeckeElt::basis(&triple[2]));
        let left = hecke_mul(&hecke_mul(&x, &y)?, &z)?;
        let right = hecke_mul(&x, &hecke_mul(&y, &z)?)?;
        if left != right {
            failures += 1;
        }
    }
    Ok(SampleReport { spec: spec.to_string(), radius, trials, failures })
}

/// Checks that q = 1 specialization of random products T_x·T_y agrees with
/// the group-algebra product computed independently in [`CrossedProductElt`].
pub fn specialization_sample(
    spec: RootSystemSpec,
    radius: usize,
    trials: usize,
    seed: u64,
) -> Result<SampleReport, HeckeError> {
    let one = GaussianRational::one();
    let elements = sample_elements(spec, radius, trials * 2, seed)?;
    let mut failures = 0;
    for pair in elements.chunks_exact(2) {
        let hecke = hecke_mul(&HeckeElt::basis(&pair[0]), &HeckeElt::basis(&pair[1]))?;
        let specialized = specialize(&hecke, &one)?;
        let direct = CrossedProductElt::basis(&pair[0]).mul(&CrossedProductElt::basis(&pair[1]))?;
        if specialized != direct {
            failures += 1;
        }
    }
    Ok(SampleReport { spec: spec.to_string(), radius, trials, failures })
}

/// Checks that a W-invariant function on T is central in O(T)⋊W against the
/// given samples. Raises `NotWInvariant` when f fails invariance under some
/// coordinate transposition.
pub fn verify_central_q1(
    spec: RootSystemSpec,
    f: &TorusLaurent,
    samples: &[CrossedProductElt],
) -> Result<bool, HeckeError> {
    if f.rank() != spec.rank() || f.kernel() != spec.kernel().as_deref() {
        return Err(HeckeError::SpecMismatch(format!(
            "function lattice (rank {}, kernel {:?}) does not match {}",
            f.rank(),
            f.kernel(),
            spec
        )));
    }
    let n = spec.rank();
    for i in 0..n - 1 {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, i + 1);
        if f.act_permutation(&images) != *f {
            return Err(HeckeError::NotWInvariant(format!(
                "fails invariance under the coordinate swap ({} {})",
                i + 1,
                i + 2
            )));
        }
    }
    let fz = CrossedProductElt::from_torus_laurent(spec, f)?;
    for x in samples {
        if fz.mul(x)? != x.mul(&fz)? {
            return Ok(false);
        }
    }
    Ok(true)
}
