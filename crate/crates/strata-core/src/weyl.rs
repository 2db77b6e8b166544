//! Extended affine Weyl groups of type A: the semidirect product X ⋊ W of a
//! character lattice X (ℤⁿ for GLₙ, ℤⁿ/ℤ(1,…,1) for SLₙ) with W = Sₙ.
//!
//! The affine simple generators are s₁,…,s_{n−1} (finite transpositions) and
//! s₀ = t_θ·s_θ for the highest root θ = e₁ − eₙ. The length-zero subgroup Ω
//! is generated by ω = t_{e₁}·(1 2 … n); membership in the Coxeter part is
//! "translation class lies in the root lattice". Length and reduced words are
//! defined operationally by breadth-first search over the affine generators
//! (memoized per spec); an Iwahori–Matsumoto closed form is provided as an
//! independent oracle.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::canonical_exponent;

/// Errors raised by extended affine Weyl group operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    /// Operands built over different root-system specs.
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),
    /// The element lies outside the configured enumeration radius.
    #[error("element outside the enumeration radius {radius}{}", hint.map(|h| format!(" (closed-form length {h})")).unwrap_or_default())]
    BallExceeded { radius: usize, hint: Option<u64> },
    /// A ball request beyond the configured maximum.
    #[error("radius {requested} exceeds the configured maximum {max}")]
    RadiusTooLarge { requested: usize, max: usize },
    /// Unsupported family or rank.
    #[error("invalid root-system spec: {0}")]
    InvalidSpec(String),
    /// Malformed element serialization.
    #[error("cannot parse element: {0}")]
    Parse(String),
}

/// Lattice family of the type-A root datum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WeylFamily {
    /// Character lattice ℤⁿ (GLₙ); Ω ≅ ℤ.
    Gl,
    /// Character lattice ℤⁿ/ℤ(1,…,1) (SLₙ / adjoint torus); Ω ≅ ℤ/n.
    Sl,
}

/// A supported type-A root system: family plus rank parameter n (2 ≤ n ≤ 5).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RootSystemSpec {
    family: WeylFamily,
    n: u8,
}

/// Default cap on public ball requests.
pub const DEFAULT_MAX_BALL_RADIUS: usize = 12;
/// Hard cap on the memoized breadth-first search; elements beyond this
/// length are outside the enumerable window and raise `BallExceeded`.
pub const ENUMERATION_RADIUS: usize = 24;
const INTERNAL_MAX_RADIUS: usize = ENUMERATION_RADIUS;

impl RootSystemSpec {
    pub fn a_gl(n: usize) -> Result<Self, WeylError> {
        Self::new(WeylFamily::Gl, n)
    }

    pub fn a_sl(n: usize) -> Result<Self, WeylError> {
        Self::new(WeylFamily::Sl, n)
    }

    pub fn new(family: WeylFamily, n: usize) -> Result<Self, WeylError> {
        if !(2..=5).contains(&n) {
            return Err(WeylError::InvalidSpec(format!("rank parameter {n} outside 2..=5")));
        }
        Ok(Self { family, n: n as u8 })
    }

    /// Parses the CLI form `"A_GL:n"` / `"A_SL:n"`.
    pub fn parse(text: &str) -> Result<Self, WeylError> {
        let (fam, n) = text
            .split_once(':')
            .ok_or_else(|| WeylError::InvalidSpec(format!("expected FAMILY:n, got {text:?}")))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| WeylError::InvalidSpec(format!("bad rank in {text:?}")))?;
        match fam.trim() {
            "A_GL" => Self::a_gl(n),
            "A_SL" => Self::a_sl(n),
            other => Err(WeylError::InvalidSpec(format!("unknown family {other:?}"))),
        }
    }

    pub fn family(&self) -> WeylFamily {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.n as usize
    }

    /// The quotient-lattice kernel vector, when present.
    pub fn kernel(&self) -> Option<Vec<i64>> {
        match self.family {
            WeylFamily::Gl => None,
            WeylFamily::Sl => Some(vec![1; self.rank()]),
        }
    }

    /// Positive roots e_i − e_j (i < j), as canonical lattice vectors.
    pub fn positive_roots(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let kernel = self.kernel();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                let mut v = vec![0i64; n];
                v[i] = 1;
                v[j] = -1;
                out.push(canonical_exponent(&v, kernel.as_deref()));
            }
        }
        out
    }

    /// Number of affine simple generators (s₀, s₁, …, s_{n−1}).
    pub fn num_affine_generators(&self) -> usize {
        self.rank()
    }

    /// Order of Ω: n for SL, 0 meaning infinite (ℤ) for GL.
    pub fn omega_order(&self) -> usize {
        match self.family {
            WeylFamily::Gl => 0,
            WeylFamily::Sl => self.rank(),
        }
    }

    fn canon(&self, v: &[i64]) -> Vec<i64> {
        canonical_exponent(v, self.kernel().as_deref())
    }
}

impl fmt::Display for RootSystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            WeylFamily::Gl => write!(f, "A_GL:{}", self.n),
            WeylFamily::Sl => write!(f, "A_SL:{}", self.n),
        }
    }
}

/// A permutation of {0,…,n−1}; `images[i]` is the image of i.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Self((0..n as u8).collect())
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut v: Vec<u8> = (0..n as u8).collect();
        v.swap(i, j);
        Self(v)
    }

    /// The n-cycle i ↦ i+1 (mod n).
    pub fn cycle(n: usize) -> Self {
        Self((0..n).map(|i| ((i + 1) % n) as u8).collect())
    }

    pub fn from_images(images: &[usize]) -> Result<Self, WeylError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in images {
            if x >= n || seen[x] {
                return Err(WeylError::Parse(format!("not a permutation: {images:?}")));
            }
            seen[x] = true;
        }
        Ok(Self(images.iter().map(|&x| x as u8).collect()))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// Composition acting left to right on points: (a∘b)(i) = a(b(i)).
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut v = vec![0u8; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            v[x as usize] = i as u8;
        }
        Perm(v)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u8 == x)
    }

    /// Permutes vector entries: the result has `out[σ(i)] = v[i]`.
    pub fn act_vec(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[self.0[i] as usize] = x;
        }
        out
    }

    /// 1-based image list, the serialized form.
    pub fn images_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x as usize + 1).collect()
    }

    /// 0-based image list.
    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x as usize).collect()
    }
}

/// An element (λ, w) of X ⋊ W with canonical lattice representative λ.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtendedAffineWeylElt {
    spec: RootSystemSpec,
    translation: Vec<i64>,
    perm: Perm,
}

impl ExtendedAffineWeylElt {
    pub fn identity(spec: RootSystemSpec) -> Self {
        Self { spec, translation: vec![0; spec.rank()], perm: Perm::identity(spec.rank()) }
    }

    /// Builds (λ, w) with λ reduced to its canonical representative.
    pub fn new(spec: RootSystemSpec, translation: &[i64], perm: Perm) -> Result<Self, WeylError> {
        if translation.len() != spec.rank() || perm.n() != spec.rank() {
            return Err(WeylError::Parse(format!(
                "element size mismatch for spec {spec}: translation {translation:?}, perm of degree {}",
                perm.n()
            )));
        }
        Ok(Self { spec, translation: spec.canon(translation), perm })
    }

    /// The affine simple generator s_i, 0 ≤ i ≤ n−1.
    pub fn simple(spec: RootSystemSpec, i: usize) -> Result<Self, WeylError> {
        let n = spec.rank();
        if i >= n {
            return Err(WeylError::InvalidSpec(format!("generator index {i} out of 0..{n}")));
        }
        if i == 0 {
            let mut theta = vec![0i64; n];
            theta[0] = 1;
            theta[n - 1] = -1;
            Self::new(spec, &theta, Perm::transposition(n, 0, n - 1))
        } else {
            Self::new(spec, &vec![0; n], Perm::transposition(n, i - 1, i))
        }
    }

    /// The length-zero generator ω = t_{e₁}·(1 2 … n).
    pub fn omega(spec: RootSystemSpec) -> Self {
        let n = spec.rank();
        let mut e1 = vec![0i64; n];
        e1[0] = 1;
        Self::new(spec, &e1, Perm::cycle(n)).expect("well-formed generator")
    }

    /// ω^k (k may be negative).
    pub fn omega_pow(spec: RootSystemSpec, k: i64) -> Self {
        let base = if k < 0 {
            Self::omega(spec).invert()
        } else {
            Self::omega(spec)
        };
        let mut acc = Self::identity(spec);
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base).expect("same spec");
        }
        acc
    }

    pub fn spec(&self) -> RootSystemSpec {
        self.spec
    }

    pub fn translation(&self) -> &[i64] {
        &self.translation
    }

    pub fn perm(&self) -> &Perm {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.is_identity() && self.translation.iter().all(|&x| x == 0)
    }

    /// Semidirect-product law (λ₁,w₁)(λ₂,w₂) = (λ₁ + w₁·λ₂, w₁w₂).
    pub fn compose(&self, other: &Self) -> Result<Self, WeylError> {
        if self.spec != other.spec {
            return Err(WeylError::SpecMismatch(format!("{} vs {}", self.spec, other.spec)));
        }
        let moved = self.perm.act_vec(&other.translation);
        let sum: Vec<i64> = self.translation.iter().zip(&moved).map(|(a, b)| a + b).collect();
        Self::new(self.spec, &sum, self.perm.compose(&other.perm))
    }

    /// Group inverse (−w⁻¹·λ, w⁻¹).
    pub fn invert(&self) -> Self {
        let winv = self.perm.inverse();
        let back: Vec<i64> = winv.act_vec(&self.translation).iter().map(|x| -x).collect();
        Self::new(self.spec, &back, winv).expect("same spec")
    }

    /// The Ω-class of the translation part: Σλᵢ for GL, Σλᵢ mod n for SL
    /// (canonical representative in 0..n).
    pub fn omega_class(&self) -> i64 {
        let s: i64 = self.translation.iter().sum();
        match self.spec.family {
            WeylFamily::Gl => s,
            WeylFamily::Sl => s.rem_euclid(self.spec.rank() as i64),
        }
    }

    /// Splits x = ω^a · w with w in the Coxeter part; returns (a, w).
    pub fn strip_omega(&self) -> (i64, Self) {
        let a = self.omega_class();
        let w = Self::omega_pow(self.spec, -a).compose(self).expect("same spec");
        debug_assert_eq!(w.omega_class(), 0, "Coxeter part has trivial Ω-class");
        (a, w)
    }

    /// BFS length: the Coxeter length of the ω-stripped part.
    pub fn length(&self) -> Result<u64, WeylError> {
        let (_, w) = self.strip_omega();
        with_ball(self.spec, |ball| {
            ball.find_length(&w).ok_or(WeylError::BallExceeded {
                radius: INTERNAL_MAX_RADIUS,
                hint: Some(self.closed_form_length()),
            })
        })
    }

    /// Iwahori–Matsumoto closed form
    /// ℓ(t_λ w) = Σ_{α>0, w⁻¹α>0} |⟨λ,α∨⟩| + Σ_{α>0, w⁻¹α<0} |⟨λ,α∨⟩ − 1|,
    /// used as an independent oracle for the BFS length.
    pub fn closed_form_length(&self) -> u64 {
        let n = self.spec.rank();
        let winv = self.perm.inverse();
        let mut total = 0u64;
        for i in 0..n {
            for j in (i + 1)..n {
                let pairing = self.translation[i] - self.translation[j];
                let positive_back = winv.apply(i) < winv.apply(j);
                total += if positive_back {
                    pairing.unsigned_abs()
                } else {
                    (pairing - 1).unsigned_abs()
                };
            }
        }
        total
    }

    /// A reduced expression x = ω^a · s_{i₁}⋯s_{i_ℓ} with ℓ = length(x).
    pub fn reduced_word(&self) -> Result<(i64, Vec<usize>), WeylError> {
        let (a, w) = self.strip_omega();
        let word = with_ball(self.spec, |ball| {
            ball.find_word(&w).ok_or(WeylError::BallExceeded {
                radius: INTERNAL_MAX_RADIUS,
                hint: Some(self.closed_form_length()),
            })
        })?;
        Ok((a, word))
    }

    /// Serialized form {"omega": a, "word": […]}.
    pub fn to_omega_word(&self) -> Result<WeylEltJson, WeylError> {
        let (omega, word) = self.reduced_word()?;
        Ok(WeylEltJson::OmegaWord { omega, word })
    }

    /// Serialized form {"translation": […], "perm": […]} (perm 1-based).
    pub fn to_translation_perm(&self) -> WeylEltJson {
        WeylEltJson::TranslationPerm {
            translation: self.translation.clone(),
            perm: self.perm.images_one_based(),
        }
    }

    /// Reads either serialized form back into an element over `spec`.
    pub fn from_json(spec: RootSystemSpec, json: &WeylEltJson) -> Result<Self, WeylError> {
        match json {
            WeylEltJson::OmegaWord { omega, word } => {
                let mut acc = Self::omega_pow(spec, *omega);
                for &i in word {
                    acc = acc.compose(&Self::simple(spec, i)?)?;
                }
                Ok(acc)
            }
            WeylEltJson::TranslationPerm { translation, perm } => {
                let zero_based: Vec<usize> = perm
                    .iter()
                    .map(|&x| {
                        x.checked_sub(1)
                            .ok_or_else(|| WeylError::Parse(format!("perm image 0 in {perm:?}")))
                    })
                    .collect::<Result<_, _>>()?;
                Self::new(spec, translation, Perm::from_images(&zero_based)?)
            }
        }
    }
}

impl fmt::Display for ExtendedAffineWeylElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t{:?}, {:?})", self.translation, self.perm.images_one_based())
    }
}

/// JSON form of an element; both variants round-trip.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeylEltJson {
    OmegaWord { omega: i64, word: Vec<usize> },
    TranslationPerm { translation: Vec<i64>, perm: Vec<usize> },
}

// ---------------------------------------------------------------------------
// Memoized Coxeter-part BFS
// ---------------------------------------------------------------------------

type CoxKey = (Vec<i64>, Vec<u8>);

struct BallNode {
    len: usize,
    /// Generator multiplied last and the predecessor key (None at identity).
    parent: Option<(usize, CoxKey)>,
}

struct CoxeterBall {
    spec: RootSystemSpec,
    radius: usize,
    nodes: HashMap<CoxKey, BallNode>,
    frontier: Vec<CoxKey>,
}

impl CoxeterBall {
    fn new(spec: RootSystemSpec) -> Self {
        let e = ExtendedAffineWeylElt::identity(spec);
        let key = (e.translation.clone(), e.perm.0.clone());
        let mut nodes = HashMap::new();
        nodes.insert(key.clone(), BallNode { len: 0, parent: None });
        Self { spec, radius: 0, nodes, frontier: vec![key] }
    }

    fn expand_to(&mut self, radius: usize) {
        let gens: Vec<ExtendedAffineWeylElt> = (0..self.spec.num_affine_generators())
            .map(|i| ExtendedAffineWeylElt::simple(self.spec, i).expect("valid generator"))
            .collect();
        while self.radius < radius {
            let mut next = Vec::new();
            for key in std::mem::take(&mut self.frontier) {
                let cur = ExtendedAffineWeylElt::new(
                    self.spec,
                    &key.0,
                    Perm(key.1.clone()),
                )
                .expect("cached key well-formed");
                for (g, gen) in gens.iter().enumerate() {
                    let nb = cur.compose(gen).expect("same spec");
                    let nb_key = (nb.translation.clone(), nb.perm.0.clone());
                    if !self.nodes.contains_key(&nb_key) {
                        self.nodes.insert(
                            nb_key.clone(),
                            BallNode { len: self.radius + 1, parent: Some((g, key.clone())) },
                        );
                        next.push(nb_key);
                    }
                }
            }
            self.frontier = next;
            self.radius += 1;
        }
    }

    fn find_length(&mut self, w: &ExtendedAffineWeylElt) -> Option<u64> {
        let key = (w.translation.clone(), w.perm.0.clone());
        loop {
            if let Some(node) = self.nodes.get(&key) {
                return Some(node.len as u64);
            }
            if self.radius >= INTERNAL_MAX_RADIUS {
                return None;
            }
            let target = (self.radius + 1).min(INTERNAL_MAX_RADIUS);
            self.expand_to(target);
        }
    }

    fn find_word(&mut self, w: &ExtendedAffineWeylElt) -> Option<Vec<usize>> {
        self.find_length(w)?;
        let mut key = (w.translation.clone(), w.perm.0.clone());
        let mut word = Vec::new();
        while let Some((g, parent)) = self.nodes.get(&key).and_then(|n| n.parent.clone()) {
            word.push(g);
            key = parent;
        }
        word.reverse();
        Some(word)
    }

    fn elements_up_to(&mut self, radius: usize) -> Vec<(ExtendedAffineWeylElt, usize)> {
        self.expand_to(radius);
        self.nodes
            .iter()
            .filter(|(_, node)| node.len <= radius)
            .map(|(key, node)| {
                (
                    ExtendedAffineWeylElt::new(self.spec, &key.0, Perm(key.1.clone()))
                        .expect("cached key well-formed"),
                    node.len,
                )
            })
            .collect()
    }
}

static BALL_CACHE: Lazy<Mutex<BTreeMap<RootSystemSpec, CoxeterBall>>> =
    Lazy::new(|| Mutex::new(BTreeMap::new()));

fn with_ball<T>(spec: RootSystemSpec, f: impl FnOnce(&mut CoxeterBall) -> T) -> T {
    let mut cache = BALL_CACHE.lock().expect("ball cache poisoned");
    let ball = cache.entry(spec).or_insert_with(|| CoxeterBall::new(spec));
    f(ball)
}

/// All elements of Coxeter length ≤ radius together with their Ω-translates,
/// sorted deterministically. For GL (infinite Ω) the ω-powers are windowed to
/// |a| ≤ radius; for SL every power of the cyclic Ω appears.
pub fn ball(
    spec: RootSystemSpec,
    radius: usize,
) -> Result<Vec<ExtendedAffineWeylElt>, WeylError> {
    ball_with_max(spec, radius, DEFAULT_MAX_BALL_RADIUS)
}

/// Like [`ball`] with an explicit request cap (still bounded internally).
pub fn ball_with_max(
    spec: RootSystemSpec,
    radius: usize,
    max_radius: usize,
) -> Result<Vec<ExtendedAffineWeylElt>, WeylError> {
    let max = max_radius.min(INTERNAL_MAX_RADIUS);
    if radius > max {
        return Err(WeylError::RadiusTooLarge { requested: radius, max });
    }
    let coxeter = with_ball(spec, |ball| ball.elements_up_to(radius));
    let omega_powers: Vec<i64> = match spec.omega_order() {
        0 => (-(radius as i64)..=radius as i64).collect(),
        k => (0..k as i64).collect(),
    };
    let mut out = Vec::with_capacity(coxeter.len() * omega_powers.len());
    for &a in &omega_powers {
        let oa = ExtendedAffineWeylElt::omega_pow(spec, a);
        for (w, len) in &coxeter {
            out.push((*len, a, oa.compose(w).expect("same spec")));
        }
    }
    out.sort_by(|(l1, a1, x1), (l2, a2, x2)| {
        (l1, a1, &x1.translation, &x1.perm).cmp(&(l2, a2, &x2.translation, &x2.perm))
    });
    Ok(out.into_iter().map(|(_, _, x)| x).collect())
}
