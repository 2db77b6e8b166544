//! Chart models of non-separated spaces.
//!
//! A [`GluedSpace`] is a base variety together with doubling data: over each
//! listed locus, extra copies of the base are glued in along the locus
//! complement.  Points are pairs (copy index, base point), where the copy
//! index ranges over the multiplicity δ(x) = 1 + Σ extra sheets through x.
//! The module answers three kinds of questions about such models:
//!
//! * **multiplicity** — how many points lie over a base point;
//! * **closure** — whether a candidate point lies in the Zariski closure of
//!   a constructible set, computed chart by chart: the candidate is in the
//!   closure exactly when some chart containing it has it inside the
//!   chart-level closure of the set's restriction;
//! * **comparison** — invariants (component count, existence of a
//!   non-separated pair, multiplicity profile) that can rule out a
//!   homeomorphism between two models.  Agreement of all invariants is
//!   reported as exactly that, never as a positive identification.
//!
//! The locus language is deliberately small — finite point lists, linear
//! subvarieties of affine space, translated subtori cut out by monomial
//! congruences — so that closures are syntactic: each listed component is
//! closed, and the closure of "component minus smaller locus" is the
//! component itself unless it is swallowed entirely.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::GaussianRational;
use crate::exquo::ThetaGlueData;
use crate::lattice::{smith_normal_form, ActionJson, LatticeAction, SubtorusData};
use crate::linalg::QiMatrix;

type Gq = GaussianRational;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Errors from building or querying glued models.
#[derive(Debug, Error)]
pub enum GlueError {
    /// A doubling locus does not fit the base it was declared over.
    #[error("locus is not valid over the base: {0}")]
    LocusOffBase(String),
    /// A queried point does not lie on the base.
    #[error("point is not on the base: {0}")]
    PointOffBase(String),
    /// A set descriptor outside the supported closure language.
    #[error("unsupported set descriptor: {0}")]
    UnsupportedDescriptor(String),
    /// Malformed model data.
    #[error("cannot parse model data: {0}")]
    Parse(String),
    /// A structural precondition failed.
    #[error("{0}")]
    Validation(String),
}

// ---------------------------------------------------------------------------
// Bases and loci
// ---------------------------------------------------------------------------

/// The variety a glued model is built over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseSpace {
    /// Affine space of the given dimension.
    Affine { dim: usize },
    /// A torus modulo the recorded finite action.  Points are torus
    /// coordinates; two tuples in one orbit name the same base point, so
    /// locus membership is saturated over the group.
    TorusQuotient { action: ActionJson },
}

impl BaseSpace {
    /// Number of coordinates of a point over this base.
    pub fn arity(&self) -> usize {
        match self {
            BaseSpace::Affine { dim } => *dim,
            BaseSpace::TorusQuotient { action } => action.rank,
        }
    }
}

/// One monomial congruence on torus coordinates: Π xᵢ^{exponents[i]} = value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Congruence {
    pub exponents: Vec<i64>,
    pub value: String,
}

/// One declared-irreducible piece of a locus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocusComponent {
    /// A finite list of points (each coordinate an exact scalar).
    Points { points: Vec<Vec<String>> },
    /// The solutions of matrix·x = rhs in affine space; an empty system is
    /// the whole space.
    Linear { matrix: Vec<Vec<String>>, rhs: Vec<String> },
    /// A translated subtorus cut out by congruences; no congruences means
    /// the whole torus.
    SubtorusCoset { congruences: Vec<Congruence> },
}

/// A closed subset of the base: a finite union of components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Locus {
    pub components: Vec<LocusComponent>,
}

impl Locus {
    /// The locus consisting of the listed points.
    pub fn of_points(points: &[&[&str]]) -> Self {
        Locus {
            components: vec![LocusComponent::Points {
                points: points.iter().map(|p| p.iter().map(|s| s.to_string()).collect()).collect(),
            }],
        }
    }

    /// A linear locus from equation rows and right-hand sides; empty
    /// equations describe the whole affine space.
    pub fn of_linear(matrix: &[&[&str]], rhs: &[&str]) -> Self {
        Locus {
            components: vec![LocusComponent::Linear {
                matrix: matrix.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect(),
                rhs: rhs.iter().map(|s| s.to_string()).collect(),
            }],
        }
    }

    /// A single translated subtorus from congruences; empty congruences
    /// describe the whole torus.
    pub fn of_congruences(congruences: Vec<Congruence>) -> Self {
        Locus { components: vec![LocusComponent::SubtorusCoset { congruences }] }
    }
}

/// Exact in-memory form of a locus component.
#[derive(Debug, Clone, PartialEq)]
enum ParsedComponent {
    Points(Vec<Vec<Gq>>),
    Linear { matrix: Vec<Vec<Gq>>, rhs: Vec<Gq> },
    Coset(Vec<(Vec<i64>, Gq)>),
}

#[derive(Debug, Clone, PartialEq, Default)]
struct ParsedLocus {
    components: Vec<ParsedComponent>,
}

fn parse_scalar(s: &str) -> Result<Gq, GlueError> {
    s.parse().map_err(|e| GlueError::Parse(format!("cannot parse scalar {s:?}: {e}")))
}

/// Parses a locus and checks it fits the base: arities match, linear
/// components only over affine bases, congruences only over tori, and
/// listed points actually on the base.
fn parse_locus(
    base: &BaseSpace,
    action: Option<&LatticeAction>,
    locus: &Locus,
) -> Result<ParsedLocus, GlueError> {
    let arity = base.arity();
    let mut components = Vec::with_capacity(locus.components.len());
    for component in &locus.components {
        components.push(match component {
            LocusComponent::Points { points } => {
                let mut parsed = Vec::with_capacity(points.len());
                for p in points {
                    if p.len() != arity {
                        return Err(GlueError::LocusOffBase(format!(
                            "point with {} coordinates over a base of arity {arity}",
                            p.len()
                        )));
                    }
                    let q: Vec<Gq> = p.iter().map(|s| parse_scalar(s)).collect::<Result<_, _>>()?;
                    if let Some(a) = action {
                        if !a.is_on_torus(&q) {
                            return Err(GlueError::LocusOffBase(format!(
                                "point {p:?} is not on the torus"
                            )));
                        }
                    }
                    parsed.push(q);
                }
                ParsedComponent::Points(parsed)
            }
            LocusComponent::Linear { matrix, rhs } => {
                if action.is_some() {
                    return Err(GlueError::LocusOffBase(
                        "linear components require an affine base".into(),
                    ));
                }
                if matrix.len() != rhs.len() {
                    return Err(GlueError::LocusOffBase(format!(
                        "{} equations with {} right-hand sides",
                        matrix.len(),
                        rhs.len()
                    )));
                }
                let mut rows = Vec::with_capacity(matrix.len());
                for row in matrix {
                    if row.len() != arity {
                        return Err(GlueError::LocusOffBase(format!(
                            "equation with {} coefficients over a base of arity {arity}",
                            row.len()
                        )));
                    }
                    rows.push(row.iter().map(|s| parse_scalar(s)).collect::<Result<_, _>>()?);
                }
                let rhs = rhs.iter().map(|s| parse_scalar(s)).collect::<Result<_, _>>()?;
                ParsedComponent::Linear { matrix: rows, rhs }
            }
            LocusComponent::SubtorusCoset { congruences } => {
                if action.is_none() {
                    return Err(GlueError::LocusOffBase(
                        "congruence components require a torus base".into(),
                    ));
                }
                let mut parsed = Vec::with_capacity(congruences.len());
                for c in congruences {
                    if c.exponents.len() != arity {
                        return Err(GlueError::LocusOffBase(format!(
                            "congruence with {} exponents over a base of arity {arity}",
                            c.exponents.len()
                        )));
                    }
                    let value = parse_scalar(&c.value)?;
                    if value.is_zero() {
                        return Err(GlueError::LocusOffBase(
                            "congruence value must be nonzero".into(),
                        ));
                    }
                    parsed.push((c.exponents.clone(), value));
                }
                ParsedComponent::Coset(parsed)
            }
        });
    }
    Ok(ParsedLocus { components })
}

/// Plain (unsaturated) membership of a point in one component.
fn component_contains(component: &ParsedComponent, x: &[Gq]) -> bool {
    match component {
        ParsedComponent::Points(ps) => ps.iter().any(|p| p.as_slice() == x),
        ParsedComponent::Linear { matrix, rhs } => matrix.iter().zip(rhs).all(|(row, b)| {
            let mut acc = Gq::zero();
            for (a, t) in row.iter().zip(x) {
                let term = a * t;
                acc = &acc + &term;
            }
            acc == *b
        }),
        ParsedComponent::Coset(congs) => congs.iter().all(|(e, v)| {
            let mut acc = Gq::one();
            for (t, &k) in x.iter().zip(e) {
                if k != 0 {
                    acc = &acc * &t.pow(k).expect("nonzero coordinate");
                }
            }
            acc == *v
        }),
    }
}

// ---------------------------------------------------------------------------
// Glued spaces
// ---------------------------------------------------------------------------

/// A doubling instruction: over `locus` (with `minus` removed, when given)
/// add `extra` sheets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoublingSpec {
    pub locus: Locus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus: Option<Locus>,
    pub extra: u64,
}

/// One connected piece of a model in file form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceJson {
    pub base: BaseSpace,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub doubling: Vec<DoublingSpec>,
}

/// Model files: either a single piece or a disjoint union of pieces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelJson {
    Single(PieceJson),
    Union { pieces: Vec<PieceJson> },
}

#[derive(Debug, Clone)]
struct DoublingEntry {
    locus: ParsedLocus,
    minus: ParsedLocus,
    extra: u64,
}

#[derive(Debug, Clone)]
struct Piece {
    base: BaseSpace,
    action: Option<LatticeAction>,
    doubling: Vec<DoublingEntry>,
}

impl Piece {
    fn arity(&self) -> usize {
        self.base.arity()
    }

    /// Dimension of the base as a variety.
    fn base_dim(&self) -> usize {
        match (&self.base, &self.action) {
            (BaseSpace::Affine { dim }, _) => *dim,
            (BaseSpace::TorusQuotient { .. }, Some(a)) => {
                a.rank() - usize::from(a.kernel().is_some())
            }
            (BaseSpace::TorusQuotient { .. }, None) => unreachable!("torus pieces keep an action"),
        }
    }

    fn check_point(&self, x: &[Gq]) -> Result<(), GlueError> {
        match &self.action {
            None => {
                if x.len() != self.arity() {
                    return Err(GlueError::PointOffBase(format!(
                        "expected {} coordinates, got {}",
                        self.arity(),
                        x.len()
                    )));
                }
            }
            Some(a) => {
                if !a.is_on_torus(x) {
                    return Err(GlueError::PointOffBase(format!("{x:?} is not on the torus")));
                }
            }
        }
        Ok(())
    }

    /// All coordinate tuples naming the same base point (just the point
    /// itself over affine bases).
    fn orbit(&self, x: &[Gq]) -> Vec<Vec<Gq>> {
        match &self.action {
            None => vec![x.to_vec()],
            Some(a) => (0..a.group().order()).map(|g| a.point_action(g, x)).collect(),
        }
    }

    /// Saturated membership: does the orbit of `x` meet the locus?
    fn locus_contains(&self, locus: &ParsedLocus, x: &[Gq]) -> bool {
        self.orbit(x)
            .iter()
            .any(|y| locus.components.iter().any(|c| component_contains(c, y)))
    }

    /// Saturated membership in the locally closed support locus − minus.
    fn support_contains(&self, entry: &DoublingEntry, x: &[Gq]) -> bool {
        self.orbit(x).iter().any(|y| {
            entry.locus.components.iter().any(|c| component_contains(c, y))
                && !entry.minus.components.iter().any(|c| component_contains(c, y))
        })
    }

    /// δ at a base point.
    fn multiplicity(&self, x: &[Gq]) -> u64 {
        1 + self
            .doubling
            .iter()
            .filter(|d| self.support_contains(d, x))
            .map(|d| d.extra)
            .sum::<u64>()
    }

    /// Total number of charts (the largest possible copy index plus one).
    fn chart_count(&self) -> u64 {
        1 + self.doubling.iter().map(|d| d.extra).sum::<u64>()
    }
}

/// A chart model of a non-separated space: copies of the base glued along
/// the complement of the doubled loci, possibly in several disjoint pieces.
#[derive(Debug, Clone)]
pub struct GluedSpace {
    pieces: Vec<Piece>,
}

/// Builds a one-piece glued space over the base.
pub fn build_glued(base: BaseSpace, doubling: &[DoublingSpec]) -> Result<GluedSpace, GlueError> {
    let action = match &base {
        BaseSpace::Affine { .. } => None,
        BaseSpace::TorusQuotient { action } => Some(
            LatticeAction::from_json(action).map_err(|e| GlueError::Validation(e.to_string()))?,
        ),
    };
    let mut entries = Vec::with_capacity(doubling.len());
    for spec in doubling {
        let locus = parse_locus(&base, action.as_ref(), &spec.locus)?;
        if locus.components.is_empty() {
            return Err(GlueError::LocusOffBase("a doubling needs a nonempty locus".into()));
        }
        let minus = match &spec.minus {
            None => ParsedLocus::default(),
            Some(m) => parse_locus(&base, action.as_ref(), m)?,
        };
        if spec.extra == 0 {
            return Err(GlueError::Validation("a doubling must add at least one sheet".into()));
        }
        entries.push(DoublingEntry { locus, minus, extra: spec.extra });
    }
    Ok(GluedSpace { pieces: vec![Piece { base, action, doubling: entries }] })
}

/// The disjoint union of finished models.
pub fn disjoint_union(spaces: Vec<GluedSpace>) -> GluedSpace {
    GluedSpace { pieces: spaces.into_iter().flat_map(|s| s.pieces).collect() }
}

/// Builds a model from its file form.
pub fn build_model(model: &ModelJson) -> Result<GluedSpace, GlueError> {
    match model {
        ModelJson::Single(p) => build_glued(p.base.clone(), &p.doubling),
        ModelJson::Union { pieces } => {
            let mut built = Vec::with_capacity(pieces.len());
            for p in pieces {
                built.push(build_glued(p.base.clone(), &p.doubling)?);
            }
            Ok(disjoint_union(built))
        }
    }
}

/// Parses and builds a model from JSON text.
pub fn from_model_json(json: &str) -> Result<GluedSpace, GlueError> {
    let model: ModelJson =
        serde_json::from_str(json).map_err(|e| GlueError::Parse(e.to_string()))?;
    build_model(&model)
}

/// The coset v^s·C of a carrier subtorus C, written as congruences: for
/// each relation column r of the carrier, x^r = v^{⟨s,r⟩}.
fn shifted_coset(
    carrier: &SubtorusData,
    shift: &[i64],
    v: &Gq,
) -> Result<ParsedComponent, GlueError> {
    let n = carrier.generating_relations.len();
    if n != shift.len() {
        return Err(GlueError::Validation(format!(
            "shift of length {} for a rank-{n} carrier",
            shift.len()
        )));
    }
    let cols = carrier.generating_relations.first().map_or(0, Vec::len);
    let mut congruences = Vec::with_capacity(cols);
    for j in 0..cols {
        let e: Vec<i64> = (0..n).map(|i| carrier.generating_relations[i][j]).collect();
        let dot: i64 = e.iter().zip(shift).map(|(a, b)| a * b).sum();
        let value = v.pow(dot).map_err(|err| GlueError::Validation(err.to_string()))?;
        congruences.push((e, value));
    }
    Ok(ParsedComponent::Coset(congruences))
}

/// Builds the glued parameter-space model attached to deformation glue
/// data: the quotient base, with every doubled stratum contributing its
/// shifted carrier minus the deeper loci where its sheets merge away.
pub fn from_theta(data: &ThetaGlueData) -> Result<GluedSpace, GlueError> {
    let action =
        LatticeAction::from_json(&data.action).map_err(|e| GlueError::Validation(e.to_string()))?;
    let v: Gq = data
        .v
        .parse()
        .map_err(|e| GlueError::Parse(format!("cannot parse v {:?}: {e}", data.v)))?;
    if v.is_zero() {
        return Err(GlueError::Validation("v must be nonzero".into()));
    }
    let mut entries = Vec::with_capacity(data.doublings.len());
    for d in &data.doublings {
        if d.extra == 0 {
            continue;
        }
        let locus = ParsedLocus {
            components: vec![shifted_coset(&d.carrier, &d.shift_v_exponents, &v)?],
        };
        let minus = ParsedLocus {
            components: d
                .minus
                .iter()
                .map(|m| shifted_coset(m, &d.shift_v_exponents, &v))
                .collect::<Result<_, _>>()?,
        };
        entries.push(DoublingEntry { locus, minus, extra: d.extra as u64 });
    }
    Ok(GluedSpace {
        pieces: vec![Piece {
            base: BaseSpace::TorusQuotient { action: data.action.clone() },
            action: Some(action),
            doubling: entries,
        }],
    })
}

// ---------------------------------------------------------------------------
// Points and closure queries
// ---------------------------------------------------------------------------

/// A point of a glued space: which piece, which sheet copy, and the base
/// coordinates.  Valid copies at `coords` are 0 … δ(coords) − 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GluedPoint {
    pub piece: usize,
    pub copy: usize,
    pub coords: Vec<Gq>,
}

impl GluedPoint {
    pub fn new(piece: usize, copy: usize, coords: Vec<Gq>) -> Self {
        GluedPoint { piece, copy, coords }
    }
}

/// A constructible set for closure queries: the part of `locus` outside
/// `minus`, placed on one copy (or on every valid copy when `copy` is
/// None).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetDescriptor {
    #[serde(default)]
    pub piece: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub copy: Option<usize>,
    pub locus: Locus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus: Option<Locus>,
}

impl GluedSpace {
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn base(&self, piece: usize) -> Result<&BaseSpace, GlueError> {
        Ok(&self.piece(piece)?.base)
    }

    fn piece(&self, i: usize) -> Result<&Piece, GlueError> {
        self.pieces.get(i).ok_or_else(|| GlueError::Validation(format!("no piece {i}")))
    }

    /// δ: how many points of the glued space lie over the base point.
    pub fn multiplicity_at(&self, piece: usize, x: &[Gq]) -> Result<u64, GlueError> {
        let p = self.piece(piece)?;
        p.check_point(x)?;
        Ok(p.multiplicity(x))
    }

    /// Whether the candidate lies in the closure of the set.  Chart
    /// semantics: true exactly when some chart containing the candidate has
    /// it inside the chart-level Zariski closure of the set's restriction.
    /// A candidate in the separated region (δ = 1) lies in every chart;
    /// otherwise only in the chart of its own copy.
    pub fn closure_contains(
        &self,
        set: &SetDescriptor,
        candidate: &GluedPoint,
    ) -> Result<bool, GlueError> {
        let p = self.piece(candidate.piece)?;
        p.check_point(&candidate.coords)?;
        let delta = p.multiplicity(&candidate.coords);
        if (candidate.copy as u64) >= delta {
            return Err(GlueError::PointOffBase(format!(
                "copy {} of a point with multiplicity {delta}",
                candidate.copy
            )));
        }
        self.piece(set.piece)?;
        if set.piece != candidate.piece {
            // Pieces are disjoint: nothing from one piece closes into
            // another.
            return Ok(false);
        }
        let a = parse_locus(&p.base, p.action.as_ref(), &set.locus)?;
        let b = match &set.minus {
            None => ParsedLocus::default(),
            Some(m) => parse_locus(&p.base, p.action.as_ref(), m)?,
        };
        let charts: Vec<u64> = if delta == 1 {
            (0..p.chart_count()).collect()
        } else {
            vec![candidate.copy as u64]
        };
        for k in charts {
            // The set's restriction to chart k: the full set when the
            // descriptor covers copy k, otherwise only its separated part
            // (everything over the doubled loci stays behind).
            let applies = set.copy.is_none() || set.copy == Some(k as usize);
            let mut cut = b.clone();
            if !applies {
                for d in &p.doubling {
                    cut.components.extend(d.locus.components.iter().cloned());
                }
            }
            if closure_of_difference_contains(p, &a, &cut, &candidate.coords) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Whether `x` lies in the Zariski closure of (a − cut).  Each listed
/// component is closed, so the closure is the union of the components not
/// swallowed by the cut; point lists are handled point by point.  A
/// containment the restricted language cannot prove keeps the component,
/// erring toward a larger closure.
fn closure_of_difference_contains(
    piece: &Piece,
    a: &ParsedLocus,
    cut: &ParsedLocus,
    x: &[Gq],
) -> bool {
    let orbit = piece.orbit(x);
    a.components.iter().any(|component| match component {
        ParsedComponent::Points(ps) => ps
            .iter()
            .any(|p| orbit.iter().any(|y| y == p) && !piece.locus_contains(cut, p)),
        other => {
            orbit.iter().any(|y| component_contains(other, y))
                && !component_inside(piece, other, cut)
        }
    })
}

/// Proves containment of a component in a union of components within the
/// restricted language.  Declared-irreducible components must land inside a
/// single target (finite point lists are checked pointwise); on quotient
/// bases the targets are tried translate by translate.
fn component_inside(piece: &Piece, component: &ParsedComponent, cut: &ParsedLocus) -> bool {
    if cut.components.is_empty() {
        return false;
    }
    match component {
        ParsedComponent::Points(ps) => ps.iter().all(|p| piece.locus_contains(cut, p)),
        ParsedComponent::Linear { matrix, rhs } => {
            let arity = piece.arity();
            let m = QiMatrix::from_rows(matrix.clone());
            if m.rank() == arity {
                // A zero-dimensional consistent system is a single point.
                return match m.solve(rhs) {
                    Some(p) => piece.locus_contains(cut, &p),
                    None => true, // inconsistent: the empty set
                };
            }
            cut.components.iter().any(|t| linear_inside(matrix, rhs, t))
        }
        ParsedComponent::Coset(congs) => cut.components.iter().any(|t| {
            let target = match t {
                ParsedComponent::Coset(target) => target,
                _ => return false,
            };
            match &piece.action {
                None => coset_inside(congs, target),
                Some(a) => (0..a.group().order())
                    .any(|g| coset_inside(congs, &translate_coset(a, g, target))),
            }
        }),
    }
}

/// Every solution of matrix·x = rhs also satisfies the target linear
/// system: the target's augmented rows lie in the row space of this
/// system's augmented rows.
fn linear_inside(matrix: &[Vec<Gq>], rhs: &[Gq], target: &ParsedComponent) -> bool {
    let (tm, tr) = match target {
        ParsedComponent::Linear { matrix, rhs } => (matrix, rhs),
        _ => return false,
    };
    let aug = |m: &[Vec<Gq>], r: &[Gq]| -> Vec<Vec<Gq>> {
        m.iter()
            .zip(r)
            .map(|(row, b)| {
                let mut v = row.clone();
                v.push(b.clone());
                v
            })
            .collect()
    };
    let base_rows = aug(matrix, rhs);
    let mut all_rows = base_rows.clone();
    all_rows.extend(aug(tm, tr));
    if base_rows.is_empty() {
        // The whole space: contained only in the whole space.
        return all_rows.is_empty() || QiMatrix::from_rows(all_rows).rank() == 0;
    }
    QiMatrix::from_rows(base_rows).rank() == QiMatrix::from_rows(all_rows).rank()
}

/// The γ-translate of a coset: pulling the congruences back along γ⁻¹
/// maps the exponent vector e to M_γ·e and keeps the value.
fn translate_coset(action: &LatticeAction, g: usize, congs: &[(Vec<i64>, Gq)]) -> Vec<(Vec<i64>, Gq)> {
    let m = action.matrix(g);
    congs
        .iter()
        .map(|(e, v)| {
            let moved: Vec<i64> =
                (0..e.len()).map(|j| (0..e.len()).map(|i| m[j][i] * e[i]).sum()).collect();
            (moved, v.clone())
        })
        .collect()
}

/// Coset containment: every congruence of the target is a ℤ-combination of
/// this coset's congruences with the matching value.  The source coset is
/// assumed nonempty (all cosets built here come from carriers or model
/// files that name actual points).
fn coset_inside(a: &[(Vec<i64>, Gq)], b: &[(Vec<i64>, Gq)]) -> bool {
    if a.is_empty() {
        // The whole torus: contained only in (a presentation of) the whole
        // torus.
        return b.iter().all(|(e, v)| e.iter().all(|&k| k == 0) && v.is_one());
    }
    let n = a[0].0.len();
    let s = a.len();
    // Columns of the relation matrix are this coset's exponent vectors.
    let rows: Vec<Vec<i64>> = (0..n).map(|i| a.iter().map(|(e, _)| e[i]).collect()).collect();
    let snf = smith_normal_form(&rows);
    let diag = snf.diagonal();
    for (e, v) in b {
        // Solve M·k = e through the normal form: D·k' = U·e, k = V·k'.
        let c: Vec<BigInt> = (0..n)
            .map(|i| (0..n).fold(BigInt::zero(), |acc, j| acc + &snf.u[i][j] * BigInt::from(e[j])))
            .collect();
        let mut kprime = vec![BigInt::zero(); s];
        let mut solvable = true;
        for (i, ci) in c.iter().enumerate() {
            match diag.get(i) {
                Some(d) if !d.is_zero() => {
                    if (ci % d).is_zero() {
                        kprime[i] = ci / d;
                    } else {
                        solvable = false;
                        break;
                    }
                }
                _ => {
                    if !ci.is_zero() {
                        solvable = false;
                        break;
                    }
                }
            }
        }
        if !solvable {
            return false;
        }
        let k: Vec<BigInt> = (0..s)
            .map(|t| (0..s).fold(BigInt::zero(), |acc, j| acc + &snf.v[t][j] * &kprime[j]))
            .collect();
        let mut acc = Gq::one();
        for ((_, va), kt) in a.iter().zip(&k) {
            let Some(kt) = kt.to_i64() else { return false };
            acc = &acc * &va.pow(kt).expect("nonzero congruence value");
        }
        if acc != *v {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Invariants and comparison
// ---------------------------------------------------------------------------

/// One entry of a multiplicity profile: a generic multiplicity achieved on
/// a locus of the given dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub multiplicity: u64,
    pub dim: usize,
}

/// Invariants of a glued model at counting resolution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelInvariants {
    /// Connected components.  Doubling never disconnects a piece, so this
    /// is the number of pieces.
    pub components: u64,
    /// Whether two distinct points share a base point somewhere.
    pub has_nonseparated_pair: bool,
    /// Generic multiplicities per listed locus, with the locus dimension.
    pub multiplicity_profile: Vec<ProfileEntry>,
}

impl GluedSpace {
    /// Computes the comparison invariants of this model.
    pub fn invariants(&self) -> ModelInvariants {
        let mut profile = BTreeSet::new();
        let mut nonseparated = false;
        for p in &self.pieces {
            profile.insert(ProfileEntry { multiplicity: 1, dim: p.base_dim() });
            for (i, d) in p.doubling.iter().enumerate() {
                if !support_nonempty(p, d) {
                    continue;
                }
                nonseparated = true;
                // Generic multiplicity on this locus: its own sheets plus
                // those of every doubling whose support provably contains
                // it.
                let mut m = 1 + d.extra;
                for (j, other) in p.doubling.iter().enumerate() {
                    if i != j && support_swallows(p, other, &d.locus) {
                        m += other.extra;
                    }
                }
                profile.insert(ProfileEntry {
                    multiplicity: m,
                    dim: locus_dim(&d.locus, p.arity()),
                });
            }
        }
        ModelInvariants {
            components: self.pieces.len() as u64,
            has_nonseparated_pair: nonseparated,
            multiplicity_profile: profile.into_iter().collect(),
        }
    }
}

/// Whether `other`'s support generically contains the locus: inside
/// `other`'s locus but not provably inside its cut.
fn support_swallows(piece: &Piece, other: &DoublingEntry, locus: &ParsedLocus) -> bool {
    locus.components.iter().all(|c| component_inside(piece, c, &other.locus))
        && !locus.components.iter().all(|c| component_inside(piece, c, &other.minus))
}

/// Whether a doubling's support provably keeps a point.
fn support_nonempty(piece: &Piece, d: &DoublingEntry) -> bool {
    d.locus.components.iter().any(|c| !component_inside(piece, c, &d.minus))
}

fn component_dim(component: &ParsedComponent, arity: usize) -> usize {
    match component {
        ParsedComponent::Points(_) => 0,
        ParsedComponent::Linear { matrix, .. } => {
            arity - QiMatrix::from_rows(matrix.clone()).rank().min(arity)
        }
        ParsedComponent::Coset(congs) => {
            let rows: Vec<Vec<i64>> = congs.iter().map(|(e, _)| e.clone()).collect();
            arity - smith_normal_form(&rows).rank().min(arity)
        }
    }
}

fn locus_dim(locus: &ParsedLocus, arity: usize) -> usize {
    locus.components.iter().map(|c| component_dim(c, arity)).max().unwrap_or(0)
}

/// The outcome of comparing two models.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ComparisonVerdict {
    /// Some computed invariant differs, so no homeomorphism can exist.
    NotHomeomorphic { differing: Vec<String> },
    /// Every computed invariant agrees; the models may or may not be
    /// homeomorphic.
    IndistinguishableAtThisResolution,
}

/// Side-by-side invariants of two models with the comparison verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub left: ModelInvariants,
    pub right: ModelInvariants,
    pub verdict: ComparisonVerdict,
}

/// Compares two models by their computed invariants.  A differing invariant
/// rules out a homeomorphism; agreement is reported as agreement, never as
/// a positive identification.
pub fn distinguishing_invariants(left: &GluedSpace, right: &GluedSpace) -> ComparisonReport {
    let l = left.invariants();
    let r = right.invariants();
    let mut differing = Vec::new();
    if l.components != r.components {
        differing.push("components".to_string());
    }
    if l.has_nonseparated_pair != r.has_nonseparated_pair {
        differing.push("non_separated_pair".to_string());
    }
    if l.multiplicity_profile != r.multiplicity_profile {
        differing.push("multiplicity_profile".to_string());
    }
    let verdict = if differing.is_empty() {
        ComparisonVerdict::IndistinguishableAtThisResolution
    } else {
        ComparisonVerdict::NotHomeomorphic { differing }
    };
    ComparisonReport { left: l, right: r, verdict }
}

// ---------------------------------------------------------------------------
// Products
// ---------------------------------------------------------------------------

/// A finite product of one-piece affine glued models.
#[derive(Debug, Clone)]
pub struct GluedProduct {
    factors: Vec<GluedSpace>,
    dims: Vec<usize>,
}

/// Builds the product of single-piece models with affine bases.
pub fn build_product(factors: Vec<GluedSpace>) -> Result<GluedProduct, GlueError> {
    if factors.is_empty() {
        return Err(GlueError::Validation("a product needs at least one factor".into()));
    }
    let mut dims = Vec::with_capacity(factors.len());
    for f in &factors {
        if f.pieces.len() != 1 {
            return Err(GlueError::Validation(
                "product factors must be single-piece models".into(),
            ));
        }
        match &f.pieces[0].base {
            BaseSpace::Affine { dim } => dims.push(*dim),
            BaseSpace::TorusQuotient { .. } => {
                return Err(GlueError::Validation("product factors must have affine bases".into()))
            }
        }
    }
    Ok(GluedProduct { factors, dims })
}

/// A point of a product: one (copy, coordinates) pair per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPoint {
    pub copies: Vec<usize>,
    pub coords: Vec<Vec<Gq>>,
}

/// A constructible set for closures in a product, written over the
/// concatenated coordinates; `copies` pins it to one chart tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSet {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub copies: Option<Vec<usize>>,
    pub locus: Locus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus: Option<Locus>,
}

impl GluedProduct {
    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    fn factor_piece(&self, f: usize) -> &Piece {
        &self.factors[f].pieces[0]
    }

    /// δ on the product: the product of the factor multiplicities.
    pub fn multiplicity_at(&self, coords: &[Vec<Gq>]) -> Result<u64, GlueError> {
        if coords.len() != self.factors.len() {
            return Err(GlueError::PointOffBase(format!(
                "expected {} factors, got {}",
                self.factors.len(),
                coords.len()
            )));
        }
        let mut total = 1u64;
        for (f, x) in coords.iter().enumerate() {
            total *= self.factors[f].multiplicity_at(0, x)?;
        }
        Ok(total)
    }

    /// Chart-by-chart closure over the product: charts are tuples of factor
    /// copies, and the candidate lies in a tuple when every factor's copy
    /// matches or is separated there.
    pub fn closure_contains(
        &self,
        set: &ProductSet,
        candidate: &ProductPoint,
    ) -> Result<bool, GlueError> {
        if candidate.copies.len() != self.factors.len()
            || candidate.coords.len() != self.factors.len()
        {
            return Err(GlueError::PointOffBase("wrong number of factors".into()));
        }
        let mut deltas = Vec::with_capacity(self.factors.len());
        for (f, x) in candidate.coords.iter().enumerate() {
            let d = self.factors[f].multiplicity_at(0, x)?;
            if (candidate.copies[f] as u64) >= d {
                return Err(GlueError::PointOffBase(format!(
                    "copy {} of a factor-{f} point with multiplicity {d}",
                    candidate.copies[f]
                )));
            }
            deltas.push(d);
        }
        if let Some(copies) = &set.copies {
            if copies.len() != self.factors.len() {
                return Err(GlueError::UnsupportedDescriptor(
                    "copy selector arity differs from the factor count".into(),
                ));
            }
        }
        let total = self.total_dim();
        let base = BaseSpace::Affine { dim: total };
        let a = parse_locus(&base, None, &set.locus)?;
        let b = match &set.minus {
            None => ParsedLocus::default(),
            Some(m) => parse_locus(&base, None, m)?,
        };
        let virtual_piece = Piece { base, action: None, doubling: Vec::new() };
        let chart_choices: Vec<Vec<u64>> = (0..self.factors.len())
            .map(|f| {
                if deltas[f] == 1 {
                    (0..self.factor_piece(f).chart_count()).collect()
                } else {
                    vec![candidate.copies[f] as u64]
                }
            })
            .collect();
        let flat: Vec<Gq> = candidate.coords.concat();
        for tuple in cartesian(&chart_choices) {
            let applies = match &set.copies {
                None => true,
                Some(copies) => copies.iter().zip(&tuple).all(|(&c, &k)| c as u64 == k),
            };
            let mut cut = b.clone();
            if !applies {
                // Only the separated part of the set survives into other
                // chart tuples: remove every factor's doubled loci, lifted
                // to the product.
                for f in 0..self.factors.len() {
                    let offset: usize = self.dims[..f].iter().sum();
                    for d in &self.factor_piece(f).doubling {
                        for c in &d.locus.components {
                            cut.components.extend(lift_component(c, offset, self.dims[f], total)?);
                        }
                    }
                }
            }
            if closure_of_difference_contains(&virtual_piece, &a, &cut, &flat) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn cartesian(choices: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for &k in c {
                let mut p = prefix.clone();
                p.push(k);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Lifts a factor-level component to the product by padding coordinates:
/// points become linear blocks {x_block = p}, linear systems gain zero
/// columns.
fn lift_component(
    component: &ParsedComponent,
    offset: usize,
    dim: usize,
    total: usize,
) -> Result<Vec<ParsedComponent>, GlueError> {
    match component {
        ParsedComponent::Points(ps) => Ok(ps
            .iter()
            .map(|p| {
                let mut matrix = Vec::with_capacity(dim);
                let mut rhs = Vec::with_capacity(dim);
                for (i, val) in p.iter().enumerate() {
                    let mut row = vec![Gq::zero(); total];
                    row[offset + i] = Gq::one();
                    matrix.push(row);
                    rhs.push(val.clone());
                }
                ParsedComponent::Linear { matrix, rhs }
            })
            .collect()),
        ParsedComponent::Linear { matrix, rhs } => {
            let lifted = matrix
                .iter()
                .map(|row| {
                    let mut r = vec![Gq::zero(); total];
                    r[offset..offset + dim].clone_from_slice(row);
                    r
                })
                .collect();
            Ok(vec![ParsedComponent::Linear { matrix: lifted, rhs: rhs.clone() }])
        }
        ParsedComponent::Coset(_) => Err(GlueError::UnsupportedDescriptor(
            "torus cosets do not lift to affine products".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exquo::{
        extended_quotient, gl2_swap_action, gl2_theta_shift, sl3_quotient_action, sl5d_action,
        theta_glue_data, twisted_extended_quotient, ExtendedQuotient, ThetaShift,
    };

    fn q(s: &str) -> Gq {
        s.parse().expect("scalar")
    }

    fn pt(coords: &[&str]) -> Vec<Gq> {
        coords.iter().map(|s| q(s)).collect()
    }

    fn doubled_line() -> GluedSpace {
        build_glued(
            BaseSpace::Affine { dim: 1 },
            &[DoublingSpec { locus: Locus::of_points(&[&["0"]]), minus: None, extra: 1 }],
        )
        .expect("doubled line")
    }

    fn diagonal_locus() -> Locus {
        Locus::of_congruences(vec![Congruence { exponents: vec![1, -1], value: "1".into() }])
    }

    fn zero_shift_model(eq: &ExtendedQuotient, v: &str) -> GluedSpace {
        from_theta(&theta_glue_data(eq, &ThetaShift::zero_for(eq, v)).expect("glue data"))
            .expect("model")
    }

    #[test]
    fn multiplicity_on_the_doubled_line() {
        let s = doubled_line();
        assert_eq!(s.multiplicity_at(0, &pt(&["0"])).unwrap(), 2);
        assert_eq!(s.multiplicity_at(0, &pt(&["1"])).unwrap(), 1);
        assert_eq!(s.multiplicity_at(0, &pt(&["-7/3"])).unwrap(), 1);
        let plain = build_glued(BaseSpace::Affine { dim: 1 }, &[]).unwrap();
        assert_eq!(plain.multiplicity_at(0, &pt(&["0"])).unwrap(), 1);
        assert!(matches!(
            s.multiplicity_at(0, &pt(&["1", "2"])),
            Err(GlueError::PointOffBase(_))
        ));
        assert!(matches!(s.multiplicity_at(1, &pt(&["1"])), Err(GlueError::Validation(_))));
    }

    #[test]
    fn both_origins_lie_in_the_closure_of_the_punctured_line() {
        let s = doubled_line();
        let punctured = SetDescriptor {
            piece: 0,
            copy: None,
            locus: Locus::of_linear(&[], &[]),
            minus: Some(Locus::of_points(&[&["0"]])),
        };
        for copy in 0..2 {
            let candidate = GluedPoint::new(0, copy, pt(&["0"]));
            assert!(
                s.closure_contains(&punctured, &candidate).unwrap(),
                "origin copy {copy} closes the punctured line"
            );
        }
        // An ordinary point of the punctured line is in the closure too.
        assert!(s.closure_contains(&punctured, &GluedPoint::new(0, 0, pt(&["2"]))).unwrap());
    }

    #[test]
    fn single_points_are_closed() {
        let s = doubled_line();
        let first_origin = SetDescriptor {
            piece: 0,
            copy: Some(0),
            locus: Locus::of_points(&[&["0"]]),
            minus: None,
        };
        assert!(s.closure_contains(&first_origin, &GluedPoint::new(0, 0, pt(&["0"]))).unwrap());
        assert!(
            !s.closure_contains(&first_origin, &GluedPoint::new(0, 1, pt(&["0"]))).unwrap(),
            "the other copy is not in the closure of one origin"
        );
        assert!(!s.closure_contains(&first_origin, &GluedPoint::new(0, 0, pt(&["1"]))).unwrap());
        // Copy indices beyond the multiplicity are rejected.
        assert!(matches!(
            s.closure_contains(&first_origin, &GluedPoint::new(0, 2, pt(&["0"]))),
            Err(GlueError::PointOffBase(_))
        ));
        assert!(matches!(
            s.closure_contains(&first_origin, &GluedPoint::new(0, 1, pt(&["1"]))),
            Err(GlueError::PointOffBase(_))
        ));
    }

    #[test]
    fn closure_grows_with_the_set() {
        let s = doubled_line();
        let small =
            SetDescriptor { piece: 0, copy: None, locus: Locus::of_points(&[&["0"]]), minus: None };
        let large =
            SetDescriptor { piece: 0, copy: None, locus: Locus::of_linear(&[], &[]), minus: None };
        // With no copy pinned, the small set is both origin copies; its
        // closure is itself.
        assert!(s.closure_contains(&small, &GluedPoint::new(0, 1, pt(&["0"]))).unwrap());
        assert!(!s.closure_contains(&small, &GluedPoint::new(0, 0, pt(&["1"]))).unwrap());
        // Monotonicity over a sample of candidates.
        for (copy, x) in [(0usize, "0"), (1, "0"), (0, "1"), (0, "-3/2")] {
            let candidate = GluedPoint::new(0, copy, pt(&[x]));
            let in_small = s.closure_contains(&small, &candidate).unwrap();
            let in_large = s.closure_contains(&large, &candidate).unwrap();
            assert!(!in_small || in_large, "closure must grow with the set at {x}");
        }
    }

    #[test]
    fn product_of_doubled_lines() {
        let line = doubled_line();
        let p = build_product(vec![line.clone(), line]).expect("product");
        assert_eq!(p.factor_count(), 2);
        assert_eq!(p.multiplicity_at(&[pt(&["0"]), pt(&["0"])]).unwrap(), 4);
        assert_eq!(p.multiplicity_at(&[pt(&["0"]), pt(&["2"])]).unwrap(), 2);
        assert_eq!(p.multiplicity_at(&[pt(&["1"]), pt(&["2"])]).unwrap(), 1);
        // All four origins lie in the closure of the diagonal.
        let diagonal = ProductSet {
            copies: None,
            locus: Locus::of_linear(&[&["1", "-1"]], &["0"]),
            minus: None,
        };
        for c0 in 0..2 {
            for c1 in 0..2 {
                let candidate =
                    ProductPoint { copies: vec![c0, c1], coords: vec![pt(&["0"]), pt(&["0"])] };
                assert!(
                    p.closure_contains(&diagonal, &candidate).unwrap(),
                    "origin ({c0}, {c1}) closes the diagonal"
                );
            }
        }
        // The same holds for the punctured diagonal.
        let punctured = ProductSet {
            copies: None,
            locus: Locus::of_linear(&[&["1", "-1"]], &["0"]),
            minus: Some(Locus::of_points(&[&["0", "0"]])),
        };
        let candidate = ProductPoint { copies: vec![1, 1], coords: vec![pt(&["0"]), pt(&["0"])] };
        assert!(p.closure_contains(&punctured, &candidate).unwrap());
        // One product origin on its own is closed.
        let corner = ProductSet {
            copies: Some(vec![0, 0]),
            locus: Locus::of_points(&[&["0", "0"]]),
            minus: None,
        };
        let origin = |c0, c1| ProductPoint { copies: vec![c0, c1], coords: vec![pt(&["0"]), pt(&["0"])] };
        assert!(p.closure_contains(&corner, &origin(0, 0)).unwrap());
        for (c0, c1) in [(0usize, 1usize), (1, 0), (1, 1)] {
            assert!(
                !p.closure_contains(&corner, &origin(c0, c1)).unwrap(),
                "origin ({c0}, {c1}) escapes the closure of one corner"
            );
        }
        // Copy validity is enforced.
        let bad = ProductPoint { copies: vec![0, 1], coords: vec![pt(&["0"]), pt(&["3"])] };
        assert!(matches!(p.closure_contains(&corner, &bad), Err(GlueError::PointOffBase(_))));
    }

    #[test]
    fn theta_model_for_the_swap_action_doubles_the_shifted_diagonal() {
        let eq = extended_quotient(&gl2_swap_action()).expect("quotient");
        let data = theta_glue_data(&eq, &gl2_theta_shift("2")).expect("glue data");
        let s = from_theta(&data).expect("model");
        // The doubled curve is {(z/2, 2z)}: x₀/x₁ = 1/4 up to the swap.
        assert_eq!(s.multiplicity_at(0, &pt(&["3/2", "6"])).unwrap(), 2);
        assert_eq!(s.multiplicity_at(0, &pt(&["6", "3/2"])).unwrap(), 2, "saturated");
        assert_eq!(s.multiplicity_at(0, &pt(&["1/2", "2"])).unwrap(), 2);
        assert_eq!(s.multiplicity_at(0, &pt(&["2", "2"])).unwrap(), 1, "plain diagonal");
        assert_eq!(s.multiplicity_at(0, &pt(&["2", "3"])).unwrap(), 1);
        assert!(matches!(s.multiplicity_at(0, &pt(&["0", "2"])), Err(GlueError::PointOffBase(_))));
    }

    #[test]
    fn zero_shift_models_reproduce_the_fiber_sizes() {
        // δ from the glued model must agree with the fiber of the extended
        // quotient over every sampled point when the shift is zero.
        let check = |eq: &ExtendedQuotient, s: &GluedSpace, samples: &[&[&str]], tag: &str| {
            for coords in samples {
                let x = pt(coords);
                assert_eq!(
                    s.multiplicity_at(0, &x).unwrap() as usize,
                    eq.fiber_at(&x).unwrap().labels.len(),
                    "{tag} at {coords:?}"
                );
            }
        };
        let eq = extended_quotient(&gl2_swap_action()).unwrap();
        let s = zero_shift_model(&eq, "2");
        check(
            &eq,
            &s,
            &[&["2", "2"], &["2", "3"], &["5", "5"], &["-1", "-1"], &["-1", "1"]],
            "swap action",
        );
        let (action, cocycle) = sl5d_action();
        let rank4_samples: &[&[&str]] = &[
            &["2", "3", "5", "7"],
            &["2", "3", "2", "3"],
            &["2", "2", "3", "3"],
            &["3", "2", "2", "3"],
            &["5", "5", "5", "5"],
        ];
        let eq = extended_quotient(&action).unwrap();
        let s = zero_shift_model(&eq, "2");
        check(&eq, &s, rank4_samples, "plain rank-4 action");
        assert_eq!(s.multiplicity_at(0, &pt(&["5", "5", "5", "5"])).unwrap(), 4);
        let eq = twisted_extended_quotient(&action, &cocycle).unwrap();
        let s = zero_shift_model(&eq, "2");
        check(&eq, &s, rank4_samples, "twisted rank-4 action");
        assert_eq!(s.multiplicity_at(0, &pt(&["5", "5", "5", "5"])).unwrap(), 1);
        assert_eq!(s.multiplicity_at(0, &pt(&["2", "3", "2", "3"])).unwrap(), 2);
        let eq = extended_quotient(&sl3_quotient_action()).unwrap();
        let s = zero_shift_model(&eq, "3");
        check(
            &eq,
            &s,
            &[&["1", "1", "1"], &["2", "2", "1/4"], &["2", "1/2", "1"], &["2", "3", "1/6"]],
            "quotient torus action",
        );
        assert_eq!(s.multiplicity_at(0, &pt(&["1", "1", "1"])).unwrap(), 3);
    }

    #[test]
    fn torus_closures_respect_the_sheets() {
        let eq = extended_quotient(&gl2_swap_action()).unwrap();
        let s = zero_shift_model(&eq, "2");
        // Both copies over a diagonal point lie in the closure of the free
        // part: the space is not separated there.
        let free_part = SetDescriptor {
            piece: 0,
            copy: None,
            locus: Locus::of_congruences(vec![]),
            minus: Some(diagonal_locus()),
        };
        for copy in 0..2 {
            assert!(s
                .closure_contains(&free_part, &GluedPoint::new(0, copy, pt(&["2", "2"])))
                .unwrap());
        }
        // The doubled sheet over the diagonal is closed: it does not reach
        // the dense sheet's point over the same base point.
        let sheet =
            SetDescriptor { piece: 0, copy: Some(1), locus: diagonal_locus(), minus: None };
        assert!(s.closure_contains(&sheet, &GluedPoint::new(0, 1, pt(&["2", "2"]))).unwrap());
        assert!(!s.closure_contains(&sheet, &GluedPoint::new(0, 0, pt(&["2", "2"]))).unwrap());
        // Saturation: the swapped coordinates name the same base point.
        assert!(s.closure_contains(&free_part, &GluedPoint::new(0, 1, pt(&["3", "3"]))).unwrap());
    }

    #[test]
    fn comparison_of_the_doubled_and_disjoint_models() {
        let doubled = doubled_line();
        let line = build_glued(BaseSpace::Affine { dim: 1 }, &[]).unwrap();
        let point = build_glued(BaseSpace::Affine { dim: 0 }, &[]).unwrap();
        let disjoint = disjoint_union(vec![line.clone(), point]);
        let report = distinguishing_invariants(&doubled, &disjoint);
        assert_eq!(report.left.components, 1);
        assert_eq!(report.right.components, 2);
        assert!(report.left.has_nonseparated_pair);
        assert!(!report.right.has_nonseparated_pair);
        match &report.verdict {
            ComparisonVerdict::NotHomeomorphic { differing } => {
                assert!(differing.contains(&"components".to_string()));
                assert!(differing.contains(&"non_separated_pair".to_string()));
            }
            v => panic!("expected a distinguishing verdict, got {v:?}"),
        }
        // A model is indistinguishable from itself.
        let same = distinguishing_invariants(&doubled, &doubled.clone());
        assert_eq!(same.verdict, ComparisonVerdict::IndistinguishableAtThisResolution);
        // The doubled line and the plain line have equally many components
        // but different separation behavior.
        let report = distinguishing_invariants(&doubled, &line);
        match &report.verdict {
            ComparisonVerdict::NotHomeomorphic { differing } => {
                assert!(!differing.contains(&"components".to_string()));
                assert!(differing.contains(&"non_separated_pair".to_string()));
                assert!(differing.contains(&"multiplicity_profile".to_string()));
            }
            v => panic!("expected a distinguishing verdict, got {v:?}"),
        }
        assert_eq!(
            report.left.multiplicity_profile,
            vec![
                ProfileEntry { multiplicity: 1, dim: 1 },
                ProfileEntry { multiplicity: 2, dim: 0 }
            ]
        );
        assert_eq!(
            report.right.multiplicity_profile,
            vec![ProfileEntry { multiplicity: 1, dim: 1 }]
        );
    }

    #[test]
    fn invariants_of_the_theta_models() {
        let eq = extended_quotient(&gl2_swap_action()).unwrap();
        let s = from_theta(&theta_glue_data(&eq, &gl2_theta_shift("2")).unwrap()).unwrap();
        let inv = s.invariants();
        assert_eq!(inv.components, 1);
        assert!(inv.has_nonseparated_pair);
        assert_eq!(
            inv.multiplicity_profile,
            vec![
                ProfileEntry { multiplicity: 1, dim: 2 },
                ProfileEntry { multiplicity: 2, dim: 1 }
            ]
        );
        let (action, cocycle) = sl5d_action();
        let eq = twisted_extended_quotient(&action, &cocycle).unwrap();
        let inv = zero_shift_model(&eq, "2").invariants();
        assert_eq!(
            inv.multiplicity_profile,
            vec![
                ProfileEntry { multiplicity: 1, dim: 4 },
                ProfileEntry { multiplicity: 2, dim: 2 }
            ]
        );
        // On the quotient torus the finite stratum stacks its own sheet on
        // top of the incoming one.
        let eq = extended_quotient(&sl3_quotient_action()).unwrap();
        let inv = zero_shift_model(&eq, "3").invariants();
        assert_eq!(
            inv.multiplicity_profile,
            vec![
                ProfileEntry { multiplicity: 1, dim: 2 },
                ProfileEntry { multiplicity: 2, dim: 1 },
                ProfileEntry { multiplicity: 3, dim: 0 }
            ]
        );
    }

    #[test]
    fn model_files_round_trip() {
        let json = r#"{
            "base": {"kind": "affine", "dim": 1},
            "doubling": [
                {"locus": {"components": [{"kind": "points", "points": [["0"]]}]}, "extra": 1}
            ]
        }"#;
        let s = from_model_json(json).expect("model");
        assert_eq!(s.multiplicity_at(0, &pt(&["0"])).unwrap(), 2);
        let union = r#"{"pieces": [
            {"base": {"kind": "affine", "dim": 1}},
            {"base": {"kind": "affine", "dim": 0}}
        ]}"#;
        let u = from_model_json(union).expect("union model");
        assert_eq!(u.piece_count(), 2);
        assert_eq!(u.invariants().components, 2);
        // A torus-quotient model round-trips through serde.
        let eq = extended_quotient(&gl2_swap_action()).unwrap();
        let data = theta_glue_data(&eq, &ThetaShift::zero_for(&eq, "2")).unwrap();
        let model = ModelJson::Single(PieceJson {
            base: BaseSpace::TorusQuotient { action: data.action.clone() },
            doubling: vec![DoublingSpec { locus: diagonal_locus(), minus: None, extra: 1 }],
        });
        let text = serde_json::to_string(&model).expect("serialize");
        let back: ModelJson = serde_json::from_str(&text).expect("deserialize");
        assert_eq!(back, model);
        let s = build_model(&model).unwrap();
        assert_eq!(s.multiplicity_at(0, &pt(&["3", "3"])).unwrap(), 2);
        assert_eq!(s.multiplicity_at(0, &pt(&["3", "4"])).unwrap(), 1);
    }

    #[test]
    fn ill_formed_models_are_rejected() {
        let err = build_glued(
            BaseSpace::Affine { dim: 1 },
            &[DoublingSpec { locus: Locus::of_points(&[&["0", "0"]]), minus: None, extra: 1 }],
        )
        .expect_err("wrong arity");
        assert!(matches!(err, GlueError::LocusOffBase(_)));
        let eq = extended_quotient(&gl2_swap_action()).unwrap();
        let action = theta_glue_data(&eq, &ThetaShift::zero_for(&eq, "2")).unwrap().action;
        let err = build_glued(
            BaseSpace::TorusQuotient { action: action.clone() },
            &[DoublingSpec { locus: Locus::of_linear(&[&["1", "0"]], &["0"]), minus: None, extra: 1 }],
        )
        .expect_err("linear over a torus");
        assert!(matches!(err, GlueError::LocusOffBase(_)));
        let err = build_glued(
            BaseSpace::Affine { dim: 2 },
            &[DoublingSpec { locus: Locus::of_congruences(vec![]), minus: None, extra: 1 }],
        )
        .expect_err("congruences over affine space");
        assert!(matches!(err, GlueError::LocusOffBase(_)));
        let err = build_glued(
            BaseSpace::TorusQuotient { action: action.clone() },
            &[DoublingSpec { locus: Locus::of_points(&[&["0", "1"]]), minus: None, extra: 1 }],
        )
        .expect_err("a point off the torus");
        assert!(matches!(err, GlueError::LocusOffBase(_)));
        let err = build_glued(
            BaseSpace::Affine { dim: 1 },
            &[DoublingSpec { locus: Locus::of_points(&[&["0"]]), minus: None, extra: 0 }],
        )
        .expect_err("zero extra sheets");
        assert!(matches!(err, GlueError::Validation(_)));
        // Products insist on single-piece affine factors.
        let torus = build_glued(BaseSpace::TorusQuotient { action }, &[]).unwrap();
        assert!(matches!(build_product(vec![torus]), Err(GlueError::Validation(_))));
        assert!(matches!(build_product(vec![]), Err(GlueError::Validation(_))));
    }

    #[test]
    fn unsupported_descriptors_are_reported() {
        let p = build_product(vec![doubled_line(), doubled_line()]).unwrap();
        let bad = ProductSet {
            copies: Some(vec![0]),
            locus: Locus::of_linear(&[&["1", "-1"]], &["0"]),
            minus: None,
        };
        let candidate = ProductPoint { copies: vec![0, 0], coords: vec![pt(&["0"]), pt(&["0"])] };
        assert!(matches!(
            p.closure_contains(&bad, &candidate),
            Err(GlueError::UnsupportedDescriptor(_))
        ));
    }
}
