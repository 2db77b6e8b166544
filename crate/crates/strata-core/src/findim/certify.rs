//! Comparison of fiber families up to stratified equivalence: algebra
//! morphisms between fibers, primitive-ideal pullback checks, two-sided
//! ideal filtrations with induced subquotient maps, and multi-step
//! certificates verified exactly at sample points.
//!
//! The central notion: a morphism F: A → B of finite-dimensional algebras
//! preserves spectra when pulling back the kernel of each simple block of B
//! lands inside the kernel of exactly one simple block of A and the induced
//! assignment is a bijection. With filtrations on both sides the same
//! condition is demanded of every induced map on filtration subquotients.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::exact::{canonical_exponent, GaussianRational};
use crate::findim::descriptor::{
    build_fiber_labeled, parse_gq, parse_points, BaseJson, EntryKind, FiberDescriptor,
};
use crate::findim::{basis_vec, FinDimAlgebra, FinDimError};
use crate::linalg::QiMatrix;

type Gq = GaussianRational;

/// One entry of a filtration stage inside a matrix-ideal pattern: nothing,
/// the vanishing ideal, or the full coordinate ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageEntry {
    Zero,
    Ideal,
    Full,
}

impl StageEntry {
    fn rank(self) -> u8 {
        match self {
            StageEntry::Zero => 0,
            StageEntry::Ideal => 1,
            StageEntry::Full => 2,
        }
    }
}

fn entry_rank(e: EntryKind) -> u8 {
    match e {
        EntryKind::Ideal => 1,
        EntryKind::Full => 2,
    }
}

/// One interior ideal of a filtration, described for the whole family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiltrationStage {
    /// Sub-pattern of a matrix-ideal pattern, entry by entry.
    Pattern { entries: Vec<Vec<StageEntry>> },
    /// Span of a subset of direct summands.
    Summands { indices: Vec<usize> },
}

/// An ascending chain 0 ⊂ I₁ ⊂ … ⊂ I_r ⊂ A of two-sided ideal subfamilies;
/// only the interior stages are listed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filtration {
    pub stages: Vec<FiltrationStage>,
}

impl Filtration {
    /// Checks that every stage matches the descriptor's shape and that the
    /// stages form a strictly ascending proper chain of subfamilies.
    pub fn validate_against(&self, desc: &FiberDescriptor) -> Result<(), FinDimError> {
        match desc {
            FiberDescriptor::MatrixIdealPattern { pattern, .. } => {
                let shape_ok = |entries: &Vec<Vec<StageEntry>>| {
                    entries.len() == pattern.len()
                        && entries
                            .iter()
                            .zip(pattern)
                            .all(|(row, prow)| row.len() == prow.len())
                };
                let mut prev: Vec<Vec<u8>> =
                    pattern.iter().map(|row| vec![0; row.len()]).collect();
                for (s, stage) in self.stages.iter().enumerate() {
                    let FiltrationStage::Pattern { entries } = stage else {
                        return Err(FinDimError::Validation(format!(
                            "stage {s} is not a pattern stage but the algebra is a matrix-ideal pattern"
                        )));
                    };
                    if !shape_ok(entries) {
                        return Err(FinDimError::Validation(format!(
                            "stage {s} does not have the pattern's shape"
                        )));
                    }
                    let mut strict = false;
                    for (r, row) in entries.iter().enumerate() {
                        for (c, e) in row.iter().enumerate() {
                            let rank = e.rank();
                            if rank < prev[r][c] {
                                return Err(FinDimError::Validation(format!(
                                    "stage {s} entry ({r},{c}) drops below the previous stage"
                                )));
                            }
                            if rank > entry_rank(pattern[r][c]) {
                                return Err(FinDimError::Validation(format!(
                                    "stage {s} entry ({r},{c}) exceeds the algebra pattern"
                                )));
                            }
                            strict |= rank > prev[r][c];
                            prev[r][c] = rank;
                        }
                    }
                    if !strict {
                        return Err(FinDimError::Validation(format!(
                            "stage {s} does not strictly enlarge the previous stage"
                        )));
                    }
                }
                let proper = prev
                    .iter()
                    .zip(pattern)
                    .any(|(row, prow)| {
                        row.iter().zip(prow).any(|(&r, &p)| r < entry_rank(p))
                    });
                if !self.stages.is_empty() && !proper {
                    return Err(FinDimError::Validation(
                        "the last stage already equals the whole family".into(),
                    ));
                }
                Ok(())
            }
            FiberDescriptor::DirectSum { summands } => {
                let mut prev: BTreeSet<usize> = BTreeSet::new();
                for (s, stage) in self.stages.iter().enumerate() {
                    let FiltrationStage::Summands { indices } = stage else {
                        return Err(FinDimError::Validation(format!(
                            "stage {s} is not a summand stage but the algebra is a direct sum"
                        )));
                    };
                    let set: BTreeSet<usize> = indices.iter().copied().collect();
                    if set.len() != indices.len()
                        || indices.windows(2).any(|w| w[0] >= w[1])
                    {
                        return Err(FinDimError::Validation(format!(
                            "stage {s} indices must be strictly increasing"
                        )));
                    }
                    if set.iter().any(|&i| i >= summands.len()) {
                        return Err(FinDimError::Validation(format!(
                            "stage {s} names a summand out of range"
                        )));
                    }
                    if !set.is_superset(&prev) || set == prev {
                        return Err(FinDimError::Validation(format!(
                            "stage {s} does not strictly enlarge the previous stage"
                        )));
                    }
                    prev = set;
                }
                if !self.stages.is_empty() && prev.len() == summands.len() {
                    return Err(FinDimError::Validation(
                        "the last stage already equals the whole family".into(),
                    ));
                }
                Ok(())
            }
            _ => Err(FinDimError::UnsupportedDescriptor(
                "filtrations are only supported on matrix-ideal patterns and direct sums"
                    .into(),
            )),
        }
    }

    /// Evaluates each stage at a point: the set of fiber basis positions it
    /// spans, matched through the fiber's stable labels.
    pub fn fiber_stages(
        &self,
        desc: &FiberDescriptor,
        point: &[Gq],
        labels: &[String],
    ) -> Result<Vec<BTreeSet<usize>>, FinDimError> {
        self.validate_against(desc)?;
        let position: BTreeMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        match desc {
            FiberDescriptor::MatrixIdealPattern { base, vanishing, .. } => {
                let y = parse_points(vanishing, base)?;
                let on_y = y.iter().any(|q| q == point);
                self.stages
                    .iter()
                    .map(|stage| {
                        let FiltrationStage::Pattern { entries } = stage else {
                            unreachable!("validated above");
                        };
                        let mut set = BTreeSet::new();
                        for (r, row) in entries.iter().enumerate() {
                            for (c, e) in row.iter().enumerate() {
                                let alive = match e {
                                    StageEntry::Zero => false,
                                    StageEntry::Ideal => !on_y,
                                    StageEntry::Full => true,
                                };
                                if alive {
                                    let label = format!("e_{}{}", r + 1, c + 1);
                                    let &idx =
                                        position.get(label.as_str()).ok_or_else(|| {
                                            FinDimError::Validation(format!(
                                                "stage entry ({r},{c}) survives at a point where the fiber basis {label} does not"
                                            ))
                                        })?;
                                    set.insert(idx);
                                }
                            }
                        }
                        Ok(set)
                    })
                    .collect()
            }
            FiberDescriptor::DirectSum { .. } => Ok(self
                .stages
                .iter()
                .map(|stage| {
                    let FiltrationStage::Summands { indices } = stage else {
                        unreachable!("validated above");
                    };
                    let mut set = BTreeSet::new();
                    for &idx in indices {
                        let prefix = format!("s{idx}.");
                        for (i, l) in labels.iter().enumerate() {
                            if l.starts_with(&prefix) {
                                set.insert(i);
                            }
                        }
                    }
                    set
                })
                .collect()),
            _ => unreachable!("validated above"),
        }
    }
}

/// A linear map between fibers, written on stable basis labels: each present
/// source basis element goes to a combination of target basis elements.
/// Target labels absent at a given point contribute nothing there.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismSpec {
    pub entries: Vec<MapEntry>,
}

/// The image of one source basis element: pairs (target label, coefficient).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapEntry {
    pub src: String,
    pub dst: Vec<(String, String)>,
}

impl MorphismSpec {
    /// Instantiates the map at a point as a matrix (target dim × source dim).
    pub(crate) fn matrix(
        &self,
        src_labels: &[String],
        tgt_labels: &[String],
    ) -> Result<QiMatrix, FinDimError> {
        let tgt_pos: BTreeMap<&str, usize> = tgt_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut m = QiMatrix::zero(tgt_labels.len(), src_labels.len());
        for (j, label) in src_labels.iter().enumerate() {
            let entry = self
                .entries
                .iter()
                .find(|e| &e.src == label)
                .ok_or_else(|| {
                    FinDimError::NotAMorphism(format!(
                        "no image given for fiber basis element {label}"
                    ))
                })?;
            for (dst, coeff) in &entry.dst {
                if let Some(&k) = tgt_pos.get(dst.as_str()) {
                    let c = parse_gq(coeff)?;
                    *m.at_mut(k, j) = &*m.at(k, j) + &c;
                }
            }
        }
        Ok(m)
    }
}

/// Checks that the matrix (columns = images of source basis vectors) is an
/// algebra morphism: F(e_i·e_j) = F(e_i)·F(e_j) for all basis pairs.
pub(crate) fn verify_morphism(
    src: &FinDimAlgebra,
    tgt: &FinDimAlgebra,
    map: &QiMatrix,
) -> Result<(), FinDimError> {
    if map.rows() != tgt.dim() || map.cols() != src.dim() {
        return Err(FinDimError::Validation(format!(
            "map shape {}×{} does not match algebras of dimension {} → {}",
            map.rows(),
            map.cols(),
            src.dim(),
            tgt.dim()
        )));
    }
    let d = src.dim();
    for i in 0..d {
        for j in 0..d {
            let prod = src.mul_vec(&basis_vec(d, i), &basis_vec(d, j));
            let lhs = map.mul_vec(&prod);
            let rhs = tgt.mul_vec(&map.column(i), &map.column(j));
            if lhs != rhs {
                return Err(FinDimError::NotAMorphism(format!(
                    "F(e_{i}·e_{j}) ≠ F(e_{i})·F(e_{j})"
                )));
            }
        }
    }
    Ok(())
}

/// Outcome of a spectrum-preservation check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumVerdict {
    pub preserving: bool,
    /// Pairs (target block, source block) established by kernel pullback;
    /// per-level pairs are reported in the witness for filtered checks.
    pub pairing: Vec<(usize, usize)>,
    pub witness: String,
}

fn stack(top: &QiMatrix, bottom: &QiMatrix) -> QiMatrix {
    debug_assert_eq!(top.cols(), bottom.cols());
    let mut rows = Vec::with_capacity(top.rows() + bottom.rows());
    for r in 0..top.rows() {
        rows.push((0..top.cols()).map(|c| top.at(r, c).clone()).collect());
    }
    for r in 0..bottom.rows() {
        rows.push((0..bottom.cols()).map(|c| bottom.at(r, c).clone()).collect());
    }
    QiMatrix::from_rows(rows)
}

/// The kernel-pullback bijection test between two analyzed fibers.
fn kernel_bijection(
    src: &FinDimAlgebra,
    tgt: &FinDimAlgebra,
    map: &QiMatrix,
) -> Result<(bool, Vec<(usize, usize)>, String), FinDimError> {
    let src_an = src.analyze()?;
    let tgt_an = tgt.analyze()?;
    let src_proj = src_an.block_projections(src)?;
    let tgt_proj = tgt_an.block_projections(tgt)?;
    let mut pairing = Vec::new();
    let mut used = vec![false; src_proj.len()];
    for (q, pq) in tgt_proj.iter().enumerate() {
        let composite = pq.mul(map);
        let base_rank = composite.rank();
        let mut hits = Vec::new();
        for (p, pp) in src_proj.iter().enumerate() {
            if stack(&composite, pp).rank() == base_rank {
                hits.push(p);
            }
        }
        if hits.len() != 1 {
            return Ok((
                false,
                pairing,
                format!(
                    "target block {q} pulls back into {} source block kernels ({hits:?}); need exactly one",
                    hits.len()
                ),
            ));
        }
        let p = hits[0];
        if used[p] {
            return Ok((
                false,
                pairing,
                format!("source block {p} is matched by two target blocks"),
            ));
        }
        used[p] = true;
        pairing.push((q, p));
    }
    if let Some(missing) = used.iter().position(|&u| !u) {
        return Ok((
            false,
            pairing,
            format!("source block {missing} is not matched by any target block"),
        ));
    }
    let witness = format!(
        "blocks {:?} ↔ {:?} paired by kernel pullback {pairing:?}",
        tgt_an.block_dims(),
        src_an.block_dims()
    );
    Ok((true, pairing, witness))
}

/// Checks that an algebra morphism preserves spectra: the kernel of each
/// simple block of the target pulls back into the kernel of exactly one
/// simple block of the source, bijectively.
pub(crate) fn verify_spectrum_preserving(
    src: &FinDimAlgebra,
    tgt: &FinDimAlgebra,
    map: &QiMatrix,
) -> Result<SpectrumVerdict, FinDimError> {
    verify_morphism(src, tgt, map)?;
    let (preserving, pairing, witness) = kernel_bijection(src, tgt, map)?;
    Ok(SpectrumVerdict { preserving, pairing, witness })
}

fn span_is_ideal(alg: &FinDimAlgebra, set: &BTreeSet<usize>) -> Result<(), String> {
    for &i in set {
        for j in 0..alg.dim() {
            for (a, b) in [(i, j), (j, i)] {
                if let Some(entries) = alg.table().get(&(a, b)) {
                    for (k, c) in entries {
                        if !c.is_zero() && !set.contains(k) {
                            return Err(format!(
                                "product of basis {a} and {b} leaves the span at basis {k}"
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// The subalgebra-of-subquotient span upper\lower with products truncated
/// modulo the lower ideal; returns the algebra and the ambient indices of
/// its basis.
fn subquotient(
    alg: &FinDimAlgebra,
    upper: &BTreeSet<usize>,
    lower: &BTreeSet<usize>,
) -> Result<(FinDimAlgebra, Vec<usize>), FinDimError> {
    let indices: Vec<usize> = upper.difference(lower).copied().collect();
    let pos: BTreeMap<usize, usize> =
        indices.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let mut table = BTreeMap::new();
    for (pi, &i) in indices.iter().enumerate() {
        for (pj, &j) in indices.iter().enumerate() {
            if let Some(entries) = alg.table().get(&(i, j)) {
                let kept: Vec<(usize, Gq)> = entries
                    .iter()
                    .filter(|(k, c)| !c.is_zero() && !lower.contains(k))
                    .map(|(k, c)| (pos[k], c.clone()))
                    .collect();
                if !kept.is_empty() {
                    table.insert((pi, pj), kept);
                }
            }
        }
    }
    let sub = FinDimAlgebra::new(indices.len(), table, None, Vec::new())?;
    Ok((sub, indices))
}

/// The filtered spectrum-preservation check: the map must carry each source
/// stage into the matching target stage, and every induced map on
/// subquotients must itself pass the kernel-pullback bijection.
pub(crate) fn verify_spectrum_preserving_filtered(
    src: &FinDimAlgebra,
    tgt: &FinDimAlgebra,
    map: &QiMatrix,
    src_stages: &[BTreeSet<usize>],
    tgt_stages: &[BTreeSet<usize>],
) -> Result<SpectrumVerdict, FinDimError> {
    verify_morphism(src, tgt, map)?;
    if src_stages.len() != tgt_stages.len() {
        return Err(FinDimError::Validation(format!(
            "filtration lengths differ: {} vs {}",
            src_stages.len(),
            tgt_stages.len()
        )));
    }
    let full_src: BTreeSet<usize> = (0..src.dim()).collect();
    let full_tgt: BTreeSet<usize> = (0..tgt.dim()).collect();
    let mut src_chain = vec![BTreeSet::new()];
    src_chain.extend(src_stages.iter().cloned());
    src_chain.push(full_src);
    let mut tgt_chain = vec![BTreeSet::new()];
    tgt_chain.extend(tgt_stages.iter().cloned());
    tgt_chain.push(full_tgt);

    for (side, chain, alg) in
        [("source", &src_chain, src), ("target", &tgt_chain, tgt)]
    {
        for w in chain.windows(2) {
            if !w[0].is_subset(&w[1]) {
                return Err(FinDimError::Validation(format!(
                    "{side} filtration stages are not nested"
                )));
            }
        }
        for (l, stage) in chain.iter().enumerate().skip(1) {
            if stage.iter().any(|&i| i >= alg.dim()) {
                return Err(FinDimError::Validation(format!(
                    "{side} stage {l} indexes past the fiber dimension"
                )));
            }
            span_is_ideal(alg, stage).map_err(|msg| {
                FinDimError::Validation(format!("{side} stage {l} is not an ideal: {msg}"))
            })?;
        }
    }

    // The morphism must respect the chains before subquotients make sense.
    for level in 1..=src_stages.len() {
        for &i in &src_chain[level] {
            for r in 0..tgt.dim() {
                if !map.at(r, i).is_zero() && !tgt_chain[level].contains(&r) {
                    return Err(FinDimError::FiltrationNotRespected(format!(
                        "image of source stage {level} basis {i} has a component at target basis {r} outside target stage {level}"
                    )));
                }
            }
        }
    }

    let mut pieces = Vec::new();
    for level in 0..src_chain.len() - 1 {
        let (src_sub, src_idx) =
            subquotient(src, &src_chain[level + 1], &src_chain[level])?;
        let (tgt_sub, tgt_idx) =
            subquotient(tgt, &tgt_chain[level + 1], &tgt_chain[level])?;
        let mut induced = QiMatrix::zero(tgt_idx.len(), src_idx.len());
        for (j, &i) in src_idx.iter().enumerate() {
            for (r, &k) in tgt_idx.iter().enumerate() {
                *induced.at_mut(r, j) = map.at(k, i).clone();
            }
        }
        let (ok, pairing, witness) = kernel_bijection(&src_sub, &tgt_sub, &induced)?;
        if !ok {
            return Ok(SpectrumVerdict {
                preserving: false,
                pairing: Vec::new(),
                witness: format!("subquotient level {level}: {witness}"),
            });
        }
        pieces.push(format!("level {level}: {}", summarize_pairing(&pairing)));
    }
    Ok(SpectrumVerdict {
        preserving: true,
        pairing: Vec::new(),
        witness: format!(
            "all {} subquotient levels paired by kernel pullback ({})",
            src_chain.len() - 1,
            pieces.join("; ")
        ),
    })
}

fn summarize_pairing(pairing: &[(usize, usize)]) -> String {
    if pairing.is_empty() {
        "both sides vanish".to_string()
    } else {
        pairing
            .iter()
            .map(|(q, p)| format!("{q}↦{p}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Direction of one morphism step relative to the certificate's chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// From `algebras[i]` to `algebras[i+1]`.
    Forward,
    /// From `algebras[i+1]` to `algebras[i]`.
    Backward,
}

/// One step connecting adjacent members of a certificate chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateStep {
    /// An algebra morphism between fibers, checked at every sample point;
    /// filtrations are either supplied on both sides or on neither.
    Morphism {
        direction: Direction,
        map: MorphismSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        filtration_src: Option<Filtration>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        filtration_tgt: Option<Filtration>,
    },
    /// A symbolic deformation: generator images over a parameter t whose
    /// specializations at two nonzero values recover the declared actions
    /// on the two sides. Checked once, exactly, not per sample.
    Variation(VariationStep),
}

/// Generator images as Laurent data: (t-power, lattice exponent, coefficient).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationStep {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Vec<i64>>,
    pub psi: BTreeMap<String, Vec<(i64, Vec<i64>, String)>>,
    pub zeta: String,
    pub eta: String,
    pub action_zeta: BTreeMap<String, Vec<(Vec<i64>, String)>>,
    pub action_eta: BTreeMap<String, Vec<(Vec<i64>, String)>>,
}

/// A chain of algebra families with one verified step between neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceCertificate {
    pub algebras: Vec<FiberDescriptor>,
    pub steps: Vec<CertificateStep>,
}

impl EquivalenceCertificate {
    /// Structural validation: shapes, matching base dimensions, filtration
    /// chains, and variation data sanity. Value-level checks happen in
    /// [`verify_certificate`].
    pub fn validate(&self) -> Result<(), FinDimError> {
        if self.algebras.is_empty() {
            return Err(FinDimError::Validation(
                "a certificate needs at least one algebra".into(),
            ));
        }
        if self.steps.len() + 1 != self.algebras.len() {
            return Err(FinDimError::Validation(format!(
                "{} steps do not connect {} algebras",
                self.steps.len(),
                self.algebras.len()
            )));
        }
        let base_dim = self.algebras[0].base_dim()?;
        for desc in &self.algebras {
            desc.validate()?;
            if desc.base_dim()? != base_dim {
                return Err(FinDimError::Validation(
                    "certificate algebras live over bases of different dimension".into(),
                ));
            }
        }
        for (i, step) in self.steps.iter().enumerate() {
            match step {
                CertificateStep::Morphism {
                    direction,
                    filtration_src,
                    filtration_tgt,
                    ..
                } => {
                    let (src, tgt) = match direction {
                        Direction::Forward => (&self.algebras[i], &self.algebras[i + 1]),
                        Direction::Backward => (&self.algebras[i + 1], &self.algebras[i]),
                    };
                    match (filtration_src, filtration_tgt) {
                        (None, None) => {}
                        (Some(fs), Some(ft)) => {
                            if fs.stages.len() != ft.stages.len() {
                                return Err(FinDimError::Validation(format!(
                                    "step {i}: filtration lengths differ"
                                )));
                            }
                            fs.validate_against(src)?;
                            ft.validate_against(tgt)?;
                        }
                        _ => {
                            return Err(FinDimError::Validation(format!(
                                "step {i}: filtrations must be supplied on both sides or neither"
                            )));
                        }
                    }
                }
                CertificateStep::Variation(v) => validate_variation(v, i)?,
            }
        }
        Ok(())
    }
}

fn validate_variation(v: &VariationStep, step: usize) -> Result<(), FinDimError> {
    if v.rank == 0 {
        return Err(FinDimError::Validation(format!(
            "step {step}: variation rank must be positive"
        )));
    }
    if let Some(k) = &v.kernel {
        if k.len() != v.rank {
            return Err(FinDimError::Validation(format!(
                "step {step}: kernel length does not match the rank"
            )));
        }
    }
    let keys: BTreeSet<&String> = v.psi.keys().collect();
    if keys != v.action_zeta.keys().collect() || keys != v.action_eta.keys().collect() {
        return Err(FinDimError::Validation(format!(
            "step {step}: variation generators differ between Ψ and the endpoint actions"
        )));
    }
    let bad_exp = v
        .psi
        .values()
        .flatten()
        .map(|(_, e, _)| e.len())
        .chain(v.action_zeta.values().flatten().map(|(e, _)| e.len()))
        .chain(v.action_eta.values().flatten().map(|(e, _)| e.len()))
        .any(|l| l != v.rank);
    if bad_exp {
        return Err(FinDimError::Validation(format!(
            "step {step}: an exponent vector does not have length {}",
            v.rank
        )));
    }
    Ok(())
}

/// Specializes Ψ at a parameter value: Laurent terms over the lattice.
fn specialize_psi(
    terms: &[(i64, Vec<i64>, String)],
    value: &Gq,
    kernel: Option<&[i64]>,
) -> Result<BTreeMap<Vec<i64>, Gq>, FinDimError> {
    let mut out: BTreeMap<Vec<i64>, Gq> = BTreeMap::new();
    for (t_pow, exp, coeff) in terms {
        let c = parse_gq(coeff)?;
        let scaled = &c
            * &value.pow(*t_pow).map_err(|e| {
                FinDimError::Validation(format!("cannot specialize the parameter: {e}"))
            })?;
        let key = canonical_exponent(exp, kernel);
        let entry = out.entry(key).or_insert_with(Gq::zero);
        *entry = &*entry + &scaled;
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn normalize_action(
    terms: &[(Vec<i64>, String)],
    kernel: Option<&[i64]>,
) -> Result<BTreeMap<Vec<i64>, Gq>, FinDimError> {
    let mut out: BTreeMap<Vec<i64>, Gq> = BTreeMap::new();
    for (exp, coeff) in terms {
        let c = parse_gq(coeff)?;
        let key = canonical_exponent(exp, kernel);
        let entry = out.entry(key).or_insert_with(Gq::zero);
        *entry = &*entry + &c;
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn verify_variation(v: &VariationStep) -> Result<(bool, String), FinDimError> {
    let zeta = parse_gq(&v.zeta)?;
    let eta = parse_gq(&v.eta)?;
    if zeta.is_zero() || eta.is_zero() {
        return Ok((false, "variation endpoints must be nonzero parameter values".into()));
    }
    let kernel = v.kernel.as_deref();
    for (name, terms) in &v.psi {
        let at_zeta = specialize_psi(terms, &zeta, kernel)?;
        let want_zeta = normalize_action(&v.action_zeta[name], kernel)?;
        if at_zeta != want_zeta {
            return Ok((
                false,
                format!("Ψ({name}) specialized at ζ does not match the declared action"),
            ));
        }
        let at_eta = specialize_psi(terms, &eta, kernel)?;
        let want_eta = normalize_action(&v.action_eta[name], kernel)?;
        if at_eta != want_eta {
            return Ok((
                false,
                format!("Ψ({name}) specialized at η does not match the declared action"),
            ));
        }
    }
    Ok((
        true,
        format!(
            "Ψ matches both endpoint actions on {} generators (commutative coefficients: centrality is automatic)",
            v.psi.len()
        ),
    ))
}

/// Verdict at one sample point (or for one symbolic check).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleVerdict {
    pub point: String,
    pub pass: bool,
    pub witness: String,
}

/// Verdicts for one certificate step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepReport {
    pub index: usize,
    pub kind: String,
    pub verdicts: Vec<SampleVerdict>,
    pub pass: bool,
}

/// The full report of a certificate verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    pub steps: Vec<StepReport>,
    pub all_pass: bool,
}

fn fmt_point(point: &[Gq]) -> String {
    let coords: Vec<String> = point.iter().map(|c| c.to_string()).collect();
    format!("({})", coords.join(","))
}

fn eval_morphism_step(
    src_desc: &FiberDescriptor,
    tgt_desc: &FiberDescriptor,
    map: &MorphismSpec,
    filtration_src: Option<&Filtration>,
    filtration_tgt: Option<&Filtration>,
    point: &[Gq],
) -> Result<(bool, String), FinDimError> {
    let (src_alg, src_labels) = build_fiber_labeled(src_desc, point)?;
    let (tgt_alg, tgt_labels) = build_fiber_labeled(tgt_desc, point)?;
    let matrix = map.matrix(&src_labels, &tgt_labels)?;
    let verdict = match (filtration_src, filtration_tgt) {
        (None, None) => verify_spectrum_preserving(&src_alg, &tgt_alg, &matrix)?,
        (Some(fs), Some(ft)) => {
            let src_stages = fs.fiber_stages(src_desc, point, &src_labels)?;
            let tgt_stages = ft.fiber_stages(tgt_desc, point, &tgt_labels)?;
            verify_spectrum_preserving_filtered(
                &src_alg,
                &tgt_alg,
                &matrix,
                &src_stages,
                &tgt_stages,
            )?
        }
        _ => {
            return Err(FinDimError::Validation(
                "filtrations must be supplied on both sides or neither".into(),
            ));
        }
    };
    Ok((verdict.preserving, verdict.witness))
}

/// Verifies every step of a certificate: morphism steps exactly at each
/// sample point, variation steps once symbolically. Claim failures
/// (non-morphisms, broken filtrations, failed pullback bijections) are
/// recorded as failed verdicts; malformed inputs abort with an error.
pub fn verify_certificate(
    cert: &EquivalenceCertificate,
    samples: &[Vec<Gq>],
) -> Result<CertificateReport, FinDimError> {
    cert.validate()?;
    let base_dim = cert.algebras[0].base_dim()?;
    let has_morphism = cert
        .steps
        .iter()
        .any(|s| matches!(s, CertificateStep::Morphism { .. }));
    if has_morphism && samples.is_empty() {
        return Err(FinDimError::Validation(
            "at least one sample point is required to verify morphism steps".into(),
        ));
    }
    for p in samples {
        if p.len() != base_dim {
            return Err(FinDimError::PointOffBase(format!(
                "sample {} has {} coordinates; the base has dimension {base_dim}",
                fmt_point(p),
                p.len()
            )));
        }
    }

    let mut steps = Vec::with_capacity(cert.steps.len());
    for (i, step) in cert.steps.iter().enumerate() {
        let report = match step {
            CertificateStep::Morphism { direction, map, filtration_src, filtration_tgt } => {
                let (src_desc, tgt_desc) = match direction {
                    Direction::Forward => (&cert.algebras[i], &cert.algebras[i + 1]),
                    Direction::Backward => (&cert.algebras[i + 1], &cert.algebras[i]),
                };
                let mut verdicts = Vec::with_capacity(samples.len());
                for p in samples {
                    let verdict = match eval_morphism_step(
                        src_desc,
                        tgt_desc,
                        map,
                        filtration_src.as_ref(),
                        filtration_tgt.as_ref(),
                        p,
                    ) {
                        Ok((pass, witness)) => SampleVerdict {
                            point: fmt_point(p),
                            pass,
                            witness,
                        },
                        Err(
                            e @ (FinDimError::NotAMorphism(_)
                            | FinDimError::FiltrationNotRespected(_)),
                        ) => SampleVerdict {
                            point: fmt_point(p),
                            pass: false,
                            witness: e.to_string(),
                        },
                        Err(e) => return Err(e),
                    };
                    verdicts.push(verdict);
                }
                let pass = verdicts.iter().all(|v| v.pass);
                let kind = match direction {
                    Direction::Forward => "morphism(forward)",
                    Direction::Backward => "morphism(backward)",
                };
                StepReport { index: i, kind: kind.into(), verdicts, pass }
            }
            CertificateStep::Variation(v) => {
                let (pass, witness) = verify_variation(v)?;
                StepReport {
                    index: i,
                    kind: "variation".into(),
                    verdicts: vec![SampleVerdict {
                        point: "(symbolic)".into(),
                        pass,
                        witness,
                    }],
                    pass,
                }
            }
        };
        steps.push(report);
    }
    let all_pass = steps.iter().all(|s| s.pass);
    Ok(CertificateReport { steps, all_pass })
}

/// Report of the diagonal-embedding consistency check A → M_n(A).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagEmbeddingReport {
    pub source_blocks: Vec<usize>,
    pub target_blocks: Vec<usize>,
    pub spectrum_preserving: bool,
    pub blocks_scale: bool,
    pub witness: String,
}

impl DiagEmbeddingReport {
    pub fn pass(&self) -> bool {
        self.spectrum_preserving && self.blocks_scale
    }
}

/// Checks the diagonal embedding A → M_n(A): it must be an algebra morphism
/// preserving spectra, and every block size must scale exactly by n.
pub fn diag_embedding_check(
    alg: &FinDimAlgebra,
    n: usize,
) -> Result<DiagEmbeddingReport, FinDimError> {
    let tgt = alg.tensor_matrix(n)?;
    let map = QiMatrix::from_columns(alg.diagonal_embedding(n));
    let verdict = verify_spectrum_preserving(alg, &tgt, &map)?;
    let source_blocks = alg.blocks()?;
    let target_blocks = tgt.blocks()?;
    let mut scaled: Vec<usize> = source_blocks.iter().map(|m| m * n).collect();
    scaled.sort_unstable();
    let blocks_scale = scaled == target_blocks;
    let witness = if blocks_scale {
        format!(
            "blocks {source_blocks:?} scale to {target_blocks:?}; {}",
            verdict.witness
        )
    } else {
        format!("blocks {source_blocks:?} do not scale to {target_blocks:?} by {n}")
    };
    Ok(DiagEmbeddingReport {
        source_blocks,
        target_blocks,
        spectrum_preserving: verdict.preserving,
        blocks_scale,
        witness,
    })
}

/// The bundled two-step chain: the order-2 matrix family with off-diagonal
/// vanishing ideals, its block-diagonal shadow M₂(O(X)) ⊕ O(X)/I_Y, and the
/// commutative pair O(X) ⊕ O(X)/I_Y. The forward step carries matching
/// one-stage filtrations; the backward step needs none.
pub fn doubled_point_certificate() -> EquivalenceCertificate {
    let base = BaseJson::AffineLine;
    let vanishing = vec![vec!["0".to_string()]];
    let source = FiberDescriptor::MatrixIdealPattern {
        base: base.clone(),
        vanishing: vanishing.clone(),
        pattern: vec![
            vec![EntryKind::Full, EntryKind::Ideal],
            vec![EntryKind::Ideal, EntryKind::Full],
        ],
    };
    let middle = FiberDescriptor::DirectSum {
        summands: vec![
            FiberDescriptor::MatrixIdealPattern {
                base: base.clone(),
                vanishing: vanishing.clone(),
                pattern: vec![
                    vec![EntryKind::Full, EntryKind::Full],
                    vec![EntryKind::Full, EntryKind::Full],
                ],
            },
            FiberDescriptor::QuotientRing {
                base: base.clone(),
                vanishing: vanishing.clone(),
            },
        ],
    };
    let shadow = FiberDescriptor::DirectSum {
        summands: vec![
            FiberDescriptor::CoordinateRing { base: base.clone() },
            FiberDescriptor::QuotientRing { base, vanishing },
        ],
    };

    let entry = |src: &str, dst: &[(&str, &str)]| MapEntry {
        src: src.into(),
        dst: dst.iter().map(|(l, c)| (l.to_string(), c.to_string())).collect(),
    };
    let forward = CertificateStep::Morphism {
        direction: Direction::Forward,
        map: MorphismSpec {
            entries: vec![
                entry("e_11", &[("s0.e_11", "1")]),
                entry("e_12", &[("s0.e_12", "1")]),
                entry("e_21", &[("s0.e_21", "1")]),
                entry("e_22", &[("s0.e_22", "1"), ("s1.u", "1")]),
            ],
        },
        filtration_src: Some(Filtration {
            stages: vec![FiltrationStage::Pattern {
                entries: vec![
                    vec![StageEntry::Full, StageEntry::Ideal],
                    vec![StageEntry::Ideal, StageEntry::Ideal],
                ],
            }],
        }),
        filtration_tgt: Some(Filtration {
            stages: vec![FiltrationStage::Summands { indices: vec![0] }],
        }),
    };
    let backward = CertificateStep::Morphism {
        direction: Direction::Backward,
        map: MorphismSpec {
            entries: vec![
                entry("s0.u", &[("s0.e_11", "1")]),
                entry("s1.u", &[("s1.u", "1")]),
            ],
        },
        filtration_src: None,
        filtration_tgt: None,
    };
    EquivalenceCertificate {
        algebras: vec![source, middle, shadow],
        steps: vec![forward, backward],
    }
}

/// Default sample points for the bundled chain: the doubled point itself
/// plus generic points on both sides of it.
pub fn doubled_point_samples() -> Vec<Vec<Gq>> {
    ["0", "2", "-1", "3", "1/2"]
        .iter()
        .map(|s| vec![s.parse().expect("literal sample")])
        .collect()
}
