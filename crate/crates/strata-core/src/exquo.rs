//! Extended quotients of a torus by a finite lattice action.
//!
//! On top of the stabilizer stratification from [`crate::lattice`], this
//! module attaches to every stratum the labels indexing the fiber of the
//! extended quotient over the ordinary quotient: irreducible characters of
//! the stabilizer in the plain case, blocks of the ♮-twisted group algebra
//! in the twisted case. It provides the fiber-size law, a discrete
//! verification oracle over torsion points, an exact component census, the
//! per-conjugacy-class support report, and the shift data used to glue the
//! deformed quotient into a non-separated space.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::GaussianRational;
use crate::groups::{
    all_permutations, character_table, regular_classes, rho_quaternion, twisted_blocks,
    verify_cocycle, Cocycle2, CocycleVerdict, FiniteGroupTable, GroupError,
};
use crate::lattice::{
    fixed_subtorus, stratify, ActionJson, LatticeAction, LatticeError, Stratum, SubtorusData,
};

type Gq = GaussianRational;

/// Bound on the number of exponent vectors a census enumeration may visit.
const CENSUS_ENUMERATION_BOUND: u128 = 2_000_000;

/// Modulus of the torsion census used for finite carriers; it matches the
/// stratification oracle, so every stabilizer class is visible at it.
const CENSUS_MODULUS: i64 = 12;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Errors raised while assembling or querying extended quotients.
#[derive(Debug, Error)]
pub enum ExquoError {
    /// A fiber was requested at a point not on the torus.
    #[error("point is not on the torus: {0}")]
    PointOffTorus(String),
    /// Glue data was requested without a shift for a stratum that needs one.
    #[error("no shift supplied for stratum {0}")]
    ShiftMissing(usize),
    /// A twisting cocycle fails the cocycle identity or normalization.
    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),
    /// An underlying lattice computation failed.
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    /// An underlying group computation failed.
    #[error(transparent)]
    Group(#[from] GroupError),
    /// An invariant of the input data fails.
    #[error("{0}")]
    Validation(String),
}

// ---------------------------------------------------------------------------
// Strata with fiber labels
// ---------------------------------------------------------------------------

/// One label in the fiber of the extended quotient over a stratum point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberLabel {
    pub name: String,
    /// Dimension of the attached irreducible, when ℚ(i) splits the
    /// stabilizer; `None` for labels produced by the class-count fallback.
    pub dim: Option<usize>,
    /// True for the trivial character of the stabilizer.
    pub trivial: bool,
}

/// A stratum of the torus together with its fiber labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqStratum {
    pub stratum: Stratum,
    pub labels: Vec<FiberLabel>,
    /// Index into `labels` of the trivial character, when one is defined.
    pub trivial_label: Option<usize>,
    /// Label permutations induced by normalizer elements of the stabilizer,
    /// keyed by a group element inducing them; identity permutations are
    /// not recorded.
    pub normalizer_action: Vec<(usize, Vec<usize>)>,
    /// Number of label orbits under the recorded permutations.
    pub label_orbits: usize,
}

impl EqStratum {
    /// Fiber size over any point of this stratum.
    pub fn multiplicity(&self) -> usize {
        self.labels.len()
    }
}

/// The extended quotient of a torus by a finite lattice action, optionally
/// twisted by a 2-cocycle of the acting group.
#[derive(Debug, Clone)]
pub struct ExtendedQuotient {
    action: LatticeAction,
    twisted_by: Option<Cocycle2>,
    strata: Vec<EqStratum>,
    containments: Vec<(usize, usize)>,
}

/// The fiber over one torus point: its stratum and the labels living there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberAt {
    pub stratum: usize,
    pub labels: Vec<FiberLabel>,
}

// ---------------------------------------------------------------------------
// Label construction
// ---------------------------------------------------------------------------

/// What the labels of a stratum are indexed by; kept so normalizer elements
/// can be turned into label permutations.
enum LabelBasis {
    /// Rows of the character table of the stabilizer.
    Characters { classes: Vec<Vec<usize>>, values: Vec<Vec<Gq>> },
    /// Conjugacy classes of the stabilizer (splitting-field fallback).
    Classes { classes: Vec<Vec<usize>> },
    /// ♮-regular conjugacy classes of the stabilizer.
    RegularClasses { classes: Vec<Vec<usize>>, regular: Vec<usize> },
}

struct StratumLabels {
    labels: Vec<FiberLabel>,
    trivial_label: Option<usize>,
    basis: LabelBasis,
}

/// Labels of the plain quotient: one per irreducible character of the
/// stabilizer when ℚ(i) splits it, one per conjugacy class otherwise.
fn untwisted_labels(sub: &FiniteGroupTable) -> Result<StratumLabels, ExquoError> {
    let classes = sub.conjugacy_classes();
    match character_table(sub) {
        Ok(table) => {
            let labels: Vec<FiberLabel> = (0..table.num_irreducibles())
                .map(|r| {
                    let trivial = table.dims[r] == 1 && table.values[r].iter().all(Gq::is_one);
                    FiberLabel { name: format!("chi{r}"), dim: Some(table.dims[r]), trivial }
                })
                .collect();
            let trivial_label = labels.iter().position(|l| l.trivial);
            Ok(StratumLabels {
                labels,
                trivial_label,
                basis: LabelBasis::Characters { classes, values: table.values },
            })
        }
        Err(GroupError::CharFieldError(_)) => {
            // The label count is still the class count; individual
            // characters are only named, not evaluated.
            let labels = (0..classes.len())
                .map(|c| FiberLabel { name: format!("sheet{c}"), dim: None, trivial: false })
                .collect();
            Ok(StratumLabels { labels, trivial_label: None, basis: LabelBasis::Classes { classes } })
        }
        Err(other) => Err(other.into()),
    }
}

/// Labels of the twisted quotient: one per block of the ♮-twisted group
/// algebra of the stabilizer, falling back to the ♮-regular class count
/// when ℚ(i) does not split the twisted algebra.
fn twisted_labels(sub: &FiniteGroupTable, restricted: &Cocycle2) -> Result<StratumLabels, ExquoError> {
    let classes = sub.conjugacy_classes();
    let regular = regular_classes(sub, restricted);
    let labels = match twisted_blocks(sub, restricted) {
        Ok(blocks) => blocks
            .iter()
            .enumerate()
            .map(|(j, &size)| FiberLabel { name: format!("block{j}"), dim: Some(size), trivial: false })
            .collect(),
        Err(GroupError::CharFieldError(_)) => (0..regular.len())
            .map(|j| FiberLabel { name: format!("block{j}"), dim: None, trivial: false })
            .collect(),
        Err(other) => return Err(other.into()),
    };
    Ok(StratumLabels {
        labels,
        trivial_label: None,
        basis: LabelBasis::RegularClasses { classes, regular },
    })
}

/// The permutation a normalizer element induces on the labels, or `None`
/// when it is not defined on them (a twisted class leaving the regular set).
fn label_permutation(
    ambient: &FiniteGroupTable,
    embedding: &[usize],
    sub: &FiniteGroupTable,
    basis: &LabelBasis,
    gamma: usize,
) -> Option<Vec<usize>> {
    let classes = match basis {
        LabelBasis::Characters { classes, .. }
        | LabelBasis::Classes { classes }
        | LabelBasis::RegularClasses { classes, .. } => classes,
    };
    // Class permutation c ↦ class of γ⁻¹·rep_c·γ inside the stabilizer.
    let class_map: Vec<usize> = classes
        .iter()
        .map(|class| {
            let ambient_rep = embedding[class[0]];
            let conj = ambient.conjugate(ambient.inv(gamma), ambient_rep);
            let sub_index = embedding.binary_search(&conj).expect("normalizer preserves the subgroup");
            sub.class_of(classes, sub_index)
        })
        .collect();
    match basis {
        LabelBasis::Characters { values, .. } => {
            // χ ↦ χ ∘ conj_γ, matched back to a row of the table.
            let perm = values
                .iter()
                .map(|row| {
                    let moved: Vec<Gq> = class_map.iter().map(|&c| row[c].clone()).collect();
                    values.iter().position(|other| *other == moved).expect("conjugate character is irreducible")
                })
                .collect();
            Some(perm)
        }
        LabelBasis::Classes { .. } => Some(class_map),
        LabelBasis::RegularClasses { classes, regular } => {
            let mut perm = Vec::with_capacity(regular.len());
            for &rep in regular {
                let image_class = class_map[sub.class_of(classes, rep)];
                let image_rep = classes[image_class][0];
                perm.push(regular.iter().position(|&r| r == image_rep)?);
            }
            Some(perm)
        }
    }
}

/// Orbit count of {0, …, n−1} under a family of permutations.
fn orbit_count(n: usize, perms: &[Vec<usize>]) -> usize {
    let mut seen = vec![false; n];
    let mut orbits = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        orbits += 1;
        let mut queue = vec![start];
        seen[start] = true;
        while let Some(x) = queue.pop() {
            for perm in perms {
                if !seen[perm[x]] {
                    seen[perm[x]] = true;
                    queue.push(perm[x]);
                }
            }
        }
    }
    orbits
}

fn build_quotient(
    action: &LatticeAction,
    cocycle: Option<&Cocycle2>,
) -> Result<ExtendedQuotient, ExquoError> {
    let stratification = stratify(action)?;
    let group = action.group().clone();
    let mut strata = Vec::with_capacity(stratification.strata.len());
    for stratum in stratification.strata {
        let (sub, embedding) = group.subgroup_table(&stratum.stabilizer)?;
        let built = match cocycle {
            None => untwisted_labels(&sub)?,
            Some(c) => {
                let restricted = c.restrict(&stratum.stabilizer)?;
                twisted_labels(&sub, &restricted)?
            }
        };
        // Record how normalizer elements outside the stabilizer permute
        // the labels; only nontrivial permutations are kept.
        let stab_set: BTreeSet<usize> = stratum.stabilizer.iter().copied().collect();
        let mut normalizer_action: Vec<(usize, Vec<usize>)> = Vec::new();
        for gamma in 0..group.order() {
            if stab_set.contains(&gamma)
                || group.conjugate_subgroup(&stratum.stabilizer, gamma) != stratum.stabilizer
            {
                continue;
            }
            if let Some(perm) = label_permutation(&group, &embedding, &sub, &built.basis, gamma) {
                let identity = perm.iter().enumerate().all(|(i, &p)| i == p);
                if !identity && !normalizer_action.iter().any(|(_, p)| *p == perm) {
                    normalizer_action.push((gamma, perm));
                }
            }
        }
        let perms: Vec<Vec<usize>> = normalizer_action.iter().map(|(_, p)| p.clone()).collect();
        let label_orbits = orbit_count(built.labels.len(), &perms);
        strata.push(EqStratum {
            stratum,
            labels: built.labels,
            trivial_label: built.trivial_label,
            normalizer_action,
            label_orbits,
        });
    }
    Ok(ExtendedQuotient {
        action: action.clone(),
        twisted_by: cocycle.cloned(),
        strata,
        containments: stratification.containments,
    })
}

/// Assembles the extended quotient of the torus by the action: the
/// stabilizer strata, each carrying one label per irreducible character of
/// its stabilizer.
pub fn extended_quotient(action: &LatticeAction) -> Result<ExtendedQuotient, ExquoError> {
    build_quotient(action, None)
}

/// Assembles the ♮-twisted extended quotient: labels are the blocks of the
/// twisted group algebra of each stabilizer under the restricted cocycle.
pub fn twisted_extended_quotient(
    action: &LatticeAction,
    cocycle: &Cocycle2,
) -> Result<ExtendedQuotient, ExquoError> {
    if cocycle.order() != action.group().order() {
        return Err(ExquoError::InvalidCocycle(format!(
            "cocycle order {} does not match group order {}",
            cocycle.order(),
            action.group().order()
        )));
    }
    match verify_cocycle(action.group(), cocycle) {
        CocycleVerdict::Valid => {}
        CocycleVerdict::NotNormalized { g } => {
            return Err(ExquoError::InvalidCocycle(format!("not normalized at element {g}")));
        }
        CocycleVerdict::IdentityFails { g, h, k } => {
            return Err(ExquoError::InvalidCocycle(format!(
                "cocycle identity fails at ({g}, {h}, {k})"
            )));
        }
    }
    build_quotient(action, Some(cocycle))
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

impl ExtendedQuotient {
    pub fn action(&self) -> &LatticeAction {
        &self.action
    }

    pub fn twisted_by(&self) -> Option<&Cocycle2> {
        self.twisted_by.as_ref()
    }

    pub fn strata(&self) -> &[EqStratum] {
        &self.strata
    }

    /// Pairs (i, j): carrier of stratum i strictly inside carrier of j.
    pub fn containments(&self) -> &[(usize, usize)] {
        &self.containments
    }

    /// Fiber sizes per stratum, in stratum order.
    pub fn multiplicities(&self) -> Vec<usize> {
        self.strata.iter().map(EqStratum::multiplicity).collect()
    }

    /// Index of the stratum whose stabilizer class representative matches.
    pub fn stratum_of_stabilizer(&self, rep: &[usize]) -> Option<usize> {
        self.strata.iter().position(|s| s.stratum.stabilizer == rep)
    }

    /// The fiber of the extended quotient over a torus point: the labels of
    /// the stratum the point lies on.
    pub fn fiber_at(&self, point: &[Gq]) -> Result<FiberAt, ExquoError> {
        let stabilizer = self
            .action
            .stabilizer_of_point(point)
            .map_err(|e| ExquoError::PointOffTorus(e.to_string()))?;
        let rep = self.action.group().subgroup_class_rep(&stabilizer);
        let stratum = self.stratum_of_stabilizer(&rep).ok_or_else(|| {
            ExquoError::Validation(format!(
                "stabilizer class {rep:?} does not appear in the stratification census"
            ))
        })?;
        Ok(FiberAt { stratum, labels: self.strata[stratum].labels.clone() })
    }

    /// Covered sheet counts and excess sheet counts per stratum.
    ///
    /// A stratum's sheets are its labels. Sheets of larger strata whose
    /// carriers strictly contain this stratum's carrier (with strictly
    /// larger dimension, so their closures sweep through it) cover part of
    /// the fiber; the excess beyond that covering is what this stratum
    /// contributes as new components.
    fn sheet_excess(&self) -> Vec<(usize, usize)> {
        let n = self.strata.len();
        let mut covering: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(i, j) in &self.containments {
            if self.strata[j].stratum.carrier.rank_fixed > self.strata[i].stratum.carrier.rank_fixed
            {
                covering[i].push(j);
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.strata[i].stratum.carrier.rank_fixed));
        let mut covered = vec![0usize; n];
        let mut excess = vec![0usize; n];
        for &i in &order {
            covered[i] = covering[i].iter().map(|&j| excess[j]).sum();
            excess[i] = self.strata[i].multiplicity().saturating_sub(covered[i]);
        }
        covered.into_iter().zip(excess).collect()
    }

    /// Number of connected components of the image of stratum `i` in the
    /// ordinary quotient X/Γ: normalizer orbits on the components of the
    /// stratum.
    fn stratum_quotient_components(&self, i: usize) -> Result<u64, ExquoError> {
        let st = &self.strata[i].stratum;
        let carrier = &st.carrier;
        if carrier.component_count == 1 {
            // An irreducible carrier minus a proper closed locus stays
            // connected, and a connected set has a connected image.
            return Ok(1);
        }
        let group = self.action.group();
        let normalizer: Vec<usize> = (0..group.order())
            .filter(|&g| group.conjugate_subgroup(&st.stabilizer, g) == st.stabilizer)
            .collect();
        if carrier.rank_fixed == 0 {
            // Finite carrier: every point is torsion of order dividing the
            // census modulus, so enumerate the points directly.
            if carrier.torsion.iter().any(|&t| CENSUS_MODULUS % (t as i64) != 0) {
                return Err(ExquoError::Validation(format!(
                    "carrier torsion {:?} is not visible at modulus {CENSUS_MODULUS}",
                    carrier.torsion
                )));
            }
            let m = CENSUS_MODULUS;
            let points: Vec<Vec<i64>> = self
                .action
                .discrete_points(m)
                .into_iter()
                .filter(|a| {
                    st.stabilizer.iter().all(|&h| self.action.discrete_action(h, a, m) == *a)
                })
                .filter(|a| self.action.discrete_stabilizer(a, m) == st.stabilizer)
                .collect();
            if points.is_empty() {
                return Err(ExquoError::Validation(format!(
                    "stratum {i} has no points at the census modulus"
                )));
            }
            return Ok(discrete_orbit_count(&self.action, &normalizer, points, m));
        }
        // Positive-rank disconnected carrier: count normalizer orbits on the
        // component group. Components are separated by torsion points: the
        // fixed m-torsion points cover every component, and two of them lie
        // on the same component exactly when their difference is the m-th
        // power of a fixed m²-torsion point. Each component is assumed to
        // meet the stratum, which holds unless an excluded carrier swallows
        // a whole component of the same dimension.
        let m = carrier.torsion.iter().fold(1i64, |acc, &t| num_integer::lcm(acc, t as i64));
        let m2 = m * m;
        let cost = (m2 as u128).saturating_pow(self.action.rank() as u32);
        if cost > CENSUS_ENUMERATION_BOUND {
            return Err(ExquoError::Validation(format!(
                "component census enumeration at modulus {m2} exceeds the bound"
            )));
        }
        let fixed_by_stab = |a: &Vec<i64>, modulus: i64| {
            st.stabilizer.iter().all(|&h| self.action.discrete_action(h, a, modulus) == *a)
        };
        let fix_m: Vec<Vec<i64>> =
            self.action.discrete_points(m).into_iter().filter(|a| fixed_by_stab(a, m)).collect();
        let identity_component: BTreeSet<Vec<i64>> = self
            .action
            .discrete_points(m2)
            .into_iter()
            .filter(|a| fixed_by_stab(a, m2))
            .map(|a| a.iter().map(|x| x.rem_euclid(m)).collect())
            .collect();
        // Canonical coset representative: least translate by the identity
        // component's m-torsion.
        let coset_key = |a: &[i64]| -> Vec<i64> {
            identity_component
                .iter()
                .map(|t| {
                    a.iter().zip(t).map(|(x, y)| (x + y).rem_euclid(m)).collect::<Vec<i64>>()
                })
                .min()
                .expect("identity component contains the origin")
        };
        let cosets: BTreeSet<Vec<i64>> = fix_m.iter().map(|a| coset_key(a)).collect();
        let points: Vec<Vec<i64>> = cosets.into_iter().collect();
        let mut orbits = 0u64;
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        for start in &points {
            if seen.contains(start) {
                continue;
            }
            orbits += 1;
            let mut queue = vec![start.clone()];
            seen.insert(start.clone());
            while let Some(a) = queue.pop() {
                for &g in &normalizer {
                    let image = coset_key(&self.action.discrete_action(g, &a, m));
                    if seen.insert(image.clone()) {
                        queue.push(image);
                    }
                }
            }
        }
        Ok(orbits)
    }

    /// Census of the connected components of the extended quotient.
    ///
    /// Each stratum contributes its excess sheets — labels not covered by
    /// the closures of sheets over strictly larger strata — once per
    /// component of its image in the ordinary quotient. The total agrees
    /// with the conjugacy-class decomposition of the quotient.
    pub fn component_census(&self) -> Result<ComponentCensus, ExquoError> {
        let excess = self.sheet_excess();
        let mut rows = Vec::with_capacity(self.strata.len());
        let mut total = 0u64;
        for (i, &(covered, excess)) in excess.iter().enumerate() {
            let stratum_components = self.stratum_quotient_components(i)?;
            let contribution = excess as u64 * stratum_components;
            total += contribution;
            rows.push(CensusRow {
                stratum: i,
                multiplicity: self.strata[i].multiplicity(),
                covered,
                excess,
                stratum_components,
                contribution,
            });
        }
        Ok(ComponentCensus { rows, total })
    }

    /// Flat per-stratum rows for reports.
    pub fn report_rows(&self) -> Vec<EqReportRow> {
        self.strata
            .iter()
            .enumerate()
            .map(|(i, s)| EqReportRow {
                stratum: i,
                stabilizer_order: s.stratum.stabilizer.len(),
                num_conjugates: s.stratum.num_conjugates,
                carrier_rank: s.stratum.carrier.rank_fixed,
                carrier_torsion: s.stratum.carrier.torsion.clone(),
                carrier_components: s.stratum.carrier.component_count,
                multiplicity: s.multiplicity(),
                trivial_label: s.trivial_label,
                labels: s.labels.clone(),
            })
            .collect()
    }
}

/// Orbit count of a group element subset acting discretely on points.
fn discrete_orbit_count(
    action: &LatticeAction,
    elements: &[usize],
    points: Vec<Vec<i64>>,
    m: i64,
) -> u64 {
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let point_set: BTreeSet<Vec<i64>> = points.iter().cloned().collect();
    let mut orbits = 0;
    for start in &points {
        if seen.contains(start) {
            continue;
        }
        orbits += 1;
        let mut queue = vec![start.clone()];
        seen.insert(start.clone());
        while let Some(a) = queue.pop() {
            for &g in elements {
                let image = action.discrete_action(g, &a, m);
                if point_set.contains(&image) && seen.insert(image.clone()) {
                    queue.push(image);
                }
            }
        }
    }
    orbits
}

/// One row of the component census.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub stratum: usize,
    pub multiplicity: usize,
    /// Sheets arriving from the closures of larger strata.
    pub covered: usize,
    /// Sheets this stratum contributes as new components.
    pub excess: usize,
    /// Components of the stratum's image in the ordinary quotient.
    pub stratum_components: u64,
    pub contribution: u64,
}

/// Component census of the extended quotient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCensus {
    pub rows: Vec<CensusRow>,
    pub total: u64,
}

/// One row of the stratum report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqReportRow {
    pub stratum: usize,
    pub stabilizer_order: usize,
    pub num_conjugates: usize,
    pub carrier_rank: usize,
    pub carrier_torsion: Vec<u64>,
    pub carrier_components: u64,
    pub multiplicity: usize,
    pub trivial_label: Option<usize>,
    pub labels: Vec<FiberLabel>,
}

// ---------------------------------------------------------------------------
// Discrete oracle
// ---------------------------------------------------------------------------

/// Census row for one stratum at a fixed torsion modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumCensus {
    pub stratum: usize,
    /// Torsion points landing on this stratum.
    pub points: u64,
    /// Fiber size recomputed from scratch at those points.
    pub brute_fiber_size: usize,
    /// Fiber size claimed by the extended quotient.
    pub symbolic_multiplicity: usize,
}

/// Outcome of the discrete fiber-size census at one modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteCensus {
    pub m: i64,
    pub total_points: u64,
    pub per_stratum: Vec<StratumCensus>,
    /// Points whose stabilizer class is missing from the stratification.
    pub unmatched_points: u64,
    pub matches: bool,
}

/// Verifies the fiber-size law over all m-torsion points: at every point
/// the number of labels claimed by the (twisted) extended quotient must
/// equal the class count of the stabilizer recomputed by brute force —
/// conjugacy classes in the plain case, ♮-regular classes in the twisted
/// case.
pub fn discrete_oracle(
    action: &LatticeAction,
    cocycle: Option<&Cocycle2>,
    m: i64,
) -> Result<DiscreteCensus, ExquoError> {
    if m < 1 {
        return Err(ExquoError::Validation(format!("modulus {m} must be positive")));
    }
    let eq = match cocycle {
        None => extended_quotient(action)?,
        Some(c) => twisted_extended_quotient(action, c)?,
    };
    let group = action.group();
    let n = eq.strata().len();
    let mut points = vec![0u64; n];
    let mut observed: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut unmatched = 0u64;
    let mut total = 0u64;
    let mut fiber_size: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for a in action.discrete_points(m) {
        total += 1;
        let stabilizer = action.discrete_stabilizer(&a, m);
        let rep = group.subgroup_class_rep(&stabilizer);
        let Some(i) = eq.stratum_of_stabilizer(&rep) else {
            unmatched += 1;
            continue;
        };
        points[i] += 1;
        let size = match fiber_size.get(&stabilizer) {
            Some(&s) => s,
            None => {
                let (sub, _) = group.subgroup_table(&stabilizer)?;
                let s = match cocycle {
                    None => sub.conjugacy_classes().len(),
                    Some(c) => {
                        let restricted = c.restrict(&stabilizer)?;
                        regular_classes(&sub, &restricted).len()
                    }
                };
                fiber_size.insert(stabilizer.clone(), s);
                s
            }
        };
        observed[i].insert(size);
    }
    let mut matches = unmatched == 0;
    let per_stratum: Vec<StratumCensus> = (0..n)
        .map(|i| {
            let symbolic = eq.strata()[i].multiplicity();
            let brute = observed[i].iter().next().copied().unwrap_or(symbolic);
            if observed[i].len() > 1 || brute != symbolic {
                matches = false;
            }
            StratumCensus {
                stratum: i,
                points: points[i],
                brute_fiber_size: brute,
                symbolic_multiplicity: symbolic,
            }
        })
        .collect();
    Ok(DiscreteCensus { m, total_points: total, per_stratum, unmatched_points: unmatched, matches })
}

// ---------------------------------------------------------------------------
// Per-class support report
// ---------------------------------------------------------------------------

/// Support data of one conjugacy class of the acting group: the fixed
/// subtorus of a representative and the size of its centralizer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HhClassSupport {
    pub class_rep: usize,
    pub class_size: usize,
    pub centralizer_order: usize,
    pub fixed: SubtorusData,
}

/// Per-conjugacy-class support report: for each class w, the exact data of
/// the fixed locus T^w together with the centralizer order.
pub fn hh_support(action: &LatticeAction) -> Result<Vec<HhClassSupport>, ExquoError> {
    let group = action.group();
    group
        .conjugacy_classes()
        .iter()
        .map(|class| {
            let w = class[0];
            let cyclic = group.generated_subgroup(&[w]);
            let fixed = fixed_subtorus(action, &cyclic)?;
            Ok(HhClassSupport {
                class_rep: w,
                class_size: class.len(),
                centralizer_order: group.centralizer(w).len(),
                fixed,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Shift data for gluing
// ---------------------------------------------------------------------------

/// Per-stratum multiplicative shifts recorded as integer exponents of the
/// square-root parameter v, whose square is the deformation parameter; a
/// half-integer power of the deformation parameter is therefore an integer
/// power of v.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaShift {
    /// Exact scalar value of v, e.g. "2" or "1/2".
    pub v: String,
    /// Stratum index → one v-exponent per torus coordinate.
    pub shifts: BTreeMap<usize, Vec<i64>>,
}

impl ThetaShift {
    /// The zero shift on every stratum with nontrivial stabilizer.
    pub fn zero_for(eq: &ExtendedQuotient, v: &str) -> Self {
        let identity = eq.action().group().identity();
        let shifts = eq
            .strata()
            .iter()
            .enumerate()
            .filter(|(_, s)| s.stratum.stabilizer != [identity])
            .map(|(i, _)| (i, vec![0i64; eq.action().rank()]))
            .collect();
        Self { v: v.to_string(), shifts }
    }
}

/// One doubled locus of the glued parameter space: over the shifted image
/// of this stratum's carrier, the listed extra sheets appear.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaDoubling {
    pub stratum: usize,
    /// Names of the extra sheets (the covered sheets are identified with
    /// incoming closures, the trivial sheet first by convention).
    pub labels: Vec<String>,
    pub extra: usize,
    pub shift_v_exponents: Vec<i64>,
    pub carrier: SubtorusData,
    /// Deeper fixed loci over which these sheets do NOT contribute separate
    /// points: where the fiber there has no room for them, the sheets merge
    /// into the sheets already present, so the doubling is cut out there.
    pub minus: Vec<SubtorusData>,
}

/// Everything a gluing consumer needs: the action (to test membership in
/// quotient images), the value of v, and the doubled loci.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaGlueData {
    pub action: ActionJson,
    pub v: String,
    pub doublings: Vec<ThetaDoubling>,
}

/// Assembles gluing data for the deformed quotient: every stratum with
/// excess sheets contributes a doubling over the shifted image of its
/// carrier. Every stratum with nontrivial stabilizer must carry a shift
/// (possibly zero); a shift on the free stratum must be zero.
pub fn theta_glue_data(
    eq: &ExtendedQuotient,
    shift: &ThetaShift,
) -> Result<ThetaGlueData, ExquoError> {
    let v: Gq = shift
        .v
        .parse()
        .map_err(|e| ExquoError::Validation(format!("cannot parse v {:?}: {e}", shift.v)))?;
    if v.is_zero() {
        return Err(ExquoError::Validation("v must be nonzero".into()));
    }
    let identity = eq.action().group().identity();
    let rank = eq.action().rank();
    let excess = eq.sheet_excess();
    let mut doublings = Vec::new();
    for (i, stratum) in eq.strata().iter().enumerate() {
        if stratum.stratum.stabilizer == [identity] {
            if let Some(s) = shift.shifts.get(&i) {
                if s.iter().any(|&e| e != 0) {
                    return Err(ExquoError::Validation(format!(
                        "shift on the free stratum {i} must be zero, got {s:?}"
                    )));
                }
            }
            continue;
        }
        let s = shift.shifts.get(&i).ok_or(ExquoError::ShiftMissing(i))?;
        if s.len() != rank {
            return Err(ExquoError::Validation(format!(
                "shift for stratum {i} has length {}, expected {rank}",
                s.len()
            )));
        }
        let (covered, extra) = excess[i];
        if extra == 0 {
            continue;
        }
        // Order the labels with the trivial sheet first; the first
        // `covered` of them are identified with incoming closures, the
        // remainder are the genuinely new sheets.
        let mut order: Vec<usize> = (0..stratum.labels.len()).collect();
        if let Some(t) = stratum.trivial_label {
            order.retain(|&j| j != t);
            order.insert(0, t);
        }
        let labels: Vec<String> =
            order[covered.min(order.len())..].iter().map(|&j| stratum.labels[j].name.clone()).collect();
        // Decide, per deeper fixed locus, whether these sheets contribute
        // their closure points there or merge into the sheets already
        // present.  The sheets extend exactly when the deeper fiber has room
        // for every incoming closure; a fiber of size one swallows them all.
        // Anything in between cannot be resolved by counting alone.
        let rank_here = stratum.stratum.carrier.rank_fixed;
        let mut minus = Vec::new();
        for excl in &stratum.stratum.excluded {
            let locus = fixed_subtorus(eq.action(), excl)?;
            let cut = if rank_here == 0 || locus.rank_fixed >= rank_here {
                // A closed (or swallowed) sheet never reaches past its own
                // stratum.
                true
            } else {
                let rep = eq.action().group().subgroup_class_rep(excl);
                let d = eq.stratum_of_stabilizer(&rep).ok_or_else(|| {
                    ExquoError::Validation(format!("no stratum for stabilizer {rep:?}"))
                })?;
                let (covered_d, _) = excess[d];
                let room = eq.strata()[d].multiplicity();
                if covered_d <= room {
                    false
                } else if room == 1 {
                    true
                } else {
                    return Err(ExquoError::Validation(format!(
                        "sheet merging over stratum {d} is ambiguous: \
                         {covered_d} incoming sheets for {room} points"
                    )));
                }
            };
            if cut {
                minus.push(locus);
            }
        }
        doublings.push(ThetaDoubling {
            stratum: i,
            labels,
            extra,
            shift_v_exponents: s.clone(),
            carrier: stratum.stratum.carrier.clone(),
            minus,
        });
    }
    Ok(ThetaGlueData { action: eq.action().to_json(), v: shift.v.clone(), doublings })
}

// ---------------------------------------------------------------------------
// Bundled instances
// ---------------------------------------------------------------------------

/// S₂ swapping the two coordinates of a rank-2 torus.
pub fn gl2_swap_action() -> LatticeAction {
    let group = FiniteGroupTable::symmetric(2).expect("degree 2 is in range");
    LatticeAction::from_permutations(2, None, group, &[vec![0, 1], vec![1, 0]])
        .expect("valid by construction")
}

/// The shift attached to the rank-2 swap action: on the diagonal stratum
/// the two coordinates move to (v⁻¹·z, v·z).
pub fn gl2_theta_shift(v: &str) -> ThetaShift {
    let mut shifts = BTreeMap::new();
    shifts.insert(1usize, vec![-1i64, 1]);
    ThetaShift { v: v.to_string(), shifts }
}

/// S₃ permuting the quotient lattice ℤ³/ℤ(1,1,1): the torus is the rank-2
/// subtorus {t₁t₂t₃ = 1} of (ℂ×)³ with permuted coordinates.
pub fn sl3_quotient_action() -> LatticeAction {
    let group = FiniteGroupTable::symmetric(3).expect("degree 3 is in range");
    let perms = all_permutations(3);
    LatticeAction::from_permutations(3, Some(vec![1, 1, 1]), group, &perms)
        .expect("valid by construction")
}

/// The Klein four-group permuting four torus coordinates in pairs, together
/// with the cocycle of the built-in projective representation.
pub fn sl5d_action() -> (LatticeAction, Cocycle2) {
    let (group, cocycle) = rho_quaternion();
    let perms: Vec<Vec<usize>> = vec![
        vec![0, 1, 2, 3],
        vec![1, 0, 3, 2],
        vec![2, 3, 0, 1],
        vec![3, 2, 1, 0],
    ];
    let action = LatticeAction::from_permutations(4, None, group, &perms)
        .expect("valid by construction");
    (action, cocycle)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn gq(s: &str) -> Gq {
        s.parse().expect("scalar literal")
    }

    fn point(coords: &[&str]) -> Vec<Gq> {
        coords.iter().map(|s| gq(s)).collect()
    }

    /// S₃ acting on the rank-2 root lattice of the 2-sphere of ℤ³: the
    /// quotient of the permutation representation by its invariant vector,
    /// realized on the basis f₀ = e₀ − e₂, f₁ = e₁ − e₂.
    fn adjoint_a2_action() -> LatticeAction {
        let group = FiniteGroupTable::symmetric(3).expect("degree 3 is in range");
        let phi = |i: usize| -> [i64; 2] {
            match i {
                0 => [1, 0],
                1 => [0, 1],
                _ => [0, 0],
            }
        };
        let matrices: Vec<Vec<Vec<i64>>> = all_permutations(3)
            .iter()
            .map(|p| {
                let mut m = vec![vec![0i64; 2]; 2];
                for j in 0..2 {
                    let a = phi(p[j]);
                    let b = phi(p[2]);
                    m[0][j] = a[0] - b[0];
                    m[1][j] = a[1] - b[1];
                }
                m
            })
            .collect();
        LatticeAction::new(2, None, group, matrices).expect("valid by construction")
    }

    /// C₄ rotating a rank-2 lattice by 90 degrees.
    fn c4_rotation_action() -> LatticeAction {
        let group = FiniteGroupTable::cyclic(4);
        let r = vec![vec![0i64, -1], vec![1, 0]];
        let mut matrices = vec![vec![vec![1i64, 0], vec![0, 1]]];
        for _ in 0..3 {
            let prev = matrices.last().expect("nonempty");
            let mut next = vec![vec![0i64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    next[i][j] = (0..2).map(|k| r[i][k] * prev[k][j]).sum();
                }
            }
            matrices.push(next);
        }
        LatticeAction::new(2, None, group, matrices).expect("valid by construction")
    }

    /// C₂ fixing the first coordinate and inverting the second.
    fn mixed_reflection_action() -> LatticeAction {
        let group = FiniteGroupTable::cyclic(2);
        let matrices = vec![
            vec![vec![1i64, 0], vec![0, 1]],
            vec![vec![1i64, 0], vec![0, -1]],
        ];
        LatticeAction::new(2, None, group, matrices).expect("valid by construction")
    }

    /// Independent component count: the class decomposition ⊔_w T^w/Z(w),
    /// with orbit counting on components done from scratch.
    fn class_decomposition_components(action: &LatticeAction) -> u64 {
        let group = action.group();
        let mut total = 0u64;
        for class in group.conjugacy_classes() {
            let w = class[0];
            let cyclic = group.generated_subgroup(&[w]);
            let data = fixed_subtorus(action, &cyclic).expect("cyclic subgroup");
            if data.component_count == 1 {
                total += 1;
                continue;
            }
            let centralizer = group.centralizer(w);
            let m = data.torsion.iter().fold(1i64, |acc, &t| num_integer::lcm(acc, t as i64));
            let m2 = m * m;
            let fixed = |a: &Vec<i64>, modulus: i64| {
                cyclic.iter().all(|&h| action.discrete_action(h, a, modulus) == *a)
            };
            let fix_m: Vec<Vec<i64>> =
                action.discrete_points(m).into_iter().filter(|a| fixed(a, m)).collect();
            let t0: BTreeSet<Vec<i64>> = action
                .discrete_points(m2)
                .into_iter()
                .filter(|a| fixed(a, m2))
                .map(|a| a.iter().map(|x| x.rem_euclid(m)).collect())
                .collect();
            let key = |a: &[i64]| -> Vec<i64> {
                t0.iter()
                    .map(|t| {
                        a.iter().zip(t).map(|(x, y)| (x + y).rem_euclid(m)).collect::<Vec<i64>>()
                    })
                    .min()
                    .expect("contains origin")
            };
            let cosets: BTreeSet<Vec<i64>> = fix_m.iter().map(|a| key(a)).collect();
            let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
            for start in &cosets {
                if seen.contains(start) {
                    continue;
                }
                total += 1;
                let mut queue = vec![start.clone()];
                seen.insert(start.clone());
                while let Some(a) = queue.pop() {
                    for &g in &centralizer {
                        let image = key(&action.discrete_action(g, &a, m));
                        if seen.insert(image.clone()) {
                            queue.push(image);
                        }
                    }
                }
            }
        }
        total
    }

    #[test]
    fn trivial_group_quotient_is_the_torus() {
        let group = FiniteGroupTable::trivial();
        let action = LatticeAction::from_permutations(2, None, group, &[vec![0, 1]])
            .expect("valid by construction");
        let eq = extended_quotient(&action).expect("quotient");
        assert_eq!(eq.multiplicities(), vec![1]);
        assert_eq!(eq.component_census().expect("census").total, 1);
        let fiber = eq.fiber_at(&point(&["2", "3"])).expect("on torus");
        assert_eq!(fiber.stratum, 0);
        assert_eq!(fiber.labels.len(), 1);
        assert!(fiber.labels[0].trivial);
    }

    #[test]
    fn gl2_has_two_components() {
        let eq = extended_quotient(&gl2_swap_action()).expect("quotient");
        assert_eq!(eq.multiplicities(), vec![1, 2]);
        let census = eq.component_census().expect("census");
        assert_eq!(census.total, 2);
        assert_eq!(census.rows[0].covered, 0);
        assert_eq!(census.rows[0].excess, 1);
        assert_eq!(census.rows[1].covered, 1);
        assert_eq!(census.rows[1].excess, 1);
        for stratum in eq.strata() {
            assert!(stratum.trivial_label.is_some());
            assert!(stratum.normalizer_action.is_empty());
            assert_eq!(stratum.label_orbits, stratum.multiplicity());
        }
    }

    #[test]
    fn fiber_sizes_follow_the_stabilizer() {
        let eq = extended_quotient(&gl2_swap_action()).expect("quotient");
        assert_eq!(eq.fiber_at(&point(&["2", "2"])).expect("diag").labels.len(), 2);
        assert_eq!(eq.fiber_at(&point(&["2", "3"])).expect("free").labels.len(), 1);
        let err = eq.fiber_at(&point(&["0", "1"])).expect_err("off torus");
        assert!(matches!(err, ExquoError::PointOffTorus(_)));
    }

    #[test]
    fn v4_untwisted_labels_and_census() {
        let (action, _) = sl5d_action();
        let eq = extended_quotient(&action).expect("quotient");
        assert_eq!(eq.multiplicities(), vec![1, 2, 2, 2, 4]);
        assert_eq!(eq.component_census().expect("census").total, 4);
        for stratum in eq.strata() {
            assert!(stratum.trivial_label.is_some());
            assert!(stratum.normalizer_action.is_empty());
        }
        // Every label of an abelian stabilizer is one-dimensional.
        for label in &eq.strata()[4].labels {
            assert_eq!(label.dim, Some(1));
        }
    }

    #[test]
    fn sl5d_twisted_multiplicities() {
        let (action, cocycle) = sl5d_action();
        let eq = twisted_extended_quotient(&action, &cocycle).expect("quotient");
        assert_eq!(eq.multiplicities(), vec![1, 2, 2, 2, 1]);
        assert_eq!(eq.component_census().expect("census").total, 4);
        // The deepest stratum carries the unique two-dimensional block.
        assert_eq!(eq.strata()[4].labels[0].dim, Some(2));
        for stratum in eq.strata() {
            assert!(stratum.trivial_label.is_none());
            assert!(stratum.normalizer_action.is_empty());
        }
    }

    #[test]
    fn trivial_cocycle_matches_the_plain_quotient() {
        let (action, _) = sl5d_action();
        let plain = extended_quotient(&action).expect("plain");
        let cocycle = Cocycle2::trivial(4);
        let twisted = twisted_extended_quotient(&action, &cocycle).expect("twisted");
        assert_eq!(plain.multiplicities(), twisted.multiplicities());
        for (p, t) in plain.strata().iter().zip(twisted.strata()) {
            assert_eq!(p.stratum, t.stratum);
        }
        assert_eq!(
            plain.component_census().expect("census").total,
            twisted.component_census().expect("census").total,
        );
    }

    #[test]
    fn fiber_at_the_bundled_points() {
        let (action, cocycle) = sl5d_action();
        let plain = extended_quotient(&action).expect("plain");
        let twisted = twisted_extended_quotient(&action, &cocycle).expect("twisted");
        let free = point(&["2", "3", "5", "7"]);
        let middle = point(&["2", "3", "2", "3"]);
        let deep = point(&["5", "5", "5", "5"]);
        assert_eq!(plain.fiber_at(&free).expect("free").labels.len(), 1);
        assert_eq!(plain.fiber_at(&middle).expect("middle").labels.len(), 2);
        assert_eq!(plain.fiber_at(&deep).expect("deep").labels.len(), 4);
        assert_eq!(twisted.fiber_at(&free).expect("free").labels.len(), 1);
        assert_eq!(twisted.fiber_at(&middle).expect("middle").labels.len(), 2);
        assert_eq!(twisted.fiber_at(&deep).expect("deep").labels.len(), 1);
    }

    #[test]
    fn fiber_sizes_on_the_quotient_torus() {
        let eq = extended_quotient(&sl3_quotient_action()).expect("quotient");
        assert_eq!(eq.fiber_at(&point(&["1", "1", "1"])).expect("deep").labels.len(), 3);
        assert_eq!(eq.fiber_at(&point(&["2", "2", "1/4"])).expect("wall").labels.len(), 2);
        assert_eq!(eq.fiber_at(&point(&["2", "3", "1/6"])).expect("free").labels.len(), 1);
        // Off the quotient torus: coordinates multiply to 2, not 1.
        let err = eq.fiber_at(&point(&["2", "1", "1"])).expect_err("off torus");
        assert!(matches!(err, ExquoError::PointOffTorus(_)));
    }

    #[test]
    fn discrete_oracle_matches_symbolic_multiplicities() {
        for m in [1, 2, 3, 4, 6, 12] {
            let census = discrete_oracle(&gl2_swap_action(), None, m).expect("census");
            assert!(census.matches, "swap action fails at m = {m}: {census:?}");
            let census = discrete_oracle(&sl3_quotient_action(), None, m).expect("census");
            assert!(census.matches, "quotient action fails at m = {m}: {census:?}");
        }
        let (action, cocycle) = sl5d_action();
        for m in [1, 2, 3, 4, 12] {
            let census = discrete_oracle(&action, None, m).expect("census");
            assert!(census.matches, "plain rank-4 action fails at m = {m}: {census:?}");
            let census = discrete_oracle(&action, Some(&cocycle), m).expect("census");
            assert!(census.matches, "twisted rank-4 action fails at m = {m}: {census:?}");
        }
    }

    #[test]
    fn oracle_rejects_a_bad_modulus() {
        let err = discrete_oracle(&gl2_swap_action(), None, 0).expect_err("m = 0");
        assert!(matches!(err, ExquoError::Validation(_)));
    }

    #[test]
    fn oracle_point_totals_are_complete() {
        // Strata partition the torsion points: the per-stratum counts sum
        // to the total and every stratum is populated at m = 12.
        let census = discrete_oracle(&sl3_quotient_action(), None, 12).expect("census");
        assert_eq!(census.total_points, 144);
        assert_eq!(census.unmatched_points, 0);
        let sum: u64 = census.per_stratum.iter().map(|r| r.points).sum();
        assert_eq!(sum, census.total_points);
        assert!(census.per_stratum.iter().all(|r| r.points > 0));
    }

    #[test]
    fn hh_support_for_the_quotient_action() {
        let action = sl3_quotient_action();
        let rows = hh_support(&action).expect("support");
        assert_eq!(rows.len(), 3);
        // Identity: the full quotient torus.
        assert_eq!(rows[0].class_rep, 0);
        assert_eq!(rows[0].class_size, 1);
        assert_eq!(rows[0].centralizer_order, 6);
        assert_eq!(rows[0].fixed.rank_fixed, 2);
        assert_eq!(rows[0].fixed.component_count, 1);
        // Transpositions: a one-dimensional fixed locus.
        assert_eq!(rows[1].class_size, 3);
        assert_eq!(rows[1].centralizer_order, 2);
        assert_eq!(rows[1].fixed.rank_fixed, 1);
        assert_eq!(rows[1].fixed.component_count, 1);
        // Three-cycles: three isolated fixed points.
        assert_eq!(rows[2].class_size, 2);
        assert_eq!(rows[2].centralizer_order, 3);
        assert_eq!(rows[2].fixed.rank_fixed, 0);
        assert_eq!(rows[2].fixed.torsion, vec![3]);
        assert_eq!(rows[2].fixed.component_count, 3);
        // Cross-check every row against the discrete fixed-point count.
        for row in &rows {
            let expected = row.fixed.component_count * 12u64.pow(row.fixed.rank_fixed as u32);
            assert_eq!(action.discrete_fixed_count(row.class_rep, 12), expected);
        }
    }

    #[test]
    fn adjoint_action_exercises_fallback_labels() {
        let eq = extended_quotient(&adjoint_a2_action()).expect("quotient");
        assert_eq!(eq.strata().len(), 4);
        // Stratum 2 is the three-cycle stabilizer: ℚ(i) does not split it,
        // so its labels fall back to conjugacy-class sheets.
        let c3 = &eq.strata()[2];
        assert_eq!(c3.stratum.stabilizer, vec![0, 3, 4]);
        assert_eq!(c3.multiplicity(), 3);
        assert!(c3.labels.iter().all(|l| l.dim.is_none()));
        assert!(c3.trivial_label.is_none());
        // A transposition swaps the two nontrivial classes.
        assert!(!c3.normalizer_action.is_empty());
        assert_eq!(c3.label_orbits, 2);
        // The full-group stratum splits and keeps its character labels.
        let s3 = &eq.strata()[3];
        assert_eq!(s3.multiplicity(), 3);
        assert_eq!(
            {
                let mut dims: Vec<Option<usize>> = s3.labels.iter().map(|l| l.dim).collect();
                dims.sort();
                dims
            },
            vec![Some(1), Some(1), Some(2)]
        );
        assert!(s3.trivial_label.is_some());
        assert_eq!(eq.component_census().expect("census").total, 5);
    }

    #[test]
    fn census_matches_the_class_decomposition() {
        let cases: Vec<(&str, LatticeAction)> = vec![
            ("swap", gl2_swap_action()),
            ("quotient", sl3_quotient_action()),
            ("rank-4", sl5d_action().0),
            ("adjoint", adjoint_a2_action()),
            ("rotation", c4_rotation_action()),
            ("mixed reflection", mixed_reflection_action()),
        ];
        for (name, action) in cases {
            let eq = extended_quotient(&action).expect("quotient");
            let census = eq.component_census().expect("census");
            assert_eq!(
                census.total,
                class_decomposition_components(&action),
                "census disagrees with the class decomposition for {name}",
            );
        }
    }

    #[test]
    fn rotation_action_census_counts_merged_components() {
        // The 90-degree rotation: T^{g²} has four points, two of which are
        // swapped by g, so the class decomposition merges them.
        let eq = extended_quotient(&c4_rotation_action()).expect("quotient");
        assert_eq!(eq.component_census().expect("census").total, 8);
        let census = discrete_oracle(&c4_rotation_action(), None, 12).expect("oracle");
        assert!(census.matches);
    }

    #[test]
    fn theta_data_for_the_swap_action() {
        let eq = extended_quotient(&gl2_swap_action()).expect("quotient");
        let data = theta_glue_data(&eq, &gl2_theta_shift("2")).expect("glue data");
        assert_eq!(data.doublings.len(), 1);
        let doubling = &data.doublings[0];
        assert_eq!(doubling.stratum, 1);
        assert_eq!(doubling.extra, 1);
        assert_eq!(doubling.shift_v_exponents, vec![-1, 1]);
        assert_eq!(doubling.carrier.rank_fixed, 1);
        assert!(doubling.minus.is_empty());
        // The doubled sheet is the nontrivial character.
        let diag = &eq.strata()[1];
        let nontrivial =
            diag.labels.iter().find(|l| !l.trivial).expect("sign character").name.clone();
        assert_eq!(doubling.labels, vec![nontrivial]);
        // With the zero shift the doubling sits over the carrier itself.
        let zero = ThetaShift::zero_for(&eq, "2");
        let data = theta_glue_data(&eq, &zero).expect("glue data");
        assert_eq!(data.doublings[0].shift_v_exponents, vec![0, 0]);
        assert!(data.doublings[0].carrier.contains_point(&point(&["2", "2"])));
        assert!(!data.doublings[0].carrier.contains_point(&point(&["2", "3"])));
        // Serialization round-trips.
        let json = serde_json::to_string(&data).expect("serialize");
        let back: ThetaGlueData = serde_json::from_str(&json).expect("deserialize");
        assert_eq!(back, data);
    }

    #[test]
    fn theta_data_rejects_missing_or_misplaced_shifts() {
        let eq = extended_quotient(&gl2_swap_action()).expect("quotient");
        let missing = ThetaShift { v: "2".into(), shifts: BTreeMap::new() };
        let err = theta_glue_data(&eq, &missing).expect_err("missing shift");
        assert!(matches!(err, ExquoError::ShiftMissing(1)));
        let mut shifts = BTreeMap::new();
        shifts.insert(0usize, vec![1i64, 0]);
        shifts.insert(1usize, vec![-1i64, 1]);
        let misplaced = ThetaShift { v: "2".into(), shifts };
        let err = theta_glue_data(&eq, &misplaced).expect_err("shift on the free stratum");
        assert!(matches!(err, ExquoError::Validation(_)));
        let zero_v = ThetaShift { v: "0".into(), shifts: gl2_theta_shift("2").shifts };
        let err = theta_glue_data(&eq, &zero_v).expect_err("v = 0");
        assert!(matches!(err, ExquoError::Validation(_)));
    }

    #[test]
    fn theta_data_for_the_twisted_rank_four_action() {
        let (action, cocycle) = sl5d_action();
        let eq = twisted_extended_quotient(&action, &cocycle).expect("quotient");
        let data = theta_glue_data(&eq, &ThetaShift::zero_for(&eq, "2")).expect("glue data");
        // One doubling per middle stratum; the deepest stratum's single
        // block has no room for the incoming sheets, so each doubling is
        // cut out over the deepest fixed locus.
        assert_eq!(data.doublings.len(), 3);
        for (doubling, stratum) in data.doublings.iter().zip([1usize, 2, 3]) {
            assert_eq!(doubling.stratum, stratum);
            assert_eq!(doubling.extra, 1);
            assert_eq!(doubling.carrier.rank_fixed, 2);
            assert_eq!(doubling.minus.len(), 1);
            assert_eq!(doubling.minus[0].rank_fixed, 1);
        }
    }

    #[test]
    fn theta_data_extends_sheets_when_the_deep_fiber_has_room() {
        // Untwisted, the deepest fiber of the rank-4 action has four sheets:
        // exactly the dense one plus the three incoming closures, so
        // nothing is cut out.
        let (action, _) = sl5d_action();
        let eq = extended_quotient(&action).expect("quotient");
        let data = theta_glue_data(&eq, &ThetaShift::zero_for(&eq, "2")).expect("glue data");
        assert_eq!(data.doublings.len(), 3);
        for doubling in &data.doublings {
            assert!(doubling.minus.is_empty());
        }
        // On the quotient torus the deepest stratum has its own excess
        // sheet; being a finite stratum it carries no cuts either.
        let eq = extended_quotient(&sl3_quotient_action()).expect("quotient");
        let data = theta_glue_data(&eq, &ThetaShift::zero_for(&eq, "3")).expect("glue data");
        assert_eq!(data.doublings.len(), 2);
        assert_eq!(data.doublings[0].stratum, 1);
        assert!(data.doublings[0].minus.is_empty());
        assert_eq!(data.doublings[1].stratum, 2);
        assert_eq!(data.doublings[1].carrier.rank_fixed, 0);
        assert!(data.doublings[1].minus.is_empty());
    }

    #[test]
    fn invalid_cocycles_are_rejected() {
        let (action, _) = sl5d_action();
        let wrong_order = Cocycle2::trivial(3);
        let err = twisted_extended_quotient(&action, &wrong_order).expect_err("order mismatch");
        assert!(matches!(err, ExquoError::InvalidCocycle(_)));
        // A value table that breaks the cocycle identity.
        let mut values = vec![vec![Gq::one(); 4]; 4];
        values[1][1] = -&Gq::one();
        values[1][2] = Gq::i();
        let broken = Cocycle2::new(values).expect("fourth roots");
        let err = twisted_extended_quotient(&action, &broken).expect_err("identity fails");
        assert!(matches!(err, ExquoError::InvalidCocycle(_)));
    }

    #[test]
    fn report_rows_summarize_the_strata() {
        let (action, cocycle) = sl5d_action();
        let eq = twisted_extended_quotient(&action, &cocycle).expect("quotient");
        let rows = eq.report_rows();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0].stabilizer_order, 1);
        assert_eq!(rows[0].carrier_rank, 4);
        assert_eq!(rows[4].stabilizer_order, 4);
        assert_eq!(rows[4].carrier_rank, 1);
        assert_eq!(rows[4].multiplicity, 1);
        assert_eq!(rows[1].num_conjugates, 1);
        let json = serde_json::to_string(&rows).expect("serialize");
        assert!(json.contains("block0"));
    }

    #[test]
    fn torsion_point_counts_respect_the_kernel() {
        // discrete_points honors the kernel filter; sanity-check the counts
        // used throughout the oracle tests.
        assert_eq!(sl3_quotient_action().discrete_points(12).len(), 144);
        assert_eq!(sl5d_action().0.discrete_points(2).len(), 16);
    }
}
