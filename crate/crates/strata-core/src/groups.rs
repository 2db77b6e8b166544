//! Finite group machinery: validated multiplication tables, conjugacy
//! classes, exact character tables over ℚ(i) (class-algebra eigenvector
//! method), 2-cocycles with values in the fourth roots of unity, and block
//! data of twisted group algebras.
//!
//! Character values are restricted to ℚ(i); groups whose class-algebra
//! eigenvalues leave that field raise `CharFieldError` instead of
//! approximating.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::GaussianRational;
use crate::findim::{FinDimAlgebra, FinDimError};
use crate::linalg::{operator_min_poly, qi_roots, sqrt_gq, QiMatrix};

type Gq = GaussianRational;

/// Exhaustive associativity check up to this order; sampled above.
const EXACT_ASSOC_ORDER: usize = 48;
const ASSOC_SAMPLES: usize = 10_000;

/// Errors raised by finite-group operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    /// The multiplication table violates a group axiom.
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    /// Character or block data does not lie in ℚ(i).
    #[error("character data leaves Q(i): {0}")]
    CharFieldError(String),
    /// A cocycle table violates a cocycle invariant.
    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),
    /// A claimed subgroup subset is not closed.
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    /// Internal algebra failure.
    #[error("algebra analysis failed: {0}")]
    Algebra(String),
}

impl From<FinDimError> for GroupError {
    fn from(err: FinDimError) -> Self {
        match err {
            FinDimError::SplitFieldError { factor } => GroupError::CharFieldError(factor),
            other => GroupError::Algebra(other.to_string()),
        }
    }
}

/// A finite group given by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    order: usize,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

/// JSON form of a group block: `{"order": N, "table": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTableJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

impl FiniteGroupTable {
    /// Validates a multiplication table: square shape, in-range entries,
    /// two-sided identity, two-sided inverses, associativity (exhaustive up
    /// to order 48, sampled with at least 10⁴ triples above).
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::InvalidTable("empty table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::InvalidTable(format!(
                    "row {i} has length {} in a table of order {n}",
                    row.len()
                )));
            }
            for &x in row {
                if x >= n {
                    return Err(GroupError::InvalidTable(format!(
                        "entry {x} out of range in row {i}"
                    )));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| GroupError::InvalidTable("no two-sided identity".into()))?;
        let mut inverse = vec![0usize; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| {
                    GroupError::InvalidTable(format!("element {g} has no two-sided inverse"))
                })?;
        }
        let check = |a: usize, b: usize, c: usize| -> Result<(), GroupError> {
            if table[table[a][b]][c] != table[a][table[b][c]] {
                return Err(GroupError::InvalidTable(format!(
                    "associativity fails at ({a},{b},{c})"
                )));
            }
            Ok(())
        };
        if n <= EXACT_ASSOC_ORDER {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6e0c_1a55);
            for _ in 0..ASSOC_SAMPLES {
                check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))?;
            }
        }
        Ok(Self { order: n, table, identity, inverse })
    }

    pub fn from_json(json: &GroupTableJson) -> Result<Self, GroupError> {
        if json.table.len() != json.order {
            return Err(GroupError::InvalidTable(format!(
                "declared order {} does not match table size {}",
                json.order,
                json.table.len()
            )));
        }
        Self::new(json.table.clone())
    }

    pub fn to_json(&self) -> GroupTableJson {
        GroupTableJson { order: self.order, table: self.table.clone() }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    // -- constructors ------------------------------------------------------

    pub fn trivial() -> Self {
        Self::new(vec![vec![0]]).expect("trivial table")
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(table).expect("cyclic table")
    }

    /// The Klein four-group, elements (e, a, b, c) with ab = c.
    pub fn klein_v4() -> Self {
        let table = vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
        ];
        Self::new(table).expect("V4 table")
    }

    /// The symmetric group S_n (n ≤ 5), elements enumerated in
    /// lexicographic image order.
    pub fn symmetric(n: usize) -> Result<Self, GroupError> {
        if n == 0 || n > 5 {
            return Err(GroupError::InvalidTable(format!(
                "symmetric group degree {n} outside 1..=5"
            )));
        }
        let perms = all_permutations(n);
        let index: BTreeMap<Vec<usize>, usize> =
            perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        // Left-to-right composition on points: (a∘b)(x) = a(b(x)).
                        let prod: Vec<usize> = (0..n).map(|x| a[b[x]]).collect();
                        index[&prod]
                    })
                    .collect()
            })
            .collect();
        Self::new(table)
    }

    // -- subgroups ---------------------------------------------------------

    /// True when the subset contains the identity and is closed under
    /// multiplication and inverses.
    pub fn is_subgroup(&self, elements: &[usize]) -> bool {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        if !set.contains(&self.identity) || set.iter().any(|&g| g >= self.order) {
            return false;
        }
        set.iter().all(|&g| {
            set.contains(&self.inv(g)) && set.iter().all(|&h| set.contains(&self.mul(g, h)))
        })
    }

    /// Closure of a subset under multiplication and inverses.
    pub fn generated_subgroup(&self, generators: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = generators.iter().copied().collect();
        set.insert(self.identity);
        loop {
            let mut grew = false;
            let snapshot: Vec<usize> = set.iter().copied().collect();
            for &g in &snapshot {
                if set.insert(self.inv(g)) {
                    grew = true;
                }
                for &h in &snapshot {
                    if set.insert(self.mul(g, h)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                return set.into_iter().collect();
            }
        }
    }

    /// All subgroups, as sorted element lists ordered by (order, elements).
    pub fn all_subgroups(&self) -> Vec<Vec<usize>> {
        let mut known: BTreeSet<Vec<usize>> = BTreeSet::new();
        known.insert(vec![self.identity]);
        let mut frontier: Vec<Vec<usize>> = vec![vec![self.identity]];
        while let Some(h) = frontier.pop() {
            for g in 0..self.order {
                if h.binary_search(&g).is_ok() {
                    continue;
                }
                let mut gens = h.clone();
                gens.push(g);
                let closure = self.generated_subgroup(&gens);
                if known.insert(closure.clone()) {
                    frontier.push(closure);
                }
            }
        }
        let mut out: Vec<Vec<usize>> = known.into_iter().collect();
        out.sort_by_key(|h| (h.len(), h.clone()));
        out
    }

    /// The conjugate subgroup g·H·g⁻¹, sorted.
    pub fn conjugate_subgroup(&self, h: &[usize], g: usize) -> Vec<usize> {
        let mut out: Vec<usize> = h.iter().map(|&x| self.conjugate(g, x)).collect();
        out.sort_unstable();
        out
    }

    /// Lexicographically least conjugate of H: the canonical class
    /// representative of its conjugacy class of subgroups.
    pub fn subgroup_class_rep(&self, h: &[usize]) -> Vec<usize> {
        (0..self.order).map(|g| self.conjugate_subgroup(h, g)).min().expect("nonempty")
    }

    /// The multiplication table of a subgroup, together with the embedding
    /// (new index → ambient element).
    pub fn subgroup_table(&self, elements: &[usize]) -> Result<(Self, Vec<usize>), GroupError> {
        if !self.is_subgroup(elements) {
            return Err(GroupError::NotASubgroup(format!("{elements:?}")));
        }
        let mut sorted = elements.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let index: BTreeMap<usize, usize> =
            sorted.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let table = sorted
            .iter()
            .map(|&a| sorted.iter().map(|&b| index[&self.mul(a, b)]).collect())
            .collect();
        Ok((Self::new(table)?, sorted))
    }

    // -- conjugacy classes -------------------------------------------------

    pub fn centralizer(&self, g: usize) -> Vec<usize> {
        (0..self.order).filter(|&h| self.mul(g, h) == self.mul(h, g)).collect()
    }

    /// Conjugacy classes as sorted element lists, ordered by least element
    /// (the identity class comes wherever its index falls; class 0 is the
    /// class of element 0).
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for g in 0..self.order {
            if seen[g] {
                continue;
            }
            let mut class: BTreeSet<usize> = BTreeSet::new();
            for h in 0..self.order {
                class.insert(self.conjugate(h, g));
            }
            for &x in &class {
                seen[x] = true;
            }
            classes.push(class.into_iter().collect());
        }
        classes
    }

    /// Index of the class containing g, within `conjugacy_classes()` order.
    pub fn class_of(&self, classes: &[Vec<usize>], g: usize) -> usize {
        classes
            .iter()
            .position(|c| c.binary_search(&g).is_ok())
            .expect("classes partition the group")
    }
}

impl fmt::Display for FiniteGroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "group of order {}", self.order)
    }
}

/// All permutations of {0,…,n−1} in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // Next permutation in lexicographic order.
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
}

// ---------------------------------------------------------------------------
// Character tables
// ---------------------------------------------------------------------------

/// An exact character table over ℚ(i).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    /// One representative per conjugacy class (least element).
    pub class_reps: Vec<usize>,
    pub class_sizes: Vec<usize>,
    /// Irreducible dimensions, ascending.
    pub dims: Vec<usize>,
    /// values[r][c] = χ_r(class c); rows ordered as `dims`.
    pub values: Vec<Vec<Gq>>,
}

impl CharacterTable {
    pub fn num_irreducibles(&self) -> usize {
        self.dims.len()
    }
}

/// Computes the character table by simultaneous diagonalization of the
/// class-sum matrices: joint eigenvectors give the central characters
/// ω_i = |C_i|·χ(g_i)/χ(1), from which dimensions and values follow.
pub fn character_table(group: &FiniteGroupTable) -> Result<CharacterTable, GroupError> {
    let classes = group.conjugacy_classes();
    let r = classes.len();
    let class_of = |g: usize| group.class_of(&classes, g);

    // Class-sum structure constants: C_i·C_j = Σ_k a_{ijk}·C_k, where
    // a_{ijk} counts pairs (x,y) ∈ C_i×C_j with xy = a fixed element of C_k.
    let mut mats = Vec::with_capacity(r);
    for i in 0..r {
        let mut m = QiMatrix::zero(r, r);
        for j in 0..r {
            let target = classes[j].clone();
            let mut counts = vec![0i64; r];
            for &x in &classes[i] {
                for &y in &target {
                    counts[class_of(group.mul(x, y))] += 1;
                }
            }
            // Column j of the action of C_i on the class-sum basis:
            // coefficient of C_k is a_{ijk} computed on any representative;
            // counting over all of C_j and dividing by |C_k| per entry is
            // equivalent and avoids representative bookkeeping.
            for (k, &cnt) in counts.iter().enumerate() {
                debug_assert_eq!(cnt as usize % classes[k].len(), 0);
                *m.at_mut(k, j) = Gq::from_ratio(cnt, classes[k].len() as i64);
            }
        }
        mats.push(m);
    }

    // Joint eigenspace refinement; all final spaces are one-dimensional.
    let mut spaces: Vec<QiMatrix> = vec![QiMatrix::identity(r)];
    for m in &mats {
        let mut refined = Vec::new();
        for space in &spaces {
            if space.cols() == 1 {
                refined.push(space.clone());
                continue;
            }
            let restricted = restrict(m, space).ok_or_else(|| {
                GroupError::Algebra("class-sum operator does not preserve an eigenspace".into())
            })?;
            let min_poly = operator_min_poly(&restricted);
            let (roots, remainder) = qi_roots(&min_poly).map_err(GroupError::CharFieldError)?;
            if let Some(factor) = remainder {
                return Err(GroupError::CharFieldError(format!(
                    "class-algebra eigenvalue factor of degree {} over Q(i)",
                    factor.len() - 1
                )));
            }
            let mut uniq: Vec<Gq> = Vec::new();
            for root in roots {
                if !uniq.contains(&root) {
                    uniq.push(root);
                }
            }
            uniq.sort_by(|a, b| a.re().cmp(b.re()).then_with(|| a.im().cmp(b.im())));
            for lambda in uniq {
                let shifted =
                    restricted.sub(&QiMatrix::identity(restricted.cols()).scale(&lambda));
                let kernel = shifted.kernel_basis();
                if kernel.is_empty() {
                    continue;
                }
                let lifted: Vec<Vec<Gq>> = kernel.iter().map(|v| space.mul_vec(v)).collect();
                refined.push(QiMatrix::from_columns(lifted));
            }
        }
        spaces = refined;
    }
    if spaces.len() != r || spaces.iter().any(|s| s.cols() != 1) {
        return Err(GroupError::Algebra(format!(
            "expected {r} one-dimensional joint eigenspaces, found {}",
            spaces.len()
        )));
    }

    // Extract central characters ω_i per eigenvector.
    let identity_class = class_of(group.identity());
    let inverse_class: Vec<usize> =
        (0..r).map(|i| class_of(group.inv(classes[i][0]))).collect();
    let order = Gq::from_int(group.order() as i64);

    let mut rows: Vec<(usize, Vec<Gq>)> = Vec::with_capacity(r);
    for space in &spaces {
        let v = space.column(0);
        let pivot = v
            .iter()
            .position(|c| !c.is_zero())
            .ok_or_else(|| GroupError::Algebra("zero joint eigenvector".into()))?;
        // ω_i is the eigenvalue of the class-sum matrix M_i on v.
        let mut omega = Vec::with_capacity(r);
        for m in &mats {
            let image = m.mul_vec(&v);
            let lambda = image[pivot].div(&v[pivot]).expect("pivot nonzero");
            debug_assert_eq!(
                image,
                v.iter().map(|c| c * &lambda).collect::<Vec<_>>(),
                "v is a genuine joint eigenvector"
            );
            omega.push(lambda);
        }
        debug_assert!(omega[identity_class].is_one(), "ω is normalized at the identity class");
        // χ(1)² = |G| / Σ_i ω_i·ω_{i*} / |C_i|.
        let mut denom = Gq::zero();
        for i in 0..r {
            let term = (&omega[i] * &omega[inverse_class[i]])
                .div(&Gq::from_int(classes[i].len() as i64))
                .expect("class size nonzero");
            denom = &denom + &term;
        }
        let dim_sq = order.div(&denom).map_err(|e| GroupError::Algebra(e.to_string()))?;
        let dim = sqrt_gq(&dim_sq)
            .filter(|d| d.is_rational() && d.re().is_integer())
            .ok_or_else(|| {
                GroupError::Algebra(format!("χ(1)² = {dim_sq} is not a perfect square"))
            })?;
        let chi: Vec<Gq> = (0..r)
            .map(|i| {
                (&omega[i] * &dim)
                    .div(&Gq::from_int(classes[i].len() as i64))
                    .expect("class size nonzero")
            })
            .collect();
        let dim_usize: usize = dim
            .re()
            .to_integer()
            .try_into()
            .map_err(|_| GroupError::Algebra("negative χ(1)".into()))?;
        rows.push((dim_usize, chi));
    }

    rows.sort_by(|(d1, v1), (d2, v2)| {
        d1.cmp(d2).then_with(|| {
            let k1: Vec<String> = v1.iter().map(|c| c.to_string()).collect();
            let k2: Vec<String> = v2.iter().map(|c| c.to_string()).collect();
            k1.cmp(&k2)
        })
    });

    let table = CharacterTable {
        class_reps: classes.iter().map(|c| c[0]).collect(),
        class_sizes: classes.iter().map(Vec::len).collect(),
        dims: rows.iter().map(|(d, _)| *d).collect(),
        values: rows.into_iter().map(|(_, v)| v).collect(),
    };

    // Exact verification: Σ dims² = |G| and row orthogonality.
    let total: usize = table.dims.iter().map(|d| d * d).sum();
    if total != group.order() {
        return Err(GroupError::Algebra(format!(
            "Σ dims² = {total} does not match the group order {}",
            group.order()
        )));
    }
    for a in 0..r {
        for b in 0..r {
            let mut acc = Gq::zero();
            for i in 0..r {
                let size = Gq::from_int(table.class_sizes[i] as i64);
                acc = &acc
                    + &(&size * &(&table.values[a][i] * &table.values[b][inverse_class[i]]));
            }
            let expect = if a == b { order.clone() } else { Gq::zero() };
            if acc != expect {
                return Err(GroupError::Algebra(format!(
                    "row orthogonality fails between irreducibles {a} and {b}"
                )));
            }
        }
    }
    Ok(table)
}

fn restrict(op: &QiMatrix, space: &QiMatrix) -> Option<QiMatrix> {
    let k = space.cols();
    let mut cols = Vec::with_capacity(k);
    for j in 0..k {
        let image = op.mul_vec(&space.column(j));
        cols.push(space.solve(&image)?);
    }
    Some(QiMatrix::from_columns(cols))
}

// ---------------------------------------------------------------------------
// 2-cocycles and twisted group algebras
// ---------------------------------------------------------------------------

/// A normalized 2-cocycle with values in {1, −1, i, −i}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle2 {
    order: usize,
    values: Vec<Vec<Gq>>,
}

/// JSON form of a cocycle file: the group block plus the value table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleJson {
    pub group: GroupTableJson,
    pub values: Vec<Vec<String>>,
}

/// Outcome of `verify_cocycle`: either valid or the first violation found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CocycleVerdict {
    Valid,
    /// ♮(e,g) or ♮(g,e) differs from 1.
    NotNormalized { g: usize },
    /// ♮(g,h)·♮(gh,k) ≠ ♮(h,k)·♮(g,hk).
    IdentityFails { g: usize, h: usize, k: usize },
}

impl Cocycle2 {
    /// Builds a cocycle value table; entries must be fourth roots of unity.
    /// The cocycle identity itself is checked by [`verify_cocycle`].
    pub fn new(values: Vec<Vec<Gq>>) -> Result<Self, GroupError> {
        let n = values.len();
        if n == 0 {
            return Err(GroupError::InvalidCocycle("empty value table".into()));
        }
        for (g, row) in values.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::InvalidCocycle(format!(
                    "row {g} has length {} in a table of order {n}",
                    row.len()
                )));
            }
            for (h, v) in row.iter().enumerate() {
                if !is_fourth_root(v) {
                    return Err(GroupError::InvalidCocycle(format!(
                        "value at ({g},{h}) is {v}, not in {{1,-1,i,-i}}"
                    )));
                }
            }
        }
        Ok(Self { order: n, values })
    }

    pub fn trivial(order: usize) -> Self {
        Self { order, values: vec![vec![Gq::one(); order]; order] }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self, g: usize, h: usize) -> &Gq {
        &self.values[g][h]
    }

    /// Restriction along a sorted element list (a subgroup embedding).
    pub fn restrict(&self, elements: &[usize]) -> Result<Self, GroupError> {
        for &g in elements {
            if g >= self.order {
                return Err(GroupError::InvalidCocycle(format!(
                    "element {g} out of range for a cocycle of order {}",
                    self.order
                )));
            }
        }
        let values = elements
            .iter()
            .map(|&g| elements.iter().map(|&h| self.values[g][h].clone()).collect())
            .collect();
        Ok(Self { order: elements.len(), values })
    }

    pub fn from_json(json: &CocycleJson) -> Result<(FiniteGroupTable, Self), GroupError> {
        let group = FiniteGroupTable::from_json(&json.group)?;
        let values: Vec<Vec<Gq>> = json
            .values
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        s.parse::<Gq>().map_err(|e| {
                            GroupError::InvalidCocycle(format!("bad value {s:?}: {e}"))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let cocycle = Self::new(values)?;
        if cocycle.order != group.order() {
            return Err(GroupError::InvalidCocycle(format!(
                "cocycle order {} does not match group order {}",
                cocycle.order,
                group.order()
            )));
        }
        Ok((group, cocycle))
    }

    pub fn to_json(&self, group: &FiniteGroupTable) -> CocycleJson {
        CocycleJson {
            group: group.to_json(),
            values: self
                .values
                .iter()
                .map(|row| row.iter().map(|v| v.to_string()).collect())
                .collect(),
        }
    }
}

fn is_fourth_root(v: &Gq) -> bool {
    [Gq::one(), -&Gq::one(), Gq::i(), -&Gq::i()].contains(v)
}

/// Checks normalization and the cocycle identity
/// ♮(g,h)·♮(gh,k) = ♮(h,k)·♮(g,hk) for all triples.
pub fn verify_cocycle(group: &FiniteGroupTable, cocycle: &Cocycle2) -> CocycleVerdict {
    let n = group.order();
    if cocycle.order != n {
        return CocycleVerdict::NotNormalized { g: 0 };
    }
    let e = group.identity();
    for g in 0..n {
        if !cocycle.value(e, g).is_one() || !cocycle.value(g, e).is_one() {
            return CocycleVerdict::NotNormalized { g };
        }
    }
    for g in 0..n {
        for h in 0..n {
            for k in 0..n {
                let lhs = cocycle.value(g, h) * cocycle.value(group.mul(g, h), k);
                let rhs = cocycle.value(h, k) * cocycle.value(g, group.mul(h, k));
                if lhs != rhs {
                    return CocycleVerdict::IdentityFails { g, h, k };
                }
            }
        }
    }
    CocycleVerdict::Valid
}

/// The ♮-twisted group algebra: basis u_g with u_g·u_h = ♮(g,h)·u_{gh}.
pub fn twisted_group_algebra(
    group: &FiniteGroupTable,
    cocycle: &Cocycle2,
) -> Result<FinDimAlgebra, GroupError> {
    if verify_cocycle(group, cocycle) != CocycleVerdict::Valid {
        return Err(GroupError::InvalidCocycle("cocycle identity fails".into()));
    }
    let n = group.order();
    let mut table = BTreeMap::new();
    for g in 0..n {
        for h in 0..n {
            table.insert((g, h), vec![(group.mul(g, h), cocycle.value(g, h).clone())]);
        }
    }
    let mut unit = vec![Gq::zero(); n];
    unit[group.identity()] = Gq::one();
    Ok(FinDimAlgebra::new(n, table, Some(unit), Vec::new())?)
}

/// Representatives of the ♮-regular conjugacy classes: g is ♮-regular when
/// ♮(g,h) = ♮(h,g) for every h centralizing g.
pub fn regular_classes(group: &FiniteGroupTable, cocycle: &Cocycle2) -> Vec<usize> {
    let classes = group.conjugacy_classes();
    classes
        .iter()
        .filter(|class| {
            let g = class[0];
            group
                .centralizer(g)
                .into_iter()
                .all(|h| cocycle.value(g, h) == cocycle.value(h, g))
        })
        .map(|class| class[0])
        .collect()
}

/// Block dimensions of the ♮-twisted group algebra, ascending; the block
/// count is cross-checked against the ♮-regular class count.
pub fn twisted_blocks(
    group: &FiniteGroupTable,
    cocycle: &Cocycle2,
) -> Result<Vec<usize>, GroupError> {
    let algebra = twisted_group_algebra(group, cocycle)?;
    let blocks = algebra.blocks()?;
    let regular = regular_classes(group, cocycle).len();
    if blocks.len() != regular {
        return Err(GroupError::Algebra(format!(
            "block count {} does not match the regular-class count {regular}",
            blocks.len()
        )));
    }
    Ok(blocks)
}

// ---------------------------------------------------------------------------
// The built-in projective representation and its cocycle
// ---------------------------------------------------------------------------

/// 2×2 matrices over ℚ(i) for the built-in projective representation of
/// the Klein four-group: ρ(e) = I, ρ(a) = diag(i,−i), ρ(b) = [[0,1],[−1,0]],
/// ρ(c) = [[0,i],[i,0]].
pub(crate) fn rho_matrices() -> Vec<QiMatrix> {
    let o = Gq::one;
    let z = Gq::zero;
    let i = Gq::i;
    let m = |rows: Vec<Vec<Gq>>| QiMatrix::from_rows(rows);
    vec![
        m(vec![vec![o(), z()], vec![z(), o()]]),
        m(vec![vec![i(), z()], vec![z(), -&i()]]),
        m(vec![vec![z(), o()], vec![-&o(), z()]]),
        m(vec![vec![z(), i()], vec![i(), z()]]),
    ]
}

/// The built-in cocycle "rho-quaternion": computed from
/// ρ(g)·ρ(h) = ♮(g,h)·ρ(gh) on the Klein four-group.
pub fn rho_quaternion() -> (FiniteGroupTable, Cocycle2) {
    let group = FiniteGroupTable::klein_v4();
    let rho = rho_matrices();
    let n = group.order();
    let mut values = vec![vec![Gq::zero(); n]; n];
    for g in 0..n {
        for h in 0..n {
            let product = rho[g].mul(&rho[h]);
            let target = &rho[group.mul(g, h)];
            // The scalar ♮(g,h) with product = ♮·target, read off any
            // nonzero entry and verified on the full matrix.
            let mut scalar = None;
            'search: for r in 0..2 {
                for c in 0..2 {
                    if !target.at(r, c).is_zero() {
                        scalar = Some(product.at(r, c).div(target.at(r, c)).expect("nonzero"));
                        break 'search;
                    }
                }
            }
            let scalar = scalar.expect("projective representation matrices are nonzero");
            assert_eq!(
                product,
                target.scale(&scalar),
                "rho matrices fail the projective homomorphism property at ({g},{h})"
            );
            values[g][h] = scalar;
        }
    }
    let cocycle = Cocycle2::new(values).expect("fourth-root values");
    debug_assert_eq!(verify_cocycle(&group, &cocycle), CocycleVerdict::Valid);
    (group, cocycle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[track_caller]
    fn assert_dims(group: &FiniteGroupTable, expect: &[usize]) {
        let table = character_table(group).unwrap();
        assert_eq!(table.dims, expect);
    }

    #[test]
    fn table_validation() {
        assert!(FiniteGroupTable::new(vec![]).is_err());
        assert!(FiniteGroupTable::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        // A Latin square that is not associative (smallest quasigroup trick):
        // rows/columns permute but (a·a)·b ≠ a·(a·b) for some entries.
        let bad = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroupTable::new(bad), Err(GroupError::InvalidTable(_))));
    }

    #[test]
    fn constructors_sane() {
        assert_eq!(FiniteGroupTable::trivial().order(), 1);
        let c4 = FiniteGroupTable::cyclic(4);
        assert_eq!(c4.mul(3, 2), 1);
        assert_eq!(c4.inv(1), 3);
        let v4 = FiniteGroupTable::klein_v4();
        for g in 0..4 {
            assert_eq!(v4.mul(g, g), 0, "every element is an involution");
        }
        let s3 = FiniteGroupTable::symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        let s5 = FiniteGroupTable::symmetric(5).unwrap();
        assert_eq!(s5.order(), 120);
    }

    #[test]
    fn conjugacy_class_counts() {
        assert_eq!(FiniteGroupTable::trivial().conjugacy_classes().len(), 1);
        assert_eq!(FiniteGroupTable::klein_v4().conjugacy_classes().len(), 4);
        let s3 = FiniteGroupTable::symmetric(3).unwrap();
        let classes = s3.conjugacy_classes();
        assert_eq!(classes.len(), 3);
        let mut sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);
        let s4 = FiniteGroupTable::symmetric(4).unwrap();
        assert_eq!(s4.conjugacy_classes().len(), 5);
        let s5 = FiniteGroupTable::symmetric(5).unwrap();
        assert_eq!(s5.conjugacy_classes().len(), 7);
    }

    #[test]
    fn character_tables_small() {
        assert_dims(&FiniteGroupTable::trivial(), &[1]);
        assert_dims(&FiniteGroupTable::klein_v4(), &[1, 1, 1, 1]);
        assert_dims(&FiniteGroupTable::cyclic(2), &[1, 1]);
        assert_dims(&FiniteGroupTable::cyclic(4), &[1, 1, 1, 1]);
        assert_dims(&FiniteGroupTable::symmetric(3).unwrap(), &[1, 1, 2]);
        assert_dims(&FiniteGroupTable::symmetric(4).unwrap(), &[1, 1, 2, 3, 3]);
    }

    #[test]
    fn character_table_s5() {
        assert_dims(&FiniteGroupTable::symmetric(5).unwrap(), &[1, 1, 4, 4, 5, 5, 6]);
    }

    #[test]
    fn cyclic_3_leaves_qi() {
        // C₃ needs cube roots of unity, outside ℚ(i).
        let c3 = FiniteGroupTable::cyclic(3);
        assert!(matches!(character_table(&c3), Err(GroupError::CharFieldError(_))));
    }

    #[test]
    fn irreducible_count_equals_class_count() {
        for group in [
            FiniteGroupTable::trivial(),
            FiniteGroupTable::cyclic(2),
            FiniteGroupTable::cyclic(4),
            FiniteGroupTable::klein_v4(),
            FiniteGroupTable::symmetric(3).unwrap(),
            FiniteGroupTable::symmetric(4).unwrap(),
        ] {
            let table = character_table(&group).unwrap();
            assert_eq!(table.num_irreducibles(), group.conjugacy_classes().len());
        }
    }

    #[test]
    fn subgroups_of_v4() {
        let v4 = FiniteGroupTable::klein_v4();
        let subs = v4.all_subgroups();
        // {e}, three order-2 subgroups, V₄ itself.
        assert_eq!(subs.len(), 5);
        assert_eq!(subs[0], vec![0]);
        assert_eq!(subs[4], vec![0, 1, 2, 3]);
        assert!(v4.is_subgroup(&[0, 2]));
        assert!(!v4.is_subgroup(&[0, 1, 2]));
    }

    #[test]
    fn subgroup_lattice_s4() {
        let s4 = FiniteGroupTable::symmetric(4).unwrap();
        let subs = s4.all_subgroups();
        assert_eq!(subs.len(), 30, "S₄ has 30 subgroups");
        for h in &subs {
            assert!(s4.is_subgroup(h));
            assert_eq!(24 % h.len(), 0, "Lagrange");
        }
    }

    #[test]
    fn subgroup_table_and_class_reps() {
        let v4 = FiniteGroupTable::klein_v4();
        let (sub, embed) = v4.subgroup_table(&[0, 3]).unwrap();
        assert_eq!(sub.order(), 2);
        assert_eq!(embed, vec![0, 3]);
        assert!(matches!(v4.subgroup_table(&[0, 1, 2]), Err(GroupError::NotASubgroup(_))));
        // In S₃ the three order-2 subgroups are conjugate with a common rep.
        let s3 = FiniteGroupTable::symmetric(3).unwrap();
        let order2: Vec<Vec<usize>> =
            s3.all_subgroups().into_iter().filter(|h| h.len() == 2).collect();
        assert_eq!(order2.len(), 3);
        let reps: BTreeSet<Vec<usize>> =
            order2.iter().map(|h| s3.subgroup_class_rep(h)).collect();
        assert_eq!(reps.len(), 1, "all order-2 subgroups of S₃ are conjugate");
    }

    #[test]
    fn rho_cocycle_table() {
        let (group, cocycle) = rho_quaternion();
        assert_eq!(verify_cocycle(&group, &cocycle), CocycleVerdict::Valid);
        let one = Gq::one();
        let minus = -&Gq::one();
        // Hand-checked values: indices (1,2,3) are the three involutions.
        assert_eq!(cocycle.value(1, 2), &one);
        assert_eq!(cocycle.value(2, 1), &minus);
        assert_eq!(cocycle.value(1, 3), &minus);
        assert_eq!(cocycle.value(3, 1), &one);
        assert_eq!(cocycle.value(2, 3), &one);
        assert_eq!(cocycle.value(3, 2), &minus);
        for g in 1..4 {
            assert_eq!(cocycle.value(g, g), &minus, "♮(ε,ε) = −1");
        }
    }

    #[test]
    fn cocycle_validation_and_negative_control() {
        let (group, cocycle) = rho_quaternion();
        // Flip one sign: the cocycle identity must fail.
        let mut values: Vec<Vec<Gq>> =
            (0..4).map(|g| (0..4).map(|h| cocycle.value(g, h).clone()).collect()).collect();
        values[1][2] = -&values[1][2];
        let flipped = Cocycle2::new(values).unwrap();
        assert!(matches!(
            verify_cocycle(&group, &flipped),
            CocycleVerdict::IdentityFails { .. }
        ));
        // Non-unit values are rejected outright.
        let bad = Cocycle2::new(vec![vec![Gq::from_int(2)]]);
        assert!(matches!(bad, Err(GroupError::InvalidCocycle(_))));
    }

    #[test]
    fn twisted_blocks_v4() {
        let (group, cocycle) = rho_quaternion();
        // Trivial cocycle: four linear blocks.
        assert_eq!(twisted_blocks(&group, &Cocycle2::trivial(4)).unwrap(), vec![1, 1, 1, 1]);
        // Quaternion cocycle: a single 2-dimensional block.
        assert_eq!(twisted_blocks(&group, &cocycle).unwrap(), vec![2]);
        assert_eq!(regular_classes(&group, &cocycle), vec![0]);
    }

    #[test]
    fn twisted_blocks_restricted_subgroup() {
        let (group, cocycle) = rho_quaternion();
        // Restrict to the order-2 subgroup {e, ε₁}: trivializable, {1,1}.
        let (sub, embed) = group.subgroup_table(&[0, 1]).unwrap();
        let restricted = cocycle.restrict(&embed).unwrap();
        assert_eq!(twisted_blocks(&sub, &restricted).unwrap(), vec![1, 1]);
        // Same for the other two order-2 subgroups.
        for gens in [[0usize, 2], [0, 3]] {
            let (sub, embed) = group.subgroup_table(&gens).unwrap();
            let restricted = cocycle.restrict(&embed).unwrap();
            assert_eq!(twisted_blocks(&sub, &restricted).unwrap(), vec![1, 1]);
        }
    }

    #[test]
    fn twisted_block_dims_square_sum() {
        let (group, cocycle) = rho_quaternion();
        for c in [Cocycle2::trivial(4), cocycle] {
            let blocks = twisted_blocks(&group, &c).unwrap();
            let total: usize = blocks.iter().map(|d| d * d).sum();
            assert_eq!(total, group.order());
        }
    }

    #[test]
    fn permutation_enumeration() {
        assert_eq!(all_permutations(1), vec![vec![0]]);
        assert_eq!(all_permutations(3).len(), 6);
        assert_eq!(all_permutations(3)[0], vec![0, 1, 2]);
        assert_eq!(all_permutations(3)[5], vec![2, 1, 0]);
    }

    #[test]
    fn json_roundtrip() {
        let (group, cocycle) = rho_quaternion();
        let json = cocycle.to_json(&group);
        let text = serde_json::to_string(&json).unwrap();
        let parsed: CocycleJson = serde_json::from_str(&text).unwrap();
        let (g2, c2) = Cocycle2::from_json(&parsed).unwrap();
        assert_eq!(g2, group);
        assert_eq!(c2, cocycle);
        assert_eq!(json.values[1][1], "-1");
    }
}
