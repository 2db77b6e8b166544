//! Exact analysis of finite-dimensional associative algebras over ℚ(i):
//! Jacobson radical via the regular trace form, Wedderburn block
//! decomposition via central eigenspace refinement, and central characters
//! read off the marked generators of the base-ring action.
//!
//! Algebras are given by sparse structure constants and are not required to
//! have a unit; the radical criterion works on the unitalization. Block
//! splitting demands linear factorization over ℚ(i) and raises
//! `SplitFieldError` otherwise rather than approximating.

pub mod certify;
pub mod descriptor;

use std::collections::BTreeMap;

use rand::prelude::*;
use thiserror::Error;

use crate::exact::GaussianRational;
use crate::linalg::{joint_kernel, operator_min_poly, qi_roots, span_basis, QiMatrix};

type Gq = GaussianRational;

/// Largest supported algebra dimension.
pub const MAX_DIM: usize = 128;
/// Exact associativity checks up to this dimension; sampled above.
const EXACT_ASSOC_DIM: usize = 32;
/// Sample count for the randomized associativity check.
const ASSOC_SAMPLES: usize = 10_000;

/// Errors raised by finite-dimensional algebra analysis.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinDimError {
    /// A structural invariant of the algebra data fails.
    #[error("invalid algebra data: {0}")]
    Validation(String),
    /// A fiber was requested at a point not on the base variety.
    #[error("point off the base: {0}")]
    PointOffBase(String),
    /// The requested fiber dimension exceeds the supported bound.
    #[error("fiber dimension {dim} exceeds the bound {max}")]
    OrbitTooLarge { dim: usize, max: usize },
    /// A central minimal polynomial does not factor linearly over ℚ(i).
    #[error("central minimal polynomial does not split over Q(i); factor: {factor}")]
    SplitFieldError { factor: String },
    /// A marked central element fails to act by a scalar on a block.
    #[error("marked element does not act by a scalar: {0}")]
    NotScalar(String),
    /// A claimed algebra morphism fails multiplicativity.
    #[error("not an algebra morphism: {0}")]
    NotAMorphism(String),
    /// A morphism does not carry the source filtration into the target one.
    #[error("filtration not respected: {0}")]
    FiltrationNotRespected(String),
    /// A descriptor kind is not supported in this position.
    #[error("unsupported descriptor: {0}")]
    UnsupportedDescriptor(String),
    /// Malformed descriptor or certificate data.
    #[error("cannot parse algebra data: {0}")]
    Parse(String),
}

/// A marked central element: a named generator of the base-ring action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedCentral {
    pub name: String,
    pub coords: Vec<Gq>,
}

/// A finite-dimensional associative algebra over ℚ(i), given by sparse
/// structure constants e_i·e_j = Σ_k c_{ij}^k e_k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinDimAlgebra {
    dim: usize,
    table: BTreeMap<(usize, usize), Vec<(usize, Gq)>>,
    unit: Option<Vec<Gq>>,
    marked: Vec<MarkedCentral>,
}

impl FinDimAlgebra {
    /// Builds and validates an algebra. Checks dimension bound, index
    /// bounds, associativity (exact up to dimension 32, sampled above),
    /// the unit laws when a unit is given, and centrality of every marked
    /// element.
    pub fn new(
        dim: usize,
        table: BTreeMap<(usize, usize), Vec<(usize, Gq)>>,
        unit: Option<Vec<Gq>>,
        marked: Vec<MarkedCentral>,
    ) -> Result<Self, FinDimError> {
        if dim > MAX_DIM {
            return Err(FinDimError::OrbitTooLarge { dim, max: MAX_DIM });
        }
        for (&(i, j), entries) in &table {
            if i >= dim || j >= dim {
                return Err(FinDimError::Validation(format!(
                    "structure constant index ({i},{j}) out of range for dimension {dim}"
                )));
            }
            for (k, _) in entries {
                if *k >= dim {
                    return Err(FinDimError::Validation(format!(
                        "product component {k} out of range for dimension {dim}"
                    )));
                }
            }
        }
        let alg = Self { dim, table, unit, marked };
        alg.check_associativity()?;
        alg.check_unit()?;
        alg.check_marked_central()?;
        Ok(alg)
    }

    fn check_associativity(&self) -> Result<(), FinDimError> {
        let d = self.dim;
        let check = |i: usize, j: usize, k: usize| -> Result<(), FinDimError> {
            let left = self.mul_vec(&self.basis_product_vec(i, j), &basis_vec(d, k));
            let right = self.mul_vec(&basis_vec(d, i), &self.basis_product_vec(j, k));
            if left != right {
                return Err(FinDimError::Validation(format!(
                    "associativity fails at basis triple ({i},{j},{k})"
                )));
            }
            Ok(())
        };
        if d <= EXACT_ASSOC_DIM {
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        check(i, j, k)?;
                    }
                }
            }
        } else {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_a55c);
            for _ in 0..ASSOC_SAMPLES {
                check(rng.gen_range(0..d), rng.gen_range(0..d), rng.gen_range(0..d))?;
            }
        }
        Ok(())
    }

    fn check_unit(&self) -> Result<(), FinDimError> {
        if let Some(u) = &self.unit {
            if u.len() != self.dim {
                return Err(FinDimError::Validation("unit has wrong length".into()));
            }
            for i in 0..self.dim {
                let e = basis_vec(self.dim, i);
                if self.mul_vec(u, &e) != e || self.mul_vec(&e, u) != e {
                    return Err(FinDimError::Validation(format!(
                        "declared unit fails the unit law on basis element {i}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_marked_central(&self) -> Result<(), FinDimError> {
        for m in &self.marked {
            if m.coords.len() != self.dim {
                return Err(FinDimError::Validation(format!(
                    "marked element {} has wrong length",
                    m.name
                )));
            }
            for i in 0..self.dim {
                let e = basis_vec(self.dim, i);
                if self.mul_vec(&m.coords, &e) != self.mul_vec(&e, &m.coords) {
                    return Err(FinDimError::Validation(format!(
                        "marked element {} does not commute with basis element {i}",
                        m.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> Option<&[Gq]> {
        self.unit.as_deref()
    }

    pub fn marked(&self) -> &[MarkedCentral] {
        &self.marked
    }

    pub fn table(&self) -> &BTreeMap<(usize, usize), Vec<(usize, Gq)>> {
        &self.table
    }

    /// Replaces the marked central elements (re-validating centrality).
    pub fn with_marked(mut self, marked: Vec<MarkedCentral>) -> Result<Self, FinDimError> {
        self.marked = marked;
        self.check_marked_central()?;
        Ok(self)
    }

    fn basis_product(&self, i: usize, j: usize) -> &[(usize, Gq)] {
        self.table.get(&(i, j)).map(Vec::as_slice).unwrap_or(&[])
    }

    fn basis_product_vec(&self, i: usize, j: usize) -> Vec<Gq> {
        let mut out = vec![Gq::zero(); self.dim];
        for (k, c) in self.basis_product(i, j) {
            out[*k] = &out[*k] + c;
        }
        out
    }

    /// Exact product of two coordinate vectors.
    pub fn mul_vec(&self, x: &[Gq], y: &[Gq]) -> Vec<Gq> {
        let mut out = vec![Gq::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let scale = xi * yj;
                for (k, c) in self.basis_product(i, j) {
                    out[*k] = &out[*k] + &(&scale * c);
                }
            }
        }
        out
    }

    /// Trace of left multiplication by the coordinate vector on the
    /// unitalization (the adjoined unit contributes nothing for x ∈ A).
    fn regular_trace(&self, x: &[Gq]) -> Gq {
        let mut acc = Gq::zero();
        for (m, xm) in x.iter().enumerate() {
            if xm.is_zero() {
                continue;
            }
            let mut t = Gq::zero();
            for k in 0..self.dim {
                for (l, c) in self.basis_product(m, k) {
                    if *l == k {
                        t = &t + c;
                    }
                }
            }
            acc = &acc + &(xm * &t);
        }
        acc
    }

    /// Basis of the Jacobson radical, via the trace form of the regular
    /// representation of the unitalization A⁺: the radical is the kernel of
    /// the Gram matrix of (x,y) ↦ tr(L_x L_y) = tr(L_{xy}) on A⁺.
    pub fn radical(&self) -> Vec<Vec<Gq>> {
        let d = self.dim;
        // Gram over A⁺ = A ⊕ ℂ·u in the basis (e_0,…,e_{d−1}, u):
        //   G[i][j] = tr L_{e_i e_j},  G[i][u] = G[u][i] = tr L_{e_i},
        //   G[u][u] = tr L_u = d + 1.
        let mut gram = QiMatrix::zero(d + 1, d + 1);
        let traces: Vec<Gq> = (0..d).map(|i| self.regular_trace(&basis_vec(d, i))).collect();
        for i in 0..d {
            for j in 0..d {
                *gram.at_mut(i, j) = self.regular_trace(&self.basis_product_vec(i, j));
            }
            *gram.at_mut(i, d) = traces[i].clone();
            *gram.at_mut(d, i) = traces[i].clone();
        }
        *gram.at_mut(d, d) = Gq::from_int(d as i64 + 1);
        let kernel = gram.kernel_basis();
        // rad(A⁺) = rad(A) lies inside A: the u-component must vanish.
        let mut out = Vec::new();
        for v in kernel {
            debug_assert!(v[d].is_zero(), "radical vector escapes the augmentation ideal");
            out.push(v[..d].to_vec());
        }
        span_basis(&out)
    }

    /// Verifies rad^m = 0 for some m ≤ dim; returns the nilpotency degree.
    pub fn radical_nilpotency(&self) -> Result<usize, FinDimError> {
        let rad = self.radical();
        if rad.is_empty() {
            return Ok(0);
        }
        let mut current = rad.clone();
        for power in 1..=self.dim {
            if current.is_empty() {
                return Ok(power);
            }
            let mut products = Vec::new();
            for x in &current {
                for y in &rad {
                    products.push(self.mul_vec(x, y));
                }
            }
            current = span_basis(&products);
        }
        if current.is_empty() {
            Ok(self.dim + 1)
        } else {
            Err(FinDimError::Validation("radical is not nilpotent".into()))
        }
    }

    /// Full semisimple analysis: radical, quotient, blocks.
    pub fn analyze(&self) -> Result<AlgebraAnalysis, FinDimError> {
        let rad = self.radical();
        let quotient = Quotient::new(self, &rad);
        let s = quotient.dim();
        if s == 0 {
            return Ok(AlgebraAnalysis {
                radical_dim: rad.len(),
                quotient,
                blocks: Vec::new(),
            });
        }

        // Center of the semisimple quotient.
        let mut ops = Vec::with_capacity(s);
        for b in 0..s {
            let eb = basis_vec(s, b);
            ops.push(quotient.lmul(&eb).sub(&quotient.rmul(&eb)));
        }
        let center = joint_kernel(s, &ops);

        // Refine the quotient into joint eigenspaces of the center.
        let mut spaces: Vec<QiMatrix> = vec![QiMatrix::identity(s)];
        for z in &center {
            let lz = quotient.lmul(z);
            let mut refined = Vec::new();
            for space in &spaces {
                if space.cols() == 0 {
                    continue;
                }
                let m = restrict_operator(&lz, space).ok_or_else(|| {
                    FinDimError::Validation("central operator does not preserve a block".into())
                })?;
                let min_poly = operator_min_poly(&m);
                let (roots, remainder) =
                    qi_roots(&min_poly).map_err(FinDimError::SplitFieldErrorFromSearch)?;
                if let Some(factor) = remainder {
                    return Err(FinDimError::SplitFieldError { factor: poly_display(&factor) });
                }
                let mut uniq: Vec<Gq> = Vec::new();
                for r in roots {
                    if !uniq.contains(&r) {
                        uniq.push(r);
                    }
                }
                uniq.sort_by(cmp_gq);
                for lambda in uniq {
                    let shifted = m.sub(&QiMatrix::identity(m.cols()).scale(&lambda));
                    let kernel = shifted.kernel_basis();
                    if kernel.is_empty() {
                        continue;
                    }
                    let lifted: Vec<Vec<Gq>> =
                        kernel.iter().map(|v| space.mul_vec(v)).collect();
                    refined.push(QiMatrix::from_columns(lifted));
                }
            }
            spaces = refined;
        }

        let mut blocks = Vec::new();
        for space in spaces {
            let d2 = space.cols();
            let n = isqrt(d2).ok_or_else(|| {
                FinDimError::Validation(format!("block dimension {d2} is not a perfect square"))
            })?;
            blocks.push(Block { matrix_size: n, basis: space });
        }
        blocks.sort_by(|a, b| {
            a.matrix_size
                .cmp(&b.matrix_size)
                .then_with(|| compare_matrices(&a.basis, &b.basis))
        });

        let total: usize = blocks.iter().map(|b| b.matrix_size * b.matrix_size).sum();
        if total != s || blocks.len() != center.len() {
            return Err(FinDimError::Validation(format!(
                "block census inconsistent: Σn² = {total} vs dim(A/rad) = {s}, {} blocks vs center dimension {}",
                blocks.len(),
                center.len()
            )));
        }
        Ok(AlgebraAnalysis { radical_dim: rad.len(), quotient, blocks })
    }

    /// Multiset of simple block dimensions, ascending.
    pub fn blocks(&self) -> Result<Vec<usize>, FinDimError> {
        Ok(self.analyze()?.block_dims())
    }

    /// The scalars by which each marked central generator acts on the given
    /// block (indices follow the `analyze` ordering).
    pub fn central_character(
        &self,
        block_index: usize,
    ) -> Result<Vec<(String, Gq)>, FinDimError> {
        let analysis = self.analyze()?;
        analysis.central_character(self, block_index)
    }

    /// Direct sum, concatenating bases; marked elements pair up by name
    /// (a shared base ring acting on both summands).
    pub fn direct_sum(&self, other: &Self) -> Result<Self, FinDimError> {
        let d1 = self.dim;
        let dim = d1 + other.dim;
        let mut table = self.table.clone();
        for (&(i, j), entries) in &other.table {
            table.insert(
                (i + d1, j + d1),
                entries.iter().map(|(k, c)| (k + d1, c.clone())).collect(),
            );
        }
        let unit = match (&self.unit, &other.unit) {
            (Some(u), Some(v)) => {
                let mut w = u.clone();
                w.extend(v.iter().cloned());
                Some(w)
            }
            _ => None,
        };
        let mut marked = Vec::new();
        for m in &self.marked {
            let counterpart = other
                .marked
                .iter()
                .find(|x| x.name == m.name)
                .ok_or_else(|| {
                    FinDimError::Validation(format!(
                        "marked element {} missing from the second summand",
                        m.name
                    ))
                })?;
            let mut coords = m.coords.clone();
            coords.extend(counterpart.coords.iter().cloned());
            marked.push(MarkedCentral { name: m.name.clone(), coords });
        }
        Self::new(dim, table, unit, marked)
    }

    /// The matrix algebra M_n(A) = A ⊗ M_n, basis (a, (r,c)) in row-major
    /// order within each a-slot; marked elements embed diagonally.
    pub fn tensor_matrix(&self, n: usize) -> Result<Self, FinDimError> {
        let dim = self.dim * n * n;
        if dim > MAX_DIM {
            return Err(FinDimError::OrbitTooLarge { dim, max: MAX_DIM });
        }
        let idx = |a: usize, r: usize, c: usize| (a * n + r) * n + c;
        let mut table = BTreeMap::new();
        for (&(i, j), entries) in &self.table {
            for r in 0..n {
                for m in 0..n {
                    for c in 0..n {
                        // (e_i⊗E_{rm})·(e_j⊗E_{mc}) = e_ie_j ⊗ E_{rc}
                        table.insert(
                            (idx(i, r, m), idx(j, m, c)),
                            entries
                                .iter()
                                .map(|(k, coeff)| (idx(*k, r, c), coeff.clone()))
                                .collect::<Vec<_>>(),
                        );
                    }
                }
            }
        }
        let embed_diag = |x: &[Gq]| {
            let mut out = vec![Gq::zero(); dim];
            for (a, xa) in x.iter().enumerate() {
                for r in 0..n {
                    out[idx(a, r, r)] = xa.clone();
                }
            }
            out
        };
        let unit = self.unit.as_ref().map(|u| embed_diag(u));
        let marked = self
            .marked
            .iter()
            .map(|m| MarkedCentral { name: m.name.clone(), coords: embed_diag(&m.coords) })
            .collect();
        Self::new(dim, table, unit, marked)
    }

    /// The diagonal embedding A → M_n(A), a ↦ a⊗1, as a basis-image matrix.
    pub fn diagonal_embedding(&self, n: usize) -> Vec<Vec<Gq>> {
        let dim = self.dim * n * n;
        let idx = |a: usize, r: usize, c: usize| (a * n + r) * n + c;
        (0..self.dim)
            .map(|a| {
                let mut out = vec![Gq::zero(); dim];
                for r in 0..n {
                    out[idx(a, r, r)] = Gq::one();
                }
                out
            })
            .collect()
    }

    /// The full matrix algebra M_n over ℚ(i), basis E_{rc} row-major.
    pub fn matrix_algebra(n: usize) -> Result<Self, FinDimError> {
        let dim = n * n;
        let idx = |r: usize, c: usize| r * n + c;
        let mut table = BTreeMap::new();
        for r in 0..n {
            for m in 0..n {
                for c in 0..n {
                    table.insert((idx(r, m), idx(m, c)), vec![(idx(r, c), Gq::one())]);
                }
            }
        }
        let mut unit = vec![Gq::zero(); dim];
        for r in 0..n {
            unit[idx(r, r)] = Gq::one();
        }
        Self::new(dim, table, Some(unit), Vec::new())
    }
}

// The qi_roots search reports overflow as a plain string; wrap it as a
// split-field failure since both mean "cannot certify linear factorization".
#[allow(non_snake_case)]
impl FinDimError {
    fn SplitFieldErrorFromSearch(msg: String) -> Self {
        FinDimError::SplitFieldError { factor: msg }
    }
}

/// One simple block of the semisimple quotient.
#[derive(Debug, Clone)]
pub struct Block {
    matrix_size: usize,
    /// Columns: a basis of the block inside A/rad coordinates.
    basis: QiMatrix,
}

impl Block {
    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }
}

/// Result of the full semisimple analysis.
#[derive(Debug, Clone)]
pub struct AlgebraAnalysis {
    pub radical_dim: usize,
    quotient: Quotient,
    blocks: Vec<Block>,
}

impl AlgebraAnalysis {
    /// Block matrix sizes, ascending.
    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.matrix_size).collect()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn quotient_dim(&self) -> usize {
        self.quotient.dim()
    }

    /// One projection matrix per block: the b-th matrix sends ambient
    /// coordinates of A to coordinates of the b-th simple factor (in that
    /// block's own basis), so its kernel is the maximal two-sided ideal
    /// annihilating the block.
    pub(crate) fn block_projections(&self, alg: &FinDimAlgebra) -> Result<Vec<QiMatrix>, FinDimError> {
        let s = self.quotient.dim();
        let d = alg.dim();
        if self.blocks.is_empty() {
            return Ok(Vec::new());
        }
        // Change-of-basis from concatenated block bases to quotient
        // coordinates, augmented with the projections of the ambient basis;
        // one elimination solves every column at once.
        let widths: Vec<usize> = self.blocks.iter().map(|b| b.basis.cols()).collect();
        let mut aug = QiMatrix::zero(s, s + d);
        let mut col = 0;
        for block in &self.blocks {
            for j in 0..block.basis.cols() {
                for r in 0..s {
                    *aug.at_mut(r, col) = block.basis.at(r, j).clone();
                }
                col += 1;
            }
        }
        for k in 0..d {
            let q = self.quotient.project(&basis_vec(d, k));
            for r in 0..s {
                *aug.at_mut(r, s + k) = q[r].clone();
            }
        }
        let pivots = aug.rref();
        if pivots.len() != s || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(FinDimError::Validation(
                "block bases do not span the semisimple quotient".into(),
            ));
        }
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut offset = 0;
        for &w in &widths {
            let mut m = QiMatrix::zero(w, d);
            for r in 0..w {
                for k in 0..d {
                    *m.at_mut(r, k) = aug.at(offset + r, s + k).clone();
                }
            }
            out.push(m);
            offset += w;
        }
        Ok(out)
    }

    /// Scalars by which the marked generators act on the chosen block.
    pub fn central_character(
        &self,
        alg: &FinDimAlgebra,
        block_index: usize,
    ) -> Result<Vec<(String, Gq)>, FinDimError> {
        let block = self.blocks.get(block_index).ok_or_else(|| {
            FinDimError::Validation(format!(
                "block index {block_index} out of range ({} blocks)",
                self.blocks.len()
            ))
        })?;
        let mut out = Vec::new();
        for m in alg.marked() {
            let mbar = self.quotient.project(&m.coords);
            let lm = self.quotient.lmul(&mbar);
            let restricted = restrict_operator(&lm, &block.basis).ok_or_else(|| {
                FinDimError::NotScalar(format!(
                    "marked element {} does not preserve block {block_index}",
                    m.name
                ))
            })?;
            let k = restricted.cols();
            let lambda = restricted.at(0, 0).clone();
            let diff = restricted.sub(&QiMatrix::identity(k).scale(&lambda));
            if diff.rank() != 0 {
                return Err(FinDimError::NotScalar(format!(
                    "marked element {} is not scalar on block {block_index}",
                    m.name
                )));
            }
            out.push((m.name.clone(), lambda));
        }
        Ok(out)
    }
}

/// The semisimple quotient A/rad in explicit coordinates.
#[derive(Debug, Clone)]
struct Quotient {
    /// Reduced row-echelon basis of the radical.
    rad_rref: Vec<Vec<Gq>>,
    /// Pivot column of each radical basis row.
    pivots: Vec<usize>,
    /// Ambient coordinates that survive as quotient coordinates.
    complement: Vec<usize>,
    /// Structure constants of the quotient, dense by (i,j).
    products: Vec<Vec<Vec<Gq>>>,
}

impl Quotient {
    fn new(alg: &FinDimAlgebra, rad: &[Vec<Gq>]) -> Self {
        let d = alg.dim();
        let rad_rref = span_basis(rad);
        let pivots: Vec<usize> = rad_rref
            .iter()
            .map(|row| row.iter().position(|c| !c.is_zero()).expect("nonzero basis row"))
            .collect();
        let complement: Vec<usize> = (0..d).filter(|i| !pivots.contains(i)).collect();
        let mut quotient = Self { rad_rref, pivots, complement, products: Vec::new() };
        let s = quotient.dim();
        let mut products = vec![vec![Vec::new(); s]; s];
        for a in 0..s {
            for b in 0..s {
                let x = basis_vec(d, quotient.complement[a]);
                let y = basis_vec(d, quotient.complement[b]);
                products[a][b] = quotient.project(&alg.mul_vec(&x, &y));
            }
        }
        quotient.products = products;
        quotient
    }

    fn dim(&self) -> usize {
        self.complement.len()
    }

    /// Projects an ambient vector to quotient coordinates (mod radical).
    fn project(&self, x: &[Gq]) -> Vec<Gq> {
        let mut v = x.to_vec();
        for (row, &p) in self.rad_rref.iter().zip(&self.pivots) {
            let c = v[p].clone();
            if c.is_zero() {
                continue;
            }
            for (i, r) in row.iter().enumerate() {
                v[i] = &v[i] - &(&c * r);
            }
        }
        self.complement.iter().map(|&i| v[i].clone()).collect()
    }

    fn mul(&self, x: &[Gq], y: &[Gq]) -> Vec<Gq> {
        let s = self.dim();
        let mut out = vec![Gq::zero(); s];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let scale = xa * yb;
                for (k, c) in self.products[a][b].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] = &out[k] + &(&scale * c);
                    }
                }
            }
        }
        out
    }

    fn lmul(&self, x: &[Gq]) -> QiMatrix {
        let s = self.dim();
        QiMatrix::from_columns((0..s).map(|k| self.mul(x, &basis_vec(s, k))).collect())
    }

    fn rmul(&self, x: &[Gq]) -> QiMatrix {
        let s = self.dim();
        QiMatrix::from_columns((0..s).map(|k| self.mul(&basis_vec(s, k), x)).collect())
    }
}

/// Standard basis vector.
pub(crate) fn basis_vec(dim: usize, i: usize) -> Vec<Gq> {
    let mut v = vec![Gq::zero(); dim];
    v[i] = Gq::one();
    v
}

/// Solves op·V = V·M for M, i.e. the matrix of op restricted to the column
/// span of V in V-coordinates; None when op does not preserve the span.
fn restrict_operator(op: &QiMatrix, space: &QiMatrix) -> Option<QiMatrix> {
    let k = space.cols();
    let mut cols = Vec::with_capacity(k);
    for j in 0..k {
        let image = op.mul_vec(&space.column(j));
        cols.push(space.solve(&image)?);
    }
    Some(QiMatrix::from_columns(cols))
}

fn isqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    for cand in r.saturating_sub(1)..=r + 1 {
        if cand * cand == n {
            return Some(cand);
        }
    }
    None
}

fn cmp_gq(a: &Gq, b: &Gq) -> std::cmp::Ordering {
    a.re().cmp(b.re()).then_with(|| a.im().cmp(b.im()))
}

fn compare_matrices(a: &QiMatrix, b: &QiMatrix) -> std::cmp::Ordering {
    let fa: Vec<String> = a.columns().iter().flatten().map(|c| c.to_string()).collect();
    let fb: Vec<String> = b.columns().iter().flatten().map(|c| c.to_string()).collect();
    fa.cmp(&fb)
}

fn poly_display(coeffs: &[Gq]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| format!("({c})*x^{k}"))
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}
