//! Exact computational machinery for affine Hecke algebras of type A at
//! parameters that are roots of unity, and for the geometry of their centers.
//!
//! The crate is organized bottom-up:
//!
//! - [`exact`] — exact scalars: Gaussian rationals ℚ(i), Laurent polynomials
//!   over ℚ, and W-invariant Laurent functions on a quotient torus.
//! - [`weyl`] — extended affine Weyl groups of type A (SL and GL lattices),
//!   Iwahori–Matsumoto length, balls, reduced words.
//! - [`hecke`] — the affine Hecke algebra in the T-basis, specialization of
//!   the parameter, and the q = 1 crossed product.
//! - [`lattice`] — exact integer lattice machinery: Smith normal form,
//!   fixed subtori of finite group actions on tori, stratification of a
//!   torus by stabilizer class.
//! - [`groups`] — finite group tables, conjugacy classes, character tables
//!   over ℚ(i), 2-cocycles, and twisted group-algebra block censuses.
//! - [`findim`] — finite-dimensional associative algebras over ℚ(i):
//!   radical, Wedderburn block census, family descriptors with fibers,
//!   spectrum-preserving morphisms, and stratified-equivalence certificates.
//! - [`exquo`] — extended quotients of a torus by a finite group, their
//!   twisted variants, fibers of the associated sheaf of algebras, and glue
//!   data for the non-separated parameter space.
//! - [`glue`] — non-separated spaces assembled from doubling data:
//!   multiplicity, closure, and comparison queries.
//! - [`accept`] — the self-test suite exercised by `strata selftest` and the
//!   acceptance integration tests.

pub mod accept;
pub mod exact;
pub mod exquo;
pub mod findim;
pub mod glue;
pub mod groups;
pub mod hecke;
pub mod lattice;
mod linalg;
pub mod weyl;
