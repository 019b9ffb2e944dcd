//! Exact-arithmetic computational algebra over the rationals.
//!
//! The crate computes with weight-graded chain complexes of finite type:
//! free graded Lie algebras on a super-Lyndon basis, Chevalley-Eilenberg
//! homology, underlying complexes of higher enveloping algebras, rational
//! Betti numbers of unordered configuration spaces of manifolds, and the
//! cover/convolution combinatorics of cardinality functors. All linear
//! algebra is done exactly over arbitrary-precision rationals; nothing in
//! the crate touches floating point.
//!
//! Modules follow the pipeline order:
//!
//! * [`exactla`] — sparse matrices over `BigRational`, rank, kernel,
//!   projector rank;
//! * [`graded`] — graded vector spaces, weight-graded chain complexes,
//!   homology, Poincaré series;
//! * [`lie`] — dg Lie algebras, free Lie algebras via Lyndon words, CDGAs,
//!   and the `A ⊗ L` construction;
//! * [`ce`] — the Chevalley-Eilenberg complex `Sym(L[1])` and its homology;
//! * [`envelope`] — underlying complexes of higher enveloping algebras and
//!   the PBW dimension check;
//! * [`confspace`] — configuration-space Betti tables and the Arnold
//!   presentation oracle;
//! * [`ranconv`] — the category of covers and the disjoint/overlapping
//!   convolution tensor products;
//! * [`verify`] — the seeded property-check suites behind `envalg verify`.

pub mod ce;
pub mod confspace;
pub mod envelope;
pub mod exactla;
pub mod graded;
pub mod lie;
pub mod ranconv;
pub mod verify;

pub use exactla::{Rational, SparseMatrix};
pub use graded::{BasisElement, ChainComplex, GradedVectorSpace, PoincareSeries};
pub use lie::{Cdga, GradedLieAlgebra};
