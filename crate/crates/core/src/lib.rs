//! A computational toolkit for right LCM monoids and their generalized
//! scales.
//!
//! The library decides whether a right LCM monoid from one of the built-in
//! families admits a generalized scale (a nontrivial homomorphism
//! `N: S → ℕ^×` with `|N⁻¹(n)/∼| = n` for all `n` in the image, such that
//! elements of equal scale are core equivalent or orthogonal, and every
//! element meets some element of every occupied scale level), constructs the
//! scale when it exists, and exposes the underlying machinery:
//!
//! * [`kernel`] — the family contract and derived operations (⋒, ∼, core).
//! * [`families`] — built-in monoid families: affine `ℕ ⋊ ℕ^×`, self-similar
//!   actions `X* ⋈ G`, lattice/polynomial algebraic dynamical systems
//!   `G ⋊ P`, and graph products of vertex monoids.
//! * [`core_graph`] — the graph on ∼-classes of noncore irreducibles, its
//!   coconnected components, and the core actions on classes and components.
//! * [`grid`] — the square-by-square right-LCM algorithm on words of
//!   irreducibles, plus permutation rewriting of such words.
//! * [`scale`] — the four-condition existence test, scale evaluation,
//!   factorization in multiplicative subsemigroups of ℕ, transversals, and
//!   ζ-series partial sums.
//! * [`oracle`] — brute-force bounded enumerations used to cross-check the
//!   closed-form primitives.
//! * [`laws`] — the algebraic law battery behind the property-test suites,
//!   exposed as callable checks.

pub mod kernel;

pub(crate) mod f2poly;
pub(crate) mod lattice;
pub(crate) mod numutil;

pub mod families;

pub mod core_graph;
pub mod grid;
pub mod laws;
pub mod oracle;
pub mod scale;

pub use kernel::{
    Exhaustiveness, Family, IrreducibleFactorization, KernelError, LcmOutcome, MonoidElement,
    MonoidHandle, Payload, VertexElem,
};
