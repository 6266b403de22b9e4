//! Abstract contract for right LCM monoid families plus the generic derived
//! operations built from the family primitives.
//!
//! A *right LCM monoid* is a left cancellative monoid `S` in which the
//! intersection of two principal right ideals `sS ∩ tS` is either empty or
//! again principal, `rS`. We write `s ⋒ t` ("s and t intersect") when the
//! intersection is nonempty and `s ⊥ t` ("orthogonal") when it is empty; a
//! generator `r` of a nonempty intersection is a *right LCM* of `s` and `t`,
//! unique up to right multiplication by invertible elements.
//!
//! The *core* `S_c = { a ∈ S | a ⋒ s for all s ∈ S }` is a submonoid that is
//! hereditary (left divisors of core elements are core) and closed under the
//! cofactors appearing in right LCMs against core elements. Two elements are
//! *core equivalent*, `s ∼ t`, when `sa = tb` for some core `a, b`; this is an
//! equivalence relation, and `s ∼ t` holds exactly when `s ⋒ t` with both
//! right-LCM cofactors core.
//!
//! Each concrete family (see [`crate::families`]) supplies the primitives —
//! multiplication in canonical normal form, right LCMs with both cofactors,
//! core membership, irreducibility, factorization and enumeration — and this
//! module derives everything else.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::RngCore;
use thiserror::Error;

/// Family-specific canonical encodings of monoid elements.
///
/// Every family defines a normal form so that equality of payloads is
/// equality in the monoid; all derived bookkeeping (∼-classes, graph
/// vertices, grid cells) relies on that syntactic equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Payload {
    /// Affine pair (m, p): translation part m ≥ 0 and ratio part p ≥ 1,
    /// with product (m,p)(n,q) = (m + pn, pq).
    Affine { m: BigUint, p: BigUint },
    /// Self-similar pair (w, g): a word over the alphabet (letter indices)
    /// and a group element (index into the group table).
    Auto { word: Vec<u8>, g: u8 },
    /// Lattice-by-endomorphisms pair (vector in ℤ^d, normal-form word over
    /// the endomorphism monoid generators, run-length encoded).
    Lattice { vec: Vec<i64>, word: Vec<(u8, u32)> },
    /// 𝔽₂[t]-by-endomorphisms pair: a bit polynomial (bit i = coefficient of
    /// t^i) and the exponent pair (a, b) of the endomorphism t^a(1+t)^b.
    BitPoly { poly: BigUint, a: u32, b: u32 },
    /// Graph product trace normal form: syllables (vertex index, nontrivial
    /// vertex-monoid element) in canonical greedy order.
    Trace { syllables: Vec<(u16, VertexElem)> },
}

/// Element of a graph-product vertex monoid.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexElem {
    /// ℕ: exponent of the single generator.
    Free(u64),
    /// ℕ ⋊ ℕ with multiplier g: (m, k) represents a^m p^k subject to
    /// p a = a^g p, i.e. (m,k)(n,l) = (m + g^k n, k + l).
    Scaled { m: BigUint, k: u32 },
}

/// An element of a right LCM monoid, tagged with the family it belongs to.
///
/// Elements of different families never interact; every binary operation
/// checks the tags and reports a mismatch error.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonoidElement {
    pub family_tag: Arc<str>,
    pub payload: Payload,
}

impl MonoidElement {
    pub fn new(tag: &Arc<str>, payload: Payload) -> Self {
        MonoidElement { family_tag: Arc::clone(tag), payload }
    }
}

/// Outcome of a right LCM computation for inputs (s, t).
///
/// On `Meet`, the identities `s · cofactor_left = t · cofactor_right = lcm`
/// hold exactly (in canonical form), and `lcm` generates `sS ∩ tS`.
#[derive(Clone, Debug, PartialEq, Eq)]
// Callers destructure the result immediately; boxing the Meet payload would
// trade one move for an allocation on the hottest path in the crate.
#[allow(clippy::large_enum_variant)]
pub enum LcmOutcome {
    Orthogonal,
    Meet { lcm: MonoidElement, cofactor_left: MonoidElement, cofactor_right: MonoidElement },
}

impl LcmOutcome {
    pub fn is_meet(&self) -> bool {
        matches!(self, LcmOutcome::Meet { .. })
    }

    pub fn meet(&self) -> Option<(&MonoidElement, &MonoidElement, &MonoidElement)> {
        match self {
            LcmOutcome::Orthogonal => None,
            LcmOutcome::Meet { lcm, cofactor_left, cofactor_right } => {
                Some((lcm, cofactor_left, cofactor_right))
            }
        }
    }
}

/// Witness that an element is ∼-equivalent to a product of noncore
/// irreducibles: `source · left_core = (letters₁ ⋯ letters_k) · right_core`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrreducibleFactorization {
    pub source: MonoidElement,
    pub letters: Vec<MonoidElement>,
    pub left_core: MonoidElement,
    pub right_core: MonoidElement,
}

/// How complete an enumeration of ∼-classes of noncore irreducibles is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exhaustiveness {
    /// Every ∼-class of noncore irreducibles was produced.
    Total,
    /// Every produced coconnected component is complete, but further
    /// components exist beyond the cap (certified by the family's closed
    /// form; e.g. one component per prime ratio in the affine family).
    ComponentComplete,
    /// The cap cut a component mid-way; downstream verdicts must be treated
    /// as inconclusive.
    Truncated,
}

impl Exhaustiveness {
    /// True when per-component data (cardinalities, internal edges) is
    /// certified complete for every enumerated component.
    pub fn certified(self) -> bool {
        !matches!(self, Exhaustiveness::Truncated)
    }
}

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("family mismatch: `{left}` vs `{right}`")]
    FamilyMismatch { left: String, right: String },
    #[error("element {0} is not core")]
    NotCore(String),
    #[error("element {0} is not noncore irreducible")]
    NotIrreducible(String),
    #[error("element {0} is not noncore factorable")]
    NotFactorable(String),
    #[error("element {0} is not a unit")]
    NotUnit(String),
    #[error("cannot parse element spec `{spec}`: {message}")]
    ElementParse { spec: String, message: String },
    #[error("arithmetic overflow in {0}")]
    Overflow(String),
    #[error("internal contract violation: {0}")]
    Contract(String),
}

pub type KResult<T> = Result<T, KernelError>;

/// The primitive table every monoid family implements.
///
/// All primitives are pure functions over immutable data; handles are safe
/// to share across threads.
pub trait Family: Send + Sync {
    /// Stable identifier; doubles as the element tag.
    fn tag(&self) -> &Arc<str>;

    /// The neutral element.
    fn unit(&self) -> MonoidElement;

    /// Canonical-form product `st`.
    fn multiply(&self, s: &MonoidElement, t: &MonoidElement) -> KResult<MonoidElement>;

    /// Right LCM of (s, t) with both cofactors; `Orthogonal` iff sS ∩ tS = ∅.
    /// Families return one canonical representative of the LCM class and
    /// special-case syntactically equal inputs to `Meet{lcm: s, unit, unit}`.
    fn right_lcm(&self, s: &MonoidElement, t: &MonoidElement) -> KResult<LcmOutcome>;

    /// Membership in the core S_c, decided by the family's closed form.
    fn is_core(&self, s: &MonoidElement) -> bool;

    /// Membership in the unit group S*.
    fn is_unit(&self, s: &MonoidElement) -> bool;

    /// Inverse of a unit.
    fn invert_unit(&self, s: &MonoidElement) -> KResult<MonoidElement>;

    /// True iff s ∉ S_c and every factorization `s a = t r` with `a` core
    /// forces `t` or `r` core.
    fn is_noncore_irreducible(&self, s: &MonoidElement) -> bool;

    /// Factor a non-core element as `s · a = (s₁ ⋯ s_k) · b` with every
    /// letter noncore irreducible and `a`, `b` core. Families verify the
    /// witness by multiplication before returning it.
    fn factor_noncore(&self, s: &MonoidElement) -> KResult<IrreducibleFactorization>;

    /// Representatives of distinct ∼-classes of noncore irreducibles, in the
    /// family's deterministic (lexicographic) order, at most `cap` of them.
    fn irreducible_classes(&self, cap: usize) -> (Vec<MonoidElement>, Exhaustiveness);

    /// Finite set of core elements determining the left-multiplication
    /// action on irreducible classes.
    fn core_generators(&self) -> Vec<MonoidElement>;

    /// Small generator set used by the brute-force enumeration oracle to
    /// build right multiples (need not generate all of S).
    fn oracle_generators(&self) -> Vec<MonoidElement>;

    /// Family-chosen extra sample elements for factorability checks.
    fn spot_samples(&self) -> Vec<MonoidElement>;

    /// Parse an element from the family's textual syntax.
    fn parse_element(&self, spec: &str) -> KResult<MonoidElement>;

    /// Render an element in the family's textual syntax.
    fn format_element(&self, e: &MonoidElement) -> String;

    /// Pseudorandom element, roughly bounded by `size`.
    fn random_element(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement;

    /// Pseudorandom core element, roughly bounded by `size`.
    fn random_core(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement;
}

/// Shared, immutable handle to a loaded family, with the generic derived
/// operations.
#[derive(Clone)]
pub struct MonoidHandle {
    family: Arc<dyn Family>,
}

impl fmt::Debug for MonoidHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonoidHandle({})", self.family.tag())
    }
}

impl MonoidHandle {
    pub fn from_family(family: Arc<dyn Family>) -> Self {
        MonoidHandle { family }
    }

    pub fn tag(&self) -> &Arc<str> {
        self.family.tag()
    }

    pub fn unit(&self) -> MonoidElement {
        self.family.unit()
    }

    pub fn multiply(&self, s: &MonoidElement, t: &MonoidElement) -> KResult<MonoidElement> {
        self.family.multiply(s, t)
    }

    pub fn right_lcm(&self, s: &MonoidElement, t: &MonoidElement) -> KResult<LcmOutcome> {
        self.family.right_lcm(s, t)
    }

    pub fn is_core(&self, s: &MonoidElement) -> bool {
        self.family.is_core(s)
    }

    pub fn is_unit(&self, s: &MonoidElement) -> bool {
        self.family.is_unit(s)
    }

    pub fn invert_unit(&self, s: &MonoidElement) -> KResult<MonoidElement> {
        self.family.invert_unit(s)
    }

    pub fn is_noncore_irreducible(&self, s: &MonoidElement) -> bool {
        self.family.is_noncore_irreducible(s)
    }

    pub fn factor_noncore(&self, s: &MonoidElement) -> KResult<IrreducibleFactorization> {
        self.family.factor_noncore(s)
    }

    pub fn irreducible_classes(&self, cap: usize) -> (Vec<MonoidElement>, Exhaustiveness) {
        self.family.irreducible_classes(cap)
    }

    pub fn core_generators(&self) -> Vec<MonoidElement> {
        self.family.core_generators()
    }

    pub fn oracle_generators(&self) -> Vec<MonoidElement> {
        self.family.oracle_generators()
    }

    pub fn spot_samples(&self) -> Vec<MonoidElement> {
        self.family.spot_samples()
    }

    pub fn parse_element(&self, spec: &str) -> KResult<MonoidElement> {
        self.family.parse_element(spec)
    }

    pub fn format_element(&self, e: &MonoidElement) -> String {
        self.family.format_element(e)
    }

    pub fn random_element(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement {
        self.family.random_element(rng, size)
    }

    pub fn random_core(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement {
        self.family.random_core(rng, size)
    }

    /// `s ⋒ t`: the principal right ideals intersect.
    pub fn intersects(&self, s: &MonoidElement, t: &MonoidElement) -> KResult<bool> {
        Ok(self.right_lcm(s, t)?.is_meet())
    }

    /// Core equivalence `s ∼ t`: the right LCM exists and both cofactors are
    /// core.
    pub fn core_equivalent(&self, s: &MonoidElement, t: &MonoidElement) -> KResult<bool> {
        Ok(self.core_equivalence_witness(s, t)?.is_some())
    }

    /// On `s ∼ t`, returns core elements (a, b) with `s a = t b`;
    /// `None` when s ≁ t.
    pub fn core_equivalence_witness(
        &self,
        s: &MonoidElement,
        t: &MonoidElement,
    ) -> KResult<Option<(MonoidElement, MonoidElement)>> {
        match self.right_lcm(s, t)? {
            LcmOutcome::Orthogonal => Ok(None),
            LcmOutcome::Meet { cofactor_left, cofactor_right, .. } => {
                if self.is_core(&cofactor_left) && self.is_core(&cofactor_right) {
                    Ok(Some((cofactor_left, cofactor_right)))
                } else {
                    Ok(None)
                }
            }
        }
    }

    /// If `u ∈ sS`, returns the exact quotient x with `s x = u`.
    pub fn left_divide(
        &self,
        s: &MonoidElement,
        u: &MonoidElement,
    ) -> KResult<Option<MonoidElement>> {
        match self.right_lcm(s, u)? {
            LcmOutcome::Orthogonal => Ok(None),
            LcmOutcome::Meet { cofactor_left, cofactor_right, .. } => {
                if !self.is_unit(&cofactor_right) {
                    return Ok(None);
                }
                // s · cofactor_left = u · cofactor_right, so
                // x = cofactor_left · cofactor_right⁻¹.
                let inv = self.invert_unit(&cofactor_right)?;
                let x = self.multiply(&cofactor_left, &inv)?;
                if self.multiply(s, &x)? == *u {
                    Ok(Some(x))
                } else {
                    Err(KernelError::Contract(format!(
                        "left_divide witness failed for {} into {}",
                        self.format_element(s),
                        self.format_element(u)
                    )))
                }
            }
        }
    }

    /// Product of a word of elements (unit for the empty word).
    pub fn fold(&self, letters: &[MonoidElement]) -> KResult<MonoidElement> {
        let mut acc = self.unit();
        for l in letters {
            acc = self.multiply(&acc, l)?;
        }
        Ok(acc)
    }

    /// Multiplication-check of a factorization witness:
    /// `source · left_core = (Π letters) · right_core`, all letters noncore
    /// irreducible, both adjusters core.
    pub fn verify_factorization(&self, f: &IrreducibleFactorization) -> KResult<()> {
        if !self.is_core(&f.left_core) || !self.is_core(&f.right_core) {
            return Err(KernelError::Contract(format!(
                "factorization adjusters for {} are not core",
                self.format_element(&f.source)
            )));
        }
        for l in &f.letters {
            if !self.is_noncore_irreducible(l) {
                return Err(KernelError::Contract(format!(
                    "factorization letter {} is not noncore irreducible",
                    self.format_element(l)
                )));
            }
        }
        let lhs = self.multiply(&f.source, &f.left_core)?;
        let rhs = self.multiply(&self.fold(&f.letters)?, &f.right_core)?;
        if lhs == rhs {
            Ok(())
        } else {
            Err(KernelError::Contract(format!(
                "factorization of {} does not multiply back",
                self.format_element(&f.source)
            )))
        }
    }
}

/// Guard that two elements belong to the same family.
pub fn check_same_family(s: &MonoidElement, t: &MonoidElement) -> KResult<()> {
    if s.family_tag == t.family_tag {
        Ok(())
    } else {
        Err(KernelError::FamilyMismatch {
            left: s.family_tag.to_string(),
            right: t.family_tag.to_string(),
        })
    }
}
