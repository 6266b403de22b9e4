//! Graph products of right LCM vertex monoids over a finite simple graph:
//! one vertex monoid per vertex, with syllables at adjacent vertices
//! commuting and syllables at the same vertex merging.  With an empty edge
//! set this is the free product of the vertex monoids.
//!
//! Two vertex monoid kinds are supported:
//!
//! * `free` — (ℕ, +), whose ideals are totally ordered (LCM = maximum), so
//!   every element is core *within the vertex monoid*;
//! * `scaled` with multiplier g ≥ 2 — ℕ ⋊ ⟨g⟩ with elements (m, g^k) and
//!   (m, g^k)(n, g^l) = (m + g^k n, g^{k+l}); two elements meet exactly when
//!   their translation parts agree modulo g^{min(k,l)}.
//!
//! Elements are traces: sequences of syllables in the sorted-block normal
//! form, obtained by repeatedly extracting the complete block of the least
//! left-exposed vertex.  A syllable is core in the product exactly when its
//! vertex is adjacent to every other vertex and its value is core in the
//! vertex monoid; a syllable at a non-universal vertex is orthogonal to
//! every syllable at a non-adjacent vertex, which is what makes the core
//! this small.
//!
//! Right LCMs follow the syllable recursion: the LCM of a syllable (v, x)
//! with a trace t extracts the leading v-block y of t, takes the vertex-level
//! LCM of x and y, and recurses on the remainder; a vertex of t that can
//! never expose v forces orthogonality.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand::RngCore;

use crate::families::{tag_digest, ConfigError, GraphProductSection};
use crate::kernel::{
    check_same_family, Exhaustiveness, Family, IrreducibleFactorization, KResult, KernelError,
    LcmOutcome, MonoidElement, Payload, VertexElem,
};

const MAX_VERTICES: usize = 12;

#[derive(Debug, Clone, PartialEq)]
enum VertexKind {
    Nat,
    Scaled(u64),
}

type Syllables = Vec<(u16, VertexElem)>;

#[derive(Debug)]
pub struct GraphProductFamily {
    tag: Arc<str>,
    vertices: Vec<String>,
    kinds: Vec<VertexKind>,
    adj: Vec<Vec<bool>>,
    universal: Vec<bool>,
}

impl GraphProductFamily {
    pub fn from_section(
        section: &GraphProductSection,
        kind_tag: &str,
    ) -> Result<Self, ConfigError> {
        fn field(f: &str, m: impl Into<String>) -> ConfigError {
            ConfigError::field(f, m)
        }
        let n = section.vertices.len();
        if n == 0 || n > MAX_VERTICES {
            return Err(field(
                "graph_product.vertices",
                format!("need between 1 and {MAX_VERTICES} vertices, got {n}"),
            ));
        }
        for v in &section.vertices {
            if v.is_empty()
                || v == "e"
                || v == "ε"
                || v.chars().any(|c| c.is_whitespace() || "^(),".contains(c))
            {
                return Err(field(
                    "graph_product.vertices",
                    format!("vertex name `{v}` is empty, reserved, or contains separators"),
                ));
            }
        }
        let mut seen = BTreeSet::new();
        for v in &section.vertices {
            if !seen.insert(v) {
                return Err(field("graph_product.vertices", format!("duplicate vertex `{v}`")));
            }
        }
        let index = |name: &String| -> Result<usize, ConfigError> {
            section
                .vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| field("graph_product.edges", format!("unknown vertex `{name}`")))
        };
        let mut adj = vec![vec![false; n]; n];
        let mut edge_set = BTreeSet::new();
        for edge in &section.edges {
            if edge.len() != 2 {
                return Err(field(
                    "graph_product.edges",
                    format!("edge {edge:?} must list exactly two vertices"),
                ));
            }
            let a = index(&edge[0])?;
            let b = index(&edge[1])?;
            if a == b {
                return Err(field(
                    "graph_product.edges",
                    format!("loop edge at `{}` is not allowed", edge[0]),
                ));
            }
            let key = (a.min(b), a.max(b));
            if !edge_set.insert(key) {
                return Err(field(
                    "graph_product.edges",
                    format!("duplicate edge between `{}` and `{}`", edge[0], edge[1]),
                ));
            }
            adj[a][b] = true;
            adj[b][a] = true;
        }
        let mut kinds = Vec::with_capacity(n);
        for v in &section.vertices {
            let Some(spec) = section.vertex_monoids.get(v) else {
                kinds.push(VertexKind::Nat);
                continue;
            };
            match spec.kind.as_str() {
                "free" => {
                    if spec.multiplier.is_some() {
                        return Err(field(
                            "graph_product.vertex_monoids",
                            format!("vertex `{v}` is free and takes no multiplier"),
                        ));
                    }
                    kinds.push(VertexKind::Nat);
                }
                "scaled" => match spec.multiplier {
                    Some(g) if g >= 2 => kinds.push(VertexKind::Scaled(g)),
                    _ => {
                        return Err(field(
                            "graph_product.vertex_monoids",
                            format!("vertex `{v}` is scaled and needs a multiplier of at least 2"),
                        ))
                    }
                },
                other => {
                    return Err(field(
                        "graph_product.vertex_monoids",
                        format!(
                            "vertex `{v}` has unknown kind `{other}` (expected free or scaled)"
                        ),
                    ))
                }
            }
        }
        for name in section.vertex_monoids.keys() {
            if !section.vertices.contains(name) {
                return Err(field(
                    "graph_product.vertex_monoids",
                    format!("assignment for unknown vertex `{name}`"),
                ));
            }
        }
        let universal: Vec<bool> = (0..n).map(|v| (0..n).all(|w| w == v || adj[v][w])).collect();
        let digest = tag_digest(&format!("{:?}|{:?}|{:?}", section.vertices, edge_set, kinds));
        Ok(GraphProductFamily {
            tag: Arc::from(format!("{kind_tag}#{digest}")),
            vertices: section.vertices.clone(),
            kinds,
            adj,
            universal,
        })
    }

    pub fn element(&self, syllables: &[(u16, VertexElem)]) -> KResult<MonoidElement> {
        for (v, val) in syllables {
            if *v as usize >= self.vertices.len() {
                return Err(KernelError::Contract(format!("vertex index {v} out of range")));
            }
            match (&self.kinds[*v as usize], val) {
                (VertexKind::Nat, VertexElem::Free(_)) => {}
                (VertexKind::Scaled(_), VertexElem::Scaled { .. }) => {}
                _ => {
                    return Err(KernelError::Contract(format!(
                        "value {val:?} does not fit the monoid at vertex `{}`",
                        self.vertices[*v as usize]
                    )))
                }
            }
        }
        let normal = self.normalize(syllables.to_vec())?;
        Ok(MonoidElement::new(&self.tag, Payload::Trace { syllables: normal }))
    }

    /// Convenience constructor for ℕ-vertex syllables in tests.
    pub fn word(&self, letters: &[(u16, u64)]) -> KResult<MonoidElement> {
        let syl: Syllables = letters.iter().map(|&(v, k)| (v, VertexElem::Free(k))).collect();
        self.element(&syl)
    }

    fn parts<'a>(&self, s: &'a MonoidElement) -> KResult<&'a Syllables> {
        match &s.payload {
            Payload::Trace { syllables } if s.family_tag == self.tag => Ok(syllables),
            _ => Err(KernelError::Contract(format!(
                "foreign element in graph product: {:?}",
                s.payload
            ))),
        }
    }

    fn adjacent(&self, a: u16, b: u16) -> bool {
        a != b && self.adj[a as usize][b as usize]
    }

    fn value_is_unit(val: &VertexElem) -> bool {
        match val {
            VertexElem::Free(k) => *k == 0,
            VertexElem::Scaled { m, k } => m.is_zero() && *k == 0,
        }
    }

    fn value_mul(&self, v: u16, x: &VertexElem, y: &VertexElem) -> KResult<VertexElem> {
        match (&self.kinds[v as usize], x, y) {
            (VertexKind::Nat, VertexElem::Free(a), VertexElem::Free(b)) => {
                let sum = a
                    .checked_add(*b)
                    .ok_or_else(|| KernelError::Overflow("syllable exponent".into()))?;
                Ok(VertexElem::Free(sum))
            }
            (
                VertexKind::Scaled(g),
                VertexElem::Scaled { m, k },
                VertexElem::Scaled { m: n, k: l },
            ) => {
                let scale = BigUint::from(*g).pow(*k);
                let k2 = k
                    .checked_add(*l)
                    .ok_or_else(|| KernelError::Overflow("syllable scale exponent".into()))?;
                Ok(VertexElem::Scaled { m: m + scale * n, k: k2 })
            }
            _ => Err(KernelError::Contract("mismatched syllable values".into())),
        }
    }

    /// Vertex-level right LCM: `Some((xstar, ystar))` with x·xstar = y·ystar
    /// the LCM, or `None` when the vertex ideals are disjoint.
    fn value_lcm(
        &self,
        v: u16,
        x: &VertexElem,
        y: &VertexElem,
    ) -> KResult<Option<(VertexElem, VertexElem)>> {
        match (&self.kinds[v as usize], x, y) {
            (VertexKind::Nat, VertexElem::Free(a), VertexElem::Free(b)) => {
                let m = a.max(b);
                Ok(Some((VertexElem::Free(m - a), VertexElem::Free(m - b))))
            }
            (
                VertexKind::Scaled(g),
                VertexElem::Scaled { m, k },
                VertexElem::Scaled { m: n, k: l },
            ) => {
                let gb = BigUint::from(*g);
                let gmin = gb.pow(*k.min(l));
                if m % &gmin != n % &gmin {
                    return Ok(None);
                }
                let big_k = *k.max(l);
                let gk = gb.pow(*k);
                let gl = gb.pow(*l);
                // Smallest c ≥ max(m, n) in the finer congruence class.
                let (base, modulus) = if k >= l { (m, &gk) } else { (n, &gl) };
                let hi = m.max(n);
                let c = if hi > base {
                    let steps = (hi - base + modulus - BigUint::one()) / modulus;
                    base + steps * modulus
                } else {
                    base.clone()
                };
                let xstar = VertexElem::Scaled { m: (&c - m) / &gk, k: big_k - k };
                let ystar = VertexElem::Scaled { m: (&c - n) / &gl, k: big_k - l };
                Ok(Some((xstar, ystar)))
            }
            _ => Err(KernelError::Contract("mismatched syllable values".into())),
        }
    }

    fn value_is_core(&self, val: &VertexElem) -> bool {
        match val {
            // ℕ has totally ordered ideals, so everything is core in it.
            VertexElem::Free(_) => true,
            VertexElem::Scaled { k, .. } => *k == 0,
        }
    }

    fn syllable_is_core(&self, v: u16, val: &VertexElem) -> bool {
        self.universal[v as usize] && self.value_is_core(val)
    }

    /// Sorted-block normal form: repeatedly extract the complete block of
    /// the least left-exposed vertex.
    fn normalize(&self, input: Syllables) -> KResult<Syllables> {
        let mut work: Vec<(u16, VertexElem)> =
            input.into_iter().filter(|(_, val)| !Self::value_is_unit(val)).collect();
        let mut out: Syllables = Vec::with_capacity(work.len());
        while !work.is_empty() {
            // Left-exposed vertices: first syllable of vertex v preceded
            // only by vertices adjacent to v.
            let mut best: Option<u16> = None;
            let mut seen: Vec<u16> = Vec::new();
            for (v, _) in &work {
                if seen.iter().all(|w| self.adjacent(*w, *v)) && !seen.contains(v) {
                    best = Some(match best {
                        Some(b) => b.min(*v),
                        None => *v,
                    });
                }
                if !seen.contains(v) {
                    seen.push(*v);
                }
            }
            let v =
                best.ok_or_else(|| KernelError::Contract("trace with no exposed syllable".into()))?;
            // Extract the full movable v-block, merging in order.
            let mut merged: Option<VertexElem> = None;
            let mut rest: Syllables = Vec::with_capacity(work.len());
            let mut blocked = false;
            for (w, val) in work {
                if !blocked && w == v {
                    merged = Some(match merged {
                        Some(acc) => self.value_mul(v, &acc, &val)?,
                        None => val,
                    });
                } else {
                    if !self.adjacent(w, v) {
                        blocked = true;
                    }
                    rest.push((w, val));
                }
            }
            let merged = merged.expect("exposed vertex has at least one syllable");
            if !Self::value_is_unit(&merged) {
                out.push((v, merged));
            }
            work = rest;
        }
        Ok(out)
    }

    /// Leading v-block of a trace: the product of all v-syllables movable to
    /// the front, plus the remainder.
    fn leading_block(&self, t: &Syllables, v: u16) -> KResult<LeadingBlock> {
        let mut merged: Option<VertexElem> = None;
        let mut rest: Syllables = Vec::with_capacity(t.len());
        let mut blocked = false;
        for (w, val) in t {
            if !blocked && *w == v {
                merged = Some(match merged {
                    Some(acc) => self.value_mul(v, &acc, val)?,
                    None => val.clone(),
                });
            } else {
                if !self.adjacent(*w, v) {
                    blocked = true;
                }
                rest.push((*w, val.clone()));
            }
        }
        Ok(match merged {
            Some(value) => LeadingBlock::Exposed { value, rest },
            None if blocked => LeadingBlock::Blocked,
            None => LeadingBlock::AllAdjacent,
        })
    }

    /// LCM of the single syllable (v, x) against the trace t, returning
    /// (lcm, cofactor of (v,x), cofactor of t).
    fn lcm_syllable_trace(
        &self,
        v: u16,
        x: &VertexElem,
        t: &Syllables,
    ) -> KResult<Option<(Syllables, Syllables, Syllables)>> {
        if Self::value_is_unit(x) {
            return Ok(Some((t.clone(), t.clone(), Vec::new())));
        }
        match self.leading_block(t, v)? {
            LeadingBlock::Exposed { value: y, rest } => {
                let Some((xstar, ystar)) = self.value_lcm(v, x, &y)? else {
                    return Ok(None);
                };
                let Some((l_tail, a_tail, b)) = self.lcm_syllable_trace(v, &ystar, &rest)? else {
                    return Ok(None);
                };
                let mut lcm = vec![(v, y)];
                lcm.extend(l_tail);
                let mut cof_s = vec![(v, xstar)];
                cof_s.extend(a_tail);
                Ok(Some((self.normalize(lcm)?, self.normalize(cof_s)?, b)))
            }
            LeadingBlock::AllAdjacent => {
                let mut lcm = t.clone();
                lcm.push((v, x.clone()));
                Ok(Some((self.normalize(lcm)?, t.clone(), vec![(v, x.clone())])))
            }
            LeadingBlock::Blocked => Ok(None),
        }
    }

    fn random_value(&self, rng: &mut dyn RngCore, v: u16, size: u32) -> VertexElem {
        match self.kinds[v as usize] {
            VertexKind::Nat => VertexElem::Free(rng.gen_range(1..=u64::from(size.max(1)))),
            VertexKind::Scaled(_) => VertexElem::Scaled {
                m: BigUint::from(rng.gen_range(0..=u64::from(size.max(1)))),
                k: rng.gen_range(0..=1),
            },
        }
    }
}

enum LeadingBlock {
    Exposed { value: VertexElem, rest: Syllables },
    AllAdjacent,
    Blocked,
}

impl Family for GraphProductFamily {
    fn tag(&self) -> &Arc<str> {
        &self.tag
    }

    fn unit(&self) -> MonoidElement {
        MonoidElement::new(&self.tag, Payload::Trace { syllables: Vec::new() })
    }

    fn multiply(&self, s: &MonoidElement, t: &MonoidElement) -> KResult<MonoidElement> {
        check_same_family(s, t)?;
        let mut syl = self.parts(s)?.clone();
        syl.extend(self.parts(t)?.iter().cloned());
        let normal = self.normalize(syl)?;
        Ok(MonoidElement::new(&self.tag, Payload::Trace { syllables: normal }))
    }

    fn right_lcm(&self, s: &MonoidElement, t: &MonoidElement) -> KResult<LcmOutcome> {
        check_same_family(s, t)?;
        if s == t {
            return Ok(LcmOutcome::Meet {
                lcm: s.clone(),
                cofactor_left: self.unit(),
                cofactor_right: self.unit(),
            });
        }
        let s_syl = self.parts(s)?.clone();
        let t_syl = self.parts(t)?.clone();
        // Consume s syllable by syllable against the running left cofactor.
        let mut other = t_syl;
        let mut cof_t: Syllables = Vec::new();
        for (v, x) in &s_syl {
            let Some((_, a, b)) = self.lcm_syllable_trace(*v, x, &other)? else {
                return Ok(LcmOutcome::Orthogonal);
            };
            other = a;
            cof_t.extend(b);
        }
        let cofactor_left = MonoidElement::new(&self.tag, Payload::Trace { syllables: other });
        let cofactor_right =
            MonoidElement::new(&self.tag, Payload::Trace { syllables: self.normalize(cof_t)? });
        let lcm = self.multiply(s, &cofactor_left)?;
        if self.multiply(t, &cofactor_right)? != lcm {
            return Err(KernelError::Contract(format!(
                "LCM witnesses for {} and {} do not multiply back",
                self.format_element(s),
                self.format_element(t)
            )));
        }
        Ok(LcmOutcome::Meet { lcm, cofactor_left, cofactor_right })
    }

    fn is_core(&self, s: &MonoidElement) -> bool {
        self.parts(s)
            .map(|syl| syl.iter().all(|(v, val)| self.syllable_is_core(*v, val)))
            .unwrap_or(false)
    }

    fn is_unit(&self, s: &MonoidElement) -> bool {
        self.parts(s).map(|syl| syl.is_empty()).unwrap_or(false)
    }

    fn invert_unit(&self, s: &MonoidElement) -> KResult<MonoidElement> {
        if self.is_unit(s) {
            Ok(self.unit())
        } else {
            Err(KernelError::NotUnit(self.format_element(s)))
        }
    }

    fn is_noncore_irreducible(&self, s: &MonoidElement) -> bool {
        let Ok(syl) = self.parts(s) else { return false };
        let mut noncore = 0usize;
        let mut ok = true;
        for (v, val) in syl {
            if self.syllable_is_core(*v, val) {
                continue;
            }
            noncore += 1;
            ok &= if self.universal[*v as usize] {
                // Universal scaled vertex: noncore irreducible values are
                // exactly the single-scale ones.
                matches!(val, VertexElem::Scaled { k: 1, .. })
            } else {
                // Non-universal vertex: everything non-unit is noncore, so
                // irreducibles are the atoms of the vertex monoid.
                match val {
                    VertexElem::Free(k) => *k == 1,
                    VertexElem::Scaled { m, k } => {
                        (m.is_one() && *k == 0) || (m.is_zero() && *k == 1)
                    }
                }
            };
        }
        ok && noncore == 1
    }

    fn factor_noncore(&self, s: &MonoidElement) -> KResult<IrreducibleFactorization> {
        if self.is_core(s) {
            return Err(KernelError::NotFactorable(self.format_element(s)));
        }
        let mut remaining = self.parts(s)?.clone();
        let mut letters: Vec<MonoidElement> = Vec::new();
        'peel: loop {
            // First noncore syllable that is left-exposed in the remainder.
            let mut prefix: Vec<u16> = Vec::new();
            for (i, (v, val)) in remaining.iter().enumerate() {
                let exposed = prefix.iter().all(|w| self.adjacent(*w, *v));
                prefix.push(*v);
                if !exposed || self.syllable_is_core(*v, val) {
                    continue;
                }
                // Peel one atom (or one scale letter) off this syllable.
                let (letter_val, residual) = match (&self.kinds[*v as usize], val) {
                    (VertexKind::Nat, VertexElem::Free(k)) => {
                        (VertexElem::Free(1), VertexElem::Free(k - 1))
                    }
                    (VertexKind::Scaled(g), VertexElem::Scaled { m, k }) => {
                        if self.universal[*v as usize] {
                            let gb = BigUint::from(*g);
                            let r = m % &gb;
                            (
                                VertexElem::Scaled { m: r.clone(), k: 1 },
                                VertexElem::Scaled { m: (m - r) / gb, k: k - 1 },
                            )
                        } else if !m.is_zero() {
                            (
                                VertexElem::Scaled { m: BigUint::one(), k: 0 },
                                VertexElem::Scaled { m: m - 1u32, k: *k },
                            )
                        } else {
                            (
                                VertexElem::Scaled { m: BigUint::zero(), k: 1 },
                                VertexElem::Scaled { m: BigUint::zero(), k: k - 1 },
                            )
                        }
                    }
                    _ => return Err(KernelError::Contract("mismatched syllable values".into())),
                };
                letters.push(
                    self.element(&[(*v, letter_val)]).expect("single syllables are already normal"),
                );
                let mut next = remaining[..i].to_vec();
                if !Self::value_is_unit(&residual) {
                    next.push((*v, residual));
                }
                next.extend_from_slice(&remaining[i + 1..]);
                remaining = self.normalize(next)?;
                continue 'peel;
            }
            break;
        }
        let right_core = MonoidElement::new(&self.tag, Payload::Trace { syllables: remaining });
        if !self.is_core(&right_core) {
            return Err(KernelError::Contract(
                "factorization stalled before reaching a core remainder".into(),
            ));
        }
        let f = IrreducibleFactorization {
            source: s.clone(),
            letters,
            left_core: self.unit(),
            right_core,
        };
        let mut acc = self.unit();
        for l in &f.letters {
            acc = self.multiply(&acc, l)?;
        }
        acc = self.multiply(&acc, &f.right_core)?;
        if acc != *s {
            return Err(KernelError::Contract(format!(
                "trace factorization of {} does not multiply back",
                self.format_element(s)
            )));
        }
        Ok(f)
    }

    fn irreducible_classes(&self, cap: usize) -> (Vec<MonoidElement>, Exhaustiveness) {
        let mut out = Vec::new();
        let mut total = 0usize;
        let mut reps: Vec<(u16, VertexElem)> = Vec::new();
        for v in 0..self.vertices.len() as u16 {
            match (&self.kinds[v as usize], self.universal[v as usize]) {
                (VertexKind::Nat, true) => {} // entirely core
                (VertexKind::Nat, false) => {
                    total += 1;
                    reps.push((v, VertexElem::Free(1)));
                }
                (VertexKind::Scaled(g), true) => {
                    total += *g as usize;
                    for r in 0..*g {
                        reps.push((v, VertexElem::Scaled { m: BigUint::from(r), k: 1 }));
                    }
                }
                (VertexKind::Scaled(_), false) => {
                    total += 2;
                    reps.push((v, VertexElem::Scaled { m: BigUint::one(), k: 0 }));
                    reps.push((v, VertexElem::Scaled { m: BigUint::zero(), k: 1 }));
                }
            }
        }
        for rep in reps.into_iter().take(cap) {
            out.push(self.element(&[rep]).expect("single syllables are already normal"));
        }
        // Coconnected components can span several vertices, so a partial
        // listing certifies nothing beyond itself.
        let ex = if out.len() == total { Exhaustiveness::Total } else { Exhaustiveness::Truncated };
        (out, ex)
    }

    fn core_generators(&self) -> Vec<MonoidElement> {
        let mut out = Vec::new();
        for v in 0..self.vertices.len() as u16 {
            if !self.universal[v as usize] {
                continue;
            }
            let val = match self.kinds[v as usize] {
                VertexKind::Nat => VertexElem::Free(1),
                VertexKind::Scaled(_) => VertexElem::Scaled { m: BigUint::one(), k: 0 },
            };
            out.push(self.element(&[(v, val)]).expect("single syllables are already normal"));
        }
        out
    }

    fn oracle_generators(&self) -> Vec<MonoidElement> {
        let mut out = Vec::new();
        for v in 0..self.vertices.len() as u16 {
            match self.kinds[v as usize] {
                VertexKind::Nat => {
                    out.push(self.element(&[(v, VertexElem::Free(1))]).expect("atom"));
                }
                VertexKind::Scaled(_) => {
                    out.push(
                        self.element(&[(v, VertexElem::Scaled { m: BigUint::one(), k: 0 })])
                            .expect("atom"),
                    );
                    out.push(
                        self.element(&[(v, VertexElem::Scaled { m: BigUint::zero(), k: 1 })])
                            .expect("atom"),
                    );
                }
            }
        }
        out
    }

    fn spot_samples(&self) -> Vec<MonoidElement> {
        let gens = self.oracle_generators();
        let mut out = Vec::new();
        if let Some(first) = gens.first() {
            let mut acc = first.clone();
            for g in gens.iter().skip(1) {
                acc = self.multiply(&acc, g).expect("same family");
            }
            out.push(acc.clone());
            out.push(self.multiply(&acc, first).expect("same family"));
        }
        out
    }

    fn parse_element(&self, spec: &str) -> KResult<MonoidElement> {
        let bad = |msg: String| KernelError::ElementParse { spec: spec.to_string(), message: msg };
        let spec_t = spec.trim();
        if spec_t.is_empty() || spec_t == "e" || spec_t == "ε" {
            return Ok(self.unit());
        }
        let mut syl: Syllables = Vec::new();
        for token in spec_t.split_whitespace() {
            let (name, value) = if let Some(open) = token.find('(') {
                let name = &token[..open];
                let inner = token[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| bad(format!("unclosed value in `{token}`")))?;
                let (m_str, k_str) = inner
                    .split_once(',')
                    .ok_or_else(|| bad(format!("expected `(m,k)` in `{token}`")))?;
                let m: BigUint = m_str
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("`{}` is not a natural number", m_str.trim())))?;
                let k: u32 = k_str
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("`{}` is not a natural number", k_str.trim())))?;
                (name, VertexElem::Scaled { m, k })
            } else if let Some((name, exp)) = token.split_once('^') {
                let e: u64 = exp.parse().map_err(|_| bad(format!("bad exponent in `{token}`")))?;
                (name, VertexElem::Free(e))
            } else {
                (token, VertexElem::Free(1))
            };
            let v = self
                .vertices
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| bad(format!("unknown vertex `{name}`")))?;
            syl.push((v as u16, value));
        }
        self.element(&syl)
    }

    fn format_element(&self, e: &MonoidElement) -> String {
        match self.parts(e) {
            Ok(syl) if syl.is_empty() => "e".to_string(),
            Ok(syl) => syl
                .iter()
                .map(|(v, val)| {
                    let name = &self.vertices[*v as usize];
                    match val {
                        VertexElem::Free(1) => name.clone(),
                        VertexElem::Free(k) => format!("{name}^{k}"),
                        VertexElem::Scaled { m, k } => format!("{name}({m},{k})"),
                    }
                })
                .collect::<Vec<_>>()
                .join(" "),
            Err(_) => format!("{:?}", e.payload),
        }
    }

    fn random_element(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement {
        let len = rng.gen_range(0..=3usize);
        let syl: Syllables = (0..len)
            .map(|_| {
                let v = rng.gen_range(0..self.vertices.len()) as u16;
                (v, self.random_value(rng, v, size))
            })
            .collect();
        self.element(&syl).expect("random syllables are well formed")
    }

    fn random_core(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement {
        let universal: Vec<u16> =
            (0..self.vertices.len() as u16).filter(|v| self.universal[*v as usize]).collect();
        if universal.is_empty() {
            return self.unit();
        }
        let len = rng.gen_range(0..=2usize);
        let syl: Syllables = (0..len)
            .map(|_| {
                let v = universal[rng.gen_range(0..universal.len())];
                let val = match self.kinds[v as usize] {
                    VertexKind::Nat => VertexElem::Free(rng.gen_range(1..=u64::from(size.max(1)))),
                    VertexKind::Scaled(_) => VertexElem::Scaled {
                        m: BigUint::from(rng.gen_range(0..=u64::from(size.max(1)))),
                        k: 0,
                    },
                };
                (v, val)
            })
            .collect();
        self.element(&syl).expect("random core syllables are well formed")
    }
}
