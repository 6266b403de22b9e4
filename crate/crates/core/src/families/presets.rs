//! Ready-made family configurations used by tests, examples, and the bundled
//! config files: the affine monoid over ℕ, the binary first-letter-flip
//! self-similar action, lattice dynamical systems (the freely doubled line
//! and the coordinate-flip plane), the 𝔽₂[t] polynomial system, and several
//! small graph products.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::families::{
    algdyn_f2t::PolyFamily, algdyn_zd::LatticeFamily, axb::AxBFamily,
    graph_product::GraphProductFamily, selfsim::SelfSimilarFamily, AlgDynZdSection, ConfigError,
    GraphProductSection, MatrixGenerator, RewriteRule, SelfSimilarSection, VertexMonoidSection,
};
use crate::kernel::MonoidHandle;

/// The affine monoid ℕ ⋊ ℕ^× of maps x ↦ m + px.
pub fn axb() -> MonoidHandle {
    MonoidHandle::from_family(Arc::new(AxBFamily::new()))
}

/// The 𝔽₂[t] ⋊ ⟨t, 1+t⟩ polynomial dynamical monoid.
pub fn poly_f2t() -> MonoidHandle {
    MonoidHandle::from_family(Arc::new(PolyFamily::new()))
}

/// Binary alphabet with C₂ = {e, s} acting by flipping the first letter:
/// s(0) = 1, s(1) = 0, and every restriction is trivial.
pub fn self_similar_binary_section() -> SelfSimilarSection {
    SelfSimilarSection {
        alphabet: vec!["0".into(), "1".into()],
        group: vec!["e".into(), "s".into()],
        identity: "e".into(),
        mul: vec![vec!["e".into(), "s".into()], vec!["s".into(), "e".into()]],
        action: vec![vec!["0".into(), "1".into()], vec!["1".into(), "0".into()]],
        restriction: vec![vec!["e".into(), "e".into()], vec!["e".into(), "e".into()]],
    }
}

pub fn self_similar_binary() -> Result<MonoidHandle, ConfigError> {
    let fam = SelfSimilarFamily::from_section(&self_similar_binary_section())?;
    Ok(MonoidHandle::from_family(Arc::new(fam)))
}

/// ℤ ⋊ P with P free on two generators, both acting by doubling.
pub fn freely_doubled_section() -> AlgDynZdSection {
    AlgDynZdSection {
        dimension: 1,
        p_mode: "free".into(),
        generators: vec![
            MatrixGenerator { label: "p".into(), matrix: vec![vec![2]] },
            MatrixGenerator { label: "q".into(), matrix: vec![vec![2]] },
        ],
        rules: vec![],
    }
}

pub fn freely_doubled() -> Result<MonoidHandle, ConfigError> {
    let fam = LatticeFamily::from_section(&freely_doubled_section())?;
    Ok(MonoidHandle::from_family(Arc::new(fam)))
}

/// ℤ² ⋊ P where P is generated by the two coordinate scalings by `p`
/// together with the coordinate flip; words normalize to p0^a p1^b x^ε.
pub fn z2_flip_section(p: i64) -> AlgDynZdSection {
    AlgDynZdSection {
        dimension: 2,
        p_mode: "rewrite".into(),
        generators: vec![
            MatrixGenerator { label: "p0".into(), matrix: vec![vec![p, 0], vec![0, 1]] },
            MatrixGenerator { label: "p1".into(), matrix: vec![vec![1, 0], vec![0, p]] },
            MatrixGenerator { label: "x".into(), matrix: vec![vec![0, 1], vec![1, 0]] },
        ],
        rules: vec![
            RewriteRule { lhs: vec!["x".into(), "x".into()], rhs: vec![] },
            RewriteRule {
                lhs: vec!["p1".into(), "p0".into()],
                rhs: vec!["p0".into(), "p1".into()],
            },
            RewriteRule { lhs: vec!["x".into(), "p0".into()], rhs: vec!["p1".into(), "x".into()] },
            RewriteRule { lhs: vec!["x".into(), "p1".into()], rhs: vec!["p0".into(), "x".into()] },
        ],
    }
}

pub fn z2_flip(p: i64) -> Result<MonoidHandle, ConfigError> {
    let fam = LatticeFamily::from_section(&z2_flip_section(p))?;
    Ok(MonoidHandle::from_family(Arc::new(fam)))
}

/// Generic right-angled Artin monoid section on named vertices `a`, `b`, …
/// with the given edges (pairs of vertex indices).
pub fn raam_section(n: usize, edges: &[(usize, usize)]) -> GraphProductSection {
    const NAMES: [&str; 12] = ["a", "b", "c", "d", "f", "g", "h", "i", "j", "k", "l", "m"];
    let vertices: Vec<String> = NAMES[..n].iter().map(|s| s.to_string()).collect();
    GraphProductSection {
        edges: edges.iter().map(|&(x, y)| vec![vertices[x].clone(), vertices[y].clone()]).collect(),
        vertices,
        vertex_monoids: BTreeMap::new(),
    }
}

pub fn raam(n: usize, edges: &[(usize, usize)]) -> Result<MonoidHandle, ConfigError> {
    let fam = GraphProductFamily::from_section(&raam_section(n, edges), "graph-product")?;
    Ok(MonoidHandle::from_family(Arc::new(fam)))
}

/// Path a–b–c.
pub fn raam_section_p3() -> GraphProductSection {
    raam_section(3, &[(0, 1), (1, 2)])
}

/// Edgeless graph on n vertices (free product of n copies of ℕ).
pub fn raam_section_edgeless(n: usize) -> GraphProductSection {
    raam_section(n, &[])
}

/// Four-cycle a–b–c–d–a.
pub fn raam_section_c4() -> GraphProductSection {
    raam_section(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])
}

/// Free product of two affine lines ℕ ⋊ ⟨2⟩ and ℕ ⋊ ⟨3⟩ (edgeless
/// two-vertex graph). Each factor contributes a translation class and a
/// scaling class that meet each other, so the meet graph is coconnected
/// with exactly two internal edges — scale existence fails on edge-freeness
/// alone.
pub fn gone_mad_section() -> GraphProductSection {
    let mut section = GraphProductSection {
        vertices: vec!["a".into(), "b".into()],
        edges: vec![],
        vertex_monoids: BTreeMap::new(),
    };
    section
        .vertex_monoids
        .insert("a".into(), VertexMonoidSection { kind: "scaled".into(), multiplier: Some(2) });
    section
        .vertex_monoids
        .insert("b".into(), VertexMonoidSection { kind: "scaled".into(), multiplier: Some(3) });
    section
}

/// Star with a scaled centre: z carries ℕ ⋊ ⟨3⟩, the leaves a and b carry ℕ.
pub fn scaled_star_section() -> GraphProductSection {
    let mut section = GraphProductSection {
        vertices: vec!["z".into(), "a".into(), "b".into()],
        edges: vec![vec!["z".into(), "a".into()], vec!["z".into(), "b".into()]],
        vertex_monoids: BTreeMap::new(),
    };
    section
        .vertex_monoids
        .insert("z".into(), VertexMonoidSection { kind: "scaled".into(), multiplier: Some(3) });
    section
}

pub fn graph_product(section: &GraphProductSection) -> Result<MonoidHandle, ConfigError> {
    let fam = GraphProductFamily::from_section(section, "graph-product")?;
    Ok(MonoidHandle::from_family(Arc::new(fam)))
}
