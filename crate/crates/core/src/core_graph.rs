//! The meet graph on ∼-classes of noncore irreducibles, its coconnected
//! components, and the two actions of the core on it: α on classes and the
//! induced β on the graph.
//!
//! Vertices are stored class representatives (first-seen wins, so prefixes
//! are stable under growing caps). An edge joins two classes exactly when
//! the stored representatives have a common right multiple. Components are
//! the connected components of the *complement* graph, computed twice —
//! union-find and breadth-first search — and cross-checked on every build.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::kernel::{Exhaustiveness, KResult, KernelError, MonoidElement, MonoidHandle};

/// Cardinality of a coconnected component. `Finite` counts stored classes;
/// `Infinite` is reserved for families that certify an unbounded component
/// (none of the bundled families do — their enumerations are finite per
/// component — but downstream verdicts must be able to express it).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentCard {
    Finite(u64),
    Infinite,
}

impl std::fmt::Display for ComponentCard {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComponentCard::Finite(n) => write!(f, "{n}"),
            ComponentCard::Infinite => write!(f, "∞"),
        }
    }
}

/// The meet graph Γ over stored class representatives.
#[derive(Clone, Debug)]
pub struct CoreGraph {
    vertices: Vec<MonoidElement>,
    /// Unordered pairs (i, j) with i < j whose representatives meet.
    edges: BTreeSet<(usize, usize)>,
    /// Partition of vertex indices into coconnected components, each sorted
    /// ascending, components ordered by their smallest member.
    components: Vec<Vec<usize>>,
    /// Vertex index → component index.
    component_index: Vec<usize>,
    component_cards: Vec<ComponentCard>,
    exhaustive: bool,
    enumeration: Exhaustiveness,
}

impl CoreGraph {
    pub fn vertices(&self) -> &[MonoidElement] {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_cards(&self) -> &[ComponentCard] {
        &self.component_cards
    }

    /// True when every enumerated component is certified complete (the
    /// enumerator reported `Total` or `ComponentComplete`).
    pub fn exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn enumeration(&self) -> Exhaustiveness {
        self.enumeration
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.edges.contains(&(i.min(j), i.max(j)))
    }

    /// Component index of vertex `i`.
    pub fn component_index_of_vertex(&self, i: usize) -> usize {
        self.component_index[i]
    }

    /// Index of the stored class that `s` is ∼-equivalent to, if any.
    pub fn class_index_of(
        &self,
        handle: &MonoidHandle,
        s: &MonoidElement,
    ) -> KResult<Option<usize>> {
        for (i, v) in self.vertices.iter().enumerate() {
            if handle.core_equivalent(s, v)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Coconnected-component index of the class of `s`.
    ///
    /// Errors with "unknown class" when `s` matches no stored vertex (the
    /// build cap was too small) and rejects elements that are not noncore
    /// irreducible.
    pub fn component_of(&self, handle: &MonoidHandle, s: &MonoidElement) -> KResult<usize> {
        if !handle.is_noncore_irreducible(s) {
            return Err(KernelError::NotIrreducible(handle.format_element(s)));
        }
        match self.class_index_of(handle, s)? {
            Some(i) => Ok(self.component_index[i]),
            None => Err(KernelError::Contract(format!(
                "unknown class: {} matches no stored vertex (cap too small)",
                handle.format_element(s)
            ))),
        }
    }

    /// DOT rendering with one cluster per coconnected component.
    /// Ordering is fixed by vertex and component indices, so identical
    /// builds give byte-identical output.
    pub fn to_dot(&self, handle: &MonoidHandle) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph core_graph {{");
        for (ci, comp) in self.components.iter().enumerate() {
            let _ = writeln!(out, "  subgraph cluster_{ci} {{");
            let _ =
                writeln!(out, "    label=\"component {ci} (card {})\";", self.component_cards[ci]);
            for &v in comp {
                let _ = writeln!(
                    out,
                    "    v{v} [label=\"{}\"];",
                    escape_dot(&handle.format_element(&self.vertices[v]))
                );
            }
            let _ = writeln!(out, "  }}");
        }
        for &(i, j) in &self.edges {
            let _ = writeln!(out, "  v{i} -- v{j};");
        }
        let _ = writeln!(out, "}}");
        out
    }
}

fn escape_dot(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Builds Γ over `irreducible_classes(handle, cap)`: dedupes the enumerated
/// representatives by core equivalence (first seen wins), joins two classes
/// when the representatives meet, and splits the vertex set into connected
/// components of the complement graph.
pub fn build_core_graph(handle: &MonoidHandle, cap: usize) -> KResult<CoreGraph> {
    let (raw, enumeration) = handle.irreducible_classes(cap);
    let mut vertices: Vec<MonoidElement> = Vec::new();
    'raw: for r in raw {
        if !handle.is_noncore_irreducible(&r) {
            return Err(KernelError::Contract(format!(
                "class enumerator returned {}, which is not noncore irreducible",
                handle.format_element(&r)
            )));
        }
        for v in &vertices {
            if handle.core_equivalent(&r, v)? {
                continue 'raw;
            }
        }
        vertices.push(r);
    }

    let n = vertices.len();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if handle.intersects(&vertices[i], &vertices[j])? {
                edges.insert((i, j));
            }
        }
    }

    let components = complement_components_bfs(n, &edges);
    let by_union_find = complement_components_union_find(n, &edges);
    if components != by_union_find {
        return Err(KernelError::Contract(
            "component partition mismatch between BFS and union-find".into(),
        ));
    }

    let mut component_index = vec![0usize; n];
    for (ci, comp) in components.iter().enumerate() {
        for &v in comp {
            component_index[v] = ci;
        }
    }
    let component_cards =
        components.iter().map(|c| ComponentCard::Finite(c.len() as u64)).collect();

    Ok(CoreGraph {
        vertices,
        edges,
        components,
        component_index,
        component_cards,
        exhaustive: enumeration.certified(),
        enumeration,
    })
}

fn complement_neighbors(n: usize, edges: &BTreeSet<(usize, usize)>, v: usize) -> Vec<usize> {
    (0..n).filter(|&u| u != v && !edges.contains(&(u.min(v), u.max(v)))).collect()
}

fn complement_components_bfs(n: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start] = true;
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for u in complement_neighbors(n, edges, v) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components.sort_by_key(|c| c[0]);
    components
}

fn complement_components_union_find(n: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<Vec<usize>> {
    struct Dsu(Vec<usize>);
    impl Dsu {
        fn find(&mut self, x: usize) -> usize {
            if self.0[x] != x {
                let root = self.find(self.0[x]);
                self.0[x] = root;
            }
            self.0[x]
        }
        fn union(&mut self, a: usize, b: usize) {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra != rb {
                self.0[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut dsu = Dsu((0..n).collect());
    for i in 0..n {
        for j in (i + 1)..n {
            if !edges.contains(&(i, j)) {
                dsu.union(i, j);
            }
        }
    }
    let mut buckets: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        let root = dsu.find(v);
        buckets.entry(root).or_default().push(v);
    }
    buckets.into_values().collect()
}

/// α_a([s]) = [a·s]: left multiplication by a core element on classes of
/// noncore irreducibles. The result is canonicalized to the stored vertex
/// representative whenever the image class is in the graph; otherwise the
/// raw product is returned.
pub fn alpha_act(
    handle: &MonoidHandle,
    graph: &CoreGraph,
    a: &MonoidElement,
    s: &MonoidElement,
) -> KResult<MonoidElement> {
    if !handle.is_core(a) {
        return Err(KernelError::NotCore(handle.format_element(a)));
    }
    if !handle.is_noncore_irreducible(s) {
        return Err(KernelError::NotIrreducible(handle.format_element(s)));
    }
    let image = handle.multiply(a, s)?;
    if !handle.is_noncore_irreducible(&image) {
        return Err(KernelError::Contract(format!(
            "core multiple {} of an irreducible is not irreducible",
            handle.format_element(&image)
        )));
    }
    match graph.class_index_of(handle, &image)? {
        Some(i) => Ok(graph.vertices()[i].clone()),
        None => Ok(image),
    }
}

/// How one core generator acts on the component partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentAction {
    /// Fixes every stored class (α is the identity on vertices).
    IdentityOnClasses,
    /// Fixes every component setwise but moves classes within components.
    PreservesComponents,
    /// Permutes the components nontrivially; `perm[i]` is the image of
    /// component `i`.
    Permutes(Vec<usize>),
}

/// β-data for one core generator: where each stored class goes and what
/// that does to components.
#[derive(Clone, Debug)]
pub struct BetaGenerator {
    pub generator: MonoidElement,
    /// Vertex index → vertex index of the α-image class.
    pub class_map: Vec<usize>,
    /// Component index → component index induced by `class_map`.
    pub component_map: Vec<usize>,
    pub action: ComponentAction,
}

/// Summary of β: S_c ↷ Γ restricted to the family's core generators.
#[derive(Clone, Debug)]
pub enum BetaSummary {
    /// The graph is not exhaustive at the build cap, so the action on the
    /// true vertex set is undetermined.
    Inconclusive { reason: String },
    Computed {
        generators: Vec<BetaGenerator>,
        /// True when every generator maps every component onto itself.
        all_components_preserved: bool,
    },
}

/// Computes, for each enumerated core generator, the induced permutation of
/// stored classes and of coconnected components. Inconclusive when the
/// graph enumeration was truncated.
pub fn beta_component_action(handle: &MonoidHandle, graph: &CoreGraph) -> KResult<BetaSummary> {
    if !graph.exhaustive() {
        return Ok(BetaSummary::Inconclusive {
            reason: "class enumeration truncated at cap; β-action undetermined".into(),
        });
    }
    let n = graph.vertices().len();
    let mut generators = Vec::new();
    let mut all_preserved = true;
    for a in handle.core_generators() {
        let mut class_map = Vec::with_capacity(n);
        for v in graph.vertices() {
            let image = handle.multiply(&a, v)?;
            match graph.class_index_of(handle, &image)? {
                Some(i) => class_map.push(i),
                None if graph.enumeration() == Exhaustiveness::Total => {
                    return Err(KernelError::Contract(format!(
                        "α image {} of a stored class left a total enumeration",
                        handle.format_element(&image)
                    )));
                }
                None => {
                    return Ok(BetaSummary::Inconclusive {
                        reason: format!(
                            "α image {} of a stored class is outside the enumerated \
                             components",
                            handle.format_element(&image)
                        ),
                    });
                }
            }
        }
        let distinct: BTreeSet<usize> = class_map.iter().copied().collect();
        if distinct.len() != n {
            return Err(KernelError::Contract(format!(
                "α action of {} is not injective on stored classes",
                handle.format_element(&a)
            )));
        }

        let comp_count = graph.components().len();
        let mut component_map = vec![usize::MAX; comp_count];
        for (v, &img) in class_map.iter().enumerate() {
            let from = graph.component_index_of_vertex(v);
            let to = graph.component_index_of_vertex(img);
            if component_map[from] == usize::MAX {
                component_map[from] = to;
            } else if component_map[from] != to {
                return Err(KernelError::Contract(format!(
                    "β action of {} splits component {} across components",
                    handle.format_element(&a),
                    from
                )));
            }
        }

        let identity_on_classes = class_map.iter().enumerate().all(|(i, &j)| i == j);
        let identity_on_components = component_map.iter().enumerate().all(|(i, &j)| i == j);
        let action = if identity_on_classes {
            ComponentAction::IdentityOnClasses
        } else if identity_on_components {
            ComponentAction::PreservesComponents
        } else {
            ComponentAction::Permutes(component_map.clone())
        };
        all_preserved &= identity_on_components;
        generators.push(BetaGenerator { generator: a, class_map, component_map, action });
    }
    Ok(BetaSummary::Computed { generators, all_components_preserved: all_preserved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::presets;

    fn axb_graph(cap: usize) -> (MonoidHandle, CoreGraph) {
        let h = presets::axb();
        let g = build_core_graph(&h, cap).unwrap();
        (h, g)
    }

    #[test]
    fn affine_family_components_are_residue_classes_per_prime() {
        let (_h, g) = axb_graph(10); // primes 2, 3, 5 — exactly at a boundary
        assert!(g.exhaustive());
        assert_eq!(g.enumeration(), Exhaustiveness::ComponentComplete);
        assert_eq!(g.vertices().len(), 10);
        let sizes: Vec<usize> = g.components().iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![2, 3, 5]);
        assert_eq!(
            g.component_cards(),
            &[ComponentCard::Finite(2), ComponentCard::Finite(3), ComponentCard::Finite(5)]
        );
        // Edge-free inside each component, complete across components.
        for &(i, j) in g.edges() {
            assert_ne!(g.component_index_of_vertex(i), g.component_index_of_vertex(j));
        }
        assert_eq!(g.edges().len(), 2 * 3 + 2 * 5 + 3 * 5);
    }

    #[test]
    fn component_lookup_canonicalizes_by_equivalence() {
        let (h, g) = axb_graph(10);
        let five = g.component_of(&h, &h.parse_element("(3,5)").unwrap()).unwrap();
        assert!(g.components()[five].len() == 5);
        let two = g.component_of(&h, &h.parse_element("(8,2)").unwrap()).unwrap();
        assert!(g.components()[two].len() == 2);
        // (8,2) ∼ (0,2): same component as the stored first residue.
        let direct = g.component_of(&h, &h.parse_element("(0,2)").unwrap()).unwrap();
        assert_eq!(two, direct);
    }

    #[test]
    fn unknown_class_is_reported_when_cap_too_small() {
        let (h, g) = axb_graph(10);
        let err = g.component_of(&h, &h.parse_element("(0,17)").unwrap()).unwrap_err();
        assert!(err.to_string().contains("unknown class"), "{err}");
        // Non-irreducible input is rejected before lookup.
        let err = g.component_of(&h, &h.parse_element("(0,4)").unwrap()).unwrap_err();
        assert!(matches!(err, KernelError::NotIrreducible(_)));
    }

    #[test]
    fn two_scaled_lines_make_a_coconnected_graph_with_two_edges() {
        let h = presets::graph_product(&presets::gone_mad_section()).unwrap();
        let g = build_core_graph(&h, 8).unwrap();
        assert!(g.exhaustive());
        assert_eq!(g.enumeration(), Exhaustiveness::Total);
        assert_eq!(g.vertices().len(), 4);
        // One coconnected component spanning everything.
        assert_eq!(g.components().len(), 1);
        assert_eq!(g.component_cards(), &[ComponentCard::Finite(4)]);
        // Exactly two edges: translation ⋒ scaling inside each vertex line.
        assert_eq!(g.edges().len(), 2);
        for &(i, j) in g.edges() {
            let li = h.format_element(&g.vertices()[i]);
            let lj = h.format_element(&g.vertices()[j]);
            // Both endpoints live on the same vertex line (same leading name).
            assert_eq!(li.chars().next(), lj.chars().next(), "{li} -- {lj}");
        }
    }

    #[test]
    fn all_core_family_yields_the_empty_graph() {
        // Complete graph on two vertices: both generators are universal, so
        // everything is core and there are no irreducible classes at all.
        let h = presets::raam(2, &[(0, 1)]).unwrap();
        let g = build_core_graph(&h, 8).unwrap();
        assert!(g.exhaustive());
        assert!(g.vertices().is_empty());
        assert!(g.edges().is_empty());
        assert!(g.components().is_empty());
    }

    #[test]
    fn alpha_translates_residues_and_canonicalizes() {
        let (h, g) = axb_graph(10);
        let a1 = h.parse_element("(1,1)").unwrap();
        let a2 = h.parse_element("(2,1)").unwrap();
        let s = h.parse_element("(0,2)").unwrap();
        let img = alpha_act(&h, &g, &a1, &s).unwrap();
        assert_eq!(h.format_element(&img), "(1,2)");
        let img = alpha_act(&h, &g, &a2, &s).unwrap();
        assert_eq!(h.format_element(&img), "(0,2)");
        // Non-core actor is refused.
        let err = alpha_act(&h, &g, &s, &s).unwrap_err();
        assert!(matches!(err, KernelError::NotCore(_)));
    }

    #[test]
    fn flip_family_alpha_swaps_axes_and_beta_swaps_components() {
        let h = presets::z2_flip(2).unwrap();
        let g = build_core_graph(&h, 8).unwrap();
        assert!(g.exhaustive());
        assert_eq!(g.vertices().len(), 4);
        assert_eq!(g.component_cards(), &[ComponentCard::Finite(2), ComponentCard::Finite(2)]);

        let x = h.parse_element("((0,0),x)").unwrap();
        let s = h.parse_element("((1,0),p0)").unwrap();
        let img = alpha_act(&h, &g, &x, &s).unwrap();
        // (0,x)·((1,0),p0) lands in the p1 class with swapped coordinates.
        let expect = h.parse_element("((0,1),p1)").unwrap();
        assert!(h.core_equivalent(&img, &expect).unwrap());
        let si = g.component_of(&h, &s).unwrap();
        let ii = g.component_of(&h, &img).unwrap();
        assert_ne!(si, ii);

        match beta_component_action(&h, &g).unwrap() {
            BetaSummary::Computed { generators, all_components_preserved } => {
                assert!(!all_components_preserved);
                let flip = generators
                    .iter()
                    .find(|gen| h.format_element(&gen.generator).contains('x'))
                    .expect("flip generator enumerated");
                assert_eq!(flip.action, ComponentAction::Permutes(vec![1, 0]));
            }
            BetaSummary::Inconclusive { reason } => panic!("inconclusive: {reason}"),
        }
    }

    #[test]
    fn affine_beta_preserves_every_component() {
        let (h, g) = axb_graph(10);
        match beta_component_action(&h, &g).unwrap() {
            BetaSummary::Computed { generators, all_components_preserved } => {
                assert!(all_components_preserved);
                // (1,1) cycles residues inside each V_p: not the identity on
                // classes, but setwise stable on every component.
                assert_eq!(generators.len(), 1);
                assert_eq!(generators[0].action, ComponentAction::PreservesComponents);
            }
            BetaSummary::Inconclusive { reason } => panic!("inconclusive: {reason}"),
        }
    }

    #[test]
    fn trivial_core_gives_identity_summary() {
        let h = presets::graph_product(&presets::gone_mad_section()).unwrap();
        let g = build_core_graph(&h, 8).unwrap();
        match beta_component_action(&h, &g).unwrap() {
            BetaSummary::Computed { generators, all_components_preserved } => {
                assert!(all_components_preserved);
                assert!(generators.is_empty());
            }
            BetaSummary::Inconclusive { reason } => panic!("inconclusive: {reason}"),
        }
    }

    #[test]
    fn truncated_enumeration_taints_beta() {
        let (h, g) = axb_graph(7); // cuts V_5 mid-way
        assert!(!g.exhaustive());
        assert!(matches!(beta_component_action(&h, &g).unwrap(), BetaSummary::Inconclusive { .. }));
    }

    #[test]
    fn dot_export_is_deterministic_and_clustered() {
        let (h, g) = axb_graph(5);
        let dot = g.to_dot(&h);
        assert!(dot.starts_with("graph core_graph {"));
        assert!(dot.contains("subgraph cluster_0"));
        assert!(dot.contains("label=\"component 0 (card 2)\""));
        assert!(dot.contains("v0 [label=\"(0,2)\"];"));
        assert!(dot.contains("v0 -- v2;"));
        let again = build_core_graph(&h, 5).unwrap().to_dot(&h);
        assert_eq!(dot, again);
    }
}
