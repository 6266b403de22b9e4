//! Single-case algebraic law checks shared by the property-test suite and
//! the acceptance gate.
//!
//! Each function validates one instance of one law and returns a readable
//! counterexample on failure, so the same checks can be driven by random
//! generators (thousands of cases) and by pinned regression inputs.

use crate::core_graph::CoreGraph;
use crate::grid::{permute_word, word_lcm, GridOutcome, IrreducibleWord};
use crate::kernel::{KernelError, LcmOutcome, MonoidElement, MonoidHandle};
use crate::oracle;
use crate::scale::{
    factor_in_nx, scale_value, transversal, zeta_partial, NxSubsemigroup, ScaleReport,
};

pub type LawResult = Result<(), String>;

fn err(e: KernelError) -> String {
    format!("kernel error: {e}")
}

/// (a·b)·c = a·(b·c).
pub fn law_associativity(
    h: &MonoidHandle,
    a: &MonoidElement,
    b: &MonoidElement,
    c: &MonoidElement,
) -> LawResult {
    let left = h.multiply(&h.multiply(a, b).map_err(err)?, c).map_err(err)?;
    let right = h.multiply(a, &h.multiply(b, c).map_err(err)?).map_err(err)?;
    if left != right {
        return Err(format!(
            "associativity failed on {}, {}, {}",
            h.format_element(a),
            h.format_element(b),
            h.format_element(c)
        ));
    }
    Ok(())
}

/// 1·a = a·1 = a.
pub fn law_unit_neutral(h: &MonoidHandle, a: &MonoidElement) -> LawResult {
    let u = h.unit();
    if h.multiply(&u, a).map_err(err)? != *a || h.multiply(a, &u).map_err(err)? != *a {
        return Err(format!("unit not neutral on {}", h.format_element(a)));
    }
    Ok(())
}

/// a·x = a·y ⇒ x = y.
pub fn law_left_cancellation(
    h: &MonoidHandle,
    a: &MonoidElement,
    x: &MonoidElement,
    y: &MonoidElement,
) -> LawResult {
    if x != y && h.multiply(a, x).map_err(err)? == h.multiply(a, y).map_err(err)? {
        return Err(format!(
            "left cancellation failed: {}·{} = {}·{} with distinct factors",
            h.format_element(a),
            h.format_element(x),
            h.format_element(a),
            h.format_element(y)
        ));
    }
    Ok(())
}

/// right_lcm(s,t) and right_lcm(t,s) agree: same verdict, and on a meet
/// the two lcms generate the same right ideal.
pub fn law_lcm_symmetry(h: &MonoidHandle, s: &MonoidElement, t: &MonoidElement) -> LawResult {
    let st = h.right_lcm(s, t).map_err(err)?;
    let ts = h.right_lcm(t, s).map_err(err)?;
    match (st.meet(), ts.meet()) {
        (None, None) => Ok(()),
        (Some((a, _, _)), Some((b, _, _))) => {
            let fwd = h.left_divide(a, b).map_err(err)?;
            let bwd = h.left_divide(b, a).map_err(err)?;
            if fwd.is_none() || bwd.is_none() {
                return Err(format!(
                    "lcm({0},{1}) = {2} and lcm({1},{0}) = {3} generate different ideals",
                    h.format_element(s),
                    h.format_element(t),
                    h.format_element(a),
                    h.format_element(b)
                ));
            }
            Ok(())
        }
        _ => Err(format!(
            "meet verdict for {} and {} is not symmetric",
            h.format_element(s),
            h.format_element(t)
        )),
    }
}

/// On a meet, the lcm really is a common right multiple realized by the
/// returned cofactors.
pub fn law_lcm_common_multiple(
    h: &MonoidHandle,
    s: &MonoidElement,
    t: &MonoidElement,
) -> LawResult {
    if let LcmOutcome::Meet { lcm, cofactor_left, cofactor_right } =
        h.right_lcm(s, t).map_err(err)?
    {
        if h.multiply(s, &cofactor_left).map_err(err)? != lcm
            || h.multiply(t, &cofactor_right).map_err(err)? != lcm
        {
            return Err(format!(
                "cofactors do not realize lcm({}, {})",
                h.format_element(s),
                h.format_element(t)
            ));
        }
    }
    Ok(())
}

/// The verdict matches a bounded brute-force multiple search and the lcm
/// divides every discovered common multiple.
pub fn law_lcm_minimality_bounded(
    h: &MonoidHandle,
    s: &MonoidElement,
    t: &MonoidElement,
    depth: usize,
) -> LawResult {
    oracle::check_lcm_by_search(h, s, t, depth).map_err(err)
}

/// s ∼ s.
pub fn law_equivalence_reflexive(h: &MonoidHandle, s: &MonoidElement) -> LawResult {
    if !h.core_equivalent(s, s).map_err(err)? {
        return Err(format!("{} is not equivalent to itself", h.format_element(s)));
    }
    Ok(())
}

/// s ∼ t ⟺ t ∼ s.
pub fn law_equivalence_symmetric(
    h: &MonoidHandle,
    s: &MonoidElement,
    t: &MonoidElement,
) -> LawResult {
    if h.core_equivalent(s, t).map_err(err)? != h.core_equivalent(t, s).map_err(err)? {
        return Err(format!(
            "equivalence of {} and {} is not symmetric",
            h.format_element(s),
            h.format_element(t)
        ));
    }
    Ok(())
}

/// s ∼ t ⇒ u·s ∼ u·t (left compatibility; the right-handed analogue is
/// false in general).
pub fn law_equivalence_left_compatible(
    h: &MonoidHandle,
    u: &MonoidElement,
    s: &MonoidElement,
    t: &MonoidElement,
) -> LawResult {
    if h.core_equivalent(s, t).map_err(err)? {
        let us = h.multiply(u, s).map_err(err)?;
        let ut = h.multiply(u, t).map_err(err)?;
        if !h.core_equivalent(&us, &ut).map_err(err)? {
            return Err(format!(
                "{} ∼ {} but left multiples by {} are inequivalent",
                h.format_element(s),
                h.format_element(t),
                h.format_element(u)
            ));
        }
    }
    Ok(())
}

/// The core submonoid contains the unit and is closed under products.
pub fn law_core_closure(h: &MonoidHandle, a: &MonoidElement, b: &MonoidElement) -> LawResult {
    if !h.is_core(&h.unit()) {
        return Err("the unit is not core".to_string());
    }
    if h.is_core(a) && h.is_core(b) && !h.is_core(&h.multiply(a, b).map_err(err)?) {
        return Err(format!(
            "core elements {} and {} have a non-core product",
            h.format_element(a),
            h.format_element(b)
        ));
    }
    Ok(())
}

/// A core element meets every element (from either side).
pub fn law_core_meets_all(h: &MonoidHandle, a: &MonoidElement, s: &MonoidElement) -> LawResult {
    if h.is_core(a) && (!h.intersects(a, s).map_err(err)? || !h.intersects(s, a).map_err(err)?) {
        return Err(format!(
            "core element {} fails to meet {}",
            h.format_element(a),
            h.format_element(s)
        ));
    }
    Ok(())
}

/// Graph edges are exactly the meeting class pairs.
pub fn law_graph_edge_iff_meet(
    h: &MonoidHandle,
    graph: &CoreGraph,
    i: usize,
    j: usize,
) -> LawResult {
    if i == j {
        return Ok(());
    }
    let vi = &graph.vertices()[i];
    let vj = &graph.vertices()[j];
    let meets = h.intersects(vi, vj).map_err(err)?;
    if meets != graph.has_edge(i, j) {
        return Err(format!(
            "edge table disagrees with ⋒ on {} and {}",
            h.format_element(vi),
            h.format_element(vj)
        ));
    }
    Ok(())
}

/// Stored class representatives are pairwise non-equivalent.
pub fn law_graph_vertices_inequivalent(
    h: &MonoidHandle,
    graph: &CoreGraph,
    i: usize,
    j: usize,
) -> LawResult {
    if i == j {
        return Ok(());
    }
    let vi = &graph.vertices()[i];
    let vj = &graph.vertices()[j];
    if h.core_equivalent(vi, vj).map_err(err)? {
        return Err(format!(
            "stored classes {} and {} are equivalent",
            h.format_element(vi),
            h.format_element(vj)
        ));
    }
    Ok(())
}

/// The letterwise diagram and the kernel right LCM agree on the folded
/// words: same meet/orthogonal verdict, and on a meet the two lcms
/// generate the same right ideal.
pub fn law_grid_agrees_with_kernel(
    h: &MonoidHandle,
    graph: &CoreGraph,
    s_letters: &[MonoidElement],
    t_letters: &[MonoidElement],
) -> LawResult {
    let s = IrreducibleWord::new(h, graph, s_letters.to_vec()).map_err(err)?;
    let t = IrreducibleWord::new(h, graph, t_letters.to_vec()).map_err(err)?;
    let diagram = word_lcm(h, graph, &s, &t).map_err(err)?;
    let fold_s = s.fold(h).map_err(err)?;
    let fold_t = t.fold(h).map_err(err)?;
    let kernel = h.right_lcm(&fold_s, &fold_t).map_err(err)?;
    match (diagram.outcome(), kernel.meet()) {
        (GridOutcome::Orthogonal { .. }, None) => Ok(()),
        (GridOutcome::Complete { lcm, .. }, Some((klcm, _, _))) => {
            let fwd = h.left_divide(lcm, klcm).map_err(err)?;
            let bwd = h.left_divide(klcm, lcm).map_err(err)?;
            if fwd.is_none() || bwd.is_none() {
                return Err(format!(
                    "diagram lcm {} and kernel lcm {} differ",
                    h.format_element(lcm),
                    h.format_element(klcm)
                ));
            }
            Ok(())
        }
        (GridOutcome::Orthogonal { at }, Some(_)) => {
            Err(format!("diagram stops orthogonal at {:?} but the folds meet", at))
        }
        (GridOutcome::Complete { .. }, None) => {
            Err("diagram completes but the folds are orthogonal".to_string())
        }
    }
}

/// Permutation rewriting hits the permuted component trace, keeps the
/// component multiset, and stays in the core-equivalence class.
pub fn law_permutation_rewriting(
    h: &MonoidHandle,
    graph: &CoreGraph,
    letters: &[MonoidElement],
    sigma: &[usize],
) -> LawResult {
    let word = IrreducibleWord::new(h, graph, letters.to_vec()).map_err(err)?;
    let out = permute_word(h, graph, &word, sigma).map_err(err)?;
    let expected: Vec<usize> = sigma.iter().map(|&i| word.component_trace()[i]).collect();
    if out.component_trace() != expected.as_slice() {
        return Err(format!("trace {:?} instead of {:?}", out.component_trace(), expected));
    }
    if out.component_multiset() != word.component_multiset() {
        return Err("component multiset changed".to_string());
    }
    let before = word.fold(h).map_err(err)?;
    let after = out.fold(h).map_err(err)?;
    if !h.core_equivalent(&before, &after).map_err(err)? {
        return Err(format!(
            "fold moved from the class of {} to {}",
            h.format_element(&before),
            h.format_element(&after)
        ));
    }
    Ok(())
}

/// N(st) = N(s)·N(t).
pub fn law_scale_multiplicative(
    h: &MonoidHandle,
    graph: &CoreGraph,
    report: &ScaleReport,
    s: &MonoidElement,
    t: &MonoidElement,
) -> LawResult {
    let ns = scale_value(h, graph, report, s).map_err(err)?;
    let nt = scale_value(h, graph, report, t).map_err(err)?;
    let nst = scale_value(h, graph, report, &h.multiply(s, t).map_err(err)?).map_err(err)?;
    if Some(nst) != ns.checked_mul(nt) {
        return Err(format!(
            "N({}·{}) = {nst} ≠ {ns}·{nt}",
            h.format_element(s),
            h.format_element(t)
        ));
    }
    Ok(())
}

/// N(a·s) = N(s) for core a.
pub fn law_scale_core_invariance(
    h: &MonoidHandle,
    graph: &CoreGraph,
    report: &ScaleReport,
    a: &MonoidElement,
    s: &MonoidElement,
) -> LawResult {
    if !h.is_core(a) {
        return Ok(());
    }
    let ns = scale_value(h, graph, report, s).map_err(err)?;
    let nas = scale_value(h, graph, report, &h.multiply(a, s).map_err(err)?).map_err(err)?;
    if ns != nas {
        return Err(format!(
            "N({}·{}) = {nas} ≠ N({}) = {ns}",
            h.format_element(a),
            h.format_element(s),
            h.format_element(s)
        ));
    }
    Ok(())
}

/// N_s = N_t forces s ∼ t or s ⊥ t.
pub fn law_scale_dichotomy(
    h: &MonoidHandle,
    graph: &CoreGraph,
    report: &ScaleReport,
    s: &MonoidElement,
    t: &MonoidElement,
) -> LawResult {
    let ns = scale_value(h, graph, report, s).map_err(err)?;
    let nt = scale_value(h, graph, report, t).map_err(err)?;
    if ns == nt && h.intersects(s, t).map_err(err)? && !h.core_equivalent(s, t).map_err(err)? {
        return Err(format!(
            "{} and {} share scale {ns} but meet without equivalence",
            h.format_element(s),
            h.format_element(t)
        ));
    }
    Ok(())
}

/// The constructed scale matches a family's closed form on one sample.
pub fn law_scale_closed_form(
    h: &MonoidHandle,
    graph: &CoreGraph,
    report: &ScaleReport,
    s: &MonoidElement,
    expected: u64,
) -> LawResult {
    let got = scale_value(h, graph, report, s).map_err(err)?;
    if got != expected {
        return Err(format!("N({}) = {got}, closed form says {expected}", h.format_element(s)));
    }
    Ok(())
}

/// The fibre transversal of n has exactly n pairwise orthogonal, pairwise
/// non-equivalent members of scale n.
pub fn law_transversal_fibre(
    h: &MonoidHandle,
    graph: &CoreGraph,
    report: &ScaleReport,
    n: u64,
) -> LawResult {
    let members = transversal(h, graph, report, n).map_err(err)?;
    if members.len() as u64 != n {
        return Err(format!("transversal of {n} has {} members", members.len()));
    }
    for (i, a) in members.iter().enumerate() {
        for b in members.iter().skip(i + 1) {
            if h.core_equivalent(a, b).map_err(err)? {
                return Err(format!(
                    "transversal members {} and {} are equivalent",
                    h.format_element(a),
                    h.format_element(b)
                ));
            }
        }
    }
    Ok(())
}

/// An element of scale n is equivalent to exactly one transversal member.
pub fn law_fibre_classification(
    h: &MonoidHandle,
    graph: &CoreGraph,
    report: &ScaleReport,
    n: u64,
    x: &MonoidElement,
) -> LawResult {
    let got = scale_value(h, graph, report, x).map_err(err)?;
    if got != n {
        return Err(format!("sample {} has scale {got}, expected {n}", h.format_element(x)));
    }
    let members = transversal(h, graph, report, n).map_err(err)?;
    match oracle::classify_into_transversal(h, &members, x).map_err(err)? {
        Some(_) => Ok(()),
        None => Err(format!("{} (scale {n}) matches no transversal member", h.format_element(x))),
    }
}

/// factor_in_nx agrees with exhaustive search: the unique brute-force
/// multiset when one exists, an error when the count differs from one.
pub fn law_factorization_matches_brute(n: u64, nx: &NxSubsemigroup) -> LawResult {
    let irr = nx.irreducible_generators();
    let brute = oracle::brute_factorizations(n, &irr);
    match (factor_in_nx(n, nx), brute.len()) {
        (Ok(ours), 1) => {
            if ours != brute[0] {
                return Err(format!(
                    "factor_in_nx({n}) = {ours:?} but brute force found {:?}",
                    brute[0]
                ));
            }
            Ok(())
        }
        (Err(_), 0) => Ok(()),
        (Err(_), k) if k > 1 => Ok(()),
        (Ok(ours), k) => Err(format!(
            "factor_in_nx({n}) returned {ours:?} but brute force found {k} factorizations"
        )),
        (Err(e), _) => Err(format!("factor_in_nx({n}) unexpectedly failed: {e}")),
    }
}

/// N_s is an irreducible value exactly when s is a noncore irreducible.
pub fn law_irreducibility_transfer(
    h: &MonoidHandle,
    graph: &CoreGraph,
    report: &ScaleReport,
    s: &MonoidElement,
) -> LawResult {
    let gens: Vec<u64> = report.scale_on_components.values().copied().collect();
    let nx = NxSubsemigroup::new(&gens).map_err(err)?;
    let ns = scale_value(h, graph, report, s).map_err(err)?;
    let value_irreducible = nx.irreducible_generators().contains(&ns);
    let element_irreducible = h.is_noncore_irreducible(s);
    if value_irreducible != element_irreducible {
        return Err(format!(
            "{} has scale {ns}: value irreducible = {value_irreducible}, \
             element irreducible = {element_irreducible}",
            h.format_element(s)
        ));
    }
    Ok(())
}

/// The ζ partial sum at the cutoff is within tol of the Euler product and
/// no farther from it than the partial sum at a quarter of the cutoff.
pub fn law_zeta_convergence(nx: &NxSubsemigroup, beta: f64, cutoff: u64, tol: f64) -> LawResult {
    let full = zeta_partial(nx, beta, cutoff).map_err(err)?;
    let coarse = zeta_partial(nx, beta, (cutoff / 4).max(1)).map_err(err)?;
    let (Some(df), Some(dc)) = (full.abs_diff(), coarse.abs_diff()) else {
        return Err(format!("β = {beta} is in the divergent regime"));
    };
    if df > tol {
        return Err(format!("|partial − closed| = {df:e} exceeds {tol:e} at cutoff {cutoff}"));
    }
    if df > dc + 1e-12 {
        return Err(format!(
            "ζ distance grew from {dc:e} (cutoff {}) to {df:e} (cutoff {cutoff})",
            coarse.cutoff
        ));
    }
    Ok(())
}

/// The core is hereditary: s·u core forces both s and u core.
pub fn law_core_hereditary(h: &MonoidHandle, s: &MonoidElement, u: &MonoidElement) -> LawResult {
    if h.is_core(&h.multiply(s, u).map_err(err)?) && !(h.is_core(s) && h.is_core(u)) {
        return Err(format!(
            "{}·{} is core but a factor is not",
            h.format_element(s),
            h.format_element(u)
        ));
    }
    Ok(())
}

/// Core absorption: for core a, aS ∩ sS = s·bS with b core — the meet of a
/// core element with any s exists and s's cofactor is again core.
pub fn law_core_absorption(h: &MonoidHandle, a: &MonoidElement, s: &MonoidElement) -> LawResult {
    if !h.is_core(a) {
        return Ok(());
    }
    match h.right_lcm(a, s).map_err(err)? {
        LcmOutcome::Meet { cofactor_right, .. } => {
            if !h.is_core(&cofactor_right) {
                return Err(format!(
                    "cofactor {} of {} against core {} is not core",
                    h.format_element(&cofactor_right),
                    h.format_element(s),
                    h.format_element(a)
                ));
            }
            Ok(())
        }
        LcmOutcome::Orthogonal => {
            Err(format!("core {} is orthogonal to {}", h.format_element(a), h.format_element(s)))
        }
    }
}

/// s ∼ t and t ∼ r imply s ∼ r.
pub fn law_equivalence_transitive(
    h: &MonoidHandle,
    s: &MonoidElement,
    t: &MonoidElement,
    r: &MonoidElement,
) -> LawResult {
    if h.core_equivalent(s, t).map_err(err)?
        && h.core_equivalent(t, r).map_err(err)?
        && !h.core_equivalent(s, r).map_err(err)?
    {
        return Err(format!(
            "∼ fails transitivity on {}, {}, {}",
            h.format_element(s),
            h.format_element(t),
            h.format_element(r)
        ));
    }
    Ok(())
}

/// Equivalent elements meet exactly the same elements: s ∼ t implies that r
/// meets s iff r meets t.
pub fn law_equivalence_same_meets(
    h: &MonoidHandle,
    s: &MonoidElement,
    t: &MonoidElement,
    r: &MonoidElement,
) -> LawResult {
    if h.core_equivalent(s, t).map_err(err)?
        && h.intersects(s, r).map_err(err)? != h.intersects(t, r).map_err(err)?
    {
        return Err(format!(
            "{} ∼ {} but {} meets only one of them",
            h.format_element(s),
            h.format_element(t),
            h.format_element(r)
        ));
    }
    Ok(())
}

/// A product of two noncore elements is never a noncore irreducible.
pub fn law_noncore_product_reducible(
    h: &MonoidHandle,
    s: &MonoidElement,
    t: &MonoidElement,
) -> LawResult {
    if !h.is_core(s) && !h.is_core(t) && h.is_noncore_irreducible(&h.multiply(s, t).map_err(err)?) {
        return Err(format!(
            "{}·{} is flagged irreducible despite two noncore factors",
            h.format_element(s),
            h.format_element(t)
        ));
    }
    Ok(())
}

/// Every noncore element factors into noncore irreducibles: the returned
/// letters are all irreducible, the factorization identity re-multiplies,
/// and irreducible inputs factor as a single letter.
pub fn law_factor_noncore_roundtrip(h: &MonoidHandle, s: &MonoidElement) -> LawResult {
    if h.is_core(s) {
        return Ok(());
    }
    let f = h.factor_noncore(s).map_err(err)?;
    if f.letters.is_empty() {
        return Err(format!("noncore {} factored into zero letters", h.format_element(s)));
    }
    for letter in &f.letters {
        if !h.is_noncore_irreducible(letter) {
            return Err(format!(
                "letter {} in the factorization of {} is not irreducible",
                h.format_element(letter),
                h.format_element(s)
            ));
        }
    }
    if h.is_noncore_irreducible(s) && f.letters.len() != 1 {
        return Err(format!(
            "irreducible {} factored into {} letters",
            h.format_element(s),
            f.letters.len()
        ));
    }
    h.verify_factorization(&f).map_err(err)
}

/// Equivalent folded words use the same number of letters from each
/// coconnected component (and hence have equal length); words whose
/// component multisets differ are never equivalent.
pub fn law_equivalent_words_share_multiset(
    h: &MonoidHandle,
    graph: &CoreGraph,
    a_letters: &[MonoidElement],
    b_letters: &[MonoidElement],
) -> LawResult {
    let a = IrreducibleWord::new(h, graph, a_letters.to_vec()).map_err(err)?;
    let b = IrreducibleWord::new(h, graph, b_letters.to_vec()).map_err(err)?;
    let fold_a = a.fold(h).map_err(err)?;
    let fold_b = b.fold(h).map_err(err)?;
    if h.core_equivalent(&fold_a, &fold_b).map_err(err)?
        && a.component_multiset() != b.component_multiset()
    {
        return Err(format!(
            "{} ∼ {} but the words draw letters {:?} vs {:?} per component",
            h.format_element(&fold_a),
            h.format_element(&fold_b),
            a.component_multiset(),
            b.component_multiset()
        ));
    }
    Ok(())
}

/// Audits a completed grid diagram cell by cell: each square satisfies the
/// recurrence s⁽ˡ⁾·t′ = t⁽ᵏ⁾·s′ by explicit multiplication, and once a
/// t-row (resp. s-column) state turns core it stays core.
pub fn law_grid_square_audit(
    h: &MonoidHandle,
    graph: &CoreGraph,
    s_letters: &[MonoidElement],
    t_letters: &[MonoidElement],
) -> LawResult {
    let s = IrreducibleWord::new(h, graph, s_letters.to_vec()).map_err(err)?;
    let t = IrreducibleWord::new(h, graph, t_letters.to_vec()).map_err(err)?;
    let diagram = word_lcm(h, graph, &s, &t).map_err(err)?;
    let (m, n) = diagram.dimensions();
    let mut verified = 0usize;
    for k in 0..m {
        for l in 0..n {
            let (Some(x), Some(y), Some(t_next), Some(s_next)) = (
                diagram.s_state(k, l),
                diagram.t_state(l, k),
                diagram.t_state(l, k + 1),
                diagram.s_state(k, l + 1),
            ) else {
                continue;
            };
            let left = h.multiply(x, t_next).map_err(err)?;
            let right = h.multiply(y, s_next).map_err(err)?;
            if left != right {
                return Err(format!("square ({k}, {l}) violates the recurrence"));
            }
            verified += 1;
        }
    }
    if diagram.outcome().is_complete() && verified != m * n {
        return Err(format!("complete diagram exposes {verified} of {} squares", m * n));
    }
    for l in 0..n {
        let mut seen_core = false;
        for k in 0..=m {
            let Some(state) = diagram.t_state(l, k) else { break };
            let core = h.is_core(state);
            if seen_core && !core {
                return Err(format!("t-row {l} left the core again at column {k}"));
            }
            seen_core = seen_core || core;
        }
    }
    for k in 0..m {
        let mut seen_core = false;
        for l in 0..=n {
            let Some(state) = diagram.s_state(k, l) else { break };
            let core = h.is_core(state);
            if seen_core && !core {
                return Err(format!("s-column {k} left the core again at row {l}"));
            }
            seen_core = seen_core || core;
        }
    }
    Ok(())
}

/// α_a permutes the stored classes: the induced map on vertex indices is a
/// bijection for every core a.
pub fn law_alpha_bijective(h: &MonoidHandle, graph: &CoreGraph, a: &MonoidElement) -> LawResult {
    if !h.is_core(a) || !graph.exhaustive() {
        return Ok(());
    }
    let mut images = std::collections::BTreeSet::new();
    for v in graph.vertices() {
        let image = crate::core_graph::alpha_act(h, graph, a, v).map_err(err)?;
        match graph.class_index_of(h, &image).map_err(err)? {
            Some(i) => {
                if !images.insert(i) {
                    return Err(format!(
                        "α of {} maps two classes onto vertex {i}",
                        h.format_element(a)
                    ));
                }
            }
            None => {
                return Err(format!(
                    "α of {} maps a stored class outside the vertex set",
                    h.format_element(a)
                ));
            }
        }
    }
    if images.len() != graph.vertices().len() {
        return Err(format!(
            "α of {} reaches {} of {} classes",
            h.format_element(a),
            images.len(),
            graph.vertices().len()
        ));
    }
    Ok(())
}

/// β_a is a graph automorphism: ([s],[t]) is an edge iff ([as],[at]) is.
pub fn law_beta_graph_automorphism(
    h: &MonoidHandle,
    graph: &CoreGraph,
    a: &MonoidElement,
) -> LawResult {
    if !h.is_core(a) || !graph.exhaustive() {
        return Ok(());
    }
    let n = graph.vertices().len();
    let mut map = Vec::with_capacity(n);
    for v in graph.vertices() {
        let image = crate::core_graph::alpha_act(h, graph, a, v).map_err(err)?;
        match graph.class_index_of(h, &image).map_err(err)? {
            Some(i) => map.push(i),
            None => {
                return Err(format!(
                    "α image of a stored class under {} left the vertex set",
                    h.format_element(a)
                ));
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if graph.has_edge(i, j) != graph.has_edge(map[i], map[j]) {
                return Err(format!(
                    "β of {} breaks the edge relation on ({i}, {j})",
                    h.format_element(a)
                ));
            }
        }
    }
    Ok(())
}

/// The β action sends coconnected components onto coconnected components:
/// every core generator induces a well-defined permutation of components.
pub fn law_beta_respects_components(h: &MonoidHandle, graph: &CoreGraph) -> LawResult {
    use crate::core_graph::{beta_component_action, BetaSummary};
    if !graph.exhaustive() {
        return Ok(());
    }
    match beta_component_action(h, graph).map_err(err)? {
        BetaSummary::Inconclusive { reason } => Err(format!("β action inconclusive: {reason}")),
        BetaSummary::Computed { generators, .. } => {
            for g in generators {
                let k = g.component_map.len();
                let distinct: std::collections::BTreeSet<usize> =
                    g.component_map.iter().copied().collect();
                if distinct.len() != k || g.component_map.iter().any(|&c| c >= k) {
                    return Err(format!(
                        "component map of {} is not a permutation: {:?}",
                        h.format_element(&g.generator),
                        g.component_map
                    ));
                }
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_graph::build_core_graph;
    use crate::families::presets;
    use crate::scale::{check_conditions, condition_samples};

    #[test]
    fn smoke_laws_on_the_affine_family() {
        let h = presets::axb();
        let g = build_core_graph(&h, 10).unwrap();
        let samples = condition_samples(&h, &g).unwrap();
        let report = check_conditions(&h, &g, &samples).unwrap();
        let e = |s: &str| h.parse_element(s).unwrap();

        law_associativity(&h, &e("(1,2)"), &e("(0,3)"), &e("(4,5)")).unwrap();
        law_unit_neutral(&h, &e("(7,6)")).unwrap();
        law_left_cancellation(&h, &e("(1,2)"), &e("(0,3)"), &e("(1,3)")).unwrap();
        law_lcm_symmetry(&h, &e("(0,2)"), &e("(1,3)")).unwrap();
        law_lcm_common_multiple(&h, &e("(0,2)"), &e("(1,3)")).unwrap();
        law_lcm_minimality_bounded(&h, &e("(0,2)"), &e("(1,3)"), 4).unwrap();
        law_equivalence_reflexive(&h, &e("(3,4)")).unwrap();
        law_equivalence_symmetric(&h, &e("(0,2)"), &e("(2,2)")).unwrap();
        law_equivalence_left_compatible(&h, &e("(1,3)"), &e("(0,2)"), &e("(2,2)")).unwrap();
        law_core_closure(&h, &e("(3,1)"), &e("(5,1)")).unwrap();
        law_core_meets_all(&h, &e("(3,1)"), &e("(4,6)")).unwrap();
        law_graph_edge_iff_meet(&h, &g, 0, 2).unwrap();
        law_graph_vertices_inequivalent(&h, &g, 0, 1).unwrap();
        law_grid_agrees_with_kernel(&h, &g, &[e("(0,2)"), e("(0,2)")], &[e("(1,3)")]).unwrap();
        law_permutation_rewriting(&h, &g, &[e("(0,2)"), e("(0,3)")], &[1, 0]).unwrap();
        law_scale_multiplicative(&h, &g, &report, &e("(1,2)"), &e("(0,15)")).unwrap();
        law_scale_core_invariance(&h, &g, &report, &e("(9,1)"), &e("(1,6)")).unwrap();
        law_scale_dichotomy(&h, &g, &report, &e("(0,2)"), &e("(1,2)")).unwrap();
        law_scale_closed_form(&h, &g, &report, &e("(7,12)"), 12).unwrap();
        law_transversal_fibre(&h, &g, &report, 6).unwrap();
        law_fibre_classification(&h, &g, &report, 4, &e("(3,4)")).unwrap();
        law_irreducibility_transfer(&h, &g, &report, &e("(1,3)")).unwrap();
        law_irreducibility_transfer(&h, &g, &report, &e("(1,4)")).unwrap();

        let nx = NxSubsemigroup::new(&[2, 3]).unwrap();
        law_factorization_matches_brute(12, &nx).unwrap();
        law_factorization_matches_brute(7, &nx).unwrap();
        law_zeta_convergence(&nx, 3.0, 1_000_000, 1e-6).unwrap();
    }
}
