//! Existence analysis and construction of the generalized scale.
//!
//! A generalized scale is a nontrivial homomorphism N: S → ℕ^× whose fibre
//! over n splits into exactly n equivalence classes and which satisfies a
//! meet/orthogonality dichotomy. It exists precisely when four conditions
//! on the meet graph of noncore irreducible classes hold:
//!
//!   (i)   the coconnected component cardinalities freely generate a
//!         nontrivial submonoid of ℕ^×,
//!   (ii)  each coconnected component is edge-free,
//!   (iii) every noncore element factors (up to core adjusters) into
//!         noncore irreducibles, and
//!   (iv)  letters of distinct components always meet, with cofactors that
//!         are again letters of the same two components.
//!
//! When the conditions hold, N sends a letter of component i to that
//! component's cardinality |V_i| and extends multiplicatively. This module
//! decides the conditions, evaluates N, factors inside the free value
//! subsemigroup 𝒩 ⊆ ℕ^×, builds orthogonal transversals of the fibres
//! N⁻¹(n), sums the associated ζ-series, and re-verifies the scale axioms
//! on samples.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::core_graph::{ComponentCard, CoreGraph};
use crate::kernel::{KResult, KernelError, LcmOutcome, MonoidElement, MonoidHandle};

/// Default bound on the brute-force product-collision search used by the
/// freeness check.
pub const DEFAULT_COLLISION_BOUND: u64 = 1_000_000;

/// Outcome of one existence condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    Inconclusive(String),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive(_))
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(r) | Verdict::Inconclusive(r) => Some(r),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Verdict::Pass => json!({"verdict": "pass"}),
            Verdict::Fail(r) => json!({"verdict": "fail", "reason": r}),
            Verdict::Inconclusive(r) => json!({"verdict": "inconclusive", "reason": r}),
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail(r) => write!(f, "fail: {r}"),
            Verdict::Inconclusive(r) => write!(f, "inconclusive: {r}"),
        }
    }
}

/// Existence report: one verdict per condition plus the per-component
/// scale values when condition (i) passes.
#[derive(Clone, Debug)]
pub struct ScaleReport {
    pub cond_i: Verdict,
    pub cond_ii: Verdict,
    pub cond_iii: Verdict,
    pub cond_iv: Verdict,
    /// Component index → |V_i|; populated only when cond_i passes.
    pub scale_on_components: BTreeMap<usize, u64>,
    /// Number of samples the factorability check covered.
    pub cond_iii_samples: usize,
    /// True exactly when all four conditions pass.
    pub exists: bool,
}

impl ScaleReport {
    /// First failing condition as (roman label, reason), if any.
    pub fn failing_condition(&self) -> Option<(&'static str, &str)> {
        for (label, v) in [
            ("i", &self.cond_i),
            ("ii", &self.cond_ii),
            ("iii", &self.cond_iii),
            ("iv", &self.cond_iv),
        ] {
            if let Verdict::Fail(reason) = v {
                return Some((label, reason));
            }
        }
        None
    }

    /// True when nothing failed but at least one verdict is undetermined.
    pub fn is_inconclusive(&self) -> bool {
        let vs = [&self.cond_i, &self.cond_ii, &self.cond_iii, &self.cond_iv];
        vs.iter().all(|v| !v.is_fail()) && vs.iter().any(|v| v.is_inconclusive())
    }

    /// JSON rendering with stable field names.
    pub fn to_json(&self) -> serde_json::Value {
        let scale: BTreeMap<String, u64> =
            self.scale_on_components.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        json!({
            "cond_i": self.cond_i.to_json(),
            "cond_ii": self.cond_ii.to_json(),
            "cond_iii": self.cond_iii.to_json(),
            "cond_iv": self.cond_iv.to_json(),
            "cond_iii_samples": self.cond_iii_samples,
            "scale_on_components": scale,
            "exists": self.exists,
        })
    }
}

/// A finitely generated LCM subsemigroup of ℕ^× (multiplicative monoid of
/// positive integers), stored by its distinct generators ≥ 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NxSubsemigroup {
    generators: Vec<u64>,
}

impl NxSubsemigroup {
    pub fn new(generators: &[u64]) -> KResult<Self> {
        let mut sorted: Vec<u64> = generators.to_vec();
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(KernelError::Contract(format!("duplicate generator {}", pair[0])));
            }
        }
        if let Some(&g) = sorted.iter().find(|&&g| g < 2) {
            return Err(KernelError::Contract(format!("generator {g} is below 2")));
        }
        Ok(NxSubsemigroup { generators: sorted })
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Generators that are not expressible as a product of two or more
    /// generators; these freely generate when the freeness check passes.
    pub fn irreducible_generators(&self) -> Vec<u64> {
        self.generators
            .iter()
            .copied()
            .filter(|&g| factorizations(g, &self.generators, 2, 2).is_empty())
            .collect()
    }

    /// True when n is a (possibly empty) product of generators.
    pub fn contains(&self, n: u64) -> bool {
        if n == 1 {
            return true;
        }
        !factorizations(n, &self.generators, 1, 1).is_empty()
    }

    /// All members ≤ cutoff, ascending, including 1.
    pub fn enumerate(&self, cutoff: u64) -> Vec<u64> {
        let mut seen: BTreeSet<u64> = BTreeSet::new();
        if cutoff >= 1 {
            seen.insert(1);
        }
        let mut stack: Vec<u64> = vec![1];
        while let Some(v) = stack.pop() {
            for &g in &self.generators {
                match v.checked_mul(g) {
                    Some(next) if next <= cutoff && seen.insert(next) => stack.push(next),
                    _ => {}
                }
            }
        }
        seen.into_iter().collect()
    }
}

/// All multisets (ascending) of elements of `pool` whose product is n,
/// using at least `min_len` factors; stops after `limit` hits.
fn factorizations(n: u64, pool: &[u64], min_len: usize, limit: usize) -> Vec<Vec<u64>> {
    fn rec(
        n: u64,
        pool: &[u64],
        start: usize,
        min_len: usize,
        limit: usize,
        path: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if out.len() >= limit {
            return;
        }
        if n == 1 {
            if path.len() >= min_len {
                out.push(path.clone());
            }
            return;
        }
        for i in start..pool.len() {
            let g = pool[i];
            if g > n {
                break;
            }
            if n % g == 0 {
                path.push(g);
                rec(n / g, pool, i, min_len, limit, path, out);
                path.pop();
                if out.len() >= limit {
                    return;
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    rec(n, pool, 0, min_len, limit, &mut path, &mut out);
    out
}

fn prime_power_base(mut n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let mut p = 0;
    for cand in 2.. {
        if cand * cand > n {
            p = n;
            break;
        }
        if n % cand == 0 {
            p = cand;
            break;
        }
    }
    while n % p == 0 {
        n /= p;
    }
    (n == 1).then_some(p)
}

fn join_product(factors: &[u64]) -> String {
    factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("·")
}

/// Condition (i): the cardinalities must be finite, ≥ 2, pairwise distinct,
/// at least one, and must generate freely — certified exactly for prime or
/// prime-power cardinalities with distinct bases, otherwise by a product
/// collision search exhausted up to `bound`.
pub fn check_freeness(cards: &[ComponentCard], bound: u64) -> Verdict {
    if cards.is_empty() {
        return Verdict::Fail(
            "no noncore irreducible classes: the generated submonoid of ℕ^× is trivial".to_string(),
        );
    }
    let mut finite: Vec<u64> = Vec::with_capacity(cards.len());
    for (i, c) in cards.iter().enumerate() {
        match c {
            ComponentCard::Infinite => {
                return Verdict::Fail(format!("component {i} has infinitely many classes"));
            }
            ComponentCard::Finite(n) if *n < 2 => {
                return Verdict::Fail(format!("component {i} has cardinality {n} < 2"));
            }
            ComponentCard::Finite(n) => finite.push(*n),
        }
    }
    let mut sorted = finite.clone();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Verdict::Fail(format!("duplicate component cardinality {}", pair[0]));
        }
    }
    // Exact fast path: prime powers with pairwise distinct bases factor
    // uniquely, hence generate freely.
    let bases: Vec<Option<u64>> = sorted.iter().map(|&n| prime_power_base(n)).collect();
    if bases.iter().all(|b| b.is_some()) {
        let mut base_set: Vec<u64> = bases.iter().map(|b| b.unwrap()).collect();
        base_set.sort_unstable();
        base_set.dedup();
        if base_set.len() == sorted.len() {
            return Verdict::Pass;
        }
    }
    // Generic path: search for two distinct generator multisets with equal
    // product, up to the bound.
    if let Some((value, first, second)) = find_collision(&sorted, bound) {
        return Verdict::Fail(format!(
            "{value} = {} = {}",
            join_product(&first),
            join_product(&second)
        ));
    }
    Verdict::Pass
}

fn find_collision(gens: &[u64], bound: u64) -> Option<(u64, Vec<u64>, Vec<u64>)> {
    // Exhaustive search for the *smallest* product value reachable by two
    // distinct generator multisets.  Paths are explored with nondecreasing
    // generator indices, so the first factorization recorded for any value is
    // the lexicographically least one.  Branches whose running product already
    // exceeds the best collision found so far cannot improve it and are
    // pruned.
    fn rec(
        gens: &[u64],
        bound: u64,
        start: usize,
        prod: u64,
        path: &mut Vec<u64>,
        seen: &mut BTreeMap<u64, Vec<u64>>,
        best: &mut Option<(u64, Vec<u64>, Vec<u64>)>,
    ) {
        for i in start..gens.len() {
            let next = match prod.checked_mul(gens[i]) {
                Some(v) if v <= bound => v,
                _ => break,
            };
            if let Some((b, _, _)) = best {
                if next >= *b {
                    continue;
                }
            }
            path.push(gens[i]);
            match seen.get(&next) {
                Some(prev) if prev != path => {
                    *best = Some((next, prev.clone(), path.clone()));
                }
                Some(_) => {}
                None => {
                    seen.insert(next, path.clone());
                }
            }
            rec(gens, bound, i, next, path, seen, best);
            path.pop();
        }
    }
    let mut seen = BTreeMap::new();
    let mut path = Vec::new();
    let mut best = None;
    rec(gens, bound, 0, 1, &mut path, &mut seen, &mut best);
    best
}

/// Default factorability sample set: all products of at most three stored
/// class representatives, plus family-provided spot elements.
pub fn condition_samples(handle: &MonoidHandle, graph: &CoreGraph) -> KResult<Vec<MonoidElement>> {
    let verts = graph.vertices();
    let mut seen: BTreeSet<MonoidElement> = BTreeSet::new();
    let mut out: Vec<MonoidElement> = Vec::new();
    let mut push = |e: MonoidElement| {
        if seen.insert(e.clone()) {
            out.push(e);
        }
    };
    let mut pairs: Vec<MonoidElement> = Vec::new();
    for v in verts {
        push(v.clone());
    }
    for v in verts {
        for w in verts {
            let vw = handle.multiply(v, w)?;
            pairs.push(vw.clone());
            push(vw);
        }
    }
    for vw in &pairs {
        for u in verts {
            push(handle.multiply(vw, u)?);
        }
    }
    for s in handle.spot_samples() {
        push(s);
    }
    Ok(out)
}

/// Decides the four existence conditions over an enumerated meet graph and
/// a factorability sample set. A truncated enumeration taints every
/// verdict to inconclusive; failures carry witnesses.
pub fn check_conditions(
    handle: &MonoidHandle,
    graph: &CoreGraph,
    samples: &[MonoidElement],
) -> KResult<ScaleReport> {
    if !graph.exhaustive() {
        let reason =
            "class enumeration is truncated; condition verdicts are undetermined".to_string();
        return Ok(ScaleReport {
            cond_i: Verdict::Inconclusive(reason.clone()),
            cond_ii: Verdict::Inconclusive(reason.clone()),
            cond_iii: Verdict::Inconclusive(reason.clone()),
            cond_iv: Verdict::Inconclusive(reason),
            scale_on_components: BTreeMap::new(),
            cond_iii_samples: 0,
            exists: false,
        });
    }

    // (i) Cardinalities freely generate a nontrivial submonoid.
    let cond_i = check_freeness(graph.component_cards(), DEFAULT_COLLISION_BOUND);
    let mut scale_on_components = BTreeMap::new();
    if cond_i.is_pass() {
        for (i, card) in graph.component_cards().iter().enumerate() {
            if let ComponentCard::Finite(n) = card {
                scale_on_components.insert(i, *n);
            }
        }
    }

    // (ii) Components are edge-free.
    let mut internal_edges: Vec<String> = Vec::new();
    for &(a, b) in graph.edges() {
        if graph.component_index_of_vertex(a) == graph.component_index_of_vertex(b) {
            internal_edges.push(format!(
                "{} — {}",
                handle.format_element(&graph.vertices()[a]),
                handle.format_element(&graph.vertices()[b])
            ));
        }
    }
    let cond_ii = if internal_edges.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail(format!(
            "meet-graph edges inside coconnected components: {}",
            internal_edges.join("; ")
        ))
    };

    // (iii) Noncore factorability on the samples.
    let mut cond_iii = Verdict::Pass;
    let mut cond_iii_samples = 0usize;
    for s in samples {
        if handle.is_core(s) {
            continue;
        }
        cond_iii_samples += 1;
        let witness = match handle.factor_noncore(s) {
            Ok(w) => w,
            Err(e) => {
                cond_iii = Verdict::Fail(format!(
                    "sample {} admits no noncore-irreducible factorization: {e}",
                    handle.format_element(s)
                ));
                break;
            }
        };
        if let Err(e) = handle.verify_factorization(&witness) {
            cond_iii = Verdict::Fail(format!(
                "factorization witness for sample {} is invalid: {e}",
                handle.format_element(s)
            ));
            break;
        }
    }

    // (iv) Balanced factorization across every cross-component class pair.
    let mut cond_iv = Verdict::Pass;
    'outer: for (ci, comp_a) in graph.components().iter().enumerate() {
        for comp_b in graph.components().iter().skip(ci + 1) {
            for &va in comp_a {
                for &vb in comp_b {
                    let s = &graph.vertices()[va];
                    let t = &graph.vertices()[vb];
                    let verdict = balanced_pair(handle, graph, s, t);
                    if let Err(reason) = verdict {
                        cond_iv = Verdict::Fail(reason);
                        break 'outer;
                    }
                }
            }
        }
    }

    let exists = cond_i.is_pass() && cond_ii.is_pass() && cond_iii.is_pass() && cond_iv.is_pass();
    Ok(ScaleReport {
        cond_i,
        cond_ii,
        cond_iii,
        cond_iv,
        scale_on_components,
        cond_iii_samples,
        exists,
    })
}

/// Checks s·t′ = t·s′ with t′, s′ noncore irreducible letters of the
/// components of t and s respectively.
fn balanced_pair(
    handle: &MonoidHandle,
    graph: &CoreGraph,
    s: &MonoidElement,
    t: &MonoidElement,
) -> Result<(), String> {
    let label = |e: &MonoidElement| handle.format_element(e);
    match handle.right_lcm(s, t) {
        Err(e) => Err(format!("right LCM of {} and {} failed: {e}", label(s), label(t))),
        Ok(LcmOutcome::Orthogonal) => {
            Err(format!("cross-component classes {} and {} are orthogonal", label(s), label(t)))
        }
        Ok(LcmOutcome::Meet { cofactor_left, cofactor_right, .. }) => {
            let comp = |e: &MonoidElement| graph.component_of(handle, e);
            if !handle.is_noncore_irreducible(&cofactor_left)
                || !handle.is_noncore_irreducible(&cofactor_right)
            {
                return Err(format!(
                    "cofactors of {} ⋒ {} are not noncore irreducible",
                    label(s),
                    label(t)
                ));
            }
            let ok = (|| -> KResult<bool> {
                Ok(comp(&cofactor_left)? == comp(t)? && comp(&cofactor_right)? == comp(s)?)
            })();
            match ok {
                Ok(true) => Ok(()),
                Ok(false) => Err(format!(
                    "cofactors of {} ⋒ {} change coconnected components",
                    label(s),
                    label(t)
                )),
                Err(e) => Err(format!(
                    "cofactor classification for {} ⋒ {} failed: {e}",
                    label(s),
                    label(t)
                )),
            }
        }
    }
}

/// Evaluates the scale: 1 on core elements, the product of component
/// cardinalities over the letters of a factorization otherwise.
pub fn scale_value(
    handle: &MonoidHandle,
    graph: &CoreGraph,
    report: &ScaleReport,
    s: &MonoidElement,
) -> KResult<u64> {
    if !report.exists {
        return Err(KernelError::Contract(
            "scale_value requires an existing scale (report.exists = false)".to_string(),
        ));
    }
    if handle.is_core(s) {
        return Ok(1);
    }
    let witness = handle.factor_noncore(s).map_err(|e| {
        KernelError::Contract(format!(
            "internal inconsistency: {} is not factorable although condition (iii) passed: {e}",
            handle.format_element(s)
        ))
    })?;
    handle.verify_factorization(&witness)?;
    let mut value: u64 = 1;
    for letter in &witness.letters {
        let comp = graph.component_of(handle, letter)?;
        let card = report.scale_on_components.get(&comp).ok_or_else(|| {
            KernelError::Contract(format!("component {comp} carries no scale value"))
        })?;
        value = value
            .checked_mul(*card)
            .ok_or_else(|| KernelError::Overflow("scale value".to_string()))?;
    }
    Ok(value)
}

/// The unique factorization of n into irreducible generators of a free
/// subsemigroup, ascending. Errors when n is not a member or when the
/// search finds two distinct factorizations (not free).
pub fn factor_in_nx(n: u64, nx: &NxSubsemigroup) -> KResult<Vec<u64>> {
    if n == 0 {
        return Err(KernelError::Contract("0 is not an element of ℕ^×".to_string()));
    }
    if n == 1 {
        return Ok(Vec::new());
    }
    let irr = nx.irreducible_generators();
    let mut hits = factorizations(n, &irr, 1, 2);
    match hits.len() {
        0 => Err(KernelError::NotFactorable(format!(
            "{n} is not a product of the generators {:?}",
            nx.generators()
        ))),
        1 => Ok(hits.pop().unwrap()),
        _ => Err(KernelError::Contract(format!(
            "subsemigroup is not free: {n} = {} = {}",
            join_product(&hits[0]),
            join_product(&hits[1])
        ))),
    }
}

/// Builds the n mutually orthogonal representatives of N⁻¹(n)/∼ as
/// products of one class representative per letter of the factorization
/// of n; orthogonality and membership are re-verified.
pub fn transversal(
    handle: &MonoidHandle,
    graph: &CoreGraph,
    report: &ScaleReport,
    n: u64,
) -> KResult<Vec<MonoidElement>> {
    if !report.exists {
        return Err(KernelError::Contract(
            "transversal requires an existing scale (report.exists = false)".to_string(),
        ));
    }
    let gens: Vec<u64> = report.scale_on_components.values().copied().collect();
    let nx = NxSubsemigroup::new(&gens)?;
    let factors = factor_in_nx(n, &nx).map_err(|_| {
        KernelError::NotFactorable(format!("{n} is not a scale value of this family"))
    })?;
    let card_to_component: BTreeMap<u64, usize> =
        report.scale_on_components.iter().map(|(&comp, &card)| (card, comp)).collect();

    let mut members: Vec<MonoidElement> = vec![handle.unit()];
    for g in factors {
        let comp = card_to_component[&g];
        let reps = &graph.components()[comp];
        let mut next = Vec::with_capacity(members.len() * reps.len());
        for m in &members {
            for &vi in reps {
                next.push(handle.multiply(m, &graph.vertices()[vi])?);
            }
        }
        members = next;
    }

    if members.len() as u64 != n {
        return Err(KernelError::Contract(format!(
            "internal inconsistency: transversal of {n} has {} members",
            members.len()
        )));
    }
    for (i, a) in members.iter().enumerate() {
        if scale_value(handle, graph, report, a)? != n {
            return Err(KernelError::Contract(format!(
                "internal inconsistency: transversal member {} has the wrong scale",
                handle.format_element(a)
            )));
        }
        for b in members.iter().skip(i + 1) {
            if handle.intersects(a, b)? {
                return Err(KernelError::Contract(format!(
                    "internal inconsistency: transversal members {} and {} meet",
                    handle.format_element(a),
                    handle.format_element(b)
                )));
            }
        }
    }
    Ok(members)
}

/// One evaluation of the ζ-series ζ(β) = Σ_{n ∈ 𝒩} n^{1−β}.
#[derive(Clone, Debug)]
pub struct ZetaPoint {
    pub beta: f64,
    pub cutoff: u64,
    /// Σ n^{1−β} over members n ≤ cutoff (the n = 1 term contributes 1).
    pub partial_sum: f64,
    /// Euler product Π_g (1−g^{1−β})⁻¹ over the irreducible generators;
    /// `None` in the divergent regime.
    pub euler_closed_form: Option<f64>,
    /// True when the largest generator g has g^{1−β} ≥ 1 (β ≤ 1), where
    /// the series has no finite value.
    pub divergent: bool,
}

impl ZetaPoint {
    pub fn abs_diff(&self) -> Option<f64> {
        self.euler_closed_form.map(|c| (self.partial_sum - c).abs())
    }
}

/// Partial ζ-sum over the members ≤ cutoff plus the Euler closed form for
/// cross-checking; the divergent regime (β ≤ 1) is flagged, not summed
/// around.
pub fn zeta_partial(nx: &NxSubsemigroup, beta: f64, cutoff: u64) -> KResult<ZetaPoint> {
    if cutoff < 1 {
        return Err(KernelError::Contract("ζ cutoff must be ≥ 1".to_string()));
    }
    let partial_sum: f64 = nx.enumerate(cutoff).iter().map(|&v| (v as f64).powf(1.0 - beta)).sum();
    let irr = nx.irreducible_generators();
    let divergent = irr.iter().max().map(|&g| (g as f64).powf(1.0 - beta) >= 1.0).unwrap_or(false);
    let euler_closed_form = if divergent {
        None
    } else {
        Some(irr.iter().map(|&g| 1.0 / (1.0 - (g as f64).powf(1.0 - beta))).product())
    };
    Ok(ZetaPoint { beta, cutoff, partial_sum, euler_closed_form, divergent })
}

/// One verified axiom with its coverage and any counterexamples.
#[derive(Clone, Debug)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Result of re-verifying the defining scale axioms on samples.
#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }
}

/// Verifies, on the given samples: (a) multiplicativity of N; (b) the
/// equal-scale dichotomy (equivalent or orthogonal); (c) every sample
/// meets some member of each small fibre transversal; (d) noncore
/// irreducibles with distinct scale values always meet; (e) the scale of
/// a right LCM generates the intersection of the value ideals.
pub fn verify_scale_axioms(
    handle: &MonoidHandle,
    graph: &CoreGraph,
    report: &ScaleReport,
    samples: &[MonoidElement],
) -> KResult<AxiomReport> {
    if !report.exists {
        return Err(KernelError::Contract(
            "verify_scale_axioms requires an existing scale".to_string(),
        ));
    }
    let gens: Vec<u64> = report.scale_on_components.values().copied().collect();
    let nx = NxSubsemigroup::new(&gens)?;
    let value = |s: &MonoidElement| scale_value(handle, graph, report, s);
    let label = |e: &MonoidElement| handle.format_element(e);

    const MAX_PAIRS: usize = 4000;
    let mut pairs: Vec<(&MonoidElement, &MonoidElement)> = Vec::new();
    'fill: for a in samples {
        for b in samples {
            if pairs.len() >= MAX_PAIRS {
                break 'fill;
            }
            pairs.push((a, b));
        }
    }

    // (a) N(st) = N(s)·N(t).
    let mut multiplicativity =
        AxiomCheck { name: "multiplicativity", cases: 0, failures: Vec::new() };
    for (a, b) in &pairs {
        multiplicativity.cases += 1;
        let prod = handle.multiply(a, b)?;
        let expected = value(a)?
            .checked_mul(value(b)?)
            .ok_or_else(|| KernelError::Overflow("scale product".to_string()))?;
        let got = value(&prod)?;
        if got != expected {
            multiplicativity.failures.push(format!(
                "N({}·{}) = {got} ≠ {expected}",
                label(a),
                label(b)
            ));
        }
    }

    // (b) N_s = N_t forces s ∼ t or s ⊥ t.
    let mut dichotomy =
        AxiomCheck { name: "equal-scale dichotomy", cases: 0, failures: Vec::new() };
    for (a, b) in &pairs {
        if value(a)? != value(b)? {
            continue;
        }
        dichotomy.cases += 1;
        let equivalent = handle.core_equivalent(a, b)?;
        let meets = handle.intersects(a, b)?;
        if meets && !equivalent {
            dichotomy.failures.push(format!(
                "{} and {} share a scale value but meet without being equivalent",
                label(a),
                label(b)
            ));
        }
    }

    // (c) Every sample meets a member of each small fibre.
    const MEET_VALUE_CAP: u64 = 36;
    let mut meeting = AxiomCheck { name: "fibre meeting", cases: 0, failures: Vec::new() };
    let small_values = nx.enumerate(MEET_VALUE_CAP);
    let fibres: Vec<(u64, Vec<MonoidElement>)> = small_values
        .iter()
        .map(|&n| Ok((n, transversal(handle, graph, report, n)?)))
        .collect::<KResult<_>>()?;
    for s in samples {
        for (n, members) in &fibres {
            meeting.cases += 1;
            let mut met = false;
            for t in members {
                if handle.intersects(s, t)? {
                    met = true;
                    break;
                }
            }
            if !met {
                meeting
                    .failures
                    .push(format!("{} meets no member of the scale-{n} transversal", label(s)));
            }
        }
    }

    // (d) Noncore irreducibles of distinct scale values meet.
    let mut distinct_irreducibles =
        AxiomCheck { name: "distinct irreducible values meet", cases: 0, failures: Vec::new() };
    let irreducible_samples: Vec<&MonoidElement> =
        samples.iter().filter(|s| handle.is_noncore_irreducible(s)).collect();
    for (i, a) in irreducible_samples.iter().enumerate() {
        for b in irreducible_samples.iter().skip(i + 1) {
            if value(a)? == value(b)? {
                continue;
            }
            distinct_irreducibles.cases += 1;
            if !handle.intersects(a, b)? {
                distinct_irreducibles.failures.push(format!(
                    "{} and {} have distinct irreducible scale values yet are orthogonal",
                    label(a),
                    label(b)
                ));
            }
        }
    }

    // (e) N_{s∨t} generates N_s𝒩 ∩ N_t𝒩 (coordinatewise max of the
    // exponent vectors in the free value semigroup).
    let mut lcm_values = AxiomCheck {
        name: "lcm scale generates the value-ideal intersection",
        cases: 0,
        failures: Vec::new(),
    };
    for (a, b) in &pairs {
        if let LcmOutcome::Meet { lcm, .. } = handle.right_lcm(a, b)? {
            lcm_values.cases += 1;
            let expected = value_ideal_generator(value(a)?, value(b)?, &nx)?;
            let got = value(&lcm)?;
            if got != expected {
                lcm_values.failures.push(format!(
                    "N({} ∨ {}) = {got} but the value ideals intersect at {expected}",
                    label(a),
                    label(b)
                ));
            }
        }
    }

    Ok(AxiomReport {
        checks: vec![multiplicativity, dichotomy, meeting, distinct_irreducibles, lcm_values],
    })
}

/// Generator of N_s𝒩 ∩ N_t𝒩 in a free subsemigroup: per irreducible
/// generator, the larger of the two exponents.
fn value_ideal_generator(ns: u64, nt: u64, nx: &NxSubsemigroup) -> KResult<u64> {
    let fs = factor_in_nx(ns, nx)?;
    let ft = factor_in_nx(nt, nx)?;
    let mut exps: BTreeMap<u64, (u32, u32)> = BTreeMap::new();
    for g in fs {
        exps.entry(g).or_default().0 += 1;
    }
    for g in ft {
        exps.entry(g).or_default().1 += 1;
    }
    let mut out: u64 = 1;
    for (g, (a, b)) in exps {
        for _ in 0..a.max(b) {
            out = out
                .checked_mul(g)
                .ok_or_else(|| KernelError::Overflow("value ideal generator".to_string()))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_graph::build_core_graph;
    use crate::families::presets;

    fn fin(n: u64) -> ComponentCard {
        ComponentCard::Finite(n)
    }

    fn analyzed(handle: &MonoidHandle, cap: usize) -> (CoreGraph, ScaleReport) {
        let graph = build_core_graph(handle, cap).unwrap();
        let samples = condition_samples(handle, &graph).unwrap();
        let report = check_conditions(handle, &graph, &samples).unwrap();
        (graph, report)
    }

    #[test]
    fn freeness_verdicts_match_the_arithmetic() {
        assert!(check_freeness(&[fin(2), fin(3)], 10_000).is_pass());
        match check_freeness(&[fin(4), fin(6), fin(9)], 10_000) {
            Verdict::Fail(reason) => assert_eq!(reason, "36 = 4·9 = 6·6"),
            other => panic!("expected failure, got {other:?}"),
        }
        match check_freeness(&[fin(2), fin(2)], 10_000) {
            Verdict::Fail(reason) => {
                assert_eq!(reason, "duplicate component cardinality 2")
            }
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(check_freeness(&[], 100).is_fail());
        assert!(check_freeness(&[fin(1)], 100).is_fail());
        assert!(check_freeness(&[ComponentCard::Infinite], 100).is_fail());
        // Non-prime-powers that still generate freely pass via the search.
        assert!(check_freeness(&[fin(6), fin(10), fin(15)], 1_000_000).is_pass());
    }

    #[test]
    fn affine_family_satisfies_all_conditions() {
        let h = presets::axb();
        let (_g, report) = analyzed(&h, 10);
        assert!(report.exists, "{:?}", report);
        let cards: Vec<u64> = report.scale_on_components.values().copied().collect();
        assert_eq!(cards, vec![2, 3, 5]);
        assert!(report.cond_iii_samples > 0);
        assert!(report.failing_condition().is_none());
    }

    #[test]
    fn duplicate_cardinalities_fail_the_freeness_condition() {
        let h = presets::poly_f2t();
        let (_g, report) = analyzed(&h, 8);
        assert!(!report.exists);
        let (label, reason) = report.failing_condition().unwrap();
        assert_eq!(label, "i");
        assert!(reason.contains("duplicate component cardinality 2"), "{reason}");
    }

    #[test]
    fn coconnected_component_with_edges_fails_exactly_condition_ii() {
        let h = presets::graph_product(&presets::gone_mad_section()).unwrap();
        let (g, report) = analyzed(&h, 8);
        assert!(report.cond_i.is_pass(), "{:?}", report.cond_i);
        assert!(report.cond_ii.is_fail());
        assert!(report.cond_iii.is_pass(), "{:?}", report.cond_iii);
        assert!(report.cond_iv.is_pass(), "{:?}", report.cond_iv);
        let reason = report.cond_ii.reason().unwrap();
        // Both offending edges are listed with their endpoint labels.
        assert_eq!(g.edges().len(), 2);
        for &(a, b) in g.edges() {
            assert!(reason.contains(&h.format_element(&g.vertices()[a])), "{reason}");
            assert!(reason.contains(&h.format_element(&g.vertices()[b])), "{reason}");
        }
    }

    #[test]
    fn truncated_enumeration_is_inconclusive() {
        let h = presets::axb();
        let g = build_core_graph(&h, 7).unwrap();
        let report = check_conditions(&h, &g, &[]).unwrap();
        assert!(!report.exists);
        assert!(report.is_inconclusive());
        assert!(report.cond_i.is_inconclusive());
        assert!(report.cond_iv.is_inconclusive());
        assert!(report.scale_on_components.is_empty());
    }

    #[test]
    fn scale_values_follow_the_closed_forms() {
        let h = presets::axb();
        let (g, report) = analyzed(&h, 10);
        let e = |s: &str| h.parse_element(s).unwrap();
        assert_eq!(scale_value(&h, &g, &report, &e("(7,12)")).unwrap(), 12);
        assert_eq!(scale_value(&h, &g, &report, &e("(5,1)")).unwrap(), 1);
        assert_eq!(scale_value(&h, &g, &report, &e("(0,2)")).unwrap(), 2);

        let h = presets::self_similar_binary().unwrap();
        let (g, report) = analyzed(&h, 4);
        let s = h.parse_element("(010,e)").unwrap();
        assert_eq!(scale_value(&h, &g, &report, &s).unwrap(), 8);

        let h = presets::freely_doubled().unwrap();
        let (g, report) = analyzed(&h, 6);
        let two_letters = h.parse_element("((0),p q)").unwrap();
        assert_eq!(scale_value(&h, &g, &report, &two_letters).unwrap(), 16);
    }

    #[test]
    fn nx_factorization_is_unique_or_fails_loudly() {
        let nx = NxSubsemigroup::new(&[2, 3]).unwrap();
        assert_eq!(factor_in_nx(12, &nx).unwrap(), vec![2, 2, 3]);
        assert_eq!(factor_in_nx(1, &nx).unwrap(), Vec::<u64>::new());
        assert!(matches!(factor_in_nx(7, &nx), Err(KernelError::NotFactorable(_))));

        let nx = NxSubsemigroup::new(&[6, 10, 15]).unwrap();
        assert_eq!(factor_in_nx(900, &nx).unwrap(), vec![6, 10, 15]);

        let nx = NxSubsemigroup::new(&[2, 3, 6]).unwrap();
        assert_eq!(nx.irreducible_generators(), vec![2, 3]);
        assert_eq!(factor_in_nx(6, &nx).unwrap(), vec![2, 3]);

        let nx = NxSubsemigroup::new(&[4, 6, 9]).unwrap();
        let err = factor_in_nx(36, &nx).unwrap_err();
        assert!(err.to_string().contains("not free"), "{err}");

        assert!(NxSubsemigroup::new(&[2, 2]).is_err());
        assert!(NxSubsemigroup::new(&[1]).is_err());
    }

    #[test]
    fn transversals_are_orthogonal_fibre_representatives() {
        let h = presets::axb();
        let (g, report) = analyzed(&h, 10);
        let six = transversal(&h, &g, &report, 6).unwrap();
        assert_eq!(six.len(), 6);
        // Residues modulo 6 are pairwise distinct and cover 0..6.
        let mut residues: Vec<String> = six.iter().map(|e| h.format_element(e)).collect();
        residues.sort();
        assert_eq!(residues, vec!["(0,6)", "(1,6)", "(2,6)", "(3,6)", "(4,6)", "(5,6)"]);

        let one = transversal(&h, &g, &report, 1).unwrap();
        assert_eq!(one, vec![h.unit()]);

        assert!(transversal(&h, &g, &report, 7).is_err());

        let h = presets::self_similar_binary().unwrap();
        let (g, report) = analyzed(&h, 4);
        let four = transversal(&h, &g, &report, 4).unwrap();
        let mut words: Vec<String> = four.iter().map(|e| h.format_element(e)).collect();
        words.sort();
        assert_eq!(words, vec!["(00,e)", "(01,e)", "(10,e)", "(11,e)"]);
    }

    #[test]
    fn zeta_partials_approach_the_euler_product() {
        let nx = NxSubsemigroup::new(&[2]).unwrap();
        let z = zeta_partial(&nx, 2.0, 1 << 20).unwrap();
        assert!(!z.divergent);
        assert!((z.euler_closed_form.unwrap() - 2.0).abs() < 1e-12);
        assert!(z.abs_diff().unwrap() < 1e-6, "diff {:?}", z.abs_diff());

        let nx = NxSubsemigroup::new(&[2, 3]).unwrap();
        let z = zeta_partial(&nx, 3.0, 1_000_000).unwrap();
        assert!((z.euler_closed_form.unwrap() - 1.5).abs() < 1e-12);
        assert!(z.abs_diff().unwrap() < 1e-6);

        let z = zeta_partial(&nx, 5.0, 1).unwrap();
        assert_eq!(z.partial_sum, 1.0);

        let z = zeta_partial(&nx, 1.0, 100).unwrap();
        assert!(z.divergent);
        assert!(z.euler_closed_form.is_none());
        assert!(zeta_partial(&nx, 2.0, 0).is_err());
    }

    #[test]
    fn scale_axioms_hold_on_affine_samples() {
        let h = presets::axb();
        let (g, report) = analyzed(&h, 10);
        let samples: Vec<MonoidElement> =
            ["(0,1)", "(3,1)", "(0,2)", "(1,2)", "(1,3)", "(2,5)", "(7,12)", "(4,6)", "(0,30)"]
                .iter()
                .map(|s| h.parse_element(s).unwrap())
                .collect();
        let axioms = verify_scale_axioms(&h, &g, &report, &samples).unwrap();
        for check in &axioms.checks {
            assert!(check.passed(), "{} failed: {:?}", check.name, check.failures);
            assert!(check.cases > 0, "{} never ran", check.name);
        }
        assert!(axioms.all_passed());
    }

    #[test]
    fn report_json_uses_stable_field_names() {
        let h = presets::axb();
        let (_g, report) = analyzed(&h, 10);
        let v = report.to_json();
        assert_eq!(v["exists"], true);
        assert_eq!(v["cond_i"]["verdict"], "pass");
        assert_eq!(v["scale_on_components"]["0"], 2);
        assert_eq!(v["scale_on_components"]["1"], 3);
        assert_eq!(v["scale_on_components"]["2"], 5);

        let h = presets::poly_f2t();
        let (_g, report) = analyzed(&h, 8);
        let v = report.to_json();
        assert_eq!(v["exists"], false);
        assert_eq!(v["cond_i"]["verdict"], "fail");
        assert!(v["cond_i"]["reason"]
            .as_str()
            .unwrap()
            .contains("duplicate component cardinality 2"));
    }
}
