//! Letterwise right-LCM computation on words of noncore irreducibles.
//!
//! Given words s = s₁⋯s_m and t = t₁⋯t_n of noncore irreducibles, the
//! completion diagram finds states s_{k+1}^{(ℓ)}, t_{ℓ+1}^{(k)} satisfying
//! the square recurrence
//!
//! ```text
//!   s_{k+1}^{(ℓ)} · t_{ℓ+1}^{(k+1)} = t_{ℓ+1}^{(k)} · s_{k+1}^{(ℓ+1)}   (right LCM per square)
//! ```
//!
//! for 0 ≤ k < m, 0 ≤ ℓ < n. When every square completes, the full right
//! LCM is s · t₁^{(m)}⋯t_n^{(m)} = t · s₁^{(n)}⋯s_m^{(n)}; the only way the
//! process can stop early is a square whose cells are non-equivalent
//! letters of one edge-free component, which certifies s ⊥ t.
//!
//! Each square is classified by the shape of its input cells (A: both
//! letters in one component, B: letters of distinct components, C/D: one
//! letter one core, E: both core) and every computed square is re-verified
//! by multiplication. The module also rewrites words along permutations of
//! their component trace via adjacent transpositions.

use std::collections::BTreeMap;

use serde_json::json;

use crate::core_graph::CoreGraph;
use crate::kernel::{KResult, KernelError, LcmOutcome, MonoidElement, MonoidHandle};

/// A word of noncore irreducibles together with the coconnected component
/// of each letter.
#[derive(Clone, Debug)]
pub struct IrreducibleWord {
    letters: Vec<MonoidElement>,
    component_trace: Vec<usize>,
}

impl IrreducibleWord {
    /// Validates every letter and resolves its component against the graph.
    pub fn new(
        handle: &MonoidHandle,
        graph: &CoreGraph,
        letters: Vec<MonoidElement>,
    ) -> KResult<Self> {
        let mut component_trace = Vec::with_capacity(letters.len());
        for l in &letters {
            component_trace.push(graph.component_of(handle, l)?);
        }
        Ok(IrreducibleWord { letters, component_trace })
    }

    pub fn letters(&self) -> &[MonoidElement] {
        &self.letters
    }

    pub fn component_trace(&self) -> &[usize] {
        &self.component_trace
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Product of the letters.
    pub fn fold(&self, handle: &MonoidHandle) -> KResult<MonoidElement> {
        handle.fold(&self.letters)
    }

    /// Component index → number of letters in that component. Invariant
    /// under the permutation rewriting.
    pub fn component_multiset(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for &c in &self.component_trace {
            *out.entry(c).or_insert(0) += 1;
        }
        out
    }
}

/// Whether a diagram cell currently holds a core element or a noncore
/// irreducible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellTag {
    Core,
    Irreducible,
}

/// Square classification by input-cell shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Process {
    /// Both cells irreducible, same component.
    A,
    /// Both cells irreducible, distinct components.
    B,
    /// s-cell irreducible, t-cell core.
    C,
    /// s-cell core, t-cell irreducible.
    D,
    /// Both cells core.
    E,
}

impl std::fmt::Display for Process {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self {
            Process::A => 'A',
            Process::B => 'B',
            Process::C => 'C',
            Process::D => 'D',
            Process::E => 'E',
        };
        write!(f, "{c}")
    }
}

/// Final verdict of a completion diagram.
#[derive(Clone, Debug)]
pub enum GridOutcome {
    /// An A-square held non-equivalent letters of one edge-free component.
    Orthogonal { at: (usize, usize) },
    /// Every square completed; `lcm = fold(s)·cofactor_s = fold(t)·cofactor_t`.
    Complete { lcm: MonoidElement, cofactor_s: MonoidElement, cofactor_t: MonoidElement },
}

impl GridOutcome {
    pub fn is_complete(&self) -> bool {
        matches!(self, GridOutcome::Complete { .. })
    }
}

/// The filled (or early-stopped) completion diagram.
#[derive(Clone, Debug)]
pub struct GridDiagram {
    m: usize,
    n: usize,
    s_letters: Vec<MonoidElement>,
    t_letters: Vec<MonoidElement>,
    /// `s_states[k][ℓ]` = s_{k+1}^{(ℓ)}; row k is complete (length n+1)
    /// unless the diagram stopped early.
    s_states: Vec<Vec<MonoidElement>>,
    /// `t_states[ℓ][k]` = t_{ℓ+1}^{(k)}.
    t_states: Vec<Vec<MonoidElement>>,
    s_tags: Vec<Vec<CellTag>>,
    t_tags: Vec<Vec<CellTag>>,
    /// `process[k][ℓ]`; `None` when the square was never reached.
    process: Vec<Vec<Option<Process>>>,
    outcome: GridOutcome,
}

impl GridDiagram {
    pub fn dimensions(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn outcome(&self) -> &GridOutcome {
        &self.outcome
    }

    pub fn process(&self, k: usize, l: usize) -> Option<Process> {
        self.process[k][l]
    }

    pub fn s_state(&self, k: usize, l: usize) -> Option<&MonoidElement> {
        self.s_states.get(k).and_then(|row| row.get(l))
    }

    pub fn t_state(&self, l: usize, k: usize) -> Option<&MonoidElement> {
        self.t_states.get(l).and_then(|col| col.get(k))
    }

    pub fn s_tag(&self, k: usize, l: usize) -> Option<CellTag> {
        self.s_tags.get(k).and_then(|row| row.get(l)).copied()
    }

    pub fn t_tag(&self, l: usize, k: usize) -> Option<CellTag> {
        self.t_tags.get(l).and_then(|col| col.get(k)).copied()
    }

    /// JSON rendering with stable field names; elements are formatted in
    /// the family's element syntax.
    pub fn to_json(&self, handle: &MonoidHandle) -> serde_json::Value {
        let fmt = |e: &MonoidElement| handle.format_element(e);
        let fmt_row = |row: &Vec<MonoidElement>| -> Vec<String> { row.iter().map(fmt).collect() };
        let tag_row = |row: &Vec<CellTag>| -> Vec<&'static str> {
            row.iter()
                .map(|t| match t {
                    CellTag::Core => "core",
                    CellTag::Irreducible => "irreducible",
                })
                .collect()
        };
        let process: Vec<Vec<Option<String>>> = self
            .process
            .iter()
            .map(|row| row.iter().map(|p| p.map(|p| p.to_string())).collect())
            .collect();
        let outcome = match &self.outcome {
            GridOutcome::Orthogonal { at } => json!({
                "kind": "orthogonal",
                "at": [at.0, at.1],
            }),
            GridOutcome::Complete { lcm, cofactor_s, cofactor_t } => json!({
                "kind": "complete",
                "lcm": fmt(lcm),
                "cofactor_s": fmt(cofactor_s),
                "cofactor_t": fmt(cofactor_t),
            }),
        };
        json!({
            "m": self.m,
            "n": self.n,
            "s_letters": self.s_letters.iter().map(fmt).collect::<Vec<_>>(),
            "t_letters": self.t_letters.iter().map(fmt).collect::<Vec<_>>(),
            "s_states": self.s_states.iter().map(fmt_row).collect::<Vec<_>>(),
            "t_states": self.t_states.iter().map(fmt_row).collect::<Vec<_>>(),
            "s_tags": self.s_tags.iter().map(tag_row).collect::<Vec<_>>(),
            "t_tags": self.t_tags.iter().map(tag_row).collect::<Vec<_>>(),
            "process": process,
            "outcome": outcome,
        })
    }

    /// Fixed-width text rendering: s-letters head the columns, t-letters
    /// head the rows, each interior cell shows the square's process letter.
    pub fn render_text(&self, handle: &MonoidHandle) -> String {
        let fmt = |e: &MonoidElement| handle.format_element(e);
        let mut out = String::new();
        let col_heads: Vec<String> = self.s_letters.iter().map(&fmt).collect();
        let row_heads: Vec<String> = self.t_letters.iter().map(&fmt).collect();
        let head_width = row_heads.iter().map(|h| h.len()).max().unwrap_or(1).max(1);
        let col_width = col_heads.iter().map(|h| h.len()).max().unwrap_or(1).max(3);

        out.push_str(&" ".repeat(head_width));
        for h in &col_heads {
            out.push_str(&format!(" | {h:^col_width$}"));
        }
        out.push('\n');
        out.push_str(&"-".repeat(head_width));
        for _ in 0..self.m {
            out.push_str(&format!("-+-{}", "-".repeat(col_width)));
        }
        out.push('\n');
        for (l, row_head) in row_heads.iter().enumerate() {
            out.push_str(&format!("{row_head:>head_width$}"));
            for k in 0..self.m {
                let cell = match self.process[k][l] {
                    Some(p) => p.to_string(),
                    None => "·".to_string(),
                };
                out.push_str(&format!(" | {cell:^col_width$}"));
            }
            out.push('\n');
        }
        match &self.outcome {
            GridOutcome::Orthogonal { at } => {
                out.push_str(&format!("outcome: orthogonal at square ({}, {})\n", at.0, at.1));
            }
            GridOutcome::Complete { lcm, cofactor_s, cofactor_t } => {
                out.push_str(&format!("outcome: complete, lcm = {}\n", fmt(lcm)));
                out.push_str(&format!("  s-cofactor (final t-states) = {}\n", fmt(cofactor_s)));
                out.push_str(&format!("  t-cofactor (final s-states) = {}\n", fmt(cofactor_t)));
            }
        }
        out
    }
}

/// Classifies one square by its input cells. Errors when a cell is neither
/// core nor noncore irreducible, and resolves components through the graph
/// for the A/B distinction.
pub fn classify_square(
    handle: &MonoidHandle,
    graph: &CoreGraph,
    s_cell: &MonoidElement,
    t_cell: &MonoidElement,
) -> KResult<Process> {
    let shape = |e: &MonoidElement| -> KResult<CellTag> {
        if handle.is_core(e) {
            Ok(CellTag::Core)
        } else if handle.is_noncore_irreducible(e) {
            Ok(CellTag::Irreducible)
        } else {
            Err(KernelError::Contract(format!(
                "cell {} is neither core nor irreducible",
                handle.format_element(e)
            )))
        }
    };
    match (shape(s_cell)?, shape(t_cell)?) {
        (CellTag::Irreducible, CellTag::Irreducible) => {
            let cs = graph.component_of(handle, s_cell)?;
            let ct = graph.component_of(handle, t_cell)?;
            Ok(if cs == ct { Process::A } else { Process::B })
        }
        (CellTag::Irreducible, CellTag::Core) => Ok(Process::C),
        (CellTag::Core, CellTag::Irreducible) => Ok(Process::D),
        (CellTag::Core, CellTag::Core) => Ok(Process::E),
    }
}

fn tag_of(handle: &MonoidHandle, e: &MonoidElement) -> KResult<CellTag> {
    if handle.is_core(e) {
        Ok(CellTag::Core)
    } else if handle.is_noncore_irreducible(e) {
        Ok(CellTag::Irreducible)
    } else {
        Err(KernelError::Contract(format!(
            "cell {} is neither core nor irreducible",
            handle.format_element(e)
        )))
    }
}

/// Runs the completion diagram for two irreducible words. Squares are
/// evaluated with the s-index outer and the t-index inner (column by
/// column of the flowchart); every square is re-verified by multiplication
/// and the final result is cross-checked against the kernel right LCM of
/// the folded words.
pub fn word_lcm(
    handle: &MonoidHandle,
    graph: &CoreGraph,
    s: &IrreducibleWord,
    t: &IrreducibleWord,
) -> KResult<GridDiagram> {
    let m = s.len();
    let n = t.len();
    let mut s_states: Vec<Vec<MonoidElement>> = s.letters.iter().map(|l| vec![l.clone()]).collect();
    let mut t_states: Vec<Vec<MonoidElement>> = t.letters.iter().map(|l| vec![l.clone()]).collect();
    let mut s_tags: Vec<Vec<CellTag>> = (0..m).map(|_| vec![CellTag::Irreducible]).collect();
    let mut t_tags: Vec<Vec<CellTag>> = (0..n).map(|_| vec![CellTag::Irreducible]).collect();
    let mut process: Vec<Vec<Option<Process>>> = vec![vec![None; n]; m];

    let mut orthogonal_at: Option<(usize, usize)> = None;
    'outer: for k in 0..m {
        for l in 0..n {
            let x = s_states[k].last().unwrap().clone();
            let y = t_states[l].last().unwrap().clone();
            let proc = classify_square(handle, graph, &x, &y)?;
            process[k][l] = Some(proc);

            let (t_new, s_new) = match proc {
                Process::A => {
                    match handle.core_equivalence_witness(&x, &y)? {
                        Some((a, b)) => (a, b),
                        None => {
                            // Non-equivalent letters of one component: in an
                            // edge-free component that certifies s ⊥ t.
                            if handle.intersects(&x, &y)? {
                                return Err(KernelError::Contract(format!(
                                    "meet-graph edge inside a coconnected component \
                                     at square ({k}, {l}): {} ⋒ {} without equivalence",
                                    handle.format_element(&x),
                                    handle.format_element(&y)
                                )));
                            }
                            orthogonal_at = Some((k, l));
                            break 'outer;
                        }
                    }
                }
                Process::B => match handle.right_lcm(&x, &y)? {
                    LcmOutcome::Orthogonal => {
                        return Err(KernelError::Contract(format!(
                            "balanced factorization violated at ({k}, {l}): \
                             cross-component letters {} ⊥ {}",
                            handle.format_element(&x),
                            handle.format_element(&y)
                        )));
                    }
                    LcmOutcome::Meet { cofactor_left, cofactor_right, .. } => {
                        let ok = handle.is_noncore_irreducible(&cofactor_left)
                            && handle.is_noncore_irreducible(&cofactor_right)
                            && graph.component_of(handle, &cofactor_left)?
                                == graph.component_of(handle, &y)?
                            && graph.component_of(handle, &cofactor_right)?
                                == graph.component_of(handle, &x)?;
                        if !ok {
                            return Err(KernelError::Contract(format!(
                                "balanced factorization violated at ({k}, {l}): \
                                 cofactors of {} ⋒ {} are not component-preserving \
                                 irreducibles",
                                handle.format_element(&x),
                                handle.format_element(&y)
                            )));
                        }
                        (cofactor_left, cofactor_right)
                    }
                },
                Process::C | Process::D | Process::E => match handle.right_lcm(&x, &y)? {
                    LcmOutcome::Orthogonal => {
                        return Err(KernelError::Contract(format!(
                            "core cell fails to meet at square ({k}, {l})"
                        )));
                    }
                    LcmOutcome::Meet { cofactor_left, cofactor_right, .. } => {
                        (cofactor_left, cofactor_right)
                    }
                },
            };

            // Square verification by multiplication: x·t_new = y·s_new.
            if handle.multiply(&x, &t_new)? != handle.multiply(&y, &s_new)? {
                return Err(KernelError::Contract(format!(
                    "completion square ({k}, {l}) does not multiply back"
                )));
            }

            // Tag the output cells and enforce the per-process shape: A and
            // E produce core cells on both sides, C keeps the t-cell core
            // and D the s-cell.
            let t_tag = tag_of(handle, &t_new)?;
            let s_tag = tag_of(handle, &s_new)?;
            let shape_ok = match proc {
                Process::A | Process::E => t_tag == CellTag::Core && s_tag == CellTag::Core,
                Process::B => t_tag == CellTag::Irreducible && s_tag == CellTag::Irreducible,
                Process::C => t_tag == CellTag::Core && s_tag == CellTag::Irreducible,
                Process::D => t_tag == CellTag::Irreducible && s_tag == CellTag::Core,
            };
            if !shape_ok {
                return Err(KernelError::Contract(format!(
                    "process-type violation at square ({k}, {l}): {proc}-square \
                     produced tags ({s_tag:?}, {t_tag:?})"
                )));
            }
            t_states[l].push(t_new);
            t_tags[l].push(t_tag);
            s_states[k].push(s_new);
            s_tags[k].push(s_tag);
        }
    }

    let fold_s = handle.fold(&s.letters)?;
    let fold_t = handle.fold(&t.letters)?;
    let kernel_outcome = handle.right_lcm(&fold_s, &fold_t)?;

    let outcome = match orthogonal_at {
        Some(at) => {
            if kernel_outcome.is_meet() {
                return Err(KernelError::Contract(format!(
                    "diagram stopped orthogonal at ({}, {}) but the folded words meet",
                    at.0, at.1
                )));
            }
            GridOutcome::Orthogonal { at }
        }
        None => {
            let finals_t: Vec<MonoidElement> =
                (0..n).map(|l| t_states[l].last().unwrap().clone()).collect();
            let finals_s: Vec<MonoidElement> =
                (0..m).map(|k| s_states[k].last().unwrap().clone()).collect();
            let cofactor_s = handle.fold(&finals_t)?;
            let cofactor_t = handle.fold(&finals_s)?;
            let lcm = handle.multiply(&fold_s, &cofactor_s)?;
            if lcm != handle.multiply(&fold_t, &cofactor_t)? {
                return Err(KernelError::Contract(
                    "diagram cofactors do not compose to a common multiple".into(),
                ));
            }
            match kernel_outcome.meet() {
                None => {
                    return Err(KernelError::Contract(
                        "diagram completed but the folded words are orthogonal".into(),
                    ));
                }
                Some((kernel_lcm, _, _)) => {
                    let fwd = handle.left_divide(kernel_lcm, &lcm)?;
                    let bwd = handle.left_divide(&lcm, kernel_lcm)?;
                    if fwd.is_none() || bwd.is_none() {
                        return Err(KernelError::Contract(
                            "diagram lcm disagrees with the kernel right LCM".into(),
                        ));
                    }
                }
            }
            GridOutcome::Complete { lcm, cofactor_s, cofactor_t }
        }
    };

    Ok(GridDiagram {
        m,
        n,
        s_letters: s.letters.clone(),
        t_letters: t.letters.clone(),
        s_states,
        t_states,
        s_tags,
        t_tags,
        process,
        outcome,
    })
}

/// Rewrites `word` so that its component trace is permuted by `sigma`
/// (position k of the result carries the component of position `sigma[k]`
/// of the source) while the folded product stays core-equivalent.
///
/// The permutation is realized by adjacent transpositions. A transposition
/// of equal components needs no rewriting at all; across components the
/// replacement pair (u, z) with u·z = (a·b)·c for core c is found by
/// searching the stored classes of the target component, and the residual
/// core c is pushed through the suffix with one core-against-letter right
/// LCM per remaining position.
pub fn permute_word(
    handle: &MonoidHandle,
    graph: &CoreGraph,
    word: &IrreducibleWord,
    sigma: &[usize],
) -> KResult<IrreducibleWord> {
    let n = word.len();
    if sigma.len() != n {
        return Err(KernelError::Contract(format!(
            "permutation length {} does not match word length {n}",
            sigma.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in sigma {
        if i >= n || seen[i] {
            return Err(KernelError::Contract(
                "sigma is not a permutation of the letter positions".into(),
            ));
        }
        seen[i] = true;
    }
    if !graph.exhaustive() {
        return Err(KernelError::Contract(
            "permute_word requires an exhaustive class enumeration".into(),
        ));
    }

    let target: Vec<usize> = sigma.iter().map(|&i| word.component_trace[i]).collect();
    let mut letters = word.letters.clone();
    let mut trace = word.component_trace.clone();

    for k in 0..n {
        if trace[k] == target[k] {
            continue;
        }
        let p = (k + 1..n).find(|&p| trace[p] == target[k]).ok_or_else(|| {
            KernelError::Contract("component multiset mismatch while permuting".into())
        })?;
        for q in (k..p).rev() {
            swap_adjacent(handle, graph, &mut letters, &mut trace, q)?;
        }
    }

    let rewritten = IrreducibleWord { letters, component_trace: trace };
    if rewritten.component_trace != target {
        return Err(KernelError::Contract("permutation rewriting missed the target trace".into()));
    }
    let before = word.fold(handle)?;
    let after = rewritten.fold(handle)?;
    if !handle.core_equivalent(&before, &after)? {
        return Err(KernelError::Contract(
            "permutation rewriting changed the core-equivalence class".into(),
        ));
    }
    Ok(rewritten)
}

/// Swaps the (cross-component) letters at positions q, q+1: finds the
/// stored class u of the right letter's component and an irreducible z of
/// the left letter's component with u·z = (a·b)·c, c core, then threads c
/// through the suffix via c·w = ŵ·c′ steps.
fn swap_adjacent(
    handle: &MonoidHandle,
    graph: &CoreGraph,
    letters: &mut [MonoidElement],
    trace: &mut [usize],
    q: usize,
) -> KResult<()> {
    let (ci, cj) = (trace[q], trace[q + 1]);
    debug_assert_ne!(ci, cj, "equal-component positions need no swap");
    let ab = handle.multiply(&letters[q], &letters[q + 1])?;

    let mut found: Option<(MonoidElement, MonoidElement, MonoidElement)> = None;
    for &vi in &graph.components()[cj] {
        let u = &graph.vertices()[vi];
        if let LcmOutcome::Meet { cofactor_left: z, cofactor_right: c, .. } =
            handle.right_lcm(u, &ab)?
        {
            if !handle.is_core(&c) {
                continue;
            }
            if !handle.is_noncore_irreducible(&z) || graph.component_of(handle, &z)? != ci {
                return Err(KernelError::Contract(format!(
                    "swap witness for {} has a malformed cofactor {}",
                    handle.format_element(&ab),
                    handle.format_element(&z)
                )));
            }
            found = Some((u.clone(), z, c));
            break;
        }
    }
    let (u, z, mut core) = found.ok_or_else(|| {
        KernelError::Contract(format!(
            "letter swap witness search failed at position {q} (family contract violation)"
        ))
    })?;
    letters[q] = u;
    letters[q + 1] = z;
    trace.swap(q, q + 1);

    // Push the residual core right: core·w = ŵ·core′ with ŵ the cofactor
    // of `core` in their right LCM (a core element meets everything).
    for r in (q + 2)..letters.len() {
        if core == handle.unit() {
            break;
        }
        match handle.right_lcm(&core, &letters[r])? {
            LcmOutcome::Orthogonal => {
                return Err(KernelError::Contract(
                    "core element failed to meet a letter during the push".into(),
                ));
            }
            LcmOutcome::Meet { cofactor_left: w_new, cofactor_right: c_next, .. } => {
                if !handle.is_core(&c_next) || !handle.is_noncore_irreducible(&w_new) {
                    return Err(KernelError::Contract(
                        "core push produced a malformed letter".into(),
                    ));
                }
                if graph.component_of(handle, &w_new)? != trace[r] {
                    return Err(KernelError::Contract(format!(
                        "core push moved the letter at position {r} across components"
                    )));
                }
                letters[r] = w_new;
                core = c_next;
            }
        }
    }
    Ok(())
}
