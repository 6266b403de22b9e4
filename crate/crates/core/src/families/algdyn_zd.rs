//! Lattice dynamical monoids ℤ^d ⋊_θ P: pairs (g, u) of a lattice vector and
//! a normal-form word u over a monoid P of injective endomorphisms of ℤ^d,
//! multiplied by (g, u)(h, v) = (g + θ_u h, u·v).
//!
//! P is specified by generator matrices plus a mode:
//!
//! * `free` — no relations; words meet iff prefix-comparable.
//! * `commuting` — all generators commute; normal form sorts generator runs
//!   by index and any two words meet in the exponentwise maximum.
//! * `rewrite` — a finite confluent rewriting system presenting P as a free
//!   abelian monoid on the non-involutive generators extended by one
//!   involution permuting them (normal form: base runs ascending, then an
//!   optional single involution letter).
//!
//! A principal ideal factors as (g, u)S = (g + θ_u ℤ^d) × uP, so right LCMs
//! combine a P-level LCM with a congruence solution on the lattice side; the
//! implementation verifies on every meet that θ_u ℤ^d ∩ θ_v ℤ^d equals the
//! lattice of the P-level LCM — the principality requirement — and fails
//! loudly otherwise.
//!
//! Core elements are exactly those (g, u) where u lies in the core of P and
//! θ_u is unimodular; for the built-in modes that means: u empty (`free`), or
//! all letters of u unimodular (`commuting`/`rewrite`).

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand::RngCore;

use crate::families::{tag_digest, AlgDynZdSection, ConfigError};
use crate::kernel::{
    check_same_family, Exhaustiveness, Family, IrreducibleFactorization, KResult, KernelError,
    LcmOutcome, MonoidElement, Payload,
};
use crate::lattice::{
    canonical_basis, column_hnf, coset_reduce, coset_representatives, lattice_index,
    lattice_intersection, solve_in_lattice, ColumnHnf, Mat,
};

const MAX_DIM: usize = 8;
const MAX_GENS: usize = 16;

#[derive(Debug, Clone)]
enum PMode {
    Free,
    Commuting,
    /// Free abelian on the base generators, extended by the involution
    /// generator `x` with `x² = ε` and `x·p = perm(p)·x`.
    Involutive {
        x: u8,
        perm: Vec<u8>,
    },
}

#[derive(Debug)]
pub struct LatticeFamily {
    tag: Arc<str>,
    dim: usize,
    labels: Vec<String>,
    mats: Vec<Mat>,
    hnfs: Vec<ColumnHnf>,
    /// |det θ_gen| per generator.
    dets: Vec<u64>,
    mode: PMode,
}

type Word = Vec<(u8, u32)>;

impl LatticeFamily {
    pub fn from_section(section: &AlgDynZdSection) -> Result<Self, ConfigError> {
        fn field(f: &str, m: impl Into<String>) -> ConfigError {
            ConfigError::field(f, m)
        }
        let d = section.dimension;
        if d == 0 || d > MAX_DIM {
            return Err(field(
                "alg_dyn_zd.dimension",
                format!("dimension must be between 1 and {MAX_DIM}, got {d}"),
            ));
        }
        if section.generators.is_empty() || section.generators.len() > MAX_GENS {
            return Err(field(
                "alg_dyn_zd.generators",
                format!("need between 1 and {MAX_GENS} generators"),
            ));
        }
        let mut labels = Vec::new();
        let mut mats = Vec::new();
        for gen in &section.generators {
            let l = gen.label.trim();
            if l.is_empty()
                || l == "e"
                || l == "ε"
                || l.chars().any(|c| c.is_whitespace() || "^(),".contains(c))
            {
                return Err(field(
                    "alg_dyn_zd.generators",
                    format!("label `{}` is empty, reserved, or contains separators", gen.label),
                ));
            }
            if labels.contains(&l.to_string()) {
                return Err(field("alg_dyn_zd.generators", format!("duplicate label `{l}`")));
            }
            if gen.matrix.len() != d || gen.matrix.iter().any(|row| row.len() != d) {
                return Err(field(
                    "alg_dyn_zd.generators",
                    format!("matrix of `{l}` must be {d}×{d}"),
                ));
            }
            labels.push(l.to_string());
            mats.push(Mat::from_rows(&gen.matrix));
        }
        let hnfs: Vec<ColumnHnf> = mats.iter().map(column_hnf).collect();
        let mut dets = Vec::new();
        for (i, hnf) in hnfs.iter().enumerate() {
            match lattice_index(hnf) {
                Some(ix) => dets.push(ix.unsigned_abs() as u64),
                None => {
                    return Err(field(
                        "alg_dyn_zd.generators",
                        format!(
                            "matrix of `{}` is singular; endomorphisms must be injective",
                            labels[i]
                        ),
                    ))
                }
            }
        }
        let jointly_full = |i: usize, j: usize| -> bool {
            let joint = column_hnf(&mats[i].hstack(&mats[j]));
            lattice_index(&joint) == Some(1)
        };
        let mode = match section.p_mode.as_str() {
            "free" => {
                if !section.rules.is_empty() {
                    return Err(field("alg_dyn_zd.rules", "the free mode admits no rules"));
                }
                PMode::Free
            }
            "commuting" => {
                if !section.rules.is_empty() {
                    return Err(field(
                        "alg_dyn_zd.rules",
                        "the commuting mode derives its relations; leave rules empty",
                    ));
                }
                for i in 0..mats.len() {
                    for j in i + 1..mats.len() {
                        if mats[i].mul(&mats[j]) != mats[j].mul(&mats[i]) {
                            return Err(field(
                                "alg_dyn_zd.generators",
                                format!("`{}` and `{}` do not commute", labels[i], labels[j]),
                            ));
                        }
                        if dets[i] > 1 && dets[j] > 1 && !jointly_full(i, j) {
                            return Err(field(
                                "alg_dyn_zd.generators",
                                format!(
                                    "lattice images of `{}` and `{}` are not jointly full, so \
                                     principal ideal intersections fail to be principal",
                                    labels[i], labels[j]
                                ),
                            ));
                        }
                    }
                }
                PMode::Commuting
            }
            "rewrite" => Self::parse_rules(section, &labels, &mats, &dets, jointly_full)?,
            other => {
                return Err(field(
                    "alg_dyn_zd.p_mode",
                    format!("unknown mode `{other}` (expected free, commuting, or rewrite)"),
                ))
            }
        };
        let digest = tag_digest(&format!(
            "{d}|{:?}|{:?}|{:?}|{:?}",
            labels,
            section.generators.iter().map(|g| &g.matrix).collect::<Vec<_>>(),
            section.p_mode,
            section.rules
        ));
        Ok(LatticeFamily {
            tag: Arc::from(format!("alg-dyn-zd#{digest}")),
            dim: d,
            labels,
            mats,
            hnfs,
            dets,
            mode,
        })
    }

    fn parse_rules(
        section: &AlgDynZdSection,
        labels: &[String],
        mats: &[Mat],
        dets: &[u64],
        jointly_full: impl Fn(usize, usize) -> bool,
    ) -> Result<PMode, ConfigError> {
        fn field(f: &str, m: impl Into<String>) -> ConfigError {
            ConfigError::field(f, m)
        }
        let rules_field = "alg_dyn_zd.rules";
        if section.rules.is_empty() {
            return Err(field(rules_field, "the rewrite mode requires rules"));
        }
        let idx = |label: &String| -> Result<usize, ConfigError> {
            labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| field(rules_field, format!("unknown generator `{label}`")))
        };
        let mut involution: Option<usize> = None;
        let mut commutations: Vec<(usize, usize)> = Vec::new(); // (low, high) seen
        let mut conjugations: BTreeMap<usize, usize> = BTreeMap::new();
        for rule in &section.rules {
            let lhs: Vec<usize> = rule.lhs.iter().map(idx).collect::<Result<_, _>>()?;
            let rhs: Vec<usize> = rule.rhs.iter().map(idx).collect::<Result<_, _>>()?;
            match (lhs.as_slice(), rhs.as_slice()) {
                ([a, b], []) if a == b => match involution {
                    None => involution = Some(*a),
                    Some(x) if x == *a => {}
                    Some(x) => {
                        return Err(field(
                            rules_field,
                            format!(
                                "two distinct involutions `{}` and `{}`; only one is supported",
                                labels[x], labels[*a]
                            ),
                        ))
                    }
                },
                ([b, a], [a2, b2]) if a == a2 && b == b2 && a != b => {
                    if a >= b {
                        return Err(field(
                            rules_field,
                            format!(
                                "commutation `{} {} -> {} {}` must orient toward the generator \
                                 listing order",
                                labels[*b], labels[*a], labels[*a], labels[*b]
                            ),
                        ));
                    }
                    commutations.push((*a, *b));
                }
                ([x, p], [q, x2]) if x == x2 && x != p && x != q => {
                    if conjugations.insert(*p, *q).is_some() {
                        return Err(field(
                            rules_field,
                            format!("duplicate conjugation rule for `{}`", labels[*p]),
                        ));
                    }
                }
                _ => {
                    return Err(field(
                        rules_field,
                        format!(
                            "rule {:?} -> {:?} is not a supported shape (involution squared, \
                             commutation, or conjugation past the involution)",
                            rule.lhs, rule.rhs
                        ),
                    ))
                }
            }
        }
        let x = involution
            .ok_or_else(|| field(rules_field, "no involution rule `[x, x] -> []` found"))?;
        let base: Vec<usize> = (0..labels.len()).filter(|&i| i != x).collect();
        for (&p, &q) in &conjugations {
            if p == x || q == x {
                return Err(field(rules_field, "the involution cannot be conjugated"));
            }
        }
        for &p in &base {
            let q = *conjugations.get(&p).ok_or_else(|| {
                field(rules_field, format!("missing conjugation rule for `{}`", labels[p]))
            })?;
            let back = conjugations.get(&q).copied();
            if back != Some(p) {
                return Err(field(
                    rules_field,
                    format!("conjugation is not an involution at `{}`", labels[p]),
                ));
            }
        }
        for i in 0..base.len() {
            for j in i + 1..base.len() {
                let (a, b) = (base[i], base[j]);
                if !commutations.contains(&(a, b)) {
                    return Err(field(
                        rules_field,
                        format!(
                            "missing commutation rule between `{}` and `{}`",
                            labels[a], labels[b]
                        ),
                    ));
                }
            }
        }
        // Matrix compatibility: θ respects every relation.
        let id = Mat::identity(mats[0].rows);
        if mats[x].mul(&mats[x]) != id {
            return Err(field(
                rules_field,
                format!("matrix of involution `{}` does not square to the identity", labels[x]),
            ));
        }
        for (&p, &q) in &conjugations {
            if mats[x].mul(&mats[p]) != mats[q].mul(&mats[x]) {
                return Err(field(
                    rules_field,
                    format!(
                        "matrices violate the conjugation rule `{} {} -> {} {}`",
                        labels[x], labels[p], labels[q], labels[x]
                    ),
                ));
            }
        }
        for &(a, b) in &commutations {
            if mats[a].mul(&mats[b]) != mats[b].mul(&mats[a]) {
                return Err(field(
                    rules_field,
                    format!(
                        "`{}` and `{}` are declared commuting but do not",
                        labels[a], labels[b]
                    ),
                ));
            }
        }
        for i in 0..base.len() {
            for j in i + 1..base.len() {
                let (a, b) = (base[i], base[j]);
                if dets[a] > 1 && dets[b] > 1 && !jointly_full(a, b) {
                    return Err(field(
                        "alg_dyn_zd.generators",
                        format!(
                            "lattice images of `{}` and `{}` are not jointly full, so principal \
                             ideal intersections fail to be principal",
                            labels[a], labels[b]
                        ),
                    ));
                }
            }
        }
        let mut perm: Vec<u8> = (0..labels.len() as u8).collect();
        for (&p, &q) in &conjugations {
            perm[p] = q as u8;
        }
        Ok(PMode::Involutive { x: x as u8, perm })
    }

    pub fn element(&self, vec: &[i64], word: &[(u8, u32)]) -> KResult<MonoidElement> {
        if vec.len() != self.dim {
            return Err(KernelError::Contract(format!(
                "vector length {} does not match dimension {}",
                vec.len(),
                self.dim
            )));
        }
        let word = self.p_normalize(word.to_vec())?;
        Ok(MonoidElement::new(&self.tag, Payload::Lattice { vec: vec.to_vec(), word }))
    }

    fn parts<'a>(&self, s: &'a MonoidElement) -> KResult<(&'a [i64], &'a Word)> {
        match &s.payload {
            Payload::Lattice { vec, word } if s.family_tag == self.tag => Ok((vec, word)),
            _ => Err(KernelError::Contract(format!(
                "foreign element in lattice family: {:?}",
                s.payload
            ))),
        }
    }

    fn make(&self, vec: Vec<i128>, word: Word) -> KResult<MonoidElement> {
        let mut out = Vec::with_capacity(vec.len());
        for v in vec {
            out.push(i64::try_from(v).map_err(|_| KernelError::Overflow("lattice vector".into()))?);
        }
        Ok(MonoidElement::new(&self.tag, Payload::Lattice { vec: out, word }))
    }

    /// Canonical form of a word under the mode's relations.
    fn p_normalize(&self, seq: Word) -> KResult<Word> {
        let checked = |a: u32, b: u32| -> KResult<u32> {
            a.checked_add(b).ok_or_else(|| KernelError::Overflow("word exponent".into()))
        };
        match &self.mode {
            PMode::Free => {
                let mut out: Word = Vec::new();
                for (g, e) in seq {
                    if e == 0 {
                        continue;
                    }
                    match out.last_mut() {
                        Some((lg, le)) if *lg == g => *le = checked(*le, e)?,
                        _ => out.push((g, e)),
                    }
                }
                Ok(out)
            }
            PMode::Commuting => {
                let mut exps: BTreeMap<u8, u32> = BTreeMap::new();
                for (g, e) in seq {
                    if e == 0 {
                        continue;
                    }
                    let slot = exps.entry(g).or_insert(0);
                    *slot = checked(*slot, e)?;
                }
                Ok(exps.into_iter().collect())
            }
            PMode::Involutive { x, perm } => {
                let mut exps: BTreeMap<u8, u32> = BTreeMap::new();
                let mut parity = 0u32;
                for (g, e) in seq {
                    if e == 0 {
                        continue;
                    }
                    if g == *x {
                        parity ^= e & 1;
                        continue;
                    }
                    // An odd number of involution letters to the left turns p
                    // into perm(p) in the normal form.
                    let eff = if parity == 1 { perm[g as usize] } else { g };
                    let slot = exps.entry(eff).or_insert(0);
                    *slot = checked(*slot, e)?;
                }
                let mut out: Word = exps.into_iter().collect();
                if parity == 1 {
                    out.push((*x, 1));
                }
                Ok(out)
            }
        }
    }

    fn p_mul(&self, u: &Word, v: &Word) -> KResult<Word> {
        let mut seq = u.clone();
        seq.extend_from_slice(v);
        self.p_normalize(seq)
    }

    fn p_is_unit(&self, u: &Word) -> bool {
        match &self.mode {
            PMode::Free | PMode::Commuting => u.is_empty(),
            PMode::Involutive { x, .. } => u.iter().all(|(g, _)| g == x),
        }
    }

    fn p_invert_unit(&self, u: &Word) -> Word {
        // The only nontrivial P-unit is the involution, which is self-inverse.
        u.clone()
    }

    /// If v = u·w in P, returns w (free mode helper).
    fn prefix_remainder(u: &Word, v: &Word) -> Option<Word> {
        let mut rem: Word = Vec::new();
        let mut vi = 0usize;
        for (k, &(g, e)) in u.iter().enumerate() {
            let &(vg, ve) = v.get(vi)?;
            if vg != g || ve < e {
                return None;
            }
            if ve == e {
                vi += 1;
            } else {
                // Partial run: the rest of this run starts the remainder,
                // but only if u ends here.
                if k + 1 != u.len() {
                    return None;
                }
                rem.push((vg, ve - e));
                vi += 1;
            }
        }
        rem.extend_from_slice(&v[vi..]);
        Some(rem)
    }

    /// P-level LCM: `Some((r, cu, cv))` with u·cu = v·cv = r generating
    /// uP ∩ vP, or `None` when the ideals are disjoint.
    fn p_lcm(&self, u: &Word, v: &Word) -> KResult<Option<(Word, Word, Word)>> {
        match &self.mode {
            PMode::Free => {
                if let Some(rem) = Self::prefix_remainder(u, v) {
                    return Ok(Some((v.clone(), rem, Vec::new())));
                }
                if let Some(rem) = Self::prefix_remainder(v, u) {
                    return Ok(Some((u.clone(), Vec::new(), rem)));
                }
                Ok(None)
            }
            PMode::Commuting => {
                let eu: BTreeMap<u8, u32> = u.iter().copied().collect();
                let ev: BTreeMap<u8, u32> = v.iter().copied().collect();
                let gens: std::collections::BTreeSet<u8> =
                    eu.keys().chain(ev.keys()).copied().collect();
                let mut r = Vec::new();
                let mut cu = Vec::new();
                let mut cv = Vec::new();
                for g in gens {
                    let a = eu.get(&g).copied().unwrap_or(0);
                    let b = ev.get(&g).copied().unwrap_or(0);
                    let m = a.max(b);
                    r.push((g, m));
                    if m > a {
                        cu.push((g, m - a));
                    }
                    if m > b {
                        cv.push((g, m - b));
                    }
                }
                Ok(Some((self.p_normalize(r)?, self.p_normalize(cu)?, self.p_normalize(cv)?)))
            }
            PMode::Involutive { x, perm } => {
                let split = |w: &Word| -> (BTreeMap<u8, u32>, u32) {
                    let mut exps = BTreeMap::new();
                    let mut parity = 0;
                    for &(g, e) in w {
                        if g == *x {
                            parity = e & 1;
                        } else {
                            exps.insert(g, e);
                        }
                    }
                    (exps, parity)
                };
                let (eu, pu) = split(u);
                let (ev, pv) = split(v);
                let gens: std::collections::BTreeSet<u8> =
                    eu.keys().chain(ev.keys()).copied().collect();
                let mut r = Vec::new();
                let mut du: BTreeMap<u8, u32> = BTreeMap::new();
                let mut dv: BTreeMap<u8, u32> = BTreeMap::new();
                for g in gens {
                    let a = eu.get(&g).copied().unwrap_or(0);
                    let b = ev.get(&g).copied().unwrap_or(0);
                    let m = a.max(b);
                    r.push((g, m));
                    if m > a {
                        du.insert(g, m - a);
                    }
                    if m > b {
                        dv.insert(g, m - b);
                    }
                }
                // u·cu = r with r parity 0: cu carries u's parity and its
                // base part is the perm^{parity(u)}-twist of the deficit.
                let twist = |d: BTreeMap<u8, u32>, parity: u32| -> Word {
                    let mut w: Word = d
                        .into_iter()
                        .map(|(g, e)| if parity == 1 { (perm[g as usize], e) } else { (g, e) })
                        .collect();
                    w.sort();
                    if parity == 1 {
                        w.push((*x, 1));
                    }
                    w
                };
                Ok(Some((
                    self.p_normalize(r)?,
                    self.p_normalize(twist(du, pu))?,
                    self.p_normalize(twist(dv, pv))?,
                )))
            }
        }
    }

    fn theta(&self, word: &Word) -> Mat {
        let mut acc = Mat::identity(self.dim);
        for &(g, e) in word {
            for _ in 0..e {
                acc = acc.mul(&self.mats[g as usize]);
            }
        }
        acc
    }

    /// Number of non-unimodular letters, with multiplicity.
    fn noncore_letter_count(&self, word: &Word) -> u64 {
        word.iter().filter(|(g, _)| self.dets[*g as usize] > 1).map(|(_, e)| u64::from(*e)).sum()
    }

    fn vec_i128(v: &[i64]) -> Vec<i128> {
        v.iter().map(|&x| x as i128).collect()
    }

    /// Greedy peeling of one irreducible letter with generator `g` off the
    /// front of the residual translation part.
    fn peel_letter(&self, remaining: &[i128], g: u8) -> KResult<(Vec<i128>, Vec<i128>)> {
        let hnf = &self.hnfs[g as usize];
        let rep = coset_reduce(hnf, remaining)
            .ok_or_else(|| KernelError::Contract("generator lattice must be full rank".into()))?;
        let diff: Vec<i128> = remaining.iter().zip(&rep).map(|(a, b)| a - b).collect();
        let pre = solve_in_lattice(hnf, &diff).ok_or_else(|| {
            KernelError::Contract("coset reduction left a non-lattice difference".into())
        })?;
        Ok((rep, pre))
    }
}

impl Family for LatticeFamily {
    fn tag(&self) -> &Arc<str> {
        &self.tag
    }

    fn unit(&self) -> MonoidElement {
        MonoidElement::new(&self.tag, Payload::Lattice { vec: vec![0; self.dim], word: Vec::new() })
    }

    fn multiply(&self, s: &MonoidElement, t: &MonoidElement) -> KResult<MonoidElement> {
        check_same_family(s, t)?;
        let (g, u) = self.parts(s)?;
        let (h, v) = self.parts(t)?;
        let th = self.theta(u);
        let moved = th.mul_vec(&Self::vec_i128(h));
        let vec: Vec<i128> = g.iter().zip(&moved).map(|(a, b)| i128::from(*a) + b).collect();
        self.make(vec, self.p_mul(u, v)?)
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
        let (g, u) = self.parts(s)?;
        let (h, v) = self.parts(t)?;
        let Some((r_word, cu_word, cv_word)) = self.p_lcm(u, v)? else {
            return Ok(LcmOutcome::Orthogonal);
        };
        let th_u = self.theta(u);
        let th_v = self.theta(v);
        let gi = Self::vec_i128(g);
        let hi = Self::vec_i128(h);
        // Solve θ_u·a − θ_v·b = h − g for the common translation part.
        let joint = column_hnf(&th_u.hstack(&th_v));
        let target: Vec<i128> = hi.iter().zip(&gi).map(|(a, b)| a - b).collect();
        let Some(sol) = solve_in_lattice(&joint, &target) else {
            return Ok(LcmOutcome::Orthogonal);
        };
        let a_coords: Vec<i128> = sol[..self.dim].to_vec();
        let c_raw: Vec<i128> =
            gi.iter().zip(&th_u.mul_vec(&a_coords)).map(|(a, b)| a + b).collect();
        // Principality: the lattice intersection must equal the lattice of
        // the P-level LCM.
        let th_r = self.theta(&r_word);
        let inter = lattice_intersection(&th_u, &th_v);
        if canonical_basis(&inter) != canonical_basis(&th_r) {
            return Err(KernelError::Contract(format!(
                "ideal intersection of {} and {} is not principal; the configuration violates \
                 the right LCM property",
                self.format_element(s),
                self.format_element(t)
            )));
        }
        let hnf_r = column_hnf(&th_r);
        let c = coset_reduce(&hnf_r, &c_raw)
            .ok_or_else(|| KernelError::Contract("LCM lattice must be full rank".into()))?;
        let hnf_u = column_hnf(&th_u);
        let hnf_v = column_hnf(&th_v);
        let diff_u: Vec<i128> = c.iter().zip(&gi).map(|(a, b)| a - b).collect();
        let diff_v: Vec<i128> = c.iter().zip(&hi).map(|(a, b)| a - b).collect();
        let xu = solve_in_lattice(&hnf_u, &diff_u)
            .ok_or_else(|| KernelError::Contract("LCM not in left coset".into()))?;
        let xv = solve_in_lattice(&hnf_v, &diff_v)
            .ok_or_else(|| KernelError::Contract("LCM not in right coset".into()))?;
        let lcm = self.make(c, r_word)?;
        let cofactor_left = self.make(xu, cu_word)?;
        let cofactor_right = self.make(xv, cv_word)?;
        if self.multiply(s, &cofactor_left)? != lcm || self.multiply(t, &cofactor_right)? != lcm {
            return Err(KernelError::Contract(format!(
                "LCM witnesses for {} and {} do not multiply back",
                self.format_element(s),
                self.format_element(t)
            )));
        }
        Ok(LcmOutcome::Meet { lcm, cofactor_left, cofactor_right })
    }

    fn is_core(&self, s: &MonoidElement) -> bool {
        let Ok((_, word)) = self.parts(s) else { return false };
        match self.mode {
            PMode::Free => word.is_empty(),
            PMode::Commuting | PMode::Involutive { .. } => self.noncore_letter_count(word) == 0,
        }
    }

    fn is_unit(&self, s: &MonoidElement) -> bool {
        self.parts(s).map(|(_, w)| self.p_is_unit(w)).unwrap_or(false)
    }

    fn invert_unit(&self, s: &MonoidElement) -> KResult<MonoidElement> {
        let (g, u) = self.parts(s)?;
        if !self.p_is_unit(u) {
            return Err(KernelError::NotUnit(self.format_element(s)));
        }
        let uinv = self.p_invert_unit(u);
        let th = self.theta(&uinv);
        let neg: Vec<i128> = g.iter().map(|&x| -i128::from(x)).collect();
        let vec = th.mul_vec(&neg);
        self.make(vec, uinv)
    }

    fn is_noncore_irreducible(&self, s: &MonoidElement) -> bool {
        let Ok((_, word)) = self.parts(s) else { return false };
        match self.mode {
            // Free monoid P: every length-one word is irreducible.
            PMode::Free => word.iter().map(|(_, e)| u64::from(*e)).sum::<u64>() == 1,
            PMode::Commuting | PMode::Involutive { .. } => self.noncore_letter_count(word) == 1,
        }
    }

    fn factor_noncore(&self, s: &MonoidElement) -> KResult<IrreducibleFactorization> {
        let (g, word) = self.parts(s)?;
        if self.is_core(s) {
            return Err(KernelError::NotFactorable(self.format_element(s)));
        }
        // Letters: the irreducible letters of the word in normal-form order;
        // unimodular letters stay in the core tail in the commuting and
        // involutive modes (where they are core), but are letters in the
        // free mode.
        let mut letter_gens: Vec<u8> = Vec::new();
        let mut tail: Word = Vec::new();
        for &(gen, e) in word {
            let is_letter = match self.mode {
                PMode::Free => true,
                PMode::Commuting | PMode::Involutive { .. } => self.dets[gen as usize] > 1,
            };
            if is_letter {
                for _ in 0..e {
                    letter_gens.push(gen);
                }
            } else {
                tail.push((gen, e));
            }
        }
        let mut remaining = Self::vec_i128(g);
        let mut letters = Vec::with_capacity(letter_gens.len());
        for gen in letter_gens {
            let (rep, pre) = self.peel_letter(&remaining, gen)?;
            letters.push(self.make(rep, vec![(gen, 1)])?);
            remaining = pre;
        }
        let right_core = self.make(remaining, self.p_normalize(tail)?)?;
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
                "lattice factorization of {} does not multiply back",
                self.format_element(s)
            )));
        }
        Ok(f)
    }

    fn irreducible_classes(&self, cap: usize) -> (Vec<MonoidElement>, Exhaustiveness) {
        // Per generator with |det| ≥ 2 (in the free mode, every generator):
        // one class per coset of θ_gen ℤ^d, represented by the canonical
        // coset representatives in lexicographic order.
        let mut out = Vec::new();
        let gens: Vec<u8> = (0..self.labels.len() as u8)
            .filter(|&gidx| match self.mode {
                PMode::Free => true,
                _ => self.dets[gidx as usize] > 1,
            })
            .collect();
        for (pos, &gidx) in gens.iter().enumerate() {
            let reps = coset_representatives(&self.hnfs[gidx as usize])
                .expect("generator lattices are full rank");
            for rep in reps {
                if out.len() == cap {
                    return (out, Exhaustiveness::Truncated);
                }
                out.push(
                    self.make(rep, vec![(gidx, 1)]).expect("coset representatives are in range"),
                );
            }
            if out.len() == cap && pos + 1 < gens.len() {
                // A cut at a generator boundary keeps whole per-generator
                // class blocks; in the free mode every block belongs to the
                // same coconnected component, so the cut still truncates it.
                let ex = match self.mode {
                    PMode::Free => Exhaustiveness::Truncated,
                    _ => Exhaustiveness::ComponentComplete,
                };
                return (out, ex);
            }
        }
        (out, Exhaustiveness::Total)
    }

    fn core_generators(&self) -> Vec<MonoidElement> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for sign in [1i64, -1] {
                let mut v = vec![0i64; self.dim];
                v[i] = sign;
                out.push(self.element(&v, &[]).expect("translation"));
            }
        }
        match &self.mode {
            PMode::Free => {}
            PMode::Commuting => {
                for (gidx, &det) in self.dets.iter().enumerate() {
                    if det == 1 {
                        out.push(
                            self.element(&vec![0; self.dim], &[(gidx as u8, 1)])
                                .expect("unimodular generator"),
                        );
                    }
                }
            }
            PMode::Involutive { x, .. } => {
                out.push(self.element(&vec![0; self.dim], &[(*x, 1)]).expect("involution"));
            }
        }
        out
    }

    fn oracle_generators(&self) -> Vec<MonoidElement> {
        let mut out = vec![];
        for i in 0..self.dim {
            let mut v = vec![0i64; self.dim];
            v[i] = 1;
            out.push(self.element(&v, &[]).expect("translation"));
        }
        for gidx in 0..self.labels.len() as u8 {
            out.push(self.element(&vec![0; self.dim], &[(gidx, 1)]).expect("generator"));
        }
        out
    }

    fn spot_samples(&self) -> Vec<MonoidElement> {
        let ones = vec![1i64; self.dim];
        let mut twos = vec![0i64; self.dim];
        twos[0] = 2;
        let all: Word = (0..self.labels.len() as u8).map(|g| (g, 1)).collect();
        let first_sq: Word = vec![(0, 2)];
        vec![
            self.element(&ones, &all).expect("sample"),
            self.element(&twos, &first_sq).expect("sample"),
        ]
    }

    fn parse_element(&self, spec: &str) -> KResult<MonoidElement> {
        let bad = |msg: String| KernelError::ElementParse { spec: spec.to_string(), message: msg };
        let inner = spec
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("expected `((v1,…,vd),word)`".into()))?;
        let vec_part = inner
            .trim_start()
            .strip_prefix('(')
            .ok_or_else(|| bad("expected inner `(v1,…,vd)` vector".into()))?;
        let (vec_str, rest) =
            vec_part.split_once(')').ok_or_else(|| bad("unclosed vector part".into()))?;
        let rest = rest.trim_start();
        let word_str =
            rest.strip_prefix(',').ok_or_else(|| bad("expected `,word` after vector".into()))?;
        let mut vec = Vec::new();
        for piece in vec_str.split(',') {
            let v: i64 = piece
                .trim()
                .parse()
                .map_err(|_| bad(format!("vector entry `{}` is not an integer", piece.trim())))?;
            vec.push(v);
        }
        if vec.len() != self.dim {
            return Err(bad(format!("expected {} vector entries, got {}", self.dim, vec.len())));
        }
        let mut word: Word = Vec::new();
        let word_str = word_str.trim();
        if !(word_str.is_empty() || word_str == "e" || word_str == "ε") {
            for tokenpiece in word_str.split_whitespace() {
                let (label, exp) = match tokenpiece.split_once('^') {
                    Some((l, e)) => {
                        let exp: u32 = e.parse().map_err(|_| {
                            bad(format!("exponent `{e}` is not a positive integer"))
                        })?;
                        (l, exp)
                    }
                    None => (tokenpiece, 1),
                };
                let gidx = self
                    .labels
                    .iter()
                    .position(|l| l == label)
                    .ok_or_else(|| bad(format!("unknown generator `{label}`")))?;
                word.push((gidx as u8, exp));
            }
        }
        self.element(&vec, &word)
    }

    fn format_element(&self, e: &MonoidElement) -> String {
        match self.parts(e) {
            Ok((vec, word)) => {
                let vs: Vec<String> = vec.iter().map(|v| v.to_string()).collect();
                let ws = if word.is_empty() {
                    "e".to_string()
                } else {
                    word.iter()
                        .map(|&(g, e)| {
                            if e == 1 {
                                self.labels[g as usize].clone()
                            } else {
                                format!("{}^{}", self.labels[g as usize], e)
                            }
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                format!("(({}),{})", vs.join(","), ws)
            }
            Err(_) => format!("{:?}", e.payload),
        }
    }

    fn random_element(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement {
        let bound = i64::from(size.max(1));
        let vec: Vec<i64> = (0..self.dim).map(|_| rng.gen_range(-bound..=bound)).collect();
        let len = rng.gen_range(0..=3usize);
        let word: Word = (0..len).map(|_| (rng.gen_range(0..self.labels.len()) as u8, 1)).collect();
        self.element(&vec, &word).expect("random element in range")
    }

    fn random_core(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement {
        let bound = i64::from(size.max(1));
        let vec: Vec<i64> = (0..self.dim).map(|_| rng.gen_range(-bound..=bound)).collect();
        let word: Word = match &self.mode {
            PMode::Involutive { x, .. } if rng.gen_bool(0.5) => vec![(*x, 1)],
            _ => Vec::new(),
        };
        self.element(&vec, &word).expect("random core in range")
    }
}
