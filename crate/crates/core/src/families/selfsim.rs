//! Self-similar monoids X* ⋈ G: pairs (w, g) of a word over a finite
//! alphabet X and an element of a finite group G acting self-similarly,
//! multiplied by (v, g)(w, h) = (v · g(w), g|_w · h).
//!
//! The action is given by explicit tables: `action[g][x]` is the image
//! letter, `restriction[g][x]` the restricted group element, extended to
//! words by g(xw) = g(x) · g|_x(w) and g|_{xw} = (g|_x)|_w.
//!
//! * Principal right ideals depend only on the word: (w, g)S = {(u, k) : w
//!   is a prefix of u}. Hence s ⋒ t iff the words are prefix-comparable, and
//!   the core is {(ε, g)} ≅ G (which is also the unit group).
//! * Noncore irreducibles are the (x, g) with |x| = 1; (x, g) ∼ (y, h) iff
//!   x = y, so ∼-classes correspond to letters, all pairwise orthogonal:
//!   the class graph is edge-free and coconnectedly a single block of
//!   cardinality |X|.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use rand::RngCore;

use crate::families::{tag_digest, ConfigError, SelfSimilarSection};
use crate::kernel::{
    check_same_family, Exhaustiveness, Family, IrreducibleFactorization, KResult, KernelError,
    LcmOutcome, MonoidElement, Payload,
};

const MAX_TABLE: usize = 64;

#[derive(Debug)]
pub struct SelfSimilarFamily {
    tag: Arc<str>,
    alphabet: Vec<char>,
    group: Vec<String>,
    identity: u8,
    mul: Vec<Vec<u8>>,
    inv: Vec<u8>,
    action: Vec<Vec<u8>>,
    restriction: Vec<Vec<u8>>,
}

impl SelfSimilarFamily {
    pub fn from_section(section: &SelfSimilarSection) -> Result<Self, ConfigError> {
        fn field(f: &str, m: impl Into<String>) -> ConfigError {
            ConfigError::field(f, m)
        }
        // Alphabet: distinct single characters (so element syntax is
        // unambiguous).
        if section.alphabet.is_empty() || section.alphabet.len() > MAX_TABLE {
            return Err(field(
                "self_similar.alphabet",
                format!("need between 1 and {MAX_TABLE} letters, got {}", section.alphabet.len()),
            ));
        }
        let mut alphabet = Vec::with_capacity(section.alphabet.len());
        for label in &section.alphabet {
            let mut chars = label.chars();
            let (c, rest) = (chars.next(), chars.next());
            match (c, rest) {
                (Some(c), None) if !c.is_whitespace() && !"(),ε".contains(c) => alphabet.push(c),
                _ => {
                    return Err(field(
                        "self_similar.alphabet",
                        format!("letter label `{label}` must be a single plain character"),
                    ))
                }
            }
        }
        if alphabet.iter().collect::<BTreeSet<_>>().len() != alphabet.len() {
            return Err(field("self_similar.alphabet", "letter labels must be distinct"));
        }
        // Group labels.
        if section.group.is_empty() || section.group.len() > MAX_TABLE {
            return Err(field(
                "self_similar.group",
                format!("need between 1 and {MAX_TABLE} elements, got {}", section.group.len()),
            ));
        }
        if section.group.iter().collect::<BTreeSet<_>>().len() != section.group.len() {
            return Err(field("self_similar.group", "group labels must be distinct"));
        }
        let group = section.group.clone();
        let g_index = |label: &str, fieldname: &str| -> Result<u8, ConfigError> {
            group
                .iter()
                .position(|l| l == label)
                .map(|i| i as u8)
                .ok_or_else(|| field(fieldname, format!("unknown group label `{label}`")))
        };
        let x_index = |label: &str, fieldname: &str| -> Result<u8, ConfigError> {
            let mut chars = label.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => alphabet
                    .iter()
                    .position(|&a| a == c)
                    .map(|i| i as u8)
                    .ok_or_else(|| field(fieldname, format!("unknown letter label `{label}`"))),
                _ => Err(field(fieldname, format!("unknown letter label `{label}`"))),
            }
        };
        let identity = g_index(&section.identity, "self_similar.identity")?;
        let ng = group.len();
        let nx = alphabet.len();
        // Multiplication table.
        if section.mul.len() != ng || section.mul.iter().any(|row| row.len() != ng) {
            return Err(field("self_similar.mul", format!("table must be {ng}×{ng}")));
        }
        let mut mul = vec![vec![0u8; ng]; ng];
        for (i, row) in section.mul.iter().enumerate() {
            for (j, label) in row.iter().enumerate() {
                mul[i][j] = g_index(label, "self_similar.mul")?;
            }
        }
        let e = identity as usize;
        #[allow(clippy::needless_range_loop)] // `i` indexes both axes of `mul`
        for i in 0..ng {
            if mul[e][i] != i as u8 || mul[i][e] != i as u8 {
                return Err(field("self_similar.mul", "identity row/column mismatch"));
            }
        }
        for a in 0..ng {
            for b in 0..ng {
                for c in 0..ng {
                    if mul[mul[a][b] as usize][c] != mul[a][mul[b][c] as usize] {
                        return Err(field(
                            "self_similar.mul",
                            format!(
                                "associativity fails at ({}, {}, {})",
                                group[a], group[b], group[c]
                            ),
                        ));
                    }
                }
            }
        }
        let mut inv = vec![u8::MAX; ng];
        for a in 0..ng {
            match (0..ng).find(|&b| mul[a][b] == identity && mul[b][a] == identity) {
                Some(b) => inv[a] = b as u8,
                None => {
                    return Err(field(
                        "self_similar.mul",
                        format!("element `{}` has no inverse", group[a]),
                    ))
                }
            }
        }
        // Action and restriction tables.
        if section.action.len() != ng || section.action.iter().any(|row| row.len() != nx) {
            return Err(field("self_similar.action", format!("table must be {ng}×{nx}")));
        }
        if section.restriction.len() != ng || section.restriction.iter().any(|row| row.len() != nx)
        {
            return Err(field("self_similar.restriction", format!("table must be {ng}×{nx}")));
        }
        let mut action = vec![vec![0u8; nx]; ng];
        let mut restriction = vec![vec![0u8; nx]; ng];
        for g in 0..ng {
            for x in 0..nx {
                action[g][x] = x_index(&section.action[g][x], "self_similar.action")?;
                restriction[g][x] =
                    g_index(&section.restriction[g][x], "self_similar.restriction")?;
            }
        }
        for g in 0..ng {
            let mut seen = vec![false; nx];
            for x in 0..nx {
                seen[action[g][x] as usize] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(field(
                    "self_similar.action",
                    format!("`{}` does not permute the alphabet", group[g]),
                ));
            }
        }
        for x in 0..nx {
            if action[e][x] != x as u8 {
                return Err(field("self_similar.action", "identity must fix every letter"));
            }
            if restriction[e][x] != identity {
                return Err(field("self_similar.restriction", "identity must restrict to itself"));
            }
        }
        // Self-similarity on products: (gh)(x) = g(h(x)) and
        // (gh)|_x = g|_{h(x)} · h|_x. With these, the extension to words of
        // any depth is well defined.
        for g in 0..ng {
            for h in 0..ng {
                for x in 0..nx {
                    let gh = mul[g][h] as usize;
                    let hx = action[h][x] as usize;
                    if action[gh][x] != action[g][hx] {
                        return Err(field(
                            "self_similar.action",
                            format!(
                                "product inconsistency: ({}·{})({}) ≠ {}({}({}))",
                                group[g], group[h], alphabet[x], group[g], group[h], alphabet[x]
                            ),
                        ));
                    }
                    if restriction[gh][x]
                        != mul[restriction[g][hx] as usize][restriction[h][x] as usize]
                    {
                        return Err(field(
                            "self_similar.restriction",
                            format!(
                                "restriction inconsistency at ({}·{})|_{}",
                                group[g], group[h], alphabet[x]
                            ),
                        ));
                    }
                }
            }
        }
        let digest = tag_digest(&format!(
            "{:?}|{:?}|{}|{:?}|{:?}|{:?}",
            alphabet, group, identity, section.mul, section.action, section.restriction
        ));
        Ok(SelfSimilarFamily {
            tag: Arc::from(format!("self-similar#{digest}")),
            alphabet,
            group,
            identity,
            mul,
            inv,
            action,
            restriction,
        })
    }

    pub fn element(&self, word: &[u8], g: u8) -> MonoidElement {
        assert!(word.iter().all(|&x| (x as usize) < self.alphabet.len()));
        assert!((g as usize) < self.group.len());
        MonoidElement::new(&self.tag, Payload::Auto { word: word.to_vec(), g })
    }

    fn parts<'a>(&self, s: &'a MonoidElement) -> KResult<(&'a [u8], u8)> {
        match &s.payload {
            Payload::Auto { word, g } if s.family_tag == self.tag => Ok((word, *g)),
            _ => Err(KernelError::Contract(format!(
                "foreign element in self-similar family: {:?}",
                s.payload
            ))),
        }
    }

    /// g(w) together with the restriction g|_w.
    fn act(&self, g: u8, word: &[u8]) -> (Vec<u8>, u8) {
        let mut cur = g;
        let mut image = Vec::with_capacity(word.len());
        for &x in word {
            image.push(self.action[cur as usize][x as usize]);
            cur = self.restriction[cur as usize][x as usize];
        }
        (image, cur)
    }
}

impl Family for SelfSimilarFamily {
    fn tag(&self) -> &Arc<str> {
        &self.tag
    }

    fn unit(&self) -> MonoidElement {
        self.element(&[], self.identity)
    }

    fn multiply(&self, s: &MonoidElement, t: &MonoidElement) -> KResult<MonoidElement> {
        check_same_family(s, t)?;
        let (v, g) = self.parts(s)?;
        let (w, h) = self.parts(t)?;
        let (gw, g_rest) = self.act(g, w);
        let mut word = v.to_vec();
        word.extend_from_slice(&gw);
        Ok(self.element(&word, self.mul[g_rest as usize][h as usize]))
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
        let (v, g) = self.parts(s)?;
        let (w, h) = self.parts(t)?;
        let ginv = self.inv[g as usize];
        let hinv = self.inv[h as usize];
        if v == w {
            // Same ideal: canonical generator (v, e).
            return Ok(LcmOutcome::Meet {
                lcm: self.element(v, self.identity),
                cofactor_left: self.element(&[], ginv),
                cofactor_right: self.element(&[], hinv),
            });
        }
        if w.len() > v.len() && w[..v.len()] == *v {
            // tS ⊆ sS: the LCM ideal is (w, e)S.
            let u = &w[v.len()..];
            let (u_pre, _) = self.act(ginv, u); // u_pre = g⁻¹(u)
            let (u_check, g_rest) = self.act(g, &u_pre);
            debug_assert_eq!(u_check, u);
            return Ok(LcmOutcome::Meet {
                lcm: self.element(w, self.identity),
                cofactor_left: self.element(&u_pre, self.inv[g_rest as usize]),
                cofactor_right: self.element(&[], hinv),
            });
        }
        if v.len() > w.len() && v[..w.len()] == *w {
            let u = &v[w.len()..];
            let (u_pre, _) = self.act(hinv, u);
            let (u_check, h_rest) = self.act(h, &u_pre);
            debug_assert_eq!(u_check, u);
            return Ok(LcmOutcome::Meet {
                lcm: self.element(v, self.identity),
                cofactor_left: self.element(&[], ginv),
                cofactor_right: self.element(&u_pre, self.inv[h_rest as usize]),
            });
        }
        Ok(LcmOutcome::Orthogonal)
    }

    fn is_core(&self, s: &MonoidElement) -> bool {
        self.parts(s).map(|(w, _)| w.is_empty()).unwrap_or(false)
    }

    fn is_unit(&self, s: &MonoidElement) -> bool {
        self.is_core(s)
    }

    fn invert_unit(&self, s: &MonoidElement) -> KResult<MonoidElement> {
        let (w, g) = self.parts(s)?;
        if !w.is_empty() {
            return Err(KernelError::NotUnit(self.format_element(s)));
        }
        Ok(self.element(&[], self.inv[g as usize]))
    }

    fn is_noncore_irreducible(&self, s: &MonoidElement) -> bool {
        self.parts(s).map(|(w, _)| w.len() == 1).unwrap_or(false)
    }

    fn factor_noncore(&self, s: &MonoidElement) -> KResult<IrreducibleFactorization> {
        let (w, g) = self.parts(s)?;
        if w.is_empty() {
            return Err(KernelError::NotFactorable(self.format_element(s)));
        }
        // (x₁⋯x_k, g) = (x₁, e)(x₂, e)⋯(x_{k−1}, e)(x_k, g) exactly.
        let mut letters: Vec<MonoidElement> =
            w[..w.len() - 1].iter().map(|&x| self.element(&[x], self.identity)).collect();
        letters.push(self.element(&[w[w.len() - 1]], g));
        let f = IrreducibleFactorization {
            source: s.clone(),
            letters,
            left_core: self.unit(),
            right_core: self.unit(),
        };
        let mut acc = self.unit();
        for l in &f.letters {
            acc = self.multiply(&acc, l)?;
        }
        if acc != *s {
            return Err(KernelError::Contract(format!(
                "self-similar factorization of {} does not multiply back",
                self.format_element(s)
            )));
        }
        Ok(f)
    }

    fn irreducible_classes(&self, cap: usize) -> (Vec<MonoidElement>, Exhaustiveness) {
        // (x, g) ∼ (x, h) for all g, h (cofactors against (x, e) are core),
        // and distinct letters are orthogonal: classes ↔ letters.
        let n = self.alphabet.len().min(cap);
        let classes = (0..n).map(|x| self.element(&[x as u8], self.identity)).collect();
        let ex = if n == self.alphabet.len() {
            Exhaustiveness::Total
        } else {
            Exhaustiveness::Truncated
        };
        (classes, ex)
    }

    fn core_generators(&self) -> Vec<MonoidElement> {
        (0..self.group.len() as u8)
            .filter(|&g| g != self.identity)
            .map(|g| self.element(&[], g))
            .collect()
    }

    fn oracle_generators(&self) -> Vec<MonoidElement> {
        let mut out: Vec<MonoidElement> =
            (0..self.alphabet.len() as u8).map(|x| self.element(&[x], self.identity)).collect();
        out.extend(self.core_generators());
        out
    }

    fn spot_samples(&self) -> Vec<MonoidElement> {
        let x0 = 0u8;
        let x1 = (self.alphabet.len() as u8).saturating_sub(1);
        let g_last = (self.group.len() as u8) - 1;
        vec![
            self.element(&[x0, x1], g_last),
            self.element(&[x1, x0, x0], self.identity),
            self.element(&[x0], g_last),
        ]
    }

    fn parse_element(&self, spec: &str) -> KResult<MonoidElement> {
        let bad = |msg: String| KernelError::ElementParse { spec: spec.to_string(), message: msg };
        let inner = spec
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("expected `(word,g)`".into()))?;
        let (ws, gs) = inner
            .split_once(',')
            .ok_or_else(|| bad("expected two comma-separated parts".into()))?;
        let ws = ws.trim();
        let mut word = Vec::new();
        if !(ws.is_empty() || ws == "ε") {
            for c in ws.chars() {
                match self.alphabet.iter().position(|&a| a == c) {
                    Some(i) => word.push(i as u8),
                    None => return Err(bad(format!("unknown letter `{c}`"))),
                }
            }
        }
        let gs = gs.trim();
        let g = self
            .group
            .iter()
            .position(|l| l == gs)
            .ok_or_else(|| bad(format!("unknown group label `{gs}`")))? as u8;
        Ok(self.element(&word, g))
    }

    fn format_element(&self, e: &MonoidElement) -> String {
        match self.parts(e) {
            Ok((w, g)) => {
                let word: String = if w.is_empty() {
                    "ε".to_string()
                } else {
                    w.iter().map(|&x| self.alphabet[x as usize]).collect()
                };
                format!("({word},{})", self.group[g as usize])
            }
            Err(_) => format!("{:?}", e.payload),
        }
    }

    fn random_element(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement {
        let len = rng.gen_range(0..=(size.min(5) as usize));
        let word: Vec<u8> = (0..len).map(|_| rng.gen_range(0..self.alphabet.len()) as u8).collect();
        let g = rng.gen_range(0..self.group.len()) as u8;
        self.element(&word, g)
    }

    fn random_core(&self, rng: &mut dyn RngCore, _size: u32) -> MonoidElement {
        let g = rng.gen_range(0..self.group.len()) as u8;
        self.element(&[], g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::presets;
    use crate::kernel::MonoidHandle;

    fn handle() -> MonoidHandle {
        presets::self_similar_binary().expect("valid preset")
    }

    fn family() -> SelfSimilarFamily {
        SelfSimilarFamily::from_section(&presets::self_similar_binary_section()).unwrap()
    }

    #[test]
    fn multiplication_follows_the_wreath_recursion() {
        let h = handle();
        let f = family();
        // s flips the first letter and restricts to e.
        let s = f.element(&[], 1);
        let w01 = f.element(&[0, 1], 0);
        let flipped = h.multiply(&s, &w01).unwrap();
        assert_eq!(flipped, f.element(&[1, 1], 0));
        // (0, s)(1, s) = (0 · s(1), s|_1 · s) = (00, s).
        let a = f.element(&[0], 1);
        let b = f.element(&[1], 1);
        assert_eq!(h.multiply(&a, &b).unwrap(), f.element(&[0, 0], 1));
    }

    #[test]
    fn meet_iff_prefix_comparable() {
        let h = handle();
        let f = family();
        let s = f.element(&[0], 0);
        let t = f.element(&[0, 1], 1);
        let u = f.element(&[1], 0);
        assert!(h.intersects(&s, &t).unwrap());
        assert!(h.intersects(&t, &s).unwrap());
        assert!(!h.intersects(&s, &u).unwrap());
        assert!(!h.intersects(&t, &u).unwrap());
    }

    #[test]
    fn lcm_identities_hold_exactly() {
        let h = handle();
        let f = family();
        let s = f.element(&[0], 1); // (0, s)
        let t = f.element(&[0, 1], 0); // (01, e)
        match h.right_lcm(&s, &t).unwrap() {
            LcmOutcome::Meet { lcm, cofactor_left, cofactor_right } => {
                assert_eq!(lcm, f.element(&[0, 1], 0));
                assert_eq!(h.multiply(&s, &cofactor_left).unwrap(), lcm);
                assert_eq!(h.multiply(&t, &cofactor_right).unwrap(), lcm);
                // s = (0,s) needs cofactor ((s⁻¹)(1), e) = (0, e): the
                // first-letter flip has trivial restrictions.
                assert_eq!(cofactor_left, f.element(&[0], 0));
            }
            LcmOutcome::Orthogonal => panic!("prefix-comparable words must meet"),
        }
    }

    #[test]
    fn same_word_elements_are_equivalent() {
        let h = handle();
        let f = family();
        let a = f.element(&[1], 0);
        let b = f.element(&[1], 1);
        assert!(h.core_equivalent(&a, &b).unwrap());
        let (ca, cb) = h.core_equivalence_witness(&a, &b).unwrap().unwrap();
        assert_eq!(h.multiply(&a, &ca).unwrap(), h.multiply(&b, &cb).unwrap());
        assert!(!h.core_equivalent(&f.element(&[0], 0), &f.element(&[1], 0)).unwrap());
    }

    #[test]
    fn core_is_the_group_fiber() {
        let h = handle();
        let f = family();
        assert!(h.is_core(&f.element(&[], 1)));
        assert!(h.is_unit(&f.element(&[], 1)));
        assert!(!h.is_core(&f.element(&[0], 1)));
        let inv = h.invert_unit(&f.element(&[], 1)).unwrap();
        assert_eq!(h.multiply(&f.element(&[], 1), &inv).unwrap(), h.unit());
    }

    #[test]
    fn factorization_peels_letters() {
        let h = handle();
        let f = family();
        let s = f.element(&[0, 1, 1], 1);
        let fac = h.factor_noncore(&s).unwrap();
        assert_eq!(fac.letters.len(), 3);
        assert_eq!(fac.letters[0], f.element(&[0], 0));
        assert_eq!(fac.letters[1], f.element(&[1], 0));
        assert_eq!(fac.letters[2], f.element(&[1], 1));
        h.verify_factorization(&fac).unwrap();
    }

    #[test]
    fn classes_are_letters() {
        let h = handle();
        let f = family();
        let (classes, ex) = h.irreducible_classes(16);
        assert_eq!(classes, vec![f.element(&[0], 0), f.element(&[1], 0)]);
        assert_eq!(ex, Exhaustiveness::Total);
        let (classes, ex) = h.irreducible_classes(1);
        assert_eq!(classes.len(), 1);
        assert_eq!(ex, Exhaustiveness::Truncated);
    }

    #[test]
    fn parse_format_roundtrip() {
        let h = handle();
        for s in ["(ε,e)", "(01,s)", "(1,e)"] {
            let e = h.parse_element(s).unwrap();
            assert_eq!(h.format_element(&e), s);
        }
        assert_eq!(h.parse_element("(,s)").unwrap(), h.parse_element("(ε,s)").unwrap());
        assert!(h.parse_element("(02,e)").is_err());
        assert!(h.parse_element("(01,q)").is_err());
    }

    #[test]
    fn invalid_tables_are_named() {
        let mut section = presets::self_similar_binary_section();
        section.mul[1][1] = "s".into(); // breaks s·s = e, so no inverse
        let err = SelfSimilarFamily::from_section(&section).unwrap_err();
        assert!(err.to_string().contains("self_similar.mul"), "{err}");

        let mut section = presets::self_similar_binary_section();
        section.action[1] = vec!["0".into(), "0".into()];
        let err = SelfSimilarFamily::from_section(&section).unwrap_err();
        assert!(err.to_string().contains("self_similar.action"), "{err}");

        let mut section = presets::self_similar_binary_section();
        section.restriction[1] = vec!["s".into(), "e".into()];
        let err = SelfSimilarFamily::from_section(&section).unwrap_err();
        assert!(err.to_string().contains("restriction"), "{err}");
    }
}
