//! Brute-force bounded enumerations that independently cross-check the
//! closed-form primitives.
//!
//! Nothing here consults the algebra-specific fast paths: right-multiple
//! sets are grown generator by generator, ℕ^× factorizations try every
//! divisor order, and collisions are found by exhaustive product maps.
//! The checks are bounded (a search that finds nothing certifies only the
//! searched region) but any positive finding is a genuine witness.

use std::collections::{BTreeMap, BTreeSet};

use crate::kernel::{KResult, KernelError, LcmOutcome, MonoidElement, MonoidHandle};

/// Guard on the size of enumerated right-multiple sets.
pub const MAX_MULTIPLES: usize = 100_000;

/// All products s·g₁⋯g_k with k ≤ depth over the family's oracle
/// generators, deduplicated (includes s itself).
pub fn right_multiples(
    handle: &MonoidHandle,
    s: &MonoidElement,
    depth: usize,
) -> KResult<BTreeSet<MonoidElement>> {
    let gens = handle.oracle_generators();
    let mut seen: BTreeSet<MonoidElement> = BTreeSet::new();
    seen.insert(s.clone());
    let mut frontier: Vec<MonoidElement> = vec![s.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for m in &frontier {
            for g in &gens {
                if seen.len() >= MAX_MULTIPLES {
                    return Ok(seen);
                }
                let mg = handle.multiply(m, g)?;
                if seen.insert(mg.clone()) {
                    next.push(mg);
                }
            }
        }
        frontier = next;
    }
    Ok(seen)
}

/// Common right multiples of s and t discoverable within the depth bound,
/// ascending.
pub fn common_multiples(
    handle: &MonoidHandle,
    s: &MonoidElement,
    t: &MonoidElement,
    depth: usize,
) -> KResult<Vec<MonoidElement>> {
    let of_s = right_multiples(handle, s, depth)?;
    let of_t = right_multiples(handle, t, depth)?;
    Ok(of_s.intersection(&of_t).cloned().collect())
}

/// Validates a right-LCM verdict against the bounded search: a claimed
/// meet must be a common multiple that left-divides every discovered
/// common multiple; a claimed orthogonality must leave the search
/// empty-handed.
pub fn check_lcm_by_search(
    handle: &MonoidHandle,
    s: &MonoidElement,
    t: &MonoidElement,
    depth: usize,
) -> KResult<()> {
    let found = common_multiples(handle, s, t, depth)?;
    match handle.right_lcm(s, t)? {
        LcmOutcome::Orthogonal => {
            if let Some(m) = found.first() {
                return Err(KernelError::Contract(format!(
                    "claimed orthogonal, but {} is a common right multiple of {} and {}",
                    handle.format_element(m),
                    handle.format_element(s),
                    handle.format_element(t)
                )));
            }
            Ok(())
        }
        LcmOutcome::Meet { lcm, cofactor_left, cofactor_right } => {
            if handle.multiply(s, &cofactor_left)? != lcm
                || handle.multiply(t, &cofactor_right)? != lcm
            {
                return Err(KernelError::Contract(format!(
                    "cofactors of {} ⋒ {} do not reproduce the claimed lcm",
                    handle.format_element(s),
                    handle.format_element(t)
                )));
            }
            for m in &found {
                if handle.left_divide(&lcm, m)?.is_none() {
                    return Err(KernelError::Contract(format!(
                        "common multiple {} of {} and {} is not divisible by the claimed lcm {}",
                        handle.format_element(m),
                        handle.format_element(s),
                        handle.format_element(t),
                        handle.format_element(&lcm)
                    )));
                }
            }
            Ok(())
        }
    }
}

/// Every multiset of generators (≥ 2 each) whose product is n, found by
/// trying each divisor at each step and deduplicating sorted paths;
/// `n = 1` yields the empty product only.
pub fn brute_factorizations(n: u64, gens: &[u64]) -> Vec<Vec<u64>> {
    fn rec(n: u64, gens: &[u64], path: &mut Vec<u64>, out: &mut BTreeSet<Vec<u64>>) {
        if n == 1 {
            let mut multiset = path.clone();
            multiset.sort_unstable();
            out.insert(multiset);
            return;
        }
        for &g in gens {
            if g >= 2 && n % g == 0 {
                path.push(g);
                rec(n / g, gens, path, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    let mut path = Vec::new();
    if n >= 1 {
        rec(n, gens, &mut path, &mut out);
    }
    out.into_iter().collect()
}

/// Smallest product ≤ bound realized by two distinct generator multisets,
/// with every realizing multiset listed.
pub fn brute_collision(gens: &[u64], bound: u64) -> Option<(u64, Vec<Vec<u64>>)> {
    let mut realizations: BTreeMap<u64, BTreeSet<Vec<u64>>> = BTreeMap::new();
    let mut stack: Vec<(u64, Vec<u64>)> = vec![(1, Vec::new())];
    while let Some((prod, path)) = stack.pop() {
        for &g in gens {
            let next = match prod.checked_mul(g) {
                Some(v) if v <= bound => v,
                _ => continue,
            };
            let mut multiset = path.clone();
            multiset.push(g);
            multiset.sort_unstable();
            let entry = realizations.entry(next).or_default();
            if entry.insert(multiset.clone()) {
                stack.push((next, multiset));
            }
        }
    }
    realizations
        .into_iter()
        .find(|(_, ways)| ways.len() > 1)
        .map(|(n, ways)| (n, ways.into_iter().collect()))
}

/// Index of the unique transversal member core-equivalent to x, `None`
/// when no member matches, an error when two match (the fibre would not
/// be a transversal).
pub fn classify_into_transversal(
    handle: &MonoidHandle,
    members: &[MonoidElement],
    x: &MonoidElement,
) -> KResult<Option<usize>> {
    let mut hit: Option<usize> = None;
    for (i, m) in members.iter().enumerate() {
        if handle.core_equivalent(x, m)? {
            if let Some(j) = hit {
                return Err(KernelError::Contract(format!(
                    "element {} is equivalent to transversal members {j} and {i}",
                    handle.format_element(x)
                )));
            }
            hit = Some(i);
        }
    }
    Ok(hit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::presets;

    #[test]
    fn search_confirms_meets_and_orthogonality() {
        let h = presets::axb();
        let e = |s: &str| h.parse_element(s).unwrap();
        check_lcm_by_search(&h, &e("(0,2)"), &e("(1,3)"), 5).unwrap();
        check_lcm_by_search(&h, &e("(0,2)"), &e("(1,2)"), 5).unwrap();
        check_lcm_by_search(&h, &e("(3,1)"), &e("(0,6)"), 5).unwrap();

        let multiples = common_multiples(&h, &e("(0,2)"), &e("(1,3)"), 5).unwrap();
        assert!(!multiples.is_empty());
        // The canonical lcm witness is discoverable by raw search.
        assert!(multiples.contains(&e("(4,6)")));
    }

    #[test]
    fn brute_factorizations_enumerate_all_multisets() {
        assert_eq!(brute_factorizations(12, &[2, 3]), vec![vec![2, 2, 3]]);
        assert_eq!(brute_factorizations(1, &[2, 3]), vec![Vec::<u64>::new()]);
        assert!(brute_factorizations(7, &[2, 3]).is_empty());
        assert_eq!(brute_factorizations(36, &[4, 6, 9]), vec![vec![4, 9], vec![6, 6]]);
    }

    #[test]
    fn collisions_are_found_exhaustively() {
        let (n, ways) = brute_collision(&[4, 6, 9], 100).unwrap();
        assert_eq!(n, 36);
        assert_eq!(ways, vec![vec![4, 9], vec![6, 6]]);
        assert!(brute_collision(&[2, 3], 10_000).is_none());
    }

    #[test]
    fn transversal_classification_is_unique() {
        let h = presets::axb();
        let e = |s: &str| h.parse_element(s).unwrap();
        let members = vec![e("(0,2)"), e("(1,2)")];
        assert_eq!(classify_into_transversal(&h, &members, &e("(4,2)")).unwrap(), Some(0));
        assert_eq!(classify_into_transversal(&h, &members, &e("(3,2)")).unwrap(), Some(1));
        // A core perturbation keeps the class.
        let shifted = h.multiply(&e("(1,2)"), &e("(5,1)")).unwrap();
        assert_eq!(classify_into_transversal(&h, &members, &shifted).unwrap(), Some(1));
    }
}
