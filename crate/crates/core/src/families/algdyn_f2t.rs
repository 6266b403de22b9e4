//! The polynomial dynamical monoid 𝔽₂[t] ⋊ P where P is the multiplicative
//! monoid generated by the two coprime irreducibles t and 1+t.
//!
//! Elements are pairs (g, t^a(1+t)^b) with g ∈ 𝔽₂[t], multiplied by
//! (g, m)(h, m') = (g + m·h, m·m').  Principal ideals factor as
//! (g + m·𝔽₂[t]) × m·P, and because 𝔽₂[t] is a principal ideal domain the
//! ideal intersection is always principal: two elements meet exactly when
//! their translation parts agree modulo gcd(m, m') = t^{min a}(1+t)^{min b},
//! and the meet is found by a polynomial Chinese remainder step.
//!
//! The additive group 𝔽₂[t] is a group, so pure translations are units; the
//! core consists exactly of them.  Noncore irreducibles are the elements
//! whose P-part is a single letter (t or 1+t); each letter contributes two
//! classes (residues 0 and 1 modulo the letter), giving the class list
//! [(0,t), (1,t), (0,1+t), (1,1+t)].
//!
//! Polynomials are stored as bit masks (bit i = coefficient of t^i).

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand::RngCore;

use crate::f2poly;
use crate::kernel::{
    check_same_family, Exhaustiveness, Family, IrreducibleFactorization, KResult, KernelError,
    LcmOutcome, MonoidElement, Payload,
};

pub struct PolyFamily {
    tag: Arc<str>,
}

impl Default for PolyFamily {
    fn default() -> Self {
        PolyFamily { tag: Arc::from("alg-dyn-f2t") }
    }
}

impl PolyFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn element(&self, poly: BigUint, a: u32, b: u32) -> MonoidElement {
        MonoidElement::new(&self.tag, Payload::BitPoly { poly, a, b })
    }

    pub fn element_u64(&self, poly: u64, a: u32, b: u32) -> MonoidElement {
        self.element(BigUint::from(poly), a, b)
    }

    fn parts<'a>(&self, s: &'a MonoidElement) -> KResult<(&'a BigUint, u32, u32)> {
        match &s.payload {
            Payload::BitPoly { poly, a, b } if s.family_tag == self.tag => Ok((poly, *a, *b)),
            _ => Err(KernelError::Contract(format!(
                "foreign element in polynomial family: {:?}",
                s.payload
            ))),
        }
    }

    fn poly_to_string(p: &BigUint) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        for i in 0..=f2poly::deg(p).unwrap_or(0) {
            if p.bit(i) {
                terms.push(match i {
                    0 => "1".to_string(),
                    1 => "t".to_string(),
                    k => format!("t^{k}"),
                });
            }
        }
        terms.join("+")
    }

    fn poly_from_string(s: &str) -> Result<BigUint, String> {
        let s = s.trim();
        if s == "0" {
            return Ok(BigUint::zero());
        }
        let mut out = BigUint::zero();
        for term in s.split('+') {
            let term = term.trim();
            let bit: u64 = if term == "1" {
                0
            } else if term == "t" {
                1
            } else if let Some(e) = term.strip_prefix("t^") {
                e.parse().map_err(|_| format!("bad exponent in term `{term}`"))?
            } else {
                return Err(format!("unrecognized term `{term}`"));
            };
            if out.bit(bit) {
                return Err(format!("repeated term `{term}`"));
            }
            out.set_bit(bit, true);
        }
        Ok(out)
    }
}

impl Family for PolyFamily {
    fn tag(&self) -> &Arc<str> {
        &self.tag
    }

    fn unit(&self) -> MonoidElement {
        self.element(BigUint::zero(), 0, 0)
    }

    fn multiply(&self, s: &MonoidElement, t: &MonoidElement) -> KResult<MonoidElement> {
        check_same_family(s, t)?;
        let (g, a, b) = self.parts(s)?;
        let (h, c, d) = self.parts(t)?;
        let m = f2poly::t_onet_power(a, b);
        let moved = f2poly::mul(&m, h);
        let sum = f2poly::add(g, &moved);
        let a2 = a.checked_add(c).ok_or_else(|| KernelError::Overflow("exponent a".into()))?;
        let b2 = b.checked_add(d).ok_or_else(|| KernelError::Overflow("exponent b".into()))?;
        Ok(self.element(sum, a2, b2))
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
        let (g, a, b) = self.parts(s)?;
        let (h, c, d) = self.parts(t)?;
        let mu = f2poly::t_onet_power(a, b);
        let mv = f2poly::t_onet_power(c, d);
        let big_a = a.max(c);
        let big_b = b.max(d);
        let Some(c0) = f2poly::crt(g, &mu, h, &mv) else {
            return Ok(LcmOutcome::Orthogonal);
        };
        let lcm = self.element(c0.clone(), big_a, big_b);
        let quot = |base: &BigUint, modulus: &BigUint| -> KResult<BigUint> {
            let diff = f2poly::add(&c0, base);
            let (q, r) = f2poly::divmod(&diff, modulus);
            if !r.is_zero() {
                return Err(KernelError::Contract(
                    "CRT solution escaped its defining congruence".into(),
                ));
            }
            Ok(q)
        };
        let cofactor_left = self.element(quot(g, &mu)?, big_a - a, big_b - b);
        let cofactor_right = self.element(quot(h, &mv)?, big_a - c, big_b - d);
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
        self.parts(s).map(|(_, a, b)| a == 0 && b == 0).unwrap_or(false)
    }

    fn is_unit(&self, s: &MonoidElement) -> bool {
        self.is_core(s)
    }

    fn invert_unit(&self, s: &MonoidElement) -> KResult<MonoidElement> {
        let (g, a, b) = self.parts(s)?;
        if a != 0 || b != 0 {
            return Err(KernelError::NotUnit(self.format_element(s)));
        }
        // Characteristic two: translations are self-inverse.
        Ok(self.element(g.clone(), 0, 0))
    }

    fn is_noncore_irreducible(&self, s: &MonoidElement) -> bool {
        self.parts(s).map(|(_, a, b)| a + b == 1).unwrap_or(false)
    }

    fn factor_noncore(&self, s: &MonoidElement) -> KResult<IrreducibleFactorization> {
        let (g, a, b) = self.parts(s)?;
        if a == 0 && b == 0 {
            return Err(KernelError::NotFactorable(self.format_element(s)));
        }
        let t_poly = BigUint::from(2u32);
        let onet = BigUint::from(3u32);
        let mut remaining = g.clone();
        let mut letters = Vec::with_capacity((a + b) as usize);
        for _ in 0..a {
            let rep = if remaining.bit(0) { BigUint::one() } else { BigUint::zero() };
            letters.push(self.element(rep.clone(), 1, 0));
            remaining = f2poly::add(&remaining, &rep);
            let (q, r) = f2poly::divmod(&remaining, &t_poly);
            debug_assert!(r.is_zero());
            remaining = q;
        }
        for _ in 0..b {
            // Residue modulo 1+t is the value at t = 1, i.e. the bit parity.
            let parity = remaining.count_ones() & 1;
            let rep = if parity == 1 { BigUint::one() } else { BigUint::zero() };
            letters.push(self.element(rep.clone(), 0, 1));
            remaining = f2poly::add(&remaining, &rep);
            let (q, r) = f2poly::divmod(&remaining, &onet);
            debug_assert!(r.is_zero());
            remaining = q;
        }
        let f = IrreducibleFactorization {
            source: s.clone(),
            letters,
            left_core: self.unit(),
            right_core: self.element(remaining, 0, 0),
        };
        let mut acc = self.unit();
        for l in &f.letters {
            acc = self.multiply(&acc, l)?;
        }
        acc = self.multiply(&acc, &f.right_core)?;
        if acc != *s {
            return Err(KernelError::Contract(format!(
                "polynomial factorization of {} does not multiply back",
                self.format_element(s)
            )));
        }
        Ok(f)
    }

    fn irreducible_classes(&self, cap: usize) -> (Vec<MonoidElement>, Exhaustiveness) {
        let all = vec![
            self.element_u64(0, 1, 0),
            self.element_u64(1, 1, 0),
            self.element_u64(0, 0, 1),
            self.element_u64(1, 0, 1),
        ];
        if cap >= all.len() {
            return (all, Exhaustiveness::Total);
        }
        let ex = if cap == 2 {
            // The two letters generate one two-class block each; a cut at
            // the block boundary keeps whole coconnected components.
            Exhaustiveness::ComponentComplete
        } else {
            Exhaustiveness::Truncated
        };
        (all.into_iter().take(cap).collect(), ex)
    }

    fn core_generators(&self) -> Vec<MonoidElement> {
        vec![self.element_u64(1, 0, 0), self.element_u64(2, 0, 0)]
    }

    fn oracle_generators(&self) -> Vec<MonoidElement> {
        vec![
            self.element_u64(1, 0, 0),
            self.element_u64(0, 1, 0),
            self.element_u64(1, 1, 0),
            self.element_u64(0, 0, 1),
        ]
    }

    fn spot_samples(&self) -> Vec<MonoidElement> {
        vec![
            self.element_u64(0b110, 2, 1),
            self.element_u64(0b1011, 1, 1),
            self.element_u64(0, 1, 1),
        ]
    }

    fn parse_element(&self, spec: &str) -> KResult<MonoidElement> {
        let bad = |msg: String| KernelError::ElementParse { spec: spec.to_string(), message: msg };
        let inner = spec
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("expected `(poly; a, b)`".into()))?;
        let (poly_str, exps) =
            inner.split_once(';').ok_or_else(|| bad("expected `;` after polynomial".into()))?;
        let poly = Self::poly_from_string(poly_str).map_err(bad)?;
        let (a_str, b_str) =
            exps.split_once(',').ok_or_else(|| bad("expected `a, b` exponents".into()))?;
        let a: u32 = a_str
            .trim()
            .parse()
            .map_err(|_| bad(format!("exponent `{}` is not a natural number", a_str.trim())))?;
        let b: u32 = b_str
            .trim()
            .parse()
            .map_err(|_| bad(format!("exponent `{}` is not a natural number", b_str.trim())))?;
        Ok(self.element(poly, a, b))
    }

    fn format_element(&self, e: &MonoidElement) -> String {
        match self.parts(e) {
            Ok((poly, a, b)) => format!("({}; {}, {})", Self::poly_to_string(poly), a, b),
            Err(_) => format!("{:?}", e.payload),
        }
    }

    fn random_element(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement {
        let bits = (size.min(24) + 1) as u64;
        let mut poly = BigUint::zero();
        for i in 0..bits {
            if rng.gen_bool(0.5) {
                poly.set_bit(i, true);
            }
        }
        self.element(poly, rng.gen_range(0..3), rng.gen_range(0..3))
    }

    fn random_core(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement {
        let bits = (size.min(24) + 1) as u64;
        let mut poly = BigUint::zero();
        for i in 0..bits {
            if rng.gen_bool(0.5) {
                poly.set_bit(i, true);
            }
        }
        self.element(poly, 0, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::MonoidHandle;

    fn handle() -> (MonoidHandle, Arc<PolyFamily>) {
        let fam = Arc::new(PolyFamily::new());
        (MonoidHandle::from_family(fam.clone()), fam)
    }

    #[test]
    fn multiplication_twists_by_the_modulus() {
        let (h, f) = handle();
        // (1, t)·(1, 1) = (1 + t·1, t) = (1+t, t).
        let s = f.element_u64(1, 1, 0);
        let t = f.element_u64(1, 0, 0);
        assert_eq!(h.multiply(&s, &t).unwrap(), f.element_u64(0b11, 1, 0));
        // (t, 1+t)·(t, t) = (t + (1+t)t, t(1+t)) = (t+t+t², ·) = (t², ·).
        let s = f.element_u64(0b10, 0, 1);
        let t = f.element_u64(0b10, 1, 0);
        assert_eq!(h.multiply(&s, &t).unwrap(), f.element_u64(0b100, 1, 1));
    }

    #[test]
    fn meets_follow_polynomial_crt() {
        let (h, f) = handle();
        // Multiples of t versus 1 + (1+t)·𝔽₂[t]: coprime moduli always meet.
        let s = f.element_u64(0, 1, 0);
        let t = f.element_u64(1, 0, 1);
        match h.right_lcm(&s, &t).unwrap() {
            LcmOutcome::Meet { lcm, cofactor_left, cofactor_right } => {
                assert_eq!(lcm, f.element_u64(0b10, 1, 1)); // (t, t(1+t))
                assert_eq!(cofactor_left, f.element_u64(1, 0, 1));
                assert_eq!(cofactor_right, f.element_u64(1, 1, 0));
            }
            LcmOutcome::Orthogonal => panic!("coprime moduli must meet"),
        }
        // Same modulus, different residue: orthogonal.
        let s = f.element_u64(0, 1, 0);
        let t = f.element_u64(1, 1, 0);
        assert!(!h.intersects(&s, &t).unwrap());
        // Congruent translations: equivalent (cofactors are units).
        let s = f.element_u64(0, 1, 0);
        let t = f.element_u64(0b10, 1, 0);
        assert!(h.core_equivalent(&s, &t).unwrap());
    }

    #[test]
    fn divisibility_of_translation_difference_decides_meets() {
        let (h, f) = handle();
        // (g, t(1+t)) vs (h', t(1+t)): meet iff t(1+t) | g + h'.
        let cases = [
            (0b000u64, 0b110u64, true), // 0 + t+t² = t(1+t) ✓
            (0b001, 0b111, true),       // 1 + (1+t+t²) = t+t² ✓
            (0b001, 0b011, false),      // 1 + (1+t) = t, not divisible by 1+t
            (0b010, 0b100, true),       // t + t² ✓
        ];
        for (g, h2, expect) in cases {
            let s = f.element_u64(g, 1, 1);
            let t = f.element_u64(h2, 1, 1);
            assert_eq!(h.intersects(&s, &t).unwrap(), expect, "g={g:b} h={h2:b}");
        }
    }

    #[test]
    fn classes_are_two_per_letter() {
        let (h, f) = handle();
        let (classes, ex) = h.irreducible_classes(16);
        assert_eq!(
            classes,
            vec![
                f.element_u64(0, 1, 0),
                f.element_u64(1, 1, 0),
                f.element_u64(0, 0, 1),
                f.element_u64(1, 0, 1),
            ]
        );
        assert_eq!(ex, Exhaustiveness::Total);
        let (_, ex) = h.irreducible_classes(2);
        assert_eq!(ex, Exhaustiveness::ComponentComplete);
        let (_, ex) = h.irreducible_classes(3);
        assert_eq!(ex, Exhaustiveness::Truncated);
    }

    #[test]
    fn factorization_peels_residues() {
        let (h, f) = handle();
        // (t+t², t²(1+t)) = (0,t)(1,t)(1,1+t)·(0,1).
        let s = f.element_u64(0b110, 2, 1);
        let fac = h.factor_noncore(&s).unwrap();
        assert_eq!(
            fac.letters,
            vec![f.element_u64(0, 1, 0), f.element_u64(1, 1, 0), f.element_u64(1, 0, 1)]
        );
        assert!(h.is_core(&fac.right_core));
        h.verify_factorization(&fac).unwrap();
    }

    #[test]
    fn translations_are_self_inverse_units() {
        let (h, f) = handle();
        let g = f.element_u64(0b101, 0, 0);
        assert!(h.is_unit(&g) && h.is_core(&g));
        assert_eq!(h.invert_unit(&g).unwrap(), g);
        assert_eq!(h.multiply(&g, &g).unwrap(), h.unit());
        assert!(!h.is_unit(&f.element_u64(0, 1, 0)));
    }

    #[test]
    fn parse_format_roundtrip() {
        let (h, _) = handle();
        for s in ["(0; 0, 0)", "(1+t; 1, 2)", "(t^3; 0, 1)", "(1+t^2+t^5; 2, 0)"] {
            let e = h.parse_element(s).unwrap();
            assert_eq!(h.format_element(&e), s);
        }
        assert!(h.parse_element("(1+t)").is_err());
        assert!(h.parse_element("(q; 1, 1)").is_err());
        assert!(h.parse_element("(1+1; 1, 1)").is_err());
    }
}
