//! The affine monoid ℕ ⋊ ℕ^× of maps x ↦ m + p·x with m ≥ 0, p ≥ 1 under
//! composition: (m, p)(n, q) = (m + p·n, p·q).
//!
//! * Core: the translations (m, 1); the unit group is trivial.
//! * Two elements meet iff their translation parts agree modulo
//!   gcd of the ratio parts; the right LCM is realized by the smallest
//!   nonnegative common value of the two congruences that dominates both
//!   translation parts.
//! * Noncore irreducible ⟺ the ratio part is prime; (m, p) ∼ (m', p) iff
//!   m ≡ m' (mod p), so the ∼-classes of irreducibles form one component
//!   V_p = {[(k, p)] | 0 ≤ k < p} per prime p, of cardinality p.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use rand::RngCore;

use crate::kernel::{
    check_same_family, Exhaustiveness, Family, IrreducibleFactorization, KResult, KernelError,
    LcmOutcome, MonoidElement, Payload,
};
use crate::numutil;

pub struct AxBFamily {
    tag: Arc<str>,
}

impl AxBFamily {
    pub fn new() -> Self {
        AxBFamily { tag: Arc::from("axb") }
    }

    pub fn element(&self, m: u64, p: u64) -> MonoidElement {
        assert!(p >= 1, "ratio part must be positive");
        MonoidElement::new(&self.tag, Payload::Affine { m: BigUint::from(m), p: BigUint::from(p) })
    }

    fn parts<'a>(&self, s: &'a MonoidElement) -> KResult<(&'a BigUint, &'a BigUint)> {
        match &s.payload {
            Payload::Affine { m, p } if s.family_tag == self.tag => Ok((m, p)),
            _ => Err(KernelError::Contract(format!(
                "foreign element in affine family: {:?}",
                s.payload
            ))),
        }
    }

    fn make(&self, m: BigUint, p: BigUint) -> MonoidElement {
        MonoidElement::new(&self.tag, Payload::Affine { m, p })
    }
}

impl Default for AxBFamily {
    fn default() -> Self {
        Self::new()
    }
}

impl Family for AxBFamily {
    fn tag(&self) -> &Arc<str> {
        &self.tag
    }

    fn unit(&self) -> MonoidElement {
        self.make(BigUint::zero(), BigUint::one())
    }

    fn multiply(&self, s: &MonoidElement, t: &MonoidElement) -> KResult<MonoidElement> {
        check_same_family(s, t)?;
        let (m, p) = self.parts(s)?;
        let (n, q) = self.parts(t)?;
        Ok(self.make(m + p * n, p * q))
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
        let (m, p) = self.parts(s)?;
        let (n, q) = self.parts(t)?;
        let g = p.gcd(q);
        if m % &g != n % &g {
            return Ok(LcmOutcome::Orthogonal);
        }
        let l = p / &g * q;
        // Smallest common solution of c ≡ m (mod p), c ≡ n (mod q) that is
        // ≥ max(m, n): both cofactor translation parts must be nonnegative.
        let pi = BigInt::from(p.clone());
        let qi = BigInt::from(q.clone());
        let eg = pi.extended_gcd(&qi);
        let diff = BigInt::from(n.clone()) - BigInt::from(m.clone());
        let gi = BigInt::from(g.clone());
        debug_assert!((&diff % &gi).is_zero());
        let qg = &qi / &gi;
        let t_par = (eg.x * (diff / &gi)).mod_floor(&qg);
        let mut c = BigInt::from(m.clone()) + &pi * t_par;
        let li = BigInt::from(l.clone());
        c = c.mod_floor(&li);
        let floor = BigInt::from(m.clone().max(n.clone()));
        if c < floor {
            let deficit = &floor - &c;
            let steps = (&deficit + &li - BigInt::one()) / &li;
            c += steps * &li;
        }
        let c = c.to_biguint().expect("common value is nonnegative");
        let cofactor_left = self.make((&c - m) / p, &l / p);
        let cofactor_right = self.make((&c - n) / q, &l / q);
        let lcm = self.make(c, l);
        debug_assert_eq!(self.multiply(s, &cofactor_left)?, lcm);
        debug_assert_eq!(self.multiply(t, &cofactor_right)?, lcm);
        Ok(LcmOutcome::Meet { lcm, cofactor_left, cofactor_right })
    }

    fn is_core(&self, s: &MonoidElement) -> bool {
        self.parts(s).map(|(_, p)| p.is_one()).unwrap_or(false)
    }

    fn is_unit(&self, s: &MonoidElement) -> bool {
        self.parts(s).map(|(m, p)| m.is_zero() && p.is_one()).unwrap_or(false)
    }

    fn invert_unit(&self, s: &MonoidElement) -> KResult<MonoidElement> {
        if self.is_unit(s) {
            Ok(self.unit())
        } else {
            Err(KernelError::NotUnit(self.format_element(s)))
        }
    }

    fn is_noncore_irreducible(&self, s: &MonoidElement) -> bool {
        self.parts(s).map(|(_, p)| numutil::is_prime_biguint(p)).unwrap_or(false)
    }

    fn factor_noncore(&self, s: &MonoidElement) -> KResult<IrreducibleFactorization> {
        let (m, p) = self.parts(s)?;
        if p.is_one() {
            return Err(KernelError::NotFactorable(self.format_element(s)));
        }
        // (m, q₁q₂⋯q_k) = (m, q₁)(0, q₂)⋯(0, q_k) exactly: the first letter
        // carries the whole translation part.
        let primes = numutil::factor_biguint(p);
        let mut letters = Vec::with_capacity(primes.len());
        for (i, q) in primes.into_iter().enumerate() {
            let trans = if i == 0 { m.clone() } else { BigUint::zero() };
            letters.push(self.make(trans, q));
        }
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
                "affine factorization of {} does not multiply back",
                self.format_element(s)
            )));
        }
        Ok(f)
    }

    fn irreducible_classes(&self, cap: usize) -> (Vec<MonoidElement>, Exhaustiveness) {
        // One component V_p per prime p, listed as (0,p), (1,p), …, (p−1,p);
        // primes ascending. Exhaustiveness is per component: stopping exactly
        // at a component boundary keeps every listed component complete.
        let mut out = Vec::with_capacity(cap);
        for p in numutil::primes() {
            if out.len() == cap {
                return (out, Exhaustiveness::ComponentComplete);
            }
            for k in 0..p {
                if out.len() == cap {
                    return (out, Exhaustiveness::Truncated);
                }
                out.push(self.element(k, p));
            }
        }
        unreachable!("prime stream is infinite")
    }

    fn core_generators(&self) -> Vec<MonoidElement> {
        vec![self.element(1, 1)]
    }

    fn oracle_generators(&self) -> Vec<MonoidElement> {
        vec![
            self.element(1, 1),
            self.element(0, 2),
            self.element(1, 2),
            self.element(0, 3),
            self.element(2, 3),
        ]
    }

    fn spot_samples(&self) -> Vec<MonoidElement> {
        vec![
            self.element(5, 6),
            self.element(0, 12),
            self.element(7, 8),
            self.element(11, 30),
            self.element(1, 49),
        ]
    }

    fn parse_element(&self, spec: &str) -> KResult<MonoidElement> {
        let bad = |msg: &str| KernelError::ElementParse {
            spec: spec.to_string(),
            message: msg.to_string(),
        };
        let inner = spec
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("expected `(m,p)`"))?;
        let (ms, ps) =
            inner.split_once(',').ok_or_else(|| bad("expected two comma-separated parts"))?;
        let m: BigUint =
            ms.trim().parse().map_err(|_| bad("translation part must be a nonnegative integer"))?;
        let p: BigUint =
            ps.trim().parse().map_err(|_| bad("ratio part must be a positive integer"))?;
        if p.is_zero() {
            return Err(bad("ratio part must be ≥ 1"));
        }
        Ok(self.make(m, p))
    }

    fn format_element(&self, e: &MonoidElement) -> String {
        match self.parts(e) {
            Ok((m, p)) => format!("({m},{p})"),
            Err(_) => format!("{:?}", e.payload),
        }
    }

    fn random_element(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement {
        const SMALL_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
        let factors = rng.gen_range(0..=3);
        let mut p = 1u64;
        for _ in 0..factors {
            p *= SMALL_PRIMES[rng.gen_range(0..SMALL_PRIMES.len())];
        }
        let m = rng.gen_range(0..=u64::from(size.max(1)));
        self.element(m, p)
    }

    fn random_core(&self, rng: &mut dyn RngCore, size: u32) -> MonoidElement {
        self.element(rng.gen_range(0..=u64::from(size.max(1))), 1)
    }
}
