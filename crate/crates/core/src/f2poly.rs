//! Polynomial arithmetic over 𝔽₂[t], with polynomials packed into `BigUint`
//! bit masks (bit `i` is the coefficient of `t^i`). Used by the bit-stream
//! dynamical family, whose group part lives in 𝔽₂[t] and whose endomorphism
//! monoid is generated by multiplication by `t` and by `1 + t`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub(crate) fn deg(f: &BigUint) -> Option<u64> {
    if f.is_zero() {
        None
    } else {
        Some(f.bits() - 1)
    }
}

pub(crate) fn add(f: &BigUint, g: &BigUint) -> BigUint {
    f ^ g
}

/// Carry-less product in 𝔽₂[t].
pub(crate) fn mul(f: &BigUint, g: &BigUint) -> BigUint {
    if f.is_zero() || g.is_zero() {
        return BigUint::zero();
    }
    let mut acc = BigUint::zero();
    let (small, big) = if f.bits() <= g.bits() { (f, g) } else { (g, f) };
    for i in 0..small.bits() {
        if small.bit(i) {
            acc ^= big << i;
        }
    }
    acc
}

/// Long division: `f = q·g + r` with `deg r < deg g`. Panics on `g = 0`.
pub(crate) fn divmod(f: &BigUint, g: &BigUint) -> (BigUint, BigUint) {
    let dg = deg(g).expect("division by zero polynomial");
    let mut q = BigUint::zero();
    let mut r = f.clone();
    while let Some(dr) = deg(&r) {
        if dr < dg {
            break;
        }
        let shift = dr - dg;
        q.set_bit(shift, true);
        r ^= g << shift;
    }
    (q, r)
}

pub(crate) fn rem(f: &BigUint, g: &BigUint) -> BigUint {
    divmod(f, g).1
}

#[cfg(test)]
pub(crate) fn gcd(f: &BigUint, g: &BigUint) -> BigUint {
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_zero() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// Extended Euclid: returns `(d, u, w)` with `u·f + w·g = d = gcd(f, g)`.
pub(crate) fn extended_gcd(f: &BigUint, g: &BigUint) -> (BigUint, BigUint, BigUint) {
    let (mut r0, mut r1) = (f.clone(), g.clone());
    let (mut u0, mut u1) = (BigUint::one(), BigUint::zero());
    let (mut w0, mut w1) = (BigUint::zero(), BigUint::one());
    while !r1.is_zero() {
        let (q, r) = divmod(&r0, &r1);
        let u = add(&u0, &mul(&q, &u1));
        let w = add(&w0, &mul(&q, &w1));
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = u;
        w0 = w1;
        w1 = w;
    }
    (r0, u0, w0)
}

/// `t^a · (1+t)^b` as a packed polynomial.
pub(crate) fn t_onet_power(a: u32, b: u32) -> BigUint {
    let mut f = BigUint::one() << a;
    let one_plus_t = BigUint::from(3u32);
    for _ in 0..b {
        f = mul(&f, &one_plus_t);
    }
    f
}

/// Multiplicity of `t` in `f ≠ 0` (number of trailing zero coefficients).
#[cfg(test)]
pub(crate) fn val_t(f: &BigUint) -> u64 {
    assert!(!f.is_zero());
    f.trailing_zeros().expect("nonzero polynomial")
}

/// Multiplicity of `1 + t` in `f ≠ 0`.
#[cfg(test)]
pub(crate) fn val_one_plus_t(f: &BigUint) -> u64 {
    assert!(!f.is_zero());
    let one_plus_t = BigUint::from(3u32);
    let mut v = 0u64;
    let mut cur = f.clone();
    loop {
        let (q, r) = divmod(&cur, &one_plus_t);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        cur = q;
    }
}

/// Chinese remainder in 𝔽₂[t]: the canonical solution of
/// `f ≡ g (mod m1)`, `f ≡ h (mod m2)`, reduced modulo `lcm(m1, m2)`.
/// `None` when the congruences are incompatible.
pub(crate) fn crt(g: &BigUint, m1: &BigUint, h: &BigUint, m2: &BigUint) -> Option<BigUint> {
    let (d, u, _) = extended_gcd(m1, m2);
    let diff = add(g, h);
    let (diff_q, diff_r) = divmod(&diff, &d);
    if !diff_r.is_zero() {
        return None;
    }
    let (lcm, _) = (mul(m1, m2), &d);
    let (lcm_q, _) = divmod(&lcm, &d);
    let f = add(g, &mul(m1, &mul(&u, &diff_q)));
    Some(rem(&f, &lcm_q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(bits: u64) -> BigUint {
        BigUint::from(bits)
    }

    #[test]
    fn multiplication_matches_hand_examples() {
        // (1+t)(1+t) = 1 + t^2 over 𝔽₂.
        assert_eq!(mul(&p(0b11), &p(0b11)), p(0b101));
        // (1+t)(1+t+t^2) = 1 + t^3.
        assert_eq!(mul(&p(0b11), &p(0b111)), p(0b1001));
        assert_eq!(mul(&p(0), &p(0b111)), p(0));
    }

    #[test]
    fn division_roundtrips() {
        let f = p(0b1011011);
        let g = p(0b101);
        let (q, r) = divmod(&f, &g);
        assert_eq!(add(&mul(&q, &g), &r), f);
        assert!(deg(&r) < deg(&g));
    }

    #[test]
    fn gcd_and_bezout_agree() {
        let f = mul(&p(0b11), &p(0b1101));
        let g = mul(&p(0b11), &p(0b111));
        let (d, u, w) = extended_gcd(&f, &g);
        assert_eq!(d, gcd(&f, &g));
        assert_eq!(add(&mul(&u, &f), &mul(&w, &g)), d);
        assert_eq!(rem(&f, &d), p(0));
        assert_eq!(rem(&g, &d), p(0));
    }

    #[test]
    fn valuations_count_factors() {
        // f = t^2 (1+t)^3.
        let f = mul(&(BigUint::one() << 2), &t_onet_power(0, 3));
        assert_eq!(val_t(&f), 2);
        assert_eq!(val_one_plus_t(&f), 3);
        assert_eq!(val_one_plus_t(&p(0b101)), 2); // 1 + t^2 = (1+t)^2
    }

    #[test]
    fn crt_solves_compatible_congruences() {
        // f ≡ 1 (mod t^2), f ≡ t (mod (1+t)^2); moduli coprime.
        let m1 = p(0b100);
        let m2 = p(0b101);
        let f = crt(&p(1), &m1, &p(0b10), &m2).expect("coprime moduli");
        assert_eq!(rem(&f, &m1), p(1));
        assert_eq!(rem(&add(&f, &p(0b10)), &m2), p(0));
        // Incompatible: f ≡ 0 (mod t), f ≡ 1 (mod t) has no solution; use
        // moduli with common factor t.
        assert!(crt(&p(0), &p(0b10), &p(1), &p(0b110)).is_none());
    }

    #[test]
    fn crt_result_is_reduced() {
        let m1 = t_onet_power(3, 0);
        let m2 = t_onet_power(0, 2);
        let f = crt(&p(0b101), &m1, &p(0b1), &m2).unwrap();
        let lcm = mul(&m1, &m2);
        assert!(deg(&f) < deg(&lcm));
    }
}
