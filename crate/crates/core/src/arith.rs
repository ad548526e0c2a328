//! Small integer helpers shared by the other modules.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Distinct prime divisors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            while n % k == 0 {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    let mut r = n;
    for q in prime_factors(n) {
        r = r / q * (q - 1);
    }
    r
}

/// Exponent of `p` in `n`; `n` must be nonzero.
pub fn vp_u64(mut n: u64, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn vp_i64(n: i64, p: u64) -> u32 {
    vp_u64(n.unsigned_abs(), p)
}

/// Exponent of `p` in a nonzero big integer.
pub fn vp_big(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Removes every factor `p` from `n`, returning the exponent and the cofactor.
pub fn split_p(n: &BigInt, p: u64) -> (u32, BigInt) {
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return (v, m);
        }
        m = q;
        v += 1;
    }
}

/// Multiplicative order of `a` modulo `m` (gcd(a, m) = 1, m ≥ 1).
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let a = a % m;
    let mut x = a;
    let mut k = 1;
    while x != 1 {
        x = ((x as u128 * a as u128) % m as u128) as u64;
        k += 1;
        assert!(k <= m, "element not invertible");
    }
    k
}

/// Inverse of `a` modulo `m` if it exists.
pub fn inv_mod_u64(a: i64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let g = i128::from(a).extended_gcd(&i128::from(m));
    if g.gcd != 1 && g.gcd != -1 {
        return None;
    }
    let x = g.x * g.gcd;
    Some(x.rem_euclid(m as i128) as u64)
}

/// Inverse of `a` modulo `m`; `a` must be a unit.
pub fn inv_mod_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

pub fn pow_big(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

pub fn pow_biguint(p: u64, k: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), k as usize)
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Chinese remaindering for coprime moduli.
pub fn crt(r1: u64, m1: u64, r2: u64, m2: u64) -> u64 {
    let inv = inv_mod_u64(m1 as i64, m2).expect("moduli not coprime");
    let m = m1 as u128 * m2 as u128;
    let t = ((r2 as i128 - r1 as i128).rem_euclid(m2 as i128) as u128 * inv as u128) % m2 as u128;
    ((r1 as u128 + m1 as u128 * t) % m) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_and_order() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(9), 6);
        assert_eq!(multiplicative_order(3, 4), 2);
        assert_eq!(multiplicative_order(2, 7), 3);
        assert_eq!(multiplicative_order(5, 1), 1);
    }

    #[test]
    fn inverses_and_crt() {
        assert_eq!(inv_mod_u64(26, 27), Some(26));
        assert_eq!(inv_mod_u64(3, 9), None);
        assert_eq!(inv_mod_u64(-1, 5), Some(4));
        let x = crt(2, 3, 3, 5);
        assert_eq!((x % 3, x % 5), (2, 3));
    }

    #[test]
    fn valuations() {
        assert_eq!(vp_u64(243, 3), 5);
        assert_eq!(vp_big(&BigInt::from(-96), 2), 5);
        assert_eq!(split_p(&BigInt::from(-18), 3), (2, BigInt::from(-2)));
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
    }
}
