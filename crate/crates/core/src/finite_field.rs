//! Arithmetic in F_q = F_p[y]/(g) for the residue fields of the towers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::prime_factors;

pub type Fq = Vec<u64>;

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `m` over F_p.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = crate::arith::inv_mod_u64(m[dm] as i64, p).unwrap();
    while r.len() > dm {
        let k = r.len() - 1;
        let c = mulmod(r[k], lead_inv, p);
        if c != 0 {
            for (i, mi) in m.iter().enumerate() {
                let idx = k - dm + i;
                r[idx] = (r[idx] + p - mulmod(c, *mi, p)) % p;
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + mulmod(*x, *y, p)) % p;
        }
    }
    trim(&mut r);
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn poly_powmod(base: &[u64], e: &BigUint, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = poly_rem(base, m, p);
    let bits = e.bits();
    for i in (0..bits).rev() {
        result = poly_rem(&poly_mul(&result, &result, p), m, p);
        if e.bit(i) {
            result = poly_rem(&poly_mul(&result, &b, p), m, p);
        }
    }
    b.clear();
    result
}

/// Rabin's irreducibility test for a monic polynomial over F_p.
pub fn is_irreducible(g: &[u64], p: u64) -> bool {
    let f = g.len() - 1;
    if f == 0 {
        return false;
    }
    if f == 1 {
        return true;
    }
    let pb = BigUint::from(p);
    let x = vec![0u64, 1];
    let mut frob = vec![x.clone()];
    let mut cur = x.clone();
    for _ in 0..f {
        cur = poly_powmod(&cur, &pb, g, p);
        frob.push(cur.clone());
    }
    let mut diff = frob[f].clone();
    diff.resize(2.max(diff.len()), 0);
    diff[1] = (diff[1] + p - 1) % p;
    trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    for r in prime_factors(f as u64) {
        let mut h = frob[f / r as usize].clone();
        h.resize(2.max(h.len()), 0);
        h[1] = (h[1] + p - 1) % p;
        trim(&mut h);
        let gg = poly_gcd(g, &h, p);
        if gg.len() != 1 {
            return false;
        }
    }
    true
}

/// The lexicographically smallest monic irreducible polynomial of degree f
/// over F_p, scanning lower coefficients with c_0 varying fastest.
pub fn lex_smallest_irreducible(p: u64, f: usize) -> Vec<u64> {
    assert!(f >= 1);
    let total = BigUint::from(p).pow(f as u32);
    let mut k = BigUint::zero();
    while k < total {
        let mut g = digits(&k, p, f);
        g.push(1);
        if is_irreducible(&g, p) {
            return g;
        }
        k += 1u32;
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn digits(k: &BigUint, p: u64, f: usize) -> Vec<u64> {
    let pb = BigUint::from(p);
    let mut out = Vec::with_capacity(f);
    let mut x = k.clone();
    for _ in 0..f {
        let (q, r) = x.div_rem(&pb);
        out.push(r.to_u64().unwrap());
        x = q;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    modulus: Vec<u64>,
    order: BigUint,
}

impl FiniteField {
    /// F_{p^f} with the deterministic modulus.
    pub fn new(p: u64, f: usize) -> Self {
        Self::with_modulus(p, lex_smallest_irreducible(p, f))
    }

    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Self {
        let f = modulus.len() - 1;
        FiniteField { p, order: BigUint::from(p).pow(f as u32), modulus }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// q - 1, the order of the multiplicative group.
    pub fn unit_order(&self) -> BigUint {
        &self.order - 1u32
    }

    pub fn zero(&self) -> Fq {
        vec![0; self.degree()]
    }

    pub fn one(&self) -> Fq {
        self.from_u64(1)
    }

    pub fn from_u64(&self, c: u64) -> Fq {
        let mut v = self.zero();
        v[0] = c % self.p;
        v
    }

    pub fn from_i64(&self, c: i64) -> Fq {
        self.from_u64(c.rem_euclid(self.p as i64) as u64)
    }

    /// The element whose coordinates are the base-p digits of `k`.
    pub fn element(&self, k: &BigUint) -> Fq {
        digits(k, self.p, self.degree())
    }

    pub fn is_zero(&self, a: &Fq) -> bool {
        a.iter().all(|c| *c == 0)
    }

    pub fn add(&self, a: &Fq, b: &Fq) -> Fq {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        a.iter().zip(b).map(|(x, y)| (x + self.p - y) % self.p).collect()
    }

    pub fn neg(&self, a: &Fq) -> Fq {
        a.iter().map(|x| (self.p - x) % self.p).collect()
    }

    pub fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        let mut r = poly_rem(&poly_mul(a, b, self.p), &self.modulus, self.p);
        r.resize(self.degree(), 0);
        r
    }

    pub fn pow(&self, a: &Fq, e: &BigUint) -> Fq {
        let mut r = poly_powmod(a, e, &self.modulus, self.p);
        r.resize(self.degree(), 0);
        r
    }

    pub fn pow_u64(&self, a: &Fq, e: u64) -> Fq {
        self.pow(a, &BigUint::from(e))
    }

    pub fn inv(&self, a: &Fq) -> Option<Fq> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, &(&self.order - 2u32)))
    }

    pub fn frobenius(&self, a: &Fq) -> Fq {
        self.pow_u64(a, self.p)
    }

    /// True iff `a` is a nonzero e-th power.
    pub fn is_power(&self, a: &Fq, e: u64) -> bool {
        if self.is_zero(a) {
            return true;
        }
        let n = self.unit_order();
        let g = n.gcd(&BigUint::from(e));
        self.pow(a, &(n / g)) == self.one()
    }

    /// The first element (in coordinate order) of exact multiplicative order m.
    pub fn element_of_order(&self, m: u64) -> Option<Fq> {
        let n = self.unit_order();
        if !(&n % m).is_zero() {
            return None;
        }
        let cof = &n / m;
        let primes = prime_factors(m);
        let mut k = BigUint::one();
        while k < self.order {
            let c = self.element(&k);
            let r = self.pow(&c, &cof);
            if primes.iter().all(|l| self.pow_u64(&r, m / l) != self.one()) {
                return Some(r);
            }
            k += 1u32;
        }
        None
    }

    /// Minimal polynomial over F_p (monic, lowest coefficient first).
    pub fn minimal_polynomial(&self, a: &Fq) -> Vec<u64> {
        let mut conj = vec![a.clone()];
        let mut c = self.frobenius(a);
        while &c != a {
            conj.push(c.clone());
            c = self.frobenius(&c);
        }
        // product of (X - c_i) with coefficients in F_q
        let mut poly: Vec<Fq> = vec![self.one()];
        for r in &conj {
            let mut next = vec![self.zero(); poly.len() + 1];
            for (i, coef) in poly.iter().enumerate() {
                next[i + 1] = self.add(&next[i + 1], coef);
                next[i] = self.sub(&next[i], &self.mul(coef, r));
            }
            poly = next;
        }
        poly.iter()
            .map(|c| {
                debug_assert!(c[1..].iter().all(|x| *x == 0));
                c[0]
            })
            .collect()
    }

    /// Some e-th root of `a`, when one exists.
    pub fn nth_root(&self, a: &Fq, e: u64) -> Option<Fq> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        let n = self.unit_order();
        let eb = BigUint::from(e);
        let g = n.gcd(&eb);
        if self.pow(a, &(&n / &g)) != self.one() {
            return None;
        }
        let primes: Vec<u64> = prime_factors(g.to_u64().unwrap());
        // split n = t · ∏ ℓ^s with gcd(t, e) = 1
        let mut t = n.clone();
        let mut sylow = Vec::new();
        for &l in &primes {
            let mut s = 0u32;
            while (&t % l).is_zero() {
                t /= l;
                s += 1;
            }
            sylow.push((l, s));
        }
        let mut root = self.one();
        let idempotent = |m: &BigUint| -> BigUint {
            // ≡ 1 mod m and ≡ 0 mod n/m
            let co = &n / m;
            let inv = crate::arith::inv_mod_big(&co.clone().into(), &m.clone().into()).unwrap();
            co * inv.to_biguint().unwrap()
        };
        if !t.is_one() {
            let at = self.pow(a, &idempotent(&t));
            let einv = crate::arith::inv_mod_big(&eb.clone().into(), &t.clone().into()).unwrap().to_biguint().unwrap();
            root = self.mul(&root, &self.pow(&at, &einv));
        }
        for &(l, s) in &sylow {
            let ls = BigUint::from(l).pow(s);
            let al = self.pow(a, &idempotent(&ls));
            let z = self.sylow_generator(l, s)?;
            let k = self.sylow_log(&al, &z, l, s);
            // solve y·e ≡ k (mod ℓ^s)
            let mut te = 0u32;
            let mut ep = e;
            while ep % l == 0 {
                ep /= l;
                te += 1;
            }
            let tp = te.min(s);
            let ltp = BigUint::from(l).pow(tp);
            if !(&k % &ltp).is_zero() {
                return None;
            }
            let modulus = BigUint::from(l).pow(s - tp);
            let y = if modulus.is_one() {
                BigUint::zero()
            } else {
                let inv = crate::arith::inv_mod_big(&BigUint::from(ep).into(), &modulus.clone().into()).unwrap().to_biguint().unwrap();
                ((&k / &ltp) * inv) % &modulus
            };
            root = self.mul(&root, &self.pow(&z, &y));
        }
        debug_assert_eq!(self.pow_u64(&root, e), *a);
        if self.pow_u64(&root, e) != *a {
            return None;
        }
        Some(root)
    }

    /// A generator of the Sylow ℓ-subgroup of order ℓ^s.
    fn sylow_generator(&self, l: u64, s: u32) -> Option<Fq> {
        let n = self.unit_order();
        let ls = BigUint::from(l).pow(s);
        let mut k = BigUint::one();
        while k < self.order {
            let c = self.element(&k);
            if self.pow(&c, &(&n / l)) != self.one() {
                return Some(self.pow(&c, &(&n / &ls)));
            }
            k += 1u32;
        }
        None
    }

    /// Discrete logarithm of `x` to base `z` of order ℓ^s.
    fn sylow_log(&self, x: &Fq, z: &Fq, l: u64, s: u32) -> BigUint {
        let gamma = self.pow(z, &BigUint::from(l).pow(s.saturating_sub(1)));
        let zinv = self.inv(z).unwrap();
        let mut k = BigUint::zero();
        for i in 0..s {
            let cur = self.mul(x, &self.pow(&zinv, &k));
            let h = self.pow(&cur, &BigUint::from(l).pow(s - 1 - i));
            let mut acc = self.one();
            let mut digit = 0u64;
            while acc != h {
                acc = self.mul(&acc, &gamma);
                digit += 1;
                assert!(digit < l, "discrete log digit not found");
            }
            k += BigUint::from(digit) * BigUint::from(l).pow(i);
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducible_choices() {
        assert_eq!(lex_smallest_irreducible(3, 1), vec![0, 1]);
        // x^2 + 1 is irreducible mod 3 and smaller than x^2 + x + 2
        assert_eq!(lex_smallest_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(lex_smallest_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(lex_smallest_irreducible(2, 3), vec![1, 1, 0, 1]);
        assert!(!is_irreducible(&[2, 0, 1], 3));
    }

    #[test]
    fn irreducible_counts() {
        // number of monic irreducibles of degree 2 over F_5 is (25 - 5)/2
        let mut count = 0;
        for a in 0..5 {
            for b in 0..5 {
                if is_irreducible(&[a, b, 1], 5) {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 10);
    }

    #[test]
    fn field_axioms_small() {
        let k = FiniteField::new(3, 2);
        for i in 1..9u32 {
            let a = k.element(&BigUint::from(i));
            let ai = k.inv(&a).unwrap();
            assert_eq!(k.mul(&a, &ai), k.one());
            assert_eq!(k.pow_u64(&a, 8), k.one());
        }
    }

    #[test]
    fn roots_and_orders() {
        for (p, f) in [(3u64, 2usize), (5, 1), (7, 2), (2, 4), (3, 4), (13, 1)] {
            let k = FiniteField::new(p, f);
            let q = k.order().to_u64().unwrap();
            for e in [2u64, 3, 4, 5, 6, 8, 9] {
                for i in 1..q {
                    let a = k.element(&BigUint::from(i));
                    let brute = (1..q).any(|j| k.pow_u64(&k.element(&BigUint::from(j)), e) == a);
                    assert_eq!(k.is_power(&a, e), brute);
                    match k.nth_root(&a, e) {
                        Some(r) => assert_eq!(k.pow_u64(&r, e), a),
                        None => assert!(!brute),
                    }
                }
            }
            let m = q - 1;
            let g = k.element_of_order(m).unwrap();
            let mut seen = std::collections::HashSet::new();
            let mut x = k.one();
            for _ in 0..m {
                seen.insert(x.clone());
                x = k.mul(&x, &g);
            }
            assert_eq!(seen.len() as u64, m);
        }
    }

    #[test]
    fn minimal_polynomials() {
        // Φ_4 = x^2 + 1 stays irreducible over F_3
        let k = FiniteField::new(3, 2);
        let i = k.element_of_order(4).unwrap();
        assert_eq!(k.minimal_polynomial(&i), vec![1, 0, 1]);
        let k5 = FiniteField::new(5, 1);
        let r = k5.element_of_order(4).unwrap();
        assert_eq!(k5.minimal_polynomial(&r).len(), 2);
    }
}
