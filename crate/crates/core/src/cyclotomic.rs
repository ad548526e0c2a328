//! Exact arithmetic in Q(ζ_d) = Q[x]/Φ_d(x).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::euler_phi;

/// Integer coefficients of the d-th cyclotomic polynomial, lowest first.
pub fn cyclotomic_polynomial(d: u64) -> Vec<BigInt> {
    assert!(d >= 1);
    // x^d - 1 divided by Φ_k for every proper divisor k
    let mut num: Vec<BigInt> = vec![BigInt::zero(); d as usize + 1];
    num[0] = BigInt::from(-1);
    num[d as usize] = BigInt::one();
    for k in 1..d {
        if d % k == 0 {
            let f = cyclotomic_polynomial(k);
            num = exact_div_monic(&num, &f);
        }
    }
    num
}

fn exact_div_monic(a: &[BigInt], m: &[BigInt]) -> Vec<BigInt> {
    let da = a.len() - 1;
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); da - dm + 1];
    for k in (dm..=da).rev() {
        let c = r[k].clone();
        q[k - dm] = c.clone();
        for (i, mi) in m.iter().enumerate() {
            r[k - dm + i] -= &c * mi;
        }
    }
    debug_assert!(r.iter().all(|x| x.is_zero()));
    q
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicNumber {
    d: u64,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn zero(d: u64) -> Self {
        CyclotomicNumber { d, coeffs: vec![BigRational::zero(); euler_phi(d) as usize] }
    }

    pub fn from_rational(d: u64, r: BigRational) -> Self {
        let mut z = Self::zero(d);
        z.coeffs[0] = r;
        z
    }

    pub fn one(d: u64) -> Self {
        Self::from_rational(d, BigRational::one())
    }

    /// ζ_d^k for any integer k.
    pub fn zeta_pow(d: u64, k: i64) -> Self {
        let t = k.rem_euclid(d as i64) as usize;
        let mut v = vec![BigRational::zero(); t + 1];
        v[t] = BigRational::one();
        Self::reduce(d, v)
    }

    /// Σ mult[t]·ζ^t for t in 0..d.
    pub fn from_multiplicities(d: u64, mult: &[i64]) -> Self {
        let v = mult.iter().map(|m| rat(*m)).collect();
        Self::reduce(d, v)
    }

    fn reduce(d: u64, mut v: Vec<BigRational>) -> Self {
        let phi = cyclotomic_polynomial(d);
        let n = phi.len() - 1;
        while v.len() > n {
            let k = v.len() - 1;
            let c = v.pop().unwrap();
            if c.is_zero() {
                continue;
            }
            for (i, pi) in phi.iter().enumerate().take(n) {
                v[k - n + i] -= &c * BigRational::from_integer(pi.clone());
            }
        }
        v.resize(n, BigRational::zero());
        CyclotomicNumber { d, coeffs: v }
    }

    pub fn conductor(&self) -> u64 {
        self.d
    }

    /// Coordinates on 1, ζ, …, ζ^{φ(d)-1}.
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value when the number lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.d, o.d);
        CyclotomicNumber { d: self.d, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        CyclotomicNumber { d: self.d, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CyclotomicNumber { d: self.d, coeffs: self.coeffs.iter().map(|a| a * r).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.d, o.d);
        let n = self.coeffs.len();
        let mut v = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::reduce(self.d, v)
    }

    /// Inverse via the extended Euclidean algorithm against Φ_d.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let phi: Vec<BigRational> = cyclotomic_polynomial(self.d).into_iter().map(BigRational::from_integer).collect();
        let a: Vec<BigRational> = self.coeffs.clone();
        // invariant: r_i ≡ s_i · a (mod Φ)
        let (mut r0, mut s0) = (phi, vec![BigRational::zero()]);
        let (mut r1, mut s1) = (trimmed(a), vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            s0 = s1;
            r1 = r;
            s1 = s2;
        }
        if r1.is_empty() || r1[0].is_zero() {
            return None;
        }
        let c = r1[0].recip();
        let v = s1.into_iter().map(|x| x * &c).collect();
        Some(Self::reduce(self.d, v))
    }

    /// Image under the automorphism ζ ↦ ζ^j.
    pub fn galois(&self, j: i64) -> Self {
        let mut acc = Self::zero(self.d);
        for (t, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&Self::zeta_pow(self.d, j * t as i64).scale(c));
            }
        }
        acc
    }
}

fn trimmed(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    trimmed(v)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let v = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_else(BigRational::zero) - b.get(i).cloned().unwrap_or_else(BigRational::zero))
        .collect();
    trimmed(v)
}

fn divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = trimmed(a.to_vec());
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    let lead = b[db].clone();
    while r.len() > db {
        let k = r.len() - 1;
        let c = &r[k] / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[k - db + i] -= &c * bi;
        }
        q[k - db] = c;
        r.pop();
        r = trimmed(r);
    }
    (trimmed(q), r)
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (t, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match t {
                0 => String::new(),
                1 => format!("z{}", self.d),
                _ => format!("z{}^{}", self.d, t),
            };
            let coef = if t > 0 && c.abs().is_one() {
                if c.is_negative() { "-".to_string() } else { String::new() }
            } else {
                c.to_string()
            };
            let sep = if t > 0 && !(c.abs().is_one()) { "*" } else { "" };
            parts.push(format!("{coef}{sep}{mono}"));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|x| BigInt::from(*x)).collect()
    }

    #[test]
    fn known_cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(9), ints(&[1, 0, 0, 1, 0, 0, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        for d in 1..40 {
            assert_eq!(cyclotomic_polynomial(d).len() as u64 - 1, euler_phi(d));
        }
    }

    #[test]
    fn zeta_relations() {
        for d in [3u64, 4, 5, 6, 9, 12] {
            assert_eq!(CyclotomicNumber::zeta_pow(d, d as i64), CyclotomicNumber::one(d));
            let z = CyclotomicNumber::zeta_pow(d, 1);
            let zi = z.inv().unwrap();
            assert_eq!(z.mul(&zi), CyclotomicNumber::one(d));
            assert_eq!(zi, CyclotomicNumber::zeta_pow(d, -1));
            // 1 - ζ is invertible for d > 1
            let w = CyclotomicNumber::one(d).sub(&z);
            assert_eq!(w.mul(&w.inv().unwrap()), CyclotomicNumber::one(d));
        }
        let sum: Vec<i64> = vec![1; 5];
        assert!(CyclotomicNumber::from_multiplicities(5, &sum).is_zero());
    }

    #[test]
    fn galois_action() {
        let d = 7;
        let z = CyclotomicNumber::zeta_pow(d, 1);
        let x = z.add(&CyclotomicNumber::zeta_pow(d, 3).scale(&rat(2)));
        let y = x.galois(3);
        assert_eq!(y, CyclotomicNumber::zeta_pow(d, 3).add(&CyclotomicNumber::zeta_pow(d, 9).scale(&rat(2))));
        assert_eq!(x.mul(&z).galois(3), x.galois(3).mul(&z.galois(3)));
    }
}
