//! q-expansions on the Tate curve: Δ, j, the normalized theta function,
//! divisors and their rational functions, torsion types and the (q, u) ↔ ρ
//! coordinates attached to a type.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::enumeration::TypeDescriptor;
use crate::error::{LameError, Result};
use crate::local_fields::FieldElement;

/// An integer power series Σ_{k ≥ min_exp} c_k q^k known through q^M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    pub min_exp: i64,
    pub coeffs: Vec<BigInt>,
    pub truncation: i64,
}

impl TruncatedSeries {
    pub fn coefficient(&self, k: i64) -> Option<&BigInt> {
        if k < self.min_exp || k > self.truncation {
            return None;
        }
        self.coeffs.get((k - self.min_exp) as usize)
    }

    /// Value at q together with a lower bound on the valuation of the
    /// omitted tail (v(q) > 0 and integral coefficients).
    pub fn eval(&self, q: &FieldElement) -> Result<(FieldElement, Rational64)> {
        let vq = q.valuation().ok_or(LameError::DivisionByZero)?;
        if vq <= Rational64::zero() {
            return Err(LameError::OutOfRange("series argument must have positive valuation".into()));
        }
        let t = q.tower();
        let mut acc = t.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(q).add(&t.from_bigint(c));
        }
        if self.min_exp != 0 {
            acc = acc.mul(&q.pow(self.min_exp));
        }
        Ok((acc, vq * Rational64::from_integer(self.truncation + 1)))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "coefficients": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "min_exponent": self.min_exp,
            "truncation": self.truncation,
        })
    }
}

fn mul_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Inverse of a series with constant term ±1, through `len` terms.
fn inv_trunc(a: &[BigInt], len: usize) -> Vec<BigInt> {
    assert!(a[0].is_one() || (-&a[0]).is_one());
    let mut out = vec![BigInt::zero(); len];
    out[0] = a[0].clone();
    for k in 1..len {
        let mut s = BigInt::zero();
        for i in 1..=k.min(a.len() - 1) {
            s += &a[i] * &out[k - i];
        }
        out[k] = -s * &a[0];
    }
    out
}

/// ∏_{m ≥ 1} (1 − q^m)^{24} through q^{len-1}.
fn eta24(len: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); len];
    acc[0] = BigInt::one();
    for m in 1..len {
        for _ in 0..24 {
            for k in (m..len).rev() {
                let t = acc[k - m].clone();
                acc[k] -= t;
            }
        }
    }
    acc
}

fn sigma(m: u64, k: u32) -> BigInt {
    (1..=m).filter(|d| m % d == 0).map(|d| BigInt::from(d).pow(k)).sum()
}

/// E4 = 1 + 240 Σ σ3(m) q^m through q^{len-1}.
pub fn e4_series(len: usize) -> Vec<BigInt> {
    (0..len).map(|m| if m == 0 { BigInt::one() } else { sigma(m as u64, 3) * 240 }).collect()
}

/// Δ = q ∏ (1 − q^m)^{24} through q^M.
pub fn discriminant_series(m: usize) -> TruncatedSeries {
    assert!(m >= 1);
    let mut coeffs = vec![BigInt::zero()];
    coeffs.extend(eta24(m));
    TruncatedSeries { min_exp: 0, coeffs, truncation: m as i64 }
}

/// j = E4³/Δ = q^{-1} + 744 + … through q^M.
pub fn j_series(m: usize) -> TruncatedSeries {
    assert!(m >= 1);
    let len = m + 2;
    let e4 = e4_series(len);
    let e4c = mul_trunc(&mul_trunc(&e4, &e4, len), &e4, len);
    let coeffs = mul_trunc(&e4c, &inv_trunc(&eta24(len), len), len);
    TruncatedSeries { min_exp: -1, coeffs, truncation: m as i64 }
}

/// θ(u) with a lower bound on the valuation of its absolute error.
#[derive(Clone, Debug)]
pub struct ThetaValue {
    pub value: FieldElement,
    pub error_valuation: Rational64,
}

/// (1 − u) ∏_{m=1}^{M} (1 − u q^m)(1 − u^{-1} q^m)/(1 − q^m)^2.
pub fn theta(u: &FieldElement, q: &FieldElement, m: usize) -> Result<ThetaValue> {
    let t = u.tower();
    let vq = q.valuation().ok_or(LameError::DivisionByZero)?;
    if vq <= Rational64::zero() {
        return Err(LameError::OutOfRange("theta needs v(q) > 0".into()));
    }
    let vu = u.valuation().ok_or(LameError::DivisionByZero)?;
    let tail = vq * Rational64::from_integer(m as i64 + 1) - vu.abs();
    if tail <= Rational64::zero() {
        return Err(LameError::OutOfRange(format!("v(u) = {vu} outside the certified range for {m} factors")));
    }
    if u.is_exact_one() {
        return Ok(ThetaValue { value: t.zero(), error_valuation: Rational64::from_integer(i64::MAX / 4) });
    }
    let one = t.one();
    let ui = u.inv()?;
    let mut num = one.sub(u);
    let mut den = one.clone();
    let mut qm = one.clone();
    for _ in 1..=m {
        qm = qm.mul(q);
        num = num.mul(&one.sub(&u.mul(&qm))).mul(&one.sub(&ui.mul(&qm)));
        let f = one.sub(&qm);
        den = den.mul(&f).mul(&f);
    }
    let value = num.div(&den)?;
    let base = value.valuation_lower_bound().unwrap_or_else(Rational64::zero);
    Ok(ThetaValue { value, error_valuation: base + tail })
}

/// Factors needed so that every theta argument with |v| ≤ `spread` keeps a
/// tail of valuation at least `target`.
pub fn theta_terms(vq: Rational64, spread: Rational64, target: i64) -> usize {
    let need = (Rational64::from_integer(target) + spread) / vq;
    need.ceil().to_integer().max(1) as usize
}

/// A divisor Σ e_i [u_i] on the Tate curve, given by lifts u_i.
#[derive(Clone, Debug)]
pub struct DivisorSpec {
    pub points: Vec<(FieldElement, i64)>,
}

impl DivisorSpec {
    pub fn degree(&self) -> i64 {
        self.points.iter().map(|(_, e)| e).sum()
    }

    /// n[v] − n[v^{-1}], i.e. n[P] − n[−P]. This is the divisor of the theta
    /// quotient; writing it as n[P] − n[0] would not be principal in general.
    pub fn lame(v: &FieldElement, n: i64) -> Result<Self> {
        Ok(DivisorSpec { points: vec![(v.clone(), n), (v.inv()?, -n)] })
    }
}

/// ν with ∏ u_i^{e_i} = q^ν at precision, if any.
pub fn principality_check(d: &DivisorSpec, q: &FieldElement) -> Result<Option<i64>> {
    if d.degree() != 0 {
        return Err(LameError::InvalidInput(format!("divisor of degree {} is not principal", d.degree())));
    }
    let t = q.tower();
    let mut w = t.one();
    for (u, e) in &d.points {
        w = w.mul(&u.pow(*e));
    }
    let vq = q.valuation().ok_or(LameError::DivisionByZero)?;
    let vw = match w.valuation() {
        Some(v) => v,
        None => return Err(LameError::InsufficientPrecision("divisor product vanishes at precision".into())),
    };
    let ratio = vw / vq;
    if !ratio.is_integer() {
        return Ok(None);
    }
    let nu = ratio.to_integer();
    let rest = w.mul(&q.pow(-nu)).sub(&t.one());
    Ok(if rest.is_zero() { Some(nu) } else { None })
}

/// u ↦ u^{-ν} ∏ θ(u_i^{-1} u)^{e_i}.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    pub divisor: DivisorSpec,
    pub nu: i64,
    pub q: FieldElement,
    pub terms: usize,
}

/// Whether x ∈ q^Z at precision; returns the exponent.
fn q_power_exponent(x: &FieldElement, q: &FieldElement) -> Option<i64> {
    let vx = x.valuation()?;
    let r = vx / q.valuation()?;
    if !r.is_integer() {
        return None;
    }
    let k = r.to_integer();
    if x.mul(&q.pow(-k)).sub(&x.tower().one()).is_zero() {
        Some(k)
    } else {
        None
    }
}

pub fn rational_function(d: DivisorSpec, nu: i64, q: &FieldElement, terms: usize) -> Result<RationalFunction> {
    if principality_check(&d, q)? != Some(nu) {
        return Err(LameError::InvalidInput(format!("divisor is not principal with ν = {nu}")));
    }
    Ok(RationalFunction { divisor: d, nu, q: q.clone(), terms })
}

impl RationalFunction {
    /// Order of the function at u (zero when u is off the support).
    pub fn order_at(&self, u: &FieldElement) -> Result<i64> {
        let mut ord = 0;
        for (ui, e) in &self.divisor.points {
            if q_power_exponent(&u.div(ui)?, &self.q).is_some() {
                ord += e;
            }
        }
        Ok(ord)
    }

    pub fn eval(&self, u: &FieldElement) -> Result<FieldElement> {
        let mut acc = u.pow(-self.nu);
        for (ui, e) in &self.divisor.points {
            let arg = u.div(ui)?;
            if q_power_exponent(&arg, &self.q).is_some() {
                return Err(LameError::PoleOrZero { order: self.order_at(u)? });
            }
            let th = theta(&arg, &self.q, self.terms)?.value;
            acc = acc.mul(&th.pow(*e));
        }
        Ok(acc)
    }
}

/// (b, ζ) with u^{n′} = ζ q^{b′}, for u normalized to 0 ≤ v(u) < v(q).
#[derive(Clone, Debug)]
pub struct TorsionType {
    pub b: u64,
    pub d: u64,
    pub zeta: FieldElement,
    /// ζ is a primitive d-th root of unity.
    pub exact: bool,
    /// j with ζ = ζ_ref^{(c/d)·j} when the tower carries μ_d (c its conductor).
    pub zeta_exponent: Option<u64>,
}

pub fn torsion_type(u: &FieldElement, q: &FieldElement, n: u64) -> Result<TorsionType> {
    let t = u.tower();
    let vq = q.valuation().ok_or(LameError::DivisionByZero)?;
    let vu = u.valuation().ok_or(LameError::DivisionByZero)?;
    if vq <= Rational64::zero() {
        return Err(LameError::OutOfRange("v(q) must be positive".into()));
    }
    let shift = (vu / vq).floor().to_integer();
    let u = u.mul(&q.pow(-shift));
    let vu = vu - vq * Rational64::from_integer(shift);
    let br = vu / vq * Rational64::from_integer(n as i64);
    if !br.is_integer() {
        return Err(LameError::NotTorsion(format!("n·v(u)/v(q) = {br} is not an integer")));
    }
    let b = br.to_integer() as u64;
    let d = n.gcd(&b);
    let (np, bp) = (n / d, b / d);
    let zeta = u.pow(np as i64).mul(&q.pow(-(bp as i64)));
    let one = t.one();
    if !zeta.pow(d as i64).sub(&one).is_zero() {
        return Err(LameError::NotTorsion("u^n is not a power of q at precision".into()));
    }
    let exact = crate::arith::prime_factors(d).iter().all(|l| !zeta.pow((d / l) as i64).sub(&one).is_zero());
    let c = t.conductor();
    let zeta_exponent = if c % d == 0 {
        let base = t.zeta((c / d) as i64);
        let mut acc = one.clone();
        let mut found = None;
        for j in 0..d {
            if acc.sub(&zeta).is_zero() {
                found = Some(j);
                break;
            }
            acc = acc.mul(&base);
        }
        found
    } else {
        None
    };
    Ok(TorsionType { b, d, zeta, exact, zeta_exponent })
}

/// q = ζ^{b″} ρ^{n′}, u = ζ^{n″} ρ^{b′}.
pub fn rho_to_pair(ty: &TypeDescriptor, zeta: &FieldElement, rho: &FieldElement) -> Result<(FieldElement, FieldElement)> {
    if rho.is_zero() {
        return Err(LameError::InvalidInput("ρ must be nonzero".into()));
    }
    let q = zeta.pow(ty.b2 as i64).mul(&rho.pow(ty.nprime as i64));
    let u = zeta.pow(ty.n2 as i64).mul(&rho.pow(ty.bprime as i64));
    Ok((q, u))
}

/// ρ = u^{-b″} q^{n″}.
pub fn pair_to_rho(ty: &TypeDescriptor, q: &FieldElement, u: &FieldElement) -> Result<FieldElement> {
    Ok(u.pow(-(ty.b2 as i64)).mul(&q.pow(ty.n2 as i64)))
}

#[derive(Clone, Debug)]
pub struct PsiValue {
    pub value: FieldElement,
    pub error_valuation: Rational64,
}

/// ψ_τ(1) = n − 2b + 2n Σ_{m≥0} v q^m/(1 − v q^m) − 2n Σ_{m>0} v^{-1} q^m/(1 − v^{-1} q^m)
/// summed directly through m = M.
pub fn psi_at_one(ty: &TypeDescriptor, zeta: &FieldElement, rho: &FieldElement, m: usize) -> Result<PsiValue> {
    let (q, v) = rho_to_pair(ty, zeta, rho)?;
    let t = rho.tower();
    let vq = q.valuation().ok_or(LameError::DivisionByZero)?;
    let vv = v.valuation().ok_or(LameError::DivisionByZero)?;
    let one = t.one();
    let vi = v.inv()?;
    let geo = |x: &FieldElement| -> Result<FieldElement> {
        let den = one.sub(x);
        if den.is_zero() {
            return Err(LameError::InvalidInput("sample point lies on v q^Z ∪ v^{-1} q^Z".into()));
        }
        x.div(&den)
    };
    let mut s1 = t.zero();
    let mut s2 = t.zero();
    let mut qm = one.clone();
    for k in 0..=m {
        if k > 0 {
            qm = qm.mul(&q);
            s2 = s2.add(&geo(&vi.mul(&qm))?);
        }
        s1 = s1.add(&geo(&v.mul(&qm))?);
    }
    let n = ty.n as i64;
    let two_n = t.from_int(2 * n);
    let value = t.from_int(n - 2 * ty.b as i64).add(&two_n.mul(&s1.sub(&s2)));
    let v2n = Rational64::from_integer(crate::arith::vp_u64(2 * ty.n, t.prime()) as i64);
    let tail = vq * Rational64::from_integer(m as i64 + 1) - vv.abs() + v2n;
    Ok(PsiValue { value, error_valuation: tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_fields::LocalFieldTower;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|x| BigInt::from(*x)).collect()
    }

    // Euler: ∏(1 − q^m) = Σ_k (−1)^k q^{k(3k−1)/2}
    fn pentagonal_eta(len: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); len];
        for k in -(len as i64)..=(len as i64) {
            let e = k * (3 * k - 1) / 2;
            if e >= 0 && (e as usize) < len {
                v[e as usize] += if k % 2 == 0 { 1 } else { -1 };
            }
        }
        v
    }

    #[test]
    fn discriminant_coefficients() {
        let d = discriminant_series(30);
        assert_eq!(d.coefficient(1).unwrap(), &BigInt::from(1));
        assert_eq!(d.coefficient(2).unwrap(), &BigInt::from(-24));
        assert_eq!(d.coefficient(3).unwrap(), &BigInt::from(252));
        let eta = pentagonal_eta(30);
        let mut p = ints(&[1]);
        for _ in 0..24 {
            p = mul_trunc(&p, &eta, 30);
        }
        assert_eq!(&d.coeffs[1..], &p[..]);
        // Ramanujan τ(5) = 4830
        assert_eq!(d.coefficient(5).unwrap(), &BigInt::from(4830));
    }

    #[test]
    fn j_coefficients() {
        let j = j_series(30);
        assert_eq!(j.coefficient(-1).unwrap(), &BigInt::from(1));
        assert_eq!(j.coefficient(0).unwrap(), &BigInt::from(744));
        assert_eq!(j.coefficient(1).unwrap(), &BigInt::from(196884));
        assert_eq!(j.coefficient(2).unwrap(), &BigInt::from(21493760));
        // j·Δ = E4^3 through degree 30
        let d = discriminant_series(31);
        let jd = mul_trunc(&j.coeffs, &d.coeffs[1..], 31);
        let e4 = e4_series(31);
        let e4c = mul_trunc(&mul_trunc(&e4, &e4, 31), &e4, 31);
        assert_eq!(jd, e4c);
        // 1728·E4^3 = j·(E4^3 − E6^2), independently of Δ
        let e6: Vec<BigInt> = (0..31).map(|m| if m == 0 { BigInt::one() } else { sigma(m as u64, 5) * -504 }).collect();
        let e6s = mul_trunc(&e6, &e6, 31);
        let diff: Vec<BigInt> = e4c.iter().zip(&e6s).map(|(a, b)| a - b).collect();
        assert!(diff[0].is_zero());
        let lhs: Vec<BigInt> = e4c.iter().map(|x| x * 1728).collect();
        let rhs = mul_trunc(&j.coeffs, &diff[1..], 30);
        assert_eq!(&lhs[..30], &rhs[..]);
    }

    #[test]
    fn theta_functional_equations() {
        for p in [2u64, 3, 5, 7] {
            let t = LocalFieldTower::cyclotomic(p, 1, 50).unwrap();
            let q = t.from_int((p * p) as i64);
            let u = t.from_int(1 + p as i64);
            let m = 30;
            let th = theta(&u, &q, m).unwrap();
            let ui = u.inv().unwrap();
            let a = theta(&ui, &q, m).unwrap();
            let want = ui.neg().mul(&th.value);
            assert!(a.value.sub(&want).valuation_lower_bound().unwrap() >= Rational64::from_integer(40));
            let b = theta(&q.mul(&u), &q, m).unwrap();
            assert!(b.value.sub(&want).valuation_lower_bound().unwrap() >= Rational64::from_integer(40));
        }
        let t = LocalFieldTower::cyclotomic(3, 1, 30).unwrap();
        let z = theta(&t.one(), &t.from_int(9), 10).unwrap();
        assert!(z.value.is_exact_zero());
        assert!(theta(&t.from_int(3).pow(30), &t.from_int(9), 10).is_err());
    }

    #[test]
    fn theta_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = LocalFieldTower::cyclotomic(5, 4, 40).unwrap();
        for _ in 0..10 {
            let q = t.from_int(5).pow(rng.random_range(1..3)).mul(&t.from_int(rng.random_range(1..24) * 5 + 1));
            let u = t.zeta(rng.random_range(0..4)).mul(&t.from_int(1 + 5 * rng.random_range(1..20)));
            let ui = u.inv().unwrap();
            let th = theta(&u, &q, 40).unwrap().value;
            let want = ui.neg().mul(&th);
            let a = theta(&ui, &q, 40).unwrap().value;
            let b = theta(&q.mul(&u), &q, 40).unwrap().value;
            assert!(a.sub(&want).valuation_lower_bound().unwrap() >= Rational64::from_integer(30));
            assert!(b.sub(&want).valuation_lower_bound().unwrap() >= Rational64::from_integer(30));
        }
    }

    #[test]
    fn principality_examples() {
        let t = LocalFieldTower::cyclotomic(3, 1, 40).unwrap();
        let ty = TypeDescriptor::new(5, 1).unwrap();
        let rho = t.from_int(3 * 7);
        let (q, v) = rho_to_pair(&ty, &t.one(), &rho).unwrap();
        let lame = DivisorSpec::lame(&v, 5).unwrap();
        assert_eq!(principality_check(&lame, &q).unwrap(), Some(2));
        let u = t.from_int(4);
        let trivial = DivisorSpec { points: vec![(u.clone(), 1), (u.clone(), -1)] };
        assert_eq!(principality_check(&trivial, &q).unwrap(), Some(0));
        let generic = DivisorSpec { points: vec![(u.clone(), 1), (t.from_int(7), -1)] };
        assert_eq!(principality_check(&generic, &q).unwrap(), None);
        let bad = DivisorSpec { points: vec![(u, 1)] };
        assert!(principality_check(&bad, &q).is_err());
    }

    #[test]
    fn lame_divisor_nu_for_all_types() {
        for n in 3..=12u64 {
            for b in 1..n.div_ceil(2) {
                let ty = TypeDescriptor::new(n, b).unwrap();
                let t = LocalFieldTower::cyclotomic(7, ty.d, 30).unwrap();
                let z = t.zeta(1);
                let (q, v) = rho_to_pair(&ty, &z, &t.from_int(7 * 3)).unwrap();
                let dv = DivisorSpec::lame(&v, n as i64).unwrap();
                assert_eq!(principality_check(&dv, &q).unwrap(), Some(2 * b as i64), "n={n} b={b}");
            }
        }
    }

    #[test]
    fn rational_function_periodicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = LocalFieldTower::cyclotomic(3, 1, 60).unwrap();
        let ty = TypeDescriptor::new(5, 1).unwrap();
        let rho = t.from_int(3 * 2);
        let (q, v) = rho_to_pair(&ty, &t.one(), &rho).unwrap();
        let f = rational_function(DivisorSpec::lame(&v, 5).unwrap(), 2, &q, 40).unwrap();
        for _ in 0..5 {
            let u = t.from_int(3 * rng.random_range(1..50) + 1).mul(&t.from_int(3).pow(rng.random_range(0..4)));
            let a = f.eval(&u).unwrap();
            let b = f.eval(&q.mul(&u)).unwrap();
            let r = b.div(&a).unwrap().sub(&t.one());
            assert!(r.valuation_lower_bound().unwrap() >= Rational64::from_integer(30));
        }
        assert_eq!(f.order_at(&v).unwrap(), 5);
        assert!(matches!(f.eval(&v), Err(LameError::PoleOrZero { order: 5 })));
        assert!(matches!(f.eval(&v.inv().unwrap().mul(&q)), Err(LameError::PoleOrZero { order: -5 })));
        let c = rational_function(DivisorSpec { points: vec![] }, 0, &q, 10).unwrap();
        assert!(c.eval(&t.from_int(5)).unwrap().sub(&t.one()).is_zero());
    }

    #[test]
    fn torsion_type_examples() {
        let t = LocalFieldTower::cyclotomic(7, 3, 30).unwrap();
        let z3 = t.zeta(1);
        let r = torsion_type(&z3, &t.from_int(7), 3).unwrap();
        assert_eq!((r.b, r.d, r.exact, r.zeta_exponent), (0, 3, true, Some(1)));
        let t = LocalFieldTower::cyclotomic(3, 1, 30).unwrap();
        let rho = t.from_int(3 * 4);
        let r = torsion_type(&rho, &rho.pow(5), 5).unwrap();
        assert_eq!((r.b, r.d, r.exact), (1, 1, true));
        // q = ρ², u = −ρ, n = 4: b = n/2 with ζ = 1, so not of exact order 4
        let r = torsion_type(&rho.neg(), &rho.pow(2), 4).unwrap();
        assert_eq!((r.b, r.d, r.exact), (2, 2, false));
        let r = torsion_type(&rho.neg(), &rho.pow(2).neg(), 4).unwrap();
        assert_eq!((r.b, r.d, r.exact), (2, 2, true));
        assert!(r.zeta.add(&t.one()).is_zero());
        assert!(matches!(torsion_type(&t.from_int(4), &t.from_int(9), 5), Err(LameError::NotTorsion(_))));
    }

    #[test]
    fn pair_roundtrip_and_types() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 3..=12u64 {
            for b in 0..n.div_ceil(2) {
                let ty = TypeDescriptor::new(n, b).unwrap();
                let p = [3u64, 5, 7, 11][rng.random_range(0..4)];
                let t = LocalFieldTower::cyclotomic(p, ty.d, 25).unwrap();
                for j in (1..=ty.d).filter(|j| crate::arith::gcd(*j, ty.d) == 1) {
                    let z = t.zeta(j as i64);
                    let rho = t.from_int(p as i64).pow(rng.random_range(1..3)).mul(&t.from_int(rng.random_range(1..1000) * p as i64 + 1));
                    let (q, u) = rho_to_pair(&ty, &z, &rho).unwrap();
                    let back = pair_to_rho(&ty, &q, &u).unwrap();
                    assert!(back.sub(&rho).is_zero());
                    let tt = torsion_type(&u, &q, n).unwrap();
                    assert_eq!((tt.b, tt.exact), (b, true), "n={n} b={b}");
                    // the type transforms with the conjugate ζ
                    assert_eq!(tt.zeta_exponent, Some(j % ty.d), "n={n} b={b} j={j}");
                }
            }
        }
    }

    #[test]
    fn psi_constant_term() {
        let t = LocalFieldTower::cyclotomic(5, 1, 40).unwrap();
        let ty = TypeDescriptor::new(7, 2).unwrap();
        let rho = t.from_int(5).pow(30);
        let psi = psi_at_one(&ty, &t.one(), &rho, 2).unwrap();
        let diff = psi.value.sub(&t.from_int(7 - 4));
        assert!(diff.valuation_lower_bound().unwrap() >= Rational64::from_integer(30));
    }

    #[test]
    fn series_dump() {
        let js = discriminant_series(3).to_json();
        assert_eq!(js["coefficients"], serde_json::json!(["0", "1", "-24", "252"]));
        assert_eq!(js["truncation"], 3);
    }
}
