//! Capped-relative-precision p-adic numbers, polynomials over them, Hensel
//! lifting and Newton polygons.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::arith::{inv_mod_big, pow_big, split_p};
use crate::error::{LameError, Result};

pub const DEFAULT_PRECISION: u32 = 40;

/// v_p of a nonzero rational.
pub fn rational_valuation(x: &BigRational, p: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(LameError::ValuationOfZero);
    }
    let (vn, _) = split_p(x.numer(), p);
    let (vd, _) = split_p(x.denom(), p);
    Ok(vn as i64 - vd as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Exact,
    /// Known only to be divisible by p^bound.
    Vanishing(i64),
    Value { val: i64, unit: BigInt, prec: u32 },
}

/// An element of Q_p: p^val · unit with the unit known modulo p^prec.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicScalar {
    p: u64,
    kind: Kind,
}

impl PadicScalar {
    pub fn zero(p: u64) -> Self {
        PadicScalar { p, kind: Kind::Exact }
    }

    /// A value indistinguishable from zero, known to be divisible by p^abs.
    pub fn vanishing(p: u64, abs: i64) -> Self {
        PadicScalar { p, kind: Kind::Vanishing(abs) }
    }

    /// Builds p^val·unit, normalizing factors of p out of `unit`.
    pub fn from_parts(p: u64, val: i64, unit: BigInt, prec: u32) -> Self {
        if prec == 0 {
            return Self::vanishing(p, val);
        }
        let m = pow_big(p, prec);
        let u = unit.mod_floor(&m);
        if u.is_zero() {
            return Self::vanishing(p, val + prec as i64);
        }
        let (k, u) = split_p(&u, p);
        PadicScalar { p, kind: Kind::Value { val: val + k as i64, unit: u, prec: prec - k } }
    }

    pub fn from_rational(x: &BigRational, p: u64, n: u32) -> Self {
        assert!(n >= 1, "precision must be positive");
        if x.is_zero() {
            return Self::zero(p);
        }
        let (vn, a) = split_p(x.numer(), p);
        let (vd, b) = split_p(x.denom(), p);
        let m = pow_big(p, n);
        let inv = inv_mod_big(&b, &m).expect("denominator coprime to p");
        let u = (a * inv).mod_floor(&m);
        PadicScalar { p, kind: Kind::Value { val: vn as i64 - vd as i64, unit: u, prec: n } }
    }

    pub fn from_bigint(x: &BigInt, p: u64, n: u32) -> Self {
        Self::from_rational(&BigRational::from_integer(x.clone()), p, n)
    }

    pub fn from_i64(x: i64, p: u64, n: u32) -> Self {
        Self::from_bigint(&BigInt::from(x), p, n)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.kind, Kind::Exact)
    }

    /// True when the value is zero to all digits carried.
    pub fn is_indistinguishable_from_zero(&self) -> bool {
        matches!(self.kind, Kind::Vanishing(_))
    }

    pub fn is_zero(&self) -> bool {
        !matches!(self.kind, Kind::Value { .. })
    }

    /// Exact valuation, or `None` for (approximate) zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.kind {
            Kind::Value { val, .. } => Some(*val),
            _ => None,
        }
    }

    /// Largest v known to satisfy v(x) ≥ v; `None` for exact zero.
    pub fn valuation_lower_bound(&self) -> Option<i64> {
        match &self.kind {
            Kind::Exact => None,
            Kind::Vanishing(b) => Some(*b),
            Kind::Value { val, .. } => Some(*val),
        }
    }

    pub fn unit(&self) -> Option<&BigInt> {
        match &self.kind {
            Kind::Value { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// Relative precision (0 for zeros).
    pub fn precision(&self) -> u32 {
        match &self.kind {
            Kind::Value { prec, .. } => *prec,
            _ => 0,
        }
    }

    /// valuation + relative precision; `None` for exact zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        match &self.kind {
            Kind::Exact => None,
            Kind::Vanishing(b) => Some(*b),
            Kind::Value { val, prec, .. } => Some(val + *prec as i64),
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(LameError::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        match &self.kind {
            Kind::Value { val, unit, prec } => {
                let m = pow_big(self.p, *prec);
                PadicScalar { p: self.p, kind: Kind::Value { val: *val, unit: (-unit).mod_floor(&m), prec: *prec } }
            }
            _ => self.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.p;
        match (&self.kind, &other.kind) {
            (Kind::Exact, _) => Ok(other.clone()),
            (_, Kind::Exact) => Ok(self.clone()),
            (Kind::Vanishing(a), Kind::Vanishing(b)) => Ok(Self::vanishing(p, *a.min(b))),
            (Kind::Vanishing(b), Kind::Value { val, unit, prec }) | (Kind::Value { val, unit, prec }, Kind::Vanishing(b)) => {
                if *b <= *val {
                    Ok(Self::vanishing(p, *b))
                } else {
                    let np = (*prec as i64).min(b - val) as u32;
                    Ok(Self::from_parts(p, *val, unit.clone(), np))
                }
            }
            (Kind::Value { val: va, unit: ua, prec: pa }, Kind::Value { val: vb, unit: ub, prec: pb }) => {
                let abs = (va + *pa as i64).min(vb + *pb as i64);
                let v = *va.min(vb);
                if abs <= v {
                    return Ok(Self::vanishing(p, abs));
                }
                let sa = ua * pow_big(p, (va - v) as u32);
                let sb = ub * pow_big(p, (vb - v) as u32);
                Ok(Self::from_parts(p, v, sa + sb, (abs - v) as u32))
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.p;
        match (&self.kind, &other.kind) {
            (Kind::Exact, _) | (_, Kind::Exact) => Ok(Self::zero(p)),
            (Kind::Vanishing(a), Kind::Vanishing(b)) => Ok(Self::vanishing(p, a + b)),
            (Kind::Vanishing(b), Kind::Value { val, .. }) | (Kind::Value { val, .. }, Kind::Vanishing(b)) => {
                Ok(Self::vanishing(p, b + val))
            }
            (Kind::Value { val: va, unit: ua, prec: pa }, Kind::Value { val: vb, unit: ub, prec: pb }) => {
                let prec = *pa.min(pb);
                let m = pow_big(p, prec);
                Ok(PadicScalar { p, kind: Kind::Value { val: va + vb, unit: (ua * ub).mod_floor(&m), prec } })
            }
        }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let c = Self::from_i64(k, self.p, self.precision().max(1) + 64);
        if k == 0 {
            return Self::zero(self.p);
        }
        self.mul(&c).expect("same prime")
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.kind {
            Kind::Value { val, unit, prec } => {
                let m = pow_big(self.p, *prec);
                let u = inv_mod_big(unit, &m).ok_or(LameError::NotAUnit)?;
                Ok(PadicScalar { p: self.p, kind: Kind::Value { val: -val, unit: u, prec: *prec } })
            }
            _ => Err(LameError::DivisionByZero),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k == 0 {
            return Ok(Self::from_i64(1, self.p, self.precision().max(1)));
        }
        match &self.kind {
            Kind::Exact if k > 0 => Ok(self.clone()),
            Kind::Vanishing(b) if k > 0 => Ok(Self::vanishing(self.p, b * k)),
            Kind::Value { val, unit, prec } => {
                let m = pow_big(self.p, *prec);
                let mut u = unit.modpow(&BigInt::from(k.unsigned_abs()), &m);
                if k < 0 {
                    u = inv_mod_big(&u, &m).ok_or(LameError::NotAUnit)?;
                }
                Ok(PadicScalar { p: self.p, kind: Kind::Value { val: val * k, unit: u, prec: *prec } })
            }
            _ => Err(LameError::DivisionByZero),
        }
    }

    /// Pads the unit with zero digits so the absolute precision is `abs`
    /// (treating the carried digits as exact). Never lowers precision.
    pub fn lift_to_absolute(&self, abs: i64) -> Self {
        match &self.kind {
            Kind::Value { val, unit, prec } if val + (*prec as i64) < abs => {
                PadicScalar { p: self.p, kind: Kind::Value { val: *val, unit: unit.clone(), prec: (abs - val) as u32 } }
            }
            Kind::Vanishing(b) if *b < abs => Self::vanishing(self.p, abs),
            _ => self.clone(),
        }
    }

    /// Drops digits so the absolute precision is at most `abs`.
    pub fn truncate_absolute(&self, abs: i64) -> Self {
        match &self.kind {
            Kind::Value { val, unit, prec } if val + (*prec as i64) > abs => {
                if abs <= *val {
                    Self::vanishing(self.p, abs)
                } else {
                    Self::from_parts(self.p, *val, unit.clone(), (abs - val) as u32)
                }
            }
            Kind::Vanishing(b) if *b > abs => Self::vanishing(self.p, abs),
            Kind::Exact => Self::vanishing(self.p, abs),
            _ => self.clone(),
        }
    }

    /// The value as a rational p^val·unit (zeros give 0).
    pub fn to_rational(&self) -> BigRational {
        match &self.kind {
            Kind::Value { val, unit, .. } => {
                let pk = BigRational::from_integer(pow_big(self.p, val.unsigned_abs() as u32));
                let u = BigRational::from_integer(unit.clone());
                if *val >= 0 {
                    u * pk
                } else {
                    u / pk
                }
            }
            _ => BigRational::zero(),
        }
    }

    /// Residue modulo p^k of an integral value, when enough digits are known.
    pub fn residue_mod(&self, k: u32) -> Result<BigInt> {
        let m = pow_big(self.p, k);
        match &self.kind {
            Kind::Exact => Ok(BigInt::zero()),
            Kind::Vanishing(b) => {
                if *b >= k as i64 {
                    Ok(BigInt::zero())
                } else {
                    Err(LameError::InsufficientPrecision(format!("value known mod p^{b}, asked mod p^{k}")))
                }
            }
            Kind::Value { val, unit, prec } => {
                if *val < 0 {
                    return Err(LameError::InvalidInput("value is not integral".into()));
                }
                if val + (*prec as i64) < k as i64 && *val < k as i64 {
                    return Err(LameError::InsufficientPrecision(format!(
                        "value known mod p^{}, asked mod p^{k}",
                        val + *prec as i64
                    )));
                }
                if *val >= k as i64 {
                    return Ok(BigInt::zero());
                }
                Ok((unit * pow_big(self.p, *val as u32)).mod_floor(&m))
            }
        }
    }

    /// Base-p digits of the unit, least significant first.
    pub fn unit_digits(&self) -> Vec<u64> {
        let mut out = Vec::new();
        if let Kind::Value { unit, prec, .. } = &self.kind {
            let pb = BigInt::from(self.p);
            let mut u = unit.clone();
            for _ in 0..*prec {
                let (q, r) = u.div_mod_floor(&pb);
                out.push(r.to_u64().unwrap());
                u = q;
            }
        }
        out
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Exact => write!(f, "0"),
            Kind::Vanishing(b) => write!(f, "O({}^{})", self.p, b),
            Kind::Value { val, unit, prec } => write!(f, "{}^{} * {} + O({}^{})", self.p, val, unit, self.p, val + *prec as i64),
        }
    }
}

impl Serialize for PadicScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PadicScalar", 4)?;
        st.serialize_field("p", &self.p)?;
        match &self.kind {
            Kind::Exact => {
                st.serialize_field("val", &Option::<i64>::None)?;
                st.serialize_field("unit", "0")?;
                st.serialize_field("prec", &0)?;
            }
            Kind::Vanishing(b) => {
                st.serialize_field("val", b)?;
                st.serialize_field("unit", "0")?;
                st.serialize_field("prec", &0)?;
            }
            Kind::Value { val, unit, prec } => {
                st.serialize_field("val", val)?;
                st.serialize_field("unit", &unit.to_string())?;
                st.serialize_field("prec", prec)?;
            }
        }
        st.end()
    }
}

/// A polynomial with PadicScalar coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct PadicPolynomial {
    coeffs: Vec<PadicScalar>,
}

impl PadicPolynomial {
    pub fn new(mut coeffs: Vec<PadicScalar>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(LameError::ZeroPolynomial);
        }
        let p = coeffs[0].prime();
        if let Some(c) = coeffs.iter().find(|c| c.prime() != p) {
            return Err(LameError::PrimeMismatch(p, c.prime()));
        }
        Ok(PadicPolynomial { coeffs })
    }

    pub fn from_rationals(cs: &[BigRational], p: u64, n: u32) -> Result<Self> {
        Self::new(cs.iter().map(|c| PadicScalar::from_rational(c, p, n)).collect())
    }

    pub fn coefficients(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn prime(&self) -> u64 {
        self.coeffs[0].prime()
    }

    pub fn eval(&self, x: &PadicScalar) -> Result<PadicScalar> {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Result<Self> {
        let p = self.prime();
        if self.coeffs.len() == 1 {
            return Ok(PadicPolynomial { coeffs: vec![PadicScalar::zero(p)] });
        }
        let cs = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.mul_int(i as i64)).collect();
        Ok(PadicPolynomial { coeffs: cs })
    }
}

/// Newton iteration from `x0` to a root known to absolute precision `n`,
/// under the classical hypothesis v(f(x0)) > 2·v(f'(x0)).
pub fn hensel_lift(f: &PadicPolynomial, x0: &PadicScalar, n: u32) -> Result<PadicScalar> {
    let df = f.derivative()?;
    let fx = f.eval(x0)?;
    let dfx = df.eval(x0)?;
    if fx.is_exact_zero() {
        return Ok(x0.clone());
    }
    let vd = dfx.valuation().ok_or(LameError::SingularPoint)?;
    let vf = fx.valuation_lower_bound().unwrap();
    if vf <= 2 * vd {
        return Err(LameError::NoCertifiedConvergence(format!("v(f(x0)) = {vf} is not > 2 v(f'(x0)) = {}", 2 * vd)));
    }
    let target = n as i64;
    let work = target + 2 * vd.max(0) + 4;
    let mut x = x0.lift_to_absolute(work);
    for _ in 0..200 {
        let fx = f.eval(&x)?;
        if fx.is_exact_zero() {
            return Ok(x);
        }
        let d = df.eval(&x)?;
        if d.is_zero() {
            return Err(LameError::SingularPoint);
        }
        let step = fx.div(&d)?;
        match step.valuation() {
            None => {
                let certified = fx.valuation_lower_bound().unwrap() - vd;
                if fx.valuation_lower_bound().unwrap() < target || certified < target {
                    return Err(LameError::InsufficientPrecision(format!(
                        "residual known only to p^{}",
                        fx.valuation_lower_bound().unwrap()
                    )));
                }
                return Ok(x.truncate_absolute(certified.min(work)));
            }
            Some(vs) => {
                x = x.sub(&step)?.lift_to_absolute(work);
                if vs >= work {
                    let fx = f.eval(&x)?;
                    let vr = fx.valuation_lower_bound().unwrap_or(i64::MAX);
                    if vr < target {
                        return Err(LameError::InsufficientPrecision(format!("residual known only to p^{vr}")));
                    }
                    return Ok(x.truncate_absolute((vr.saturating_sub(vd)).min(work)));
                }
            }
        }
    }
    Err(LameError::NoCertifiedConvergence("iteration limit reached".into()))
}

/// Lower convex hull data of the points (i, v(a_i)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygonSlopes {
    pub segments: Vec<(Rational64, u32)>,
    /// Number of leading coefficients that are zero at precision.
    pub zero_order: usize,
}

impl NewtonPolygonSlopes {
    /// (valuation, multiplicity) of the nonzero roots.
    pub fn root_valuations(&self) -> Vec<(Rational64, u32)> {
        self.segments.iter().map(|(s, l)| (-*s, *l)).collect()
    }
}

pub fn newton_polygon(f: &PadicPolynomial) -> Result<NewtonPolygonSlopes> {
    let pts: Vec<(i64, i64)> = f
        .coefficients()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation().map(|v| (i as i64, v)))
        .collect();
    if pts.is_empty() {
        return Err(LameError::ZeroPolynomial);
    }
    let zero_order = pts[0].0 as usize;
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly below the chord
            if (y2 - y1) as i128 * (pt.0 - x1) as i128 >= (pt.1 - y1) as i128 * (x2 - x1) as i128 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let segments = hull
        .windows(2)
        .map(|w| (Rational64::new(w[1].1 - w[0].1, w[1].0 - w[0].0), (w[1].0 - w[0].0) as u32))
        .collect();
    Ok(NewtonPolygonSlopes { segments, zero_order })
}

/// Decides whether the unit `u` is an e-th power in Z_p (p ∤ e).
pub fn eth_power_test_qp(u: &PadicScalar, e: u64) -> Result<bool> {
    let p = u.prime();
    if e == 0 {
        return Err(LameError::InvalidInput("exponent must be positive".into()));
    }
    if e % p == 0 {
        return Err(LameError::WildCase { p, e });
    }
    if u.valuation() != Some(0) {
        return Err(LameError::NotAUnit);
    }
    let r = u.residue_mod(1)?.to_u64().unwrap();
    let ep = e.gcd(&(p - 1));
    if crate::arith::pow_mod(r, (p - 1) / ep, p) != 1 {
        return Ok(false);
    }
    let y0 = (1..p).find(|&y| crate::arith::pow_mod(y, e, p) == r).ok_or_else(|| LameError::Internal("residue root search failed".into()))?;
    let prec = u.precision();
    let mut cs = vec![u.neg()];
    cs.extend((1..e).map(|_| PadicScalar::zero(p)));
    cs.push(PadicScalar::from_i64(1, p, prec));
    let f = PadicPolynomial::new(cs)?;
    let root = hensel_lift(&f, &PadicScalar::from_i64(y0 as i64, p, prec), prec)?;
    let back = root.pow(e as i64)?.sub(u)?;
    if back.valuation_lower_bound().is_some_and(|v| v < prec as i64) {
        return Err(LameError::Internal("Hensel certificate for e-th root failed".into()));
    }
    Ok(true)
}

/// Convenience: the rational `num/den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
