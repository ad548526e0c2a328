//! Concrete models of Q_p(μ_d), unramified enlargements of it, and tame
//! radical extensions on top.
//!
//! A tower is K0 = Q_p(π)(y) with π = 1 - ζ_{p^a} a root of the Eisenstein
//! polynomial Φ_{p^a}(1 - π) (π = p when a = 0) and y a lift of a root of the
//! lexicographically smallest irreducible polynomial of degree F over F_p,
//! optionally followed by Π with Π^E = π0·η for a Teichmüller unit η.
//! Elements carry a shared power of p and integer coordinates on the basis
//! Π^k π^i y^j, known modulo p^rel.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{euler_phi, gcd, inv_mod_big, multiplicative_order, pow_big, split_p, vp_u64};
use crate::cyclotomic::{cyclotomic_polynomial, CyclotomicNumber};
use crate::error::{LameError, Result};
use crate::finite_field::{FiniteField, Fq};
use crate::padic::PadicScalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldDescriptor {
    pub degree: usize,
    pub e: usize,
    pub f: usize,
    pub tower: String,
}

/// Degree data of Q_p(μ_d).
pub fn cyclotomic_degree(d: u64, p: u64) -> FieldDescriptor {
    let a = vp_u64(d, p);
    let dp = d / p.pow(a);
    let e = euler_phi(p.pow(a)) as usize;
    let f = multiplicative_order(p % dp.max(1), dp) as usize;
    let tower = if d <= 2 || e * f == 1 { format!("Q_{p}") } else { format!("Q_{p}(zeta_{d})") };
    FieldDescriptor { degree: e * f, e, f, tower }
}

/// Canonical labelling of the Frobenius orbits on primitive d-th roots of
/// unity by the irreducible factors of Φ_{d'} over F_p, sorted
/// lexicographically (highest non-leading coefficient compared first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaOrbits {
    pub p: u64,
    pub d: u64,
    pub a: u32,
    pub dprime: u64,
    /// Residue degree f = ord_{d'}(p).
    pub f: usize,
    /// Irreducible factors of Φ_{d'} mod p in label order.
    pub factors: Vec<Vec<u64>>,
    /// Least exponent (mod d') of the reference root lying in each orbit.
    pub reps: Vec<u64>,
}

fn lex_key(poly: &[u64]) -> Vec<u64> {
    poly.iter().rev().skip(1).copied().collect()
}

impl ZetaOrbits {
    pub fn new(d: u64, p: u64) -> Self {
        let a = vp_u64(d, p);
        let dprime = d / p.pow(a);
        let f = multiplicative_order(p % dprime.max(1), dprime) as usize;
        if dprime == 1 {
            return ZetaOrbits { p, d, a, dprime, f: 1, factors: vec![vec![p - 1, 1]], reps: vec![0] };
        }
        let k = FiniteField::new(p, f);
        let r = k.element_of_order(dprime).expect("F_{p^f} contains μ_{d'}");
        let units: Vec<u64> = (1..dprime).filter(|j| gcd(*j, dprime) == 1).collect();
        let mut seen = vec![false; dprime as usize];
        let mut orbits: Vec<(Vec<u64>, Vec<u64>)> = Vec::new();
        for &j in &units {
            if seen[j as usize] {
                continue;
            }
            let mut orb = Vec::new();
            let mut x = j;
            while !seen[x as usize] {
                seen[x as usize] = true;
                orb.push(x);
                x = x * p % dprime;
            }
            let mp = k.minimal_polynomial(&k.pow_u64(&r, j));
            orbits.push((mp, orb));
        }
        orbits.sort_by_key(|(mp, _)| lex_key(mp));
        let j0 = *orbits[0].1.iter().min().unwrap();
        let j0inv = crate::arith::inv_mod_u64(j0 as i64, dprime).unwrap();
        let reps = orbits.iter().map(|(_, orb)| orb.iter().map(|j| j * j0inv % dprime).min().unwrap()).collect();
        let factors = orbits.into_iter().map(|(mp, _)| mp).collect();
        ZetaOrbits { p, d, a, dprime, f, factors, reps }
    }

    pub fn count(&self) -> usize {
        self.reps.len()
    }

    /// Exponent j (mod d) with ζ = ζ_ref^j for orbit k: j ≡ 1 (mod p^a) and
    /// j ≡ reps[k] (mod d').
    pub fn exponent(&self, k: usize) -> u64 {
        let pa = self.p.pow(self.a);
        if self.dprime == 1 {
            return 1 % self.d.max(1);
        }
        crate::arith::crt(1 % pa, pa, self.reps[k], self.dprime)
    }

    /// Orbit label of ζ_ref^j for j coprime to d.
    pub fn orbit_of_exponent(&self, j: u64) -> Option<usize> {
        if self.dprime == 1 {
            return Some(0);
        }
        let jr = j % self.dprime;
        if gcd(jr, self.dprime) != 1 {
            return None;
        }
        (0..self.count()).find(|&k| {
            let mut x = self.reps[k];
            for _ in 0..self.f {
                if x == jr {
                    return true;
                }
                x = x * self.p % self.dprime;
            }
            false
        })
    }

    /// Number of ζ in each orbit: [Q_p(μ_d):Q_p].
    pub fn orbit_size(&self) -> usize {
        euler_phi(self.p.pow(self.a)) as usize * self.f
    }
}

#[derive(Clone, Debug)]
struct Raw {
    shift: i64,
    rel: u32,
    coords: Vec<BigInt>,
}

#[derive(Debug)]
struct TowerInner {
    p: u64,
    prec: u32,
    conductor: u64,
    a: u32,
    e0: usize,
    /// h_0..h_{e0-1} of the monic Eisenstein polynomial in π.
    ram: Vec<BigInt>,
    fdeg: usize,
    unram: Vec<BigInt>,
    residue: FiniteField,
    big_e: usize,
    /// Coordinates of π0·η in K0 (radical level only).
    pi0_eta: Vec<BigInt>,
    eta_residue: Option<Fq>,
    dim: usize,
    pi_inv: Vec<Raw>,
    big_pi_inv: Vec<Raw>,
    zeta_ref: Option<Raw>,
    description: String,
}

/// An immutable tower of local fields; cheap to clone.
#[derive(Clone, Debug)]
pub struct LocalFieldTower(Arc<TowerInner>);

impl PartialEq for LocalFieldTower {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0)
    }
}

fn ram_polynomial(p: u64, a: u32) -> Vec<BigInt> {
    if a == 0 {
        return vec![BigInt::zero()];
    }
    let phi = cyclotomic_polynomial(p.pow(a));
    let e0 = phi.len() - 1;
    // Φ(1 - π) by Horner in π
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); e0 + 1];
    for c in phi.iter().rev() {
        // acc = acc·(1 - π) + c
        let mut next = vec![BigInt::zero(); e0 + 1];
        for i in 0..=e0 {
            if acc[i].is_zero() {
                continue;
            }
            next[i] += &acc[i];
            if i < e0 {
                next[i + 1] -= &acc[i];
            }
        }
        next[0] += c;
        acc = next;
    }
    if acc[e0].is_negative() {
        acc.iter_mut().for_each(|x| *x = -x.clone());
    }
    debug_assert!(acc[e0].is_one());
    acc.truncate(e0);
    acc
}

impl LocalFieldTower {
    /// K0 = Q_p(μ_{p^a}) composed with the unramified extension of degree
    /// `fdeg`; `conductor` names the root of unity d it is meant to carry
    /// (ord_{d'}(p) must divide `fdeg`).
    pub fn new(p: u64, conductor: u64, fdeg: usize, prec: u32) -> Result<Self> {
        if !crate::arith::is_prime(p) {
            return Err(LameError::InvalidInput(format!("{p} is not prime")));
        }
        let a = vp_u64(conductor, p);
        let dprime = conductor / p.pow(a);
        let f = multiplicative_order(p % dprime.max(1), dprime) as usize;
        if fdeg % f != 0 {
            return Err(LameError::InvalidInput(format!("unramified degree {fdeg} does not contain μ_{dprime}")));
        }
        let e0 = euler_phi(p.pow(a)) as usize;
        let residue = FiniteField::new(p, fdeg);
        let unram = residue.modulus()[..fdeg].iter().map(|c| BigInt::from(*c)).collect();
        let mut desc = format!("Q_{p}");
        if a > 0 && e0 > 1 {
            desc.push_str(&format!("(zeta_{})", p.pow(a)));
        }
        if fdeg > 1 {
            desc.push_str(&format!("(unramified degree {fdeg})"));
        }
        let inner = TowerInner {
            p,
            prec,
            conductor,
            a,
            e0,
            ram: ram_polynomial(p, a),
            fdeg,
            unram,
            residue,
            big_e: 1,
            pi0_eta: Vec::new(),
            eta_residue: None,
            dim: e0 * fdeg,
            pi_inv: Vec::new(),
            big_pi_inv: Vec::new(),
            zeta_ref: None,
            description: desc,
        };
        Ok(Self::finish(inner))
    }

    /// Q_p(μ_d) itself.
    pub fn cyclotomic(p: u64, d: u64, prec: u32) -> Result<Self> {
        let cd = cyclotomic_degree(d, p);
        Self::new(p, d, cd.f, prec)
    }

    /// Adjoins Π with Π^E = π0·η; `eta` must be a unit of the unramified level.
    pub fn extend_radical(&self, big_e: usize, eta: &FieldElement) -> Result<Self> {
        let t = &self.0;
        if t.big_e != 1 {
            return Err(LameError::InvalidInput("tower already has a radical level".into()));
        }
        if big_e as u64 % t.p == 0 {
            return Err(LameError::WildCase { p: t.p, e: big_e as u64 });
        }
        if big_e == 1 {
            return Ok(self.clone());
        }
        if eta.valuation() != Some(Rational64::zero()) {
            return Err(LameError::NotAUnit);
        }
        let pi0_eta = self.uniformizer().mul(eta);
        let raw = pi0_eta.to_raw_at(0, t.prec);
        let mut desc = t.description.clone();
        desc.push_str(&format!("(Pi), Pi^{big_e} = pi*eta"));
        let inner = TowerInner {
            p: t.p,
            prec: t.prec,
            conductor: t.conductor,
            a: t.a,
            e0: t.e0,
            ram: t.ram.clone(),
            fdeg: t.fdeg,
            unram: t.unram.clone(),
            residue: t.residue.clone(),
            big_e,
            pi0_eta: raw.coords,
            eta_residue: Some(eta.residue()?),
            dim: t.dim * big_e,
            pi_inv: Vec::new(),
            big_pi_inv: Vec::new(),
            zeta_ref: None,
            description: desc,
        };
        Ok(Self::finish(inner))
    }

    fn finish(inner: TowerInner) -> Self {
        let stage = LocalFieldTower(Arc::new(inner));
        let t = &stage.0;
        let p = t.p;
        // π^{-1}
        let pi_inv1 = if t.a == 0 {
            FieldElement::from_raw(&stage, -1, t.prec, stage.basis_coords(0, 0, 0))
        } else {
            let h0 = &t.ram[0];
            let sign = if h0.is_positive() { -1 } else { 1 };
            let mut c = vec![BigInt::zero(); t.dim];
            for i in 0..t.e0 {
                let hi = if i + 1 == t.e0 { BigInt::one() } else { t.ram[i + 1].clone() };
                c[stage.idx(0, i, 0)] = hi * sign;
            }
            FieldElement::from_raw(&stage, -1, t.prec, c)
        };
        let mut pi_inv = vec![FieldElement::one_in(&stage)];
        for i in 1..t.e0 {
            let next = pi_inv[i - 1].mul(&pi_inv1);
            pi_inv.push(next);
        }
        let mut big_pi_inv = vec![FieldElement::one_in(&stage)];
        if t.big_e > 1 {
            let eta_inv = stage.teichmuller(&t.residue.inv(t.eta_residue.as_ref().unwrap()).unwrap());
            let base = pi_inv1.mul(&eta_inv);
            for k in 1..t.big_e {
                let mono = FieldElement::from_raw(&stage, 0, t.prec, stage.basis_coords(t.big_e - k, 0, 0));
                big_pi_inv.push(mono.mul(&base));
            }
        }
        let zeta_ref = {
            let orbits = ZetaOrbits::new(t.conductor, p);
            let z = stage.zeta_pa();
            if orbits.dprime == 1 {
                z
            } else {
                let s = t.residue.element_of_order(orbits.dprime).unwrap();
                let factor0 = &orbits.factors[0];
                let j = (1..orbits.dprime)
                    .find(|j| gcd(*j, orbits.dprime) == 1 && &t.residue.minimal_polynomial(&t.residue.pow_u64(&s, *j)) == factor0)
                    .unwrap();
                let rbar = t.residue.pow_u64(&s, j);
                z.mul(&stage.teichmuller(&rbar))
            }
        };
        let to_raw = |x: &FieldElement| Raw { shift: x.shift, rel: x.rel, coords: x.coords.clone() };
        let inner = TowerInner {
            p: t.p,
            prec: t.prec,
            conductor: t.conductor,
            a: t.a,
            e0: t.e0,
            ram: t.ram.clone(),
            fdeg: t.fdeg,
            unram: t.unram.clone(),
            residue: t.residue.clone(),
            big_e: t.big_e,
            pi0_eta: t.pi0_eta.clone(),
            eta_residue: t.eta_residue.clone(),
            dim: t.dim,
            pi_inv: pi_inv.iter().map(to_raw).collect(),
            big_pi_inv: big_pi_inv.iter().map(to_raw).collect(),
            zeta_ref: Some(to_raw(&zeta_ref)),
            description: t.description.clone(),
        };
        LocalFieldTower(Arc::new(inner))
    }

    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.0.e0 + i) * self.0.fdeg + j
    }

    fn basis_coords(&self, k: usize, i: usize, j: usize) -> Vec<BigInt> {
        let mut c = vec![BigInt::zero(); self.0.dim];
        c[self.idx(k, i, j)] = BigInt::one();
        c
    }

    pub fn prime(&self) -> u64 {
        self.0.p
    }

    pub fn precision(&self) -> u32 {
        self.0.prec
    }

    pub fn conductor(&self) -> u64 {
        self.0.conductor
    }

    pub fn degree(&self) -> usize {
        self.0.dim
    }

    /// Absolute ramification index.
    pub fn e(&self) -> usize {
        self.0.e0 * self.0.big_e
    }

    /// Absolute residue degree.
    pub fn f(&self) -> usize {
        self.0.fdeg
    }

    pub fn cyclotomic_ramification(&self) -> usize {
        self.0.e0
    }

    pub fn radical_index(&self) -> usize {
        self.0.big_e
    }

    pub fn residue_field(&self) -> &FiniteField {
        &self.0.residue
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor { degree: self.degree(), e: self.e(), f: self.f(), tower: self.0.description.clone() }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { t: self.clone(), shift: 0, rel: 0, coords: vec![BigInt::zero(); self.0.dim], exact: true }
    }

    pub fn one(&self) -> FieldElement {
        let mut x = FieldElement::one_in(self);
        x.exact = true;
        x
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        if n.is_zero() {
            return self.zero();
        }
        let (v, u) = split_p(n, self.0.p);
        let mut c = vec![BigInt::zero(); self.0.dim];
        c[0] = u;
        let mut x = FieldElement::from_raw(self, v as i64, self.0.prec, c);
        x.exact = true;
        x
    }

    pub fn from_rational(&self, r: &BigRational) -> FieldElement {
        if r.is_zero() {
            return self.zero();
        }
        let (vn, a) = split_p(r.numer(), self.0.p);
        let (vd, b) = split_p(r.denom(), self.0.p);
        let m = pow_big(self.0.p, self.0.prec);
        let u = (a * inv_mod_big(&b, &m).unwrap()).mod_floor(&m);
        let mut c = vec![BigInt::zero(); self.0.dim];
        c[0] = u;
        FieldElement::from_raw(self, vn as i64 - vd as i64, self.0.prec, c)
    }

    pub fn from_padic(&self, x: &PadicScalar) -> FieldElement {
        match x.valuation() {
            None => match x.absolute_precision() {
                None => self.zero(),
                Some(b) => FieldElement::from_raw(self, b, 0, vec![BigInt::zero(); self.0.dim]),
            },
            Some(v) => {
                let mut c = vec![BigInt::zero(); self.0.dim];
                c[0] = x.unit().unwrap().clone();
                FieldElement::from_raw(self, v, x.precision().min(self.0.prec), c)
            }
        }
    }

    /// Σ c_t ζ^t with ζ ↦ `zeta`.
    pub fn from_cyclotomic(&self, c: &CyclotomicNumber, zeta: &FieldElement) -> FieldElement {
        let mut acc = self.zero();
        let mut zp = self.one();
        for (t, ct) in c.coefficients().iter().enumerate() {
            if t > 0 {
                zp = zp.mul(zeta);
            }
            if !ct.is_zero() {
                acc = acc.add(&self.from_rational(ct).mul(&zp));
            }
        }
        acc
    }

    /// The uniformizer of the cyclotomic level (π, or p when a = 0).
    pub fn uniformizer(&self) -> FieldElement {
        if self.0.a == 0 {
            self.from_int(self.0.p as i64)
        } else {
            FieldElement::from_raw(self, 0, self.0.prec, self.basis_coords(0, 1.min(self.0.e0 - 1), 0)).fix_pi_if_trivial()
        }
    }

    /// The uniformizer of the whole tower.
    pub fn prime_element(&self) -> FieldElement {
        if self.0.big_e > 1 {
            FieldElement::from_raw(self, 0, self.0.prec, self.basis_coords(1, 0, 0))
        } else {
            self.uniformizer()
        }
    }

    /// The generator y of the unramified level.
    pub fn unramified_generator(&self) -> FieldElement {
        if self.0.fdeg == 1 {
            return self.from_bigint(&-self.0.unram[0].clone());
        }
        FieldElement::from_raw(self, 0, self.0.prec, self.basis_coords(0, 0, 1))
    }

    /// ζ_{p^a} = 1 - π (1 when a = 0).
    pub fn zeta_pa(&self) -> FieldElement {
        if self.0.a == 0 {
            return self.one();
        }
        let mut c = self.basis_coords(0, 0, 0);
        if self.0.e0 > 1 {
            c[self.idx(0, 1, 0)] = BigInt::from(-1);
            FieldElement::from_raw(self, 0, self.0.prec, c)
        } else {
            // p = 2, a = 1: π = 2 and ζ_2 = -1
            self.from_int(-1)
        }
    }

    /// The reference primitive d-th root of unity.
    pub fn zeta_reference(&self) -> FieldElement {
        let r = self.0.zeta_ref.as_ref().unwrap();
        FieldElement::from_raw(self, r.shift, r.rel, r.coords.clone())
    }

    /// ζ_ref^j.
    pub fn zeta(&self, j: i64) -> FieldElement {
        self.zeta_reference().pow(j)
    }

    /// Lift of a residue with coordinates in [0, p).
    pub fn lift_residue(&self, r: &Fq) -> FieldElement {
        let mut c = vec![BigInt::zero(); self.0.dim];
        for (j, x) in r.iter().enumerate() {
            c[j] = BigInt::from(*x);
        }
        FieldElement::from_raw(self, 0, self.0.prec, c)
    }

    /// The Teichmüller representative of a nonzero residue.
    pub fn teichmuller(&self, r: &Fq) -> FieldElement {
        let k = &self.0.residue;
        assert!(!k.is_zero(r), "Teichmüller lift of zero");
        let m: BigUint = k.unit_order();
        let m_el = self.from_bigint(&BigInt::from(m.clone()));
        let mut x = self.lift_residue(r);
        for _ in 0..200 {
            let xm1 = x.pow_biguint(&(&m - 1u32));
            let num = xm1.mul(&x).sub(&self.one());
            if num.is_zero() {
                break;
            }
            let den = m_el.mul(&xm1);
            x = x.sub(&num.mul(&den.inv().expect("unit")));
        }
        x
    }

    /// Re-expresses an element of the tower this one extends (same K0).
    pub fn embed(&self, x: &FieldElement) -> Result<FieldElement> {
        let s = &x.t.0;
        let t = &self.0;
        if s.p != t.p || s.a != t.a || s.fdeg != t.fdeg || s.unram != t.unram || s.big_e != 1 {
            return Err(LameError::InvalidInput("element does not live in the base of this tower".into()));
        }
        let mut c = vec![BigInt::zero(); t.dim];
        c[..s.dim].clone_from_slice(&x.coords);
        let mut y = FieldElement::from_raw(self, x.shift, x.rel.min(t.prec), c);
        y.exact = x.exact;
        Ok(y)
    }

    /// Block-wise product in K0 without reduction in y and π.
    fn raw_k0(&self, a: &[BigInt], b: &[BigInt], out: &mut [BigInt]) {
        let (e0, fd) = (self.0.e0, self.0.fdeg);
        let w = 2 * fd - 1;
        for i1 in 0..e0 {
            for j1 in 0..fd {
                let x = &a[i1 * fd + j1];
                if x.is_zero() {
                    continue;
                }
                for i2 in 0..e0 {
                    for j2 in 0..fd {
                        let y = &b[i2 * fd + j2];
                        if y.is_zero() {
                            continue;
                        }
                        out[(i1 + i2) * w + j1 + j2] += x * y;
                    }
                }
            }
        }
    }

    /// Reduces a (2e0-1)×(2F-1) block to e0×F using the defining relations.
    fn reduce_k0(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        let (e0, fd) = (self.0.e0, self.0.fdeg);
        let w = 2 * fd - 1;
        let rows = 2 * e0 - 1;
        for i in 0..rows {
            for j in (fd..w).rev() {
                let c = std::mem::take(&mut v[i * w + j]);
                if c.is_zero() {
                    continue;
                }
                for (t, g) in self.0.unram.iter().enumerate() {
                    if !g.is_zero() {
                        v[i * w + j - fd + t] -= &c * g;
                    }
                }
            }
        }
        if self.0.a > 0 {
            for i in (e0..rows).rev() {
                for j in 0..fd {
                    let c = std::mem::take(&mut v[i * w + j]);
                    if c.is_zero() {
                        continue;
                    }
                    for (t, h) in self.0.ram.iter().enumerate() {
                        if !h.is_zero() {
                            v[(i - e0 + t) * w + j] -= &c * h;
                        }
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(e0 * fd);
        for i in 0..e0 {
            for j in 0..fd {
                out.push(std::mem::take(&mut v[i * w + j]));
            }
        }
        out
    }

    fn mul_k0(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let (e0, fd) = (self.0.e0, self.0.fdeg);
        let mut buf = vec![BigInt::zero(); (2 * e0 - 1) * (2 * fd - 1)];
        self.raw_k0(a, b, &mut buf);
        self.reduce_k0(buf)
    }

    /// Exact product of coordinate vectors (no modular reduction).
    fn mul_coords(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let t = &self.0;
        let bs = t.e0 * t.fdeg;
        if t.big_e == 1 {
            return self.mul_k0(a, b);
        }
        let ee = t.big_e;
        let nz = |v: &[BigInt], k: usize| v[k * bs..(k + 1) * bs].iter().any(|x| !x.is_zero());
        let raw_len = (2 * t.e0 - 1) * (2 * t.fdeg - 1);
        let mut slots: Vec<Option<Vec<BigInt>>> = vec![None; 2 * ee - 1];
        for k1 in 0..ee {
            if !nz(a, k1) {
                continue;
            }
            for k2 in 0..ee {
                if !nz(b, k2) {
                    continue;
                }
                let slot = slots[k1 + k2].get_or_insert_with(|| vec![BigInt::zero(); raw_len]);
                self.raw_k0(&a[k1 * bs..(k1 + 1) * bs], &b[k2 * bs..(k2 + 1) * bs], slot);
            }
        }
        let mut reduced: Vec<Vec<BigInt>> = slots.into_iter().map(|s| s.map(|v| self.reduce_k0(v)).unwrap_or_else(|| vec![BigInt::zero(); bs])).collect();
        for k in (ee..2 * ee - 1).rev() {
            let blk = std::mem::take(&mut reduced[k]);
            if blk.iter().all(|x| x.is_zero()) {
                continue;
            }
            let m = self.mul_k0(&blk, &t.pi0_eta);
            for (dst, src) in reduced[k - ee].iter_mut().zip(m) {
                *dst += src;
            }
        }
        reduced.into_iter().take(ee).flatten().collect()
    }
}

impl fmt::Display for LocalFieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.description)
    }
}

/// An element of a tower.
#[derive(Clone, Debug)]
pub struct FieldElement {
    t: LocalFieldTower,
    shift: i64,
    rel: u32,
    coords: Vec<BigInt>,
    /// Set only for exact integer constants (used to recognise exact 0 and 1).
    exact: bool,
}

impl FieldElement {
    fn one_in(t: &LocalFieldTower) -> Self {
        FieldElement::from_raw(t, 0, t.0.prec, t.basis_coords(0, 0, 0))
    }

    fn fix_pi_if_trivial(self) -> Self {
        // when e0 = 1 and a = 1 (p = 2), π = 2 - ... the basis has no π slot
        if self.t.0.a > 0 && self.t.0.e0 == 1 {
            // Φ_2(1 - π) = 2 - π, so π = 2
            return self.t.from_int(2);
        }
        self
    }

    fn from_raw(t: &LocalFieldTower, shift: i64, rel: u32, mut coords: Vec<BigInt>) -> Self {
        let p = t.0.p;
        if rel == 0 {
            coords.iter_mut().for_each(|c| *c = BigInt::zero());
            return FieldElement { t: t.clone(), shift, rel: 0, coords, exact: false };
        }
        let m = pow_big(p, rel);
        for c in coords.iter_mut() {
            if c.is_negative() || *c >= m {
                *c = c.mod_floor(&m);
            }
        }
        let mut k = u32::MAX;
        for c in coords.iter() {
            if !c.is_zero() {
                k = k.min(split_p(c, p).0);
                if k == 0 {
                    break;
                }
            }
        }
        if k == u32::MAX {
            coords.iter_mut().for_each(|c| *c = BigInt::zero());
            return FieldElement { t: t.clone(), shift: shift + rel as i64, rel: 0, coords, exact: false };
        }
        if k > 0 {
            let pk = pow_big(p, k);
            coords.iter_mut().for_each(|c| *c = &*c / &pk);
        }
        FieldElement { t: t.clone(), shift: shift + k as i64, rel: rel - k, coords, exact: false }
    }

    fn to_raw_at(&self, shift: i64, rel: u32) -> Raw {
        let d = self.shift - shift;
        let coords = if d >= 0 {
            let pk = pow_big(self.t.0.p, d as u32);
            self.coords.iter().map(|c| c * &pk).collect()
        } else {
            panic!("raw conversion would need negative shift")
        };
        Raw { shift, rel, coords }
    }

    pub fn tower(&self) -> &LocalFieldTower {
        &self.t
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact && self.rel == 0
    }

    pub fn is_exact_one(&self) -> bool {
        self.exact && self.shift == 0 && self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// Zero at the carried precision (or exactly).
    pub fn is_zero(&self) -> bool {
        self.rel == 0
    }

    /// Absolute precision in the coordinate lattice (p-adic digits).
    pub fn absolute_precision(&self) -> Option<i64> {
        if self.is_exact_zero() {
            None
        } else {
            Some(self.shift + self.rel as i64)
        }
    }

    pub fn relative_precision(&self) -> u32 {
        self.rel
    }

    fn slot_valuations(&self) -> Option<(i64, usize, usize, Rational64)> {
        if self.rel == 0 {
            return None;
        }
        let t = &self.t.0;
        let (e0, fd, ee) = (t.e0, t.fdeg, t.big_e);
        let den = (e0 * ee) as i64;
        let mut best: Option<(i64, usize, usize, Rational64)> = None;
        for k in 0..ee {
            for i in 0..e0 {
                let mut vb = u32::MAX;
                for j in 0..fd {
                    let c = &self.coords[(k * e0 + i) * fd + j];
                    if !c.is_zero() {
                        vb = vb.min(split_p(c, t.p).0);
                    }
                }
                if vb == u32::MAX {
                    continue;
                }
                let v = Rational64::new((self.shift + vb as i64) * den + (k + i * ee) as i64, den);
                if best.as_ref().is_none_or(|b| v < b.3) {
                    best = Some((vb as i64, k, i, v));
                }
            }
        }
        best
    }

    /// Valuation normalized by v(p) = 1; `None` when zero at precision.
    pub fn valuation(&self) -> Option<Rational64> {
        self.slot_valuations().map(|b| b.3)
    }

    /// A guaranteed lower bound on the valuation (`None` for exact zero).
    pub fn valuation_lower_bound(&self) -> Option<Rational64> {
        if self.is_exact_zero() {
            return None;
        }
        Some(self.valuation().unwrap_or_else(|| Rational64::from_integer(self.shift)))
    }

    /// Valuation in the normalized discrete valuation of the tower.
    pub fn normalized_valuation(&self) -> Option<i64> {
        self.valuation().map(|v| (v * Rational64::from_integer(self.t.e() as i64)).to_integer())
    }

    /// Residue class of an integral element.
    pub fn residue(&self) -> Result<Fq> {
        let k = &self.t.0.residue;
        match self.valuation() {
            None => {
                if self.shift >= 1 {
                    Ok(k.zero())
                } else {
                    Err(LameError::InsufficientPrecision("residue of a value zero at precision < 1".into()))
                }
            }
            Some(v) if v < Rational64::zero() => Err(LameError::InvalidInput("residue of a non-integral element".into())),
            Some(v) if v > Rational64::zero() => Ok(k.zero()),
            Some(_) => {
                let p = BigInt::from(self.t.0.p);
                Ok((0..self.t.0.fdeg).map(|j| self.coords[j].mod_floor(&p).to_u64().unwrap()).collect())
            }
        }
    }

    pub fn neg(&self) -> Self {
        if self.rel == 0 {
            return self.clone();
        }
        let mut x = FieldElement::from_raw(&self.t, self.shift, self.rel, self.coords.iter().map(|c| -c).collect());
        x.exact = self.exact;
        x
    }

    pub fn add(&self, o: &Self) -> Self {
        assert!(self.t == o.t, "elements of different towers");
        if self.is_exact_zero() {
            return o.clone();
        }
        if o.is_exact_zero() {
            return self.clone();
        }
        let abs = (self.shift + self.rel as i64).min(o.shift + o.rel as i64);
        let s = self.shift.min(o.shift);
        if abs <= s {
            return FieldElement::from_raw(&self.t, abs, 0, self.coords.clone());
        }
        let p = self.t.0.p;
        let fa = pow_big(p, (self.shift - s) as u32);
        let fb = pow_big(p, (o.shift - s) as u32);
        let c = self.coords.iter().zip(&o.coords).map(|(x, y)| x * &fa + y * &fb).collect();
        FieldElement::from_raw(&self.t, s, (abs - s) as u32, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert!(self.t == o.t, "elements of different towers");
        if self.is_exact_zero() || o.is_exact_zero() {
            return self.t.zero();
        }
        if self.rel == 0 || o.rel == 0 {
            // vanishing factor: p^{abs}·O times p^{shift}·O
            return FieldElement::from_raw(&self.t, self.shift + o.shift + self.rel.min(o.rel) as i64, 0, self.coords.clone());
        }
        let rel = self.rel.min(o.rel).min(self.t.0.prec);
        let c = self.t.mul_coords(&self.coords, &o.coords);
        FieldElement::from_raw(&self.t, self.shift + o.shift, rel, c)
    }

    /// Multiplies by p^k exactly.
    pub fn mul_p_power(&self, k: i64) -> Self {
        let mut x = self.clone();
        if !self.is_exact_zero() {
            x.shift += k;
        }
        x.exact = false;
        x
    }

    fn from_stored(&self, r: &Raw) -> Self {
        FieldElement::from_raw(&self.t, r.shift, r.rel, r.coords.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        let (w, k, i, _) = self.slot_valuations().ok_or(LameError::DivisionByZero)?;
        if (self.shift + w, k, i) == (0, 0, 0) {
            return self.inv_unit();
        }
        let t = &self.t.0;
        let mut scale = self.from_stored(&t.pi_inv[i]);
        if k > 0 {
            scale = scale.mul(&self.from_stored(&t.big_pi_inv[k]));
        }
        let scale = scale.mul_p_power(-(self.shift + w));
        let u = self.mul(&scale);
        let ui = u.inv_unit()?;
        Ok(ui.mul(&scale))
    }

    /// Inverse of a unit by Newton iteration from the residue inverse.
    fn inv_unit(&self) -> Result<Self> {
        let k = &self.t.0.residue;
        let r = self.residue()?;
        let ri = k.inv(&r).ok_or(LameError::DivisionByZero)?;
        let one = self.t.one();
        let mut y = self.t.lift_residue(&ri);
        for _ in 0..64 {
            let err = one.sub(&self.mul(&y));
            if err.is_zero() {
                break;
            }
            y = y.add(&y.mul(&err));
        }
        // cap at the operand's precision
        Ok(y.with_relative_precision(self.rel))
    }

    fn with_relative_precision(&self, rel: u32) -> Self {
        if rel >= self.rel {
            return self.clone();
        }
        FieldElement::from_raw(&self.t, self.shift, rel, self.coords.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, k: i64) -> Self {
        if k < 0 {
            return self.inv().expect("inverse of zero").pow(-k);
        }
        self.pow_biguint(&BigUint::from(k as u64))
    }

    pub fn pow_biguint(&self, e: &BigUint) -> Self {
        let mut result = self.t.one();
        if e.is_zero() {
            return result;
        }
        let bits = e.bits();
        for b in (0..bits).rev() {
            result = result.mul(&result);
            if e.bit(b) {
                result = result.mul(self);
            }
        }
        result
    }

    /// Raises the carried precision to absolute precision `abs` by
    /// treating the known digits as exact.
    pub fn lift_to_absolute(&self, abs: i64) -> Self {
        if self.is_exact_zero() {
            return self.clone();
        }
        let cur = self.shift + self.rel as i64;
        if cur >= abs {
            return self.clone();
        }
        if self.rel == 0 {
            return FieldElement::from_raw(&self.t, abs, 0, self.coords.clone());
        }
        FieldElement { t: self.t.clone(), shift: self.shift, rel: (abs - self.shift) as u32, coords: self.coords.clone(), exact: false }
    }

    /// Drops digits beyond absolute precision `abs`.
    pub fn truncate_absolute(&self, abs: i64) -> Self {
        if self.is_exact_zero() {
            return FieldElement::from_raw(&self.t, abs, 0, self.coords.clone());
        }
        let cur = self.shift + self.rel as i64;
        if cur <= abs {
            return self.clone();
        }
        if abs <= self.shift {
            return FieldElement::from_raw(&self.t, abs, 0, self.coords.clone());
        }
        FieldElement::from_raw(&self.t, self.shift, (abs - self.shift) as u32, self.coords.clone())
    }

    /// Coordinates on the basis Π^k π^i y^j as p-adic scalars.
    pub fn coordinates(&self) -> Vec<PadicScalar> {
        let p = self.t.0.p;
        if self.is_exact_zero() {
            return vec![PadicScalar::zero(p); self.coords.len()];
        }
        self.coords
            .iter()
            .map(|c| {
                if self.rel == 0 {
                    PadicScalar::vanishing(p, self.shift)
                } else {
                    PadicScalar::from_parts(p, self.shift, c.clone(), self.rel)
                }
            })
            .collect()
    }

    /// Multiplication-by-self matrix over Q_p (column b is self·e_b).
    pub fn multiplication_matrix(&self) -> Vec<Vec<PadicScalar>> {
        let dim = self.t.0.dim;
        let mut cols = Vec::with_capacity(dim);
        for b in 0..dim {
            let mut c = vec![BigInt::zero(); dim];
            c[b] = BigInt::one();
            let e = FieldElement::from_raw(&self.t, 0, self.t.0.prec.max(self.rel), c);
            cols.push(self.mul(&e).coordinates());
        }
        cols
    }

    /// v_p of the norm to Q_p, from the determinant of the multiplication matrix.
    pub fn norm_valuation(&self) -> Result<i64> {
        let m = self.multiplication_matrix();
        let det = determinant(m)?;
        det.valuation().ok_or_else(|| LameError::InsufficientPrecision("norm indistinguishable from zero".into()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "coords": self.coordinates(),
            "valuation": self.valuation().map(|v| format!("{}/{}", v.numer(), v.denom())),
            "abs_prec": self.absolute_precision(),
        })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.valuation() {
            Some(v) => write!(f, "<element v={} +O(p^{})>", v, self.shift + self.rel as i64),
            None if self.is_exact_zero() => write!(f, "0"),
            None => write!(f, "O(p^{})", self.shift),
        }
    }
}

/// Determinant over Q_p by elimination with minimal-valuation pivots.
pub fn determinant(mut cols: Vec<Vec<PadicScalar>>) -> Result<PadicScalar> {
    let n = cols.len();
    let p = cols[0][0].prime();
    let mut det: Option<PadicScalar> = None;
    let mut negate = false;
    // work on rows = coordinate index, columns = basis index
    let mut a: Vec<Vec<PadicScalar>> = (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect();
    cols.clear();
    for col in 0..n {
        let mut piv = None;
        for r in col..n {
            if let Some(v) = a[r][col].valuation() {
                if piv.is_none_or(|(_, pv)| v < pv) {
                    piv = Some((r, v));
                }
            }
        }
        let (r, _) = piv.ok_or_else(|| LameError::InsufficientPrecision("singular at precision".into()))?;
        if r != col {
            a.swap(r, col);
            negate = !negate;
        }
        let pv = a[col][col].clone();
        det = Some(match det {
            None => pv.clone(),
            Some(d) => d.mul(&pv)?,
        });
        let pinv = pv.inv()?;
        for r2 in col + 1..n {
            if a[r2][col].is_exact_zero() {
                continue;
            }
            let factor = a[r2][col].mul(&pinv)?;
            for c2 in col..n {
                let t = factor.mul(&a[col][c2])?;
                a[r2][c2] = a[r2][c2].sub(&t)?;
            }
        }
    }
    let det = det.unwrap_or_else(|| PadicScalar::from_i64(1, p, 1));
    Ok(if negate { det.neg() } else { det })
}

/// Valuation through the norm: v_p(N(z)) / [L:Q_p].
pub fn element_valuation(z: &FieldElement) -> Result<Rational64> {
    if z.is_zero() {
        return Err(LameError::InsufficientPrecision(format!(
            "element indistinguishable from zero; valuation ≥ {}",
            z.valuation_lower_bound().map(|v| v.to_string()).unwrap_or_else(|| "∞".into())
        )));
    }
    let nv = z.norm_valuation()?;
    Ok(Rational64::new(nv, z.tower().degree() as i64))
}

/// Whether α ∈ (K^×)^e for a tower without radical level (p ∤ e).
pub fn is_eth_power(alpha: &FieldElement, e: u64) -> Result<bool> {
    let t = alpha.tower();
    let p = t.prime();
    if e % p == 0 {
        return Err(LameError::WildCase { p, e });
    }
    let v = alpha.normalized_valuation().ok_or(LameError::DivisionByZero)?;
    if v.rem_euclid(e as i64) != 0 {
        return Ok(false);
    }
    let unit = alpha.mul(&t.prime_element().pow(-v));
    let k = t.residue_field();
    let r = unit.residue()?;
    if !k.is_power(&r, e) {
        return Ok(false);
    }
    // certify: Newton on y^e = unit/lift(root)^e from y = 1
    let root = k.nth_root(&r, e).ok_or_else(|| LameError::Internal("residue root missing".into()))?;
    let th0 = t.teichmuller(&root).mul(&t.prime_element().pow(v / e as i64));
    let c = alpha.div(&th0.pow(e as i64))?;
    let y = unit_root(&c, e)?;
    let th = th0.mul(&y);
    let chk = th.pow(e as i64).sub(alpha);
    let target = alpha.valuation().unwrap() + Rational64::from_integer(alpha.relative_precision().min(t.precision()) as i64 / 2);
    if chk.valuation().is_some_and(|w| w < target) {
        return Err(LameError::Internal("e-th root certificate failed".into()));
    }
    Ok(true)
}

/// y with y^e = c for a unit c ≡ 1 (mod 𝔪), by Newton from 1 (p ∤ e).
pub fn unit_root(c: &FieldElement, e: u64) -> Result<FieldElement> {
    let t = c.tower();
    let one = t.one();
    if !c.sub(&one).valuation().is_none_or(|v| v > Rational64::zero()) {
        return Err(LameError::NoCertifiedConvergence("radicand is not ≡ 1 mod the maximal ideal".into()));
    }
    let e_el = t.from_int(e as i64);
    let mut y = t.one();
    for _ in 0..200 {
        let ye1 = y.pow(e as i64 - 1);
        let f = ye1.mul(&y).sub(c);
        if f.is_zero() {
            return Ok(y);
        }
        let step = f.div(&e_el.mul(&ye1))?;
        if step.is_zero() {
            return Ok(y);
        }
        y = y.sub(&step);
    }
    Err(LameError::NoCertifiedConvergence("unit root iteration limit".into()))
}

/// Tame data of x^{b'} - α over K: v_K(α), g = gcd(v_K, b'), E = b'/g and
/// the least f such that the residue of α/π^{v_K} is a g-th power in F_{q^f}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalData {
    pub v: i64,
    pub g: u64,
    pub big_e: u64,
    pub f_min: u64,
    pub omega: Fq,
}

impl RadicalData {
    /// Minimal degree [K(θ):K] over the roots θ.
    pub fn degree(&self) -> u64 {
        self.big_e * self.f_min
    }
}

pub fn radical_data(alpha: &FieldElement, bprime: u64) -> Result<RadicalData> {
    let t = alpha.tower();
    let p = t.prime();
    if bprime % p == 0 {
        return Err(LameError::WildCase { p, e: bprime });
    }
    if t.radical_index() != 1 {
        return Err(LameError::InvalidInput("radicand must lie in the cyclotomic level".into()));
    }
    let v = alpha.normalized_valuation().ok_or(LameError::DivisionByZero)?;
    let g = gcd(v.unsigned_abs(), bprime);
    let big_e = bprime / g;
    let unit = alpha.mul(&t.uniformizer().pow(-v));
    let omega = unit.residue()?;
    let k = t.residue_field();
    // residue field of K_τ: F_{p^{f_τ}}
    let f_tau = cyclotomic_degree(t.conductor(), p).f as u32;
    let q = BigUint::from(p).pow(f_tau);
    let qm1 = &q - 1u32;
    let mut f = 1u64;
    loop {
        let big_q = q.pow(f as u32);
        let n = &big_q - 1u32;
        let gg = n.gcd(&BigUint::from(g));
        let ex = (n / gg) % &qm1;
        if k.pow(&omega, &ex) == k.one() {
            break;
        }
        f += 1;
        if f > 64 * g {
            return Err(LameError::Internal("residue degree search did not terminate".into()));
        }
    }
    Ok(RadicalData { v, g, big_e, f_min: f, omega })
}

/// Minimal degree of K(θ)/K over the roots θ of x^{b'} - α.
pub fn radical_degree(alpha: &FieldElement, bprime: u64) -> Result<u64> {
    Ok(radical_data(alpha, bprime)?.degree())
}

/// A tower containing an explicit root θ of x^{b'} = α realizing the
/// minimal degree, possibly with a larger unramified part.
#[derive(Clone, Debug)]
pub struct RadicalTower {
    pub tower: LocalFieldTower,
    pub theta: FieldElement,
    pub alpha: FieldElement,
    pub data: RadicalData,
    pub zeta: FieldElement,
}

/// Builds Q_p(μ_d) enlarged to unramified degree `fdeg_extra`·f_τ·f_min, then
/// adjoins the radical level and computes θ.
pub fn build_radical_tower(
    p: u64,
    d: u64,
    zeta_exponent: u64,
    bprime: u64,
    alpha: &CyclotomicNumber,
    extra_unramified: u64,
    prec: u32,
) -> Result<RadicalTower> {
    if bprime % p == 0 {
        return Err(LameError::WildCase { p, e: bprime });
    }
    if alpha.is_zero() {
        return Err(LameError::InvalidInput("radicand must be nonzero".into()));
    }
    let base = LocalFieldTower::cyclotomic(p, d, prec)?;
    let a_base = base.from_cyclotomic(alpha, &base.zeta(zeta_exponent as i64));
    let data = radical_data(&a_base, bprime)?;
    let f_tau = base.f() as u64;
    let fl = crate::arith::lcm(f_tau * data.f_min, extra_unramified.max(1));
    let k0 = if fl as usize == base.f() { base } else { LocalFieldTower::new(p, d, fl as usize, prec)? };
    let kf = k0.residue_field().clone();
    let nu = kf.nth_root(&data.omega_in(&k0, alpha, zeta_exponent)?, data.g).ok_or_else(|| LameError::Internal("no g-th root of the residue".into()))?;
    let v1 = data.v / data.g as i64;
    let big_e = data.big_e as i64;
    // s·v1 + t·E = 1
    let eg = v1.extended_gcd(&big_e);
    let (s, tt) = if eg.gcd == 1 { (eg.x, eg.y) } else { (-eg.x, -eg.y) };
    let qm1 = kf.unit_order();
    let powr = |x: &Fq, e: i64| -> Fq {
        let eb = BigInt::from(e).mod_floor(&BigInt::from(qm1.clone())).to_biguint().unwrap();
        kf.pow(x, &eb)
    };
    let eta_bar = powr(&nu, s);
    let lambda_bar = powr(&nu, tt);
    let eta = k0.teichmuller(&eta_bar);
    let tower = if big_e > 1 { k0.extend_radical(big_e as usize, &eta)? } else { k0.clone() };
    let zeta = tower.zeta(zeta_exponent as i64);
    let alpha_l = tower.from_cyclotomic(alpha, &zeta);
    let lambda = tower.teichmuller(&lambda_bar);
    let theta0 = if big_e > 1 {
        tower.prime_element().pow(v1).mul(&lambda)
    } else {
        tower.uniformizer().pow(v1).mul(&lambda)
    };
    let c = alpha_l.div(&theta0.pow(bprime as i64))?;
    let y = unit_root(&c, bprime)?;
    let theta = theta0.mul(&y);
    Ok(RadicalTower { tower, theta, alpha: alpha_l, data, zeta })
}

impl RadicalData {
    fn omega_in(&self, k0: &LocalFieldTower, alpha: &CyclotomicNumber, zeta_exponent: u64) -> Result<Fq> {
        let a = k0.from_cyclotomic(alpha, &k0.zeta(zeta_exponent as i64));
        a.mul(&k0.uniformizer().pow(-self.v)).residue()
    }
}

/// Builds Q_p(μ_d) or, with a radical, the tower carrying θ^{b'} = α.
pub fn build_tower(p: u64, d: u64, radical: Option<(u64, &CyclotomicNumber)>, prec: u32) -> Result<LocalFieldTower> {
    match radical {
        None => LocalFieldTower::cyclotomic(p, d, prec),
        Some((b, alpha)) => Ok(build_radical_tower(p, d, 1 % d.max(1), b, alpha, 1, prec)?.tower),
    }
}

/// Descriptor of K_τ(θ), θ^{b'} = α_τ, for the ζ in Frobenius orbit `orbit`.
pub fn moduli_field(n: u64, b: u64, p: u64, orbit: usize) -> Result<FieldDescriptor> {
    if !crate::enumeration::is_bad(n, b, p) {
        return Err(LameError::CriterionNotSatisfied { n, b, p });
    }
    let ty = crate::enumeration::TypeDescriptor::new(n, b)?;
    let orbits = ZetaOrbits::new(ty.d, p);
    if orbit >= orbits.count() {
        return Err(LameError::OutOfRange(format!("orbit {orbit} of {}", orbits.count())));
    }
    let base = LocalFieldTower::cyclotomic(p, ty.d, 16)?;
    let alpha = ty.alpha();
    let a = base.from_cyclotomic(&alpha, &base.zeta(orbits.exponent(orbit) as i64));
    let data = radical_data(&a, ty.bprime)?;
    let cd = cyclotomic_degree(ty.d, p);
    let mut tower = cd.tower.clone();
    if data.degree() > 1 {
        tower.push_str(&format!("(theta), theta^{} = {}", ty.bprime, alpha));
    }
    Ok(FieldDescriptor {
        degree: cd.degree * data.degree() as usize,
        e: cd.e * data.big_e as usize,
        f: cd.f * data.f_min as usize,
        tower,
    })
}

/// Rank over Q_p of a family of elements, by elimination on coordinates
/// with pivots of valuation below `cap`.
pub fn qp_rank(elems: &[FieldElement], cap: i64) -> usize {
    if elems.is_empty() {
        return 0;
    }
    let mut rows: Vec<Vec<PadicScalar>> = elems.iter().map(|e| e.coordinates()).collect();
    let n = rows[0].len();
    let mut rank = 0;
    for col in 0..n {
        let mut piv = None;
        for (r, row) in rows.iter().enumerate().skip(rank) {
            if let Some(v) = row[col].valuation() {
                if v < cap && piv.is_none_or(|(_, pv)| v < pv) {
                    piv = Some((r, v));
                }
            }
        }
        let Some((r, _)) = piv else { continue };
        rows.swap(r, rank);
        let pinv = rows[rank][col].inv().unwrap();
        for r2 in rank + 1..rows.len() {
            if rows[r2][col].is_zero() {
                continue;
            }
            let factor = rows[r2][col].mul(&pinv).unwrap();
            for c2 in col..n {
                let t = factor.mul(&rows[rank][c2]).unwrap();
                rows[r2][c2] = rows[r2][c2].sub(&t).unwrap();
            }
        }
        rank += 1;
    }
    rank
}
