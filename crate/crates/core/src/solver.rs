//! Roots of φ_τ in the punctured unit disk, the resulting q and j, and an
//! independent check through ψ_τ(1) and the theta quotient.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use serde_json::{json, Value};

use crate::arith::{multiplicative_order, vp_u64};
use crate::cyclotomic::CyclotomicNumber;
use crate::enumeration::{fmt_rational, is_bad, v_of_j, TypeDescriptor};
use crate::error::{LameError, Result};
use crate::local_fields::{build_radical_tower, FieldDescriptor, FieldElement, LocalFieldTower, ZetaOrbits};
use crate::padic::{PadicScalar, DEFAULT_PRECISION};
use crate::tate_series::{j_series, principality_check, psi_at_one, rational_function, rho_to_pair, DivisorSpec};

/// Largest accepted target precision.
pub const MAX_PRECISION: u32 = 400;

/// The expansion of φ_τ in ρ through degree M with exact coefficients in Q(ζ_d).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiSeries {
    pub ty: TypeDescriptor,
    pub coeffs: Vec<CyclotomicNumber>,
    pub truncation: usize,
}

pub fn phi_series(ty: &TypeDescriptor, m: usize) -> PhiSeries {
    let d = ty.d;
    let n = ty.n as i64;
    let b = ty.b as i64;
    let mut mult = vec![vec![0i64; d as usize]; m + 1];
    let mut constant = CyclotomicNumber::from_rational(d, BigRational::new(BigInt::from(n - 2 * b), BigInt::from(2 * n)));
    let (np, bp, n2, b2) = (ty.nprime as i64, ty.bprime as i64, ty.n2 as i64, ty.b2 as i64);
    // Σ_{m≥0} A_m/(1 − A_m), A_m = ζ^{m b″ + n″} ρ^{m n′ + b′}
    let mut k = 0i64;
    loop {
        let deg = k * np + bp;
        let zexp = k * b2 + n2;
        if deg > m as i64 {
            break;
        }
        if deg == 0 {
            // b = 0: A_0 = ζ is a constant
            let z = CyclotomicNumber::zeta_pow(d, zexp);
            let one = CyclotomicNumber::one(d);
            constant = constant.add(&z.mul(&one.sub(&z).inv().expect("ζ ≠ 1 for b = 0")));
        } else {
            let mut r = 1i64;
            while r * deg <= m as i64 {
                mult[(r * deg) as usize][(r * zexp).rem_euclid(d as i64) as usize] += 1;
                r += 1;
            }
        }
        k += 1;
    }
    // − Σ_{m>0} B_m/(1 − B_m), B_m = ζ^{m b″ − n″} ρ^{m n′ − b′}
    let mut k = 1i64;
    loop {
        let deg = k * np - bp;
        let zexp = k * b2 - n2;
        if deg > m as i64 {
            break;
        }
        let mut r = 1i64;
        while r * deg <= m as i64 {
            mult[(r * deg) as usize][(r * zexp).rem_euclid(d as i64) as usize] -= 1;
            r += 1;
        }
        k += 1;
    }
    let mut coeffs: Vec<CyclotomicNumber> = mult.iter().map(|row| CyclotomicNumber::from_multiplicities(d, row)).collect();
    coeffs[0] = coeffs[0].add(&constant);
    PhiSeries { ty: ty.clone(), coeffs, truncation: m }
}

impl PhiSeries {
    /// The coefficients as elements of a tower with ζ ↦ `zeta`.
    pub fn embed(&self, zeta: &FieldElement) -> Vec<Option<FieldElement>> {
        let t = zeta.tower();
        let phi = self.coeffs.first().map(|c| c.coefficients().len()).unwrap_or(1);
        let mut zp = vec![t.one()];
        for i in 1..phi {
            zp.push(zp[i - 1].mul(zeta));
        }
        self.coeffs
            .iter()
            .map(|c| {
                if c.is_zero() {
                    return None;
                }
                let mut acc = t.zero();
                for (ct, z) in c.coefficients().iter().zip(&zp) {
                    if !ct.is_zero() {
                        acc = acc.add(&t.from_rational(ct).mul(z));
                    }
                }
                Some(acc)
            })
            .collect()
    }

    /// The truncated sum at ρ.
    pub fn eval_at(&self, zeta: &FieldElement, rho: &FieldElement) -> FieldElement {
        eval_only(&self.embed(zeta), rho)
    }

    /// Exact evaluation at a rational ρ when d ≤ 2 (coefficients rational).
    pub fn eval_rational(&self, rho: &BigRational) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * rho + c.as_rational()?;
        }
        Some(acc)
    }
}

/// f(x) and f′(x) by a joint Horner pass.
fn eval_with_derivative(coeffs: &[Option<FieldElement>], x: &FieldElement) -> (FieldElement, FieldElement) {
    let t = x.tower();
    let mut f = t.zero();
    let mut df = t.zero();
    for c in coeffs.iter().rev() {
        df = df.mul(x).add(&f);
        f = f.mul(x);
        if let Some(c) = c {
            f = f.add(c);
        }
    }
    (f, df)
}

fn eval_only(coeffs: &[Option<FieldElement>], x: &FieldElement) -> FieldElement {
    let t = x.tower();
    let mut f = t.zero();
    for c in coeffs.iter().rev() {
        f = f.mul(x);
        if let Some(c) = c {
            f = f.add(c);
        }
    }
    f
}

/// v_p((n − 2b)/(2n))/b′.
pub fn expected_rho_valuation(ty: &TypeDescriptor, p: u64) -> Rational64 {
    let v = vp_u64(ty.n - 2 * ty.b, p) as i64 - vp_u64(2 * ty.n, p) as i64;
    Rational64::new(v, ty.bprime as i64)
}

/// Terms needed so that the omitted tail has valuation > `target`.
pub fn truncation_for(ty: &TypeDescriptor, p: u64, target: u32) -> usize {
    let v = expected_rho_valuation(ty, p);
    (Rational64::from_integer(target as i64) / v).ceil().to_integer() as usize + ty.bprime as usize
}

#[derive(Clone, Debug)]
pub struct LameRoot {
    pub index: usize,
    pub rho: FieldElement,
    /// Lower bound on v(φ_M(ρ)).
    pub residual: Rational64,
    pub v_rho: Rational64,
}

/// All roots of φ_τ for one bad (n, b, p) and one Frobenius orbit of ζ.
#[derive(Clone, Debug)]
pub struct Solution {
    pub ty: TypeDescriptor,
    pub p: u64,
    pub orbit: usize,
    pub zeta_exponent: u64,
    pub precision: u32,
    pub terms: usize,
    pub tower: LocalFieldTower,
    pub zeta: FieldElement,
    pub series: PhiSeries,
    pub roots: Vec<LameRoot>,
    /// Residues of ρ_i/ρ_0 are exactly the b′-th roots of unity.
    pub torsor_ok: bool,
}

/// b′ starting points: one radical root times μ_{b′}, in a tower containing
/// both the radical and μ_{b′}.
pub fn initial_roots(ty: &TypeDescriptor, p: u64, orbit: usize, prec: u32) -> Result<(LocalFieldTower, FieldElement, Vec<FieldElement>)> {
    if !is_bad(ty.n, ty.b, p) {
        return Err(LameError::CriterionNotSatisfied { n: ty.n, b: ty.b, p });
    }
    let orbits = ZetaOrbits::new(ty.d, p);
    if orbit >= orbits.count() {
        return Err(LameError::OutOfRange(format!("orbit {orbit} of {}", orbits.count())));
    }
    let j = orbits.exponent(orbit);
    // ρ^{b′} = (2b − n)/(2 n ζ^{n″})
    let alpha = CyclotomicNumber::zeta_pow(ty.d, -(ty.n2 as i64)).scale(&ty.alpha_rational());
    let extra = multiplicative_order(p % ty.bprime.max(1), ty.bprime.max(1));
    let rt = build_radical_tower(p, ty.d, j, ty.bprime, &alpha, extra, prec)?;
    let t = rt.tower.clone();
    let mu = if ty.bprime == 1 {
        t.one()
    } else {
        let k = t.residue_field();
        t.teichmuller(&k.element_of_order(ty.bprime).expect("μ_{b′} in the residue field"))
    };
    let mut roots = vec![rt.theta.clone()];
    for i in 1..ty.bprime as usize {
        roots.push(roots[i - 1].mul(&mu));
    }
    Ok((t, rt.zeta, roots))
}

fn newton(coeffs: &[Option<FieldElement>], x0: &FieldElement, bprime: u64) -> Result<FieldElement> {
    let vb = x0.valuation().ok_or(LameError::DivisionByZero)?;
    let (f0, df0) = eval_with_derivative(coeffs, x0);
    let vdf = df0.valuation().ok_or(LameError::SingularPoint)?;
    // Newton in y with ρ = β(1 + y): the rescaled polynomial is integral, and
    // the classical condition reads v(f) > 2 v(f′) − (b′ − 2) v(β)
    let bound = vdf * 2 - vb * Rational64::from_integer(bprime as i64 - 2);
    if f0.valuation().is_some_and(|v| v <= bound) {
        return Err(LameError::Internal(format!("Newton hypothesis fails at the initial root (v(f) = {}, bound {bound})", f0.valuation().unwrap())));
    }
    let mut x = x0.clone();
    let (mut f, mut df) = (f0, df0);
    for _ in 0..200 {
        if f.is_zero() {
            return Ok(x);
        }
        let step = f.div(&df)?;
        if step.is_zero() {
            return Ok(x);
        }
        x = x.sub(&step);
        (f, df) = eval_with_derivative(coeffs, &x);
    }
    Err(LameError::NoCertifiedConvergence("Newton iteration limit".into()))
}

fn residual_bound(f: &FieldElement) -> Rational64 {
    f.valuation().unwrap_or_else(|| f.valuation_lower_bound().unwrap_or(Rational64::from_integer(i64::MAX / 4)))
}

/// Solves φ_τ(ρ) = 0 to `precision` digits for the ζ in orbit `orbit`.
pub fn solve(n: u64, b: u64, p: u64, orbit: usize, precision: u32) -> Result<Solution> {
    if precision == 0 || precision > MAX_PRECISION {
        return Err(LameError::OutOfRange(format!("precision {precision} not in 1..={MAX_PRECISION}")));
    }
    if !is_bad(n, b, p) {
        return Err(LameError::CriterionNotSatisfied { n, b, p });
    }
    let ty = TypeDescriptor::new(n, b)?;
    let terms = truncation_for(&ty, p, precision);
    let series = phi_series(&ty, terms);
    let guard = 2 * ty.bprime as u32 + 10 + vp_u64(2 * n, p);
    let mut work = precision + guard;
    let target = Rational64::from_integer(precision as i64);
    for _attempt in 0..4 {
        let (tower, zeta, starts) = initial_roots(&ty, p, orbit, work)?;
        let coeffs = series.embed(&zeta);
        let mut roots = Vec::new();
        let mut short = false;
        for (i, x0) in starts.iter().enumerate() {
            let x = newton(&coeffs, x0, ty.bprime)?;
            let residual = residual_bound(&eval_only(&coeffs, &x));
            if residual < target {
                short = true;
                break;
            }
            let v_rho = x.valuation().ok_or(LameError::DivisionByZero)?;
            roots.push(LameRoot { index: i, rho: x, residual, v_rho });
        }
        if short {
            work *= 2;
            continue;
        }
        let torsor_ok = torsor_check(&roots, ty.bprime)?;
        let orbits = ZetaOrbits::new(ty.d, p);
        return Ok(Solution {
            zeta_exponent: orbits.exponent(orbit),
            ty,
            p,
            orbit,
            precision,
            terms,
            tower,
            zeta,
            series,
            roots,
            torsor_ok,
        });
    }
    Err(LameError::NoCertifiedConvergence(format!("residual below {precision} after precision retries")))
}

/// Distinct roots whose ratios to the first reduce to the b′ distinct
/// b′-th roots of unity.
fn torsor_check(roots: &[LameRoot], bprime: u64) -> Result<bool> {
    if roots.len() as u64 != bprime {
        return Ok(false);
    }
    for i in 0..roots.len() {
        for j in 0..i {
            if roots[i].rho.sub(&roots[j].rho).is_zero() {
                return Ok(false);
            }
        }
    }
    let t = roots[0].rho.tower();
    let k = t.residue_field();
    let mut seen = Vec::new();
    for r in roots {
        let ratio = r.rho.div(&roots[0].rho)?.residue()?;
        if k.pow_u64(&ratio, bprime) != k.one() || seen.contains(&ratio) {
            return Ok(false);
        }
        seen.push(ratio);
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct Invariants {
    pub q: FieldElement,
    pub vq: Rational64,
    pub vj: Rational64,
    pub j: FieldElement,
    /// j as a p-adic number when it lies in Q_p at the carried precision.
    pub j_qp: Option<PadicScalar>,
}

impl Invariants {
    /// "v=<val>;digits=<d0,d1,…>" for j ∈ Q_p, otherwise the valuation alone.
    pub fn j_digits(&self) -> String {
        match &self.j_qp {
            Some(x) => format!(
                "v={};digits={}",
                x.valuation().unwrap_or(0),
                x.unit_digits().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
            ),
            None => format!("v={};not in Q_p", fmt_rational(&self.vj)),
        }
    }
}

pub fn compute_invariants(sol: &Solution, root: &LameRoot) -> Result<Invariants> {
    let (q, _) = rho_to_pair(&sol.ty, &sol.zeta, &root.rho)?;
    let vq = q.valuation().ok_or(LameError::DivisionByZero)?;
    let mj = (Rational64::from_integer(sol.precision as i64) / vq).ceil().to_integer() as usize + 1;
    let (j, _tail) = j_series(mj).eval(&q)?;
    let vj = j.valuation().ok_or_else(|| LameError::InsufficientPrecision("j vanishes at precision".into()))?;
    if vj != -vq {
        return Err(LameError::Internal(format!("v(j) = {vj} but v(q) = {vq}")));
    }
    let expected = v_of_j(sol.ty.n, sol.ty.b, sol.p)?;
    if vj != expected {
        return Err(LameError::Internal(format!("v(j) = {vj} differs from the closed form {expected}")));
    }
    let coords = j.coordinates();
    let j_qp = if coords[1..].iter().all(|c| c.is_zero()) {
        let keep = vj.floor().to_integer() + sol.precision as i64;
        Some(coords[0].truncate_absolute(keep))
    } else {
        None
    };
    Ok(Invariants { q, vq, vj, j, j_qp })
}

/// Relative p-adic agreement of x with a rational number.
pub fn agreement_digits(x: &PadicScalar, r: &BigRational) -> i64 {
    let p = x.prime();
    let prec = x.precision() + 5;
    let y = PadicScalar::from_rational(r, p, prec.max(1));
    let vy = y.valuation().unwrap_or(0);
    match x.sub(&y) {
        Ok(d) => match d.valuation() {
            Some(v) => v - vy,
            None => d.valuation_lower_bound().unwrap_or(i64::MAX / 4) - vy,
        },
        Err(_) => 0,
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    /// Lower bound on v(ψ_τ(1)) at the root.
    pub psi_valuation: Rational64,
    pub nu: Option<i64>,
    pub periodic: bool,
    pub ok: bool,
    pub problems: Vec<String>,
}

/// Slack in digits allowed between the solve target and the ψ check.
pub const VERIFY_SLACK: i64 = 2;

pub fn verify_lame(sol: &Solution, root: &LameRoot) -> Result<VerifyReport> {
    let ty = &sol.ty;
    let n = sol.precision as i64;
    let (q, v) = rho_to_pair(ty, &sol.zeta, &root.rho)?;
    let vq = q.valuation().ok_or(LameError::DivisionByZero)?;
    let vv = v.valuation().ok_or(LameError::DivisionByZero)?;
    let m = ((Rational64::from_integer(n) + vv) / vq).ceil().to_integer().max(1) as usize;
    let psi = psi_at_one(ty, &sol.zeta, &root.rho, m)?;
    let psi_val = residual_bound(&psi.value).min(psi.error_valuation);
    let mut problems = Vec::new();
    if psi_val < Rational64::from_integer(n - VERIFY_SLACK) {
        problems.push(format!("ψ(1) has valuation {psi_val} < {}", n - VERIFY_SLACK));
    }
    let div = DivisorSpec::lame(&v, ty.n as i64)?;
    let nu = principality_check(&div, &q)?;
    if nu != Some(2 * ty.b as i64) {
        problems.push(format!("principality gives {nu:?}, expected {}", 2 * ty.b));
    }
    let mut periodic = false;
    if let Some(nu) = nu {
        let spread = vq * 2;
        let terms = ((Rational64::from_integer(n) + spread) / vq).ceil().to_integer().max(1) as usize + 1;
        let f = rational_function(div, nu, &q, terms)?;
        let t = sol.tower.clone();
        let u = t.one().add(&t.from_int(sol.p as i64)).mul(&t.prime_element());
        let a = f.eval(&u)?;
        let b = f.eval(&q.mul(&u))?;
        let r = b.div(&a)?.sub(&t.one());
        let lim = Rational64::from_integer((n - VERIFY_SLACK).min(t.precision() as i64 / 2));
        periodic = r.valuation().is_none_or(|w| w >= lim);
        if !periodic {
            problems.push(format!("theta quotient not q-periodic: {r}"));
        }
    }
    Ok(VerifyReport { psi_valuation: psi_val, nu, periodic, ok: problems.is_empty(), problems })
}

fn floor_i64(r: &Rational64) -> i64 {
    r.floor().to_integer()
}

impl Solution {
    pub fn moduli(&self) -> Result<FieldDescriptor> {
        crate::local_fields::moduli_field(self.ty.n, self.ty.b, self.p, self.orbit)
    }

    /// The SolveReport JSON value.
    pub fn report(&self) -> Result<Value> {
        let mut roots = Vec::new();
        for r in &self.roots {
            let inv = compute_invariants(self, r)?;
            let ver = verify_lame(self, r)?;
            roots.push(json!({
                "rho": r.rho.to_json(),
                "q": inv.q.to_json(),
                "vq": fmt_rational(&inv.vq),
                "vj": fmt_rational(&inv.vj),
                "j_digits": inv.j_digits(),
                "residual_val": floor_i64(&r.residual),
                "psi_check_val": floor_i64(&ver.psi_valuation),
            }));
        }
        let ty = &self.ty;
        Ok(json!({
            "type": {
                "n": ty.n, "b": ty.b, "d": ty.d, "nprime": ty.nprime, "bprime": ty.bprime,
                "n2": ty.n2, "b2": ty.b2, "zeta_index": self.orbit, "zeta_exponent": self.zeta_exponent,
            },
            "p": self.p,
            "field": self.tower.descriptor(),
            "roots": roots,
            "precision": self.precision,
        }))
    }
}

/// Precision used when none is requested.
pub fn default_precision() -> u32 {
    DEFAULT_PRECISION
}
