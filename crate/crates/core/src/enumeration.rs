//! Class counts, bad-reduction criteria and per-type records. Everything
//! here is exact.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{euler_phi, gcd, inv_mod_u64, is_prime, vp_u64};
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{LameError, Result};
use crate::local_fields::{cyclotomic_degree, moduli_field, FieldDescriptor, ZetaOrbits};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triple {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl Triple {
    /// The lexicographically least cyclic rotation.
    pub fn canonical(a: u64, b: u64, c: u64) -> Self {
        let rots = [(a, b, c), (b, c, a), (c, a, b)];
        let (a, b, c) = *rots.iter().min().unwrap();
        Triple { a, b, c }
    }

    pub fn degree(&self) -> u64 {
        self.a + self.b + self.c
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c) == 1
    }
}

impl std::fmt::Display for Triple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// 1 iff a, b, c are all odd.
pub fn signature(t: &Triple) -> u8 {
    (t.a * t.b * t.c % 2) as u8
}

/// Canonical primitive triples of degree n (n odd, signature 1) or of
/// degree n/2 (n even, signature 0), in lexicographic order.
pub fn triples(n: u64) -> Vec<Triple> {
    let (deg, sig) = if n % 2 == 1 { (n, 1) } else { (n / 2, 0) };
    let mut out = Vec::new();
    if deg < 3 {
        return out;
    }
    for a in 1..deg {
        for b in 1..deg - a {
            let c = deg - a - b;
            let t = Triple::canonical(a, b, c);
            if t == (Triple { a, b, c }) && t.is_primitive() && signature(&t) == sig {
                out.push(t);
            }
        }
    }
    out
}

/// (n″, b″) with n′n″ − b′b″ = 1 and 1 ≤ n″ ≤ b′.
pub fn bezout_pair(nprime: u64, bprime: u64) -> Result<(u64, u64)> {
    if bprime == 0 || gcd(nprime, bprime) != 1 {
        return Err(LameError::NonCoprime(nprime, bprime));
    }
    if bprime == 1 {
        return Ok((1, nprime - 1));
    }
    let n2 = inv_mod_u64(nprime as i64, bprime).unwrap();
    Ok((n2, (nprime * n2 - 1) / bprime))
}

/// The combinatorial type data attached to (n, b).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeDescriptor {
    pub n: u64,
    pub b: u64,
    pub d: u64,
    pub nprime: u64,
    pub bprime: u64,
    pub n2: u64,
    pub b2: u64,
}

impl TypeDescriptor {
    pub fn new(n: u64, b: u64) -> Result<Self> {
        if n < 3 || 2 * b > n {
            return Err(LameError::InvalidInput(format!("type b={b} out of range for n={n}")));
        }
        let d = gcd(n, b);
        let (nprime, bprime) = (n / d, b / d);
        let (n2, b2) = if b == 0 {
            (1, 0)
        } else if 2 * b == n {
            (1, 1)
        } else {
            bezout_pair(nprime, bprime)?
        };
        Ok(TypeDescriptor { n, b, d, nprime, bprime, n2, b2 })
    }

    /// m with α_τ = (2b − n)/(2n)·ζ^{−m}.
    pub fn alpha_exponent(&self) -> u64 {
        if self.bprime == 1 { 0 } else { self.n2 }
    }

    pub fn alpha_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(2 * self.b as i64 - self.n as i64), BigInt::from(2 * self.n))
    }

    /// α_τ as an element of Q(ζ_d).
    pub fn alpha(&self) -> CyclotomicNumber {
        CyclotomicNumber::zeta_pow(self.d, -(self.alpha_exponent() as i64)).scale(&self.alpha_rational())
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(LameError::InvalidInput(format!("{p} is not prime")))
    }
}

/// Whether v_p(n − 2b) > v_p(2n) with 0 < b < n/2.
pub fn is_bad(n: u64, b: u64, p: u64) -> bool {
    b > 0 && 2 * b < n && vp_u64(n - 2 * b, p) > vp_u64(2 * n, p)
}

pub fn bad_b_values(n: u64, p: u64) -> Result<Vec<u64>> {
    if n <= 2 {
        return Err(LameError::InvalidInput(format!("order {n} must exceed 2")));
    }
    check_prime(p)?;
    Ok((1..n.div_ceil(2)).filter(|&b| is_bad(n, b, p)).collect())
}

/// v_p(j) = (n/b)(v_p(2n) − v_p(n − 2b)).
pub fn v_of_j(n: u64, b: u64, p: u64) -> Result<Rational64> {
    if n <= 2 || !is_bad(n, b, p) {
        return Err(LameError::CriterionNotSatisfied { n, b, p });
    }
    let diff = vp_u64(2 * n, p) as i64 - vp_u64(n - 2 * b, p) as i64;
    Ok(Rational64::new(n as i64 * diff, b as i64))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitRecord {
    pub index: usize,
    pub zeta_exponent: u64,
    pub count: u64,
    pub moduli: FieldDescriptor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadReductionRecord {
    pub n: u64,
    pub p: u64,
    pub ty: TypeDescriptor,
    pub count: u64,
    pub v_j: Rational64,
    pub alpha_rational: BigRational,
    /// Exponent e in α_τ = rational·ζ^e.
    pub alpha_zeta_exponent: i64,
    pub moduli: FieldDescriptor,
    pub galois_orbits: usize,
    pub orbits: Vec<OrbitRecord>,
}

pub fn fmt_rational(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl BadReductionRecord {
    pub fn b(&self) -> u64 {
        self.ty.b
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "p": self.p,
            "b": self.ty.b,
            "d": self.ty.d,
            "bprime": self.ty.bprime,
            "count": self.count,
            "vj": fmt_rational(&self.v_j),
            "alpha": {"rational": self.alpha_rational.to_string(), "zeta_exponent": self.alpha_zeta_exponent},
            "moduli": self.moduli,
            "galois_orbits": self.galois_orbits,
            "orbits": self.orbits,
        })
    }
}

pub fn type_record(n: u64, b: u64, p: u64) -> Result<BadReductionRecord> {
    let v_j = v_of_j(n, b, p)?;
    let ty = TypeDescriptor::new(n, b)?;
    if ty.bprime % p == 0 {
        return Err(LameError::Internal(format!("wild type n={n} b={b} p={p}")));
    }
    let orbits_data = ZetaOrbits::new(ty.d, p);
    let kdeg = cyclotomic_degree(ty.d, p).degree as u64;
    let mut orbits = Vec::new();
    for k in 0..orbits_data.count() {
        let moduli = moduli_field(n, b, p, k)?;
        orbits.push(OrbitRecord { index: k, zeta_exponent: orbits_data.exponent(k), count: ty.bprime * kdeg, moduli });
    }
    Ok(BadReductionRecord {
        n,
        p,
        count: ty.bprime * euler_phi(ty.d),
        v_j,
        alpha_rational: ty.alpha_rational(),
        alpha_zeta_exponent: -(ty.alpha_exponent() as i64),
        moduli: orbits[0].moduli.clone(),
        galois_orbits: orbits_data.count(),
        orbits,
        ty,
    })
}

/// One record per bad b, ordered by b.
pub fn type_records(n: u64, p: u64) -> Result<Vec<BadReductionRecord>> {
    bad_b_values(n, p)?.into_iter().map(|b| type_record(n, b, p)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoodReason {
    /// n = p^r·m with m < p.
    SmallPrimeToPPart,
    /// n odd, p = 2.
    OddOrderAtTwo,
}

impl GoodReason {
    pub fn tag(&self) -> &'static str {
        match self {
            GoodReason::SmallPrimeToPPart => "cor-5.2",
            GoodReason::OddOrderAtTwo => "cor-5.3",
        }
    }
}

/// A reason guaranteeing good reduction everywhere, if one applies.
pub fn good_reduction_guarantee(n: u64, p: u64) -> Result<Option<GoodReason>> {
    if n <= 2 {
        return Err(LameError::InvalidInput(format!("order {n} must exceed 2")));
    }
    check_prime(p)?;
    let m = n / p.pow(vp_u64(n, p));
    let reason = if m < p {
        Some(GoodReason::SmallPrimeToPPart)
    } else if n % 2 == 1 && p == 2 {
        Some(GoodReason::OddOrderAtTwo)
    } else {
        None
    };
    if reason.is_some() && !bad_b_values(n, p)?.is_empty() {
        return Err(LameError::Internal(format!("good-reduction guarantee contradicted at n={n} p={p}")));
    }
    Ok(reason)
}

/// Whether a bad-reduction curve over Q_p itself exists (type b = 1).
pub fn qp_rational_existence(n: u64, p: u64) -> Result<bool> {
    if n <= 2 {
        return Err(LameError::InvalidInput(format!("order {n} must exceed 2")));
    }
    check_prime(p)?;
    let holds = if p == 2 { n % 8 == 2 } else { (n - 2) % p == 0 };
    if holds {
        let deg = moduli_field(n, 1, p, 0)?.degree;
        if deg != 1 {
            return Err(LameError::Internal(format!("b = 1 record over Q_{p} for n={n} has degree {deg}")));
        }
    }
    Ok(holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(a: u64, b: u64, c: u64) -> Triple {
        Triple { a, b, c }
    }

    #[test]
    fn triple_examples() {
        assert_eq!(triples(5), vec![t(1, 1, 3)]);
        assert_eq!(triples(11), vec![t(1, 1, 9), t(1, 3, 7), t(1, 5, 5), t(1, 7, 3), t(3, 3, 5)]);
        assert_eq!(triples(17).len(), 12);
        assert!(triples(6).is_empty());
        assert!(triples(1).is_empty() && triples(2).is_empty() && triples(4).is_empty());
        assert_eq!(signature(&t(1, 1, 3)), 1);
        assert_eq!(signature(&t(1, 2, 3)), 0);
        assert_eq!(signature(&t(3, 3, 5)), 1);
    }

    // independent count: ordered triples up to rotation via Burnside
    fn burnside_count(n: u64) -> usize {
        let (deg, sig) = if n % 2 == 1 { (n, 1u64) } else { (n / 2, 0) };
        let mut ordered = 0usize;
        let mut fixed = 0usize;
        for a in 1..deg {
            for b in 1..deg {
                if a + b >= deg {
                    continue;
                }
                let c = deg - a - b;
                if gcd(gcd(a, b), c) == 1 && (a * b * c) % 2 == sig {
                    ordered += 1;
                    if a == b && b == c {
                        fixed += 1;
                    }
                }
            }
        }
        (ordered + 2 * fixed) / 3
    }

    #[test]
    fn triple_counts() {
        let want = [(5, 1), (7, 2), (8, 1), (9, 3), (10, 1), (11, 5), (12, 3), (13, 7), (14, 3), (15, 8), (16, 6), (17, 12), (18, 6), (19, 15), (20, 10)];
        for (n, c) in want {
            assert_eq!(triples(n).len(), c, "n={n}");
        }
        for n in 1..80 {
            assert_eq!(triples(n).len(), burnside_count(n), "n={n}");
        }
    }

    #[test]
    fn bad_values_examples() {
        assert_eq!(bad_b_values(13, 3).unwrap(), vec![2, 5]);
        assert!(bad_b_values(9, 2).unwrap().is_empty());
        assert_eq!(bad_b_values(18, 2).unwrap(), vec![1, 5]);
        assert!(bad_b_values(12, 7).unwrap().is_empty());
        assert!(bad_b_values(2, 3).is_err());
        // b = n/2 never appears even though the inequality is vacuous there
        assert!(!bad_b_values(12, 3).unwrap().contains(&6));
    }

    #[test]
    fn vj_examples() {
        assert_eq!(v_of_j(11, 1, 3).unwrap(), Rational64::from_integer(-22));
        assert_eq!(v_of_j(18, 1, 2).unwrap(), Rational64::from_integer(-36));
        assert_eq!(v_of_j(14, 4, 3).unwrap(), Rational64::new(-7, 2));
        assert!(matches!(v_of_j(13, 1, 3), Err(LameError::CriterionNotSatisfied { .. })));
    }

    #[test]
    fn record_examples() {
        let r = type_records(15, 3).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].b(), r[0].ty.d, r[0].count, r[0].v_j, r[0].moduli.degree), (3, 3, 2, Rational64::from_integer(-5), 2));
        let r = type_records(14, 3).unwrap();
        assert_eq!(r.iter().map(|x| (x.b(), x.ty.d, x.count, x.v_j)).collect::<Vec<_>>(), vec![
            (1, 1, 1, Rational64::from_integer(-14)),
            (4, 2, 2, Rational64::new(-7, 2))
        ]);
        let r = type_records(20, 3).unwrap();
        assert_eq!(r.iter().map(|x| (x.b(), x.count, x.v_j)).collect::<Vec<_>>(), vec![
            (1, 1, Rational64::from_integer(-40)),
            (4, 2, Rational64::from_integer(-5)),
            (7, 7, Rational64::new(-20, 7))
        ]);
        let js = r[1].to_json();
        assert_eq!(js["vj"], "-5/1");
        assert_eq!(js["alpha"]["rational"], "-3/10");
        assert_eq!(js["moduli"]["degree"], 2);
    }

    #[test]
    fn bezout_examples() {
        assert_eq!(bezout_pair(5, 1).unwrap(), (1, 4));
        assert_eq!(bezout_pair(13, 2).unwrap(), (1, 6));
        assert_eq!(TypeDescriptor::new(4, 2).unwrap().n2, 1);
        assert_eq!(TypeDescriptor::new(4, 2).unwrap().b2, 1);
        assert_eq!(TypeDescriptor::new(7, 0).unwrap().b2, 0);
        assert!(bezout_pair(4, 2).is_err());
    }

    #[test]
    fn bezout_exhaustive() {
        for np in 1..=200u64 {
            for bp in 1..=200u64 {
                if gcd(np, bp) == 1 {
                    let (n2, b2) = bezout_pair(np, bp).unwrap();
                    assert_eq!(np * n2, bp * b2 + 1);
                    assert!(n2 >= 1 && n2 <= bp);
                }
            }
        }
    }

    #[test]
    fn corollary_examples() {
        assert_eq!(good_reduction_guarantee(9, 11).unwrap(), Some(GoodReason::SmallPrimeToPPart));
        assert_eq!(good_reduction_guarantee(15, 2).unwrap(), Some(GoodReason::OddOrderAtTwo));
        assert_eq!(good_reduction_guarantee(14, 3).unwrap(), None);
        assert!(qp_rational_existence(5, 3).unwrap());
        assert!(qp_rational_existence(18, 2).unwrap());
        assert!(!qp_rational_existence(7, 3).unwrap());
    }

    #[test]
    fn corollary_sweep() {
        for n in 3..=60u64 {
            for p in (2..=50u64).filter(|p| is_prime(*p)) {
                let g = good_reduction_guarantee(n, p).unwrap();
                let bad = bad_b_values(n, p).unwrap();
                if g.is_some() {
                    assert!(bad.is_empty());
                }
                qp_rational_existence(n, p).unwrap();
                for b in bad {
                    let ty = TypeDescriptor::new(n, b).unwrap();
                    assert_ne!(ty.bprime % p, 0, "tame at n={n} b={b} p={p}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn vj_matches_abs_formula(n in 3u64..200, p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])) {
            for b in bad_b_values(n, p).unwrap() {
                let v = v_of_j(n, b, p).unwrap();
                // |j| = |2n/(n-2b)|^{n/b}: log_p |j| = -(n/b)(v(2n) - v(n-2b)), so v(j) = (n/b)·(v(2n) - v(n-2b))
                let ratio = BigRational::new(BigInt::from(2 * n), BigInt::from(n - 2 * b));
                let vr = crate::padic::rational_valuation(&ratio, p).unwrap();
                prop_assert_eq!(v, Rational64::new(vr * n as i64, b as i64));
                prop_assert!(v < Rational64::from_integer(0));
                let rec = type_record(n, b, p).unwrap();
                prop_assert_eq!(rec.count, rec.ty.bprime * euler_phi(rec.ty.d));
                prop_assert_eq!(rec.ty.nprime * rec.ty.n2, rec.ty.bprime * rec.ty.b2 + 1);
            }
        }

        #[test]
        fn canonical_is_rotation_invariant(a in 1u64..30, b in 1u64..30, c in 1u64..30) {
            let x = Triple::canonical(a, b, c);
            prop_assert_eq!(x, Triple::canonical(b, c, a));
            prop_assert_eq!(x, Triple::canonical(c, a, b));
        }
    }
}
