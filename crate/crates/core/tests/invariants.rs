use lamelab::arith::{euler_phi, gcd, is_prime, pow_big, vp_u64};
use lamelab::cyclotomic::CyclotomicNumber;
use lamelab::enumeration::{bad_b_values, type_records, v_of_j, TypeDescriptor};
use lamelab::local_fields::{cyclotomic_degree, moduli_field, ZetaOrbits};
use lamelab::padic::{hensel_lift, PadicPolynomial, PadicScalar};
use lamelab::solver::{compute_invariants, phi_series, solve};
use lamelab::tate_series::rho_to_pair;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use proptest::prelude::*;

fn primes(bound: u64) -> impl Iterator<Item = u64> {
    (2..=bound).filter(|p| is_prime(*p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hensel_postcondition_in_exact_integers(
        cs in proptest::collection::vec(-50i64..50, 2..6),
        pi in 0usize..3,
        n in 5u32..25,
    ) {
        let p = [3u64, 5, 7][pi];
        let mut coeffs = cs.clone();
        coeffs.push(1);
        let f = PadicPolynomial::from_rationals(
            &coeffs.iter().map(|c| BigRational::from_integer(BigInt::from(*c))).collect::<Vec<_>>(),
            p,
            n + 10,
        ).unwrap();
        let ev = |x: &BigInt, m: &BigInt| coeffs.iter().rev().fold(BigInt::zero(), |acc, c| (acc * x + c).mod_floor(m));
        let pm = BigInt::from(p);
        for x0 in 0..p as i64 {
            let x = BigInt::from(x0);
            let simple = ev(&x, &pm).is_zero() && {
                let d: BigInt = coeffs.iter().enumerate().skip(1).rev()
                    .fold(BigInt::zero(), |acc, (i, c)| (acc * &x + c * i as i64).mod_floor(&pm));
                !d.is_zero()
            };
            if !simple {
                continue;
            }
            let r = hensel_lift(&f, &PadicScalar::from_i64(x0, p, n + 10), n).unwrap();
            let rr = r.residue_mod(n).unwrap();
            let modulus = pow_big(p, n);
            prop_assert!(ev(&rr, &modulus).is_zero(), "f({rr}) ≢ 0 mod {p}^{n}");
        }
    }

    #[test]
    fn phi_series_shape(n in 3u64..40, bsel in 0u64..1000) {
        let b = 1 + bsel % ((n - 1) / 2).max(1);
        prop_assume!(2 * b < n);
        let ty = TypeDescriptor::new(n, b).unwrap();
        let s = phi_series(&ty, ty.bprime as usize + 2);
        let c0 = BigRational::new(BigInt::from(n as i64 - 2 * b as i64), BigInt::from(2 * n));
        prop_assert_eq!(&s.coeffs[0], &CyclotomicNumber::from_rational(ty.d, c0));
        for k in 1..ty.bprime as usize {
            prop_assert!(s.coeffs[k].is_zero(), "coefficient {} of ({}, {})", k, n, b);
        }
        prop_assert_eq!(&s.coeffs[ty.bprime as usize], &CyclotomicNumber::zeta_pow(ty.d, ty.n2 as i64));
        prop_assert_eq!(ty.nprime * ty.n2 - ty.bprime * ty.b2, 1);
    }
}

#[test]
fn descriptors_are_multiplicative_and_orbits_match_degrees() {
    for n in 3..=40u64 {
        for p in primes(23) {
            for b in bad_b_values(n, p).unwrap() {
                let d = gcd(n, b);
                let cd = cyclotomic_degree(d, p);
                assert_eq!(cd.degree, cd.e * cd.f);
                let orbits = ZetaOrbits::new(d, p);
                if d > 1 {
                    assert_eq!(orbits.orbit_size(), cd.degree, "d = {d}, p = {p}");
                }
                assert_eq!(orbits.count() * orbits.orbit_size(), euler_phi(d) as usize);
                for k in 0..orbits.count() {
                    let m = moduli_field(n, b, p, k).unwrap();
                    assert_eq!(m.degree, m.e * m.f, "n={n} p={p} b={b}");
                    assert_eq!(m.degree % cd.degree, 0);
                }
            }
        }
    }
}

#[test]
fn records_follow_the_closed_forms() {
    for n in 3..=60u64 {
        for p in primes(50) {
            for r in type_records(n, p).unwrap() {
                let (b, d) = (r.ty.b, r.ty.d);
                assert_eq!(r.count, (b / d) * euler_phi(d));
                assert_ne!(r.ty.bprime % p, 0);
                // |j|_p = |q|^{-1} with v(q) = n′·v(ρ)
                let vq = Rational64::new(
                    (vp_u64(n - 2 * b, p) as i64 - vp_u64(2 * n, p) as i64) * (n / d) as i64,
                    (b / d) as i64,
                );
                assert_eq!(r.v_j, -vq);
                assert!(r.v_j < Rational64::zero());
            }
        }
    }
}

#[test]
fn solved_roots_obey_the_valuation_laws() {
    for (n, b, p) in [(5, 1, 3), (7, 2, 3), (11, 4, 3), (14, 4, 3), (15, 3, 3), (19, 5, 3), (20, 4, 3), (18, 1, 2)] {
        let sol = solve(n, b, p, 0, 24).unwrap();
        for r in &sol.roots {
            let (q, _) = rho_to_pair(&sol.ty, &sol.zeta, &r.rho).unwrap();
            let vq = q.valuation().unwrap();
            assert_eq!(vq, r.v_rho * Rational64::from_integer(sol.ty.nprime as i64));
            let inv = compute_invariants(&sol, r).unwrap();
            assert_eq!(inv.vj, -vq);
            assert_eq!(inv.vj, v_of_j(n, b, p).unwrap());
        }
    }
}
