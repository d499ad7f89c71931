use hyperpencil::arith::{
    discriminant, factorize, is_prime, is_square_rational, parse_rational, format_rational, resultant, BigInt,
    BigRational, RatPoly,
};
use hyperpencil::gap::surd::{floor_sqrt, QuadSurd};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=9).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn nonzero_rat() -> impl Strategy<Value = BigRational> {
    rat().prop_filter("nonzero", |r| !r.is_zero())
}

fn poly(max_deg: usize) -> impl Strategy<Value = RatPoly> {
    (prop::collection::vec(rat(), 0..=max_deg), nonzero_rat()).prop_map(|(mut c, lead)| {
        c.push(lead);
        RatPoly::new(c)
    })
}

/// `lc^deg_other` times products of root differences.
fn split_resultant(lc_f: &BigRational, rf: &[BigRational], lc_g: &BigRational, rg: &[BigRational]) -> BigRational {
    let mut acc = num_traits::pow(lc_f.clone(), rg.len()) * num_traits::pow(lc_g.clone(), rf.len());
    for a in rf {
        for b in rg {
            acc *= a - b;
        }
    }
    acc
}

fn trial_is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resultant_is_multiplicative(f in poly(3), g in poly(3), h in poly(3)) {
        let fg = &f * &g;
        let lhs = resultant(&fg, &h).unwrap();
        let rhs = resultant(&f, &h).unwrap() * resultant(&g, &h).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn resultant_of_split_polys(
        lc_f in nonzero_rat(),
        lc_g in nonzero_rat(),
        rf in prop::collection::vec(rat(), 1..=4),
        rg in prop::collection::vec(rat(), 1..=4),
    ) {
        let f = RatPoly::from_roots(&rf).scale(&lc_f);
        let g = RatPoly::from_roots(&rg).scale(&lc_g);
        prop_assert_eq!(resultant(&f, &g).unwrap(), split_resultant(&lc_f, &rf, &lc_g, &rg));
    }

    #[test]
    fn discriminant_of_split_poly(lc in nonzero_rat(), roots in prop::collection::vec(rat(), 2..=6)) {
        let f = RatPoly::from_roots(&roots).scale(&lc);
        let n = roots.len();
        let mut expected = num_traits::pow(lc.clone(), 2 * n - 2);
        for i in 0..n {
            for j in i + 1..n {
                let d = &roots[i] - &roots[j];
                expected *= &d * &d;
            }
        }
        prop_assert_eq!(discriminant(&f).unwrap(), expected);
    }

    #[test]
    fn rational_roots_are_roots(lc in nonzero_rat(), roots in prop::collection::vec(rat(), 1..=5), extra in 1i64..=5) {
        // x^2 + extra has no rational roots
        let f = &RatPoly::from_roots(&roots).scale(&lc) * &RatPoly::from_i64s(&[extra, 0, 1]);
        let mut expected = roots.clone();
        expected.sort();
        expected.dedup();
        let mut found = f.rational_roots().unwrap();
        found.sort();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn factorization_reassembles(n in 1u64..=2_000_000_000_000) {
        let f = factorize(&BigInt::from(n)).unwrap();
        prop_assert_eq!(f.product(), BigInt::from(n));
        for (p, e) in f.factors() {
            prop_assert!(*e >= 1);
            prop_assert!(is_prime(p));
        }
        let primes: Vec<_> = f.primes().cloned().collect();
        let mut sorted = primes.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(primes, sorted);
    }

    #[test]
    fn factorization_of_semiprimes(a in 1_000u64..=200_000, b in 1_000u64..=200_000) {
        let (a, b) = (a | 1, b | 1);
        let n = BigInt::from(a) * BigInt::from(b) * BigInt::from(1_000_003u64);
        prop_assert_eq!(factorize(&n).unwrap().product(), n);
    }

    #[test]
    fn primality_matches_trial_division(n in 0u64..=2_000_000) {
        prop_assert_eq!(is_prime(&BigInt::from(n)), trial_is_prime(n));
    }

    #[test]
    fn floor_sqrt_brackets(x in (0i64..=1_000_000, 1i64..=1000).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))) {
        let s = BigRational::from_integer(floor_sqrt(&x));
        prop_assert!(&s * &s <= x);
        let s1 = s + BigRational::one();
        prop_assert!(&s1 * &s1 > x);
    }

    #[test]
    fn square_detection(r in rat()) {
        let sq = &r * &r;
        prop_assert_eq!(is_square_rational(&sq), Some(r.abs()));
        if !sq.is_zero() {
            prop_assert_eq!(is_square_rational(&(-sq)), None);
        }
    }

    #[test]
    fn surd_floor_matches_exact_comparison(a in rat(), b in rat(), m in (0i64..=50, 1i64..=6)) {
        let m = BigRational::new(m.0.into(), m.1.into());
        let s = QuadSurd { a, b, m }.normalized();
        let k = BigRational::from_integer(s.floor());
        prop_assert!(s.ge_rational(&k));
        prop_assert!(!s.ge_rational(&(k + BigRational::one())));
    }

    #[test]
    fn surd_pow_matches_repeated_multiplication(k in rat(), m in 0i64..=20, n in 0usize..=6) {
        let base = QuadSurd::one_plus(k, BigRational::from_integer(m.into()));
        let mut acc = QuadSurd::rational(BigRational::one());
        for _ in 0..n {
            acc = acc.mul(&base);
        }
        prop_assert_eq!(base.pow(n), acc);
    }

    #[test]
    fn rational_text_round_trip(r in rat()) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}
