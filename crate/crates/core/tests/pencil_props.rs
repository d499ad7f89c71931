use hyperpencil::arith::{BigInt, BigRational, RatPoly};
use hyperpencil::io::{read_points_csv, write_points_csv, Config};
use hyperpencil::pencil::{
    delta, delta_via_product_formula, delta_via_resultant, fiber_params, fiber_poly, integral_disc,
    integral_disc_factorization,
};
use hyperpencil::points::{enumerate_points, verify_point, PointRecord, SearchConfig};
use hyperpencil::rank::{count_bound, rank_bound, rank_bound_formula};
use hyperpencil::survey::SpfSieve;
use hyperpencil::PencilSpec;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

/// Squarefree `Q` of degree 4 or 5 with small coefficients.
fn pencil() -> impl Strategy<Value = PencilSpec> {
    (prop::collection::vec(small_rat(), 4..=5), 1i64..=3, any::<bool>()).prop_filter_map(
        "singular Q",
        |(mut c, lead, neg)| {
            c.push(BigRational::from_integer(if neg { -lead } else { lead }.into()));
            PencilSpec::new(RatPoly::new(c)).ok()
        },
    )
}

fn is_square(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

/// Every `u/w` with `max(|u|, w) <= h`, checked directly.
fn brute_points(spec: &PencilSpec, a: i64, h: i64) -> BTreeSet<(BigRational, BigRational)> {
    let fp = fiber_params(spec, &a.into(), &1.into()).unwrap();
    let f = fiber_poly(spec, &fp);
    let mut out = BTreeSet::new();
    for w in 1..=h {
        for u in -h..=h {
            if u.gcd(&w) != 1 {
                continue;
            }
            let x = BigRational::new(u.into(), w.into());
            if let Some(y) = is_square(&f.eval(&x)) {
                out.insert((x, y));
            }
        }
    }
    out
}

fn as_set(records: &[PointRecord]) -> BTreeSet<(BigRational, BigRational)> {
    records.iter().map(|r| (r.x.clone(), r.y.clone())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn delta_paths_agree(spec in pencil(), a in -50i64..=50, b in 1i64..=20) {
        let Ok(fp) = fiber_params(&spec, &a.into(), &b.into()) else { return Ok(()) };
        let d = delta(&spec, &fp);
        prop_assert_eq!(&d, &delta_via_resultant(&spec, &fp).unwrap());
        prop_assert_eq!(&d, &delta_via_product_formula(&spec, &fp).unwrap());
        prop_assert!(!d.is_zero());
    }

    #[test]
    fn integral_disc_is_factored_exactly(spec in pencil(), a in -50i64..=50, b in 1i64..=20) {
        let Ok(fp) = fiber_params(&spec, &a.into(), &b.into()) else { return Ok(()) };
        let id = integral_disc(&spec, &fp).unwrap();
        let f = integral_disc_factorization(&spec, &fp).unwrap();
        prop_assert_eq!(f.product(), id.abs());
    }

    #[test]
    fn rank_bound_uses_formula(spec in pencil(), a in 1i64..=40, deg_k in 1u32..=3, pid in 0u64..=3) {
        let Ok(fp) = fiber_params(&spec, &a.into(), &1.into()) else { return Ok(()) };
        let rep = rank_bound(&spec, &fp, deg_k, pid).unwrap();
        let g = spec.genus() as u64;
        let expected = 2 * g * (u64::from(deg_k) - 1 + u64::from(deg_k) * rep.bad_primes.len() as u64 + pid);
        prop_assert_eq!(rep.rank_bound, expected);
        prop_assert_eq!(rank_bound_formula(spec.genus(), deg_k, rep.bad_primes.len(), pid), expected);
        // every odd prime dividing the integral discriminant is bad, and so is 2
        prop_assert!(rep.bad_primes.contains(&BigInt::from(2)));
        let f = integral_disc_factorization(&spec, &fp).unwrap();
        for p in f.primes() {
            prop_assert!(rep.bad_primes.contains(p));
        }
    }

    #[test]
    fn sieve_matches_brute_force(spec in pencil(), a in -10i64..=10, h in 1u64..=12) {
        let Ok(fp) = fiber_params(&spec, &a.into(), &1.into()) else { return Ok(()) };
        let sieved = enumerate_points(&spec, &fp, &SearchConfig::with_height(h));
        prop_assert_eq!(as_set(&sieved), brute_points(&spec, a, h as i64));
        for r in &sieved {
            prop_assert!(verify_point(&spec, &fp, &r.x, &r.y));
            prop_assert_eq!(r.is_weierstrass, r.y.is_zero());
        }
    }

    #[test]
    fn point_sets_grow_with_height(spec in pencil(), a in -10i64..=10, h in 1u64..=10, extra in 1u64..=8) {
        let Ok(fp) = fiber_params(&spec, &a.into(), &1.into()) else { return Ok(()) };
        let small = as_set(&enumerate_points(&spec, &fp, &SearchConfig::with_height(h)));
        let large = as_set(&enumerate_points(&spec, &fp, &SearchConfig::with_height(h + extra)));
        prop_assert!(small.is_subset(&large));
    }

    #[test]
    fn points_csv_round_trip(spec in pencil(), a in -10i64..=10, h in 1u64..=10) {
        let Ok(fp) = fiber_params(&spec, &a.into(), &1.into()) else { return Ok(()) };
        let records = enumerate_points(&spec, &fp, &SearchConfig::with_height(h));
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &records, true).unwrap();
        prop_assert_eq!(read_points_csv(&buf[..]).unwrap(), records);
    }

    #[test]
    fn config_round_trip(spec in pencil(), h in 1u64..=500, sieve in any::<bool>()) {
        let cfg = Config {
            search: Some(SearchConfig { height_bound: h, use_sieve: sieve, ..Default::default() }),
            ..Config::for_pencil(&spec)
        };
        let back = Config::parse(&cfg.render()).unwrap();
        prop_assert_eq!(&back, &cfg);
        let rebuilt = back.pencil().unwrap();
        prop_assert_eq!(rebuilt.q_poly(), spec.q_poly());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn count_bound_is_monotone(h in 16u64..=1_000_000_000, step in 1u64..=1_000_000, c in 0.1f64..5.0) {
        let lo = count_bound(&BigInt::from(h), c);
        let hi = count_bound(&BigInt::from(h + step), c);
        prop_assert!(lo <= hi, "{} > {}", lo, hi);
    }

    #[test]
    fn sieve_omega_matches_trial_division(n in 1u64..=50_000) {
        let sieve = SpfSieve::new(50_000, 1 << 20).unwrap();
        let mut m = n;
        let mut omega = 0;
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                omega += 1;
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        omega += usize::from(m > 1);
        prop_assert_eq!(sieve.omega(n), omega);
    }
}
