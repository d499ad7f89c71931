use hyperpencil::arith::{BigInt, BigRational};
use hyperpencil::gap::{
    ball_cover, certified_bound, cone_assign, cone_count_bound, groups_satisfy_cosine, total_bound,
    total_bound_at_height, vojta_mumford_chain, GapParams, GramLattice, Vector,
};
use hyperpencil::io::LatticeInstance;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rat(span: i64) -> impl Strategy<Value = BigRational> {
    (-span..=span, 1i64..=4).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

/// `A^T A + I` for a random small `A`.
fn lattice() -> impl Strategy<Value = GramLattice> {
    (1usize..=3).prop_flat_map(|rho| {
        prop::collection::vec(prop::collection::vec(rat(3), rho), rho).prop_map(move |a| {
            let gram = (0..rho)
                .map(|i| {
                    (0..rho)
                        .map(|j| {
                            let mut s: BigRational = (0..rho).map(|k| &a[k][i] * &a[k][j]).sum();
                            if i == j {
                                s += BigRational::one();
                            }
                            s
                        })
                        .collect()
                })
                .collect();
            GramLattice::new(gram).unwrap()
        })
    })
}

fn lattice_and_points(max: usize) -> impl Strategy<Value = (GramLattice, Vec<Vector>)> {
    lattice().prop_flat_map(move |lat| {
        let rho = lat.rho();
        (Just(lat), prop::collection::vec(prop::collection::vec(rat(20), rho), 0..=max))
    })
}

fn params() -> impl Strategy<Value = GapParams> {
    (1i64..=3, 1u32..=3, 1i64..=4, 1i64..=5, 1i64..=5).prop_map(|(c, deg, kappa, c3, cb)| {
        let r = |n: i64| BigRational::from_integer(n.into());
        GapParams::new(r(c), deg, r(kappa), r(c3), r(cb)).unwrap()
    })
}

fn is_partition(groups: &[Vec<usize>], n: usize) -> bool {
    let mut all: Vec<usize> = groups.iter().flatten().copied().collect();
    all.sort();
    all == (0..n).collect::<Vec<_>>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ball_cover_invariants((lat, pts) in lattice_and_points(25), num in 1i64..=50, den in 1i64..=200) {
        let r_sq = BigRational::new(num.into(), den.into()) * BigRational::from_integer(40.into());
        let cover = ball_cover(&lat, &pts, &r_sq).unwrap();
        prop_assert_eq!(cover.assignment.len(), pts.len());
        prop_assert!(cover.covers(&lat, &pts));
        prop_assert!(cover.separated(&lat, &pts));
        prop_assert!(cover.within_bound(lat.rho()));
    }

    #[test]
    fn cone_assign_invariants((lat, pts) in lattice_and_points(30), c1 in (4i64..=40).prop_map(|n| BigRational::new(n.into(), 4.into()))) {
        let a = cone_assign(&lat, &pts, &c1).unwrap();
        prop_assert!(is_partition(&a.groups, pts.len()));
        prop_assert!(groups_satisfy_cosine(&lat, &pts, &a, &c1));
        prop_assert!(BigInt::from(a.group_count()) <= cone_count_bound(&c1, lat.rho()));
    }

    #[test]
    fn chain_counts_are_consistent((lat, pts) in lattice_and_points(20), p in params(), scale in 0u32..=6) {
        // push some points above the large-point threshold
        let k = BigRational::from_integer(BigInt::from(10).pow(scale));
        let pts: Vec<Vector> = pts.into_iter().map(|v| v.into_iter().map(|x| x * &k).collect()).collect();
        let t = vojta_mumford_chain(&lat, &pts, None, &p).unwrap();
        prop_assert!(t.n <= pts.len());
        prop_assert_eq!(t.n, t.n_prime);
        prop_assert!(t.n_double_prime <= t.n_prime);
        prop_assert!(t.cone_bound_ok);
        prop_assert_eq!(t.bound_holds, BigRational::from_integer(t.n.into()) <= certified_bound(&p, lat.rho()));
        let flags = t.stabilizer_ok && t.cone_bound_ok && t.vojta_ok && t.mumford_ok && t.bound_holds;
        prop_assert_eq!(t.all_satisfied, flags);
    }

    #[test]
    fn stabilizer_duplicates_collapse(p in params(), base in 1i64..=40, copies in 1usize..=9) {
        let deg_sq = (p.deg_c * p.deg_c) as usize;
        let copies = copies.min(deg_sq);
        let big = BigRational::from_integer(BigInt::from(base) * BigInt::from(10).pow(25));
        let pts = vec![vec![big]; copies];
        let classes = vec![(0..copies).collect::<Vec<_>>()];
        let t = vojta_mumford_chain(&GramLattice::identity(1), &pts, Some(&classes), &p).unwrap();
        prop_assert_eq!((t.n, t.n_prime, t.n_double_prime), (copies, 1, 1));
        prop_assert!(t.all_satisfied);
    }

    #[test]
    fn height_scale_cancels(p in params(), rho in 0usize..=4, hn in 1i64..=1_000_000, hd in 1i64..=1000) {
        let h = BigRational::new(hn.into(), hd.into());
        prop_assert_eq!(total_bound_at_height(&p, rho, &h).unwrap(), total_bound(&p, rho));
    }

    #[test]
    fn lattice_file_round_trip((lat, pts) in lattice_and_points(6), p in params()) {
        let inst = LatticeInstance {
            stab_classes: Some((0..pts.len()).map(|i| vec![i]).collect()),
            lattice: lat,
            vectors: pts,
            gap_params: Some(p),
        };
        prop_assert_eq!(LatticeInstance::parse(&inst.render()).unwrap(), inst);
    }
}

#[test]
fn zero_vectors_share_one_group() {
    let lat = GramLattice::identity(2);
    let z = vec![BigRational::zero(), BigRational::zero()];
    let pts = vec![z.clone(), vec![BigRational::one(), BigRational::zero()], z];
    let a = cone_assign(&lat, &pts, &BigRational::one()).unwrap();
    let zg = a.zero_group.unwrap();
    assert_eq!(a.groups[zg], vec![0, 2]);
}
