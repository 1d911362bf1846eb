mod support;

use dimer_expansion::kernels::interp::fit_rational;
use dimer_expansion::kernels::ursell::{ursell, ClusterTuple, OverlapGraph};
use dimer_expansion::kernels::{kernel_finite, KernelOptions};
use dimer_expansion::lattice::{
    build_torus, enumerate_dimers, weight_and_v, LocatedTile, TorusLattice, Vertex,
    WeightAssignment,
};
use dimer_expansion::oracle::{beta_exact, count_perfect_matchings, MatchingOptions};
use dimer_expansion::rational::{frac, int, Rational};
use dimer_expansion::series::{solve_alpha, KernelSeries, TruncatedSeries};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn dims_strategy(max_d: usize, max_side: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2..=max_side, 1..=max_d)
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=9).prop_map(|(p, q)| frac(p, q))
}

fn series_strategy(order: usize, constant: Option<i64>) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(small_rational(), order + 1).prop_map(move |mut c| {
        if let Some(c0) = constant {
            c[0] = int(c0);
        }
        TruncatedSeries::from_coeffs(&c, order)
    })
}

fn graph_strategy(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .collect();
        let len = pairs.len();
        prop::collection::vec(any::<bool>(), len).prop_map(move |keep| {
            let edges = pairs
                .iter()
                .zip(keep)
                .filter(|(_, k)| *k)
                .map(|(&p, _)| p)
                .collect();
            (n, edges)
        })
    })
}

fn reflect(l: &TorusLattice, v: Vertex, axis: usize) -> Vertex {
    let mut c = l.coords(v);
    c[axis] = (l.dims()[axis] - c[axis]) % l.dims()[axis];
    l.vertex(&c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dimer_weights_normalize(dims in dims_strategy(3, 5)) {
        let l = build_torus(&dims).unwrap();
        let wa = WeightAssignment::dimer(&l).unwrap();
        let dimers = enumerate_dimers(&l);
        let slots: u32 = dimers.iter().map(|t| t.multiplicity()).sum();
        prop_assert_eq!(slots as usize, l.num_vertices() * l.dim());
        for x in 0..l.num_vertices() {
            prop_assert_eq!(l.neighbors(Vertex(x)).len(), 2 * l.dim());
            let total: Rational = dimers
                .iter()
                .filter(|t| t.contains(Vertex(x)))
                .map(|t| &wa.dimer_value * int(t.multiplicity() as i64))
                .sum();
            prop_assert_eq!(total, int(1));
        }
        prop_assert_eq!(&wa.f0 * int(l.num_vertices() as i64 - 1), int(1));
    }

    #[test]
    fn weights_are_translation_invariant(
        dims in dims_strategy(3, 5),
        a in 0usize..1000, b in 0usize..1000, shift in 0usize..1000,
    ) {
        let l = build_torus(&dims).unwrap();
        let n = l.num_vertices();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let wa = WeightAssignment::dimer(&l).unwrap();
        let t = LocatedTile::pair(Vertex(a), Vertex(b)).unwrap();
        let by = Vertex(shift % n);
        let moved = LocatedTile::pair(l.translate(Vertex(a), by), l.translate(Vertex(b), by)).unwrap();
        prop_assert_eq!(weight_and_v(&l, &wa, &t).unwrap(), weight_and_v(&l, &wa, &moved).unwrap());
    }

    #[test]
    fn ursell_matches_partition_oracle((n, edges) in graph_strategy(6)) {
        let lib = ursell(&OverlapGraph::from_edges(n, &edges)).unwrap();
        prop_assert_eq!(lib, support::ursell_by_partitions(n, &edges));
    }

    #[test]
    fn ursell_depends_only_on_isomorphism_class(
        (n, edges) in graph_strategy(6),
        perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let perm: Vec<usize> = perm.into_iter().filter(|&p| p < n).collect();
        let relabelled: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        prop_assert_eq!(
            ursell(&OverlapGraph::from_edges(n, &edges)).unwrap(),
            ursell(&OverlapGraph::from_edges(n, &relabelled)).unwrap()
        );
    }

    #[test]
    fn cluster_weights_survive_reflection(
        dims in dims_strategy(2, 6),
        raw in prop::collection::vec((0usize..1000, 0usize..1000), 1..=4),
        axis in 0usize..2,
    ) {
        let l = build_torus(&dims).unwrap();
        let n = l.num_vertices();
        let axis = axis % l.dim();
        let tiles: Vec<LocatedTile> = raw
            .iter()
            .filter(|(a, b)| a % n != b % n)
            .map(|(a, b)| LocatedTile::pair(Vertex(a % n), Vertex(b % n)).unwrap())
            .collect();
        prop_assume!(!tiles.is_empty());
        let mirrored: Vec<LocatedTile> = tiles
            .iter()
            .map(|t| {
                let v = t.vertices();
                LocatedTile::pair(reflect(&l, v[0], axis), reflect(&l, v[1], axis)).unwrap()
            })
            .collect();
        let wa = WeightAssignment::dimer(&l).unwrap();
        let weight = |ts: &[LocatedTile]| -> (i64, Rational) {
            let psi = ClusterTuple::new(ts.to_vec()).unwrap().ursell_weight().unwrap();
            let prod = ts.iter().map(|t| weight_and_v(&l, &wa, t).unwrap().1).product();
            (psi, prod)
        };
        prop_assert_eq!(weight(&tiles), weight(&mirrored));
    }

    #[test]
    fn matchings_independent_of_axis_order(dims in dims_strategy(3, 4)) {
        let n: usize = dims.iter().product();
        prop_assume!(n.is_multiple_of(2) && n <= 16);
        let l = build_torus(&dims).unwrap();
        let mut rev = dims.clone();
        rev.reverse();
        let r = build_torus(&rev).unwrap();
        let a = count_perfect_matchings(&l, MatchingOptions::default()).unwrap();
        prop_assert_eq!(&a, &count_perfect_matchings(&r, MatchingOptions::default()).unwrap());
        prop_assert_eq!(a, support::matchings_by_pairings(&l));
    }

    #[test]
    fn beta_gap_never_grows(i in 1usize..=3, start in 4usize..40) {
        let mut prev: Option<Rational> = None;
        for n in (2 * start..2 * start + 40).step_by(2) {
            let gap = (beta_exact(n, i).unwrap() - int(1)).abs();
            if let Some(p) = &prev {
                prop_assert!(&gap <= p);
            }
            prev = Some(gap);
        }
    }

    #[test]
    fn log_turns_products_into_sums(a in series_strategy(5, Some(1)), b in series_strategy(5, Some(1))) {
        let lhs = (&a * &b).log().unwrap();
        let rhs = &a.log().unwrap() + &b.log().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exp_turns_sums_into_products(a in series_strategy(5, Some(0)), b in series_strategy(5, Some(0))) {
        prop_assert_eq!((&a + &b).exp().unwrap(), &a.exp().unwrap() * &b.exp().unwrap());
    }

    #[test]
    fn inverse_is_two_sided(a in series_strategy(6, None)) {
        prop_assume!(!a.coeff(0).is_zero());
        prop_assert_eq!(&a * &a.inverse().unwrap(), TruncatedSeries::one(6));
    }

    #[test]
    fn alpha_is_consistent_under_truncation(
        coeffs in prop::collection::vec(small_rational(), 3..=6),
        k in 1usize..=3,
    ) {
        // Kernels Jbar_2..Jbar_{2+len} with leading power ceil(s/2).
        let big = k + 2;
        let jbar = |order: usize| -> KernelSeries {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let s = i + 2;
                    let r = s.div_ceil(2);
                    (s, TruncatedSeries::from_terms(&[(r, c.clone()), (r + 1, c / int(3))], order))
                })
                .collect()
        };
        let small = solve_alpha(&jbar(k), k).unwrap();
        let large = solve_alpha(&jbar(big), big).unwrap();
        for (s, a) in &small.alpha {
            prop_assert_eq!(a, &large.alpha[s].truncate(k));
        }
    }

    #[test]
    fn rational_fit_recovers_limit(
        num in prop::collection::vec(-9i64..=9, 3),
        den_tail in prop::collection::vec(0i64..=9, 2),
    ) {
        // (n0 + n1 x + n2 x^2) / (x^2 + e1 x + e0) sampled at x >= 1.
        let f = |x: i64| frac(num[0] + num[1] * x + num[2] * x * x, x * x + den_tail[1] * x + den_tail[0]);
        let points: Vec<(Rational, Rational)> = (1..=8).map(|x| (int(x), f(x))).collect();
        let rf = fit_rational(&points, 2, 2).unwrap();
        prop_assert_eq!(rf.limit_at_infinity().unwrap(), int(num[2]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernels_invariant_under_axis_permutation(
        dims in prop::collection::vec(3usize..=6, 2..=3),
        s in 2usize..=3,
    ) {
        let opts = KernelOptions::default();
        let l = build_torus(&dims).unwrap();
        let mut rot = dims.clone();
        rot.rotate_left(1);
        let r = build_torus(&rot).unwrap();
        prop_assert_eq!(kernel_finite(&l, s, &opts).unwrap(), kernel_finite(&r, s, &opts).unwrap());
    }
}
