use girthforge::bounds::{entropy_lp_complexity, EntropyObjective};
use girthforge::certificate::{audit_certificate, certify_sum_bound, verify_term, TermBound, TermKind};
use girthforge::family::{
    build_cycle, build_gd, build_h, build_pi_graph_with, canonical_relabel, guaranteed_n, Bijection, FamilyError,
    PiGraph, PiGraphOptions,
};
use girthforge::graph::{check_homomorphism, check_regular_bipartite, girth, Graph, OneFactor};
use girthforge::rational::Rational;
use girthforge::scheme::{enumerate_joint, make_star_decomposition, realize_scheme, verify_perfect};
use proptest::prelude::*;

fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let np = pairs.len();
        (Just(n), Just(pairs), proptest::collection::vec(any::<bool>(), np)).prop_map(|(n, pairs, keep)| {
            // a path keeps every vertex covered
            let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
            for (p, k) in pairs.into_iter().zip(keep) {
                if k && p.1 != p.0 + 1 {
                    edges.push(p);
                }
            }
            Graph::new(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn members_are_valid(n2 in prop::sample::select(vec![6usize, 8, 10]), n3 in 5usize..8, seed in any::<u64>()) {
        let g = build_gd(&[n2, n3], seed).unwrap();
        prop_assert_eq!(g.n(), n2 * n3);
        check_regular_bipartite(&g.graph, 3).unwrap();
        g.validate().unwrap();
        let c = canonical_relabel(&g).unwrap();
        c.validate().unwrap();
    }

    #[test]
    fn level_four_members_are_valid(seed in any::<u64>()) {
        let g = build_gd(&[6, 5, 5], seed).unwrap();
        prop_assert_eq!(g.n(), 150);
        g.validate().unwrap();
    }

    #[test]
    fn certificates_pass_audit(n2 in prop::sample::select(vec![6usize, 8]), n3 in 5usize..7, seed in any::<u64>()) {
        let g = build_gd(&[n2, n3], seed).unwrap();
        let cert = certify_sum_bound(&g).unwrap();
        prop_assert_eq!(&cert.total, &Rational::from(2 * g.n()));
        audit_certificate(&g.graph, &cert, 2, seed).unwrap();
    }

    #[test]
    fn pi_graphs_keep_their_shape(gi in 4usize..7, n in 64usize..300, seed in any::<u64>()) {
        let built = build_pi_graph_with(&PiGraphOptions::new(gi, n, seed, 5));
        prop_assume!(!matches!(built, Err(FamilyError::RetriesExhausted { .. })));
        let p = built.unwrap();
        p.validate().unwrap();
        check_regular_bipartite(&p.graph, 3).unwrap();
        prop_assert!(p.n >= n);
        prop_assert_eq!(p.pi.len(), p.n);
        let mut sorted = p.pi.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..p.n).collect::<Vec<_>>());
        if p.leftovers == 0 {
            prop_assert!(p.girth.exceeds(gi));
        }
        let back = PiGraph::from_json(&p.to_json()).unwrap();
        prop_assert_eq!(back.graph.edges(), p.graph.edges());
    }

    #[test]
    fn h_projects_onto_g_plus_pi(
        targets in (3usize..10).prop_flat_map(|half| Just((0..half).collect::<Vec<_>>()).prop_shuffle()),
        m in 2usize..7,
    ) {
        let base = build_cycle(2 * targets.len()).unwrap();
        let (a, b) = (&base.bipartition.a, &base.bipartition.b);
        let pairs = a.iter().zip(&targets).map(|(&u, &t)| (u, b[t]));
        let pi = Bijection::new(pairs.filter(|&(u, v)| !base.graph.has_edge(u, v)).collect());
        prop_assume!(pi.pairs.len() == a.len());
        let h = build_h(m, &base, &pi).unwrap();
        let target = base.graph.with_edges(pi.edges()).unwrap();
        prop_assert!(check_homomorphism(&h.graph, &target, &h.projection()).unwrap());
        prop_assert!(girth(&h.graph) >= girth(&target));
        prop_assert_eq!(h.member, m >= 5);
    }

    #[test]
    fn empty_witness_proves_nothing_more_than_zero(n in 6usize..12) {
        let g = Graph::cycle(n);
        let t = TermBound {
            kind: TermKind::L2,
            a: vec![0, 1],
            b: Vec::new(),
            c: Vec::new(),
            b_prime: Vec::new(),
            factor: OneFactor::default(),
            bound: Rational::zero(),
        };
        prop_assert!(verify_term(&g, &t).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn schemes_dominate_the_lp(g in connected_graph(5)) {
        let s = realize_scheme(&make_star_decomposition(&g).unwrap(), 7).unwrap();
        let report = verify_perfect(&enumerate_joint(&s).unwrap(), 1).unwrap();
        prop_assert!(report.perfect);
        let ratio = report.ratio.clone().unwrap();
        let lp = entropy_lp_complexity(&g, EntropyObjective::MinMax).unwrap();
        prop_assert!(ratio >= lp.value);
        let deg = (0..g.n()).map(|v| g.degree(v)).max().unwrap();
        prop_assert_eq!(ratio, Rational::new(deg as i64 + 1, 2));
    }

    #[test]
    fn determinism_ignores_evaluation_points(g in connected_graph(4), shift in 1u64..6, drop in 0usize..4) {
        let s = realize_scheme(&make_star_decomposition(&g).unwrap(), 7).unwrap();
        let base = verify_perfect(&enumerate_joint(&s).unwrap(), 1).unwrap();
        let mut moved = s.clone();
        let t = moved.stars.len() as u64;
        for (i, star) in moved.stars.iter_mut().enumerate() {
            star.x = (i as u64 + shift) % t + 1;
        }
        let other = verify_perfect(&enumerate_joint(&moved).unwrap(), 1).unwrap();
        prop_assert_eq!(&base.determinism_failures, &other.determinism_failures);

        let cut = s.without_star(drop % s.stars.len());
        let report = verify_perfect(&enumerate_joint(&cut).unwrap(), 1).unwrap();
        prop_assert!(!report.determinism_failures.is_empty());
        for e in &report.determinism_failures {
            prop_assert!(cut.coverage_defects().contains(e));
        }
    }
}

#[test]
fn guaranteed_sizes_increase() {
    for g in 1..40 {
        assert!(guaranteed_n(g) < guaranteed_n(g + 1));
    }
}

#[test]
fn regular_star_schemes_have_stinson_ratio() {
    for parts in [vec![6], vec![6, 5], vec![8, 5, 5]] {
        let g = build_gd(&parts, 3).unwrap();
        let s = make_star_decomposition(&g.graph).unwrap();
        assert_eq!(s.structural_ratio(), Rational::new(g.d as i64 + 1, 2));
    }
}
