use proptest::prelude::*;

use turan_core::canon::{canonicalize, is_isomorphic};
use turan_core::containment::{contains_linear_forest, contains_subgraph, LinearForestSpec};
use turan_core::family::{is_free, ForbiddenFamily};
use turan_core::graph6;
use turan_core::invariants::{
    chromatic_number, edge_control_number, family_g_unreduced, family_h_unreduced, matching_number,
    Budget, GVariant,
};
use turan_core::oracle::free_graph_classes;
use turan_core::Graph;

fn graph_strategy(max_n: usize, density: f64) -> impl Strategy<Value = Graph> {
    (0..=max_n).prop_flat_map(move |n| {
        let pairs = n * n.saturating_sub(1) / 2;
        proptest::collection::vec(proptest::bool::weighted(density), pairs).prop_map(move |bits| {
            let mut g = Graph::empty(n).unwrap();
            let mut it = bits.into_iter();
            for j in 1..n {
                for i in 0..j {
                    if it.next().unwrap() {
                        g.add_edge(i, j);
                    }
                }
            }
            g
        })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn all_classes(m: usize) -> Vec<Graph> {
    free_graph_classes(m, &ForbiddenFamily::new([]))
        .unwrap()
        .into_iter()
        .map(|f| graph6::decode_str(&f.code).unwrap())
        .collect()
}

/// Chromatic number by trying every assignment of `k` colors.
fn brute_chromatic(g: &Graph) -> usize {
    let n = g.order();
    (0..=n)
        .find(|&k| {
            let total = (k as u64).pow(n as u32);
            (0..total).any(|mut code| {
                let mut color = vec![0; n];
                for c in color.iter_mut() {
                    *c = code % k as u64;
                    code /= k as u64;
                }
                g.edges().all(|(u, v)| color[u] != color[v])
            })
        })
        .unwrap()
}

/// Largest set of pairwise disjoint edges.
fn brute_matching(g: &Graph) -> usize {
    fn go(edges: &[(usize, usize)], used: u64) -> usize {
        match edges.split_first() {
            None => 0,
            Some((&(u, v), rest)) => {
                let skip = go(rest, used);
                if used & (1 << u | 1 << v) == 0 {
                    skip.max(1 + go(rest, used | 1 << u | 1 << v))
                } else {
                    skip
                }
            }
        }
    }
    go(&g.edges().collect::<Vec<_>>(), 0)
}

/// Smallest edge set whose endpoints touch every edge.
fn brute_edge_control(g: &Graph) -> usize {
    let edges: Vec<_> = g.edges().collect();
    (0u64..1 << edges.len())
        .filter(|&s| {
            let cover = (0..edges.len())
                .filter(|&i| s >> i & 1 == 1)
                .fold(0u64, |c, i| c | 1 << edges[i].0 | 1 << edges[i].1);
            edges.iter().all(|&(u, v)| cover & (1 << u | 1 << v) != 0)
        })
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn degree_sum_is_twice_the_size(g in graph_strategy(64, 0.3)) {
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.size());
    }

    #[test]
    fn graph6_roundtrip(g in graph_strategy(64, 0.5)) {
        let code = graph6::encode(&g);
        prop_assert_eq!(graph6::decode_str(&code).unwrap(), g);
    }

    #[test]
    fn canonical_form_ignores_labels((g, perm) in graph_strategy(12, 0.4).prop_flat_map(|g| {
        let n = g.order();
        (Just(g), permutation(n))
    })) {
        let h = g.permuted(&perm);
        prop_assert_eq!(canonicalize(&g), canonicalize(&h));
    }

    #[test]
    fn freeness_survives_edge_deletion(
        g in graph_strategy(9, 0.5),
        pattern in graph_strategy(5, 0.6).prop_filter("pattern needs an edge", |p| p.size() > 0),
        pick in any::<prop::sample::Index>(),
    ) {
        let fam = ForbiddenFamily::single(&pattern);
        let edges: Vec<_> = g.edges().collect();
        prop_assume!(!edges.is_empty());
        let (u, v) = edges[pick.index(edges.len())];
        let mut h = g.clone();
        h.remove_edge(u, v);
        prop_assert!(!is_free(&g, &fam) || is_free(&h, &fam));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn forest_embedder_agrees_with_generic_search(
        host in graph_strategy(10, 0.45),
        orders in proptest::collection::vec(3usize..=5, 1..=3),
    ) {
        let spec = LinearForestSpec::new(orders).unwrap();
        let expected = contains_subgraph(&host, &spec.graph().unwrap());
        prop_assert_eq!(contains_linear_forest(&host, &spec), expected);
    }

    #[test]
    fn reduction_preserves_freeness(
        host in graph_strategy(8, 0.5),
        members in proptest::collection::vec(graph_strategy(5, 0.6), 1..=4),
    ) {
        let fam = ForbiddenFamily::new(members);
        prop_assert_eq!(is_free(&host, &fam), is_free(&host, &fam.reduce()));
    }

    #[test]
    fn isomorphism_matches_canonical_codes(g in graph_strategy(7, 0.5), h in graph_strategy(7, 0.5)) {
        let same = canonicalize(&g) == canonicalize(&h);
        prop_assert_eq!(is_isomorphic(&g, &h), same);
    }
}

#[test]
fn invariant_inequalities_on_all_small_graphs() {
    for m in 1..=7 {
        for g in all_classes(m) {
            let chi = chromatic_number(&g);
            let nu = matching_number(&g);
            let beta1 = edge_control_number(&g).beta1;
            assert!(beta1 <= nu, "{}", graph6::encode(&g));
            assert!(
                g.clique_number() <= chi && chi <= g.max_degree() + 1,
                "{}",
                graph6::encode(&g)
            );
        }
    }
}

#[test]
fn invariants_match_brute_force() {
    for m in 1..=6 {
        for g in all_classes(m) {
            let code = graph6::encode(&g);
            assert_eq!(chromatic_number(&g), brute_chromatic(&g), "chi of {code}");
            assert_eq!(matching_number(&g), brute_matching(&g), "nu of {code}");
            assert_eq!(
                edge_control_number(&g).beta1,
                brute_edge_control(&g),
                "beta1 of {code}"
            );
        }
    }
}

#[test]
fn edge_control_witnesses_are_valid_and_complete() {
    for g in all_classes(6) {
        let ctl = edge_control_number(&g);
        for w in &ctl.witnesses {
            assert_eq!(w.len(), ctl.beta1);
            let cover = w.iter().fold(0u64, |c, &(u, v)| c | 1 << u | 1 << v);
            assert!(g.edges().all(|(u, v)| cover & (1 << u | 1 << v) != 0));
        }
        if ctl.beta1 == 1 {
            let singles = g
                .edges()
                .filter(|&(a, b)| {
                    g.edges()
                        .all(|(u, v)| [u, v].iter().any(|&x| x == a || x == b))
                })
                .count();
            assert_eq!(singles, ctl.witnesses.len());
        }
    }
}

#[test]
fn graph6_roundtrip_on_all_classes_up_to_five() {
    for m in 0..=5 {
        let classes = if m == 0 {
            vec![Graph::empty(0).unwrap()]
        } else {
            all_classes(m)
        };
        for g in classes {
            assert_eq!(graph6::decode_str(&graph6::encode(&g)).unwrap(), g);
        }
    }
}

#[test]
fn family_inclusions() {
    let mut sample = vec![
        Graph::complete(4).unwrap(),
        Graph::complete(5).unwrap(),
        Graph::cycle(5).unwrap(),
        Graph::book(3).unwrap(),
        Graph::turan(7, 3).unwrap(),
    ];
    sample.extend(all_classes(5).into_iter().filter(|g| g.size() > 0));
    for f in &sample {
        let g1 = family_g_unreduced(f, GVariant::One);
        let g2 = family_g_unreduced(f, GVariant::Two);
        assert!(g1.is_subfamily_of(&g2));
        assert_eq!(family_h_unreduced(f, Budget::Finite(0)).key(), g1.key());
        assert_eq!(family_h_unreduced(f, Budget::Finite(1)).key(), g2.key());
        for i in 0..f.order() {
            let hi = family_h_unreduced(f, Budget::Finite(i));
            assert!(hi.is_subfamily_of(&family_h_unreduced(f, Budget::Finite(i + 1))));
            assert!(hi.is_subfamily_of(&family_h_unreduced(f, Budget::Unbounded)));
        }
    }
}
