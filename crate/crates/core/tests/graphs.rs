use eigenpoly::graphs::io::{parse_edge_list, parse_graph6, to_edge_list, to_graph6};
use eigenpoly::graphs::{automorphisms, find_isomorphism, generate, is_automorphism, transitivity, Graph, DEFAULT_SEARCH_BOUND};
use proptest::prelude::*;

fn random_graph() -> impl Strategy<Value = Graph> {
    (1usize..14).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len())
            .prop_map(move |keep| Graph::new(n, pairs.iter().zip(&keep).filter(|(_, k)| **k).map(|(e, _)| *e)).unwrap())
    })
}

#[test]
fn graph6_reference_strings() {
    // strings produced by an independent encoder
    for (text, n, m, g) in [
        ("Dhc", 5, 5, Some(generate("cycle", &[5]).unwrap())),
        ("IheA@GUAo", 10, 15, Some(generate("petersen", &[]).unwrap())),
        ("@", 1, 0, None),
        ("Cs", 4, 3, None),
    ] {
        let parsed = parse_graph6(text).unwrap();
        assert_eq!((parsed.n(), parsed.edge_count()), (n, m), "{text}");
        assert_eq!(to_graph6(&parsed), text);
        if let Some(g) = g {
            assert!(find_isomorphism(&parsed, &g).is_some(), "{text}");
        }
    }
    let star = parse_graph6("Cs").unwrap();
    assert_eq!(star.degree(0), 3);
}

#[test]
fn graph6_long_form() {
    let text = include_str!("data/g70.g6").trim();
    assert!(text.starts_with('~'));
    let g = parse_graph6(text).unwrap();
    assert_eq!(g.n(), 70);
    let expected: Vec<(usize, usize)> = include_str!("data/g70.edges")
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace().map(|s| s.parse::<usize>().unwrap() - 1);
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(g.edges().collect::<Vec<_>>(), expected);
    assert_eq!(to_graph6(&g), text);
}

#[test]
fn automorphism_group_orders() {
    for (name, params, order) in [
        ("cycle", vec![5], 10u128),
        ("complete", vec![4], 24),
        ("hypercube", vec![3], 48),
        ("petersen", vec![], 120),
        ("dodecahedron", vec![], 120),
        ("icosahedron", vec![], 120),
        ("johnson", vec![5, 2], 120),
        ("hamming", vec![2, 3], 72),
        ("cocktail_party", vec![3], 48),
        ("prism", vec![3], 12),
    ] {
        let g = generate(name, &params).unwrap();
        let aut = automorphisms(&g, DEFAULT_SEARCH_BOUND).unwrap();
        assert_eq!(aut.order, order, "{name}");
    }
}

#[test]
fn holt_is_half_transitive() {
    let g = generate("holt", &[]).unwrap();
    let aut = automorphisms(&g, DEFAULT_SEARCH_BOUND).unwrap();
    assert_eq!(aut.order, 54);
    let t = transitivity(&g, &aut);
    assert!(t.vertex_transitive && t.edge_transitive && !t.arc_transitive && t.half_transitive);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph6_and_edge_list_round_trip(g in random_graph()) {
        prop_assert_eq!(&parse_graph6(&to_graph6(&g)).unwrap(), &g);
        prop_assert_eq!(&parse_edge_list(&to_edge_list(&g)).unwrap(), &g);
    }

    #[test]
    fn generators_are_automorphisms(g in random_graph()) {
        let aut = automorphisms(&g, DEFAULT_SEARCH_BOUND).unwrap();
        for p in &aut.generators {
            prop_assert!(is_automorphism(&g, p));
        }
        let elements = aut.elements(5040).unwrap();
        prop_assert_eq!(elements.len() as u128, aut.order);
        prop_assert!(elements.iter().all(|p| is_automorphism(&g, p)));
    }

    #[test]
    fn relabelled_graphs_are_isomorphic(g in random_graph(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let h = g.relabel(&perm);
        let iso = find_isomorphism(&g, &h).expect("relabelling is an isomorphism");
        for (a, b) in g.edges() {
            prop_assert!(h.has_edge(iso[a], iso[b]));
        }
        let (ag, ah) = (automorphisms(&g, DEFAULT_SEARCH_BOUND).unwrap(), automorphisms(&h, DEFAULT_SEARCH_BOUND).unwrap());
        prop_assert_eq!(ag.order, ah.order);
    }
}
