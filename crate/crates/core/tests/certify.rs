use eigenpoly::certify::{is_balanced, is_spectral_graph, is_spectral_polytope, linear_transition, reconstruct_from_subspace, CertificateKind};
use eigenpoly::geometry::{convex_hull, skeleton_graph, OriginPolicy, PointConfiguration, DEFAULT_HULL_TOL};
use eigenpoly::graphs::generate;
use eigenpoly::izmestiev::{izmestiev_ridge, theta2_criterion, DEFAULT_CRITERION_TOL};
use eigenpoly::spectra::{eigenmatrix, spectrum, DEFAULT_GROUPING_TOL};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn cube_rows() -> Vec<Vec<f64>> {
    (0..8).map(|m: usize| (0..3).map(|k| if m >> k & 1 == 1 { -1.0 } else { 1.0 }).collect()).collect()
}

fn cube_phi() -> DMatrix<f64> {
    let s = spectrum(&generate("hypercube", &[3]).unwrap(), DEFAULT_GROUPING_TOL).unwrap();
    eigenmatrix(&s, 2).unwrap().entries
}

fn well_conditioned() -> impl Strategy<Value = DMatrix<f64>> {
    proptest::collection::vec(-1.0f64..1.0, 9).prop_map(|v| DMatrix::from_vec(3, 3, v) * 0.4 + DMatrix::identity(3, 3))
}

#[test]
fn theorem_examples() {
    for (name, params, spectral) in [
        ("hypercube", vec![3], true),
        ("dodecahedron", vec![], true),
        ("icosahedron", vec![], true),
        ("cocktail_party", vec![4], true),
        ("johnson", vec![5, 2], true),
        ("petersen", vec![], false),
        ("cycle", vec![8], true),
    ] {
        let c = is_spectral_graph(&generate(name, &params).unwrap(), 2, 1e-8).unwrap();
        assert_eq!(c.kind == CertificateKind::SpectralGraph, spectral, "{name}: {:?}", c.reasons);
        assert!(c.self_consistent(), "{name}");
    }
}

#[test]
fn cycle_five_at_index_three() {
    let c = is_spectral_graph(&generate("cycle", &[5]).unwrap(), 3, 1e-8).unwrap();
    assert_eq!(c.kind, CertificateKind::NotSpectral);
    assert!(c.reasons.iter().any(|r| r.starts_with("edge_mismatch")));
    let json = c.to_json();
    assert_eq!(json["witness"]["type"], "pair");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transition_round_trip(t in well_conditioned()) {
        prop_assume!(t.determinant().abs() > 0.05);
        let a = cube_phi();
        let b = &a * &t;
        let found = linear_transition(&a, &b, 1e-7).unwrap().expect("same span");
        prop_assert!((found.t - t).amax() < 1e-8);
        prop_assert!(found.residual < 1e-9);
    }

    #[test]
    fn criterion_is_similarity_invariant(scale in 0.1f64..10.0, shift in proptest::collection::vec(-0.5f64..0.5, 3), q in well_conditioned()) {
        // a similarity: uniform scale, rotation from the QR factor, translation
        let rot = q.qr().q();
        let rows: Vec<Vec<f64>> = cube_rows()
            .into_iter()
            .map(|r| {
                let v = &rot * nalgebra::DVector::from_vec(r) * scale;
                (0..3).map(|k| v[k] + shift[k]).collect()
            })
            .collect();
        let p = convex_hull(&PointConfiguration::from_rows(&rows, OriginPolicy::AsGiven).unwrap(), DEFAULT_HULL_TOL).unwrap();
        let x = izmestiev_ridge(&p).unwrap();
        let c = theta2_criterion(&x, &skeleton_graph(&p).graph, DEFAULT_CRITERION_TOL).unwrap();
        prop_assert_eq!(c.kind, CertificateKind::SpectralPolytope);
        prop_assert!((c.theta.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn perturbation_breaks_balance(vertex in 0usize..8, dir in proptest::collection::vec(-1.0f64..1.0, 3)) {
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 0.1);
        let g = generate("hypercube", &[3]).unwrap();
        let mut phi = cube_phi();
        for k in 0..3 {
            phi[(vertex, k)] += 0.05 * dir[k] / norm;
        }
        let c = is_balanced(&PointConfiguration::new(phi, OriginPolicy::AsGiven).unwrap(), &g, 1e-8).unwrap();
        prop_assert_ne!(c.kind, CertificateKind::Balanced);
        prop_assert!(c.residuals.values().any(|r| *r > 1e-3));
    }

    #[test]
    fn reconstruction_ignores_basis_choice(q in well_conditioned()) {
        let phi = cube_phi();
        let u = &phi * q.qr().q();
        let (p, skel) = reconstruct_from_subspace(&u).unwrap();
        prop_assert_eq!((p.vertex_count(), p.edges.len(), p.facets.len()), (8, 12, 6));
        let cube = generate("hypercube", &[3]).unwrap();
        let mut got = skel.input_edges();
        got.sort();
        prop_assert_eq!(got, cube.edges().collect::<Vec<_>>());
    }
}

#[test]
fn spectral_polytope_routes() {
    let p = convex_hull(&PointConfiguration::from_rows(&cube_rows(), OriginPolicy::AsGiven).unwrap(), DEFAULT_HULL_TOL).unwrap();
    let c = is_spectral_polytope(&p, 1e-8).unwrap();
    assert_eq!((c.kind, c.k), (CertificateKind::SpectralPolytope, Some(2)));
}
