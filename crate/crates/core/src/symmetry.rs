//! Graph automorphisms realized as orthogonal maps of eigenpolytopes, and
//! congruence of vertex-matched point sets.

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::certify::{Certificate, CertificateKind};
use crate::graphs::{automorphisms, is_automorphism, AutGroup, Graph, GraphError, Permutation, DEFAULT_SEARCH_BOUND};
use crate::spectra::{eigenmatrix, spectrum, SpectrumError, DEFAULT_GROUPING_TOL};

/// Largest group whose images are enumerated exhaustively.
pub const DEFAULT_ENUMERATION_CAP: usize = 100_000;
/// Random words drawn beyond the cap.
pub const SAMPLED_WORDS: usize = 1000;
pub const CONGRUENCE_TOL: f64 = 1e-6;
/// Two images closer than this (max entry) count as the same matrix.
const IMAGE_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("permutation is not an automorphism of the graph")]
    NotAnAutomorphism,
    #[error("matrix has {rows} rows, permutation acts on {n} points")]
    SizeMismatch { rows: usize, n: usize },
    #[error("isomorphism mode needs a spectral_graph certificate at k = {0}")]
    MissingCertificate(usize),
    #[error("vertex counts differ: {0} vs {1}")]
    VertexCountMismatch(usize, usize),
    #[error("ambient dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matching is not a bijection")]
    BadMatching,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizedSymmetry {
    pub sigma: Permutation,
    pub t: DMatrix<f64>,
    /// `‖TᵀT − I‖_max`.
    pub orthogonality_gap: f64,
    /// `max_i ‖T v_i − v_σ(i)‖`.
    pub equivariance_gap: f64,
}

impl RealizedSymmetry {
    pub fn to_json(&self) -> Value {
        json!({
            "sigma": self.sigma.iter().map(|v| v + 1).collect::<Vec<_>>(),
            "T": rows(&self.t),
            "orthogonality_gap": self.orthogonality_gap,
            "equivariance_gap": self.equivariance_gap,
        })
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// `T_σ = Σ_b v_σ(b) v_bᵀ`, without the automorphism check.
fn transform(phi: &DMatrix<f64>, sigma: &[usize]) -> RealizedSymmetry {
    let (n, d) = phi.shape();
    let permuted = DMatrix::from_fn(n, d, |b, c| phi[(sigma[b], c)]);
    let t = permuted.transpose() * phi;
    let orthogonality_gap = (t.transpose() * &t - DMatrix::identity(d, d)).amax();
    let moved = phi * t.transpose();
    let equivariance_gap = (0..n).map(|i| (moved.row(i) - phi.row(sigma[i])).norm()).fold(0.0, f64::max);
    RealizedSymmetry { sigma: sigma.to_vec(), t, orthogonality_gap, equivariance_gap }
}

/// The linear map of the eigenpolytope induced by an automorphism `σ`.
pub fn induced_symmetry(phi: &DMatrix<f64>, g: &Graph, sigma: &[usize]) -> Result<RealizedSymmetry, SymmetryError> {
    if phi.nrows() != g.n() || sigma.len() != g.n() {
        return Err(SymmetryError::SizeMismatch { rows: phi.nrows(), n: sigma.len() });
    }
    if !is_automorphism(g, sigma) {
        return Err(SymmetryError::NotAnAutomorphism);
    }
    Ok(transform(phi, sigma))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealizeMode {
    Homomorphism,
    Isomorphism,
}

#[derive(Clone, Debug)]
pub struct GroupReport {
    pub k: usize,
    pub mode: RealizeMode,
    pub generators: Vec<RealizedSymmetry>,
    pub group_order: u128,
    /// Distinct images found among the checked elements.
    pub distinct_images: usize,
    /// Elements checked (the whole group or a sample).
    pub checked: usize,
    pub sampled: bool,
    /// Largest `‖T_στ − T_σ T_τ‖_max` over checked pairs.
    pub homomorphism_gap: f64,
    pub equivariance_gap: f64,
    pub orthogonality_gap: f64,
    /// No non-identity element maps to the identity.
    pub injective: bool,
}

impl GroupReport {
    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "mode": self.mode,
            "generators": self.generators.iter().map(RealizedSymmetry::to_json).collect::<Vec<_>>(),
            "group_order": self.group_order.to_string(),
            "distinct_images": self.distinct_images,
            "checked": self.checked,
            "sampled": self.sampled,
            "homomorphism_gap": self.homomorphism_gap,
            "equivariance_gap": self.equivariance_gap,
            "orthogonality_gap": self.orthogonality_gap,
            "injective": self.injective,
        })
    }
}

fn image_key(t: &DMatrix<f64>) -> Vec<i64> {
    t.iter().map(|x| (x / IMAGE_TOL / 10.0).round() as i64).collect()
}

/// Maps `Aut(G)` into `O(d)` through the `k`-th eigenpolytope.
///
/// In [`RealizeMode::Isomorphism`] a spectral-graph certificate for the same
/// `k` is required; injectivity is then an assertion of the theory and is
/// reported as measured.
pub fn realize_group(
    g: &Graph,
    k: usize,
    mode: RealizeMode,
    certificate: Option<&Certificate>,
    cap: usize,
) -> Result<GroupReport, SymmetryError> {
    if mode == RealizeMode::Isomorphism
        && !certificate.is_some_and(|c| c.kind == CertificateKind::SpectralGraph && c.k == Some(k))
    {
        return Err(SymmetryError::MissingCertificate(k));
    }
    let s = spectrum(g, DEFAULT_GROUPING_TOL)?;
    let phi = eigenmatrix(&s, k)?.entries;
    let aut = automorphisms(g, DEFAULT_SEARCH_BOUND.max(g.n()))?;
    let generators: Vec<RealizedSymmetry> = aut.generators.iter().map(|p| transform(&phi, p)).collect();

    let (elements, sampled) = match aut.elements(cap) {
        Ok(all) => (all, false),
        Err(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let words = (0..SAMPLED_WORDS).map(|_| aut.random_word(&mut rng, 32)).collect();
            (words, true)
        }
    };
    let images: Vec<RealizedSymmetry> = elements.par_iter().map(|p| transform(&phi, p)).collect();
    let m = images.len();
    // pairs (a, b) with a, b drawn deterministically from the checked set
    let pair_count = (m * m).min(4 * SAMPLED_WORDS);
    let homomorphism_gap = (0..pair_count)
        .into_par_iter()
        .map(|t| {
            let (a, b) = if m * m <= pair_count { (t / m, t % m) } else { ((t * 7919) % m, (t * 104_729 + 13) % m) };
            let composed = transform(&phi, &AutGroup::compose(&elements[a], &elements[b]));
            (&composed.t - &images[a].t * &images[b].t).amax()
        })
        .reduce(|| 0.0, f64::max);
    let distinct: HashSet<Vec<i64>> = images.iter().map(|r| image_key(&r.t)).collect();
    let d = phi.ncols();
    let identity = DMatrix::identity(d, d);
    let id_perm = AutGroup::identity(g.n());
    let injective = elements
        .iter()
        .zip(&images)
        .all(|(p, r)| *p == id_perm || (&r.t - &identity).amax() > IMAGE_TOL);
    let fold = |f: fn(&RealizedSymmetry) -> f64| images.iter().chain(&generators).map(f).fold(0.0, f64::max);
    Ok(GroupReport {
        k,
        mode,
        group_order: aut.order,
        distinct_images: distinct.len(),
        checked: m,
        sampled,
        homomorphism_gap,
        equivariance_gap: fold(|r| r.equivariance_gap),
        orthogonality_gap: fold(|r| r.orthogonality_gap),
        injective,
        generators,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Congruence {
    /// Orthogonal `R` with `x_i R ≈ y_matching(i)` after normalization.
    pub map: DMatrix<f64>,
    /// `max_i ‖x_i R − y_i‖` on the normalized sets.
    pub residual: f64,
    pub congruent: bool,
}

fn normalized(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut x = m.clone();
    let mean = x.row_mean();
    for mut r in x.row_iter_mut() {
        r -= &mean;
    }
    let radius = x.row_iter().map(|r| r.norm()).fold(0.0, f64::max);
    if radius > 0.0 {
        x /= radius;
    }
    x
}

/// Orthogonal Procrustes fit of two vertex-matched point sets (rows), after
/// moving both barycenters to the origin and scaling to circumradius 1.
/// Reflections are allowed.
pub fn congruence_check(p: &DMatrix<f64>, q: &DMatrix<f64>, matching: &[usize]) -> Result<Congruence, SymmetryError> {
    if p.nrows() != q.nrows() {
        return Err(SymmetryError::VertexCountMismatch(p.nrows(), q.nrows()));
    }
    if p.ncols() != q.ncols() {
        return Err(SymmetryError::DimensionMismatch(p.ncols(), q.ncols()));
    }
    let n = p.nrows();
    let mut seen = vec![false; n];
    if matching.len() != n || !matching.iter().all(|&j| j < n && !std::mem::replace(&mut seen[j], true)) {
        return Err(SymmetryError::BadMatching);
    }
    let x = normalized(p);
    let y_raw = normalized(q);
    let y = DMatrix::from_fn(n, q.ncols(), |i, c| y_raw[(matching[i], c)]);
    let svd = (x.transpose() * &y).svd(true, true);
    let map = svd.u.expect("requested") * svd.v_t.expect("requested");
    let fitted = &x * &map;
    let residual = (0..n).map(|i| (fitted.row(i) - y.row(i)).norm()).fold(0.0, f64::max);
    Ok(Congruence { map, residual, congruent: residual <= CONGRUENCE_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::is_spectral_graph;
    use crate::graphs::generate;

    fn phi(name: &str, params: &[usize], k: usize) -> (Graph, DMatrix<f64>) {
        let g = generate(name, params).unwrap();
        let s = spectrum(&g, DEFAULT_GROUPING_TOL).unwrap();
        let e = eigenmatrix(&s, k).unwrap().entries;
        (g, e)
    }

    #[test]
    fn antipodal_map_is_minus_identity() {
        let (g, p) = phi("hypercube", &[3], 2);
        let antipode: Vec<usize> = (0..8).map(|i| 7 - i).collect();
        let r = induced_symmetry(&p, &g, &antipode).unwrap();
        assert!((r.t + DMatrix::identity(3, 3)).amax() < 1e-12);
        let id = induced_symmetry(&p, &g, &AutGroup::identity(8)).unwrap();
        assert!((id.t - DMatrix::identity(3, 3)).amax() < 1e-12);
        let mut swap = AutGroup::identity(8);
        swap.swap(0, 3);
        assert_eq!(induced_symmetry(&p, &g, &swap), Err(SymmetryError::NotAnAutomorphism));
    }

    #[test]
    fn pentagon_rotation() {
        let (g, p) = phi("cycle", &[5], 2);
        let rot: Vec<usize> = (0..5).map(|i| (i + 1) % 5).collect();
        let r = induced_symmetry(&p, &g, &rot).unwrap();
        assert!((r.t.trace() - 2.0 * (72f64).to_radians().cos()).abs() < 1e-12);
        assert!((r.t.determinant() - 1.0).abs() < 1e-12);
        assert!(r.equivariance_gap < 1e-12);
    }

    #[test]
    fn cube_group_is_faithful() {
        let g = generate("hypercube", &[3]).unwrap();
        let cert = is_spectral_graph(&g, 2, 1e-8).unwrap();
        let r = realize_group(&g, 2, RealizeMode::Isomorphism, Some(&cert), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!((r.group_order, r.distinct_images, r.checked), (48, 48, 48));
        assert!(r.injective && !r.sampled);
        assert!(r.homomorphism_gap < 1e-10 && r.equivariance_gap < 1e-10 && r.orthogonality_gap < 1e-10);
        assert_eq!(
            realize_group(&g, 2, RealizeMode::Isomorphism, None, DEFAULT_ENUMERATION_CAP).unwrap_err(),
            SymmetryError::MissingCertificate(2)
        );
    }

    #[test]
    fn perron_space_collapses_the_group() {
        let g = generate("complete", &[4]).unwrap();
        let r = realize_group(&g, 1, RealizeMode::Homomorphism, None, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!((r.group_order, r.distinct_images), (24, 1));
        assert!(!r.injective);
    }

    #[test]
    fn petersen_homomorphism_and_sampling() {
        let g = generate("petersen", &[]).unwrap();
        let r = realize_group(&g, 2, RealizeMode::Homomorphism, None, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(r.distinct_images, 120);
        assert!(r.injective && r.homomorphism_gap < 1e-10);
        let sampled = realize_group(&g, 2, RealizeMode::Homomorphism, None, 50).unwrap();
        assert!(sampled.sampled && sampled.injective && sampled.checked == SAMPLED_WORDS);
    }

    #[test]
    fn congruences() {
        let cube = DMatrix::from_fn(8, 3, |i, k| if i >> k & 1 == 1 { -1.0 } else { 1.0 });
        let rot = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 2.0);
        let rm = DMatrix::from_fn(3, 3, |r, c| rot[(r, c)]);
        let turned = &cube * rm.transpose() * 5.0;
        let id: Vec<usize> = (0..8).collect();
        let c = congruence_check(&cube, &turned, &id).unwrap();
        assert!(c.congruent && c.residual < 1e-10);

        let cuboid = DMatrix::from_fn(8, 3, |i, k| cube[(i, k)] * if k == 2 { 2.0 } else { 1.0 });
        assert!(!congruence_check(&cube, &cuboid, &id).unwrap().congruent);
        assert_eq!(congruence_check(&cube, &cube.rows(0, 4).into_owned(), &id), Err(SymmetryError::VertexCountMismatch(8, 4)));
        assert_eq!(congruence_check(&cube, &cube, &[0; 8]), Err(SymmetryError::BadMatching));
    }
}
