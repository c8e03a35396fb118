//! Balanced and spectral certificates, eigenspace reconstruction and
//! linear-transition recovery.
//!
//! Certificates serialize to
//! `{kind, theta, k, residuals{..}, thresholds{..}, witness, reasons[]}`.
//! Every threshold a verdict depends on is stored next to the residual it
//! was compared with, so a certificate can be re-checked on its own.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    convex_hull, skeleton_graph, GeometryError, InputStatus, OriginPolicy, PointConfiguration, Polytope, Skeleton,
    DEFAULT_HULL_TOL,
};
use crate::graphs::Graph;
use crate::spectra::{eigenmatrix, spectrum, SpectrumError, DEFAULT_GROUPING_TOL};

/// Relative residual below which `AΨ = θΨ` is accepted.
pub const DEFAULT_BALANCE_TOL: f64 = 1e-8;
/// Largest principal angle (as a sine) for two spans to count as equal.
pub const DEFAULT_SPAN_TOL: f64 = 1e-7;
/// Relative tie tolerance when reading off the largest components.
pub const ARGMAX_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("configuration has {rows} rows but the graph has {n} vertices")]
    RowMismatch { rows: usize, n: usize },
    #[error("matrices have shapes {a:?} and {b:?}")]
    ShapeMismatch { a: (usize, usize), b: (usize, usize) },
    #[error("matrix has rank {rank} < {cols}")]
    RankDeficient { rank: usize, cols: usize },
    #[error("columns are not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("polytope is degenerate: affine dimension {dim}, {vertices} vertices")]
    DegeneratePolytope { dim: usize, vertices: usize },
    #[error("hull is degenerate (affine dimension {})", .0.residuals.get("affine_dim").copied().unwrap_or(0.0))]
    Degenerate(Box<Certificate>),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Balanced,
    SpectralPolytope,
    SpectralGraph,
    NotSpectral,
    Degenerate,
    /// A sufficient criterion did not apply; nothing is claimed.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Witness {
    /// 1-based image of each vertex.
    IndexMap(Vec<usize>),
    /// 1-based vertex pair.
    Pair(usize, usize),
    /// 1-based vertex.
    Vertex(usize),
    /// Row-major matrix.
    Transition(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub theta: Option<f64>,
    pub k: Option<usize>,
    pub residuals: BTreeMap<String, f64>,
    pub thresholds: BTreeMap<String, f64>,
    pub witness: Option<Witness>,
    pub reasons: Vec<String>,
}

impl Certificate {
    fn new(kind: CertificateKind) -> Self {
        Certificate {
            kind,
            theta: None,
            k: None,
            residuals: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            witness: None,
            reasons: Vec::new(),
        }
    }

    fn residual(mut self, name: &str, value: f64) -> Self {
        self.residuals.insert(name.to_string(), value);
        self
    }

    fn threshold(mut self, name: &str, value: f64) -> Self {
        self.thresholds.insert(name.to_string(), value);
        self
    }

    fn reason(mut self, r: impl Into<String>) -> Self {
        self.reasons.push(r.into());
        self
    }

    pub fn is_positive(&self) -> bool {
        matches!(
            self.kind,
            CertificateKind::Balanced | CertificateKind::SpectralPolytope | CertificateKind::SpectralGraph
        )
    }

    /// Re-checks every residual that has a threshold of the same name.
    pub fn self_consistent(&self) -> bool {
        self.thresholds
            .iter()
            .all(|(name, t)| self.residuals.get(name).is_some_and(|r| r <= t))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

/// Least-squares `θ` for `AΨ ≈ θΨ` and the relative residual.
fn balance(a: &DMatrix<f64>, psi: &DMatrix<f64>) -> (f64, f64) {
    let a_psi = a * psi;
    let norm2 = psi.norm_squared();
    if norm2 == 0.0 {
        return (0.0, 0.0);
    }
    let theta = a_psi.dot(psi) / norm2;
    let residual = (a_psi - psi * theta).norm() / norm2.sqrt();
    (theta, residual)
}

/// Is `Ψ` (one row per vertex of `g`) balanced for some `θ`?
pub fn is_balanced(pc: &PointConfiguration, g: &Graph, tol: f64) -> Result<Certificate, CertifyError> {
    if pc.len() != g.n() {
        return Err(CertifyError::RowMismatch { rows: pc.len(), n: g.n() });
    }
    let (theta, residual) = balance(&g.adjacency_matrix(), pc.matrix());
    let s = spectrum(g, DEFAULT_GROUPING_TOL)?;
    let mut cert = if residual <= tol {
        let mut c = Certificate::new(CertificateKind::Balanced).threshold("balance_residual", tol);
        c.k = s.index_of(theta);
        c
    } else {
        Certificate::new(CertificateKind::NotSpectral).reason(format!(
            "not_balanced: relative residual {residual:.3e} exceeds {tol:.1e}"
        ))
    };
    cert.theta = Some(theta);
    Ok(cert.residual("balance_residual", residual))
}

/// Balanced with eigenvalue `θ` of multiplicity exactly `dim P` in the
/// spectrum of the edge graph.
pub fn is_spectral_polytope(p: &Polytope, tol: f64) -> Result<Certificate, CertifyError> {
    if !p.is_full_dimensional() || p.vertex_count() < 2 {
        return Err(CertifyError::DegeneratePolytope { dim: p.dim, vertices: p.vertex_count() });
    }
    let skel = skeleton_graph(p);
    let psi = p.arrangement();
    let (theta, residual) = balance(&skel.graph.adjacency_matrix(), &psi);
    let s = spectrum(&skel.graph, DEFAULT_GROUPING_TOL)?;
    let k = s.index_of(theta);
    let multiplicity = k.map_or(0, |k| s.groups[k - 1].multiplicity);

    let mut cert = if residual > tol {
        Certificate::new(CertificateKind::NotSpectral)
            .reason(format!("not_balanced: relative residual {residual:.3e} exceeds {tol:.1e}"))
    } else if multiplicity != p.dim {
        Certificate::new(CertificateKind::NotSpectral).reason(format!(
            "multiplicity_mismatch: theta = {theta:.6} has multiplicity {multiplicity}, dimension is {}",
            p.dim
        ))
    } else {
        Certificate::new(CertificateKind::SpectralPolytope).threshold("balance_residual", tol)
    };
    cert.theta = Some(theta);
    cert.k = k;
    Ok(cert
        .residual("balance_residual", residual)
        .residual("multiplicity", multiplicity as f64)
        .residual("dim", p.dim as f64))
}

/// Largest components of `u` up to a relative tie tolerance.
fn argmax(u: &DVector<f64>) -> Vec<usize> {
    let top = u.max();
    let scale = u.amax().max(f64::MIN_POSITIVE);
    (0..u.len()).filter(|&k| top - u[k] <= ARGMAX_TIE_TOL * scale).collect()
}

/// Graph-side check: every vertex is the unique argmax of some eigenvector
/// and `ij` is an edge iff `{i, j}` is the argmax of some eigenvector.
/// Candidate vectors are `Φx` with `x` summed from the facet normals at the
/// face in question. Returns the first violation, if any.
fn argmax_route(g: &Graph, phi: &DMatrix<f64>, hull: &Polytope) -> Option<(String, Witness)> {
    let n = g.n();
    let normal_sum = |facets: &[usize]| {
        facets.iter().fold(DVector::zeros(hull.ambient), |acc, &f| acc + &hull.facets[f].normal)
    };
    let facets_of: Vec<Vec<usize>> = (0..n)
        .map(|i| hull.hull_index(i).map_or_else(Vec::new, |v| hull.facets_of_vertex(v)))
        .collect();
    for (i, facets) in facets_of.iter().enumerate() {
        if facets.is_empty() || argmax(&(phi * normal_sum(facets))) != [i] {
            return Some(("argmax_vertex: no eigenvector peaks only at this vertex".into(), Witness::Vertex(i + 1)));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let common: Vec<usize> = facets_of[i].iter().copied().filter(|f| facets_of[j].contains(f)).collect();
            let peaks = !common.is_empty() && argmax(&(phi * normal_sum(&common))) == [i, j];
            if peaks != g.has_edge(i, j) {
                let what = if peaks { "non-edge peaks as a pair" } else { "edge never peaks as a pair" };
                return Some((format!("argmax_edge: {what}"), Witness::Pair(i + 1, j + 1)));
            }
        }
    }
    None
}

fn duplicate_rows(p: &Polytope) -> Option<(usize, usize)> {
    p.vertex_of_input.iter().enumerate().find_map(|(i, s)| match s {
        InputStatus::DuplicateOf(j) => Some((*j, i)),
        _ => None,
    })
}

/// Is `g` spectral for its `k`-th eigenvalue (1-based, descending)?
pub fn is_spectral_graph(g: &Graph, k: usize, tol: f64) -> Result<Certificate, CertifyError> {
    if !g.is_connected() {
        return Err(CertifyError::Disconnected);
    }
    let s = spectrum(g, DEFAULT_GROUPING_TOL)?;
    let em = eigenmatrix(&s, k)?;
    let phi = &em.entries;
    let d = em.dim();
    let n = g.n();
    let (_, eig_residual) = balance(&g.adjacency_matrix(), phi);
    let hull = convex_hull(&PointConfiguration::new(phi.clone(), OriginPolicy::AsGiven)?, DEFAULT_HULL_TOL)?;

    let finish = |mut c: Certificate| {
        c.theta = Some(em.theta);
        c.k = Some(k);
        c.residual("eigen_residual", eig_residual)
            .residual("multiplicity", d as f64)
            .residual("affine_dim", hull.dim as f64)
            .residual("hull_vertices", hull.vertex_count() as f64)
    };

    if hull.dim < 2 {
        let mut c = Certificate::new(CertificateKind::Degenerate)
            .reason(format!("dimension_too_low: eigenpolytope has affine dimension {}", hull.dim));
        if let Some((a, b)) = duplicate_rows(&hull) {
            c.witness = Some(Witness::Pair(a + 1, b + 1));
        }
        return Ok(finish(c));
    }
    if let Some((a, b)) = duplicate_rows(&hull) {
        let mut c = Certificate::new(CertificateKind::Degenerate).reason("duplicate_rows: two vertices share an image");
        c.witness = Some(Witness::Pair(a + 1, b + 1));
        return Ok(finish(c));
    }

    let mut reasons = Vec::new();
    let min_degree = g.min_degree();
    if d == 2 && g.regular_degree() != Some(2) {
        reasons.push(format!("degree_obstruction: a polygon needs degree 2, graph has minimum degree {min_degree}"));
    } else if min_degree < d {
        reasons.push(format!("degree_obstruction: minimum degree {min_degree} is below dimension {d}"));
    }

    let mut witness = None;
    if let Some(i) = (0..n).find(|&i| hull.hull_index(i).is_none()) {
        reasons.push("not_a_vertex: a row lies inside its eigenpolytope".into());
        witness = Some(Witness::Vertex(i + 1));
    }
    let hull_edges: BTreeSet<(usize, usize)> = hull
        .edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (hull.vertices[a], hull.vertices[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    let graph_edges: BTreeSet<(usize, usize)> = g.edges().collect();
    let mismatch: Vec<(usize, usize)> = graph_edges.symmetric_difference(&hull_edges).copied().collect();
    if let Some(&(a, b)) = mismatch.first() {
        let what = if graph_edges.contains(&(a, b)) { "graph edge is not a hull edge" } else { "hull edge is not a graph edge" };
        reasons.push(format!("edge_mismatch: {what} ({} pairs differ)", mismatch.len()));
        witness.get_or_insert(Witness::Pair(a + 1, b + 1));
    }
    let hull_verdict = witness.is_none();
    let argmax_violation = if hull.vertex_count() == n { argmax_route(g, phi, &hull) } else { None };
    let argmax_verdict = hull.vertex_count() == n && argmax_violation.is_none();
    let agree = hull_verdict == argmax_verdict;
    if !agree {
        reasons.push("route_disagreement: hull and argmax routes differ".into());
    }
    if let Some((r, _)) = &argmax_violation {
        if hull_verdict {
            reasons.push(r.clone());
        }
    }

    let mut c = if hull_verdict && agree && reasons.is_empty() {
        let mut c = Certificate::new(CertificateKind::SpectralGraph)
            .threshold("eigen_residual", tol)
            .threshold("edge_mismatches", 0.0);
        c.witness = Some(Witness::IndexMap((1..=n).collect()));
        c
    } else {
        let mut c = Certificate::new(CertificateKind::NotSpectral);
        c.witness = witness.or(argmax_violation.map(|(_, w)| w));
        c
    };
    c.reasons = reasons;
    Ok(finish(c)
        .residual("edge_mismatches", mismatch.len() as f64)
        .residual("routes_agree", if agree { 1.0 } else { 0.0 })
        .residual("worst_hull_margin", hull.worst_margin.min(f64::MAX)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    /// `A · t ≈ B`.
    pub t: DMatrix<f64>,
    pub residual: f64,
    /// Sine of the largest principal angle between the column spans.
    pub max_angle: f64,
}

fn orthonormal_range(m: &DMatrix<f64>) -> Result<DMatrix<f64>, CertifyError> {
    let cols = m.ncols();
    let svd = m.clone().svd(true, false);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax.max(f64::MIN_POSITIVE)).count();
    if rank < cols {
        return Err(CertifyError::RankDeficient { rank, cols });
    }
    Ok(svd.u.expect("left singular vectors requested"))
}

/// Invertible `T` with `A·T = B` when `A` and `B` have the same column span.
pub fn linear_transition(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> Result<Option<Transition>, CertifyError> {
    if a.shape() != b.shape() {
        return Err(CertifyError::ShapeMismatch { a: a.shape(), b: b.shape() });
    }
    let qa = orthonormal_range(a)?;
    let qb = orthonormal_range(b)?;
    let off = &qb - &qa * (qa.transpose() * &qb);
    let max_angle = off.singular_values().max();
    if max_angle > tol {
        return Ok(None);
    }
    let t = a.clone().svd(true, true).solve(b, 0.0).expect("both factors computed");
    let residual = (a * &t - b).norm() / b.norm().max(f64::MIN_POSITIVE);
    Ok(Some(Transition { t, residual, max_angle }))
}

/// Hull of the rows of an orthonormal `U` and its edge graph.
pub fn reconstruct_from_subspace(u: &DMatrix<f64>) -> Result<(Polytope, Skeleton), CertifyError> {
    let gram = u.transpose() * u;
    let dev = (gram - DMatrix::identity(u.ncols(), u.ncols())).amax();
    if dev > 1e-8 {
        return Err(CertifyError::NotOrthonormal(dev));
    }
    let p = convex_hull(&PointConfiguration::new(u.clone(), OriginPolicy::AsGiven)?, DEFAULT_HULL_TOL)?;
    if p.dim < 2 {
        let cert = Certificate::new(CertificateKind::Degenerate)
            .residual("affine_dim", p.dim as f64)
            .reason(format!("dimension_too_low: rows span an affine space of dimension {}", p.dim));
        return Err(CertifyError::Degenerate(Box::new(cert)));
    }
    let skel = skeleton_graph(&p);
    Ok((p, skel))
}
