//! The Izmestiev matrix `X = -Hess vol(P°(c))` at `c = 1`, its structural
//! audit, and the constant-entries criterion for θ₂-spectrality.
//!
//! Both schemes work on a normalized copy of the polytope: vertex barycenter
//! at the origin, circumradius 1. All audit quantities are relative to the
//! Frobenius norm of `X`, so verdicts do not depend on the scale of the input.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{is_spectral_polytope, Certificate, CertificateKind, CertifyError, DEFAULT_BALANCE_TOL};
use crate::geometry::{convex_hull, polar_dual, GeometryError, OriginPolicy, PointConfiguration, Polytope};
use crate::graphs::Graph;
use crate::spectra::{spectrum, SpectrumError, DEFAULT_GROUPING_TOL};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_AUDIT_TOL: f64 = 1e-4;
/// Relative spread allowed for "constant" diagonal and edge entries.
pub const DEFAULT_CRITERION_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IzmestievError {
    #[error("polytope is not full-dimensional (dimension {dim} in R^{ambient})")]
    NotFullDimensional { dim: usize, ambient: usize },
    #[error("offset c[{index}] = {value} is outside (0.5, 1.5)")]
    OffsetOutOfRange { index: usize, value: f64 },
    #[error("adjacent vertices {0} and {1} are parallel as vectors")]
    ParallelVertices(usize, usize),
    #[error("no facet of the dual corresponds to vertex {0}")]
    MissingDualFacet(usize),
    #[error("matrix is {x}x{x} but the graph has {n} vertices")]
    SizeMismatch { x: usize, n: usize },
    #[error("volume evaluation failed: {0}")]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum Scheme {
    FiniteDifference { h: f64 },
    RidgeFormula,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖XΨ‖_F / (‖X‖_F ‖Ψ‖_F)`.
    pub kernel_residual: f64,
    /// Largest `|X_ij| / ‖X‖_F` over non-adjacent pairs.
    pub offgraph_max: f64,
    /// `max |X_ij - X_ji|`.
    pub symmetry_gap: f64,
}

/// A polytope translated and scaled to barycenter 0 and circumradius 1.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub polytope: Polytope,
    /// Vertex barycenter of the input.
    pub shift: DVector<f64>,
    /// Circumradius of the centered input.
    pub scale: f64,
}

pub fn normalize(p: &Polytope) -> Result<Normalized, IzmestievError> {
    if !p.is_full_dimensional() {
        return Err(IzmestievError::NotFullDimensional { dim: p.dim, ambient: p.ambient });
    }
    let mut psi = p.arrangement();
    let shift: DVector<f64> = psi.row_mean().transpose();
    for mut r in psi.row_iter_mut() {
        r -= shift.transpose();
    }
    let scale = psi.row_iter().map(|r| r.norm()).fold(0.0, f64::max);
    psi /= scale;
    let polytope = convex_hull(&PointConfiguration::new(psi, OriginPolicy::AsGiven)?, p.tol_relative)?;
    Ok(Normalized { polytope, shift, scale })
}

#[derive(Clone, Debug)]
pub struct IzmestievMatrix {
    pub x: DMatrix<f64>,
    pub scheme: Scheme,
    pub step: Option<f64>,
    pub residuals: Residuals,
    /// Arrangement matrix of the normalized polytope `X` belongs to.
    pub psi: DMatrix<f64>,
    /// Circumradius of the centered input; `X` of the input is `x / scale^d`.
    pub scale: f64,
    pub edges: Vec<(usize, usize)>,
    /// Largest `‖X_ii v_i + Σ X_ij v_j‖` left by the diagonal fit (ridge scheme).
    pub diagonal_residual: Option<f64>,
    pub notes: Vec<String>,
}

impl IzmestievMatrix {
    fn assemble(
        x: DMatrix<f64>,
        scheme: Scheme,
        step: Option<f64>,
        norm: &Normalized,
        diagonal_residual: Option<f64>,
    ) -> Self {
        let p = &norm.polytope;
        let psi = p.arrangement();
        let fro = x.norm().max(f64::MIN_POSITIVE);
        let n = x.nrows();
        let mut offgraph_max = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                if !p.has_edge(i, j) {
                    offgraph_max = offgraph_max.max(x[(i, j)].abs() / fro);
                }
            }
        }
        let residuals = Residuals {
            kernel_residual: (&x * &psi).norm() / (fro * psi.norm()),
            offgraph_max,
            symmetry_gap: (&x - x.transpose()).amax(),
        };
        let mut notes = Vec::new();
        if p.dim == 2 && scheme == Scheme::RidgeFormula {
            notes.push("dimension 2: ridges are points and carry counting measure 1".into());
        }
        IzmestievMatrix {
            x,
            scheme,
            step,
            residuals,
            psi,
            scale: norm.scale,
            edges: p.edges.clone(),
            diagonal_residual,
            notes,
        }
    }

    /// `X` for the input polytope's own scale (exact when it was centered).
    pub fn unnormalized(&self) -> DMatrix<f64> {
        &self.x / self.scale.powi(self.psi.ncols() as i32)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i.min(j), i.max(j))).is_ok()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in self.x.row_iter() {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:.15e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// `vol(P°(c))` for `c` near the all-ones vector.
pub fn dual_volume(p: &Polytope, c: &[f64]) -> Result<f64, IzmestievError> {
    if let Some(index) = c.iter().position(|&v| !(v > 0.5 && v < 1.5)) {
        return Err(IzmestievError::OffsetOutOfRange { index, value: c[index] });
    }
    Ok(polar_dual(p, Some(c))?.volume()?)
}

/// Central second differences of the dual volume.
pub fn izmestiev_fd(p: &Polytope, h: f64) -> Result<IzmestievMatrix, IzmestievError> {
    let norm = normalize(p)?;
    let q = &norm.polytope;
    let n = q.vertex_count();
    let vol = |moves: &[(usize, f64)]| {
        let mut c = vec![1.0; n];
        for &(i, s) in moves {
            c[i] += s * h;
        }
        dual_volume(q, &c)
    };
    let v0 = vol(&[])?;
    let diag: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| Ok(-(vol(&[(i, 1.0)])? - 2.0 * v0 + vol(&[(i, -1.0)])?) / (h * h)))
        .collect::<Result<_, IzmestievError>>()?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let off: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let pp = vol(&[(i, 1.0), (j, 1.0)])?;
            let pm = vol(&[(i, 1.0), (j, -1.0)])?;
            let mp = vol(&[(i, -1.0), (j, 1.0)])?;
            let mm = vol(&[(i, -1.0), (j, -1.0)])?;
            Ok(-(pp - pm - mp + mm) / (4.0 * h * h))
        })
        .collect::<Result<_, IzmestievError>>()?;
    let mut x = DMatrix::from_diagonal(&DVector::from_vec(diag));
    for (&(i, j), &v) in pairs.iter().zip(&off) {
        x[(i, j)] = v;
        x[(j, i)] = v;
    }
    let x = (&x + x.transpose()) / 2.0;
    Ok(IzmestievMatrix::assemble(x, Scheme::FiniteDifference { h }, Some(h), &norm, None))
}

/// Off-diagonal entries from ridge volumes of the dual, diagonal from
/// `XΨ = 0` by least squares.
pub fn izmestiev_ridge(p: &Polytope) -> Result<IzmestievMatrix, IzmestievError> {
    let norm = normalize(p)?;
    let q = &norm.polytope;
    let n = q.vertex_count();
    let dual = polar_dual(q, None)?;
    let facet_of: Vec<usize> = (0..n)
        .map(|i| {
            let v = q.vertex(i);
            let f = dual.facet_towards(&v);
            if dual.facets[f].normal.dot(&v) / v.norm() > 1.0 - 1e-9 {
                Ok(f)
            } else {
                Err(IzmestievError::MissingDualFacet(i))
            }
        })
        .collect::<Result<_, _>>()?;
    let mut x = DMatrix::zeros(n, n);
    for &(i, j) in &q.edges {
        let (vi, vj) = (q.vertex(i), q.vertex(j));
        let cos = vi.dot(&vj) / (vi.norm() * vj.norm());
        let sin = (1.0 - cos * cos).max(0.0).sqrt();
        if sin < 1e-12 {
            return Err(IzmestievError::ParallelVertices(i, j));
        }
        let ridge = dual.ridge_volume(facet_of[i], facet_of[j])?;
        let value = -ridge / (vi.norm() * vj.norm() * sin);
        x[(i, j)] = value;
        x[(j, i)] = value;
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        let vi = q.vertex(i);
        let pull = (0..n).filter(|&j| j != i).fold(DVector::zeros(q.ambient), |acc, j| acc + q.vertex(j) * x[(i, j)]);
        let xii = -vi.dot(&pull) / vi.norm_squared();
        x[(i, i)] = xii;
        worst = worst.max((vi * xii + pull).norm());
    }
    Ok(IzmestievMatrix::assemble(x, Scheme::RidgeFormula, None, &norm, Some(worst)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditItem {
    pub pass: bool,
    /// Positive when passing: distance of the deciding quantity from failure.
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub tol: f64,
    pub properties: BTreeMap<String, AuditItem>,
}

impl AuditReport {
    pub fn all_pass(&self) -> bool {
        self.properties.values().all(|i| i.pass)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.properties.iter().filter(|(_, i)| !i.pass).map(|(k, _)| k.as_str()).collect()
    }
}

/// Checks the five structural properties of `X` against the skeleton of `p`
/// (hull vertex order): negative on edges, zero off edges, `XΨ = 0`, exactly
/// one negative eigenvalue, kernel of dimension `d`.
pub fn audit(x: &IzmestievMatrix, p: &Polytope, tol: f64) -> AuditReport {
    let m = &x.x;
    let n = m.nrows();
    let fro = m.norm().max(f64::MIN_POSITIVE);
    let d = x.psi.ncols();
    let mut props = BTreeMap::new();

    let mut edge_worst = (f64::INFINITY, None);
    let mut off_worst = (0.0f64, None);
    for i in 0..n {
        for j in i + 1..n {
            let v = m[(i, j)] / fro;
            if p.has_edge(i, j) {
                if -v < edge_worst.0 {
                    edge_worst = (-v, Some((i, j)));
                }
            } else if v.abs() > off_worst.0 {
                off_worst = (v.abs(), Some((i, j)));
            }
        }
    }
    let pair = |w: Option<(usize, usize)>| w.map(|(i, j)| format!("pair ({}, {})", i + 1, j + 1));
    props.insert(
        "i_negative_on_edges".into(),
        AuditItem { pass: edge_worst.0 > 0.0, margin: edge_worst.0, detail: pair(edge_worst.1) },
    );
    props.insert(
        "ii_zero_off_edges".into(),
        AuditItem { pass: off_worst.0 <= tol, margin: tol - off_worst.0, detail: pair(off_worst.1) },
    );
    let kernel = (m * &x.psi).norm() / (fro * x.psi.norm());
    props.insert(
        "iii_kernel_contains_arrangement".into(),
        AuditItem { pass: kernel <= tol, margin: tol - kernel, detail: Some(format!("relative residual {kernel:.3e}")) },
    );

    let sym = (m + m.transpose()) / 2.0;
    let mut eig: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let cut = tol * fro;
    let negatives = eig.iter().filter(|&&l| l < -cut).count();
    let zeros = eig.iter().filter(|&&l| l.abs() <= cut).count();
    let second = eig.get(1).copied().unwrap_or(0.0);
    props.insert(
        "iv_one_simple_negative_eigenvalue".into(),
        AuditItem {
            pass: negatives == 1,
            margin: (-eig[0] - cut).min(second + cut) / fro,
            detail: Some(format!("{negatives} negative eigenvalues")),
        },
    );
    // distance of the d-th smallest |λ| below the cut and of the next one above it
    let mut mags: Vec<f64> = eig.iter().map(|l| l.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let inside = mags.get(d.wrapping_sub(1)).copied().unwrap_or(0.0);
    let outside = mags.get(d).copied().unwrap_or(f64::INFINITY);
    props.insert(
        "v_kernel_dimension".into(),
        AuditItem {
            pass: zeros == d,
            margin: (cut - inside).min(outside - cut) / fro,
            detail: Some(format!("kernel dimension {zeros}, expected {d}")),
        },
    );
    AuditReport { tol, properties: props }
}

/// Sufficient condition for θ₂-spectrality: constant diagonal and constant
/// edge entries. `θ = α/|β|` for diagonal value `α` and edge value `β < 0`,
/// since `X = αI + βA` and `XΨ = 0` give `AΨ = -(α/β)Ψ`.
pub fn theta2_criterion(x: &IzmestievMatrix, g: &Graph, tol: f64) -> Result<Certificate, IzmestievError> {
    let n = x.n();
    if g.n() != n {
        return Err(IzmestievError::SizeMismatch { x: n, n: g.n() });
    }
    let m = &x.x;
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let spread = |vals: &[f64]| {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if vals.is_empty() { 0.0 } else { (hi - lo) / scale }
    };
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let edge: Vec<f64> = g.edges().map(|(i, j)| m[(i, j)]).collect();
    let (sd, se) = (spread(&diag), spread(&edge));
    let alpha = diag.iter().sum::<f64>() / n as f64;
    let beta = if edge.is_empty() { 0.0 } else { edge.iter().sum::<f64>() / edge.len() as f64 };

    let mut cert = Certificate {
        kind: CertificateKind::Inconclusive,
        theta: None,
        k: None,
        residuals: BTreeMap::from([
            ("diagonal_spread".to_string(), sd),
            ("edge_spread".to_string(), se),
            ("alpha".to_string(), alpha),
            ("beta".to_string(), beta),
        ]),
        thresholds: BTreeMap::new(),
        witness: None,
        reasons: Vec::new(),
    };
    if sd > tol || se > tol || beta >= 0.0 {
        if sd > tol {
            cert.reasons.push(format!("criterion_inconclusive: diagonal spread {sd:.3e} exceeds {tol:.1e}"));
        }
        if se > tol {
            cert.reasons.push(format!("criterion_inconclusive: edge spread {se:.3e} exceeds {tol:.1e}"));
        }
        if beta >= 0.0 {
            cert.reasons.push("criterion_inconclusive: edge entries are not negative".into());
        }
        return Ok(cert);
    }
    let theta = alpha / -beta;
    cert.theta = Some(theta);
    let s = spectrum(g, DEFAULT_GROUPING_TOL)?;
    cert.k = s.index_of(theta);
    let hull = convex_hull(&PointConfiguration::new(x.psi.clone(), OriginPolicy::AsGiven)?, crate::geometry::DEFAULT_HULL_TOL)?;
    let check = is_spectral_polytope(&hull, DEFAULT_BALANCE_TOL)?;
    let gap = check.theta.map_or(f64::INFINITY, |t| (t - theta).abs());
    cert.residuals.insert("certify_theta_gap".into(), gap);
    let confirmed = check.kind == CertificateKind::SpectralPolytope && gap <= 1e-6 && cert.k == Some(2);
    if confirmed {
        cert.kind = CertificateKind::SpectralPolytope;
        cert.thresholds = BTreeMap::from([
            ("diagonal_spread".to_string(), tol),
            ("edge_spread".to_string(), tol),
            ("certify_theta_gap".to_string(), 1e-6),
        ]);
    } else {
        cert.reasons.push(format!(
            "cross_check_failed: certify reports {:?} with theta {:?}, criterion gives {theta:.9} at k = {:?}",
            check.kind, check.theta, cert.k
        ));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{skeleton_graph, DEFAULT_HULL_TOL};

    fn hull(rows: Vec<Vec<f64>>) -> Polytope {
        convex_hull(&PointConfiguration::from_rows(&rows, OriginPolicy::AsGiven).unwrap(), DEFAULT_HULL_TOL).unwrap()
    }

    fn cube() -> Polytope {
        hull((0..8).map(|m: usize| (0..3).map(|k| if m >> k & 1 == 1 { -1.0 } else { 1.0 }).collect()).collect())
    }

    fn square() -> Polytope {
        hull(vec![vec![1.0, 1.0], vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0]])
    }

    #[test]
    fn dual_volumes() {
        assert!((dual_volume(&cube(), &[1.0; 8]).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!((dual_volume(&square(), &[1.0; 4]).unwrap() - 2.0).abs() < 1e-12);
        let mut c = [1.0; 8];
        c[0] = 1.001;
        assert!(dual_volume(&cube(), &c).unwrap() > 4.0 / 3.0);
        c[0] = 1.6;
        assert!(matches!(dual_volume(&cube(), &c), Err(IzmestievError::OffsetOutOfRange { index: 0, .. })));
    }

    #[test]
    fn cube_ridge_entries_are_one_half() {
        let x = izmestiev_ridge(&cube()).unwrap();
        let raw = x.unnormalized();
        let p = cube();
        for i in 0..8 {
            assert!((raw[(i, i)] - 0.5).abs() < 1e-12);
            for j in 0..8 {
                if i != j {
                    let expected = if p.has_edge(i, j) { -0.5 } else { 0.0 };
                    assert!((raw[(i, j)] - expected).abs() < 1e-12, "{i} {j}");
                }
            }
        }
        assert!(x.residuals.kernel_residual < 1e-14);
    }

    #[test]
    fn square_fd_matches_closed_form() {
        // P°(c) of the square is a quadrilateral; its area is
        // (c1+c3)(c2+c4)/2 in the rotated frame scaled by the normalization.
        let x = izmestiev_fd(&square(), DEFAULT_STEP).unwrap();
        let raw = x.unnormalized();
        let p = square();
        for i in 0..4 {
            assert!(raw[(i, i)].abs() < 1e-6);
            for j in 0..4 {
                if i != j {
                    let expected = if p.has_edge(i, j) { -0.5 } else { 0.0 };
                    assert!((raw[(i, j)] - expected).abs() < 1e-6, "{i} {j} {}", raw[(i, j)]);
                }
            }
        }
        assert!(audit(&x, &p, DEFAULT_AUDIT_TOL).all_pass());
    }

    #[test]
    fn cube_fd_audit_and_criterion() {
        let p = cube();
        let x = izmestiev_fd(&p, DEFAULT_STEP).unwrap();
        let report = audit(&x, &p, DEFAULT_AUDIT_TOL);
        assert!(report.all_pass(), "{report:?}");
        let ridge = izmestiev_ridge(&p).unwrap();
        let diff = (&x.x - &ridge.x).amax() / ridge.x.amax();
        assert!(diff < 1e-3, "{diff}");
        let cert = theta2_criterion(&ridge, &skeleton_graph(&p).graph, DEFAULT_CRITERION_TOL).unwrap();
        assert_eq!(cert.kind, CertificateKind::SpectralPolytope);
        assert!((cert.theta.unwrap() - 1.0).abs() < 1e-9);
        assert!(cert.self_consistent());
    }

    #[test]
    fn injected_fault_is_named() {
        let p = cube();
        let mut x = izmestiev_ridge(&p).unwrap();
        let (i, j) = (0..8).flat_map(|i| (0..8).map(move |j| (i, j))).find(|&(i, j)| i < j && !p.has_edge(i, j)).unwrap();
        x.x[(i, j)] = 0.1 * x.x.norm();
        x.x[(j, i)] = 0.1 * x.x.norm();
        let r = audit(&x, &p, DEFAULT_AUDIT_TOL);
        let item = &r.properties["ii_zero_off_edges"];
        assert!(!item.pass);
        assert_eq!(item.detail.as_deref(), Some(format!("pair ({}, {})", i + 1, j + 1).as_str()));
    }

    #[test]
    fn prism_edges_differ() {
        let s = 3f64.sqrt() / 2.0;
        let tri = [(1.0, 0.0), (-0.5, s), (-0.5, -s)];
        let rows: Vec<Vec<f64>> = [-0.5, 0.5].iter().flat_map(|&z| tri.iter().map(move |&(a, b)| vec![a, b, z])).collect();
        let p = hull(rows);
        let x = izmestiev_fd(&p, DEFAULT_STEP).unwrap();
        assert!(audit(&x, &p, DEFAULT_AUDIT_TOL).all_pass());
        assert!((x.x[(0, 1)] - x.x[(0, 3)]).abs() > 1e-3);
        let g = skeleton_graph(&p).graph;
        let cert = theta2_criterion(&izmestiev_ridge(&p).unwrap(), &g, DEFAULT_CRITERION_TOL).unwrap();
        assert_eq!(cert.kind, CertificateKind::Inconclusive);
    }

    #[test]
    fn pentagon_edges_are_equal() {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 5.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let p = hull(rows);
        let x = izmestiev_ridge(&p).unwrap();
        assert!(!x.notes.is_empty());
        let e: Vec<f64> = p.edges.iter().map(|&(i, j)| x.x[(i, j)]).collect();
        assert!(e.iter().all(|v| (v - e[0]).abs() < 1e-12 && *v < 0.0));
        let fd = izmestiev_fd(&p, DEFAULT_STEP).unwrap();
        assert!((&fd.x - &x.x).amax() / x.x.amax() < 1e-3);
    }

    #[test]
    fn criterion_is_scale_invariant() {
        let rows: Vec<Vec<f64>> = (0..8).map(|m: usize| (0..3).map(|k| if m >> k & 1 == 1 { -7.0 } else { 7.0 }).collect()).collect();
        let p = hull(rows);
        let cert = theta2_criterion(&izmestiev_ridge(&p).unwrap(), &skeleton_graph(&p).graph, DEFAULT_CRITERION_TOL).unwrap();
        assert_eq!(cert.kind, CertificateKind::SpectralPolytope);
    }
}
