//! Adjacency spectra, eigenvalue grouping and eigenpolytope matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::Graph;

/// Relative tolerance for merging eigenvalues into one group.
pub const DEFAULT_GROUPING_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("empty graph has no spectrum")]
    Empty,
    #[error("symmetric eigensolver did not converge")]
    NoConvergence,
    #[error("eigenvalue index {k} out of range 1..={groups}")]
    IndexOutOfRange { k: usize, groups: usize },
    #[error("graph is not regular")]
    NonRegular,
}

/// One eigenvalue with its multiplicity and an orthonormal eigenspace basis.
#[derive(Clone, Debug)]
pub struct EigenGroup {
    pub theta: f64,
    pub multiplicity: usize,
    /// `n x multiplicity`, orthonormal columns.
    pub basis: DMatrix<f64>,
}

impl EigenGroup {
    /// The nearest integer when `theta` is within `1e-9` of it. Diagnostic
    /// only; grouping never depends on it.
    pub fn snapped(&self) -> Option<i64> {
        let r = self.theta.round();
        ((self.theta - r).abs() <= 1e-9).then_some(r as i64)
    }
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Strictly descending by `theta`.
    pub groups: Vec<EigenGroup>,
    pub tol: f64,
    pub n: usize,
    /// Spectral norm of the decomposed matrix.
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub k: usize,
    pub theta: f64,
    pub multiplicity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integer: Option<i64>,
}

impl Spectrum {
    pub fn table(&self) -> Vec<SpectrumRow> {
        self.groups
            .iter()
            .enumerate()
            .map(|(i, g)| SpectrumRow {
                k: i + 1,
                theta: g.theta,
                multiplicity: g.multiplicity,
                integer: g.snapped(),
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,theta,multiplicity\n");
        for row in self.table() {
            out.push_str(&format!("{},{:.12},{}\n", row.k, row.theta, row.multiplicity));
        }
        out
    }

    /// 1-based index of the group containing `theta`, if any.
    pub fn index_of(&self, theta: f64) -> Option<usize> {
        let slack = self.tol * self.norm.max(1.0);
        self.groups
            .iter()
            .position(|g| (g.theta - theta).abs() <= slack)
            .map(|i| i + 1)
    }

    pub fn group(&self, k: usize) -> Result<&EigenGroup, SpectrumError> {
        if k == 0 || k > self.groups.len() {
            return Err(SpectrumError::IndexOutOfRange { k, groups: self.groups.len() });
        }
        Ok(&self.groups[k - 1])
    }

    pub fn max_multiplicity(&self) -> usize {
        self.groups.iter().map(|g| g.multiplicity).max().unwrap_or(0)
    }
}

pub fn spectrum(g: &Graph, tol: f64) -> Result<Spectrum, SpectrumError> {
    symmetric_spectrum(&g.adjacency_matrix(), tol)
}

/// Grouped eigendecomposition of a symmetric matrix.
pub fn symmetric_spectrum(a: &DMatrix<f64>, tol: f64) -> Result<Spectrum, SpectrumError> {
    let n = a.nrows();
    if n == 0 {
        return Err(SpectrumError::Empty);
    }
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, 1000 * n).ok_or(SpectrumError::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let norm = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let slack = tol * norm.max(1.0);

    let mut runs: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match runs.last_mut() {
            Some(run) if eig.eigenvalues[*run.last().unwrap()] - eig.eigenvalues[i] <= slack => run.push(i),
            _ => runs.push(vec![i]),
        }
    }
    let groups = runs
        .into_iter()
        .map(|run| {
            let theta = run.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / run.len() as f64;
            let raw = DMatrix::from_fn(n, run.len(), |r, c| eig.eigenvectors[(r, run[c])]);
            EigenGroup { theta, multiplicity: run.len(), basis: canonical_basis(&raw) }
        })
        .collect();
    Ok(Spectrum { groups, tol, n, norm })
}

/// Deterministic orthonormal basis of `span(raw)`: pivoted Gram-Schmidt on
/// the columns of the orthogonal projector, then the first significant
/// coordinate of each column is made positive. Depends on the span only
/// (up to rounding), not on the eigensolver's choice of vectors.
pub fn canonical_basis(raw: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m) = raw.shape();
    let q0 = raw.clone().qr().q();
    let proj = &q0 * q0.transpose();
    let mut cols: Vec<nalgebra::DVector<f64>> = (0..n).map(|j| proj.column(j).into_owned()).collect();
    let mut out = DMatrix::zeros(n, m);
    for k in 0..m {
        let best = cols.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let j = cols.iter().position(|c| c.norm() >= best * (1.0 - 1e-9)).unwrap();
        let mut v = cols[j].clone();
        for _ in 0..2 {
            for p in 0..k {
                let e = out.column(p);
                v -= e * e.dot(&v);
            }
        }
        v /= v.norm();
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-9) {
            if *first < 0.0 {
                v = -v;
            }
        }
        for c in cols.iter_mut() {
            let t = v.dot(c);
            *c -= &v * t;
        }
        out.set_column(k, &v);
    }
    out
}

/// Eigenpolytope matrix: the orthonormal basis of one eigenspace as columns.
/// Row `i` is the image of vertex `i` under the eigenpolytope map.
#[derive(Clone, Debug)]
pub struct EigenMatrix {
    pub entries: DMatrix<f64>,
    pub theta: f64,
    /// 1-based position of `theta` in descending order.
    pub k: usize,
    pub source: Option<String>,
}

impl EigenMatrix {
    pub fn dim(&self) -> usize {
        self.entries.ncols()
    }

    pub fn row(&self, i: usize) -> nalgebra::DVector<f64> {
        self.entries.row(i).transpose()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in self.entries.row_iter() {
            let cells: Vec<String> = r.iter().map(|x| format!("{x:.15}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn eigenmatrix(s: &Spectrum, k: usize) -> Result<EigenMatrix, SpectrumError> {
    let g = s.group(k)?;
    Ok(EigenMatrix { entries: g.basis.clone(), theta: g.theta, k, source: None })
}

/// Second smallest Laplacian eigenvalue of a regular graph, `deg - theta_2`.
pub fn laplacian_gap(s: &Spectrum, g: &Graph) -> Result<f64, SpectrumError> {
    let deg = g.regular_degree().ok_or(SpectrumError::NonRegular)?;
    let theta2 = s.groups.get(1).map_or(s.groups[0].theta, |grp| grp.theta);
    Ok(deg as f64 - theta2)
}
