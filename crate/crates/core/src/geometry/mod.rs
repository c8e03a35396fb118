//! Point configurations, convex hulls with face data, polarity and volume.

mod hull;
mod output;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::Graph;

pub use hull::{convex_hull, Facet, InputStatus, Polytope, DEFAULT_HULL_TOL};
pub use output::{to_json, to_off};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point configuration is empty")]
    Empty,
    #[error("points must have at least one coordinate")]
    ZeroDimensional,
    #[error("row {row} has {got} coordinates, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
    #[error("non-finite coordinate in row {0}")]
    NonFinite(usize),
    #[error("polytope is degenerate: affine dimension {dim} in ambient dimension {ambient}")]
    Degenerate { dim: usize, ambient: usize },
    #[error("origin is not strictly interior (facet offset {offset:.3e})")]
    OriginNotInterior { offset: f64 },
    #[error("offset vector has {got} entries, expected {expected}")]
    OffsetLength { got: usize, expected: usize },
    #[error("offset entry {index} is not positive ({value})")]
    NonPositiveOffset { index: usize, value: f64 },
    #[error("facets {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("facet index {0} out of range")]
    NoSuchFacet(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OriginPolicy {
    #[default]
    AsGiven,
    /// Translate so that the mean of the rows is the origin.
    Centered,
}

/// `n` labelled points in `R^d`, one per row.
#[derive(Clone, Debug)]
pub struct PointConfiguration {
    points: DMatrix<f64>,
    pub origin_policy: OriginPolicy,
}

impl PointConfiguration {
    pub fn new(points: DMatrix<f64>, origin_policy: OriginPolicy) -> Result<Self, GeometryError> {
        let (n, d) = points.shape();
        if n == 0 {
            return Err(GeometryError::Empty);
        }
        if d == 0 {
            return Err(GeometryError::ZeroDimensional);
        }
        if let Some(row) = (0..n).find(|&r| points.row(r).iter().any(|x| !x.is_finite())) {
            return Err(GeometryError::NonFinite(row));
        }
        let mut points = points;
        if origin_policy == OriginPolicy::Centered {
            let mean = points.row_mean();
            for mut r in points.row_iter_mut() {
                r -= &mean;
            }
        }
        Ok(PointConfiguration { points, origin_policy })
    }

    pub fn from_rows(rows: &[Vec<f64>], origin_policy: OriginPolicy) -> Result<Self, GeometryError> {
        let d = rows.first().ok_or(GeometryError::Empty)?.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(GeometryError::Ragged { row, got: r.len(), expected: d });
            }
        }
        Self::new(DMatrix::from_fn(rows.len(), d, |r, c| rows[r][c]), origin_policy)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn row(&self, i: usize) -> DVector<f64> {
        self.points.row(i).transpose()
    }
}

fn simplex_volume(pts: &[DVector<f64>], apex: &DVector<f64>) -> f64 {
    let d = apex.len();
    let m = DMatrix::from_fn(d, d, |r, c| pts[c][r] - apex[r]);
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    m.determinant().abs() / fact
}

impl Polytope {
    /// Volume in the ambient space.
    pub fn volume(&self) -> Result<f64, GeometryError> {
        if !self.is_full_dimensional() {
            return Err(GeometryError::Degenerate { dim: self.dim, ambient: self.ambient });
        }
        Ok(self.relative_volume())
    }

    /// `dim`-dimensional volume inside the affine hull. A point has measure 1.
    pub fn relative_volume(&self) -> f64 {
        match self.dim {
            0 => 1.0,
            1 => (self.vertex(0) - self.vertex(1)).norm(),
            _ => {
                let apex = self.local(&self.interior);
                self.simplices
                    .iter()
                    .map(|s| {
                        let pts: Vec<DVector<f64>> = s.iter().map(|&i| self.local(&self.points.row(i).transpose())).collect();
                        simplex_volume(&pts, &apex)
                    })
                    .sum()
            }
        }
    }

    /// Measure of the common face of two facets, inside its own affine hull.
    /// When `dim == 2` the shared face is a point and the measure is 1.
    pub fn ridge_volume(&self, f1: usize, f2: usize) -> Result<f64, GeometryError> {
        let nf = self.facets.len();
        for f in [f1, f2] {
            if f >= nf {
                return Err(GeometryError::NoSuchFacet(f));
            }
        }
        if f1 == f2 || self.dim < 2 {
            return Err(GeometryError::NotAdjacent(f1, f2));
        }
        let common: Vec<usize> = self.facets[f1]
            .vertices
            .iter()
            .copied()
            .filter(|v| self.facets[f2].vertices.binary_search(v).is_ok())
            .collect();
        if common.is_empty() {
            return Err(GeometryError::NotAdjacent(f1, f2));
        }
        let pts = DMatrix::from_fn(common.len(), self.ambient, |r, c| self.points[(self.vertices[common[r]], c)]);
        let ridge = convex_hull(&PointConfiguration::new(pts, OriginPolicy::AsGiven)?, self.tol_relative)?;
        if ridge.dim + 2 != self.dim {
            return Err(GeometryError::NotAdjacent(f1, f2));
        }
        Ok(ridge.relative_volume())
    }

    /// Index of the facet whose outward normal is closest to `direction`.
    pub fn facet_towards(&self, direction: &DVector<f64>) -> usize {
        let u = direction / direction.norm();
        (0..self.facets.len())
            .max_by(|&a, &b| self.facets[a].normal.dot(&u).total_cmp(&self.facets[b].normal.dot(&u)))
            .expect("polytope has facets")
    }
}

/// `P°(c) = {x : <x, v_i> <= c_i}` over the hull vertices `v_i` of `p`.
pub fn polar_dual(p: &Polytope, c: Option<&[f64]>) -> Result<Polytope, GeometryError> {
    if !p.is_full_dimensional() {
        return Err(GeometryError::Degenerate { dim: p.dim, ambient: p.ambient });
    }
    let nv = p.vertex_count();
    let ones = vec![1.0; nv];
    let c = c.unwrap_or(&ones);
    if c.len() != nv {
        return Err(GeometryError::OffsetLength { got: c.len(), expected: nv });
    }
    if let Some(index) = c.iter().position(|&x| x.is_nan() || x <= 0.0) {
        return Err(GeometryError::NonPositiveOffset { index, value: c[index] });
    }
    let worst = p.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
    if worst <= p.tol {
        return Err(GeometryError::OriginNotInterior { offset: worst });
    }
    let scaled = DMatrix::from_fn(nv, p.ambient, |r, col| p.points[(p.vertices[r], col)] / c[r]);
    let q = convex_hull(&PointConfiguration::new(scaled, OriginPolicy::AsGiven)?, p.tol_relative)?;
    let dual = DMatrix::from_fn(q.facets.len(), p.ambient, |r, col| q.facets[r].normal[col] / q.facets[r].offset);
    convex_hull(&PointConfiguration::new(dual, OriginPolicy::AsGiven)?, p.tol_relative)
}

/// The hull's edge graph on hull vertex indices, with input provenance.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub graph: Graph,
    /// Input index of each hull vertex.
    pub input_index: Vec<usize>,
    pub vertex_of_input: Vec<InputStatus>,
}

impl Skeleton {
    /// Edges translated back to input labels.
    pub fn input_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .graph
            .edges()
            .map(|(a, b)| {
                let (x, y) = (self.input_index[a], self.input_index[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        out.sort_unstable();
        out
    }
}

pub fn skeleton_graph(p: &Polytope) -> Skeleton {
    let graph = Graph::new(p.vertex_count(), p.edges.iter().copied()).expect("hull edges are valid");
    Skeleton { graph, input_index: p.vertices.clone(), vertex_of_input: p.vertex_of_input.clone() }
}
