//! Beneath-beyond convex hull in the affine hull of the input.
//!
//! The boundary is maintained as a simplicial complex. A point is beyond a
//! simplex when its signed distance exceeds the tolerance; the horizon is the
//! set of ridges that belong to exactly one visible simplex. Coplanar
//! simplices are merged into true facets at the end. A boundary point is a
//! vertex iff the normals of its facets span the space, and two vertices
//! span an edge iff the normals of their common facets have rank `dim - 1`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{GeometryError, PointConfiguration};

/// Relative coplanarity tolerance, multiplied by the coordinate scale.
pub const DEFAULT_HULL_TOL: f64 = 1e-9;

/// Rank threshold for stacked unit normals.
const NORMAL_RANK_TOL: f64 = 1e-7;

/// What became of one input point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "index", rename_all = "snake_case")]
pub enum InputStatus {
    /// Index into [`Polytope::vertices`].
    Vertex(usize),
    /// Coincides with this earlier input point.
    DuplicateOf(usize),
    /// On the boundary but not a vertex.
    OnFace,
    Interior,
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// Outward unit normal in ambient coordinates.
    pub normal: DVector<f64>,
    pub offset: f64,
    /// Hull vertex indices (positions in [`Polytope::vertices`]), ascending.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Polytope {
    pub ambient: usize,
    /// Affine dimension.
    pub dim: usize,
    /// Input points, one per row.
    pub points: DMatrix<f64>,
    /// Input indices of the hull vertices, ascending.
    pub vertices: Vec<usize>,
    /// Pairs of hull vertex indices, `a < b`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub facets: Vec<Facet>,
    pub vertex_of_input: Vec<InputStatus>,
    /// `dim <= 1`.
    pub degenerate: bool,
    /// Absolute tolerance used by every predicate.
    pub tol: f64,
    pub tol_relative: f64,
    /// Smallest decisive predicate value in units of `tol`.
    pub worst_margin: f64,
    pub warnings: Vec<String>,
    /// Orthonormal basis (columns) of the affine hull's direction space.
    pub basis: DMatrix<f64>,
    pub center: DVector<f64>,
    /// Boundary triangulation, input indices, coned to `interior` for volume.
    pub(crate) simplices: Vec<Vec<usize>>,
    pub interior: DVector<f64>,
}

impl Polytope {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> DVector<f64> {
        self.points.row(self.vertices[i]).transpose()
    }

    /// Vertex coordinates as rows, in hull vertex order.
    pub fn arrangement(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.vertices.len(), self.ambient, |r, c| self.points[(self.vertices[r], c)])
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.ambient
    }

    pub fn local(&self, x: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * (x - &self.center)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// Hull vertex index of an input point, if it survived as a vertex.
    pub fn hull_index(&self, input: usize) -> Option<usize> {
        match self.vertex_of_input[input] {
            InputStatus::Vertex(v) => Some(v),
            _ => None,
        }
    }

    /// Facets containing hull vertex `v`.
    pub fn facets_of_vertex(&self, v: usize) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&f| self.facets[f].vertices.binary_search(&v).is_ok())
            .collect()
    }
}

#[derive(Clone, Debug)]
struct Simplex {
    verts: Vec<usize>,
    normal: DVector<f64>,
    offset: f64,
    alive: bool,
}

/// Unit normal and offset of the best-fit hyperplane through `pts`
/// (at least `dim` points spanning a hyperplane), oriented away from `inside`.
pub(crate) fn fit_hyperplane(pts: &[&DVector<f64>], inside: &DVector<f64>) -> (DVector<f64>, f64) {
    let dim = inside.len();
    let m = pts.len();
    let centroid = pts.iter().fold(DVector::zeros(dim), |acc, p| acc + *p) / m as f64;
    let rows = m.max(dim);
    let mut a = DMatrix::zeros(rows, dim);
    for (r, p) in pts.iter().enumerate() {
        a.set_row(r, &(*p - &centroid).transpose());
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap();
    let mut normal: DVector<f64> = vt.row(k).transpose();
    normal /= normal.norm();
    let mut offset = normal.dot(&centroid);
    if normal.dot(inside) > offset {
        normal = -normal;
        offset = -offset;
    }
    (normal, offset)
}

/// Numerical rank of a set of unit vectors.
pub(crate) fn rank_of(vectors: &[&DVector<f64>], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let dim = vectors[0].len();
    let m = DMatrix::from_fn(vectors.len(), dim, |r, c| vectors[r][c]);
    m.singular_values().iter().filter(|&&s| s > tol).count()
}

pub fn convex_hull(pc: &PointConfiguration, tol_relative: f64) -> Result<Polytope, GeometryError> {
    let points = pc.matrix();
    let (n, ambient) = points.shape();
    if n == 0 {
        return Err(GeometryError::Empty);
    }
    let rows: Vec<DVector<f64>> = (0..n).map(|i| points.row(i).transpose()).collect();
    let scale = rows.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let tol = tol_relative * if scale > 0.0 { scale } else { 1.0 };

    // duplicates
    let mut status = vec![InputStatus::Interior; n];
    let mut unique: Vec<usize> = Vec::new();
    for i in 0..n {
        match unique.iter().find(|&&j| (&rows[i] - &rows[j]).norm() <= tol) {
            Some(&j) => status[i] = InputStatus::DuplicateOf(j),
            None => unique.push(i),
        }
    }

    // affine hull by greedy farthest-point Gram-Schmidt
    let center = unique.iter().fold(DVector::zeros(ambient), |a, &i| a + &rows[i]) / unique.len() as f64;
    let first = *unique
        .iter()
        .max_by(|&&a, &&b| (&rows[a] - &center).norm().total_cmp(&(&rows[b] - &center).norm()))
        .unwrap();
    let mut chosen = vec![first];
    let mut dirs: Vec<DVector<f64>> = Vec::new();
    loop {
        let residual = |i: usize| {
            let mut v = &rows[i] - &rows[first];
            for _ in 0..2 {
                for d in &dirs {
                    v -= d * d.dot(&v);
                }
            }
            v
        };
        let best = unique
            .iter()
            .map(|&i| (i, residual(i).norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, dist)) if dist > tol && dirs.len() < ambient => {
                let v = residual(i);
                dirs.push(&v / v.norm());
                chosen.push(i);
            }
            _ => break,
        }
    }
    let dim = dirs.len();
    let basis = if dim == 0 {
        DMatrix::zeros(ambient, 0)
    } else {
        DMatrix::from_columns(&dirs)
    };
    let to_local = |x: &DVector<f64>| basis.transpose() * (x - &center);

    let mut poly = Polytope {
        ambient,
        dim,
        points: points.clone(),
        vertices: Vec::new(),
        edges: Vec::new(),
        facets: Vec::new(),
        vertex_of_input: status,
        degenerate: dim <= 1,
        tol,
        tol_relative,
        worst_margin: f64::INFINITY,
        warnings: Vec::new(),
        basis: basis.clone(),
        center: center.clone(),
        simplices: Vec::new(),
        interior: center.clone(),
    };

    if dim == 0 {
        poly.vertices = vec![first];
        poly.vertex_of_input[first] = InputStatus::Vertex(0);
        return Ok(poly);
    }
    if dim == 1 {
        let dir = &dirs[0];
        let t = |i: usize| dir.dot(&(&rows[i] - &center));
        let lo = *unique.iter().min_by(|&&a, &&b| t(a).total_cmp(&t(b))).unwrap();
        let hi = *unique.iter().max_by(|&&a, &&b| t(a).total_cmp(&t(b))).unwrap();
        let (a, b) = (lo.min(hi), lo.max(hi));
        poly.vertices = vec![a, b];
        poly.edges = vec![(0, 1)];
        for (k, &end) in poly.vertices.clone().iter().enumerate() {
            let sign = if end == hi { 1.0 } else { -1.0 };
            let normal = dir * sign;
            let offset = normal.dot(&rows[end]);
            poly.facets.push(Facet { normal, offset, vertices: vec![k] });
        }
        poly.vertex_of_input[a] = InputStatus::Vertex(0);
        poly.vertex_of_input[b] = InputStatus::Vertex(1);
        for &i in &unique {
            if i != a && i != b {
                poly.vertex_of_input[i] = InputStatus::Interior;
            }
        }
        poly.simplices = vec![vec![a], vec![b]];
        poly.interior = (&rows[a] + &rows[b]) / 2.0;
        return Ok(poly);
    }

    let local: Vec<DVector<f64>> = rows.iter().map(to_local).collect();
    let inside = chosen.iter().fold(DVector::zeros(dim), |a, &i| a + &local[i]) / chosen.len() as f64;
    let mut worst = f64::INFINITY;

    let make = |verts: Vec<usize>| -> Simplex {
        let pts: Vec<&DVector<f64>> = verts.iter().map(|&i| &local[i]).collect();
        let (normal, offset) = fit_hyperplane(&pts, &inside);
        Simplex { verts, normal, offset, alive: true }
    };
    let mut simplices: Vec<Simplex> = (0..chosen.len())
        .map(|skip| {
            let mut v: Vec<usize> = chosen.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &i)| i).collect();
            v.sort_unstable();
            make(v)
        })
        .collect();

    for &p in unique.iter().filter(|i| !chosen.contains(i)) {
        let mut visible = Vec::new();
        for (s_idx, s) in simplices.iter().enumerate().filter(|(_, s)| s.alive) {
            let dist = s.normal.dot(&local[p]) - s.offset;
            if dist > tol {
                visible.push(s_idx);
                worst = worst.min(dist / tol);
            } else if dist > -tol {
                // coplanar: decided as "not beyond"
            } else {
                worst = worst.min(-dist / tol);
            }
        }
        if visible.is_empty() {
            continue;
        }
        let mut ridge_count: HashMap<Vec<usize>, usize> = HashMap::new();
        for &s_idx in &visible {
            let verts = &simplices[s_idx].verts;
            for skip in 0..verts.len() {
                let ridge: Vec<usize> = verts.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v).collect();
                *ridge_count.entry(ridge).or_insert(0) += 1;
            }
        }
        for &s_idx in &visible {
            simplices[s_idx].alive = false;
        }
        let mut horizon: Vec<Vec<usize>> = ridge_count.into_iter().filter(|(_, c)| *c == 1).map(|(r, _)| r).collect();
        horizon.sort();
        for mut ridge in horizon {
            ridge.push(p);
            ridge.sort_unstable();
            simplices.push(make(ridge));
        }
        if simplices.len() > 4 * simplices.iter().filter(|s| s.alive).count() {
            simplices.retain(|s| s.alive);
        }
    }
    simplices.retain(|s| s.alive);

    // true facets: incidence sets of the simplicial pieces, deduplicated
    let mut incidence: Vec<Vec<usize>> = simplices
        .iter()
        .map(|s| {
            unique
                .iter()
                .copied()
                .filter(|&i| (s.normal.dot(&local[i]) - s.offset).abs() <= tol)
                .collect()
        })
        .collect();
    incidence.sort();
    incidence.dedup();
    let local_facets: Vec<(DVector<f64>, f64, Vec<usize>)> = incidence
        .into_iter()
        .map(|inc| {
            let pts: Vec<&DVector<f64>> = inc.iter().map(|&i| &local[i]).collect();
            let (normal, offset) = fit_hyperplane(&pts, &inside);
            (normal, offset, inc)
        })
        .collect();

    // classify boundary points by the rank of their facet normals
    let mut on_boundary = vec![false; n];
    let mut facets_of: HashMap<usize, Vec<usize>> = HashMap::new();
    for (f, (_, _, inc)) in local_facets.iter().enumerate() {
        for &i in inc {
            on_boundary[i] = true;
            facets_of.entry(i).or_default().push(f);
        }
    }
    let mut vertices = Vec::new();
    for &i in &unique {
        let status = if !on_boundary[i] {
            InputStatus::Interior
        } else {
            let normals: Vec<&DVector<f64>> = facets_of[&i].iter().map(|&f| &local_facets[f].0).collect();
            if rank_of(&normals, NORMAL_RANK_TOL) == dim {
                vertices.push(i);
                InputStatus::Vertex(usize::MAX)
            } else {
                InputStatus::OnFace
            }
        };
        poly.vertex_of_input[i] = status;
    }
    vertices.sort_unstable();
    for (k, &i) in vertices.iter().enumerate() {
        poly.vertex_of_input[i] = InputStatus::Vertex(k);
    }
    let hull_index: HashMap<usize, usize> = vertices.iter().enumerate().map(|(k, &i)| (i, k)).collect();

    let mut edges = Vec::new();
    for a in 0..vertices.len() {
        let fa = &facets_of[&vertices[a]];
        for b in a + 1..vertices.len() {
            let fb = &facets_of[&vertices[b]];
            let common: Vec<&DVector<f64>> = fa.iter().filter(|f| fb.contains(f)).map(|&f| &local_facets[f].0).collect();
            if common.len() + 1 >= dim && rank_of(&common, NORMAL_RANK_TOL) == dim - 1 {
                edges.push((a, b));
            }
        }
    }

    poly.facets = local_facets
        .into_iter()
        .map(|(nl, ol, inc)| {
            let normal = &basis * nl;
            let offset = ol + normal.dot(&center);
            let mut verts: Vec<usize> = inc.iter().filter_map(|i| hull_index.get(i).copied()).collect();
            verts.sort_unstable();
            Facet { normal, offset, vertices: verts }
        })
        .collect();
    poly.vertices = vertices;
    poly.edges = edges;
    poly.simplices = simplices.into_iter().map(|s| s.verts).collect();
    poly.interior = &center + &basis * &inside;
    poly.worst_margin = worst;
    if worst < 10.0 {
        poly.warnings.push(format!(
            "ill-conditioned input: worst predicate margin {:.3e} (tolerance {:.3e})",
            worst * tol,
            tol
        ));
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::OriginPolicy;

    fn hull(rows: &[Vec<f64>]) -> Polytope {
        let pc = PointConfiguration::from_rows(rows, OriginPolicy::AsGiven).unwrap();
        convex_hull(&pc, DEFAULT_HULL_TOL).unwrap()
    }

    fn cube_rows() -> Vec<Vec<f64>> {
        let mut v = Vec::new();
        for a in [1.0, -1.0] {
            for b in [1.0, -1.0] {
                for c in [1.0, -1.0] {
                    v.push(vec![a, b, c]);
                }
            }
        }
        v
    }

    #[test]
    fn cube_counts() {
        let p = hull(&cube_rows());
        assert_eq!((p.vertex_count(), p.edges.len(), p.facets.len()), (8, 12, 6));
        for f in &p.facets {
            assert_eq!(f.vertices.len(), 4);
            assert!((f.offset - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn duplicate_point_is_recorded() {
        let p = hull(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(p.vertex_count(), 3);
        assert_eq!(p.vertex_of_input[3], InputStatus::DuplicateOf(1));
        assert_eq!(p.edges.len(), 3);
    }

    #[test]
    fn interior_and_face_points() {
        let mut rows = cube_rows();
        rows.push(vec![0.0, 0.0, 0.0]); // interior
        rows.push(vec![1.0, 0.0, 0.0]); // centre of a square
        rows.push(vec![1.0, 1.0, 0.0]); // middle of an edge
        let p = hull(&rows);
        assert_eq!(p.vertex_count(), 8);
        assert_eq!(p.vertex_of_input[8], InputStatus::Interior);
        assert_eq!(p.vertex_of_input[9], InputStatus::OnFace);
        assert_eq!(p.vertex_of_input[10], InputStatus::OnFace);
        assert_eq!(p.edges.len(), 12);
    }

    #[test]
    fn low_dimensional_inputs() {
        let point = hull(&[vec![1.0, 2.0], vec![1.0, 2.0]]);
        assert_eq!((point.dim, point.vertex_count(), point.degenerate), (0, 1, true));
        let seg = hull(&[vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0], vec![3.0, 3.0, 3.0], vec![2.0, 2.0, 2.0]]);
        assert_eq!((seg.dim, seg.vertex_count(), seg.edges.len()), (1, 2, 1));
        assert_eq!(seg.vertices, vec![0, 2]);
        assert_eq!(seg.vertex_of_input[1], InputStatus::Interior);
        // a square floating in R^3
        let sq = hull(&[
            vec![0.0, 0.0, 5.0],
            vec![1.0, 0.0, 5.0],
            vec![1.0, 1.0, 5.0],
            vec![0.0, 1.0, 5.0],
            vec![0.5, 0.5, 5.0],
        ]);
        assert_eq!((sq.dim, sq.vertex_count(), sq.edges.len(), sq.facets.len()), (2, 4, 4, 4));
        assert!(!sq.degenerate);
        assert_eq!(sq.vertex_of_input[4], InputStatus::Interior);
    }

    #[test]
    fn cross_polytope_in_five_dimensions() {
        let mut rows = Vec::new();
        for i in 0..5 {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; 5];
                v[i] = s;
                rows.push(v);
            }
        }
        let p = hull(&rows);
        assert_eq!((p.vertex_count(), p.edges.len(), p.facets.len()), (10, 40, 32));
    }
}
