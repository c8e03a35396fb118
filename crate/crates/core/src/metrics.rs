//! Edge length, circumradius and dual dihedral angles of a polytope compared
//! with the values predicted from θ₂ and the degree of its edge graph:
//! `ℓ/r = sqrt(2λ₂/deg)` with `λ₂ = deg − θ₂`, and `cos α = −θ₂/deg`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{skeleton_graph, Polytope};
use crate::spectra::Spectrum;

/// Relative spread of edge lengths and vertex norms for the identities to apply.
pub const UNIFORMITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("edge graph is not regular")]
    NonRegular,
    #[error("spectrum has {got} vertices, polytope has {expected}")]
    SpectrumMismatch { got: usize, expected: usize },
    #[error("polytope has no edges")]
    NoEdges,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Summary {
    fn of(values: &[f64]) -> Self {
        Summary {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: values.iter().sum::<f64>() / values.len() as f64,
        }
    }

    fn spread(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gaps {
    pub ratio: f64,
    /// Largest `|α − predicted α|` over edges.
    pub angle: f64,
    /// Largest `|cos α + θ₂/deg|` over edges.
    pub cosine: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub degree: usize,
    pub theta2: f64,
    pub edge_lengths: Summary,
    /// Largest distance from the vertex barycenter.
    pub circumradius: f64,
    pub ratio: f64,
    pub predicted_ratio: f64,
    /// One angle per edge of `P`, i.e. per ridge of the dual.
    pub dihedral_angles: Vec<f64>,
    pub predicted_angle: f64,
    pub gaps: Gaps,
    /// Edge lengths and vertex norms are uniform, so the identities apply.
    pub applicable: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl MetricReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,measured,predicted,gap\n");
        out.push_str(&format!("ratio,{:.15},{:.15},{:.3e}\n", self.ratio, self.predicted_ratio, self.gaps.ratio));
        let mean_angle = self.dihedral_angles.iter().sum::<f64>() / self.dihedral_angles.len() as f64;
        out.push_str(&format!("dihedral,{:.15},{:.15},{:.3e}\n", mean_angle, self.predicted_angle, self.gaps.angle));
        out
    }
}

/// `s` must be the spectrum of the edge graph of `p`, in hull vertex order.
pub fn metric_report(p: &Polytope, s: &Spectrum) -> Result<MetricReport, MetricsError> {
    let n = p.vertex_count();
    if s.n != n {
        return Err(MetricsError::SpectrumMismatch { got: s.n, expected: n });
    }
    if p.edges.is_empty() {
        return Err(MetricsError::NoEdges);
    }
    let g = skeleton_graph(p).graph;
    let degree = g.regular_degree().ok_or(MetricsError::NonRegular)?;
    let theta2 = s.groups.get(1).map_or(s.groups[0].theta, |grp| grp.theta);
    let deg = degree as f64;

    let psi = p.arrangement();
    let center = psi.row_mean();
    let v: Vec<_> = psi.row_iter().map(|r| (r - &center).transpose()).collect();
    let norms: Vec<f64> = v.iter().map(|x| x.norm()).collect();
    let norm_summary = Summary::of(&norms);
    let lengths: Vec<f64> = p.edges.iter().map(|&(a, b)| (&v[a] - &v[b]).norm()).collect();
    let edge_lengths = Summary::of(&lengths);
    let circumradius = norm_summary.max;
    let ratio = edge_lengths.mean / circumradius;
    let predicted_ratio = (2.0 * (deg - theta2) / deg).sqrt();

    let cosines: Vec<f64> = p
        .edges
        .iter()
        .map(|&(a, b)| (-v[a].dot(&v[b]) / (norms[a] * norms[b])).clamp(-1.0, 1.0))
        .collect();
    let dihedral_angles: Vec<f64> = cosines.iter().map(|c| c.acos()).collect();
    let predicted_cos = -theta2 / deg;
    let predicted_angle = predicted_cos.clamp(-1.0, 1.0).acos();

    let applicable = edge_lengths.spread() <= UNIFORMITY_TOL * edge_lengths.max
        && norm_summary.spread() <= UNIFORMITY_TOL * norm_summary.max;
    let mut notes = Vec::new();
    if !applicable {
        notes.push("edge lengths or vertex norms are not uniform; the identities need not hold".into());
    }
    debug_assert!(dihedral_angles.iter().all(|a| (0.0..=PI).contains(a)));
    Ok(MetricReport {
        degree,
        theta2,
        edge_lengths,
        circumradius,
        ratio,
        predicted_ratio,
        gaps: Gaps {
            ratio: (ratio - predicted_ratio).abs(),
            angle: dihedral_angles.iter().map(|a| (a - predicted_angle).abs()).fold(0.0, f64::max),
            cosine: cosines.iter().map(|c| (c - predicted_cos).abs()).fold(0.0, f64::max),
        },
        dihedral_angles,
        predicted_angle,
        applicable,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{convex_hull, OriginPolicy, PointConfiguration, DEFAULT_HULL_TOL};
    use crate::graphs::generate;
    use crate::spectra::{eigenmatrix, spectrum, DEFAULT_GROUPING_TOL};

    fn report(rows: Vec<Vec<f64>>) -> MetricReport {
        let p = convex_hull(&PointConfiguration::from_rows(&rows, OriginPolicy::AsGiven).unwrap(), DEFAULT_HULL_TOL).unwrap();
        let s = spectrum(&skeleton_graph(&p).graph, DEFAULT_GROUPING_TOL).unwrap();
        metric_report(&p, &s).unwrap()
    }

    #[test]
    fn cube_values() {
        let r = report((0..8).map(|m: usize| (0..3).map(|k| if m >> k & 1 == 1 { -1.0 } else { 1.0 }).collect()).collect());
        assert!(r.applicable);
        assert!((r.ratio - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((r.predicted_ratio - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((r.predicted_angle - (-1.0f64 / 3.0).acos()).abs() < 1e-12);
        assert!(r.gaps.angle < 1e-12 && r.gaps.ratio < 1e-12);
    }

    #[test]
    fn cross_polytope_is_right_angled() {
        let mut rows = Vec::new();
        for i in 0..3 {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; 3];
                v[i] = s;
                rows.push(v);
            }
        }
        let r = report(rows);
        assert_eq!(r.degree, 4);
        assert!(r.theta2.abs() < 1e-12);
        assert!((r.predicted_angle - PI / 2.0).abs() < 1e-12 && r.gaps.angle < 1e-12);
    }

    #[test]
    fn icosahedron_from_its_eigenspace() {
        let g = generate("icosahedron", &[]).unwrap();
        let s = spectrum(&g, DEFAULT_GROUPING_TOL).unwrap();
        let phi = eigenmatrix(&s, 2).unwrap().entries;
        let p = convex_hull(&PointConfiguration::new(phi, OriginPolicy::AsGiven).unwrap(), DEFAULT_HULL_TOL).unwrap();
        let r = metric_report(&p, &spectrum(&skeleton_graph(&p).graph, DEFAULT_GROUPING_TOL).unwrap()).unwrap();
        assert!((r.theta2 - 5f64.sqrt()).abs() < 1e-9);
        assert!(((r.predicted_angle.cos()) + 5f64.sqrt() / 5.0).abs() < 1e-12);
        assert!(r.gaps.cosine < 1e-9 && r.gaps.ratio < 1e-9);
    }

    #[test]
    fn irregular_skeleton_is_an_error() {
        let rows = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        let p = convex_hull(&PointConfiguration::from_rows(&rows, OriginPolicy::AsGiven).unwrap(), DEFAULT_HULL_TOL).unwrap();
        let s = spectrum(&skeleton_graph(&p).graph, DEFAULT_GROUPING_TOL).unwrap();
        assert_eq!(metric_report(&p, &s), Err(MetricsError::NonRegular));
    }
}
