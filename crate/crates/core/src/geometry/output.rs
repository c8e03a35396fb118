use std::fmt::Write as _;

use nalgebra::DVector;
use serde_json::{json, Value};

use super::Polytope;

/// Vertices of a facet of a 3-polytope (or of a polygon) in cyclic order.
fn cyclic(p: &Polytope, verts: &[usize], normal: Option<&DVector<f64>>) -> Vec<usize> {
    let pts: Vec<DVector<f64>> = verts.iter().map(|&v| p.local(&p.vertex(v))).collect();
    let centroid = pts.iter().fold(DVector::zeros(p.dim), |a, x| a + x) / pts.len() as f64;
    let u = &pts[0] - &centroid;
    let u = &u / u.norm();
    let w = match normal {
        Some(n) if p.dim == 3 => {
            let n = p.basis.transpose() * n;
            let n3 = nalgebra::Vector3::new(n[0], n[1], n[2]);
            let u3 = nalgebra::Vector3::new(u[0], u[1], u[2]);
            let w = n3.cross(&u3);
            DVector::from_column_slice(w.as_slice())
        }
        _ => DVector::from_vec(vec![-u[1], u[0]]),
    };
    let mut order: Vec<(f64, usize)> = verts
        .iter()
        .zip(&pts)
        .map(|(&v, x)| {
            let y = x - &centroid;
            (w.dot(&y).atan2(u.dot(&y)), v)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    order.into_iter().map(|(_, v)| v).collect()
}

/// Geomview OFF text. `None` when the polytope has dimension above 3.
pub fn to_off(p: &Polytope) -> Option<String> {
    if p.dim > 3 {
        return None;
    }
    let faces: Vec<Vec<usize>> = match p.dim {
        3 => p.facets.iter().map(|f| cyclic(p, &f.vertices, Some(&f.normal))).collect(),
        2 => vec![cyclic(p, &(0..p.vertex_count()).collect::<Vec<_>>(), None)],
        _ => Vec::new(),
    };
    let mut out = format!("OFF\n{} {} {}\n", p.vertex_count(), faces.len(), p.edges.len());
    for i in 0..p.vertex_count() {
        let x = p.local(&p.vertex(i));
        let coords: Vec<String> = if p.ambient <= 3 {
            let v = p.vertex(i);
            (0..3).map(|k| format!("{}", v.get(k).copied().unwrap_or(0.0))).collect()
        } else {
            (0..3).map(|k| format!("{}", x.get(k).copied().unwrap_or(0.0))).collect()
        };
        writeln!(out, "{}", coords.join(" ")).unwrap();
    }
    for f in faces {
        let ids: Vec<String> = f.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{} {}", f.len(), ids.join(" ")).unwrap();
    }
    Some(out)
}

/// JSON dump; vertex, edge and facet indices are 1-based.
pub fn to_json(p: &Polytope) -> Value {
    let vertices: Vec<Value> = (0..p.vertex_count())
        .map(|i| json!({"input": p.vertices[i] + 1, "coords": p.vertex(i).as_slice()}))
        .collect();
    let edges: Vec<[usize; 2]> = p.edges.iter().map(|&(a, b)| [a + 1, b + 1]).collect();
    let facets: Vec<Value> = p
        .facets
        .iter()
        .map(|f| {
            json!({
                "normal": f.normal.as_slice(),
                "offset": f.offset,
                "vertices": f.vertices.iter().map(|v| v + 1).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "dim": p.dim,
        "ambient": p.ambient,
        "degenerate": p.degenerate,
        "vertices": vertices,
        "edges": edges,
        "facets": facets,
        "vertex_of_input": p.vertex_of_input,
        "tolerance": {"relative": p.tol_relative, "absolute": p.tol},
        "worst_margin": if p.worst_margin.is_finite() { json!(p.worst_margin) } else { Value::Null },
        "warnings": p.warnings,
    })
}
