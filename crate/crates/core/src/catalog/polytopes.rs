//! Named polytopes given by coordinates.

use std::f64::consts::PI;

use super::CatalogError;

pub const POLYTOPES: &[&str] = &["rhombic_dodecahedron", "rhombic_triacontahedron", "cyclic_polytope_7_4"];

fn signs3() -> Vec<Vec<f64>> {
    (0..8usize).map(|m| (0..3).map(|k| if m >> k & 1 == 1 { -1.0 } else { 1.0 }).collect()).collect()
}

/// Cyclic shifts of `(0, ±a, ±b)`.
fn cyclic_shifts(a: f64, b: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for shift in 0..3 {
        for sa in [1.0, -1.0] {
            for sb in [1.0, -1.0] {
                let base = [0.0, sa * a, sb * b];
                out.push((0..3).map(|k| base[(k + 3 - shift) % 3]).collect());
            }
        }
    }
    out
}

/// Vertex coordinates, one row per vertex.
pub fn coordinates(name: &str) -> Result<Vec<Vec<f64>>, CatalogError> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    Ok(match name {
        "rhombic_dodecahedron" => {
            let mut v = signs3();
            for k in 0..3 {
                for s in [2.0, -2.0] {
                    let mut e = vec![0.0; 3];
                    e[k] = s;
                    v.push(e);
                }
            }
            v
        }
        "rhombic_triacontahedron" => {
            let mut v = signs3();
            v.extend(cyclic_shifts(phi, 1.0 / phi));
            v.extend(cyclic_shifts(1.0, phi));
            v
        }
        "cyclic_polytope_7_4" => (0..7)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 7.0;
                vec![t.sin(), t.cos(), (2.0 * t).sin(), (2.0 * t).cos()]
            })
            .collect(),
        other => return Err(CatalogError::UnknownPolytope(other.to_string())),
    })
}
