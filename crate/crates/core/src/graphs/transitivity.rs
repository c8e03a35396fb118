use serde::{Deserialize, Serialize};

use super::automorphism::orbit_labels;
use super::{AutGroup, Graph};

/// Orbit structure of `Aut(G)` on vertices, edges, arcs and distance classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitivityProfile {
    pub vertex_transitive: bool,
    pub edge_transitive: bool,
    pub arc_transitive: bool,
    pub distance_transitive: bool,
    /// Vertex- and edge- but not arc-transitive.
    pub half_transitive: bool,
    pub vertex_orbits: usize,
    pub edge_orbits: usize,
    pub arc_orbits: usize,
    /// Orbits on ordered pairs at distance `δ`, indexed by `δ = 0..=diam`.
    pub orbit_counts: Vec<usize>,
    pub reason: Option<String>,
}

fn count_distinct(labels: impl Iterator<Item = usize>) -> usize {
    let mut v: Vec<usize> = labels.collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

pub fn transitivity(g: &Graph, aut: &AutGroup) -> TransitivityProfile {
    let n = g.n();
    let gens = &aut.generators;
    let vertex_orbits = count_distinct(aut.vertex_orbits().into_iter());

    let ordered = orbit_labels(n * n, gens, |p, x| p[x / n] * n + p[x % n]);
    let unordered = orbit_labels(n * n, gens, |p, x| {
        let (a, b) = (x / n, x % n);
        if a > b {
            return x;
        }
        let (c, d) = (p[a], p[b]);
        c.min(d) * n + c.max(d)
    });

    let edge_orbits = count_distinct(g.edges().map(|(a, b)| unordered[a * n + b]));
    let arc_orbits = count_distinct(g.edges().flat_map(|(a, b)| [ordered[a * n + b], ordered[b * n + a]]));

    let dist = g.distances();
    let mut orbit_counts = vec![0; dist.diameter + 1];
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); dist.diameter + 1];
    for a in 0..n {
        for b in 0..n {
            if let Some(d) = dist.get(a, b) {
                per_class[d].push(ordered[a * n + b]);
            }
        }
    }
    for (d, labels) in per_class.into_iter().enumerate() {
        orbit_counts[d] = count_distinct(labels.into_iter());
    }

    let vertex_transitive = vertex_orbits <= 1;
    let edge_transitive = edge_orbits <= 1;
    let arc_transitive = vertex_transitive && arc_orbits <= 1;
    let (distance_transitive, reason) = if dist.connected {
        (orbit_counts.iter().all(|&c| c == 1), None)
    } else {
        (false, Some("graph is disconnected".to_string()))
    };
    TransitivityProfile {
        vertex_transitive,
        edge_transitive,
        arc_transitive,
        distance_transitive,
        half_transitive: vertex_transitive && edge_transitive && !arc_transitive,
        vertex_orbits,
        edge_orbits,
        arc_orbits,
        orbit_counts,
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{automorphisms, generate, parse_graph, GraphFormat, DEFAULT_SEARCH_BOUND};

    fn profile(g: &Graph) -> TransitivityProfile {
        transitivity(g, &automorphisms(g, DEFAULT_SEARCH_BOUND).unwrap())
    }

    #[test]
    fn star_is_edge_but_not_vertex_transitive() {
        let g = parse_graph("4\n1 2\n1 3\n1 4\n", GraphFormat::EdgeList).unwrap();
        let p = profile(&g);
        assert!(p.edge_transitive && !p.vertex_transitive && !p.arc_transitive);
        assert!(!p.distance_transitive && !p.half_transitive);
    }

    #[test]
    fn disconnected_graph_has_reason() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let p = profile(&g);
        assert!(p.vertex_transitive && p.arc_transitive);
        assert!(!p.distance_transitive);
        assert!(p.reason.is_some());
    }

    #[test]
    fn prism_is_vertex_but_not_edge_transitive() {
        let p = profile(&generate("prism", &[3]).unwrap());
        assert!(p.vertex_transitive && !p.edge_transitive);
        assert_eq!(p.edge_orbits, 2);
    }

    #[test]
    fn rhombic_dodecahedron_skeleton_is_edge_transitive_only() {
        let p = profile(&generate("rhombic_dodecahedron_skeleton", &[]).unwrap());
        assert!(p.edge_transitive && !p.vertex_transitive);
        assert_eq!(p.vertex_orbits, 2);
    }
}
