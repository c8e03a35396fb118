//! Named graph families and the embedded named graphs.

use super::io::parse_edge_list;
use super::{Graph, GraphError};

const NAMED: &[(&str, &str)] = &[
    ("petersen", include_str!("../../resources/graphs/petersen.edges")),
    ("dodecahedron", include_str!("../../resources/graphs/dodecahedron.edges")),
    ("icosahedron", include_str!("../../resources/graphs/icosahedron.edges")),
    ("holt", include_str!("../../resources/graphs/holt.edges")),
    ("schlafli", include_str!("../../resources/graphs/schlafli.edges")),
    ("gosset", include_str!("../../resources/graphs/gosset.edges")),
    (
        "rhombic_dodecahedron_skeleton",
        include_str!("../../resources/graphs/rhombic_dodecahedron_skeleton.edges"),
    ),
    (
        "rhombic_triacontahedron_skeleton",
        include_str!("../../resources/graphs/rhombic_triacontahedron_skeleton.edges"),
    ),
];

/// Names accepted by [`generate`], parametrised families first.
pub const GENERATORS: &[&str] = &[
    "cycle",
    "complete",
    "hypercube",
    "complete_multipartite",
    "johnson",
    "hamming",
    "halved_cube",
    "prism",
    "cocktail_party",
    "petersen",
    "dodecahedron",
    "icosahedron",
    "holt",
    "schlafli",
    "gosset",
    "rhombic_dodecahedron_skeleton",
    "rhombic_triacontahedron_skeleton",
];

/// Parses `name` or `name:p1,p2,...` and generates the graph.
pub fn from_spec(spec: &str) -> Result<Graph, GraphError> {
    let (name, params) = match spec.split_once(':') {
        Some((name, rest)) => {
            let params = rest
                .split(',')
                .map(|p| {
                    p.trim().parse::<usize>().map_err(|_| GraphError::InvalidParameters {
                        generator: name.to_string(),
                        reason: format!("`{p}` is not a non-negative integer"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            (name, params)
        }
        None => (spec, Vec::new()),
    };
    generate(name.trim(), &params)
}

pub fn generate(name: &str, params: &[usize]) -> Result<Graph, GraphError> {
    let invalid = |reason: &str| GraphError::InvalidParameters {
        generator: name.to_string(),
        reason: reason.to_string(),
    };
    let arity = |k: usize| -> Result<(), GraphError> {
        if params.len() == k {
            Ok(())
        } else {
            Err(invalid(&format!("expected {k} parameter(s), got {}", params.len())))
        }
    };
    let g = match name {
        "cycle" => {
            arity(1)?;
            let n = params[0];
            if n < 3 {
                return Err(invalid("cycle needs n >= 3"));
            }
            Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))?
        }
        "complete" => {
            arity(1)?;
            let n = params[0];
            if n == 0 {
                return Err(invalid("complete needs n >= 1"));
            }
            Graph::new(n, pairs(n))?
        }
        "hypercube" => {
            arity(1)?;
            let d = params[0];
            if d == 0 || d > 16 {
                return Err(invalid("hypercube needs 1 <= n <= 16"));
            }
            let n = 1usize << d;
            Graph::new(n, pairs(n).filter(|&(a, b)| (a ^ b).count_ones() == 1))?
        }
        "complete_multipartite" => {
            if params.is_empty() || params.contains(&0) {
                return Err(invalid("needs at least one part, all of positive size"));
            }
            let mut part = Vec::new();
            for (p, &size) in params.iter().enumerate() {
                part.extend(std::iter::repeat_n(p, size));
            }
            Graph::new(part.len(), pairs(part.len()).filter(|&(a, b)| part[a] != part[b]))?
        }
        "johnson" => {
            arity(2)?;
            let (n, k) = (params[0], params[1]);
            if k == 0 || k > n || n > 30 {
                return Err(invalid("johnson needs 1 <= k <= n <= 30"));
            }
            let sets: Vec<u32> = (0u32..1 << n).filter(|s| s.count_ones() as usize == k).collect();
            let sets = lex_subsets(sets, n);
            Graph::new(
                sets.len(),
                pairs(sets.len()).filter(|&(a, b)| (sets[a] & sets[b]).count_ones() as usize == k - 1),
            )?
        }
        "hamming" => {
            arity(2)?;
            let (d, q) = (params[0], params[1]);
            if d == 0 || q < 2 || (q as f64).powi(d as i32) > 1e5 {
                return Err(invalid("hamming needs d >= 1, q >= 2 and at most 1e5 words"));
            }
            let n = q.pow(d as u32);
            let word = |mut x: usize| {
                let mut w = vec![0; d];
                for slot in w.iter_mut().rev() {
                    *slot = x % q;
                    x /= q;
                }
                w
            };
            let words: Vec<Vec<usize>> = (0..n).map(word).collect();
            Graph::new(
                n,
                pairs(n).filter(|&(a, b)| words[a].iter().zip(&words[b]).filter(|(x, y)| x != y).count() == 1),
            )?
        }
        "halved_cube" => {
            arity(1)?;
            let d = params[0];
            if !(2..=16).contains(&d) {
                return Err(invalid("halved_cube needs 2 <= n <= 16"));
            }
            let even: Vec<usize> = (0..1usize << d).filter(|v| v.count_ones() % 2 == 0).collect();
            Graph::new(
                even.len(),
                pairs(even.len()).filter(|&(a, b)| (even[a] ^ even[b]).count_ones() == 2),
            )?
        }
        "prism" => {
            arity(1)?;
            let n = params[0];
            if n < 3 {
                return Err(invalid("prism needs n >= 3"));
            }
            let ring = (0..n).flat_map(|i| [(i, (i + 1) % n), (n + i, n + (i + 1) % n), (i, n + i)]);
            Graph::new(2 * n, ring)?
        }
        "cocktail_party" => {
            arity(1)?;
            let m = params[0];
            if m == 0 {
                return Err(invalid("cocktail_party needs m >= 1"));
            }
            Graph::new(2 * m, pairs(2 * m).filter(|&(a, b)| a / 2 != b / 2))?
        }
        other => {
            let Some((_, text)) = NAMED.iter().find(|(n, _)| *n == other) else {
                return Err(GraphError::UnknownGenerator(other.to_string()));
            };
            arity(0)?;
            parse_edge_list(text)?
        }
    };
    let label = if params.is_empty() {
        name.to_string()
    } else {
        let p: Vec<String> = params.iter().map(ToString::to_string).collect();
        format!("{name}({})", p.join(","))
    };
    Ok(g.with_name(label))
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

/// Orders k-subsets (as bitmasks over `0..n`) lexicographically by their
/// sorted element lists.
fn lex_subsets(mut sets: Vec<u32>, n: usize) -> Vec<u32> {
    let key = |s: &u32| (0..n).filter(|i| s >> i & 1 == 1).collect::<Vec<_>>();
    sets.sort_by_key(key);
    sets
}
