//! Text formats: graph6 and the plain edge list.
//!
//! The edge list is `n` on the first line followed by one `i j` pair per
//! line, 1-based. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{Graph, GraphError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Graph6,
    EdgeList,
}

impl FromStr for GraphFormat {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "graph6" | "g6" => Ok(Self::Graph6),
            "edges" | "edge_list" | "edgelist" => Ok(Self::EdgeList),
            other => Err(GraphError::Malformed(format!("unknown graph format `{other}`"))),
        }
    }
}

pub fn parse_graph(input: &str, format: GraphFormat) -> Result<Graph, GraphError> {
    match format {
        GraphFormat::Graph6 => parse_graph6(input),
        GraphFormat::EdgeList => parse_edge_list(input),
    }
}

pub fn parse_edge_list(input: &str) -> Result<Graph, GraphError> {
    let mut lines = input
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines
        .next()
        .ok_or_else(|| GraphError::Malformed("empty input, expected vertex count".into()))?;
    let n: usize = header
        .parse()
        .map_err(|_| GraphError::Malformed(format!("bad header `{header}`, expected vertex count")))?;
    let mut edges = Vec::new();
    for (lineno, line) in lines {
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(GraphError::Malformed(format!("line {}: expected `i j`", lineno + 1)));
        };
        let parse = |t: &str| -> Result<usize, GraphError> {
            let v: usize = t
                .parse()
                .map_err(|_| GraphError::Malformed(format!("line {}: bad index `{t}`", lineno + 1)))?;
            if v == 0 || v > n {
                return Err(GraphError::VertexOutOfRange { index: v, n });
            }
            Ok(v - 1)
        };
        edges.push((parse(a)?, parse(b)?));
    }
    Graph::new(n, edges)
}

pub fn to_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    if let Some(name) = g.name() {
        let _ = writeln!(out, "# {name}");
    }
    let _ = writeln!(out, "{}", g.n());
    for (a, b) in g.edges() {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

const G6_HEADER: &str = ">>graph6<<";

pub fn parse_graph6(input: &str) -> Result<Graph, GraphError> {
    let s = input.trim();
    let s = s.strip_prefix(G6_HEADER).unwrap_or(s);
    let bytes = s.as_bytes();
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(GraphError::Malformed(format!("graph6: invalid byte {b:#04x}")));
    }
    let (n, rest) = match bytes {
        [] => return Err(GraphError::Malformed("graph6: empty string".into())),
        [126, 126, rest @ ..] => {
            if rest.len() < 6 {
                return Err(GraphError::Malformed("graph6: truncated size field".into()));
            }
            (sextets_to_int(&rest[..6]), &rest[6..])
        }
        [126, rest @ ..] => {
            if rest.len() < 3 {
                return Err(GraphError::Malformed("graph6: truncated size field".into()));
            }
            (sextets_to_int(&rest[..3]), &rest[3..])
        }
        [b, rest @ ..] => ((*b - 63) as usize, rest),
    };
    let nbits = n * n.saturating_sub(1) / 2;
    let expected = nbits.div_ceil(6);
    if rest.len() != expected {
        return Err(GraphError::Malformed(format!(
            "graph6: expected {expected} data bytes for n = {n}, found {}",
            rest.len()
        )));
    }
    let bit = |k: usize| (rest[k / 6] - 63) >> (5 - k % 6) & 1 == 1;
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Graph::new(n, edges)
}

fn sextets_to_int(b: &[u8]) -> usize {
    b.iter().fold(0usize, |acc, &x| (acc << 6) | (x - 63) as usize)
}

pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out: Vec<u8> = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        out.extend((0..3).rev().map(|k| ((n >> (6 * k)) & 63) as u8 + 63));
    } else {
        out.extend([126, 126]);
        out.extend((0..6).rev().map(|k| ((n >> (6 * k)) & 63) as u8 + 63));
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | u8::from(g.has_edge(i, j));
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are printable ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex_edge_list() {
        let g = parse_edge_list("1\n").unwrap();
        assert_eq!((g.n(), g.edge_count()), (1, 0));
    }

    #[test]
    fn edge_list_errors() {
        assert!(matches!(parse_edge_list("x\n1 2"), Err(GraphError::Malformed(_))));
        assert!(matches!(parse_edge_list(""), Err(GraphError::Malformed(_))));
        assert_eq!(
            parse_edge_list("3\n1 4\n"),
            Err(GraphError::VertexOutOfRange { index: 4, n: 3 })
        );
        assert_eq!(parse_edge_list("3\n0 1\n"), Err(GraphError::VertexOutOfRange { index: 0, n: 3 }));
        assert_eq!(parse_edge_list("3\n2 2\n"), Err(GraphError::Loop(2)));
        assert!(matches!(parse_edge_list("3\n1 2 3\n"), Err(GraphError::Malformed(_))));
    }

    #[test]
    fn edge_list_comments_and_duplicates() {
        let g = parse_edge_list("# triangle\n3\n1 2\n\n2 1\n2 3\n3 1\n").unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(parse_edge_list(&to_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn graph6_rejects_garbage() {
        assert!(parse_graph6("").is_err());
        assert!(parse_graph6("Dh").is_err());
        assert!(parse_graph6("D hc").is_err());
        assert!(parse_graph6("~?").is_err());
    }

    #[test]
    fn graph6_header_is_optional() {
        assert_eq!(parse_graph6(">>graph6<<Dhc").unwrap(), parse_graph6("Dhc").unwrap());
    }
}
