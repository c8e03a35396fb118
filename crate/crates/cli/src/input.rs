//! Resolves `--gen`, `--in` and `--poly` into a graph or a point set.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use eigenpoly::catalog::coordinates;
use eigenpoly::geometry::{OriginPolicy, PointConfiguration};
use eigenpoly::graphs::generators::from_spec;
use eigenpoly::graphs::{parse_graph, Graph, GraphFormat};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Graph6,
    Edges,
    /// One vertex per line, coordinates separated by commas or spaces.
    Points,
}

#[derive(Args, Clone, Debug)]
pub struct InputArgs {
    /// Graph generator, e.g. `hypercube:3`, `johnson:5,2`, `petersen`.
    #[arg(long = "gen", value_name = "NAME:PARAMS")]
    pub generator: Option<String>,
    /// Read a graph or a point set from FILE.
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "graph6")]
    pub format: InputFormat,
    /// Named polytope from the catalog, e.g. `rhombic_dodecahedron`.
    #[arg(long, value_name = "NAME")]
    pub poly: Option<String>,
}

pub enum Source {
    Graph(Graph),
    Points(PointConfiguration),
}

impl InputArgs {
    pub fn describe(&self) -> Value {
        match (&self.generator, &self.input, &self.poly) {
            (Some(g), _, _) => json!({"gen": g}),
            (_, Some(f), _) => json!({"file": f.display().to_string(), "format": format!("{:?}", self.format).to_lowercase()}),
            (_, _, Some(p)) => json!({"poly": p}),
            _ => Value::Null,
        }
    }

    pub fn resolve(&self) -> Result<Source, CliError> {
        let given = [self.generator.is_some(), self.input.is_some(), self.poly.is_some()];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(CliError::Config("give exactly one of --gen, --in or --poly".into()));
        }
        if let Some(spec) = &self.generator {
            return Ok(Source::Graph(from_spec(spec)?));
        }
        if let Some(name) = &self.poly {
            let rows = coordinates(name)?;
            return Ok(Source::Points(PointConfiguration::from_rows(&rows, OriginPolicy::AsGiven)?));
        }
        let path = self.input.as_ref().expect("checked above");
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(match self.format {
            InputFormat::Graph6 => Source::Graph(parse_graph(&text, GraphFormat::Graph6)?),
            InputFormat::Edges => Source::Graph(parse_graph(&text, GraphFormat::EdgeList)?),
            InputFormat::Points => Source::Points(PointConfiguration::from_rows(&parse_points(&text)?, OriginPolicy::AsGiven)?),
        })
    }
}

fn parse_points(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| CliError::Input(format!("line {}: `{s}` is not a number", no + 1))))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_accept_commas_spaces_and_comments() {
        let rows = parse_points("# square\n1,0\n0 1\n\n-1, 0\n0 -1\n").unwrap();
        assert_eq!(rows, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]]);
        assert!(parse_points("1,x").is_err());
    }
}
