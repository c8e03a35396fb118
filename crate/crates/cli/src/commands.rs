use std::fmt::Write as _;

use eigenpoly::catalog::{run_catalog, ScaleClass, Tolerances};
use eigenpoly::certify::{is_spectral_graph, is_spectral_polytope, Certificate};
use eigenpoly::geometry::{convex_hull, InputStatus, skeleton_graph, to_json, to_off, OriginPolicy, PointConfiguration, Polytope};
use eigenpoly::graphs::Graph;
use eigenpoly::izmestiev::{audit, izmestiev_fd, izmestiev_ridge, theta2_criterion};
use eigenpoly::metrics::metric_report;
use eigenpoly::spectra::{eigenmatrix, spectrum, Spectrum};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::input::Source;
use crate::{CliError, Report, RunArgs, SchemeArg, TolArgs, CATALOG_MISMATCH};

fn rows_json(m: &DMatrix<f64>) -> Value {
    json!(m.row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>())
}

fn rows_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in m.row_iter() {
        let cells: Vec<String> = r.iter().map(|x| format!("{x:.15}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn spectrum_table(s: &Spectrum) -> String {
    let mut out = format!("{:>3}  {:>16}  {:>4}\n", "k", "theta", "mult");
    for row in s.table() {
        writeln!(out, "{:>3}  {:>16.10}  {:>4}", row.k, row.theta, row.multiplicity).unwrap();
    }
    out
}

fn require_graph(a: &RunArgs) -> Result<Graph, CliError> {
    match a.input.resolve()? {
        Source::Graph(g) => Ok(g),
        Source::Points(_) => Err(CliError::Config("this command needs a graph (--gen, or --in with graph6/edges)".into())),
    }
}

/// The polytope a command works on: the k-th eigenpolytope of a graph, or
/// the hull of the given points.
struct Built {
    graph: Option<Graph>,
    spectrum: Option<Spectrum>,
    theta: Option<f64>,
    coords: DMatrix<f64>,
    polytope: Polytope,
}

fn build(a: &RunArgs) -> Result<Built, CliError> {
    match a.input.resolve()? {
        Source::Graph(g) => {
            let s = spectrum(&g, a.tol.tol_grouping)?;
            let e = eigenmatrix(&s, a.k)?;
            let p = convex_hull(&PointConfiguration::new(e.entries.clone(), OriginPolicy::AsGiven)?, a.tol.tol_hull)?;
            Ok(Built { graph: Some(g), spectrum: Some(s), theta: Some(e.theta), coords: e.entries, polytope: p })
        }
        Source::Points(pc) => {
            let p = convex_hull(&pc, a.tol.tol_hull)?;
            Ok(Built { graph: None, spectrum: None, theta: None, coords: pc.matrix().clone(), polytope: p })
        }
    }
}

fn full_dimensional(p: &Polytope) -> Result<(), CliError> {
    if p.is_full_dimensional() && p.dim >= 2 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "polytope has dimension {} in ambient dimension {}; a full-dimensional polytope of dimension at least 2 is needed",
            p.dim, p.ambient
        )))
    }
}

pub fn spectrum_cmd(a: &RunArgs) -> Result<Report, CliError> {
    let g = require_graph(a)?;
    let s = spectrum(&g, a.tol.tol_grouping)?;
    let mut summary = format!("graph: {} vertices, {} edges\n", g.n(), g.edge_count());
    summary.push_str(&spectrum_table(&s));
    writeln!(summary, "{} distinct eigenvalues, largest multiplicity {}", s.groups.len(), s.max_multiplicity()).unwrap();
    let result = json!({
        "vertices": g.n(),
        "edges": g.edge_count(),
        "regular_degree": g.regular_degree(),
        "groups": s.table(),
        "max_multiplicity": s.max_multiplicity(),
    });
    let mut r = Report::new(summary, result);
    r.csv = Some(s.to_csv());
    Ok(r)
}

pub fn polytope(a: &RunArgs) -> Result<Report, CliError> {
    let b = build(a)?;
    let p = &b.polytope;
    let skel = skeleton_graph(p);
    let mut summary = String::new();
    let mut notes = Vec::new();
    let mut status = "ok".to_string();
    if let Some(s) = &b.spectrum {
        summary.push_str(&spectrum_table(s));
        writeln!(summary, "theta_{} = {:.10}, eigenspace dimension {}", a.k, b.theta.unwrap(), b.coords.ncols()).unwrap();
    }
    writeln!(
        summary,
        "polytope: dimension {}, {} vertices, {} edges, {} facets",
        p.dim,
        p.vertex_count(),
        p.edges.len(),
        p.facets.len()
    )
    .unwrap();
    if p.dim < 2 {
        status = "dimension_too_low".into();
        notes.push(format!("status: Dimension too low (dimension {}); no polygon or polyhedron to draw", p.dim));
    } else if p.dim > 3 {
        status = "projection_needed".into();
        notes.push(format!(
            "status: dimension {} exceeds 3; OFF is not written, the JSON and CSV output are complete and any drawing needs a projection",
            p.dim
        ));
    }
    let mut unrealized = Vec::new();
    if let Some(g) = &b.graph {
        let hull_edges = skel.input_edges();
        unrealized = g.edges().filter(|e| hull_edges.binary_search(e).is_err()).map(|(i, j)| [i + 1, j + 1]).collect();
        let duplicates = p.vertex_of_input.iter().filter(|v| !matches!(v, InputStatus::Vertex(_))).count();
        if duplicates > 0 {
            notes.push(format!("warning: {duplicates} graph vertices do not map to distinct hull vertices"));
        }
        if !unrealized.is_empty() {
            let shown: Vec<String> = unrealized.iter().take(8).map(|[i, j]| format!("({i},{j})")).collect();
            notes.push(format!(
                "warning: input edges not realized as hull edges: {}{}",
                shown.join(" "),
                if unrealized.len() > 8 { " ..." } else { "" }
            ));
        }
    }
    for w in &p.warnings {
        notes.push(format!("warning: {w}"));
    }
    let result = json!({
        "spectrum": b.spectrum.as_ref().map(|s| s.table()),
        "theta": b.theta,
        "coordinates": rows_json(&b.coords),
        "polytope": to_json(p),
        "status": status,
        "unrealized_edges": unrealized,
    });
    let mut r = Report::new(summary, result);
    r.csv = Some(rows_csv(&b.coords));
    r.off = to_off(p).filter(|_| p.dim >= 2);
    r.notes = notes;
    Ok(r)
}

fn certificate_summary(c: &Certificate) -> String {
    let kind = serde_json::to_value(c.kind).unwrap();
    let mut out = format!("certificate: {}\n", kind.as_str().unwrap());
    if let Some(t) = c.theta {
        writeln!(out, "theta: {t:.10}{}", c.k.map_or(String::new(), |k| format!(" (k = {k})"))).unwrap();
    }
    for r in &c.reasons {
        writeln!(out, "reason: {r}").unwrap();
    }
    if let Some(w) = &c.witness {
        writeln!(out, "witness: {}", serde_json::to_string(w).unwrap()).unwrap();
    }
    for (name, v) in &c.residuals {
        writeln!(out, "  {name} = {v:.3e}").unwrap();
    }
    out
}

fn residuals_csv(c: &Certificate) -> String {
    let mut out = String::from("name,value,threshold\n");
    for (name, v) in &c.residuals {
        let t = c.thresholds.get(name).map_or(String::new(), |t| format!("{t:e}"));
        writeln!(out, "{name},{v:e},{t}").unwrap();
    }
    out
}

pub fn certify(a: &RunArgs) -> Result<Report, CliError> {
    let cert = match a.input.resolve()? {
        Source::Graph(g) => is_spectral_graph(&g, a.k, a.tol.tol_balance)?,
        Source::Points(pc) => is_spectral_polytope(&convex_hull(&pc, a.tol.tol_hull)?, a.tol.tol_balance)?,
    };
    let mut r = Report::new(certificate_summary(&cert), cert.to_json());
    r.csv = Some(residuals_csv(&cert));
    Ok(r)
}

pub fn izmestiev(a: &RunArgs, scheme: SchemeArg, step: f64, tol_audit: f64) -> Result<Report, CliError> {
    let b = build(a)?;
    let p = &b.polytope;
    full_dimensional(p)?;
    let x = match scheme {
        SchemeArg::Ridge => izmestiev_ridge(p)?,
        SchemeArg::Fd => izmestiev_fd(p, step)?,
    };
    let report = audit(&x, p, tol_audit);
    let skel = skeleton_graph(p).graph;
    let criterion = theta2_criterion(&x, &skel, a.tol.tol_criterion)?;
    let mut summary = format!("Izmestiev matrix: {} x {}, scheme {:?}\n", x.n(), x.n(), scheme).to_lowercase();
    for (name, item) in &report.properties {
        writeln!(summary, "  {name}: {} (margin {:.3e})", if item.pass { "pass" } else { "FAIL" }, item.margin).unwrap();
    }
    summary.push_str("criterion ");
    summary.push_str(&certificate_summary(&criterion));
    let result = json!({
        "vertices": p.vertices.iter().map(|v| v + 1).collect::<Vec<_>>(),
        "matrix": rows_json(&x.x),
        "scale": x.scale,
        "scheme": x.scheme,
        "residuals": x.residuals,
        "diagonal_residual": x.diagonal_residual,
        "notes": x.notes,
        "audit": report,
        "criterion": criterion.to_json(),
    });
    let mut r = Report::new(summary, result);
    r.csv = Some(x.to_csv());
    r.notes = x.notes.iter().map(|n| format!("note: {n}")).collect();
    Ok(r)
}

pub fn metrics(a: &RunArgs) -> Result<Report, CliError> {
    let b = build(a)?;
    let p = &b.polytope;
    full_dimensional(p)?;
    let s = spectrum(&skeleton_graph(p).graph, a.tol.tol_grouping)?;
    let m = metric_report(p, &s)?;
    let mut summary = format!("degree {}, theta2 {:.10}\n", m.degree, m.theta2);
    writeln!(summary, "edge/circumradius: {:.12} predicted {:.12} gap {:.3e}", m.ratio, m.predicted_ratio, m.gaps.ratio).unwrap();
    writeln!(
        summary,
        "dual dihedral angle: predicted {:.12} rad, largest gap {:.3e} (cosine gap {:.3e})",
        m.predicted_angle, m.gaps.angle, m.gaps.cosine
    )
    .unwrap();
    let mut r = Report::new(summary, serde_json::to_value(&m).expect("report serializes"));
    r.csv = Some(m.to_csv());
    r.notes = m.notes.iter().map(|n| format!("note: {n}")).collect();
    Ok(r)
}

pub fn catalog(tol: &TolArgs, class: ScaleClass) -> Result<Report, CliError> {
    let t = Tolerances {
        grouping: tol.tol_grouping,
        hull: tol.tol_hull,
        balance: tol.tol_balance,
        criterion: tol.tol_criterion,
    };
    let s = run_catalog(&class.up_to(), &t)?;
    let mut r = Report::new(s.to_table(), s.to_json());
    if !s.all_passed() {
        r.exit = CATALOG_MISMATCH;
        r.notes.push(format!("error: {} catalog entries disagree with their expectations", s.failed));
    }
    Ok(r)
}
