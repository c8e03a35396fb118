//! Named graphs and polytopes with expected verdicts, and the harness that
//! recomputes every expectation through the full pipeline.

mod polytopes;

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{is_balanced, is_spectral_graph, is_spectral_polytope, CertificateKind, CertifyError};
use crate::geometry::{convex_hull, skeleton_graph, GeometryError, OriginPolicy, PointConfiguration, Polytope};
use crate::graphs::{
    automorphisms, find_isomorphism, generate, generators::from_spec, transitivity, Graph, GraphError,
    TransitivityProfile, DEFAULT_SEARCH_BOUND,
};
use crate::izmestiev::{izmestiev_ridge, theta2_criterion, IzmestievError};
use crate::metrics::{metric_report, MetricsError};
use crate::spectra::{eigenmatrix, spectrum, SpectrumError};

pub use polytopes::{coordinates, POLYTOPES};

/// The embedded, versioned manifest.
pub const MANIFEST: &str = include_str!("../../resources/catalog.json");

/// The Izmestiev criterion is evaluated only up to these sizes.
pub const CRITERION_MAX_DIM: usize = 4;
pub const CRITERION_MAX_VERTICES: usize = 40;
/// Allowed deviation from the closed-form metric identities.
pub const METRIC_TOL: f64 = 1e-8;
const VALUE_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("catalog manifest is invalid: {0}")]
    Manifest(String),
    #[error("unknown polytope `{0}`")]
    UnknownPolytope(String),
    #[error("unknown scale class `{0}` (expected fast, slow or stretch)")]
    UnknownClass(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Izmestiev(#[from] IzmestievError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleClass {
    Fast,
    Slow,
    Stretch,
}

impl ScaleClass {
    /// This class and every cheaper one.
    pub fn up_to(self) -> Vec<ScaleClass> {
        [ScaleClass::Fast, ScaleClass::Slow, ScaleClass::Stretch].into_iter().filter(|c| *c <= self).collect()
    }
}

impl FromStr for ScaleClass {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fast" => Ok(ScaleClass::Fast),
            "slow" => Ok(ScaleClass::Slow),
            "stretch" => Ok(ScaleClass::Stretch),
            other => Err(CatalogError::UnknownClass(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Generator string such as `johnson:5,2`.
    Graph(String),
    /// Name in [`POLYTOPES`].
    Polytope(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Positive,
    Negative,
    BalancedControl,
}

/// Expected outcomes; absent fields are not checked.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    /// θ₂-spectral graph, or spectral polytope for coordinate entries.
    pub spectral: Option<bool>,
    /// Spectral for at least one eigenvalue index.
    pub spectral_any_k: Option<bool>,
    pub distance_transitive: Option<bool>,
    pub half_transitive: Option<bool>,
    pub aut_order: Option<u64>,
    pub dim: Option<usize>,
    pub vertices: Option<usize>,
    pub edges: Option<usize>,
    pub facets: Option<usize>,
    pub theta2: Option<f64>,
    pub theta: Option<f64>,
    pub theta_index: Option<usize>,
    pub balanced: Option<bool>,
    /// Kind emitted by the Izmestiev criterion.
    pub criterion: Option<String>,
    /// Reason code that must appear among the certificate reasons.
    pub reason: Option<String>,
    /// Generator whose graph must be isomorphic to the computed skeleton.
    pub skeleton: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub source: Source,
    pub scale_class: ScaleClass,
    pub role: Role,
    pub expected: Expected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub entries: Vec<CatalogEntry>,
}

pub fn manifest() -> Result<Manifest, CatalogError> {
    serde_json::from_str(MANIFEST).map_err(|e| CatalogError::Manifest(e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub grouping: f64,
    pub hull: f64,
    pub balance: f64,
    pub criterion: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            grouping: crate::spectra::DEFAULT_GROUPING_TOL,
            hull: crate::geometry::DEFAULT_HULL_TOL,
            balance: crate::certify::DEFAULT_BALANCE_TOL,
            criterion: crate::izmestiev::DEFAULT_CRITERION_TOL,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricGaps {
    pub ratio: f64,
    pub cosine: f64,
}

/// Everything the pipeline measured for one entry.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Computed {
    pub theta2: Option<f64>,
    pub multiplicity: Option<usize>,
    pub verdict: Option<CertificateKind>,
    pub reasons: Vec<String>,
    pub spectral_any_k: Option<bool>,
    pub theta: Option<f64>,
    pub theta_index: Option<usize>,
    pub balanced: Option<bool>,
    pub dim: Option<usize>,
    pub vertices: Option<usize>,
    pub edges: Option<usize>,
    pub facets: Option<usize>,
    /// Decimal string; orders can exceed 2^53.
    pub aut_order: Option<String>,
    pub transitivity: Option<TransitivityProfile>,
    pub criterion: Option<CertificateKind>,
    pub criterion_theta: Option<f64>,
    pub metrics: Option<MetricGaps>,
    pub skeleton_matches: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryResult {
    pub name: String,
    pub scale_class: ScaleClass,
    pub role: Role,
    pub passed: bool,
    pub mismatches: Vec<String>,
    pub error: Option<String>,
    pub computed: Computed,
    /// Wall time; left out of JSON so that artifacts are reproducible.
    #[serde(skip)]
    pub elapsed_ms: u128,
}

fn hull_of(m: nalgebra::DMatrix<f64>, tol: f64) -> Result<Polytope, CatalogError> {
    Ok(convex_hull(&PointConfiguration::new(m, OriginPolicy::AsGiven)?, tol)?)
}

fn record_shape(c: &mut Computed, p: &Polytope) {
    c.dim = Some(p.dim);
    c.vertices = Some(p.vertex_count());
    c.edges = Some(p.edges.len());
    c.facets = Some(p.facets.len());
}

fn record_group(c: &mut Computed, g: &Graph) -> Result<TransitivityProfile, CatalogError> {
    let aut = automorphisms(g, DEFAULT_SEARCH_BOUND.max(g.n()))?;
    let t = transitivity(g, &aut);
    c.aut_order = Some(aut.order.to_string());
    c.transitivity = Some(t.clone());
    Ok(t)
}

/// Izmestiev criterion and metric identities on a full-dimensional polytope.
fn geometric_checks(c: &mut Computed, p: &Polytope, t: &TransitivityProfile, spectral: bool, tol: &Tolerances) -> Result<(), CatalogError> {
    let skel = skeleton_graph(p).graph;
    if p.is_full_dimensional() && p.dim >= 2 && p.dim <= CRITERION_MAX_DIM && p.vertex_count() <= CRITERION_MAX_VERTICES {
        let x = izmestiev_ridge(p)?;
        let cert = theta2_criterion(&x, &skel, tol.criterion)?;
        c.criterion = Some(cert.kind);
        c.criterion_theta = cert.theta;
    }
    if spectral && t.vertex_transitive && t.edge_transitive {
        let s = spectrum(&skel, tol.grouping)?;
        let r = metric_report(p, &s)?;
        c.metrics = Some(MetricGaps { ratio: r.gaps.ratio, cosine: r.gaps.cosine });
    }
    Ok(())
}

fn run_graph(spec: &str, expected: &Expected, tol: &Tolerances) -> Result<Computed, CatalogError> {
    let g = from_spec(spec)?;
    let mut c = Computed::default();
    let s = spectrum(&g, tol.grouping)?;
    if s.groups.len() >= 2 {
        c.theta2 = Some(s.groups[1].theta);
        c.multiplicity = Some(s.groups[1].multiplicity);
    }
    let cert = is_spectral_graph(&g, 2, tol.balance)?;
    c.verdict = Some(cert.kind);
    c.reasons = cert.reasons.clone();
    if expected.spectral_any_k.is_some() {
        let mut any = false;
        for k in 1..=s.groups.len() {
            any |= is_spectral_graph(&g, k, tol.balance)?.kind == CertificateKind::SpectralGraph;
        }
        c.spectral_any_k = Some(any);
    }
    let t = record_group(&mut c, &g)?;
    let p = hull_of(eigenmatrix(&s, 2)?.entries, tol.hull)?;
    record_shape(&mut c, &p);
    let spectral = cert.kind == CertificateKind::SpectralGraph;
    if spectral {
        geometric_checks(&mut c, &p, &t, spectral, tol)?;
    }
    Ok(c)
}

fn run_polytope(name: &str, expected: &Expected, tol: &Tolerances) -> Result<Computed, CatalogError> {
    let rows = coordinates(name)?;
    let pc = PointConfiguration::from_rows(&rows, OriginPolicy::AsGiven)?;
    let p = convex_hull(&pc, tol.hull)?;
    let mut c = Computed::default();
    record_shape(&mut c, &p);
    let skel = skeleton_graph(&p);
    if let Some(other) = &expected.skeleton {
        c.skeleton_matches = Some(find_isomorphism(&skel.graph, &generate(other, &[])?).is_some());
    }
    let cert = is_spectral_polytope(&p, tol.balance)?;
    c.verdict = Some(cert.kind);
    c.reasons = cert.reasons.clone();
    c.theta = cert.theta;
    c.theta_index = cert.k;
    let arrangement = PointConfiguration::new(p.arrangement(), OriginPolicy::AsGiven)?;
    c.balanced = Some(is_balanced(&arrangement, &skel.graph, tol.balance)?.kind == CertificateKind::Balanced);
    let s = spectrum(&skel.graph, tol.grouping)?;
    if s.groups.len() >= 2 {
        c.theta2 = Some(s.groups[1].theta);
        c.multiplicity = Some(s.groups[1].multiplicity);
    }
    let t = record_group(&mut c, &skel.graph)?;
    geometric_checks(&mut c, &p, &t, cert.kind == CertificateKind::SpectralPolytope, tol)?;
    Ok(c)
}

fn compare(entry: &CatalogEntry, c: &Computed) -> Vec<String> {
    let e = &entry.expected;
    let mut out = Vec::new();
    let mut check = |what: &str, ok: bool, exp: String, got: String| {
        if !ok {
            out.push(format!("{what}: expected {exp}, got {got}"));
        }
    };
    let positive_kind = match entry.source {
        Source::Graph(_) => CertificateKind::SpectralGraph,
        Source::Polytope(_) => CertificateKind::SpectralPolytope,
    };
    if let Some(x) = e.spectral {
        let got = c.verdict == Some(positive_kind);
        check("spectral", got == x, x.to_string(), format!("{:?}", c.verdict));
    }
    if let Some(x) = e.spectral_any_k {
        check("spectral_any_k", c.spectral_any_k == Some(x), x.to_string(), format!("{:?}", c.spectral_any_k));
    }
    let t = c.transitivity.as_ref();
    if let Some(x) = e.distance_transitive {
        let got = t.map(|t| t.distance_transitive);
        check("distance_transitive", got == Some(x), x.to_string(), format!("{got:?}"));
    }
    if let Some(x) = e.half_transitive {
        let got = t.map(|t| t.half_transitive);
        check("half_transitive", got == Some(x), x.to_string(), format!("{got:?}"));
    }
    if let Some(x) = e.aut_order {
        check("aut_order", c.aut_order == Some(x.to_string()), x.to_string(), format!("{:?}", c.aut_order));
    }
    for (what, exp, got) in [
        ("dim", e.dim, c.dim),
        ("vertices", e.vertices, c.vertices),
        ("edges", e.edges, c.edges),
        ("facets", e.facets, c.facets),
        ("theta_index", e.theta_index, c.theta_index),
    ] {
        if let Some(x) = exp {
            check(what, got == Some(x), x.to_string(), format!("{got:?}"));
        }
    }
    for (what, exp, got) in [("theta2", e.theta2, c.theta2), ("theta", e.theta, c.theta)] {
        if let Some(x) = exp {
            check(what, got.is_some_and(|g| (g - x).abs() <= VALUE_TOL), x.to_string(), format!("{got:?}"));
        }
    }
    if let Some(x) = e.balanced {
        check("balanced", c.balanced == Some(x), x.to_string(), format!("{:?}", c.balanced));
    }
    if let Some(x) = &e.criterion {
        let got = c.criterion.map(|k| serde_json::to_value(k).unwrap().as_str().unwrap().to_string());
        check("criterion", got.as_deref() == Some(x.as_str()), x.clone(), format!("{got:?}"));
    }
    if let Some(x) = &e.reason {
        check("reason", c.reasons.iter().any(|r| r.starts_with(x.as_str())), x.clone(), format!("{:?}", c.reasons));
    }
    if e.skeleton.is_some() {
        check("skeleton", c.skeleton_matches == Some(true), "isomorphic".into(), format!("{:?}", c.skeleton_matches));
    }
    if entry.role == Role::Negative && c.verdict == Some(positive_kind) {
        check("negative control", false, "a negative verdict".into(), "spectral".into());
    }
    if entry.role == Role::Negative && c.reasons.is_empty() {
        check("negative control", false, "a reason code".into(), "none".into());
    }
    if let Some(m) = &c.metrics {
        check("metric ratio gap", m.ratio <= METRIC_TOL, format!("<= {METRIC_TOL:e}"), format!("{:.3e}", m.ratio));
        check("metric angle gap", m.cosine <= METRIC_TOL, format!("<= {METRIC_TOL:e}"), format!("{:.3e}", m.cosine));
    }
    if c.criterion == Some(CertificateKind::SpectralPolytope) {
        let agrees = match (c.criterion_theta, c.theta2) {
            (Some(a), Some(b)) => (a - b).abs() <= VALUE_TOL,
            _ => false,
        };
        check("criterion theta", agrees, format!("{:?}", c.theta2), format!("{:?}", c.criterion_theta));
    }
    out
}

/// Runs one entry; execution errors are recorded, never propagated.
pub fn run_entry(entry: &CatalogEntry, tol: &Tolerances) -> EntryResult {
    let start = Instant::now();
    let outcome = match &entry.source {
        Source::Graph(spec) => run_graph(spec, &entry.expected, tol),
        Source::Polytope(name) => run_polytope(name, &entry.expected, tol),
    };
    let (computed, mismatches, error) = match outcome {
        Ok(c) => {
            let m = compare(entry, &c);
            (c, m, None)
        }
        Err(e) => (Computed::default(), Vec::new(), Some(e.to_string())),
    };
    EntryResult {
        name: entry.name.clone(),
        scale_class: entry.scale_class,
        role: entry.role,
        passed: error.is_none() && mismatches.is_empty(),
        mismatches,
        error,
        computed,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogSummary {
    pub version: String,
    pub classes: Vec<ScaleClass>,
    pub tolerances: Tolerances,
    pub passed: usize,
    pub failed: usize,
    pub results: Vec<EntryResult>,
}

impl CatalogSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("summary serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<26} {:<8} {:<16} {:>9} {:>4} {:>5} {:>6} {:>6}  {}\n",
            "entry", "class", "verdict", "theta2", "dim", "V", "E", "F", "status"
        );
        let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
        for r in &self.results {
            let c = &r.computed;
            let verdict = c.verdict.map_or("-".to_string(), |k| serde_json::to_value(k).unwrap().as_str().unwrap().to_string());
            let status = match (&r.error, r.passed) {
                (Some(e), _) => format!("ERROR {e}"),
                (None, true) => "pass".to_string(),
                (None, false) => format!("FAIL {}", r.mismatches.join("; ")),
            };
            writeln!(
                out,
                "{:<26} {:<8} {:<16} {:>9} {:>4} {:>5} {:>6} {:>6}  {} ({} ms)",
                r.name,
                format!("{:?}", r.scale_class).to_lowercase(),
                verdict,
                c.theta2.map_or("-".to_string(), |t| format!("{t:.4}")),
                opt(c.dim),
                opt(c.vertices),
                opt(c.edges),
                opt(c.facets),
                status,
                r.elapsed_ms
            )
            .unwrap();
        }
        writeln!(out, "{} passed, {} failed (manifest {})", self.passed, self.failed, self.version).unwrap();
        out
    }
}

/// Runs every manifest entry whose class is in `classes`, in parallel.
/// Results keep manifest order.
pub fn run_catalog(classes: &[ScaleClass], tol: &Tolerances) -> Result<CatalogSummary, CatalogError> {
    let m = manifest()?;
    let selected: Vec<&CatalogEntry> = m.entries.iter().filter(|e| classes.contains(&e.scale_class)).collect();
    let results: Vec<EntryResult> = selected.par_iter().map(|e| run_entry(e, tol)).collect();
    let passed = results.iter().filter(|r| r.passed).count();
    let mut classes = classes.to_vec();
    classes.sort();
    classes.dedup();
    Ok(CatalogSummary {
        version: m.version,
        classes,
        tolerances: *tol,
        passed,
        failed: results.len() - passed,
        results,
    })
}
