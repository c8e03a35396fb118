use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn eigenpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eigenpoly")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--emit", "json"]);
    let o = eigenpoly(&all);
    assert!(o.status.success(), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("eigenpoly-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn certify_cube() {
    let o = eigenpoly(&["certify", "--gen", "hypercube:3", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("certificate: spectral_graph"));
    let v = json(&["certify", "--gen", "hypercube:3"]);
    assert_eq!(v["result"]["kind"], "spectral_graph");
    assert_eq!(v["config"]["k"], 2);
    assert_eq!(v["config"]["tolerances"]["tol_grouping"], 1e-8);
}

#[test]
fn negative_verdict_still_exits_zero() {
    let v = json(&["certify", "--gen", "petersen"]);
    assert_eq!(v["result"]["kind"], "not_spectral");
    let o = eigenpoly(&["certify", "--gen", "cycle:5", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not_spectral"));
}

#[test]
fn pentagram_warning_and_off() {
    let o = eigenpoly(&["polytope", "--gen", "cycle:5", "--k", "3", "--emit", "off"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("input edges not realized as hull edges"));
    let off = stdout(&o);
    let lines: Vec<&str> = off.lines().collect();
    assert_eq!(lines[0], "OFF");
    assert_eq!(lines[1], "5 1 5");
}

#[test]
fn prism_spectrum_table() {
    let v = json(&["spectrum", "--gen", "prism:3"]);
    assert_eq!(v["result"]["groups"].as_array().unwrap().len(), 4);
    assert_eq!(v["result"]["max_multiplicity"], 2);
    let o = eigenpoly(&["polytope", "--gen", "prism:3"]);
    assert!(stderr(&o).contains("Dimension too low"));
}

#[test]
fn high_dimension_needs_projection() {
    let o = eigenpoly(&["polytope", "--gen", "johnson:5,2", "--emit", "off"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("exceeds 3"));
    assert!(stdout(&o).is_empty());
    let v = json(&["polytope", "--gen", "johnson:5,2"]);
    assert_eq!(v["result"]["polytope"]["dim"], 4);
    assert_eq!(v["result"]["status"], "projection_needed");
}

#[test]
fn json_artifacts_are_byte_identical() {
    for args in [
        vec!["polytope", "--gen", "dodecahedron"],
        vec!["izmestiev", "--gen", "hypercube:3", "--scheme", "fd"],
        vec!["certify", "--gen", "johnson:5,2"],
        vec!["catalog"],
    ] {
        let mut bodies = Vec::new();
        for run in 0..2 {
            let dir = scratch(&format!("{}-{run}", args[0]));
            let mut all = args.clone();
            all.extend(["--emit", "json,csv", "--out", dir.to_str().unwrap()]);
            let o = eigenpoly(&all);
            assert!(o.status.success(), "{}", stderr(&o));
            let name = format!("{}.json", args[0]);
            bodies.push(fs::read(dir.join(&name)).unwrap());
            let _ = fs::remove_dir_all(&dir);
        }
        assert_eq!(bodies[0], bodies[1], "{args:?}");
    }
}

#[test]
fn files_as_input() {
    let dir = scratch("inputs");
    let edges = dir.join("c4.edges");
    fs::write(&edges, "4\n1 2\n2 3\n3 4\n4 1\n").unwrap();
    let v = json(&["spectrum", "--in", edges.to_str().unwrap(), "--format", "edges"]);
    assert_eq!(v["result"]["groups"][0]["theta"], 2.0);
    let g6 = dir.join("petersen.g6");
    fs::write(&g6, "IheA@GUAo\n").unwrap();
    let v = json(&["spectrum", "--in", g6.to_str().unwrap()]);
    assert_eq!(v["result"]["vertices"], 10);
    let pts = dir.join("octahedron.txt");
    fs::write(&pts, "1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -1\n").unwrap();
    let v = json(&["certify", "--in", pts.to_str().unwrap(), "--format", "points"]);
    assert_eq!(v["result"]["kind"], "spectral_polytope");
    let v = json(&["metrics", "--in", pts.to_str().unwrap(), "--format", "points"]);
    assert!(v["result"]["gaps"]["cosine"].as_f64().unwrap() < 1e-12);
    let o = eigenpoly(&["spectrum", "--in", dir.join("missing").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error[input]"));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn izmestiev_on_catalog_polytope() {
    let v = json(&["izmestiev", "--poly", "rhombic_triacontahedron"]);
    let audit = v["result"]["audit"]["properties"].as_object().unwrap();
    assert_eq!(audit.len(), 5);
    assert!(audit.values().all(|p| p["pass"] == true));
    assert_eq!(v["result"]["criterion"]["kind"], "inconclusive");
    let o = eigenpoly(&["izmestiev", "--poly", "cube_of_nothing"]);
    assert_eq!(o.status.code(), Some(15));
}

#[test]
fn invalid_configuration() {
    for args in [
        vec!["certify", "--gen", "cycle:5", "--k", "0"],
        vec!["certify", "--gen", "cycle:5", "--tol-hull", "-1"],
        vec!["certify", "--gen", "cycle:5", "--poly", "rhombic_dodecahedron"],
        vec!["certify"],
        vec!["spectrum", "--poly", "rhombic_dodecahedron"],
    ] {
        assert_eq!(eigenpoly(&args).status.code(), Some(2), "{args:?}");
    }
    assert_ne!(eigenpoly(&["certify", "--gen", "cycle:5", "--bogus"]).status.code(), Some(0));
    let o = eigenpoly(&["certify", "--gen", "cycle:5", "--k", "9"]);
    assert_eq!(o.status.code(), Some(12));
}

#[test]
fn thread_cap_from_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_eigenpoly"))
            .args(["certify", "--gen", "icosahedron"])
            .env("EIGENPOLY_THREADS", v)
            .output()
            .unwrap()
    };
    assert!(run("1").status.success());
    assert_eq!(run("0").status.code(), Some(2));
}
