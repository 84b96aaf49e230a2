use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn k3wall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3wall"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

fn schema_errors(report: &Value) -> Vec<String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    validator.iter_errors(report).map(|e| e.to_string()).collect()
}

#[test]
fn verify_thirteen_by_chain_search() {
    let o = k3wall(&["verify", "--p", "13", "--smax", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["surface"]["m"], 3);
    assert_eq!(r["surface"]["g"], 14);
    let poly = check(&r, "polygon");
    assert_eq!(poly["status"], "Verified");
    assert_eq!(poly["numbers"]["max_interior_bound"], 21);
    assert_eq!(check(&r, "grey_region_roots")["search_bounds"]["s_max"], 2000);
    assert!(r["runtime_ms"]["polygon"].is_u64());
    assert_eq!(schema_errors(&r), Vec::<String>::new());
}

#[test]
fn verify_thirty_one_by_closed_form() {
    let o = k3wall(&["verify", "--p", "31"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let poly = check(&r, "polygon");
    assert_eq!(poly["numbers"]["method"], "closed form");
    assert_eq!(poly["numbers"]["f1"], "81/80");
    assert_eq!(check(&r, "grey_region_roots")["search_bounds"]["s_max"], 100_000);
    assert_eq!(schema_errors(&r), Vec::<String>::new());
}

#[test]
fn composite_is_a_usage_error() {
    let o = k3wall(&["verify", "--p", "12"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a prime"));
    assert_eq!(k3wall(&["verify", "--p", "11"]).status.code(), Some(64));
}

#[test]
fn reports_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let path = dir.path().join(name);
        let mut args = vec!["verify", "--p", "17", "--smax", "500", "--report", path.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert_eq!(k3wall(&args).status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.json", &["--no-timings"]), run("b.json", &["--no-timings"]));
    assert_eq!(run("a.md", &["--no-timings", "--format", "md"]), run("b.md", &["--no-timings", "--format", "md"]));
    let timed: Value = serde_json::from_slice(&run("c.json", &[])).unwrap();
    let plain: Value = serde_json::from_slice(&run("d.json", &["--no-timings"])).unwrap();
    assert_eq!(timed["checks"], plain["checks"]);
    assert!(plain.get("runtime_ms").is_none());
}

#[test]
fn report_validates_and_round_trips() {
    let o = k3wall(&["verify", "--p", "17", "--smax", "500", "--no-timings"]);
    let text = stdout(&o);
    let r: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(schema_errors(&r), Vec::<String>::new());
    let again: Value = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(again, r);
    let tables = r["tables"].as_array().unwrap();
    assert_eq!(tables.len(), 2);
    assert!(tables.iter().any(|t| !t["paper_mismatches"].as_array().unwrap().is_empty()));
    let mut bad = r.clone();
    bad["checks"][0]["status"] = "Unknown".into();
    assert!(!schema_errors(&bad).is_empty());
}

#[test]
fn budget_exhaustion_is_capped() {
    let o = k3wall(&["verify", "--p", "59", "--smax", "100", "--budget-sec", "0.2", "--no-timings"]);
    assert_eq!(o.status.code(), Some(2));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let poly = check(&r, "polygon");
    assert_eq!(poly["status"], "Capped");
    assert!(poly["disclaimer"].is_string());
    assert_eq!(check(&r, "m_bound")["status"], "Verified");
    assert_eq!(schema_errors(&r), Vec::<String>::new());
}

#[test]
fn markdown_format() {
    let o = k3wall(&["verify", "--p", "37", "--smax", "100", "--format", "md"]);
    assert_eq!(o.status.code(), Some(0));
    let md = stdout(&o);
    assert!(md.starts_with("# k3wall"));
    assert!(md.contains("| polygon | Verified |"));
    assert!(md.contains("searched s_max = 100"));
}

#[test]
fn range_prints_one_line_per_prime() {
    let o = k3wall(&["verify-range", "--from", "10", "--to", "45", "--smax", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    let ps: Vec<&str> = lines.iter().map(|l| l.split_whitespace().nth(2).unwrap()).collect();
    assert_eq!(ps, ["13", "17", "19", "23", "29", "31", "37", "41", "43"]);
    assert!(lines.iter().all(|l| l.contains(": pass")), "{lines:?}");
}

#[test]
fn tables_for_seventeen() {
    let o = k3wall(&["tables", "--p", "17"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("Table 1") && out.contains("Table 2"));
    let even_l1 = out
        .split("Table 2")
        .nth(1)
        .unwrap()
        .lines()
        .find(|l| l.trim_start().starts_with("l1"))
        .unwrap();
    let cells: Vec<&str> = even_l1.split_whitespace().skip(1).collect();
    assert_eq!(cells[..5], ["7", "13", "21", "28", "42"]);
    assert_eq!(cells.last(), Some(&"84"));
    assert!(out.contains("paper mismatch: Table 1 57+9i l1: computed 34, printed 35"));
}

#[test]
fn tables_reject_other_pairs() {
    let o = k3wall(&["tables", "--p", "13"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported pair"));
}

#[test]
fn roots_for_twenty_three() {
    let o = k3wall(&["roots", "--p", "23", "--smax", "100000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no roots found; segments (o p_v), (o q), (o p_u): Proved"));
}

#[test]
fn triangle_figure() {
    let dir = tempfile::tempdir().unwrap();
    let render = |name: &str| {
        let path = dir.path().join(name);
        let o = k3wall(&["figure", "--p", "13", "--kind", "triangle", "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read_to_string(path).unwrap()
    };
    let svg = render("a.svg");
    assert_eq!(svg, render("b.svg"));
    assert!(svg.starts_with("<svg") && svg.contains(r#"version="1.1""#));
    assert_eq!(svg.matches("<path").count(), 3);
    assert!(svg.matches(r#"class="lattice""#).count() >= 40);
}

#[test]
fn plane_figures() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["holes", "grey"] {
        let path = dir.path().join(format!("{kind}.svg"));
        let o = k3wall(&["figure", "--p", "23", "--kind", kind, "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let svg = std::fs::read_to_string(path).unwrap();
        assert!(svg.contains(r#"class="parabola""#));
    }
    let o = k3wall(&["figure", "--p", "23", "--kind", "grey", "--out", "/nonexistent/dir/f.svg"]);
    assert_eq!(o.status.code(), Some(73));
}
