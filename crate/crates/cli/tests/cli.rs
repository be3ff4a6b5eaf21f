use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use entropygate_cli::ReportDocument;

fn entropygate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entropygate"))
        .args(args)
        .env_remove("ENTROPYGATE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
        .parse()
        .unwrap()
}

#[test]
fn thermo_polytropic_point() {
    let o = entropygate(&[
        "thermo",
        "--model",
        "polytropic",
        "--gamma",
        "1.4",
        "--cv",
        "1",
        "--rho",
        "1",
        "--e",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!((value(&text, "T") - 1.0).abs() < 1e-12);
    assert!((value(&text, "p") - 0.4).abs() < 1e-12);
    assert!(value(&text, "s").abs() < 1e-12);
    assert!(!text.contains("NEGATIVE-TEMPERATURE"));
}

#[test]
fn thermo_negative_temperature_warns() {
    let o = entropygate(&["thermo", "--model", "neg-temp", "--rho", "1", "--e", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!((value(&text, "T") + 0.5).abs() < 1e-12);
    assert!(text
        .lines()
        .any(|l| l.starts_with("WARNING: NEGATIVE-TEMPERATURE")));
}

#[test]
fn thermo_zero_density_is_a_domain_error() {
    let o = entropygate(&["thermo", "--rho", "0", "--e", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("density must be positive"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn certify_polytropic_is_consistent() {
    let o = entropygate(&[
        "certify",
        "--model",
        "polytropic",
        "--gamma",
        "1.4",
        "--check",
        "all",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "PROP3: consistent"));
    assert!(text.contains("sigma: certified-concave"));
    assert!(text.contains("eta: certified-convex"));
}

#[test]
fn certify_pathological_reports_violations() {
    let o = entropygate(&[
        "certify",
        "--model",
        "pathological",
        "--gamma",
        "0.8",
        "--check",
        "all",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("sigma: violated"));
    assert!(text.contains("eta: violated"));
    assert!(text.contains("temperature: all-positive"));
    assert!(text.lines().any(|l| l == "PROP3: consistent"));
}

#[test]
fn certify_negative_temperature_single_checks() {
    let t = entropygate(&["certify", "--model", "neg-temp", "--check", "temperature"]);
    assert_eq!(t.status.code(), Some(1));
    assert!(stdout(&t).contains("temperature: violated"));
    let s = entropygate(&["certify", "--model", "neg-temp", "--check", "sigma"]);
    assert_eq!(s.status.code(), Some(0));
}

#[test]
fn malformed_regions_are_usage_errors() {
    for region in ["2:1,0.5:2,0.5:2", "0.5:2,0.5:2", "a:b,1:2,1:2"] {
        let o = entropygate(&["certify", "--check", "sigma", "--extensive", region]);
        assert_eq!(o.status.code(), Some(2), "{region}");
    }
    let o = entropygate(&["certify", "--check", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_and_parse() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for path in [&a, &b] {
        let o = entropygate(&[
            "certify",
            "--model",
            "pathological",
            "--sampling",
            "random",
            "--samples",
            "300",
            "--no-timestamp",
            "--report",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(1));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let doc = ReportDocument::parse(&text).unwrap();
    assert_eq!(doc.get("sigma.verdict"), Some("violated"));
    assert_eq!(doc.get("equivalence.consistent"), Some("true"));
    assert_eq!(doc.get("config.seed"), Some("42"));
    assert!(doc.get_f64("eta.worst_eigenvalue").unwrap() < 0.0);
    assert_eq!(ReportDocument::parse(&doc.to_string()).unwrap(), doc);

    let stamped = dir.path().join("c.txt");
    entropygate(&[
        "certify",
        "--check",
        "sigma",
        "--report",
        stamped.to_str().unwrap(),
    ]);
    assert!(fs::read_to_string(&stamped)
        .unwrap()
        .contains("# generated at unix time"));
}

#[test]
fn seed_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_entropygate"))
        .args([
            "certify",
            "--check",
            "sigma",
            "--sampling",
            "random",
            "--no-timestamp",
            "--report",
            "-",
        ])
        .env("ENTROPYGATE_SEED", "7")
        .output()
        .unwrap();
    let doc = ReportDocument::parse(
        &stdout(&o)
            .lines()
            .filter(|l| l.contains(" = ") || l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n"),
    )
    .unwrap();
    assert_eq!(doc.get("config.seed"), Some("7"));
}

#[test]
fn simulate_sod_summary_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let diag = dir.path().join("diag.csv");
    let prof = dir.path().join("profile.csv");
    let o = entropygate(&[
        "simulate",
        "--initial",
        "sod",
        "--n",
        "200",
        "--t-end",
        "0.2",
        "--diagnostics",
        diag.to_str().unwrap(),
        "--profile",
        prof.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.lines().any(|l| l.starts_with("min dS per step ≥ 0")),
        "{text}"
    );
    assert!(text.contains("total entropy produced"));
    let d = fs::read_to_string(&diag).unwrap();
    assert!(d.starts_with("t,entropy_total,dS,mass,momentum,energy\n"));
    let p = fs::read_to_string(&prof).unwrap();
    assert!(p.starts_with("x,rho,u,p,s\n"));
    assert_eq!(p.lines().count(), 201);
}

#[test]
fn simulate_smooth_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let diag = dir.path().join("smooth.csv");
    let o = entropygate(&[
        "simulate",
        "--initial",
        "smooth",
        "--n",
        "100,200,400",
        "--t-end",
        "0.5",
        "--refine",
        "--diagnostics",
        diag.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text
        .lines()
        .find(|l| l.starts_with("observed entropy-drift order"))
        .unwrap();
    let order: f64 = line
        .split(" = ")
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(order >= 0.8, "{line}");
    for n in [100, 200, 400] {
        assert!(dir.path().join(format!("smooth_n{n}.csv")).exists());
    }
}

#[test]
fn simulate_rejects_bad_cfl() {
    let o = entropygate(&["simulate", "--cfl", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cfl"));
}

fn write_table(path: &Path, e_range: &str, points: &str) {
    let o = entropygate(&[
        "tabulate",
        "--model",
        "polytropic",
        "--rho-range",
        "0.5:2",
        "--e-range",
        e_range,
        "--points",
        points,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn tabulated_model_reproduces_pressure() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("poly.tab");
    write_table(&table, "0.5:2", "64");
    for (rho, e) in [(0.7, 0.9), (1.0, 1.0), (1.6, 1.3), (1.2, 1.8)] {
        let o = entropygate(&[
            "thermo",
            "--model",
            "tabulated",
            "--table",
            table.to_str().unwrap(),
            "--rho",
            &rho.to_string(),
            "--e",
            &e.to_string(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let p = value(&stdout(&o), "p");
        let exact = 0.4 * rho * e;
        assert!(((p - exact) / exact).abs() <= 1e-3, "p {p} vs {exact}");
    }
    let o = entropygate(&[
        "certify",
        "--model",
        "tabulated",
        "--table",
        table.to_str().unwrap(),
        "--check",
        "eta",
        "--conserved",
        "0.8:1.7,-0.2:0.2,1.2:1.4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn table_file_errors() {
    let dir = tempfile::tempdir().unwrap();
    let decreasing = dir.path().join("dec.tab");
    fs::write(
        &decreasing,
        "rho-axis: 1 0.5 2\ne-axis: 1 2\n1 2\n1 2\n1 2\n",
    )
    .unwrap();
    let o = entropygate(&[
        "thermo",
        "--model",
        "tabulated",
        "--table",
        decreasing.to_str().unwrap(),
        "--rho",
        "1",
        "--e",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rho-axis"), "{}", stderr(&o));

    let short = dir.path().join("short.tab");
    fs::write(&short, "rho-axis: 0.5 1 2\ne-axis: 1 2\n1 2\n1 2\n").unwrap();
    let o = entropygate(&[
        "thermo",
        "--model",
        "tabulated",
        "--table",
        short.to_str().unwrap(),
        "--rho",
        "1",
        "--e",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("expected 3 rows, found 2"), "{msg}");

    let o = entropygate(&["thermo", "--model", "tabulated", "--rho", "1", "--e", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulation_abort_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("narrow.tab");
    let o = entropygate(&[
        "tabulate",
        "--rho-range",
        "0.2:5",
        "--e-range",
        "0.5:2",
        "--points",
        "40",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    // colliding streams heat the gas past the table
    let cells = dir.path().join("cells.csv");
    let mut rows = String::from("rho,q,eps\n");
    for i in 0..16 {
        let u: f64 = if i < 8 { 2.0 } else { -2.0 };
        rows.push_str(&format!("1,{u},{}\n", 1.0 + 0.5 * u * u));
    }
    fs::write(&cells, rows).unwrap();
    let o = entropygate(&[
        "simulate",
        "--model",
        "tabulated",
        "--table",
        table.to_str().unwrap(),
        "--cells",
        cells.to_str().unwrap(),
        "--t-end",
        "0.2",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stderr(&o).contains("step rejected"), "{}", stderr(&o));
}
