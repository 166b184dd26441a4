use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heathsym"))
        .args(args)
        .env_remove("HEATHSYM_SEED")
        .output()
        .unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn catalog_list_has_every_entry() {
    let o = run(&["catalog", "list"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["count"], 22);
}

#[test]
fn verify_reports_each_generator() {
    let o = run(&["catalog", "verify", "A_4_4", "--params", r#"{"A":1,"B":2}"#]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["variants"][0]["generators"].as_array().unwrap().len(), 4);
}

#[test]
fn literal_row_fails_with_exit_1() {
    let o = run(&[
        "catalog",
        "verify",
        "A_3_5_10",
        "--sign",
        "minus",
        "--form",
        "literal",
        "--params",
        r#"{"A":1.3}"#,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["passed"], false);
}

#[test]
fn inadmissible_parameters_name_the_constraint() {
    let o = run(&[
        "catalog",
        "verify",
        "A_3_5_2",
        "--params",
        r#"{"B":0,"A":1}"#,
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("B not in {0, -1, -2}"));
}

#[test]
fn unknown_entry_is_invalid_input() {
    assert_eq!(run(&["catalog", "verify", "A_9"]).status.code(), Some(2));
}

#[test]
fn transform_round_trip() {
    let fwd = json(&run(&["transform", r#"{"a":0,"b":1,"f":"u"}"#]));
    let fhat = fwd["fhat"].as_str().unwrap();
    let back = json(&run(&[
        "transform",
        &format!(r#"{{"fhat":"{fhat}","a":0,"b":1}}"#),
    ]));
    assert_eq!(back["f"], "u");
    assert_eq!(fwd["linearizable"], false);
}

#[test]
fn transform_flags_linearizable_sources() {
    let o = run(&["transform", r#"{"a":1,"b":2,"f":"x^2 + 3*exp((x+u)/4)"}"#]);
    let v = json(&o);
    assert_eq!(v["linearizable"], true);
    assert_eq!(v["g"], "6");
}

#[test]
fn malformed_expression_reports_position() {
    let o = run(&["transform", r#"{"a":0,"b":1,"f":"u +* 2"}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 3"));
}

#[test]
fn check_terminal_passes() {
    let o = run(&["check", "terminal", "--params", r#"{"a":1,"b":1,"T":1}"#]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["pde_residual_max"].as_f64().unwrap() < 1e-7);
    assert_eq!(v["boundary_checks"][0]["passed"], true);
}

#[test]
fn check_barrier_reports_payoff_as_informational() {
    let v = json(&run(&["check", "barrier"]));
    let payoff = v["boundary_checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "call payoff at t = T")
        .unwrap();
    assert_eq!(payoff["status"], "not satisfied (informational)");
    assert_eq!(v["passed"], true);
}

#[test]
fn pole_in_box_is_exit_3() {
    let o = run(&["check", "a359", "--params", r#"{"c1":0.2}"#]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("domain violation") && err.contains("3*b^2*t - 6*c1 + x"));
}

#[test]
fn solve_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.csv");
    let o = run(&[
        "solve",
        "barrier",
        "--stride",
        "64",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let summary = json(&o);
    assert!(summary["final"]["linf"].as_f64().unwrap() < 1e-2);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("tau,x,phi\n"));

    // recompute the final interior error from the CSV rows
    let last_tau = summary["final"]["tau"].as_f64().unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    let last: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] == last_tau).collect();
    let spec =
        heathsym::solutions::exponential_barrier(1.0, 1.0, 0.05, 0.9, 1.0, 1.0, 1.0).unwrap();
    let exact = heathsym::solutions::barrier_heat_form(&spec)
        .compile(&["x", "tau"])
        .unwrap();
    let linf = last[1..last.len() - 1]
        .iter()
        .map(|r| (r[2] - exact.eval(&[r[1], r[0]]).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!((linf - summary["final"]["linf"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn solve_in_heath_variables() {
    let o = run(&[
        "solve",
        "barrier-fixed",
        "--heath",
        "--stride",
        "64",
        "--grid",
        r#"{"nx":32,"nt":33}"#,
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("t,x,u\n"));
}

#[test]
fn unstable_explicit_step_is_exit_2_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.csv");
    let o = run(&[
        "solve",
        "heat",
        "--scheme",
        "explicit",
        "--grid",
        r#"{"nt":10}"#,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("h^2/2"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn barrier_leaving_grid_is_exit_3() {
    let o = run(&["solve", "barrier", "--grid", r#"{"x":[0.88,3.0]}"#]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn converge_heat_is_second_order() {
    let v = json(&run(&["converge", "heat", "--levels", "15,31,63,127"]));
    assert!((v["order"].as_f64().unwrap() - 2.0).abs() < 0.2);
    assert_eq!(
        run(&["converge", "heat", "--levels", "16"]).status.code(),
        Some(2)
    );
}

#[test]
fn bad_seed_variable_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_heathsym"))
        .args(["check", "a22"])
        .env("HEATHSYM_SEED", "x")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
