use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ap_lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ap-lab")).args(args).current_dir(dir).env_remove("AP_LAB_OUT").output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn decay_writes_csv_json_and_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ap_lab(tmp.path(), &["decay", "--builder", "ex4_1_phi", "--out", "run"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("run/decay.csv")).unwrap();
    assert!(csv.starts_with("T,value,bound\n"));
    assert_eq!(csv.lines().count(), 10);
    let svg = fs::read_to_string(tmp.path().join("run/decay.svg")).unwrap();
    assert!(svg.contains("stroke-dasharray") && svg.contains("bound"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("run/decay.json")).unwrap()).unwrap();
    assert_eq!(json["under_bound"], serde_json::Value::Bool(true));
    assert_eq!(json["config"]["subject"]["builder"], "ex4_1_phi");
    assert!(!tmp.path().join("run/.ap-lab.lock").exists());
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = ap_lab(tmp.path(), &["decay", "--builder", "ex4_2_F", "--tau", "1.5", "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for name in ["decay.csv", "decay.svg"] {
        assert_eq!(fs::read(tmp.path().join("a").join(name)).unwrap(), fs::read(tmp.path().join("b").join(name)).unwrap(), "{name}");
    }
}

#[test]
fn env_var_sets_the_output_directory_and_the_flag_wins() {
    let tmp = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_ap-lab");
    let run = |args: &[&str]| Command::new(bin).args(args).current_dir(tmp.path()).env("AP_LAB_OUT", "from_env").output().unwrap();
    assert!(run(&["norm", "--builder", "sin", "--t-max", "5"]).status.success());
    assert!(tmp.path().join("from_env/norm.csv").exists());
    assert!(run(&["norm", "--builder", "sin", "--t-max", "5", "--out", "from_flag"]).status.success());
    assert!(tmp.path().join("from_flag/norm.csv").exists());
}

#[test]
fn config_file_fields_are_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"subject": {"builder": "sin"}, "other": {"builder": "cos"}, "out_dir": "cfg_out", "formats": ["csv"], "classify": {"p": {"p": 1.0}}}"#;
    fs::write(tmp.path().join("run.json"), cfg).unwrap();
    let o = ap_lab(tmp.path(), &["metric", "--config", "run.json", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("cfg_out/metric.csv")).unwrap();
    assert!(csv.contains("stepanov_p3"), "{csv}");
    assert!(!tmp.path().join("cfg_out/metric.json").exists());
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        &["example", "ex4-9"][..],
        &["decay"],
        &["classify", "--builder", "no_such_function"],
        &["decay", "--builder", "sin", "--tau", "-1"],
        &["metric", "--builder", "sin"],
        &["classify", "--builder", "sin", "--config", "missing.json"],
    ] {
        let o = ap_lab(tmp.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn malformed_expression_file_names_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.json"), "{\n  \"node\": \"sin\",\n  \"child\": {\n    \"value\": 1.0\n  }\n}").unwrap();
    let o = ap_lab(tmp.path(), &["norm", "--expr", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    fs::write(tmp.path().join("bad_cfg.json"), "{\n  \"tau\": 1.0,\n  \"nonsense\": 2\n}").unwrap();
    let o = ap_lab(tmp.path(), &["decay", "--builder", "sin", "--config", "bad_cfg.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn locked_run_directory_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    fs::create_dir(tmp.path().join("busy")).unwrap();
    fs::write(tmp.path().join("busy/.ap-lab.lock"), "1\n").unwrap();
    let o = ap_lab(tmp.path(), &["norm", "--builder", "sin", "--out", "busy"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("in use"));
    assert!(tmp.path().join("busy/.ap-lab.lock").exists());
}

#[test]
fn expression_and_sampled_subjects() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("f.json"), r#"{"node": "sin", "child": {"node": "identity"}}"#).unwrap();
    let o = ap_lab(tmp.path(), &["metric", "--expr", "f.json", "--other", "sin", "--out", "m"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(tmp.path().join("m/metric.csv")).unwrap(), "metric,value\ncompact_open,0.0\nstepanov_p2,0.0\n");

    let rows: String = (0..=400).map(|i| format!("{},{}\n", i as f64 * 0.05, (i as f64 * 0.05).sin())).collect();
    fs::write(tmp.path().join("s.csv"), format!("t,value\n{rows}")).unwrap();
    let o = ap_lab(tmp.path(), &["norm", "--csv", "s.csv", "--domain", "half-line", "--t-max", "5", "--out", "n"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("n/norm.json")).unwrap()).unwrap();
    let v = json["norm"]["value"].as_f64().unwrap();
    assert!((v - 0.9595496300).abs() < 1e-3, "{v}");
}

#[test]
fn help_documents_csv_columns() {
    let tmp = tempfile::tempdir().unwrap();
    for (cmd, cols) in [
        ("classify", "class, status, tau, basis"),
        ("decay", "T, value"),
        ("omega", "h, tau, residual"),
        ("example", "summary.md"),
        ("norm", "p, t_max, value, attained_at, scan_start, scan_end"),
        ("metric", "metric, value"),
    ] {
        let o = ap_lab(tmp.path(), &[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&o.stdout).contains(cols), "{cmd}");
    }
}

#[test]
fn omega_on_a_periodic_subject() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ap_lab(
        tmp.path(),
        &["omega", "--builder", "sin", "--decades", "100,1000", "--jitter", "4", "--reference", "sin", "--out", "w", "--format", "csv"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let fits = fs::read_to_string(tmp.path().join("w/fits.csv")).unwrap();
    assert!(fits.starts_with("h,tau,residual\n"));
    for line in fits.lines().skip(1) {
        let residual: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(residual < 1e-3, "{line}");
    }
}
