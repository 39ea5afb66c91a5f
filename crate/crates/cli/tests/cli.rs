use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ultraweight")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn result<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["results"].as_array().unwrap().iter().find(|r| r["name"] == name).unwrap_or_else(|| panic!("no {name}"))
}

fn bracket(report: &Value) -> (f64, f64) {
    let e = &result(report, "estimate")["value"];
    (e["lower"].as_f64().unwrap(), e["upper"].as_f64().unwrap())
}

#[test]
fn check_gevrey_two_is_green() {
    let out = run(&["check", "--sequence", "gevrey:2", "--conditions", "lc,mg,nq"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema_version"], 1);
    for name in ["lc", "mg", "nq"] {
        let v = result(&r, name);
        assert_eq!(v["verdict"], "satisfied");
        assert!(!v["witness"].as_object().unwrap().is_empty());
    }
}

#[test]
fn harmonic_series_is_violated() {
    let out = run(&["check", "--sequence", "gevrey:1", "--conditions", "nq"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(result(&json(&out), "nq")["verdict"], "violated");
}

#[test]
fn explicit_sequence_fails_lc_at_two() {
    let out = run(&["check", "--sequence", "explicit:1,4,8,32", "--conditions", "lc"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(result(&v, "lc")["at"], 2.0);
}

#[test]
fn parse_failures_exit_64() {
    assert_eq!(run(&["check", "--sequence", "gevery:2"]).status.code(), Some(64));
    assert_eq!(run(&["check", "--sequence", "{\"family\":\"gevrey\"}"]).status.code(), Some(64));
    assert_eq!(run(&["check", "--sequence", "gevrey:-1"]).status.code(), Some(64));
    assert_eq!(run(&["check"]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn precondition_failures_exit_65() {
    assert_eq!(run(&["kappa", "--omega", "power:1"]).status.code(), Some(65));
    assert_eq!(run(&["descend", "--sequence", "gevrey:1"]).status.code(), Some(65));
    assert_eq!(run(&["index", "mu", "--sequence", "explicit:1,4,8,32"]).status.code(), Some(65));
}

#[test]
fn index_examples() {
    let (lo, hi) = bracket(&json(&run(&["index", "mu", "--sequence", "gevrey:3"])));
    assert!(lo >= 2.99 && hi <= 3.01, "[{lo}, {hi}]");
    let (lo, hi) = bracket(&json(&run(&["index", "gamma", "--sigma", "power:0.5", "--omega", "power:0.3333"])));
    assert!(lo >= 2.94 && hi <= 3.06, "[{lo}, {hi}]");
    let (lo, hi) = bracket(&json(&run(&["index", "gamma", "--M", "gevrey:1", "--N", "gevrey:2"])));
    assert!(lo >= 1.95 && hi <= 2.05, "[{lo}, {hi}]");
}

#[test]
fn descend_writes_reingestable_spec() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let out = run(&["descend", "--sequence", "gevrey:2", "--r", "1", "--out", path.to_str().unwrap()]);
    let r = json(&out);
    let sigma = result(&r, "sigma")["value"].as_array().unwrap();
    assert!((sigma[1].as_f64().unwrap() - 4.62029).abs() < 1e-4);
    let arg = format!("@{}", path.display());
    let again = run(&["check", "--sequence", &arg, "--conditions", "slc"]);
    assert_eq!(again.status.code(), Some(0), "{}", String::from_utf8_lossy(&again.stderr));
}

#[test]
fn matrix_csv_recovers_factorials() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = run(&["matrix", "--omega", "assoc(gevrey:1)", "--levels", "1,2", "--jmax", "20", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["j", "l", "W"]);
    let mut seen = 0;
    for row in rdr.records() {
        let row = row.unwrap();
        let (j, l, w): (u32, f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap(), row[2].parse().unwrap());
        if l == 1.0 {
            let fact: f64 = (1..=j).map(f64::from).product();
            assert!((w / fact - 1.0).abs() < 0.01, "j={j}: {w} vs {fact}");
            seen += 1;
        }
    }
    assert_eq!(seen, 21);
}

#[test]
fn reduce_example_writes_specs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "reduce", "--sigma", "power:0.5", "--omega", "power:0.3333", "--f", "power:1", "--n", "12",
        "--witness", "1,8,3,1", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(result(&r, "sandwich")["verdict"], "satisfied");
    let x = &result(&r, "reduction")["value"]["breakpoints"];
    assert!((x[1].as_f64().unwrap() - 16.0).abs() <= 1.0, "{x}");
    for name in ["omega_tilde.json", "sigma_tilde.json", "omega_tilde.csv", "sigma_tilde.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let arg = format!("@{}", dir.path().join("omega_tilde.json").display());
    assert_eq!(run(&["sample", "--omega", &arg, "--n", "5"]).status.code(), Some(0));
}

#[test]
fn kappa_round_trips_through_its_spec() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    let out = run(&["kappa", "--omega", "power:0.5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let direct = run(&["sample", "--omega", "kappa(power:0.5)", "--n", "100"]);
    let arg = format!("@{}", path.display());
    let reread = run(&["sample", "--omega", &arg, "--n", "100"]);
    assert_eq!(direct.stdout, reread.stdout);
    let csv = String::from_utf8(direct.stdout).unwrap();
    for line in csv.lines().skip(1) {
        let (t, v) = line.split_once(',').unwrap();
        let (t, v): (f64, f64) = (t.parse().unwrap(), v.parse().unwrap());
        assert!((v - 2.0 * t.sqrt()).abs() <= 1e-6 * (2.0 * t.sqrt()));
    }
}

#[test]
fn sequence_samples_use_log_values() {
    let out = run(&["sample", "--sequence", "gevrey:1", "--n", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,log_value");
    let last: f64 = lines[4].split(',').nth(1).unwrap().parse().unwrap();
    assert!((last - 6f64.ln()).abs() < 1e-12);
}

fn strip_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

#[test]
fn reports_are_deterministic() {
    let args = ["report", "--omega", "power:0.5"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(strip_time(json(&a)), strip_time(json(&b)));
    let args = ["sample", "--omega", "logpower:2", "--random", "--seed", "7", "--n", "20"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let other = run(&["sample", "--omega", "logpower:2", "--random", "--seed", "8", "--n", "20"]);
    assert_ne!(run(&args).stdout, other.stdout);
}

#[test]
fn report_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&["check", "--sequence", "qgevrey:2", "--report", path.to_str().unwrap()]);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file, json(&out));
    let quiet = run(&["check", "--sequence", "qgevrey:2", "-q"]);
    assert!(quiet.stdout.is_empty());
    assert_eq!(quiet.status.code(), out.status.code());
}

#[test]
fn grid_points_env_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_ultraweight"))
        .args(["check", "--omega", "power:0.5", "--conditions", "omega1"])
        .env("ULTRAWEIGHT_GRID_POINTS", "64")
        .output()
        .unwrap();
    assert_eq!(json(&out)["input"]["grid"]["points"], 64);
    let bad = Command::new(env!("CARGO_BIN_EXE_ultraweight"))
        .args(["check", "--omega", "power:0.5"])
        .env("ULTRAWEIGHT_GRID_POINTS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(64));
}
