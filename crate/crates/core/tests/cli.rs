use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deltabound"))
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_str()
        .unwrap()
        .to_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for name in ["trivial.json", "unramified.json", "ramified.json"] {
        for extra in [&[][..], &["--mode", "tight"], &["--mode", "paper", "--rounded"]] {
            let mut args = vec!["bound", &data(name)[..]]
                .into_iter()
                .map(str::to_owned)
                .collect::<Vec<_>>();
            args.extend(extra.iter().map(|s| s.to_string()));
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            let a = run(&args);
            let b = run(&args);
            assert_eq!(a.status.code(), Some(0), "{name} {extra:?}: {}", stderr(&a));
            assert_eq!(a.stdout, b.stdout);
            assert!(a.stdout.ends_with(b"}\n"));
        }
    }
}

#[test]
fn report_fields() {
    let v = json(&run(&["bound", &data("trivial.json")]));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["bound"], "intrinsic");
    assert_eq!(v["mode"], "paper_faithful");
    assert_eq!(v["rounded"], false);
    assert_eq!(v["final"]["sign"], 1);
    assert!(v["final"]["decimal"].as_str().unwrap().contains("e+"));
    assert_eq!(v["inputs"]["scenario"]["base"]["genus"], 2);
    let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    assert!(keys.contains(&"terms".to_string()));

    let r = json(&run(&["bound", &data("ramified.json")]));
    assert_eq!(r["bound"], "ramified_cover");
    assert_eq!(r["parshin"]["bound"]["bound"], "parshin");
    assert!(r["parshin"]["simplified"]["final"]["ln_abs"].as_f64().unwrap() > 0.0);
}

#[test]
fn trivial_report_matches_the_library() {
    use deltabound::delta_bounds::{intrinsic_bound, Evaluation};
    use deltabound::invariants::{BoundOptions, SurfaceInvariants};
    let v = json(&run(&["bound", &data("trivial.json")]));
    let inv = SurfaceInvariants::new(2, 1.0, 0.05).unwrap();
    let want = intrinsic_bound(&inv, &Evaluation::new(BoundOptions::PAPER))
        .unwrap()
        .final_value
        .ln_abs();
    let got = v["final"]["ln_abs"].as_f64().unwrap();
    assert!((got - want).abs() <= 1e-11 * want);
}

#[test]
fn mode_flag_overrides_file() {
    let paper = json(&run(&["bound", &data("unramified.json")]));
    let tight = json(&run(&["bound", &data("unramified.json"), "--mode", "tight"]));
    assert_eq!(tight["mode"], "tight");
    assert!(tight["final"]["ln_abs"].as_f64() < paper["final"]["ln_abs"].as_f64());
    let rounded = json(&run(&["bound", &data("unramified.json"), "--rounded"]));
    assert!(rounded["final"]["ln_abs"].as_f64() > paper["final"]["ln_abs"].as_f64());
}

#[test]
fn malformed_input_exits_2_with_position() {
    let o = run(&["bound", &data("bad_syntax.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 6 column"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn missing_file_and_bad_mode_exit_2() {
    assert_eq!(run(&["bound", "/nonexistent/scenario.json"]).status.code(), Some(2));
    assert_eq!(
        run(&["bound", &data("trivial.json"), "--mode", "loose"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn unknown_field_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("extra.json");
    let text = std::fs::read_to_string(data("trivial.json"))
        .unwrap()
        .replace("\"mode\"", "\"colour\": 1, \"mode\"");
    std::fs::write(&path, text).unwrap();
    let o = run(&["bound", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));
}

#[test]
fn domain_errors_exit_3() {
    let o = run(&["bound", &data("genus_one.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("genus"), "{}", stderr(&o));
    assert_eq!(run(&["bound", &data("bad_domain.json")]).status.code(), Some(3));
}

#[test]
fn help_and_version_exit_0() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify"));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn sweep_systole_decreasing() {
    let o = run(&[
        "sweep",
        &data("trivial.json"),
        "--param",
        "base.systole",
        "--values",
        "0.5,1,2,4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("param,value,log10_bound,decimal\n"));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 4);
    let values: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(values, [0.5, 1.0, 2.0, 4.0]);
    let logs: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(logs.windows(2).all(|w| w[1] < w[0]), "{logs:?}");
}

#[test]
fn sweep_cover_genus_increasing() {
    for file in ["trivial.json", "unramified.json"] {
        let o = run(&["sweep", &data(file), "--param", "cover.genus", "--values", "2,4,8"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let logs: Vec<f64> = csv_rows(&o).iter().map(|r| r[2].parse().unwrap()).collect();
        assert_eq!(logs.len(), 3);
        assert!(logs.windows(2).all(|w| w[1] > w[0]), "{file}: {logs:?}");
    }
}

#[test]
fn sweep_edge_cases() {
    let o = run(&[
        "sweep",
        &data("trivial.json"),
        "--param",
        "base.lambda1",
        "--values",
        "",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "param,value,log10_bound,decimal\n");
    let o = run(&["sweep", &data("trivial.json"), "--param", "base.genus", "--values", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let o = run(&["sweep", &data("trivial.json"), "--param", "r0", "--values", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "sweep",
        &data("trivial.json"),
        "--param",
        "base.lambda1",
        "--values",
        "x",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "sweep",
        &data("trivial.json"),
        "--param",
        "base.systole",
        "--values",
        "-1",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["sweep", &data("ramified.json"), "--param", "R0", "--values", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let logs: Vec<f64> = csv_rows(&o).iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(logs.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn kernel_table() {
    let o = run(&["kernel", "--t", "10", "--rho", "0.5,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("rho,k0,k0_err,k1,k1_err,a1,a2,a3,upper_sum,dominance\n"));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(r.len(), 10);
        assert_eq!(r[9], "true");
    }

    let o = run(&["kernel", "--t", "10", "--rho", "0,1"]);
    let rows = csv_rows(&o);
    assert_eq!(rows[0][0], "0");
    assert!(rows[0][1].parse::<f64>().unwrap() > 0.0);
    assert!(rows[0][3].parse::<f64>().unwrap() > 0.0);
    assert!(rows[0][5..].iter().all(String::is_empty));
    assert_eq!(rows[1][9], "true");

    assert_eq!(run(&["kernel", "--t", "-1", "--rho", "1"]).status.code(), Some(3));
    assert_eq!(run(&["kernel", "--t", "0", "--rho", "1"]).status.code(), Some(3));
    assert_eq!(run(&["kernel", "--t", "1", "--rho", "-1"]).status.code(), Some(3));
    let o = run(&["kernel", "--t", "1", "--rho", "1,-1"]);
    assert!(o.stdout.is_empty());
}

#[test]
fn verify_exit_codes() {
    let o = run(&["verify", "--suite", "constants"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("suite,checks_run,failures,inconclusive,worst_margin\nconstants,"));
    assert!(!text.contains("FAIL"));
    assert_eq!(run(&["verify", "--suite", "nonexistent"]).status.code(), Some(2));
    // C22 is violated on most of the grid, so this suite fails
    let o = run(&["verify", "--suite", "c22"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL [c22]"));
}

#[test]
fn in_process_runner_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = deltabound::cli::run(["deltabound", "bound", &data("ramified.json")], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(out, run(&["bound", &data("ramified.json")]).stdout);
}
