use std::path::Path;
use std::process::{Command, Output};

fn hetmarket(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hetmarket"));
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("HETMARKET_THREADS", n),
        None => cmd.env_remove("HETMARKET_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn uninformed_sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let out = hetmarket(
        &["run", "uninformed", "--sweep", "Z=0.5..20", "--realizations", "200", "--seed", "9", "--out", path.to_str().unwrap()],
        None,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = read(&path);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "Z,quantity,analytic,sim_mean,sim_se,R,seed");
    // 41 costs, four quantities each.
    assert_eq!(lines.len(), 1 + 41 * 4);
    assert!(lines[1].starts_with("0.5,k_opt,78.2404601,"));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",9")));
    let summary = stderr(&out);
    for q in ["k_opt", "X_opt", "k_opt_exact", "X_opt_exact"] {
        assert!(summary.contains(&format!("uninformed: {q}: 41 points")), "{summary}");
    }
}

#[test]
fn csv_is_identical_for_one_and_eight_threads() {
    let args = ["run", "correlated", "--sweep", "t=0..1:0.25", "--realizations", "100", "--seed", "4"];
    let one = hetmarket(&args, Some("1"));
    let eight = hetmarket(&args, Some("8"));
    let again = hetmarket(&args, Some("8"));
    assert!(one.status.success(), "{}", stderr(&one));
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, eight.stdout);
    assert_eq!(eight.stdout, again.stdout);
}

#[test]
fn duopoly_sweep_shows_price_out() {
    let out = hetmarket(
        &["run", "duopoly", "--Z2", "5", "--sweep", "Z1=11..14:0.5", "--realizations", "20"],
        None,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = stdout(&out);
    let k1: Vec<(f64, f64)> = csv
        .lines()
        .filter(|l| l.split(',').nth(1) == Some("k1"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert!(k1.iter().filter(|(z, _)| *z <= 12.0).all(|(_, k)| *k > 0.0), "{k1:?}");
    assert!(k1.iter().filter(|(z, _)| *z >= 13.0).all(|(_, k)| *k == 0.0), "{k1:?}");
    assert!(stderr(&out).contains("price-out threshold 12.4266987"));
}

#[test]
fn tau_subcommand_and_run_tau_agree() {
    let a = hetmarket(&["tau", "C", "--sweep", "t=0..1:0.5", "--realizations", "20", "--N", "300"], None);
    let b = hetmarket(
        &["run", "tau", "--scheme", "C", "--sweep", "t=0..1:0.5", "--realizations", "20", "--N", "300"],
        None,
    );
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("t,quantity,"));
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# matching run\nscenario = matching\nN = 200\nM = 3\nR = 30\nsweep = d=1..4\n").unwrap();
    let out = hetmarket(&["run", "--config", cfg.to_str().unwrap(), "--set", "seed=5"], None);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = stdout(&out);
    assert!(csv.starts_with("d,quantity,"));
    assert_eq!(csv.lines().count(), 1 + 4 * 3);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",30,5")));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "M = 100\n\nwidth = 3\n").unwrap();
    let out = hetmarket(&["run", "uninformed", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("bad.cfg:3: unknown key 'width'"), "{}", stderr(&out));

    for args in [
        &["run", "nonexistent"][..],
        &["run", "duopoly", "--sweep", "t=0..1"],
        &["run", "uninformed", "--p", "2"],
        &["check", "42"],
        &["run"],
        &["frobnicate"],
    ] {
        let out = hetmarket(args, None);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
    }
    assert_eq!(hetmarket(&["run", "uninformed", "--Z"], None).status.code(), Some(1));
    assert_eq!(hetmarket(&["--help"], None).status.code(), Some(0));
}

#[test]
fn run_check_flags_rows_outside_tolerance() {
    let args = ["run", "multi-variant", "--N", "100", "--M", "5", "--sweep", "d=1..3", "--realizations", "200", "--check"];
    let ok = hetmarket(&args, None);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let mut strict = args.to_vec();
    strict.extend(["--tolerance-scale", "0"]);
    let bad = hetmarket(&strict, None);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("FAIL multi-variant"));
}

#[test]
fn check_reports_and_exit_codes() {
    let out = hetmarket(&["check", "idle,bound"], None);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS criterion 2"));
    assert!(text.contains("PASS criterion 7"));

    let out = hetmarket(&["check", "idle", "--realizations", "10"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("WARN criterion 2"));
    assert!(stdout(&out).contains("underpowered"));

    let out = hetmarket(&["check", "duopoly", "--tolerance-scale", "0"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("FAIL criterion 4"));
}

#[test]
fn list_names_every_experiment() {
    let out = hetmarket(&["list"], None);
    let text = stdout(&out);
    for name in ["profit-curve", "uninformed", "sequential", "duopoly", "informed", "tau", "bound", "correlated", "gaussian", "matching", "multi-variant"] {
        assert!(text.contains(name), "{name}");
    }
}
