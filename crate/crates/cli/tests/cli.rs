use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gaussian_esd::esd::initial_entanglement_threshold;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gaussian-esd"))
}

fn recipe(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../recipes").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn config(state: [f64; 5], channel: [f64; 4], extra: &str) -> String {
    format!(
        "[state]\nz1 = {}\nz2 = {}\nr = {}\nnu1 = {}\nnu2 = {}\n\n[channel]\ngamma1 = {}\ngamma2 = {}\nnb1 = {}\nnb2 = {}\n\n[time]\nt_max = 30.0\nn_points = 31\n{extra}",
        state[0], state[1], state[2], state[3], state[4], channel[0], channel[1], channel[2], channel[3]
    )
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(rows: &[Vec<String>], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn evolve_gray_curve_crosses_once() {
    let o = run(&["evolve", "--config", recipe("fig1-gray.cfg").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["t", "n1", "n2", "m1", "m2", "ms", "mc", "S"]);
    assert_eq!(rows.len(), 601);
    let s = column(&rows, 7);
    assert!(s[0] < 0.0);
    assert_eq!(s.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count(), 1);
}

#[test]
fn evolve_red_single_mode_squeezing_separates() {
    let o = run(&["evolve", "--config", recipe("fig2-red.cfg").to_str().unwrap()]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(&stdout(&o));
    let s = column(&rows, 7);
    assert!(s[0] < 0.0 && *s.last().unwrap() > 0.0);
    assert!(stderr(&o).contains("first separable sample at t = 2.15"), "{}", stderr(&o));
}

#[test]
fn vacuum_stays_put() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "vac.cfg", &config([0.0; 5], [0.1, 0.3, 0.0, 0.0], ""));
    let o = run(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 31);
    for r in rows {
        assert!(r[1..].iter().all(|c| c == "0"), "{r:?}");
    }
}

#[test]
fn output_is_deterministic_across_worker_counts() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let cfg = recipe("fig3.cfg");
    for (out, workers) in [(&a, "1"), (&b, "3")] {
        let o = run(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
            "--t-max",
            "40",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn figure3_boundary_note() {
    let o = run(&["sweep", "--config", recipe("fig3.cfg").to_str().unwrap(), "--out", "/dev/null"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("between z0 = 1.34 and z0 = 1.35"), "{}", stderr(&o));
}

#[test]
fn figure4_signs_follow_threshold() {
    let o = run(&["sweep", "--config", recipe("fig4.cfg").to_str().unwrap()]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["nu1", "nu2", "S0", "sign"]);
    let mut separable = 0;
    for r in &rows {
        let (a, b): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let threshold = initial_entanglement_threshold(a, b).unwrap();
        if (threshold - 1.0).abs() < 1e-3 {
            continue;
        }
        let positive = r[3] == "1";
        separable += usize::from(positive);
        assert_eq!(positive, threshold > 1.0, "{r:?}");
    }
    assert!(separable > 0);
}

#[test]
fn dump_config_round_trips() {
    let dir = TempDir::new().unwrap();
    let first = run(&["dump-config", "--config", recipe("fig3.cfg").to_str().unwrap()]);
    assert!(first.status.success());
    let dumped = write_config(&dir, "dumped.cfg", &stdout(&first));
    let second = run(&["--dump-config", "--config", dumped.to_str().unwrap()]);
    assert_eq!(stdout(&first), stdout(&second));

    let a = run(&["sweep", "--config", recipe("fig3.cfg").to_str().unwrap(), "--t-max", "20"]);
    let b = run(&["sweep", "--config", dumped.to_str().unwrap(), "--t-max", "20"]);
    assert_eq!(a.stdout, b.stdout);

    let template = run(&["dump-config"]);
    assert!(template.status.success());
    for section in ["[state]", "[channel]", "[time]", "[output]", "[oracle]"] {
        assert!(stdout(&template).contains(section));
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let typo = write_config(
        &dir,
        "typo.cfg",
        &config([0.0, 0.0, 1.0, 0.0, 0.0], [0.1, 0.1, 0.0, 0.0], "").replace("nb2", "nb3"),
    );
    let o = run(&["evolve", "--config", typo.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nb3") && stderr(&o).contains("line"), "{}", stderr(&o));

    let o = run(&["evolve"]);
    assert_eq!(o.status.code(), Some(2));

    let steps = write_config(
        &dir,
        "steps.cfg",
        &config(
            [0.0, 0.0, 1.0, 0.0, 0.0],
            [0.1, 0.1, 0.0, 0.0],
            "[sweep]\nvariable = \"r0\"\nrange = [0.0, 1.0]\nsteps = 1\n",
        ),
    );
    assert_eq!(run(&["sweep", "--config", steps.to_str().unwrap()]).status.code(), Some(2));

    let o = run(&["evolve", "--config", recipe("fig1-gray.cfg").to_str().unwrap(), "--format", "xml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "neg.cfg", &config([0.0, 0.0, 1.0, -1.0, 0.0], [0.1, 0.1, 0.0, 0.0], ""));
    let o = run(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let cfg = write_config(&dir, "gamma.cfg", &config([0.0, 0.0, 1.0, 0.0, 0.0], [0.0, 0.1, 0.0, 0.0], ""));
    assert_eq!(run(&["esd", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));
}

fn esd_report(dir: &TempDir, state: [f64; 5], channel: [f64; 4]) -> serde_json::Value {
    let cfg = write_config(dir, "esd.cfg", &config(state, channel, ""));
    let o = run(&["esd", "--config", cfg.to_str().unwrap(), "--format", "json", "--t-max", "1000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let mut map = serde_json::Map::new();
    for row in v["rows"].as_array().unwrap() {
        map.insert(row[0].as_str().unwrap().to_string(), row[1].clone());
    }
    serde_json::Value::Object(map)
}

#[test]
fn esd_reports() {
    let dir = TempDir::new().unwrap();
    let r = esd_report(&dir, [2.0, 2.0, 1.0, 0.0, 0.0], [0.1, 0.1, 0.0, 0.0]);
    assert_eq!(r["kind"], "FiniteTime");
    assert_eq!(r["analytic_kind"], "FiniteTime");
    assert!(r["relative_difference"].as_f64().unwrap() < 1e-6);

    let r = esd_report(&dir, [0.0, 0.0, 1.0, 0.0, 0.0], [0.1, 0.1, 0.0, 0.0]);
    assert_eq!(r["kind"], "Asymptotic");

    let r = esd_report(&dir, [0.0, 0.0, 0.3, 1.0, 1.0], [0.1, 0.1, 0.0, 0.0]);
    assert_eq!(r["kind"], "InitiallySeparable");
    assert!((r["mixedness_threshold_r0"].as_f64().unwrap() - 0.549306144334).abs() < 1e-9);
}

#[test]
fn two_step_sweep() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "t.cfg",
        &config(
            [0.0, 0.0, 1.0, 0.0, 0.0],
            [0.1, 0.1, 0.2, 0.2],
            "[sweep]\nvariable = \"t\"\nrange = [0.0, 10.0]\nsteps = 2\n",
        ),
    );
    let o = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["t", "S", "sign"]);
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][2].as_str(), rows[1][2].as_str()), ("-1", "1"));
}

#[test]
fn oracle_check_outcomes() {
    let dir = TempDir::new().unwrap();
    let oracle = "[oracle]\ncutoff = 12\ndt = 0.01\ncheckpoints = [0.25, 0.5]\nsuite = false\n";
    let cfg = write_config(&dir, "ok.cfg", &config([0.1, 0.1, 0.2, 0.0, 0.0], [1.0, 1.0, 0.25, 0.25], oracle));
    let o = run(&["oracle-check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("outside certified domain"), "cutoff 12 is below the certified cutoff");
    assert_eq!(csv_rows(&stdout(&o)).1.len(), 2);

    let tight = oracle.replace("cutoff = 12", "cutoff = 4");
    let cfg = write_config(&dir, "tight.cfg", &config([0.0, 0.0, 0.6, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], &tight));
    let o = run(&["oracle-check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("cutoff insufficient"), "{}", stderr(&o));

    let wide = oracle.replace("cutoff = 12", "cutoff = 20");
    let cfg = write_config(&dir, "wide.cfg", &config([0.0, 0.0, 2.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], &wide));
    let o = run(&["oracle-check", "--config", cfg.to_str().unwrap()]);
    assert!(stderr(&o).contains("outside certified domain"), "{}", stderr(&o));
    assert_eq!(o.status.code(), Some(4));
}
