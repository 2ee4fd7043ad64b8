use std::path::Path;
use std::process::{Command, Output};

const BUNDLED: &str = include_str!("../configs/design_point.ini");

fn optospring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optospring"))
        .args(args)
        .env("OPTOSPRING_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn value(text: &str, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in output:\n{text}"))
        .parse()
        .unwrap()
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn small_oracle(extra: &str) -> String {
    let base = BUNDLED.split("[oracle]").next().unwrap();
    format!(
        "{base}[oracle]\nkind = gas\ndamping_ratio = 1e-2\ns_intensity = 1e-8\ndt = 1.6e-7\nsteps = 20000\n\
         trajectories = 100\nseed = 7\ninitial_energy = 10\n{extra}"
    )
}

#[test]
fn budget_with_bundled_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("budget.csv");
    let o = optospring(&["budget", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("status = ok\n"));
    assert!((value(&text, "omega_z") / 1.23e5 - 1.0).abs() < 0.01);
    assert!((value(&text, "kappa") / 2.02e5 - 1.0).abs() < 0.01);
    assert!((value(&text, "n_min") / 0.147 - 1.0).abs() < 0.01);
    assert!(text.contains("provenance.n_min"));

    let file = std::fs::read_to_string(&out).unwrap();
    assert!(!file.contains('\r'));
    let (header, rows) = csv(&file);
    assert_eq!(header[0], "omega_z");
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].len(), header.len());
    assert_eq!(*rows[0].last().unwrap(), 1.0);
}

#[test]
fn explicit_config_matches_bundled() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "c.ini", BUNDLED);
    let a = optospring(&["budget", "--config", &path]);
    let b = optospring(&["budget"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn zero_power_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "c.ini",
        &BUNDLED.replace("power = 0.1", "power = 0"),
    );
    let o = optospring(&["budget", "--config", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("status = no net cooling\n"));
    assert!(stderr(&o).contains("no net cooling"));
}

#[test]
fn blue_detuning_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "c.ini",
        &BUNDLED.replace("detuning = -160", "detuning = 160"),
    );
    let o = optospring(&["budget", "--config", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("n_min = nan"));
}

#[test]
fn unknown_key_exits_1_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "c.ini",
        &BUNDLED.replace("waist_z = 8", "wz0 = 8"),
    );
    let out = dir.path().join("never.csv");
    let o = optospring(&["budget", "--config", &path, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("wz0"), "{err}");
    assert!(err.contains("line"), "{err}");
    assert!(stdout(&o).is_empty());
    assert!(!out.exists());
}

#[test]
fn missing_config_file_exits_1() {
    let o = optospring(&["budget", "--config", "/nonexistent/optospring.ini"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fig2_surface() {
    let o = optospring(&["fig2", "--grid", "-3,-0.05,7,0,2,5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "linewidth/kappa");
    assert_eq!(header.len(), 8);
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], 0.0);
    for r in &rows[0][1..] {
        assert!((r - 1.0).abs() < 1e-12);
    }
}

#[test]
fn fig2_small_linewidth_barely_changes_the_rate() {
    let o = optospring(&["fig2", "--grid", "-1,-1,1,0.05,0.05,1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let row: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(row.len(), 2);
    assert!(row[1] >= 0.95, "{row:?}");
}

#[test]
fn fig2_rejects_bad_grid() {
    let o = optospring(&["fig2", "--grid", "1,2,3,0,1,2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = optospring(&["fig2", "--grid", "-1,-2,3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fig2_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let o = optospring(&[
        "fig2",
        "--grid",
        "-2,-1,3,0,1,2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    let a = std::fs::read(&out).unwrap();
    let o = optospring(&["fig2", "--grid", "-2,-1,3,0,1,2"]);
    assert_eq!(a, o.stdout);
}

#[test]
fn sweep_detuning_has_interior_minimum_near_optimum() {
    let o = optospring(&[
        "sweep",
        "--param",
        "cavity.detuning",
        "--range",
        "-400,-20",
        "--points",
        "77",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(header[0], "cavity.detuning");
    let col = header.iter().position(|h| h == "n_min").unwrap();
    let (best, _) = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1[col].partial_cmp(&b.1[col]).unwrap())
        .unwrap();
    assert!(best > 0 && best < rows.len() - 1);

    let opt = optospring(&["optimize"]);
    let star = value(&stdout(&opt), "optimal_detuning_khz");
    assert!(
        (rows[best][0] - star).abs() <= 5.0 + 1e-9,
        "grid min {} vs {star}",
        rows[best][0]
    );
}

#[test]
fn sweep_pressure_is_linear_in_gamma_bg() {
    let o = optospring(&[
        "sweep",
        "--param",
        "environment.pressure",
        "--range",
        "1e-8,1e-4",
        "--points",
        "5",
        "--log",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv(&stdout(&o));
    let col = header.iter().position(|h| h == "gamma_bg").unwrap();
    for r in &rows {
        assert!((r[col] / r[0] / (rows[0][col] / rows[0][0]) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn sweep_two_points() {
    let o = optospring(&[
        "sweep",
        "--param",
        "cavity.power",
        "--range",
        "0.05,0.2",
        "--points",
        "2",
    ]);
    assert!(o.status.success());
    let (_, rows) = csv(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], 0.05);
    assert_eq!(rows[1][0], 0.2);
}

#[test]
fn sweep_rejects_bad_arguments() {
    for args in [
        &[
            "sweep",
            "--param",
            "cavity.nope",
            "--range",
            "1,2",
            "--points",
            "3",
        ][..],
        &[
            "sweep",
            "--param",
            "cavity.power",
            "--range",
            "1,2",
            "--points",
            "1",
        ][..],
        &[
            "sweep",
            "--param",
            "cavity.power",
            "--range",
            "2,1",
            "--points",
            "3",
        ][..],
        &[
            "sweep",
            "--param",
            "cavity.power",
            "--range",
            "-1,1",
            "--points",
            "3",
            "--log",
        ][..],
        &[
            "sweep",
            "--param",
            "cavity.r_fixed",
            "--range",
            "0.5,1.5",
            "--points",
            "3",
        ][..],
    ] {
        let o = optospring(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "c.ini", &small_oracle(""));
    let run = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        let o = optospring(&[
            "simulate",
            "--config",
            &path,
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        (o.stdout, std::fs::read(out).unwrap())
    };
    let a = run("11", "a.csv");
    let b = run("11", "b.csv");
    let c = run("12", "c.csv");
    assert_eq!(a, b);
    assert_ne!(a.1, c.1);

    let text = String::from_utf8(a.0).unwrap();
    assert!(text.starts_with("kind = gas\n"));
    assert_eq!(value(&text, "seed"), 11.0);
    let traj = String::from_utf8(a.1).unwrap();
    assert!(traj.starts_with("t,mean_energy,stderr_energy\n"));
}

#[test]
fn simulate_thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "c.ini", &small_oracle(""));
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_optospring"))
            .args(["simulate", "--config", &path])
            .env("OPTOSPRING_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert!(one.status.success());
    assert_eq!(one.stdout, run("3").stdout);
    assert_eq!(run("zero").status.code(), Some(1));
}

#[test]
fn simulate_rejects_large_step() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "c.ini",
        &small_oracle("").replace("dt = 1.6e-7", "dt = 1e-6"),
    );
    let o = optospring(&["simulate", "--config", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("step"), "{}", stderr(&o));
}

#[test]
fn simulate_strict_flags_a_mismatch() {
    // A run far too short to relax cannot reproduce the equilibrium energy.
    let dir = tempfile::tempdir().unwrap();
    let text = small_oracle("").replace("steps = 20000", "steps = 2000");
    let path = write_config(dir.path(), "c.ini", &text);
    assert_eq!(
        optospring(&["simulate", "--config", &path]).status.code(),
        Some(0)
    );
    assert_eq!(
        optospring(&["simulate", "--config", &path, "--strict"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn simulate_needs_oracle_section() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "c.ini",
        BUNDLED.split("[oracle]").next().unwrap(),
    );
    assert_eq!(
        optospring(&["simulate", "--config", &path]).status.code(),
        Some(1)
    );
}

#[test]
fn optimize_reports_improvement() {
    let o = optospring(&["optimize"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let wz = value(&text, "omega_z");
    let kappa = value(&text, "kappa");
    let star = value(&text, "optimal_detuning");
    assert!((star + (wz * wz + kappa * kappa / 4.0).sqrt()).abs() < 1e-6 * wz);
    assert!(value(&text, "n_min_optimal") <= value(&text, "n_min_configured"));
    assert!(value(&text, "improvement_n_min") >= 1.0);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(optospring(&["budget", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        optospring(&["sweep", "--param", "cavity.power"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(optospring(&["--help"]).status.code(), Some(0));
}
