use std::path::Path;
use std::process::{Command, Output};

use sir_exact_cli::render::{Cell, Table};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sir-exact"));
    cmd.env_remove("SIR_EXACT_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SUPERCRITICAL: [&str; 10] = ["--b", "0.3", "--c", "0.1", "--h", "0.05", "--x0", "0.8", "--y0", "0.2"];
const SUBCRITICAL: [&str; 10] = ["--b", "0.3", "--c", "0.6", "--h", "0.05", "--x0", "0.8", "--y0", "0.2"];

fn with<'a>(cmd: &'a str, base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(base);
    v.extend_from_slice(extra);
    v
}

fn table(text: &str) -> Table {
    Table::parse(text).unwrap()
}

fn real(cell: &Cell) -> f64 {
    match cell {
        Cell::Real(v) => *v,
        Cell::Int(n) => *n as f64,
        Cell::Text(s) => panic!("expected a number, got {s}"),
    }
}

fn report_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
}

#[test]
fn simulate_supercritical_tends_to_all_removed() {
    let out = stdout(&run(&with("simulate", &SUPERCRITICAL, &["--steps", "20000"])));
    let t = table(&out);
    assert_eq!(t.header, ["n", "t", "x", "y", "z"]);
    assert_eq!(t.rows.len(), 20_001);
    let last = t.rows.last().unwrap();
    assert!(real(&last[2]) < 1e-3 && real(&last[3]) < 1e-3);
    assert!((real(&last[4]) - 1.0).abs() < 1e-3);
}

#[test]
fn simulate_subcritical_tends_to_alpha() {
    let out = stdout(&run(&with("simulate", &SUBCRITICAL, &["--t-end", "2000"])));
    let t = table(&out);
    assert_eq!(t.rows.len(), 40_001);
    let x = real(&t.rows.last().unwrap()[2]);
    assert!((x - 0.636).abs() <= 1e-3, "x = {x}");
}

#[test]
fn zero_steps_gives_the_initial_row() {
    let out = stdout(&run(&with("simulate", &SUPERCRITICAL, &["--steps", "0", "--z0", "0.5"])));
    assert_eq!(out, "n,t,x,y,z\n0,0,0.8,0.2,0.5\n");
}

#[test]
fn exact_matches_simulated_row_one() {
    let sim = table(&stdout(&run(&with("simulate", &SUPERCRITICAL, &["--steps", "1"]))));
    let exact = stdout(&run(&with("exact", &SUPERCRITICAL, &["--n", "1"])));
    let row = &sim.rows[1];
    for (k, key) in [(2, "x"), (3, "y"), (4, "z")] {
        let e: f64 = report_value(&exact, key).unwrap().parse().unwrap();
        // closed form and iteration round differently; a few ulps of N = 1 apart
        assert!((e - real(&row[k])).abs() <= 4.0 * f64::EPSILON, "{key}: {e} vs {:?}", row[k]);
    }
    assert_eq!(row[2], Cell::Real(0.7976071784646062));
}

#[test]
fn exact_at_zero_and_at_a_million() {
    let zero = stdout(&run(&with("exact", &SUPERCRITICAL, &["--n", "0"])));
    assert_eq!(zero, "n: 0\nt: 0\nx: 0.8\ny: 0.2\nz: 0\n");
    let far = stdout(&run(&with("exact", &SUPERCRITICAL, &["--n", "1000000"])));
    let y: f64 = report_value(&far, "y").unwrap().parse().unwrap();
    let z: f64 = report_value(&far, "z").unwrap().parse().unwrap();
    assert!(y.is_finite() && y < 1e-100, "y = {y}");
    assert!((z - 1.0).abs() < 1e-12);
}

fn max_dx(h: &str, schemes: &str) -> f64 {
    let args = ["--b", "0.3", "--c", "0.1", "--h", h, "--x0", "0.8", "--y0", "0.2", "--t-end", "50"];
    let t = table(&stdout(&run(&with("compare", &args, &["--scheme", schemes]))));
    t.rows.iter().map(|r| (real(&r[2]) - real(&r[5])).abs()).fold(0.0, f64::max)
}

#[test]
fn compare_nsfd_with_continuous_is_first_order() {
    let coarse = max_dx("0.05", "nsfd,continuous");
    let fine = max_dx("0.025", "nsfd,continuous");
    assert!(coarse < 0.05 * 0.05 * 10.0, "{coarse}");
    let ratio = fine / coarse;
    assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
}

#[test]
fn compare_nsfd_with_exact_discrete_agrees() {
    let out = stdout(&run(&with("compare", &SUPERCRITICAL, &["--t-end", "50", "--scheme", "nsfd,exact_discrete"])));
    let t = table(&out);
    assert_eq!(
        t.header[2..],
        ["nsfd_x", "nsfd_y", "nsfd_z", "exact_discrete_x", "exact_discrete_y", "exact_discrete_z"]
    );
    for row in &t.rows {
        for k in 2..5 {
            let (a, b) = (real(&row[k]), real(&row[k + 3]));
            assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()) + 1e-300, "{a} vs {b}");
        }
    }
}

#[test]
fn compare_flawed_against_nsfd() {
    let args = ["--b", "1.5", "--c", "0.1", "--h", "1", "--x0", "0.6", "--y0", "0.4", "--steps", "3"];
    let t = table(&stdout(&run(&with("compare", &args, &["--scheme", "flawed,nsfd"]))));
    let row = &t.rows[1];
    assert!((real(&row[2]) + 1.2).abs() < 1e-12, "{:?}", row[2]);
    assert!(real(&row[5]) > 0.0 && real(&row[6]) > 0.0);
}

#[test]
fn flawed_scheme_off_the_unit_step_is_rejected() {
    let out = run(&with("compare", &SUPERCRITICAL, &["--steps", "3", "--scheme", "flawed,nsfd"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("invalid h"), "{}", stderr(&out));
}

#[test]
fn compare_needs_two_schemes() {
    let out = run(&with("compare", &SUPERCRITICAL, &["--steps", "3", "--scheme", "nsfd"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_reports() {
    let sup = stdout(&run(&with("classify", &SUPERCRITICAL, &[])));
    let r0: f64 = report_value(&sup, "r0").unwrap().parse().unwrap();
    assert!((r0 - 3.0).abs() < 1e-12);
    assert_eq!(report_value(&sup, "regime"), Some("ExtinctionStable"));
    assert_eq!(report_value(&sup, "limit_point"), Some("0,0,1"));
    assert_eq!(report_value(&sup, "p_threshold"), Some("210"));

    let equal =
        stdout(&run(&["classify", "--b", "0.2", "--c", "0.2", "--h", "0.1", "--x0", "3", "--y0", "1", "--z0", "1"]));
    assert_eq!(report_value(&equal, "r0"), Some("1"));
    assert_eq!(report_value(&equal, "limit_point"), Some("0,0,5"));

    let sub = stdout(&run(&with("classify", &SUBCRITICAL, &[])));
    assert_eq!(report_value(&sub, "r0"), Some("0.5"));
    assert_eq!(report_value(&sub, "regime"), Some("EndemicFreeStable"));
    let alpha: f64 = report_value(&sub, "alpha").unwrap().parse().unwrap();
    assert!((alpha - 0.636).abs() <= 1e-3, "{alpha}");
    assert_eq!(report_value(&sub, "p_threshold"), None);
}

#[test]
fn alpha_nonconvergence_exits_3() {
    let out = run(&with("classify", &SUBCRITICAL, &["--max-iter", "5"]));
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn sweep_over_recovery_rates() {
    let args = ["sweep", "--b", "0.3", "--c-grid", "0.05,0.1,0.2", "--h", "0.05", "--x0", "0.8", "--y0", "0.2"];
    let t = table(&stdout(&run(&args)));
    assert_eq!(t.header, ["b", "c", "h", "r0", "regime", "alpha", "p_threshold", "flawed_negative"]);
    assert_eq!(t.rows.len(), 3);
    for row in &t.rows {
        assert_eq!(row[4], Cell::Text("ExtinctionStable".into()));
        assert_eq!(row[5], Cell::Text("none".into()));
        assert_eq!(row[7], Cell::Text("undefined".into()));
    }
}

#[test]
fn single_cell_sweep_matches_classify() {
    for base in [SUPERCRITICAL, SUBCRITICAL] {
        let class = stdout(&run(&with("classify", &base, &[])));
        let sweep = stdout(&run(&with("sweep", &base, &[])));
        let mut lines = sweep.lines();
        let header: Vec<_> = lines.next().unwrap().split(',').collect();
        let row: Vec<_> = lines.next().unwrap().split(',').collect();
        assert!(lines.next().is_none());
        for key in ["r0", "regime", "alpha", "p_threshold"] {
            let k = header.iter().position(|h| *h == key).unwrap();
            assert_eq!(report_value(&class, key).unwrap_or("none"), row[k], "{key}");
        }
    }
}

#[test]
fn sweep_regime_flips_where_b_crosses_c() {
    let args = [
        "sweep",
        "--b-grid",
        "0.05:0.3:26",
        "--c",
        "0.15",
        "--h",
        "0.05",
        "--x0",
        "0.8",
        "--y0",
        "0.2",
        "--metrics",
        "r0,regime",
    ];
    let t = table(&stdout(&run(&args)));
    assert_eq!(t.rows.len(), 26);
    for row in &t.rows {
        let (b, c) = (real(&row[0]), real(&row[1]));
        let expected = if b >= c { "ExtinctionStable" } else { "EndemicFreeStable" };
        assert_eq!(row[4], Cell::Text(expected.into()), "b = {b}");
    }
    let flips = t.rows.windows(2).filter(|w| w[0][4] != w[1][4]).count();
    assert_eq!(flips, 1);
}

#[test]
fn sweep_flags_the_flawed_scheme() {
    let args = [
        "sweep",
        "--b-grid",
        "0.5,1.5",
        "--c",
        "0.1",
        "--h",
        "1",
        "--x0",
        "0.6",
        "--y0",
        "0.4",
        "--metrics",
        "flawed_negative",
    ];
    let out = stdout(&run(&args));
    assert_eq!(out, "b,c,h,flawed_negative\n0.5,0.1,1,false\n1.5,0.1,1,true\n");
}

#[test]
fn sweep_grid_limits() {
    let empty = run(&["sweep", "--b-grid", "0:1:0", "--c", "0.1", "--h", "0.05", "--x0", "0.8", "--y0", "0.2"]);
    assert_eq!(empty.status.code(), Some(2));
    assert!(stderr(&empty).contains("empty"));
    let huge = run(&[
        "sweep",
        "--b-grid",
        "0.1:1:1000",
        "--c-grid",
        "0.1:1:1001",
        "--h",
        "0.05",
        "--x0",
        "0.8",
        "--y0",
        "0.2",
    ]);
    assert_eq!(huge.status.code(), Some(2));
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let args = [
        "sweep",
        "--b-grid",
        "0.05:2:13",
        "--c-grid",
        "0.05:2:11",
        "--h-grid",
        "0.1,0.5,1",
        "--x0",
        "0.7",
        "--y0",
        "0.3",
        "--z0",
        "0.1",
    ];
    let reference = bin().args(args).env("SIR_EXACT_THREADS", "1").output().unwrap();
    let reference = stdout(&reference);
    assert_eq!(reference.lines().count(), 1 + 13 * 11 * 3);
    for threads in ["2", "4", "7"] {
        let out = bin().args(args).env("SIR_EXACT_THREADS", threads).output().unwrap();
        assert_eq!(stdout(&out), reference, "threads = {threads}");
    }
    assert_eq!(stdout(&run(&args)), reference);
    let bad = bin().args(args).env("SIR_EXACT_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = with("compare", &SUPERCRITICAL, &["--t-end", "20", "--scheme", "nsfd,rk4,euler,continuous,exact"]);
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}

#[test]
fn emitted_csv_round_trips() {
    for precision in ["6", "9", "12", "16", "17"] {
        let out = stdout(&run(&with(
            "compare",
            &SUPERCRITICAL,
            &["--t-end", "30", "--scheme", "rk4,continuous", "--precision", precision],
        )));
        let p: usize = precision.parse().unwrap();
        assert_eq!(table(&out).render(p), out, "precision {p}");
    }
}

#[test]
fn division_by_zero_exits_3_and_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flawed.csv");
    let out = run(&[
        "simulate",
        "--scheme",
        "flawed",
        "--b",
        "2.2",
        "--c",
        "0.1",
        "--h",
        "1",
        "--x0",
        "0.5",
        "--y0",
        "0.5",
        "--steps",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("division by zero"));
    assert!(!path.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn output_file_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    let path = dir.path().join("out.csv");
    std::fs::write(
        &config,
        format!(
            "# supercritical run\nb = 0.3\nc = 0.1\nh = 0.05\nx0 = 0.8\ny0 = 0.2\nsteps = 10\nout = {}\n",
            path.display()
        ),
    )
    .unwrap();
    let out = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let from_file = std::fs::read_to_string(&path).unwrap();
    assert_eq!(table(&from_file).rows.len(), 11);

    let flags = stdout(&run(&with("simulate", &SUPERCRITICAL, &["--steps", "10"])));
    assert_eq!(from_file, flags);

    // flags win over the file
    let over = run(&["simulate", "--config", config.to_str().unwrap(), "--steps", "3"]);
    assert!(over.status.success());
    assert_eq!(table(&std::fs::read_to_string(&path).unwrap()).rows.len(), 4);
}

fn expect_config_error(args: &[&str], field: &str) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(2), "{args:?}");
    let msg = stderr(&out);
    assert!(msg.contains(field), "{args:?}: {msg}");
}

#[test]
fn validation_errors_exit_2_and_name_the_field() {
    expect_config_error(
        &["simulate", "--b", "-1", "--c", "0.1", "--h", "0.05", "--x0", "0.8", "--y0", "0.2", "--steps", "3"],
        "invalid b",
    );
    expect_config_error(&["simulate", "--c", "0.1", "--h", "0.05", "--x0", "0.8", "--y0", "0.2", "--steps", "3"], "b");
    expect_config_error(&with("simulate", &SUPERCRITICAL, &[]), "steps");
    expect_config_error(&with("simulate", &SUPERCRITICAL, &["--steps", "3", "--t-end", "5"]), "steps");
    expect_config_error(&with("simulate", &SUPERCRITICAL, &["--steps", "3", "--precision", "5"]), "precision");
    expect_config_error(&with("simulate", &SUPERCRITICAL, &["--steps", "3", "--scheme", "leapfrog"]), "scheme");
    expect_config_error(
        &["simulate", "--b", "0.3", "--c", "0.1", "--h", "0.05", "--x0", "0", "--y0", "0.2", "--steps", "3"],
        "invalid x0",
    );
    expect_config_error(&with("simulate", &SUPERCRITICAL, &["--steps", "three"]), "--steps");
    expect_config_error(
        &with("simulate", &SUPERCRITICAL, &["--steps", "3", "--config", "/nonexistent/run.cfg"]),
        "config",
    );

    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    std::fs::write(&config, "b = 0.3\ngamma = 2\n").unwrap();
    expect_config_error(&["classify", "--config", config.to_str().unwrap()], "gamma");
    std::fs::write(&config, "h = small\n").unwrap();
    expect_config_error(&["classify", "--config", config.to_str().unwrap()], "invalid h");
    assert!(!Path::new(&dir.path().join("out.csv")).exists());
}
