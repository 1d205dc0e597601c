use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spinphase"));
    c.env_remove("SPINPHASE_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// `key=value` lines of a record.
fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

/// Header and numeric rows, checking every row has the header's width.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows: Vec<Vec<f64>> = lines
        .map(|l| {
            let row: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(row.len(), header.len(), "{l}");
            row
        })
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i]).collect()
}

fn out_arg(dir: &TempDir, sub: &str) -> String {
    dir.path().join(sub).to_string_lossy().into_owned()
}

#[test]
fn equatorial_qubit_phase_density() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "d");
    let o = run(&["dist", "--out", &out, "--n-grid", "90", "coherent", "0.5", "1.5707963", "0"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let (h, rows) = read_csv(&dir.path().join("d/phase.csv"));
    assert_eq!(h, ["phi", "density"]);
    assert_eq!(rows.len(), 90);
    for r in &rows {
        let expected = (1.0 + PI / 4.0 * r[0].cos()) / TAU;
        assert!((r[1] - expected).abs() < 1e-9 * expected.abs().max(1.0), "{r:?}");
    }
    let (h, rows) = read_csv(&dir.path().join("d/number.csv"));
    assert_eq!(h, ["m", "prob"]);
    assert_eq!(column(&h, &rows, "m"), [0.5, -0.5]);
    assert!((rows.iter().map(|r| r[1]).sum::<f64>() - 1.0).abs() < 1e-8);
}

#[test]
fn number_state_has_flat_phase() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "d");
    assert_eq!(code(&run(&["dist", "--out", &out, "wigner-dicke", "1.5", "0.5"])), 0);
    let (_, rows) = read_csv(&dir.path().join("d/phase.csv"));
    assert_eq!(rows.len(), 256);
    for r in &rows {
        assert!((r[1] - 1.0 / TAU).abs() < 1e-9);
    }
    let (_, rows) = read_csv(&dir.path().join("d/number.csv"));
    assert_eq!(rows.iter().map(|r| r[1]).collect::<Vec<_>>(), [0.0, 1.0, 0.0, 0.0]);
}

#[test]
fn bad_input_exits_with_usage_code() {
    for args in [
        &["dist", "coherent", "0.7", "0", "0"][..],
        &["dist", "coherent", "half", "0", "0"],
        &["knowledge", "squeezed", "0.5"],
        &["knowledge", "coherent", "0.5", "0", "0", "--mu", "-1"],
        &["knowledge"],
        &["search", "qutrit", "mu"],
        &["evolve", "sgad", "--gamma0", "0.1"],
        &["evolve", "pd", "--preset", "fig3a"],
        &["reproduce", "fig5"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}: {o:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn negative_values_follow_a_separator() {
    let o = run(&["knowledge", "--mu", "2", "--", "wigner-dicke", "3/2", "-1/2"]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert_eq!(field(&stdout(&o), "r_m"), 2.0);
}

#[test]
fn knowledge_records() {
    let o = run(&["knowledge", "coherent", "0.5", "pi/2", "0", "--mu", "4.085"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("r_phi=0.244775\n"), "{text}");
    assert!(text.contains("r_m=0.000000\n"), "{text}");

    let text = stdout(&run(&["knowledge", "wigner-dicke", "0.5", "0.5", "--mu", "7"]));
    assert_eq!(field(&text, "r_m"), 1.0);
    assert_eq!(field(&text, "r_phi"), 0.0);

    let text = stdout(&run(&["knowledge", "coherent", "0.5", "pi/4", "0"]));
    assert!(field(&text, "r_t") < 1.0);
}

#[test]
fn qubit_weight_search() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "s");
    let o = run(&["search", "qubit", "mu", "--trace", "--out", &out]);
    assert_eq!(code(&o), 0, "{o:?}");
    let text = stdout(&o);
    assert!((field(&text, "value") - 4.085).abs() < 0.01);
    assert!((field(&text, "argmax.alpha") - PI / 2.0).abs() < 1e-3);
    assert_eq!(field(&text, "config.grid_density"), 64.0);
    let (h, rows) = read_csv(&dir.path().join("s/trace.csv"));
    assert_eq!(h, ["restart", "value"]);
    assert!(!rows.is_empty());
}

#[test]
fn spin32_searches_print_json() {
    let o = run(&["search", "spin32", "rphi-max", "--grid-density", "16", "--multistarts", "8", "--json"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - 0.84).abs() < 0.01, "{value}");
    assert_eq!(v["system"], "spin32");
    assert!(v["argmax.r_beta"].as_f64().unwrap() > 0.5);

    let o = run(&["search", "spin32", "mu", "--grid-density", "16", "--multistarts", "8"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let text = stdout(&o);
    let mu = field(&text, "value");
    assert!(mu > 1.9 && mu < 2.1, "{mu}");
    assert!(field(&text, "verification.mixed.worst_sum") <= 2.0 + 1e-5);
}

#[test]
fn vacuum_bath_drives_mixed_start_to_full_knowledge() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "e");
    let o = run(&[
        "evolve", "sgad", "--preset", "fig4a-bold", "--state", "mixed 0.5", "--t-max", "8000", "--n-times", "41",
        "--out", &out,
    ]);
    assert_eq!(code(&o), 0, "{o:?}");
    let (h, rows) = read_csv(&dir.path().join("e/evolve.csv"));
    assert_eq!(h, ["t", "r_m", "r_phi", "r_s", "p_up"]);
    let r_s = column(&h, &rows, "r_s");
    assert!(r_s[0].abs() < 1e-9);
    assert!(r_s.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    // gamma0 t = 200
    assert_eq!(*column(&h, &rows, "t").last().unwrap(), 8000.0);
    assert!(*r_s.last().unwrap() > 0.95);
}

#[test]
fn integrator_matches_closed_form_columns() {
    let dir = TempDir::new().unwrap();
    let mut tables = vec![];
    for method in ["closed", "ode"] {
        let out = out_arg(&dir, method);
        let o = run(&[
            "evolve", "sgad", "--preset", "fig4a-dashed", "--t-max", "20", "--n-times", "5", "--method", method,
            "--out", &out,
        ]);
        assert_eq!(code(&o), 0, "{o:?}");
        tables.push(read_csv(&dir.path().join(method).join("evolve.csv")).1);
    }
    for (a, b) in tables[0].iter().zip(&tables[1]) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-7, "{a:?} vs {b:?}");
        }
    }
    let o = run(&["evolve", "pd", "--preset", "fig2", "--method", "ode"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn phase_damping_keeps_number_knowledge() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "e");
    let o = run(&["evolve", "pd", "--preset", "fig2", "--snapshots", "8", "--out", &out]);
    assert_eq!(code(&o), 0, "{o:?}");
    let (h, rows) = read_csv(&dir.path().join("e/evolve.csv"));
    assert_eq!(h.len(), 5 + 8);
    let r_m = column(&h, &rows, "r_m");
    assert!(r_m.iter().all(|&x| x == r_m[0]));
    let r_phi = column(&h, &rows, "r_phi");
    assert!(r_phi.last().unwrap() < &r_phi[0]);
    // each snapshot row integrates to one
    for r in &rows {
        let mass: f64 = r[5..].iter().sum::<f64>() * TAU / 8.0;
        assert!((mass - 1.0).abs() < 1e-8);
    }
}

#[test]
fn squeezed_sweep_depends_on_azimuth() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "e");
    let o = run(&["evolve", "sgad", "--preset", "fig3b", "--sweep", "9", "--out", &out]);
    assert_eq!(code(&o), 0, "{o:?}");
    let (h, rows) = read_csv(&dir.path().join("e/sweep.csv"));
    assert_eq!(rows.len(), 81);
    let equator: Vec<f64> = rows
        .iter()
        .filter(|r| (r[0] - PI / 2.0).abs() < 1e-6)
        .map(|r| r[h.iter().position(|c| c == "mu_r_phi").unwrap()])
        .collect();
    assert_eq!(equator.len(), 9);
    let spread = equator.iter().cloned().fold(f64::MIN, f64::max) - equator.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread > 1e-4, "{equator:?}");
}

#[test]
fn figure_one_bundle() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "r");
    assert_eq!(code(&run(&["reproduce", "fig1", "--out", &out])), 0);
    let (h, rows) = read_csv(&dir.path().join("r/fig1/fig1.csv"));
    assert_eq!(h, ["alpha", "r_phi", "r_m", "r_t", "r_s"]);
    let r_phi = column(&h, &rows, "r_phi");
    let max = r_phi.iter().cloned().fold(f64::MIN, f64::max);
    assert!((max - 0.245).abs() < 0.005);
    assert!(r_phi[0].abs() < 1e-9 && r_phi.last().unwrap().abs() < 1e-9);
    let manifest = fs::read_to_string(dir.path().join("r/fig1/manifest.txt")).unwrap();
    assert!(manifest.contains("figure=fig1\n") && manifest.contains("mu=4.085\n"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    for sub in ["a", "b"] {
        let out = out_arg(&dir, sub);
        let o = run(&["reproduce", "fig4b", "--n-grid", "7", "--n-times", "9", "--out", &out]);
        assert_eq!(code(&o), 0);
    }
    for file in ["fig4b/fig4b.csv", "fig4b/manifest.txt"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
}

#[test]
fn squeezing_panels_differ_only_in_squeezing() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "r");
    for fig in ["fig3a", "fig3b"] {
        assert_eq!(code(&run(&["reproduce", fig, "--n-grid", "5", "--out", &out])), 0);
    }
    let read = |f: &str| fs::read_to_string(dir.path().join("r").join(f).join("manifest.txt")).unwrap();
    let (a, b) = (read("fig3a"), read("fig3b"));
    let differing: Vec<&str> = a
        .lines()
        .zip(b.lines())
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.split('=').next().unwrap())
        .collect();
    assert_eq!(differing, ["figure", "bath.r", "bath.phi"]);
}

#[test]
fn config_file_and_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    let from_file = out_arg(&dir, "from-file");
    fs::write(
        &cfg,
        format!("[state]\nspec = coherent 1/2 pi/2 0\nmu = 4.085\n\n[output]\ndir = {from_file}\nn_grid = 12\n"),
    )
    .unwrap();
    let cfg_arg = cfg.to_string_lossy().into_owned();

    let o = run(&["knowledge", "--config", &cfg_arg]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert!((field(&stdout(&o), "r_s") - 0.999905).abs() < 1e-6);
    let o = run(&["knowledge", "--config", &cfg_arg, "--mu", "1"]);
    assert_eq!(field(&stdout(&o), "mu"), 1.0);

    assert_eq!(code(&run(&["dist", "--config", &cfg_arg])), 0);
    assert_eq!(read_csv(&dir.path().join("from-file/phase.csv")).1.len(), 12);
    assert_eq!(code(&run(&["dist", "--config", &cfg_arg, "--n-grid", "3"])), 0);
    assert_eq!(read_csv(&dir.path().join("from-file/phase.csv")).1.len(), 3);

    let env_dir = out_arg(&dir, "from-env");
    let o = bin()
        .args(["dist", "--config", &cfg_arg])
        .env("SPINPHASE_OUT", &env_dir)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("from-env/phase.csv").exists());
    let flag_dir = out_arg(&dir, "from-flag");
    let o = bin()
        .args(["dist", "--config", &cfg_arg, "--out", &flag_dir])
        .env("SPINPHASE_OUT", &env_dir)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("from-flag/phase.csv").exists());

    fs::write(&cfg, "[state]\nspin = 1/2\n").unwrap();
    let o = run(&["knowledge", "--config", &cfg_arg, "mixed", "1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key 'spin'"));
}

#[test]
fn io_failures_exit_with_io_code() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("taken");
    fs::write(&file, "").unwrap();
    let o = run(&["dist", "--out", &file.to_string_lossy(), "mixed", "1"]);
    assert_eq!(code(&o), 3, "{o:?}");
    let missing = dir.path().join("missing.cfg");
    let o = run(&["knowledge", "--config", &missing.to_string_lossy(), "mixed", "1"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn help_exits_cleanly() {
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("reproduce"));
}
