use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::process::{Command, Output};

use hypercat::io::{read_fock, read_husimi};
use hypercat::kerr::{self, GridSpec, KerrHusimi};
use hypercat::states::{CoherentLabel, Preset};
use hypercat::Complex64;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercat")).args(args).env_remove("HYPERCAT_MAX_TERMS").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn canonical_state_has_poisson_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = run(&["state", "--preset", "canonical", "--z", "2", "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let f = read_fock(BufReader::new(fs::File::open(&out).unwrap())).unwrap();
    let mut fact = 1.0;
    for n in 0..30 {
        if n > 0 {
            fact *= n as f64;
        }
        let want = (-2.0f64).exp() * 2f64.powi(n) / fact.sqrt();
        assert!((f.vector.get(n as usize).re - want).abs() < 1e-15, "n={n}");
    }
    let norm: f64 = f.get("norm").unwrap().parse().unwrap();
    assert!((norm - 4f64.exp()).abs() < 1e-12 * norm);
}

#[test]
fn even_cat_reports_cosh_norm() {
    let o = run(&["kitten", "--preset", "canonical", "--k", "2", "--j", "0", "--z", "1"]);
    assert_eq!(code(&o), 0);
    let f = read_fock(stdout(&o).as_bytes()).unwrap();
    let norm: f64 = f.get("norm").unwrap().parse().unwrap();
    assert!((norm - 1f64.cosh()).abs() < 1e-15);
    assert!(f.vector.amplitudes().iter().skip(1).step_by(2).all(|a| a.norm() == 0.0));
}

#[test]
fn exit_codes() {
    let ill = run(&["state", "--alpha", "1,1", "--z", "0.1"]);
    assert_eq!(code(&ill), 2);
    assert!(stderr(&ill).contains("ill-defined family (R=0)"), "{}", stderr(&ill));
    assert_eq!(code(&run(&["state", "--preset", "sg", "--z", "1.5"])), 2);
    assert_eq!(code(&run(&["state", "--z", "abc"])), 1);
    assert_eq!(code(&run(&["state"])), 1);
    assert_eq!(code(&run(&["teleport"])), 1);
    assert_eq!(code(&run(&["state", "--preset", "sg", "--alpha", "1", "--z", "0.1"])), 1);
    assert_eq!(code(&run(&["state", "--preset", "no-such-family", "--z", "0.1"])), 1);
    assert_eq!(code(&run(&["figures", "fig9"])), 1);
    assert_eq!(code(&run(&["verify", "everything"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn term_cap_from_environment() {
    let capped = Command::new(env!("CARGO_BIN_EXE_hypercat"))
        .args(["critical", "--preset", "perelomov-su11:s=3", "--k", "5"])
        .env("HYPERCAT_MAX_TERMS", "5")
        .output()
        .unwrap();
    assert_eq!(code(&capped), 2, "{}", stderr(&capped));
    let bad =
        Command::new(env!("CARGO_BIN_EXE_hypercat")).args(["critical", "--k", "5"]).env("HYPERCAT_MAX_TERMS", "many").output().unwrap();
    assert_eq!(code(&bad), 1);
    assert!(stderr(&bad).contains("HYPERCAT_MAX_TERMS"));
}

#[test]
fn config_file_values_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# Perelomov s=3\npreset = perelomov-su11:s=3\nk = 5\n").unwrap();
    let o = run(&["critical", "--config", path(&cfg)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let row = stdout(&o).lines().find(|l| l.starts_with("5,")).unwrap().to_string();
    let zc2: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((zc2 - 4.0 / 9.0).abs() < 1e-9);

    // flags replace file values
    let o = run(&["critical", "--config", path(&cfg), "--k", "2"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("2,")));
    assert!(!stdout(&o).lines().any(|l| l.starts_with("5,")));

    fs::write(&cfg, "k = 5\nz = 1,2,3\n").unwrap();
    let o = run(&["state", "--config", path(&cfg)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 2: z:"), "{}", stderr(&o));
    fs::write(&cfg, "colour = red\n").unwrap();
    assert!(stderr(&run(&["state", "--config", path(&cfg)])).contains("line 1: colour: unknown key"));
}

#[test]
fn fock_csv_round_trips_every_digit() {
    let o = run(&["kerr", "--preset", "canonical", "--z", "0.7,0.3", "--k", "3"]);
    assert_eq!(code(&o), 0);
    let f = read_fock(stdout(&o).as_bytes()).unwrap();
    let label = CoherentLabel::new(Complex64::new(0.7, 0.3), Preset::canonical().params);
    let want = kerr::kerr_evolve(&label, &kerr::KerrParams::fraction(1, 3, 2).unwrap(), None).unwrap();
    assert_eq!(f.vector, want);
    assert_eq!(f.get("components"), Some("3"));
    let residual: f64 = f.get("circle_residual").unwrap().parse().unwrap();
    assert!(residual < 1e-10);
}

#[test]
fn husimi_csv_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = |out: &Path| {
        run(&["husimi", "--alpha", "3", "--beta", "1", "--z", "2", "--k", "8", "--nx", "41", "--ny", "31", "--out", path(out)])
    };
    assert_eq!(code(&args(&a)), 0);
    assert_eq!(code(&args(&b)), 0);
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());

    let (_, grid) = read_husimi(bytes.as_slice()).unwrap();
    let spec = GridSpec { nx: 41, ny: 31, ..GridSpec::default_window() };
    assert_eq!(grid.spec, spec);
    let label = CoherentLabel::new(Complex64::new(2.0, 0.0), Preset::confluent(3.0, 1.0).unwrap().params);
    let h = KerrHusimi::new(&label, 8).unwrap();
    for (i, v) in grid.values.iter().enumerate() {
        let (ix, iy) = spec.coords(i);
        assert_eq!(*v, h.value(spec.point(ix, iy)), "cell {ix},{iy}");
    }
}

#[test]
fn disk_families_leave_null_cells() {
    let o = run(&["husimi", "--preset", "perelomov-su11:s=1", "--z", "0.5", "--nx", "5", "--ny", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (_, grid) = read_husimi(stdout(&o).as_bytes()).unwrap();
    assert_eq!(grid.get(0, 0), None);
    assert!(grid.get(2, 2).is_some());
}

#[test]
fn stats_output_is_deterministic() {
    let args = ["stats", "--preset", "perelomov-su11:s=3", "--k", "5", "--x-grid", "0:0.9:10"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.lines().any(|l| l == "family,k,j,x,mean,std,Q,F,class"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 5 * 10);
}

#[test]
fn mandel_small_x_limits() {
    let o = run(&["mandel", "--alpha", "1", "--beta", "4", "--k", "5", "--x-grid", "0:0:1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let q: Vec<f64> =
        stdout(&o).lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').nth(6).unwrap().parse().unwrap()).collect();
    assert_eq!(q, vec![4.0, -1.0, -1.0, -1.0, -1.0]);
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "kittens"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l.contains("discrete circle rep fidelity") && l.ends_with("pass")));

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("identity.csv");
    let o = run(&["verify", "identity", "--identity-csv", path(&report)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l.contains("expected-fail") && l.ends_with("pass")));
    let csv = fs::read_to_string(&report).unwrap();
    assert!(csv.starts_with("family,n,residual,status"));
    assert!(csv.lines().any(|l| l.ends_with(",expected-fail")));
    assert!(csv.lines().any(|l| l.ends_with(",no weight registered")));
}

#[test]
fn figure_files_carry_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["figures", "fig1a", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("fig1a.csv")).unwrap();
    assert!(text.contains("# k=5"));
    assert!(text.contains("# marker=zc2,reference,5.0000000000000000e0"));
    assert!(text.lines().any(|l| l.starts_with("# marker=zc2,computed,")));

    run(&["figures", "fig5b", "--out", path(dir.path())]);
    let text = fs::read_to_string(dir.path().join("fig5b.csv")).unwrap();
    assert!(text.contains("# alpha=1") && text.contains("# beta=1") && text.contains("# k=5"));

    let o = run(&["figures", "fig6c", "--k", "8", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let bytes = fs::read(dir.path().join("fig6c_k8.csv")).unwrap();
    let (meta, grid) = read_husimi(bytes.as_slice()).unwrap();
    let get = |k: &str| meta.iter().find(|(m, _)| m == k).map(|(_, v)| v.as_str());
    assert_eq!(get("alpha"), Some("3.0000000000000000e0"));
    assert_eq!(get("components"), Some("4"));
    assert_eq!((grid.spec.nx, grid.spec.ny), (281, 281));
    assert!(grid.spot_check.is_some_and(|s| s < 1e-10));
}
