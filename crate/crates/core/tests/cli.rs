use std::path::Path;
use std::process::{Command, Output};

use entpulse::config::INDIUM_CFG;

fn entpulse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entpulse")).args(args).output().unwrap()
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

fn read_csv(path: &Path) -> Vec<(f64, f64)> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| {
            let mut it = l.split(',').map(|v| v.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect()
}

#[test]
fn validate_bundled_config_passes() {
    let o = entpulse(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("verdict: PASS"));
    assert!(text.contains("Theta / kappa  = 7.01"), "{text}");
    assert!(text.contains("gamma g1^2/Delta^2 = 2pi x 25.0000 Hz"));
}

#[test]
fn validate_fails_at_default_ratio_and_when_kappa_equals_theta() {
    let o = entpulse(&["validate", "--ratio", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("verdict: FAIL"));

    let dir = tempfile::tempdir().unwrap();
    // Θ = 2π·7013.084 Hz for these parameters
    let cfg = INDIUM_CFG.replace("kappa_hz = 1e3", "kappa_hz = 7013.084");
    let path = write_config(dir.path(), "slow.cfg", &cfg);
    let o = entpulse(&["validate", "--config", &path]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.contains("Theta >> kappa")).unwrap();
    assert!(line.contains("FAIL"), "{line}");
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = write_config(dir.path(), "missing.cfg", &INDIUM_CFG.replace("nu_hz = 3e6", ""));
    let o = entpulse(&["validate", "--config", &missing]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nu_hz"), "{}", stderr(&o));

    let bad = write_config(dir.path(), "bad.cfg", "nu_hz = 3e6\nnu hz 3\n");
    let o = entpulse(&["validate", "--config", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = entpulse(&["validate", "--config", "/nonexistent/entpulse.cfg"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(entpulse(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(entpulse(&["simulate", "--r", "x"]).status.code(), Some(1));
    let help = entpulse(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("oracle-check"));
}

#[test]
fn simulate_reports_photon_numbers_and_gates_on_regime() {
    let o = entpulse(&["simulate", "--r", "1.1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("mean photons per mode: cav1 = 109.7506, cav2 = 109.7506"), "{text}");
    assert!(text.contains("T_pi           = 7.323869e-5 s"));

    let o = entpulse(&["simulate"]);
    assert!(stdout(&o).contains("cav1 = 99.5024"));

    let o = entpulse(&["simulate", "--ratio", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("regime check failed"));
    let o = entpulse(&["simulate", "--ratio", "10", "--force"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("forced"));

    let o = entpulse(&["simulate", "--r", "0.9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("protocol undefined"));
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = entpulse(&["fig3", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(!stdout(&o).contains("entpulse 0."));
        assert!(stderr(&o).starts_with("entpulse "));
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 5);
    for name in names {
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?}");
    }
    assert_eq!(stdout(&entpulse(&["simulate"])), stdout(&entpulse(&["simulate"])));
    assert_eq!(stdout(&entpulse(&["sequential"])), stdout(&entpulse(&["sequential"])));
}

#[test]
fn fig3_near_threshold_squeezes_longer() {
    let dir = tempfile::tempdir().unwrap();
    let o = entpulse(&["fig3", "--r", "1.05,1.1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let near = read_csv(&dir.path().join("fig3_r1.05.csv"));
    let far = read_csv(&dir.path().join("fig3_r1.1.csv"));
    let min = |v: &[(f64, f64)]| v.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    assert!(min(&near) < min(&far));
    assert!(near.iter().filter(|p| p.0 > 2.0 && p.0 <= 3.0).all(|p| p.1 < 1.0));
    let header = std::fs::read_to_string(dir.path().join("fig3_r1.05.csv")).unwrap();
    assert!(header.starts_with("# r=1.05, kappa_dt=0.1, theta_sum=0\nkappa_t,C,R,q1_sq,q1q2\n"));
}

#[test]
fn fig3_rejects_r_below_one_and_bad_paths() {
    let dir = tempfile::tempdir().unwrap();
    let o = entpulse(&["fig3", "--r", "1.1,0.9", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("protocol undefined"), "{}", stderr(&o));

    let file = dir.path().join("plain");
    std::fs::write(&file, "x").unwrap();
    let o = entpulse(&["fig3", "--out", file.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sequential_reports() {
    let o = entpulse(&["sequential", "--kappa-t12", "inf"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let norm: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("motion decorrelation norm = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(norm < 1e-9, "{text}");
    assert!(text.contains("E_N(pulse1|cavity) after swap        = 2.000000000"));

    // κT12 = 10 leaves e^{-10} of the field amplitude behind
    let text = stdout(&entpulse(&["sequential"]));
    assert!(text.contains("motion decorrelation norm = 2.927e-4"), "{text}");
}

#[test]
fn oracle_check_default_passes_and_tight_dims_fail() {
    let o = entpulse(&["oracle-check"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("n_cav1"));
    assert!(text.trim_end().ends_with("PASS"));

    let o = entpulse(&["oracle-check", "--dims", "6,6,6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("truncation leakage"));
}

#[test]
fn out_dir_receives_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = entpulse(&["couplings", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let saved = std::fs::read_to_string(dir.path().join("couplings.txt")).unwrap();
    assert_eq!(saved, stdout(&o));
    assert!(saved.contains("eta            = 0.104284"));
}
