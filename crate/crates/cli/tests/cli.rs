use std::path::{Path, PathBuf};
use std::process::Command;

use ris_secrecy_cli::config::ExperimentConfig;
use ris_secrecy_cli::report::{read_sweep_csv, Report};
use ris_secrecy_cli::sweep::grid;

const BIN: &str = env!("CARGO_BIN_EXE_ris-secrecy");

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> i32 {
    let status = Command::new(BIN)
        .arg(sub)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
        .status;
    status.code().unwrap()
}

fn report(path: &Path) -> Report {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_config(dir.path(), "empty.json", r#"{"kind": "v2v", "n_list": [], "tx_snr_db": [60], "rs": 0.5}"#);
    assert_eq!(run("stats-verify", &empty, dir.path(), &[]), 2);
    let garbled = write_config(dir.path(), "garbled.json", "{ not json");
    assert_eq!(run("sop-sweep", &garbled, dir.path(), &[]), 2);
    assert_eq!(run("sop-sweep", &dir.path().join("missing.json"), dir.path(), &[]), 2);
}

#[test]
fn sweep_csv_round_trips_grid_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let json = r#"{"kind": "v2i", "n_list": [4, 12], "tx_snr_db": [40, 62.5], "rs": [0.25, 1.0],
                   "methods": ["semianalytic", "closed"]}"#;
    let cfg_path = write_config(dir.path(), "cfg.json", json);
    assert_eq!(run("sop-sweep", &cfg_path, dir.path(), &[]), 0);
    let rows = read_sweep_csv(&dir.path().join("sop_sweep.csv")).unwrap();
    let cfg = ExperimentConfig::from_json(json).unwrap();
    let expected: Vec<(u32, f64, f64, &str)> = grid(&cfg)
        .iter()
        .flat_map(|p| ["semianalytic", "closed"].map(|m| (p.n, p.tx_snr_db, p.rs, m)))
        .collect();
    let got: Vec<(u32, f64, f64, &str)> = rows.iter().map(|r| (r.n, r.tx_snr_db, r.rs, r.method.as_str())).collect();
    assert_eq!(got, expected);
    assert!(rows.iter().all(|r| r.is_ok() && r.sop.is_some_and(|p| (0.0..=1.0).contains(&p))));
}

#[test]
fn single_point_grid_gives_one_row_per_method() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(
        dir.path(),
        "one.json",
        r#"{"kind": "v2i", "n_list": [8], "tx_snr_db": [60], "rs": 0.5, "methods": ["closed"]}"#,
    );
    assert_eq!(run("sop-sweep", &cfg_path, dir.path(), &[]), 0);
    assert_eq!(read_sweep_csv(&dir.path().join("sop_sweep.csv")).unwrap().len(), 1);
}

#[test]
fn corrupted_lemma_constant_fails_cross_validation() {
    let dir = tempfile::tempdir().unwrap();
    let base = r#""kind": "v2i", "n_list": [4, 8], "tx_snr_db": [60], "rs": 0.5, "mc_samples": 200000, "seed": 3"#;
    let good = write_config(dir.path(), "good.json", &format!("{{{base}}}"));
    let good_out = dir.path().join("good");
    assert_eq!(run("cross-validate", &good, &good_out, &[]), 0);
    assert!(report(&good_out.join("cross_validate_report.json")).all_pass());

    let bad = write_config(dir.path(), "bad.json", &format!("{{{base}, \"closed_form_prefactor_scale\": 1.1}}"));
    let bad_out = dir.path().join("bad");
    assert_eq!(run("cross-validate", &bad, &bad_out, &[]), 1);
    let r = report(&bad_out.join("cross_validate_report.json"));
    let dev = r.gates.iter().find(|g| g.name == "closed_vs_semianalytic_max_rel_dev").unwrap();
    assert!(!dev.pass);
    // the CSV half of the report still parses
    assert_eq!(read_sweep_csv(&bad_out.join("cross_validate.csv")).unwrap().len(), 6);
}

#[test]
fn stats_verify_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(
        dir.path(),
        "stats.json",
        r#"{"kind": "v2v", "n_list": [4], "tx_snr_db": [0], "rs": 0.5, "mc_samples": 1000000, "seed": 11}"#,
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("stats-verify", &cfg_path, &a, &[]), 0);
    assert_eq!(run("stats-verify", &cfg_path, &b, &["--jobs", "2"]), 0);
    let r = report(&a.join("stats_verify_report.json"));
    let g = r.gates.iter().find(|g| g.name == "random_walk_ks_n4").unwrap();
    assert!(g.pass && g.value < 0.002);
    for f in ["stats_verify_report.json", "stats_verify.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = std::fs::read_to_string(a.join("stats_verify.csv")).unwrap();
    assert!(csv.starts_with("law,n,x,analytic_pdf,empirical_pdf,ks\n"));
}

#[test]
fn seed_override_changes_monte_carlo() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(
        dir.path(),
        "mc.json",
        r#"{"kind": "v2i", "n_list": [2], "tx_snr_db": [40], "rs": 0.5, "methods": ["mc"], "mc_samples": 20000}"#,
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("sop-sweep", &cfg_path, &a, &["--seed", "1"]), 0);
    assert_eq!(run("sop-sweep", &cfg_path, &b, &["--seed", "2"]), 0);
    let (ra, rb) = (read_sweep_csv(&a.join("sop_sweep.csv")).unwrap(), read_sweep_csv(&b.join("sop_sweep.csv")).unwrap());
    assert_ne!(ra[0].sop, rb[0].sop);
}

#[test]
fn zero_rate_closed_rows_carry_error_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(
        dir.path(),
        "theta.json",
        r#"{"kind": "v2v", "n_list": [2], "tx_snr_db": [40], "rs": [0.0, 0.5], "mc_samples": 100000}"#,
    );
    assert_eq!(run("cross-validate", &cfg_path, dir.path(), &[]), 0);
    let rows = read_sweep_csv(&dir.path().join("cross_validate.csv")).unwrap();
    assert_eq!(rows.len(), 6);
    let degenerate = rows.iter().find(|r| r.rs == 0.0 && r.method == "closed").unwrap();
    assert!(degenerate.status.starts_with("error:") && degenerate.sop.is_none());
    assert!(rows.iter().filter(|r| r.method != "closed" || r.rs > 0.0).all(|r| r.is_ok()));
}
