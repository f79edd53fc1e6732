use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn vndn(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vndn"))
        .args(args)
        .env("NDNSIM_RESULTS_DIR", out)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("small.toml");
    fs::write(
        &path,
        "seed = 4\n[traffic]\nvehicle_count = 6\nduration_s = 10.0\n[phy]\nattempt_loss = 0.1\n",
    )
    .unwrap();
    path
}

fn only_subdir(out: &Path) -> PathBuf {
    let dirs: Vec<PathBuf> = fs::read_dir(out).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    assert!(dirs[0].file_name().unwrap().to_str().unwrap().starts_with("cfg-"));
    dirs[0].clone()
}

#[test]
fn run_writes_metrics_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("results");
    let o = vndn(&["run", "--config", cfg.to_str().unwrap(), "--deployment", "down", "--scenario", "2", "--seed", "17"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let run_dir = only_subdir(&out).join("runs").join("Down-2");
    let mut files: Vec<String> = fs::read_dir(&run_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files, ["seed-17.csv", "seed-17.json"]);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(run_dir.join("seed-17.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed_override"], 17);
    assert_eq!(manifest["seed"], 17);
    assert_eq!(manifest["instance"], "Down-2");
    let csv = fs::read_to_string(run_dir.join("seed-17.csv")).unwrap();
    assert!(csv.starts_with("node_id,role,app_kind,"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[mode]\ndeploymnet = \"up\"\n").unwrap();
    let o = vndn(&["run", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("deploymnet"));

    fs::write(&cfg, "[apps]\nrate_min = -3.0\n").unwrap();
    let o = vndn(&["matrix", "--config", cfg.to_str().unwrap(), "--seeds", "1"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("apps.rate_min"));
}

#[test]
fn missing_trace_file_is_a_run_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("trace.toml");
    fs::write(&cfg, "[traffic]\ntrace_file = \"nowhere.csv\"\n").unwrap();
    let o = vndn(&["run", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    let o = vndn(&["matrix", "--config", cfg.to_str().unwrap(), "--seeds", "1"], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
}

#[test]
fn matrix_is_reproducible_and_jobs_independent() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let cfg = cfg.to_str().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let o = vndn(&["matrix", "--config", cfg, "--seeds", "2", "--jobs", "1", "--out", a.to_str().unwrap()], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = vndn(&["matrix", "--config", cfg, "--seeds", "2", "--jobs", "3", "--out", b.to_str().unwrap()], tmp.path());
    assert!(o.status.success());
    let (da, db) = (only_subdir(&a), only_subdir(&b));
    for f in ["summary.csv", "comparisons.csv", "manifest.json", "config.toml"] {
        assert_eq!(fs::read(da.join(f)).unwrap(), fs::read(db.join(f)).unwrap(), "{f}");
    }
    let summary = fs::read_to_string(da.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 8);
    assert_eq!(fs::read_to_string(da.join("comparisons.csv")).unwrap().lines().count(), 1 + 28);
    let runs: usize = fs::read_dir(da.join("runs"))
        .unwrap()
        .map(|d| fs::read_dir(d.unwrap().path()).unwrap().filter(|f| f.as_ref().unwrap().path().extension().unwrap() == "csv").count())
        .sum();
    assert_eq!(runs, 16);

    // same inputs again, same directory: byte-identical summary
    let before = fs::read(da.join("summary.csv")).unwrap();
    let o = vndn(&["matrix", "--config", cfg, "--seeds", "2", "--out", a.to_str().unwrap()], tmp.path());
    assert!(o.status.success());
    assert_eq!(fs::read(da.join("summary.csv")).unwrap(), before);
}

#[test]
fn matrix_filters_and_compare() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("r");
    let o = vndn(&["matrix", "--config", cfg.to_str().unwrap(), "--seeds", "3", "--deployment", "proposal"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = only_subdir(&out);
    let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);

    let d = dir.to_str().unwrap();
    let o = vndn(&["compare", d, "Proposal-1", "Proposal-1"], &out);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("A12=0.5000"), "{text}");
    assert!(text.contains("p=1.0"), "{text}");
    let rows = fs::read_to_string(dir.join("compare.csv")).unwrap();
    assert!(rows.starts_with("instance_a,instance_b,metric,n1,n2,u_statistic,p_value,a12"));

    let o = vndn(&["compare", d, "Proposal-2", "Up-2"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Up-2"));
    assert_eq!(fs::read_to_string(dir.join("compare.csv")).unwrap().lines().count(), 2);
}
