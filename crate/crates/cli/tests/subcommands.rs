//! End-to-end smoke test: every subcommand against a small 2-qubit chain,
//! chained through the files the previous stage wrote.

use std::path::Path;
use std::process::Command;

fn eigensweep() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eigensweep"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let out = dir.join("out");
    let text = format!(
        "hamiltonian.kind = heisenberg\n\
         hamiltonian.n = 2\n\
         ansatz.family = c0\n\
         grid.start = -1.2\n\
         grid.stop = 0.8\n\
         grid.step = 0.2\n\
         vite.steps = 10\n\
         vite.record_at = 5,10\n\
         clustering.k_min = 2\n\
         clustering.k_max = 3\n\
         clustering.restarts = 5\n\
         noise_study.p1 = 0\n\
         noise_study.p2_levels = 0\n\
         noise_study.include_baseline = false\n\
         seed = 11\n\
         output_dir = {}\n",
        out.display()
    );
    let path = dir.join("pipeline.conf");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn full_chain_produces_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = dir.path().join("out");

    for args in [
        vec!["exact"],
        vec!["sweep"],
        vec!["cluster"],
        vec!["refine"],
        vec!["noise-study"],
    ] {
        let output = eigensweep()
            .args(&args)
            .arg("--config")
            .arg(&config)
            .output()
            .expect("binary runs");
        assert!(
            output.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }

    for file in [
        "spectrum.csv",
        "records.csv",
        "manifest.json",
        "report.json",
        "boxplot.csv",
        "refined.csv",
        "noise_study.csv",
        "noise_mk.json",
    ] {
        let path = out.join(file);
        assert!(path.exists(), "{file} missing");
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.is_empty(), "{file} empty");
        if file.ends_with(".csv") {
            assert!(text.starts_with("# manifest_hash="), "{file} lacks hash header");
        } else {
            assert!(text.contains("manifest_hash"), "{file} lacks hash field");
        }
    }
}

#[test]
fn seed_override_changes_manifest_hash() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = dir.path().join("out");

    let mut hashes = Vec::new();
    for seed in ["11", "12"] {
        let output = eigensweep()
            .args(["sweep", "--config"])
            .arg(&config)
            .args(["--seed", seed])
            .output()
            .unwrap();
        assert!(output.status.success());
        let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
        let hash_line = manifest
            .lines()
            .find(|l| l.contains("manifest_hash"))
            .unwrap()
            .to_string();
        hashes.push(hash_line);
    }
    assert_ne!(hashes[0], hashes[1]);
}

#[test]
fn rejects_malformed_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "grid.step = nope\n").unwrap();
    let output = eigensweep().args(["exact", "--config"]).arg(&path).output().unwrap();
    assert!(!output.status.success());
    assert!(!output.stderr.is_empty());
}
