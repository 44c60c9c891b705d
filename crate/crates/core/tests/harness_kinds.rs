use std::path::{Path, PathBuf};

use anderson_lab::harness::{self, ExperimentConfig, ResultRecord, Verdict};

fn configs() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|e| e == "json")).collect();
    v.sort();
    v
}

fn shrink(cfg: &mut ExperimentConfig) {
    cfg.trials = match cfg.experiment.tag() {
        "shift-test" | "dominated" => 20,
        _ => 4,
    };
    if let harness::Experiment::EfcDecay { r_list, gk_energies, .. } = &mut cfg.experiment {
        r_list.truncate(3);
        *gk_energies = (*gk_energies).min(10);
    }
}

#[test]
fn every_shipped_config_parses_and_round_trips() {
    let paths = configs();
    let mut kinds: Vec<&str> = Vec::new();
    for p in &paths {
        let cfg = ExperimentConfig::load(p).unwrap();
        assert!(cfg.output.starts_with(p.parent().unwrap()), "relative output resolved next to the config");
        let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
        kinds.push(cfg.experiment.tag());
    }
    kinds.sort();
    kinds.dedup();
    assert_eq!(kinds.len(), 10, "{kinds:?}");
}

#[test]
fn every_kind_runs_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for p in configs() {
        let mut cfg = ExperimentConfig::load(&p).unwrap();
        shrink(&mut cfg);
        cfg.output = dir.path().join(p.with_extension("csv").file_name().unwrap());
        let rec = harness::run(&cfg).unwrap();
        assert_eq!(rec.kind, cfg.experiment.tag());
        assert_eq!(rec.config_hash, cfg.hash().unwrap());
        let back = ResultRecord::read(&cfg.output).unwrap();
        assert_eq!(back.rows, rec.rows);
        assert_eq!(back.content_id, rec.content_id);
        files.push(cfg.output.clone());
    }
    let out = dir.path().join("report");
    let rep = harness::report(&files, Some(&out)).unwrap();
    assert_eq!(rep.lines.len(), files.len());
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), files.len() + 1);
    for l in &rep.lines {
        if l.kind == "shift-test" || l.kind == "dominated" {
            assert_eq!(l.verdict, Verdict::Pass, "{}", l.detail);
        }
    }
}
