//! Dispatch of a config to its experiment.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evc::{self, EvcResult};
use crate::geometry::{Configuration, Cube};
use crate::harness::config::{Experiment, ExperimentConfig};
use crate::harness::output::ResultRecord;
use crate::model::{self, ModelSpec};
use crate::msa::{badgood, dominated, efc, etv, singularity, witensor};
use crate::rng;
use crate::spectral::{self, LocalOperator, DEFAULT_C_GRI};

pub const EVC_HEADER: [&str; 4] = ["s", "count", "prob", "stderr"];
pub const DECAY_HEADER: [&str; 8] = ["r", "d_s", "d_h", "mean", "stderr", "gk_u", "gk_h", "amplitude_violations"];

/// Runs the experiment on a pool of `workers` threads (all cores when
/// unset) and returns the record without writing it.
pub fn execute(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    let start = Instant::now();
    let mut record = pool.install(|| dispatch(cfg))?;
    record.wall_time_s = start.elapsed().as_secs_f64();
    Ok(record)
}

/// [`execute`] followed by an atomic write to `cfg.output`.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    let record = execute(cfg)?;
    record.write_atomic(&cfg.output)?;
    Ok(record)
}

fn s(x: impl ToString) -> String {
    x.to_string()
}

fn uses_params(e: &Experiment) -> bool {
    matches!(e, Experiment::SsProb { .. } | Experiment::BadGood { .. } | Experiment::Etv { nu: None, .. })
}

fn dispatch(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    let hash = cfg.hash()?;
    let tag = cfg.experiment.tag();
    let spec = &cfg.model;
    let (trials, seed) = (cfg.trials, cfg.seed);
    let mut summary = BTreeMap::new();
    summary.insert(s("trials"), s(trials));
    summary.insert(s("seed"), s(seed));
    if uses_params(&cfg.experiment) {
        let report = cfg.params.require(cfg.param_mode)?;
        summary.insert(s("param_violations"), s(report.failures().len()));
    }
    let record = |header: &[&str], rows, summary| Ok(ResultRecord::new(tag, hash.clone(), header, rows, summary));

    match &cfg.experiment {
        Experiment::Wegner1 { center, radius, energy, s_grid } => {
            let cube = Cube::new(center.clone(), *radius);
            let samples = evc::one_volume_samples(&cube, *energy, spec, trials, seed)?;
            let r = EvcResult::from_samples(&s_grid.values()?, samples, BTreeMap::new())?;
            evc_summary(&r, &mut summary);
            record(&EVC_HEADER, r.rows(), summary)
        }
        Experiment::Wegner2 { x, y, radius, s_grid, independent } => {
            let (cx, cy) = (Cube::new(x.clone(), *radius), Cube::new(y.clone(), *radius));
            evc::check_two_volume(&cx, &cy)?;
            let samples = evc::two_volume_samples(&cx, &cy, spec, trials, seed, !independent)?;
            let r = EvcResult::from_samples(&s_grid.values()?, samples, BTreeMap::new())?;
            evc_summary(&r, &mut summary);
            summary.insert(s("shared"), s(!independent));
            record(&EVC_HEADER, r.rows(), summary)
        }
        Experiment::ShiftTest { n_max, radius_max, shift } => {
            let checks = evc::shift_test_batch(spec, *n_max, *radius_max, trials, *shift, seed)?;
            let max = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
            summary.insert(s("max_residual"), s(max));
            let rows = checks.iter().enumerate().map(|(i, c)| vec![s(i), s(c.n_x), s(c.n_y), s(c.shift), s(c.residual)]).collect();
            record(&["instance", "n_x", "n_y", "shift", "residual"], rows, summary)
        }
        Experiment::SsProb { k, energy, c_gri } => {
            let n = spec.n_particles;
            let est = singularity::estimate_singularity_prob(n, *k, *energy, &cfg.params, spec, trials, seed, *c_gri)?;
            summary.insert(s("consistent_with_bound"), s(est.consistent_with_bound()));
            let row = vec![
                s(est.n),
                s(est.k),
                s(est.radius),
                s(est.energy),
                s(est.singular),
                s(est.p_hat),
                s(est.interval.0),
                s(est.interval.1),
                s(est.bound),
            ];
            record(&["n", "k", "radius", "energy", "singular", "p_hat", "ci_lo", "ci_hi", "bound"], vec![row], summary)
        }
        Experiment::BadGood { center, k, energy, c_gri } => {
            let big = Cube::new(center.clone(), cfg.params.scale(k + 1));
            let c = c_gri.unwrap_or(DEFAULT_C_GRI);
            let region = big.lattice_box().site_region();
            let out: Vec<badgood::ImplicationSample> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let w = model::sample_disorder(region.iter().cloned(), rng::derive_seed(seed, tag, t as u64), spec)?;
                    badgood::good_nr_implies_ns(&big, *energy, &cfg.params, &w, spec, c)
                })
                .collect::<Result<_>>()?;
            summary.insert(s("premises"), s(out.iter().filter(|o| o.premises()).count()));
            summary.insert(s("violations"), s(out.iter().filter(|o| o.violated()).count()));
            summary.insert(s("c_gri"), s(c));
            let rows = out
                .iter()
                .enumerate()
                .map(|(i, o)| vec![s(i), s(o.good), s(o.non_resonant), s(o.non_singular), s(o.dnorm), s(o.threshold)])
                .collect();
            record(&["trial", "good", "non_resonant", "non_singular", "dnorm", "threshold"], rows, summary)
        }
        Experiment::Dominated {} => {
            let out: Vec<(usize, bool, Option<dominated::DominatedBound>)> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut r = rng::trial_rng(rng::derive_seed(seed, tag, t as u64));
                    let gf = dominated::random_instance(&mut r);
                    let dom = gf.check_domination()?.dominated;
                    let bound = if dom { Some(dominated::dominated_bound(&gf, &dominated::AnnuliCover::minimal(&gf))?) } else { None };
                    Ok((gf.graph.len(), dom, bound))
                })
                .collect::<Result<_>>()?;
            let verified = out.iter().filter(|o| o.1).count();
            let violations = out.iter().filter(|o| o.2.as_ref().is_some_and(|b| !b.holds())).count();
            summary.insert(s("dominated"), s(verified));
            summary.insert(s("violations"), s(violations));
            let rows = out
                .iter()
                .enumerate()
                .map(|(i, (v, dom, b))| match b {
                    Some(b) => vec![s(i), s(v), s(dom), s(b.f_center), s(b.bound), s(b.holds())],
                    None => vec![s(i), s(v), s(dom), s(f64::NAN), s(f64::NAN), s("")],
                })
                .collect();
            record(&["instance", "vertices", "dominated", "f_center", "bound", "holds"], rows, summary)
        }
        Experiment::WiTensor { center, radius } => {
            let cube = Cube::new(center.clone(), *radius);
            let region = cube.lattice_box().site_region();
            let out: Vec<witensor::WiTensorReport> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let w = model::sample_disorder(region.iter().cloned(), rng::derive_seed(seed, tag, t as u64), spec)?;
                    witensor::wi_tensor_check(&cube, &w, spec)
                })
                .collect::<Result<_>>()?;
            summary.insert(s("failures"), s(out.iter().filter(|r| !r.passed(1e-9)).count()));
            let rows = out
                .iter()
                .enumerate()
                .map(|(i, r)| vec![s(i), s(r.gap), s(r.cross_norm), s(r.bound), s(r.eigen_sum_error), s(r.nonres_excess), s(r.passed(1e-9))])
                .collect();
            record(&["trial", "gap", "cross_norm", "bound", "eigen_sum_error", "nonres_excess", "passed"], rows, summary)
        }
        Experiment::Etv { radius, nu, kappa } => {
            let nu = nu.unwrap_or_else(|| cfg.params.rate(spec.n_particles));
            let kappa = kappa.unwrap_or(cfg.params.kappa);
            let r = etv::etv_experiment(spec, *radius, nu, kappa, trials, seed)?;
            summary.insert(s("passed"), s(r.passed()));
            let row = vec![
                s(r.radius),
                s(r.nu),
                s(r.kappa),
                s(r.scales.a),
                s(r.scales.c),
                s(r.violations),
                s(r.frequency),
                s(r.stderr),
                s(r.budget),
            ];
            record(&["radius", "nu", "kappa", "a", "c", "violations", "frequency", "stderr", "budget"], vec![row], summary)
        }
        Experiment::EfcDecay { gk_energies, gk_quantile, .. } => {
            let pairs = cfg.decay_pairs()?;
            let opts = efc::DecayOptions { trials, seed, gk_quantile: *gk_quantile, gk_energies: *gk_energies };
            let p = efc::efc_decay_experiment(spec, &pairs, &opts)?;
            decay_summary(&p, &mut summary);
            record(&DECAY_HEADER, p.csv_rows(), summary)
        }
        Experiment::GriMeasure { center, inner_radius, outer_radius, energy } => {
            let (inner, outer) = (Cube::new(center.clone(), *inner_radius), Cube::new(center.clone(), *outer_radius));
            let region = outer.lattice_box().site_region();
            let out: Vec<Option<spectral::GriMeasurement>> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let w = model::sample_disorder(region.iter().cloned(), rng::derive_seed(seed, tag, t as u64), spec)?;
                    measure_gri(&inner, &outer, *energy, &w, spec)
                })
                .collect::<Result<_>>()?;
            let c = out.iter().flatten().map(|m| m.constant).fold(0.0, f64::max);
            summary.insert(s("c_gri"), s(c));
            summary.insert(s("resonant"), s(out.iter().filter(|m| m.is_none()).count()));
            let rows = out
                .iter()
                .enumerate()
                .map(|(i, m)| match m {
                    Some(m) => vec![s(i), s(m.constant), s(m.pairs)],
                    None => vec![s(i), s(f64::NAN), s(0)],
                })
                .collect();
            record(&["trial", "constant", "pairs"], rows, summary)
        }
    }
}

/// GRI constant for one sample; `None` when `E` hits either spectrum.
pub fn measure_gri(inner: &Cube, outer: &Cube, e: f64, w: &model::DisorderSample, spec: &ModelSpec) -> Result<Option<spectral::GriMeasurement>> {
    let a = LocalOperator::new(inner.clone(), w, spec)?;
    let b = LocalOperator::new(outer.clone(), w, spec)?;
    match spectral::gri_verify(&a, &b, e) {
        Ok(m) => Ok(Some(m)),
        Err(Error::Resonant { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn evc_summary(r: &EvcResult, summary: &mut BTreeMap<String, String>) {
    if let Some(f) = &r.fit {
        summary.insert(s("theta"), s(f.slope));
        summary.insert(s("theta_half_width"), s(f.half_width));
        summary.insert(s("fit_points"), s(f.points));
    }
    summary.insert(s("max_ratio_2_3"), s(r.max_ratio(2.0 / 3.0)));
}

fn decay_summary(p: &efc::DecayProfile, summary: &mut BTreeMap<String, String>) {
    if let Some(f) = &p.log_fit {
        summary.insert(s("slope"), s(f.slope));
        summary.insert(s("slope_p_value"), s(f.p_value));
    }
    if let Some(f) = &p.stretched {
        summary.insert(s("nu_hat"), s(f.nu));
        summary.insert(s("kappa_hat"), s(f.kappa));
    }
    summary.insert(s("strictly_decreasing"), s(p.strictly_decreasing()));
    summary.insert(s("amplitude_violations"), s(p.amplitude_violations()));
    summary.insert(s("gk_holds"), s(p.rows.iter().all(|r| r.gk_holds())));
}

/// Center configuration at the origin.
pub fn origin(n: usize, d: usize) -> Configuration {
    Configuration::from_flat(n, d, vec![0; n * d]).expect("n, d >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::SGrid;
    use std::path::PathBuf;

    fn wegner1(trials: usize, workers: Option<usize>) -> ExperimentConfig {
        ExperimentConfig {
            experiment: Experiment::Wegner1 { center: Configuration::line(&[0]), radius: 8, energy: 0.5, s_grid: SGrid::default() },
            model: ModelSpec::new(1, 1),
            params: Default::default(),
            param_mode: Default::default(),
            trials,
            seed: 11,
            output: PathBuf::from("unused.csv"),
            workers,
        }
    }

    #[test]
    fn smoke_ten_trials() {
        let r = execute(&wegner1(10, Some(1))).unwrap();
        assert_eq!(r.summary["trials"], "10");
        assert_eq!(r.header, EVC_HEADER);
        assert_eq!(r.rows.len(), 41);
        let last: usize = r.rows.last().unwrap()[1].parse().unwrap();
        assert!(last <= 10);
    }

    #[test]
    fn reruns_and_worker_counts_agree() {
        let a = execute(&wegner1(40, Some(1))).unwrap();
        let b = execute(&wegner1(40, Some(1))).unwrap();
        let c = execute(&wegner1(40, Some(8))).unwrap();
        assert_eq!(a.data_section(), b.data_section());
        assert_eq!(a.data_section(), c.data_section());
        assert_eq!(a.content_id, c.content_id);
        assert_eq!(a.config_hash, c.config_hash);
    }

    #[test]
    fn strict_mode_refuses_desk_params() {
        let mut cfg = wegner1(10, None);
        cfg.experiment = Experiment::SsProb { k: 0, energy: 0.1, c_gri: None };
        cfg.param_mode = crate::msa::ParamMode::Strict;
        assert!(execute(&cfg).is_err());
        cfg.param_mode = crate::msa::ParamMode::Exploratory;
        let r = execute(&cfg).unwrap();
        assert!(r.summary_f64("param_violations").unwrap() >= 1.0);
    }
}
