//! Decay of the eigenfunction correlator with the distance between
//! configurations.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Configuration, Cube, LatticeBox};
use crate::model::{self, ModelSpec};
use crate::rng;
use crate::spectral::{self, LocalOperator};
use crate::stats::{self, LinearFit, StretchedFit};

/// Number of sampled times per instance for the dynamical-amplitude check.
pub const TIME_SAMPLES: usize = 32;

/// A pair of configurations at nominal separation `r`, evaluated on `domain`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayPair {
    pub r: usize,
    pub x: Configuration,
    pub y: Configuration,
    pub domain: LatticeBox,
}

impl DecayPair {
    /// Pair on the smallest box containing `Λ_{⌈r/2⌉}(x) ∪ Λ_{⌈r/2⌉}(y)`.
    pub fn new(r: usize, x: Configuration, y: Configuration) -> Result<Self> {
        let domain = LatticeBox::enclosing(&[&x, &y], r.div_ceil(2) as i64)?;
        Ok(Self { r, x, y, domain })
    }
}

/// `x = (0, 0)`, `y = (0, R)` for `N = 2`, `d = 1`, all on one shared box.
pub fn two_particle_family(r_list: &[usize]) -> Result<Vec<DecayPair>> {
    let r_max = *r_list.iter().max().ok_or_else(|| Error::InvalidArgument("empty R list".into()))?;
    let x = Configuration::line(&[0, 0]);
    let far = Configuration::line(&[0, r_max as i64]);
    let domain = LatticeBox::enclosing(&[&x, &far], r_max.div_ceil(2) as i64)?;
    Ok(r_list
        .iter()
        .map(|&r| DecayPair { r, x: x.clone(), y: Configuration::line(&[0, r as i64]), domain: domain.clone() })
        .collect())
}

/// `x = (0, 0, R)`, `y = (0, R, R)`: the Hausdorff distance vanishes while
/// the symmetrized distance is `R`.
pub fn hausdorff_blind_family(r_list: &[usize]) -> Result<Vec<DecayPair>> {
    r_list
        .iter()
        .map(|&r| {
            let r = r as i64;
            DecayPair::new(r as usize, Configuration::line(&[0, 0, r]), Configuration::line(&[0, r, r]))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub r: usize,
    pub d_s: i64,
    pub d_h: i64,
    pub mean: f64,
    pub stderr: f64,
    /// Instances where a sampled `|<y|P e^{-itH}|x>|` exceeded the kernel by more than `1e-12`.
    pub amplitude_violations: usize,
    /// Quantile level-`u` of `sup_E min(F_x, F_y)`.
    pub gk_u: f64,
    /// Fraction of trials with `sup_E min(F_x, F_y) > u`.
    pub gk_h: f64,
}

impl DecayRow {
    /// `E[Υ] <= 4u + h`.
    pub fn gk_holds(&self) -> bool {
        self.mean <= 4.0 * self.gk_u + self.gk_h
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub rows: Vec<DecayRow>,
    pub trials: usize,
    /// `ln E[Υ]` against `R`.
    pub log_fit: Option<LinearFit>,
    /// `E[Υ] ≈ A e^{-ν R^κ}`.
    pub stretched: Option<StretchedFit>,
    pub metadata: BTreeMap<String, String>,
}

impl DecayProfile {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].mean < w[0].mean)
    }

    pub fn amplitude_violations(&self) -> usize {
        self.rows.iter().map(|r| r.amplitude_violations).sum()
    }

    /// CSV rows `r,d_s,d_h,mean,stderr,gk_u,gk_h,amplitude_violations`.
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.r.to_string(),
                    r.d_s.to_string(),
                    r.d_h.to_string(),
                    r.mean.to_string(),
                    r.stderr.to_string(),
                    r.gk_u.to_string(),
                    r.gk_h.to_string(),
                    r.amplitude_violations.to_string(),
                ]
            })
            .collect()
    }
}

/// Options of the decay experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayOptions {
    pub trials: usize,
    pub seed: u64,
    /// Quantile defining `u` in the `4u + h` check.
    pub gk_quantile: f64,
    /// Energy points for `sup_E min(F_x, F_y)`; zero skips the check.
    pub gk_energies: usize,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self { trials: 200, seed: 0, gk_quantile: 0.9, gk_energies: 400 }
    }
}

struct TrialOutcome {
    kernel: f64,
    violation: bool,
    sup_min_f: f64,
}

fn trial(pair: &DecayPair, spec: &ModelSpec, opts: &DecayOptions, t: usize) -> Result<TrialOutcome> {
    let wseed = rng::derive_seed(opts.seed, "efc-decay", t as u64);
    let mut region = pair.domain.site_region();
    let half = pair.r.div_ceil(2);
    let (cx, cy) = (Cube::new(pair.x.clone(), half), Cube::new(pair.y.clone(), half));
    region.extend(cx.lattice_box().site_region());
    region.extend(cy.lattice_box().site_region());
    let w = model::sample_disorder(region, wseed, spec)?;
    let h = model::assemble_on_box(&pair.domain, &w, spec)?;
    let s = spectral::eigensolve(&h).with_window(0.0, spec.energy_window);
    let (ix, iy) = (h.index_of(&pair.x).expect("x in domain"), h.index_of(&pair.y).expect("y in domain"));
    let kernel = spectral::efc_kernel(&s, ix, iy);
    let mut r = rng::trial_rng(rng::derive_seed(opts.seed, "efc-times", t as u64));
    let violation = (0..TIME_SAMPLES).any(|_| {
        let time = r.random_range(-1e3..1e3);
        spectral::dynamical_amplitude(&s, ix, iy, time) > kernel + 1e-12
    });
    let sup_min_f = if opts.gk_energies > 0 && half > 0 {
        let fx = LocalOperator::new(cx, &w, spec)?.boundary_profile();
        let fy = LocalOperator::new(cy, &w, spec)?.boundary_profile();
        let (lo, hi) = spec.window();
        (0..opts.gk_energies)
            .map(|k| lo + (hi - lo) * (k as f64 + 0.5) / opts.gk_energies as f64)
            .map(|e| fx.eval(e).min(fy.eval(e)))
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(TrialOutcome { kernel, violation, sup_min_f })
}

/// Mean correlator `E[Υ(x, y)]` over disorder at each separation, with the
/// log-linear and stretched-exponential fits and the `4u + h` comparison.
pub fn efc_decay_experiment(spec: &ModelSpec, pairs: &[DecayPair], opts: &DecayOptions) -> Result<DecayProfile> {
    spec.validate()?;
    if pairs.is_empty() || opts.trials == 0 {
        return Err(Error::InvalidArgument("need at least one pair and one trial".into()));
    }
    // trials share a disorder stream across pairs; pairs on the same box
    // reuse one eigensolve per trial
    let mut rows = Vec::with_capacity(pairs.len());
    let mut by_domain: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, p) in pairs.iter().enumerate() {
        if !p.domain.contains(&p.x) || !p.domain.contains(&p.y) {
            return Err(Error::Precondition(format!("pair at R = {} not inside its domain", p.r)));
        }
        by_domain.entry(format!("{:?}{:?}", p.domain.lo(), p.domain.hi())).or_default().push(i);
    }
    let mut outcomes: Vec<Vec<TrialOutcome>> = (0..pairs.len()).map(|_| Vec::new()).collect();
    for idx in by_domain.values() {
        let per_trial: Vec<Vec<TrialOutcome>> = (0..opts.trials)
            .into_par_iter()
            .map(|t| shared_trial(pairs, idx, spec, opts, t))
            .collect::<Result<_>>()?;
        for trial in per_trial {
            for (k, o) in trial.into_iter().enumerate() {
                outcomes[idx[k]].push(o);
            }
        }
    }
    for (p, outs) in pairs.iter().zip(&outcomes) {
        let kernels: Vec<f64> = outs.iter().map(|o| o.kernel).collect();
        let n = kernels.len() as f64;
        let mean = kernels.iter().sum::<f64>() / n;
        let var = kernels.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let mut sups: Vec<f64> = outs.iter().map(|o| o.sup_min_f).collect();
        sups.sort_by(f64::total_cmp);
        let qi = ((opts.gk_quantile * n).ceil() as usize).clamp(1, sups.len()) - 1;
        let gk_u = sups[qi];
        let gk_h = sups.iter().filter(|s| **s > gk_u).count() as f64 / n;
        rows.push(DecayRow {
            r: p.r,
            d_s: geometry::sym_distance(&p.x, &p.y)?,
            d_h: geometry::hausdorff_distance(&p.x, &p.y)?,
            mean,
            stderr: (var / n).sqrt(),
            amplitude_violations: outs.iter().filter(|o| o.violation).count(),
            gk_u,
            gk_h,
        });
    }
    let positive: Vec<&DecayRow> = rows.iter().filter(|r| r.mean > 0.0).collect();
    let xs: Vec<f64> = positive.iter().map(|r| r.d_s as f64).collect();
    let ys: Vec<f64> = positive.iter().map(|r| r.mean.ln()).collect();
    let log_fit = stats::linear_fit(&xs, &ys);
    let stretched = stats::fit_stretched_exponential(&xs, &ys);
    let mut metadata = BTreeMap::new();
    metadata.insert("n".into(), spec.n_particles.to_string());
    metadata.insert("d".into(), spec.dim.to_string());
    metadata.insert("g".into(), spec.disorder_coupling.to_string());
    metadata.insert("e_star".into(), spec.energy_window.to_string());
    metadata.insert("seed".into(), opts.seed.to_string());
    Ok(DecayProfile { rows, trials: opts.trials, log_fit, stretched, metadata })
}

fn shared_trial(pairs: &[DecayPair], idx: &[usize], spec: &ModelSpec, opts: &DecayOptions, t: usize) -> Result<Vec<TrialOutcome>> {
    if opts.gk_energies == 0 && idx.len() > 1 {
        // one eigensolve for every pair on this box
        let pair = &pairs[idx[0]];
        let w = model::sample_disorder(pair.domain.site_region(), rng::derive_seed(opts.seed, "efc-decay", t as u64), spec)?;
        let h = model::assemble_on_box(&pair.domain, &w, spec)?;
        let s = spectral::eigensolve(&h).with_window(0.0, spec.energy_window);
        let mut r = rng::trial_rng(rng::derive_seed(opts.seed, "efc-times", t as u64));
        let times: Vec<f64> = (0..TIME_SAMPLES).map(|_| r.random_range(-1e3..1e3)).collect();
        return Ok(idx
            .iter()
            .map(|&i| {
                let p = &pairs[i];
                let (ix, iy) = (h.index_of(&p.x).unwrap(), h.index_of(&p.y).unwrap());
                let kernel = spectral::efc_kernel(&s, ix, iy);
                let violation = times.iter().any(|&time| spectral::dynamical_amplitude(&s, ix, iy, time) > kernel + 1e-12);
                TrialOutcome { kernel, violation, sup_min_f: 0.0 }
            })
            .collect());
    }
    idx.iter().map(|&i| trial(&pairs[i], spec, opts, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families() {
        let f = two_particle_family(&[4, 8]).unwrap();
        assert_eq!(f[0].domain, f[1].domain);
        assert_eq!(geometry::sym_distance(&f[1].x, &f[1].y).unwrap(), 8);
        let h = hausdorff_blind_family(&[3]).unwrap();
        assert_eq!(geometry::hausdorff_distance(&h[0].x, &h[0].y).unwrap(), 0);
        assert_eq!(geometry::sym_distance(&h[0].x, &h[0].y).unwrap(), 3);
        assert!(two_particle_family(&[]).is_err());
    }

    #[test]
    fn coincident_points_bounded_by_one() {
        let spec = ModelSpec::new(1, 1).with_coupling(5.0).with_window(10.0);
        let x = Configuration::line(&[0]);
        let pair = DecayPair::new(4, x.clone(), x).unwrap();
        let opts = DecayOptions { trials: 20, seed: 1, gk_energies: 0, ..DecayOptions::default() };
        let p = efc_decay_experiment(&spec, &[pair], &opts).unwrap();
        assert!(p.rows[0].mean <= 1.0 + 1e-12);
        assert_eq!(p.amplitude_violations(), 0);
    }

    #[test]
    fn strong_disorder_decay() {
        let spec = ModelSpec::new(2, 1).with_coupling(50.0).with_window(100.0);
        let pairs = two_particle_family(&[2, 4, 6]).unwrap();
        let opts = DecayOptions { trials: 30, seed: 2, gk_energies: 50, ..DecayOptions::default() };
        let p = efc_decay_experiment(&spec, &pairs, &opts).unwrap();
        assert!(p.strictly_decreasing(), "{:?}", p.rows);
        assert!(p.log_fit.as_ref().unwrap().slope < 0.0);
        assert_eq!(p.amplitude_violations(), 0);
    }
}
