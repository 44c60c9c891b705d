//! Eigenvalue-concentration Monte Carlo and the flat-tiling shift identity.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Configuration, Cube, Separation, Side, Site};
use crate::model::{self, DisorderSample, ModelSpec};
use crate::rng;
use crate::spectral::{self, SpectralData};
use crate::stats;

/// Smallest number of trials accepted by the library entry points.
pub const MIN_TRIALS: usize = 500;

/// Probability band used for the log-log slope fit, relative to the
/// plateau `max_s p(s)` (trials with an empty window never count).
pub const FIT_BAND: (f64, f64) = (0.01, 0.1);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    /// 95% half-width of the slope.
    pub half_width: f64,
    pub points: usize,
}

/// Empirical CDF of a spectral distance over independent disorder samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvcResult {
    pub s_grid: Vec<f64>,
    pub counts: Vec<usize>,
    pub empirical_prob: Vec<f64>,
    pub trials: usize,
    pub fit: Option<SlopeFit>,
    pub metadata: BTreeMap<String, String>,
    /// Per-trial distances, in trial order.
    pub samples: Vec<f64>,
}

impl EvcResult {
    /// Tabulates the CDF of `samples` on `s_grid`.
    pub fn from_samples(s_grid: &[f64], samples: Vec<f64>, metadata: BTreeMap<String, String>) -> Result<Self> {
        check_grid(s_grid)?;
        let trials = samples.len();
        if trials == 0 {
            return Err(Error::InvalidArgument("no trials".into()));
        }
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let counts: Vec<usize> = s_grid.iter().map(|&s| sorted.partition_point(|&d| d <= s)).collect();
        let empirical_prob: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
        let fit = slope_fit(s_grid, &empirical_prob);
        Ok(Self { s_grid: s_grid.to_vec(), counts, empirical_prob, trials, fit, metadata, samples })
    }

    pub fn stderr(&self) -> Vec<f64> {
        self.empirical_prob.iter().map(|&p| stats::binomial_stderr(p, self.trials)).collect()
    }

    /// `max_s p(s) / s^θ` over grid points with `s > 0`.
    pub fn max_ratio(&self, theta: f64) -> f64 {
        self.s_grid
            .iter()
            .zip(&self.empirical_prob)
            .filter(|(s, _)| **s > 0.0)
            .map(|(s, p)| p / s.powf(theta))
            .fold(0.0, f64::max)
    }

    /// CSV data rows `s,count,prob,stderr`.
    pub fn rows(&self) -> Vec<Vec<String>> {
        self.s_grid
            .iter()
            .zip(&self.counts)
            .zip(self.empirical_prob.iter().zip(self.stderr()))
            .map(|((s, c), (p, e))| vec![s.to_string(), c.to_string(), p.to_string(), e.to_string()])
            .collect()
    }
}

fn check_grid(s_grid: &[f64]) -> Result<()> {
    if s_grid.is_empty() {
        return Err(Error::InvalidArgument("empty s grid".into()));
    }
    if s_grid.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(Error::InvalidArgument("s grid must hold finite nonnegative values".into()));
    }
    if s_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("s grid must be strictly ascending".into()));
    }
    Ok(())
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    Ok(())
}

/// Least squares of `ln p` on `ln s` over grid points with `p / p_max` in
/// [`FIT_BAND`].
pub fn slope_fit(s_grid: &[f64], probs: &[f64]) -> Option<SlopeFit> {
    let top = probs.iter().copied().fold(0.0, f64::max);
    let (lo, hi) = (FIT_BAND.0 * top, FIT_BAND.1 * top);
    let (xs, ys): (Vec<f64>, Vec<f64>) = s_grid
        .iter()
        .zip(probs)
        .filter(|(s, p)| **s > 0.0 && **p > 0.0 && **p >= lo && **p <= hi)
        .map(|(s, p)| (s.ln(), p.ln()))
        .unzip();
    let fit = stats::linear_fit(&xs, &ys)?;
    Some(SlopeFit { slope: fit.slope, half_width: 1.96 * fit.slope_stderr, points: xs.len() })
}

/// `dist(Σ^{I*}, E)` for one cube and one disorder sample.
pub fn one_volume_distance(cube: &Cube, e: f64, sample: &DisorderSample, spec: &ModelSpec) -> Result<f64> {
    let h = model::assemble_hamiltonian(cube, sample, spec)?;
    let s = spectral::eigensolve(&h).with_window(0.0, spec.energy_window);
    Ok(s.window_distance_to(e))
}

/// `dist(Σ^{I*}_x, Σ^{I*}_y)`; infinite if either window is empty.
pub fn spectral_gap(a: &SpectralData, b: &SpectralData) -> f64 {
    let (ea, eb) = (a.window_eigenvalues(), b.window_eigenvalues());
    let mut best = f64::INFINITY;
    let mut j = 0;
    // both lists ascending: merge walk
    for &x in &ea {
        while j + 1 < eb.len() && eb[j + 1] <= x {
            j += 1;
        }
        for &y in eb.get(j..(j + 2).min(eb.len())).unwrap_or(&[]) {
            best = best.min((x - y).abs());
        }
    }
    best
}

/// Per-trial one-volume distances with no trial-count floor.
pub fn one_volume_samples(cube: &Cube, e: f64, spec: &ModelSpec, trials: usize, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    let region = cube.lattice_box().site_region();
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let sample = model::sample_disorder(region.iter().cloned(), rng::derive_seed(seed, "wegner1", t as u64), spec)?;
            one_volume_distance(cube, e, &sample, spec)
        })
        .collect()
}

fn metadata(spec: &ModelSpec, seed: u64, extra: &[(&str, String)]) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("n".into(), spec.n_particles.to_string());
    m.insert("d".into(), spec.dim.to_string());
    m.insert("g".into(), spec.disorder_coupling.to_string());
    m.insert("seed".into(), seed.to_string());
    for (k, v) in extra {
        m.insert((*k).into(), v.clone());
    }
    m
}

/// One-volume concentration: CDF of `dist(Σ^{I*}_{x,L}, E)`.
pub fn wegner_one_volume(cube: &Cube, e: f64, spec: &ModelSpec, s_grid: &[f64], trials: usize, seed: u64) -> Result<EvcResult> {
    check_grid(s_grid)?;
    check_trials(trials)?;
    let (lo, hi) = spec.window();
    if e < lo || e > hi {
        return Err(Error::InvalidArgument(format!("E = {e} outside the window [{lo}, {hi}]")));
    }
    let samples = one_volume_samples(cube, e, spec, trials, seed)?;
    let meta = metadata(spec, seed, &[("L", cube.radius.to_string()), ("E", e.to_string()), ("center", format!("{:?}", cube.center))]);
    EvcResult::from_samples(s_grid, samples, meta)
}

/// Two-volume precondition: `d_S(x, y) > 4NL` and a weak-separation certificate exists.
pub fn check_two_volume(cx: &Cube, cy: &Cube) -> Result<Separation> {
    let dist = geometry::sym_distance(&cx.center, &cy.center)?;
    let limit = 4 * (cx.n_particles() * cx.radius) as i64;
    if dist <= limit {
        return Err(Error::Precondition(format!("d_S = {dist} does not exceed 4NL = {limit}")));
    }
    geometry::weakly_separated(cx, cy)?
        .ok_or_else(|| Error::Precondition("no weak-separation certificate".into()))
}

/// Per-trial two-volume distances. With `shared` both spectra see the same
/// disorder; otherwise the second cube draws from an independent stream.
pub fn two_volume_samples(cx: &Cube, cy: &Cube, spec: &ModelSpec, trials: usize, seed: u64, shared: bool) -> Result<Vec<f64>> {
    spec.validate()?;
    let rx = cx.lattice_box().site_region();
    let ry = cy.lattice_box().site_region();
    let union: BTreeSet<Site> = rx.union(&ry).cloned().collect();
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let s1 = rng::derive_seed(seed, "wegner2", t as u64);
            let (wx, wy) = if shared {
                let w = model::sample_disorder(union.iter().cloned(), s1, spec)?;
                (w.clone(), w)
            } else {
                let s2 = rng::derive_seed(seed, "wegner2-independent", t as u64);
                (
                    model::sample_disorder(rx.iter().cloned(), s1, spec)?,
                    model::sample_disorder(ry.iter().cloned(), s2, spec)?,
                )
            };
            let a = spectral::eigensolve(&model::assemble_hamiltonian(cx, &wx, spec)?).with_window(0.0, spec.energy_window);
            let b = spectral::eigensolve(&model::assemble_hamiltonian(cy, &wy, spec)?).with_window(0.0, spec.energy_window);
            Ok(spectral_gap(&a, &b))
        })
        .collect()
}

/// Two-volume concentration with a shared disorder sample per trial.
pub fn wegner_two_volume(cx: &Cube, cy: &Cube, spec: &ModelSpec, s_grid: &[f64], trials: usize, seed: u64) -> Result<EvcResult> {
    two_volume(cx, cy, spec, s_grid, trials, seed, true)
}

/// Same as [`wegner_two_volume`] but with independent samples for the two cubes.
pub fn wegner_two_volume_independent(
    cx: &Cube,
    cy: &Cube,
    spec: &ModelSpec,
    s_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<EvcResult> {
    two_volume(cx, cy, spec, s_grid, trials, seed, false)
}

fn two_volume(cx: &Cube, cy: &Cube, spec: &ModelSpec, s_grid: &[f64], trials: usize, seed: u64, shared: bool) -> Result<EvcResult> {
    check_grid(s_grid)?;
    check_trials(trials)?;
    check_two_volume(cx, cy)?;
    let samples = two_volume_samples(cx, cy, spec, trials, seed, shared)?;
    let mut meta = metadata(
        spec,
        seed,
        &[
            ("L", cx.radius.to_string()),
            ("x", format!("{:?}", cx.center)),
            ("y", format!("{:?}", cy.center)),
            ("shared_disorder", shared.to_string()),
        ],
    );
    let mut result = EvcResult::from_samples(s_grid, samples, BTreeMap::new())?;
    meta.insert("max_ratio_2_3".into(), result.max_ratio(2.0 / 3.0).to_string());
    result.metadata = meta;
    Ok(result)
}

/// Outcome of one eigenvalue-shift check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftCheck {
    /// Particles of the first/second cube inside `Q`.
    pub n_x: usize,
    pub n_y: usize,
    pub shift: f64,
    /// `max_j |λ_j(c) - λ_j(0) - n g c|` over both cubes.
    pub residual: f64,
}

/// Adds `c` to every amplitude on `Q`, rediagonalizes both cubes and
/// compares each eigenvalue displacement with `n g c`.
pub fn eigenvalue_shift_test(
    cx: &Cube,
    cy: &Cube,
    sep: &Separation,
    c: f64,
    sample: &DisorderSample,
    spec: &ModelSpec,
) -> Result<ShiftCheck> {
    if !geometry::verify_separation(cx, cy, sep) {
        return Err(Error::InvalidCertificate("certificate does not separate the cubes".into()));
    }
    let (n_x, n_y) = sep.counts();
    let q: Vec<Site> = sep.q.sites().into_iter().filter(|a| sample.contains(a)).collect();
    let shifted = model::shift_amplitudes(sample, &q, c)?;
    let g = spec.disorder_coupling;
    let mut residual: f64 = 0.0;
    for (cube, n) in [(cx, n_x), (cy, n_y)] {
        let before = spectral::eigensolve(&model::assemble_hamiltonian(cube, sample, spec)?);
        let after = spectral::eigensolve(&model::assemble_hamiltonian(cube, &shifted, spec)?);
        let target = n as f64 * g * c;
        for (a, b) in before.eigenvalues().iter().zip(after.eigenvalues()) {
            residual = residual.max((b - a - target).abs());
        }
    }
    Ok(ShiftCheck { n_x, n_y, shift: c, residual })
}

/// A random pair of equal-radius cubes with a weak-separation certificate.
#[derive(Clone, Debug)]
pub struct SeparatedPair {
    pub x: Cube,
    pub y: Cube,
    pub separation: Separation,
}

/// Draws centers until a certificate exists. `N` and `L` are uniform in
/// `1..=n_max` and `1..=radius_max`.
pub fn random_separated_pair<R: Rng>(r: &mut R, n_max: usize, d: usize, radius_max: usize) -> SeparatedPair {
    loop {
        let n = r.random_range(1..=n_max);
        let radius = r.random_range(1..=radius_max);
        let span = (3 * n * radius) as i64 + 4;
        let mut draw = || {
            let pts = (0..n).map(|_| (0..d).map(|_| r.random_range(-span..=span)).collect()).collect();
            Configuration::new(pts).expect("consistent shape")
        };
        let (x, y) = (Cube::new(draw(), radius), Cube::new(draw(), radius));
        if let Ok(Some(separation)) = geometry::weakly_separated(&x, &y) {
            return SeparatedPair { x, y, separation };
        }
    }
}

/// Runs [`eigenvalue_shift_test`] on `instances` random certified pairs.
pub fn shift_test_batch(
    spec: &ModelSpec,
    n_max: usize,
    radius_max: usize,
    instances: usize,
    c: f64,
    seed: u64,
) -> Result<Vec<ShiftCheck>> {
    (0..instances)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::trial_rng(rng::derive_seed(seed, "shift-test", t as u64));
            let pair = random_separated_pair(&mut r, n_max, spec.dim, radius_max);
            let spec = ModelSpec { n_particles: pair.x.n_particles(), ..spec.clone() };
            let mut region = pair.x.lattice_box().site_region();
            region.extend(pair.y.lattice_box().site_region());
            region.extend(pair.separation.q.sites());
            let sample = model::sample_disorder(region, rng::derive_seed(seed, "shift-disorder", t as u64), &spec)?;
            eigenvalue_shift_test(&pair.x, &pair.y, &pair.separation, c, &sample, &spec)
        })
        .collect()
}

/// Cube on the majority side of a certificate.
pub fn majority_cube<'a>(cx: &'a Cube, cy: &'a Cube, sep: &Separation) -> &'a Cube {
    match sep.majority {
        Side::First => cx,
        Side::Second => cy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::collections::BTreeMap;

    fn c1(x: i64, r: usize) -> Cube {
        Cube::new(Configuration::line(&[x]), r)
    }

    #[test]
    fn grid_validation() {
        assert!(EvcResult::from_samples(&[], vec![1.0], BTreeMap::new()).is_err());
        assert!(EvcResult::from_samples(&[0.1, 0.1], vec![1.0], BTreeMap::new()).is_err());
        assert!(EvcResult::from_samples(&[0.2, 0.1], vec![1.0], BTreeMap::new()).is_err());
        assert!(EvcResult::from_samples(&[-0.1], vec![1.0], BTreeMap::new()).is_err());
    }

    #[test]
    fn cdf_tabulation() {
        let r = EvcResult::from_samples(&[0.0, 0.5, 1.0, 10.0], vec![0.3, 0.7, 2.0, 0.5], BTreeMap::new()).unwrap();
        assert_eq!(r.counts, vec![0, 2, 3, 4]);
        assert_eq!(r.empirical_prob, vec![0.0, 0.5, 0.75, 1.0]);
        assert_relative_eq!(r.stderr()[1], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn trivial_one_volume_limits() {
        let spec = ModelSpec::new(1, 1).with_window(3.0);
        let cube = c1(0, 3);
        let r = wegner_one_volume(&cube, 0.5, &spec, &[0.0, 1e-3, 100.0], 500, 3).unwrap();
        assert_eq!(r.empirical_prob[0], 0.0);
        assert_eq!(r.empirical_prob[2], 1.0);
        assert!(r.empirical_prob.windows(2).all(|w| w[0] <= w[1]));
        assert!(wegner_one_volume(&cube, 0.5, &spec, &[0.1], 10, 3).is_err());
        assert!(wegner_one_volume(&cube, 5.0, &spec, &[0.1], 500, 3).is_err());
    }

    #[test]
    fn gap_merge_matches_brute_force() {
        let a = spectral::eigensolve_matrix(&nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.1, 0.5, 0.9, 2.0])));
        let b = spectral::eigensolve_matrix(&nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.45, 1.3, 1.95])));
        assert_relative_eq!(spectral_gap(&a, &b), 0.05, epsilon = 1e-12);
        let a = a.with_window(0.0, 1.0);
        let b = b.with_window(0.0, 1.0);
        assert_relative_eq!(spectral_gap(&a, &b), 0.05, epsilon = 1e-12);
        let empty = b.clone().with_window(5.0, 6.0);
        assert_eq!(spectral_gap(&a, &empty), f64::INFINITY);
    }

    #[test]
    fn two_volume_precondition() {
        let spec = ModelSpec::new(2, 1);
        let cx = Cube::new(Configuration::line(&[0, 0]), 4);
        let near = Cube::new(Configuration::line(&[0, 20]), 4);
        assert!(matches!(wegner_two_volume(&cx, &near, &spec, &[0.1], 500, 1), Err(Error::Precondition(_))));
        let far = Cube::new(Configuration::line(&[0, 40]), 4);
        assert!(check_two_volume(&cx, &far).is_ok());
    }

    #[test]
    fn zero_shift_has_zero_residual() {
        let spec = ModelSpec::new(1, 1);
        let (cx, cy) = (c1(0, 2), c1(10, 2));
        let sep = geometry::weakly_separated(&cx, &cy).unwrap().unwrap();
        let mut region = cx.lattice_box().site_region();
        region.extend(cy.lattice_box().site_region());
        let w = model::sample_disorder(region, 1, &spec).unwrap();
        assert_eq!(eigenvalue_shift_test(&cx, &cy, &sep, 0.0, &w, &spec).unwrap().residual, 0.0);
    }

    #[test]
    fn single_particle_shift() {
        let spec = ModelSpec::new(1, 1);
        let (cx, cy) = (c1(0, 2), c1(10, 2));
        let sep = geometry::weakly_separated(&cx, &cy).unwrap().unwrap();
        let mut region = cx.lattice_box().site_region();
        region.extend(cy.lattice_box().site_region());
        let w = model::sample_disorder(region, 2, &spec).unwrap();
        let check = eigenvalue_shift_test(&cx, &cy, &sep, 0.1, &w, &spec).unwrap();
        assert_eq!((check.n_x + check.n_y, check.n_x.min(check.n_y)), (1, 0));
        assert!(check.residual < 1e-9);
        // oracle: direct spectra
        let shifted = model::shift_amplitudes(&w, &sep.q.sites(), 0.1).unwrap();
        let maj = majority_cube(&cx, &cy, &sep);
        let a = spectral::eigensolve(&model::assemble_hamiltonian(maj, &w, &spec).unwrap());
        let b = spectral::eigensolve(&model::assemble_hamiltonian(maj, &shifted, &spec).unwrap());
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert_relative_eq!(y - x, 0.1, epsilon = 1e-9);
        }
    }

    #[test]
    fn two_particle_shift_two_to_one() {
        let spec = ModelSpec::new(2, 1).with_coupling(2.0);
        let cx = Cube::new(Configuration::line(&[0, 2]), 1);
        let cy = Cube::new(Configuration::line(&[1, 30]), 1);
        let sep = Separation {
            q: geometry::SiteBox { lo: vec![-1], hi: vec![3] },
            majority: Side::First,
            j1: vec![0, 1],
            j2: vec![0],
        };
        assert!(geometry::verify_separation(&cx, &cy, &sep));
        assert_eq!(sep.counts(), (2, 1));
        let mut region = cx.lattice_box().site_region();
        region.extend(cy.lattice_box().site_region());
        region.extend(sep.q.sites());
        let w = model::sample_disorder(region, 9, &spec).unwrap();
        let check = eigenvalue_shift_test(&cx, &cy, &sep, 0.05, &w, &spec).unwrap();
        assert!(check.residual < 1e-9, "{check:?}");
        let shifted = model::shift_amplitudes(&w, &sep.q.sites(), 0.05).unwrap();
        for (cube, expect) in [(&cx, 0.2), (&cy, 0.1)] {
            let a = spectral::eigensolve(&model::assemble_hamiltonian(cube, &w, &spec).unwrap());
            let b = spectral::eigensolve(&model::assemble_hamiltonian(cube, &shifted, &spec).unwrap());
            assert_relative_eq!(b.eigenvalues()[0] - a.eigenvalues()[0], expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn bad_certificate_rejected() {
        let spec = ModelSpec::new(1, 1);
        let (cx, cy) = (c1(0, 2), c1(10, 2));
        let mut sep = geometry::weakly_separated(&cx, &cy).unwrap().unwrap();
        std::mem::swap(&mut sep.j1, &mut sep.j2);
        let w = DisorderSample::constant((-5..=15).map(|a| vec![a]), 0.5);
        assert!(matches!(eigenvalue_shift_test(&cx, &cy, &sep, 0.1, &w, &spec), Err(Error::InvalidCertificate(_))));
    }

    #[test]
    fn batch_is_exact() {
        let spec = ModelSpec::new(2, 1).with_coupling(1.5);
        let checks = shift_test_batch(&spec, 2, 3, 10, 0.3, 5).unwrap();
        assert!(checks.iter().all(|c| c.residual < 1e-9));
    }
}
