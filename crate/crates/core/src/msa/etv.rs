//! Energy sweeps: the set of energies where a cube's center-to-boundary
//! Green function is large must hug the cube's spectrum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Cube};
use crate::model::{self, ModelSpec};
use crate::rng;
use crate::spectral::LocalOperator;
use crate::stats;

/// `a_L = e^{-ν L^κ/3}`, `b_L = e^{-2ν L^κ/3}`, `c_L = e^{-ν L^κ/7}`,
/// `q_L = e^{-ν L^κ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtvScales {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub q: f64,
}

impl EtvScales {
    pub fn new(nu: f64, radius: usize, kappa: f64) -> Self {
        let t = nu * (radius as f64).powf(kappa);
        Self { a: (-t / 3.0).exp(), b: (-2.0 * t / 3.0).exp(), c: (-t / 7.0).exp(), q: (-t).exp() }
    }

    /// `|I| b_L^{-1} q_L`.
    pub fn budget(&self, interval: f64) -> f64 {
        interval * self.q / self.b
    }
}

/// Uniform grid on `[lo, hi]` with spacing at most `c_L / 4`.
pub fn energy_grid(lo: f64, hi: f64, c: f64) -> Vec<f64> {
    let steps = (((hi - lo) / (c / 4.0)).ceil() as usize).max(1);
    (0..=steps).map(|k| lo + (hi - lo) * k as f64 / steps as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtvVerdict {
    pub covered: bool,
    /// Grid energies with `F_u(E) > 2 a_L`.
    pub exceedances: usize,
    /// Exceeding energies farther than `2 c_L` from every eigenvalue.
    pub uncovered: Vec<f64>,
    pub grid_points: usize,
    pub f_min: f64,
    pub f_max: f64,
}

/// Checks `{E : F_u(E) > 2 a_L} ⊂ ∪_j (E_j - 2 c_L, E_j + 2 c_L)` on a grid.
pub fn etv_energy_sweep(op: &LocalOperator, e_grid: &[f64], a: f64, c: f64) -> Result<EtvVerdict> {
    if e_grid.is_empty() {
        return Err(Error::InvalidArgument("empty energy grid".into()));
    }
    if e_grid.windows(2).any(|w| !(w[1] > w[0] && w[1] - w[0] < c)) {
        return Err(Error::Precondition("energy grid must ascend with spacing below c_L".into()));
    }
    let profile = op.boundary_profile();
    let mut exceedances = 0;
    let mut uncovered = Vec::new();
    let (mut f_min, mut f_max) = (f64::INFINITY, 0.0f64);
    for &e in e_grid {
        let f = profile.eval(e);
        f_min = f_min.min(f);
        f_max = f_max.max(f);
        if f > 2.0 * a {
            exceedances += 1;
            if op.spectrum.distance_to(e) >= 2.0 * c {
                uncovered.push(e);
            }
        }
    }
    Ok(EtvVerdict { covered: uncovered.is_empty(), exceedances, uncovered, grid_points: e_grid.len(), f_min, f_max })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtvExperiment {
    pub radius: usize,
    pub nu: f64,
    pub kappa: f64,
    pub scales: EtvScales,
    pub samples: usize,
    pub violations: usize,
    pub frequency: f64,
    pub stderr: f64,
    pub budget: f64,
}

impl EtvExperiment {
    /// Violation frequency within the budget plus three standard errors.
    pub fn passed(&self) -> bool {
        self.frequency <= self.budget + 3.0 * self.stderr
    }
}

/// Sweeps `I* = [0, E*]` for `samples` independent cubes `Λ_L(0)`.
pub fn etv_experiment(spec: &ModelSpec, radius: usize, nu: f64, kappa: f64, samples: usize, seed: u64) -> Result<EtvExperiment> {
    spec.validate()?;
    let n = spec.n_particles;
    let cube = Cube::new(Configuration::from_flat(n, spec.dim, vec![0; n * spec.dim])?, radius);
    let scales = EtvScales::new(nu, radius, kappa);
    let (lo, hi) = spec.window();
    let grid = energy_grid(lo, hi, scales.c);
    let region = cube.lattice_box().site_region();
    let covered: Vec<bool> = (0..samples)
        .into_par_iter()
        .map(|t| {
            let w = model::sample_disorder(region.iter().cloned(), rng::derive_seed(seed, "etv", t as u64), spec)?;
            let op = LocalOperator::new(cube.clone(), &w, spec)?;
            Ok(etv_energy_sweep(&op, &grid, scales.a, scales.c)?.covered)
        })
        .collect::<Result<_>>()?;
    let violations = covered.iter().filter(|c| !**c).count();
    let frequency = violations as f64 / samples.max(1) as f64;
    let stderr = stats::binomial_stderr(frequency, samples.max(1));
    Ok(EtvExperiment {
        radius,
        nu,
        kappa,
        scales,
        samples,
        violations,
        frequency,
        stderr,
        budget: scales.budget(hi - lo),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(g: f64, seed: u64) -> LocalOperator {
        let spec = ModelSpec::new(1, 1).with_coupling(g).with_window(g);
        let cube = Cube::new(Configuration::line(&[0]), 8);
        let w = model::sample_disorder(cube.lattice_box().site_region(), seed, &spec).unwrap();
        LocalOperator::new(cube, &w, &spec).unwrap()
    }

    #[test]
    fn scale_relations() {
        let s = EtvScales::new(2.0, 8, 0.5);
        approx::assert_relative_eq!(s.a * s.a, s.b, max_relative = 1e-12);
        approx::assert_relative_eq!(s.q / s.b, s.a, max_relative = 1e-12);
        assert!(s.q < s.b && s.b < s.a && s.a < s.c);
        let g = energy_grid(0.0, 1.0, s.c);
        assert!(g.windows(2).all(|w| w[1] - w[0] <= s.c / 4.0 + 1e-15));
    }

    #[test]
    fn threshold_above_everything_is_covered() {
        let o = op(20.0, 1);
        let grid = energy_grid(0.0, 20.0, 0.1);
        let v = etv_energy_sweep(&o, &grid, 1e300, 0.1).unwrap();
        assert_eq!(v.exceedances, 0);
        assert!(v.covered);
    }

    #[test]
    fn threshold_below_everything() {
        let o = op(20.0, 2);
        let grid = energy_grid(0.0, 20.0, 0.1);
        let v = etv_energy_sweep(&o, &grid, 0.0, 0.1).unwrap();
        assert_eq!(v.exceedances, grid.len());
        // covered iff the eigenvalue intervals blanket the window
        let blanket = grid.iter().all(|&e| o.spectrum.distance_to(e) < 0.2);
        assert_eq!(v.covered, blanket);
        let wide = etv_energy_sweep(&o, &grid, 0.0, 30.0);
        assert!(wide.unwrap().covered);
    }

    #[test]
    fn coarse_grid_rejected() {
        let o = op(20.0, 3);
        assert!(etv_energy_sweep(&o, &[0.0, 1.0], 0.1, 0.5).is_err());
    }

    #[test]
    fn desk_experiment_within_budget() {
        let spec = ModelSpec::new(1, 1).with_coupling(20.0).with_window(20.0);
        let r = etv_experiment(&spec, 8, 5.0, 0.3, 40, 9).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
