//! Monte Carlo frequency of singular cubes at a given scale.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{Configuration, Cube};
use crate::model::{self, ModelSpec};
use crate::msa::params::ScaleParams;
use crate::rng;
use crate::spectral::{self, LocalOperator, Singularity};
use crate::stats;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityEstimate {
    pub n: usize,
    pub k: u32,
    pub radius: usize,
    pub energy: f64,
    pub trials: usize,
    pub singular: usize,
    pub p_hat: f64,
    /// 95% Wilson interval.
    pub interval: (f64, f64),
    /// `e^{-ν_n L_k^κ}`.
    pub bound: f64,
}

impl SingularityEstimate {
    /// Whether the bound lies inside or above the confidence interval.
    pub fn consistent_with_bound(&self) -> bool {
        self.interval.0 <= self.bound
    }
}

/// Frequency of `(E, δ, m_n)`-singular cubes `Λ_{L_k}(0)` for `n` particles.
/// `c_gri` defaults to the crate constant when `None`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_singularity_prob(
    n: usize,
    k: u32,
    e: f64,
    params: &ScaleParams,
    spec: &ModelSpec,
    trials: usize,
    seed: u64,
    c_gri: Option<f64>,
) -> Result<SingularityEstimate> {
    let spec = ModelSpec { n_particles: n, ..spec.clone() };
    spec.validate()?;
    let radius = params.scale(k);
    let cube = Cube::new(Configuration::from_flat(n, spec.dim, vec![0; n * spec.dim])?, radius);
    let ns = params.ns(n, c_gri);
    let region = cube.lattice_box().site_region();
    let labels: Vec<Singularity> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let w = model::sample_disorder(region.iter().cloned(), rng::derive_seed(seed, "ss-prob", t as u64), &spec)?;
            let op = LocalOperator::new(cube.clone(), &w, &spec)?;
            Ok(spectral::classify_ns(&op, e, &ns))
        })
        .collect::<Result<_>>()?;
    let singular = labels.iter().filter(|l| **l == Singularity::Singular).count();
    Ok(SingularityEstimate {
        n,
        k,
        radius,
        energy: e,
        trials,
        singular,
        p_hat: singular as f64 / trials.max(1) as f64,
        interval: stats::wilson_interval(singular, trials, 1.96),
        bound: params.ss_bound(n, k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strong_disorder_is_rarely_singular() {
        let params = ScaleParams { n_max: 2, ..ScaleParams::default() };
        let spec = ModelSpec::new(1, 1).with_coupling(100.0).with_window(200.0);
        let est = estimate_singularity_prob(1, 0, 0.1, &params, &spec, 200, 1, None).unwrap();
        assert!(est.p_hat < 0.05, "{est:?}");
        assert!(est.interval.0 <= est.p_hat && est.p_hat <= est.interval.1);
    }

    #[test]
    fn huge_mass_is_always_singular() {
        let params = ScaleParams { m_star: 1e3, ..ScaleParams::default() };
        let spec = ModelSpec::new(1, 1).with_coupling(5.0);
        let est = estimate_singularity_prob(1, 0, 0.1, &params, &spec, 50, 2, None).unwrap();
        assert_eq!(est.p_hat, 1.0);
    }
}
