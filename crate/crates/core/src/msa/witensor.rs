//! Near tensor factorization of weakly interactive cubes.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{self, Cube};
use crate::model::{self, DisorderSample, ModelSpec};
use crate::spectral;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WiTensorReport {
    pub cluster: Vec<usize>,
    pub rest: Vec<usize>,
    /// Smallest inter-cluster distance over all configurations of the cube.
    pub gap: i64,
    /// `‖U_cross‖ = max_x Σ_{i ∈ J, j ∉ J} U(|x_i - x_j|)`.
    pub cross_norm: f64,
    /// Largest off-diagonal entry of `H - H^{ni}`; zero when the difference
    /// is the diagonal cross interaction only.
    pub off_diagonal: f64,
    /// `max |(H - H^{ni})_{xx} - U_cross(x)|`.
    pub cross_mismatch: f64,
    /// `C_U N (N-1) / 2 · e^{-gap^ζ}`.
    pub bound: f64,
    /// `max |eig(H^{ni}) - sorted{E'_a + E''_b}|`.
    pub eigen_sum_error: f64,
    /// `max_E (|dist(E, Σ) - dist(E, Σ^{ni})| - ‖U_cross‖)` over the probe grid.
    pub nonres_excess: f64,
    pub probes: usize,
}

impl WiTensorReport {
    pub fn within_bound(&self) -> bool {
        self.cross_norm <= self.bound
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.within_bound()
            && self.off_diagonal == 0.0
            && self.cross_mismatch <= tol
            && self.eigen_sum_error <= tol
            && self.nonres_excess <= tol
    }
}

/// Splits a WI cube as `Λ' × Λ''`, assembles `H^{ni} = H' ⊗ 1 + 1 ⊗ H''`
/// in the basis of `H`, and compares spectra and the cross interaction.
pub fn wi_tensor_check(cube: &Cube, sample: &DisorderSample, spec: &ModelSpec) -> Result<WiTensorReport> {
    let split = geometry::wi_decompose(cube)?;
    let h = model::assemble_hamiltonian(cube, sample, spec)?;
    let sub = |idx: &[usize]| -> Result<_> {
        let c = Cube::new(cube.center.select(idx), cube.radius);
        let s = ModelSpec { n_particles: idx.len(), ..spec.clone() };
        model::assemble_hamiltonian(&c, sample, &s)
    };
    let (h1, h2) = (sub(&split.cluster)?, sub(&split.rest)?);
    let n2 = h2.dim();

    // product-basis index of every configuration of the cube
    let points: Vec<_> = h.domain().points().collect();
    let product: Vec<usize> = points
        .iter()
        .map(|x| {
            let a = h1.index_of(&x.select(&split.cluster)).expect("cluster part in Λ'");
            let b = h2.index_of(&x.select(&split.rest)).expect("rest part in Λ''");
            a * n2 + b
        })
        .collect();
    let ni = DMatrix::from_fn(h.dim(), h.dim(), |i, j| {
        let (a, b) = (product[i] / n2, product[i] % n2);
        let (c, d) = (product[j] / n2, product[j] % n2);
        let mut v = 0.0;
        if b == d {
            v += h1.matrix()[(a, c)];
        }
        if a == c {
            v += h2.matrix()[(b, d)];
        }
        v
    });

    let diff = h.matrix() - &ni;
    let mut off_diagonal: f64 = 0.0;
    let mut cross_norm: f64 = 0.0;
    let mut cross_mismatch: f64 = 0.0;
    for i in 0..h.dim() {
        for j in 0..h.dim() {
            if i != j {
                off_diagonal = off_diagonal.max(diff[(i, j)].abs());
            }
        }
        let x = &points[i];
        let mut cross = 0.0;
        for &p in &split.cluster {
            for &q in &split.rest {
                let r = x.particle(p).iter().zip(x.particle(q)).map(|(a, b)| (a - b).abs()).max().unwrap_or(0);
                cross += model::pair_interaction(r, spec);
            }
        }
        cross_norm = cross_norm.max(cross);
        cross_mismatch = cross_mismatch.max((diff[(i, i)] - cross).abs());
    }
    let n = cube.n_particles() as f64;
    let gap = split.min_gap_in_cube(cube.radius);
    let bound = spec.interaction_amplitude * n * (n - 1.0) / 2.0 * (-(gap.max(0) as f64).powf(spec.zeta())).exp();

    let s1 = spectral::eigensolve(&h1);
    let s2 = spectral::eigensolve(&h2);
    let mut sums: Vec<f64> = s1.eigenvalues().iter().flat_map(|a| s2.eigenvalues().iter().map(move |b| a + b)).collect();
    sums.sort_by(f64::total_cmp);
    let sni = spectral::eigensolve_matrix(&ni);
    let eigen_sum_error = sni.eigenvalues().iter().zip(&sums).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let full = spectral::eigensolve(&h);
    let (lo, hi) = (full.eigenvalues()[0] - 1.0, full.eigenvalues()[full.len() - 1] + 1.0);
    let probes = 4 * full.len() + 1;
    let mut nonres_excess = f64::NEG_INFINITY;
    for k in 0..probes {
        let e = lo + (hi - lo) * k as f64 / (probes - 1) as f64;
        let excess = (full.distance_to(e) - sni.distance_to(e)).abs() - cross_norm;
        nonres_excess = nonres_excess.max(excess);
    }
    Ok(WiTensorReport {
        cluster: split.cluster,
        rest: split.rest,
        gap,
        cross_norm,
        off_diagonal,
        cross_mismatch,
        bound,
        eigen_sum_error,
        nonres_excess,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Configuration;

    fn sample_for(cube: &Cube, seed: u64, spec: &ModelSpec) -> DisorderSample {
        model::sample_disorder(cube.lattice_box().site_region(), seed, spec).unwrap()
    }

    #[test]
    fn zero_interaction_factorizes_exactly() {
        let spec = ModelSpec::new(2, 1).with_interaction(0.0, 1.0);
        let cube = Cube::new(Configuration::line(&[0, 9]), 1);
        let r = wi_tensor_check(&cube, &sample_for(&cube, 1, &spec), &spec).unwrap();
        assert_eq!(r.cross_norm, 0.0);
        assert_eq!(r.off_diagonal, 0.0);
        assert!(r.eigen_sum_error < 1e-9);
        assert!(r.passed(1e-9));
    }

    #[test]
    fn far_clusters_have_negligible_cross_term() {
        let spec = ModelSpec::new(2, 1);
        let cube = Cube::new(Configuration::line(&[0, 104]), 2);
        let r = wi_tensor_check(&cube, &sample_for(&cube, 2, &spec), &spec).unwrap();
        assert_eq!(r.gap, 100);
        assert!(r.cross_norm <= (-100f64).exp());
        assert!(r.within_bound());
        assert!(r.passed(1e-9), "{r:?}");
    }

    #[test]
    fn three_particles_two_clusters() {
        let spec = ModelSpec::new(3, 1).with_coupling(2.0);
        let cube = Cube::new(Configuration::line(&[0, 1, 12]), 1);
        let r = wi_tensor_check(&cube, &sample_for(&cube, 3, &spec), &spec).unwrap();
        assert_eq!(r.cluster, vec![0, 1]);
        assert_eq!(r.rest, vec![2]);
        assert!(r.cross_mismatch < 1e-12);
        assert!(r.passed(1e-9), "{r:?}");
    }

    #[test]
    fn strongly_interactive_rejected() {
        let spec = ModelSpec::new(2, 1);
        let cube = Cube::new(Configuration::line(&[0, 2]), 1);
        assert!(wi_tensor_check(&cube, &sample_for(&cube, 1, &spec), &spec).is_err());
    }
}
