//! Alloy-type disorder, two-body interaction and finite-volume Hamiltonians.
//!
//! The scatterer bump is the indicator of the unit cell around its site, so
//! the bumps tile space flatly (`Σ_a φ(x - a) = 1`) and the potential at a
//! lattice point equals the amplitude of its own cell.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Cube, LatticeBox, Site};
use crate::rng;

/// Physical parameters of the `N`-particle model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSpec {
    pub n_particles: usize,
    pub dim: usize,
    /// `C_U` in `U(r) = C_U exp(-r^ζ)`.
    pub interaction_amplitude: f64,
    /// `ζ`; values above 1 act as 1.
    pub interaction_exponent: f64,
    /// `g`, multiplies the alloy potential.
    pub disorder_coupling: f64,
    /// Amplitudes are drawn from `Uniform[0, c_V]`.
    pub amplitude_support: f64,
    /// Upper end `E*` of the energy window `I* = [0, E*]`.
    pub energy_window: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            n_particles: 1,
            dim: 1,
            interaction_amplitude: 1.0,
            interaction_exponent: 1.0,
            disorder_coupling: 1.0,
            amplitude_support: 1.0,
            energy_window: 1.0,
        }
    }
}

impl ModelSpec {
    pub fn new(n_particles: usize, dim: usize) -> Self {
        Self { n_particles, dim, ..Self::default() }
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.disorder_coupling = g;
        self
    }

    pub fn with_interaction(mut self, amplitude: f64, exponent: f64) -> Self {
        self.interaction_amplitude = amplitude;
        self.interaction_exponent = exponent;
        self
    }

    pub fn with_window(mut self, e_max: f64) -> Self {
        self.energy_window = e_max;
        self
    }

    /// Same model with the interaction switched off.
    pub fn without_interaction(&self) -> Self {
        Self { interaction_amplitude: 0.0, ..self.clone() }
    }

    /// Effective exponent `min(ζ, 1)`.
    pub fn zeta(&self) -> f64 {
        self.interaction_exponent.min(1.0)
    }

    pub fn window(&self) -> (f64, f64) {
        (0.0, self.energy_window)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("model: {what}")));
        if self.n_particles == 0 || self.dim == 0 {
            return bad("N and d must be at least 1");
        }
        if !(self.interaction_amplitude.is_finite() && self.interaction_amplitude >= 0.0) {
            return bad("interaction amplitude must be finite and >= 0");
        }
        if !(self.interaction_exponent.is_finite() && self.interaction_exponent > 0.0) {
            return bad("interaction exponent must be > 0");
        }
        if !(self.disorder_coupling.is_finite() && self.disorder_coupling > 0.0) {
            return bad("disorder coupling must be > 0");
        }
        if !(self.amplitude_support.is_finite() && self.amplitude_support > 0.0) {
            return bad("amplitude support must be > 0");
        }
        if !(self.energy_window.is_finite() && self.energy_window > 0.0) {
            return bad("energy window must be > 0");
        }
        Ok(())
    }

    pub fn law(&self) -> UniformLaw {
        UniformLaw { support: self.amplitude_support }
    }
}

/// Marginal law of the scatterer amplitudes, sampled by inverse CDF.
pub trait AmplitudeLaw: Send + Sync {
    /// Right end `c_V` of the support `[0, c_V]`.
    fn support(&self) -> f64;
    fn quantile(&self, u: f64) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformLaw {
    pub support: f64,
}

impl AmplitudeLaw for UniformLaw {
    fn support(&self) -> f64 {
        self.support
    }

    fn quantile(&self, u: f64) -> f64 {
        u * self.support
    }
}

/// Amplitudes `𝒱_a` on a finite set of scatterer sites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderSample {
    amplitudes: BTreeMap<Site, f64>,
    /// `None` for hand-built (planted) samples.
    pub seed: Option<u64>,
}

impl DisorderSample {
    /// Amplitudes assigned directly, bypassing the sampler.
    pub fn planted(amplitudes: BTreeMap<Site, f64>) -> Self {
        Self { amplitudes, seed: None }
    }

    pub fn constant<I: IntoIterator<Item = Site>>(region: I, value: f64) -> Self {
        Self::planted(region.into_iter().map(|s| (s, value)).collect())
    }

    pub fn is_planted(&self) -> bool {
        self.seed.is_none()
    }

    pub fn amplitude(&self, site: &[i64]) -> Result<f64> {
        self.amplitudes
            .get(site)
            .copied()
            .ok_or_else(|| Error::OutsideRegion(site.to_vec()))
    }

    pub fn set(&mut self, site: Site, value: f64) {
        self.amplitudes.insert(site, value);
    }

    pub fn contains(&self, site: &[i64]) -> bool {
        self.amplitudes.contains_key(site)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Site, &f64)> {
        self.amplitudes.iter()
    }
}

/// IID draws keyed per site: the amplitude at `a` depends only on `(seed, a)`.
pub fn sample_disorder<I>(region: I, seed: u64, spec: &ModelSpec) -> Result<DisorderSample>
where
    I: IntoIterator<Item = Site>,
{
    sample_disorder_with(region, seed, &spec.law())
}

pub fn sample_disorder_with<I, L>(region: I, seed: u64, law: &L) -> Result<DisorderSample>
where
    I: IntoIterator<Item = Site>,
    L: AmplitudeLaw + ?Sized,
{
    let amplitudes: BTreeMap<Site, f64> = region
        .into_iter()
        .map(|site| {
            let v = law.quantile(rng::site_uniform(seed, &site));
            (site, v)
        })
        .collect();
    if amplitudes.is_empty() {
        return Err(Error::InvalidArgument("empty disorder region".into()));
    }
    Ok(DisorderSample { amplitudes, seed: Some(seed) })
}

/// `g Σ_j 𝒱_{cell(x_j)}`.
pub fn potential_value(x: &Configuration, sample: &DisorderSample, spec: &ModelSpec) -> Result<f64> {
    let mut total = 0.0;
    for p in x.particles() {
        total += sample.amplitude(p)?;
    }
    Ok(spec.disorder_coupling * total)
}

/// Two-body potential `C_U exp(-r^ζ)` at max-norm distance `r`.
pub fn pair_interaction(r: i64, spec: &ModelSpec) -> f64 {
    spec.interaction_amplitude * (-(r as f64).powf(spec.zeta())).exp()
}

/// `Σ_{i<j} C_U exp(-|x_i - x_j|^ζ)`.
pub fn interaction_value(x: &Configuration, spec: &ModelSpec) -> f64 {
    let n = x.n_particles();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = x
                .particle(i)
                .iter()
                .zip(x.particle(j))
                .map(|(a, b)| (a - b).abs())
                .max()
                .unwrap_or(0);
            total += pair_interaction(r, spec);
        }
    }
    total
}

/// Dense finite-volume operator `-1/2 Δ + U + g V` with Dirichlet
/// truncation to a lattice box, keeping the diagonal parts separately.
#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    domain: LatticeBox,
    matrix: DMatrix<f64>,
    interaction: DVector<f64>,
    potential: DVector<f64>,
}

impl HamiltonianMatrix {
    pub fn domain(&self) -> &LatticeBox {
        &self.domain
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn index_of(&self, x: &Configuration) -> Option<usize> {
        self.domain.index_of(x)
    }

    pub fn interaction(&self) -> &DVector<f64> {
        &self.interaction
    }

    pub fn potential(&self) -> &DVector<f64> {
        &self.potential
    }

    /// Kinetic part `-1/2 Δ`.
    pub fn kinetic(&self) -> DMatrix<f64> {
        let mut k = self.matrix.clone();
        for i in 0..k.nrows() {
            k[(i, i)] -= self.interaction[i] + self.potential[i];
        }
        k
    }

    /// Matrix plus `c` times the identity.
    pub fn shifted(&self, c: f64) -> DMatrix<f64> {
        let mut m = self.matrix.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += c;
        }
        m
    }
}

/// Dirichlet discrete kinetic energy `-1/2 Δ` on a lattice box: diagonal
/// `Nd`, `-1/2` on every nearest-neighbour pair inside the box.
pub fn kinetic_matrix(domain: &LatticeBox) -> DMatrix<f64> {
    let m = domain.lo().len();
    let ext: Vec<usize> = domain.lo().iter().zip(domain.hi()).map(|(a, b)| (b - a + 1) as usize).collect();
    let mut stride = vec![1usize; m];
    for k in (0..m.saturating_sub(1)).rev() {
        stride[k] = stride[k + 1] * ext[k + 1];
    }
    let size = domain.len();
    let mut kin = DMatrix::zeros(size, size);
    for i in 0..size {
        kin[(i, i)] = m as f64;
        for k in 0..m {
            let pos = (i / stride[k]) % ext[k];
            if pos + 1 < ext[k] {
                let j = i + stride[k];
                kin[(i, j)] = -0.5;
                kin[(j, i)] = -0.5;
            }
        }
    }
    kin
}

/// Hamiltonian on the lattice ball of a cube.
pub fn assemble_hamiltonian(cube: &Cube, sample: &DisorderSample, spec: &ModelSpec) -> Result<HamiltonianMatrix> {
    assemble_on_box(&cube.lattice_box(), sample, spec)
}

/// Hamiltonian on an arbitrary lattice box of configuration space.
pub fn assemble_on_box(domain: &LatticeBox, sample: &DisorderSample, spec: &ModelSpec) -> Result<HamiltonianMatrix> {
    if domain.n_particles() != spec.n_particles || domain.dim() != spec.dim {
        return Err(Error::DimensionMismatch(format!(
            "domain has N={}, d={}; model has N={}, d={}",
            domain.n_particles(),
            domain.dim(),
            spec.n_particles,
            spec.dim
        )));
    }
    if let Some(site) = domain.site_region().into_iter().find(|s| !sample.contains(s)) {
        return Err(Error::OutsideRegion(site));
    }
    let mut matrix = kinetic_matrix(domain);
    let size = domain.len();
    let mut interaction = DVector::zeros(size);
    let mut potential = DVector::zeros(size);
    for (i, x) in domain.points().enumerate() {
        interaction[i] = interaction_value(&x, spec);
        potential[i] = potential_value(&x, sample, spec)?;
        matrix[(i, i)] += interaction[i] + potential[i];
    }
    Ok(HamiltonianMatrix { domain: domain.clone(), matrix, interaction, potential })
}

/// Sample mean `ξ_Q` of the amplitudes over `Q` and fluctuations `η_a = 𝒱_a - ξ_Q`.
pub fn sample_mean_decompose(sample: &DisorderSample, q: &[Site]) -> Result<(f64, BTreeMap<Site, f64>)> {
    if q.is_empty() {
        return Err(Error::InvalidArgument("empty averaging set".into()));
    }
    let values = q.iter().map(|a| sample.amplitude(a)).collect::<Result<Vec<_>>>()?;
    let xi = values.iter().sum::<f64>() / values.len() as f64;
    let eta = q.iter().cloned().zip(values.iter().map(|v| v - xi)).collect();
    Ok((xi, eta))
}

/// Adds `c` to every amplitude on `Q` (no clamping to the support).
pub fn shift_amplitudes(sample: &DisorderSample, q: &[Site], c: f64) -> Result<DisorderSample> {
    let mut out = sample.clone();
    for a in q {
        let v = sample.amplitude(a)?;
        out.amplitudes.insert(a.clone(), v + c);
    }
    Ok(out)
}

/// Empirical continuity modulus `sup_t [F(t+s) - F(t)]` of the law of the
/// sample mean of `q_size` IID `Uniform[0,1]` amplitudes, for each `s`.
pub fn modulus_experiment(q_size: usize, s_grid: &[f64], trials: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    use rand::Rng;
    if trials < 1000 {
        return Err(Error::InvalidArgument("modulus experiment needs at least 1000 trials".into()));
    }
    if q_size == 0 {
        return Err(Error::InvalidArgument("empty averaging set".into()));
    }
    let mut means: Vec<f64> = (0..trials)
        .map(|t| {
            let mut r = rng::trial_rng(rng::derive_seed(seed, "modulus", t as u64));
            (0..q_size).map(|_| r.random::<f64>()).sum::<f64>() / q_size as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    Ok(s_grid.iter().map(|&s| (s, max_window_fraction(&means, s))).collect())
}

/// `max_i #{x in [x_i, x_i + s)} / n` for sorted data: the exact supremum of
/// `F(t+s) - F(t)` of the empirical CDF.
fn max_window_fraction(sorted: &[f64], s: f64) -> f64 {
    if s <= 0.0 || sorted.is_empty() {
        return 0.0;
    }
    let mut best = 0usize;
    let mut hi = 0usize;
    for lo in 0..sorted.len() {
        if hi < lo {
            hi = lo;
        }
        while hi < sorted.len() && sorted[hi] < sorted[lo] + s {
            hi += 1;
        }
        best = best.max(hi - lo);
    }
    best as f64 / sorted.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line_region(lo: i64, hi: i64) -> Vec<Site> {
        (lo..=hi).map(|a| vec![a]).collect()
    }

    #[test]
    fn sampling_is_deterministic_and_keyed() {
        let spec = ModelSpec::default();
        let a = sample_disorder(line_region(-5, 5), 11, &spec).unwrap();
        let b = sample_disorder(line_region(-5, 5), 11, &spec).unwrap();
        assert_eq!(a, b);
        let big = sample_disorder(line_region(-50, 50), 11, &spec).unwrap();
        for (site, v) in a.iter() {
            assert_eq!(big.amplitude(site).unwrap(), *v);
        }
        assert!(a.iter().all(|(_, v)| (0.0..=1.0).contains(v)));
        assert!(sample_disorder(Vec::<Site>::new(), 1, &spec).is_err());
    }

    #[test]
    fn empirical_mean_of_amplitudes() {
        let spec = ModelSpec::default();
        let s = sample_disorder(line_region(0, 99_999), 3, &spec).unwrap();
        let mean = s.iter().map(|(_, v)| v).sum::<f64>() / s.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn potential_examples() {
        let spec = ModelSpec::new(2, 1);
        let zero = DisorderSample::constant(line_region(0, 3), 0.0);
        assert_eq!(potential_value(&Configuration::line(&[0, 3]), &zero, &spec).unwrap(), 0.0);
        let mut s = zero.clone();
        s.set(vec![0], 0.3);
        s.set(vec![3], 0.4);
        assert_relative_eq!(potential_value(&Configuration::line(&[0, 3]), &s, &spec).unwrap(), 0.7);
        let spec1 = ModelSpec::new(1, 1).with_coupling(10.0);
        let s1 = DisorderSample::constant(vec![vec![2]], 0.25);
        assert_relative_eq!(potential_value(&Configuration::line(&[2]), &s1, &spec1).unwrap(), 2.5);
        assert!(matches!(
            potential_value(&Configuration::line(&[9]), &s1, &spec1),
            Err(Error::OutsideRegion(_))
        ));
    }

    #[test]
    fn interaction_examples() {
        let spec = ModelSpec::new(2, 1).with_interaction(1.0, 1.0);
        assert_eq!(interaction_value(&Configuration::line(&[4]), &spec), 0.0);
        assert_eq!(interaction_value(&Configuration::line(&[4, 4]), &spec), 1.0);
        assert_relative_eq!(interaction_value(&Configuration::line(&[0, 8]), &spec), 3.3546262790251185e-4, max_relative = 1e-12);
        let clamped = ModelSpec::new(2, 1).with_interaction(1.0, 3.0);
        assert_eq!(clamped.zeta(), 1.0);
        assert_eq!(
            interaction_value(&Configuration::line(&[0, 8]), &clamped),
            interaction_value(&Configuration::line(&[0, 8]), &spec)
        );
    }

    #[test]
    fn three_point_kinetic_block() {
        let spec = ModelSpec::new(1, 1).with_interaction(0.0, 1.0);
        let cube = Cube::new(Configuration::line(&[0]), 1);
        let sample = DisorderSample::constant(line_region(-1, 1), 0.0);
        let h = assemble_hamiltonian(&cube, &sample, &spec).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[1.0, -0.5, 0.0, -0.5, 1.0, -0.5, 0.0, -0.5, 1.0]);
        assert_eq!(h.matrix(), &expected);
    }

    #[test]
    fn region_too_small() {
        let spec = ModelSpec::new(1, 1);
        let cube = Cube::new(Configuration::line(&[0]), 2);
        let sample = DisorderSample::constant(line_region(-1, 1), 0.0);
        assert!(matches!(assemble_hamiltonian(&cube, &sample, &spec), Err(Error::OutsideRegion(_))));
    }

    #[test]
    fn permuting_center_conjugates_hamiltonian() {
        let spec = ModelSpec::new(2, 1).with_coupling(3.0);
        let cx = Cube::new(Configuration::line(&[0, 3]), 2);
        let cy = Cube::new(Configuration::line(&[3, 0]), 2);
        let region = cx.lattice_box().site_region();
        let sample = sample_disorder(region, 5, &spec).unwrap();
        let hx = assemble_hamiltonian(&cx, &sample, &spec).unwrap();
        let hy = assemble_hamiltonian(&cy, &sample, &spec).unwrap();
        let bx = cx.lattice_box();
        for (i, p) in bx.points().enumerate() {
            for (j, q) in bx.points().enumerate() {
                let pi = hy.index_of(&p.permuted(&[1, 0])).unwrap();
                let qj = hy.index_of(&q.permuted(&[1, 0])).unwrap();
                assert_eq!(hx.matrix()[(i, j)], hy.matrix()[(pi, qj)]);
            }
        }
    }

    #[test]
    fn mean_decomposition() {
        let q = vec![vec![0], vec![1]];
        let mut s = DisorderSample::constant(q.clone(), 0.0);
        s.set(vec![0], 0.2);
        s.set(vec![1], 0.6);
        let (xi, eta) = sample_mean_decompose(&s, &q).unwrap();
        assert_relative_eq!(xi, 0.4);
        assert_relative_eq!(eta[&vec![0]], -0.2);
        assert_relative_eq!(eta[&vec![1]], 0.2);

        let c = DisorderSample::constant(q.clone(), 0.7);
        let (xi, eta) = sample_mean_decompose(&c, &q).unwrap();
        assert_eq!(xi, 0.7);
        assert!(eta.values().all(|e| *e == 0.0));

        let region = line_region(0, 49);
        let r = sample_disorder(region.clone(), 9, &ModelSpec::default()).unwrap();
        let (_, eta) = sample_mean_decompose(&r, &region).unwrap();
        assert!(eta.values().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn shift_examples() {
        let region = line_region(0, 4);
        let s = sample_disorder(region.clone(), 2, &ModelSpec::default()).unwrap();
        assert_eq!(shift_amplitudes(&s, &region, 0.0).unwrap(), s);
        let t = shift_amplitudes(&s, &[vec![2]], 0.1).unwrap();
        for (site, v) in s.iter() {
            let w = t.amplitude(site).unwrap();
            if site == &vec![2] {
                assert_relative_eq!(w, v + 0.1);
            } else {
                assert_eq!(w, *v);
            }
        }
    }

    #[test]
    fn window_sup_exact() {
        let xs = [0.0, 0.05, 0.1, 0.5, 0.55];
        assert_eq!(max_window_fraction(&xs, 0.0), 0.0);
        assert_eq!(max_window_fraction(&xs, 0.1), 0.4);
        assert_eq!(max_window_fraction(&xs, 0.11), 0.6);
    }

    #[test]
    fn modulus_single_site_is_linear() {
        let grid = [0.0, 0.05, 0.1, 0.2];
        let m = modulus_experiment(1, &grid, 100_000, 1).unwrap();
        assert_eq!(m[0].1, 0.0);
        assert!((m[2].1 - 0.1).abs() < 0.01, "{:?}", m);
        assert!(m.windows(2).all(|w| w[0].1 <= w[1].1));
        assert!(modulus_experiment(1, &grid, 10, 1).is_err());
    }

    #[test]
    fn modulus_of_mean_scales_like_sqrt_q() {
        // density of the mean of 25 uniforms peaks near sqrt(12 * 25 / 2π)
        let grid = [0.005, 0.01, 0.02, 0.1];
        let m = modulus_experiment(25, &grid, 100_000, 4).unwrap();
        let c_fit = m[0].1 / (5.0 * 0.005);
        assert!((c_fit - (12.0f64 / (2.0 * std::f64::consts::PI)).sqrt()).abs() < 0.15, "C = {c_fit}");
        for (s, v) in &m {
            assert!(*v <= (1.1 * c_fit * 5.0 * s).min(1.0), "s={s} v={v}");
        }
    }
}
