//! Eigensolves, Green functions and the decay functionals built on them.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Cube};
use crate::model::{self, DisorderSample, HamiltonianMatrix, ModelSpec};

/// Energies closer than this to an eigenvalue are treated as resonant.
pub const RESONANCE_EPS: f64 = 1e-12;

/// Default geometric resolvent constant until one is measured.
pub const DEFAULT_C_GRI: f64 = 2.0;

/// Full spectral decomposition, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SpectralData {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    window: (f64, f64),
}

impl SpectralData {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = (lo, hi);
        self
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Indices of the eigenvalues inside the window.
    pub fn window_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let (lo, hi) = self.window;
        (0..self.len()).filter(move |&j| self.eigenvalues[j] >= lo && self.eigenvalues[j] <= hi)
    }

    pub fn window_eigenvalues(&self) -> Vec<f64> {
        self.window_indices().map(|j| self.eigenvalues[j]).collect()
    }

    /// `dist(E, Σ)` over the whole spectrum.
    pub fn distance_to(&self, e: f64) -> f64 {
        self.eigenvalues.iter().map(|l| (l - e).abs()).fold(f64::INFINITY, f64::min)
    }

    /// `dist(E, Σ ∩ I*)`; infinite if the window holds no eigenvalue.
    pub fn window_distance_to(&self, e: f64) -> f64 {
        self.window_indices()
            .map(|j| (self.eigenvalues[j] - e).abs())
            .fold(f64::INFINITY, f64::min)
    }

    fn check_resonance(&self, e: f64) -> Result<()> {
        let distance = self.distance_to(e);
        if distance <= RESONANCE_EPS {
            return Err(Error::Resonant { energy: e, distance });
        }
        Ok(())
    }

    /// Column `G(·, src) = Σ_j ψ_j ψ_j(src) / (E_j - E)`.
    pub fn resolvent_column(&self, e: f64, src: usize) -> Result<DVector<f64>> {
        self.check_resonance(e)?;
        let n = self.len();
        let mut col = DVector::zeros(n);
        for j in 0..n {
            let w = self.eigenvectors[(src, j)] / (self.eigenvalues[j] - e);
            col.axpy(w, &self.eigenvectors.column(j), 1.0);
        }
        Ok(col)
    }

    pub fn green_entry(&self, e: f64, dst: usize, src: usize) -> Result<f64> {
        self.check_resonance(e)?;
        Ok((0..self.len())
            .map(|j| self.eigenvectors[(dst, j)] * self.eigenvectors[(src, j)] / (self.eigenvalues[j] - e))
            .sum())
    }

    /// Full resolvent `(H - E)^{-1}`.
    pub fn resolvent(&self, e: f64) -> Result<DMatrix<f64>> {
        self.check_resonance(e)?;
        let scale = DVector::from_iterator(self.len(), self.eigenvalues.iter().map(|l| 1.0 / (l - e)));
        let scaled = DMatrix::from_fn(self.len(), self.len(), |i, j| self.eigenvectors[(i, j)] * scale[j]);
        Ok(&scaled * self.eigenvectors.transpose())
    }

    /// `max_j ‖H ψ_j - E_j ψ_j‖` and `max |ψ^T ψ - 1|`.
    pub fn residuals(&self, h: &DMatrix<f64>) -> (f64, f64) {
        let hv = h * &self.eigenvectors;
        let mut res: f64 = 0.0;
        for j in 0..self.len() {
            let r = hv.column(j) - self.eigenvectors.column(j) * self.eigenvalues[j];
            res = res.max(r.norm());
        }
        let gram = self.eigenvectors.transpose() * &self.eigenvectors;
        let ortho = (gram - DMatrix::identity(self.len(), self.len())).abs().max();
        (res, ortho)
    }
}

/// Dense symmetric eigensolve of an arbitrary symmetric matrix.
pub fn eigensolve_matrix(m: &DMatrix<f64>) -> SpectralData {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let eigenvectors = DMatrix::from_fn(m.nrows(), order.len(), |i, k| eig.eigenvectors[(i, order[k])]);
    SpectralData { eigenvalues, eigenvectors, window: (f64::NEG_INFINITY, f64::INFINITY) }
}

/// Full spectrum of a finite-volume Hamiltonian (window unrestricted).
pub fn eigensolve(h: &HamiltonianMatrix) -> SpectralData {
    eigensolve_matrix(h.matrix())
}

/// A cube together with its Hamiltonian and spectral decomposition.
#[derive(Clone, Debug)]
pub struct LocalOperator {
    pub cube: Cube,
    pub hamiltonian: HamiltonianMatrix,
    pub spectrum: SpectralData,
}

impl LocalOperator {
    pub fn new(cube: Cube, sample: &DisorderSample, spec: &ModelSpec) -> Result<Self> {
        let hamiltonian = model::assemble_hamiltonian(&cube, sample, spec)?;
        let spectrum = eigensolve(&hamiltonian).with_window(0.0, spec.energy_window);
        Ok(Self { cube, hamiltonian, spectrum })
    }

    pub fn center_index(&self) -> usize {
        self.hamiltonian.index_of(&self.cube.center).expect("center lies in its cube")
    }

    pub fn index_of(&self, x: &Configuration) -> Result<usize> {
        self.hamiltonian
            .index_of(x)
            .ok_or_else(|| Error::InvalidArgument(format!("{x:?} is outside the cube")))
    }

    pub fn boundary_indices(&self) -> Vec<usize> {
        self.cube.boundary().iter().map(|z| self.center_index_of(z)).collect()
    }

    /// `G(·, src; E)` by an LU solve, which keeps exponentially small
    /// entries accurate where the spectral sum bottoms out near `1e-16 ‖G‖`.
    pub fn green_column(&self, e: f64, src: usize) -> Result<DVector<f64>> {
        self.spectrum.check_resonance(e)?;
        solve_column(self.hamiltonian.matrix(), e, src)
    }

    /// `(H - E)^{-1}` by LU.
    pub fn green_matrix(&self, e: f64) -> Result<DMatrix<f64>> {
        self.spectrum.check_resonance(e)?;
        let mut a = self.hamiltonian.matrix().clone();
        for i in 0..a.nrows() {
            a[(i, i)] -= e;
        }
        a.lu().try_inverse().ok_or(Error::Resonant { energy: e, distance: 0.0 })
    }

    fn center_index_of(&self, z: &Configuration) -> usize {
        self.hamiltonian.index_of(z).expect("boundary point lies in the cube")
    }

    /// Precomputed `F_u(E) = max_{z ∈ ∂B} |G(z, u; E)|` evaluator.
    pub fn boundary_profile(&self) -> BoundaryProfile {
        let u = self.center_index();
        let boundary = self.boundary_indices();
        let n = self.spectrum.len();
        let weights = boundary
            .iter()
            .map(|&z| (0..n).map(|j| self.spectrum.eigenvectors[(z, j)] * self.spectrum.eigenvectors[(u, j)]).collect())
            .collect();
        BoundaryProfile { eigenvalues: self.spectrum.eigenvalues.clone(), weights }
    }
}

/// Evaluates the center-to-boundary Green function maximum at many energies.
#[derive(Clone, Debug)]
pub struct BoundaryProfile {
    eigenvalues: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

impl BoundaryProfile {
    /// `F_u(E)`; infinite at a resonance.
    pub fn eval(&self, e: f64) -> f64 {
        if self.eigenvalues.iter().any(|l| (l - e).abs() <= RESONANCE_EPS) {
            return f64::INFINITY;
        }
        let inv: Vec<f64> = self.eigenvalues.iter().map(|l| 1.0 / (l - e)).collect();
        self.weights
            .iter()
            .map(|w| w.iter().zip(&inv).map(|(a, b)| a * b).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }
}

/// `|G(dst, src; E)|` through the eigendecomposition.
pub fn green_block(op: &LocalOperator, e: f64, src: &Configuration, dst: &Configuration) -> Result<f64> {
    let (i, j) = (op.index_of(src)?, op.index_of(dst)?);
    Ok(op.spectrum.green_entry(e, j, i)?.abs())
}

/// `|G(dst, src; E)|` through an LU solve of `(H - E) g = δ_src`.
pub fn green_block_direct(h: &HamiltonianMatrix, e: f64, src: &Configuration, dst: &Configuration) -> Result<f64> {
    let i = h.index_of(src).ok_or_else(|| Error::InvalidArgument("src outside domain".into()))?;
    let j = h.index_of(dst).ok_or_else(|| Error::InvalidArgument("dst outside domain".into()))?;
    let col = solve_column(h.matrix(), e, i)?;
    Ok(col[j].abs())
}

/// `(H - E)^{-1} δ_src` by LU.
pub fn solve_column(h: &DMatrix<f64>, e: f64, src: usize) -> Result<DVector<f64>> {
    let mut a = h.clone();
    for i in 0..a.nrows() {
        a[(i, i)] -= e;
    }
    let mut rhs = DVector::zeros(a.nrows());
    rhs[src] = 1.0;
    a.lu()
        .solve(&rhs)
        .ok_or(Error::Resonant { energy: e, distance: 0.0 })
}

/// Center-to-boundary decay `max_{z ∈ ∂B_L(u)} |G(z, u; E)|`.
pub fn dnorm(op: &LocalOperator, e: f64) -> Result<f64> {
    let col = op.green_column(e, op.center_index())?;
    Ok(op.boundary_indices().into_iter().map(|z| col[z].abs()).fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Singularity {
    NonSingular,
    Singular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resonance {
    NonResonant,
    Resonant,
}

/// Parameters of the `(E, δ, m)`-NS test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NsParams {
    pub delta: f64,
    pub mass: f64,
    pub c_gri: f64,
}

impl NsParams {
    /// `e^{-m L^δ}`.
    pub fn threshold(&self, radius: usize) -> f64 {
        (-self.mass * (radius as f64).powf(self.delta)).exp()
    }

    /// `C^GRI (3L)^{Nd}`.
    pub fn prefactor(&self, radius: usize, n: usize, d: usize) -> f64 {
        self.c_gri * (3.0 * radius as f64).powi((n * d) as i32)
    }

    /// NS iff `C^GRI (3L)^{Nd} dnorm <= e^{-m L^δ}`.
    pub fn is_non_singular(&self, dnorm: f64, radius: usize, n: usize, d: usize) -> bool {
        self.prefactor(radius, n, d) * dnorm <= self.threshold(radius)
    }
}

/// `(E, δ, m)`-NS classification; resonant energies count as singular.
pub fn classify_ns(op: &LocalOperator, e: f64, params: &NsParams) -> Singularity {
    match dnorm(op, e) {
        Ok(v) if params.is_non_singular(v, op.cube.radius, op.cube.n_particles(), op.cube.dim()) => {
            Singularity::NonSingular
        }
        _ => Singularity::Singular,
    }
}

/// `(E, β)`-NR iff `dist(Σ, E) >= e^{-L^β}`.
pub fn classify_nr(op: &LocalOperator, e: f64, beta: f64) -> Resonance {
    nr_at_threshold(&op.spectrum, e, (-(op.cube.radius as f64).powf(beta)).exp())
}

fn nr_at_threshold(spectrum: &SpectralData, e: f64, threshold: f64) -> Resonance {
    if spectrum.distance_to(e) >= threshold {
        Resonance::NonResonant
    } else {
        Resonance::Resonant
    }
}

/// Completely non-resonant: every cube `Λ_ℓ(u)` with `ℓ` stepping by `L_k`
/// from `L_k` up to `L_{k+1} - L_k` keeps its spectrum at distance at least
/// `e^{-L_{k+1}^β}` from `E`.
pub fn classify_cnr(
    sample: &DisorderSample,
    spec: &ModelSpec,
    e: f64,
    center: &Configuration,
    scale: usize,
    next_scale: usize,
    beta: f64,
) -> Result<bool> {
    if scale == 0 || next_scale < 2 * scale {
        return Err(Error::InvalidArgument(format!("need L_k >= 1 and L_(k+1) >= 2 L_k, got {scale}, {next_scale}")));
    }
    let threshold = (-(next_scale as f64).powf(beta)).exp();
    let mut radius = scale;
    while radius <= next_scale - scale {
        let h = model::assemble_hamiltonian(&Cube::new(center.clone(), radius), sample, spec)?;
        if nr_at_threshold(&eigensolve(&h), e, threshold) == Resonance::Resonant {
            return Ok(false);
        }
        radius += scale;
    }
    Ok(true)
}

/// `Σ_{E_j ∈ I*} |ψ_j(dst)| |ψ_j(src)|`, which bounds the windowed
/// evolution amplitude uniformly in time.
pub fn efc_kernel(spectrum: &SpectralData, src: usize, dst: usize) -> f64 {
    spectrum
        .window_indices()
        .map(|j| (spectrum.eigenvectors[(dst, j)] * spectrum.eigenvectors[(src, j)]).abs())
        .sum()
}

/// `|<1_dst | P_{I*} e^{-itH} | 1_src>|`.
pub fn dynamical_amplitude(spectrum: &SpectralData, src: usize, dst: usize, t: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for j in spectrum.window_indices() {
        let w = spectrum.eigenvectors[(dst, j)] * spectrum.eigenvectors[(src, j)];
        let phase = -t * spectrum.eigenvalues[j];
        re += w * phase.cos();
        im += w * phase.sin();
    }
    re.hypot(im)
}

/// Outcome of a geometric-resolvent-inequality measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GriMeasurement {
    /// Smallest constant making the inequality hold on all tested pairs.
    pub constant: f64,
    pub pairs: usize,
}

/// Exhaustive GRI check for `Λ = inner ⊂ Λ' = outer` at energy `E`:
/// for every cell `a` strictly inside `Λ` and every `b ∈ Λ' \ Λ`,
/// `|G_{Λ'}(b, a)| <= C ‖G_{Λ'}(b, ·) 1_out‖ ‖1_{∂Λ} G_Λ(·, a)‖`, with `out`
/// the two layers straddling the boundary of `Λ`.
pub fn gri_verify(inner: &LocalOperator, outer: &LocalOperator, e: f64) -> Result<GriMeasurement> {
    let outer_box = outer.cube.lattice_box();
    if !outer_box.contains_box(&inner.cube.lattice_box()) || inner.cube.radius + 1 > outer_box_margin(inner, outer) {
        return Err(Error::Precondition("inner cube must sit strictly inside the outer cube".into()));
    }
    let gi = inner.green_matrix(e)?;
    let go = outer.green_matrix(e)?;
    let u = &inner.cube.center;
    let l = inner.cube.radius as i64;
    let dist_u = |x: &Configuration| crate::geometry::max_norm(u, x).unwrap();

    let inner_points: Vec<Configuration> = inner.cube.lattice_box().points().collect();
    let layer_in: Vec<usize> = inner_points
        .iter()
        .filter(|x| dist_u(x) == l)
        .map(|x| inner.hamiltonian.index_of(x).unwrap())
        .collect();
    let layer_two: Vec<usize> = outer_box
        .points()
        .filter(|x| {
            let r = dist_u(x);
            r == l || r == l + 1
        })
        .map(|x| outer.hamiltonian.index_of(&x).unwrap())
        .collect();

    let mut constant: f64 = 0.0;
    let mut pairs = 0usize;
    for a in inner_points.iter().filter(|x| dist_u(x) < l) {
        let ai = inner.hamiltonian.index_of(a).unwrap();
        let ao = outer.hamiltonian.index_of(a).unwrap();
        let right: f64 = layer_in.iter().map(|&w| gi[(w, ai)].powi(2)).sum::<f64>().sqrt();
        for b in outer_box.points().filter(|x| dist_u(x) > l) {
            let bo = outer.hamiltonian.index_of(&b).unwrap();
            let left: f64 = layer_two.iter().map(|&w| go[(bo, w)].powi(2)).sum::<f64>().sqrt();
            let lhs = go[(bo, ao)].abs();
            pairs += 1;
            if lhs > 0.0 {
                constant = constant.max(lhs / (left * right));
            }
        }
    }
    Ok(GriMeasurement { constant, pairs })
}

fn outer_box_margin(inner: &LocalOperator, outer: &LocalOperator) -> usize {
    let (ib, ob) = (inner.cube.lattice_box(), outer.cube.lattice_box());
    let margin = ib
        .lo()
        .iter()
        .zip(ob.lo())
        .map(|(i, o)| i - o)
        .chain(ob.hi().iter().zip(ib.hi()).map(|(o, i)| o - i))
        .min()
        .unwrap_or(0);
    inner.cube.radius + margin.max(0) as usize
}

/// Single-pair GRI ratio; `a` must be interior to the inner cube and `b`
/// outside it.
pub fn gri_ratio(inner: &LocalOperator, outer: &LocalOperator, e: f64, a: &Configuration, b: &Configuration) -> Result<f64> {
    if a == b {
        return Err(Error::Precondition("A and B must be disjoint".into()));
    }
    let l = inner.cube.radius as i64;
    let da = crate::geometry::max_norm(&inner.cube.center, a)?;
    let db = crate::geometry::max_norm(&inner.cube.center, b)?;
    if da >= l || db <= l {
        return Err(Error::Precondition("A must be interior to Λ and B outside Λ".into()));
    }
    let gi_col = inner.green_column(e, inner.index_of(a)?)?;
    let go_col = outer.green_column(e, outer.index_of(b)?)?;
    let mut right = 0.0;
    for z in inner.cube.boundary() {
        right += gi_col[inner.index_of(&z)?].powi(2);
    }
    let mut left = 0.0;
    for x in outer.cube.lattice_box().points() {
        let r = crate::geometry::max_norm(&inner.cube.center, &x)?;
        if r == l || r == l + 1 {
            left += go_col[outer.index_of(&x)?].powi(2);
        }
    }
    Ok(go_col[outer.index_of(a)?].abs() / (left.sqrt() * right.sqrt()))
}
