//! Bad/good classification of cubes at scale `L_{k+1}` and the direct check
//! that Green functions of good non-resonant cubes are dominated.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Configuration, Cube, Interaction, LatticeBox};
use crate::model::{DisorderSample, ModelSpec};
use crate::msa::dominated::{self, AnnuliCover, Graph, GraphFunction};
use crate::msa::params::ScaleParams;
use crate::spectral::{self, LocalOperator, NsParams, Resonance, Singularity};

/// Largest big-cube radius scanned with stride 1.
pub const FULL_SCAN_LIMIT: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Witness {
    /// A weakly interactive singular subcube.
    WiSingular(Configuration),
    /// Two strongly interactive singular subcubes at `d_S > 9 N L_k`.
    SingularPair(Configuration, Configuration),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadGood {
    pub witness: Option<Witness>,
    pub subcubes: usize,
    pub singular_subcubes: usize,
    pub stride: usize,
}

impl BadGood {
    pub fn is_good(&self) -> bool {
        self.witness.is_none()
    }
}

/// Centers `v` on the lattice with `Λ_ℓ(v) ⊂ Λ_L(u)`, stepping by `stride`.
pub fn subcube_centers(big: &Cube, small_radius: usize, stride: usize) -> Result<Vec<Configuration>> {
    if small_radius > big.radius || stride == 0 {
        return Err(Error::InvalidArgument("subcube larger than the cube or zero stride".into()));
    }
    let reach = (big.radius - small_radius) as i64;
    let k = big.center.coords().len();
    let lo: Vec<i64> = big.center.coords().iter().map(|c| c - reach).collect();
    let steps = (2 * reach) as usize / stride + 1;
    let total = steps.pow(k as u32);
    let mut out = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut coords = vec![0i64; k];
        for c in (0..k).rev() {
            coords[c] = lo[c] + ((idx % steps) * stride) as i64;
            idx /= steps;
        }
        out.push(Configuration::from_flat(big.n_particles(), big.dim(), coords)?);
    }
    Ok(out)
}

/// Singularity label of every `L_k` subcube of `big`.
pub fn label_subcubes(
    big: &Cube,
    small_radius: usize,
    e: f64,
    ns: &NsParams,
    sample: &DisorderSample,
    spec: &ModelSpec,
    stride: usize,
) -> Result<Vec<(Configuration, Singularity)>> {
    subcube_centers(big, small_radius, stride)?
        .into_iter()
        .map(|v| {
            let op = LocalOperator::new(Cube::new(v.clone(), small_radius), sample, spec)?;
            Ok((v, spectral::classify_ns(&op, e, ns)))
        })
        .collect()
}

/// Scans the `L_k` subcubes of a cube of radius `L_{k+1}` and returns the
/// first witness of badness, if any.
pub fn classify_bad_good(
    big: &Cube,
    e: f64,
    params: &ScaleParams,
    sample: &DisorderSample,
    spec: &ModelSpec,
    c_gri: Option<f64>,
) -> Result<BadGood> {
    let k1 = params
        .scale_index(big.radius)
        .filter(|&k| k >= 1)
        .ok_or_else(|| Error::Precondition(format!("radius {} is not a scale L_(k+1)", big.radius)))?;
    let small = params.scale(k1 - 1);
    let n = big.n_particles();
    let ns = params.ns(n, c_gri);
    let stride = if big.radius <= FULL_SCAN_LIMIT { 1 } else { small };
    let labels = label_subcubes(big, small, e, &ns, sample, spec, stride)?;
    classify_from_labels(&labels, small, stride)
}

/// Bad/good verdict from precomputed subcube labels.
pub fn classify_from_labels(labels: &[(Configuration, Singularity)], small_radius: usize, stride: usize) -> Result<BadGood> {
    let singular: Vec<&Configuration> = labels.iter().filter(|(_, s)| *s == Singularity::Singular).map(|(v, _)| v).collect();
    let mut witness = None;
    let mut si = Vec::new();
    for v in &singular {
        if geometry::classify_wi_si(&Cube::new((*v).clone(), small_radius)) == Interaction::Weak {
            witness = Some(Witness::WiSingular((*v).clone()));
            break;
        }
        si.push(*v);
    }
    if witness.is_none() {
        'outer: for (i, a) in si.iter().enumerate() {
            let limit = 9 * (a.n_particles() * small_radius) as i64;
            for b in &si[i + 1..] {
                if geometry::sym_distance(a, b)? > limit {
                    witness = Some(Witness::SingularPair((*a).clone(), (*b).clone()));
                    break 'outer;
                }
            }
        }
    }
    Ok(BadGood { witness, subcubes: labels.len(), singular_subcubes: singular.len(), stride })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    /// `(E, β)`-CNR of the big cube with scales `(ℓ, L)`.
    pub hypotheses_met: bool,
    /// `m ℓ^δ > 2 L^β > L^β + ln |B_L(u)|`; reported, not required.
    pub scale_condition: bool,
    /// `e^{-m' ℓ^δ}` with `m' = m - 2 ℓ^{-δ} L^β`.
    pub q: f64,
    /// Centers of singular `ℓ`-subcubes inside `B_{L-ℓ-1}(u)`.
    pub singular_set: Vec<Configuration>,
    pub checked_points: usize,
    /// Claimed-regular points that failed `f(x) <= q M(f, B_{ℓ+1}(x))`.
    pub regularity_failures: Vec<Configuration>,
    pub bound: Option<dominated::DominatedBound>,
}

impl DominationReport {
    pub fn passed(&self) -> bool {
        self.regularity_failures.is_empty()
    }
}

/// Direct check that `x ↦ |G_{Λ'}(y, x; E)|` on `Λ' = Λ_{L+1}(u)` is
/// dominated: every `x ∈ B_{L-ℓ-1}(u)` whose subcube `Λ_ℓ(x)` is NS must be
/// regular. On the lattice the resolvent couples through the exterior
/// layer, so regularity is tested on balls of radius `ℓ + 1`.
#[allow(clippy::too_many_arguments)]
pub fn verify_domination(
    center: &Configuration,
    radius: usize,
    y: &Configuration,
    ell: usize,
    e: f64,
    beta: f64,
    ns: &NsParams,
    sample: &DisorderSample,
    spec: &ModelSpec,
) -> Result<DominationReport> {
    if ell < 1 || radius < 2 * ell + 2 {
        return Err(Error::InvalidArgument(format!("need L >= 2 l + 2, got L = {radius}, l = {ell}")));
    }
    let outer = Cube::new(center.clone(), radius + 1);
    if geometry::max_norm(center, y)? != radius as i64 + 1 {
        return Err(Error::InvalidArgument("y must lie on the boundary of Λ_(L+1)(u)".into()));
    }
    let (lf, rf) = (ell as f64, radius as f64);
    let m_prime = ns.mass - 2.0 * lf.powf(-ns.delta) * rf.powf(beta);
    let q = (-m_prime * lf.powf(ns.delta)).exp();
    let volume = Cube::new(center.clone(), radius).len() as f64;
    let scale_condition = ns.mass * lf.powf(ns.delta) > 2.0 * rf.powf(beta) && rf.powf(beta) > volume.ln();

    let hypotheses_met = spectral::classify_cnr(sample, spec, e, center, ell, radius, beta)?;
    let domain: LatticeBox = outer.lattice_box();
    let inner = radius - ell - 1;
    let mut singular_set = Vec::new();
    let mut singular_idx = BTreeSet::new();
    let mut regular_claims = Vec::new();
    for (i, x) in domain.points().enumerate() {
        if geometry::max_norm(center, &x)? as usize > inner {
            continue;
        }
        let sub = LocalOperator::new(Cube::new(x.clone(), ell), sample, spec)?;
        if spectral::classify_ns(&sub, e, ns) == Singularity::Singular {
            singular_set.push(x);
            singular_idx.insert(i);
        } else {
            regular_claims.push((i, x));
        }
    }

    if !hypotheses_met {
        return Ok(DominationReport {
            hypotheses_met,
            scale_condition,
            q,
            singular_set,
            checked_points: 0,
            regularity_failures: Vec::new(),
            bound: None,
        });
    }
    let op = LocalOperator::new(outer.clone(), sample, spec)?;
    let col = op.green_column(e, op.index_of(y)?)?;
    let values: Vec<f64> = col.iter().map(|v| v.abs()).collect();

    let graph = Graph::king_lattice(&domain);
    let mut regularity_failures = Vec::new();
    for (i, x) in &regular_claims {
        let m = graph.ball(*i, ell + 1).into_iter().map(|j| values[j]).fold(0.0, f64::max);
        if values[*i] > q * m {
            regularity_failures.push(x.clone());
        }
    }

    // the same data as an abstract dominated function on B_{L+1}(u)
    let bound = if q > 0.0 && q < 1.0 {
        let gf = GraphFunction {
            graph,
            center: domain.index_of(center).expect("center in domain"),
            radius,
            values,
            ell: ell + 1,
            q,
            singular: singular_idx,
        };
        let cover = AnnuliCover::minimal(&gf);
        let dominated = gf.validate().is_ok() && gf.check_domination()?.dominated;
        if dominated && cover.width() + ell < radius {
            Some(dominated::dominated_bound(&gf, &cover)?)
        } else {
            None
        }
    } else {
        None
    };

    Ok(DominationReport {
        hypotheses_met,
        scale_condition,
        q,
        singular_set,
        checked_points: regular_claims.len(),
        regularity_failures,
        bound,
    })
}

/// One sample of the implication "good and `(E, β)`-NR at scale `L_{k+1}`
/// implies `(E, δ, m_N)`-NS".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicationSample {
    pub good: bool,
    pub non_resonant: bool,
    pub non_singular: bool,
    pub dnorm: f64,
    pub threshold: f64,
}

impl ImplicationSample {
    pub fn premises(&self) -> bool {
        self.good && self.non_resonant
    }

    pub fn violated(&self) -> bool {
        self.premises() && !self.non_singular
    }
}

/// Evaluates the premises and the conclusion on one disorder sample.
pub fn good_nr_implies_ns(
    big: &Cube,
    e: f64,
    params: &ScaleParams,
    sample: &DisorderSample,
    spec: &ModelSpec,
    c_gri: f64,
) -> Result<ImplicationSample> {
    let bg = classify_bad_good(big, e, params, sample, spec, Some(c_gri))?;
    let op = LocalOperator::new(big.clone(), sample, spec)?;
    let ns = params.ns(big.n_particles(), Some(c_gri));
    let non_resonant = spectral::classify_nr(&op, e, params.beta) == Resonance::NonResonant;
    let dnorm = spectral::dnorm(&op, e).unwrap_or(f64::INFINITY);
    let threshold = ns.threshold(big.radius) / ns.prefactor(big.radius, big.n_particles(), big.dim());
    Ok(ImplicationSample {
        good: bg.is_good(),
        non_resonant,
        non_singular: spectral::classify_ns(&op, e, &ns) == Singularity::NonSingular,
        dnorm,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model;
    use std::collections::BTreeMap;

    fn params_1d() -> ScaleParams {
        ScaleParams { n_max: 2, l0: 1, y: 8, m_star: 1.0, ..ScaleParams::default() }
    }

    #[test]
    fn centers_cover_the_cube() {
        let big = Cube::new(Configuration::line(&[0, 20]), 12);
        let c = subcube_centers(&big, 4, 1).unwrap();
        assert_eq!(c.len(), 17 * 17);
        assert!(c.iter().all(|v| geometry::max_norm(&big.center, v).unwrap() <= 8));
        assert_eq!(subcube_centers(&big, 4, 4).unwrap().len(), 25);
    }

    #[test]
    fn all_non_singular_is_good() {
        let spec = ModelSpec::new(1, 1).with_coupling(50.0);
        let params = ScaleParams { l0: 4, y: 3, ..ScaleParams::default() };
        let big = Cube::new(Configuration::line(&[0]), 12);
        let w = DisorderSample::constant(big.lattice_box().site_region(), 0.5);
        // E far below the spectrum: every subcube is NS
        let r = classify_bad_good(&big, -100.0, &params, &w, &spec, None).unwrap();
        assert!(r.is_good());
        assert_eq!(r.singular_subcubes, 0);
        assert_eq!(r.subcubes, 17);
        let off_scale = Cube::new(Configuration::line(&[0]), 13);
        assert!(classify_bad_good(&off_scale, 0.0, &params, &w, &spec, None).is_err());
    }

    #[test]
    fn single_si_singular_cube_is_good() {
        let labels = vec![
            (Configuration::line(&[0]), Singularity::Singular),
            (Configuration::line(&[1]), Singularity::NonSingular),
        ];
        assert!(classify_from_labels(&labels, 1, 1).unwrap().is_good());
    }

    #[test]
    fn planted_double_well_is_bad() {
        // barriers everywhere, two identical wells at ±6
        let spec = ModelSpec::new(1, 1).with_coupling(1.0);
        let params = params_1d();
        let big = Cube::new(Configuration::line(&[0]), 8);
        let mut amps: BTreeMap<Vec<i64>, f64> = big.lattice_box().site_region().into_iter().map(|s| (s, 100.0)).collect();
        amps.insert(vec![-6], 0.0);
        amps.insert(vec![6], 0.0);
        let w = DisorderSample::planted(amps);
        let probe = LocalOperator::new(Cube::new(Configuration::line(&[6]), 1), &w, &spec).unwrap();
        let e = probe.spectrum.eigenvalues()[0] + 1e-9;
        let ns = params.ns(1, None);
        for c in [-6, 6] {
            let op = LocalOperator::new(Cube::new(Configuration::line(&[c]), 1), &w, &spec).unwrap();
            assert_eq!(spectral::classify_ns(&op, e, &ns), Singularity::Singular);
        }
        let r = classify_bad_good(&big, e, &params, &w, &spec, None).unwrap();
        match r.witness {
            Some(Witness::SingularPair(a, b)) => assert!(geometry::sym_distance(&a, &b).unwrap() > 9),
            other => panic!("expected a pair witness, got {other:?}"),
        }
    }

    #[test]
    fn strong_disorder_domination() {
        let spec = ModelSpec::new(1, 1).with_coupling(50.0);
        let u = Configuration::line(&[0]);
        let region = Cube::new(u.clone(), 14).lattice_box().site_region();
        let ns = NsParams { delta: 0.6, mass: 3.0, c_gri: 2.0 };
        let mut met = 0;
        for seed in 0..10 {
            let w = model::sample_disorder(region.iter().cloned(), seed, &spec).unwrap();
            let rep = verify_domination(&u, 12, &Configuration::line(&[13]), 4, 20.0, 0.4, &ns, &w, &spec).unwrap();
            if rep.hypotheses_met {
                met += 1;
                assert!(rep.passed(), "seed {seed}: {:?}", rep.regularity_failures);
                if let Some(b) = rep.bound {
                    assert!(b.holds());
                }
            }
        }
        assert!(met > 0);
    }

    #[test]
    fn resonant_cube_skips_assertions() {
        let spec = ModelSpec::new(1, 1).with_coupling(50.0);
        let u = Configuration::line(&[0]);
        let w = model::sample_disorder(Cube::new(u.clone(), 14).lattice_box().site_region(), 3, &spec).unwrap();
        let op = LocalOperator::new(Cube::new(u.clone(), 8), &w, &spec).unwrap();
        let e = op.spectrum.eigenvalues()[5];
        let ns = NsParams { delta: 0.6, mass: 3.0, c_gri: 2.0 };
        let rep = verify_domination(&u, 12, &Configuration::line(&[13]), 4, e, 0.4, &ns, &w, &spec).unwrap();
        assert!(!rep.hypotheses_met);
        assert_eq!(rep.checked_points, 0);
    }

    #[test]
    fn planted_singular_region_is_exempt() {
        let spec = ModelSpec::new(1, 1).with_coupling(50.0);
        let u = Configuration::line(&[0]);
        let mut amps: BTreeMap<Vec<i64>, f64> = Cube::new(u.clone(), 14).lattice_box().site_region().into_iter().map(|s| (s, 0.8)).collect();
        for (i, s) in (-14..=14).enumerate() {
            amps.insert(vec![s], 0.3 + 0.4 * ((i * 7919) % 97) as f64 / 97.0);
        }
        amps.insert(vec![2], 0.0);
        let w = DisorderSample::planted(amps);
        let probe = LocalOperator::new(Cube::new(Configuration::line(&[2]), 4), &w, &spec).unwrap();
        let e = probe.spectrum.eigenvalues()[0] + 1e-7;
        let ns = NsParams { delta: 0.6, mass: 3.0, c_gri: 2.0 };
        let rep = verify_domination(&u, 12, &Configuration::line(&[13]), 4, e, 0.4, &ns, &w, &spec).unwrap();
        assert!(!rep.singular_set.is_empty());
        assert!(rep.singular_set.iter().all(|x| geometry::max_norm(x, &Configuration::line(&[2])).unwrap() <= 4));
        // every exempt point is singular by direct classification
        for x in &rep.singular_set {
            let op = LocalOperator::new(Cube::new(x.clone(), 4), &w, &spec).unwrap();
            assert_eq!(spectral::classify_ns(&op, e, &ns), Singularity::Singular);
        }
        if rep.hypotheses_met {
            assert!(rep.passed());
        }
    }
}
