//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::model::ModelSpec;
use crate::msa::efc::{self, DecayPair};
use crate::msa::{ParamMode, ScaleParams};
use crate::stats;

/// Logarithmic grid of spacings `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for SGrid {
    fn default() -> Self {
        Self { lo: 1e-4, hi: 1.0, points: 41 }
    }
}

impl SGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.points >= 2) {
            return Err(Error::Config("s_grid needs 0 < lo < hi and points >= 2".into()));
        }
        Ok(stats::log_grid(self.lo, self.hi, self.points))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayFamily {
    /// `x = (0, 0)`, `y = (0, R)`.
    #[default]
    TwoParticle,
    /// `x = (0, 0, R)`, `y = (0, R, R)`.
    HausdorffBlind,
}

/// Kind-specific inputs. The `kind` field selects the variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Wegner1 {
        center: Configuration,
        radius: usize,
        energy: f64,
        #[serde(default)]
        s_grid: SGrid,
    },
    Wegner2 {
        x: Configuration,
        y: Configuration,
        radius: usize,
        #[serde(default)]
        s_grid: SGrid,
        /// Draw the two cubes from independent samples instead of one.
        #[serde(default)]
        independent: bool,
    },
    ShiftTest {
        n_max: usize,
        radius_max: usize,
        shift: f64,
    },
    SsProb {
        k: u32,
        energy: f64,
        #[serde(default)]
        c_gri: Option<f64>,
    },
    BadGood {
        center: Configuration,
        /// The big cube has radius `L_{k+1}`.
        k: u32,
        energy: f64,
        #[serde(default)]
        c_gri: Option<f64>,
    },
    Dominated {},
    WiTensor {
        center: Configuration,
        radius: usize,
    },
    Etv {
        radius: usize,
        /// Defaults to `ν_N` of the scale parameters.
        #[serde(default)]
        nu: Option<f64>,
        #[serde(default)]
        kappa: Option<f64>,
    },
    EfcDecay {
        #[serde(default)]
        family: DecayFamily,
        r_list: Vec<usize>,
        #[serde(default = "default_gk_energies")]
        gk_energies: usize,
        #[serde(default = "default_gk_quantile")]
        gk_quantile: f64,
    },
    GriMeasure {
        center: Configuration,
        inner_radius: usize,
        outer_radius: usize,
        energy: f64,
    },
}

fn default_gk_energies() -> usize {
    200
}

fn default_gk_quantile() -> f64 {
    0.9
}

impl Experiment {
    pub fn tag(&self) -> &'static str {
        match self {
            Experiment::Wegner1 { .. } => "wegner1",
            Experiment::Wegner2 { .. } => "wegner2",
            Experiment::ShiftTest { .. } => "shift-test",
            Experiment::SsProb { .. } => "ss-prob",
            Experiment::BadGood { .. } => "bad-good",
            Experiment::Dominated { .. } => "dominated",
            Experiment::WiTensor { .. } => "wi-tensor",
            Experiment::Etv { .. } => "etv",
            Experiment::EfcDecay { .. } => "efc-decay",
            Experiment::GriMeasure { .. } => "gri-measure",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    pub model: ModelSpec,
    #[serde(default)]
    pub params: ScaleParams,
    #[serde(default)]
    pub param_mode: ParamMode,
    pub trials: usize,
    pub seed: u64,
    pub output: PathBuf,
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json(&text)?;
        if cfg.output.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.output = dir.join(&cfg.output);
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Sha256 of the compact JSON form, hex encoded.
    pub fn hash(&self) -> Result<String> {
        use sha2::{Digest, Sha256};
        let mut c = self.clone();
        // where the result lands and how many threads compute it do not
        // change the data
        c.output = PathBuf::new();
        c.workers = None;
        Ok(hex::encode(Sha256::digest(serde_json::to_vec(&c)?)))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.model.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        let n = self.model.n_particles;
        let d = self.model.dim;
        let shape = |c: &Configuration, what: &str| -> Result<()> {
            if c.n_particles() != n || c.dim() != d {
                return Err(Error::Config(format!("{what} has shape {}x{}, model is {n}x{d}", c.n_particles(), c.dim())));
            }
            Ok(())
        };
        match &self.experiment {
            Experiment::Wegner1 { center, radius, energy, s_grid } => {
                shape(center, "center")?;
                s_grid.values()?;
                if *radius == 0 || !energy.is_finite() {
                    return bad("wegner1 needs radius >= 1 and a finite energy".into());
                }
            }
            Experiment::Wegner2 { x, y, radius, s_grid, .. } => {
                shape(x, "x")?;
                shape(y, "y")?;
                s_grid.values()?;
                if *radius == 0 {
                    return bad("wegner2 needs radius >= 1".into());
                }
            }
            Experiment::ShiftTest { n_max, radius_max, shift } => {
                if *n_max == 0 || *radius_max == 0 || !shift.is_finite() {
                    return bad("shift-test needs n_max, radius_max >= 1 and a finite shift".into());
                }
            }
            Experiment::SsProb { energy, .. } | Experiment::BadGood { energy, .. } if !energy.is_finite() => {
                return bad("energy must be finite".into());
            }
            Experiment::BadGood { center, .. } => shape(center, "center")?,
            Experiment::WiTensor { center, radius } => {
                shape(center, "center")?;
                if *radius == 0 {
                    return bad("wi-tensor needs radius >= 1".into());
                }
            }
            Experiment::Etv { radius, .. } if *radius == 0 => return bad("etv needs radius >= 1".into()),
            Experiment::EfcDecay { family, r_list, gk_quantile, .. } => {
                let want = match family {
                    DecayFamily::TwoParticle => 2,
                    DecayFamily::HausdorffBlind => 3,
                };
                if n != want || d != 1 {
                    return bad(format!("{family:?} family needs N = {want}, d = 1"));
                }
                if r_list.is_empty() || r_list.contains(&0) {
                    return bad("r_list must be nonempty and positive".into());
                }
                if !(*gk_quantile > 0.0 && *gk_quantile <= 1.0) {
                    return bad("gk_quantile must lie in (0, 1]".into());
                }
            }
            Experiment::GriMeasure { center, inner_radius, outer_radius, energy } => {
                shape(center, "center")?;
                if *inner_radius == 0 || outer_radius < &(inner_radius + 2) || !energy.is_finite() {
                    return bad("gri-measure needs 1 <= inner_radius <= outer_radius - 2".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Decay pairs for an `efc-decay` config.
    pub fn decay_pairs(&self) -> Result<Vec<DecayPair>> {
        match &self.experiment {
            Experiment::EfcDecay { family: DecayFamily::TwoParticle, r_list, .. } => efc::two_particle_family(r_list),
            Experiment::EfcDecay { family: DecayFamily::HausdorffBlind, r_list, .. } => efc::hausdorff_blind_family(r_list),
            _ => Err(Error::Config("not an efc-decay config".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WEGNER1: &str = r#"{
        "kind": "wegner1",
        "center": [[0]],
        "radius": 8,
        "energy": 0.5,
        "model": {"n_particles": 1, "dim": 1, "interaction_amplitude": 1.0, "interaction_exponent": 1.0,
                  "disorder_coupling": 1.0, "amplitude_support": 1.0, "energy_window": 1.0},
        "trials": 10,
        "seed": 7,
        "output": "w1.csv"
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let c = ExperimentConfig::from_json(WEGNER1).unwrap();
        assert_eq!(c.experiment.tag(), "wegner1");
        assert_eq!(c.param_mode, ParamMode::Exploratory);
        let back = ExperimentConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash().unwrap(), c.hash().unwrap());
    }

    #[test]
    fn hash_ignores_output_and_workers() {
        let a = ExperimentConfig::from_json(WEGNER1).unwrap();
        let mut b = a.clone();
        b.output = "elsewhere.csv".into();
        b.workers = Some(8);
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.seed = 8;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    #[test]
    fn rejects_bad_configs() {
        let unknown = WEGNER1.replace("\"wegner1\"", "\"wegner9\"");
        assert!(ExperimentConfig::from_json(&unknown).is_err());
        let no_seed = WEGNER1.replace("\"seed\": 7,", "");
        assert!(ExperimentConfig::from_json(&no_seed).is_err());
        let shape = WEGNER1.replace("[[0]]", "[[0],[1]]");
        assert!(ExperimentConfig::from_json(&shape).is_err());
        let zero = WEGNER1.replace("\"trials\": 10", "\"trials\": 0");
        assert!(ExperimentConfig::from_json(&zero).is_err());
    }
}
