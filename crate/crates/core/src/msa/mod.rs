//! Multiscale analysis: scale parameters and the probabilistic and
//! deterministic ingredients checked numerically at each scale.

pub mod badgood;
pub mod dominated;
pub mod efc;
pub mod etv;
pub mod params;
pub mod singularity;
pub mod witensor;

pub use badgood::{classify_bad_good, good_nr_implies_ns, verify_domination, BadGood, DominationReport, Witness};
pub use dominated::{dominated_bound, AnnuliCover, DominatedBound, Graph, GraphFunction};
pub use efc::{efc_decay_experiment, DecayOptions, DecayPair, DecayProfile};
pub use etv::{etv_energy_sweep, etv_experiment, EtvScales, EtvVerdict};
pub use params::{validate_params, ParamMode, ParamReport, ScaleParams};
pub use singularity::{estimate_singularity_prob, SingularityEstimate};
pub use witensor::{wi_tensor_check, WiTensorReport};
