//! Scale-induction parameters and their admissibility constraints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{NsParams, DEFAULT_C_GRI};

/// Parameters of the scale induction `L_k = L_0 Y^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    /// `N*`, largest particle number handled.
    pub n_max: usize,
    pub l0: usize,
    pub y: usize,
    pub kappa: f64,
    pub beta: f64,
    pub delta: f64,
    pub zeta: f64,
    pub m_star: f64,
    pub nu_star: f64,
    pub e_star: f64,
}

impl Default for ScaleParams {
    fn default() -> Self {
        Self { n_max: 2, l0: 4, y: 3, kappa: 0.3, beta: 0.4, delta: 0.6, zeta: 1.0, m_star: 1.0, nu_star: 1.0, e_star: 1.0 }
    }
}

/// Strict mode refuses parameter sets that violate any constraint;
/// exploratory mode records the violations and carries on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamMode {
    Strict,
    #[default]
    Exploratory,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamReport {
    pub checks: Vec<ConstraintCheck>,
    /// `m_n` for `n = 1..=N*`.
    pub masses: Vec<f64>,
    /// `ν_n` for `n = 1..=N*`.
    pub rates: Vec<f64>,
    pub min_y: usize,
}

impl ParamReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&ConstraintCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// `max[24 N*, 12^{1/(1-δ)}]` rounded up.
pub fn min_y(n_max: usize, delta: f64) -> usize {
    let a = 24.0 * n_max as f64;
    let b = 12f64.powf(1.0 / (1.0 - delta));
    a.max(b).ceil() as usize
}

impl ScaleParams {
    /// `L_k = L_0 Y^k`.
    pub fn scale(&self, k: u32) -> usize {
        self.l0 * self.y.pow(k)
    }

    pub fn scale_sequence(&self, k_max: u32) -> Vec<usize> {
        (0..=k_max).map(|k| self.scale(k)).collect()
    }

    /// `m_n = m* (1 + 4 L_0^{-δ+β})^{N*-n}`.
    pub fn mass(&self, n: usize) -> f64 {
        let base = 1.0 + 4.0 * (self.l0 as f64).powf(-self.delta + self.beta);
        self.m_star * base.powi(self.n_max.saturating_sub(n) as i32)
    }

    /// `ν_n = ν* (2 Y^κ)^{N*-n}`.
    pub fn rate(&self, n: usize) -> f64 {
        self.nu_star * (2.0 * (self.y as f64).powf(self.kappa)).powi(self.n_max.saturating_sub(n) as i32)
    }

    /// `e^{-ν_n L_k^κ}`.
    pub fn ss_bound(&self, n: usize, k: u32) -> f64 {
        (-self.rate(n) * (self.scale(k) as f64).powf(self.kappa)).exp()
    }

    /// NS test parameters for `n` particles.
    pub fn ns(&self, n: usize, c_gri: Option<f64>) -> NsParams {
        NsParams { delta: self.delta, mass: self.mass(n), c_gri: c_gri.unwrap_or(DEFAULT_C_GRI) }
    }

    /// Index `k` with `L_k = radius`, if any.
    pub fn scale_index(&self, radius: usize) -> Option<u32> {
        let (mut k, mut l) = (0u32, self.l0);
        while l < radius && self.y >= 2 {
            l = l.checked_mul(self.y)?;
            k += 1;
        }
        (l == radius).then_some(k)
    }

    /// Validates, and in strict mode fails on any violated constraint.
    pub fn require(&self, mode: ParamMode) -> Result<ParamReport> {
        let report = validate_params(self);
        if mode == ParamMode::Strict && !report.all_passed() {
            let names: Vec<&str> = report.failures().iter().map(|c| c.name.as_str()).collect();
            return Err(Error::Config(format!("parameter constraints violated: {}", names.join(", "))));
        }
        Ok(report)
    }
}

fn check(name: &str, passed: bool, detail: String) -> ConstraintCheck {
    ConstraintCheck { name: name.into(), passed, detail }
}

/// Per-constraint verdicts plus the `m_n`, `ν_n` tables.
pub fn validate_params(p: &ScaleParams) -> ParamReport {
    let zeta = p.zeta.min(1.0);
    let unit = |x: f64| x > 0.0 && x < 1.0;
    let min_y = min_y(p.n_max, p.delta);
    let mut checks = vec![
        check("n_max >= 2", p.n_max >= 2, format!("N* = {}", p.n_max)),
        check("l0 >= 1", p.l0 >= 1, format!("L0 = {}", p.l0)),
        check("y >= 2", p.y >= 2, format!("Y = {}", p.y)),
        check(
            "exponents in (0,1)",
            unit(p.kappa) && unit(p.beta) && unit(p.delta),
            format!("kappa = {}, beta = {}, delta = {}", p.kappa, p.beta, p.delta),
        ),
        check(
            "0 < kappa < beta < delta < min(zeta, 1)",
            0.0 < p.kappa && p.kappa < p.beta && p.beta < p.delta && p.delta < zeta,
            format!("{} < {} < {} < {}", p.kappa, p.beta, p.delta, zeta),
        ),
        check("y >= max(24 n_max, 12^(1/(1-delta)))", p.y >= min_y, format!("Y = {}, minimum {}", p.y, min_y)),
        check("m_star >= 1", p.m_star >= 1.0, format!("m* = {}", p.m_star)),
        check("nu_star > 0", p.nu_star > 0.0, format!("nu* = {}", p.nu_star)),
        check("e_star > 0", p.e_star > 0.0, format!("E* = {}", p.e_star)),
    ];
    let ns = 1..=p.n_max.max(1);
    let masses: Vec<f64> = ns.clone().map(|n| p.mass(n)).collect();
    let rates: Vec<f64> = ns.map(|n| p.rate(n)).collect();
    let positive = masses.iter().chain(&rates).all(|v| *v > 0.0 && v.is_finite());
    let decreasing = masses.windows(2).all(|w| w[0] >= w[1]) && rates.windows(2).all(|w| w[0] >= w[1]);
    checks.push(check("m_n, nu_n positive and nonincreasing in n", positive && decreasing, format!("m = {masses:?}, nu = {rates:?}")));
    ParamReport { checks, masses, rates, min_y }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_passes() {
        let p = ScaleParams { y: 499, ..ScaleParams::default() };
        let r = validate_params(&p);
        assert!(r.all_passed(), "{:?}", r.failures());
    }

    #[test]
    fn minimal_y() {
        assert_eq!(min_y(2, 0.6), 499);
        assert_eq!(min_y(30, 0.1), 720);
        let p = ScaleParams { y: 498, ..ScaleParams::default() };
        let r = validate_params(&p);
        assert_eq!(r.failures().len(), 1);
        assert!(p.require(ParamMode::Strict).is_err());
        assert!(p.require(ParamMode::Exploratory).is_ok());
    }

    #[test]
    fn strict_ordering() {
        let p = ScaleParams { kappa: 0.4, y: 499, ..ScaleParams::default() };
        assert!(!validate_params(&p).all_passed());
        let p = ScaleParams { delta: 0.9, zeta: 0.8, y: 10_000_000, ..ScaleParams::default() };
        assert!(!validate_params(&p).all_passed());
    }

    #[test]
    fn tables_follow_formulas() {
        let p = ScaleParams { n_max: 3, ..ScaleParams::default() };
        let base = 1.0 + 4.0 * 4f64.powf(-0.6 + 0.4);
        assert_eq!(p.mass(1), base * base);
        assert_eq!(p.mass(3), 1.0);
        let r = 2.0 * 3f64.powf(0.3);
        assert_eq!(p.rate(1), r * r);
        assert_eq!(p.rate(2), r);
        let report = validate_params(&p);
        assert_eq!(report.masses, vec![p.mass(1), p.mass(2), p.mass(3)]);
        assert!(report.masses.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn scales() {
        let p = ScaleParams::default();
        assert_eq!(p.scale_sequence(3), vec![4, 12, 36, 108]);
        for k in 0..3 {
            assert_eq!(p.scale(k + 1), p.scale(k) * p.y);
        }
        assert_eq!(p.scale_index(12), Some(1));
        assert_eq!(p.scale_index(13), None);
    }
}
