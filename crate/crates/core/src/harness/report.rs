//! Merged summaries of result files, refits and plot data.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evc;
use crate::harness::output::ResultRecord;
use crate::stats;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// No threshold applies to this kind.
    Info,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportLine {
    pub file: PathBuf,
    pub kind: String,
    pub theta: Option<f64>,
    pub nu: Option<f64>,
    pub kappa: Option<f64>,
    /// Residuals of the `(ν̂, κ̂)` fit in log space.
    pub residuals: Vec<f64>,
    pub verdict: Verdict,
    pub detail: String,
    /// `(x, y)` points for plotting, empty when the kind has none.
    #[serde(skip)]
    pub plot: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub lines: Vec<ReportLine>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(|l| l.verdict != Verdict::Fail)
    }

    /// Fixed-width text table.
    pub fn table(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"));
        let mut s = format!("{:<12} {:<8} {:>9} {:>9} {:>9}  {}\n", "kind", "verdict", "theta", "nu", "kappa", "file / detail");
        for l in &self.lines {
            let _ = writeln!(
                s,
                "{:<12} {:<8} {:>9} {:>9} {:>9}  {} ({})",
                l.kind,
                l.verdict.as_str(),
                opt(l.theta),
                opt(l.nu),
                opt(l.kappa),
                l.file.display(),
                l.detail
            );
        }
        s
    }

    pub fn summary_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
        let mut s = String::from("file,kind,theta,nu_hat,kappa_hat,verdict,detail\n");
        for l in &self.lines {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                l.file.display().to_string().replace(',', "_"),
                l.kind,
                opt(l.theta),
                opt(l.nu),
                opt(l.kappa),
                l.verdict.as_str(),
                l.detail.replace(',', ";")
            );
        }
        s
    }
}

fn flag(r: &ResultRecord, key: &str) -> Option<bool> {
    r.summary.get(key).and_then(|v| v.parse().ok())
}

fn bool_column(r: &ResultRecord, name: &str) -> Result<Vec<bool>> {
    let i = r.header.iter().position(|h| h == name).ok_or_else(|| Error::Config(format!("no column `{name}`")))?;
    Ok(r.rows.iter().map(|row| row[i] == "true").collect())
}

/// Refits and judges one record.
pub fn summarize(file: &Path, r: &ResultRecord) -> Result<ReportLine> {
    let mut line = ReportLine {
        file: file.to_path_buf(),
        kind: r.kind.clone(),
        theta: None,
        nu: None,
        kappa: None,
        residuals: Vec::new(),
        verdict: Verdict::Info,
        detail: String::new(),
        plot: Vec::new(),
    };
    match r.kind.as_str() {
        "wegner1" | "wegner2" => {
            let (s, p) = (r.column("s")?, r.column("prob")?);
            line.plot = s.iter().copied().zip(p.iter().copied()).collect();
            let fit = evc::slope_fit(&s, &p);
            line.theta = fit.as_ref().map(|f| f.slope);
            line.verdict = match (&fit, r.kind.as_str()) {
                (None, _) => Verdict::Fail,
                (Some(f), "wegner1") => Verdict::from_bool(f.slope >= 0.9),
                (Some(f), _) => Verdict::from_bool(f.slope + f.half_width >= 2.0 / 3.0),
            };
            line.detail = match fit {
                Some(f) => format!("slope {:.4} +- {:.4} over {} points", f.slope, f.half_width, f.points),
                None => "too few grid points in the fit band".into(),
            };
        }
        "efc-decay" => {
            let (d, mean, viol) = (r.column("d_s")?, r.column("mean")?, r.column("amplitude_violations")?);
            line.plot = d.iter().copied().zip(mean.iter().copied()).collect();
            let (xs, ys): (Vec<f64>, Vec<f64>) = d.iter().zip(&mean).filter(|(_, m)| **m > 0.0).map(|(x, m)| (*x, m.ln())).unzip();
            let lin = stats::linear_fit(&xs, &ys);
            if let Some(f) = stats::fit_stretched_exponential(&xs, &ys) {
                line.residuals = xs.iter().zip(&ys).map(|(x, y)| y - (f.log_amplitude - f.nu * x.powf(f.kappa))).collect();
                line.nu = Some(f.nu);
                line.kappa = Some(f.kappa);
            }
            let decreasing = mean.windows(2).all(|w| w[1] < w[0]);
            let violations: f64 = viol.iter().sum();
            let ok = lin.as_ref().is_some_and(|f| f.slope < 0.0 && f.p_value < 0.01) && decreasing && violations == 0.0;
            line.verdict = Verdict::from_bool(ok);
            line.detail = match lin {
                Some(f) => format!("log slope {:.4} p {:.2e}; decreasing {decreasing}; amplitude violations {violations}", f.slope, f.p_value),
                None => "too few points to fit".into(),
            };
        }
        "shift-test" => {
            let max = r.column("residual")?.into_iter().fold(0.0, f64::max);
            line.verdict = Verdict::from_bool(max < 1e-9);
            line.detail = format!("max residual {max:e}");
        }
        "dominated" => {
            let dom = bool_column(r, "dominated")?;
            let holds = bool_column(r, "holds")?;
            let bad = dom.iter().zip(&holds).filter(|(d, h)| **d && !**h).count();
            line.verdict = Verdict::from_bool(bad == 0);
            line.detail = format!("{} dominated instances; {bad} bound violations", dom.iter().filter(|d| **d).count());
        }
        "wi-tensor" => {
            let passed = bool_column(r, "passed")?;
            let bad = passed.iter().filter(|p| !**p).count();
            line.verdict = Verdict::from_bool(bad == 0);
            line.detail = format!("{bad} of {} instances failed", passed.len());
        }
        "etv" => {
            let (f, se, b) = (r.column("frequency")?[0], r.column("stderr")?[0], r.column("budget")?[0]);
            line.verdict = Verdict::from_bool(f <= b + 3.0 * se);
            line.detail = format!("frequency {f} vs budget {b} + 3 x {se}");
        }
        "bad-good" => {
            let good = bool_column(r, "good")?;
            let nr = bool_column(r, "non_resonant")?;
            let ns = bool_column(r, "non_singular")?;
            let premises = good.iter().zip(&nr).filter(|(g, n)| **g && **n).count();
            let bad = (0..good.len()).filter(|&i| good[i] && nr[i] && !ns[i]).count();
            line.verdict = Verdict::from_bool(bad == 0);
            line.detail = format!("{premises} samples with premises; {bad} violations");
        }
        "ss-prob" => {
            let (p, bound) = (r.column("p_hat")?[0], r.column("bound")?[0]);
            line.detail = format!("p_hat {p} vs bound {bound}; consistent {}", flag(r, "consistent_with_bound").unwrap_or(false));
        }
        "gri-measure" => {
            line.detail = format!("measured constant {}", r.summary.get("c_gri").map_or("-", String::as_str));
        }
        other => return Err(Error::Config(format!("unknown result kind `{other}`"))),
    }
    Ok(line)
}

/// Reads every file, refits, and when `out` is given writes `summary.csv`
/// plus one `<stem>.plot.csv` per file that carries plot data.
pub fn report(paths: &[PathBuf], out: Option<&Path>) -> Result<Report> {
    if paths.is_empty() {
        return Err(Error::InvalidArgument("report needs at least one result file".into()));
    }
    let mut lines = Vec::with_capacity(paths.len());
    for p in paths {
        lines.push(summarize(p, &ResultRecord::read(p)?)?);
    }
    let report = Report { lines };
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("summary.csv"), report.summary_csv())?;
        for l in report.lines.iter().filter(|l| !l.plot.is_empty()) {
            let stem = l.file.file_stem().map_or_else(|| "result".into(), |s| s.to_string_lossy().into_owned());
            let mut s = String::from("x,y\n");
            for (x, y) in &l.plot {
                let _ = writeln!(s, "{x},{y}");
            }
            std::fs::write(dir.join(format!("{stem}.plot.csv")), s)?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn write(dir: &Path, name: &str, r: &ResultRecord) -> PathBuf {
        let p = dir.join(name);
        r.write_atomic(&p).unwrap();
        p
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(report(&[], None).is_err());
    }

    #[test]
    fn wegner_slope_restated() {
        // p = s exactly: slope 1 on every point of the band
        let s = stats::log_grid(1e-3, 1.0, 31);
        let rows = s.iter().map(|x| vec![x.to_string(), "0".into(), x.to_string(), "0".into()]).collect();
        let r = ResultRecord::new("wegner1", "h".into(), &["s", "count", "prob", "stderr"], rows, BTreeMap::new());
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "w1.csv", &r);
        let out = dir.path().join("out");
        let rep = report(&[p], Some(&out)).unwrap();
        approx::assert_relative_eq!(rep.lines[0].theta.unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(rep.lines[0].verdict, Verdict::Pass);
        assert!(out.join("summary.csv").exists());
        assert!(std::fs::read_to_string(out.join("w1.plot.csv")).unwrap().starts_with("x,y\n"));
    }

    #[test]
    fn efc_fit_recovers_parameters() {
        let rows = (2..=12)
            .map(|r| {
                let m = (0.5 - 0.8 * (r as f64).powf(0.7)).exp();
                vec![r.to_string(), r.to_string(), "0".into(), m.to_string(), "0".into(), "0".into(), "0".into(), "0".into()]
            })
            .collect();
        let r = ResultRecord::new("efc-decay", "h".into(), &crate::harness::run::DECAY_HEADER, rows, BTreeMap::new());
        let line = summarize(Path::new("e.csv"), &r).unwrap();
        assert!((line.kappa.unwrap() - 0.7).abs() < 0.01);
        assert!((line.nu.unwrap() - 0.8).abs() < 0.02);
        assert!(line.residuals.iter().all(|e| e.abs() < 1e-2));
        assert_eq!(line.verdict, Verdict::Pass);
    }
}
