//! CSV records and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Full double precision: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub trait Record {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub experiment: String,
    /// Name and unit of the independent variable.
    pub variable: String,
    pub value: f64,
    /// `1 − F(Φ⁻)`, or the ensemble mean of it.
    pub error: f64,
    /// Standard error of the mean; NaN for deterministic runs.
    pub sem: f64,
    /// Infidelity of the reduced qubit state against the closed-form gate.
    pub oracle_infidelity: f64,
    /// Error of the same run with the studied imperfection switched off.
    pub reference_error: f64,
    pub max_leakage: f64,
    pub leakage_flagged: bool,
    pub n_max: usize,
    /// s
    pub dt: f64,
    pub seed: u64,
    pub calibration_scale: f64,
    pub n_trajectories: usize,
    /// `ok` or the failure message.
    pub status: String,
}

impl SweepRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    /// `error − reference_error`.
    pub fn excess_error(&self) -> f64 {
        self.error - self.reference_error
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

impl Record for SweepRecord {
    fn header() -> &'static [&'static str] {
        &[
            "schema_version",
            "experiment",
            "variable",
            "value",
            "error",
            "sem",
            "oracle_infidelity",
            "reference_error",
            "max_leakage",
            "leakage_flagged",
            "n_max",
            "dt_s",
            "seed",
            "calibration_scale",
            "n_trajectories",
            "status",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            CSV_SCHEMA_VERSION.to_string(),
            quote(&self.experiment),
            quote(&self.variable),
            fmt_f64(self.value),
            fmt_f64(self.error),
            fmt_f64(self.sem),
            fmt_f64(self.oracle_infidelity),
            fmt_f64(self.reference_error),
            fmt_f64(self.max_leakage),
            self.leakage_flagged.to_string(),
            self.n_max.to_string(),
            fmt_f64(self.dt),
            self.seed.to_string(),
            fmt_f64(self.calibration_scale),
            self.n_trajectories.to_string(),
            quote(&self.status),
        ]
    }
}

/// Three-level versus effective two-level comparison at one `Δ/|Ω₁|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaRecord {
    pub ratio: f64,
    /// rad/s
    pub rabi_effective: f64,
    /// rad/s
    pub rabi_measured: f64,
    pub rabi_deviation: f64,
    /// Largest sampled excited population after a sudden switch-on.
    pub peak_excited: f64,
    /// Excited population averaged over whole periods of the fast oscillation.
    pub mean_excited: f64,
    /// `2(|Ω₁|/2Δ)²`
    pub excited_bound: f64,
    /// 1/s
    pub rate_effective: f64,
    /// 1/s
    pub rate_fit: f64,
    pub rate_deviation: f64,
    /// Rate fitted with `Γ = 0`, 1/s.
    pub rate_fit_no_decay: f64,
    /// Optical pumping `|↓⟩ → |↑⟩` alone, 1/s.
    pub pumping_effective: f64,
    /// Decay rate of the `|↓⟩` population, 1/s.
    pub pumping_fit: f64,
}

impl Record for LambdaRecord {
    fn header() -> &'static [&'static str] {
        &[
            "schema_version",
            "detuning_ratio",
            "rabi_effective_rad_per_s",
            "rabi_measured_rad_per_s",
            "rabi_deviation",
            "peak_excited",
            "mean_excited",
            "excited_bound",
            "rate_effective_per_s",
            "rate_fit_per_s",
            "rate_deviation",
            "rate_fit_no_decay_per_s",
            "pumping_effective_per_s",
            "pumping_fit_per_s",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let mut v = vec![CSV_SCHEMA_VERSION.to_string()];
        v.extend(
            [
                self.ratio,
                self.rabi_effective,
                self.rabi_measured,
                self.rabi_deviation,
                self.peak_excited,
                self.mean_excited,
                self.excited_bound,
                self.rate_effective,
                self.rate_fit,
                self.rate_deviation,
                self.rate_fit_no_decay,
                self.pumping_effective,
                self.pumping_fit,
            ]
            .map(fmt_f64),
        );
        v
    }
}

/// Relative phase of one σˣ product channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub channel: String,
    /// rad, relative to `|++⟩`
    pub oracle_phase: f64,
    pub simulated_phase: f64,
    pub deviation: f64,
    /// Weight of the ideal output in the simulated state.
    pub population: f64,
}

impl Record for OracleRecord {
    fn header() -> &'static [&'static str] {
        &["schema_version", "channel", "oracle_phase_rad", "simulated_phase_rad", "deviation_rad", "population"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            CSV_SCHEMA_VERSION.to_string(),
            quote(&self.channel),
            fmt_f64(self.oracle_phase),
            fmt_f64(self.simulated_phase),
            fmt_f64(self.deviation),
            fmt_f64(self.population),
        ]
    }
}

pub fn to_csv<R: Record>(rows: &[R]) -> String {
    let mut s = R::header().join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.fields().join(","));
        s.push('\n');
    }
    s
}

/// Writes `contents` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let name =
        path.file_name().ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::from(e)
    })
}

/// `results.csv` → `results.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

/// Everything needed to re-run an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub generator: String,
    pub csv: String,
    pub rows: usize,
    pub config: ExperimentConfig,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, csv: &Path, rows: usize) -> Self {
        Self {
            schema_version: CSV_SCHEMA_VERSION,
            generator: format!("drivengate {}", env!("CARGO_PKG_VERSION")),
            csv: csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            rows,
            config: config.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::{ExperimentKind, Scale};

    fn row() -> SweepRecord {
        SweepRecord {
            experiment: "gate".into(),
            variable: "none".into(),
            value: 0.0,
            error: 1.0 / 3.0,
            sem: f64::NAN,
            oracle_infidelity: 2e-5,
            reference_error: 0.0,
            max_leakage: 0.0,
            leakage_flagged: false,
            n_max: 3,
            dt: 1e-6,
            seed: 7,
            calibration_scale: 0.86,
            n_trajectories: 1,
            status: "ok".into(),
        }
    }

    #[test]
    fn full_precision() {
        let s = fmt_f64(1.0 / 3.0);
        assert_eq!(s.parse::<f64>().unwrap(), 1.0 / 3.0);
        let digits = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(digits.len(), 17);
    }

    #[test]
    fn csv_layout() {
        let csv = to_csv(&[row(), row()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0].split(',').count(), SweepRecord::header().len());
        assert_eq!(lines[1].split(',').count(), SweepRecord::header().len());
        assert!(lines[1].starts_with("1,gate,"));
        let mut r = row();
        r.status = "failed: a, b".into();
        assert!(to_csv(&[r]).contains("\"failed: a, b\""));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.csv");
        write_atomic(&p, "a\n").unwrap();
        write_atomic(&p, "b\n").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "b\n");
        let leftovers: Vec<_> = fs::read_dir(p.parent().unwrap()).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
        assert_eq!(manifest_path(&p), dir.path().join("sub/out.manifest.json"));
    }

    #[test]
    fn manifest_is_a_config() {
        let c = ExperimentConfig::preset(ExperimentKind::Gate, Scale::Ci);
        let m = Manifest::new(&c, Path::new("x/out.csv"), 1);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }
}
