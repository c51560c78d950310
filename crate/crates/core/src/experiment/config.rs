//! Experiment configuration with unit-tagged physical parameters.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::units::Frequency;
use crate::dynamics::{IntegratorConfig, LeakagePolicy};
use crate::error::{Error, Result};
use crate::ion::{
    plan_gate, reference_setup, BeamGeometry, Convention, GatePlan, ModeSpectrum, PlanMode, PlanRequest, RamanModel,
    TrapModel, AMU,
};
use crate::stochastic::{PathStart, DEFAULT_TAU};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Gate,
    ScatterSweep,
    IntensitySweep,
    LambdaCheck,
    OracleCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Gate => "gate",
            ExperimentKind::ScatterSweep => "scatter-sweep",
            ExperimentKind::IntensitySweep => "intensity-sweep",
            ExperimentKind::LambdaCheck => "lambda-check",
            ExperimentKind::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Ci,
    Reproduction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    pub omega_x: Frequency,
    pub omega_z: Frequency,
    pub ion_mass_amu: f64,
    pub wavelength_m: f64,
    pub beam_geometry: BeamGeometry,
    /// Sideband detunings of the COM and zig-zag modes.
    pub delta_com: Frequency,
    pub delta_zz: Frequency,
    /// Effective two-photon Rabi frequency before calibration.
    pub omega_l: Frequency,
    /// Microwave drive; `MHz_by_convention` follows `omega_d_convention`.
    pub omega_d: Frequency,
    /// Excited-state decay rate; `MHz_by_convention` follows
    /// `gamma_convention`.
    pub gamma: Frequency,
    /// Loop counts `[k_com, k_zz]`.
    pub loops: [u32; 2],
    pub plan_mode: PlanMode,
    pub enforce_drive_ratio: bool,
    /// Include photon scattering in single gate runs.
    pub dissipation: bool,
    /// Raman detuning for single gate runs with dissipation.
    pub raman_detuning: Frequency,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            omega_x: Frequency::mhz(4.0),
            omega_z: Frequency::mhz(1.0),
            ion_mass_amu: 25.0,
            wavelength_m: reference_setup::WAVELENGTH,
            beam_geometry: BeamGeometry::RightAngle,
            delta_com: Frequency::khz(127.0),
            delta_zz: Frequency::khz(254.0),
            omega_l: Frequency::khz(811.0),
            omega_d: Frequency::by_convention(reference_setup::OMEGA_D_MHZ),
            gamma: Frequency::by_convention(reference_setup::GAMMA_MHZ),
            loops: reference_setup::LOOPS,
            plan_mode: PlanMode::Calibrate,
            enforce_drive_ratio: true,
            dissipation: false,
            raman_detuning: Frequency::thz(10.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSettings {
    /// Correlation time, s.
    pub tau_s: f64,
    /// Largest noise-grid step, s. The grid is `t_g/N` with `N` even.
    pub max_dt_s: f64,
    pub start: PathStart,
}

impl Default for NoiseSettings {
    fn default() -> Self {
        Self { tau_s: DEFAULT_TAU, max_dt_s: 10e-9, start: PathStart::Zero }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    pub physics: Physics,
    pub n_max: usize,
    pub integrator: IntegratorConfig,
    /// Raman detunings of the scattering sweep.
    pub delta_grid: Vec<Frequency>,
    /// Relative intensity-noise amplitudes.
    pub zeta_grid: Vec<f64>,
    /// `Δ/|Ω₁|` values of the Λ-system check.
    pub ratio_grid: Vec<f64>,
    pub noise: NoiseSettings,
    pub n_trajectories: usize,
    pub master_seed: u64,
    pub gamma_convention: Convention,
    pub omega_d_convention: Convention,
    /// CSV destination; the manifest is written beside it.
    pub output: Option<String>,
}

/// Physical parameters resolved to SI angular units.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub trap: TrapModel,
    pub spectrum: ModeSpectrum,
    pub request: PlanRequest,
    /// rad/s
    pub gamma: f64,
    /// rad/s
    pub raman_detuning: f64,
}

impl Resolved {
    pub fn plan(&self) -> Result<GatePlan> {
        plan_gate(&self.spectrum, &self.request)
    }

    /// Raman beams at detuning `delta` that realize the plan's `Ω_L`.
    pub fn raman(&self, plan: &GatePlan, delta: f64) -> RamanModel {
        RamanModel::for_detuning(delta, plan.omega_l, self.gamma, self.trap.k_eff())
    }
}

impl ExperimentConfig {
    pub fn preset(experiment: ExperimentKind, scale: Scale) -> Self {
        let ci = scale == Scale::Ci;
        let n_max = match (experiment, ci) {
            (_, true) => 3,
            (ExperimentKind::ScatterSweep, false) => 11,
            (_, false) => 7,
        };
        // n_max = 7 keeps a top-Fock population of a few 1e-6 mid-gate
        let integrator = IntegratorConfig {
            leakage_policy: if n_max >= 9 { LeakagePolicy::Abort } else { LeakagePolicy::Flag },
            ..IntegratorConfig::default()
        };
        let delta_grid = if ci { vec![0.25, 0.5, 1.0, 2.0] } else { vec![0.1, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0, 25.0] };
        let zeta_grid = if ci { vec![0.0, 1e-3, 1e-2] } else { vec![5e-4, 1e-3, 2.5e-3, 5e-3, 1e-2] };
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            experiment,
            physics: Physics::default(),
            n_max,
            integrator,
            delta_grid: delta_grid.into_iter().map(Frequency::thz).collect(),
            zeta_grid,
            ratio_grid: vec![50.0, 100.0, 300.0, 1000.0],
            noise: NoiseSettings::default(),
            n_trajectories: if ci { 20 } else { 200 },
            master_seed: 20_240_601,
            gamma_convention: Convention::Cyclic,
            omega_d_convention: Convention::Cyclic,
            output: None,
        }
    }

    /// Parses a config, or the `config` member of a run manifest.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let inner = match v.get("config") {
            Some(c) if v.get("experiment").is_none() => c.clone(),
            _ => v,
        };
        let cfg: Self = serde_json::from_value(inner)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} unsupported (expected {CONFIG_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.n_max < 1 {
            return Err(Error::Config("n_max must be at least 1".into()));
        }
        self.integrator.validate()?;
        for d in &self.delta_grid {
            if !(d.angular()? > 0.0) {
                return Err(Error::Config(format!("Raman detuning {d} must be positive")));
            }
        }
        if self.zeta_grid.iter().any(|z| !(0.0..=0.1).contains(z)) {
            return Err(Error::Config("zeta values must lie in [0, 0.1]".into()));
        }
        if self.ratio_grid.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::Config("detuning ratios must be positive".into()));
        }
        if self.n_trajectories == 0 {
            return Err(Error::Config("n_trajectories must be at least 1".into()));
        }
        if !(self.noise.tau_s > 0.0) || !(self.noise.max_dt_s > 0.0) {
            return Err(Error::Config("noise tau_s and max_dt_s must be positive".into()));
        }
        self.resolve()?;
        Ok(())
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let p = &self.physics;
        if !(p.ion_mass_amu > 0.0) || !(p.wavelength_m > 0.0) {
            return Err(Error::Config("ion mass and wavelength must be positive".into()));
        }
        let trap = TrapModel {
            omega_x: p.omega_x.angular()?,
            omega_z: p.omega_z.angular()?,
            ion_mass: p.ion_mass_amu * AMU,
            n_ions: 2,
            wavelength: p.wavelength_m,
            beam_geometry: p.beam_geometry,
        };
        trap.validate()?;
        let spectrum = ModeSpectrum::new(&trap, [p.delta_com.angular()?, p.delta_zz.angular()?])?;
        let request = PlanRequest {
            omega_l: Complex64::new(p.omega_l.angular()?, 0.0),
            omega_d: p.omega_d.resolve(Some(self.omega_d_convention))?,
            loops: p.loops,
            mode: p.plan_mode,
            enforce_drive_ratio: p.enforce_drive_ratio,
        };
        let gamma = p.gamma.resolve(Some(self.gamma_convention))?;
        if !(gamma >= 0.0) {
            return Err(Error::Config("gamma must be non-negative".into()));
        }
        Ok(Resolved { trap, spectrum, request, gamma, raman_detuning: p.raman_detuning.angular()? })
    }
}
