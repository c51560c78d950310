//! Trap, laser and gate-planning parameters for a two-ion crystal driven by
//! stimulated Raman transitions.
//!
//! Every stored frequency is angular (rad/s) and every rate is in 1/s. Cyclic
//! inputs are converted once through [`Convention`].

pub mod plan;
pub mod raman;
pub mod trap;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use plan::{
    calibration_target, coupling_matrix, plan_gate, sideband_couplings, Calibration, GatePlan, PlanMode, PlanRequest,
};
pub use raman::{
    ac_stark_shifts, beam_rabi_for_detuning, effective_rabi, effective_scattering_rates, jump_amplitudes,
    total_scattering_rate, RamanModel, ScatteringRates,
};
pub use trap::{lamb_dicke, transverse_modes, BeamGeometry, ModeSpectrum, NormalModes, TrapModel};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Atomic mass unit used for the ion mass, kg.
pub const AMU: f64 = 1.6605e-27;
/// Mass of a ²⁵Mg⁺ ion, kg.
pub const MG25_MASS: f64 = 25.0 * AMU;

/// Mode index of the centre-of-mass mode.
pub const COM: usize = 0;
/// Mode index of the zig-zag mode.
pub const ZIGZAG: usize = 1;

/// How a bare frequency-like number in MHz is turned into an angular
/// frequency or rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// The number is `x/2π`, so the stored value is `2π·x`.
    #[default]
    Cyclic,
    /// The number is already angular (or a plain rate).
    Angular,
}

impl Convention {
    pub fn from_mhz(self, mhz: f64) -> f64 {
        match self {
            Convention::Cyclic => 2.0 * PI * mhz * 1e6,
            Convention::Angular => mhz * 1e6,
        }
    }

    pub fn to_mhz(self, value: f64) -> f64 {
        match self {
            Convention::Cyclic => value / (2.0 * PI * 1e6),
            Convention::Angular => value / 1e6,
        }
    }
}

/// `2π·hz`.
#[inline]
pub fn cyclic(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// Values of the reference setup.
pub mod reference_setup {
    use super::cyclic;

    pub const OMEGA_Z: f64 = 2.0 * std::f64::consts::PI * 1e6;
    pub const OMEGA_X: f64 = 2.0 * std::f64::consts::PI * 4e6;
    pub const WAVELENGTH: f64 = 280e-9;
    pub const GAMMA_MHZ: f64 = 43.0;
    pub const OMEGA_D_MHZ: f64 = 40.0;
    pub const ETA_COM: f64 = 0.225;
    pub const ETA_ZZ: f64 = 0.229;
    pub const LOOPS: [u32; 2] = [8, 16];

    pub fn delta_com() -> f64 {
        cyclic(127e3)
    }

    pub fn delta_zz() -> f64 {
        cyclic(254e3)
    }

    pub fn omega_l() -> f64 {
        cyclic(811e3)
    }
}
