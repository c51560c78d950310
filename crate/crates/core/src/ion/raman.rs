//! Two-photon Raman coupling after adiabatic elimination of the excited level.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum accepted ratio of `|Δ|` to the single-beam Rabi frequencies and `Γ`.
pub const MIN_DETUNING_RATIO: f64 = 50.0;
/// Below this ratio the model is accepted with a warning.
pub const WARN_DETUNING_RATIO: f64 = 100.0;

/// `Ω_L = −Ω₁ Ω₂* / (2Δ)`.
pub fn effective_rabi(omega1: Complex64, omega2: Complex64, delta: f64) -> Complex64 {
    -omega1 * omega2.conj() / (2.0 * delta)
}

/// Single-beam Rabi frequency `√|2ΔΩ_L|` giving `|Ω_L|` with equal beam strengths.
pub fn beam_rabi_for_detuning(omega_l_abs: f64, delta: f64) -> f64 {
    (2.0 * delta * omega_l_abs).abs().sqrt()
}

/// Light shifts `(Δε↓, Δε↑) = (−|Ω₁|²/4Δ, −|Ω₂|²/4Δ)`.
pub fn ac_stark_shifts(omega1: Complex64, omega2: Complex64, delta: f64) -> (f64, f64) {
    (-omega1.norm_sqr() / (4.0 * delta), -omega2.norm_sqr() / (4.0 * delta))
}

/// Per-ion effective scattering rates (1/s), named by `(final, initial)` level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringRates {
    /// Rayleigh from `|↓⟩`, σᶻ channel.
    pub down_down: f64,
    /// Raman `|↑⟩ → |↓⟩`, σ⁻ channel.
    pub up_down: f64,
    /// Raman `|↓⟩ → |↑⟩`, σ⁺ channel.
    pub down_up: f64,
    /// Rayleigh from `|↑⟩`, σᶻ channel.
    pub up_up: f64,
}

impl ScatteringRates {
    pub fn zero() -> Self {
        Self { down_down: 0.0, up_down: 0.0, down_up: 0.0, up_up: 0.0 }
    }

    pub fn sum(&self) -> f64 {
        self.down_down + self.up_down + self.down_up + self.up_up
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.down_down, self.up_down, self.down_up, self.up_up]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamanModel {
    /// Single-photon detuning Δ, rad/s.
    pub delta: f64,
    pub gamma_down: f64,
    pub gamma_up: f64,
    /// Ω₁,↓ coupling `|↓⟩ ↔ |e⟩`, rad/s.
    pub omega1: Complex64,
    /// Ω₂,↑ coupling `|↑⟩ ↔ |e⟩`, rad/s.
    pub omega2: Complex64,
    /// rad/m
    pub k_eff: f64,
}

impl RamanModel {
    /// Beams of equal strength `√|2ΔΩ_L|` realizing `omega_l` at detuning
    /// `delta`, with equal branching `Γ↓ = Γ↑ = Γ/2`.
    pub fn for_detuning(delta: f64, omega_l: Complex64, gamma: f64, k_eff: f64) -> Self {
        let b = beam_rabi_for_detuning(omega_l.norm(), delta);
        let omega1 = Complex64::new(b, 0.0);
        let omega2 = if b > 0.0 { -(2.0 * delta * omega_l.conj()) / b } else { Complex64::new(0.0, 0.0) };
        Self { delta, gamma_down: 0.5 * gamma, gamma_up: 0.5 * gamma, omega1, omega2, k_eff }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_down + self.gamma_up
    }

    pub fn omega_l(&self) -> Complex64 {
        effective_rabi(self.omega1, self.omega2, self.delta)
    }

    pub fn ac_stark_shifts(&self) -> (f64, f64) {
        ac_stark_shifts(self.omega1, self.omega2, self.delta)
    }

    /// Checks the far-detuned regime and equal beam strengths. Returns
    /// warnings for ratios between the minimum and the comfortable range.
    pub fn validate(&self) -> Result<Vec<String>> {
        let vals = [self.delta, self.gamma_down, self.gamma_up, self.k_eff];
        if vals.iter().any(|x| !x.is_finite()) || !self.omega1.is_finite() || !self.omega2.is_finite() {
            return Err(Error::InvalidParameter("Raman parameters must be finite".into()));
        }
        if self.delta == 0.0 {
            return Err(Error::InvalidParameter("Raman detuning must be nonzero".into()));
        }
        if self.gamma_down < 0.0 || self.gamma_up < 0.0 {
            return Err(Error::InvalidParameter("decay rates must be non-negative".into()));
        }
        let (a, b) = (self.omega1.norm(), self.omega2.norm());
        if (a - b).abs() > 1e-9 * a.max(b) {
            return Err(Error::InvalidParameter(format!(
                "beam Rabi frequencies must have equal magnitude, got {a:e} and {b:e}"
            )));
        }
        let mut warnings = Vec::new();
        for (name, x) in [("|Omega1|", a), ("Gamma", self.gamma())] {
            if x == 0.0 {
                continue;
            }
            let ratio = self.delta.abs() / x;
            if ratio < MIN_DETUNING_RATIO {
                return Err(Error::InvalidParameter(format!(
                    "|Delta|/{name} = {ratio:.1} is below {MIN_DETUNING_RATIO}"
                )));
            }
            if ratio < WARN_DETUNING_RATIO {
                warnings.push(format!("|Delta|/{name} = {ratio:.1} is below {WARN_DETUNING_RATIO}"));
            }
        }
        Ok(warnings)
    }
}

/// Rates `Γ_s |Ω|²/(4Δ² + Γ²)` of the four effective jump operators of one
/// ion, with the factor 1/2 on the two Rayleigh channels.
pub fn effective_scattering_rates(raman: &RamanModel) -> ScatteringRates {
    let g = raman.gamma();
    let d = 4.0 * raman.delta * raman.delta + g * g;
    let a1 = raman.omega1.norm_sqr() / d;
    let a2 = raman.omega2.norm_sqr() / d;
    ScatteringRates {
        down_down: 0.5 * raman.gamma_down * a1,
        up_down: raman.gamma_down * a2,
        down_up: raman.gamma_up * a1,
        up_up: 0.5 * raman.gamma_up * a2,
    }
}

/// Effective jump operators `L_s = √Γ_s |s⟩(Ω₁⟨↓| + Ω₂⟨↑|)/(2Δ − iΓ)` for
/// `s ∈ (↓, ↑)` as 2×2 matrices `[s][row][col]`, beat phases dropped.
pub fn jump_amplitudes(raman: &RamanModel) -> [[[Complex64; 2]; 2]; 2] {
    let denom = Complex64::new(2.0 * raman.delta, -raman.gamma());
    let mut l = [[[Complex64::new(0.0, 0.0); 2]; 2]; 2];
    for (s, g) in [raman.gamma_down, raman.gamma_up].into_iter().enumerate() {
        l[s][s][0] = g.sqrt() * raman.omega1 / denom;
        l[s][s][1] = g.sqrt() * raman.omega2 / denom;
    }
    l
}

/// Total photon-scattering rate out of qubit level `level` (0 = ↓, 1 = ↑):
/// `Σ_s ‖L_s |level⟩‖²`.
pub fn total_scattering_rate(raman: &RamanModel, level: usize) -> f64 {
    jump_amplitudes(raman).iter().map(|l| l[0][level].norm_sqr() + l[1][level].norm_sqr()).sum()
}
