//! Transverse normal modes and Lamb-Dicke parameters of a two-ion crystal.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::{reference_setup, HBAR, MG25_MASS};
use crate::error::{Error, Result};

/// Orientation of the two Raman beams, fixing the effective wave vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum BeamGeometry {
    /// `k_eff = √2·2π/λ`
    RightAngle,
    /// `k_eff = 2·2π/λ`
    CounterPropagating,
    Custom {
        k_eff: f64,
    },
}

impl BeamGeometry {
    pub fn k_eff(self, wavelength: f64) -> f64 {
        let k = 2.0 * PI / wavelength;
        match self {
            BeamGeometry::RightAngle => SQRT_2 * k,
            BeamGeometry::CounterPropagating => 2.0 * k,
            BeamGeometry::Custom { k_eff } => k_eff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapModel {
    /// Transverse trap frequency, rad/s.
    pub omega_x: f64,
    /// Axial trap frequency, rad/s.
    pub omega_z: f64,
    /// kg
    pub ion_mass: f64,
    pub n_ions: usize,
    /// m
    pub wavelength: f64,
    pub beam_geometry: BeamGeometry,
}

impl Default for TrapModel {
    fn default() -> Self {
        Self::reference_setup()
    }
}

impl TrapModel {
    /// ²⁵Mg⁺ crystal with right-angle beams at 280 nm.
    pub fn reference_setup() -> Self {
        Self {
            omega_x: reference_setup::OMEGA_X,
            omega_z: reference_setup::OMEGA_Z,
            ion_mass: MG25_MASS,
            n_ions: 2,
            wavelength: reference_setup::WAVELENGTH,
            beam_geometry: BeamGeometry::RightAngle,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega_x, self.omega_z, self.ion_mass, self.wavelength].iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("trap parameters must be finite".into()));
        }
        if self.n_ions != 2 {
            return Err(Error::InvalidParameter(format!("only two-ion crystals are modelled, got {}", self.n_ions)));
        }
        if !(self.omega_z > 0.0 && self.omega_x > self.omega_z) {
            return Err(Error::InvalidParameter(format!(
                "need omega_x > omega_z > 0, got omega_x = {:e}, omega_z = {:e}",
                self.omega_x, self.omega_z
            )));
        }
        if self.ion_mass <= 0.0 || self.wavelength <= 0.0 {
            return Err(Error::InvalidParameter("mass and wavelength must be positive".into()));
        }
        if self.k_eff() <= 0.0 {
            return Err(Error::InvalidParameter("k_eff must be positive".into()));
        }
        Ok(())
    }

    pub fn k_eff(&self) -> f64 {
        self.beam_geometry.k_eff(self.wavelength)
    }
}

/// Transverse mode frequencies and participation amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalModes {
    /// `[ω_com, ω_zz]`, rad/s.
    pub omega: [f64; 2],
    /// `m[i][n]`: amplitude of ion `i` in mode `n`.
    pub m: [[f64; 2]; 2],
}

/// Transverse modes of two ions: COM at `ω_x`, zig-zag at `√(ω_x² − ω_z²)`.
pub fn transverse_modes(trap: &TrapModel) -> Result<NormalModes> {
    trap.validate()?;
    let wzz = (trap.omega_x * trap.omega_x - trap.omega_z * trap.omega_z).sqrt();
    Ok(NormalModes { omega: [trap.omega_x, wzz], m: [[FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2]] })
}

/// `η = k_eff·√(ħ/(2 m ω))`.
pub fn lamb_dicke(trap: &TrapModel, omega_n: f64) -> f64 {
    trap.k_eff() * (HBAR / (2.0 * trap.ion_mass * omega_n)).sqrt()
}

/// Normal modes together with their detunings from the laser beatnote.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub omega: [f64; 2],
    /// `[δ_com, δ_zz]`, rad/s.
    pub delta: [f64; 2],
    pub eta: [f64; 2],
    pub m: [[f64; 2]; 2],
}

impl ModeSpectrum {
    pub fn new(trap: &TrapModel, delta: [f64; 2]) -> Result<Self> {
        let modes = transverse_modes(trap)?;
        let eta = [lamb_dicke(trap, modes.omega[0]), lamb_dicke(trap, modes.omega[1])];
        Self::from_parts(modes, delta, eta)
    }

    pub fn from_parts(modes: NormalModes, delta: [f64; 2], eta: [f64; 2]) -> Result<Self> {
        let s = Self { omega: modes.omega, delta, eta, m: modes.m };
        s.validate()?;
        Ok(s)
    }

    /// Reference trap with `δ_com/2π = 127 kHz`, `δ_zz/2π = 254 kHz`.
    pub fn reference_setup() -> Self {
        Self::new(&TrapModel::reference_setup(), [reference_setup::delta_com(), reference_setup::delta_zz()])
            .expect("valid defaults")
    }

    pub fn validate(&self) -> Result<()> {
        for n in 0..2 {
            if !(self.delta[n] > 0.0 && self.delta[n].is_finite()) {
                return Err(Error::InvalidParameter(format!("delta[{n}] must be positive")));
            }
            if !(self.eta[n] > 0.0 && self.eta[n].is_finite()) {
                return Err(Error::InvalidParameter(format!("eta[{n}] must be positive")));
            }
            if self.delta[n] >= self.omega[n] {
                return Err(Error::InvalidParameter(format!(
                    "delta[{n}] = {:e} is not small against omega[{n}] = {:e}",
                    self.delta[n], self.omega[n]
                )));
            }
        }
        if self.orthonormality_defect() > 1e-12 {
            return Err(Error::InvalidParameter("mode amplitudes are not orthonormal".into()));
        }
        Ok(())
    }

    /// `max |Σ_i M_in M_im − δ_nm|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..2 {
            for k in 0..2 {
                let dot: f64 = (0..2).map(|i| self.m[i][n] * self.m[i][k]).sum();
                let target = if n == k { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}
