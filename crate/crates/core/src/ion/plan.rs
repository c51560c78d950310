//! Sideband couplings, the spin-spin coupling matrix and gate timing.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::trap::ModeSpectrum;
use super::{cyclic, reference_setup};
use crate::error::{Error, Result};

/// Minimum ratio of `Ω_d` to every `|F_in|` and `δ_n`.
pub const MIN_DRIVE_RATIO: f64 = 20.0;
/// Relative tolerance on `t_g·δ_n/2π = k_n`.
pub const CLOSURE_TOL: f64 = 1e-9;

/// `F[i][n] = (i/2) η_n Ω_L M_in`.
pub fn sideband_couplings(omega_l: Complex64, spec: &ModeSpectrum) -> [[Complex64; 2]; 2] {
    let mut f = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in f.iter_mut().enumerate() {
        for (n, x) in row.iter_mut().enumerate() {
            *x = Complex64::new(0.0, 0.5) * spec.eta[n] * omega_l * spec.m[i][n];
        }
    }
    f
}

/// `J_ij = −Σ_n F_in F_jn* / (4δ_n)`.
pub fn coupling_matrix(f: &[[Complex64; 2]; 2], delta: [f64; 2]) -> [[f64; 2]; 2] {
    let mut j = [[0.0; 2]; 2];
    for (a, row) in j.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            *x = -(0..2).map(|n| (f[a][n] * f[b][n].conj()).re / (4.0 * delta[n])).sum::<f64>();
        }
    }
    j
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PlanMode {
    /// Keep `Ω_L` and report the phase it produces.
    Verify,
    /// Rescale `|Ω_L|` so the entangling phase satisfies the Bell condition.
    #[default]
    Calibrate,
}

/// Record of the `|Ω_L|` rescaling applied in calibrate mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Factor applied to `Ω_L` (and every `F_in`).
    pub scale: f64,
    /// `t_g·2J₁₂` before rescaling.
    pub literal_phase: f64,
    /// `t_g·2J₁₂` after rescaling.
    pub target_phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanRequest {
    pub omega_l: Complex64,
    /// Microwave drive, rad/s.
    pub omega_d: f64,
    /// Loop counts `[k_com, k_zz]`.
    pub loops: [u32; 2],
    pub mode: PlanMode,
    /// Reject drives weaker than [`MIN_DRIVE_RATIO`] times the other scales.
    pub enforce_drive_ratio: bool,
}

impl PlanRequest {
    /// Single-beam Rabi frequency, drive and loop counts of the reference
    /// parameter set, calibrated.
    pub fn reference_setup() -> Self {
        Self {
            omega_l: Complex64::new(reference_setup::omega_l(), 0.0),
            omega_d: cyclic(reference_setup::OMEGA_D_MHZ * 1e6),
            loops: reference_setup::LOOPS,
            mode: PlanMode::Calibrate,
            enforce_drive_ratio: true,
        }
    }
}

impl Default for PlanRequest {
    fn default() -> Self {
        Self::reference_setup()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GatePlan {
    pub spectrum: ModeSpectrum,
    /// `Ω_L` in use, after any calibration.
    pub omega_l: Complex64,
    pub f: [[Complex64; 2]; 2],
    pub omega_d: f64,
    pub loops: [u32; 2],
    /// s
    pub t_g: f64,
    /// s
    pub echo_time: f64,
    /// rad/s
    pub j: [[f64; 2]; 2],
    /// `θ = t_g·2J₁₂`, the gate implements `exp(−iθ σ₁ˣσ₂ˣ)` up to a global phase.
    pub theta: f64,
    pub calibration: Option<Calibration>,
}

impl GatePlan {
    /// `θ` reduced to `[0, 2π)`.
    pub fn theta_mod_2pi(&self) -> f64 {
        self.theta.rem_euclid(2.0 * PI)
    }

    /// Calibration scale factor, 1 in verify mode.
    pub fn scale(&self) -> f64 {
        self.calibration.map_or(1.0, |c| c.scale)
    }

    /// Largest `|F_in|`.
    pub fn max_coupling(&self) -> f64 {
        self.f.iter().flatten().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Same plan with every sideband coupling set to zero.
    pub fn without_coupling(&self) -> Self {
        let mut p = *self;
        p.f = [[Complex64::new(0.0, 0.0); 2]; 2];
        p.j = [[0.0; 2]; 2];
        p.theta = 0.0;
        p
    }

    /// Same plan with a different drive strength.
    pub fn with_drive(&self, omega_d: f64) -> Self {
        let mut p = *self;
        p.omega_d = omega_d;
        p
    }
}

/// Target of the calibration: the smallest `|θ|` with `θ ≡ π/4 (mod π)` and
/// the sign of `θ_literal`, since rescaling `|Ω_L|` cannot flip the sign of `J₁₂`.
pub fn calibration_target(literal: f64) -> f64 {
    if literal > 0.0 {
        FRAC_PI_4
    } else {
        -3.0 * FRAC_PI_4
    }
}

/// Gate time from loop closure of both modes and the resulting coupling phase.
pub fn plan_gate(spectrum: &ModeSpectrum, req: &PlanRequest) -> Result<GatePlan> {
    spectrum.validate()?;
    if req.loops.iter().any(|&k| k == 0) {
        return Err(Error::InvalidParameter("loop counts must be positive".into()));
    }
    if !(req.omega_d >= 0.0 && req.omega_d.is_finite()) || !req.omega_l.is_finite() {
        return Err(Error::InvalidParameter("drive and Rabi frequencies must be finite".into()));
    }
    let t_g = req.loops[0] as f64 * 2.0 * PI / spectrum.delta[0];
    for n in 0..2 {
        let k = t_g * spectrum.delta[n] / (2.0 * PI);
        if (k - req.loops[n] as f64).abs() > CLOSURE_TOL * req.loops[n] as f64 {
            return Err(Error::NoCommonClosure(format!(
                "mode {n} completes {k:.9} loops at t_g = {t_g:e} s, expected {}",
                req.loops[n]
            )));
        }
    }

    let f0 = sideband_couplings(req.omega_l, spectrum);
    let j0 = coupling_matrix(&f0, spectrum.delta);
    let literal = t_g * 2.0 * j0[0][1];

    let (omega_l, calibration) = match req.mode {
        PlanMode::Verify => (req.omega_l, None),
        PlanMode::Calibrate => {
            if literal == 0.0 || !literal.is_finite() {
                return Err(Error::InvalidParameter("cannot calibrate: the literal coupling phase vanishes".into()));
            }
            let target = calibration_target(literal);
            let scale = (target / literal).sqrt();
            (req.omega_l * scale, Some(Calibration { scale, literal_phase: literal, target_phase: target }))
        }
    };
    let f = sideband_couplings(omega_l, spectrum);
    let j = coupling_matrix(&f, spectrum.delta);
    let theta = match calibration {
        Some(c) => c.target_phase,
        None => literal,
    };

    let plan = GatePlan {
        spectrum: *spectrum,
        omega_l,
        f,
        omega_d: req.omega_d,
        loops: req.loops,
        t_g,
        echo_time: 0.5 * t_g,
        j,
        theta,
        calibration,
    };
    if req.enforce_drive_ratio {
        let slowest = plan.max_coupling().max(spectrum.delta[0]).max(spectrum.delta[1]);
        if req.omega_d < MIN_DRIVE_RATIO * slowest {
            return Err(Error::DriveConstraint(format!(
                "Omega_d = {:e} rad/s is less than {MIN_DRIVE_RATIO} x {slowest:e} rad/s",
                req.omega_d
            )));
        }
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ion::{cyclic, reference_setup, COM, ZIGZAG};

    fn request(mode: PlanMode) -> PlanRequest {
        PlanRequest {
            omega_l: Complex64::new(reference_setup::omega_l(), 0.0),
            omega_d: cyclic(40e6),
            loops: reference_setup::LOOPS,
            mode,
            enforce_drive_ratio: true,
        }
    }

    #[test]
    fn couplings_are_imaginary_and_mirror_symmetric() {
        let s = ModeSpectrum::reference_setup();
        let f = sideband_couplings(Complex64::new(reference_setup::omega_l(), 0.0), &s);
        for z in f.iter().flatten() {
            assert_eq!(z.re, 0.0);
        }
        assert_eq!(f[0][ZIGZAG], -f[1][ZIGZAG]);
        assert_eq!(f[0][COM], f[1][COM]);
        let expect = s.eta[COM] * reference_setup::omega_l() / (2.0 * 2f64.sqrt());
        assert!((f[0][COM].norm() / expect - 1.0).abs() < 1e-14);
        // 2π · 64.5 kHz with the tabulated η_com
        let table = reference_setup::ETA_COM * reference_setup::omega_l() / (2.0 * 2f64.sqrt());
        assert!((table / cyclic(1e3) - 64.5).abs() < 0.05);
    }

    #[test]
    fn single_mode_coupling() {
        let fv = Complex64::new(0.3, 0.4);
        let f = [[fv, Complex64::new(0.0, 0.0)], [fv, Complex64::new(0.0, 0.0)]];
        let j = coupling_matrix(&f, [2.0, 1.0]);
        assert!((j[0][1] + fv.norm_sqr() / 8.0).abs() < 1e-16);
    }

    #[test]
    fn two_mode_closed_form() {
        let s = ModeSpectrum::reference_setup();
        let ol = reference_setup::omega_l();
        let j = coupling_matrix(&sideband_couplings(Complex64::new(ol, 0.0), &s), s.delta);
        let closed = -(ol * ol / 32.0) * (s.eta[0].powi(2) / s.delta[0] - s.eta[1].powi(2) / s.delta[1]);
        assert!((j[0][1] / closed - 1.0).abs() < 1e-13);
        assert_eq!(j[0][1], j[1][0]);
        assert!((j[0][0] - j[1][1]).abs() <= 1e-15 * j[0][0].abs());
    }

    #[test]
    fn gate_time_from_closure() {
        let p = plan_gate(&ModeSpectrum::reference_setup(), &request(PlanMode::Verify)).unwrap();
        assert!((p.t_g * 1e6 - 62.99).abs() < 0.01, "t_g = {}", p.t_g);
        assert_eq!(p.echo_time, p.t_g / 2.0);
        assert!((p.t_g * p.spectrum.delta[1] / (2.0 * PI) - 16.0).abs() < 1e-12);
        assert!(p.calibration.is_none());
        assert_eq!(p.scale(), 1.0);
        // literal reference values give θ ≈ −1.004π
        assert!((p.theta / PI + 1.0037).abs() < 1e-3, "theta = {}", p.theta);
    }

    #[test]
    fn calibration_hits_target() {
        let p = plan_gate(&ModeSpectrum::reference_setup(), &request(PlanMode::Calibrate)).unwrap();
        let c = p.calibration.unwrap();
        let achieved = p.t_g * 2.0 * p.j[0][1];
        assert!((achieved / c.target_phase - 1.0).abs() < 1e-12);
        assert!(((c.target_phase - FRAC_PI_4) / PI).rem_euclid(1.0) < 1e-12);
        assert!((c.scale - 0.8644).abs() < 1e-3, "scale = {}", c.scale);
    }

    #[test]
    fn calibration_branch_follows_sign() {
        assert_eq!(calibration_target(0.1), FRAC_PI_4);
        assert_eq!(calibration_target(-0.1), -3.0 * FRAC_PI_4);
    }

    #[test]
    fn incommensurate_modes_rejected() {
        let mut s = ModeSpectrum::reference_setup();
        s.delta[1] *= 1.01;
        assert!(matches!(plan_gate(&s, &request(PlanMode::Verify)), Err(Error::NoCommonClosure(_))));
    }

    #[test]
    fn weak_drive_rejected() {
        let mut r = request(PlanMode::Calibrate);
        r.omega_d = cyclic(1e6);
        assert!(matches!(plan_gate(&ModeSpectrum::reference_setup(), &r), Err(Error::DriveConstraint(_))));
        r.enforce_drive_ratio = false;
        assert!(plan_gate(&ModeSpectrum::reference_setup(), &r).is_ok());
    }
}
