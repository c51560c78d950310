//! Closed-form mode displacements under the spin-dependent force.
//!
//! For σˣ eigenvalues `s` the mode sees `H = δ a†a + f a + f* a†` with
//! `f = Σᵢ sᵢ F_in / 2`. Starting from vacuum, the state in the frame rotating
//! with `δ a†a` is `e^{iφ} |α⟩` with
//! `α(t) = (f*/δ)(1 − e^{iδt})` and `φ(t) = (|f|²/δ)(t − sin(δt)/δ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    /// s
    pub t: f64,
    pub alpha: Complex64,
    /// rad
    pub phase: f64,
}

/// Force on mode `n` in channel `s`.
pub fn channel_force(f: &[[Complex64; 2]; 2], s: (i8, i8), n: usize) -> Complex64 {
    (f[0][n] * s.0 as f64 + f[1][n] * s.1 as f64) * 0.5
}

/// `(α, φ)` of a single mode with force `f` and detuning `δ` at time `t`.
pub fn displacement(f: Complex64, delta: f64, t: f64) -> (Complex64, f64) {
    let e = Complex64::from_polar(1.0, delta * t);
    let alpha = f.conj() / delta * (Complex64::new(1.0, 0.0) - e);
    let phase = f.norm_sqr() / delta * (t - (delta * t).sin() / delta);
    (alpha, phase)
}

/// Trajectory of both modes for channel `s`, sampled at `n_samples + 1`
/// equally spaced times on `[0, t_final]`.
pub fn phase_space_trajectory(
    f: &[[Complex64; 2]; 2],
    delta: [f64; 2],
    s: (i8, i8),
    t_final: f64,
    n_samples: usize,
) -> Result<[Vec<PhaseSpacePoint>; 2]> {
    if n_samples == 0 || !(t_final >= 0.0) {
        return Err(Error::InvalidParameter("need t_final ≥ 0 and at least one sample".into()));
    }
    if delta.iter().any(|d| *d == 0.0 || !d.is_finite()) {
        return Err(Error::InvalidParameter("mode detunings must be finite and nonzero".into()));
    }
    Ok(std::array::from_fn(|n| {
        let fn_ = channel_force(f, s, n);
        (0..=n_samples)
            .map(|k| {
                let t = t_final * k as f64 / n_samples as f64;
                let (alpha, phase) = displacement(fn_, delta[n], t);
                PhaseSpacePoint { t, alpha, phase }
            })
            .collect()
    }))
}

/// Total geometric phase of channel `s` at `t`, summed over modes.
pub fn channel_geometric_phase(f: &[[Complex64; 2]; 2], delta: [f64; 2], s: (i8, i8), t: f64) -> f64 {
    (0..2).map(|n| displacement(channel_force(f, s, n), delta[n], t).1).sum()
}
