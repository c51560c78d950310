//! Figures of merit and closed-form references for the geometric phase gate.

pub mod phase_space;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cl, Real, C};
use crate::tensor::state::reduce_leading;
use crate::tensor::QuantumState;

pub use phase_space::{phase_space_trajectory, PhaseSpacePoint};

/// σˣ eigenvalue signs of the four product channels `|++⟩, |+−⟩, |−+⟩, |−−⟩`.
pub const CHANNELS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum BellTarget {
    /// `(|↓↓⟩ − i|↑↑⟩)/√2`
    #[default]
    PhiMinus,
}

impl BellTarget {
    /// Amplitudes in the qubit basis `(↓↓, ↓↑, ↑↓, ↑↑)`.
    pub fn vector<T: Real>(self) -> [C<T>; 4] {
        match self {
            BellTarget::PhiMinus => [cl(FRAC_1_SQRT_2, 0.0), C::zero(), C::zero(), cl(0.0, -FRAC_1_SQRT_2)],
        }
    }
}

/// Reduced two-qubit density matrix (4×4, row-major) of a gate-layout state.
pub fn qubit_state<T: Real>(state: &QuantumState<T>) -> Result<Vec<C<T>>> {
    state.layout().ensure_gate()?;
    Ok(reduce_leading(state.data(), state.layout(), 2))
}

/// `⟨φ|ρ|φ⟩` for a 4-vector and a 4×4 matrix.
pub fn overlap<T: Real>(rho: &[C<T>], phi: &[C<T>; 4]) -> f64 {
    let mut acc = C::<T>::zero();
    for a in 0..4 {
        for b in 0..4 {
            acc = acc + phi[a].conj() * rho[a * 4 + b] * phi[b];
        }
    }
    acc.re.as_f64()
}

/// `tr((|Φ⟩⟨Φ| ⊗ 1) ρ)`, unclamped.
pub fn bell_fidelity<T: Real>(state: &QuantumState<T>, target: BellTarget) -> Result<f64> {
    Ok(overlap(&qubit_state(state)?, &target.vector()))
}

/// Fidelity clamped to `[0, 1]` for reporting.
pub fn clamp_fidelity(f: f64) -> f64 {
    f.clamp(0.0, 1.0)
}

/// `|s⟩` for σˣ eigenvalues `s = (s₁, s₂)`, with `|±⟩ = (|↓⟩ ± |↑⟩)/√2`.
pub fn x_basis_state(s: (i8, i8)) -> [Complex64; 4] {
    let one = |si: i8| [FRAC_1_SQRT_2, si as f64 * FRAC_1_SQRT_2];
    let (a, b) = (one(s.0), one(s.1));
    let mut v = [Complex64::new(0.0, 0.0); 4];
    for i in 0..2 {
        for j in 0..2 {
            v[i * 2 + j] = Complex64::new(a[i] * b[j], 0.0);
        }
    }
    v
}

/// Phase of channel `s` under `exp(−it Σ_ij J_ij σᵢˣσⱼˣ)`.
pub fn channel_phase(j: &[[f64; 2]; 2], t: f64, s: (i8, i8)) -> f64 {
    let s = [s.0 as f64, s.1 as f64];
    -t * (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).map(|(a, b)| j[a][b] * s[a] * s[b]).sum::<f64>()
}

/// `U = exp(−it Σ_ij J_ij σᵢˣσⱼˣ)` as a 4×4 row-major matrix, built from its
/// σˣ eigenbasis.
pub fn gate_unitary(j: &[[f64; 2]; 2], t: f64) -> Result<[[Complex64; 4]; 4]> {
    if (j[0][1] - j[1][0]).abs() > 1e-12 * j[0][1].abs().max(j[1][0].abs()).max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidParameter("J must be symmetric".into()));
    }
    let mut u = [[Complex64::new(0.0, 0.0); 4]; 4];
    for s in CHANNELS {
        let v = x_basis_state(s);
        let ph = Complex64::from_polar(1.0, channel_phase(j, t, s));
        for a in 0..4 {
            for b in 0..4 {
                u[a][b] += ph * v[a] * v[b].conj();
            }
        }
    }
    Ok(u)
}

/// `U ψ` for a two-qubit state.
pub fn gate_oracle(j: &[[f64; 2]; 2], t: f64, psi: &[Complex64; 4]) -> Result<[Complex64; 4]> {
    let u = gate_unitary(j, t)?;
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for a in 0..4 {
        out[a] = (0..4).map(|b| u[a][b] * psi[b]).sum();
    }
    Ok(out)
}

/// `σ₁ᶻσ₂ᶻ U ψ`: the ideal outcome of the echoed gate. The echo flips the
/// sign of the force, which leaves the geometric phase unchanged.
pub fn echoed_oracle(j: &[[f64; 2]; 2], t: f64, psi: &[Complex64; 4]) -> Result<[Complex64; 4]> {
    let mut out = gate_oracle(j, t, psi)?;
    out[1] = -out[1];
    out[2] = -out[2];
    Ok(out)
}

/// Wraps an angle to `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Channel phases relative to `|++⟩`, wrapped to `(−π, π]`.
pub fn truth_table_phases(j: &[[f64; 2]; 2], t: f64) -> [f64; 4] {
    let base = channel_phase(j, t, CHANNELS[0]);
    CHANNELS.map(|s| wrap_phase(channel_phase(j, t, s) - base))
}

/// `1 − ⟨φ|ρ|φ⟩` against a two-qubit reference state.
pub fn reduced_infidelity<T: Real>(rho_q: &[C<T>], phi: &[Complex64; 4]) -> f64 {
    let phi_t: [C<T>; 4] = phi.map(|z| cl(z.re, z.im));
    1.0 - overlap(rho_q, &phi_t)
}

/// Absolute difference of two phases on the circle.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// Times where a sampled signal crosses `level`, by linear interpolation.
pub fn crossing_times(samples: &[(f64, f64)], level: f64) -> Vec<f64> {
    samples
        .windows(2)
        .filter_map(|w| {
            let ((t0, y0), (t1, y1)) = (w[0], w[1]);
            let (a, b) = (y0 - level, y1 - level);
            (a != b && ((a <= 0.0 && b > 0.0) || (a >= 0.0 && b < 0.0))).then(|| t0 + (t1 - t0) * a / (a - b))
        })
        .collect()
}

/// Rabi frequency of `sin²(Ωt/2)` from its crossings of 1/2, which are `π/Ω`
/// apart. Least-squares slope of crossing time against index.
pub fn rabi_from_crossings(crossings: &[f64]) -> Option<f64> {
    let n = crossings.len();
    if n < 2 {
        return None;
    }
    let kbar = (n - 1) as f64 / 2.0;
    let tbar = crossings.iter().sum::<f64>() / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for (k, t) in crossings.iter().enumerate() {
        num += (k as f64 - kbar) * (t - tbar);
        den += (k as f64 - kbar).powi(2);
    }
    Some(PI * den / num)
}
