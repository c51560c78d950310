//! Ornstein-Uhlenbeck intensity noise and trajectory ensembles.
//!
//! The process `x(t) = ΔΩ_L(t)` has zero mean, correlation time `τ` and
//! stationary variance `cτ/2`. Paths are generated with the exact update
//! `x' = x e^{−dt/τ} + √((cτ/2)(1 − e^{−2dt/τ})) n`, `n ~ N(0, 1)`, drawn from
//! a ChaCha8 stream seeded per path.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Correlation time used for the intensity-noise studies, s.
pub const DEFAULT_TAU: f64 = 5e-6;
/// Largest allowed `dt/τ`.
pub const MAX_DT_OVER_TAU: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuParams {
    /// Diffusion constant, rad²/s³.
    pub c: f64,
    /// Correlation time, s.
    pub tau: f64,
    /// Relative amplitude `ζ = √(cτ/2)/Ω_L`.
    pub zeta: f64,
    /// rad/s
    pub omega_l_ref: f64,
}

impl OuParams {
    /// `c = 2ζ²Ω_L²/τ`. `ζ = 0` gives a noiseless process.
    pub fn from_zeta(zeta: f64, tau: f64, omega_l_ref: f64) -> Result<Self> {
        if !(zeta >= 0.0 && zeta.is_finite()) {
            return Err(Error::InvalidParameter("zeta must be finite and non-negative".into()));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter("tau must be positive".into()));
        }
        if !(omega_l_ref > 0.0 && omega_l_ref.is_finite()) {
            return Err(Error::InvalidParameter("omega_l_ref must be positive".into()));
        }
        Ok(Self { c: 2.0 * zeta * zeta * omega_l_ref * omega_l_ref / tau, tau, zeta, omega_l_ref })
    }

    /// `cτ/2`, rad²/s².
    pub fn stationary_variance(&self) -> f64 {
        self.c * self.tau / 2.0
    }

    /// `Var x(t)` for a process started at zero.
    pub fn variance_from_zero(&self, t: f64) -> f64 {
        self.stationary_variance() * (1.0 - (-2.0 * t / self.tau).exp())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !(self.c >= 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidParameter("need tau > 0 and c ≥ 0".into()));
        }
        Ok(())
    }
}

/// Exact OU update over `dt` with standard normal draw `n`.
pub fn ou_step(x: f64, dt: f64, p: &OuParams, n: f64) -> f64 {
    let decay = (-dt / p.tau).exp();
    x * decay + (p.stationary_variance() * (1.0 - decay * decay)).sqrt() * n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PathStart {
    /// `x(0) = 0`.
    #[default]
    Zero,
    /// `x(0) ~ N(0, cτ/2)`.
    Stationary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuPath {
    pub seed: u64,
    /// s
    pub dt: f64,
    pub start: PathStart,
    /// `x(k·dt)`, rad/s.
    pub values: Vec<f64>,
}

impl OuPath {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|k| k as f64 * self.dt)
    }

    /// `t,delta_omega_l` rows for diagnostics.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t_s,delta_omega_l_rad_per_s\n");
        for (t, x) in self.times().zip(&self.values) {
            s.push_str(&format!("{t:.17e},{x:.17e}\n"));
        }
        s
    }
}

/// Samples `x` on `k·dt` for `k = 0..=⌈t_final/dt⌉`.
pub fn sample_path(p: &OuParams, t_final: f64, dt: f64, seed: u64, start: PathStart) -> Result<OuPath> {
    p.validate()?;
    if !(dt > 0.0) || !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidParameter("need dt > 0 and finite t_final ≥ 0".into()));
    }
    if dt > MAX_DT_OVER_TAU * p.tau * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "noise step {dt:e} s exceeds tau/100 = {:e} s",
            MAX_DT_OVER_TAU * p.tau
        )));
    }
    let n = (t_final / dt - 1e-9).ceil().max(0.0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut values = Vec::with_capacity(n + 1);
    let mut x = match start {
        PathStart::Zero => 0.0,
        PathStart::Stationary => p.stationary_variance().sqrt() * draw(),
    };
    values.push(x);
    for _ in 0..n {
        x = ou_step(x, dt, p, draw());
        values.push(x);
    }
    Ok(OuPath { seed, dt, start, values })
}

/// Per-trajectory seed: SplitMix64 finalizer applied to
/// `master + (k + 1)·0x9E3779B97F4A7C15`.
pub fn derive_seed(master: u64, k: u64) -> u64 {
    let mut z = master.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub n_trajectories: usize,
    pub fidelities: Vec<f64>,
    /// Mean of `1 − F`.
    pub mean_error: f64,
    /// Sample standard deviation of `1 − F` over `√n`; zero for `n = 1`.
    pub sem: f64,
    pub master_seed: u64,
}

impl EnsembleResult {
    /// Statistics reduced in index order.
    pub fn from_fidelities(master_seed: u64, fidelities: Vec<f64>) -> Self {
        let (mean_error, sem) = mean_sem(fidelities.iter().map(|f| 1.0 - f));
        Self { n_trajectories: fidelities.len(), fidelities, mean_error, sem, master_seed }
    }
}

/// Mean and standard error of the mean, accumulated in iteration order. A
/// constant sample has exactly zero error.
pub fn mean_sem(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let first = xs.clone().next().unwrap_or(0.0);
    if xs.clone().all(|x| x == first) {
        return (first, 0.0);
    }
    let mean = xs.clone().sum::<f64>() / n as f64;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs `runner(k, seed_k)` for `k < n_traj`, possibly concurrently, and
/// reduces the fidelities in index order. The first failing index aborts the
/// ensemble.
pub fn run_ensemble<F>(runner: F, n_traj: usize, master_seed: u64) -> Result<EnsembleResult>
where
    F: Fn(usize, u64) -> Result<f64> + Sync,
{
    if n_traj == 0 {
        return Err(Error::InvalidParameter("need at least one trajectory".into()));
    }
    let results: Vec<Result<f64>> = (0..n_traj)
        .into_par_iter()
        .map(|k| {
            let seed = derive_seed(master_seed, k as u64);
            runner(k, seed).map_err(|e| Error::Trajectory { index: k, seed, source: Box::new(e) })
        })
        .collect();
    let fidelities = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EnsembleResult::from_fidelities(master_seed, fidelities))
}
