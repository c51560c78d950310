//! Gate simulations and the sweeps built on them.

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use super::config::{ExperimentConfig, NoiseSettings, Resolved};
use super::output::{LambdaRecord, OracleRecord, SweepRecord};
use crate::analysis::{
    bell_fidelity, crossing_times, echoed_oracle, phase_distance, qubit_state, rabi_from_crossings, reduced_infidelity,
    truth_table_phases, wrap_phase, x_basis_state, BellTarget, CHANNELS,
};
use crate::dynamics::{
    integrate_master, integrate_pure, integrate_pure_sampled, lambda_reference, Echo, GateModel, HamiltonianKind,
    IntegratorConfig, LambdaParams, Lindbladian, ModulatedOperator, Probes, RunReport,
};
use crate::error::{Error, Result};
use crate::ion::{
    effective_rabi, effective_scattering_rates, total_scattering_rate, GatePlan, RamanModel, ScatteringRates,
};
use crate::scalar::{cl, Real, C};
use crate::stochastic::{mean_sem, run_ensemble, sample_path, EnsembleResult, OuParams};
use crate::tensor::{HilbertLayout, Operator, QuantumState, StateData};

/// Result of one gate run from `|↓↓⟩ ⊗ |0,0⟩`.
#[derive(Debug, Clone)]
pub struct GateOutcome<T: Real> {
    pub fidelity: f64,
    /// `1 − F(Φ⁻)`
    pub error: f64,
    pub oracle_infidelity: f64,
    pub report: RunReport,
    pub state: QuantumState<T>,
}

fn echo_for<T: Real>(model: &GateModel<T>, plan: &GatePlan) -> Result<Echo<T>> {
    Ok(Echo { at: plan.echo_time, unitary: model.echo()? })
}

fn outcome<T: Real>(state: QuantumState<T>, report: RunReport, plan: &GatePlan) -> Result<GateOutcome<T>> {
    let fidelity = bell_fidelity(&state, BellTarget::PhiMinus)?;
    let dd = [Complex64::new(1.0, 0.0), Complex64::zero(), Complex64::zero(), Complex64::zero()];
    let oracle = echoed_oracle(&plan.j, plan.t_g, &dd)?;
    let oracle_infidelity = reduced_infidelity(&qubit_state(&state)?, &oracle);
    Ok(GateOutcome { fidelity, error: 1.0 - fidelity, oracle_infidelity, report, state })
}

/// Echoed gate with Hamiltonian `kind`. Without `rates` the state stays pure;
/// with them the master equation is integrated.
pub fn simulate_gate<T: Real>(
    model: &GateModel<T>,
    plan: &GatePlan,
    kind: HamiltonianKind,
    rates: Option<&ScatteringRates>,
    cfg: &IntegratorConfig,
    probes: &Probes<T>,
) -> Result<GateOutcome<T>> {
    let h = model.hamiltonian(kind, plan)?;
    let echo = echo_for(model, plan)?;
    let psi0 = model.ground_state();
    let (state, report) = match rates {
        None => integrate_pure(&h, &psi0, plan.t_g, cfg, Some(echo), probes)?,
        Some(r) => {
            let jumps = model.dissipators(r)?.jump_operators(model.layout())?;
            let l = Lindbladian::new(&h, &jumps)?;
            integrate_master(&l, &psi0, plan.t_g, cfg, Some(echo), probes)?
        }
    };
    outcome(state, report, plan)
}

/// Noise grid `t_g/N` with `N` even and `t_g/N ≤ max_dt`, so the echo falls
/// on a grid point.
pub fn noise_grid(t_g: f64, max_dt: f64) -> Result<(f64, usize)> {
    if !(max_dt > 0.0) || !(t_g > 0.0) {
        return Err(Error::InvalidParameter("need positive gate time and noise step".into()));
    }
    let half = (t_g / (2.0 * max_dt)).ceil().max(1.0) as usize;
    let n = 2 * half;
    Ok((t_g / n as f64, n))
}

/// Pure-state gate under common-mode intensity noise.
pub struct NoisyGate<T: Real> {
    plan: GatePlan,
    op: ModulatedOperator<T>,
    echo: Operator<T>,
    psi0: QuantumState<T>,
    noise: NoiseSettings,
    cfg: IntegratorConfig,
    pub dt: f64,
    pub n_steps: usize,
}

impl<T: Real> NoisyGate<T> {
    pub fn new(model: &GateModel<T>, plan: &GatePlan, noise: &NoiseSettings, cfg: &IntegratorConfig) -> Result<Self> {
        let (dt, n_steps) = noise_grid(plan.t_g, noise.max_dt_s)?;
        Ok(Self {
            plan: *plan,
            op: model.noisy_hamiltonian(plan)?,
            echo: model.echo()?,
            psi0: model.ground_state(),
            noise: *noise,
            cfg: *cfg,
            dt,
            n_steps,
        })
    }

    pub fn ou_params(&self, zeta: f64) -> Result<OuParams> {
        OuParams::from_zeta(zeta, self.noise.tau_s, self.plan.omega_l.norm())
    }

    /// Gate with `ΔΩ_L` held at `samples[k]` on the k-th noise interval.
    pub fn run_samples(&self, samples: &[f64]) -> Result<GateOutcome<T>> {
        let echo = Echo { at: self.plan.echo_time, unitary: self.echo.clone() };
        let (state, report) = integrate_pure_sampled(
            &self.op,
            samples,
            self.dt,
            &self.psi0,
            self.plan.t_g,
            &self.cfg,
            Some(echo),
            &Probes::none(),
        )?;
        outcome(state, report, &self.plan)
    }

    /// One Ornstein-Uhlenbeck trajectory.
    pub fn trajectory(&self, zeta: f64, seed: u64) -> Result<GateOutcome<T>> {
        let path = sample_path(&self.ou_params(zeta)?, self.plan.t_g, self.dt, seed, self.noise.start)?;
        self.run_samples(&path.values)
    }

    pub fn ensemble(&self, zeta: f64, n_traj: usize, master_seed: u64) -> Result<EnsembleResult> {
        self.ou_params(zeta)?;
        run_ensemble(|_, seed| self.trajectory(zeta, seed).map(|o| o.fidelity), n_traj, master_seed)
    }
}

fn record(config: &ExperimentConfig, plan: &GatePlan, variable: &str, value: f64) -> SweepRecord {
    SweepRecord {
        experiment: config.experiment.name().into(),
        variable: variable.into(),
        value,
        error: f64::NAN,
        sem: f64::NAN,
        oracle_infidelity: f64::NAN,
        reference_error: f64::NAN,
        max_leakage: f64::NAN,
        leakage_flagged: false,
        n_max: config.n_max,
        dt: config.integrator.dt,
        seed: config.master_seed,
        calibration_scale: plan.scale(),
        n_trajectories: 1,
        status: "ok".into(),
    }
}

fn fill<T: Real>(mut r: SweepRecord, o: &GateOutcome<T>) -> SweepRecord {
    r.error = o.error;
    r.oracle_infidelity = o.oracle_infidelity;
    r.max_leakage = o.report.max_leakage;
    r.leakage_flagged = o.report.leakage_flagged;
    r
}

fn failed(mut r: SweepRecord, e: &Error) -> SweepRecord {
    r.status = format!("failed: {e}");
    r
}

fn setup(config: &ExperimentConfig) -> Result<(Resolved, GatePlan, GateModel<f64>)> {
    config.validate()?;
    let resolved = config.resolve()?;
    let plan = resolved.plan()?;
    let model = GateModel::new(config.n_max)?;
    Ok((resolved, plan, model))
}

/// Single gate run; photon scattering at the configured Raman detuning when
/// `physics.dissipation` is set.
pub fn run_gate(config: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    let (resolved, plan, model) = setup(config)?;
    let (variable, value, rates) = if config.physics.dissipation {
        let raman = resolved.raman(&plan, resolved.raman_detuning);
        ("raman_detuning_rad_per_s", resolved.raman_detuning, Some(effective_scattering_rates(&raman)))
    } else {
        ("none", f64::NAN, None)
    };
    let o =
        simulate_gate(&model, &plan, HamiltonianKind::DssPrime, rates.as_ref(), &config.integrator, &Probes::none())?;
    Ok(vec![fill(record(config, &plan, variable, value), &o)])
}

/// Gate error against Raman detuning at fixed `Ω_L`, with
/// `|Ω₁| = |Ω₂| = √|2ΔΩ_L|`. The reference error is the same gate with
/// `Γ = 0`. Failed points are recorded and the sweep continues.
pub fn run_scatter_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    let (resolved, plan, model) = setup(config)?;
    let baseline = simulate_gate(&model, &plan, HamiltonianKind::DssPrime, None, &config.integrator, &Probes::none())?;
    let deltas = config.delta_grid.iter().map(|d| d.angular()).collect::<Result<Vec<_>>>()?;
    let rows = deltas
        .par_iter()
        .map(|&delta| {
            let mut r = record(config, &plan, "raman_detuning_rad_per_s", delta);
            r.reference_error = baseline.error;
            let rates = effective_scattering_rates(&resolved.raman(&plan, delta));
            match simulate_gate(
                &model,
                &plan,
                HamiltonianKind::DssPrime,
                Some(&rates),
                &config.integrator,
                &Probes::none(),
            ) {
                Ok(o) => fill(r, &o),
                Err(e) => failed(r, &e),
            }
        })
        .collect();
    Ok(rows)
}

/// Ensemble-averaged gate error against relative intensity-noise amplitude.
/// `ζ = 0` is deterministic and runs a single trajectory.
pub fn run_intensity_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    let (_, plan, model) = setup(config)?;
    let gate = NoisyGate::new(&model, &plan, &config.noise, &config.integrator)?;
    let noiseless = gate.run_samples(&vec![0.0; gate.n_steps])?;
    let mut rows = Vec::with_capacity(config.zeta_grid.len());
    for &zeta in &config.zeta_grid {
        let mut r = record(config, &plan, "zeta", zeta);
        r.dt = gate.dt;
        r.reference_error = noiseless.error;
        let n_traj = if zeta == 0.0 { 1 } else { config.n_trajectories };
        match gate.ensemble(zeta, n_traj, config.master_seed) {
            Ok(e) => {
                r.error = e.mean_error;
                r.sem = e.sem;
                r.n_trajectories = e.n_trajectories;
            }
            Err(e) => r = failed(r, &e),
        }
        rows.push(r);
    }
    Ok(rows)
}

/// Λ-system parameters for one `Δ/|Ω₁|`: equal beams with `Γ = 0` for the
/// Rabi comparison, and a single beam with decay for the scattering rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSetup {
    pub ratio: f64,
    /// rad/s
    pub delta: f64,
    /// rad/s
    pub omega: f64,
    /// 1/s
    pub gamma: f64,
}

impl LambdaSetup {
    /// `Δ = 20Γ` keeps `Γ ≪ Δ`; without decay `Δ = 2π·1 GHz`.
    pub fn new(ratio: f64, gamma: f64) -> Result<Self> {
        if !(ratio > 0.0) || !(gamma >= 0.0) {
            return Err(Error::InvalidParameter("need a positive ratio and non-negative gamma".into()));
        }
        let delta = if gamma > 0.0 { 20.0 * gamma } else { 2.0 * std::f64::consts::PI * 1e9 };
        Ok(Self { ratio, delta, omega: delta / ratio, gamma })
    }

    pub fn coherent(&self) -> LambdaParams {
        LambdaParams {
            omega1: Complex64::new(self.omega, 0.0),
            omega2: Complex64::new(-self.omega, 0.0),
            delta: self.delta,
            gamma_down: 0.0,
            gamma_up: 0.0,
            delta_l: 0.0,
        }
    }

    pub fn pumping(&self, gamma: f64) -> LambdaParams {
        LambdaParams {
            omega1: Complex64::new(self.omega, 0.0),
            omega2: Complex64::zero(),
            delta: self.delta,
            gamma_down: 0.5 * gamma,
            gamma_up: 0.5 * gamma,
            delta_l: 0.0,
        }
    }
}

fn pop(rho: &[C<f64>], i: usize) -> f64 {
    rho[i * 3 + i].re
}

/// `(Γ·⟨P_e/P↓⟩, −d ln P↓/dt)` over `[T, 2T]` with `T = 20/Γ`, after the
/// switch-on transient has decayed. Without decay `T = 1000/Δ`.
fn fit_rates(p: &LambdaParams) -> Result<(f64, f64)> {
    let gamma = p.gamma_down + p.gamma_up;
    let horizon = if gamma > 0.0 { 20.0 / gamma } else { 1000.0 / p.delta.abs() };
    let traj = lambda_reference::<f64>(p, 2.0 * horizon, 400)?;
    let window: Vec<_> = traj.iter().filter(|(t, _)| *t >= horizon * (1.0 - 1e-12)).collect();
    let (ratio, _) = mean_sem(window.iter().map(|(_, r)| pop(r, 2) / pop(r, 0)));
    let ((t0, r0), (t1, r1)) = (window[0], window[window.len() - 1]);
    let pumping = -(pop(r1, 0).ln() - pop(r0, 0).ln()) / (t1 - t0);
    Ok((gamma * ratio, pumping))
}

/// Compares the Λ system with its adiabatically eliminated model.
pub fn lambda_point(setup: &LambdaSetup) -> Result<LambdaRecord> {
    let p = setup.coherent();
    let rabi_effective = effective_rabi(p.omega1, p.omega2, p.delta).norm();
    let periods = 4.0;
    let traj = lambda_reference::<f64>(&p, periods * 2.0 * std::f64::consts::PI / rabi_effective, 8000)?;
    let up: Vec<(f64, f64)> = traj.iter().map(|(t, r)| (*t, pop(r, 1))).collect();
    let rabi_measured = rabi_from_crossings(&crossing_times(&up, 0.5))
        .ok_or_else(|| Error::InvalidState("no Rabi oscillation resolved".into()))?;

    // bright-state splitting sets the fast excited-state oscillation
    let omega_b2 = p.omega1.norm_sqr() + p.omega2.norm_sqr();
    let fast = (p.delta * p.delta + omega_b2).sqrt();
    let n_fast = 64;
    let fine = lambda_reference::<f64>(&p, 20.0 * 2.0 * std::f64::consts::PI / fast, 20 * n_fast)?;
    let pe: Vec<f64> = fine.iter().map(|(_, r)| pop(r, 2)).collect();
    let peak_excited = pe.iter().copied().fold(0.0, f64::max);
    let mean_excited = pe[..pe.len() - 1].iter().sum::<f64>() / (pe.len() - 1) as f64;
    let excited_bound = 2.0 * (p.omega1.norm() / (2.0 * p.delta)).powi(2);

    let decaying = setup.pumping(setup.gamma);
    let raman = RamanModel {
        delta: decaying.delta,
        gamma_down: decaying.gamma_down,
        gamma_up: decaying.gamma_up,
        omega1: decaying.omega1,
        omega2: decaying.omega2,
        k_eff: 0.0,
    };
    let rate_effective = total_scattering_rate(&raman, 0);
    let pumping_effective = effective_scattering_rates(&raman).down_up;
    let (rate_fit, pumping_fit) = fit_rates(&decaying)?;
    let (rate_fit_no_decay, _) = fit_rates(&setup.pumping(0.0))?;
    let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { (a - b).abs() / b.abs() };
    Ok(LambdaRecord {
        ratio: setup.ratio,
        rabi_effective,
        rabi_measured,
        rabi_deviation: rel(rabi_measured, rabi_effective),
        peak_excited,
        mean_excited,
        excited_bound,
        rate_effective,
        rate_fit,
        rate_deviation: rel(rate_fit, rate_effective),
        rate_fit_no_decay,
        pumping_effective,
        pumping_fit,
    })
}

pub fn run_lambda_check(config: &ExperimentConfig) -> Result<Vec<LambdaRecord>> {
    config.validate()?;
    let gamma = config.resolve()?.gamma;
    config.ratio_grid.par_iter().map(|&r| lambda_point(&LambdaSetup::new(r, gamma)?)).collect()
}

/// Starts the gate in `|s₁s₂⟩_x ⊗ |0,0⟩`.
fn x_channel_state<T: Real>(layout: &HilbertLayout, s: (i8, i8)) -> Result<QuantumState<T>> {
    let p = layout.total_dim() / 4;
    let mut psi = vec![C::<T>::zero(); layout.total_dim()];
    for (a, z) in x_basis_state(s).iter().enumerate() {
        psi[a * p] = cl(z.re, z.im);
    }
    QuantumState::pure(layout.clone(), psi)
}

/// Phase of `(⟨s| ⊗ ⟨0,0|) σ₁ᶻσ₂ᶻ ψ`, which the ideal echoed gate maps to the
/// channel phase of the closed-form unitary, and its squared modulus.
fn channel_amplitude<T: Real>(state: &QuantumState<T>, echo: &Operator<T>, s: (i8, i8)) -> Result<Complex64> {
    let StateData::Pure(psi) = state.data() else {
        return Err(Error::InvalidState("channel phases need a pure state".into()));
    };
    let mut z = vec![C::<T>::zero(); psi.len()];
    echo.apply_vec(psi, &mut z);
    let p = psi.len() / 4;
    let v = x_basis_state(s);
    Ok((0..4).map(|a| v[a].conj() * Complex64::new(z[a * p].re.as_f64(), z[a * p].im.as_f64())).sum())
}

/// Truth-table phases of the full driven simulation against the closed form.
pub fn oracle_phases<T: Real>(
    model: &GateModel<T>,
    plan: &GatePlan,
    cfg: &IntegratorConfig,
) -> Result<Vec<OracleRecord>> {
    let h = model.hamiltonian(HamiltonianKind::DssPrime, plan)?;
    let echo = model.echo()?;
    let amps = CHANNELS
        .iter()
        .map(|&s| {
            let psi0 = x_channel_state(model.layout(), s)?;
            let (psi, _) = integrate_pure(&h, &psi0, plan.t_g, cfg, Some(echo_for(model, plan)?), &Probes::none())?;
            channel_amplitude(&psi, &echo, s)
        })
        .collect::<Result<Vec<_>>>()?;
    let oracle = truth_table_phases(&plan.j, plan.t_g);
    let base = amps[0].arg();
    Ok(CHANNELS
        .iter()
        .zip(amps)
        .zip(oracle)
        .map(|((s, a), o)| {
            let sim = wrap_phase(a.arg() - base);
            let sign = |x: i8| if x > 0 { '+' } else { '-' };
            OracleRecord {
                channel: format!("{}{}", sign(s.0), sign(s.1)),
                oracle_phase: o,
                simulated_phase: sim,
                deviation: phase_distance(sim, o),
                population: a.norm_sqr(),
            }
        })
        .collect())
}

pub fn run_oracle_check(config: &ExperimentConfig) -> Result<Vec<OracleRecord>> {
    let (_, plan, model) = setup(config)?;
    oracle_phases(&model, &plan, &config.integrator)
}
