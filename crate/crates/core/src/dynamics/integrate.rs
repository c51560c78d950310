//! Time stepping of pure states and density matrices with an instantaneous
//! echo pulse, phonon-leakage monitoring and checkpoint probes.

use std::f64::consts::PI;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::generator::{Generator, Lindbladian, ModulatedOperator, ModulatedSchrodinger, Schrodinger};
use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use crate::tensor::state::{min_eigenvalue, sandwich, trace_of};
use crate::tensor::{HilbertLayout, Operator, QuantumState, StateData, MODE_COM, MODE_ZZ};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Classical fixed-step fourth-order Runge-Kutta.
    Rk4,
    /// Truncated Taylor series of the step propagator, with the order chosen
    /// from a norm bound so the truncation error stays below the tolerance.
    Taylor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeakagePolicy {
    /// Stop the run with [`Error::Leakage`].
    Abort,
    /// Finish the run and mark it in the report.
    Flag,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Largest step, s. The RK4 step; an upper bound for Taylor.
    pub dt: f64,
    /// Taylor truncation tolerance relative to the state norm.
    pub tolerance: f64,
    /// Largest `h·‖G‖` per Taylor step.
    pub max_phase: f64,
    pub leakage_threshold: f64,
    pub leakage_policy: LeakagePolicy,
    /// Allowed `|tr ρ − 1|` (or `|‖ψ‖² − 1|`) at the end of a run.
    pub trace_tolerance: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Taylor,
            dt: 1e-6,
            tolerance: 1e-13,
            max_phase: 4.0,
            leakage_threshold: 1e-6,
            leakage_policy: LeakagePolicy::Abort,
            trace_tolerance: 1e-8,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(dt: f64) -> Self {
        Self { method: Method::Rk4, dt, ..Self::default() }
    }

    /// `min(2π/Ω_d, 2π/ω_fast)/20`.
    pub fn reference_dt(omega_d: f64, omega_fast: f64) -> f64 {
        let fastest = omega_d.max(omega_fast);
        2.0 * PI / fastest / 20.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter("dt must be positive".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidParameter("tolerance must be in (0, 1)".into()));
        }
        if !(self.max_phase > 0.0 && self.max_phase.is_finite()) {
            return Err(Error::InvalidParameter("max_phase must be positive".into()));
        }
        if !(self.leakage_threshold > 0.0) || !(self.trace_tolerance > 0.0) {
            return Err(Error::InvalidParameter("thresholds must be positive".into()));
        }
        Ok(())
    }
}

/// Smallest order `K` with `x^{K+1}/(K+1)! ≤ tol`.
pub fn taylor_order(x: f64, tol: f64) -> usize {
    let mut term = 1.0;
    for k in 1..=400 {
        term *= x / k as f64;
        if term <= tol {
            return k - 1;
        }
    }
    400
}

/// Reusable buffers for one integration.
pub struct Stepper<T: Real> {
    bufs: [Vec<C<T>>; 4],
}

impl<T: Real> Stepper<T> {
    pub fn new(len: usize) -> Self {
        Self { bufs: std::array::from_fn(|_| vec![C::zero(); len]) }
    }

    pub fn rk4(&mut self, gen: &dyn Generator<T>, y: &mut [C<T>], h: f64) {
        let h = T::lit(h);
        let half = h * T::lit(0.5);
        let [k, tmp, acc, _] = &mut self.bufs;
        gen.apply(y, k);
        for ((a, t), (&yi, &ki)) in acc.iter_mut().zip(tmp.iter_mut()).zip(y.iter().zip(k.iter())) {
            *a = ki;
            *t = yi + ki * half;
        }
        gen.apply(tmp, k);
        for ((a, t), (&yi, &ki)) in acc.iter_mut().zip(tmp.iter_mut()).zip(y.iter().zip(k.iter())) {
            *a = *a + ki * T::lit(2.0);
            *t = yi + ki * half;
        }
        gen.apply(tmp, k);
        for ((a, t), (&yi, &ki)) in acc.iter_mut().zip(tmp.iter_mut()).zip(y.iter().zip(k.iter())) {
            *a = *a + ki * T::lit(2.0);
            *t = yi + ki * h;
        }
        gen.apply(tmp, k);
        let sixth = h / T::lit(6.0);
        for ((yi, &a), &ki) in y.iter_mut().zip(acc.iter()).zip(k.iter()) {
            *yi = *yi + (a + ki) * sixth;
        }
    }

    /// `y ← Σ_{j≤order} (hG)^j y / j!`.
    pub fn taylor(&mut self, gen: &dyn Generator<T>, y: &mut [C<T>], h: f64, order: usize) {
        let [term, next, _, _] = &mut self.bufs;
        term.copy_from_slice(y);
        for j in 1..=order {
            gen.apply(term, next);
            let f = T::lit(h / j as f64);
            for (yi, (t, &n)) in y.iter_mut().zip(term.iter_mut().zip(next.iter())) {
                *t = n * f;
                *yi = *yi + *t;
            }
        }
    }
}

/// Observable sample at a checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// s
    pub t: f64,
    /// `tr ρ` or `‖ψ‖²`.
    pub trace: f64,
    pub leakage: f64,
    /// Smallest eigenvalue of ρ, when positivity probing is on.
    pub min_eigenvalue: Option<f64>,
    /// `Re tr(O ρ)` for each probed observable.
    pub values: Vec<f64>,
}

/// What to record along a run.
#[derive(Debug, Clone, Default)]
pub struct Probes<T: Real> {
    /// Record every this many steps (0: only the final state).
    pub every: usize,
    pub observables: Vec<(String, Operator<T>)>,
    /// Compute the smallest eigenvalue of ρ at each checkpoint.
    pub positivity: bool,
}

impl<T: Real> Probes<T> {
    pub fn none() -> Self {
        Self { every: 0, observables: Vec::new(), positivity: false }
    }
}

/// Instantaneous unitary applied at `at`.
#[derive(Debug, Clone)]
pub struct Echo<T: Real> {
    /// s
    pub at: f64,
    pub unitary: Operator<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub steps: usize,
    /// Largest summed top-Fock population seen after any step.
    pub max_leakage: f64,
    pub leakage_flagged: bool,
    /// `|tr ρ − 1|` or `|‖ψ‖² − 1|` at the end.
    pub trace_drift: f64,
    /// Smallest eigenvalue over all positivity probes.
    pub min_eigenvalue: Option<f64>,
    pub checkpoints: Vec<Checkpoint>,
}

/// Factors whose top Fock level is watched: the two modes of a gate layout,
/// or the single factor of a bare oscillator.
pub fn monitored_modes(layout: &HilbertLayout) -> Vec<usize> {
    if layout.is_gate_layout() {
        vec![MODE_COM, MODE_ZZ]
    } else if layout.n_factors() == 1 && layout.dim(0) > 3 {
        vec![0]
    } else {
        Vec::new()
    }
}

struct Driver<'a, T: Real> {
    cfg: &'a IntegratorConfig,
    mixed: bool,
    dim: usize,
    top: Vec<usize>,
    probes: &'a Probes<T>,
    stepper: Stepper<T>,
    t: f64,
    report: RunReport,
}

impl<'a, T: Real> Driver<'a, T> {
    fn new(layout: &HilbertLayout, mixed: bool, cfg: &'a IntegratorConfig, probes: &'a Probes<T>) -> Result<Self> {
        cfg.validate()?;
        let dim = layout.total_dim();
        let modes = monitored_modes(layout);
        let top = (0..dim).filter(|&i| modes.iter().any(|&f| layout.digit(i, f) == layout.dim(f) - 1)).collect();
        let len = if mixed { dim * dim } else { dim };
        Ok(Self {
            cfg,
            mixed,
            dim,
            top,
            probes,
            stepper: Stepper::new(len),
            t: 0.0,
            report: RunReport {
                steps: 0,
                max_leakage: 0.0,
                leakage_flagged: false,
                trace_drift: 0.0,
                min_eigenvalue: None,
                checkpoints: Vec::new(),
            },
        })
    }

    fn leakage(&self, y: &[C<T>]) -> f64 {
        let d = self.dim;
        self.top.iter().map(|&i| if self.mixed { y[i * d + i].re.as_f64() } else { y[i].norm_sqr().as_f64() }).sum()
    }

    fn trace(&self, y: &[C<T>]) -> f64 {
        if self.mixed {
            trace_of(y, self.dim).re.as_f64()
        } else {
            y.iter().map(|z| z.norm_sqr().as_f64()).sum()
        }
    }

    fn monitor(&mut self, y: &[C<T>]) -> Result<()> {
        let leak = self.leakage(y);
        self.report.max_leakage = self.report.max_leakage.max(leak);
        if leak > self.cfg.leakage_threshold {
            match self.cfg.leakage_policy {
                LeakagePolicy::Abort => {
                    return Err(Error::Leakage {
                        population: leak,
                        threshold: self.cfg.leakage_threshold,
                        time: self.t,
                    })
                }
                LeakagePolicy::Flag => self.report.leakage_flagged = true,
            }
        }
        Ok(())
    }

    fn checkpoint(&mut self, y: &[C<T>]) -> Result<()> {
        let d = self.dim;
        let mut values = Vec::with_capacity(self.probes.observables.len());
        for (_, o) in &self.probes.observables {
            let v = if self.mixed {
                let mut tmp = vec![C::zero(); d * d];
                o.left_mul(y, &mut tmp);
                trace_of(&tmp, d).re.as_f64()
            } else {
                let mut tmp = vec![C::zero(); d];
                o.apply_vec(y, &mut tmp);
                y.iter().zip(&tmp).map(|(a, b)| (a.conj() * b).re.as_f64()).sum()
            };
            values.push(v);
        }
        let min_eig = (self.mixed && self.probes.positivity).then(|| min_eigenvalue(y, d));
        if let Some(m) = min_eig {
            self.report.min_eigenvalue = Some(self.report.min_eigenvalue.map_or(m, |x| x.min(m)));
        }
        self.report.checkpoints.push(Checkpoint {
            t: self.t,
            trace: self.trace(y),
            leakage: self.leakage(y),
            min_eigenvalue: min_eig,
            values,
        });
        Ok(())
    }

    fn advance(&mut self, gen: &dyn Generator<T>, y: &mut [C<T>], duration: f64) -> Result<()> {
        if duration <= 0.0 {
            return Ok(());
        }
        let mut n = (duration / self.cfg.dt).ceil().max(1.0) as usize;
        let bound = gen.norm_bound().as_f64();
        if self.cfg.method == Method::Taylor {
            n = n.max((duration * bound / self.cfg.max_phase).ceil() as usize);
        }
        let h = duration / n as f64;
        let tol = self.cfg.tolerance.max(4.0 * T::eps().as_f64());
        let order = taylor_order(h * bound, tol);
        let t0 = self.t;
        for k in 0..n {
            match self.cfg.method {
                Method::Rk4 => self.stepper.rk4(gen, y, h),
                Method::Taylor => self.stepper.taylor(gen, y, h, order),
            }
            self.t = t0 + (k + 1) as f64 * h;
            self.report.steps += 1;
            self.monitor(y)?;
            if self.probes.every > 0 && self.report.steps % self.probes.every == 0 {
                self.checkpoint(y)?;
            }
        }
        Ok(())
    }

    fn echo(&mut self, u: &Operator<T>, y: &mut Vec<C<T>>) {
        if self.mixed {
            *y = sandwich(u, y);
        } else {
            let mut out = vec![C::zero(); y.len()];
            u.apply_vec(y, &mut out);
            *y = out;
        }
    }

    fn finish(mut self, y: &[C<T>]) -> Result<RunReport> {
        self.checkpoint(y)?;
        self.report.trace_drift = (self.trace(y) - 1.0).abs();
        if self.report.trace_drift > self.cfg.trace_tolerance {
            return Err(Error::TraceDrift { drift: self.report.trace_drift, tolerance: self.cfg.trace_tolerance });
        }
        Ok(self.report)
    }
}

fn check_echo<T: Real>(echo: &Option<Echo<T>>, t_final: f64, dim: usize) -> Result<()> {
    if let Some(e) = echo {
        if !(e.at >= 0.0 && e.at <= t_final) {
            return Err(Error::Grid(format!("echo time {:e} outside [0, {t_final:e}]", e.at)));
        }
        if e.unitary.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: e.unitary.dim() });
        }
    }
    Ok(())
}

fn run_static<T: Real>(
    gen: &dyn Generator<T>,
    layout: &HilbertLayout,
    mut y: Vec<C<T>>,
    mixed: bool,
    t_final: f64,
    cfg: &IntegratorConfig,
    echo: Option<Echo<T>>,
    probes: &Probes<T>,
) -> Result<(Vec<C<T>>, RunReport)> {
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter("t_final must be finite and non-negative".into()));
    }
    check_echo(&echo, t_final, layout.total_dim())?;
    let mut drv = Driver::new(layout, mixed, cfg, probes)?;
    match &echo {
        Some(e) => {
            drv.advance(gen, &mut y, e.at)?;
            drv.echo(&e.unitary, &mut y);
            drv.advance(gen, &mut y, t_final - e.at)?;
        }
        None => drv.advance(gen, &mut y, t_final)?,
    }
    let report = drv.finish(&y)?;
    Ok((y, report))
}

/// Integrates the master equation from `rho0` to `t_final`, applying
/// `ρ → UρU†` at the echo time.
pub fn integrate_master<T: Real>(
    lindbladian: &Lindbladian<T>,
    rho0: &QuantumState<T>,
    t_final: f64,
    cfg: &IntegratorConfig,
    echo: Option<Echo<T>>,
    probes: &Probes<T>,
) -> Result<(QuantumState<T>, RunReport)> {
    let layout = rho0.layout().clone();
    if lindbladian.dim() != layout.total_dim() {
        return Err(Error::DimensionMismatch { expected: layout.total_dim(), found: lindbladian.dim() });
    }
    let rho = rho0.density_matrix();
    let (rho, report) = run_static(lindbladian, &layout, rho, true, t_final, cfg, echo, probes)?;
    Ok((QuantumState::from_raw(layout, StateData::Mixed(rho)), report))
}

/// Integrates `i dψ/dt = Hψ` for a static Hamiltonian.
pub fn integrate_pure<T: Real>(
    h: &Operator<T>,
    psi0: &QuantumState<T>,
    t_final: f64,
    cfg: &IntegratorConfig,
    echo: Option<Echo<T>>,
    probes: &Probes<T>,
) -> Result<(QuantumState<T>, RunReport)> {
    let layout = psi0.layout().clone();
    let StateData::Pure(psi) = psi0.data() else {
        return Err(Error::InvalidState("integrate_pure needs a state vector".into()));
    };
    if h.dim() != layout.total_dim() {
        return Err(Error::DimensionMismatch { expected: layout.total_dim(), found: h.dim() });
    }
    let gen = Schrodinger::new(h);
    let (psi, report) = run_static(&gen, &layout, psi.clone(), false, t_final, cfg, echo, probes)?;
    Ok((QuantumState::from_raw(layout, StateData::Pure(psi)), report))
}

/// Number of whole grid intervals in `t`, if `t` lies on the grid.
pub fn grid_index(t: f64, dt: f64) -> Option<usize> {
    let k = (t / dt).round();
    ((t / dt - k).abs() <= 1e-9 * k.max(1.0)).then_some(k as usize)
}

/// Integrates `i dψ/dt = (H₀ + s(t)V)ψ` with `s` held at `samples[k]` on
/// `[k·dt, (k+1)·dt)`. Both `t_final` and the echo time must be grid points.
pub fn integrate_pure_sampled<T: Real>(
    h: &ModulatedOperator<T>,
    samples: &[f64],
    sample_dt: f64,
    psi0: &QuantumState<T>,
    t_final: f64,
    cfg: &IntegratorConfig,
    echo: Option<Echo<T>>,
    probes: &Probes<T>,
) -> Result<(QuantumState<T>, RunReport)> {
    let layout = psi0.layout().clone();
    let StateData::Pure(psi) = psi0.data() else {
        return Err(Error::InvalidState("integrate_pure_sampled needs a state vector".into()));
    };
    if h.dim() != layout.total_dim() {
        return Err(Error::DimensionMismatch { expected: layout.total_dim(), found: h.dim() });
    }
    check_echo(&echo, t_final, layout.total_dim())?;
    let n = grid_index(t_final, sample_dt)
        .ok_or_else(|| Error::Grid(format!("t_final = {t_final:e} is not a multiple of dt = {sample_dt:e}")))?;
    if samples.len() < n {
        return Err(Error::Grid(format!("{} noise samples cannot cover {n} intervals", samples.len())));
    }
    let echo_k = match &echo {
        Some(e) => Some(
            grid_index(e.at, sample_dt)
                .ok_or_else(|| Error::Grid(format!("echo time {:e} is not on the noise grid", e.at)))?,
        ),
        None => None,
    };
    let mut drv = Driver::new(&layout, false, cfg, probes)?;
    let mut y = psi.clone();
    for (k, &s) in samples[..n].iter().enumerate() {
        if let (Some(ek), Some(e)) = (echo_k, &echo) {
            if ek == k {
                drv.echo(&e.unitary, &mut y);
            }
        }
        let gen = ModulatedSchrodinger { op: h, s: T::lit(s) };
        drv.advance(&gen, &mut y, sample_dt)?;
    }
    if let (Some(ek), Some(e)) = (echo_k, &echo) {
        if ek == n {
            drv.echo(&e.unitary, &mut y);
        }
    }
    let report = drv.finish(&y)?;
    Ok((QuantumState::from_raw(layout, StateData::Pure(y)), report))
}

/// Advances a raw buffer under `gen` for `duration` without monitoring.
pub fn evolve<T: Real>(gen: &dyn Generator<T>, y: &mut [C<T>], duration: f64, cfg: &IntegratorConfig) -> Result<usize> {
    cfg.validate()?;
    let mut stepper = Stepper::new(gen.len());
    let mut n = (duration / cfg.dt).ceil().max(1.0) as usize;
    let bound = gen.norm_bound().as_f64();
    if cfg.method == Method::Taylor {
        n = n.max((duration * bound / cfg.max_phase).ceil() as usize);
    }
    let h = duration / n as f64;
    let order = taylor_order(h * bound, cfg.tolerance.max(4.0 * T::eps().as_f64()));
    for _ in 0..n {
        match cfg.method {
            Method::Rk4 => stepper.rk4(gen, y, h),
            Method::Taylor => stepper.taylor(gen, y, h, order),
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;
    use crate::tensor::{ladder, number, pauli, PauliAxis};

    fn qubit() -> HilbertLayout {
        HilbertLayout::new(vec![2]).unwrap()
    }

    fn down() -> QuantumState<f64> {
        QuantumState::basis(qubit(), &[0]).unwrap()
    }

    fn plus() -> QuantumState<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        QuantumState::pure(qubit(), vec![cl(s, 0.0), cl(s, 0.0)]).unwrap()
    }

    fn rabi(omega: f64) -> Operator<f64> {
        pauli::<f64>(PauliAxis::X).scale_real(omega / 2.0)
    }

    fn rho(s: &QuantumState<f64>) -> Vec<C<f64>> {
        s.density_matrix()
    }

    fn psi(s: &QuantumState<f64>) -> Vec<C<f64>> {
        match s.data() {
            StateData::Pure(p) => p.clone(),
            StateData::Mixed(_) => panic!("expected a pure state"),
        }
    }

    fn max_diff(a: &[C<f64>], b: &[C<f64>]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn taylor_order_meets_tolerance() {
        for x in [0.1, 1.0, 4.0] {
            let k = taylor_order(x, 1e-13);
            let mut next = 1.0;
            for j in 1..=k + 1 {
                next *= x / j as f64;
            }
            assert!(next <= 1e-13);
        }
        assert_eq!(taylor_order(0.0, 1e-13), 0);
    }

    #[test]
    fn zero_generator_leaves_state() {
        let l = Lindbladian::new(&Operator::<f64>::zeros(2), &[]).unwrap();
        let (out, report) =
            integrate_master(&l, &plus(), 1.0, &IntegratorConfig::default(), None, &Probes::none()).unwrap();
        assert_eq!(rho(&out), rho(&plus()));
        assert!(report.trace_drift < 1e-15);
    }

    #[test]
    fn dephasing_decay() {
        let gamma: f64 = 0.3;
        let l = Lindbladian::new(&Operator::zeros(2), &[pauli::<f64>(PauliAxis::Z).scale_real(gamma.sqrt())]).unwrap();
        for method in [Method::Taylor, Method::Rk4] {
            let cfg = IntegratorConfig { method, dt: 1e-3, ..Default::default() };
            for t in [0.5, 2.0] {
                let (out, _) = integrate_master(&l, &plus(), t, &cfg, None, &Probes::none()).unwrap();
                let r = rho(&out);
                assert!((r[1].re - 0.5 * (-2.0 * gamma * t).exp()).abs() < 1e-10);
                assert!((r[0].re - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn amplitude_damping_decay() {
        let gamma: f64 = 0.7;
        let l =
            Lindbladian::new(&Operator::zeros(2), &[pauli::<f64>(PauliAxis::Minus).scale_real(gamma.sqrt())]).unwrap();
        let up = QuantumState::basis(qubit(), &[1]).unwrap();
        let probes = Probes { every: 100, ..Probes::none() };
        let (out, report) = integrate_master(&l, &up, 3.0, &IntegratorConfig::rk4(1e-3), None, &probes).unwrap();
        assert!((rho(&out)[3].re - (-gamma * 3.0).exp()).abs() < 1e-10);
        for c in &report.checkpoints {
            assert!((c.trace - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn rabi_period() {
        let omega = 2.0 * PI * 1e6;
        let probe = vec![("up".to_string(), pauli::<f64>(PauliAxis::Z))];
        let probes = Probes { every: 0, observables: probe, positivity: false };
        let cfg = IntegratorConfig { dt: 1e-9, ..Default::default() };
        let (half, r) = integrate_pure(&rabi(omega), &down(), PI / omega, &cfg, None, &probes).unwrap();
        assert!((psi(&half)[1].norm_sqr() - 1.0).abs() < 1e-8);
        assert!((r.checkpoints.last().unwrap().values[0] - 1.0).abs() < 1e-8);
        let (full, _) = integrate_pure(&rabi(omega), &down(), 2.0 * PI / omega, &cfg, None, &probes).unwrap();
        assert!((psi(&full)[0].norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let omega = 1.0;
        let h = rabi(omega).add(&pauli(PauliAxis::Z).scale_real(0.4)).unwrap();
        let exact = integrate_pure(&h, &down(), 3.0, &IntegratorConfig::default(), None, &Probes::none()).unwrap().0;
        let err = |dt: f64| {
            let cfg = IntegratorConfig { trace_tolerance: 1e-2, ..IntegratorConfig::rk4(dt) };
            let s = integrate_pure(&h, &down(), 3.0, &cfg, None, &Probes::none()).unwrap().0;
            max_diff(&psi(&s), &psi(&exact))
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() < 3.0, "ratio {ratio}");
    }

    #[test]
    fn pure_matches_master_without_jumps() {
        let h = rabi(2.0).add(&pauli(PauliAxis::Y).scale_real(0.3)).unwrap();
        let cfg = IntegratorConfig::default();
        let (p, _) = integrate_pure(&h, &plus(), 4.0, &cfg, None, &Probes::none()).unwrap();
        let l = Lindbladian::new(&h, &[]).unwrap();
        let (m, _) = integrate_master(&l, &plus(), 4.0, &cfg, None, &Probes::none()).unwrap();
        assert!(max_diff(&rho(&p), &rho(&m)) < 1e-8);
    }

    #[test]
    fn echo_is_applied() {
        let echo = Echo { at: 0.5, unitary: pauli::<f64>(PauliAxis::X) };
        let cfg = IntegratorConfig::default();
        let h = Operator::zeros(2);
        let (out, _) = integrate_pure(&h, &down(), 1.0, &cfg, Some(echo.clone()), &Probes::none()).unwrap();
        assert!((psi(&out)[1].norm() - 1.0).abs() < 1e-15);
        let late = Echo { at: 2.0, ..echo };
        assert!(matches!(integrate_pure(&h, &down(), 1.0, &cfg, Some(late), &Probes::none()), Err(Error::Grid(_))));
    }

    #[test]
    fn echo_refocuses_detuning() {
        let h = pauli::<f64>(PauliAxis::Z).scale_real(3.1);
        let echo = Echo { at: 0.6, unitary: pauli::<f64>(PauliAxis::X) };
        let l = Lindbladian::new(&h, &[]).unwrap();
        let (out, _) =
            integrate_master(&l, &plus(), 1.2, &IntegratorConfig::default(), Some(echo), &Probes::none()).unwrap();
        assert!(max_diff(&rho(&out), &rho(&plus())) < 1e-10);
    }

    #[test]
    fn sampled_zero_noise_matches_static() {
        let base = rabi(1.5);
        let m = ModulatedOperator::new(&base, &pauli(PauliAxis::Z)).unwrap();
        let cfg = IntegratorConfig::default();
        let samples = vec![0.0; 40];
        let echo = Echo { at: 2.0, unitary: pauli::<f64>(PauliAxis::Z) };
        let (a, _) =
            integrate_pure_sampled(&m, &samples, 0.1, &plus(), 4.0, &cfg, Some(echo.clone()), &Probes::none()).unwrap();
        let (b, _) = integrate_pure(&base, &plus(), 4.0, &cfg, Some(echo), &Probes::none()).unwrap();
        assert!(max_diff(&psi(&a), &psi(&b)) < 1e-10);
        let l = Lindbladian::new(&base, &[]).unwrap();
        let echo = Echo { at: 2.0, unitary: pauli::<f64>(PauliAxis::Z) };
        let (c, _) = integrate_master(&l, &plus(), 4.0, &cfg, Some(echo), &Probes::none()).unwrap();
        assert!(max_diff(&rho(&a), &rho(&c)) < 1e-8);
    }

    #[test]
    fn sampled_grid_is_checked() {
        let m = ModulatedOperator::new(&rabi(1.0), &pauli(PauliAxis::Z)).unwrap();
        let cfg = IntegratorConfig::default();
        let samples = vec![0.0; 10];
        let off = Echo { at: 0.55, unitary: pauli::<f64>(PauliAxis::X) };
        assert!(matches!(
            integrate_pure_sampled(&m, &samples, 0.1, &down(), 1.0, &cfg, Some(off), &Probes::none()),
            Err(Error::Grid(_))
        ));
        assert!(matches!(
            integrate_pure_sampled(&m, &samples, 0.1, &down(), 1.05, &cfg, None, &Probes::none()),
            Err(Error::Grid(_))
        ));
        assert!(matches!(
            integrate_pure_sampled(&m, &samples[..5], 0.1, &down(), 1.0, &cfg, None, &Probes::none()),
            Err(Error::Grid(_))
        ));
        assert_eq!(grid_index(0.3, 0.1), Some(3));
        assert_eq!(grid_index(0.35, 0.1), None);
    }

    #[test]
    fn constant_offset_error_is_quadratic() {
        let omega = 1.0;
        let base = rabi(omega);
        let m = ModulatedOperator::new(&base, &base).unwrap();
        let t = PI / omega;
        let n = 64;
        let cfg = IntegratorConfig::default();
        let err = |eps: f64| {
            let samples = vec![eps; n];
            let (s, _) =
                integrate_pure_sampled(&m, &samples, t / n as f64, &down(), t, &cfg, None, &Probes::none()).unwrap();
            1.0 - psi(&s)[1].norm_sqr()
        };
        let (e1, e2) = (1e-3, 1e-2);
        let slope = (err(e2) / err(e1)).ln() / (e2 / e1).ln();
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    }

    fn oscillator(n_max: usize, drive: f64) -> (HilbertLayout, Operator<f64>) {
        let layout = HilbertLayout::new(vec![n_max + 1]).unwrap();
        let a = ladder::<f64>(n_max).unwrap();
        let h = number::<f64>(n_max).add(&a.add(&a.adjoint()).unwrap().scale_real(drive)).unwrap();
        (layout, h)
    }

    #[test]
    fn energy_is_conserved() {
        let (layout, h) = oscillator(12, 0.1);
        let vac = QuantumState::basis(layout, &[0]).unwrap();
        let probes = Probes { every: 50, observables: vec![("H".into(), h.clone())], positivity: false };
        let cfg = IntegratorConfig { dt: 0.01, ..Default::default() };
        let (_, report) = integrate_pure(&h, &vac, 20.0, &cfg, None, &probes).unwrap();
        let e0 = 0.0;
        for c in &report.checkpoints {
            assert!((c.values[0] - e0).abs() < 1e-8);
        }
        assert!(report.max_leakage < 1e-6);
    }

    #[test]
    fn leakage_abort_and_flag() {
        let (layout, h) = oscillator(4, 1.0);
        let vac = QuantumState::basis(layout, &[0]).unwrap();
        let abort = IntegratorConfig { dt: 0.01, ..Default::default() };
        assert!(matches!(integrate_pure(&h, &vac, 3.0, &abort, None, &Probes::none()), Err(Error::Leakage { .. })));
        let flag = IntegratorConfig { leakage_policy: LeakagePolicy::Flag, ..abort };
        let (_, report) = integrate_pure(&h, &vac, 3.0, &flag, None, &Probes::none()).unwrap();
        assert!(report.leakage_flagged);
        assert!(report.max_leakage > flag.leakage_threshold);
    }

    #[test]
    fn positivity_probe_reports() {
        let l = Lindbladian::new(&rabi(1.0), &[pauli::<f64>(PauliAxis::Minus).scale_real(0.5)]).unwrap();
        let probes = Probes { every: 10, positivity: true, ..Probes::none() };
        let (_, report) = integrate_master(&l, &down(), 5.0, &IntegratorConfig::rk4(0.01), None, &probes).unwrap();
        assert!(report.min_eigenvalue.unwrap() >= -1e-10);
        assert_eq!(report.steps, 500);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = IntegratorConfig { dt: 0.0, ..Default::default() };
        assert!(cfg.validate().is_err());
        assert!(integrate_pure(&rabi(1.0), &down(), 1.0, &cfg, None, &Probes::none()).is_err());
        let mixed = down().to_density();
        assert!(matches!(
            integrate_pure(&rabi(1.0), &mixed, 1.0, &IntegratorConfig::default(), None, &Probes::none()),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn single_precision_runs() {
        let h = pauli::<f32>(PauliAxis::X).scale_real(0.5);
        let s = QuantumState::<f32>::basis(qubit(), &[0]).unwrap();
        let cfg = IntegratorConfig { trace_tolerance: 1e-4, ..Default::default() };
        let (out, _) = integrate_pure(&h, &s, PI, &cfg, None, &Probes::none()).unwrap();
        let StateData::Pure(p) = out.data() else { unreachable!() };
        assert!((p[1].norm_sqr() - 1.0).abs() < 1e-5);
    }
}
