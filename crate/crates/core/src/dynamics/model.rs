//! Operators of the two-ion, two-mode gate model in the frame where the
//! driven-sideband Hamiltonian is static.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::generator::ModulatedOperator;
use crate::error::{Error, Result};
use crate::ion::{GatePlan, ScatteringRates};
use crate::scalar::{from_c64, Real, C};
use crate::tensor::{
    embed, embed_many, ladder, number, pauli, HilbertLayout, Operator, PauliAxis, QuantumState, MODE_COM, MODE_ZZ,
    QUBIT_1, QUBIT_2,
};

const QUBITS: [usize; 2] = [QUBIT_1, QUBIT_2];
const MODES: [usize; 2] = [MODE_COM, MODE_ZZ];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianKind {
    /// `Σ δ_n a†a + Σ (Ω_d/2) σˣ + Σ (F σ⁺ a + h.c.)`
    DssPrime,
    /// `Σ δ_n a†a + Σ (F σˣ a/2 + h.c.)`, the strong-drive limit.
    XForce,
    /// `Σ δ_n a†a + Σ (F σ⁺ a + h.c.)`, no carrier drive.
    Rsb,
}

/// Per-ion jump channel, named by `(final, initial)` level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelKind {
    DownDown,
    UpDown,
    DownUp,
    UpUp,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] =
        [ChannelKind::DownDown, ChannelKind::UpDown, ChannelKind::DownUp, ChannelKind::UpUp];

    pub fn axis(self) -> PauliAxis {
        match self {
            ChannelKind::DownDown | ChannelKind::UpUp => PauliAxis::Z,
            ChannelKind::UpDown => PauliAxis::Minus,
            ChannelKind::DownUp => PauliAxis::Plus,
        }
    }

    pub fn rate(self, r: &ScatteringRates) -> f64 {
        match self {
            ChannelKind::DownDown => r.down_down,
            ChannelKind::UpDown => r.up_down,
            ChannelKind::DownUp => r.down_up,
            ChannelKind::UpUp => r.up_up,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Channel<T: Real> {
    pub ion: usize,
    pub kind: ChannelKind,
    /// 1/s
    pub rate: f64,
    /// `√rate` times the embedded Pauli operator.
    pub op: Operator<T>,
}

/// The eight effective scattering channels of the two ions.
#[derive(Debug, Clone)]
pub struct DissipatorSet<T: Real> {
    pub channels: Vec<Channel<T>>,
}

impl<T: Real> DissipatorSet<T> {
    pub fn empty() -> Self {
        Self { channels: Vec::new() }
    }

    /// Jump operators for the master equation. The two σᶻ channels of an
    /// ion enter only through `L ρ L†` and `L†L`, so they are merged into one
    /// operator with the summed rate; zero-rate channels are skipped.
    pub fn jump_operators(&self, layout: &HilbertLayout) -> Result<Vec<Operator<T>>> {
        let mut out = Vec::new();
        for ion in 0..2 {
            let z: f64 =
                self.channels.iter().filter(|c| c.ion == ion && c.kind.axis() == PauliAxis::Z).map(|c| c.rate).sum();
            if z > 0.0 {
                out.push(embed(&pauli::<T>(PauliAxis::Z), QUBITS[ion], layout)?.scale_real(T::lit(z.sqrt())));
            }
            for c in self.channels.iter().filter(|c| c.ion == ion && c.kind.axis() != PauliAxis::Z) {
                if c.rate > 0.0 {
                    out.push(c.op.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn total_rate(&self) -> f64 {
        self.channels.iter().map(|c| c.rate).sum()
    }
}

/// Embedded operators of the gate layout `[2, 2, n+1, n+1]`.
#[derive(Debug, Clone)]
pub struct GateModel<T: Real> {
    layout: HilbertLayout,
    number: [Operator<T>; 2],
    sx: [Operator<T>; 2],
    sz: [Operator<T>; 2],
    /// `σ⁺_i a_n`
    sp_a: [[Operator<T>; 2]; 2],
    /// `σˣ_i a_n`
    sx_a: [[Operator<T>; 2]; 2],
}

impl<T: Real> GateModel<T> {
    pub fn new(n_max: usize) -> Result<Self> {
        let layout = HilbertLayout::gate(n_max)?;
        let a = ladder::<T>(n_max)?;
        let n = number::<T>(n_max);
        let (x, z, p) = (pauli::<T>(PauliAxis::X), pauli::<T>(PauliAxis::Z), pauli::<T>(PauliAxis::Plus));
        let emb = |op: &Operator<T>, f: usize| embed(op, f, &layout);
        let pair = |q: &Operator<T>, i: usize, m: usize| embed_many(&[(q, QUBITS[i]), (&a, MODES[m])], &layout);
        Ok(Self {
            number: [emb(&n, MODE_COM)?, emb(&n, MODE_ZZ)?],
            sx: [emb(&x, QUBIT_1)?, emb(&x, QUBIT_2)?],
            sz: [emb(&z, QUBIT_1)?, emb(&z, QUBIT_2)?],
            sp_a: [[pair(&p, 0, 0)?, pair(&p, 0, 1)?], [pair(&p, 1, 0)?, pair(&p, 1, 1)?]],
            sx_a: [[pair(&x, 0, 0)?, pair(&x, 0, 1)?], [pair(&x, 1, 0)?, pair(&x, 1, 1)?]],
            layout,
        })
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn n_max(&self) -> usize {
        self.layout.n_max().expect("gate layout")
    }

    pub fn sigma_x(&self, ion: usize) -> &Operator<T> {
        &self.sx[ion]
    }

    pub fn sigma_z(&self, ion: usize) -> &Operator<T> {
        &self.sz[ion]
    }

    pub fn number(&self, mode: usize) -> &Operator<T> {
        &self.number[mode]
    }

    /// `Σ_{i,n} (f_in σ⁺_i a_n + h.c.)`, or with `σ⁺ → σˣ/2` for the x-force.
    pub fn coupling(&self, f: &[[Complex64; 2]; 2], kind: HamiltonianKind) -> Result<Operator<T>> {
        let mut acc = Operator::zeros(self.layout.total_dim()).to_sparse();
        for i in 0..2 {
            for n in 0..2 {
                if f[i][n] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let term = match kind {
                    HamiltonianKind::XForce => self.sx_a[i][n].scale(from_c64::<T>(f[i][n] * 0.5)),
                    _ => self.sp_a[i][n].scale(from_c64::<T>(f[i][n])),
                };
                acc = acc.add(&term)?.add(&term.adjoint())?;
            }
        }
        acc.into_hermitian()
    }

    /// Static Hamiltonian of the requested kind for a gate plan.
    pub fn hamiltonian(&self, kind: HamiltonianKind, plan: &GatePlan) -> Result<Operator<T>> {
        let delta = plan.spectrum.delta;
        let mut h = self.number[0].scale_real(T::lit(delta[0])).add(&self.number[1].scale_real(T::lit(delta[1])))?;
        if kind == HamiltonianKind::DssPrime && plan.omega_d != 0.0 {
            let d = T::lit(0.5 * plan.omega_d);
            h = h.add(&self.sx[0].scale_real(d))?.add(&self.sx[1].scale_real(d))?;
        }
        h = h.add(&self.coupling(&plan.f, kind)?)?;
        h.into_hermitian()
    }

    /// Driven-sideband Hamiltonian with the sideband couplings modulated by a
    /// common-mode fluctuation `ΔΩ_L`: `ΔF_in = F_in ΔΩ_L/|Ω_L|`.
    pub fn noisy_hamiltonian(&self, plan: &GatePlan) -> Result<ModulatedOperator<T>> {
        let base = self.hamiltonian(HamiltonianKind::DssPrime, plan)?;
        let scale = plan.omega_l.norm();
        if scale == 0.0 {
            return Err(Error::InvalidParameter("noise needs a nonzero Omega_L".into()));
        }
        let mut unit = plan.f;
        unit.iter_mut().flatten().for_each(|z| *z /= scale);
        let dir = self.coupling(&unit, HamiltonianKind::DssPrime)?;
        ModulatedOperator::new(&base, &dir)
    }

    /// Effective scattering channels, identical for both ions.
    pub fn dissipators(&self, rates: &ScatteringRates) -> Result<DissipatorSet<T>> {
        let mut channels = Vec::with_capacity(8);
        for ion in 0..2 {
            for kind in ChannelKind::ALL {
                let rate = kind.rate(rates);
                if !(rate >= 0.0 && rate.is_finite()) {
                    return Err(Error::InvalidParameter(format!("rate {rate} must be non-negative")));
                }
                let op = embed(&pauli::<T>(kind.axis()), QUBITS[ion], &self.layout)?.scale_real(T::lit(rate.sqrt()));
                channels.push(Channel { ion, kind, rate, op });
            }
        }
        Ok(DissipatorSet { channels })
    }

    /// Spin-echo unitary `σ₁ᶻσ₂ᶻ`.
    pub fn echo(&self) -> Result<Operator<T>> {
        self.sz[0].matmul(&self.sz[1])?.into_hermitian()
    }

    /// `|↓↓⟩ ⊗ |0⟩ ⊗ |0⟩`.
    pub fn ground_state(&self) -> QuantumState<T> {
        QuantumState::basis(self.layout.clone(), &[0, 0, 0, 0]).expect("valid digits")
    }
}

/// Single qubit-mode element `⟨a|H|b⟩` helper for tests and diagnostics.
pub fn element<T: Real>(op: &Operator<T>, layout: &HilbertLayout, a: &[usize], b: &[usize]) -> Result<C<T>> {
    Ok(op.get(layout.index_of(a)?, layout.index_of(b)?))
}
