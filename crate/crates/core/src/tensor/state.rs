use nalgebra::{Complex as NaComplex, DMatrix};
use num_traits::{One, Zero};

use super::layout::HilbertLayout;
use super::operator::Operator;
use crate::error::{Error, Result};
use crate::scalar::{norm2, Real, C};

/// Tolerances of the state invariants.
pub const NORM_TOL: f64 = 1e-9;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const EIGEN_FLOOR: f64 = -1e-9;

/// Raw amplitudes of a state: a vector for pure states, a row-major matrix for
/// density matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum StateData<T: Real> {
    Pure(Vec<C<T>>),
    Mixed(Vec<C<T>>),
}

impl<T: Real> StateData<T> {
    pub fn as_slice(&self) -> &[C<T>] {
        match self {
            StateData::Pure(v) | StateData::Mixed(v) => v,
        }
    }
}

/// A validated pure or mixed state on a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T: Real> {
    layout: HilbertLayout,
    data: StateData<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `Aρ` or `Aψ`
    Left,
    /// `ρA`
    Right,
    /// `AρA†`, or `Aψ` for pure states
    Sandwich,
}

impl<T: Real> QuantumState<T> {
    pub fn pure(layout: HilbertLayout, psi: Vec<C<T>>) -> Result<Self> {
        if psi.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch { expected: layout.total_dim(), found: psi.len() });
        }
        let n = norm2(&psi).as_f64();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {n} differs from 1")));
        }
        Ok(Self { layout, data: StateData::Pure(psi) })
    }

    /// Density matrix; checks trace, Hermiticity and the eigenvalue floor.
    pub fn mixed(layout: HilbertLayout, rho: Vec<C<T>>) -> Result<Self> {
        let d = layout.total_dim();
        if rho.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: rho.len() });
        }
        let tr = trace_of(&rho, d);
        if (tr.re.as_f64() - 1.0).abs() > NORM_TOL || tr.im.as_f64().abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let herm = hermiticity_defect(&rho, d).as_f64();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian: {herm:e}")));
        }
        let min = min_eigenvalue(&rho, d);
        if min < EIGEN_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { layout, data: StateData::Mixed(rho) })
    }

    /// Wraps integrator output; the run report carries the invariant checks.
    pub(crate) fn from_raw(layout: HilbertLayout, data: StateData<T>) -> Self {
        Self { layout, data }
    }

    /// Product basis state `|d₀ d₁ …⟩`.
    pub fn basis(layout: HilbertLayout, digits: &[usize]) -> Result<Self> {
        let idx = layout.index_of(digits)?;
        let mut psi = vec![C::zero(); layout.total_dim()];
        psi[idx] = C::one();
        Ok(Self { layout, data: StateData::Pure(psi) })
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn data(&self) -> &StateData<T> {
        &self.data
    }

    pub fn into_data(self) -> StateData<T> {
        self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    /// `|ψ⟩⟨ψ|` for pure states; clone otherwise.
    pub fn to_density(&self) -> Self {
        match &self.data {
            StateData::Mixed(_) => self.clone(),
            StateData::Pure(psi) => Self { layout: self.layout.clone(), data: StateData::Mixed(outer(psi)) },
        }
    }

    pub fn density_matrix(&self) -> Vec<C<T>> {
        match self.to_density().data {
            StateData::Mixed(r) => r,
            StateData::Pure(_) => unreachable!(),
        }
    }

    pub fn trace(&self) -> T {
        match &self.data {
            StateData::Pure(psi) => psi.iter().map(|z| z.norm_sqr()).sum(),
            StateData::Mixed(rho) => trace_of(rho, self.layout.total_dim()).re,
        }
    }

    /// `tr(Aρ)` or `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, op: &Operator<T>) -> Result<C<T>> {
        let d = self.layout.total_dim();
        if op.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: op.dim() });
        }
        Ok(match &self.data {
            StateData::Pure(psi) => {
                let mut tmp = vec![C::zero(); d];
                op.apply_vec(psi, &mut tmp);
                psi.iter().zip(&tmp).fold(C::zero(), |a, (x, y)| a + x.conj() * y)
            }
            StateData::Mixed(rho) => {
                let mut tmp = vec![C::zero(); d * d];
                op.left_mul(rho, &mut tmp);
                trace_of(&tmp, d)
            }
        })
    }

    /// Smallest eigenvalue of the density matrix (0 for pure states).
    pub fn min_eigenvalue(&self) -> f64 {
        match &self.data {
            StateData::Pure(_) => 0.0,
            StateData::Mixed(rho) => min_eigenvalue(rho, self.layout.total_dim()),
        }
    }
}

/// Applies `op` to a state from the left, right, or as `AρA†`.
pub fn apply<T: Real>(op: &Operator<T>, state: &QuantumState<T>, side: Side) -> Result<StateData<T>> {
    let d = state.layout.total_dim();
    if op.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: op.dim() });
    }
    match (&state.data, side) {
        (StateData::Pure(psi), Side::Left | Side::Sandwich) => {
            let mut out = vec![C::zero(); d];
            op.apply_vec(psi, &mut out);
            Ok(StateData::Pure(out))
        }
        (StateData::Pure(_), Side::Right) => {
            Err(Error::InvalidState("right action is undefined on a state vector".into()))
        }
        (StateData::Mixed(rho), Side::Left) => {
            let mut out = vec![C::zero(); d * d];
            op.left_mul(rho, &mut out);
            Ok(StateData::Mixed(out))
        }
        (StateData::Mixed(rho), Side::Right) => {
            let mut out = vec![C::zero(); d * d];
            op.right_mul(rho, &mut out);
            Ok(StateData::Mixed(out))
        }
        (StateData::Mixed(rho), Side::Sandwich) => Ok(StateData::Mixed(sandwich(op, rho))),
    }
}

/// `A M A†` on a row-major matrix.
pub fn sandwich<T: Real>(op: &Operator<T>, m: &[C<T>]) -> Vec<C<T>> {
    let d = op.dim();
    let mut tmp = vec![C::zero(); d * d];
    let mut out = vec![C::zero(); d * d];
    op.left_mul(m, &mut tmp);
    op.adjoint().right_mul(&tmp, &mut out);
    out
}

pub fn outer<T: Real>(psi: &[C<T>]) -> Vec<C<T>> {
    let d = psi.len();
    let mut rho = vec![C::zero(); d * d];
    for (i, &a) in psi.iter().enumerate() {
        for (j, &b) in psi.iter().enumerate() {
            rho[i * d + j] = a * b.conj();
        }
    }
    rho
}

pub fn trace_of<T: Real>(m: &[C<T>], d: usize) -> C<T> {
    (0..d).fold(C::zero(), |a, i| a + m[i * d + i])
}

pub fn hermiticity_defect<T: Real>(m: &[C<T>], d: usize) -> T {
    let mut worst = T::zero();
    for i in 0..d {
        for j in i..d {
            worst = worst.max((m[i * d + j] - m[j * d + i].conj()).norm());
        }
    }
    worst
}

/// Smallest eigenvalue of the Hermitian part of a row-major matrix.
pub fn min_eigenvalue<T: Real>(m: &[C<T>], d: usize) -> f64 {
    let mat = DMatrix::<NaComplex<f64>>::from_fn(d, d, |i, j| {
        let a = m[i * d + j];
        let b = m[j * d + i].conj();
        let h = (a + b) * T::lit(0.5);
        NaComplex::new(h.re.as_f64(), h.im.as_f64())
    });
    mat.symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Population in the top Fock level of each listed factor, summed over the
/// factors. Works on pure amplitudes or on a density matrix diagonal.
pub fn top_level_population<T: Real>(data: &StateData<T>, layout: &HilbertLayout, factors: &[usize]) -> f64 {
    let d = layout.total_dim();
    let pop = |i: usize| -> f64 {
        match data {
            StateData::Pure(psi) => psi[i].norm_sqr().as_f64(),
            StateData::Mixed(rho) => rho[i * d + i].re.as_f64(),
        }
    };
    factors
        .iter()
        .map(|&f| {
            let top = layout.dim(f) - 1;
            (0..d).filter(|&i| layout.digit(i, f) == top).map(pop).sum::<f64>()
        })
        .sum()
}

/// Reduced density matrix on the leading `k` factors (partial trace over the
/// trailing ones).
pub fn reduce_leading<T: Real>(data: &StateData<T>, layout: &HilbertLayout, k: usize) -> Vec<C<T>> {
    let q = layout.leading_dim(k);
    let p = layout.total_dim() / q;
    let d = layout.total_dim();
    let mut red = vec![C::zero(); q * q];
    match data {
        StateData::Pure(psi) => {
            for a in 0..q {
                for b in 0..q {
                    let mut acc = C::zero();
                    for j in 0..p {
                        acc = acc + psi[a * p + j] * psi[b * p + j].conj();
                    }
                    red[a * q + b] = acc;
                }
            }
        }
        StateData::Mixed(rho) => {
            for a in 0..q {
                for b in 0..q {
                    let mut acc = C::zero();
                    for j in 0..p {
                        acc = acc + rho[(a * p + j) * d + b * p + j];
                    }
                    red[a * q + b] = acc;
                }
            }
        }
    }
    red
}
