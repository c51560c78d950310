//! Local qubit and oscillator operators, and their embedding into a layout.
//!
//! Qubit basis order is `(|↓⟩, |↑⟩)` everywhere: index 0 is `|↓⟩`.

use num_traits::{One, Zero};

use super::layout::HilbertLayout;
use super::operator::Operator;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
    /// `σ⁺ = |↑⟩⟨↓|`
    Plus,
    /// `σ⁻ = |↓⟩⟨↑|`
    Minus,
}

/// Single-qubit operator in the `(|↓⟩, |↑⟩)` basis, with
/// `σᶻ = |↑⟩⟨↑| − |↓⟩⟨↓|`.
pub fn pauli<T: Real>(axis: PauliAxis) -> Operator<T> {
    let one = C::<T>::one();
    let i = C::new(T::zero(), T::one());
    let trip = match axis {
        PauliAxis::X => vec![(0, 1, one), (1, 0, one)],
        PauliAxis::Y => vec![(0, 1, i), (1, 0, -i)],
        PauliAxis::Z => vec![(0, 0, -one), (1, 1, one)],
        PauliAxis::Plus => vec![(1, 0, one)],
        PauliAxis::Minus => vec![(0, 1, one)],
    };
    let op = Operator::from_triplets(2, trip).expect("valid 2x2");
    match axis {
        PauliAxis::X | PauliAxis::Y | PauliAxis::Z => op.into_hermitian().expect("Hermitian"),
        _ => op,
    }
}

/// Truncated annihilation operator on `n_max + 1` Fock states,
/// `a|n⟩ = √n |n−1⟩`. The creation operator is its adjoint, so
/// `a†|n_max⟩ = 0`.
pub fn ladder<T: Real>(n_max: usize) -> Result<Operator<T>> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    Operator::from_triplets(n_max + 1, (1..=n_max).map(|n| (n - 1, n, C::new(T::lit(n as f64).sqrt(), T::zero()))))
}

/// Number operator `diag(0, 1, …, n_max)`.
pub fn number<T: Real>(n_max: usize) -> Operator<T> {
    let diag: Vec<C<T>> = (0..=n_max).map(|n| C::new(T::lit(n as f64), T::zero())).collect();
    Operator::diagonal(&diag).expect("valid").into_hermitian().expect("diagonal real")
}

/// Embeds `local` on factor `factor` of `layout`, identity elsewhere. The
/// result is sparse with `nnz(local) · total_dim / dim(factor)` entries.
pub fn embed<T: Real>(local: &Operator<T>, factor: usize, layout: &HilbertLayout) -> Result<Operator<T>> {
    embed_many(&[(local, factor)], layout)
}

/// Embeds a tensor product of locals acting on distinct factors.
pub fn embed_many<T: Real>(locals: &[(&Operator<T>, usize)], layout: &HilbertLayout) -> Result<Operator<T>> {
    let mut seen = vec![false; layout.n_factors()];
    for &(op, f) in locals {
        if f >= layout.n_factors() {
            return Err(Error::InvalidLayout(format!("factor {f} out of range")));
        }
        if seen[f] {
            return Err(Error::InvalidLayout(format!("factor {f} repeated")));
        }
        seen[f] = true;
        if op.dim() != layout.dim(f) {
            return Err(Error::DimensionMismatch { expected: layout.dim(f), found: op.dim() });
        }
    }
    let rows: Vec<Vec<Vec<(usize, C<T>)>>> = locals
        .iter()
        .map(|(op, _)| {
            let mut rows = vec![Vec::new(); op.dim()];
            for (r, c, v) in op.triplets() {
                rows[r].push((c, v));
            }
            rows
        })
        .collect();

    let mut trip = Vec::new();
    for i in 0..layout.total_dim() {
        // (column, value) partial products over the local factors
        let mut acc: Vec<(usize, C<T>)> = vec![(i, C::one())];
        for (k, &(_, f)) in locals.iter().enumerate() {
            let d = layout.digit(i, f);
            let stride = layout.stride(f);
            let mut next = Vec::with_capacity(acc.len() * rows[k][d].len());
            for &(j, w) in &acc {
                for &(dc, v) in &rows[k][d] {
                    next.push((j - d * stride + dc * stride, w * v));
                }
            }
            acc = next;
        }
        trip.extend(acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (i, j, v)));
    }
    let op = Operator::from_triplets(layout.total_dim(), trip)?;
    if locals.iter().all(|(o, _)| o.hermitian_flag()) {
        op.into_hermitian()
    } else {
        Ok(op)
    }
}
