//! Single ion with the excited level kept: the Λ system driven by two Raman
//! beams, used to validate the adiabatically eliminated model.
//!
//! Basis order `(|↓⟩, |↑⟩, |e⟩)`. In the frame rotating with the mean laser
//! frequency both beams are static:
//! `H = Δ|e⟩⟨e| − δ_L|↑⟩⟨↑| + ½(Ω₁|e⟩⟨↓| + Ω₂|e⟩⟨↑| + h.c.)`,
//! with jumps `√Γ↓ |↓⟩⟨e|` and `√Γ↑ |↑⟩⟨e|`.

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::generator::{GeneralLindbladian, Generator, Lindbladian};
use crate::error::{Error, Result};
use crate::scalar::{from_c64, Real, C};
use crate::tensor::Operator;

pub const DOWN: usize = 0;
pub const UP: usize = 1;
pub const EXCITED: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaParams {
    pub omega1: Complex64,
    pub omega2: Complex64,
    /// rad/s
    pub delta: f64,
    pub gamma_down: f64,
    pub gamma_up: f64,
    /// Two-photon detuning, rad/s.
    pub delta_l: f64,
}

impl LambdaParams {
    pub fn hamiltonian<T: Real>(&self) -> Operator<T> {
        let half = |z: Complex64| from_c64::<T>(z * 0.5);
        let trip = vec![
            (EXCITED, EXCITED, C::new(T::lit(self.delta), T::zero())),
            (UP, UP, C::new(T::lit(-self.delta_l), T::zero())),
            (EXCITED, DOWN, half(self.omega1)),
            (DOWN, EXCITED, half(self.omega1.conj())),
            (EXCITED, UP, half(self.omega2)),
            (UP, EXCITED, half(self.omega2.conj())),
        ];
        Operator::from_triplets(3, trip).and_then(Operator::into_hermitian).expect("valid 3x3 Hamiltonian")
    }

    pub fn jumps<T: Real>(&self) -> Vec<Operator<T>> {
        [(DOWN, self.gamma_down), (UP, self.gamma_up)]
            .iter()
            .map(|&(to, g)| {
                Operator::from_triplets(3, [(to, EXCITED, C::new(T::lit(g.max(0.0).sqrt()), T::zero()))])
                    .expect("valid jump")
            })
            .collect()
    }

    pub fn lindbladian<T: Real>(&self) -> Result<Lindbladian<T>> {
        if self.gamma_down < 0.0 || self.gamma_up < 0.0 {
            return Err(Error::InvalidParameter("decay rates must be non-negative".into()));
        }
        Lindbladian::new(&self.hamiltonian(), &self.jumps())
    }
}

/// `exp(A)` of a dense row-major `n × n` matrix by scaling and squaring of a
/// Taylor series.
pub fn expm<T: Real>(a: &[C<T>], n: usize) -> Vec<C<T>> {
    let norm1 = (0..n).map(|c| (0..n).map(|r| a[r * n + c].norm().as_f64()).sum::<f64>()).fold(0.0, f64::max);
    let s = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = T::lit(0.5f64.powi(s as i32));
    let b: Vec<C<T>> = a.iter().map(|z| *z * scale).collect();
    let mut out = identity(n);
    let mut term = identity(n);
    for k in 1..=24 {
        term = matmul(&term, &b, n);
        let f = T::lit(1.0 / k as f64);
        term.iter_mut().for_each(|z| *z = *z * f);
        for (o, t) in out.iter_mut().zip(&term) {
            *o = *o + *t;
        }
    }
    for _ in 0..s {
        out = matmul(&out, &out, n);
    }
    out
}

fn identity<T: Real>(n: usize) -> Vec<C<T>> {
    let mut m = vec![C::zero(); n * n];
    (0..n).for_each(|i| m[i * n + i] = C::one());
    m
}

pub(crate) fn matmul<T: Real>(a: &[C<T>], b: &[C<T>], n: usize) -> Vec<C<T>> {
    let mut out = vec![C::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x.is_zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = out[i * n + j] + x * b[k * n + j];
            }
        }
    }
    out
}

/// Dense matrix of a linear generator on a buffer of length `m`, columns
/// obtained by applying it to unit vectors.
pub fn generator_matrix<T: Real>(gen: &dyn Generator<T>) -> Vec<C<T>> {
    let m = gen.len();
    let mut g = vec![C::zero(); m * m];
    let mut e = vec![C::zero(); m];
    let mut col = vec![C::zero(); m];
    for c in 0..m {
        e[c] = C::one();
        gen.apply(&e, &mut col);
        for r in 0..m {
            g[r * m + c] = col[r];
        }
        e[c] = C::zero();
    }
    g
}

/// Exact propagator `exp(h·G)` of a generator as a dense matrix.
pub fn propagator<T: Real>(gen: &dyn Generator<T>, h: f64) -> Vec<C<T>> {
    let m = gen.len();
    let g: Vec<C<T>> = generator_matrix(gen).iter().map(|z| *z * T::lit(h)).collect();
    expm(&g, m)
}

/// Density matrix of the Λ system sampled at `t_k = k·t_final/n_samples`,
/// starting in `|↓⟩`. Each sample interval is bridged by the exact
/// propagator, so the sample spacing may exceed `1/Δ`.
pub fn lambda_reference<T: Real>(p: &LambdaParams, t_final: f64, n_samples: usize) -> Result<Vec<(f64, Vec<C<T>>)>> {
    if n_samples == 0 || !(t_final > 0.0) {
        return Err(Error::InvalidParameter("need t_final > 0 and at least one sample".into()));
    }
    let l = p.lindbladian::<T>()?;
    let h = t_final / n_samples as f64;
    let u = propagator(&GeneralLindbladian(&l), h);
    let mut rho = vec![C::zero(); 9];
    rho[DOWN * 3 + DOWN] = C::one();
    let mut out = Vec::with_capacity(n_samples + 1);
    out.push((0.0, rho.clone()));
    for k in 1..=n_samples {
        let mut next = vec![C::zero(); 9];
        for (r, o) in next.iter_mut().enumerate() {
            *o = (0..9).fold(C::zero(), |acc, c| acc + u[r * 9 + c] * rho[c]);
        }
        rho = next;
        out.push((k as f64 * h, rho.clone()));
    }
    Ok(out)
}
