//! Linear right-hand sides `dy/dt = G y` for state vectors and density
//! matrices.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use crate::tensor::{Csr, Operator};

/// Linear generator of the equation of motion on a flat complex buffer.
pub trait Generator<T: Real>: Sync {
    /// Length of the buffer the generator acts on.
    fn len(&self) -> usize;

    /// `out = G y`.
    fn apply(&self, y: &[C<T>], out: &mut [C<T>]);

    /// Upper bound on the induced 2-norm (Frobenius norm for matrices) of `G`.
    fn norm_bound(&self) -> T;
}

#[inline]
fn times_minus_i<T: Real>(z: C<T>) -> C<T> {
    C::new(z.im, -z.re)
}

/// `dψ/dt = −iHψ`.
pub struct Schrodinger<T: Real> {
    h: Csr<T>,
    dim: usize,
    bound: T,
}

impl<T: Real> Schrodinger<T> {
    pub fn new(h: &Operator<T>) -> Self {
        Self { h: h.to_csr(), dim: h.dim(), bound: h.norm_bound() }
    }
}

impl<T: Real> Generator<T> for Schrodinger<T> {
    fn len(&self) -> usize {
        self.dim
    }

    fn apply(&self, y: &[C<T>], out: &mut [C<T>]) {
        self.h.mul_vec(y, out);
        out.iter_mut().for_each(|z| *z = times_minus_i(*z));
    }

    fn norm_bound(&self) -> T {
        self.bound
    }
}

/// `H(s) = H₀ + s·V` stored on one sparsity pattern, so that a scalar
/// modulation costs no rebuild.
#[derive(Debug, Clone)]
pub struct ModulatedOperator<T: Real> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    base: Vec<C<T>>,
    dir: Vec<C<T>>,
    base_bound: T,
    dir_bound: T,
}

impl<T: Real> ModulatedOperator<T> {
    pub fn new(base: &Operator<T>, dir: &Operator<T>) -> Result<Self> {
        if base.dim() != dir.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: dir.dim() });
        }
        let dim = base.dim();
        let mut rows: Vec<Vec<(usize, C<T>, C<T>)>> = vec![Vec::new(); dim];
        for (r, c, v) in base.triplets() {
            rows[r].push((c, v, C::zero()));
        }
        for (r, c, v) in dir.triplets() {
            match rows[r].iter_mut().find(|e| e.0 == c) {
                Some(e) => e.2 = v,
                None => rows[r].push((c, C::zero(), v)),
            }
        }
        let mut row_ptr = vec![0];
        let (mut cols, mut b, mut d) = (Vec::new(), Vec::new(), Vec::new());
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (c, x, y) in row {
                cols.push(c);
                b.push(x);
                d.push(y);
            }
            row_ptr.push(cols.len());
        }
        Ok(Self { dim, row_ptr, cols, base: b, dir: d, base_bound: base.norm_bound(), dir_bound: dir.norm_bound() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out = (H₀ + sV) x`.
    #[inline]
    pub fn apply(&self, s: T, x: &[C<T>], out: &mut [C<T>]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc = acc + (self.base[k] + self.dir[k] * s) * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn norm_bound(&self, s: T) -> T {
        self.base_bound + s.abs() * self.dir_bound
    }

    /// `H₀ + sV` as a standalone operator.
    pub fn at(&self, s: T) -> Result<Operator<T>> {
        let mut trip = Vec::with_capacity(self.cols.len());
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                trip.push((r, self.cols[k], self.base[k] + self.dir[k] * s));
            }
        }
        Operator::from_triplets(self.dim, trip)
    }
}

/// Schrödinger generator of a [`ModulatedOperator`] at a fixed modulation.
pub struct ModulatedSchrodinger<'a, T: Real> {
    pub op: &'a ModulatedOperator<T>,
    pub s: T,
}

impl<T: Real> Generator<T> for ModulatedSchrodinger<'_, T> {
    fn len(&self) -> usize {
        self.op.dim
    }

    fn apply(&self, y: &[C<T>], out: &mut [C<T>]) {
        self.op.apply(self.s, y, out);
        out.iter_mut().for_each(|z| *z = times_minus_i(*z));
    }

    fn norm_bound(&self) -> T {
        self.op.norm_bound(self.s)
    }
}

/// `dρ/dt = −i[H, ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})` on a row-major
/// density matrix.
///
/// [`Generator::apply`] assumes a Hermitian argument and evaluates
/// `X = H_eff ρ` with `H_eff = H − (i/2)Σ L†L`, then `−iX + iX† + Σ LρL†`.
/// [`Lindbladian::apply_general`] makes no such assumption.
#[derive(Debug, Clone)]
pub struct Lindbladian<T: Real> {
    dim: usize,
    h_eff: Operator<T>,
    h_eff_csr: Csr<T>,
    h_eff_adj: Operator<T>,
    jumps: Vec<Csr<T>>,
    bound: T,
}

impl<T: Real> Lindbladian<T> {
    /// Jump operators that are identically zero are dropped.
    pub fn new(h: &Operator<T>, jumps: &[Operator<T>]) -> Result<Self> {
        let dim = h.dim();
        let mut h_eff = h.to_sparse();
        let mut kept = Vec::new();
        let mut bound = T::zero();
        for l in jumps {
            if l.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: l.dim() });
            }
            if l.max_abs().is_zero() {
                continue;
            }
            let ldl = l.adjoint().matmul(l)?;
            h_eff = h_eff.sub(&ldl.scale(C::new(T::zero(), T::lit(0.5))))?;
            let nb = l.norm_bound();
            bound += nb * nb;
            kept.push(l.to_csr());
        }
        bound += T::lit(2.0) * h_eff.norm_bound();
        Ok(Self { dim, h_eff_csr: h_eff.to_csr(), h_eff_adj: h_eff.adjoint(), h_eff, jumps: kept, bound })
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_jumps(&self) -> usize {
        self.jumps.len()
    }

    pub fn effective_hamiltonian(&self) -> &Operator<T> {
        &self.h_eff
    }

    fn add_jumps(&self, rho: &[C<T>], out: &mut [C<T>]) {
        for l in &self.jumps {
            l.sandwich_acc(self.dim, rho, out);
        }
    }

    /// Right-hand side for an arbitrary (not necessarily Hermitian) matrix.
    pub fn apply_general(&self, rho: &[C<T>], out: &mut [C<T>]) {
        let n = self.dim * self.dim;
        let mut x = vec![C::zero(); n];
        let mut y = vec![C::zero(); n];
        self.h_eff.left_mul(rho, &mut x);
        self.h_eff_adj.right_mul(rho, &mut y);
        let i = C::new(T::zero(), T::one());
        for ((o, a), b) in out.iter_mut().zip(&x).zip(&y) {
            *o = i * (*b - *a);
        }
        self.add_jumps(rho, out);
    }
}

impl<T: Real> Generator<T> for Lindbladian<T> {
    fn len(&self) -> usize {
        self.dim * self.dim
    }

    fn apply(&self, rho: &[C<T>], out: &mut [C<T>]) {
        let d = self.dim;
        out.iter_mut().for_each(|z| *z = C::zero());
        for r in 0..d {
            let orow = &mut out[r * d..(r + 1) * d];
            for k in self.h_eff_csr.row_ptr[r]..self.h_eff_csr.row_ptr[r + 1] {
                let v = self.h_eff_csr.vals[k];
                let c = self.h_eff_csr.cols[k];
                for (o, &m) in orow.iter_mut().zip(&rho[c * d..(c + 1) * d]) {
                    *o = *o + v * m;
                }
            }
        }
        // out holds X; form −iX + iX† in place over pairs (a, b), (b, a)
        for a in 0..d {
            for b in a..d {
                let xab = out[a * d + b];
                let xba = out[b * d + a];
                let v = times_minus_i(xab - xba.conj());
                out[a * d + b] = v;
                out[b * d + a] = v.conj();
            }
        }
        self.add_jumps(rho, out);
    }

    fn norm_bound(&self) -> T {
        self.bound
    }
}

/// Adapter running a [`Lindbladian`] on non-Hermitian matrices.
pub struct GeneralLindbladian<'a, T: Real>(pub &'a Lindbladian<T>);

impl<T: Real> Generator<T> for GeneralLindbladian<'_, T> {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn apply(&self, y: &[C<T>], out: &mut [C<T>]) {
        self.0.apply_general(y, out)
    }

    fn norm_bound(&self) -> T {
        self.0.bound
    }
}
