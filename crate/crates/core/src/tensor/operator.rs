//! Square complex operators with dense or compressed-row storage.
//!
//! Model Hamiltonians and jump operators are sums of a handful of embedded
//! local terms, so they are kept sparse (CSR); states are dense. All kernels
//! that touch a density matrix work row-by-row on contiguous memory and cost
//! `O(nnz · dim)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Compressed sparse row storage of a `dim × dim` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr<T: Real> {
    pub(crate) row_ptr: Vec<usize>,
    pub(crate) cols: Vec<usize>,
    pub(crate) vals: Vec<C<T>>,
}

impl<T: Real> Csr<T> {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `out += A M A†` where `A` is this `n × n` matrix and `M` is row-major.
    pub fn sandwich_acc(&self, n: usize, m: &[C<T>], out: &mut [C<T>]) {
        debug_assert_eq!(m.len(), n * n);
        for a in 0..n {
            let orow = &mut out[a * n..(a + 1) * n];
            for ka in self.row_ptr[a]..self.row_ptr[a + 1] {
                let mrow = &m[self.cols[ka] * n..(self.cols[ka] + 1) * n];
                let lac = self.vals[ka];
                for (b, o) in orow.iter_mut().enumerate() {
                    let mut acc = C::zero();
                    for kb in self.row_ptr[b]..self.row_ptr[b + 1] {
                        acc = acc + mrow[self.cols[kb]] * self.vals[kb].conj();
                    }
                    *o = *o + lac * acc;
                }
            }
        }
    }

    /// `y = A x` for an `n`-vector.
    #[inline]
    pub fn mul_vec(&self, x: &[C<T>], y: &mut [C<T>]) {
        for (r, o) in y.iter_mut().enumerate() {
            let mut acc = C::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc = acc + self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    /// Nonzeros of row `r` as `(col, value)` pairs.
    #[inline]
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C<T>)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.cols[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Storage<T: Real> {
    /// Row-major `dim × dim` entries.
    Dense(Vec<C<T>>),
    Sparse(Csr<T>),
}

/// Square complex matrix acting on a Hilbert space of dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Real> {
    dim: usize,
    storage: Storage<T>,
    hermitian: bool,
}

fn check_finite<T: Real>(z: C<T>) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidOperator("non-finite entry".into()))
    }
}

impl<T: Real> Operator<T> {
    pub fn from_dense(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidOperator("zero dimension".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        data.iter().try_for_each(|&z| check_finite(z))?;
        Ok(Self { dim, storage: Storage::Dense(data), hermitian: false })
    }

    /// Builds a sparse operator from `(row, col, value)` triplets. Duplicate
    /// coordinates are summed and exact zeros dropped.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, C<T>)>,
    {
        if dim == 0 {
            return Err(Error::InvalidOperator("zero dimension".into()));
        }
        let mut rows: Vec<BTreeMap<usize, C<T>>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::InvalidOperator(format!("index ({r}, {c}) out of range for dimension {dim}")));
            }
            check_finite(v)?;
            *rows[r].entry(c).or_insert_with(C::zero) += v;
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if !v.is_zero() {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(Self { dim, storage: Storage::Sparse(Csr { row_ptr, cols, vals }), hermitian: false })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, C::one()))).expect("identity is valid").flagged()
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_triplets(dim, std::iter::empty()).expect("zero operator is valid").flagged()
    }

    /// Diagonal operator.
    pub fn diagonal(diag: &[C<T>]) -> Result<Self> {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    fn flagged(mut self) -> Self {
        self.hermitian = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn storage(&self) -> &Storage<T> {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(d) => d.iter().filter(|z| !z.is_zero()).count(),
            Storage::Sparse(s) => s.nnz(),
        }
    }

    /// Whether the operator carries the Hermitian flag.
    pub fn hermitian_flag(&self) -> bool {
        self.hermitian
    }

    /// Checks `A = A†` to `1e-12` (relative to the largest entry when that
    /// exceeds one) and sets the Hermitian flag.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let scale = self.max_abs().max(T::one());
        let dev = self.hermiticity_defect();
        if dev > T::lit(1e-12) * scale {
            return Err(Error::InvalidOperator(format!("not Hermitian: max |A - A†| = {dev:e}")));
        }
        self.hermitian = true;
        Ok(self)
    }

    /// Largest entrywise deviation `|A - A†|`.
    pub fn hermiticity_defect(&self) -> T {
        let d = self.sub(&self.adjoint()).expect("same dimension");
        d.max_abs()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn max_abs(&self) -> T {
        match &self.storage {
            Storage::Dense(d) => crate::scalar::max_abs(d),
            Storage::Sparse(s) => crate::scalar::max_abs(&s.vals),
        }
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, C<T>)> {
        match &self.storage {
            Storage::Dense(d) => d
                .iter()
                .enumerate()
                .filter(|(_, z)| !z.is_zero())
                .map(|(k, &z)| (k / self.dim, k % self.dim, z))
                .collect(),
            Storage::Sparse(s) => (0..self.dim).flat_map(|r| s.row(r).map(move |(c, v)| (r, c, v))).collect(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> C<T> {
        match &self.storage {
            Storage::Dense(d) => d[r * self.dim + c],
            Storage::Sparse(s) => s.row(r).find(|&(cc, _)| cc == c).map(|(_, v)| v).unwrap_or_else(C::zero),
        }
    }

    pub fn to_dense(&self) -> Operator<T> {
        let mut d = vec![C::zero(); self.dim * self.dim];
        for (r, c, v) in self.triplets() {
            d[r * self.dim + c] = v;
        }
        Operator { dim: self.dim, storage: Storage::Dense(d), hermitian: self.hermitian }
    }

    pub fn to_sparse(&self) -> Operator<T> {
        match &self.storage {
            Storage::Sparse(_) => self.clone(),
            Storage::Dense(_) => {
                let mut op = Self::from_triplets(self.dim, self.triplets()).expect("valid");
                op.hermitian = self.hermitian;
                op
            }
        }
    }

    /// Row-major dense entries.
    pub fn dense_data(&self) -> Vec<C<T>> {
        match self.to_dense().storage {
            Storage::Dense(d) => d,
            Storage::Sparse(_) => unreachable!(),
        }
    }

    pub fn adjoint(&self) -> Operator<T> {
        let t = self.triplets().into_iter().map(|(r, c, v)| (c, r, v.conj()));
        let mut op = Self::from_triplets(self.dim, t).expect("valid");
        if let Storage::Dense(_) = self.storage {
            op = op.to_dense();
        }
        op.hermitian = self.hermitian;
        op
    }

    pub fn scale(&self, s: C<T>) -> Operator<T> {
        let storage = match &self.storage {
            Storage::Dense(d) => Storage::Dense(d.iter().map(|&z| z * s).collect()),
            Storage::Sparse(csr) => Storage::Sparse(Csr {
                row_ptr: csr.row_ptr.clone(),
                cols: csr.cols.clone(),
                vals: csr.vals.iter().map(|&z| z * s).collect(),
            }),
        };
        Operator { dim: self.dim, storage, hermitian: self.hermitian && s.im.is_zero() }
    }

    pub fn scale_real(&self, s: T) -> Operator<T> {
        self.scale(C::new(s, T::zero()))
    }

    fn check_dim(&self, other: &Operator<T>) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn add(&self, other: &Operator<T>) -> Result<Operator<T>> {
        self.check_dim(other)?;
        let mut op = Self::from_triplets(self.dim, self.triplets().into_iter().chain(other.triplets()))?;
        op.hermitian = self.hermitian && other.hermitian;
        Ok(op)
    }

    pub fn sub(&self, other: &Operator<T>) -> Result<Operator<T>> {
        self.add(&other.scale(-C::one()))
    }

    /// Matrix product `self · other` (sparse result).
    pub fn matmul(&self, other: &Operator<T>) -> Result<Operator<T>> {
        self.check_dim(other)?;
        let b = other.to_sparse();
        let Storage::Sparse(bs) = &b.storage else { unreachable!() };
        let mut trip = Vec::new();
        for (r, k, v) in self.triplets() {
            for (c, w) in bs.row(k) {
                trip.push((r, c, v * w));
            }
        }
        Self::from_triplets(self.dim, trip)
    }

    pub fn commutator(&self, other: &Operator<T>) -> Result<Operator<T>> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).map(|i| self.get(i, i)).fold(C::zero(), |a, b| a + b)
    }

    /// Upper bound on the spectral norm: `sqrt(‖A‖₁ ‖A‖∞)` from row and column
    /// absolute sums.
    pub fn norm_bound(&self) -> T {
        let mut rows = vec![T::zero(); self.dim];
        let mut cols = vec![T::zero(); self.dim];
        for (r, c, v) in self.triplets() {
            rows[r] = rows[r] + v.norm();
            cols[c] = cols[c] + v.norm();
        }
        let m = |xs: &[T]| xs.iter().fold(T::zero(), |a, &b| a.max(b));
        (m(&rows) * m(&cols)).sqrt()
    }

    /// `out = A x`.
    pub fn apply_vec(&self, x: &[C<T>], out: &mut [C<T>]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        match &self.storage {
            Storage::Sparse(s) => {
                for (r, o) in out.iter_mut().enumerate() {
                    let mut acc = C::zero();
                    for (c, v) in s.row(r) {
                        acc = acc + v * x[c];
                    }
                    *o = acc;
                }
            }
            Storage::Dense(d) => {
                for (r, o) in out.iter_mut().enumerate() {
                    let row = &d[r * self.dim..(r + 1) * self.dim];
                    *o = row.iter().zip(x).fold(C::zero(), |acc, (&a, &b)| acc + a * b);
                }
            }
        }
    }

    /// `out += alpha · A x`.
    pub fn apply_vec_acc(&self, alpha: C<T>, x: &[C<T>], out: &mut [C<T>]) {
        match &self.storage {
            Storage::Sparse(s) => {
                for (r, o) in out.iter_mut().enumerate() {
                    let mut acc = C::zero();
                    for (c, v) in s.row(r) {
                        acc = acc + v * x[c];
                    }
                    *o = *o + alpha * acc;
                }
            }
            Storage::Dense(_) => {
                let mut tmp = vec![C::zero(); self.dim];
                self.apply_vec(x, &mut tmp);
                for (o, t) in out.iter_mut().zip(tmp) {
                    *o = *o + alpha * t;
                }
            }
        }
    }

    /// `out = A M` for a row-major square matrix `M`.
    pub fn left_mul(&self, m: &[C<T>], out: &mut [C<T>]) {
        let n = self.dim;
        debug_assert_eq!(m.len(), n * n);
        out.iter_mut().for_each(|z| *z = C::zero());
        match &self.storage {
            Storage::Sparse(s) => {
                for r in 0..n {
                    let orow = &mut out[r * n..(r + 1) * n];
                    for (k, v) in s.row(r) {
                        axpy(v, &m[k * n..(k + 1) * n], orow);
                    }
                }
            }
            Storage::Dense(d) => {
                for r in 0..n {
                    let orow = &mut out[r * n..(r + 1) * n];
                    for k in 0..n {
                        let v = d[r * n + k];
                        if !v.is_zero() {
                            axpy(v, &m[k * n..(k + 1) * n], orow);
                        }
                    }
                }
            }
        }
    }

    /// `out = M A` for a row-major square matrix `M`.
    pub fn right_mul(&self, m: &[C<T>], out: &mut [C<T>]) {
        let n = self.dim;
        debug_assert_eq!(m.len(), n * n);
        out.iter_mut().for_each(|z| *z = C::zero());
        let trip = match &self.storage {
            Storage::Sparse(_) => None,
            Storage::Dense(_) => Some(self.to_sparse()),
        };
        let sp = trip.as_ref().unwrap_or(self);
        let Storage::Sparse(s) = &sp.storage else { unreachable!() };
        for r in 0..n {
            let mrow = &m[r * n..(r + 1) * n];
            let orow = &mut out[r * n..(r + 1) * n];
            for (k, &mk) in mrow.iter().enumerate() {
                if mk.is_zero() {
                    continue;
                }
                for (c, v) in s.row(k) {
                    orow[c] = orow[c] + mk * v;
                }
            }
        }
    }
}

impl<T: Real> Operator<T> {
    /// Compressed-row copy of the entries, whatever the storage.
    pub fn to_csr(&self) -> Csr<T> {
        match &self.to_sparse().storage {
            Storage::Sparse(s) => s.clone(),
            Storage::Dense(_) => unreachable!(),
        }
    }

    /// `out += A M A†` for a row-major square matrix `M`, in `O(nnz²)`.
    pub fn sandwich_acc(&self, m: &[C<T>], out: &mut [C<T>]) {
        self.to_csr().sandwich_acc(self.dim, m, out)
    }
}

/// `y += a x`.
#[inline]
pub(crate) fn axpy<T: Real>(a: C<T>, x: &[C<T>], y: &mut [C<T>]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + a * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;

    fn op(dim: usize, t: &[(usize, usize, f64, f64)]) -> Operator<f64> {
        Operator::from_triplets(dim, t.iter().map(|&(r, c, a, b)| (r, c, cl(a, b)))).unwrap()
    }

    #[test]
    fn duplicates_are_summed() {
        let a = op(2, &[(0, 1, 1.0, 0.0), (0, 1, 2.0, 0.5)]);
        assert_eq!(a.get(0, 1), cl(3.0, 0.5));
        assert_eq!(a.nnz(), 1);
    }

    #[test]
    fn rejects_out_of_range_and_nan() {
        assert!(Operator::<f64>::from_triplets(2, [(2, 0, cl(1.0, 0.0))]).is_err());
        assert!(Operator::<f64>::from_triplets(2, [(0, 0, cl(f64::NAN, 0.0))]).is_err());
        assert!(Operator::<f64>::from_dense(2, vec![cl(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn hermitian_flag_checked() {
        let h = op(2, &[(0, 1, 0.0, 1.0), (1, 0, 0.0, -1.0)]);
        assert!(h.clone().into_hermitian().is_ok());
        let nh = op(2, &[(0, 1, 0.0, 1.0)]);
        assert!(nh.into_hermitian().is_err());
    }

    #[test]
    fn left_and_right_products_match_dense() {
        let a = op(3, &[(0, 1, 1.0, 2.0), (2, 0, -0.5, 0.0), (1, 1, 0.0, 3.0)]);
        let m: Vec<C<f64>> = (0..9).map(|k| cl(k as f64, 1.0 - k as f64)).collect();
        let mop = Operator::from_dense(3, m.clone()).unwrap();
        let mut out = vec![C::zero(); 9];
        a.left_mul(&m, &mut out);
        let expect = a.matmul(&mop).unwrap().dense_data();
        for (x, y) in out.iter().zip(&expect) {
            assert!((x - y).norm() < 1e-14);
        }
        a.right_mul(&m, &mut out);
        let expect = mop.matmul(&a).unwrap().dense_data();
        for (x, y) in out.iter().zip(&expect) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn norm_bound_dominates_entries() {
        let a = op(2, &[(0, 1, 3.0, 4.0), (1, 0, 1.0, 0.0)]);
        assert!(a.norm_bound() >= 5.0 - 1e-12);
    }

    #[test]
    fn sandwich_acc_matches_products() {
        let a = op(3, &[(0, 1, 1.0, 2.0), (2, 0, -0.5, 0.0), (1, 1, 0.0, 3.0), (1, 2, 0.25, 0.0)]);
        let m: Vec<C<f64>> = (0..9).map(|k| cl(k as f64, 1.0 - k as f64)).collect();
        let mop = Operator::from_dense(3, m.clone()).unwrap();
        let mut out = vec![cl(1.0, 0.0); 9];
        a.sandwich_acc(&m, &mut out);
        let expect = a.matmul(&mop).unwrap().matmul(&a.adjoint()).unwrap().dense_data();
        for (x, y) in out.iter().zip(&expect) {
            assert!((x - y - cl(1.0, 0.0)).norm() < 1e-13);
        }
        let x: Vec<C<f64>> = (0..3).map(|k| cl(1.0, k as f64)).collect();
        let (mut y1, mut y2) = (vec![C::zero(); 3], vec![C::zero(); 3]);
        a.to_csr().mul_vec(&x, &mut y1);
        a.apply_vec(&x, &mut y2);
        assert_eq!(y1, y2);
    }
}
