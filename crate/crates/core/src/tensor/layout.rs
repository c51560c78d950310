use crate::error::{Error, Result};

/// Factor index of qubit 1 in the gate layout.
pub const QUBIT_1: usize = 0;
/// Factor index of qubit 2 in the gate layout.
pub const QUBIT_2: usize = 1;
/// Factor index of the centre-of-mass mode in the gate layout.
pub const MODE_COM: usize = 2;
/// Factor index of the zig-zag mode in the gate layout.
pub const MODE_ZZ: usize = 3;

/// Ordered tensor factorization of a Hilbert space. The first factor is the
/// most significant digit of a flat basis index (row-major / C order).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertLayout {
    factor_dims: Vec<usize>,
    strides: Vec<usize>,
    total_dim: usize,
}

impl HilbertLayout {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(Error::InvalidLayout("no factors".into()));
        }
        if let Some(d) = factor_dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidLayout(format!("factor dimension {d} < 2")));
        }
        let mut strides = vec![1; factor_dims.len()];
        for k in (0..factor_dims.len() - 1).rev() {
            strides[k] = strides[k + 1] * factor_dims[k + 1];
        }
        let total_dim = factor_dims.iter().product();
        Ok(Self { factor_dims, strides, total_dim })
    }

    /// Two qubits and two motional modes truncated at `n_max` phonons:
    /// `[2, 2, n_max + 1, n_max + 1]`.
    pub fn gate(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidLayout("n_max must be at least 1".into()));
        }
        Self::new(vec![2, 2, n_max + 1, n_max + 1])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn n_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn stride(&self, factor: usize) -> usize {
        self.strides[factor]
    }

    pub fn dim(&self, factor: usize) -> usize {
        self.factor_dims[factor]
    }

    /// Local basis index of `factor` inside flat index `index`.
    #[inline]
    pub fn digit(&self, index: usize, factor: usize) -> usize {
        (index / self.strides[factor]) % self.factor_dims[factor]
    }

    /// Flat index of a product basis state.
    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.factor_dims.len() {
            return Err(Error::DimensionMismatch { expected: self.factor_dims.len(), found: digits.len() });
        }
        let mut idx = 0;
        for (k, (&d, &n)) in digits.iter().zip(&self.factor_dims).enumerate() {
            if d >= n {
                return Err(Error::InvalidLayout(format!("digit {d} out of range for factor {k} of dimension {n}")));
            }
            idx += d * self.strides[k];
        }
        Ok(idx)
    }

    /// True for the `[2, 2, n+1, n+1]` layout used by the gate model.
    pub fn is_gate_layout(&self) -> bool {
        self.factor_dims.len() == 4
            && self.factor_dims[0] == 2
            && self.factor_dims[1] == 2
            && self.factor_dims[2] == self.factor_dims[3]
    }

    /// Phonon cutoff of a gate layout.
    pub fn n_max(&self) -> Option<usize> {
        self.is_gate_layout().then(|| self.factor_dims[MODE_COM] - 1)
    }

    /// Dimension of the tensor product of factors `0..k`.
    pub fn leading_dim(&self, k: usize) -> usize {
        self.factor_dims[..k].iter().product()
    }

    pub fn ensure_gate(&self) -> Result<usize> {
        self.n_max()
            .ok_or_else(|| Error::InvalidLayout(format!("expected [2, 2, n+1, n+1], found {:?}", self.factor_dims)))
    }
}
