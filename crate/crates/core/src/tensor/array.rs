use std::ops::{Index, IndexMut};

/// Dense rank-`R` array over an `n`-dimensional index range, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<const R: usize> {
    n: usize,
    data: Vec<f64>,
}

impl<const R: usize> Tensor<R> {
    pub fn zeros(n: usize) -> Self {
        Tensor {
            n,
            data: vec![0.0; n.pow(R as u32)],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut([usize; R]) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for flat in 0..t.data.len() {
            t.data[flat] = f(t.unflatten(flat));
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Iterates `(index, value)` over all entries.
    pub fn indexed(&self) -> impl Iterator<Item = ([usize; R], f64)> + '_ {
        self.data.iter().enumerate().map(|(k, &v)| (self.unflatten(k), v))
    }

    fn flatten(&self, idx: [usize; R]) -> usize {
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.n);
            acc * self.n + i
        })
    }

    fn unflatten(&self, mut flat: usize) -> [usize; R] {
        let mut idx = [0; R];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.n;
            flat /= self.n;
        }
        idx
    }
}

impl<const R: usize> Index<[usize; R]> for Tensor<R> {
    type Output = f64;

    fn index(&self, idx: [usize; R]) -> &f64 {
        &self.data[self.flatten(idx)]
    }
}

impl<const R: usize> IndexMut<[usize; R]> for Tensor<R> {
    fn index_mut(&mut self, idx: [usize; R]) -> &mut f64 {
        let k = self.flatten(idx);
        &mut self.data[k]
    }
}
