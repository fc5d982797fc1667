//! Dense matrix carriers for transform-domain and time-domain values.
//!
//! `ComplexMatrix` is the square carrier for kernel transforms q̃(s), h̃(s)
//! and everything derived from them; `Matrix` holds real-valued results
//! (probabilities, expectations) on a time grid. Both are small and dense —
//! the models this solver targets have at most a few dozen states.

use num_complex::Complex64;

/// Square complex-valued matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// n×n matrix of zeros.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::ZERO; n * n],
        }
    }

    /// n×n identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    /// Build from a function of (row, col).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Entrywise difference `self - rhs`.
    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix { n: self.n, data }
    }

    /// Entrywise scaling by a complex factor.
    pub fn scale(&self, z: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    /// Scale column `j` by `factors[j]` (right multiplication by a diagonal).
    pub fn scale_columns(&self, factors: &[Complex64]) -> ComplexMatrix {
        assert_eq!(self.n, factors.len(), "dimension mismatch");
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(i, j) * factors[j]);
            }
        }
        out
    }

    /// Entrywise map.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexMatrix {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True if every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Real-valued matrix, row-major, possibly rectangular (used for row slices).
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Build a square matrix from nested rows; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows.iter().flatten().copied().collect();
        Self { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().copied()
    }
}
