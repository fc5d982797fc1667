//! Numerical Laplace-transform inversion and complex linear solves.
//!
//! Inversion uses the Abate–Whitt "Euler" algorithm: the Bromwich integral
//! is discretized by the trapezoidal rule with a step that turns the
//! oscillating factor into `(-1)^j`, and the resulting alternating series
//! is accelerated by Euler (binomial) summation. One call needs the
//! transform at `N + 1` frequencies that all share the real part `A/(2t)`,
//! so matrix-valued transforms are evaluated once per node and inverted
//! entrywise from the shared values.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SmpError};
use crate::matrix::{ComplexMatrix, Matrix};

/// Upper bound on the discretization parameter: beyond this, the
/// `exp(A/2)` factor amplifies double-precision round-off past the
/// accuracy the method is meant to deliver.
const MAX_DISCRETIZATION: f64 = 44.0;

/// Relative pivot threshold below which elimination reports singularity.
const PIVOT_TOL: f64 = 1e-13;

/// Parameters of the Euler inversion: discretization parameter `A`,
/// plain partial-sum terms `n_trunc`, and Euler-summation terms `m_euler`.
///
/// The defaults (`A = 18.4`, `n_trunc = 38`, `m_euler = 11`) give roughly
/// `1e-8` discretization error for functions bounded by 1.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerConfig {
    a: f64,
    n_trunc: usize,
    m_euler: usize,
    weights: Vec<f64>,
}

impl Default for EulerConfig {
    fn default() -> Self {
        Self::new(18.4, 38, 11).expect("default parameters are valid")
    }
}

impl EulerConfig {
    pub fn new(a: f64, n_trunc: usize, m_euler: usize) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(SmpError::InvalidConfig(format!(
                "discretization parameter A must be positive, got {a}"
            )));
        }
        if a > MAX_DISCRETIZATION {
            return Err(SmpError::InvalidConfig(format!(
                "A = {a} exceeds {MAX_DISCRETIZATION}; exp(A/2) would amplify round-off \
                 beyond the method's accuracy"
            )));
        }
        if n_trunc == 0 || m_euler == 0 {
            return Err(SmpError::InvalidConfig(
                "term counts n_trunc and m_euler must be positive".into(),
            ));
        }
        Ok(Self {
            a,
            n_trunc,
            m_euler,
            weights: euler_weights(n_trunc, m_euler),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn m_euler(&self) -> usize {
        self.m_euler
    }

    /// Total number of series terms `N = n_trunc + m_euler`; the node set
    /// has `N + 1` entries.
    pub fn terms(&self) -> usize {
        self.n_trunc + self.m_euler
    }

    /// Per-term weights: 1 through `n_trunc`, then binomial partial sums
    /// decaying to `2^{-m_euler}` at the last term.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Weight of term `n_trunc + l` is `2^{-m} Σ_{i=l..m} C(m, i)`, which is the
/// coefficient each term receives when the binomially-weighted average of
/// the partial sums `S_{n_trunc} … S_{n_trunc+m}` is expanded term by term.
fn euler_weights(n_trunc: usize, m_euler: usize) -> Vec<f64> {
    let mut w = vec![1.0; n_trunc + m_euler + 1];
    let mut binom = vec![0.0f64; m_euler + 1];
    binom[0] = 1.0;
    for i in 1..=m_euler {
        binom[i] = binom[i - 1] * (m_euler - i + 1) as f64 / i as f64;
    }
    let scale = 0.5f64.powi(m_euler as i32);
    for l in 1..=m_euler {
        let tail: f64 = binom[l..].iter().sum();
        w[n_trunc + l] = scale * tail;
    }
    w
}

/// The frequencies `s_j = A/(2t) + jπi/t`, `j = 0 … N`, at which a transform
/// must be evaluated to invert it at time `t`.
pub fn euler_nodes(t: f64, config: &EulerConfig) -> Result<Vec<Complex64>> {
    if !(t.is_finite() && t > 0.0) {
        return Err(SmpError::Domain(format!(
            "inversion time must be positive, got {t}"
        )));
    }
    let re = config.a / (2.0 * t);
    Ok((0..=config.terms())
        .map(|j| Complex64::new(re, j as f64 * std::f64::consts::PI / t))
        .collect())
}

/// Invert a transform from its values at `euler_nodes(t, config)`:
/// `φ(t) ≈ (e^{A/2}/t) [ ½·Re φ̃(s_0) + Σ_{j≥1} (-1)^j w_j Re φ̃(s_j) ]`.
pub fn euler_invert(lt_values: &[Complex64], t: f64, config: &EulerConfig) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(SmpError::Domain(format!(
            "inversion time must be positive, got {t}"
        )));
    }
    if lt_values.len() != config.terms() + 1 {
        return Err(SmpError::InvalidConfig(format!(
            "expected {} transform values, got {}",
            config.terms() + 1,
            lt_values.len()
        )));
    }
    if lt_values
        .iter()
        .any(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        return Err(SmpError::NumericFailure(
            "non-finite transform value passed to inversion".into(),
        ));
    }
    let mut sum = 0.5 * config.weights[0] * lt_values[0].re;
    let mut sign = -1.0;
    for (j, v) in lt_values.iter().enumerate().skip(1) {
        sum += sign * config.weights[j] * v.re;
        sign = -sign;
    }
    Ok(sum * (config.a / 2.0).exp() / t)
}

/// Invert a matrix-valued transform at time `t`: the evaluator is called
/// once per Euler node (never per entry), and the inversion sum is applied
/// entrywise to the shared values. The evaluator must be callable
/// concurrently at distinct frequencies.
pub fn invert_matrix_function<E>(evaluator: E, t: f64, config: &EulerConfig) -> Result<Matrix>
where
    E: Fn(Complex64) -> Result<ComplexMatrix> + Sync,
{
    let nodes = euler_nodes(t, config)?;
    let values: Vec<ComplexMatrix> = nodes
        .par_iter()
        .map(|&s| evaluator(s).map_err(|e| e.at_node(t, s)))
        .collect::<Result<_>>()?;

    let n = values[0].dim();
    if values.iter().any(|m| m.dim() != n) {
        return Err(SmpError::NumericFailure(
            "evaluator returned matrices of inconsistent dimension".into(),
        ));
    }
    for (value, &node) in values.iter().zip(&nodes) {
        if !value.is_finite() {
            return Err(
                SmpError::NumericFailure("non-finite transform matrix entry".into())
                    .at_node(t, node),
            );
        }
    }

    // Same operation order as `euler_invert` so a diagonal evaluator
    // reproduces the scalar path bit for bit.
    let exp_half_a = (config.a / 2.0).exp();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut sum = 0.5 * config.weights[0] * values[0].get(i, j).re;
            let mut sign = -1.0;
            for (idx, value) in values.iter().enumerate().skip(1) {
                sum += sign * config.weights[idx] * value.get(i, j).re;
                sign = -sign;
            }
            out.set(i, j, sum * exp_half_a / t);
        }
    }
    Ok(out)
}

/// Solve `A·X = B` by Gaussian elimination with partial pivoting on entry
/// magnitude. A pivot smaller than `1e-13` times its row's original scale
/// is reported as singular (expected for `I - q̃(0)` of recurrent models).
pub fn complex_linear_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    if b.dim() != n {
        return Err(SmpError::InvalidConfig(format!(
            "right-hand side dimension {} does not match system dimension {n}",
            b.dim()
        )));
    }

    let mut lu = a.clone();
    let mut x = b.clone();
    let mut scales = Vec::with_capacity(n);
    for i in 0..n {
        let s = lu.row(i).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if s == 0.0 {
            return Err(SmpError::SingularMatrix(format!("row {i} is identically zero")));
        }
        scales.push(s);
    }

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = lu.get(col, col).norm_sqr();
        for r in col + 1..n {
            let mag = lu.get(r, col).norm_sqr();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag.sqrt() < PIVOT_TOL * scales[pivot_row] {
            return Err(SmpError::SingularMatrix(format!(
                "pivot magnitude {:.3e} in column {col} is below {PIVOT_TOL:.0e} of its row scale",
                pivot_mag.sqrt()
            )));
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = lu.get(col, j);
                lu.set(col, j, lu.get(pivot_row, j));
                lu.set(pivot_row, j, tmp);
                let tmp = x.get(col, j);
                x.set(col, j, x.get(pivot_row, j));
                x.set(pivot_row, j, tmp);
            }
            scales.swap(col, pivot_row);
        }
        let pivot = lu.get(col, col);
        for r in col + 1..n {
            let factor = lu.get(r, col) / pivot;
            if factor == Complex64::ZERO {
                continue;
            }
            lu.set(r, col, Complex64::ZERO);
            for j in col + 1..n {
                let v = lu.get(r, j) - factor * lu.get(col, j);
                lu.set(r, j, v);
            }
            for j in 0..n {
                let v = x.get(r, j) - factor * x.get(col, j);
                x.set(r, j, v);
            }
        }
    }

    for col in (0..n).rev() {
        let pivot = lu.get(col, col);
        for j in 0..n {
            let mut v = x.get(col, j);
            for k in col + 1..n {
                v -= lu.get(col, k) * x.get(k, j);
            }
            x.set(col, j, v / pivot);
        }
    }
    Ok(x)
}
