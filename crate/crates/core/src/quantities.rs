//! Process quantities assembled in the transform domain and inverted on a
//! time grid.
//!
//! Everything here reduces to evaluating the kernel matrix `q̃(s)` at the
//! inversion nodes, forming the resolvent `(I - q̃(s))⁻¹`, and combining a
//! handful of matrix expressions:
//!
//! - state probabilities      `P̃ = (1/s)(I - q̃)⁻¹(I - h̃)`
//! - expected occupancy       `(1/s²)(I - q̃)⁻¹(I - h̃)`
//! - first-passage density    `g̃ = q̃ (I - q̃)⁻¹ [I ∘ (I - q̃)⁻¹]⁻¹`
//! - first-passage CDF        `G̃ = g̃ / s`
//! - visit-count mass         `ṽ(k) = (1/s) g̃_ij (1 - g̃_jj) g̃_jj^{k-1}`
//! - visit-count CDF          `Ṽ(k) = (1/s)(1 - g̃_ij g̃_jj^k)`
//! - expected visits          `M̃ = (1/s)[(I - q̃)⁻¹ - I]`
//!
//! Limits at `s -> 0` (reach probabilities, mean return times) are taken by
//! evaluating `g̃` on a small-frequency ladder and extrapolating, because
//! `I - q̃(0)` is exactly singular whenever the model has a recurrent class.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SmpError};
use crate::matrix::{ComplexMatrix, Matrix};
use crate::model::{holding_from_kernel, SmpModel, StateClass};
use crate::transform::{complex_linear_solve, invert_matrix_function, EulerConfig};

/// Tolerance band for raw inverted probabilities: values may stray this far
/// outside `[0, 1]` from inversion noise; anything worse is an error.
/// Out-of-band values are never clipped in stored results.
const PROB_RANGE_EPS: f64 = 1e-5;

/// Reach probabilities below this make the conditional hazard undefined.
const HAZARD_MIN_REACH: f64 = 1e-6;

/// Diagonal entries of `(I - q̃)⁻¹` smaller than this cannot be reciprocated.
const DIAG_MIN: f64 = 1e-12;

/// Base of the small-frequency ladder, in units of 1 / mean holding time.
const LADDER_BASE: f64 = 1e-5;

/// Disagreement between extrapolation orders that flags a limit value.
const EXTRAPOLATION_WARN: f64 = 1e-4;

/// What a `QuantityResult` holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantityKind {
    /// `P_ij(t)`: probability of being in `j` at `t`.
    StateProbability,
    /// Expected time spent in `j` over `[0, t]`.
    Occupancy,
    /// `G_ij(t)`: first-passage CDF.
    FirstPassageCdf,
    /// `g_ij(t)`: first-passage density.
    FirstPassageDensity,
    /// `v_ij(k; t)`: probability of exactly `k` visits by `t`.
    CountProbability,
    /// `V_ij(k; t)`: probability of at most `k` visits by `t`.
    CountCdf,
    /// `M_ij(t)`: expected number of visits by `t`.
    ExpectedVisits,
    /// Conditional first-passage hazard for one state pair.
    ConditionalHazard,
}

impl QuantityKind {
    /// Kinds whose values are probabilities and must stay in `[0, 1]` up to
    /// inversion noise.
    pub fn is_probability(self) -> bool {
        matches!(
            self,
            QuantityKind::StateProbability
                | QuantityKind::FirstPassageCdf
                | QuantityKind::CountProbability
                | QuantityKind::CountCdf
        )
    }
}

/// A matrix-valued function sampled on a time grid.
#[derive(Clone, Debug)]
pub struct QuantityResult {
    pub kind: QuantityKind,
    /// Visit count for the counting quantities.
    pub k: Option<u32>,
    /// Strictly increasing positive time grid.
    pub times: Vec<f64>,
    /// One matrix per grid point (n×n, or 1×1 for the hazard).
    pub values: Vec<Matrix>,
    /// Start state, when the result is specific to one.
    pub start_state: Option<usize>,
    /// Target state, when the result is specific to one.
    pub target_state: Option<usize>,
    /// Accuracy caveats attached to the result (never silently dropped).
    pub warnings: Vec<String>,
}

impl QuantityResult {
    /// Value at time index `ti` for the `(i, j)` pair.
    pub fn value(&self, ti: usize, i: usize, j: usize) -> f64 {
        self.values[ti].get(i, j)
    }
}

/// Limiting first-passage probabilities `G_ij(∞)` with any extrapolation
/// warnings attached.
#[derive(Clone, Debug)]
pub struct ReachProbabilities {
    pub values: Matrix,
    pub warnings: Vec<String>,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(SmpError::Domain("time grid is empty".into()));
    }
    for &t in times {
        if !(t.is_finite() && t > 0.0) {
            return Err(SmpError::Domain(format!(
                "time grid entries must be positive and finite, got {t}"
            )));
        }
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SmpError::Domain(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn check_probability_range(kind: &str, times: &[f64], values: &[Matrix]) -> Result<()> {
    for (m, &t) in values.iter().zip(times) {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m.get(i, j);
                if !(-PROB_RANGE_EPS..=1.0 + PROB_RANGE_EPS).contains(&v) {
                    return Err(SmpError::NumericFailure(format!(
                        "{kind} value {v} at t={t}, entry ({i}, {j}) is outside [0, 1] \
                         beyond the {PROB_RANGE_EPS:e} noise band"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn base_warnings(model: &SmpModel) -> Vec<String> {
    if model.has_empirical() {
        vec![
            "model contains empirical waiting-time distributions; the inversion is tuned \
             for smooth kernels and accuracy is not guaranteed"
                .to_string(),
        ]
    } else {
        Vec::new()
    }
}

/// The resolvent `(I - q̃(s))⁻¹` together with the kernel it came from.
fn kernel_resolvent(model: &SmpModel, s: Complex64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let q = model.kernel_lt(s)?;
    let identity = ComplexMatrix::identity(model.n());
    let w = complex_linear_solve(&identity.sub(&q), &identity)?;
    Ok((q, w))
}

fn invert_on_grid<E>(
    model: &SmpModel,
    times: &[f64],
    config: &EulerConfig,
    evaluator: E,
) -> Result<Vec<Matrix>>
where
    E: Fn(Complex64) -> Result<ComplexMatrix> + Sync,
{
    check_times(times)?;
    let _ = model;
    times
        .par_iter()
        .map(|&t| invert_matrix_function(&evaluator, t, config))
        .collect()
}

/// Time-dependent state probabilities `P(t)` on the grid.
pub fn state_probabilities(
    model: &SmpModel,
    times: &[f64],
    config: &EulerConfig,
) -> Result<QuantityResult> {
    let n = model.n();
    let values = invert_on_grid(model, times, config, |s| {
        let q = model.kernel_lt(s)?;
        let h = holding_from_kernel(&q);
        let identity = ComplexMatrix::identity(n);
        let x = complex_linear_solve(&identity.sub(&q), &identity.sub(&h))?;
        Ok(x.scale(s.inv()))
    })?;
    check_probability_range("state probability", times, &values)?;
    Ok(QuantityResult {
        kind: QuantityKind::StateProbability,
        k: None,
        times: times.to_vec(),
        values,
        start_state: None,
        target_state: None,
        warnings: base_warnings(model),
    })
}

/// Expected time spent in each state over `[0, t]`.
pub fn expected_occupancy(
    model: &SmpModel,
    times: &[f64],
    config: &EulerConfig,
) -> Result<QuantityResult> {
    let n = model.n();
    let values = invert_on_grid(model, times, config, |s| {
        let q = model.kernel_lt(s)?;
        let h = holding_from_kernel(&q);
        let identity = ComplexMatrix::identity(n);
        let x = complex_linear_solve(&identity.sub(&q), &identity.sub(&h))?;
        Ok(x.scale((s * s).inv()))
    })?;
    Ok(QuantityResult {
        kind: QuantityKind::Occupancy,
        k: None,
        times: times.to_vec(),
        values,
        start_state: None,
        target_state: None,
        warnings: base_warnings(model),
    })
}

/// First-passage density transform
/// `g̃(s) = q̃ (I - q̃)⁻¹ [I ∘ (I - q̃)⁻¹]⁻¹` for `Re(s) > 0`.
///
/// The Hadamard factor keeps only the diagonal of the resolvent, so its
/// inverse is the diagonal matrix of reciprocals.
pub fn first_passage_lt(model: &SmpModel, s: Complex64) -> Result<ComplexMatrix> {
    let (q, w) = kernel_resolvent(model, s)?;
    let diag = w.diagonal();
    let mut recip = Vec::with_capacity(diag.len());
    for (j, d) in diag.iter().enumerate() {
        if d.norm() < DIAG_MIN {
            return Err(SmpError::SingularMatrix(format!(
                "diagonal entry {j} of (I - q̃(s))⁻¹ is zero at s = {s}; the Hadamard factor \
                 cannot be inverted"
            )));
        }
        recip.push(d.inv());
    }
    Ok(q.mul(&w).scale_columns(&recip))
}

/// First-passage CDF `G(t)` and density `g(t)` matrices on the grid.
pub fn first_passage(
    model: &SmpModel,
    times: &[f64],
    config: &EulerConfig,
) -> Result<(QuantityResult, QuantityResult)> {
    let cdf_values = invert_on_grid(model, times, config, |s| {
        Ok(first_passage_lt(model, s)?.scale(s.inv()))
    })?;
    check_probability_range("first-passage CDF", times, &cdf_values)?;
    let density_values = invert_on_grid(model, times, config, |s| first_passage_lt(model, s))?;

    let warnings = base_warnings(model);
    Ok((
        QuantityResult {
            kind: QuantityKind::FirstPassageCdf,
            k: None,
            times: times.to_vec(),
            values: cdf_values,
            start_state: None,
            target_state: None,
            warnings: warnings.clone(),
        },
        QuantityResult {
            kind: QuantityKind::FirstPassageDensity,
            k: None,
            times: times.to_vec(),
            values: density_values,
            start_state: None,
            target_state: None,
            warnings,
        },
    ))
}

/// `g̃_jj^k` with the `0^0 = 1` convention (absorbing diagonals at `k = 0`).
fn diag_power(base: Complex64, k: u32) -> Complex64 {
    if k == 0 {
        Complex64::ONE
    } else {
        base.powu(k)
    }
}

/// Probability of exactly `k` transitions into each state by time `t`.
///
/// Transitions are counted after the start: the initial occupancy of the
/// start state does not count as a visit.
pub fn count_probability(
    model: &SmpModel,
    k: u32,
    times: &[f64],
    config: &EulerConfig,
) -> Result<QuantityResult> {
    let n = model.n();
    let values = invert_on_grid(model, times, config, |s| {
        let g = first_passage_lt(model, s)?;
        let inv_s = s.inv();
        let out = if k == 0 {
            ComplexMatrix::from_fn(n, |i, j| (Complex64::ONE - g.get(i, j)) * inv_s)
        } else {
            let diag = g.diagonal();
            ComplexMatrix::from_fn(n, |i, j| {
                let gjj = diag[j];
                g.get(i, j) * (Complex64::ONE - gjj) * diag_power(gjj, k - 1) * inv_s
            })
        };
        Ok(out)
    })?;
    check_probability_range("visit-count probability", times, &values)?;
    Ok(QuantityResult {
        kind: QuantityKind::CountProbability,
        k: Some(k),
        times: times.to_vec(),
        values,
        start_state: None,
        target_state: None,
        warnings: base_warnings(model),
    })
}

/// Probability of at most `k` transitions into each state by time `t`
/// (the telescoped cumulative form of `count_probability`).
pub fn count_cdf(
    model: &SmpModel,
    k: u32,
    times: &[f64],
    config: &EulerConfig,
) -> Result<QuantityResult> {
    let n = model.n();
    let values = invert_on_grid(model, times, config, |s| {
        let g = first_passage_lt(model, s)?;
        let diag = g.diagonal();
        let inv_s = s.inv();
        Ok(ComplexMatrix::from_fn(n, |i, j| {
            (Complex64::ONE - g.get(i, j) * diag_power(diag[j], k)) * inv_s
        }))
    })?;
    check_probability_range("visit-count CDF", times, &values)?;
    Ok(QuantityResult {
        kind: QuantityKind::CountCdf,
        k: Some(k),
        times: times.to_vec(),
        values,
        start_state: None,
        target_state: None,
        warnings: base_warnings(model),
    })
}

/// Expected number of transitions into each state by time `t`:
/// `M̃(s) = (1/s)[(I - q̃)⁻¹ - I]`.
pub fn expected_visits(
    model: &SmpModel,
    times: &[f64],
    config: &EulerConfig,
) -> Result<QuantityResult> {
    let n = model.n();
    let values = invert_on_grid(model, times, config, |s| {
        let (_, w) = kernel_resolvent(model, s)?;
        Ok(w.sub(&ComplexMatrix::identity(n)).scale(s.inv()))
    })?;
    Ok(QuantityResult {
        kind: QuantityKind::ExpectedVisits,
        k: None,
        times: times.to_vec(),
        values,
        start_state: None,
        target_state: None,
        warnings: base_warnings(model),
    })
}

/// Conditional first-passage hazard from `i` to `j`:
/// `λ_ij(t) = g_ij(t) / (G_ij(∞) - G_ij(t))`, the hazard given that the
/// process eventually reaches `j`. Coincides with the classical hazard
/// when `G_ij(∞) = 1`.
pub fn conditional_hazard(
    model: &SmpModel,
    from: usize,
    to: usize,
    times: &[f64],
    config: &EulerConfig,
) -> Result<QuantityResult> {
    let n = model.n();
    if from >= n || to >= n {
        return Err(SmpError::Domain(format!(
            "state pair ({from}, {to}) out of range for a {n}-state model"
        )));
    }
    let reach = reach_probability(model)?;
    let g_inf = reach.values.get(from, to);
    if g_inf < HAZARD_MIN_REACH {
        return Err(SmpError::UndefinedHazard(format!(
            "reach probability {} -> {} is {:.3e}; the conditional hazard requires it to be \
             at least {HAZARD_MIN_REACH:e}",
            model.label(from),
            model.label(to),
            g_inf
        )));
    }

    let (cdf, density) = first_passage(model, times, config)?;
    let mut warnings = reach.warnings;
    warnings.extend(cdf.warnings.iter().cloned());
    warnings.dedup();

    let values = times
        .iter()
        .enumerate()
        .map(|(ti, _)| {
            let g_t = density.values[ti].get(from, to);
            let cdf_t = cdf.values[ti].get(from, to);
            Matrix::from_fn(1, 1, |_, _| g_t / (g_inf - cdf_t))
        })
        .collect();

    Ok(QuantityResult {
        kind: QuantityKind::ConditionalHazard,
        k: None,
        times: times.to_vec(),
        values,
        start_state: Some(from),
        target_state: Some(to),
        warnings,
    })
}

/// Mean of the per-state mean holding times over non-absorbing states;
/// sets the scale of the small-frequency ladder.
fn holding_time_scale(model: &SmpModel) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for i in 0..model.n() {
        if !model.is_absorbing(i) {
            total += model.mean_holding_time(i);
            count += 1;
        }
    }
    if count == 0 || !(total > 0.0) {
        1.0
    } else {
        total / count as f64
    }
}

/// `g̃` evaluated on the three-point ladder `s0 (1, 1/2, 1/4)`.
fn first_passage_ladder(model: &SmpModel) -> Result<(f64, [ComplexMatrix; 3])> {
    let s0 = LADDER_BASE / holding_time_scale(model);
    let at = |scale: f64| first_passage_lt(model, Complex64::new(s0 * scale, 0.0));
    Ok((s0, [at(1.0)?, at(0.5)?, at(0.25)?]))
}

/// Quadratic Newton interpolation through `(u_k, y_k)`; returns the value
/// and derivative at `u = 0`.
fn quadratic_at_zero(u: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d01 = (y[1] - y[0]) / (u[1] - u[0]);
    let d12 = (y[2] - y[1]) / (u[2] - u[1]);
    let d012 = (d12 - d01) / (u[2] - u[0]);
    let value = y[0] - d01 * u[0] + d012 * u[0] * u[1];
    let slope = d01 - d012 * (u[0] + u[1]);
    (value, slope)
}

/// Limiting first-passage probabilities `G_ij(∞)`, extrapolated from the
/// small-frequency ladder. Disagreement between the quadratic and linear
/// extrapolants beyond `1e-4` attaches a warning rather than failing.
pub fn reach_probability(model: &SmpModel) -> Result<ReachProbabilities> {
    let n = model.n();
    let (_, ladder) = first_passage_ladder(model)?;
    let u = [1.0, 0.5, 0.25];
    let mut values = Matrix::zeros(n, n);
    let mut warnings = base_warnings(model);
    for i in 0..n {
        for j in 0..n {
            let y = [
                ladder[0].get(i, j).re,
                ladder[1].get(i, j).re,
                ladder[2].get(i, j).re,
            ];
            let (quad, _) = quadratic_at_zero(u, y);
            let linear = 2.0 * y[2] - y[1];
            if (quad - linear).abs() > EXTRAPOLATION_WARN {
                warnings.push(format!(
                    "reach probability {} -> {}: extrapolants disagree by {:.2e}",
                    model.label(i),
                    model.label(j),
                    (quad - linear).abs()
                ));
            }
            values.set(i, j, quad);
        }
    }
    Ok(ReachProbabilities { values, warnings })
}

/// Long-run state probabilities `π_ij`.
///
/// For a target `j`: absorbing gives `G_ij(∞)`, transient gives 0, and
/// recurrent gives `G_ij(∞) · E[hold j] / E[return j]`, where the mean
/// return time is `-d g̃_jj / ds` at `s = 0` taken on the extrapolation
/// ladder. An absorbing start state stays put, so its row is the identity
/// row.
pub fn asymptotic_probabilities(model: &SmpModel) -> Result<Matrix> {
    let n = model.n();
    for i in 0..n {
        for j in 0..n {
            if let Some(d) = model.dist(i, j) {
                if !d.mean().is_finite() {
                    return Err(SmpError::UndefinedAsymptotics(format!(
                        "transition {} -> {} has a non-finite mean waiting time",
                        model.label(i),
                        model.label(j)
                    )));
                }
            }
        }
    }

    let classes = model.classify_states();
    let (s0, ladder) = first_passage_ladder(model)?;
    let u = [1.0, 0.5, 0.25];

    // Mean return time for each recurrent state, from the diagonal slope.
    let mut mean_return = vec![f64::NAN; n];
    for j in 0..n {
        if classes.class(j) == StateClass::Recurrent {
            let y = [
                ladder[0].get(j, j).re,
                ladder[1].get(j, j).re,
                ladder[2].get(j, j).re,
            ];
            let (_, slope_u) = quadratic_at_zero(u, y);
            let ret = -slope_u / s0;
            if !(ret.is_finite() && ret > 0.0) {
                return Err(SmpError::UndefinedAsymptotics(format!(
                    "mean return time to state {} evaluated to {ret}",
                    model.label(j)
                )));
            }
            mean_return[j] = ret;
        }
    }

    let reach = reach_probability(model)?;
    let mut pi = Matrix::zeros(n, n);
    for i in 0..n {
        if model.is_absorbing(i) {
            pi.set(i, i, 1.0);
            continue;
        }
        for j in 0..n {
            let value = match classes.class(j) {
                StateClass::Absorbing => reach.values.get(i, j),
                StateClass::Transient => 0.0,
                StateClass::Recurrent => {
                    reach.values.get(i, j) * model.mean_holding_time(j) / mean_return[j]
                }
            };
            pi.set(i, j, value);
        }
    }
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    const CFG: fn() -> EulerConfig = EulerConfig::default;

    fn grid() -> Vec<f64> {
        (1..=20).map(|i| 0.25 * i as f64).collect()
    }

    #[test]
    fn two_state_exponential_state_probabilities() {
        let rate = 0.7;
        let model = corpus::two_state_absorbing(rate);
        let times = grid();
        let p = state_probabilities(&model, &times, &CFG()).unwrap();
        for (ti, &t) in times.iter().enumerate() {
            let expect = (-rate * t).exp();
            assert!((p.value(ti, 0, 0) - expect).abs() < 1e-6, "t={t}");
            assert!((p.value(ti, 0, 1) - (1.0 - expect)).abs() < 1e-6);
            // absorbing start never moves
            assert!((p.value(ti, 1, 1) - 1.0).abs() < 1e-6);
            assert!(p.value(ti, 1, 0).abs() < 1e-6);
        }
    }

    #[test]
    fn two_state_exponential_occupancy() {
        let rate = 1.3;
        let model = corpus::two_state_absorbing(rate);
        let times = grid();
        let occ = expected_occupancy(&model, &times, &CFG()).unwrap();
        for (ti, &t) in times.iter().enumerate() {
            let expect = (1.0 - (-rate * t).exp()) / rate;
            assert!((occ.value(ti, 0, 0) - expect).abs() < 1e-6, "t={t}");
            // absorbing start accumulates the full interval
            assert!((occ.value(ti, 1, 1) - t).abs() < 1e-5 * t.max(1.0));
        }
    }

    #[test]
    fn two_state_first_passage_transform() {
        let rate = 2.0;
        let model = corpus::two_state_absorbing(rate);
        let s = Complex64::new(0.37, 0.8);
        let g = first_passage_lt(&model, s).unwrap();
        let expect = rate / (rate + s);
        assert!((g.get(0, 1) - expect).norm() < 1e-12);
        // no return to the absorbing state
        assert!(g.get(1, 1).norm() < 1e-14);
        assert!(g.get(0, 0).norm() < 1e-14);
    }

    #[test]
    fn two_state_first_passage_and_expected_visits_agree() {
        let rate = 0.9;
        let model = corpus::two_state_absorbing(rate);
        let times = grid();
        let (cdf, _) = first_passage(&model, &times, &CFG()).unwrap();
        let visits = expected_visits(&model, &times, &CFG()).unwrap();
        for (ti, &t) in times.iter().enumerate() {
            let expect = 1.0 - (-rate * t).exp();
            assert!((cdf.value(ti, 0, 1) - expect).abs() < 1e-6, "t={t}");
            // with a single possible visit, M equals G
            assert!((visits.value(ti, 0, 1) - cdf.value(ti, 0, 1)).abs() < 1e-7);
        }
    }

    #[test]
    fn memoryless_hazard_is_flat() {
        let rate = 1.7;
        let model = corpus::two_state_absorbing(rate);
        let times = grid();
        let hz = conditional_hazard(&model, 0, 1, &times, &CFG()).unwrap();
        for (ti, &t) in times.iter().enumerate() {
            assert!(
                (hz.value(ti, 0, 0) - rate).abs() < 1e-4 * rate,
                "t={t}, got {}",
                hz.value(ti, 0, 0)
            );
        }
        assert_eq!(hz.start_state, Some(0));
        assert_eq!(hz.target_state, Some(1));
    }

    #[test]
    fn hazard_to_unreachable_state_is_undefined() {
        let model = corpus::two_state_absorbing(1.0);
        let err = conditional_hazard(&model, 1, 0, &grid(), &CFG()).unwrap_err();
        assert!(matches!(err, SmpError::UndefinedHazard(_)));
    }

    #[test]
    fn count_probabilities_absorbing_start() {
        let model = corpus::two_state_absorbing(1.0);
        let times = grid();
        let v0 = count_probability(&model, 0, &times, &CFG()).unwrap();
        for ti in 0..times.len() {
            // the start state is never re-entered
            assert!((v0.value(ti, 1, 1) - 1.0).abs() < 1e-6);
        }
        let v1 = count_probability(&model, 1, &times, &CFG()).unwrap();
        let (cdf, _) = first_passage(&model, &times, &CFG()).unwrap();
        for ti in 0..times.len() {
            // exactly one visit to the absorbing target iff it was reached
            assert!((v1.value(ti, 0, 1) - cdf.value(ti, 0, 1)).abs() < 1e-6);
        }
        let v2 = count_probability(&model, 2, &times, &CFG()).unwrap();
        for ti in 0..times.len() {
            assert!(v2.value(ti, 0, 1).abs() < 1e-6);
        }
    }

    #[test]
    fn count_cdf_saturates_in_k() {
        let model = corpus::two_state_cycle(1.0, 2.0);
        let times = vec![0.5, 1.0, 2.0];
        let v = count_cdf(&model, 40, &times, &CFG()).unwrap();
        for ti in 0..times.len() {
            for i in 0..2 {
                for j in 0..2 {
                    assert!(v.value(ti, i, j) > 1.0 - 1e-4);
                }
            }
        }
    }

    #[test]
    fn reach_probability_of_recurrent_cycle_is_one() {
        let model = corpus::two_state_cycle(1.0, 2.0);
        let reach = reach_probability(&model).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (reach.values.get(i, j) - 1.0).abs() < 1e-6,
                    "entry ({i},{j}) = {}",
                    reach.values.get(i, j)
                );
            }
        }
    }

    #[test]
    fn alternating_renewal_asymptotics() {
        let (fwd, back) = (1.0, 2.0);
        let model = corpus::two_state_cycle(fwd, back);
        let pi = asymptotic_probabilities(&model).unwrap();
        let expect_s1 = (1.0 / fwd) / (1.0 / fwd + 1.0 / back);
        for i in 0..2 {
            assert!(
                (pi.get(i, 0) - expect_s1).abs() < 1e-5,
                "row {i}: {}",
                pi.get(i, 0)
            );
            assert!((pi.row_sum(i) - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn absorbing_asymptotics_are_reach_probabilities() {
        let model = corpus::two_state_absorbing(0.5);
        let pi = asymptotic_probabilities(&model).unwrap();
        assert!((pi.get(0, 1) - 1.0).abs() < 1e-6);
        assert!(pi.get(0, 0).abs() < 1e-6);
        // absorbing start stays put
        assert_eq!(pi.get(1, 1), 1.0);
        assert_eq!(pi.get(1, 0), 0.0);
    }

    #[test]
    fn time_grid_is_validated() {
        let model = corpus::two_state_absorbing(1.0);
        assert!(state_probabilities(&model, &[], &CFG()).is_err());
        assert!(state_probabilities(&model, &[-1.0], &CFG()).is_err());
        assert!(state_probabilities(&model, &[2.0, 1.0], &CFG()).is_err());
        assert!(state_probabilities(&model, &[1.0, 1.0], &CFG()).is_err());
    }
}
