//! Model definition, validation, state classification, and the kernel
//! transform matrices every solver consumes.

use num_complex::Complex64;
use petgraph::graph::DiGraph;

use crate::distributions::WaitingTimeDistribution;
use crate::error::{Result, SmpError};
use crate::matrix::{ComplexMatrix, Matrix};

/// Options for model validation.
#[derive(Clone, Copy, Debug)]
pub struct ValidateOptions {
    /// Allowed deviation of each non-absorbing row sum from 1. Published
    /// matrices are often rounded to a few decimals; loosen this (rather
    /// than renormalizing, which would mask data-entry mistakes) to accept
    /// them as typed.
    pub row_sum_tolerance: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            row_sum_tolerance: 1e-9,
        }
    }
}

/// A validated finite-state semi-Markov process: `n` labeled states, an
/// embedded transition matrix `p`, and a waiting-time distribution for
/// every allowed transition. Immutable once built.
#[derive(Clone, Debug)]
pub struct SmpModel {
    labels: Vec<String>,
    p: Matrix,
    dists: Vec<Option<WaitingTimeDistribution>>,
    absorbing: Vec<bool>,
}

/// Per-state classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateClass {
    /// Once entered, never left (zero transition row).
    Absorbing,
    /// Eventually left forever.
    Transient,
    /// Returned to with probability one.
    Recurrent,
}

/// Classification of every state of a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateClassification {
    classes: Vec<StateClass>,
}

impl StateClassification {
    pub fn class(&self, state: usize) -> StateClass {
        self.classes[state]
    }

    pub fn classes(&self) -> &[StateClass] {
        &self.classes
    }

    pub fn is_absorbing(&self, state: usize) -> bool {
        self.classes[state] == StateClass::Absorbing
    }

    pub fn absorbing_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.iter_of(StateClass::Absorbing)
    }

    pub fn transient_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.iter_of(StateClass::Transient)
    }

    pub fn recurrent_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.iter_of(StateClass::Recurrent)
    }

    fn iter_of(&self, class: StateClass) -> impl Iterator<Item = usize> + '_ {
        self.classes
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == class)
            .map(|(i, _)| i)
    }
}

impl SmpModel {
    /// Validate a raw model description with default options.
    ///
    /// `dists` is row-major with `labels.len()²` entries, present exactly
    /// where the corresponding transition probability is positive. Every
    /// violation found is reported, not just the first.
    pub fn validate(
        labels: Vec<String>,
        p: Matrix,
        dists: Vec<Option<WaitingTimeDistribution>>,
    ) -> Result<Self> {
        Self::validate_with(labels, p, dists, ValidateOptions::default())
    }

    /// Validate with explicit options.
    pub fn validate_with(
        labels: Vec<String>,
        p: Matrix,
        dists: Vec<Option<WaitingTimeDistribution>>,
        opts: ValidateOptions,
    ) -> Result<Self> {
        let n = labels.len();
        let mut violations = Vec::new();

        if n == 0 {
            violations.push("model must have at least one state".to_string());
        }
        if p.rows() != n || p.cols() != n {
            violations.push(format!(
                "transition matrix is {}x{}, expected {n}x{n}",
                p.rows(),
                p.cols()
            ));
        }
        if dists.len() != n * n {
            violations.push(format!(
                "distribution table has {} entries, expected {}",
                dists.len(),
                n * n
            ));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                violations.push(format!("state {i} has an empty label"));
            }
            if labels[..i].contains(label) {
                violations.push(format!("duplicate state label `{label}`"));
            }
        }
        if !violations.is_empty() {
            return Err(SmpError::Validation { violations });
        }

        let mut absorbing = vec![false; n];
        for i in 0..n {
            let label = &labels[i];
            for j in 0..n {
                let pij = p.get(i, j);
                if !pij.is_finite() || pij < 0.0 {
                    violations.push(format!(
                        "p[{label} -> {}] = {pij} is not a valid probability",
                        labels[j]
                    ));
                }
            }
            if p.get(i, i) != 0.0 {
                violations.push(format!(
                    "self-transition: p[{label} -> {label}] = {} (must be 0)",
                    p.get(i, i)
                ));
            }
            let row_sum = p.row_sum(i);
            let all_zero = p.row(i).iter().all(|&v| v == 0.0);
            if all_zero {
                absorbing[i] = true;
            } else if (row_sum - 1.0).abs() > opts.row_sum_tolerance {
                violations.push(format!(
                    "row {label} sums to {row_sum} (must be 1 within {:e}, or identically 0 \
                     for an absorbing state)",
                    opts.row_sum_tolerance
                ));
            }
            for j in 0..n {
                let has_dist = dists[i * n + j].is_some();
                let has_prob = p.get(i, j) > 0.0;
                match (has_prob, has_dist) {
                    (true, false) => violations.push(format!(
                        "transition {label} -> {} has probability {} but no waiting-time \
                         distribution",
                        labels[j],
                        p.get(i, j)
                    )),
                    (false, true) => violations.push(format!(
                        "transition {label} -> {} has a distribution but zero probability",
                        labels[j]
                    )),
                    _ => {}
                }
            }
        }

        if violations.is_empty() {
            Ok(Self {
                labels,
                p,
                dists,
                absorbing,
            })
        } else {
            Err(SmpError::Validation { violations })
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, state: usize) -> &str {
        &self.labels[state]
    }

    /// Index of the state with the given label.
    pub fn state_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| SmpError::UnknownState(label.to_string()))
    }

    pub fn transition_matrix(&self) -> &Matrix {
        &self.p
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.p.get(from, to)
    }

    pub fn dist(&self, from: usize, to: usize) -> Option<&WaitingTimeDistribution> {
        self.dists[from * self.n() + to].as_ref()
    }

    pub fn is_absorbing(&self, state: usize) -> bool {
        self.absorbing[state]
    }

    /// True if any transition uses an empirical distribution; inversion
    /// accuracy is then not guaranteed because the kernel transform is no
    /// longer that of a smooth distribution.
    pub fn has_empirical(&self) -> bool {
        use crate::distributions::DistributionKind;
        self.dists.iter().flatten().any(|d| {
            matches!(d.kind(), DistributionKind::Empirical { .. })
        })
    }

    /// Mean holding time of `state`: `Σ_j p_ij · E[wait i->j]`; 0 for an
    /// absorbing state.
    pub fn mean_holding_time(&self, state: usize) -> f64 {
        (0..self.n())
            .filter_map(|j| {
                let pij = self.prob(state, j);
                (pij > 0.0).then(|| pij * self.dist(state, j).expect("validated").mean())
            })
            .sum()
    }

    /// Classify every state. Absorbing states are those with zero rows;
    /// among the rest, a state is recurrent exactly when its strongly
    /// connected component has no edge leaving it.
    pub fn classify_states(&self) -> StateClassification {
        let n = self.n();
        let mut graph = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
        for i in 0..n {
            for j in 0..n {
                if self.prob(i, j) > 0.0 {
                    graph.add_edge(nodes[i], nodes[j], ());
                }
            }
        }

        let sccs = petgraph::algo::tarjan_scc(&graph);
        let mut component = vec![0usize; n];
        for (c, scc) in sccs.iter().enumerate() {
            for &node in scc {
                component[node.index()] = c;
            }
        }
        let mut leaves_component = vec![false; sccs.len()];
        for i in 0..n {
            for j in 0..n {
                if self.prob(i, j) > 0.0 && component[i] != component[j] {
                    leaves_component[component[i]] = true;
                }
            }
        }

        let classes = (0..n)
            .map(|i| {
                if self.absorbing[i] {
                    StateClass::Absorbing
                } else if leaves_component[component[i]] {
                    StateClass::Transient
                } else {
                    StateClass::Recurrent
                }
            })
            .collect();
        StateClassification { classes }
    }

    /// Kernel transform `q̃(s)`: entry `(i, j)` is `p_ij · f̃_ij(s)`, zero
    /// where no transition exists.
    pub fn kernel_lt(&self, s: Complex64) -> Result<ComplexMatrix> {
        let n = self.n();
        let mut q = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let pij = self.prob(i, j);
                if pij > 0.0 {
                    let lt = self.dist(i, j).expect("validated").laplace_transform(s)?;
                    q.set(i, j, pij * lt);
                }
            }
        }
        Ok(q)
    }

    /// Holding-time transform `h̃(s)`: diagonal matrix whose entry `(i, i)`
    /// is the row sum of `q̃(s)`; zero for absorbing states.
    pub fn holding_lt(&self, s: Complex64) -> Result<ComplexMatrix> {
        Ok(holding_from_kernel(&self.kernel_lt(s)?))
    }
}

/// Diagonal holding-time transform derived from an already-evaluated kernel
/// matrix; exact row sums by construction.
pub fn holding_from_kernel(kernel: &ComplexMatrix) -> ComplexMatrix {
    let n = kernel.dim();
    let diag: Vec<Complex64> = (0..n)
        .map(|i| kernel.row(i).iter().sum::<Complex64>())
        .collect();
    ComplexMatrix::from_diagonal(&diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn exp_dist(rate: f64) -> Option<WaitingTimeDistribution> {
        Some(WaitingTimeDistribution::exponential(rate).unwrap())
    }

    #[test]
    fn kao_model_validates() {
        let model = corpus::kao();
        assert_eq!(model.n(), 9);
        // row CCU as printed sums exactly to 1
        assert!((model.transition_matrix().row_sum(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_transition_is_rejected() {
        let labels = vec!["a".into(), "b".into()];
        let p = Matrix::from_rows(&[vec![0.5, 0.5], vec![0.0, 0.0]]);
        let dists = vec![exp_dist(1.0), exp_dist(1.0), None, None];
        let err = SmpModel::validate(labels, p, dists).unwrap_err();
        match err {
            SmpError::Validation { violations } => {
                assert!(violations.iter().any(|v| v.contains("self-transition")));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_row_sum_is_reported_with_label() {
        let labels = vec!["up".into(), "down".into()];
        let p = Matrix::from_rows(&[vec![0.0, 0.9], vec![0.0, 0.0]]);
        let dists = vec![None, exp_dist(1.0), None, None];
        let err = SmpModel::validate(labels, p, dists).unwrap_err();
        match err {
            SmpError::Validation { violations } => {
                assert!(violations.iter().any(|v| v.contains("up") && v.contains("0.9")));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn all_violations_are_collected() {
        let labels = vec!["a".into(), "b".into()];
        // self-transition AND missing distribution AND bad row sum
        let p = Matrix::from_rows(&[vec![0.2, 0.3], vec![0.0, 0.0]]);
        let dists = vec![None, None, None, exp_dist(1.0)];
        match SmpModel::validate(labels, p, dists).unwrap_err() {
            SmpError::Validation { violations } => assert!(violations.len() >= 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kao_classification() {
        let model = corpus::kao();
        let classes = model.classify_states();
        let absorbing: Vec<_> = classes.absorbing_states().collect();
        let expected: Vec<usize> = ["ECF", "HOME", "DIED"]
            .iter()
            .map(|l| model.state_index(l).unwrap())
            .collect();
        assert_eq!(absorbing, expected);
        assert_eq!(classes.transient_states().count(), 6);
        assert_eq!(classes.recurrent_states().count(), 0);
    }

    #[test]
    fn repairable_system_classification() {
        // working <-> under repair, with an unrepairable failure state
        let labels = vec!["working".into(), "repair".into(), "failed".into()];
        let p = Matrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.9, 0.0, 0.1],
            vec![0.0, 0.0, 0.0],
        ]);
        let mut dists = vec![None; 9];
        dists[1] = exp_dist(1.0);
        dists[3] = exp_dist(2.0);
        dists[5] = exp_dist(2.0);
        let model = SmpModel::validate(labels, p, dists).unwrap();
        let classes = model.classify_states();
        assert_eq!(classes.class(0), StateClass::Transient);
        assert_eq!(classes.class(1), StateClass::Transient);
        assert_eq!(classes.class(2), StateClass::Absorbing);
    }

    #[test]
    fn closed_cycle_is_recurrent() {
        let model = corpus::two_state_cycle(1.0, 2.0);
        let classes = model.classify_states();
        assert_eq!(classes.class(0), StateClass::Recurrent);
        assert_eq!(classes.class(1), StateClass::Recurrent);
    }

    #[test]
    fn kernel_at_zero_is_the_transition_matrix() {
        let model = corpus::kao();
        let q = model.kernel_lt(Complex64::ZERO).unwrap();
        for i in 0..model.n() {
            for j in 0..model.n() {
                assert!((q.get(i, j).re - model.prob(i, j)).abs() < 1e-12);
                assert_eq!(q.get(i, j).im, 0.0);
            }
        }
    }

    #[test]
    fn kernel_and_holding_of_two_state_exponential() {
        let model = corpus::two_state_absorbing(3.0);
        let s = Complex64::new(1.0, 0.0);
        let q = model.kernel_lt(s).unwrap();
        assert!((q.get(0, 1).re - 0.75).abs() < 1e-14);
        let h = model.holding_lt(s).unwrap();
        assert!((h.get(0, 0).re - 0.75).abs() < 1e-14);
        assert_eq!(h.get(1, 1), Complex64::ZERO);
        assert_eq!(h.get(0, 1), Complex64::ZERO);
    }

    #[test]
    fn holding_diagonal_equals_kernel_row_sums_exactly() {
        let model = corpus::kao();
        for s in [Complex64::new(0.01, 0.0), Complex64::new(0.5, 3.1)] {
            let q = model.kernel_lt(s).unwrap();
            let h = model.holding_lt(s).unwrap();
            for i in 0..model.n() {
                let row_sum: Complex64 = q.row(i).iter().sum();
                assert!((h.get(i, i) - row_sum).norm() < 1e-15);
            }
        }
    }
}
