//! Bundled example models used by the test and benchmark suites.
//!
//! `kao` is the nine-state coronary-patient flow model (hospital units plus
//! three absorbing discharge states) with Weibull waiting times measured in
//! hours; the small synthetic models have closed-form solutions and back
//! the cross-checks between the transform solvers and simulation.

use crate::distributions::WaitingTimeDistribution;
use crate::matrix::Matrix;
use crate::model::SmpModel;

/// Nine-state hospital patient-flow model. States: CCU, PCCU, ICU, MED,
/// SURG, AMB, and the absorbing ECF, HOME, DIED. Time unit: hours.
pub fn kao() -> SmpModel {
    let labels: Vec<String> = ["CCU", "PCCU", "ICU", "MED", "SURG", "AMB", "ECF", "HOME", "DIED"]
        .iter()
        .map(|s| s.to_string())
        .collect();

    let f1 = WaitingTimeDistribution::weibull(4.738025, 4566277818.13).unwrap();
    let f2 = WaitingTimeDistribution::weibull(2.207438, 14541.6089).unwrap();
    let f3 = WaitingTimeDistribution::weibull(0.766338, 16.6991).unwrap();
    let f4 = WaitingTimeDistribution::weibull(2.303331, 1017649.5158).unwrap();
    let f6 = WaitingTimeDistribution::weibull(1.623492, 4707.3132).unwrap();

    // (from, to, probability, distribution)
    let transitions: Vec<(usize, usize, f64, &WaitingTimeDistribution)> = vec![
        // CCU
        (0, 1, 0.7447, &f1),
        (0, 2, 0.0084, &f1),
        (0, 3, 0.1339, &f1),
        (0, 4, 0.0042, &f1),
        (0, 5, 0.0063, &f2),
        (0, 7, 0.0063, &f2),
        (0, 8, 0.0962, &f3),
        // PCCU
        (1, 0, 0.0192, &f4),
        (1, 2, 0.0137, &f1),
        (1, 3, 0.0247, &f4),
        (1, 4, 0.0027, &f1),
        (1, 5, 0.0027, &f1),
        (1, 6, 0.0577, &f4),
        (1, 7, 0.8298, &f4),
        (1, 8, 0.0495, &f6),
        // ICU
        (2, 1, 0.5833, &f4),
        (2, 3, 0.1667, &f1),
        (2, 4, 0.0833, &f1),
        (2, 8, 0.1667, &f3),
        // MED
        (3, 1, 0.0135, &f4),
        (3, 2, 0.0405, &f4),
        (3, 4, 0.0135, &f4),
        (3, 5, 0.0270, &f4),
        (3, 6, 0.0811, &f4),
        (3, 7, 0.7028, &f4),
        (3, 8, 0.1216, &f6),
        // SURG
        (4, 7, 1.0, &f4),
        // AMB
        (5, 7, 1.0, &f4),
    ];

    build(labels, 9, &transitions)
}

/// Two states, `1 -> 2` with an exponential wait; state 2 absorbs.
pub fn two_state_absorbing(rate: f64) -> SmpModel {
    let d = WaitingTimeDistribution::exponential(rate).unwrap();
    build(
        vec!["S1".into(), "S2".into()],
        2,
        &[(0, 1, 1.0, &d)],
    )
}

/// Three-state chain `1 -> 2 -> 3` with exponential waits; state 3 absorbs.
pub fn three_state_chain(rate1: f64, rate2: f64) -> SmpModel {
    let d1 = WaitingTimeDistribution::exponential(rate1).unwrap();
    let d2 = WaitingTimeDistribution::exponential(rate2).unwrap();
    build(
        vec!["S1".into(), "S2".into(), "S3".into()],
        3,
        &[(0, 1, 1.0, &d1), (1, 2, 1.0, &d2)],
    )
}

/// Two states alternating forever with exponential waits in each direction.
pub fn two_state_cycle(rate_forward: f64, rate_back: f64) -> SmpModel {
    let fwd = WaitingTimeDistribution::exponential(rate_forward).unwrap();
    let back = WaitingTimeDistribution::exponential(rate_back).unwrap();
    build(
        vec!["S1".into(), "S2".into()],
        2,
        &[(0, 1, 1.0, &fwd), (1, 0, 1.0, &back)],
    )
}

/// The synthetic models of the verification corpus (everything but `kao`).
pub fn synthetic_models() -> Vec<(&'static str, SmpModel)> {
    vec![
        ("two_state_absorbing", two_state_absorbing(0.5)),
        ("three_state_chain", three_state_chain(1.0, 2.0)),
        ("two_state_cycle", two_state_cycle(1.0, 2.0)),
    ]
}

fn build(
    labels: Vec<String>,
    n: usize,
    transitions: &[(usize, usize, f64, &WaitingTimeDistribution)],
) -> SmpModel {
    let mut p = Matrix::zeros(n, n);
    let mut dists: Vec<Option<WaitingTimeDistribution>> = vec![None; n * n];
    for &(i, j, prob, dist) in transitions {
        p.set(i, j, prob);
        dists[i * n + j] = Some(dist.clone());
    }
    SmpModel::validate(labels, p, dists).expect("bundled models are valid")
}
