//! Monte Carlo simulation of the process: an independent estimator for
//! every quantity the transform solvers produce.
//!
//! Trajectories draw the next state from the embedded chain row and the
//! waiting time from the origin-and-destination distribution. Each
//! trajectory gets its own counter-based RNG stream derived from
//! `(seed, trajectory index)`, so results are reproducible regardless of
//! how work is scheduled across threads, and all aggregation is integer
//! arithmetic, so summation order cannot perturb the estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, SmpError};
use crate::model::SmpModel;

/// Exact per-state visit counts are kept up to this value per trajectory;
/// deeper counts are lumped and cannot be queried individually.
const VISIT_CAP: usize = 64;

/// One simulated path: the start state and every transition up to the
/// horizon. The initial occupancy at time 0 is implicit and does not
/// appear in `events`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub start_state: usize,
    /// `(entry_time, state)` pairs with strictly increasing entry times.
    pub events: Vec<(f64, usize)>,
    pub horizon: f64,
}

impl TrajectoryRecord {
    /// State occupied at time `t ≤ horizon`.
    pub fn state_at(&self, t: f64) -> usize {
        let mut state = self.start_state;
        for &(entry, next) in &self.events {
            if entry <= t {
                state = next;
            } else {
                break;
            }
        }
        state
    }

    /// Number of transitions into `state` by time `t`. The start state
    /// counts 0 until it is re-entered.
    pub fn visits_by(&self, state: usize, t: f64) -> usize {
        self.events
            .iter()
            .take_while(|&&(entry, _)| entry <= t)
            .filter(|&&(_, s)| s == state)
            .count()
    }
}

/// Simulate one trajectory. Deterministic in `seed`.
pub fn simulate_trajectory(
    model: &SmpModel,
    start_state: usize,
    horizon: f64,
    seed: u64,
) -> Result<TrajectoryRecord> {
    check_args(model, start_state, horizon)?;
    Ok(simulate_stream(model, start_state, horizon, seed, 0))
}

fn check_args(model: &SmpModel, start_state: usize, horizon: f64) -> Result<()> {
    if start_state >= model.n() {
        return Err(SmpError::Domain(format!(
            "start state {start_state} out of range for a {}-state model",
            model.n()
        )));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(SmpError::Domain(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    Ok(())
}

fn simulate_stream(
    model: &SmpModel,
    start_state: usize,
    horizon: f64,
    seed: u64,
    stream: u64,
) -> TrajectoryRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    let mut events = Vec::new();
    let mut state = start_state;
    let mut clock = 0.0f64;
    loop {
        if model.is_absorbing(state) {
            break;
        }
        let next = draw_next_state(model, state, &mut rng);
        let wait = model.dist(state, next).expect("validated").sample(&mut rng);
        let entry = clock + wait;
        if entry > horizon {
            break; // the pending transition happens after the horizon
        }
        events.push((entry, next));
        state = next;
        clock = entry;
    }
    TrajectoryRecord {
        start_state,
        events,
        horizon,
    }
}

/// Categorical draw from row `state`, normalized by the actual row sum so
/// rounded fixtures stay unbiased.
fn draw_next_state<R: Rng + ?Sized>(model: &SmpModel, state: usize, rng: &mut R) -> usize {
    let row_sum: f64 = (0..model.n()).map(|j| model.prob(state, j)).sum();
    let target: f64 = rng.random::<f64>() * row_sum;
    let mut cumulative = 0.0;
    let mut last_positive = None;
    for j in 0..model.n() {
        let pij = model.prob(state, j);
        if pij > 0.0 {
            cumulative += pij;
            last_positive = Some(j);
            if cumulative > target {
                return j;
            }
        }
    }
    last_positive.expect("non-absorbing row has a positive entry")
}

/// Which quantity a simulation estimate targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimQuantity {
    /// `P(Z(t) = j)`.
    StateProbability,
    /// `P(N_j(t) > 0)`.
    FirstPassage,
    /// `P(N_j(t) = k)`.
    CountProbability(u32),
    /// `P(N_j(t) <= k)`.
    CountCdf(u32),
    /// `E[N_j(t)]`.
    ExpectedVisits,
}

/// A point estimate with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n_trajectories: usize,
}

/// Integer tallies from an ensemble of trajectories, queryable for any
/// supported estimate without re-simulation.
#[derive(Clone, Debug)]
pub struct EnsembleSummary {
    n_states: usize,
    times: Vec<f64>,
    n_trajectories: usize,
    /// `[time][state]` occupancy indicators.
    occupancy: Vec<u64>,
    /// `[time][state][k]` exact visit-count histogram (`k < VISIT_CAP`);
    /// the last bucket lumps deeper counts.
    visit_hist: Vec<u64>,
    /// `[time][state]` sums of visit counts.
    visit_sum: Vec<u64>,
    /// `[time][state]` sums of squared visit counts.
    visit_sq_sum: Vec<u64>,
}

impl EnsembleSummary {
    fn zeros(n_states: usize, times: Vec<f64>, n_trajectories: usize) -> Self {
        let slots = times.len() * n_states;
        Self {
            n_states,
            times,
            n_trajectories,
            occupancy: vec![0; slots],
            visit_hist: vec![0; slots * VISIT_CAP],
            visit_sum: vec![0; slots],
            visit_sq_sum: vec![0; slots],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.occupancy.iter_mut().zip(other.occupancy) {
            *a += b;
        }
        for (a, b) in self.visit_hist.iter_mut().zip(other.visit_hist) {
            *a += b;
        }
        for (a, b) in self.visit_sum.iter_mut().zip(other.visit_sum) {
            *a += b;
        }
        for (a, b) in self.visit_sq_sum.iter_mut().zip(other.visit_sq_sum) {
            *a += b;
        }
        self
    }

    fn record(&mut self, trajectory: &TrajectoryRecord) {
        let n = self.n_states;
        let mut visits = vec![0usize; n];
        let mut state = trajectory.start_state;
        let mut next_event = 0usize;
        for (ti, &t) in self.times.iter().enumerate() {
            while next_event < trajectory.events.len() && trajectory.events[next_event].0 <= t {
                let (_, s) = trajectory.events[next_event];
                visits[s] += 1;
                state = s;
                next_event += 1;
            }
            let base = ti * n;
            self.occupancy[base + state] += 1;
            for j in 0..n {
                let v = visits[j];
                self.visit_hist[(base + j) * VISIT_CAP + v.min(VISIT_CAP - 1)] += 1;
                self.visit_sum[base + j] += v as u64;
                self.visit_sq_sum[base + j] += (v * v) as u64;
            }
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn n_trajectories(&self) -> usize {
        self.n_trajectories
    }

    /// Estimate `quantity` for `target` at time index `time_idx`.
    pub fn estimate(
        &self,
        quantity: SimQuantity,
        target: usize,
        time_idx: usize,
    ) -> Result<Estimate> {
        if target >= self.n_states {
            return Err(SmpError::Domain(format!(
                "target state {target} out of range for {} states",
                self.n_states
            )));
        }
        if time_idx >= self.times.len() {
            return Err(SmpError::Domain(format!(
                "time index {time_idx} out of range for {} grid points",
                self.times.len()
            )));
        }
        let n = self.n_trajectories as f64;
        let slot = time_idx * self.n_states + target;
        let hist = &self.visit_hist[slot * VISIT_CAP..(slot + 1) * VISIT_CAP];

        let binomial = |hits: u64| {
            let p = hits as f64 / n;
            Estimate {
                value: p,
                std_error: (p * (1.0 - p) / n).sqrt(),
                n_trajectories: self.n_trajectories,
            }
        };

        match quantity {
            SimQuantity::StateProbability => Ok(binomial(self.occupancy[slot])),
            SimQuantity::FirstPassage => Ok(binomial(self.n_trajectories as u64 - hist[0])),
            SimQuantity::CountProbability(k) => {
                if k as usize >= VISIT_CAP - 1 {
                    return Err(SmpError::Domain(format!(
                        "visit count k = {k} exceeds the simulation accumulator cap {}",
                        VISIT_CAP - 1
                    )));
                }
                Ok(binomial(hist[k as usize]))
            }
            SimQuantity::CountCdf(k) => {
                if k as usize >= VISIT_CAP - 1 {
                    return Err(SmpError::Domain(format!(
                        "visit count k = {k} exceeds the simulation accumulator cap {}",
                        VISIT_CAP - 1
                    )));
                }
                Ok(binomial(hist[..=k as usize].iter().sum()))
            }
            SimQuantity::ExpectedVisits => {
                let mean = self.visit_sum[slot] as f64 / n;
                let variance = if self.n_trajectories > 1 {
                    (self.visit_sq_sum[slot] as f64 - n * mean * mean) / (n - 1.0)
                } else {
                    0.0
                };
                Ok(Estimate {
                    value: mean,
                    std_error: (variance.max(0.0) / n).sqrt(),
                    n_trajectories: self.n_trajectories,
                })
            }
        }
    }
}

/// Simulate `n_trajectories` independent paths from `start_state` and tally
/// everything needed to estimate the supported quantities at each grid
/// time. Trajectories run to `max(times)`.
pub fn simulate_ensemble(
    model: &SmpModel,
    start_state: usize,
    times: &[f64],
    n_trajectories: usize,
    seed: u64,
) -> Result<EnsembleSummary> {
    if times.is_empty() {
        return Err(SmpError::Domain("time grid is empty".into()));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SmpError::Domain(
            "time grid must be strictly increasing".into(),
        ));
    }
    if n_trajectories == 0 {
        return Err(SmpError::Domain("need at least one trajectory".into()));
    }
    let horizon = *times.last().expect("nonempty");
    check_args(model, start_state, horizon)?;

    const CHUNK: usize = 1024;
    let n_chunks = n_trajectories.div_ceil(CHUNK);
    let summary = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(n_trajectories);
            let mut local = EnsembleSummary::zeros(model.n(), times.to_vec(), n_trajectories);
            for idx in lo..hi {
                let traj = simulate_stream(model, start_state, horizon, seed, idx as u64);
                local.record(&traj);
            }
            local
        })
        .reduce(
            || EnsembleSummary::zeros(model.n(), times.to_vec(), n_trajectories),
            EnsembleSummary::merge,
        );
    Ok(summary)
}

/// Estimate one quantity for one target over a time grid.
pub fn estimate(
    model: &SmpModel,
    start_state: usize,
    quantity: SimQuantity,
    target: usize,
    times: &[f64],
    n_trajectories: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    let summary = simulate_ensemble(model, start_state, times, n_trajectories, seed)?;
    (0..times.len())
        .map(|ti| summary.estimate(quantity, target, ti))
        .collect()
}
