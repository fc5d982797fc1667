//! Numerical solver for finite-state, continuous-time semi-Markov
//! processes.
//!
//! A model is an embedded transition matrix plus a waiting-time
//! distribution per transition. Quantities of interest — time-dependent
//! state probabilities, first-passage distributions, visit-count
//! probabilities, expected visits, occupancy times, hazards, and long-run
//! probabilities — are assembled as matrix expressions in the Laplace
//! domain and recovered numerically with the Abate–Whitt Euler algorithm.
//! A seeded Monte Carlo simulator provides independent estimates of the
//! same quantities for verification.
//!
//! ```
//! use smp_core::{corpus, quantities, EulerConfig};
//!
//! let model = corpus::two_state_absorbing(0.5);
//! let result =
//!     quantities::state_probabilities(&model, &[1.0, 2.0, 4.0], &EulerConfig::default())
//!         .unwrap();
//! // single exponential transition: P_11(t) = exp(-t/2)
//! assert!((result.value(0, 0, 0) - (-0.5f64).exp()).abs() < 1e-6);
//! ```

pub mod corpus;
pub mod distributions;
pub mod error;
pub mod matrix;
pub mod model;
pub mod quadrature;
pub mod quantities;
pub mod simulate;
pub mod transform;

pub use distributions::{DistributionKind, WaitingTimeDistribution};
pub use error::{Result, SmpError};
pub use matrix::{ComplexMatrix, Matrix};
pub use model::{SmpModel, StateClass, StateClassification, ValidateOptions};
pub use quantities::{QuantityKind, QuantityResult, ReachProbabilities};
pub use simulate::{Estimate, SimQuantity, TrajectoryRecord};
pub use transform::EulerConfig;
