//! Leggett-Garg tests with single and sequential weak measurements on a
//! polarization qubit.
//!
//! - [`qubit`]: states, ±1 observables, weak and sequential weak values.
//! - [`inequality`]: B3, B4 and B_n with their post-selected forms and
//!   macrorealist bounds.
//! - [`pointer`]: Gaussian pointer model of the two weak couplings.
//! - [`detector`]: pixel geometry, photon-count frames and their files.
//! - [`estimate`]: weak averages, weak values and B4 from counts.
//! - [`experiment`]: the simulate-then-estimate pipeline.

pub mod detector;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod inequality;
pub mod pointer;
pub mod qubit;

pub use detector::{
    derive_seed, read_frame, sample_frame, write_frame, AnglesPi, CountsGrid, DetectorGrid,
    FrameHeader, PixelProbabilities,
};
pub use error::{Error, Result};
pub use estimate::{
    bootstrap_se, compose_b4, grid_moments, postselected_weak_value, weak_averages, B4Estimate,
    Measured, MomentEstimate, PostselectedWeakValue, Statistic, WeakAverageEstimate,
};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentOutcome, RunKind};
pub use inequality::{
    anomaly_threshold, b3_postselected_form, b3_value, b4_closed_form, b4_postselected_form,
    b4_unconditioned, b4_value, bn_bounds, bn_postselected_decomposition, bn_value, correlators_b4,
    macrorealist_bounds_bruteforce, Classification, CorrelatorChain, CorrelatorSet, LgVerdict,
};
pub use pointer::{exact_moments, postselected_amplitude, MixtureAmplitude, PointerConfig};
pub use qubit::{
    expectation, observable_from_angle, sequential_weak_value, state_from_angle, transition_prob,
    weak_value, DichotomicObservable, QubitState, WeakValue,
};
