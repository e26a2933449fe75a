//! Retrodictive quantum mechanics for a two-level atom coupled to the
//! electromagnetic field.
//!
//! A measurement outcome, described by a POM element, is mapped backwards
//! through the atom's open-system evolution to a retrodictive density matrix
//! at the preparation time. Projecting that state onto the preparation
//! operators gives the probability of each preparation event.
//!
//! Three channels are supported: spontaneous emission into the vacuum,
//! a thermal bath, and a resonant coherent drive with spontaneous decay.

pub mod channels;
pub mod error;
pub mod qop;
pub mod retrodiction;
pub mod sampling;
pub mod scenarios;
pub mod selfcheck;

pub use channels::{build_superoperator, ChannelKind, ChannelParams, Superoperator};
pub use error::{Error, Result};
pub use qop::{BlochVector, DensityMatrix, Operator2, Pauli, PomElement, PomSet, PreparationEnsemble, Role};
pub use retrodiction::{
    forward_bayes, prep_prob_direct, preparation_posterior, retrodict_closed, retrodict_open, retrodict_pauli,
    PreparationPosterior, RetrodictionResult,
};
pub use scenarios::{figure_data, FigureId, FigureParams, ScenarioCurve};
