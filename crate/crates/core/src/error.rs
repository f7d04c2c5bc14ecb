use thiserror::Error;

use crate::chords::ChordError;
use crate::filtered_complex::ComplexError;
use crate::floer::FloerError;
use crate::local_model::ModelError;
use crate::persistence::PersistenceError;
use crate::quasiflat::QuasiflatError;

/// Umbrella error for callers that mix several modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Chord(#[from] ChordError),
    #[error(transparent)]
    Floer(#[from] FloerError),
    #[error(transparent)]
    Quasiflat(#[from] QuasiflatError),
}
