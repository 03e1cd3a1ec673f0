use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::junction::JunctionError;
use crate::kaon::KaonError;
use crate::qmath::QmathError;
use crate::scenarios::ScenarioError;

/// Any failure raised by the simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qmath: {0}")]
    Qmath(#[from] QmathError),
    #[error("junction: {0}")]
    Junction(#[from] JunctionError),
    #[error("kaon: {0}")]
    Kaon(#[from] KaonError),
    #[error("dynamics: {0}")]
    Dynamics(#[from] DynamicsError),
    #[error("scenario: {0}")]
    Scenario(#[from] ScenarioError),
}
