use thiserror::Error;

use crate::extended_bratteli::DiagramError;
use crate::gtheta::GraphError;
use crate::independence::IndependenceError;
use crate::odometer::OdometerError;
use crate::semicocycle::SemicocycleError;
use crate::substitution::SubstitutionError;

/// Crate-level error. Every variant wraps the error of one module so that
/// callers can report a module-qualified code.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Odometer(#[from] OdometerError),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Independence(#[from] IndependenceError),
    #[error(transparent)]
    Semicocycle(#[from] SemicocycleError),
}

impl Error {
    /// Stable `module.kind` code used in structured error reports.
    pub fn code(&self) -> String {
        match self {
            Error::Odometer(e) => format!("odometer.{}", e.kind()),
            Error::Substitution(e) => format!("substitution.{}", e.kind()),
            Error::Graph(e) => format!("gtheta.{}", e.kind()),
            Error::Diagram(e) => format!("extended_bratteli.{}", e.kind()),
            Error::Independence(e) => format!("independence.{}", e.kind()),
            Error::Semicocycle(e) => format!("semicocycle.{}", e.kind()),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
