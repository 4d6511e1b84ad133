//! Two explicit semicocycle families: the set `D` over `Z_(4^n)` whose
//! head-overlap parity defines a tame Toeplitz shift with a Cantor set of
//! discontinuities, and the family over `Z_2` that embeds a binary language
//! along the times `t_n = 2^(l^n_0)`.

mod dset;
mod family;
mod language;
mod levels;

pub use dset::{
    build_d_stage, check_p1, check_p2, check_translate_disjointness, f5_eval, heads_and_special, translate_hits,
    toeplitz5_window, DPoint, DStage, DisjointnessReport, F5Value, HeadsReport, Violation,
};
pub use family::{build_f_family, default_zhat, eval_semicocycle, realize_prefix, FFamily, Realization};
pub use language::LanguageHandle;
pub use levels::{build_level_family, check_disjoint_supports, LevelFamily};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemicocycleError {
    #[error("stage {0} exceeds the supported maximum of 12")]
    StageTooLarge(usize),
    #[error("heads of length {m} are not stable at stage {stage}")]
    Unstable { m: usize, stage: usize },
    #[error("{count} special words of length {m}, expected exactly one")]
    NoUniqueSpecial { m: usize, count: usize },
    #[error("head must live on scale {0}")]
    ScaleMismatch(&'static str),
    #[error("evaluation at offset {n} is not certified at this depth")]
    InsufficientDepth { n: i64 },
    #[error("word {0:?} is not in the language")]
    NotInLanguage(String),
    #[error("no level interval realises {0:?} within the horizon")]
    HorizonExhausted(String),
    #[error("horizon {horizon} must exceed {needed}")]
    HorizonTooSmall { horizon: u64, needed: u64 },
    #[error("level rows do not reach {0}")]
    LevelsTooShort(u64),
    #[error("half-sum at level {n}, index {i} is not an integer")]
    Integrality { n: usize, i: usize },
    #[error("invalid word list: {0}")]
    BadLanguage(String),
    #[error("language only known up to length {0}")]
    LanguageDepth(usize),
    #[error("word {0:?} has no right extension")]
    NotRightExtendable(String),
    #[error("head is too short to decide the value")]
    Undetermined,
    #[error("head looks like an integer within its depth")]
    IntegerHead,
}

impl SemicocycleError {
    pub fn kind(&self) -> &'static str {
        match self {
            SemicocycleError::StageTooLarge(_) => "stage_too_large",
            SemicocycleError::Unstable { .. } => "unstable",
            SemicocycleError::NoUniqueSpecial { .. } => "no_unique_special",
            SemicocycleError::ScaleMismatch(_) => "scale_mismatch",
            SemicocycleError::InsufficientDepth { .. } => "insufficient_depth",
            SemicocycleError::NotInLanguage(_) => "not_in_language",
            SemicocycleError::HorizonExhausted(_) => "horizon_exhausted",
            SemicocycleError::HorizonTooSmall { .. } => "horizon_too_small",
            SemicocycleError::LevelsTooShort(_) => "levels_too_short",
            SemicocycleError::Integrality { .. } => "integrality",
            SemicocycleError::BadLanguage(_) => "bad_language",
            SemicocycleError::LanguageDepth(_) => "language_depth",
            SemicocycleError::NotRightExtendable(_) => "not_right_extendable",
            SemicocycleError::Undetermined => "undetermined",
            SemicocycleError::IntegerHead => "integer_head",
        }
    }
}
