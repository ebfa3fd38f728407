use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix shape {rows}x{cols} does not hold {len} entries")]
    BadShape { rows: usize, cols: usize, len: usize },

    #[error("linear part is singular")]
    Singular,

    #[error("map is not block triangular: nonzero upper-right entries at {0:?}")]
    NotBlockTriangular(Vec<(usize, usize)>),

    #[error("invalid block split: base {base}, fiber {fiber}")]
    InvalidSplit { base: usize, fiber: usize },

    #[error("generator index {index} out of range for {count} generators")]
    GeneratorOutOfRange { index: usize, count: usize },

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("relator {relator} does not act trivially in the coefficient module")]
    NotAModule { relator: usize },

    #[error("representation fails on relators {0:?}")]
    InvalidRepresentation(Vec<usize>),

    #[error("gauge pair does not intertwine the action at generator {0}")]
    NotIntertwining(usize),

    #[error("invalid gauge element: {0}")]
    InvalidGauge(String),

    #[error("unsupported holonomy: {0}")]
    UnsupportedHolonomy(String),

    #[error("invalid fibration: {0}")]
    InvalidFibration(String),

    #[error("cochain is not a cocycle (degree {degree})")]
    NotACocycle { degree: usize },

    #[error("defect is not translational on simplices {0:?}")]
    NotTranslational(Vec<Vec<usize>>),

    #[error("invalid nerve: {0}")]
    InvalidNerve(String),

    #[error("invalid local system: {0}")]
    InvalidSystem(String),

    #[error("missing value on simplex {0:?}")]
    MissingSimplex(Vec<usize>),

    #[error("invalid ladder: {0}")]
    InvalidLadder(String),

    #[error("at rung {rung}: {source}")]
    AtRung { rung: usize, source: Box<Error> },

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("value {0} is not an integer")]
    NotInteger(Rational),
}

impl Error {
    pub(crate) fn at_rung(self, rung: usize) -> Error {
        Error::AtRung { rung, source: Box::new(self) }
    }
}
