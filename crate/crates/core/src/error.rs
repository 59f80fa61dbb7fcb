use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("malformed document: {0}")]
    Format(String),
    #[error("tet id {0} out of range")]
    TetOutOfRange(usize),
    #[error("face {face} of tet {tet} is glued to two different targets")]
    DuplicateGluing { tet: usize, face: u8 },
    #[error("gluing at face {face} of tet {tet}: {reason}")]
    BadBijection { tet: usize, face: u8, reason: String },
    #[error("triangulation is not a valid veering triangulation: {0}")]
    Invalid(String),
    #[error("taut but not veering: {0}")]
    NotVeering(String),
    #[error("not a veering boundary pattern: {0}")]
    BoundaryPattern(String),
    #[error("structural error: {0}")]
    Structure(String),
    #[error("invalid tube system: {0}")]
    Tubes(String),
    #[error("not a cocycle: {0}")]
    NotCocycle(String),
    #[error("negative weight {weight} on face {face}")]
    NegativeWeight { face: usize, weight: i64 },
    #[error("class pairs negatively with the core of tube {cusp} (a = {a}); it is not relatively carried with this tube system")]
    NegativeCore { cusp: usize, a: i64 },
    #[error("class does not extend over the filling of cusp {0}")]
    NotFilled(usize),
    #[error("flip unavailable at tet {0}: a bottom face has weight 0")]
    FlipUnavailable(usize),
    #[error("exceeds desk scale: {0}")]
    DeskScale(String),
    #[error("invalid arc system: {0}")]
    ArcSystem(String),
    #[error("arc system admits no blowup: {0}")]
    NoBlowup(String),
    #[error("not a closed cycle: {0}")]
    NotClosed(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
}
