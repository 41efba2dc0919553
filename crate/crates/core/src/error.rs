use std::path::PathBuf;

use thiserror::Error;

use crate::boolring::VarId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable {0} is not assigned")]
    Unassigned(VarId),

    #[error("polynomial of degree {degree} in a linear substitution set")]
    NotLinear { degree: isize },

    #[error("linear set is not interreduced: leading variable {0} occurs more than once")]
    NotInterreduced(VarId),

    #[error("polynomial of degree {degree} exceeds the degree bound {bound}")]
    DegreeExceeded { degree: usize, bound: usize },

    #[error("invalid variable name {0:?}")]
    InvalidName(String),

    #[error("duplicate variable name {0:?}")]
    DuplicateName(String),

    #[error("unknown variable {0:?}")]
    UnknownVariable(String),

    #[error("ANF parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid hex string {0:?}")]
    Hex(String),

    #[error("shift {shift} out of range for a {width}-bit word")]
    ShiftOutOfRange { shift: u32, width: u32 },

    #[error("round count {0} outside 1..=16")]
    Rounds(usize),

    #[error("trace covers {trace} rounds but the model has {model}")]
    RoundMismatch { trace: usize, model: usize },

    #[error("invalid oracle specification {0:?} (expected t, w, h:<B> or nrv:<B>)")]
    OracleSpec(String),

    #[error("invalid block permutation: {0}")]
    Permutation(String),

    #[error("guess count {0} exceeds 256 key variables")]
    GuessCount(usize),

    #[error("enumeration over {0} variables exceeds the brute-force budget of 24")]
    BruteForceBudget(usize),

    #[error("linear basis leaves variable {0} undetermined; the system has more than one solution")]
    Underdetermined(VarId),

    #[error("deadline exceeded")]
    Timeout,

    #[error("no variable left to guess at depth {0}")]
    GuessOrderExhausted(usize),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
