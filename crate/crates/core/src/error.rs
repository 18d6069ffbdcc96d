use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("search budget exceeded: {0}")]
    Budget(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("routing infeasible: {0}")]
    RoutingInfeasible(String),

    #[error("no codewords sampled in {total} shots (f_C = 0)")]
    NoCodewords { total: u64 },

    #[error("codespace population {population:e} is below the floor {floor:e}")]
    VanishingCodespace { population: f64, floor: f64 },

    #[error("no crossover in range: {0}")]
    NoCrossover(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
