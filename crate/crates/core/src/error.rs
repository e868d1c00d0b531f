use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("proportion must lie strictly in (0, 1), got {0}")]
    InvalidProportion(f64),

    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("standard error must be positive and finite, got {0}")]
    InvalidStandardError(f64),

    #[error("log-odds undefined for zero counts (leave={n_leave}, remain={n_remain})")]
    ZeroCount { n_leave: u64, n_remain: u64 },

    #[error("turnout {0} cannot yield an absolute majority of the electorate (need turnout in (0.5, 1])")]
    MajorityUnattainable(f64),

    #[error("{what} must lie in (0, 1], got {value}")]
    OutOfUnitRange { what: &'static str, value: f64 },

    #[error("at least {needed} regions required, got {got}")]
    TooFewRegions { needed: usize, got: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("infeasible beta parameters: need 0 <= tau2 < mu*(1-mu), got mu={mu}, tau2={tau2}")]
    InfeasibleBeta { mu: f64, tau2: f64 },

    #[error("invalid generator config: {0}")]
    InvalidConfig(String),

    #[error("grouping: {0}")]
    Grouping(String),

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("row {row} ({area}): {message}")]
    RowInvariant {
        row: usize,
        area: String,
        message: String,
    },

    #[error("unknown region code {code:?} at row {row}")]
    UnknownRegion { row: usize, code: String },

    #[error("forest plot: {0}")]
    Plot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
