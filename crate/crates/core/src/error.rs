use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("{what}: argument {value} outside the admissible domain")]
    Domain { what: &'static str, value: f64 },

    #[error("quadrature did not reach tolerance {tol:e} on [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64, tol: f64 },

    #[error("field length {got} does not match grid with {expected} cells")]
    FieldLength { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),

    /// A trial step left the admissible density range; the caller should retry with a smaller dt.
    #[error("step rejected: density {rho} at cell {cell} left (0, 1)")]
    StepRejected { cell: usize, rho: f64 },

    #[error("positivity/ceiling failure at t = {time} (cell {cell}) after {halvings} dt halvings")]
    PositivityFailure { time: f64, cell: usize, halvings: u32 },

    #[error("singular tridiagonal system (pivot {pivot} at row {row})")]
    SingularMatrix { row: usize, pivot: f64 },

    #[error("hypothesis {hypothesis} violated: {detail}")]
    Validation { hypothesis: &'static str, detail: String },

    #[error("sticky-blocks oracle: {0}")]
    Oracle(String),

    #[error("power-law fit: {0}")]
    Fit(String),

    #[error("config: {message}")]
    Config { key: Option<String>, message: String },

    #[error("i/o: {0}")]
    Io(String),

    #[error("sweep member epsilon = {epsilon}: {source}")]
    SweepMember { epsilon: f64, source: Box<Error> },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SweepMember { source, .. } => source.kind(),
            Error::Config { .. } => "config",
            Error::Validation { .. }
            | Error::InvalidGrid(_)
            | Error::InvalidParams(_)
            | Error::Domain { .. }
            | Error::GridMismatch => "validation",
            Error::Io(_) => "io",
            _ => "solver",
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "config" => 3,
            "validation" => 4,
            "solver" => 5,
            _ => 6,
        }
    }
}
