use thiserror::Error;

/// Errors produced across the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("FCIDUMP line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("SCF did not converge after {iterations} iterations (residual {residual:.3e})")]
    ScfNotConverged { iterations: usize, residual: f64 },

    #[error("degenerate orbitals at the Fermi level (HOMO {homo:.12}, LUMO {lumo:.12})")]
    DegenerateFermiLevel { homo: f64, lumo: f64 },

    #[error("non-integral impurity electron count {0:.8}")]
    NonIntegralElectrons(f64),

    #[error("vanishing MP2 denominator {value:.3e} for quartet (i={i}, j={j}, a={a}, b={b})")]
    DegenerateDenominator {
        i: usize,
        j: usize,
        a: usize,
        b: usize,
        value: f64,
    },

    #[error("line search failed after {iterations} BFGS iterations (best f = {best_value:.12})")]
    LineSearch {
        iterations: usize,
        best_point: Vec<f64>,
        best_value: f64,
        best_grad_norm: f64,
    },

    #[error("eigensolver did not converge: {0}")]
    EigenNotConverged(String),

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by bad user input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Parse { .. }
            | Error::Dimension(_)
            | Error::InvalidInput(_)
            | Error::Io(_)
            | Error::Json(_) => true,
            Error::Stage { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
