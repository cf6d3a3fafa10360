use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is numerically singular at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("linear solve residual {residual:.3e} exceeds bound {bound:.3e}")]
    InaccurateSolve { residual: f64, bound: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error(
        "time-dependent Hamiltonian unsupported: loop closure violated by {mismatch:.3e} \
         with all four fields active and no closure target"
    )]
    ClosureViolated { mismatch: f64 },

    #[error("dressed analysis defined at zero detunings only")]
    NonZeroDetuning,

    #[error("closed-form eigenvalues inconsistent: z = {z:.3e} < 0")]
    ClosedFormInconsistent { z: f64 },

    #[error("non-unique or absent steady state: {0}")]
    NonUniqueSteadyState(String),

    #[error("step size {dt} too large: dt*|L| = {product:.3} (must be < 0.5); use a smaller dt")]
    StepTooLarge { dt: f64, product: f64 },

    #[error("invalid evolution request: {0}")]
    InvalidEvolution(String),

    #[error("density matrix invariant violated at step {step}: {detail}")]
    InvariantViolation { step: usize, detail: String },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("sweep failed at delta = {delta}: {source}")]
    SweepPoint {
        delta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown observable '{key}' (valid: {valid})")]
    UnknownObservable { key: String, valid: String },

    #[error("observable '{0}' is a population; a coherence key is required")]
    NotACoherence(String),

    #[error("need at least {needed} sweep points, got {actual}")]
    TooFewPoints { needed: usize, actual: usize },

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("unknown preset '{name}' (valid: {valid})")]
    UnknownPreset { name: String, valid: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
