use thiserror::Error;

pub type Result<T, E = GeomError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("grid too small for the stencil: {axis} has {n} samples, need at least {min}")]
    StencilUnderflow { axis: char, n: usize, min: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field shape {got:?} does not match grid shape {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("ambient dimension {got} not supported here (expected {expected})")]
    AmbientDimension { expected: usize, got: usize },

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("(f2,f2) is not constant over the grid (relative spread {spread:.3e})")]
    NonconstantQ { spread: f64 },

    #[error("ellipse of curvature is (numerically) a circle at ({i},{j}): |(f2,f2)| = {q_abs:.3e}")]
    CircularEllipse { i: usize, j: usize, q_abs: f64 },

    #[error("ellipse of curvature is degenerate at ({i},{j}): sinh(phi) = {sinh_phi:.3e}")]
    DegenerateEllipse { i: usize, j: usize, sinh_phi: f64 },

    #[error("omega + omega^eps = {value:.3e} <= 0 at ({i},{j})")]
    PositivityViolation { i: usize, j: usize, value: f64 },

    #[error("substitution e^omega = cosh(eta) needs e^omega >= 1, found {value:.6} at ({i},{j})")]
    SubstitutionDomain { i: usize, j: usize, value: f64 },

    #[error("t = {t} is not admissible: {reason}")]
    InadmissibleT { t: f64, reason: String },

    #[error("integrated frame drifted from its Gram matrix by {residual:.3e} at step {step}")]
    GramDrift { step: usize, residual: f64 },

    #[error("lift structure identity '{identity}' violated: residual {residual:.3e}")]
    StructureViolation { identity: String, residual: f64 },

    #[error("Lawson torus needs coprime positive (m,k), got ({m},{k})")]
    NotCoprime { m: u32, k: u32 },

    #[error("unknown catalog surface '{0}'")]
    UnknownCatalog(String),

    #[error("unknown export format '{0}'")]
    UnknownFormat(String),

    #[error("sequence stopped at index {index}: {source}")]
    SequenceBreak {
        index: i32,
        #[source]
        source: Box<GeomError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
