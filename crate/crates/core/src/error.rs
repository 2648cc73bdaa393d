use thiserror::Error;

/// Errors shared across the numerical layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("spectral parameter lies on the cut [0, +inf)")]
    SpectralParameterOnCut,
    #[error("argument in the closed left half-plane (Re x = {0:.3e})")]
    ArgumentLeftHalfPlane(f64),
    #[error("order outside the supported strip |Re mu| < 2 (Re mu = {0:.3})")]
    OrderOutOfStrip(f64),
    #[error("adaptive quadrature did not converge (last error estimate {0:.3e})")]
    NonConvergent(f64),
    #[error("tau grid would need {needed} nodes, cap is {cap}")]
    GridBudgetExceeded { needed: usize, cap: usize },
    #[error("kernel or vector built on an incompatible grid")]
    IncompatibleGrid,
    #[error("evaluation point at a vortex (r = {0:.3e})")]
    AtVortex(f64),
    #[error("coincident evaluation points")]
    CoincidentPoints,
    #[error("segment degenerate with respect to a cut")]
    DegenerateSegment,
    #[error("truncation tail estimate {tail:.3e} exceeds tolerance {tol:.3e}")]
    TailNotNegligible { tail: f64, tol: f64 },
    #[error("Krein matrix singular (|det| = {det:.3e})")]
    KreinMatrixSingular { det: f64 },
    #[error("conj(z) - w too small for the inner-product formula (|diff| = {0:.3e})")]
    CoincidentSpectralParameters(f64),
    #[error("spectral parameter must have nonzero imaginary part")]
    RealSpectralParameter,
    #[error("flux sum incompatible with requested spin component")]
    FluxSumIncompatible,
    #[error("power-separation fit ill-conditioned: {0}")]
    FitIllConditioned(String),
    #[error("radii must span at least one decade and contain two points")]
    RadiiTooCoarse,
    #[error("boundary data unreliable (fit residual {0:.3e})")]
    UnreliableBoundaryData(f64),
    #[error("flux {0} outside (0,1)")]
    FluxOutOfRange(f64),
    #[error("vortex separation must be positive")]
    DegenerateSeparation,
    #[error("resummation did not contract (ratio {0:.3})")]
    ResummationDiverges(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
