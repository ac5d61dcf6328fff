use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("grid must have an even number of nodes >= 4 and positive half length (got n = {n}, L = {half_length})")]
    InvalidGrid { n: usize, half_length: f64 },
    #[error("sample length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("alpha out of (0,2]: {0}")]
    AlphaOutOfRange(f64),
    #[error("u_minus must be ≤ u_plus (got {u_minus} > {u_plus})")]
    NonMonotoneEndStates { u_minus: f64, u_plus: f64 },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("Lebesgue exponent must satisfy p >= 1 (got {0})")]
    InvalidExponent(f64),
    #[error("kernel too wide for the domain: tail mass {tail_mass:.3e} beyond the synthesis window")]
    KernelTooWide { tail_mass: f64 },
    #[error("kernel under-resolved: Fourier multiplier {residual:.3e} at the Nyquist frequency")]
    KernelUnderResolved { residual: f64 },
    #[error("evaluation at x = 0 where the expression is singular")]
    SingularPoint,
    #[error("field tail deviates from the declared far field by {defect:.3e}")]
    TailMismatch { defect: f64 },
    #[error("time step {dt:.3e} violates the stability bound {bound:.3e}")]
    CflViolation { dt: f64, bound: f64 },
    #[error("radius split {r:.3e} is below the grid spacing {dx:.3e}")]
    RadiusBelowSpacing { r: f64, dx: f64 },
    #[error("flux is not convex on the state range; the Godunov flux requires convexity")]
    NonConvexFlux,
    #[error("solution blew up (non-finite value) at t = {t:.4}")]
    NonFinite { t: f64 },
    #[error("the spectral path requires a background that solves the linear fractional equation")]
    BackgroundNotLinear,
    #[error("self-similarity defect {defect:.3e} exceeds {limit:.3e}; refine the grid or reduce eps")]
    SelfSimilarityDefect { defect: f64, limit: f64 },
    #[error("empty or degenerate input: {0}")]
    Degenerate(String),
    #[error("decay fit needs at least {needed} samples (got {got})")]
    TooFewSamples { needed: usize, got: usize },
    #[error("not supported: {0}")]
    Unsupported(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, FracError>;

impl From<std::io::Error> for FracError {
    fn from(e: std::io::Error) -> Self {
        FracError::Io(e.to_string())
    }
}

/// Validates `alpha` in (0, 2].
pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(FracError::AlphaOutOfRange(alpha))
    }
}

/// Validates `u_minus <= u_plus`.
pub fn check_end_states(u_minus: f64, u_plus: f64) -> Result<()> {
    if u_minus.is_finite() && u_plus.is_finite() && u_minus <= u_plus {
        Ok(())
    } else {
        Err(FracError::NonMonotoneEndStates { u_minus, u_plus })
    }
}
