use thiserror::Error;

/// Errors produced by mesh construction, stencil differentiation, assembly and
/// the verification tools.
///
/// The `Display` output of every variant starts with the variant name so the
/// command-line front end can report it verbatim on one line.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("InvalidStencil: {0}")]
    InvalidStencil(String),

    #[error("OrderTooHigh: derivative order {order} needs a stencil of more than {order} points, got {width}")]
    OrderTooHigh { order: usize, width: usize },

    /// `position` is the 1-based position of the first point that is not
    /// strictly greater than its predecessor.
    #[error("NotIncreasing: point {position} is not greater than the point before it")]
    NotIncreasing { position: usize },

    /// `position` is 1-based.
    #[error("NonFinite: point {position} is not a finite number")]
    NonFinite { position: usize },

    #[error("TooFew: at least 2 points are required, got {0}")]
    TooFew(usize),

    #[error("EmptyInterval: lower bound {a} must be below upper bound {b}")]
    EmptyInterval { a: f64, b: f64 },

    #[error("NoConvergence: Newton iteration for node {node} did not converge in {iterations} iterations")]
    NoConvergence { node: usize, iterations: usize },

    #[error("StencilTooWide: stencil width {width} exceeds mesh size {n}")]
    StencilTooWide { width: usize, n: usize },

    #[error("EvenStencil: stencil width {width} must be odd when smaller than the mesh size {n}")]
    EvenStencil { width: usize, n: usize },

    #[error("DimensionMismatch: expected length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("NonSquare: operand is {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("TooLarge: exact oracle accepts at most {limit} points, got {width}")]
    TooLarge { width: usize, limit: usize },

    #[error("DegenerateFit: fewer than 2 errors lie above the rounding floor (at least {floor:e}), the derivative is reproduced to rounding")]
    DegenerateFit { floor: f64 },

    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors that describe malformed input (bad counts, bad
    /// intervals, non-monotone coordinates) rather than a numerical or
    /// domain failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NotIncreasing { .. }
                | Error::NonFinite { .. }
                | Error::TooFew(_)
                | Error::EmptyInterval { .. }
                | Error::InvalidInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
