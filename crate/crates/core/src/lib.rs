//! Numerical toolkit for compactness analysis of composition operators on
//! the Hardy space `H^2` of the unit disk.
//!
//! For an analytic self-map `psi` of the disk the toolkit computes both
//! sides of the essential-norm identity — the Nevanlinna counting quantity
//! `sup N_psi(w) / (1 - |w|)` on circles `|w| = r` and the boundary
//! integral `(1 - |a|^2) * ∫ |1 - conj(a) psi|^{-2} dm` — verifies the
//! supporting identities (Littlewood-Paley, non-univalent change of
//! variables, Carleson-window equivalence, power-norm series), and renders
//! a compactness verdict.
//!
//! Maps are specified in a small textual language, e.g. `"monomial(2)"`,
//! `"scale(0.5, identity)"` or `"compose(monomial(2), mobius(0.3+0.1i))"`;
//! see [`mapspec`] for the grammar and [`cli`] for the command-line front
//! end.

pub mod carleson;
pub mod cli;
pub mod diskzeros;
pub mod essnorm;
pub mod hardy;
pub mod mapspec;
pub mod nevanlinna;
mod poly;
pub mod quad;
pub mod report;

pub use num_complex::Complex64;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Map-spec text failed to parse; `position` is a byte offset.
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    /// A parameter violates a domain invariant (modulus, range, depth, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Sampling found a point where the map leaves the closed unit disk.
    #[error("not a self-map: |psi({witness})| = {max_modulus}")]
    NotSelfMap { witness: Complex64, max_modulus: f64 },
    /// Boundary evaluation hit an essential singularity (atomic inner maps
    /// at their singular boundary point).
    #[error("singular boundary point near theta = {theta}")]
    SingularBoundaryPoint { theta: f64 },
    /// Two-radius Taylor cross-validation disagreed beyond tolerance.
    #[error("precision loss: cross-check disagreement {disagreement:e}")]
    PrecisionLoss { disagreement: f64 },
    /// A winding-number integral failed to stabilize near an integer.
    #[error("winding number did not stabilize near an integer (last value {value})")]
    BoundaryRootSuspected { value: f64 },
    /// Region closure is not contained in the open unit disk.
    #[error("region is not contained in the unit disk")]
    RegionOutsideDomain,
    /// Newton polishing failed to reach the requested residual.
    #[error("root polishing did not converge (residual {residual:e})")]
    NonconvergentRoot { residual: f64 },
    /// Located roots disagree with an argument-principle count.
    #[error("found {found} roots but winding count gives {winding}")]
    CertificationMismatch { found: u32, winding: i64 },
    /// `N_psi(psi(0))` is infinite (a preimage at the origin).
    #[error("counting function is infinite: w = psi(0)")]
    InfiniteValue,
    /// Quadrature hit its node cap before meeting tolerance; the last
    /// estimate is carried for flagged partial reports.
    #[error("quadrature did not converge (estimate {estimate})")]
    NoConvergence { estimate: f64 },
    /// Series truncation bound exceeds the requested relative tolerance;
    /// the caller must raise the truncation order.
    #[error("truncation bound {bound:e} too loose for value {value}")]
    TruncationTooLoose { bound: f64, value: f64 },
    /// Requested Carleson window size is below the atom resolution guard.
    #[error("window size below atom resolution (h = {h}, guard = {guard})")]
    ResolutionExceeded { h: f64, guard: f64 },
    /// CSV or report deserialization failure.
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Whether this error reports numerical non-convergence (as opposed to
    /// invalid input); the CLI degrades these to flagged reports.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NonconvergentRoot { .. }
                | Error::BoundaryRootSuspected { .. }
                | Error::CertificationMismatch { .. }
                | Error::PrecisionLoss { .. }
                | Error::TruncationTooLoose { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
