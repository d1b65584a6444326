use thiserror::Error;

use crate::BasisIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("frequency mismatch: {left} vs {right}")]
    FrequencyMismatch { left: f64, right: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("aliasing: {fraction:.3e} of the sampled power lies beyond harmonic {cutoff}")]
    Aliasing { fraction: f64, cutoff: usize },

    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("defective monodromy: eigenvector condition number {condition:.3e}")]
    DefectiveMonodromy { condition: f64 },

    #[error("singular basis at t = {t}")]
    SingularBasis { t: f64 },

    #[error("singular fundamental matrix at t = {t}")]
    SingularFundamental { t: f64 },

    #[error("eigensolver failed to converge")]
    EigenFailure,

    #[error("cutoff {cutoff} too small for perturbation bandwidth {bandwidth}")]
    CutoffTooSmall { cutoff: usize, bandwidth: usize },

    #[error("ambiguous eigenvector match for {target}: {best:.3} vs {second:.3}")]
    AmbiguousMatch {
        target: BasisIndex,
        best: f64,
        second: f64,
    },

    #[error("eigenvalue for {target} moved by {shift:.3e} when the cutoff grew by 2")]
    CutoffUnstable { target: BasisIndex, shift: f64 },

    #[error("small denominators for {target}: {}", format_gaps(.gaps))]
    SmallDenominator {
        target: BasisIndex,
        gaps: Vec<(BasisIndex, f64)>,
    },

    #[error("no convergence after {iterations} iterations (last step {last_step:.3e})")]
    NoConvergence {
        iterations: usize,
        last_iterate: num_complex::Complex64,
        last_step: f64,
    },

    #[error("iterate landed on unperturbed eigenvalue of {index}")]
    DenominatorHit { index: BasisIndex },
}

impl Error {
    /// Variant name, for terse tabular reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::FrequencyMismatch { .. } => "FrequencyMismatch",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Aliasing { .. } => "Aliasing",
            Error::NonFiniteState { .. } => "NonFiniteState",
            Error::DefectiveMonodromy { .. } => "DefectiveMonodromy",
            Error::SingularBasis { .. } => "SingularBasis",
            Error::SingularFundamental { .. } => "SingularFundamental",
            Error::EigenFailure => "EigenFailure",
            Error::CutoffTooSmall { .. } => "CutoffTooSmall",
            Error::AmbiguousMatch { .. } => "AmbiguousMatch",
            Error::CutoffUnstable { .. } => "CutoffUnstable",
            Error::SmallDenominator { .. } => "SmallDenominator",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DenominatorHit { .. } => "DenominatorHit",
        }
    }
}

fn format_gaps(gaps: &[(BasisIndex, f64)]) -> String {
    gaps.iter()
        .map(|(idx, g)| format!("{idx} (gap {g:.3e})"))
        .collect::<Vec<_>>()
        .join(", ")
}
