use alloc::string::String;
use core::fmt;

/// Failure modes shared by every stage of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model parameter, configuration value or input state is out of range.
    InvalidParameter(String),
    /// Time integration produced a propagator whose unitarity defect exceeds
    /// the configured tolerance.
    PropagationFailure { t_start: f64, t_end: f64, defect: f64 },
    /// An eigensolver failed or returned values outside their admissible set.
    NumericalFailure(String),
    /// The quasienergy gap factor fell below the degeneracy tolerance.
    DegenerateQuasienergies { gap_factor: f64 },
    /// Two instantaneous energy levels (nearly) coincide at time `t`.
    DegenerateSpectrum { t: f64, gap: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Short machine-readable tag, used as the error marker in tabular output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::PropagationFailure { .. } => "PropagationFailure",
            Error::NumericalFailure(_) => "NumericalFailure",
            Error::DegenerateQuasienergies { .. } => "DegenerateQuasienergies",
            Error::DegenerateSpectrum { .. } => "DegenerateSpectrum",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::PropagationFailure { t_start, t_end, defect } => {
                write!(f, "propagation over [{t_start}, {t_end}] lost unitarity (defect {defect:e})")
            }
            Error::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
            Error::DegenerateQuasienergies { gap_factor } => {
                write!(f, "degenerate quasienergies (gap factor {gap_factor:e})")
            }
            Error::DegenerateSpectrum { t, gap } => {
                write!(f, "degenerate instantaneous spectrum at t = {t} (gap {gap:e})")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
