use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A 2x2 complex matrix is not the image of a quaternion.
    NotInM { deviation: f64 },
    /// Pairwise imaginary distance exceeded the configured guard.
    BlowUp { distance: f64, limit: f64 },
    MaxStepsExceeded { t: f64, steps: usize },
    StepSizeUnderflow { t: f64, dt: f64 },
    /// The bounded real-part spread premise failed at time `t`.
    HypothesisViolated { t: f64, spread: f64, bound: f64 },
    /// Coupling is not below the frequency gap, so no off-axis equilibrium exists.
    NotWeak { omega: f64, lambda: f64 },
    /// No return to the section was found before the time or step cap.
    NoReturn { t: f64 },
    NotEquilibrium { residual: f64 },
    InvalidArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotInM { deviation } => {
                write!(f, "matrix is not a quaternion image (deviation {deviation:e})")
            }
            Error::BlowUp { distance, limit } => write!(
                f,
                "imaginary distance {distance} exceeds blow-up guard {limit}"
            ),
            Error::MaxStepsExceeded { t, steps } => {
                write!(f, "step limit {steps} reached at t = {t}")
            }
            Error::StepSizeUnderflow { t, dt } => {
                write!(f, "step size {dt:e} underflow at t = {t}")
            }
            Error::HypothesisViolated { t, spread, bound } => write!(
                f,
                "real-part spread {spread} exceeds {bound} at t = {t}"
            ),
            Error::NotWeak { omega, lambda } => write!(
                f,
                "coupling {lambda} is not weak relative to frequency gap {omega}"
            ),
            Error::NoReturn { t } => write!(f, "no return to the section by t = {t}"),
            Error::NotEquilibrium { residual } => {
                write!(f, "point is not an equilibrium (residual {residual:e})")
            }
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
        }
    }
}

impl core::error::Error for Error {}
