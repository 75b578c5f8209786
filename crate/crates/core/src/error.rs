use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix dimensions do not fit the operation.
    Dimension { expected: usize, found: usize },
    /// A scalar parameter is outside its domain.
    OutOfRange { name: &'static str, value: f64 },
    /// A setting count or index is not allowed.
    InvalidSetting { name: &'static str, value: usize },
    /// A matrix that should be a state or POVM element is not.
    InvalidOperator(&'static str),
    /// CHSH value above the quantum maximum.
    SuperQuantum(f64),
    /// A closed form is evaluated outside its domain.
    Domain(&'static str),
    /// Routed statistics violate an algebraic constraint.
    InconsistentStats(&'static str),
    /// A correlation table does not cover the requested settings.
    MissingSettings { expected: usize, found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::OutOfRange { name, value } => write!(f, "{name} = {value} is out of range"),
            Error::InvalidSetting { name, value } => write!(f, "invalid {name}: {value}"),
            Error::InvalidOperator(what) => write!(f, "invalid operator: {what}"),
            Error::SuperQuantum(s) => write!(f, "CHSH value {s} exceeds 2√2"),
            Error::Domain(what) => write!(f, "outside domain: {what}"),
            Error::InconsistentStats(what) => write!(f, "inconsistent statistics: {what}"),
            Error::MissingSettings { expected, found } => {
                write!(f, "table has {found} long-path settings, expected {expected}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutOfRange { name, value })
    }
}
