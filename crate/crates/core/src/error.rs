use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes do not line up.
    Shape {
        op: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// An argument is outside the range the operation accepts.
    InvalidArgument(String),
    /// A structural precondition of a chain or basis does not hold.
    InvalidChain(String),
    /// A clustering produced an empty cluster.
    EmptyCluster { cluster: usize },
    /// A classification label is not below the number of classes.
    LabelOutOfRange { label: usize, num_classes: usize },
    /// A split part would be empty.
    EmptySplit(&'static str),
    /// Random sequential adsorption gave up.
    RejectionBudgetExceeded { accepted: usize, requested: usize },
    /// A hard-disk configuration could not be initialised.
    Infeasible(String),
    /// A numerical invariant was violated (e.g. a basis lost orthonormality).
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape {
                op,
                expected,
                found,
            } => write!(
                f,
                "{op}: shape mismatch, expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidChain(msg) => write!(f, "invalid chain: {msg}"),
            Error::EmptyCluster { cluster } => write!(f, "cluster {cluster} is empty"),
            Error::LabelOutOfRange { label, num_classes } => {
                write!(f, "label {label} out of range for {num_classes} classes")
            }
            Error::EmptySplit(part) => write!(f, "split part `{part}` is empty"),
            Error::RejectionBudgetExceeded {
                accepted,
                requested,
            } => write!(
                f,
                "random sequential adsorption exhausted its rejection budget after placing \
                 {accepted} of {requested} disks; lower the volume fraction or the point count"
            ),
            Error::Infeasible(msg) => write!(f, "infeasible configuration: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
