use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("marking count {0} outside the supported range 4..=16")]
    MarkingCount(usize),

    #[error("subset {{{subset}}} is not a valid generator for n = {n}")]
    InvalidGenerator { subset: String, n: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed design: {0}")]
    MalformedDesign(String),

    #[error("design axiom failed ({axiom}): witness {witness}")]
    DesignViolation { axiom: &'static str, witness: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("class has psi-type generator {{{0}}}; eliminate psi classes first")]
    RequiresBoundaryForm(String),

    #[error("divisor is not F-nef: pairs {value} with F-curve {curve}")]
    NotFNef { curve: String, value: i64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
