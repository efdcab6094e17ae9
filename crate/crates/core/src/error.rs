use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{value} is not an odd prime below 2^62")]
    NotAPrime { value: u64 },

    #[error(
        "residue table too large: p = {p} exceeds the cap {cap}; use the per-element legendre path"
    )]
    TableTooLarge { p: u64, cap: u64 },

    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("coefficient does not fit in 64 bits")]
    CoefficientOverflow,

    #[error("curve degree {degree} outside the supported range {min}..={max}")]
    DegreeOutOfRange {
        degree: usize,
        min: usize,
        max: usize,
    },

    #[error("polynomial {poly} has a repeated root (discriminant is zero)")]
    RepeatedRoot { poly: String },

    #[error("the zero polynomial does not define a curve")]
    ZeroPolynomial,

    #[error("p = {p} is a bad prime for this curve ({reason})")]
    BadPrime { p: u64, reason: BadReason },

    #[error("{what}: {p} exceeds the cap {cap}")]
    CapExceeded {
        what: &'static str,
        p: u64,
        cap: u64,
    },

    #[error("trace {a} at p = {p} violates the Hasse-Weil bound (counting bug)")]
    HasseViolation { p: u64, a: i64 },

    #[error("operation requires genus {expected}, curve has genus {actual}")]
    WrongGenus { expected: u32, actual: u32 },

    #[error("degenerate Möbius transform: ad - bc = 0")]
    DegenerateTransform,

    #[error("Möbius transform has a pole at infinity (c = 0)")]
    PoleAtInfinity,

    #[error("sigma does not permute the roots of f")]
    NotARootPermutation,

    #[error("f(sigma(infinity)) = 0")]
    RootAtSigmaInfinity,

    #[error("empty input")]
    EmptyInput,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed Sato-Tate table at line {line}: {message}")]
    MalformedTable { line: usize, message: String },
}

/// Why a prime was excluded from a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BadReason {
    Two,
    LeadingCoefficient,
    Discriminant,
}

impl BadReason {
    pub fn as_str(self) -> &'static str {
        match self {
            BadReason::Two => "p=2",
            BadReason::LeadingCoefficient => "lead",
            BadReason::Discriminant => "disc",
        }
    }
}

impl std::fmt::Display for BadReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
