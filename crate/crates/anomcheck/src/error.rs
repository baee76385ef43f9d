//! Error type shared by every layer of the crate.
//!
//! All preconditions are enforced eagerly: an operation that cannot produce a
//! mathematically meaningful answer returns an `Err` instead of silently
//! returning a default.  In particular, asking a truncated q-series for a
//! coefficient beyond its truncation order is an error, never zero.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two elements were combined that live in different polynomial rings.
    #[error("elements belong to different ring contexts")]
    ContextMismatch,

    /// `expNilpotent` (or a series exponential) was applied to an element
    /// whose degree-0 part is nonzero, so the power series would not
    /// terminate under degree truncation.
    #[error("element has a nonzero degree-0 part and is not nilpotent")]
    NotNilpotent,

    /// `invertUnit` requires the element to be `1 + (positive-degree part)`.
    #[error("element is not of the form 1 + nilpotent, cannot invert")]
    NotUnit,

    /// The constant coefficient of a series (or the degree-0 part of a ring
    /// element) is not an invertible scalar.
    #[error("constant part is not an invertible scalar")]
    NonInvertibleConstant,

    /// A substitution assigned a generator a value that is not homogeneous
    /// of the generator's degree.
    #[error("value assigned to `{generator}` is not homogeneous of degree {degree}")]
    InhomogeneousSubstitution { generator: String, degree: u32 },

    /// A generator name was looked up that the context does not declare.
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    /// A q-series coefficient outside the known truncation range was
    /// requested.  Exponents are tracked in half-integer units, so `h`
    /// denotes the coefficient of q^(h/2).
    #[error("coefficient of q^({h}/2) requested, but the series is only known for exponents below q^({order}/2)")]
    CoefficientOutOfRange { h: u32, order: u32 },

    /// Two q-series with different coefficient-ring contexts were combined.
    #[error("q-series have different coefficient rings")]
    RingMismatch,

    /// A univariate series was applied to a nilpotent element but too few
    /// coefficients were supplied to cover all surviving powers.
    #[error("univariate coefficient list is too short: power {power} of the argument is still nonzero")]
    SeriesTooShort { power: usize },

    /// The requested computation is not defined for the given configuration
    /// (for example, a theta-series expansion that needs concrete ranks was
    /// asked for with symbolic ranks).
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    /// Textual input (ring element or bundle expression) could not be parsed.
    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },

    /// Invalid option combination or malformed configuration value.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
