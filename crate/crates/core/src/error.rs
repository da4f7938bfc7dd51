use thiserror::Error;

/// Errors produced by the integration, functional and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain violation: {0}")]
    Domain(String),

    #[error("invalid piecewise function: {0}")]
    InvalidFunction(String),

    #[error("integrand and integrator are both discontinuous at t = {t}; the Stieltjes integral need not exist")]
    SharedDiscontinuity { t: f64 },

    #[error("degenerate integrator: u(b) - u(a) = {delta}")]
    DegenerateIntegrator { delta: f64 },

    #[error("degenerate weight: integral of w over [a,b] is {integral}")]
    DegenerateWeight { integral: f64 },

    #[error("degenerate partition cell {index}: u takes equal values at both ends")]
    DegenerateCell { index: usize },

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("certificate {kind} does not hold (witness t = {witness})")]
    CertificateInvalid { kind: String, witness: f64 },

    #[error("function is not monotone nondecreasing (witness t = {t})")]
    NotMonotone { t: f64 },

    #[error("weight is negative at t = {t}")]
    NegativeWeight { t: f64 },

    #[error("bad exponent p = {0}; the p-branch needs 1 < p < inf")]
    BadExponent(f64),

    #[error("function class mismatch: {0}")]
    ClassMismatch(String),

    #[error("hypothesis failed at t = {t}: {reason}")]
    HypothesisFailed { t: f64, reason: String },

    #[error("unknown witness id `{0}`")]
    UnknownWitness(String),

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),

    #[error("tolerance unreachable: cell [{lo}, {hi}] keeps a bound term of {term}")]
    ToleranceUnreachable { lo: f64, hi: f64, term: f64 },

    #[error("generator could not sample the hypothesis class of {0}")]
    GeneratorExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake-case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidFunction(_) => "invalid_function",
            Error::SharedDiscontinuity { .. } => "shared_discontinuity",
            Error::DegenerateIntegrator { .. } => "degenerate_integrator",
            Error::DegenerateWeight { .. } => "degenerate_weight",
            Error::DegenerateCell { .. } => "degenerate_cell",
            Error::MalformedCertificate(_) => "malformed_certificate",
            Error::CertificateInvalid { .. } => "certificate_invalid",
            Error::NotMonotone { .. } => "not_monotone",
            Error::NegativeWeight { .. } => "negative_weight",
            Error::BadExponent(_) => "bad_exponent",
            Error::ClassMismatch(_) => "class_mismatch",
            Error::HypothesisFailed { .. } => "hypothesis_failed",
            Error::UnknownWitness(_) => "unknown_witness",
            Error::UnknownTheorem(_) => "unknown_theorem",
            Error::ToleranceUnreachable { .. } => "tolerance_unreachable",
            Error::GeneratorExhausted(_) => "generator_exhausted",
        }
    }
}
