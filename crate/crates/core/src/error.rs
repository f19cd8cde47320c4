use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("game must have at least one player")]
    NoPlayers,
    #[error("player {player} has no actions")]
    NoActions { player: usize },
    #[error("expected {expected} entries, found {found} ({context})")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("no payoff given for profile {0}")]
    MissingProfile(String),
    #[error("payoff given for unknown profile {0}")]
    UnknownProfile(String),
    #[error("duplicate action label {label:?} for player {player}")]
    DuplicateAction { player: usize, label: String },
    #[error("not an exact rational number: {value:?} ({context})")]
    NonRationalNumber { context: String, value: String },
    #[error("invalid action label {0:?}: labels must be non-empty and free of ','")]
    InvalidLabel(String),
    #[error("field {field}: {reason}")]
    InvalidField { field: String, reason: String },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("profile {0} is not valid for this game")]
    InvalidProfile(String),
    #[error("efficiency ratio needs a positive control optimum, got {0}")]
    NonPositiveOptimum(Rational),
    #[error("transfer keyed by payoff vector {0} outside the payoff range")]
    UnknownPayoffVector(String),
    #[error("transfer does not cover every profile (expected {expected}, found {found})")]
    IncompleteTransfer { expected: usize, found: usize },
    #[error("redistribution at {at} exceeds the tax budget: {paid} > {budget}")]
    BudgetViolation {
        at: String,
        paid: Box<Rational>,
        budget: Box<Rational>,
    },
    #[error("redistribution at {0} has a negative component")]
    NegativeRedistribution(String),
    #[error("taxation needs nonnegative base payoffs; profile {0} has a negative payoff")]
    NegativeBasePayoff(String),
    #[error("tax rate {0} is outside [0, 1]")]
    InvalidTaxRate(Rational),
    #[error("reward budget {0} is negative")]
    NegativeBudget(Rational),
    #[error("target {target} is not implementable: {reason}")]
    Infeasible { target: String, reason: String },
    #[error("{x} lies outside the curve domain")]
    OutOfDomain { x: Rational },
    #[error("scale c(theta) = {intercept} + {slope}*theta is not positive on [0, 1]")]
    NonPositiveScale {
        intercept: Box<Rational>,
        slope: Box<Rational>,
    },
    #[error("box scheme must admit the zero transfer at payoff vector {0}")]
    ZeroNotAdmissible(String),
    #[error("invalid box scheme: {0}")]
    InvalidBox(String),
    #[error("invalid tabulated family: {0}")]
    InvalidFamily(String),
}
