//! Exact-arithmetic analysis of finite N-player games: equilibria and
//! efficiency, budget-constrained reward and tax-redistribution mechanisms,
//! their exact efficiency-versus-budget step curves, full versus partial
//! information implementability, and tax-rate planning.

pub mod curve;
pub mod error;
pub mod game;
pub mod info;
pub mod lp;
pub mod mechanism;
pub mod planner;
pub mod rational;
pub mod raw;

#[cfg(test)]
pub(crate) mod testutil;

pub use curve::{efficiency_curve, CurveKind, CurveStep, EfficiencyCurve};
pub use error::{Error, Result};
pub use game::{Extremum, Game, PayoffGroup, PayoffVector, Profile, ValueOrChaos, Weights};
pub use info::{
    implementable, info_gap_report, scheme_value, BoxRow, BoxScheme, Implementation, InfeasibleSystem,
    InfoGapReport, InfoMode,
};
pub use lp::{solve_feasibility, Constraint, FarkasCertificate, FeasibilityResult, LinearSystem, Relation};
pub use mechanism::{
    deviation_gaps, kappa_threshold, perturb, perturb_full, perturbed_for_scheme, perturb_partial, perturb_tax, scheme_member,
    synthesize_witness, theta_threshold, FullTransfer, KappaScheme, PartialTransfer, Scheme,
    ThetaScheme, Transfer,
};
pub use planner::{
    optimize_theta, planner_curve, post_tax_split, AffineScale, PlannerFamily, PlannerOptimum,
    ProportionalFamily, TabulatedFamily, TaxSplit,
};
pub use rational::Rational;
pub use raw::{build_game, RawGame};
