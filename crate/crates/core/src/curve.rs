//! Exact efficiency-versus-budget step curves.
//!
//! The best equilibrium value reachable with budget `x` is the best
//! aggregate over profiles whose implementability threshold is at most `x`.
//! So the curve is a left-closed step function whose breakpoints are the
//! thresholds at which that running maximum strictly increases.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{Game, Profile, ValueOrChaos, Weights};
use crate::mechanism::{kappa_threshold_at, theta_threshold_at};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    /// Reward budget, domain `[0, inf)`.
    Kappa,
    /// Tax rate, domain `[0, 1]`.
    Theta,
}

/// One piece of a curve: on `[breakpoint, next breakpoint)` the value is
/// `value + slope * (x - breakpoint)` (slope zero when absent).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveStep {
    pub breakpoint: Rational,
    pub value: ValueOrChaos,
    pub slope: Option<Rational>,
    pub witnesses: Vec<Profile>,
}

impl CurveStep {
    pub fn evaluate(&self, x: &Rational) -> ValueOrChaos {
        match (&self.value, &self.slope) {
            (ValueOrChaos::Finite(v), Some(s)) => ValueOrChaos::Finite(v + s * (x - &self.breakpoint)),
            (v, _) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyCurve {
    kind: CurveKind,
    steps: Vec<CurveStep>,
}

impl EfficiencyCurve {
    pub fn new(kind: CurveKind, steps: Vec<CurveStep>) -> Result<Self> {
        let first = steps
            .first()
            .ok_or_else(|| Error::InvalidField {
                field: "steps".into(),
                reason: "a curve needs at least one step".into(),
            })?;
        if !first.breakpoint.is_zero() {
            return Err(Error::InvalidField {
                field: "steps[0].breakpoint".into(),
                reason: "the first breakpoint must be 0".into(),
            });
        }
        for (k, pair) in steps.windows(2).enumerate() {
            if pair[1].breakpoint <= pair[0].breakpoint {
                return Err(Error::InvalidField {
                    field: format!("steps[{}].breakpoint", k + 1),
                    reason: "breakpoints must be strictly increasing".into(),
                });
            }
        }
        if kind == CurveKind::Theta && steps.last().unwrap().breakpoint > Rational::one() {
            return Err(Error::OutOfDomain {
                x: steps.last().unwrap().breakpoint.clone(),
            });
        }
        Ok(EfficiencyCurve { kind, steps })
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn steps(&self) -> &[CurveStep] {
        &self.steps
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Rational> {
        self.steps.iter().map(|s| &s.breakpoint)
    }

    pub fn has_slopes(&self) -> bool {
        self.steps.iter().any(|s| s.slope.is_some())
    }

    fn check_domain(&self, x: &Rational) -> Result<()> {
        if x.is_negative() || (self.kind == CurveKind::Theta && *x > Rational::one()) {
            return Err(Error::OutOfDomain { x: x.clone() });
        }
        Ok(())
    }

    /// The step whose left-closed interval contains `x`.
    pub fn step_at(&self, x: &Rational) -> Result<&CurveStep> {
        self.check_domain(x)?;
        let k = self.steps.partition_point(|s| s.breakpoint <= *x);
        Ok(&self.steps[k - 1])
    }

    pub fn value_at(&self, x: &Rational) -> Result<ValueOrChaos> {
        Ok(self.step_at(x)?.evaluate(x))
    }
}

/// Left-closed lookup, `c.value_at(x)`.
pub fn value_at(c: &EfficiencyCurve, x: &Rational) -> Result<ValueOrChaos> {
    c.value_at(x)
}

/// Per-profile implementability thresholds for the given scheme kind.
pub fn thresholds(g: &Game, kind: CurveKind) -> Result<Vec<Rational>> {
    if kind == CurveKind::Theta {
        g.require_nonnegative()?;
    }
    Ok((0..g.num_profiles())
        .into_par_iter()
        .map(|idx| match kind {
            CurveKind::Kappa => kappa_threshold_at(g, idx),
            CurveKind::Theta => theta_threshold_at(g, idx),
        })
        .collect())
}

/// Exact step curve `x -> V_lambda(scheme with budget x)`. Values use the
/// original aggregate, never the transfer-inclusive one.
pub fn efficiency_curve(g: &Game, kind: CurveKind, w: &Weights) -> Result<EfficiencyCurve> {
    let thr = thresholds(g, kind)?;
    let agg: Vec<Rational> = (0..g.num_profiles()).map(|idx| g.aggregate_at(idx, w)).collect();
    let mut order: Vec<usize> = (0..g.num_profiles()).collect();
    order.sort_by(|&a, &b| thr[a].cmp(&thr[b]).then(a.cmp(&b)));

    let mut steps = Vec::new();
    if !thr[order[0]].is_zero() {
        steps.push(CurveStep {
            breakpoint: Rational::zero(),
            value: ValueOrChaos::NegInfinity,
            slope: None,
            witnesses: Vec::new(),
        });
    }
    let mut best: Option<Rational> = None;
    let mut included: Vec<usize> = Vec::new();
    let mut k = 0;
    while k < order.len() {
        let level = &thr[order[k]];
        let mut end = k;
        while end < order.len() && thr[order[end]] == *level {
            included.push(order[end]);
            end += 1;
        }
        let group_best = order[k..end].iter().map(|&i| &agg[i]).max().unwrap();
        if best.as_ref().is_none_or(|b| group_best > b) {
            let value = group_best.clone();
            let mut witnesses: Vec<usize> = included.iter().copied().filter(|&i| agg[i] == value).collect();
            witnesses.sort_unstable();
            steps.push(CurveStep {
                breakpoint: level.clone(),
                value: ValueOrChaos::Finite(value.clone()),
                slope: None,
                witnesses: witnesses.into_iter().map(|i| g.profile_at(i)).collect(),
            });
            best = Some(value);
        }
        k = end;
    }
    EfficiencyCurve::new(kind, steps)
}
