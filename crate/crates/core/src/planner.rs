//! Choosing a tax rate when the economy itself depends on it, and the
//! post-tax accounting of a realized outcome.
//!
//! For a proportional family `J(theta, a) = c(theta) J(a)` the thresholds do
//! not depend on the scale, so the planner's value is
//! `c(theta) * V(theta)` with `V` the base game's tax curve: affine on each
//! piece of that curve.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::curve::{efficiency_curve, CurveKind, CurveStep, EfficiencyCurve};
use crate::error::{Error, Result};
use crate::game::{Game, Profile, ValueOrChaos, Weights};
use crate::mechanism::{theta_threshold_at, FullTransfer, ThetaScheme};
use crate::rational::Rational;

/// `c(theta) = intercept + slope * theta`, positive on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineScale {
    intercept: Rational,
    slope: Rational,
}

impl AffineScale {
    pub fn new(intercept: Rational, slope: Rational) -> Result<Self> {
        // affine, so positivity at both ends covers the interval
        if !intercept.is_positive() || !(&intercept + &slope).is_positive() {
            return Err(Error::NonPositiveScale {
                intercept: Box::new(intercept),
                slope: Box::new(slope),
            });
        }
        Ok(AffineScale { intercept, slope })
    }

    pub fn constant() -> Self {
        AffineScale {
            intercept: Rational::one(),
            slope: Rational::zero(),
        }
    }

    pub fn intercept(&self) -> &Rational {
        &self.intercept
    }

    pub fn slope(&self) -> &Rational {
        &self.slope
    }

    pub fn at(&self, theta: &Rational) -> Rational {
        &self.intercept + &self.slope * theta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProportionalFamily {
    base: Game,
    scale: AffineScale,
}

impl ProportionalFamily {
    pub fn new(base: Game, scale: AffineScale) -> Result<Self> {
        base.require_nonnegative()?;
        Ok(ProportionalFamily { base, scale })
    }

    pub fn base(&self) -> &Game {
        &self.base
    }

    pub fn scale(&self) -> &AffineScale {
        &self.scale
    }

    /// The game at tax rate `theta`.
    pub fn game_at(&self, theta: &Rational) -> Result<Game> {
        ThetaScheme::new(theta.clone())?;
        let c = self.scale.at(theta);
        Ok(self.base.map_payoffs(|_, y| y.scale(&c)))
    }
}

/// Sampled family: one game per tax rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedFamily {
    samples: Vec<(Rational, Game)>,
}

impl TabulatedFamily {
    pub fn new(samples: Vec<(Rational, Game)>) -> Result<Self> {
        let Some((_, first)) = samples.first() else {
            return Err(Error::InvalidFamily("no samples".into()));
        };
        for (theta, g) in &samples {
            ThetaScheme::new(theta.clone())?;
            if !g.same_shape(first) {
                return Err(Error::InvalidFamily(format!("sample at {theta} has a different shape")));
            }
            g.require_nonnegative()?;
        }
        if samples.windows(2).any(|p| p[1].0 <= p[0].0) {
            return Err(Error::InvalidFamily("sample rates must be strictly increasing".into()));
        }
        Ok(TabulatedFamily { samples })
    }

    pub fn samples(&self) -> &[(Rational, Game)] {
        &self.samples
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlannerFamily {
    Proportional(ProportionalFamily),
    Tabulated(TabulatedFamily),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerOptimum {
    pub theta: Rational,
    pub value: ValueOrChaos,
    pub witnesses: Vec<Profile>,
    /// `V / V_hat` of the game at `theta`, when the optimum there is positive.
    pub efficiency: Option<Rational>,
}

/// `theta -> c(theta) V(theta)` as a curve with affine pieces.
pub fn planner_curve(f: &ProportionalFamily, w: &Weights) -> Result<EfficiencyCurve> {
    let base = efficiency_curve(&f.base, CurveKind::Theta, w)?;
    let steps = base
        .steps()
        .iter()
        .map(|s| match &s.value {
            ValueOrChaos::Finite(v) => CurveStep {
                breakpoint: s.breakpoint.clone(),
                value: ValueOrChaos::Finite(f.scale.at(&s.breakpoint) * v),
                slope: Some(f.scale.slope() * v),
                witnesses: s.witnesses.clone(),
            },
            ValueOrChaos::NegInfinity => s.clone(),
        })
        .collect();
    EfficiencyCurve::new(CurveKind::Theta, steps)
}

/// Best tax rate for the family, smallest rate on ties.
pub fn optimize_theta(f: &PlannerFamily, w: &Weights) -> Result<PlannerOptimum> {
    match f {
        PlannerFamily::Proportional(p) => optimize_proportional(p, w),
        PlannerFamily::Tabulated(t) => optimize_tabulated(t, w),
    }
}

fn optimize_proportional(f: &ProportionalFamily, w: &Weights) -> Result<PlannerOptimum> {
    let curve = planner_curve(f, w)?;
    // Each piece is affine and the next piece starts at least as high as
    // this one ends, so breakpoints and theta = 1 cover every supremum.
    let mut candidates: Vec<(Rational, &CurveStep)> =
        curve.steps().iter().map(|s| (s.breakpoint.clone(), s)).collect();
    let one = Rational::one();
    candidates.push((one.clone(), curve.step_at(&one)?));

    let mut best: Option<(Rational, ValueOrChaos, &CurveStep)> = None;
    for (theta, step) in candidates {
        let value = step.evaluate(&theta);
        if best.as_ref().is_none_or(|(_, v, _)| value > *v) {
            best = Some((theta, value, step));
        }
    }
    let (theta, value, step) = best.expect("a curve has at least one step");
    let v_hat = f.base.control_optimum(w).value * f.scale.at(&theta);
    Ok(PlannerOptimum {
        efficiency: ratio_of(&value, &v_hat),
        theta,
        value,
        witnesses: step.witnesses.clone(),
    })
}

fn optimize_tabulated(f: &TabulatedFamily, w: &Weights) -> Result<PlannerOptimum> {
    let evaluated: Vec<PlannerOptimum> = f
        .samples
        .par_iter()
        .map(|(theta, g)| {
            let reachable: Vec<usize> = (0..g.num_profiles())
                .filter(|&idx| theta_threshold_at(g, idx) <= *theta)
                .collect();
            let best = g.extremum_over(&reachable, w, true);
            PlannerOptimum {
                theta: theta.clone(),
                efficiency: ratio_of(&best.value, &g.control_optimum(w).value),
                value: best.value,
                witnesses: best.witnesses,
            }
        })
        .collect();
    let mut best: Option<PlannerOptimum> = None;
    for cand in evaluated {
        if best.as_ref().is_none_or(|b| cand.value > b.value) {
            best = Some(cand);
        }
    }
    Ok(best.expect("a family has at least one sample"))
}

fn ratio_of(value: &ValueOrChaos, v_hat: &Rational) -> Option<Rational> {
    match value {
        ValueOrChaos::Finite(v) if v_hat.is_positive() => Some(v / v_hat),
        _ => None,
    }
}

/// Who ends up with what after a transfer mechanism is run and its
/// outcome taxed. Transfers themselves are tax free.
#[derive(Debug, Clone, PartialEq)]
pub struct TaxSplit {
    pub players: Vec<Rational>,
    pub government: Rational,
    /// `sum_i J_i(realized)`; players plus government always add up to it.
    pub total_produced: Rational,
    pub injected_budget: Rational,
    /// Budget left over after paying the realized transfer.
    pub unused_budget: Rational,
}

impl TaxSplit {
    pub fn balances(&self) -> bool {
        self.players.iter().sum::<Rational>() + &self.government == self.total_produced
    }
}

pub fn post_tax_split(
    g: &Game,
    t: &FullTransfer,
    rate: &Rational,
    realized: &Profile,
    injected_budget: &Rational,
) -> Result<TaxSplit> {
    ThetaScheme::new(rate.clone()).map_err(|_| Error::InvalidTaxRate(rate.clone()))?;
    let idx = g.index_of(realized)?;
    if t.values().len() != g.num_profiles() {
        return Err(Error::IncompleteTransfer {
            expected: g.num_profiles(),
            found: t.values().len(),
        });
    }
    let y = g.payoff_at(idx);
    let pi = t.at(idx);
    let keep = Rational::one() - rate;
    let players = (0..g.num_players()).map(|i| &pi[i] + &keep * &y[i]).collect();
    let total_produced = y.sum();
    let paid = pi.sum();
    Ok(TaxSplit {
        players,
        government: rate * &total_produced - &paid,
        total_produced,
        injected_budget: injected_budget.clone(),
        unused_budget: injected_budget - paid,
    })
}
