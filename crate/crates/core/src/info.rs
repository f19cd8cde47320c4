//! Implementability under general box schemes, with full or partial
//! information.
//!
//! A box scheme assigns every payoff vector `y` of the game a polyhedron
//! `D(y)` of admissible transfer vectors. Under full information the
//! mediator picks `pi(a) in D(J(a))` per profile; under partial information
//! it picks `pi(y) in D(y)` per payoff vector, so profiles with equal payoffs
//! receive equal transfers. A target profile is implementable when some
//! admissible transfer makes it an equilibrium; that question is one exact
//! LP feasibility problem per target.
//!
//! Only the target and its unilateral deviations enter the equilibrium
//! inequalities, so transfers elsewhere are fixed at zero (admissible since
//! every `D(y)` must contain zero). When every `D(y)` is reward-only, paying
//! a deviation profile can only hurt, so deviation transfers are fixed at
//! zero as well and the witness is supported on the target alone.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{Extremum, Game, PayoffVector, Profile, ValueOrChaos, Weights};
use crate::lp::{solve_feasibility, FarkasCertificate, FeasibilityResult, LinearSystem, Relation};
use crate::mechanism::{FullTransfer, PartialTransfer, Transfer};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InfoMode {
    Full,
    Partial,
}

/// One inequality on the transfer vector `z`:
/// `coeffs . z (rel) constant + payoff_coeffs . y`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRow {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub constant: Rational,
    pub payoff_coeffs: Vec<Rational>,
}

impl BoxRow {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, constant: Rational) -> Self {
        let n = coeffs.len();
        BoxRow {
            coeffs,
            relation,
            constant,
            payoff_coeffs: vec![Rational::zero(); n],
        }
    }

    pub fn rhs(&self, y: &PayoffVector) -> Rational {
        &self.constant
            + self
                .payoff_coeffs
                .iter()
                .zip(y.components())
                .map(|(c, v)| c * v)
                .sum::<Rational>()
    }

    pub fn holds(&self, y: &PayoffVector, z: &PayoffVector) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(z.components()).map(|(c, v)| c * v).sum();
        self.relation.holds(&lhs, &self.rhs(y))
    }

    /// Whether this row alone forces `z_i >= 0` at payoff vector `y`.
    fn bounds_below_at_zero(&self, i: usize, y: &PayoffVector) -> bool {
        let single = self
            .coeffs
            .iter()
            .enumerate()
            .all(|(j, c)| j == i || c.is_zero());
        if !single || self.coeffs[i].is_zero() {
            return false;
        }
        // c z_i (rel) r  with c != 0
        let bound = self.rhs(y) / &self.coeffs[i];
        let positive = self.coeffs[i].is_positive();
        let lower = match self.relation {
            Relation::Eq => true,
            Relation::Ge => positive,
            Relation::Le => !positive,
        };
        lower && !bound.is_negative()
    }
}

/// Per-payoff-vector polyhedra. `overrides` replace the default rows for
/// the listed payoff vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxScheme {
    num_players: usize,
    default: Vec<BoxRow>,
    overrides: BTreeMap<PayoffVector, Vec<BoxRow>>,
}

impl BoxScheme {
    pub fn new(num_players: usize, rows: Vec<BoxRow>) -> Result<Self> {
        check_rows(num_players, &rows)?;
        Ok(BoxScheme {
            num_players,
            default: rows,
            overrides: BTreeMap::new(),
        })
    }

    pub fn with_override(mut self, y: PayoffVector, rows: Vec<BoxRow>) -> Result<Self> {
        if y.len() != self.num_players {
            return Err(Error::InvalidBox(format!("override key {y} has the wrong length")));
        }
        check_rows(self.num_players, &rows)?;
        self.overrides.insert(y, rows);
        Ok(self)
    }

    /// `z >= 0`, `sum z <= kappa`.
    pub fn reward_budget(num_players: usize, kappa: Rational) -> Self {
        let mut rows: Vec<BoxRow> = (0..num_players)
            .map(|i| BoxRow::new(unit(num_players, i), Relation::Ge, Rational::zero()))
            .collect();
        rows.push(BoxRow::new(vec![rational::one(); num_players], Relation::Le, kappa));
        BoxScheme {
            num_players,
            default: rows,
            overrides: BTreeMap::new(),
        }
    }

    /// `z <= 0`, `sum z >= -amount`.
    pub fn punish_budget(num_players: usize, amount: Rational) -> Self {
        let mut rows: Vec<BoxRow> = (0..num_players)
            .map(|i| BoxRow::new(unit(num_players, i), Relation::Le, Rational::zero()))
            .collect();
        rows.push(BoxRow::new(vec![rational::one(); num_players], Relation::Ge, -amount));
        BoxScheme {
            num_players,
            default: rows,
            overrides: BTreeMap::new(),
        }
    }

    /// Only the zero transfer.
    pub fn zero(num_players: usize) -> Self {
        BoxScheme {
            num_players,
            default: (0..num_players)
                .map(|i| BoxRow::new(unit(num_players, i), Relation::Eq, Rational::zero()))
                .collect(),
            overrides: BTreeMap::new(),
        }
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn default_rows(&self) -> &[BoxRow] {
        &self.default
    }

    pub fn overrides(&self) -> &BTreeMap<PayoffVector, Vec<BoxRow>> {
        &self.overrides
    }

    pub fn rows_for(&self, y: &PayoffVector) -> &[BoxRow] {
        self.overrides.get(y).map_or(&self.default, Vec::as_slice)
    }

    pub fn contains(&self, y: &PayoffVector, z: &PayoffVector) -> bool {
        z.len() == self.num_players && self.rows_for(y).iter().all(|r| r.holds(y, z))
    }

    /// Whether every `D(y)` over the game's payoff range is explicitly
    /// confined to the nonnegative orthant (each coordinate carries its own
    /// nonnegative lower bound).
    pub fn reward_only_on(&self, g: &Game) -> bool {
        g.payoff_range().iter().all(|group| {
            let rows = self.rows_for(&group.value);
            (0..self.num_players).all(|i| rows.iter().any(|r| r.bounds_below_at_zero(i, &group.value)))
        })
    }

    pub fn punishment_allowed_on(&self, g: &Game) -> bool {
        !self.reward_only_on(g)
    }

    /// Checks widths, override keys, and `0 in D(y)` over the payoff range.
    pub fn validate_for(&self, g: &Game) -> Result<()> {
        if self.num_players != g.num_players() {
            return Err(Error::InvalidBox(format!(
                "scheme is for {} players, game has {}",
                self.num_players,
                g.num_players()
            )));
        }
        for y in self.overrides.keys() {
            if !g.payoffs().contains(y) {
                return Err(Error::UnknownPayoffVector(y.to_string()));
            }
        }
        let origin = PayoffVector::zeros(self.num_players);
        for group in g.payoff_range() {
            if !self.contains(&group.value, &origin) {
                return Err(Error::ZeroNotAdmissible(group.value.to_string()));
            }
        }
        Ok(())
    }
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = rational::one();
    v
}

fn check_rows(n: usize, rows: &[BoxRow]) -> Result<()> {
    for (k, r) in rows.iter().enumerate() {
        if r.coeffs.len() != n || r.payoff_coeffs.len() != n {
            return Err(Error::InvalidBox(format!("row {k} does not have {n} coefficients")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Implementation {
    /// A transfer in the scheme under which the target is an equilibrium,
    /// zero outside its support.
    Feasible(Transfer),
    /// The LP that was solved and its Farkas certificate.
    Infeasible(Box<InfeasibleSystem>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibleSystem {
    pub system: LinearSystem,
    pub certificate: FarkasCertificate,
}

impl Implementation {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Implementation::Feasible(_))
    }

    pub fn transfer(&self) -> Option<&Transfer> {
        match self {
            Implementation::Feasible(t) => Some(t),
            Implementation::Infeasible(_) => None,
        }
    }
}

/// Decides whether `target` can be made an equilibrium by a transfer in
/// `d` under the given information mode.
pub fn implementable(g: &Game, target: &Profile, d: &BoxScheme, mode: InfoMode) -> Result<Implementation> {
    let t = g.index_of(target)?;
    d.validate_for(g)?;
    Ok(implementable_at(g, t, d, mode, d.reward_only_on(g)))
}

fn implementable_at(g: &Game, t: usize, d: &BoxScheme, mode: InfoMode, reward_only: bool) -> Implementation {
    let n = g.num_players();
    let neighbours = g.neighbourhood(t);

    // Variable blocks: target first, then (unless reward-only) the
    // deviation profiles or their distinct payoff vectors.
    let mut block_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut block_payoff: Vec<PayoffVector> = vec![g.payoff_at(t).clone()];
    let mut block_profile: Vec<usize> = vec![t];
    block_of.insert(t, 0);
    match mode {
        InfoMode::Full => {
            if !reward_only {
                for &dev in &neighbours {
                    block_of.insert(dev, block_payoff.len());
                    block_payoff.push(g.payoff_at(dev).clone());
                    block_profile.push(dev);
                }
            }
        }
        InfoMode::Partial => {
            for &dev in &neighbours {
                let y = g.payoff_at(dev);
                if let Some(b) = block_payoff.iter().position(|v| v == y) {
                    block_of.insert(dev, b);
                } else if !reward_only {
                    block_of.insert(dev, block_payoff.len());
                    block_payoff.push(y.clone());
                    block_profile.push(dev);
                }
            }
        }
    }

    let mut sys = LinearSystem::new(block_payoff.len() * n);
    for (b, y) in block_payoff.iter().enumerate() {
        for row in d.rows_for(y) {
            let terms: Vec<(usize, Rational)> = row
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (b * n + i, c.clone()))
                .collect();
            sys.add_sparse(&terms, row.relation, row.rhs(y));
        }
    }
    let here = g.payoff_at(t);
    for i in 0..n {
        let current = g.choice(t, i);
        for action in 0..g.actions(i).len() {
            if action == current {
                continue;
            }
            let dev = g.deviation_index(t, i, action);
            // J_i(t) + z_t,i >= J_i(dev) + z_dev,i
            let mut terms = vec![(i, rational::one())];
            if let Some(&b) = block_of.get(&dev) {
                terms.push((b * n + i, -rational::one()));
            }
            sys.add_sparse(&terms, Relation::Ge, &g.payoff_at(dev)[i] - &here[i]);
        }
    }

    match solve_feasibility(&sys) {
        FeasibilityResult::Feasible(x) => {
            let value = |b: usize| PayoffVector(x[b * n..(b + 1) * n].to_vec());
            let transfer = match mode {
                InfoMode::Full => {
                    let mut values = vec![PayoffVector::zeros(n); g.num_profiles()];
                    for (b, &idx) in block_profile.iter().enumerate() {
                        values[idx] = value(b);
                    }
                    Transfer::Full(FullTransfer::from_values(g, values).expect("shape matches the game"))
                }
                InfoMode::Partial => {
                    let mut tr = PartialTransfer::zero(n);
                    for (b, y) in block_payoff.iter().enumerate() {
                        let v = value(b);
                        if !v.is_zero() {
                            tr.set(y.clone(), v);
                        }
                    }
                    Transfer::Partial(tr)
                }
            };
            Implementation::Feasible(transfer)
        }
        FeasibilityResult::Infeasible(certificate) => {
            Implementation::Infeasible(Box::new(InfeasibleSystem { system: sys, certificate }))
        }
    }
}

/// Best original aggregate over all implementable targets (`NegInfinity`
/// when none is implementable).
pub fn scheme_value(g: &Game, d: &BoxScheme, mode: InfoMode, w: &Weights) -> Result<Extremum<ValueOrChaos>> {
    d.validate_for(g)?;
    let reward_only = d.reward_only_on(g);
    let feasible: Vec<usize> = (0..g.num_profiles())
        .into_par_iter()
        .filter(|&t| implementable_at(g, t, d, mode, reward_only).is_feasible())
        .collect();
    Ok(g.extremum_over(&feasible, w, true))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfoGapReport {
    pub v_full: Extremum<ValueOrChaos>,
    pub v_partial: Extremum<ValueOrChaos>,
    pub equal: bool,
}

/// Scheme values under both information modes.
pub fn info_gap_report(g: &Game, d: &BoxScheme, w: &Weights) -> Result<InfoGapReport> {
    let v_full = scheme_value(g, d, InfoMode::Full, w)?;
    let v_partial = scheme_value(g, d, InfoMode::Partial, w)?;
    // every partial mechanism is a J-invariant full one
    assert!(v_partial.value <= v_full.value, "partial information beat full information");
    let equal = v_full.value == v_partial.value;
    Ok(InfoGapReport {
        v_full,
        v_partial,
        equal,
    })
}
