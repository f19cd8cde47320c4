//! Finite N-player games in normal form with exact payoffs.
//!
//! Profiles are stored row-major with the last player varying fastest, so
//! profile index order coincides with lexicographic order on the action
//! indices. Every list of profiles returned from this module is in that
//! order.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// One action index per player.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Profile(pub Vec<usize>);

impl Profile {
    pub fn new(choices: impl Into<Vec<usize>>) -> Self {
        Profile(choices.into())
    }

    pub fn choices(&self) -> &[usize] {
        &self.0
    }
}

impl From<&[usize]> for Profile {
    fn from(c: &[usize]) -> Self {
        Profile(c.to_vec())
    }
}

impl<const N: usize> From<[usize; N]> for Profile {
    fn from(c: [usize; N]) -> Self {
        Profile(c.to_vec())
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Payoff (or transfer) vector, one exact rational per player. Ordered
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PayoffVector(pub Vec<Rational>);

impl PayoffVector {
    pub fn new(components: Vec<Rational>) -> Self {
        PayoffVector(components)
    }

    pub fn zeros(n: usize) -> Self {
        PayoffVector(vec![Rational::zero(); n])
    }

    pub fn from_ints(values: &[i64]) -> Self {
        PayoffVector(values.iter().map(|&v| rational::int(v)).collect())
    }

    pub fn components(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &PayoffVector) -> PayoffVector {
        PayoffVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, factor: &Rational) -> PayoffVector {
        PayoffVector(self.0.iter().map(|a| a * factor).collect())
    }
}

impl std::ops::Index<usize> for PayoffVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl fmt::Display for PayoffVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Aggregation weights: strictly positive and summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weights(Vec<Rational>);

impl Weights {
    pub fn new(lambda: Vec<Rational>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidWeights("no weights given".into()));
        }
        if let Some(bad) = lambda.iter().find(|l| !l.is_positive()) {
            return Err(Error::InvalidWeights(format!("weight {bad} is not positive")));
        }
        let total: Rational = lambda.iter().sum();
        if total != rational::one() {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
        }
        Ok(Weights(lambda))
    }

    /// Equal weights `1/N`, which turn the weighted aggregate into the plain
    /// average payoff.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform weights need at least one player");
        Weights(vec![rational::ratio(1, n as i64); n])
    }

    /// All weight on one player. This sits on the boundary of the weight
    /// simplex and is only meant for projections such as reading off a
    /// single player's payoff through [`Game::aggregate`].
    pub fn unit(n: usize, player: usize) -> Self {
        assert!(player < n);
        let mut v = vec![Rational::zero(); n];
        v[player] = rational::one();
        Weights(v)
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, y: &PayoffVector) -> Rational {
        self.0.iter().zip(&y.0).map(|(l, v)| l * v).sum()
    }
}

/// A value that may be the "chaos" sentinel: `NegInfinity` stands for the
/// supremum over an empty equilibrium set. Orders below every finite value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueOrChaos {
    NegInfinity,
    Finite(Rational),
}

impl ValueOrChaos {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ValueOrChaos::Finite(v) => Some(v),
            ValueOrChaos::NegInfinity => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ValueOrChaos::Finite(_))
    }
}

impl From<Rational> for ValueOrChaos {
    fn from(v: Rational) -> Self {
        ValueOrChaos::Finite(v)
    }
}

impl fmt::Display for ValueOrChaos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueOrChaos::NegInfinity => write!(f, "-inf"),
            ValueOrChaos::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// An optimal value together with every profile attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremum<T> {
    pub value: T,
    pub witnesses: Vec<Profile>,
}

/// Profiles sharing one exact payoff vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffGroup {
    pub value: PayoffVector,
    pub members: Vec<Profile>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    strides: Vec<usize>,
    payoffs: Vec<PayoffVector>,
}

impl Game {
    /// Builds a game from payoffs listed in profile index order.
    pub fn new(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        payoffs: Vec<PayoffVector>,
    ) -> Result<Self> {
        if players.is_empty() {
            return Err(Error::NoPlayers);
        }
        if actions.len() != players.len() {
            return Err(Error::DimensionMismatch {
                context: "action lists".into(),
                expected: players.len(),
                found: actions.len(),
            });
        }
        for (player, labels) in actions.iter().enumerate() {
            if labels.is_empty() {
                return Err(Error::NoActions { player });
            }
            for (k, label) in labels.iter().enumerate() {
                if labels[..k].contains(label) {
                    return Err(Error::DuplicateAction {
                        player,
                        label: label.clone(),
                    });
                }
            }
        }
        let n = players.len();
        let mut strides = vec![1usize; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * actions[i + 1].len();
        }
        let total = strides[0] * actions[0].len();
        if payoffs.len() != total {
            return Err(Error::DimensionMismatch {
                context: "profiles".into(),
                expected: total,
                found: payoffs.len(),
            });
        }
        let game = Game {
            players,
            actions,
            strides,
            payoffs,
        };
        for (idx, y) in game.payoffs.iter().enumerate() {
            if y.len() != n {
                return Err(Error::DimensionMismatch {
                    context: format!("payoff vector at {}", game.profile_at(idx)),
                    expected: n,
                    found: y.len(),
                });
            }
        }
        Ok(game)
    }

    /// Builds a game with players named `P1..PN` and actions labelled by
    /// their index.
    pub fn with_default_labels(sizes: &[usize], payoffs: Vec<PayoffVector>) -> Result<Self> {
        let players = (1..=sizes.len()).map(|i| format!("P{i}")).collect();
        let actions = sizes
            .iter()
            .map(|&k| (0..k).map(|a| a.to_string()).collect())
            .collect();
        Game::new(players, actions, payoffs)
    }

    /// Convenience for integer payoff tables in profile index order.
    pub fn from_int_table(sizes: &[usize], payoffs: &[&[i64]]) -> Result<Self> {
        Game::with_default_labels(sizes, payoffs.iter().map(|p| PayoffVector::from_ints(p)).collect())
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn actions(&self, player: usize) -> &[String] {
        &self.actions[player]
    }

    pub fn all_actions(&self) -> &[Vec<String>] {
        &self.actions
    }

    pub fn action_counts(&self) -> Vec<usize> {
        self.actions.iter().map(Vec::len).collect()
    }

    pub fn num_profiles(&self) -> usize {
        self.payoffs.len()
    }

    pub fn profile_at(&self, idx: usize) -> Profile {
        Profile(
            (0..self.num_players())
                .map(|i| self.choice(idx, i))
                .collect(),
        )
    }

    pub fn profiles(&self) -> impl Iterator<Item = Profile> + '_ {
        (0..self.num_profiles()).map(|idx| self.profile_at(idx))
    }

    pub fn index_of(&self, profile: &Profile) -> Result<usize> {
        let c = profile.choices();
        if c.len() != self.num_players()
            || c.iter().zip(&self.actions).any(|(&a, acts)| a >= acts.len())
        {
            return Err(Error::InvalidProfile(profile.to_string()));
        }
        Ok(c.iter().zip(&self.strides).map(|(a, s)| a * s).sum())
    }

    /// Action index of `player` within the profile at `idx`.
    pub fn choice(&self, idx: usize, player: usize) -> usize {
        (idx / self.strides[player]) % self.actions[player].len()
    }

    /// Index of the profile obtained from `idx` when `player` switches to
    /// `action`.
    pub fn deviation_index(&self, idx: usize, player: usize, action: usize) -> usize {
        let current = self.choice(idx, player);
        idx + action * self.strides[player] - current * self.strides[player]
    }

    /// Indices of every unilateral deviation from `idx` (excluding `idx`).
    pub fn neighbourhood(&self, idx: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for i in 0..self.num_players() {
            let current = self.choice(idx, i);
            for b in 0..self.actions[i].len() {
                if b != current {
                    out.push(self.deviation_index(idx, i, b));
                }
            }
        }
        out
    }

    pub fn payoff(&self, profile: &Profile) -> Result<&PayoffVector> {
        Ok(&self.payoffs[self.index_of(profile)?])
    }

    pub fn payoff_at(&self, idx: usize) -> &PayoffVector {
        &self.payoffs[idx]
    }

    pub fn payoffs(&self) -> &[PayoffVector] {
        &self.payoffs
    }

    /// Same players and actions, new payoffs computed per profile index.
    pub fn map_payoffs(&self, mut f: impl FnMut(usize, &PayoffVector) -> PayoffVector) -> Game {
        Game {
            players: self.players.clone(),
            actions: self.actions.clone(),
            strides: self.strides.clone(),
            payoffs: self
                .payoffs
                .iter()
                .enumerate()
                .map(|(idx, y)| f(idx, y))
                .collect(),
        }
    }

    /// First profile with a negative payoff component, if any.
    pub fn first_negative_profile(&self) -> Option<Profile> {
        self.payoffs
            .iter()
            .position(|y| y.0.iter().any(Signed::is_negative))
            .map(|idx| self.profile_at(idx))
    }

    pub fn require_nonnegative(&self) -> Result<()> {
        match self.first_negative_profile() {
            Some(p) => Err(Error::NegativeBasePayoff(p.to_string())),
            None => Ok(()),
        }
    }

    pub fn same_shape(&self, other: &Game) -> bool {
        self.num_players() == other.num_players() && self.action_counts() == other.action_counts()
    }

    /// Best payoff `player` can reach by a unilateral switch from `idx`
    /// (staying put included).
    pub(crate) fn best_response_payoff(&self, idx: usize, player: usize) -> &Rational {
        (0..self.actions[player].len())
            .map(|b| &self.payoffs[self.deviation_index(idx, player, b)].0[player])
            .max()
            .expect("player has at least one action")
    }

    pub(crate) fn is_epsilon_equilibrium_at(&self, idx: usize, eps: &Rational) -> bool {
        let here = &self.payoffs[idx];
        (0..self.num_players()).all(|i| {
            (0..self.actions[i].len()).all(|b| {
                let there = &self.payoffs[self.deviation_index(idx, i, b)].0[i];
                there - &here.0[i] <= *eps
            })
        })
    }

    pub(crate) fn epsilon_equilibrium_indices(&self, eps: &Rational) -> Vec<usize> {
        (0..self.num_profiles())
            .into_par_iter()
            .filter(|&idx| self.is_epsilon_equilibrium_at(idx, eps))
            .collect()
    }

    /// Profiles at which no player gains more than `eps` by deviating
    /// unilaterally. `eps = 0` gives the pure Nash equilibria.
    pub fn epsilon_equilibria(&self, eps: &Rational) -> Vec<Profile> {
        self.epsilon_equilibrium_indices(eps)
            .into_iter()
            .map(|idx| self.profile_at(idx))
            .collect()
    }

    pub fn nash_equilibria(&self) -> Vec<Profile> {
        self.epsilon_equilibria(&Rational::zero())
    }

    pub fn is_equilibrium(&self, profile: &Profile) -> Result<bool> {
        Ok(self.is_epsilon_equilibrium_at(self.index_of(profile)?, &Rational::zero()))
    }

    /// Weighted aggregate payoff `sum_i lambda_i J_i(a)`.
    pub fn aggregate(&self, profile: &Profile, w: &Weights) -> Result<Rational> {
        Ok(self.aggregate_at(self.index_of(profile)?, w))
    }

    pub(crate) fn aggregate_at(&self, idx: usize, w: &Weights) -> Rational {
        w.apply(&self.payoffs[idx])
    }

    /// Best aggregate over the epsilon-equilibria, or `NegInfinity` when
    /// there are none.
    pub fn best_equilibrium_value(&self, w: &Weights, eps: &Rational) -> Extremum<ValueOrChaos> {
        let idxs = self.epsilon_equilibrium_indices(eps);
        self.extremum_over(&idxs, w, true)
    }

    /// Worst aggregate over the epsilon-equilibria. An empty set also maps
    /// to `NegInfinity`, so callers must test finiteness before comparing
    /// it with the best value.
    pub fn worst_equilibrium_value(&self, w: &Weights, eps: &Rational) -> Extremum<ValueOrChaos> {
        let idxs = self.epsilon_equilibrium_indices(eps);
        self.extremum_over(&idxs, w, false)
    }

    /// Best aggregate over all profiles (the centralized optimum).
    pub fn control_optimum(&self, w: &Weights) -> Extremum<Rational> {
        let all: Vec<usize> = (0..self.num_profiles()).collect();
        let Extremum { value, witnesses } = self.extremum_over(&all, w, true);
        match value {
            ValueOrChaos::Finite(v) => Extremum {
                value: v,
                witnesses,
            },
            ValueOrChaos::NegInfinity => unreachable!("a game has at least one profile"),
        }
    }

    /// Best equilibrium value divided by the control optimum.
    pub fn efficiency(&self, w: &Weights) -> Result<ValueOrChaos> {
        let optimum = self.control_optimum(w).value;
        if !optimum.is_positive() {
            return Err(Error::NonPositiveOptimum(optimum));
        }
        Ok(match self.best_equilibrium_value(w, &Rational::zero()).value {
            ValueOrChaos::Finite(v) => ValueOrChaos::Finite(v / optimum),
            ValueOrChaos::NegInfinity => ValueOrChaos::NegInfinity,
        })
    }

    pub(crate) fn extremum_over(&self, idxs: &[usize], w: &Weights, maximize: bool) -> Extremum<ValueOrChaos> {
        let mut best: Option<Rational> = None;
        let mut witnesses = Vec::new();
        for &idx in idxs {
            let v = self.aggregate_at(idx, w);
            let better = match &best {
                None => true,
                Some(b) => {
                    if maximize {
                        v > *b
                    } else {
                        v < *b
                    }
                }
            };
            if better {
                best = Some(v);
                witnesses.clear();
                witnesses.push(self.profile_at(idx));
            } else if best.as_ref() == Some(&v) {
                witnesses.push(self.profile_at(idx));
            }
        }
        Extremum {
            value: best.map_or(ValueOrChaos::NegInfinity, ValueOrChaos::Finite),
            witnesses,
        }
    }

    /// Partition of the profiles by exact payoff vector, ordered
    /// lexicographically by that vector.
    pub fn payoff_range(&self) -> Vec<PayoffGroup> {
        let mut groups: BTreeMap<&PayoffVector, Vec<Profile>> = BTreeMap::new();
        for (idx, y) in self.payoffs.iter().enumerate() {
            groups.entry(y).or_default().push(self.profile_at(idx));
        }
        groups
            .into_iter()
            .map(|(value, members)| PayoffGroup {
                value: value.clone(),
                members,
            })
            .collect()
    }

    /// Maximum absolute payoff component over the whole game.
    pub fn max_abs_payoff(&self) -> Rational {
        self.payoffs
            .iter()
            .flat_map(|y| y.0.iter())
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }
}
