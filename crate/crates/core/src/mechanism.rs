//! Transfers, budget schemes and implementability thresholds.
//!
//! A reward scheme (kappa) lets a mediator pay nonnegative amounts summing to
//! at most `kappa` at every profile. A tax scheme (theta) levies rate `theta`
//! on every payoff and redistributes nonnegative amounts summing to at most
//! the tax collected at that profile. For both, a target profile `a` can be
//! made an equilibrium iff its total deviation gap `sum_i d_i(a)` fits the
//! budget: paying `d(a)` at the target alone is enough, and any reward-only
//! transfer making `a` an equilibrium pays at least `d(a)` there.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::game::{Game, PayoffVector, Profile};
use crate::info::{self, BoxScheme, Implementation, InfoMode};
use crate::rational::Rational;

/// Transfer contingent on the played profile.
#[derive(Debug, Clone, PartialEq)]
pub struct FullTransfer {
    values: Vec<PayoffVector>,
}

impl FullTransfer {
    pub fn zero(g: &Game) -> Self {
        FullTransfer {
            values: vec![PayoffVector::zeros(g.num_players()); g.num_profiles()],
        }
    }

    /// Transfers listed in profile index order.
    pub fn from_values(g: &Game, values: Vec<PayoffVector>) -> Result<Self> {
        if values.len() != g.num_profiles() {
            return Err(Error::IncompleteTransfer {
                expected: g.num_profiles(),
                found: values.len(),
            });
        }
        check_width(g, values.iter())?;
        Ok(FullTransfer { values })
    }

    pub fn set(&mut self, g: &Game, profile: &Profile, value: PayoffVector) -> Result<()> {
        check_width(g, std::iter::once(&value))?;
        let idx = g.index_of(profile)?;
        self.values[idx] = value;
        Ok(())
    }

    pub fn with(mut self, g: &Game, profile: &Profile, value: PayoffVector) -> Result<Self> {
        self.set(g, profile, value)?;
        Ok(self)
    }

    pub fn at(&self, idx: usize) -> &PayoffVector {
        &self.values[idx]
    }

    pub fn get(&self, g: &Game, profile: &Profile) -> Result<&PayoffVector> {
        Ok(&self.values[g.index_of(profile)?])
    }

    pub fn values(&self) -> &[PayoffVector] {
        &self.values
    }

    /// Nonzero entries in profile order.
    pub fn support(&self, g: &Game) -> Vec<(Profile, &PayoffVector)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(idx, v)| (g.profile_at(idx), v))
            .collect()
    }

    fn check(&self, g: &Game) -> Result<()> {
        if self.values.len() != g.num_profiles() {
            return Err(Error::IncompleteTransfer {
                expected: g.num_profiles(),
                found: self.values.len(),
            });
        }
        check_width(g, self.values.iter())
    }
}

/// Transfer contingent only on the realized payoff vector. Payoff vectors
/// without an entry receive zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialTransfer {
    num_players: usize,
    values: BTreeMap<PayoffVector, PayoffVector>,
}

impl PartialTransfer {
    pub fn zero(num_players: usize) -> Self {
        PartialTransfer {
            num_players,
            values: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, y: PayoffVector, value: PayoffVector) {
        self.values.insert(y, value);
    }

    pub fn with(mut self, y: PayoffVector, value: PayoffVector) -> Self {
        self.set(y, value);
        self
    }

    pub fn get(&self, y: &PayoffVector) -> PayoffVector {
        self.values
            .get(y)
            .cloned()
            .unwrap_or_else(|| PayoffVector::zeros(self.num_players))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&PayoffVector, &PayoffVector)> {
        self.values.iter()
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    fn check(&self, g: &Game) -> Result<()> {
        if self.num_players != g.num_players() {
            return Err(Error::DimensionMismatch {
                context: "partial transfer".into(),
                expected: g.num_players(),
                found: self.num_players,
            });
        }
        for (y, v) in &self.values {
            if !g.payoffs().contains(y) {
                return Err(Error::UnknownPayoffVector(y.to_string()));
            }
            check_width(g, std::iter::once(v))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transfer {
    Full(FullTransfer),
    Partial(PartialTransfer),
}

impl Transfer {
    /// Transfer received at the profile with index `idx`.
    pub fn at(&self, g: &Game, idx: usize) -> PayoffVector {
        match self {
            Transfer::Full(t) => t.at(idx).clone(),
            Transfer::Partial(t) => t.get(g.payoff_at(idx)),
        }
    }

    pub fn check(&self, g: &Game) -> Result<()> {
        match self {
            Transfer::Full(t) => t.check(g),
            Transfer::Partial(t) => t.check(g),
        }
    }

    pub fn mode(&self) -> InfoMode {
        match self {
            Transfer::Full(_) => InfoMode::Full,
            Transfer::Partial(_) => InfoMode::Partial,
        }
    }

    /// The profile-contingent view of this transfer.
    pub fn to_full(&self, g: &Game) -> FullTransfer {
        FullTransfer {
            values: (0..g.num_profiles()).map(|idx| self.at(g, idx)).collect(),
        }
    }
}

fn check_width<'a>(g: &Game, values: impl Iterator<Item = &'a PayoffVector>) -> Result<()> {
    for v in values {
        if v.len() != g.num_players() {
            return Err(Error::DimensionMismatch {
                context: "transfer vector".into(),
                expected: g.num_players(),
                found: v.len(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaScheme {
    kappa: Rational,
}

impl KappaScheme {
    pub fn new(kappa: Rational) -> Result<Self> {
        if kappa.is_negative() {
            return Err(Error::NegativeBudget(kappa));
        }
        Ok(KappaScheme { kappa })
    }

    pub fn kappa(&self) -> &Rational {
        &self.kappa
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaScheme {
    theta: Rational,
}

impl ThetaScheme {
    pub fn new(theta: Rational) -> Result<Self> {
        if theta.is_negative() || theta > Rational::one() {
            return Err(Error::InvalidTaxRate(theta));
        }
        Ok(ThetaScheme { theta })
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    Kappa(KappaScheme),
    Theta(ThetaScheme),
    Box(BoxScheme),
}

/// `J + pi`.
pub fn perturb_full(g: &Game, t: &FullTransfer) -> Result<Game> {
    t.check(g)?;
    Ok(g.map_payoffs(|idx, y| y.add(t.at(idx))))
}

/// `J(a) + pi(J(a))`.
pub fn perturb_partial(g: &Game, t: &PartialTransfer) -> Result<Game> {
    t.check(g)?;
    Ok(g.map_payoffs(|_, y| y.add(&t.get(y))))
}

/// Applies either kind of transfer additively.
pub fn perturb(g: &Game, t: &Transfer) -> Result<Game> {
    match t {
        Transfer::Full(t) => perturb_full(g, t),
        Transfer::Partial(t) => perturb_partial(g, t),
    }
}

/// `(1 - theta) J + psi`, after checking that `psi` is a valid
/// redistribution of the tax collected at every profile.
pub fn perturb_tax(g: &Game, theta: &Rational, psi: &Transfer) -> Result<Game> {
    ThetaScheme::new(theta.clone())?;
    g.require_nonnegative()?;
    psi.check(g)?;
    let keep = Rational::one() - theta;
    let mut out = Vec::with_capacity(g.num_profiles());
    for idx in 0..g.num_profiles() {
        let y = g.payoff_at(idx);
        let share = psi.at(g, idx);
        if share.0.iter().any(Signed::is_negative) {
            return Err(Error::NegativeRedistribution(g.profile_at(idx).to_string()));
        }
        let budget = theta * y.sum();
        let paid = share.sum();
        if paid > budget {
            return Err(Error::BudgetViolation {
                at: g.profile_at(idx).to_string(),
                paid: Box::new(paid),
                budget: Box::new(budget),
            });
        }
        out.push(y.scale(&keep).add(&share));
    }
    Ok(g.map_payoffs(|idx, _| out[idx].clone()))
}

/// Whether `t` respects every pointwise constraint of `s` on `g`.
pub fn scheme_member(t: &Transfer, s: &Scheme, g: &Game) -> bool {
    if t.check(g).is_err() {
        return false;
    }
    match s {
        Scheme::Kappa(k) => (0..g.num_profiles()).all(|idx| {
            let v = t.at(g, idx);
            v.0.iter().all(|x| !x.is_negative()) && v.sum() <= k.kappa
        }),
        Scheme::Theta(th) => {
            g.first_negative_profile().is_none()
                && (0..g.num_profiles()).all(|idx| {
                    let v = t.at(g, idx);
                    v.0.iter().all(|x| !x.is_negative())
                        && v.sum() <= &th.theta * g.payoff_at(idx).sum()
                })
        }
        Scheme::Box(b) => (0..g.num_profiles()).all(|idx| b.contains(g.payoff_at(idx), &t.at(g, idx))),
    }
}

/// Per-player shortfall against the best unilateral deviation, floored at
/// zero. All zero exactly at equilibria.
pub fn deviation_gaps(g: &Game, a: &Profile) -> Result<PayoffVector> {
    Ok(gaps_at(g, g.index_of(a)?))
}

pub(crate) fn gaps_at(g: &Game, idx: usize) -> PayoffVector {
    let here = g.payoff_at(idx);
    PayoffVector(
        (0..g.num_players())
            .map(|i| g.best_response_payoff(idx, i) - &here[i])
            .collect(),
    )
}

/// Smallest reward budget making `a` an equilibrium: `sum_i d_i(a)`.
pub fn kappa_threshold(g: &Game, a: &Profile) -> Result<Rational> {
    Ok(kappa_threshold_at(g, g.index_of(a)?))
}

pub(crate) fn kappa_threshold_at(g: &Game, idx: usize) -> Rational {
    gaps_at(g, idx).sum()
}

/// Smallest tax rate making `a` an equilibrium: the least theta with
/// `(1 - theta) sum d(a) <= theta sum J(a)`.
pub fn theta_threshold(g: &Game, a: &Profile) -> Result<Rational> {
    g.require_nonnegative()?;
    Ok(theta_threshold_at(g, g.index_of(a)?))
}

pub(crate) fn theta_threshold_at(g: &Game, idx: usize) -> Rational {
    let gap = kappa_threshold_at(g, idx);
    if gap.is_zero() {
        return Rational::zero();
    }
    // gap > 0 and J >= 0, so the denominator is positive; J(a) summing to
    // zero gives rate one.
    let total = &gap + g.payoff_at(idx).sum();
    gap / total
}

/// Canonical transfer implementing `a` under `s`, or `Error::Infeasible`.
///
/// Reward schemes pay exactly `d(a)` at the target; tax schemes
/// redistribute `(1 - theta) d(a)` there. In partial mode the payment is
/// keyed by `J(a)`, which leaves deviations with the same payoff vector
/// neutral. Box schemes go through the LP in [`info::implementable`].
pub fn synthesize_witness(g: &Game, a: &Profile, s: &Scheme, mode: InfoMode) -> Result<Transfer> {
    let idx = g.index_of(a)?;
    let attach = |payment: PayoffVector| -> Result<Transfer> {
        Ok(match mode {
            InfoMode::Full => Transfer::Full(FullTransfer::zero(g).with(g, a, payment)?),
            InfoMode::Partial => {
                let mut t = PartialTransfer::zero(g.num_players());
                if !payment.is_zero() {
                    t.set(g.payoff_at(idx).clone(), payment);
                }
                Transfer::Partial(t)
            }
        })
    };
    match s {
        Scheme::Kappa(k) => {
            let gaps = gaps_at(g, idx);
            let need = gaps.sum();
            if need > k.kappa {
                return Err(Error::Infeasible {
                    target: a.to_string(),
                    reason: format!("needs reward budget {need}, scheme provides {}", k.kappa),
                });
            }
            attach(gaps)
        }
        Scheme::Theta(th) => {
            g.require_nonnegative()?;
            let need = theta_threshold_at(g, idx);
            if need > th.theta {
                return Err(Error::Infeasible {
                    target: a.to_string(),
                    reason: format!("needs tax rate {need}, scheme provides {}", th.theta),
                });
            }
            attach(gaps_at(g, idx).scale(&(Rational::one() - &th.theta)))
        }
        Scheme::Box(b) => match info::implementable(g, a, b, mode)? {
            Implementation::Feasible(t) => Ok(t),
            Implementation::Infeasible(_) => Err(Error::Infeasible {
                target: a.to_string(),
                reason: "no transfer in the box scheme makes it an equilibrium".into(),
            }),
        },
    }
}

/// Game the players actually face under scheme `s` with transfer `t`: tax
/// schemes scale the base payoffs by `1 - theta` before adding `t`.
pub fn perturbed_for_scheme(g: &Game, t: &Transfer, s: &Scheme) -> Result<Game> {
    match s {
        Scheme::Theta(th) => perturb_tax(g, th.theta(), t),
        _ => perturb(g, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::testutil::{illustrative, info_gap_game, shared_payoffs};

    fn p(c: &[usize]) -> Profile {
        Profile::from(c)
    }

    fn kappa(k: i64) -> Scheme {
        Scheme::Kappa(KappaScheme::new(int(k)).unwrap())
    }

    fn theta(q: Rational) -> Scheme {
        Scheme::Theta(ThetaScheme::new(q).unwrap())
    }

    /// psi from the optimal redistribution table at rate `q`.
    fn table3_psi(g: &Game, q: &Rational) -> FullTransfer {
        let c = |k: i64| q * int(k);
        let z = Rational::zero;
        let entries = [
            ([0, 0], [c(100), c(100)]),
            ([0, 1], [c(102), z()]),
            ([0, 2], [c(102), z()]),
            ([1, 0], [z(), c(102)]),
            ([2, 0], [z(), c(102)]),
        ];
        let mut t = FullTransfer::zero(g);
        for (prof, v) in entries {
            t.set(g, &Profile::from(prof), PayoffVector(v.to_vec())).unwrap();
        }
        t
    }

    #[test]
    fn reward_at_01_adds_an_equilibrium() {
        let g = illustrative();
        let t = FullTransfer::zero(&g)
            .with(&g, &p(&[0, 1]), PayoffVector::from_ints(&[1, 0]))
            .unwrap();
        let h = perturb_full(&g, &t).unwrap();
        assert_eq!(h.nash_equilibria(), vec![p(&[0, 1]), p(&[1, 1]), p(&[2, 2])]);
        assert_eq!(g, illustrative());
        assert!(scheme_member(&Transfer::Full(t), &kappa(1), &g));
    }

    #[test]
    fn reward_at_00_and_zero_transfer() {
        let g = illustrative();
        let t = FullTransfer::zero(&g)
            .with(&g, &p(&[0, 0]), PayoffVector::from_ints(&[2, 2]))
            .unwrap();
        let h = perturb_full(&g, &t).unwrap();
        assert!(h.is_equilibrium(&p(&[0, 0])).unwrap());
        assert!(!scheme_member(&Transfer::Full(t), &kappa(1), &g));
        assert_eq!(perturb_full(&g, &FullTransfer::zero(&g)).unwrap(), g);
    }

    #[test]
    fn partial_transfers_move_whole_groups() {
        let g = shared_payoffs();
        let t = PartialTransfer::zero(2).with(PayoffVector::from_ints(&[1, 1]), PayoffVector::from_ints(&[0, 5]));
        let h = perturb_partial(&g, &t).unwrap();
        assert_eq!(h.payoff_at(0), &PayoffVector::from_ints(&[1, 6]));
        assert_eq!(h.payoff_at(1), &PayoffVector::from_ints(&[1, 6]));
        assert_eq!(h.payoff_at(2), g.payoff_at(2));
        assert_eq!(perturb_partial(&g, &PartialTransfer::zero(2)).unwrap(), g);

        let off = PartialTransfer::zero(2).with(PayoffVector::from_ints(&[7, 7]), PayoffVector::from_ints(&[1, 1]));
        assert!(matches!(perturb_partial(&g, &off), Err(Error::UnknownPayoffVector(_))));
    }

    #[test]
    fn uniform_partial_shift_keeps_equilibria() {
        let g = info_gap_game();
        let mut t = PartialTransfer::zero(2);
        for group in g.payoff_range() {
            t.set(group.value, PayoffVector::from_ints(&[-1, 0]));
        }
        let h = perturb_partial(&g, &t).unwrap();
        for idx in 0..g.num_profiles() {
            assert_eq!(h.payoff_at(idx)[0], &g.payoff_at(idx)[0] - int(1));
        }
        assert_eq!(h.nash_equilibria(), g.nash_equilibria());
    }

    #[test]
    fn tax_table_reproduced() {
        let g = illustrative();
        let q = ratio(1, 60);
        let psi = table3_psi(&g, &q);
        let h = perturb_tax(&g, &q, &Transfer::Full(psi.clone())).unwrap();
        let keep = int(1) - &q;
        let expect = |a: &[usize], v: [Rational; 2]| {
            assert_eq!(h.payoff(&p(a)).unwrap(), &PayoffVector(v.to_vec()), "{a:?}");
        };
        expect(&[0, 0], [int(100), int(100)]);
        expect(&[0, 1], [int(102) * &q, int(102) * &keep]);
        expect(&[1, 0], [int(102) * &keep, int(102) * &q]);
        expect(&[1, 1], [keep.clone(), int(2) * &keep]);
        expect(&[2, 2], [int(3) * &keep, keep.clone()]);
        expect(&[1, 2], [int(0), int(0)]);
        assert!(scheme_member(&Transfer::Full(psi), &theta(q), &g));
    }

    #[test]
    fn tax_edge_cases() {
        let g = illustrative();
        assert_eq!(perturb_tax(&g, &int(0), &Transfer::Full(FullTransfer::zero(&g))).unwrap(), g);

        // full pooling: everyone receives the average
        let pool = FullTransfer::from_values(
            &g,
            g.payoffs().iter().map(|y| PayoffVector(vec![y.sum() / int(2); 2])).collect(),
        )
        .unwrap();
        let h = perturb_tax(&g, &int(1), &Transfer::Full(pool)).unwrap();
        for (idx, y) in h.payoffs().iter().enumerate() {
            assert_eq!(y[0], y[1]);
            assert_eq!(y.sum(), g.payoff_at(idx).sum());
        }

        let greedy = FullTransfer::zero(&g)
            .with(&g, &p(&[0, 0]), PayoffVector::from_ints(&[5, 0]))
            .unwrap();
        assert!(matches!(
            perturb_tax(&g, &ratio(1, 100), &Transfer::Full(greedy)),
            Err(Error::BudgetViolation { .. })
        ));
        let negative = FullTransfer::zero(&g)
            .with(&g, &p(&[0, 0]), PayoffVector::from_ints(&[-1, 0]))
            .unwrap();
        assert!(matches!(
            perturb_tax(&g, &ratio(1, 2), &Transfer::Full(negative)),
            Err(Error::NegativeRedistribution(_))
        ));
        let neg_game = Game::from_int_table(&[1], &[&[-1]]).unwrap();
        assert!(matches!(
            perturb_tax(&neg_game, &ratio(1, 2), &Transfer::Full(FullTransfer::zero(&neg_game))),
            Err(Error::NegativeBasePayoff(_))
        ));
    }

    #[test]
    fn gaps_and_thresholds() {
        let g = illustrative();
        assert_eq!(deviation_gaps(&g, &p(&[0, 1])).unwrap(), PayoffVector::from_ints(&[1, 0]));
        assert_eq!(deviation_gaps(&g, &p(&[1, 1])).unwrap(), PayoffVector::from_ints(&[0, 0]));
        assert_eq!(deviation_gaps(&g, &p(&[0, 0])).unwrap(), PayoffVector::from_ints(&[2, 2]));

        assert_eq!(kappa_threshold(&g, &p(&[0, 1])).unwrap(), int(1));
        assert_eq!(kappa_threshold(&g, &p(&[0, 0])).unwrap(), int(4));
        assert_eq!(kappa_threshold(&g, &p(&[2, 2])).unwrap(), int(0));

        assert_eq!(theta_threshold(&g, &p(&[0, 1])).unwrap(), ratio(1, 103));
        assert_eq!(theta_threshold(&g, &p(&[0, 0])).unwrap(), ratio(1, 51));
        assert_eq!(theta_threshold(&g, &p(&[1, 1])).unwrap(), int(0));
        assert_eq!(theta_threshold(&g, &p(&[2, 0])).unwrap(), ratio(1, 103));
        assert_eq!(theta_threshold(&g, &p(&[1, 0])).unwrap(), ratio(1, 52));
    }

    #[test]
    fn theta_threshold_is_one_when_nothing_is_produced() {
        // (1,0) pays nothing but player 1 would rather play 0
        let g = Game::from_int_table(&[2, 1], &[&[1, 0], &[0, 0]]).unwrap();
        assert_eq!(theta_threshold(&g, &p(&[1, 0])).unwrap(), int(1));
        let w = synthesize_witness(&g, &p(&[1, 0]), &theta(int(1)), InfoMode::Full).unwrap();
        let h = perturb_tax(&g, &int(1), &w).unwrap();
        assert!(h.is_equilibrium(&p(&[1, 0])).unwrap());
    }

    #[test]
    fn negative_games_have_no_theta_threshold() {
        let g = Game::from_int_table(&[1], &[&[-1]]).unwrap();
        assert!(matches!(theta_threshold(&g, &p(&[0])), Err(Error::NegativeBasePayoff(_))));
    }

    #[test]
    fn witnesses_reproduce_hand_constructions() {
        let g = illustrative();
        let w = synthesize_witness(&g, &p(&[0, 0]), &kappa(4), InfoMode::Full).unwrap();
        let Transfer::Full(ref t) = w else { panic!() };
        assert_eq!(t.support(&g), vec![(p(&[0, 0]), &PayoffVector::from_ints(&[2, 2]))]);
        assert!(perturb(&g, &w).unwrap().is_equilibrium(&p(&[0, 0])).unwrap());

        let w = synthesize_witness(&g, &p(&[0, 1]), &kappa(1), InfoMode::Full).unwrap();
        let Transfer::Full(ref t) = w else { panic!() };
        assert_eq!(t.support(&g), vec![(p(&[0, 1]), &PayoffVector::from_ints(&[1, 0]))]);

        assert!(matches!(
            synthesize_witness(&g, &p(&[0, 0]), &kappa(3), InfoMode::Full),
            Err(Error::Infeasible { .. })
        ));
        assert!(matches!(
            synthesize_witness(&g, &p(&[0, 0]), &theta(ratio(1, 52)), InfoMode::Full),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn witness_validity_all_profiles_all_modes() {
        let g = illustrative();
        for idx in 0..g.num_profiles() {
            let a = g.profile_at(idx);
            for mode in [InfoMode::Full, InfoMode::Partial] {
                let s = Scheme::Kappa(KappaScheme::new(kappa_threshold(&g, &a).unwrap()).unwrap());
                let w = synthesize_witness(&g, &a, &s, mode).unwrap();
                assert!(scheme_member(&w, &s, &g));
                assert!(perturb(&g, &w).unwrap().is_equilibrium(&a).unwrap());

                let s = theta(theta_threshold(&g, &a).unwrap());
                let w = synthesize_witness(&g, &a, &s, mode).unwrap();
                assert!(scheme_member(&w, &s, &g));
                let h = perturbed_for_scheme(&g, &w, &s).unwrap();
                assert!(h.is_equilibrium(&a).unwrap(), "{a} {mode:?}");
            }
        }
    }

    #[test]
    fn scheme_validation() {
        assert!(KappaScheme::new(int(-1)).is_err());
        assert!(ThetaScheme::new(ratio(3, 2)).is_err());
        assert!(ThetaScheme::new(int(-1)).is_err());
    }
}
