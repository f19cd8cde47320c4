#![allow(dead_code)]

use mechforge_core::rational::{int, ratio};
use mechforge_core::{
    efficiency_curve, implementable, info_gap_report, perturb, CurveKind, Game, Implementation, InfoMode,
    PayoffVector, Profile, Rational, ValueOrChaos, Weights,
};
use mechforge_core::{kappa_threshold, theta_threshold, BoxScheme};
use num_traits::{Signed, Zero};
use rand::Rng;

pub fn illustrative() -> Game {
    Game::from_int_table(
        &[3, 3],
        &[&[100, 100], &[0, 102], &[0, 102], &[102, 0], &[1, 2], &[0, 0], &[102, 0], &[0, 0], &[3, 1]],
    )
    .unwrap()
}

pub fn info_gap_game() -> Game {
    Game::from_int_table(
        &[3, 3],
        &[&[100, 100], &[101, 101], &[1, 1], &[101, 101], &[1, 1], &[2, 103], &[1, 1], &[103, 2], &[1, 1]],
    )
    .unwrap()
}

pub fn p(c: &[usize]) -> Profile {
    Profile::from(c)
}

pub fn random_game_with(rng: &mut impl Rng, sizes: &[usize], lo: i64, hi: i64) -> Game {
    let total: usize = sizes.iter().product();
    let payoffs = (0..total)
        .map(|_| PayoffVector::new(sizes.iter().map(|_| int(rng.gen_range(lo..=hi))).collect()))
        .collect();
    Game::with_default_labels(sizes, payoffs).unwrap()
}

/// At most three players with at most three actions each.
pub fn random_game(rng: &mut impl Rng, lo: i64, hi: i64) -> Game {
    let n = rng.gen_range(1..=3);
    let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    random_game_with(rng, &sizes, lo, hi)
}

pub fn random_weights(rng: &mut impl Rng, n: usize) -> Weights {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=20)).collect();
    let total: i64 = raw.iter().sum();
    Weights::new(raw.iter().map(|&r| ratio(r, total)).collect()).unwrap()
}

/// Equilibria straight from the definition, via the public payoff lookup.
pub fn brute_equilibria(g: &Game, eps: &Rational) -> Vec<Profile> {
    g.profiles()
        .filter(|a| {
            let here = g.payoff(a).unwrap();
            (0..g.num_players()).all(|i| {
                (0..g.actions(i).len()).all(|b| {
                    let mut dev = a.choices().to_vec();
                    dev[i] = b;
                    g.payoff(&Profile::new(dev)).unwrap()[i] <= &here[i] + eps
                })
            })
        })
        .collect()
}

fn nonnegative(g: &Game) -> bool {
    g.payoffs().iter().all(|y| y.components().iter().all(|v| !v.is_negative()))
}

pub fn check_eps_nesting(g: &Game) -> Result<(), String> {
    let eps = [int(0), ratio(1, 2), int(1), int(3), int(20)];
    for w in eps.windows(2) {
        let small = g.epsilon_equilibria(&w[0]);
        let large = g.epsilon_equilibria(&w[1]);
        if !small.iter().all(|a| large.contains(a)) {
            return Err(format!("eps {} set not inside eps {} set", w[0], w[1]));
        }
    }
    if g.epsilon_equilibria(&int(0)) != brute_equilibria(g, &int(0)) {
        return Err("equilibria differ from brute force".into());
    }
    Ok(())
}

pub fn check_curve_monotone(g: &Game, w: &Weights) -> Result<(), String> {
    let mut kinds = vec![CurveKind::Kappa];
    if nonnegative(g) {
        kinds.push(CurveKind::Theta);
    }
    for kind in kinds {
        let c = efficiency_curve(g, kind, w).map_err(|e| e.to_string())?;
        let values: Vec<&ValueOrChaos> = c.steps().iter().map(|s| &s.value).collect();
        if values.windows(2).any(|v| v[1] <= v[0]) {
            return Err(format!("{kind:?} curve not increasing"));
        }
        // step values are reached, and the curve ends at the optimum
        let last = c.steps().last().unwrap();
        if last.value != ValueOrChaos::Finite(g.control_optimum(w).value) {
            return Err(format!("{kind:?} curve does not end at the optimum"));
        }
        let probes = [int(0), ratio(1, 3), ratio(1, 2), int(1)];
        for pair in probes.windows(2) {
            if c.value_at(&pair[1]).unwrap() < c.value_at(&pair[0]).unwrap() {
                return Err(format!("{kind:?} curve decreases between {} and {}", pair[0], pair[1]));
            }
        }
    }
    Ok(())
}

pub fn check_zero_threshold(g: &Game) -> Result<(), String> {
    for a in g.profiles() {
        let eq = g.is_equilibrium(&a).unwrap();
        if kappa_threshold(g, &a).unwrap().is_zero() != eq {
            return Err(format!("kappa threshold at {a} disagrees with equilibrium check"));
        }
        if nonnegative(g) && theta_threshold(g, &a).unwrap().is_zero() != eq {
            return Err(format!("theta threshold at {a} disagrees with equilibrium check"));
        }
    }
    Ok(())
}

pub fn boxes(n: usize) -> Vec<BoxScheme> {
    vec![
        BoxScheme::zero(n),
        BoxScheme::reward_budget(n, int(1)),
        BoxScheme::reward_budget(n, int(3)),
        BoxScheme::punish_budget(n, int(1)),
        BoxScheme::punish_budget(n, int(4)),
    ]
}

pub fn check_info_order(g: &Game, w: &Weights) -> Result<(), String> {
    for d in boxes(g.num_players()) {
        let r = info_gap_report(g, &d, w).map_err(|e| e.to_string())?;
        if r.v_partial.value > r.v_full.value {
            return Err("partial information beat full information".into());
        }
    }
    Ok(())
}

pub fn check_shift_invariance(g: &Game, shift: &[i64]) -> Result<(), String> {
    let h = g.map_payoffs(|_, y| PayoffVector::new(y.components().iter().zip(shift).map(|(v, s)| v + int(*s)).collect()));
    if g.nash_equilibria() != h.nash_equilibria() {
        return Err(format!("shift {shift:?} changed the equilibria"));
    }
    for a in g.profiles() {
        if kappa_threshold(g, &a).unwrap() != kappa_threshold(&h, &a).unwrap() {
            return Err(format!("shift {shift:?} changed the threshold at {a}"));
        }
    }
    Ok(())
}

pub fn check_lipschitz(g: &Game, w1: &Weights, w2: &Weights) -> Result<(), String> {
    let v1 = g.best_equilibrium_value(w1, &int(0)).value;
    let v2 = g.best_equilibrium_value(w2, &int(0)).value;
    match (v1, v2) {
        (ValueOrChaos::NegInfinity, ValueOrChaos::NegInfinity) => Ok(()),
        (ValueOrChaos::Finite(a), ValueOrChaos::Finite(b)) => {
            let dist: Rational = w1.values().iter().zip(w2.values()).map(|(x, y)| (x - y).abs()).sum();
            if (a - b).abs() <= g.max_abs_payoff() * dist {
                Ok(())
            } else {
                Err("weighted value moved faster than the Lipschitz bound".into())
            }
        }
        _ => Err("equilibrium set depends on weights".into()),
    }
}

/// Every feasible verdict comes with a transfer in the box that makes the
/// target an equilibrium; every infeasible one with a valid certificate.
pub fn check_lp_round_trip(g: &Game) -> Result<(), String> {
    for d in boxes(g.num_players()) {
        for mode in [InfoMode::Full, InfoMode::Partial] {
            for a in g.profiles() {
                match implementable(g, &a, &d, mode).map_err(|e| e.to_string())? {
                    Implementation::Feasible(t) => {
                        t.check(g).map_err(|e| e.to_string())?;
                        for idx in 0..g.num_profiles() {
                            if !d.contains(g.payoff_at(idx), &t.at(g, idx)) {
                                return Err(format!("witness for {a} leaves the box"));
                            }
                        }
                        if !perturb(g, &t).unwrap().is_equilibrium(&a).unwrap() {
                            return Err(format!("witness for {a} does not implement it"));
                        }
                    }
                    Implementation::Infeasible(inf) => {
                        if !inf.certificate.verify(&inf.system) {
                            return Err(format!("bad certificate for {a}"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Closed-form reward curve against both LP modes with a reward box.
pub fn check_info_equivalence(g: &Game, kappa: i64, w: &Weights) -> Result<(), String> {
    let curve = efficiency_curve(g, CurveKind::Kappa, w).unwrap();
    let expected = curve.value_at(&int(kappa)).unwrap();
    let r = info_gap_report(g, &BoxScheme::reward_budget(g.num_players(), int(kappa)), w).unwrap();
    if r.v_full.value != expected || r.v_partial.value != expected {
        return Err(format!(
            "kappa {kappa}: closed form {expected}, full {}, partial {}",
            r.v_full.value, r.v_partial.value
        ));
    }
    Ok(())
}
