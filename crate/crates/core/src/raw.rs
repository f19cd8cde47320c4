//! The on-disk game description and its validation into a [`Game`].
//!
//! ```json
//! {
//!   "players": ["P1", "P2"],
//!   "actions": [["0", "1"], ["0", "1"]],
//!   "payoffs": { "0,0": ["1", "1"], "0,1": ["1", "1"], "1,0": ["0", "0"], "1,1": ["2", "2"] }
//! }
//! ```
//!
//! Payoff keys are the players' action labels joined by commas. Values are
//! rational strings (JSON numbers are accepted and converted exactly from
//! their literal text).

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::game::{Game, PayoffVector, Profile};
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGame {
    pub players: Vec<String>,
    pub actions: Vec<Vec<String>>,
    pub payoffs: Map<String, Value>,
}

impl RawGame {
    /// Canonical description: payoffs listed in profile order, rationals in
    /// reduced `p/q` form.
    pub fn from_game(g: &Game) -> RawGame {
        let mut payoffs = Map::new();
        for (idx, y) in g.payoffs().iter().enumerate() {
            let key = profile_key(g, &g.profile_at(idx));
            let values = y
                .components()
                .iter()
                .map(|q| Value::String(format_rational(q)))
                .collect();
            payoffs.insert(key, Value::Array(values));
        }
        RawGame {
            players: g.players().to_vec(),
            actions: g.all_actions().to_vec(),
            payoffs,
        }
    }
}

/// Comma-joined action labels of `profile`.
pub fn profile_key(g: &Game, profile: &Profile) -> String {
    profile
        .choices()
        .iter()
        .enumerate()
        .map(|(i, &a)| g.actions(i)[a].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

/// Resolves comma-joined action labels to a profile of `g`.
pub fn parse_profile_key(g: &Game, key: &str) -> Result<Profile> {
    let labels: Vec<&str> = key.split(',').collect();
    if labels.len() != g.num_players() {
        return Err(Error::DimensionMismatch {
            context: format!("profile {key:?}"),
            expected: g.num_players(),
            found: labels.len(),
        });
    }
    labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            g.actions(i)
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::UnknownProfile(key.to_string()))
        })
        .collect::<Result<Vec<_>>>()
        .map(Profile)
}

/// Reads one rational from a JSON string or number.
pub fn rational_from_json(value: &Value, field: &str) -> Result<Rational> {
    let text = match value {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => {
            return Err(Error::NonRationalNumber {
                context: field.to_string(),
                value: other.to_string(),
            })
        }
    };
    parse_rational(&text).ok_or(Error::NonRationalNumber {
        context: field.to_string(),
        value: text,
    })
}

/// Validates a raw description into a game. Every profile of the action
/// product must appear exactly once.
pub fn build_game(raw: &RawGame) -> Result<Game> {
    let n = raw.players.len();
    if n == 0 {
        return Err(Error::NoPlayers);
    }
    if raw.actions.len() != n {
        return Err(Error::DimensionMismatch {
            context: "actions".into(),
            expected: n,
            found: raw.actions.len(),
        });
    }
    for label in raw.actions.iter().flatten() {
        if label.is_empty() || label.contains(',') {
            return Err(Error::InvalidLabel(label.clone()));
        }
    }
    // Shape check first so we can index profiles.
    let sizes: Vec<usize> = raw.actions.iter().map(Vec::len).collect();
    if let Some(player) = sizes.iter().position(|&k| k == 0) {
        return Err(Error::NoActions { player });
    }
    let total: usize = sizes.iter().product();
    let placeholder = Game::new(
        raw.players.clone(),
        raw.actions.clone(),
        vec![PayoffVector::zeros(n); total],
    )?;

    let mut payoffs: Vec<Option<PayoffVector>> = vec![None; total];
    for (key, value) in &raw.payoffs {
        let profile = parse_profile_key(&placeholder, key)?;
        let idx = placeholder.index_of(&profile)?;
        let field = format!("payoffs[{key:?}]");
        let Value::Array(items) = value else {
            return Err(Error::InvalidField {
                field,
                reason: "expected a list of rationals".into(),
            });
        };
        if items.len() != n {
            return Err(Error::DimensionMismatch {
                context: field,
                expected: n,
                found: items.len(),
            });
        }
        let components = items
            .iter()
            .enumerate()
            .map(|(j, v)| rational_from_json(v, &format!("{field}[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        if payoffs[idx].is_some() {
            return Err(Error::InvalidField {
                field,
                reason: "profile listed twice".into(),
            });
        }
        payoffs[idx] = Some(PayoffVector(components));
    }
    let payoffs = payoffs
        .into_iter()
        .enumerate()
        .map(|(idx, y)| {
            y.ok_or_else(|| Error::MissingProfile(profile_key(&placeholder, &placeholder.profile_at(idx))))
        })
        .collect::<Result<Vec<_>>>()?;
    Game::new(raw.players.clone(), raw.actions.clone(), payoffs)
}
