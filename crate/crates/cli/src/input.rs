//! Reading games, box schemes, weights and rationals from files and flags.
//!
//! A box file lists linear rows on the transfer vector `z`:
//!
//! ```json
//! {
//!   "rows": [
//!     { "coeffs": ["1", "0"], "rel": "<=", "rhs": "0" },
//!     { "coeffs": ["1", "1"], "rel": ">=", "rhs": "-1", "payoff_coeffs": ["0", "0"] }
//!   ],
//!   "overrides": { "100,100": [ { "coeffs": ["1", "1"], "rel": "=", "rhs": "0" } ] }
//! }
//! ```
//!
//! `payoff_coeffs` make the right-hand side depend on the payoff vector `y`
//! (`rhs + payoff_coeffs . y`). Override keys are payoff vectors written as
//! comma-separated rationals.

use std::fs;
use std::path::Path;

use mechforge_core::raw::{build_game, parse_profile_key, rational_from_json, RawGame};
use mechforge_core::rational::parse_rational;
use mechforge_core::{BoxRow, BoxScheme, Game, PayoffVector, Profile, Rational, Relation, Weights};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))
}

pub fn load_game(path: &Path) -> CliResult<Game> {
    let text = read_text(path)?;
    let raw: RawGame = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))?;
    build_game(&raw).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn rational(text: &str, what: &str) -> CliResult<Rational> {
    parse_rational(text.trim()).ok_or_else(|| CliError::Input(format!("{what}: {text:?} is not an exact rational")))
}

pub fn rational_list(text: &str, what: &str) -> CliResult<Vec<Rational>> {
    text.split(',').map(|t| rational(t, what)).collect()
}

/// Uniform weights unless given.
pub fn weights(text: Option<&str>, g: &Game) -> CliResult<Weights> {
    let Some(text) = text else {
        return Ok(Weights::uniform(g.num_players()));
    };
    let values = rational_list(text, "--weights")?;
    if values.len() != g.num_players() {
        return Err(CliError::Input(format!(
            "--weights: expected {} values, found {}",
            g.num_players(),
            values.len()
        )));
    }
    Ok(Weights::new(values)?)
}

pub fn profile(g: &Game, labels: &str) -> CliResult<Profile> {
    parse_profile_key(g, labels).map_err(|e| CliError::Input(format!("--target {labels:?}: {e}")))
}

/// `reward-budget:K`, `punish-budget:X`, `zero`, or a box file path.
pub fn box_scheme(spec: &str, g: &Game) -> CliResult<BoxScheme> {
    let n = g.num_players();
    if spec == "zero" {
        return Ok(BoxScheme::zero(n));
    }
    if let Some(k) = spec.strip_prefix("reward-budget:") {
        let k = rational(k, "reward-budget")?;
        if k < Rational::from_integer(0.into()) {
            return Err(CliError::Input(format!("reward-budget: {k} is negative")));
        }
        return Ok(BoxScheme::reward_budget(n, k));
    }
    if let Some(x) = spec.strip_prefix("punish-budget:") {
        let x = rational(x, "punish-budget")?;
        if x < Rational::from_integer(0.into()) {
            return Err(CliError::Input(format!("punish-budget: {x} is negative")));
        }
        return Ok(BoxScheme::punish_budget(n, x));
    }
    let path = Path::new(spec);
    let text = read_text(path)?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{spec}: line {}, column {}: {e}", e.line(), e.column())))?;
    parse_box(&doc, n).map_err(|e| CliError::Input(format!("{spec}: {e}")))
}

fn parse_box(doc: &Value, n: usize) -> Result<BoxScheme, String> {
    let obj = doc.as_object().ok_or("expected a JSON object")?;
    if let Some(key) = obj.keys().find(|k| *k != "rows" && *k != "overrides") {
        return Err(format!("unknown field {key:?}"));
    }
    let rows = parse_rows(obj.get("rows").ok_or("missing field \"rows\"")?, "rows", n)?;
    let mut scheme = BoxScheme::new(n, rows).map_err(|e| e.to_string())?;
    if let Some(overrides) = obj.get("overrides") {
        let overrides = overrides.as_object().ok_or("\"overrides\" must be an object")?;
        for (key, rows) in overrides {
            let y = key
                .split(',')
                .map(|t| parse_rational(t.trim()).ok_or(format!("override key {key:?} is not a payoff vector")))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = parse_rows(rows, &format!("overrides[{key:?}]"), n)?;
            scheme = scheme
                .with_override(PayoffVector::new(y), rows)
                .map_err(|e| e.to_string())?;
        }
    }
    Ok(scheme)
}

fn parse_rows(v: &Value, field: &str, n: usize) -> Result<Vec<BoxRow>, String> {
    let items = v.as_array().ok_or(format!("{field} must be a list"))?;
    items
        .iter()
        .enumerate()
        .map(|(k, item)| parse_row(item, &format!("{field}[{k}]"), n))
        .collect()
}

fn parse_row(v: &Value, field: &str, n: usize) -> Result<BoxRow, String> {
    let obj = v.as_object().ok_or(format!("{field} must be an object"))?;
    if let Some(key) = obj
        .keys()
        .find(|k| !["coeffs", "rel", "rhs", "payoff_coeffs"].contains(&k.as_str()))
    {
        return Err(format!("{field}: unknown field {key:?}"));
    }
    let vector = |name: &str| -> Result<Option<Vec<Rational>>, String> {
        let Some(v) = obj.get(name) else { return Ok(None) };
        let items = v.as_array().ok_or(format!("{field}.{name} must be a list"))?;
        if items.len() != n {
            return Err(format!("{field}.{name}: expected {n} entries, found {}", items.len()));
        }
        items
            .iter()
            .enumerate()
            .map(|(j, x)| rational_from_json(x, &format!("{field}.{name}[{j}]")).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    };
    let coeffs = vector("coeffs")?.ok_or(format!("{field}: missing \"coeffs\""))?;
    let payoff_coeffs = vector("payoff_coeffs")?.unwrap_or_else(|| vec![Rational::from_integer(0.into()); n]);
    let relation = match obj.get("rel").and_then(Value::as_str) {
        Some("<=") => Relation::Le,
        Some(">=") => Relation::Ge,
        Some("=") | Some("==") => Relation::Eq,
        _ => return Err(format!("{field}.rel must be one of \"<=\", \">=\", \"=\"")),
    };
    let constant = rational_from_json(obj.get("rhs").ok_or(format!("{field}: missing \"rhs\""))?, &format!("{field}.rhs"))
        .map_err(|e| e.to_string())?;
    Ok(BoxRow {
        coeffs,
        relation,
        constant,
        payoff_coeffs,
    })
}
