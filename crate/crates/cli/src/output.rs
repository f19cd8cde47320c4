//! JSON and CSV rendering. Rationals are always `p/q` strings.

use std::io::Write;
use std::path::Path;

use mechforge_core::raw::profile_key;
use mechforge_core::rational::format_rational;
use mechforge_core::{EfficiencyCurve, Game, PayoffVector, Profile, Rational, ValueOrChaos};
use serde_json::{json, Value};
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

pub fn q(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

pub fn value(v: &ValueOrChaos) -> Value {
    Value::String(v.to_string())
}

pub fn vector(y: &PayoffVector) -> Value {
    Value::Array(y.components().iter().map(q).collect())
}

pub fn profiles(g: &Game, ps: &[Profile]) -> Value {
    Value::Array(ps.iter().map(|p| Value::String(profile_key(g, p))).collect())
}

pub fn curve_json(g: &Game, c: &EfficiencyCurve) -> Value {
    let steps: Vec<Value> = c
        .steps()
        .iter()
        .map(|s| {
            let mut row = json!({
                "breakpoint": q(&s.breakpoint),
                "value": value(&s.value),
            });
            if c.has_slopes() {
                row["slope"] = s.slope.as_ref().map_or(Value::Null, q);
            }
            row["witnesses"] = profiles(g, &s.witnesses);
            row
        })
        .collect();
    Value::Array(steps)
}

pub fn curve_csv(g: &Game, c: &EfficiencyCurve) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let slopes = c.has_slopes();
    let mut header = vec!["breakpoint", "value"];
    if slopes {
        header.push("slope");
    }
    header.push("witnesses");
    let csv_err = |e: csv::Error| CliError::Input(format!("csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for s in c.steps() {
        let mut record = vec![format_rational(&s.breakpoint), s.value.to_string()];
        if slopes {
            record.push(s.slope.as_ref().map(format_rational).unwrap_or_default());
        }
        let witnesses: Vec<String> = s.witnesses.iter().map(|p| format!("({})", profile_key(g, p))).collect();
        record.push(witnesses.join(";"));
        w.write_record(&record).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))
}

pub fn json_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("JSON values always serialize");
    out.push(b'\n');
    out
}

/// Writes to `path` through a sibling temp file, or to stdout.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> CliResult<()> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::io("cannot write to stdout", e));
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let ctx = || format!("cannot write {}", path.display());
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(ctx(), e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(ctx(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(ctx(), e.error))?;
    Ok(())
}
