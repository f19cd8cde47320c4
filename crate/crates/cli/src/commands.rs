use std::path::Path;

use mechforge_core::raw::profile_key;
use mechforge_core::rational::format_rational;
use mechforge_core::{
    efficiency_curve, implementable, info_gap_report, optimize_theta, perturbed_for_scheme, planner_curve,
    scheme_member, synthesize_witness, AffineScale, CurveKind, Error as CoreError, Extremum, Game, Implementation,
    InfoMode, KappaScheme, PlannerFamily, ProportionalFamily, Rational, Scheme, ThetaScheme, Transfer, ValueOrChaos,
};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::input;
use crate::output::{self, emit, profiles, q, value, vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CurveScheme {
    Kappa,
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Info {
    Full,
    Partial,
}

impl From<Info> for InfoMode {
    fn from(i: Info) -> Self {
        match i {
            Info::Full => InfoMode::Full,
            Info::Partial => InfoMode::Partial,
        }
    }
}

fn extremum(g: &Game, e: &Extremum<ValueOrChaos>) -> Value {
    json!({ "value": value(&e.value), "witnesses": profiles(g, &e.witnesses) })
}

pub fn analyze(game: &Path, weights: Option<&str>, epsilon: &str, out: Option<&Path>) -> CliResult<()> {
    let g = input::load_game(game)?;
    let w = input::weights(weights, &g)?;
    let eps = input::rational(epsilon, "--epsilon")?;
    if eps < Rational::from_integer(0.into()) {
        return Err(CliError::Input(format!("--epsilon: {eps} is negative")));
    }
    let optimum = g.control_optimum(&w);
    let efficiency = match g.efficiency(&w) {
        Ok(e) => value(&e),
        Err(CoreError::NonPositiveOptimum(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let groups: Vec<Value> = g
        .payoff_range()
        .iter()
        .map(|grp| json!({ "payoff": vector(&grp.value), "profiles": profiles(&g, &grp.members) }))
        .collect();
    let report = json!({
        "players": g.players(),
        "weights": w.values().iter().map(q).collect::<Vec<_>>(),
        "epsilon": q(&eps),
        "equilibria": profiles(&g, &g.epsilon_equilibria(&eps)),
        "best_equilibrium": extremum(&g, &g.best_equilibrium_value(&w, &eps)),
        "worst_equilibrium": extremum(&g, &g.worst_equilibrium_value(&w, &eps)),
        "control_optimum": { "value": q(&optimum.value), "witnesses": profiles(&g, &optimum.witnesses) },
        "efficiency": efficiency,
        "payoff_groups": groups,
    });
    emit(&output::json_bytes(&report), out)
}

pub fn curve(
    game: &Path,
    scheme: CurveScheme,
    weights: Option<&str>,
    format: Format,
    out: Option<&Path>,
) -> CliResult<()> {
    let g = input::load_game(game)?;
    let w = input::weights(weights, &g)?;
    let kind = match scheme {
        CurveScheme::Kappa => CurveKind::Kappa,
        CurveScheme::Theta => CurveKind::Theta,
    };
    let c = efficiency_curve(&g, kind, &w)?;
    let bytes = match format {
        Format::Csv => output::curve_csv(&g, &c)?,
        Format::Json => output::json_bytes(&json!({
            "scheme": match scheme { CurveScheme::Kappa => "kappa", CurveScheme::Theta => "theta" },
            "steps": output::curve_json(&g, &c),
        })),
    };
    emit(&bytes, out)
}

fn transfer_json(g: &Game, t: &Transfer) -> Value {
    let mut m = Map::new();
    match t {
        Transfer::Full(t) => {
            for (p, v) in t.support(g) {
                m.insert(profile_key(g, &p), vector(v));
            }
        }
        Transfer::Partial(t) => {
            for (y, v) in t.entries() {
                if !v.is_zero() {
                    let key: Vec<String> = y.components().iter().map(format_rational).collect();
                    m.insert(key.join(","), vector(v));
                }
            }
        }
    }
    Value::Object(m)
}

pub fn implement(
    game: &Path,
    target: &str,
    scheme: &str,
    budget: Option<&str>,
    info: Info,
    out: Option<&Path>,
) -> CliResult<()> {
    let g = input::load_game(game)?;
    let a = input::profile(&g, target)?;
    let mode = InfoMode::from(info);
    let need_budget = || -> CliResult<Rational> {
        let text = budget.ok_or_else(|| CliError::Input(format!("--budget is required for scheme {scheme}")))?;
        input::rational(text, "--budget")
    };
    let (s, scheme_json) = match scheme {
        "kappa" => {
            let k = need_budget()?;
            (Scheme::Kappa(KappaScheme::new(k.clone())?), json!({ "kind": "kappa", "budget": q(&k) }))
        }
        "theta" => {
            let t = need_budget()?;
            (Scheme::Theta(ThetaScheme::new(t.clone())?), json!({ "kind": "theta", "budget": q(&t) }))
        }
        spec => (Scheme::Box(input::box_scheme(spec, &g)?), json!({ "kind": "box", "spec": spec })),
    };
    let info_name = match info {
        Info::Full => "full",
        Info::Partial => "partial",
    };
    let mut report = json!({
        "target": target,
        "scheme": scheme_json,
        "info": info_name,
    });

    let witness = match &s {
        Scheme::Box(b) => match implementable(&g, &a, b, mode)? {
            Implementation::Feasible(t) => Ok(t),
            Implementation::Infeasible(inf) => {
                report["certificate"] = Value::Array(inf.certificate.multipliers.iter().map(q).collect());
                Err(format!("target {a} is not implementable within the box"))
            }
        },
        _ => match synthesize_witness(&g, &a, &s, mode) {
            Ok(t) => Ok(t),
            Err(e @ CoreError::Infeasible { .. }) => Err(e.to_string()),
            Err(e) => return Err(e.into()),
        },
    };
    match witness {
        Ok(t) => {
            let h = perturbed_for_scheme(&g, &t, &s)?;
            report["feasible"] = Value::Bool(true);
            report["transfer"] = transfer_json(&g, &t);
            report["verification"] = json!({
                "in_scheme": scheme_member(&t, &s, &g),
                "perturbed_equilibria": profiles(&g, &h.nash_equilibria()),
                "target_is_equilibrium": h.is_equilibrium(&a)?,
            });
            emit(&output::json_bytes(&report), out)
        }
        Err(reason) => {
            report["feasible"] = Value::Bool(false);
            report["reason"] = Value::String(reason.clone());
            emit(&output::json_bytes(&report), out)?;
            Err(CliError::Infeasible(reason))
        }
    }
}

pub fn compare_info(game: &Path, spec: &str, weights: Option<&str>, out: Option<&Path>) -> CliResult<()> {
    let g = input::load_game(game)?;
    let w = input::weights(weights, &g)?;
    let d = input::box_scheme(spec, &g)?;
    let r = info_gap_report(&g, &d, &w)?;
    let report = json!({
        "box": spec,
        "v_full": value(&r.v_full.value),
        "v_full_witnesses": profiles(&g, &r.v_full.witnesses),
        "v_partial": value(&r.v_partial.value),
        "v_partial_witnesses": profiles(&g, &r.v_partial.witnesses),
        "equal": r.equal,
    });
    emit(&output::json_bytes(&report), out)
}

pub fn plan_theta(
    game: &Path,
    scale: &str,
    weights: Option<&str>,
    out: Option<&Path>,
    curve_out: Option<&Path>,
) -> CliResult<()> {
    let g = input::load_game(game)?;
    let w = input::weights(weights, &g)?;
    let c = input::rational_list(scale, "--scale")?;
    let [c0, c1] = <[Rational; 2]>::try_from(c)
        .map_err(|c| CliError::Input(format!("--scale: expected c0,c1, found {} values", c.len())))?;
    let scale = AffineScale::new(c0, c1)?;
    let f = ProportionalFamily::new(g.clone(), scale.clone())?;
    let curve = planner_curve(&f, &w)?;
    let opt = optimize_theta(&PlannerFamily::Proportional(f), &w)?;
    if let Some(path) = curve_out {
        emit(&output::curve_csv(&g, &curve)?, Some(path))?;
    }
    let report = json!({
        "scale": [q(scale.intercept()), q(scale.slope())],
        "theta_star": q(&opt.theta),
        "value": value(&opt.value),
        "witnesses": profiles(&g, &opt.witnesses),
        "efficiency": opt.efficiency.as_ref().map_or(Value::Null, q),
        "curve": output::curve_json(&g, &curve),
    });
    emit(&output::json_bytes(&report), out)
}
