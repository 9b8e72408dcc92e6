//! Command implementations behind the dispatcher.

use serde_json::{json, Value};

use crate::arw;
use crate::bl;
use crate::bl::Weight as _;
use crate::error::{Error, Result};
use crate::lpp;
use crate::rng::SeededStream;

use super::manifest::RunManifest;
use super::table::{Cell, ColumnSpec, ResultTable};
use super::{
    ArwCommand, ArwScanArgs, ArwStabilizeArgs, ArwTrapsArgs, BlCommand, BlDecomposeArgs,
    BlIntersectionsArgs, BlSampleArgs, Command, LppCommand, LppLlnArgs, LppSolveArgs, RunOutput,
};

pub fn execute(
    command: &Command,
    seed: u64,
    seed_source: &str,
    threads: usize,
) -> Result<RunOutput> {
    let stream = SeededStream::new(seed, 0);
    let (name, params, table, extra) = match command {
        Command::Arw(ArwCommand::Stabilize(args)) => arw_stabilize(args, stream)?,
        Command::Arw(ArwCommand::Scan(args)) => arw_scan(args, stream)?,
        Command::Arw(ArwCommand::Traps(args)) => arw_traps(args, stream)?,
        Command::Bl(BlCommand::Decompose(args)) => bl_decompose(args)?,
        Command::Bl(BlCommand::Sample(args)) => bl_sample(args, stream)?,
        Command::Bl(BlCommand::Intersections(args)) => bl_intersections(args, stream)?,
        Command::Lpp(LppCommand::Solve(args)) => lpp_solve(args, stream)?,
        Command::Lpp(LppCommand::Lln(args)) => lpp_lln(args, stream)?,
    };
    let manifest = RunManifest::new(name, seed, seed_source, params, threads);
    Ok(RunOutput {
        manifest,
        table,
        extra,
    })
}

type CommandResult = (String, Value, ResultTable, Option<Value>);

fn policy_from_name(name: &str) -> Result<arw::LabelPolicy> {
    match name {
        "uniform" => Ok(arw::LabelPolicy::UniformRandom),
        "round-robin" => Ok(arw::LabelPolicy::RoundRobin),
        "lowest" => Ok(arw::LabelPolicy::LowestIndexActive),
        other => Err(Error::parameter(format!(
            "unknown policy {other:?}; expected uniform | round-robin | lowest"
        ))),
    }
}

fn arw_stabilize(args: &ArwStabilizeArgs, stream: SeededStream) -> Result<CommandResult> {
    let params = arw::ArwParams::new(args.lambda, args.p)?;
    let policy = policy_from_name(&args.policy)?;
    let mut init_stream = stream.derive(&[1]);
    let state = arw::ArwState::init(args.mu, args.m_box, &mut init_stream)?;
    let particles = state.particle_count();
    let stacks = arw::SampledStacks::new(params, stream.derive(&[2]));
    let mut label_stream = stream.derive(&[3]);
    let done = arw::stabilize(state, &stacks, &policy, args.step_cap, &mut label_stream)?;

    let mut table = ResultTable::new(vec![
        ColumnSpec::new("site", "int"),
        ColumnSpec::new("j", "uint"),
        ColumnSpec::new("r", "uint"),
        ColumnSpec::new("particles", "uint"),
    ]);
    let mut sites: Vec<i64> = done
        .state
        .j_map()
        .keys()
        .chain(done.state.occupation().keys())
        .copied()
        .collect();
    sites.sort_unstable();
    sites.dedup();
    let occupation = done.state.occupation();
    for x in sites {
        table.push(vec![
            Cell::Int(x),
            Cell::UInt(done.state.j_at(x)),
            Cell::UInt(done.state.r_at(x)),
            Cell::UInt(u64::from(occupation.get(&x).copied().unwrap_or(0))),
        ]);
    }
    table.set_summary("particles", json!(particles));
    table.set_summary("steps", json!(done.steps));
    table.set_summary("r_origin", json!(done.state.r_at(0)));
    let params_json = json!({
        "mu": args.mu, "lambda": args.lambda, "p": args.p, "M": args.m_box,
        "policy": args.policy, "step_cap": args.step_cap,
    });
    Ok(("arw stabilize".to_string(), params_json, table, None))
}

fn arw_scan(args: &ArwScanArgs, stream: SeededStream) -> Result<CommandResult> {
    let grid = arw::ScanGrid {
        mu_grid: args.mu_grid.clone(),
        lambda_grid: args.lambda_grid.clone(),
        m_grid: args.m_grid.clone(),
        r_grid: args.r_grid.clone(),
        trials: args.trials,
        p: args.p,
        step_cap: args.step_cap,
    };
    let cells = arw::fixation_scan(&grid, &stream)?;
    let mut table = ResultTable::new(vec![
        ColumnSpec::new("mu", "float"),
        ColumnSpec::new("lambda", "float"),
        ColumnSpec::new("M", "int"),
        ColumnSpec::new("r", "uint"),
        ColumnSpec::new("trials", "uint"),
        ColumnSpec::new("completed", "uint"),
        ColumnSpec::new("not_stabilized", "uint"),
        ColumnSpec::new("estimate", "float"),
        ColumnSpec::new("se", "float"),
    ]);
    for c in &cells {
        table.push(vec![
            Cell::Float(c.mu),
            Cell::Float(c.lambda),
            Cell::Int(c.box_radius),
            Cell::UInt(c.r),
            Cell::UInt(c.trials),
            Cell::UInt(c.completed),
            Cell::UInt(c.not_stabilized),
            Cell::Float(c.estimate),
            Cell::Float(c.se),
        ]);
    }
    let params_json = serde_json::to_value(&grid)?;
    Ok(("arw scan".to_string(), params_json, table, None))
}

fn arw_traps(args: &ArwTrapsArgs, stream: SeededStream) -> Result<CommandResult> {
    let params = arw::ArwParams::new(args.lambda, args.p)?;
    if args.trials == 0 {
        return Err(Error::parameter("trials must be >= 1".to_string()));
    }
    let rule = arw::DirectionRule::Symmetric;
    let mut successes = 0u64;
    let mut replay_ok = 0u64;
    let mut failures = 0u64;
    let mut table = ResultTable::new(vec![
        ColumnSpec::new("trial", "uint"),
        ColumnSpec::new("particles", "uint"),
        ColumnSpec::new("success", "bool"),
        ColumnSpec::new("replay_ok", "text"),
        ColumnSpec::new("r0_sweep", "uint"),
    ]);
    for t in 0..args.trials {
        let mut trial_stream = stream.derive(&[0x77, t]);
        let trial = arw::run_trap_trial(args.mu, params, args.radius, rule, &mut trial_stream)?;
        if trial.success {
            successes += 1;
            if trial.replay_ok == Some(true) {
                replay_ok += 1;
            }
        } else {
            failures += 1;
        }
        table.push(vec![
            Cell::UInt(t),
            Cell::UInt(trial.particles as u64),
            Cell::Bool(trial.success),
            Cell::Text(
                trial
                    .replay_ok
                    .map(|b| b.to_string())
                    .unwrap_or_else(|| "n/a".to_string()),
            ),
            Cell::UInt(trial.r0_sweep),
        ]);
    }
    table.set_summary("successes", json!(successes));
    table.set_summary("failures", json!(failures));
    table.set_summary("replay_ok", json!(replay_ok));
    table.set_summary(
        "failure_rate",
        json!(failures as f64 / args.trials as f64),
    );
    let params_json = json!({
        "mu": args.mu, "lambda": args.lambda, "K": args.radius,
        "trials": args.trials, "p": args.p,
    });
    Ok(("arw traps".to_string(), params_json, table, None))
}

fn bl_decompose(args: &BlDecomposeArgs) -> Result<CommandResult> {
    let text = std::fs::read_to_string(&args.input)?;
    let doc: bl::FieldJson = serde_json::from_str(&text)?;
    let (table, decomposition_json) = match doc.mode.as_str() {
        "int" => {
            let field: bl::FlowField<u64> = bl::field_from_json(&doc)?;
            let dec = bl::decompose(&field)?;
            (decomposition_table(dec.weights()), serde_json::to_value(bl::decomposition_to_json(&dec))?)
        }
        "real" => {
            let field: bl::FlowField<f64> = bl::field_from_json(&doc)?;
            let dec = bl::decompose(&field)?;
            (
                decomposition_table(dec.weights()),
                serde_json::to_value(bl::decomposition_to_json(&dec))?,
            )
        }
        other => return Err(Error::schema(format!("unknown mode {other}"))),
    };
    if let Some(path) = &args.output {
        std::fs::write(path, serde_json::to_string_pretty(&decomposition_json)?)?;
    }
    let params_json = json!({ "input": args.input.display().to_string() });
    Ok((
        "bl decompose".to_string(),
        params_json,
        table,
        Some(decomposition_json),
    ))
}

fn decomposition_table<W: bl::Weight>(weights: &[W]) -> ResultTable {
    let mut table = ResultTable::new(vec![
        ColumnSpec::new("line", "uint"),
        ColumnSpec::new("weight", "float"),
    ]);
    let mut total = 0.0;
    for (k, w) in weights.iter().enumerate() {
        table.push(vec![Cell::UInt(k as u64 + 1), Cell::Float(w.to_f64())]);
        total += w.to_f64();
    }
    table.set_summary("lines", json!(weights.len()));
    table.set_summary("total_weight", json!(total));
    table
}

fn bl_sample(args: &BlSampleArgs, stream: SeededStream) -> Result<CommandResult> {
    let params = super::parse_params(&args.params)?;
    let domain = bl::RectDomain::new(args.n, args.m)?;
    let mut s = stream.derive(&[0xB1]);
    let (field_json, h) = match args.family.as_str() {
        "geo" => {
            let both = params.get("lambda").copied();
            let lp = params
                .get("lambda_plus")
                .copied()
                .or(both)
                .ok_or_else(|| Error::parameter("geo family needs lambda or lambda_plus".to_string()))?;
            let lm = params
                .get("lambda_minus")
                .copied()
                .or(both)
                .ok_or_else(|| Error::parameter("geo family needs lambda or lambda_minus".to_string()))?;
            let (boundary, births) = bl::sample_reversible_geometric(domain, lp, lm, &mut s)?;
            let field = bl::flow_from_boundary(&births, &boundary)?;
            let h = bl::crossing_total(&field)?.h as f64;
            (bl::field_to_json(&field), h)
        }
        "exp" => {
            let both = params.get("alpha").map(|a| a / 2.0);
            let ap = params
                .get("alpha_plus")
                .copied()
                .or(both)
                .ok_or_else(|| Error::parameter("exp family needs alpha or alpha_plus".to_string()))?;
            let am = params
                .get("alpha_minus")
                .copied()
                .or(both)
                .ok_or_else(|| Error::parameter("exp family needs alpha or alpha_minus".to_string()))?;
            let (boundary, births) = bl::sample_reversible_exponential(domain, ap, am, &mut s)?;
            let field = bl::flow_from_boundary(&births, &boundary)?;
            let h = bl::crossing_total(&field)?.h;
            (bl::field_to_json(&field), h)
        }
        other => {
            return Err(Error::parameter(format!(
                "unknown family {other:?}; expected geo | exp"
            )))
        }
    };
    let field_value = serde_json::to_value(&field_json)?;
    if let Some(path) = &args.output {
        std::fs::write(path, serde_json::to_string_pretty(&field_value)?)?;
    }
    let mut table = ResultTable::new(vec![
        ColumnSpec::new("N", "uint"),
        ColumnSpec::new("M", "uint"),
        ColumnSpec::new("mode", "text"),
        ColumnSpec::new("h", "float"),
    ]);
    table.push(vec![
        Cell::UInt(args.n as u64),
        Cell::UInt(args.m as u64),
        Cell::Text(field_json.mode.clone()),
        Cell::Float(h),
    ]);
    let params_json = json!({
        "family": args.family, "params": params, "N": args.n, "M": args.m,
    });
    Ok((
        "bl sample".to_string(),
        params_json,
        table,
        Some(field_value),
    ))
}

fn bl_intersections(args: &BlIntersectionsArgs, stream: SeededStream) -> Result<CommandResult> {
    let kind = match args.line.as_str() {
        "ne" => bl::LineKind::NorthEast,
        "se" => bl::LineKind::SouthEast,
        "vertical" => bl::LineKind::Vertical,
        "horizontal" => bl::LineKind::Horizontal,
        other => {
            return Err(Error::parameter(format!(
                "unknown line kind {other:?}; expected ne | se | vertical | horizontal"
            )))
        }
    };
    let mut s = stream.derive(&[0xB2]);

    // Streaming mode: long horizontal line without materializing a field.
    if let Some(sites) = args.sites {
        if kind != bl::LineKind::Horizontal {
            return Err(Error::parameter(
                "--sites streaming applies to horizontal lines only".to_string(),
            ));
        }
        let pairs = bl::sample_horizontal_pairs(sites, args.lambda, &mut s)?;
        let table = pair_histogram(&pairs);
        let params_json = json!({
            "line": args.line, "lambda": args.lambda, "sites": sites,
        });
        return Ok(("bl intersections".to_string(), params_json, table, None));
    }

    let stats = if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path)?;
        let doc: bl::FieldJson = serde_json::from_str(&text)?;
        let field: bl::FlowField<u64> = bl::field_from_json(&doc)?;
        bl::intersection_stats(&field, kind, args.index)?
    } else {
        let domain = bl::RectDomain::new(args.n, args.m)?;
        let (boundary, births) =
            bl::sample_reversible_geometric(domain, args.lambda, args.lambda, &mut s)?;
        let field = bl::flow_from_boundary(&births, &boundary)?;
        bl::intersection_stats(&field, kind, args.index)?
    };
    let table = match &stats {
        bl::LineStats::Singles(values) => {
            let mut hist = std::collections::BTreeMap::new();
            for &v in values {
                *hist.entry(v).or_insert(0u64) += 1;
            }
            let mut table = ResultTable::new(vec![
                ColumnSpec::new("count", "uint"),
                ColumnSpec::new("sites", "uint"),
            ]);
            for (value, n) in hist {
                table.push(vec![Cell::UInt(value), Cell::UInt(n)]);
            }
            table.set_summary("sites", json!(values.len()));
            table.set_summary("total", json!(stats.total()));
            table
        }
        bl::LineStats::Pairs(pairs) => pair_histogram(pairs),
    };
    let params_json = json!({
        "line": args.line, "index": args.index, "lambda": args.lambda,
        "N": args.n, "M": args.m,
    });
    Ok(("bl intersections".to_string(), params_json, table, None))
}

fn pair_histogram(pairs: &[(u64, u64)]) -> ResultTable {
    let mut hist = std::collections::BTreeMap::new();
    for &(a, b) in pairs {
        *hist.entry((a, b)).or_insert(0u64) += 1;
    }
    let mut table = ResultTable::new(vec![
        ColumnSpec::new("tminus", "uint"),
        ColumnSpec::new("tplus", "uint"),
        ColumnSpec::new("sites", "uint"),
    ]);
    for ((a, b), n) in hist {
        table.push(vec![Cell::UInt(a), Cell::UInt(b), Cell::UInt(n)]);
    }
    let total: u64 = pairs.iter().map(|&(a, b)| a + b).sum();
    table.set_summary("sites", json!(pairs.len()));
    table.set_summary("total", json!(total));
    table.set_summary(
        "total_per_unit_length",
        json!(total as f64 / (2.0 * pairs.len() as f64)),
    );
    table
}

fn lpp_solve(args: &LppSolveArgs, stream: SeededStream) -> Result<CommandResult> {
    let params = super::parse_params(&args.params)?;
    let run_dp = matches!(args.method.as_str(), "dp" | "both");
    let run_bl = matches!(args.method.as_str(), "bl" | "both");
    if !run_dp && !run_bl {
        return Err(Error::parameter(format!(
            "unknown method {:?}; expected dp | bl | both",
            args.method
        )));
    }
    let domain = bl::RectDomain::new(args.n, args.m)?;
    let mut s = stream.derive(&[0x10]);

    let mut table = ResultTable::new(vec![
        ColumnSpec::new("method", "text"),
        ColumnSpec::new("value", "float"),
        ColumnSpec::new("path_len", "uint"),
    ]);
    let mut paths = Vec::new();
    let mut values = Vec::new();

    // The two weight modes share only this reporting shell, so each arm
    // carries its own solve calls.
    macro_rules! solve_instance {
        ($instance:expr) => {{
            let instance = $instance;
            if run_dp {
                let sol = lpp::solve_dp(&instance)?;
                values.push(sol.value.to_f64());
                table.push(vec![
                    Cell::Text("dp".to_string()),
                    Cell::Float(sol.value.to_f64()),
                    Cell::UInt(sol.path.len() as u64),
                ]);
                paths.push(json!({
                    "method": "dp",
                    "path": sol.path.iter().map(|s| (s.i, s.j)).collect::<Vec<_>>(),
                }));
            }
            if run_bl {
                let sol = lpp::solve_brokenline(&instance)?;
                values.push(sol.value.to_f64());
                table.push(vec![
                    Cell::Text("bl".to_string()),
                    Cell::Float(sol.value.to_f64()),
                    Cell::UInt(sol.path.len() as u64),
                ]);
                paths.push(json!({
                    "method": "bl",
                    "path": sol.path.iter().map(|s| (s.i, s.j)).collect::<Vec<_>>(),
                }));
            }
            if let Some(path) = &args.output {
                let doc = lpp::instance_to_json(&instance);
                std::fs::write(path, serde_json::to_string_pretty(&doc)?)?;
            }
        }};
    }

    if let Some(input) = &args.input {
        let text = std::fs::read_to_string(input)?;
        let doc: lpp::LppInstanceJson = serde_json::from_str(&text)?;
        match doc.mode.as_str() {
            "int" => solve_instance!(lpp::instance_from_json::<u64>(&doc)?),
            "real" => solve_instance!(lpp::instance_from_json::<f64>(&doc)?),
            other => return Err(Error::schema(format!("unknown mode {other}"))),
        }
    } else {
        match args.family.as_str() {
            "exp" => {
                let alpha = params
                    .get("alpha")
                    .copied()
                    .ok_or_else(|| Error::parameter("exp family needs alpha".to_string()))?;
                solve_instance!(lpp::LppInstance::sample_exponential(domain, alpha, &mut s)?)
            }
            "geo" => {
                let lambda = params
                    .get("lambda")
                    .copied()
                    .ok_or_else(|| Error::parameter("geo family needs lambda".to_string()))?;
                solve_instance!(lpp::LppInstance::sample_geometric(domain, lambda, &mut s)?)
            }
            other => {
                return Err(Error::parameter(format!(
                    "unknown family {other:?}; expected exp | geo"
                )))
            }
        }
    }

    if values.len() == 2 {
        table.set_summary("value_gap", json!((values[0] - values[1]).abs()));
    }
    let params_json = json!({
        "family": args.family, "params": params, "N": args.n, "M": args.m,
        "method": args.method,
    });
    Ok((
        "lpp solve".to_string(),
        params_json,
        table,
        Some(Value::Array(paths)),
    ))
}

fn lpp_lln(args: &LppLlnArgs, stream: SeededStream) -> Result<CommandResult> {
    let params = super::parse_params(&args.params)?;
    let family = match args.family.as_str() {
        "exp" => lpp::LlnFamily::Exponential {
            alpha: params
                .get("alpha")
                .copied()
                .ok_or_else(|| Error::parameter("exp family needs alpha".to_string()))?,
        },
        "geo" => lpp::LlnFamily::Geometric {
            lambda: params
                .get("lambda")
                .copied()
                .ok_or_else(|| Error::parameter("geo family needs lambda".to_string()))?,
        },
        other => {
            return Err(Error::parameter(format!(
                "unknown family {other:?}; expected exp | geo"
            )))
        }
    };
    let rows = lpp::lln_experiment(family, args.beta, &args.n_list, args.trials, args.delta, &stream)?;
    let mut table = ResultTable::new(vec![
        ColumnSpec::new("N", "uint"),
        ColumnSpec::new("M", "uint"),
        ColumnSpec::new("trials", "uint"),
        ColumnSpec::new("mean_g_over_n", "float"),
        ColumnSpec::new("se", "float"),
        ColumnSpec::new("sd", "float"),
        ColumnSpec::new("limit", "float"),
        ColumnSpec::new("tail_frequency", "float"),
    ]);
    for r in &rows {
        table.push(vec![
            Cell::UInt(r.n as u64),
            Cell::UInt(r.m as u64),
            Cell::UInt(r.trials),
            Cell::Float(r.mean_g_over_n),
            Cell::Float(r.se),
            Cell::Float(r.sd),
            Cell::Float(r.limit),
            Cell::Float(r.tail_frequency.unwrap_or(f64::NAN)),
        ]);
    }
    let params_json = json!({
        "family": args.family, "params": params, "beta": args.beta,
        "N_list": args.n_list, "trials": args.trials, "delta": args.delta,
    });
    Ok(("lpp lln".to_string(), params_json, table, None))
}
