//! Subcommand implementations. Each returns the full output text so the
//! caller can write it, checksum it, or compare it against a manifest.

use std::fmt::Write as _;

use crowdrate::bounds::{
    figure2_table, rmin_sl_cs, rmin_sl_uk, rmin_shc, BoundQuery, Figure2Params, RateBound,
};
use crowdrate::pricing::{price_threshold, price_threshold_exact};
use crowdrate::sim::{
    simulate, sweep, sweep_point, Decoder, SimConfig, SimulationReport, SweepAxis, WorkerModel,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    BoundsArgs, DecoderArg, Figure2Args, Format, Model, PriceArgs, Scenario, SimulateArgs,
    SweepAxisArg,
};
use crate::error::{CliError, Result};
use crate::format::{optional, rate, sig};
use crate::parse;

/// Number of estimator standard errors `--check` tolerates.
pub const CHECK_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct Execution {
    pub output: String,
    /// Resolved parameters, recorded in the manifest.
    pub parameters: Value,
    /// Set by `simulate --check` when a point misses its prediction.
    pub check_failed: bool,
}

impl Execution {
    fn new(output: String, parameters: Value) -> Self {
        Execution {
            output,
            parameters,
            check_failed: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OutputStyle {
    pub format: Format,
    pub precision: usize,
}

fn rate_json(bound: RateBound) -> Value {
    match bound {
        RateBound::Feasible(v) => json!(v),
        RateBound::Infeasible => json!("inf"),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("output serializes");
    text.push('\n');
    text
}

pub fn bounds(args: &BoundsArgs, style: OutputStyle) -> Result<Execution> {
    let grid = parse::grid("eps-grid", &args.eps_grid)?;
    let core = |e: crowdrate::Error| match e.field() {
        Some("target_error") => CliError::renamed("eps-grid", e),
        _ => CliError::from_core("scenario", e),
    };

    let rows: Vec<(f64, RateBound)> = match args.scenario {
        Scenario::Shc => {
            let q = args
                .q
                .ok_or_else(|| CliError::config("q", "required for the shc scenario"))?;
            if args.population.is_some() {
                return Err(CliError::config("population", "not used by the shc scenario"));
            }
            let source = parse::source(args.source.as_deref())?;
            if source.n_labels() != 2 || !source.is_uniform() {
                return Err(CliError::config(
                    "source",
                    "the shc scenario assumes a uniform binary source",
                ));
            }
            grid.iter()
                .map(|&eps| rmin_shc(q, args.alphabet, eps).map(|r| (eps, r)))
                .collect::<std::result::Result<_, _>>()
                .map_err(core)?
        }
        Scenario::SlUk | Scenario::SlCs => {
            if args.q.is_some() {
                return Err(CliError::config("q", "only used by the shc scenario"));
            }
            let source = parse::source(args.source.as_deref())?;
            let population = parse::population(args.population.as_deref().ok_or_else(|| {
                CliError::config("population", "required for skill-level scenarios")
            })?)?;
            let bound = if args.scenario == Scenario::SlUk {
                rmin_sl_uk
            } else {
                rmin_sl_cs
            };
            grid.iter()
                .map(|&eps| {
                    let query =
                        BoundQuery::new(source.clone(), args.alphabet, population.clone(), eps)?;
                    bound(&query).map(|r| (eps, r))
                })
                .collect::<std::result::Result<_, _>>()
                .map_err(core)?
        }
    };

    let scenario = args.scenario.label();
    let output = match style.format {
        Format::Csv => {
            let mut out = String::from("epsilon_hat,rate_min,scenario\n");
            for (eps, bound) in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{scenario}",
                    sig(*eps, style.precision),
                    rate(*bound, style.precision)
                );
            }
            out
        }
        Format::Json => to_json(
            &rows
                .iter()
                .map(|(eps, bound)| {
                    json!({"epsilon_hat": eps, "rate_min": rate_json(*bound), "scenario": scenario})
                })
                .collect::<Vec<_>>(),
        ),
    };
    let parameters = json!({
        "scenario": scenario,
        "source": args.source,
        "M": args.alphabet,
        "population": args.population,
        "q": args.q,
        "eps_grid": grid,
    });
    Ok(Execution::new(output, parameters))
}

pub fn figure2(args: &Figure2Args, style: OutputStyle) -> Result<Execution> {
    let arities = parse::integer_grid("k", &args.k)?
        .into_iter()
        .map(|k| k as usize)
        .collect();
    let params = Figure2Params {
        hammer_prob: args.q,
        arities,
        error_grid: parse::grid("grid", &args.grid)?,
        alphabet_override: args.alphabet,
    };
    let table = figure2_table(&params).map_err(|e| match e.field() {
        Some("target_error") => CliError::renamed("grid", e),
        Some("M") | Some("alphabet") => CliError::renamed("M", e),
        _ => CliError::from_core("k", e),
    })?;

    let output = match style.format {
        Format::Csv => {
            let mut out = String::from("curve,epsilon_hat,rate\n");
            for curve in &table.curves {
                for (eps, bound) in &curve.points {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        curve.name,
                        sig(*eps, style.precision),
                        rate(*bound, style.precision)
                    );
                }
            }
            out
        }
        Format::Json => to_json(
            &table
                .curves
                .iter()
                .flat_map(|curve| {
                    curve.points.iter().map(|(eps, bound)| {
                        json!({"curve": curve.name, "epsilon_hat": eps, "rate": rate_json(*bound)})
                    })
                })
                .collect::<Vec<_>>(),
        ),
    };
    let mut parameters = serde_json::to_value(&params).expect("parameters serialize");
    parameters["information_alphabet"] =
        json!(params.information_alphabet().map_err(|e| CliError::from_core("k", e))?);
    Ok(Execution::new(output, parameters))
}

/// A fully resolved `simulate`/`validate` invocation.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationPlan {
    pub config: SimConfig,
    pub sweep: Option<SweepAxis>,
    pub check: bool,
}

impl SimulationPlan {
    fn axis_label(&self) -> Option<&'static str> {
        self.sweep.as_ref().map(|axis| match axis {
            SweepAxis::QueriesPerItem(_) => SweepAxisArg::RPrime.label(),
            SweepAxis::HammerProb(_) => SweepAxisArg::Q.label(),
            SweepAxis::TargetError(_) => SweepAxisArg::EpsHat.label(),
        })
    }

    fn axis_value(&self, index: usize) -> Option<f64> {
        self.sweep.as_ref().map(|axis| match axis {
            SweepAxis::QueriesPerItem(v) => f64::from(v[index]),
            SweepAxis::HammerProb(v) | SweepAxis::TargetError(v) => v[index],
        })
    }

    /// Configuration of every point that will run, in grid order.
    pub fn point_configs(&self) -> Result<Vec<SimConfig>> {
        match &self.sweep {
            None => Ok(vec![self.config.clone()]),
            Some(axis) => (0..axis.len())
                .map(|i| {
                    sweep_point(&self.config, axis, i)
                        .map_err(|e| CliError::from_core("sweep-grid", e))
                })
                .collect(),
        }
    }
}

pub fn plan_simulation(args: &SimulateArgs, seed: u64) -> Result<SimulationPlan> {
    let worker_model = match args.model {
        Model::Shc => {
            if args.population.is_some() {
                return Err(CliError::config("population", "only used by the msc model"));
            }
            let q = args
                .q
                .ok_or_else(|| CliError::config("q", "required for the shc model"))?;
            WorkerModel::SpammerHammer { hammer_prob: q }
        }
        Model::Msc => {
            if args.q.is_some() {
                return Err(CliError::config("q", "only used by the shc model"));
            }
            let text = args
                .population
                .as_deref()
                .ok_or_else(|| CliError::config("population", "required for the msc model"))?;
            WorkerModel::Msc {
                population: parse::population(text)?,
            }
        }
    };
    let decoder = match args.decoder {
        Some(DecoderArg::Oracle) => Decoder::Oracle,
        Some(DecoderArg::Majority) => Decoder::Majority,
        None if args.model == Model::Shc => Decoder::Oracle,
        None => Decoder::Majority,
    };
    let code_k = args.k.unwrap_or(match decoder {
        Decoder::Oracle => 3,
        Decoder::Majority => 1,
    });
    let config = SimConfig {
        n_items: args.n_items,
        source: parse::source(args.source.as_deref())?,
        code_k,
        queries_per_item: args.queries_per_item,
        worker_model,
        decoder,
        seed,
        n_trials: args.trials,
    };
    match (decoder, args.model) {
        (Decoder::Oracle, Model::Msc) => {
            return Err(CliError::config("decoder", "the oracle decoder needs the shc model"))
        }
        (Decoder::Majority, Model::Shc) => {
            return Err(CliError::config("decoder", "majority voting needs the msc model"))
        }
        _ => {}
    }

    let sweep = match (args.sweep_axis, args.sweep_grid.as_deref()) {
        (Some(axis), Some(text)) => {
            if args.model == Model::Msc && axis != SweepAxisArg::RPrime {
                return Err(CliError::config(
                    "sweep-axis",
                    format!("`{}` sweeps need the shc model", axis.label()),
                ));
            }
            Some(match axis {
                SweepAxisArg::RPrime => SweepAxis::QueriesPerItem(
                    parse::integer_grid("sweep-grid", text)?
                        .into_iter()
                        .map(|v| v as u32)
                        .collect(),
                ),
                SweepAxisArg::Q => SweepAxis::HammerProb(parse::grid("sweep-grid", text)?),
                SweepAxisArg::EpsHat => SweepAxis::TargetError(parse::grid("sweep-grid", text)?),
            })
        }
        _ => None,
    };

    let plan = SimulationPlan {
        config,
        sweep,
        check: args.check,
    };
    for cfg in plan.point_configs()? {
        cfg.validate().map_err(|e| {
            let swept = matches!(
                (&plan.sweep, e.field()),
                (Some(SweepAxis::QueriesPerItem(_)), Some("queries_per_item"))
                    | (Some(SweepAxis::HammerProb(_)), Some("q"))
            );
            if swept {
                CliError::renamed("sweep-grid", e)
            } else {
                CliError::from_core("simulate", e)
            }
        })?;
    }
    Ok(plan)
}

#[derive(Serialize)]
struct ReportRow<'a> {
    axis: Option<&'a str>,
    value: Option<f64>,
    #[serde(flatten)]
    report: &'a SimulationReport,
    within_4_sigma: Option<bool>,
}

pub const SIMULATE_CSV_HEADER: &str = "axis,value,empirical_error,std_error,ci_halfwidth,\
analytic_prediction,rate_used,queries_per_item,code_k,hammer_prob,n_items,n_trials,\
filler_items,seed,within_4_sigma";

pub fn simulate_cmd(plan: &SimulationPlan, style: OutputStyle) -> Result<Execution> {
    let reports = match &plan.sweep {
        None => vec![simulate(&plan.config).map_err(|e| CliError::from_core("simulate", e))?],
        Some(axis) => {
            sweep(&plan.config, axis).map_err(|e| CliError::from_core("sweep-grid", e))?
        }
    };
    let rows: Vec<ReportRow> = reports
        .iter()
        .enumerate()
        .map(|(i, report)| ReportRow {
            axis: plan.axis_label(),
            value: plan.axis_value(i),
            report,
            within_4_sigma: report.agrees_with_prediction(CHECK_SIGMAS),
        })
        .collect();

    let output = match style.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let p = style.precision;
            let mut out = format!("{SIMULATE_CSV_HEADER}\n");
            for row in &rows {
                let r = row.report;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    row.axis.unwrap_or(""),
                    optional(row.value, p),
                    sig(r.empirical_error, p),
                    optional(r.std_error, p),
                    optional(r.ci_halfwidth, p),
                    optional(r.analytic_prediction, p),
                    sig(r.rate_used, p),
                    r.queries_per_item,
                    r.code_k,
                    optional(r.hammer_prob, p),
                    r.n_items,
                    r.n_trials,
                    r.filler_items,
                    r.seed,
                    row.within_4_sigma.map(|b| b.to_string()).unwrap_or_default(),
                );
            }
            out
        }
    };

    let mut execution = Execution::new(output, serde_json::to_value(plan).expect("plan serializes"));
    if plan.check {
        for row in &rows {
            match row.within_4_sigma {
                Some(false) => {
                    execution.check_failed = true;
                    eprintln!(
                        "check failed: empirical {} vs predicted {} (sigma {}){}",
                        row.report.empirical_error,
                        row.report.analytic_prediction.unwrap_or(f64::NAN),
                        row.report.estimator_sigma().unwrap_or(f64::NAN),
                        describe_point(row)
                    );
                }
                None => eprintln!("check skipped: no prediction{}", describe_point(row)),
                Some(true) => {}
            }
        }
    }
    Ok(execution)
}

fn describe_point(row: &ReportRow) -> String {
    match (row.axis, row.value) {
        (Some(axis), Some(value)) => format!(" at {axis} = {value}"),
        _ => String::new(),
    }
}

pub fn validate_cmd(plan: &SimulationPlan) -> Result<Execution> {
    let parameters = serde_json::to_value(plan).expect("plan serializes");
    let output = format!("ok\n{}", to_json(&parameters));
    Ok(Execution::new(output, parameters))
}

pub fn price(args: &PriceArgs, style: OutputStyle) -> Result<Execution> {
    let core = |e: crowdrate::Error| CliError::from_core("price", e);
    let value = if args.exact {
        let q = args
            .q
            .ok_or_else(|| CliError::config("q", "required with --exact"))?;
        let eps = args
            .eps
            .ok_or_else(|| CliError::config("eps", "required with --exact"))?;
        price_threshold_exact(args.k1, args.k2, q, eps, args.pi1).map_err(|e| match e.field() {
            Some("price") => CliError::renamed("pi1", e),
            Some("target_error") => CliError::renamed("eps", e),
            _ => core(e),
        })?
    } else {
        if args.q.is_some() || args.eps.is_some() {
            return Err(CliError::config(
                if args.q.is_some() { "q" } else { "eps" },
                "only used with --exact",
            ));
        }
        price_threshold(args.k1, args.k2, args.pi1).map_err(|e| match e.field() {
            Some("price") => CliError::renamed("pi1", e),
            _ => core(e),
        })?
    };
    let output = match style.format {
        Format::Csv => format!("{}\n", sig(value, style.precision)),
        Format::Json => to_json(&json!({ "price": value })),
    };
    let parameters = json!({
        "k1": args.k1, "k2": args.k2, "pi1": args.pi1,
        "exact": args.exact, "q": args.q, "eps": args.eps,
    });
    Ok(Execution::new(output, parameters))
}
