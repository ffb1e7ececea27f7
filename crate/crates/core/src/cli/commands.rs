use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::format::{read_instance, write_native, InstanceFormat};
use super::generate::{generate, GenMode};
use super::report::{served_token, write_report};
use crate::analysis::{bound_suite, lower_bounds, ratio_closed_form, RppChoice};
use crate::error::{CarpError, Result};
use crate::exact::{exact_carp, EXACT_CARP_CAP};
use crate::model::{check_solution, MetricInstance, RawInstance, Solution};
use crate::partition::{run_algorithm, PartitionMode};
use crate::preprocess::{lift_solution, normalize, LiftMap};
use crate::rpp::RppSelect;

pub const EXIT_VIOLATION: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "carp", version, about = "Equal-demand capacitated arc routing solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate solution: better of two RPP tours, then tour partitioning.
    Solve(SolveArgs),
    /// Exact optimum for instances with at most 8 customers.
    Exact(InstanceArgs),
    /// Lower bounds and, when the optimum is computable, every bound check.
    Bounds(InstanceArgs),
    /// Closed-form approximation ratio for a range of capacities.
    RatioTable(RatioArgs),
    /// Random sweep running the full bound audit on every trial.
    Verify(VerifyArgs),
    /// Write a random instance in the native format.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Native,
    Classic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputArg {
    Text,
    Report,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PartitionArg {
    Candidates,
    Dp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RppArg {
    H1,
    H2,
    Best,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Euclidean,
    RandomMetric,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "native")]
    pub format: FormatArg,
    /// Override the capacity stored in the file.
    #[arg(long)]
    pub capacity: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub output: OutputArg,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "candidates")]
    pub partition: PartitionArg,
    #[arg(long, value_enum, default_value = "best")]
    pub rpp: RppArg,
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    /// Inclusive range `A..B`.
    #[arg(long, default_value = "3..8", value_parser = parse_range)]
    pub k_range: (usize, usize),
    #[arg(long, value_enum, default_value = "text")]
    pub output: OutputArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 7)]
    pub max_m: usize,
    /// Inclusive range `A..B` of capacities.
    #[arg(long, default_value = "1..5", value_parser = parse_range)]
    pub k_range: (usize, usize),
    #[arg(long, value_enum, default_value = "text")]
    pub output: OutputArg,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "euclidean")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Coordinate range or maximum edge cost.
    #[arg(long, default_value_t = 100)]
    pub range: u32,
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, found `{s}`"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a, out),
        Command::Exact(a) => cmd_exact(&a, out),
        Command::Bounds(a) => cmd_bounds(&a, out),
        Command::RatioTable(a) => cmd_ratio_table(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Generate(a) => cmd_generate(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn io(e: std::io::Error) -> CarpError {
    CarpError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

macro_rules! emit {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(io)?
    };
}

fn load(args: &InstanceArgs) -> Result<(RawInstance, MetricInstance, LiftMap)> {
    let format = match args.format {
        FormatArg::Native => InstanceFormat::Native,
        FormatArg::Classic => InstanceFormat::Classic,
    };
    let mut raw = read_instance(&args.input, format)?;
    if let Some(k) = args.capacity {
        if k == 0 {
            return Err(CarpError::input("capacity must be at least 1"));
        }
        raw.capacity = k;
    }
    let (inst, lift) = normalize(&raw)?;
    Ok((raw, inst, lift))
}

fn write_routes(out: &mut dyn Write, sol: &Solution) -> Result<()> {
    for (idx, r) in sol.routes.iter().enumerate() {
        let served: Vec<String> = r.served.iter().map(served_token).collect();
        emit!(out, "  route {idx}: {} (cost {})", served.join(" "), r.cost);
    }
    Ok(())
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let (_, inst, lift) = load(&args.instance)?;
    let select = match args.rpp {
        RppArg::H1 => RppSelect::H1,
        RppArg::H2 => RppSelect::H2,
        RppArg::Best => RppSelect::Best,
    };
    let mode = match args.partition {
        PartitionArg::Candidates => PartitionMode::Candidates,
        PartitionArg::Dp => PartitionMode::Dp,
    };
    let run = run_algorithm(&inst, select, mode)?;
    let sol = &run.solution;
    let report = check_solution(sol, &inst);
    let lifted = lift_solution(sol, &lift);
    let chosen = match run.choice {
        RppChoice::H1 => "h1",
        RppChoice::H2 => "h2",
    };
    let (m, k) = (inst.customer_count(), inst.capacity());
    match args.instance.output {
        OutputArg::Report => {
            let mut text = write_report(
                sol,
                m,
                k,
                &[
                    ("h1_cost", run.h1.tour.cost.to_string()),
                    ("h2_cost", run.h2.tour.cost.to_string()),
                    ("rpp", chosen.to_string()),
                    ("raw_cost", lifted.total_cost.to_string()),
                ],
            );
            for (idx, w) in lifted.walks.iter().enumerate() {
                let vs: Vec<String> = w.vertices.iter().map(|v| v.to_string()).collect();
                text.push_str(&format!("walk {idx} cost {} vertices {}\n", w.cost, vs.join(" ")));
            }
            out.write_all(text.as_bytes()).map_err(io)?;
        }
        OutputArg::Text => {
            emit!(out, "customers: {m}, capacity: {k}");
            emit!(out, "H1 cost: {}", run.h1.tour.cost);
            emit!(out, "H2 cost: {}", run.h2.tour.cost);
            emit!(out, "partitioned tour: {chosen}");
            emit!(out, "routes: {}", sol.routes.len());
            write_routes(out, sol)?;
            emit!(out, "total cost: {}", sol.total_cost);
            emit!(out, "cost on input graph: {}", lifted.total_cost);
            for (idx, w) in lifted.walks.iter().enumerate() {
                let vs: Vec<String> = w.vertices.iter().map(|v| v.to_string()).collect();
                emit!(out, "  walk {idx}: {}", vs.join(" "));
            }
        }
    }
    if !report.is_feasible() {
        emit!(out, "infeasible output: {report}");
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}

fn cmd_exact(args: &InstanceArgs, out: &mut dyn Write) -> Result<i32> {
    let (_, inst, _) = load(args)?;
    let opt = exact_carp(&inst)?;
    let (m, k) = (inst.customer_count(), inst.capacity());
    match args.output {
        OutputArg::Report => out
            .write_all(write_report(&opt, m, k, &[]).as_bytes())
            .map_err(io)?,
        OutputArg::Text => {
            emit!(out, "customers: {m}, capacity: {k}");
            emit!(out, "optimal cost: {}", opt.total_cost);
            write_routes(out, &opt)?;
        }
    }
    Ok(0)
}

fn cmd_bounds(args: &InstanceArgs, out: &mut dyn Write) -> Result<i32> {
    let (_, inst, _) = load(args)?;
    let m = inst.customer_count();
    let lb = lower_bounds(&inst);
    emit!(out, "lb_delta {}", lb.lb_delta);
    match lb.lb_rpp {
        Some(v) => emit!(out, "lb_rpp {v}"),
        None => emit!(out, "lb_rpp unavailable"),
    }
    if m > EXACT_CARP_CAP {
        emit!(out, "checks skipped: {m} customers exceed the exact cap of {EXACT_CARP_CAP}");
        return Ok(0);
    }
    let report = bound_suite(&inst)?;
    emit!(out, "alg {}", report.alg_cost());
    if let Some(opt) = &report.opt {
        emit!(out, "opt {}", opt.total_cost);
    }
    emit!(out, "ratio_bound {}", report.ratio);
    for c in &report.checks {
        let status = match (c.holds, c.advisory) {
            (true, _) => "ok",
            (false, true) => "advisory-failed",
            (false, false) => "VIOLATED",
        };
        emit!(out, "check {} {} <= {} {status}", c.name, c.lhs, c.rhs);
    }
    for (idx, l) in report.route_splits.iter().enumerate() {
        for c in &l.checks {
            let status = if c.holds { "ok" } else { "VIOLATED" };
            emit!(out, "route {idx} {} {} <= {} {status}", c.name, c.lhs, c.rhs);
        }
    }
    Ok(if report.is_clean() { 0 } else { EXIT_VIOLATION })
}

fn cmd_ratio_table(args: &RatioArgs, out: &mut dyn Write) -> Result<i32> {
    let (a, b) = args.k_range;
    let rows = (a..=b).map(ratio_closed_form).collect::<Result<Vec<_>>>()?;
    if args.output == OutputArg::Text {
        emit!(out, "{:>8} {:>6} {:>10}", "k", "l", "ratio");
    }
    for p in &rows {
        match args.output {
            OutputArg::Text => emit!(out, "{:>8} {:>6} {:>10.4}", p.k, p.l_tilde, p.ratio),
            OutputArg::Report => emit!(out, "k {} l {} ratio {}", p.k, p.l_tilde, p.ratio),
        }
    }
    Ok(0)
}

#[derive(Debug)]
struct Trial {
    id: usize,
    advisories: Vec<String>,
    mode: GenMode,
    m: usize,
    k: usize,
    alg: f64,
    opt: f64,
    problems: Vec<String>,
}

fn run_trial(id: usize, seed: u64, max_m: usize, (ka, kb): (usize, usize)) -> Result<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(id as u64));
    let m = rng.gen_range(1..=max_m);
    let k = rng.gen_range(ka..=kb);
    let mode = if id.is_multiple_of(2) {
        GenMode::Euclidean
    } else {
        GenMode::RandomMetric
    };
    let raw = generate(m, k, mode, rng.gen(), 100);
    let (inst, _) = normalize(&raw)?;
    let report = bound_suite(&inst)?;
    let mut problems: Vec<String> = report
        .violations()
        .iter()
        .map(|c| format!("{}: {} > {}", c.name, c.lhs, c.rhs))
        .collect();
    let advisories = report
        .advisory_failures()
        .iter()
        .map(|c| c.name.clone())
        .collect();
    let feasibility = check_solution(&report.run.solution, &inst);
    if !feasibility.is_feasible() {
        problems.push(format!("infeasible: {feasibility}"));
    }
    Ok(Trial {
        id,
        advisories,
        mode,
        m,
        k,
        alg: report.alg_cost(),
        opt: report.opt.map_or(f64::NAN, |o| o.total_cost),
        problems,
    })
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    if args.max_m > EXACT_CARP_CAP {
        return Err(CarpError::SizeCap {
            what: "verify --max-m",
            got: args.max_m,
            cap: EXACT_CARP_CAP,
        });
    }
    if args.max_m == 0 || args.k_range.0 == 0 {
        return Err(CarpError::input("--max-m and the capacity range must be positive"));
    }
    let mut trials = (0..args.trials)
        .into_par_iter()
        .map(|id| run_trial(id, args.seed, args.max_m, args.k_range))
        .collect::<Result<Vec<_>>>()?;
    trials.sort_by_key(|t| t.id);
    let failing = trials.iter().filter(|t| !t.problems.is_empty()).count();
    for t in &trials {
        let mode = match t.mode {
            GenMode::Euclidean => "euclidean",
            GenMode::RandomMetric => "random-metric",
        };
        if args.output == OutputArg::Report || !t.problems.is_empty() {
            let status = if t.problems.is_empty() { "ok" } else { "VIOLATED" };
            emit!(
                out,
                "trial {} mode {mode} m {} k {} alg {} opt {} {status}",
                t.id,
                t.m,
                t.k,
                t.alg,
                t.opt
            );
            for p in &t.problems {
                emit!(out, "  {p}");
            }
        }
    }
    let mut advisory: Vec<&str> = trials
        .iter()
        .flat_map(|t| t.advisories.iter().map(String::as_str))
        .collect();
    advisory.sort_unstable();
    let mut start = 0;
    while start < advisory.len() {
        let name = advisory[start];
        let end = start + advisory[start..].iter().take_while(|&&n| n == name).count();
        emit!(out, "advisory {name} failed on {} trials", end - start);
        start = end;
    }
    emit!(out, "trials {} violations {failing}", trials.len());
    Ok(if failing == 0 { 0 } else { EXIT_VIOLATION })
}

fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<i32> {
    if args.k == 0 {
        return Err(CarpError::input("capacity must be at least 1"));
    }
    let mode = match args.mode {
        ModeArg::Euclidean => GenMode::Euclidean,
        ModeArg::RandomMetric => GenMode::RandomMetric,
    };
    let raw = generate(args.m, args.k, mode, args.seed, args.range);
    out.write_all(write_native(&raw).as_bytes()).map_err(io)?;
    Ok(0)
}
