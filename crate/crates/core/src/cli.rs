//! Command-line front end. `dispatch` never panics on bad input; it maps
//! every outcome onto an exit code.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{normalize_instance, parse_instance, serialize_instance, PizzaInstance};
use crate::measure::etr::export_etr;
use crate::measure::{compile, region_mass_oracle};
use crate::numeric::{format_rational, parse_numeral, to_f64, Rational};
use crate::reductions::{
    lines_to_ch_cuts_detailed, path_to_ch_cuts, random_instance, reduce_checkerboard, reduce_exact, reduce_overlapping,
    reduce_straight, verify_ch, verify_scpath, verify_straight, CheckerboardParams, ChInstance, ReductionKind,
    ReductionMeta, StraightCutSet, StraightParams,
};
use crate::render::{render, Overlay};
use crate::sc_path::{antipode, solution_to_path, sphere_to_solution, turns_for_len, PathFile};
use crate::solver::{run, Method, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "scpizza", about = "Square-cut pizza sharing: solve, verify, reduce, render")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Parse and validate an instance, path, line set or CH file.
    Validate(ValidateArgs),
    /// Build a pizza instance from a CH instance, or a random CH instance.
    Gen(GenArgs),
    /// Search for an ε-balanced square-cut path.
    Solve(SolveArgs),
    /// Check a path exactly with the clipping oracle.
    Verify(VerifyArgs),
    /// Check a straight-line partition exactly.
    VerifyLines(VerifyLinesArgs),
    /// Turn a pizza solution on a reduced instance into CH cuts.
    MapBack(MapBackArgs),
    /// Print f(p), f(−p) and the gaps at a sphere point.
    Eval(EvalArgs),
    /// Write the existential formula for an instance.
    ExportEtr(ExportArgs),
    /// Draw an instance, optionally with a path or lines, as SVG.
    Render(RenderArgs),
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    path: Option<PathBuf>,
    #[arg(long)]
    lines: Option<PathBuf>,
    #[arg(long)]
    from: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// CH instance to reduce. Without it a random CH instance is written.
    #[arg(long)]
    from: Option<PathBuf>,
    #[arg(long, value_parser = parse_kind)]
    reduction: Option<ReductionKind>,
    #[arg(short = 'o')]
    out: Option<PathBuf>,
    #[arg(long)]
    meta: Option<PathBuf>,
    #[arg(long, default_value = "1/100")]
    eps: String,
    /// Straight reduction step.
    #[arg(long)]
    d: Option<String>,
    #[arg(long, default_value = "1")]
    delta: String,
    /// Refuse irrational square sides instead of snapping them.
    #[arg(long)]
    exact: bool,
    /// Checkerboard tiles per block side.
    #[arg(long)]
    granularity: Option<u32>,
    #[arg(long, default_value_t = 3)]
    agents: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Endpoint grid of random CH instances.
    #[arg(long, default_value_t = 20)]
    grid: i64,
    /// Random agents get one density across both blocks.
    #[arg(long)]
    uniform: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "1e-3")]
    eps: String,
    /// Defaults to one less than the number of colors.
    #[arg(long)]
    turns: Option<usize>,
    /// homotopy, multistart or grid.
    #[arg(long, default_value = "homotopy")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    starts: usize,
    #[arg(long, default_value_t = 32)]
    grid_resolution: usize,
    #[arg(short = 'o')]
    out: Option<PathBuf>,
    /// Solver report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    path: PathBuf,
    #[arg(long, default_value = "1e-3")]
    eps: String,
    /// Turn budget; defaults to one less than the number of colors.
    #[arg(long)]
    turns: Option<usize>,
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyLinesArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    lines: PathBuf,
    #[arg(long, default_value = "1e-3")]
    eps: String,
    /// Supplies the line budget of a straight reduction.
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MapBackArgs {
    #[arg(long)]
    meta: PathBuf,
    #[arg(long)]
    path: Option<PathBuf>,
    #[arg(long)]
    lines: Option<PathBuf>,
    /// CH instance to verify the mapped cuts against.
    #[arg(long)]
    from: Option<PathBuf>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    path: PathBuf,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    turns: Option<usize>,
    #[arg(short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    path: Option<PathBuf>,
    #[arg(long)]
    lines: Option<PathBuf>,
    #[arg(long, default_value_t = 600)]
    size: u32,
    #[arg(short = 'o')]
    out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> std::result::Result<ReductionKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn eps(s: &str) -> Result<Rational> {
    let e = parse_numeral(s)?;
    if e.is_negative() {
        return Err(Error::Config("epsilon must be non-negative".into()));
    }
    Ok(e)
}

fn load_instance(p: &Path) -> Result<PizzaInstance> {
    let inst = parse_instance(&read(p)?)?;
    Ok(normalize_instance(&inst)?.0)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value") + "\n"
}

fn strs(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

/// Runs one command line (without the program name) and returns its exit code.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once(std::ffi::OsString::from("scpizza")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.verb) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::GridTooLarge { .. } => EXIT_BUDGET,
                _ => EXIT_INPUT,
            }
        }
    }
}

fn execute(verb: Verb) -> Result<i32> {
    match verb {
        Verb::Validate(a) => validate(a),
        Verb::Gen(a) => gen(a),
        Verb::Solve(a) => solve(a),
        Verb::Verify(a) => verify(a),
        Verb::VerifyLines(a) => verify_lines(a),
        Verb::MapBack(a) => map_back(a),
        Verb::Eval(a) => eval(a),
        Verb::ExportEtr(a) => export(a),
        Verb::Render(a) => draw(a),
    }
}

fn validate(a: ValidateArgs) -> Result<i32> {
    let mut any = false;
    if let Some(p) = &a.instance {
        let inst = parse_instance(&read(p)?)?;
        println!("instance: {} colors, normalized: {}", inst.n_colors(), inst.is_normalized());
        any = true;
    }
    if let Some(p) = &a.path {
        let coords = PathFile::parse(&read(p)?)?;
        let path = solution_to_path(&sphere_to_solution(&coords)?)?;
        println!("path: {} coordinates, {} turns", coords.len(), path.turns());
        any = true;
    }
    if let Some(p) = &a.lines {
        let set = StraightCutSet::parse(&read(p)?)?;
        println!("lines: {}", set.lines.len());
        any = true;
    }
    if let Some(p) = &a.from {
        let ch = ChInstance::parse(&read(p)?)?;
        println!("ch instance: {} agents", ch.n());
        any = true;
    }
    if !any {
        return Err(Error::Config("nothing to validate; pass --instance, --path, --lines or --from".into()));
    }
    Ok(EXIT_OK)
}

fn gen(a: GenArgs) -> Result<i32> {
    let Some(from) = &a.from else {
        if a.agents == 0 || a.grid < 2 {
            return Err(Error::Config("need at least one agent and a grid of at least 2".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let ch = random_instance(&mut rng, a.agents, a.grid, a.uniform);
        emit(a.out.as_deref(), &ch.to_json())?;
        return Ok(EXIT_OK);
    };
    let ch = ChInstance::parse(&read(from)?)?;
    let kind = a.reduction.ok_or_else(|| Error::Config("--reduction is required with --from".into()))?;
    let e = eps(&a.eps)?;
    let (inst, meta) = match kind {
        ReductionKind::Overlapping => reduce_overlapping(&ch)?,
        ReductionKind::Exact => reduce_exact(&ch)?,
        ReductionKind::Checkerboard => {
            reduce_checkerboard(&ch, &CheckerboardParams { granularity: a.granularity, exact: a.exact, ..CheckerboardParams::new(e) })?
        }
        ReductionKind::Straight => {
            let d = a.d.as_deref().map(parse_numeral).transpose()?;
            reduce_straight(&ch, &StraightParams { d, delta: parse_numeral(&a.delta)?, exact: a.exact, ..StraightParams::new(e) })?
        }
    };
    emit(a.out.as_deref(), &serialize_instance(&inst))?;
    if let Some(m) = &a.meta {
        emit(Some(m), &meta.to_json())?;
    }
    eprintln!("{} colors, approximate: {}", inst.n_colors(), meta.approximate);
    Ok(EXIT_OK)
}

fn solve(a: SolveArgs) -> Result<i32> {
    let inst = load_instance(&a.instance)?;
    let ci = compile(&inst)?;
    let mut cfg = SolverConfig::for_colors(inst.n_colors(), eps(&a.eps)?);
    if let Some(k) = a.turns {
        cfg.turns = k;
    }
    cfg.method = a.method;
    cfg.rng_seed = a.seed;
    cfg.seeds = a.starts;
    cfg.grid_resolution = a.grid_resolution;
    let rep = run(&ci, &cfg)?;
    let file = PathFile::from_coords(rep.point.clone())?;
    emit(a.out.as_deref(), &(serde_json::to_string_pretty(&file)? + "\n"))?;
    if let Some(r) = &a.report {
        emit(Some(r), &pretty(&rep.to_json()))?;
    }
    eprintln!("residual {} (≈ {:.3e}), verified: {}", format_rational(&rep.residual), to_f64(&rep.residual), rep.verified_exact);
    Ok(if rep.verified_exact { EXIT_OK } else { EXIT_BUDGET })
}

fn verify(a: VerifyArgs) -> Result<i32> {
    let inst = load_instance(&a.instance)?;
    let coords = PathFile::parse(&read(&a.path)?)?;
    let sol = sphere_to_solution(&coords)?;
    let meta = a.meta.as_deref().map(|p| read(p).and_then(|t| ReductionMeta::parse(&t))).transpose()?;
    let budget = a.turns.unwrap_or(inst.n_colors().saturating_sub(1));
    let rep = verify_scpath(&inst, &sol, &eps(&a.eps)?, Some(budget), meta.as_ref())?;
    let out = serde_json::json!({
        "pass": rep.pass,
        "turns": rep.turns,
        "within_budget": rep.within_budget,
        "gaps": strs(&rep.gaps()),
        "warnings": rep.warnings,
    });
    print!("{}", pretty(&out));
    Ok(if rep.pass { EXIT_OK } else { EXIT_FAILED })
}

fn verify_lines(a: VerifyLinesArgs) -> Result<i32> {
    let inst = load_instance(&a.instance)?;
    let set = StraightCutSet::parse(&read(&a.lines)?)?;
    let meta = a.meta.as_deref().map(|p| read(p).and_then(|t| ReductionMeta::parse(&t))).transpose()?;
    let budget = meta.and_then(|m| m.line_budget).unwrap_or(inst.n_colors());
    let rep = verify_straight(&inst, &set, &eps(&a.eps)?, Some(budget))?;
    let out = serde_json::json!({
        "pass": rep.pass,
        "lines": set.lines.len(),
        "within_budget": rep.within_budget,
        "gaps": strs(&rep.gaps()),
    });
    print!("{}", pretty(&out));
    Ok(if rep.pass { EXIT_OK } else { EXIT_FAILED })
}

fn map_back(a: MapBackArgs) -> Result<i32> {
    let meta = ReductionMeta::parse(&read(&a.meta)?)?;
    let sol = match (&a.path, &a.lines) {
        (Some(p), None) => {
            if meta.kind == ReductionKind::Straight {
                return Err(Error::MapBack("straight reductions map back from --lines".into()));
            }
            path_to_ch_cuts(&meta, &sphere_to_solution(&PathFile::parse(&read(p)?)?)?)?
        }
        (None, Some(l)) => {
            let out = lines_to_ch_cuts_detailed(&meta, &StraightCutSet::parse(&read(l)?)?)?;
            eprintln!("rotated lines: {}", out.rotated.iter().filter(|&&r| r).count());
            out.solution
        }
        _ => return Err(Error::Config("pass exactly one of --path and --lines".into())),
    };
    emit(a.out.as_deref(), &sol.to_json())?;
    let Some(from) = &a.from else { return Ok(EXIT_OK) };
    let ch = ChInstance::parse(&read(from)?)?;
    let e = match &a.eps {
        Some(s) => eps(s)?,
        None => meta.eps_out.clone().ok_or_else(|| Error::Config("--eps is required".into()))?,
    };
    let rep = verify_ch(&ch, &sol, &e)?;
    eprintln!("max gap {} ({})", format_rational(&rep.max_gap()), if rep.pass { "pass" } else { "fail" });
    Ok(if rep.pass { EXIT_OK } else { EXIT_FAILED })
}

fn eval(a: EvalArgs) -> Result<i32> {
    let inst = load_instance(&a.instance)?;
    let ci = compile(&inst)?;
    let p = PathFile::parse(&read(&a.path)?)?;
    let f = ci.bu_eval(&p)?;
    let g = ci.bu_eval(&antipode(&p))?;
    let oracle = region_mass_oracle(&inst, &sphere_to_solution(&p)?)?;
    let out = serde_json::json!({
        "turns": turns_for_len(p.len())?,
        "f": strs(&f),
        "f_antipode": strs(&g),
        "gaps": strs(&ci.gaps(&p)?),
        "residual": format_rational(&ci.residual(&p)?),
        "oracle_side_a": oracle.iter().map(|m| format_rational(&m.a)).collect::<Vec<_>>(),
    });
    print!("{}", pretty(&out));
    Ok(EXIT_OK)
}

fn export(a: ExportArgs) -> Result<i32> {
    let inst = load_instance(&a.instance)?;
    let ci = compile(&inst)?;
    let k = a.turns.unwrap_or(inst.n_colors().saturating_sub(1));
    let f = export_etr(&ci, k);
    emit(a.out.as_deref(), &f.text())?;
    eprintln!("{} variables, {} gates", f.variables.len(), f.gate_count);
    Ok(EXIT_OK)
}

fn draw(a: RenderArgs) -> Result<i32> {
    let inst = load_instance(&a.instance)?;
    let svg = match (&a.path, &a.lines) {
        (Some(p), None) => {
            let path = solution_to_path(&sphere_to_solution(&PathFile::parse(&read(p)?)?)?)?;
            render(&inst, Overlay::Path(&path), a.size)
        }
        (None, Some(l)) => render(&inst, Overlay::Lines(&StraightCutSet::parse(&read(l)?)?), a.size),
        (None, None) => render(&inst, Overlay::None, a.size),
        _ => return Err(Error::Config("pass at most one of --path and --lines".into())),
    };
    emit(a.out.as_deref(), &svg)?;
    Ok(EXIT_OK)
}
