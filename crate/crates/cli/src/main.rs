mod bench;
mod io;
mod render;
mod solve;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rectpack_core::corridor::{process_corridor, Corridor};
use rectpack_core::gap::{solve_gap_with, GapConfig, GapError, GapInstance};
use rectpack_core::lab::{
    construct_lowerbound_packing, construct_yes_packing, extract_partition, gen_hardness_2dkr, gen_lowerbound_family,
    gen_random, gen_yes_instance, reduce_ksum_to_partsum, EqualSplit, LabError, PartSumInstance, Profile,
};
use rectpack_core::lshape::validate_lc_star;
use rectpack_core::model::{validate_container_packing, validate_packing, InstanceRef, Packing};
use rectpack_core::rational::{ceil_mul, Q};
use rectpack_core::transforms::{delete_random_strip, resource_contraction, Mode, PipelineInput, PipelineParams, StripOrientation};
use serde_json::json;

use io::{emit, rational, read_instance, read_json, resolve_instance, to_json, CliError, CliResult, SolutionFile, EXIT_BUDGET};
use solve::{Algo, Outcome, Params};

#[derive(Parser)]
#[command(name = "rectpack", version, about = "Two-dimensional geometric knapsack toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write an instance (or PartSum data) from one of the families.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Run a packer on an instance.
    Solve(SolveArgs),
    /// Check a packing; exit 0 iff valid.
    Verify(VerifyArgs),
    /// Apply a structural transformation.
    Transform {
        #[command(subcommand)]
        op: TransformOp,
    },
    /// Solve a generalized assignment instance.
    Gap(GapArgs),
    /// Exact solver for tiny instances.
    Oracle(OracleArgs),
    /// Recover an equal-sum split from a packing of a hardness instance.
    Extract(ExtractArgs),
    /// Draw a packing as SVG.
    Render(RenderArgs),
    /// Run an experiment suite and write CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Out {
    /// Output file (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Family {
    /// k-PartSum values from k-SUM values.
    Reduce {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<i64>,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Random k-PartSum yes-instance and a witness split.
    Partsum {
        #[arg(long, default_value_t = 9)]
        k: usize,
        #[arg(long, default_value_t = 50)]
        max_value: i64,
        #[arg(long, default_value_t = 0)]
        extra: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the split.
        #[arg(long)]
        split_out: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Knapsack instance from k-PartSum values.
    Hardness {
        /// PartSum JSON file ({"A": [...], "k": ...}).
        #[arg(long, conflicts_with = "values")]
        partsum: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        values: Vec<i64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        rotation: bool,
        /// Allow k below 9.
        #[arg(long)]
        force: bool,
        /// Split JSON; with --packing-out writes the matching yes packing.
        #[arg(long, requires = "packing_out")]
        split: Option<PathBuf>,
        #[arg(long)]
        packing_out: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Container lower-bound family with n items (n odd).
    Lowerbound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        packing_out: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Seeded random instance.
    Random {
        /// uniform | cardinality | skewed:<eps>
        #[arg(long, default_value = "uniform")]
        profile: Profile,
        #[arg(long)]
        n: usize,
        /// Knapsack side N.
        #[arg(long)]
        side: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        rotation: bool,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args, Clone)]
struct Tuning {
    /// Number of containers.
    #[arg(long, default_value_t = 2)]
    c: usize,
    #[arg(long, default_value = "1/10", value_parser = rational)]
    eps: Q,
    /// Uniform grid denominator for candidate coordinates.
    #[arg(long, default_value_t = 16)]
    grid: i64,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "container")]
    algo: Algo,
    #[command(flatten)]
    tuning: Tuning,
    /// Candidate sets for container searches; search nodes for the oracle.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    time_ms: Option<u64>,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct OracleArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 50_000_000)]
    budget: u64,
    #[arg(long)]
    time_ms: Option<u64>,
    /// Search every integer coordinate instead of subset sums.
    #[arg(long)]
    unit_grid: bool,
    /// Best packing with at most this many containers instead.
    #[arg(long)]
    containers: Option<usize>,
    #[arg(long, default_value = "1/10", value_parser = rational)]
    eps: Q,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct VerifyArgs {
    /// Packing JSON.
    packing: PathBuf,
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Also check the container rules against the file's containers.
    #[arg(long)]
    containers: bool,
    /// Also check the L-and-containers rules against the file's L-shape.
    #[arg(long)]
    lcstar: bool,
    #[arg(long, default_value = "1/10", value_parser = rational)]
    eps: Q,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Cardinality,
    Weighted,
}

#[derive(Subcommand)]
enum TransformOp {
    /// Shrink, compact and refill a container packing.
    Pipeline {
        input: PathBuf,
        #[arg(long, default_value = "1/10", value_parser = rational)]
        eps: Q,
        #[arg(long, default_value = "1/10", value_parser = rational)]
        eps_large: Q,
        #[arg(long, default_value = "1/100", value_parser = rational)]
        eps_thin: Q,
        #[arg(long, value_enum, default_value = "weighted")]
        mode: ModeArg,
        #[arg(long, value_parser = rational)]
        mu: Option<Q>,
        #[command(flatten)]
        out: Out,
    },
    /// Split a corridor of a packing into boxes and containers.
    Corridor {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        packing: PathBuf,
        #[arg(long)]
        corridor: PathBuf,
        #[arg(long, default_value = "1/2", value_parser = rational)]
        eps: Q,
        #[arg(long, default_value = "1/64", value_parser = rational)]
        eps_thin: Q,
        #[arg(long)]
        max_bends: Option<usize>,
        #[command(flatten)]
        out: Out,
    },
    /// Delete every item meeting a randomly placed strip.
    Strip {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        packing: PathBuf,
        #[arg(long, value_enum, default_value = "horizontal")]
        orientation: OrientationArg,
        #[arg(long)]
        thickness: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Horizontal,
    Vertical,
}

#[derive(Args)]
struct GapArgs {
    input: PathBuf,
    #[arg(long)]
    k_max: Option<usize>,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    packing: PathBuf,
    #[arg(long, default_value_t = 9)]
    k: usize,
    #[command(flatten)]
    out: Out,
}

#[derive(Clone, Copy, ValueEnum)]
enum Overlay {
    Strips,
}

#[derive(Args)]
struct RenderArgs {
    packing: PathBuf,
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, value_enum)]
    overlay: Vec<Overlay>,
    /// Strip thickness is ceil(eps N).
    #[arg(long, default_value = "1/10", value_parser = rational)]
    eps: Q,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 3)]
    c: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value = "1/10", value_parser = rational)]
    eps: Q,
    #[command(flatten)]
    out: Out,
}

fn lab_err(e: LabError) -> CliError {
    match e {
        LabError::NotExtractable(_) | LabError::InvalidSplit(_) => CliError::invalid(e.to_string()),
        _ => CliError::usage(e.to_string()),
    }
}

fn generate(f: Family) -> CliResult<()> {
    match f {
        Family::Reduce { values, k, out } => {
            let ps = reduce_ksum_to_partsum(&values, k).map_err(lab_err)?;
            emit(out.output.as_deref(), &to_json(&ps))
        }
        Family::Partsum { k, max_value, extra, seed, split_out, out } => {
            if k < 3 || max_value < 1 {
                return Err(CliError::usage("need k >= 3 and max-value >= 1"));
            }
            let (ps, split) = gen_yes_instance(k, max_value, extra, seed);
            if let Some(p) = split_out {
                emit(Some(&p), &to_json(&split))?;
            }
            emit(out.output.as_deref(), &to_json(&ps))
        }
        Family::Hardness { partsum, values, k, rotation, force, split, packing_out, out } => {
            let ps = match partsum {
                Some(p) => read_json::<PartSumInstance>(&p)?,
                None => PartSumInstance { values, k: k.ok_or_else(|| CliError::usage("--k is required with --values"))? },
            };
            let inst = gen_hardness_2dkr(&ps, rotation, force).map_err(lab_err)?;
            if let (Some(s), Some(p)) = (split, packing_out) {
                let split: EqualSplit = read_json(&s)?;
                let packing = construct_yes_packing(&ps, &split).map_err(lab_err)?;
                emit(Some(&p), &to_json(&solution(&packing, Some(inst.clone()))))?;
            }
            emit(out.output.as_deref(), &to_json(&inst))
        }
        Family::Lowerbound { n, packing_out, out } => {
            let inst = gen_lowerbound_family(n).map_err(lab_err)?;
            if let Some(p) = packing_out {
                emit(Some(&p), &to_json(&solution(&construct_lowerbound_packing(&inst), None)))?;
            }
            emit(out.output.as_deref(), &to_json(&inst))
        }
        Family::Random { profile, n, side, seed, rotation, out } => {
            if side < 1 {
                return Err(CliError::usage("--side must be at least 1"));
            }
            emit(out.output.as_deref(), &to_json(&gen_random(profile, n, side, seed, rotation)))
        }
    }
}

fn solution(packing: &Packing, inline: Option<rectpack_core::model::Instance>) -> SolutionFile {
    SolutionFile {
        instance: inline.map(InstanceRef::Inline),
        placements: packing.placements.clone(),
        containers: Vec::new(),
        lshape: None,
        profit: None,
        certified: None,
    }
}

/// Writes the packing, prints the summary line, maps exhaustion to exit 3.
fn finish(input: &Path, o: Outcome, out: Option<&Path>) -> CliResult<()> {
    let file = SolutionFile {
        instance: Some(InstanceRef::Path(input.display().to_string())),
        placements: o.packing.placements.clone(),
        containers: o.containers,
        lshape: o.lshape,
        profit: Some(o.profit),
        certified: Some(o.certified),
    };
    emit(out, &to_json(&file))?;
    let summary = format!("profit={} items={} certified={}", o.profit, o.packing.len(), o.certified);
    if out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    if o.exhausted {
        return Err(CliError::new(EXIT_BUDGET, "budget exhausted; best packing found so far was written"));
    }
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> CliResult<()> {
    let inst = read_instance(&a.input)?;
    let budget = a.budget.unwrap_or(if a.algo == Algo::Oracle { 50_000_000 } else { 2000 });
    let p = Params { c: a.tuning.c, eps: a.tuning.eps, grid: a.tuning.grid, budget, time_ms: a.time_ms, unit_grid: false };
    let o = solve::run(&inst, a.algo, &p)?;
    finish(&a.input, o, a.out.output.as_deref())
}

fn cmd_oracle(a: OracleArgs) -> CliResult<()> {
    let inst = read_instance(&a.input)?;
    let p = Params { c: a.containers.unwrap_or(0), eps: a.eps, grid: 16, budget: a.budget, time_ms: a.time_ms, unit_grid: a.unit_grid };
    let o = match a.containers {
        Some(c) => solve::run_container_oracle(&inst, c, &p)?,
        None => solve::run(&inst, Algo::Oracle, &p)?,
    };
    finish(&a.input, o, a.out.output.as_deref())
}

fn cmd_verify(a: VerifyArgs) -> CliResult<()> {
    let sol: SolutionFile = read_json(&a.packing)?;
    let inst = resolve_instance(a.instance.as_deref(), &sol, &a.packing)?;
    let packing = sol.packing();
    let mut report = validate_packing(&inst, &packing);
    if a.lcstar {
        let l = sol.lshape.ok_or_else(|| CliError::usage("--lcstar needs an `lshape` in the packing file"))?;
        report = validate_lc_star(&inst, &packing, &l, &sol.containers, a.eps);
    } else if a.containers {
        report = validate_container_packing(&inst, &packing, &sol.containers, a.eps);
    }
    eprint!("{}", to_json(&report));
    if report.valid {
        Ok(())
    } else {
        Err(CliError::invalid(format!("{} violation(s)", report.violations.len())))
    }
}

fn cmd_transform(op: TransformOp) -> CliResult<()> {
    match op {
        TransformOp::Pipeline { input, eps, eps_large, eps_thin, mode, mu, out } => {
            let data: PipelineInput = read_json(&input)?;
            let mode = match mode {
                ModeArg::Cardinality => Mode::Cardinality,
                ModeArg::Weighted => Mode::Weighted,
            };
            let report = resource_contraction(&data, &PipelineParams { eps, eps_large, eps_thin, mode, mu })
                .map_err(|e| CliError::invalid(e.to_string()))?;
            emit(out.output.as_deref(), &to_json(&report))
        }
        TransformOp::Corridor { instance, packing, corridor, eps, eps_thin, max_bends, out } => {
            let inst = read_instance(&instance)?;
            let sol: SolutionFile = read_json(&packing)?;
            let corr: Corridor = read_json(&corridor)?;
            let res = process_corridor(&inst, &corr, &sol.packing(), eps, eps_thin, max_bends)
                .map_err(|e| CliError::invalid(e.to_string()))?;
            emit(out.output.as_deref(), &to_json(&res))
        }
        TransformOp::Strip { instance, packing, orientation, thickness, seed, out } => {
            let inst = read_instance(&instance)?;
            let sol: SolutionFile = read_json(&packing)?;
            let o = match orientation {
                OrientationArg::Horizontal => StripOrientation::Horizontal,
                OrientationArg::Vertical => StripOrientation::Vertical,
            };
            let (kept, offset) = delete_random_strip(&inst, &sol.packing(), o, thickness, seed);
            emit(out.output.as_deref(), &to_json(&json!({ "offset": offset, "placements": kept.placements })))
        }
    }
}

fn cmd_gap(a: GapArgs) -> CliResult<()> {
    let inst: GapInstance = read_json(&a.input)?;
    let mut cfg = GapConfig::default();
    if let Some(k) = a.k_max {
        cfg.k_max = k;
    }
    match solve_gap_with(&inst, &cfg) {
        Ok(sol) => emit(a.out.output.as_deref(), &to_json(&sol)),
        Err(e @ GapError::StateBudgetExceeded { .. }) => Err(CliError::new(EXIT_BUDGET, e.to_string())),
        Err(e) => Err(CliError::usage(e.to_string())),
    }
}

fn cmd_extract(a: ExtractArgs) -> CliResult<()> {
    let inst = read_instance(&a.instance)?;
    let sol: SolutionFile = read_json(&a.packing)?;
    let split = extract_partition(&inst, &sol.packing(), a.k).map_err(lab_err)?;
    emit(a.out.output.as_deref(), &to_json(&split))
}

fn cmd_render(a: RenderArgs) -> CliResult<()> {
    let sol: SolutionFile = read_json(&a.packing)?;
    let inst = resolve_instance(a.instance.as_deref(), &sol, &a.packing)?;
    let packing = sol.packing();
    let strip = a.overlay.iter().any(|o| matches!(o, Overlay::Strips)).then(|| ceil_mul(a.eps, inst.n).clamp(1, inst.n));
    let scene = render::Scene { inst: &inst, packing: &packing, containers: &sol.containers, lshape: sol.lshape, strip };
    emit(a.out.output.as_deref(), &render::render_svg(&scene))
}

fn cmd_bench(a: BenchArgs) -> CliResult<()> {
    let cfg = bench::SuiteConfig { c: a.c, seed: a.seed, count: a.count, eps: a.eps };
    let jobs = bench::jobs(&a.suite, &cfg)?;
    let rows = bench::run_jobs(jobs, io::threads())?;
    emit(a.out.output.as_deref(), &bench::to_csv(&rows))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let r = match cli.cmd {
        Cmd::Generate { family } => generate(family),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Transform { op } => cmd_transform(op),
        Cmd::Gap(a) => cmd_gap(a),
        Cmd::Oracle(a) => cmd_oracle(a),
        Cmd::Extract(a) => cmd_extract(a),
        Cmd::Render(a) => cmd_render(a),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code as u8)
        }
    }
}
