//! Command-line front end for the k-visits toolkit.
//!
//! Subcommands cover the whole surface of the library: the polynomial
//! solvers (`solve`), schedule checking (`verify`), structural analysis
//! (`analyze`), the budgeted exhaustive oracles (`oracle`), the reduction
//! chain between the matching problems and scheduling (`reduce`), seeded
//! instance generation (`gen`) and benchmark tables (`bench`).
//!
//! Output is tab-separated so scripts can diff it. The exit code carries the
//! verdict and is stable: `0` feasible (or plain success), `1` infeasible,
//! `2` usage or parse error, `3` oracle budget exhausted. The environment
//! variable `KVISITS_BUDGET` overrides the default oracle node budget
//! wherever `--budget` is not given. `--version` prints the format versions
//! the binary reads and writes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use kvisits::formats::{
    parse_any, serialize_in3dm, serialize_kvisits, serialize_pm, serialize_rn3dm,
    serialize_schedule, serialize_tpws, serialize_var_kvisits, InstanceFile, FORMAT_VERSIONS,
};
use kvisits::generator::{gen_distinct_kvisits, gen_kvisits, gen_pm, gen_rn3dm_candidate};
use kvisits::instances::KVisitsInstance;
use kvisits::oracle::{
    oracle_in3dm, oracle_kvisits, oracle_pm, oracle_rn3dm, oracle_var_kvisits, In3dmOracleOutcome,
    OracleOutcome, PmOracleOutcome, Rn3dmOracleOutcome, SearchBudget,
};
use kvisits::reductions::{
    in3dm_normalize, in3dm_to_pm, pm_shift, pm_to_two_visits, rn3dm_to_in3dm,
    rn3dm_trivially_infeasible,
    two_visits_to_threshold_pws, two_visits_to_var_k, NormalizeOutcome, PmToTwoVisitsOutcome,
};
use kvisits::solver::{
    solve_one_visit, solve_two_visits, InfeasibleReason, PmSolverKind, SolveVerdict,
};
use kvisits::verify::{verify_kvisits, verify_var_kvisits, ViolationReason};

type CliError = String;

fn version_banner() -> &'static str {
    static BANNER: OnceLock<String> = OnceLock::new();
    BANNER.get_or_init(|| {
        let mut s = String::from(env!("CARGO_PKG_VERSION"));
        s.push_str("\nformats:");
        for (tag, version) in FORMAT_VERSIONS {
            let _ = write!(s, " {tag}={version}");
        }
        s
    })
}

#[derive(Parser)]
#[command(
    name = "kvisits",
    version = version_banner(),
    about = "Exact solvers, oracles and reductions for k-visits scheduling instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance with the polynomial solvers (k = 1 or k = 2).
    Solve(SolveArgs),
    /// Check a schedule file against an instance file.
    Verify(VerifyArgs),
    /// Print discretized positions, clusters, gaps and the exact density.
    Analyze(AnalyzeArgs),
    /// Decide an instance by budgeted exhaustive search (any k).
    Oracle(OracleArgs),
    /// Chain reductions towards scheduling, writing every intermediate file.
    Reduce(ReduceArgs),
    /// Generate seeded random instances, optionally labeled by the oracle.
    Gen(GenArgs),
    /// Run a benchmark suite and print a TSV table.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (kvisits format).
    file: PathBuf,
    /// Override the visit count stored in the file.
    #[arg(long)]
    k: Option<usize>,
    /// Print the schedule document itself on stdout (verdict goes to stderr).
    #[arg(long)]
    emit_schedule: bool,
    /// Print the per-cluster matching dispatch table.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance file (kvisits or varkvisits format).
    instance: PathBuf,
    /// Schedule file to check.
    schedule: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Instance file (kvisits format).
    file: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file (kvisits, varkvisits, pm, rn3dm or in3dm format).
    file: PathBuf,
    /// Maximum number of search-tree nodes to expand.
    #[arg(long)]
    budget: Option<u64>,
    /// Print the witness (schedule document or matching triples) on stdout.
    #[arg(long)]
    emit_schedule: bool,
}

#[derive(Args)]
struct ReduceArgs {
    /// Source instance file (rn3dm, in3dm, pm or kvisits format).
    file: PathBuf,
    /// Stage the source file is at; must match the file's tag if given.
    #[arg(long, value_enum)]
    from: Option<Stage>,
    /// Stage to reduce to.
    #[arg(long, value_enum)]
    to: Stage,
    /// Directory receiving the numbered intermediate files.
    #[arg(long)]
    out_dir: PathBuf,
    /// Visit count for the varkvisits stage (>= 2).
    #[arg(long, default_value_t = 3)]
    k_target: usize,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Number of nodes / elements.
    #[arg(long)]
    n: usize,
    /// Visit count (kvisits family only, default 2).
    #[arg(long)]
    k: Option<usize>,
    /// Largest deadline (kvisits, pm) or element value (rn3dm); default 2n.
    #[arg(long)]
    max_deadline: Option<i64>,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Decide every generated instance with the oracle and print the label.
    #[arg(long)]
    label_with_oracle: bool,
    /// Allow kvisits deadlines beyond 2n (exercises trimming).
    #[arg(long)]
    allow_oversize: bool,
    /// Write one file per instance here instead of printing to stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Parallelize generation and labeling across instances.
    #[arg(long)]
    jobs: Option<usize>,
    /// Node budget for `--label-with-oracle`.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Parallelize across instances where the suite allows it.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value_t = 0xC0FFEE)]
    seed: u64,
    /// Largest size the suite scales to (suite-specific default).
    #[arg(long)]
    max_n: Option<usize>,
    /// Instances per size (oracle-agreement suite).
    #[arg(long)]
    count: Option<usize>,
    /// Node budget for oracle runs.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Family {
    Kvisits,
    Pm,
    Rn3dm,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Kvisits => "kvisits",
            Family::Pm => "pm",
            Family::Rn3dm => "rn3dm",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Suite {
    OracleAgreement,
    DistinctScaling,
    ClusterFpt,
}

/// Stations of the reduction chain, in pipeline order. `varkvisits` and
/// `tpws` are alternative endpoints one step past `kvisits`.
#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
enum Stage {
    Rn3dm,
    In3dm,
    In3dmNormalized,
    Pm,
    PmShifted,
    Kvisits,
    Varkvisits,
    Tpws,
}

impl Stage {
    fn order(self) -> u8 {
        match self {
            Stage::Rn3dm => 0,
            Stage::In3dm => 1,
            Stage::In3dmNormalized => 2,
            Stage::Pm => 3,
            Stage::PmShifted => 4,
            Stage::Kvisits => 5,
            Stage::Varkvisits | Stage::Tpws => 6,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Stage::Rn3dm => "rn3dm",
            Stage::In3dm => "in3dm",
            Stage::In3dmNormalized => "in3dm-normalized",
            Stage::Pm => "pm",
            Stage::PmShifted => "pm-shifted",
            Stage::Kvisits => "kvisits",
            Stage::Varkvisits => "varkvisits",
            Stage::Tpws => "tpws",
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when the consumer closes the pipe (`kvisits ... | head`),
    // like other line-oriented Unix tools, instead of panicking mid-write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn parse_instance(path: &Path) -> Result<InstanceFile, CliError> {
    parse_any(&read_file(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn resolve_budget(flag: Option<u64>) -> Result<SearchBudget, CliError> {
    if let Some(nodes) = flag {
        return Ok(SearchBudget::new(nodes));
    }
    match std::env::var("KVISITS_BUDGET") {
        Ok(value) => value
            .trim()
            .parse()
            .map(SearchBudget::new)
            .map_err(|_| format!("KVISITS_BUDGET must be a node count, got {value:?}")),
        Err(_) => Ok(SearchBudget::default()),
    }
}

fn configure_jobs(jobs: Option<usize>) -> Result<(), CliError> {
    if let Some(threads) = jobs {
        if threads == 0 {
            return Err("--jobs must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| format!("cannot configure {threads} worker threads: {e}"))?;
    }
    Ok(())
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn solver_kind_name(kind: PmSolverKind) -> &'static str {
    match kind {
        PmSolverKind::SingleValue => "single-value",
        PmSolverKind::TwoValues => "two-values",
        PmSolverKind::Distinct => "distinct",
        PmSolverKind::Exact => "exact",
    }
}

fn violation_slug(reason: ViolationReason) -> &'static str {
    match reason {
        ViolationReason::DeadlineExceeded => "deadline-exceeded",
        ViolationReason::WrongVisitCount => "wrong-visit-count",
        ViolationReason::BadLength => "bad-length",
        ViolationReason::IndexOutOfRange => "index-out-of-range",
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8, CliError> {
    let instance = match parse_instance(&args.file)? {
        InstanceFile::KVisits(instance) => instance,
        other => {
            return Err(format!(
                "solve expects a kvisits file, found `{}`; `kvisits oracle` handles other kinds",
                other.tag()
            ))
        }
    };
    let instance = match args.k {
        Some(k) => KVisitsInstance::new(instance.deadlines().to_vec(), k)
            .map_err(|e| e.to_string())?,
        None => instance,
    };
    let result = match instance.k() {
        1 => solve_one_visit(&instance),
        2 => solve_two_visits(&instance),
        k => {
            return Err(format!(
                "no polynomial solver for k = {k}; `kvisits oracle` decides small instances of any k"
            ))
        }
    }
    .map_err(|e| e.to_string())?;

    let mut table = String::new();
    match &result.verdict {
        SolveVerdict::Feasible => table.push_str("verdict\tfeasible\n"),
        SolveVerdict::Infeasible(reason) => {
            table.push_str("verdict\tinfeasible\n");
            match reason {
                InfeasibleReason::NonPositiveDiscretized { node } => {
                    let _ = writeln!(table, "reason\tnon-positive-discretized\tnode\t{node}");
                }
                InfeasibleReason::ClusterPmInfeasible { cluster } => {
                    let _ = writeln!(table, "reason\tcluster-matching-infeasible\tcluster\t{}", cluster + 1);
                }
            }
        }
    }
    if args.trace {
        // Spans are 1-based node index ranges of the instance the matching
        // ran on (after any trimming of oversized deadlines).
        for (i, t) in result.trace.iter().enumerate() {
            let _ = writeln!(
                table,
                "trace\t{}\t{}\t{}\t{}\t{}",
                i + 1,
                t.span.start + 1,
                t.span.end + 1,
                solver_kind_name(t.solver),
                if t.feasible { "feasible" } else { "infeasible" }
            );
        }
    }
    match (&result.schedule, args.emit_schedule) {
        (Some(schedule), true) => {
            eprint!("{table}");
            print!("{}", serialize_schedule(schedule));
        }
        (Some(schedule), false) => {
            print!("{table}");
            println!("schedule\t{}", join(schedule.entries()));
        }
        (None, _) => print!("{table}"),
    }
    Ok(if result.is_feasible() { 0 } else { 1 })
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let instance = parse_instance(&args.instance)?;
    let schedule = match parse_instance(&args.schedule)? {
        InstanceFile::Schedule(schedule) => schedule,
        other => {
            return Err(format!(
                "{} is a `{}` file, expected `schedule`",
                args.schedule.display(),
                other.tag()
            ))
        }
    };
    let verdict = match &instance {
        InstanceFile::KVisits(i) => verify_kvisits(i, &schedule),
        InstanceFile::VarKVisits(i) => verify_var_kvisits(i, &schedule),
        other => {
            return Err(format!(
                "verify expects a kvisits or varkvisits instance, found `{}`",
                other.tag()
            ))
        }
    };
    match verdict.violation() {
        None => {
            println!("ok");
            Ok(0)
        }
        Some(v) => {
            println!(
                "violation\t{}\tnode\t{}\toccurrence\t{}\tposition\t{}\tallowed_by\t{}",
                violation_slug(v.reason),
                v.node,
                v.occurrence_index,
                v.position,
                v.allowed_by
            );
            Ok(1)
        }
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<u8, CliError> {
    let instance = match parse_instance(&args.file)? {
        InstanceFile::KVisits(instance) => instance,
        other => return Err(format!("analyze expects a kvisits file, found `{}`", other.tag())),
    };
    let disc = instance.discretize();
    let density = instance.density();
    println!("n\t{}", instance.n());
    println!("k\t{}", instance.k());
    println!("deadlines\t{}", join(instance.deadlines()));
    println!("discretized\t{}", join(disc.values()));
    println!("all_positive\t{}", disc.all_positive());
    println!("density\t{}/{}", density.numer(), density.denom());
    println!("exceeds_five_sixths\t{}", instance.density_exceeds_five_sixths());
    if disc.all_positive() {
        let decomposition = disc.decompose().map_err(|e| e.to_string())?;
        println!("clusters\t{}", decomposition.clusters().len());
        for (i, cluster) in decomposition.clusters().iter().enumerate() {
            println!(
                "cluster\t{}\t{}\t{}\t{}",
                i + 1,
                disc.values()[cluster.start],
                disc.values()[cluster.end],
                cluster.size()
            );
        }
        println!("gaps\t{}", join(decomposition.gaps()));
    }
    Ok(0)
}

fn schedule_outcome(outcome: OracleOutcome, emit: bool) -> u8 {
    match outcome {
        OracleOutcome::Feasible(schedule) => {
            if emit {
                eprintln!("verdict\tfeasible");
                print!("{}", serialize_schedule(&schedule));
            } else {
                println!("verdict\tfeasible");
                println!("schedule\t{}", join(schedule.entries()));
            }
            0
        }
        OracleOutcome::Infeasible => {
            println!("verdict\tinfeasible");
            1
        }
        OracleOutcome::BudgetExhausted => {
            println!("verdict\tbudget-exhausted");
            3
        }
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, CliError> {
    let budget = resolve_budget(args.budget)?;
    let code = match parse_instance(&args.file)? {
        InstanceFile::KVisits(i) => schedule_outcome(oracle_kvisits(&i, budget), args.emit_schedule),
        InstanceFile::VarKVisits(i) => {
            schedule_outcome(oracle_var_kvisits(&i, budget), args.emit_schedule)
        }
        InstanceFile::Pm(i) => match oracle_pm(&i, budget) {
            PmOracleOutcome::Feasible(matching) => {
                println!("verdict\tfeasible");
                if args.emit_schedule {
                    for t in &matching.triples {
                        println!(
                            "triple\t{}\t{}\t{}",
                            i.deadlines()[t.d_index],
                            i.positions()[t.a_index],
                            i.targets()[t.t_index]
                        );
                    }
                }
                0
            }
            PmOracleOutcome::Infeasible => {
                println!("verdict\tinfeasible");
                1
            }
            PmOracleOutcome::BudgetExhausted => {
                println!("verdict\tbudget-exhausted");
                3
            }
        },
        InstanceFile::Rn3dm(i) => match oracle_rn3dm(&i, budget) {
            Rn3dmOracleOutcome::Feasible(matching) => {
                println!("verdict\tfeasible");
                if args.emit_schedule {
                    for &(a_index, b, c) in &matching.triples {
                        println!("triple\t{}\t{}\t{}", i.a()[a_index], b, c);
                    }
                }
                0
            }
            Rn3dmOracleOutcome::Infeasible => {
                println!("verdict\tinfeasible");
                1
            }
            Rn3dmOracleOutcome::BudgetExhausted => {
                println!("verdict\tbudget-exhausted");
                3
            }
        },
        InstanceFile::In3dm(i) => match oracle_in3dm(&i, budget) {
            In3dmOracleOutcome::Feasible(matching) => {
                println!("verdict\tfeasible");
                if args.emit_schedule {
                    for &(a_index, b, t_index) in &matching.triples {
                        println!("triple\t{}\t{}\t{}", i.a()[a_index], b, i.t()[t_index]);
                    }
                }
                0
            }
            In3dmOracleOutcome::Infeasible => {
                println!("verdict\tinfeasible");
                1
            }
            In3dmOracleOutcome::BudgetExhausted => {
                println!("verdict\tbudget-exhausted");
                3
            }
        },
        other => return Err(format!("oracle cannot decide `{}` files", other.tag())),
    };
    Ok(code)
}

/// What the reduction pipeline carries between stages.
enum Artifact {
    Rn3dm(kvisits::reductions::Rn3dmInstance),
    In3dm(kvisits::reductions::In3dmInstance),
    Pm(kvisits::PositionMatchingInstance),
    Kvisits(KVisitsInstance),
}

fn cmd_reduce(args: ReduceArgs) -> Result<u8, CliError> {
    let (entry, mut artifact) = match parse_instance(&args.file)? {
        InstanceFile::Rn3dm(i) => (Stage::Rn3dm, Artifact::Rn3dm(i)),
        InstanceFile::In3dm(i) => (Stage::In3dm, Artifact::In3dm(i)),
        InstanceFile::Pm(i) => (Stage::Pm, Artifact::Pm(i)),
        InstanceFile::KVisits(i) => (Stage::Kvisits, Artifact::Kvisits(i)),
        other => return Err(format!("no reduction starts from `{}` files", other.tag())),
    };
    if let Some(from) = args.from {
        if from != entry {
            return Err(format!(
                "--from {} does not match the input, which is at stage {}",
                from.name(),
                entry.name()
            ));
        }
    }
    if args.to.order() <= entry.order() {
        return Err(format!(
            "--to {} is not downstream of the input stage {}",
            args.to.name(),
            entry.name()
        ));
    }
    if args.k_target < 2 {
        return Err("--k-target must be at least 2".into());
    }
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| format!("cannot create {}: {e}", args.out_dir.display()))?;

    let mut current = entry;
    while current != args.to {
        let next = match current {
            Stage::Rn3dm => Stage::In3dm,
            Stage::In3dm => Stage::In3dmNormalized,
            Stage::In3dmNormalized => Stage::Pm,
            Stage::Pm => Stage::PmShifted,
            Stage::PmShifted => Stage::Kvisits,
            Stage::Kvisits => args.to,
            Stage::Varkvisits | Stage::Tpws => unreachable!("endpoints have no successor"),
        };
        let (text, filename, produced) = match (&artifact, next) {
            (Artifact::Rn3dm(i), Stage::In3dm) => {
                if rn3dm_trivially_infeasible(i) {
                    println!("resolved\trn3dm\tinfeasible");
                    return Ok(1);
                }
                let out = rn3dm_to_in3dm(i).map_err(|e| e.to_string())?;
                (serialize_in3dm(&out), "01_in3dm.txt", Artifact::In3dm(out))
            }
            (Artifact::In3dm(i), Stage::In3dmNormalized) => {
                match in3dm_normalize(i).map_err(|e| e.to_string())? {
                    NormalizeOutcome::Normalized(out) => {
                        (serialize_in3dm(&out), "02_in3dm_normalized.txt", Artifact::In3dm(out))
                    }
                    NormalizeOutcome::TrivialYes => {
                        println!("resolved\tin3dm-normalized\tfeasible");
                        return Ok(0);
                    }
                    NormalizeOutcome::TrivialNo => {
                        println!("resolved\tin3dm-normalized\tinfeasible");
                        return Ok(1);
                    }
                }
            }
            (Artifact::In3dm(i), Stage::Pm) => {
                let out = in3dm_to_pm(i).map_err(|e| e.to_string())?;
                (serialize_pm(&out), "03_pm.txt", Artifact::Pm(out))
            }
            (Artifact::Pm(i), Stage::PmShifted) => {
                // Shift far enough that every target clears every position,
                // which the scheduling encoding requires.
                let last_position = *i.positions().last().expect("instances are non-empty");
                let first_target = *i.targets().first().expect("instances are non-empty");
                let c = last_position.max(last_position + 1 - first_target);
                let out = pm_shift(i, c);
                (serialize_pm(&out), "04_pm_shifted.txt", Artifact::Pm(out))
            }
            (Artifact::Pm(i), Stage::Kvisits) => match pm_to_two_visits(i).map_err(|e| e.to_string())? {
                PmToTwoVisitsOutcome::Reduced(out) => {
                    (serialize_kvisits(&out), "05_kvisits.txt", Artifact::Kvisits(out))
                }
                PmToTwoVisitsOutcome::TrivialNo => {
                    println!("resolved\tkvisits\tinfeasible");
                    return Ok(1);
                }
            },
            (Artifact::Kvisits(i), Stage::Varkvisits) => {
                if i.k() != 2 {
                    return Err(format!("the kvisits stage must have k = 2, found k = {}", i.k()));
                }
                let out = two_visits_to_var_k(i, args.k_target);
                (serialize_var_kvisits(&out), "06_varkvisits.txt", Artifact::Kvisits(i.clone()))
            }
            (Artifact::Kvisits(i), Stage::Tpws) => {
                if i.k() != 2 {
                    return Err(format!("the kvisits stage must have k = 2, found k = {}", i.k()));
                }
                let out = two_visits_to_threshold_pws(i);
                (serialize_tpws(&out), "06_tpws.txt", Artifact::Kvisits(i.clone()))
            }
            _ => unreachable!("stage transitions follow the pipeline order"),
        };
        let path = args.out_dir.join(filename);
        write_file(&path, &text)?;
        println!("stage\t{}\t{}", next.name(), path.display());
        artifact = produced;
        current = next;
    }
    Ok(0)
}

fn oracle_label(feasible: Option<bool>) -> &'static str {
    match feasible {
        Some(true) => "feasible",
        Some(false) => "infeasible",
        None => "budget-exhausted",
    }
}

fn cmd_gen(args: GenArgs) -> Result<u8, CliError> {
    if args.count == 0 {
        return Err("--count must be at least 1".into());
    }
    if args.n == 0 {
        return Err("--n must be at least 1".into());
    }
    if args.k.is_some() && args.family != Family::Kvisits {
        return Err("--k only applies to --family kvisits".into());
    }
    let k = args.k.unwrap_or(2);
    if k == 0 {
        return Err("--k must be at least 1".into());
    }
    let cap = 2 * args.n as i64;
    let max_deadline = args.max_deadline.unwrap_or(cap);
    if max_deadline < 1 {
        return Err("--max-deadline must be at least 1".into());
    }
    if args.family == Family::Kvisits && max_deadline > cap && !args.allow_oversize {
        return Err(format!(
            "--max-deadline {max_deadline} exceeds 2n = {cap}; pass --allow-oversize to sample past the trimming threshold"
        ));
    }
    if args.count > 1 && args.out_dir.is_none() {
        return Err("--count greater than 1 requires --out-dir".into());
    }
    let budget = resolve_budget(args.budget)?;
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    }
    configure_jobs(args.jobs)?;

    let family = args.family;
    let n = args.n;
    let seed = args.seed;
    let label_requested = args.label_with_oracle;
    let make = move |index: usize| -> (String, &'static str) {
        // One independent stream per instance: results do not depend on
        // --jobs or on how many instances precede this one.
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, index as u64, 0));
        match family {
            Family::Kvisits => {
                let instance = gen_kvisits(n, k, max_deadline, &mut rng);
                let label = if label_requested {
                    oracle_label(match oracle_kvisits(&instance, budget) {
                        OracleOutcome::Feasible(_) => Some(true),
                        OracleOutcome::Infeasible => Some(false),
                        OracleOutcome::BudgetExhausted => None,
                    })
                } else {
                    "-"
                };
                (serialize_kvisits(&instance), label)
            }
            Family::Pm => {
                let instance = gen_pm(n, max_deadline, &mut rng);
                let label = if label_requested {
                    oracle_label(match oracle_pm(&instance, budget) {
                        PmOracleOutcome::Feasible(_) => Some(true),
                        PmOracleOutcome::Infeasible => Some(false),
                        PmOracleOutcome::BudgetExhausted => None,
                    })
                } else {
                    "-"
                };
                (serialize_pm(&instance), label)
            }
            Family::Rn3dm => {
                let instance = gen_rn3dm_candidate(n, max_deadline, &mut rng);
                let label = if label_requested {
                    oracle_label(match oracle_rn3dm(&instance, budget) {
                        Rn3dmOracleOutcome::Feasible(_) => Some(true),
                        Rn3dmOracleOutcome::Infeasible => Some(false),
                        Rn3dmOracleOutcome::BudgetExhausted => None,
                    })
                } else {
                    "-"
                };
                (serialize_rn3dm(&instance), label)
            }
        }
    };

    let rows: Vec<(String, &'static str)> = if args.jobs.is_some() {
        (0..args.count).into_par_iter().map(make).collect()
    } else {
        (0..args.count).map(make).collect()
    };

    match &args.out_dir {
        Some(dir) => {
            for (index, (text, label)) in rows.iter().enumerate() {
                let filename = format!("{}_s{}_{:04}.txt", family.name(), seed, index);
                write_file(&dir.join(&filename), text)?;
                println!("instance\t{index}\t{filename}\t{}\t{n}\t{label}", family.name());
            }
        }
        None => {
            let (text, label) = &rows[0];
            if *label != "-" {
                println!("# label {label}");
            }
            print!("{text}");
        }
    }
    Ok(0)
}

/// SplitMix64-style mixing so per-instance streams never overlap.
fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ b.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn cmd_bench(args: BenchArgs) -> Result<u8, CliError> {
    configure_jobs(args.jobs)?;
    let budget = resolve_budget(args.budget)?;
    match args.suite {
        Suite::OracleAgreement => bench_oracle_agreement(&args, budget),
        Suite::DistinctScaling => bench_distinct_scaling(&args),
        Suite::ClusterFpt => bench_cluster_fpt(&args),
    }
}

/// Solves random 2-visit instances with both the polynomial pipeline and the
/// exhaustive oracle and reports agreement counts with per-side timings.
fn bench_oracle_agreement(args: &BenchArgs, budget: SearchBudget) -> Result<u8, CliError> {
    let max_n = args.max_n.unwrap_or(6).max(2);
    let count = args.count.unwrap_or(200).max(1);
    let parallel = args.jobs.is_some();
    let mut all_agree = true;
    for n in 2..=max_n {
        let instances: Vec<KVisitsInstance> = (0..count)
            .map(|i| {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(derive_seed(args.seed, n as u64, i as u64));
                gen_kvisits(n, 2, 2 * n as i64, &mut rng)
            })
            .collect();

        let solve_one = |instance: &KVisitsInstance| {
            solve_two_visits(instance).expect("pipeline invariants hold").is_feasible()
        };
        let started = Instant::now();
        let solver_verdicts: Vec<bool> = if parallel {
            instances.par_iter().map(solve_one).collect()
        } else {
            instances.iter().map(solve_one).collect()
        };
        let solver_ms = started.elapsed().as_secs_f64() * 1e3;

        let oracle_one = |instance: &KVisitsInstance| match oracle_kvisits(instance, budget) {
            OracleOutcome::Feasible(_) => Some(true),
            OracleOutcome::Infeasible => Some(false),
            OracleOutcome::BudgetExhausted => None,
        };
        let started = Instant::now();
        let oracle_verdicts: Vec<Option<bool>> = if parallel {
            instances.par_iter().map(oracle_one).collect()
        } else {
            instances.iter().map(oracle_one).collect()
        };
        let oracle_ms = started.elapsed().as_secs_f64() * 1e3;

        let decided = oracle_verdicts.iter().filter(|v| v.is_some()).count();
        let agreements = solver_verdicts
            .iter()
            .zip(&oracle_verdicts)
            .filter(|(s, o)| **o == Some(**s))
            .count();
        all_agree &= agreements == decided;
        println!(
            "oracle-agreement\t{n}\t{count}\t{decided}\t{agreements}\t{solver_ms:.1}\t{oracle_ms:.1}"
        );
    }
    println!("agreement\t{}", if all_agree { "exact" } else { "MISMATCH" });
    Ok(if all_agree { 0 } else { 1 })
}

/// Times the 2-visit solver on all-distinct instances of doubling size; the
/// last column is the time ratio against the previous row.
fn bench_distinct_scaling(args: &BenchArgs) -> Result<u8, CliError> {
    let top = args.max_n.unwrap_or(1_000_000).max(8);
    let sizes = [top / 8, top / 4, top / 2, top];
    let mut previous: Option<f64> = None;
    for (index, &n) in sizes.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(args.seed, index as u64, 1));
        let instance = gen_distinct_kvisits(n, 2, &mut rng);
        let started = Instant::now();
        let result = solve_two_visits(&instance).map_err(|e| e.to_string())?;
        let ms = started.elapsed().as_secs_f64() * 1e3;
        let ratio = match previous {
            Some(p) if p > 0.0 => format!("{:.2}", ms / p),
            _ => "-".to_string(),
        };
        previous = Some(ms);
        println!(
            "distinct-scaling\t{n}\t{ms:.1}\t{ratio}\t{}",
            if result.is_feasible() { "feasible" } else { "infeasible" }
        );
    }
    Ok(0)
}

/// Times the exact cluster matcher on single-cluster instances whose number
/// of distinct deadline values grows with the cluster size (each value twice,
/// which is the shape the backtracking search branches over).
fn bench_cluster_fpt(args: &BenchArgs) -> Result<u8, CliError> {
    let top = args.max_n.unwrap_or(16).clamp(6, 26);
    let mut size = 6;
    while size <= top {
        let pairs = size / 2;
        let mut deadlines = Vec::with_capacity(size);
        for p in 0..pairs {
            let value = 2 * (p as i64) + 4;
            deadlines.push(value);
            deadlines.push(value);
        }
        let instance =
            KVisitsInstance::new(deadlines, 2).expect("constructed deadlines are positive");
        let started = Instant::now();
        let result = solve_two_visits(&instance).map_err(|e| e.to_string())?;
        let ms = started.elapsed().as_secs_f64() * 1e3;
        println!(
            "cluster-fpt\t{size}\t{ms:.3}\t{}",
            if result.is_feasible() { "feasible" } else { "infeasible" }
        );
        size += 2;
    }
    Ok(0)
}
