use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use groundeq::gen::run_gen;
use groundeq::oracle::{bounded_bfs, trivial_vp, BfsOutcome};
use groundeq::problem::{parse_problem, ProblemFile};
use groundeq::trace::{render_gen_trace, render_vp_trace};
use groundeq::vp::{run_vp, MatchSides};
use groundeq::Verdict;

#[derive(Parser)]
#[command(name = "groundeq", version, about = "Semi-decides equivalence of two ground terms under a term equation system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a procedure on a problem file
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Problem file: `sig`, `eq`, and `pair` lines
    file: PathBuf,

    #[arg(long, value_enum, default_value_t = Procedure::General)]
    procedure: Procedure,

    /// Maximum number of steps (must be at least 1)
    #[arg(long, default_value_t = 10)]
    max_steps: usize,

    /// Which equation sides are matched by the vp procedure
    #[arg(long, value_enum, default_value_t = Sides::Both)]
    sides: Sides,

    /// Replace each grown system by an equivalent reduced rule system
    #[arg(long)]
    reduce: bool,

    /// Print per-step trace blocks to stdout
    #[arg(long)]
    trace: bool,

    /// Search depth for the bfs procedure
    #[arg(long, default_value_t = 8)]
    depth: usize,

    /// Height bound for instantiating extra variables in the bfs procedure
    #[arg(long, default_value_t = 2)]
    hbound: usize,

    /// Instantiation budget for the general procedure and visit cap for bfs
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Procedure {
    Vp,
    General,
    TrivialVp,
    Bfs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sides {
    Both,
    LhsOnly,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    match run(&args) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
    }
}

fn verdict_exit(verdict: Verdict) -> ExitCode {
    match verdict {
        Verdict::Yes(_) => ExitCode::from(0),
        Verdict::No(_) => ExitCode::from(1),
        Verdict::Exhausted(_) => ExitCode::from(2),
    }
}

fn emit_trace(args: &RunArgs, problem: &ProblemFile, text: &str) -> Result<(), String> {
    if args.trace {
        print!("{text}");
    }
    if let Ok(dir) = std::env::var("GROUNDEQ_TRACE_DIR") {
        let stem = args
            .file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "problem".to_string());
        let path = PathBuf::from(dir).join(format!("{stem}.trace"));
        let header = groundeq::problem::print_problem(problem);
        std::fs::write(&path, format!("{header}\n{text}"))
            .map_err(|e| format!("cannot write trace to {}: {e}", path.display()))?;
    }
    Ok(())
}

fn run(args: &RunArgs) -> Result<ExitCode, String> {
    if args.max_steps == 0 {
        return Err("--max-steps must be at least 1".to_string());
    }
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| format!("cannot read {}: {e}", args.file.display()))?;
    let problem = parse_problem(&text).map_err(|e| e.to_string())?;
    let tes = &problem.tes;
    let (p, q) = (&problem.p, &problem.q);
    let sides = match args.sides {
        Sides::Both => MatchSides::Both,
        Sides::LhsOnly => MatchSides::LhsOnly,
    };

    match args.procedure {
        Procedure::Vp => {
            let (verdict, trace) = run_vp(tes, p, q, args.max_steps, sides, args.reduce)
                .map_err(|e| e.to_string())?;
            emit_trace(args, &problem, &render_vp_trace(&problem.signature, &trace))?;
            println!("{verdict}");
            Ok(verdict_exit(verdict))
        }
        Procedure::General => {
            let (verdict, trace) = run_gen(tes, p, q, args.max_steps, args.reduce, args.budget);
            emit_trace(args, &problem, &render_gen_trace(&problem.signature, &trace))?;
            println!("{verdict}");
            Ok(verdict_exit(verdict))
        }
        Procedure::TrivialVp => {
            let verdict = trivial_vp(tes, p, q, args.max_steps).map_err(|e| e.to_string())?;
            println!("{verdict}");
            Ok(verdict_exit(verdict))
        }
        Procedure::Bfs => match bounded_bfs(tes, p, q, args.depth, args.hbound, args.budget) {
            BfsOutcome::Connected(chain) => {
                let sig = &problem.signature;
                println!("yes (chain length {})", chain.steps.len());
                if args.trace {
                    for (j, t) in chain.terms.iter().enumerate() {
                        if j > 0 {
                            let (idx, dir) = chain.steps[j - 1];
                            println!("  {dir} (eq {})", idx + 1);
                        }
                        println!("{}", t.display(sig));
                    }
                }
                Ok(ExitCode::from(0))
            }
            BfsOutcome::Unknown => {
                println!("unknown (depth {})", args.depth);
                Ok(ExitCode::from(2))
            }
        },
    }
}
