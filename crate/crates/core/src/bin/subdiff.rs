use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use subdiff::cli::config::HistoryChoice;
use subdiff::cli::{convergence_study, parse_config, run_command, run_props, validate, RunConfig};

#[derive(Parser)]
#[command(name = "subdiff", version, about = "Quasilinear subdiffusion solver and verification harness")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Output directory (overrides the config file)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed (overrides the config file)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Memory-term backend (overrides the config file)
    #[arg(long, global = true, value_enum)]
    history: Option<History>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configured problem and write norms, snapshots and the report
    Run { config: PathBuf },
    /// Refinement study with observed orders
    Study {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Randomized property sweeps
    Props,
}

#[derive(Clone, Copy, ValueEnum)]
enum History {
    Direct,
    Compressed,
}

fn load(path: &PathBuf, args: &Args) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut c = parse_config(&text).map_err(|e| e.to_string())?;
    if let Some(out) = &args.out {
        c.output.dir = out.clone();
    }
    if let Some(seed) = args.seed {
        c.seed = seed;
    }
    if let Some(h) = args.history {
        c.solver.history = match h {
            History::Direct => HistoryChoice::Direct,
            History::Compressed => HistoryChoice::Compressed,
        };
    }
    let errs = validate(&c);
    if errs.is_empty() {
        Ok(c)
    } else {
        Err(format!("configuration error:\n{}", errs.join("\n")))
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = match &args.command {
        Command::Run { config } => load(config, &args).and_then(|c| {
            let report = run_command(&c).map_err(|e| e.to_string())?;
            for cert in &report.certificates {
                println!("{:<12} {}", cert.name, if cert.pass { "pass" } else { "FAIL" });
            }
            if let Some(f) = &report.summary.failure {
                eprintln!("run failed after {} steps: {f}", report.summary.completed_steps);
            }
            println!("wrote {}", c.output.dir.display());
            Ok(report.summary.pass)
        }),
        Command::Study { config, levels } => load(config, &args).and_then(|c| {
            let table = convergence_study(&c, *levels).map_err(|e| e.to_string())?;
            table.write(&c.output.dir).map_err(|e| e.to_string())?;
            print!("{}", table.to_csv());
            Ok(true)
        }),
        Command::Props => {
            let seed = args.seed.unwrap_or(0);
            run_props(seed).map_err(|e| e.to_string()).and_then(|r| {
                let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("out"));
                std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
                let json = serde_json::to_string_pretty(&r).expect("report serializes");
                std::fs::write(dir.join("props.json"), json).map_err(|e| e.to_string())?;
                for s in [&r.convexity, &r.comparison] {
                    println!("{:<12} {} cases, {} violations", s.name, s.cases, s.violations);
                }
                for t in &r.ml_bounds.tails {
                    println!("ml alpha={} c={:.6} monotone={} convex={}", t.alpha, t.constant, t.nonincreasing, t.convex);
                }
                Ok(r.pass)
            })
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
