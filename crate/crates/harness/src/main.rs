use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lpdde::Execution;
use lpdde_harness::config::{Kind, SuiteConfig};
use lpdde_harness::experiments::{discontinuity_report, run_discontinuity_demo, run_suite, Outcome};
use lpdde_harness::{exit, write_outputs};

#[derive(Parser)]
#[command(name = "lpdde", version, about = "Delay-equation experiments and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the `solve` experiments of a config and write trajectories.
    Solve(Common),
    /// Run every experiment of a config and check its certificates.
    Verify(Common),
    /// Discontinuity demonstration of the point-evaluation functional. Without
    /// `--config` a built-in cubic example is used.
    Demo(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "LPDDE_OUT_DIR", default_value = "out")]
    out: PathBuf,
    /// Overrides the seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Run without the thread pool.
    #[arg(long)]
    sequential: bool,
}

fn load(common: &Common, required: bool) -> Result<Option<SuiteConfig>, String> {
    let Some(path) = &common.config else {
        return if required {
            Err("--config is required".into())
        } else {
            Ok(None)
        };
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut cfg = SuiteConfig::parse(&text).map_err(|e| format!("{e:#}"))?;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(|e| format!("{e:#}"))?;
    Ok(Some(cfg))
}

fn builtin_demo() -> Result<Vec<Outcome>, String> {
    let nl = lpdde::Nonlinearity::cubic(1, 1.0).map_err(|e| e.to_string())?;
    let ns: Vec<u32> = (0..=10).map(|k| 1 << k).collect();
    let rows = run_discontinuity_demo(&nl, 1.0, 1.0, 2.0, &ns, &lpdde::QuadratureConfig::default())
        .map_err(|e| format!("{e:#}"))?;
    let (table, certificates) = discontinuity_report(&rows);
    Ok(vec![Outcome {
        name: "demo".into(),
        kind: Kind::Discontinuity,
        file: "demo.csv".into(),
        table,
        certificates,
    }])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, kinds): (&Common, Option<&[Kind]>) = match &cli.command {
        Command::Solve(c) => (c, Some(&[Kind::Solve])),
        Command::Verify(c) => (c, None),
        Command::Demo(c) => (c, Some(&[Kind::Discontinuity])),
    };
    if let Some(j) = common.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(exit::CONFIG_ERROR as u8);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .expect("thread pool set once");
    }
    let exec = if common.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let is_demo = matches!(cli.command, Command::Demo(_));
    let cfg = match load(common, !is_demo) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(exit::CONFIG_ERROR as u8);
        }
    };

    let mut failed_runs = false;
    let outcomes: Vec<Outcome> = match &cfg {
        None => match builtin_demo() {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(exit::CERTIFICATE_FAILED as u8);
            }
        },
        Some(cfg) => run_suite(cfg, kinds, exec)
            .into_iter()
            .filter_map(|r| match r {
                Ok(o) => Some(o),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    failed_runs = true;
                    None
                }
            })
            .collect(),
    };
    if outcomes.is_empty() && !failed_runs {
        return ExitCode::from(exit::OK as u8);
    }
    if let Err(e) = write_outputs(&common.out, &outcomes) {
        eprintln!("error writing {}: {e:#}", common.out.display());
        return ExitCode::from(exit::CERTIFICATE_FAILED as u8);
    }
    let mut all_passed = !failed_runs;
    for o in &outcomes {
        for c in &o.certificates {
            let status = if c.passed { "PASS" } else { "FAIL" };
            println!(
                "{status}  {:<24} {:<44} bound={:<12.4e} measured={:.4e}",
                o.name, c.claim, c.bound, c.measured
            );
            all_passed &= c.passed;
        }
    }
    ExitCode::from(if all_passed { exit::OK } else { exit::CERTIFICATE_FAILED } as u8)
}
