use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dap_cli::commands::{self, CliError, CliResult, RunReport};
use dap_cli::config::{parse_t_range, RunConfig};
use dap_cli::output;

#[derive(Parser, Debug)]
#[command(name = "dap", version, about = "Solution counts, branches and degrees for a degenerate Neumann problem")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Configuration file (`section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in model used when no configuration file is given.
    #[arg(long, global = true, default_value = "pl11")]
    model: String,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Parameter value; overrides `t`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Sweep grid `lo:hi:step`; overrides the configured grid.
    #[arg(long = "t-range", global = true, allow_hyphen_values = true)]
    t_range: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Also write mesh, stiffness matrix and iteration traces.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate solutions at one value of t.
    Solve,
    /// Count solutions over a grid of t.
    Sweep,
    /// Trace the branch through the minimal solution.
    Branch {
        #[arg(long, allow_hyphen_values = true)]
        t_start: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        step: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t_stop: Option<f64>,
    },
    /// Bisect the upper critical parameter and compare with the fold.
    Bracket,
    /// Local indices and degree table at one value of t.
    Index,
    /// Run the invariant suite; exits with status 3 on any failure.
    Check,
    /// Manufactured-solution convergence rates.
    Mms {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alphas: Option<Vec<f64>>,
        #[arg(long, default_value_t = 2.0)]
        grading: f64,
        #[arg(long, value_delimiter = ',', default_value = "100,200,400,800")]
        n: Vec<usize>,
    },
}

fn load(g: &Global) -> CliResult<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::from_model(&g.model)?,
    };
    if let Some(t) = g.t {
        cfg.t = t;
    }
    if let Some(r) = &g.t_range {
        let (lo, hi, step) = parse_t_range(r).map_err(CliError::Usage)?;
        cfg.t_range = Some((lo, hi, step));
        cfg.t_values = None;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(j) = g.jobs {
        cfg.jobs = j;
    }
    if let Some(o) = &g.out {
        cfg.output_dir = o.clone();
    }
    cfg.solver.record_trace = g.verbose;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> CliResult<(RunReport, RunConfig)> {
    let cfg = load(&cli.global)?;
    let report = match &cli.command {
        Command::Solve => commands::cmd_solve(&cfg, cfg.t)?,
        Command::Sweep => commands::cmd_sweep(&cfg, &cfg.sweep_grid())?,
        Command::Branch { t_start, step, t_stop } => commands::cmd_branch(
            &cfg,
            t_start.unwrap_or(cfg.branch_t_start),
            step.unwrap_or(cfg.branch_step),
            t_stop.unwrap_or(cfg.branch_t_stop),
        )?,
        Command::Bracket => commands::cmd_bracket(&cfg)?,
        Command::Index => commands::cmd_index(&cfg, cfg.t)?,
        Command::Check => commands::cmd_check(&cfg)?,
        Command::Mms { alphas, grading, n } => {
            let alphas = alphas.clone().unwrap_or_else(|| vec![cfg.alpha]);
            commands::cmd_mms(&cfg, &alphas, *grading, n)?
        }
    };
    Ok((report, cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, cfg) = match run(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let spec = if cli.global.verbose { cfg.problem().ok() } else { None };
    if let Err(e) = output::write_report(&report, &cfg.output_dir, spec.as_ref()) {
        eprintln!("error: cannot write {}: {e}", cfg.output_dir.display());
        return ExitCode::from(1);
    }
    print!("{}", output::summary(&report));
    if report.all_checks_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
