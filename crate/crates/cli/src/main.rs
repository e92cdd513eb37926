use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mixdisp_cli::commands;
use mixdisp_cli::config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "mixdisp", version, about = "Mass-constrained minimization of the mixed-dispersion biharmonic NLS energy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; defaults apply to absent fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for multi-start and scans.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write SVG profiles of output fields.
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Minimize E on the mass sphere S(c).
    Minimize,
    /// Classify existence over a (sigma, c) grid.
    Scan,
    /// Gaussian or Bessel test-family tables and witness.
    Family,
    /// Bump-family convergence to m_I(c).
    MiCheck,
    /// Gagliardo-Nirenberg constant and, for sigma*N = 4, the critical mass.
    Gn,
    /// Fourier symmetrization of a dumped or random field.
    Symmetrize,
    /// Run the invariant suite.
    Validate,
}

fn run(cli: &Cli) -> anyhow::Result<i32> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let overrides = Overrides {
        out: cli.out.clone(),
        seed: cli.seed,
        svg: cli.svg,
    };
    let cfg = RunConfig::load(cli.config.as_deref())?.resolve(&overrides)?;
    match cli.command {
        Command::Minimize => commands::minimize(&cfg),
        Command::Scan => commands::scan_cmd(&cfg),
        Command::Family => commands::family(&cfg),
        Command::MiCheck => commands::mi_check(&cfg),
        Command::Gn => commands::gn(&cfg),
        Command::Symmetrize => commands::symmetrize(&cfg),
        Command::Validate => commands::validate_cmd(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { commands::EXIT_ERROR as u8 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_ERROR as u8)
        }
    }
}
