use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pbh_scenarios::builtins::{self, BUILTINS};
use pbh_scenarios::run::parse_assignment;
use pbh_scenarios::{acceptance, Overrides, Result, Scenario, ScenarioError};

#[derive(Parser)]
#[command(
    name = "pbh",
    version,
    about = "Numerical checks for p-biharmonic maps and submanifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in scenarios.
    Builtin {
        #[command(subcommand)]
        action: BuiltinAction,
    },
    /// Run every check of a scenario at every sample point.
    Run {
        /// Scenario file, or `builtin:<name>`.
        scenario: String,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Run a scenario over evenly spaced values of one parameter.
    Sweep {
        /// Scenario file, or `builtin:<name>`.
        scenario: String,
        #[arg(long)]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Run the acceptance suite and print one line per criterion.
    VerifyPaper,
}

#[derive(Subcommand)]
enum BuiltinAction {
    /// List the built-in scenarios.
    List,
    /// Print a built-in scenario as JSON.
    Show { name: String },
}

#[derive(clap::Args)]
struct RunOptions {
    /// Exponent p.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
    /// Tolerance for pass/fail.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Stop at the first singular point (exit status 3).
    #[arg(long)]
    strict: bool,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl RunOptions {
    fn overrides(&self) -> Result<Overrides> {
        Ok(Overrides {
            p: self.p,
            set: self
                .set
                .iter()
                .map(|s| parse_assignment(s))
                .collect::<Result<_>>()?,
            tolerance: self.tol,
            strict: self.strict,
        })
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| ScenarioError::Output(e.to_string()))
    }

    fn emit(
        &self,
        csv: impl FnOnce() -> Result<String>,
        json: impl FnOnce() -> String,
    ) -> Result<()> {
        let text = match self.format {
            Format::Csv => csv()?,
            Format::Json => json() + "\n",
        };
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| ScenarioError::Output(format!("{}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn load(arg: &str) -> Result<Scenario> {
    match arg.strip_prefix("builtin:") {
        Some(name) => builtins::builtin(name),
        None => Scenario::from_file(Path::new(arg)),
    }
}

/// Exit status: 0 all pass, 1 some check fails, 3 singularity under --strict.
fn execute(command: Command) -> Result<u8> {
    match command {
        Command::Builtin {
            action: BuiltinAction::List,
        } => {
            for b in BUILTINS {
                println!("{:<26} {}", b.syntax, b.summary);
            }
            Ok(0)
        }
        Command::Builtin {
            action: BuiltinAction::Show { name },
        } => {
            println!("{}", builtins::builtin(&name)?.to_json());
            Ok(0)
        }
        Command::Run { scenario, opts } => {
            let s = load(&scenario)?;
            let overrides = opts.overrides()?;
            let report = opts
                .pool()?
                .install(|| pbh_scenarios::run(&s, &overrides))?;
            opts.emit(|| report.to_csv(), || report.to_json())?;
            for c in &report.summary {
                eprintln!(
                    "{:<18} evaluations {:>4}  failures {:>4}  max residual {}",
                    c.check.name(),
                    c.evaluations,
                    c.failures,
                    c.max_residual.map_or("-".into(), |v| format!("{v:.3e}")),
                );
            }
            eprintln!("verdict: {:?}", report.verdict);
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Sweep {
            scenario,
            param,
            from,
            to,
            steps,
            opts,
        } => {
            let s = load(&scenario)?;
            let overrides = opts.overrides()?;
            let report = opts
                .pool()?
                .install(|| pbh_scenarios::sweep(&s, &overrides, &param, from, to, steps))?;
            opts.emit(|| report.to_csv(), || report.to_json())?;
            for c in &report.crossings {
                eprintln!(
                    "{} changes sign between {param} = {} and {}; interpolated zero at {}",
                    c.check.name(),
                    c.lower,
                    c.upper,
                    c.estimate
                );
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::VerifyPaper => {
            let mut all = true;
            for id in 1..=9 {
                let c = acceptance::criterion(id);
                println!("{c}");
                all &= c.pass;
            }
            Ok(if all { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
