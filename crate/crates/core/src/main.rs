use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qakns::config::{RunConfig, Setup};
use qakns::error::Error;
use qakns::suite::{run_suite, Injection};

#[derive(Parser)]
#[command(name = "qakns", version, about = "Exact verification of the q-deformed AKNS hierarchy")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Run the whole suite, or the checks selected with --check.
    Verify(Opts),
    /// Dressing solver checks.
    Dressing(Opts),
    /// Resolvent checks.
    Resolvent(Opts),
    /// Bilinear identity checks.
    Bilinear(Opts),
    /// τ-function checks.
    Tau(Opts),
    /// Run the built-in n = 2 example.
    Demo(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(clap::Args)]
struct Opts {
    /// JSON run configuration; built-in defaults when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Check name or prefix (repeatable), e.g. `hierarchy` or `core.power_additivity`.
    #[arg(long)]
    check: Vec<String>,
    /// Deliberate failure injection: `corrupt_dressing`.
    #[arg(long)]
    inject: Option<String>,
}

fn focus(verb: &Verb) -> (&Opts, &'static [&'static str]) {
    match verb {
        Verb::Verify(o) | Verb::Demo(o) => (o, &[]),
        Verb::Dressing(o) => (o, &["hierarchy.dressing", "hierarchy.resolvent_routes", "classical.dressing"]),
        Verb::Resolvent(o) => (
            o,
            &[
                "hierarchy.resolvent_residual",
                "hierarchy.resolvent_routes",
                "hierarchy.orthogonality",
                "hierarchy.partition",
                "classical.resolvent_residual",
            ],
        ),
        Verb::Bilinear(o) => (o, &["bilinear", "classical.bilinear", "classical.reconstruct"]),
        Verb::Tau(o) => (o, &["tau"]),
    }
}

fn setup(opts: &Opts) -> Result<Setup, Error> {
    match &opts.config {
        Some(path) => RunConfig::load(path)?.validate(),
        None => RunConfig::default().validate(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (opts, defaults) = focus(&cli.verb);
    let inject = match opts.inject.as_deref().map(str::parse::<Injection>) {
        None => None,
        Some(Ok(i)) => Some(i),
        Some(Err(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let setup = match setup(opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let selection: Option<Vec<String>> = if !opts.check.is_empty() {
        Some(opts.check.clone())
    } else if !defaults.is_empty() {
        Some(defaults.iter().map(|s| s.to_string()).collect())
    } else {
        None
    };
    let report = run_suite(&setup, selection.as_deref(), inject);
    match opts.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
