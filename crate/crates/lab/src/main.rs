use bbm_lab::config::OUT_ENV;
use bbm_lab::{
    build_report, exit, run_experiment, write_outcome, Check, Experiment, ExperimentConfig, FileConfig, LabError,
    Overrides, Rule, MANIFEST,
};
use clap::{CommandFactory, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bbm-lab", version, about = "Seeded Monte Carlo experiments for critical branching Brownian motion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write samples, verdict and plot data.
    Run {
        /// Experiment name; see `bbm-lab list`.
        experiment: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicas: Option<usize>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
        /// Output root; results go to `<out>/<experiment>/`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// TOML file with any of the above plus a `[thresholds]` table.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Aggregate verdicts under a directory into report.md and report.csv.
    Report { dir: PathBuf },
    /// List experiments and the statements they check.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { experiment, seed, replicas, t, gamma, x, out, config } => {
            let flags = Overrides { experiment, seed, replicas, t, gamma, x, output_dir: out };
            run(config, flags)
        }
        Command::Report { dir } => report(&dir),
        Command::List => {
            list();
            Ok(exit::PASS)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, LabError::Config(_)) {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(config: Option<PathBuf>, flags: Overrides) -> Result<i32, LabError> {
    let file = match &config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let env_out = std::env::var_os(OUT_ENV).map(PathBuf::from);
    let cfg = ExperimentConfig::resolve(file, flags, env_out)?;
    let outcome = run_experiment(&cfg)?;
    let dir = cfg.experiment_dir();
    write_outcome(&outcome, &dir)?;
    for c in &outcome.checks {
        let mark = if c.pass { "ok  " } else { "FAIL" };
        println!("{mark} {:<40} {:>14.6e}  {}", c.name, c.observed, criterion(c));
    }
    let pass = outcome.pass();
    println!("{}: {} -> {}", cfg.experiment, if pass { "PASS" } else { "FAIL" }, dir.display());
    Ok(if pass { exit::PASS } else { exit::THRESHOLD_FAIL })
}

fn criterion(c: &Check) -> String {
    match c.rule {
        Rule::Below => format!("< {:e}", c.tolerance),
        Rule::Within => format!("{:e} ± {:e}", c.target, c.tolerance),
        Rule::AtMost => format!("≤ {:e} + {:e}", c.target, c.tolerance),
        Rule::Holds | Rule::Report => c.rule.symbol().to_string(),
    }
}

fn report(dir: &std::path::Path) -> Result<i32, LabError> {
    let report = build_report(dir)?;
    let markdown = report.to_markdown();
    print!("{markdown}");
    let md = dir.join("report.md");
    std::fs::write(&md, &markdown).map_err(|e| LabError::Io { path: md.clone(), source: e })?;
    let csv = dir.join("report.csv");
    std::fs::write(&csv, report.to_csv()?).map_err(|e| LabError::Io { path: csv.clone(), source: e })?;
    Ok(if report.pass() { exit::PASS } else { exit::THRESHOLD_FAIL })
}

fn list() {
    for e in Experiment::ALL {
        println!("{:<20} {}", e.name(), e.summary());
        for (statement, _) in MANIFEST.iter().filter(|(_, owner)| *owner == e) {
            println!("{:<20}   - {}", "", statement.title());
        }
    }
}
