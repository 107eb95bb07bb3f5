use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polyma::harness::{self, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "polyma",
    version,
    about = "Monge-Ampere regularity experiments on convex polytopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for the solver (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bundled preset instead of a config file.
    #[arg(long)]
    preset: Option<String>,
    /// Directory receiving config.json, summary.json and one CSV per series.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace the grid ladder (or eigen mesh size) by this single value.
    #[arg(long)]
    grid_h: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a Dirichlet or truncated-cone problem and run its analyses.
    Solve(Common),
    /// Corner dichotomy analysis.
    AnalyzeCorner(Common),
    /// Edge expansion fit on a wedge.
    AnalyzeEdge(Common),
    /// Boundary-compatibility conditions on the skeleton.
    CheckConditions(Common),
    /// Cone cross-section eigenvalues.
    Eigen(Common),
    /// Barrier and profile constructions.
    Construct(Common),
    /// Lipschitz counterexample data.
    Counterexample(Common),
    /// Run a bundled preset.
    RunPreset(Common),
    /// List bundled presets.
    ListPresets,
}

fn load(c: &Common) -> polyma::Result<ExperimentConfig> {
    let mut cfg = match (&c.config, &c.preset) {
        (Some(p), None) => harness::read_config(p)?,
        (None, Some(n)) => harness::load_preset(n)?,
        _ => {
            return Err(polyma::Error::Config(
                "give exactly one of --config and --preset".into(),
            ))
        }
    };
    if let Some(h) = c.grid_h {
        cfg.experiment.override_grid(h);
    }
    Ok(cfg)
}

fn accepts(cmd: &Command, cfg: &ExperimentConfig) -> bool {
    let has = |name: &str| cfg.experiment.analyses().iter().any(|a| a.name() == name);
    match cmd {
        Command::Solve(_) => matches!(cfg.experiment.kind(), "dirichlet" | "truncated_cone"),
        Command::AnalyzeCorner(_) => has("corner"),
        Command::AnalyzeEdge(_) => has("edge"),
        Command::CheckConditions(_) => cfg.experiment.kind() == "conditions",
        Command::Eigen(_) => cfg.experiment.kind() == "eigen",
        Command::Construct(_) => cfg.experiment.kind() == "construction",
        Command::Counterexample(_) => cfg.experiment.kind() == "counterexample",
        Command::RunPreset(_) | Command::ListPresets => true,
    }
}

fn run(cli: &Cli) -> polyma::Result<bool> {
    let common = match &cli.command {
        Command::ListPresets => {
            for (name, text) in harness::PRESETS {
                let cfg = harness::parse_config(text)?;
                println!("{name:<28} {}", cfg.description);
            }
            return Ok(true);
        }
        Command::Solve(c)
        | Command::AnalyzeCorner(c)
        | Command::AnalyzeEdge(c)
        | Command::CheckConditions(c)
        | Command::Eigen(c)
        | Command::Construct(c)
        | Command::Counterexample(c)
        | Command::RunPreset(c) => c,
    };
    if matches!(cli.command, Command::RunPreset(_)) && common.preset.is_none() {
        return Err(polyma::Error::Config("run-preset needs --preset".into()));
    }
    let cfg = load(common)?;
    if !accepts(&cli.command, &cfg) {
        return Err(polyma::Error::Config(format!(
            "experiment '{}' of kind {} does not fit this subcommand",
            cfg.id,
            cfg.experiment.kind()
        )));
    }
    let doc = harness::run_experiment(&cfg)?;
    for v in &doc.verdicts {
        let value = v.value.map(|x| format!(" value={x:.6e}")).unwrap_or_default();
        println!(
            "[{}] {}{} {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.name,
            value,
            v.detail
        );
    }
    println!("{}: {} verdicts, {:.2} s", doc.id, doc.verdicts.len(), doc.seconds);
    if let Some(dir) = &common.out {
        for p in harness::write_result(&doc, dir)? {
            println!("wrote {}", p.display());
        }
    }
    Ok(doc.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
