use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use molevo::engine::{read_smiles_file, run, EngineError, RunConfig};
use molevo::fitness::{
    score_molecule, score_vector, Constraint, FitnessConfig, Predictor, ScoringContext,
};
use molevo::molgraph::{check_validity, parse_smiles};

#[derive(Parser)]
#[command(
    name = "molevo",
    version,
    about = "Rule-driven evolutionary molecule design"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a molecule library from seed molecules.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed_smiles: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        rng_seed: Option<u64>,
        /// 50 molecules, 20 generations, 20 rules.
        #[arg(long)]
        desk_scale: bool,
    },
    /// Parse and check every SMILES line; exits 3 if any line is invalid.
    Validate {
        #[arg(long)]
        smiles: PathBuf,
    },
    /// Score molecules against each other with the given weights.
    Score {
        #[arg(long)]
        smiles: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
}

fn run_command(
    config: &Path,
    seed_smiles: Option<PathBuf>,
    out: Option<PathBuf>,
    rng_seed: Option<u64>,
    desk_scale: bool,
) -> Result<(), EngineError> {
    let mut cfg = RunConfig::from_file(config)?;
    if seed_smiles.is_some() {
        cfg.seed_smiles = seed_smiles;
    }
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    if let Some(seed) = rng_seed {
        cfg.rng_seed = seed;
    }
    if desk_scale {
        cfg.apply_desk_scale();
    }
    let result = run(&cfg)?;
    let last = result.metrics.last();
    eprintln!(
        "{} generations, {} molecules, best fitness {:.4}, output in {}",
        result.metrics.len(),
        result.population.len(),
        last.map_or(0.0, |m| m.max_fitness),
        cfg.output_dir.display()
    );
    Ok(())
}

fn validate_command(path: &Path) -> Result<bool, EngineError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| EngineError::Input(format!("{}: {e}", path.display())))?;
    let mut all_ok = true;
    for (k, line) in text.lines().enumerate() {
        let Some(token) = line.split_whitespace().next() else {
            continue;
        };
        if token.starts_with('#') {
            continue;
        }
        let status = match parse_smiles(token) {
            Err(e) => format!("error\t{e}"),
            Ok(m) => {
                let report = check_validity(&m);
                if report.valid {
                    format!("ok\t{}", m.canonical_smiles())
                } else {
                    let why: Vec<String> = report
                        .violations
                        .iter()
                        .map(|v| format!("atom {}: {}", v.atom, v.reason))
                        .collect();
                    format!("invalid\t{}", why.join("; "))
                }
            }
        };
        all_ok &= status.starts_with("ok");
        println!("{}\t{token}\t{status}", k + 1);
    }
    Ok(all_ok)
}

fn score_command(smiles: &Path, weights: Option<&Path>) -> Result<(), EngineError> {
    let cfg = match weights {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| EngineError::Config(format!("{}: {e}", p.display())))?;
            FitnessConfig::from_weights_text(&text)
                .map_err(|e| EngineError::Config(format!("{}: {e}", p.display())))?
        }
        None => FitnessConfig::default(),
    };
    let mols = read_smiles_file(smiles)?;
    let ctx = ScoringContext::new(mols.iter(), mols.iter(), Predictor::Surrogate);
    let mut header = vec!["smiles".to_string(), "fitness".to_string()];
    header.extend(Constraint::ALL.iter().map(|c| c.name().to_string()));
    println!("{}", header.join("\t"));
    for m in &mols {
        let sv = score_vector(m, &ctx, &cfg);
        let mut cols = vec![
            m.canonical_smiles().to_string(),
            format!("{:.6}", score_molecule(&sv, &cfg)),
        ];
        cols.extend(Constraint::ALL.iter().map(|&c| format!("{:.6}", sv.get(c))));
        println!("{}", cols.join("\t"));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seed_smiles,
            out,
            rng_seed,
            desk_scale,
        } => run_command(&config, seed_smiles, out, rng_seed, desk_scale).map(|_| true),
        Command::Validate { smiles } => validate_command(&smiles),
        Command::Score { smiles, weights } => {
            score_command(&smiles, weights.as_deref()).map(|_| true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
