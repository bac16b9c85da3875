//! `key = value` run configuration.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::EngineError;
use crate::fitness::{Constraint, FitnessConfig};
use crate::rule_evo::RuleEvoConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictorSpec {
    Surrogate,
    Table { path: PathBuf, fallback: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed_smiles: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub rng_seed: u64,
    pub population_size: usize,
    pub generations: usize,
    pub elitism: f64,
    /// Rule draws per parent for the mutation offspring.
    pub mutation_attempts: usize,
    /// Chance that a parent also takes part in crossover.
    pub crossover_probability: f64,
    pub strategy_window: usize,
    pub rule_evo: RuleEvoConfig,
    pub fitness: FitnessConfig,
    /// Weight file the fitness weights came from, for the manifest.
    pub weights_file: Option<PathBuf>,
    pub predictor: PredictorSpec,
    pub reference_smiles: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub desk_scale: bool,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            seed_smiles: None,
            output_dir: PathBuf::from("out"),
            rng_seed: 0,
            population_size: 100,
            generations: 100,
            elitism: 0.1,
            mutation_attempts: 2,
            crossover_probability: 0.5,
            strategy_window: 5,
            rule_evo: RuleEvoConfig::default(),
            fitness: FitnessConfig::default(),
            weights_file: None,
            predictor: PredictorSpec::Surrogate,
            reference_smiles: None,
            registry: None,
            desk_scale: false,
        }
    }
}

fn config_err(line: usize, msg: impl Into<String>) -> EngineError {
    let msg = msg.into();
    EngineError::Config(if line == 0 {
        msg
    } else {
        format!("line {line}: {msg}")
    })
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, EngineError> {
    v.parse()
        .map_err(|_| config_err(line, format!("bad value for {key}: {v}")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool, EngineError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(config_err(line, format!("bad value for {key}: {v}"))),
    }
}

impl RunConfig {
    /// Switches to the small preset: 50 molecules, 20 generations, 20 rules.
    pub fn apply_desk_scale(&mut self) {
        self.desk_scale = true;
        self.population_size = 50;
        self.generations = 20;
        self.rule_evo.rule_pop_size = 20;
    }

    /// Parses a configuration. Relative paths are taken relative to `base`.
    pub fn parse(text: &str, base: &Path) -> Result<RunConfig, EngineError> {
        let mut cfg = RunConfig::default();
        let mut weights_text = String::new();
        let mut inline_weights = String::new();
        let path = |v: &str| base.join(v);
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_err(line, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "seed_smiles" => cfg.seed_smiles = Some(path(value)),
                "output_dir" => cfg.output_dir = path(value),
                "rng_seed" => cfg.rng_seed = parse_num(line, key, value)?,
                "population_size" => cfg.population_size = parse_num(line, key, value)?,
                "generations" => cfg.generations = parse_num(line, key, value)?,
                "elitism" => cfg.elitism = parse_num(line, key, value)?,
                "mutation_attempts" => cfg.mutation_attempts = parse_num(line, key, value)?,
                "crossover_probability" => cfg.crossover_probability = parse_num(line, key, value)?,
                "strategy_window" => cfg.strategy_window = parse_num(line, key, value)?,
                "rule_population_size" => cfg.rule_evo.rule_pop_size = parse_num(line, key, value)?,
                "rule_mutation_rate" => cfg.rule_evo.p_mutation = parse_num(line, key, value)?,
                "rule_crossover_rate" => cfg.rule_evo.p_crossover = parse_num(line, key, value)?,
                "rule_learning_rate" => cfg.rule_evo.alpha = parse_num(line, key, value)?,
                "rule_baseline_decay" => cfg.rule_evo.baseline_decay = parse_num(line, key, value)?,
                "rule_weight_noise" => cfg.rule_evo.noise_epsilon = parse_num(line, key, value)?,
                "weights" => {
                    let p = path(value);
                    weights_text = std::fs::read_to_string(&p).map_err(|e| {
                        config_err(line, format!("weights file {}: {e}", p.display()))
                    })?;
                    cfg.weights_file = Some(p);
                }
                "predictor" => {
                    cfg.predictor = match value.split_once(':') {
                        None if value == "surrogate" => PredictorSpec::Surrogate,
                        Some(("table", p)) => PredictorSpec::Table {
                            path: path(p.trim()),
                            fallback: false,
                        },
                        Some(("table_or_surrogate", p)) => PredictorSpec::Table {
                            path: path(p.trim()),
                            fallback: true,
                        },
                        _ => return Err(config_err(line, format!("unknown predictor {value}"))),
                    }
                }
                "reference_smiles" => cfg.reference_smiles = Some(path(value)),
                "registry" => cfg.registry = Some(path(value)),
                "desk_scale" => cfg.desk_scale = parse_bool(line, key, value)?,
                _ => match key.strip_prefix("weight.") {
                    Some(name) if Constraint::from_name(name).is_some() => {
                        inline_weights.push_str(&format!("{name}={value}\n"));
                    }
                    _ => return Err(config_err(line, format!("unknown key {key}"))),
                },
            }
        }
        if !weights_text.is_empty() || !inline_weights.is_empty() {
            let text = format!("{weights_text}\n{inline_weights}");
            cfg.fitness = FitnessConfig::from_weights_text(&text)
                .map_err(|e| config_err(0, format!("fitness weights: {e}")))?;
        }
        if cfg.desk_scale {
            cfg.apply_desk_scale();
        }
        Ok(cfg)
    }

    pub fn from_file(p: &Path) -> Result<RunConfig, EngineError> {
        let text = std::fs::read_to_string(p)
            .map_err(|e| config_err(0, format!("{}: {e}", p.display())))?;
        RunConfig::parse(&text, p.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.population_size < 2 {
            return Err(config_err(0, "population_size must be at least 2"));
        }
        if self.generations < 1 {
            return Err(config_err(0, "generations must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.elitism)
            || !(0.0..=1.0).contains(&self.crossover_probability)
        {
            return Err(config_err(
                0,
                "elitism and crossover_probability must lie in [0, 1]",
            ));
        }
        if self.strategy_window < 1 {
            return Err(config_err(0, "strategy_window must be at least 1"));
        }
        self.rule_evo
            .validate()
            .map_err(|e| config_err(0, e.to_string()))?;
        let mut files: Vec<&PathBuf> = Vec::new();
        files.extend(self.seed_smiles.iter());
        files.extend(self.reference_smiles.iter());
        files.extend(self.registry.iter());
        if let PredictorSpec::Table { path, .. } = &self.predictor {
            files.push(path);
        }
        for f in files {
            if !f.is_file() {
                return Err(config_err(0, format!("missing file {}", f.display())));
            }
        }
        Ok(())
    }

    /// `key = value` lines that parse back to this configuration, given the
    /// same working directory.
    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        if let Some(p) = &self.seed_smiles {
            out.push(format!("seed_smiles = {}", p.display()));
        }
        out.push(format!("output_dir = {}", self.output_dir.display()));
        out.push(format!("rng_seed = {}", self.rng_seed));
        out.push(format!("population_size = {}", self.population_size));
        out.push(format!("generations = {}", self.generations));
        out.push(format!("elitism = {}", self.elitism));
        out.push(format!("mutation_attempts = {}", self.mutation_attempts));
        out.push(format!(
            "crossover_probability = {}",
            self.crossover_probability
        ));
        out.push(format!("strategy_window = {}", self.strategy_window));
        let r = &self.rule_evo;
        out.push(format!("rule_population_size = {}", r.rule_pop_size));
        out.push(format!("rule_mutation_rate = {}", r.p_mutation));
        out.push(format!("rule_crossover_rate = {}", r.p_crossover));
        out.push(format!("rule_learning_rate = {}", r.alpha));
        out.push(format!("rule_baseline_decay = {}", r.baseline_decay));
        out.push(format!("rule_weight_noise = {}", r.noise_epsilon));
        for c in Constraint::ALL {
            out.push(format!("weight.{} = {}", c.name(), self.fitness.weight(c)));
        }
        out.push(match &self.predictor {
            PredictorSpec::Surrogate => "predictor = surrogate".to_string(),
            PredictorSpec::Table { path, fallback } => format!(
                "predictor = {}:{}",
                if *fallback {
                    "table_or_surrogate"
                } else {
                    "table"
                },
                path.display()
            ),
        });
        if let Some(p) = &self.reference_smiles {
            out.push(format!("reference_smiles = {}", p.display()));
        }
        if let Some(p) = &self.registry {
            out.push(format!("registry = {}", p.display()));
        }
        out.push(format!("desk_scale = {}", self.desk_scale));
        out.join("\n") + "\n"
    }
}
