//! The generation loop: rule proposal, offspring generation, scoring,
//! population update, rule acceptance and reward, metrics and artifacts.

mod config;
mod metrics;

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use config::{PredictorSpec, RunConfig};
pub use metrics::{GenerationMetrics, METRICS_HEADER};

use crate::descriptors::basic_descriptors;
use crate::fitness::{
    fingerprint, population_fitness, score_molecule, score_vector, score_vector_with_lineage,
    stereo_marks, Constraint, FitnessConfig, Predictor, ScoringContext,
};
use crate::mol_evo::{
    crossover_with_fallback, mutate_molecule, sample_indices, update_population, Heuristic, Member,
    Operator, Provenance, Strategy, StrategyStats, Trial, DIVERSITY_SAMPLE,
};
use crate::molgraph::{check_validity, parse_smiles, Molecule};
use crate::rule_evo::{
    accept_rule_generation, apply_rewards, init_rule_population, normalized_rewards, propose_rules,
    RulePopulation,
};
use crate::ruleset::{rules_to_json, Registry};

pub const DESK_SEEDS: &str = include_str!("../../data/seeds_desk.smi");

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("input: {0}")]
    Input(String),
    #[error("{path}: {msg}")]
    Output { path: PathBuf, msg: String },
}

impl EngineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            EngineError::Config(_) => 2,
            EngineError::Input(_) => 3,
            EngineError::Output { .. } => 1,
        }
    }
}

/// Main stream for sequential draws; every other purpose gets its own
/// stream of the same key.
fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn task_rng(seed: u64, generation: usize, task: usize) -> ChaCha8Rng {
    stream_rng(seed, ((generation as u64 + 1) << 32) | task as u64)
}

fn metrics_rng(seed: u64, generation: usize) -> ChaCha8Rng {
    stream_rng(seed, ((generation as u64 + 1) << 32) | u64::from(u32::MAX))
}

/// Reads one SMILES per line (first whitespace-separated token; blank and
/// `#` lines skipped). Every molecule must parse and pass validity.
pub fn read_smiles_text(text: &str, origin: &str) -> Result<Vec<Molecule>, EngineError> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let Some(token) = line.split_whitespace().next() else {
            continue;
        };
        if token.starts_with('#') {
            continue;
        }
        let m = parse_smiles(token)
            .map_err(|e| EngineError::Input(format!("{origin} line {}: {e}", k + 1)))?;
        let report = check_validity(&m);
        if !report.valid {
            let why: Vec<String> = report
                .violations
                .iter()
                .map(|v| format!("atom {}: {}", v.atom, v.reason))
                .collect();
            return Err(EngineError::Input(format!(
                "{origin} line {}: invalid molecule {token} ({})",
                k + 1,
                why.join("; ")
            )));
        }
        out.push(m);
    }
    Ok(out)
}

pub fn read_smiles_file(path: &Path) -> Result<Vec<Molecule>, EngineError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| EngineError::Input(format!("{}: {e}", path.display())))?;
    read_smiles_text(&text, &path.display().to_string())
}

/// Everything a run reads besides the configuration itself.
#[derive(Debug, Clone)]
pub struct RunInputs {
    pub seeds: Vec<Molecule>,
    /// Canonical SMILES of the novelty reference set; empty means the seeds.
    pub reference: HashSet<String>,
    pub registry: Registry,
    pub predictor: Predictor,
}

impl RunInputs {
    pub fn load(cfg: &RunConfig) -> Result<RunInputs, EngineError> {
        let seeds = match &cfg.seed_smiles {
            Some(p) => read_smiles_file(p)?,
            None => read_smiles_text(DESK_SEEDS, "bundled seeds")?,
        };
        if seeds.is_empty() {
            return Err(EngineError::Input("no seed molecules".into()));
        }
        let reference = match &cfg.reference_smiles {
            Some(p) => read_smiles_file(p)?
                .iter()
                .map(|m| m.canonical_smiles().to_string())
                .collect(),
            None => HashSet::new(),
        };
        let registry = match &cfg.registry {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| EngineError::Input(format!("{}: {e}", p.display())))?;
                Registry::from_json(&text)
                    .map_err(|e| EngineError::Input(format!("{}: {e}", p.display())))?
            }
            None => Registry::bundled(),
        };
        let predictor = match &cfg.predictor {
            PredictorSpec::Surrogate => Predictor::Surrogate,
            PredictorSpec::Table { path, fallback } => Predictor::table_from_file(path, *fallback)
                .map_err(|e| EngineError::Input(e.to_string()))?,
        };
        Ok(RunInputs {
            seeds,
            reference,
            registry,
            predictor,
        })
    }
}

/// One scored offspring, admitted or not.
#[derive(Debug, Clone, Serialize)]
pub struct ProvenanceRecord {
    pub smiles: String,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub fitness: f64,
    pub admitted: bool,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    /// Final population in rank order.
    pub population: Vec<Member>,
    pub rules: RulePopulation,
    pub metrics: Vec<GenerationMetrics>,
    pub provenance: Vec<ProvenanceRecord>,
    pub registry_version: u32,
    pub predictor: String,
}

fn sorted_seed_members(
    seeds: &[Molecule],
    ctx: &ScoringContext,
    cfg: &FitnessConfig,
) -> Vec<Member> {
    let mut seen = HashSet::new();
    let mut members: Vec<Member> = seeds
        .iter()
        .filter(|m| seen.insert(m.canonical_smiles().to_string()))
        .map(|m| {
            let sv = score_vector(m, ctx, cfg);
            Member::new(m.clone(), score_molecule(&sv, cfg), sv, Provenance::seed())
        })
        .collect();
    members.sort_by(crate::mol_evo::member_order);
    members
}

/// Index of the fitter of two members drawn from the population without
/// `exclude`; ties keep the first draw.
fn fitness_tournament(pop: &[Member], exclude: &[usize], rng: &mut impl Rng) -> Option<usize> {
    let pool: Vec<usize> = (0..pop.len()).filter(|i| !exclude.contains(i)).collect();
    if pool.is_empty() {
        return None;
    }
    let a = pool[rng.gen_range(0..pool.len())];
    let b = pool[rng.gen_range(0..pool.len())];
    Some(if pop[b].fitness > pop[a].fitness {
        b
    } else {
        a
    })
}

#[derive(Default)]
struct TaskOutput {
    children: Vec<Member>,
    trials: Vec<Trial>,
    /// (rule id, fitness) of the mutation child.
    rule_reward: Option<(u64, f64)>,
}

struct GenerationInput<'a> {
    cfg: &'a RunConfig,
    population: &'a [Member],
    rules: &'a RulePopulation,
    stats: &'a StrategyStats,
    ctx: &'a ScoringContext,
    seed_smiles: &'a HashSet<String>,
    generation: usize,
}

impl GenerationInput<'_> {
    fn scored(&self, mol: Molecule, parents: &[&Member], provenance: Provenance) -> Member {
        let marks = parents.iter().map(|p| stereo_marks(&p.mol)).max();
        let sv = score_vector_with_lineage(&mol, self.ctx, &self.cfg.fitness, marks);
        Member::new(mol, score_molecule(&sv, &self.cfg.fitness), sv, provenance)
    }

    fn provenance(
        &self,
        operator: Operator,
        parents: &[&Member],
        strategy: Option<Strategy>,
        heuristic: Option<Heuristic>,
        rule_id: Option<u64>,
    ) -> Provenance {
        Provenance {
            generation: self.generation,
            operator,
            strategy,
            heuristic,
            parents: parents.iter().map(|p| p.smiles.clone()).collect(),
            rule_id,
        }
    }

    /// Offspring of one population member: a rule mutation and, with the
    /// configured chance, a crossover with tournament-chosen partners.
    fn task(&self, t: usize) -> TaskOutput {
        let mut rng = task_rng(self.cfg.rng_seed, self.generation, t);
        let parent = &self.population[t];
        let mut out = TaskOutput::default();
        if let Some((child, rule_id)) = mutate_molecule(
            &parent.mol,
            &self.rules.rules,
            self.cfg.mutation_attempts,
            &mut rng,
        ) {
            if !self.seed_smiles.contains(child.canonical_smiles()) {
                let prov =
                    self.provenance(Operator::Mutation, &[parent], None, None, Some(rule_id));
                let member = self.scored(child, &[parent], prov);
                out.rule_reward = Some((rule_id, member.fitness));
                out.children.push(member);
            }
        }
        if rng.gen::<f64>() >= self.cfg.crossover_probability {
            return out;
        }
        let Some(partner) = fitness_tournament(self.population, &[t], &mut rng) else {
            return out;
        };
        let mut chosen = vec![t, partner];
        if let Some(third) = fitness_tournament(self.population, &chosen, &mut rng) {
            chosen.push(third);
        }
        let parents: Vec<&Member> = chosen.iter().map(|&i| &self.population[i]).collect();
        let mols: Vec<Molecule> = parents.iter().map(|p| p.mol.clone()).collect();
        let fits: Vec<f64> = parents.iter().map(|p| p.fitness).collect();
        let outcome = crossover_with_fallback(&mols, &fits, self.stats, &mut rng);
        out.trials = outcome.trials;
        if let Some(strategy) = outcome.strategy {
            if !self
                .seed_smiles
                .contains(outcome.molecule.canonical_smiles())
            {
                let used = &parents[..strategy.arity().min(parents.len())];
                let prov = self.provenance(
                    Operator::Crossover,
                    used,
                    Some(strategy),
                    outcome.heuristic,
                    None,
                );
                out.children.push(self.scored(outcome.molecule, used, prov));
            }
        }
        out
    }
}

fn mean_fitness(pop: &[Member]) -> f64 {
    let f: Vec<f64> = pop.iter().map(|m| m.fitness).collect();
    population_fitness(&f).unwrap_or(0.0)
}

/// Runs the configured number of generations in memory.
pub fn run_evolution(cfg: &RunConfig, inputs: &RunInputs) -> Result<RunResult, EngineError> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.rng_seed, 0);
    let fitness_cfg = &cfg.fitness;

    let seed_ctx = {
        let idx = sample_indices(inputs.seeds.len(), DIVERSITY_SAMPLE, &mut rng);
        ScoringContext::new(
            idx.iter().map(|&i| &inputs.seeds[i]),
            inputs.seeds.iter(),
            inputs.predictor.clone(),
        )
    };
    let mut population = sorted_seed_members(&inputs.seeds, &seed_ctx, fitness_cfg);
    population.truncate(cfg.population_size);
    let seed_smiles: HashSet<String> = population.iter().map(|m| m.smiles.clone()).collect();
    let initial_fps: Vec<_> = population.iter().map(|m| fingerprint(&m.mol)).collect();
    let reference: &HashSet<String> = if inputs.reference.is_empty() {
        &seed_smiles
    } else {
        &inputs.reference
    };

    let mut provenance: Vec<ProvenanceRecord> = population
        .iter()
        .map(|m| ProvenanceRecord {
            smiles: m.smiles.clone(),
            provenance: m.provenance.clone(),
            fitness: m.fitness,
            admitted: true,
        })
        .collect();
    let mut rules = init_rule_population(&cfg.rule_evo, &inputs.registry, &mut rng)
        .map_err(|e| EngineError::Config(e.to_string()))?;
    let mut stats = StrategyStats::new(cfg.strategy_window);
    let mut metrics = Vec::with_capacity(cfg.generations);

    for generation in 1..=cfg.generations {
        let idx = sample_indices(population.len(), DIVERSITY_SAMPLE, &mut rng);
        let ctx = ScoringContext::new(
            idx.iter().map(|&i| &population[i].mol),
            inputs.seeds.iter(),
            inputs.predictor.clone(),
        );
        let candidate = propose_rules(&rules, &cfg.rule_evo, &inputs.registry, &mut rng);

        let input = GenerationInput {
            cfg,
            population: &population,
            rules: &candidate,
            stats: &stats,
            ctx: &ctx,
            seed_smiles: &seed_smiles,
            generation,
        };
        let outputs: Vec<TaskOutput> = (0..population.len())
            .into_par_iter()
            .map(|t| input.task(t))
            .collect();

        let mut offspring = Vec::new();
        let mut rewards = Vec::new();
        for out in outputs {
            stats.record(&out.trials);
            rewards.extend(out.rule_reward);
            offspring.extend(out.children);
        }
        stats.close_generation();

        let previous_mean = mean_fitness(&population);
        let next = update_population(&population, &offspring, cfg.population_size, cfg.elitism);
        for child in &offspring {
            provenance.push(ProvenanceRecord {
                smiles: child.smiles.clone(),
                provenance: child.provenance.clone(),
                fitness: child.fitness,
                admitted: next
                    .iter()
                    .any(|m| m.smiles == child.smiles && m.provenance == child.provenance),
            });
        }

        let old_f: Vec<f64> = population.iter().map(|m| m.fitness).collect();
        let new_f: Vec<f64> = next.iter().map(|m| m.fitness).collect();
        let (adopted, accepted) = accept_rule_generation(rules, candidate, &old_f, &new_f)
            .map_err(|e| EngineError::Config(e.to_string()))?;
        rules = adopted;
        apply_rewards(
            &mut rules,
            &normalized_rewards(&rewards),
            &cfg.rule_evo,
            &mut rng,
        );
        rules.generation = generation;

        population = next;
        let mut mrng = metrics_rng(cfg.rng_seed, generation);
        metrics.push(GenerationMetrics::measure(
            generation,
            &population,
            previous_mean,
            offspring.len(),
            &initial_fps,
            &seed_smiles,
            reference,
            accepted,
            &stats,
            &mut mrng,
        ));
    }

    Ok(RunResult {
        population,
        rules,
        metrics,
        provenance,
        registry_version: inputs.registry.version,
        predictor: inputs.predictor.describe(),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), EngineError> {
    std::fs::write(path, contents).map_err(|e| EngineError::Output {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

/// `smiles<TAB>fitness<TAB>qed<TAB>logp`, one line per member, rank order.
pub fn library_text(population: &[Member]) -> String {
    let mut out = String::new();
    for m in population {
        let logp = basic_descriptors(&m.mol).logp;
        out.push_str(&format!(
            "{}\t{:.6}\t{:.6}\t{:.6}\n",
            m.smiles,
            m.fitness,
            m.scores.get(Constraint::DrugLikenessExtended),
            logp
        ));
    }
    out
}

pub fn metrics_text(rows: &[GenerationMetrics]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Manifest<'a> {
    name: &'static str,
    version: &'static str,
    rng_seed: u64,
    config: serde_json::Map<String, serde_json::Value>,
    predictor: &'a str,
    registry_version: u32,
    generations_run: usize,
    final_population: usize,
    notes: Vec<&'static str>,
}

/// Writes library.smi, rules_final.json, provenance.jsonl, metrics.csv and
/// run_manifest.json into `dir`.
pub fn emit_outputs(cfg: &RunConfig, result: &RunResult, dir: &Path) -> Result<(), EngineError> {
    std::fs::create_dir_all(dir).map_err(|e| EngineError::Output {
        path: dir.to_path_buf(),
        msg: e.to_string(),
    })?;
    write_file(&dir.join("library.smi"), &library_text(&result.population))?;
    write_file(
        &dir.join("rules_final.json"),
        &(rules_to_json(&result.rules.rules) + "\n"),
    )?;

    let mut lines = String::new();
    for rec in &result.provenance {
        let line = serde_json::to_string(rec).map_err(|e| EngineError::Output {
            path: dir.join("provenance.jsonl"),
            msg: e.to_string(),
        })?;
        lines.push_str(&line);
        lines.push('\n');
    }
    write_file(&dir.join("provenance.jsonl"), &lines)?;
    write_file(&dir.join("metrics.csv"), &metrics_text(&result.metrics))?;

    let config = cfg
        .to_text()
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.to_string())))
        .collect();
    let manifest = Manifest {
        name: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        rng_seed: cfg.rng_seed,
        config,
        predictor: &result.predictor,
        registry_version: result.registry_version,
        generations_run: result.metrics.len(),
        final_population: result.population.len(),
        notes: vec![
            "HOMO-LUMO gap values come from the configured predictor, not a trained network",
            "CNS MPO is scored without the pKa term",
        ],
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| EngineError::Output {
        path: dir.join("run_manifest.json"),
        msg: e.to_string(),
    })?;
    write_file(&dir.join("run_manifest.json"), &(text + "\n"))
}

/// Loads inputs, runs, and writes the artifacts to the configured directory.
pub fn run(cfg: &RunConfig) -> Result<RunResult, EngineError> {
    cfg.validate()?;
    let inputs = RunInputs::load(cfg)?;
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| EngineError::Output {
        path: cfg.output_dir.clone(),
        msg: e.to_string(),
    })?;
    let result = run_evolution(cfg, &inputs)?;
    emit_outputs(cfg, &result, &cfg.output_dir)?;
    Ok(result)
}

#[cfg(test)]
mod tests;
