//! Molecule-level evolution: rule mutation, crossover strategies with
//! adaptive selection, population update and diversity.

mod brics;
mod join;
mod strategies;

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

pub use brics::{brics_decompose, compatible_pairs, CutLabel, Fragment, FragmentSet, Link};
pub use join::{
    eligible, eligible_atoms, eligible_pairs, join, join_removing, leaving_group, reactive_roles,
    select_connection_points, Heuristic, Joined, ReactiveRole, REACTIVE_PAIRS,
};
pub use strategies::Strategy;

use crate::descriptors::{tanimoto, Fingerprint};
use crate::fitness::ScoreVector;
use crate::molgraph::{check_validity, Molecule};
use crate::rule_evo::select_rule;
use crate::ruleset::{apply_transformations, MolFacts, Rule};

pub const DEFAULT_WINDOW: usize = 5;
pub const DIVERSITY_SAMPLE: usize = 50;

/// Attempt and success counts per arm over the last `window` generations.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessWindow {
    window: usize,
    history: VecDeque<Vec<(u32, u32)>>,
    current: Vec<(u32, u32)>,
}

impl SuccessWindow {
    pub fn new(arms: usize, window: usize) -> SuccessWindow {
        SuccessWindow {
            window: window.max(1),
            history: VecDeque::new(),
            current: vec![(0, 0); arms],
        }
    }

    pub fn arms(&self) -> usize {
        self.current.len()
    }

    pub fn record(&mut self, arm: usize, success: bool) {
        let c = &mut self.current[arm];
        c.0 += 1;
        c.1 += u32::from(success);
    }

    /// Moves the open generation into the window, dropping the oldest.
    pub fn close_generation(&mut self) {
        let fresh = vec![(0, 0); self.arms()];
        let done = std::mem::replace(&mut self.current, fresh);
        self.history.push_back(done);
        while self.history.len() > self.window {
            self.history.pop_front();
        }
    }

    /// (attempts, successes) per arm summed over the closed generations.
    pub fn totals(&self) -> Vec<(u32, u32)> {
        let mut t = vec![(0, 0); self.arms()];
        for generation in &self.history {
            for (acc, &(a, s)) in t.iter_mut().zip(generation) {
                acc.0 += a;
                acc.1 += s;
            }
        }
        t
    }

    /// Laplace-smoothed success rate (s + 1) / (a + 2) per arm.
    pub fn rates(&self) -> Vec<f64> {
        self.totals()
            .iter()
            .map(|&(a, s)| (f64::from(s) + 1.0) / (f64::from(a) + 2.0))
            .collect()
    }

    /// Raw success fraction per arm in the latest closed generation.
    pub fn last_generation_rates(&self) -> Vec<f64> {
        match self.history.back() {
            Some(g) => g
                .iter()
                .map(|&(a, s)| {
                    if a == 0 {
                        0.0
                    } else {
                        f64::from(s) / f64::from(a)
                    }
                })
                .collect(),
            None => vec![0.0; self.arms()],
        }
    }
}

/// Rates normalized to a distribution; uniform when they sum to zero.
pub fn probabilities(rates: &[f64]) -> Vec<f64> {
    let total: f64 = rates.iter().sum();
    if total > 0.0 {
        rates.iter().map(|r| r / total).collect()
    } else {
        vec![1.0 / rates.len() as f64; rates.len()]
    }
}

pub fn sample_index(probs: &[f64], rng: &mut impl Rng) -> usize {
    let mut x: f64 = rng.gen();
    for (k, &p) in probs.iter().enumerate() {
        if x < p {
            return k;
        }
        x -= p;
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyStats {
    pub strategies: SuccessWindow,
    pub heuristics: SuccessWindow,
}

impl StrategyStats {
    pub fn new(window: usize) -> StrategyStats {
        StrategyStats {
            strategies: SuccessWindow::new(Strategy::ALL.len(), window),
            heuristics: SuccessWindow::new(Heuristic::ALL.len(), window),
        }
    }

    pub fn strategy_probabilities(&self) -> Vec<f64> {
        probabilities(&self.strategies.rates())
    }

    pub fn heuristic_probabilities(&self) -> Vec<f64> {
        probabilities(&self.heuristics.rates())
    }

    pub fn select_heuristic(&self, rng: &mut impl Rng) -> Heuristic {
        Heuristic::ALL[sample_index(&self.heuristic_probabilities(), rng)]
    }

    /// Folds one offspring's trials into the open generation.
    pub fn record(&mut self, trials: &[Trial]) {
        for t in trials {
            self.strategies.record(t.strategy as usize, t.success);
            if let Some(h) = t.heuristic {
                self.heuristics.record(h as usize, t.success);
            }
        }
    }

    pub fn close_generation(&mut self) {
        self.strategies.close_generation();
        self.heuristics.close_generation();
    }
}

impl Default for StrategyStats {
    fn default() -> StrategyStats {
        StrategyStats::new(DEFAULT_WINDOW)
    }
}

/// Draws a strategy with probability proportional to its windowed success rate.
pub fn select_strategy(stats: &StrategyStats, rng: &mut impl Rng) -> Strategy {
    Strategy::ALL[sample_index(&stats.strategy_probabilities(), rng)]
}

/// Valid, connected, and different from every parent.
pub fn acceptable_child(child: &Molecule, parents: &[Molecule]) -> bool {
    check_validity(child).valid
        && child.is_connected()
        && parents
            .iter()
            .all(|p| p.canonical_smiles() != child.canonical_smiles())
}

#[derive(Debug, Clone)]
pub struct CrossoverResult {
    pub child: Option<Molecule>,
    pub heuristic: Option<Heuristic>,
}

/// One crossover attempt. Two-parent strategies use the first two parents.
/// A child is returned only if it passes [`acceptable_child`].
pub fn crossover(
    strategy: Strategy,
    parents: &[Molecule],
    stats: &StrategyStats,
    rng: &mut impl Rng,
) -> CrossoverResult {
    if parents.len() < strategy.arity() {
        return CrossoverResult {
            child: None,
            heuristic: None,
        };
    }
    let heuristic = strategy
        .uses_heuristic()
        .then(|| stats.select_heuristic(rng));
    let h = heuristic.unwrap_or(Heuristic::MinimizeStrain);
    let child = match strategy {
        Strategy::Fragment => strategies::fragment(parents, h, rng),
        Strategy::Scaffold => strategies::scaffold(parents, rng),
        Strategy::Brics => strategies::brics(parents, h, rng),
        Strategy::Substructure => strategies::substructure(parents, rng),
        Strategy::Pharmacophore => strategies::pharmacophore(parents, h, rng),
        Strategy::MultiParent => strategies::multi_parent(parents, h, rng),
        Strategy::Template => strategies::template(parents, rng),
    };
    let used = &parents[..strategy.arity()];
    CrossoverResult {
        child: child.filter(|c| acceptable_child(c, used)),
        heuristic,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Trial {
    pub strategy: Strategy,
    pub heuristic: Option<Heuristic>,
    pub success: bool,
}

#[derive(Debug, Clone)]
pub struct CrossoverOutcome {
    pub molecule: Molecule,
    /// Strategy that produced the molecule; `None` for the parent fallback.
    pub strategy: Option<Strategy>,
    pub heuristic: Option<Heuristic>,
    pub trials: Vec<Trial>,
}

/// Draws a strategy, then on failure tries the others once each in
/// descending probability. When all fail, the fitter of the first two
/// parents comes back unchanged.
pub fn crossover_with_fallback(
    parents: &[Molecule],
    fitness: &[f64],
    stats: &StrategyStats,
    rng: &mut impl Rng,
) -> CrossoverOutcome {
    let probs = stats.strategy_probabilities();
    let first = select_strategy(stats, rng);
    let mut rest: Vec<Strategy> = Strategy::ALL
        .iter()
        .copied()
        .filter(|&s| s != first)
        .collect();
    rest.sort_by(|&a, &b| {
        probs[b as usize]
            .partial_cmp(&probs[a as usize])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut trials = Vec::new();
    for strategy in std::iter::once(first).chain(rest) {
        if parents.len() < strategy.arity() {
            continue;
        }
        let r = crossover(strategy, parents, stats, rng);
        trials.push(Trial {
            strategy,
            heuristic: r.heuristic,
            success: r.child.is_some(),
        });
        if let Some(child) = r.child {
            return CrossoverOutcome {
                molecule: child,
                strategy: Some(strategy),
                heuristic: r.heuristic,
                trials,
            };
        }
    }
    let pick = if fitness.get(1).copied().unwrap_or(f64::NEG_INFINITY) > fitness[0] {
        1
    } else {
        0
    };
    CrossoverOutcome {
        molecule: parents[pick].clone(),
        strategy: None,
        heuristic: None,
        trials,
    }
}

/// Up to `attempts` rule draws among the rules whose conditions hold; the
/// first draw producing an acceptable child wins.
pub fn mutate_molecule(
    m: &Molecule,
    rules: &[Rule],
    attempts: usize,
    rng: &mut impl Rng,
) -> Option<(Molecule, u64)> {
    let facts = MolFacts::new(m);
    for _ in 0..attempts {
        let rule = select_rule(rules, &facts, rng)?;
        if let Some(child) = apply_transformations(rule, m) {
            if acceptable_child(&child, std::slice::from_ref(m)) {
                return Some((child, rule.id));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    Seed,
    Mutation,
    Crossover,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub generation: usize,
    pub operator: Operator,
    pub strategy: Option<Strategy>,
    pub heuristic: Option<Heuristic>,
    pub parents: Vec<String>,
    pub rule_id: Option<u64>,
}

impl Provenance {
    pub fn seed() -> Provenance {
        Provenance {
            generation: 0,
            operator: Operator::Seed,
            strategy: None,
            heuristic: None,
            parents: Vec::new(),
            rule_id: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Member {
    pub mol: Molecule,
    pub smiles: String,
    pub fitness: f64,
    pub scores: ScoreVector,
    pub provenance: Provenance,
}

impl Member {
    pub fn new(mol: Molecule, fitness: f64, scores: ScoreVector, provenance: Provenance) -> Member {
        Member {
            smiles: mol.canonical_smiles().to_string(),
            mol,
            fitness,
            scores,
            provenance,
        }
    }
}

/// Fitness descending, then canonical SMILES ascending.
pub fn member_order(a: &Member, b: &Member) -> Ordering {
    b.fitness
        .total_cmp(&a.fitness)
        .then_with(|| a.smiles.cmp(&b.smiles))
}

pub fn elite_count(n: usize, elite_fraction: f64) -> usize {
    ((elite_fraction * n as f64).ceil() as usize).min(n)
}

/// Union of both sets by canonical SMILES (current members first, first
/// occurrence wins), the elite share of the current population kept
/// unconditionally, the rest filled by rank, output sorted.
pub fn update_population(
    current: &[Member],
    offspring: &[Member],
    n: usize,
    elite_fraction: f64,
) -> Vec<Member> {
    let mut seen: HashSet<&str> = HashSet::new();
    let mut pool: Vec<&Member> = Vec::new();
    let mut from_current = 0;
    for (k, m) in current.iter().chain(offspring).enumerate() {
        if seen.insert(&m.smiles) {
            pool.push(m);
            if k < current.len() {
                from_current += 1;
            }
        }
    }
    let mut elites: Vec<&Member> = pool[..from_current].to_vec();
    elites.sort_by(|a, b| member_order(a, b));
    elites.truncate(elite_count(n, elite_fraction));
    let elite_set: HashSet<&str> = elites.iter().map(|m| m.smiles.as_str()).collect();
    let mut rest: Vec<&Member> = pool
        .into_iter()
        .filter(|m| !elite_set.contains(m.smiles.as_str()))
        .collect();
    rest.sort_by(|a, b| member_order(a, b));
    rest.truncate(n - elites.len());
    let mut out: Vec<Member> = elites.into_iter().chain(rest).cloned().collect();
    out.sort_by(member_order);
    out
}

/// `k` distinct indices below `n`, ascending.
pub fn sample_indices(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut idx = sample(rng, n, k.min(n)).into_vec();
    idx.sort_unstable();
    idx
}

/// One minus the mean pairwise Tanimoto similarity of up to `sample_size`
/// sampled fingerprints; 0 for fewer than two.
pub fn population_diversity(fps: &[Fingerprint], sample_size: usize, rng: &mut impl Rng) -> f64 {
    if fps.len() < 2 {
        return 0.0;
    }
    let idx = sample_indices(fps.len(), sample_size, rng);
    if idx.len() < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for (k, &i) in idx.iter().enumerate() {
        for &j in &idx[k + 1..] {
            total += tanimoto(&fps[i], &fps[j]).unwrap_or(1.0);
            pairs += 1;
        }
    }
    1.0 - total / pairs as f64
}
