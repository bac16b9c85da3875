//! Genetic algorithm over rules: initialization, reward-driven weight
//! updates, splice crossover, structural mutation and population-level
//! acceptance.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fitness::{population_fitness, FitnessError};
use crate::ruleset::{MolFacts, Registry, Rule, TransformKind};

pub const MAX_WEIGHT: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuleEvoError {
    #[error("rule population size must be at least 1")]
    EmptyRulePopulation,
    #[error("invalid rule evolution setting: {0}")]
    Config(String),
    #[error(transparent)]
    Fitness(#[from] FitnessError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleEvoConfig {
    pub alpha: f64,
    pub baseline_decay: f64,
    pub noise_epsilon: f64,
    pub p_crossover: f64,
    pub p_mutation: f64,
    pub rule_pop_size: usize,
}

impl Default for RuleEvoConfig {
    fn default() -> RuleEvoConfig {
        RuleEvoConfig {
            alpha: 0.1,
            baseline_decay: 0.9,
            noise_epsilon: 0.01,
            p_crossover: 0.2,
            p_mutation: 0.4,
            rule_pop_size: 30,
        }
    }
}

impl RuleEvoConfig {
    pub fn validate(&self) -> Result<(), RuleEvoError> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if self.rule_pop_size < 1 {
            return Err(RuleEvoError::EmptyRulePopulation);
        }
        if !prob(self.p_crossover) || !prob(self.p_mutation) || !prob(self.baseline_decay) {
            return Err(RuleEvoError::Config(
                "probabilities must lie in [0, 1]".into(),
            ));
        }
        if !(self.alpha > 0.0) || !(self.noise_epsilon >= 0.0) {
            return Err(RuleEvoError::Config(
                "alpha must be > 0 and epsilon >= 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RulePopulation {
    pub rules: Vec<Rule>,
    pub generation: usize,
    /// Reward moving average per rule id.
    pub reward_baselines: BTreeMap<u64, f64>,
    /// Next unused rule id.
    pub next_id: u64,
}

fn sample_rule(registry: &Registry, id: u64, rng: &mut impl Rng) -> Rule {
    let nc = rng.gen_range(1..=2);
    let nt = rng.gen_range(1..=3);
    Rule {
        id,
        conditions: (0..nc)
            .map(|_| registry.conditions.choose(rng).expect("conditions").clone())
            .collect(),
        transformations: (0..nt)
            .map(|_| {
                registry
                    .transformations
                    .choose(rng)
                    .expect("transformations")
                    .clone()
            })
            .collect(),
        weight: 1.0,
    }
}

/// K rules with 1–2 conditions and 1–3 transformations each, weight 1.
/// When K ≥ 7 the first transformation of rules 0..7 covers every kind.
pub fn init_rule_population(
    cfg: &RuleEvoConfig,
    registry: &Registry,
    rng: &mut impl Rng,
) -> Result<RulePopulation, RuleEvoError> {
    cfg.validate()?;
    if registry.transformations.is_empty() || registry.conditions.is_empty() {
        return Err(RuleEvoError::Config("empty registry".into()));
    }
    let k = cfg.rule_pop_size;
    let mut rules: Vec<Rule> = (0..k as u64)
        .map(|id| sample_rule(registry, id, rng))
        .collect();
    if k >= TransformKind::ALL.len() {
        for (rule, kind) in rules.iter_mut().zip(TransformKind::ALL) {
            let pool: Vec<_> = registry.of_kind(kind).collect();
            if let Some(t) = pool.choose(rng) {
                rule.transformations[0] = (*t).clone();
            }
        }
    }
    Ok(RulePopulation {
        rules,
        generation: 0,
        reward_baselines: BTreeMap::new(),
        next_id: k as u64,
    })
}

/// w' = clamp(w + α(r − b) + η, 0, 10) with η ~ U(−ε, ε).
pub fn update_rule_weight(
    w: f64,
    reward: f64,
    baseline: f64,
    cfg: &RuleEvoConfig,
    rng: &mut impl Rng,
) -> f64 {
    let noise = if cfg.noise_epsilon > 0.0 {
        rng.gen_range(-cfg.noise_epsilon..=cfg.noise_epsilon)
    } else {
        0.0
    };
    (w + cfg.alpha * (reward - baseline) + noise).clamp(0.0, MAX_WEIGHT)
}

/// Prefix of `a` up to `cut`, then the suffix of `b` from `cut`; borrows one
/// element of `b` if the result would be empty.
pub fn splice<T: Clone>(a: &[T], b: &[T], cut: usize, rng: &mut impl Rng) -> Vec<T> {
    let mut out: Vec<T> = a[..cut.min(a.len())].to_vec();
    if cut < b.len() {
        out.extend_from_slice(&b[cut..]);
    }
    if out.is_empty() {
        if let Some(x) = b.choose(rng) {
            out.push(x.clone());
        }
    }
    out
}

/// With probability p_c, splices conditions and transformations at
/// independent cut points and averages the weights; otherwise returns `p1`.
/// The child keeps `p1`'s id; callers assign a fresh id when it differs.
pub fn crossover_rules(p1: &Rule, p2: &Rule, cfg: &RuleEvoConfig, rng: &mut impl Rng) -> Rule {
    if rng.gen::<f64>() >= cfg.p_crossover {
        return p1.clone();
    }
    let cut_c = rng.gen_range(1..=p1.conditions.len().min(p2.conditions.len()));
    let cut_t = rng.gen_range(1..=p1.transformations.len().min(p2.transformations.len()));
    Rule {
        id: p1.id,
        conditions: splice(&p1.conditions, &p2.conditions, cut_c, rng),
        transformations: splice(&p1.transformations, &p2.transformations, cut_t, rng),
        weight: (p1.weight + p2.weight) / 2.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListEdit {
    Add,
    Remove,
    Replace,
    Reorder,
}

fn edit_list<T: Clone>(list: &mut Vec<T>, op: ListEdit, pool: &[T], rng: &mut impl Rng) {
    match op {
        ListEdit::Add => list.push(pool.choose(rng).expect("pool").clone()),
        ListEdit::Remove => {
            if list.len() > 1 {
                let k = rng.gen_range(0..list.len());
                list.remove(k);
            }
        }
        ListEdit::Replace => {
            let k = rng.gen_range(0..list.len());
            list[k] = pool.choose(rng).expect("pool").clone();
        }
        ListEdit::Reorder => list.shuffle(rng),
    }
}

/// Applies the given edits; `Reorder` is only meaningful for transformations
/// and is ignored for conditions.
pub fn mutate_rule_with(
    r: &Rule,
    on_conditions: ListEdit,
    on_transformations: ListEdit,
    registry: &Registry,
    rng: &mut impl Rng,
) -> Rule {
    let mut out = r.clone();
    if on_conditions != ListEdit::Reorder {
        edit_list(
            &mut out.conditions,
            on_conditions,
            &registry.conditions,
            rng,
        );
    }
    edit_list(
        &mut out.transformations,
        on_transformations,
        &registry.transformations,
        rng,
    );
    out
}

/// With probability p_m, one of add/remove/replace on the conditions and,
/// independently, one of add/remove/replace/reorder on the transformations.
pub fn mutate_rule(r: &Rule, cfg: &RuleEvoConfig, registry: &Registry, rng: &mut impl Rng) -> Rule {
    if rng.gen::<f64>() >= cfg.p_mutation {
        return r.clone();
    }
    const COND: [ListEdit; 3] = [ListEdit::Add, ListEdit::Remove, ListEdit::Replace];
    const TRANS: [ListEdit; 4] = [
        ListEdit::Add,
        ListEdit::Remove,
        ListEdit::Replace,
        ListEdit::Reorder,
    ];
    let c = *COND.choose(rng).expect("ops");
    let t = *TRANS.choose(rng).expect("ops");
    mutate_rule_with(r, c, t, registry, rng)
}

/// Index of the heavier of two uniformly drawn rules; ties keep the first.
pub fn tournament(rules: &[Rule], rng: &mut impl Rng) -> usize {
    let a = rng.gen_range(0..rules.len());
    let b = rng.gen_range(0..rules.len());
    if rules[b].weight > rules[a].weight {
        b
    } else {
        a
    }
}

/// The candidate rule population: K children, each from crossover of two
/// tournament winners followed by mutation. Children that differ from their
/// first parent get a fresh id and start from that parent's baseline.
pub fn propose_rules(
    pop: &RulePopulation,
    cfg: &RuleEvoConfig,
    registry: &Registry,
    rng: &mut impl Rng,
) -> RulePopulation {
    let mut next = pop.clone();
    next.rules.clear();
    for _ in 0..cfg.rule_pop_size {
        let p1 = &pop.rules[tournament(&pop.rules, rng)];
        let p2 = &pop.rules[tournament(&pop.rules, rng)];
        let mut child = mutate_rule(&crossover_rules(p1, p2, cfg, rng), cfg, registry, rng);
        if !child.same_genes(p1) || child.weight != p1.weight {
            child.id = next.next_id;
            next.next_id += 1;
            if let Some(&b) = pop.reward_baselines.get(&p1.id) {
                next.reward_baselines.insert(child.id, b);
            }
        }
        next.rules.push(child);
    }
    next
}

/// The candidate rule population wins only on strictly higher mean
/// population fitness.
pub fn accept_rule_generation(
    old: RulePopulation,
    candidate: RulePopulation,
    old_fitness: &[f64],
    new_fitness: &[f64],
) -> Result<(RulePopulation, bool), RuleEvoError> {
    let before = population_fitness(old_fitness)?;
    let after = population_fitness(new_fitness)?;
    Ok(if after > before {
        (candidate, true)
    } else {
        (old, false)
    })
}

/// Mean offspring fitness per rule id, min-max normalized across rules that
/// produced offspring. A single producing rule, or all-equal means, gets 1.
pub fn normalized_rewards(offspring: &[(u64, f64)]) -> BTreeMap<u64, f64> {
    let mut sums: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for &(id, f) in offspring {
        let e = sums.entry(id).or_insert((0.0, 0));
        e.0 += f;
        e.1 += 1;
    }
    let means: BTreeMap<u64, f64> = sums
        .into_iter()
        .map(|(k, (s, n))| (k, s / n as f64))
        .collect();
    let lo = means.values().copied().fold(f64::INFINITY, f64::min);
    let hi = means.values().copied().fold(f64::NEG_INFINITY, f64::max);
    means
        .into_iter()
        .map(|(k, v)| (k, if hi > lo { (v - lo) / (hi - lo) } else { 1.0 }))
        .collect()
}

/// Updates every rule's weight from its reward (0 when it produced nothing)
/// and then moves its baseline toward that reward. Rules are visited in
/// ascending id order so the noise draws do not depend on list order.
pub fn apply_rewards(
    pop: &mut RulePopulation,
    rewards: &BTreeMap<u64, f64>,
    cfg: &RuleEvoConfig,
    rng: &mut impl Rng,
) {
    let mut order: Vec<usize> = (0..pop.rules.len()).collect();
    order.sort_by_key(|&i| (pop.rules[i].id, i));
    let before = std::mem::take(&mut pop.reward_baselines);
    for i in order {
        let id = pop.rules[i].id;
        let r = rewards.get(&id).copied().unwrap_or(0.0);
        let b = before.get(&id).copied().unwrap_or(0.0);
        pop.rules[i].weight = update_rule_weight(pop.rules[i].weight, r, b, cfg, rng);
        pop.reward_baselines
            .insert(id, cfg.baseline_decay * b + (1.0 - cfg.baseline_decay) * r);
    }
}

/// Draws a rule with probability proportional to weight among those whose
/// conditions hold for the molecule; uniform if all such weights are zero.
pub fn select_rule<'a>(
    rules: &'a [Rule],
    facts: &MolFacts,
    rng: &mut impl Rng,
) -> Option<&'a Rule> {
    let live: Vec<&Rule> = rules.iter().filter(|r| r.applicable(facts)).collect();
    if live.is_empty() {
        return None;
    }
    let total: f64 = live.iter().map(|r| r.weight).sum();
    if total <= 0.0 {
        return live.choose(rng).copied();
    }
    let mut x = rng.gen::<f64>() * total;
    for r in &live {
        if x < r.weight {
            return Some(r);
        }
        x -= r.weight;
    }
    live.iter().rev().find(|r| r.weight > 0.0).copied()
}

#[cfg(test)]
mod tests;
