//! Per-generation population statistics and their CSV form.

use std::collections::HashSet;

use rand::Rng;

use crate::descriptors::{basic_descriptors, murcko_scaffold, sa_score, tanimoto, Fingerprint};
use crate::fitness::{compliance_flags, fingerprint, population_fitness, Constraint};
use crate::mol_evo::{
    population_diversity, Member, Operator, Strategy, StrategyStats, DIVERSITY_SAMPLE,
};
use crate::molgraph::check_validity;

pub const METRICS_HEADER: &str = "generation,mean_fitness,prev_mean_fitness,max_fitness,\
population_size,offspring,validity,internal_diversity,similarity_to_initial,novelty,\
scaffold_diversity,lipinski,ghose,veber,mean_qed,mean_logp,mean_sa,mean_gap,rule_accepted,\
success_fragment,success_scaffold,success_brics,success_substructure,success_pharmacophore,\
success_multi_parent,success_template";

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationMetrics {
    pub generation: usize,
    pub mean_fitness: f64,
    /// Mean fitness of the population the generation started from.
    pub prev_mean_fitness: f64,
    pub max_fitness: f64,
    pub population_size: usize,
    pub offspring: usize,
    pub validity: f64,
    pub internal_diversity: f64,
    /// Mean over members of the best Tanimoto match in the initial population.
    pub similarity_to_initial: f64,
    /// Share of generated (non-seed) members absent from the reference set.
    pub novelty: f64,
    /// Distinct Murcko scaffolds per member; acyclic members share one.
    pub scaffold_diversity: f64,
    pub lipinski: f64,
    pub ghose: f64,
    pub veber: f64,
    pub mean_qed: f64,
    pub mean_logp: f64,
    pub mean_sa: f64,
    /// `None` when the predictor returned nothing for every member.
    pub mean_gap: Option<f64>,
    pub rule_accepted: bool,
    /// Success fraction per strategy in this generation, in `Strategy::ALL` order.
    pub strategy_success: [f64; 7],
}

fn mean(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for x in xs {
        sum += x;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

fn fraction<T>(items: &[T], pred: impl Fn(&T) -> bool) -> f64 {
    if items.is_empty() {
        return 0.0;
    }
    items.iter().filter(|x| pred(x)).count() as f64 / items.len() as f64
}

impl GenerationMetrics {
    #[allow(clippy::too_many_arguments)]
    pub fn measure(
        generation: usize,
        population: &[Member],
        prev_mean_fitness: f64,
        offspring: usize,
        initial: &[Fingerprint],
        seeds: &HashSet<String>,
        reference: &HashSet<String>,
        rule_accepted: bool,
        stats: &StrategyStats,
        rng: &mut impl Rng,
    ) -> GenerationMetrics {
        let fps: Vec<Fingerprint> = population.iter().map(|m| fingerprint(&m.mol)).collect();
        let similarity = mean(fps.iter().map(|fp| {
            initial
                .iter()
                .filter_map(|i| tanimoto(fp, i).ok())
                .fold(0.0, f64::max)
        }))
        .unwrap_or(0.0);
        let generated: Vec<&Member> = population
            .iter()
            .filter(|m| m.provenance.operator != Operator::Seed && !seeds.contains(&m.smiles))
            .collect();
        let novelty = fraction(&generated, |m| !reference.contains(&m.smiles));
        let scaffolds: HashSet<String> = population
            .iter()
            .map(|m| {
                murcko_scaffold(&m.mol)
                    .map(|s| s.canonical_smiles().to_string())
                    .unwrap_or_default()
            })
            .collect();
        let flags: Vec<_> = population
            .iter()
            .map(|m| compliance_flags(&m.mol))
            .collect();
        let descriptors: Vec<_> = population
            .iter()
            .map(|m| basic_descriptors(&m.mol))
            .collect();
        let rates = stats.strategies.last_generation_rates();
        let mut strategy_success = [0.0; 7];
        for s in Strategy::ALL {
            strategy_success[s as usize] = rates[s as usize];
        }
        GenerationMetrics {
            generation,
            mean_fitness: population_fitness(
                &population.iter().map(|m| m.fitness).collect::<Vec<_>>(),
            )
            .unwrap_or(0.0),
            prev_mean_fitness,
            max_fitness: population.iter().map(|m| m.fitness).fold(0.0, f64::max),
            population_size: population.len(),
            offspring,
            validity: fraction(population, |m| check_validity(&m.mol).valid),
            internal_diversity: population_diversity(&fps, DIVERSITY_SAMPLE, rng),
            similarity_to_initial: similarity,
            novelty,
            scaffold_diversity: if population.is_empty() {
                0.0
            } else {
                scaffolds.len() as f64 / population.len() as f64
            },
            lipinski: fraction(&flags, |f| f.lipinski),
            ghose: fraction(&flags, |f| f.ghose),
            veber: fraction(&flags, |f| f.veber),
            mean_qed: mean(
                population
                    .iter()
                    .map(|m| m.scores.get(Constraint::DrugLikenessExtended)),
            )
            .unwrap_or(0.0),
            mean_logp: mean(descriptors.iter().map(|d| d.logp)).unwrap_or(0.0),
            mean_sa: mean(population.iter().map(|m| sa_score(&m.mol))).unwrap_or(0.0),
            mean_gap: mean(population.iter().filter_map(|m| m.scores.predicted_gap)),
            rule_accepted,
            strategy_success,
        }
    }

    pub fn csv_row(&self) -> String {
        let f = |x: f64| format!("{x:.6}");
        let mut cols = vec![
            self.generation.to_string(),
            f(self.mean_fitness),
            f(self.prev_mean_fitness),
            f(self.max_fitness),
            self.population_size.to_string(),
            self.offspring.to_string(),
            f(self.validity),
            f(self.internal_diversity),
            f(self.similarity_to_initial),
            f(self.novelty),
            f(self.scaffold_diversity),
            f(self.lipinski),
            f(self.ghose),
            f(self.veber),
            f(self.mean_qed),
            f(self.mean_logp),
            f(self.mean_sa),
            self.mean_gap.map(f).unwrap_or_default(),
            u8::from(self.rule_accepted).to_string(),
        ];
        cols.extend(self.strategy_success.iter().map(|&x| f(x)));
        cols.join(",")
    }
}
