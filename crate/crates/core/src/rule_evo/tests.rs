use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::molgraph::parse_smiles;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn registry() -> Registry {
    Registry::bundled()
}

fn quiet() -> RuleEvoConfig {
    RuleEvoConfig {
        noise_epsilon: 0.0,
        ..RuleEvoConfig::default()
    }
}

fn rule_from(reg: &Registry, conds: &[usize], trans: &[usize], weight: f64) -> Rule {
    Rule {
        id: 0,
        conditions: conds.iter().map(|&i| reg.conditions[i].clone()).collect(),
        transformations: trans
            .iter()
            .map(|&i| reg.transformations[i].clone())
            .collect(),
        weight,
    }
}

#[test]
fn init_population_contract() {
    let reg = registry();
    let cfg = RuleEvoConfig::default();
    let pop = init_rule_population(&cfg, &reg, &mut rng(3)).unwrap();
    assert_eq!(pop.rules.len(), 30);
    for r in &pop.rules {
        assert_eq!(r.weight, 1.0);
        assert!((1..=2).contains(&r.conditions.len()));
        assert!((1..=3).contains(&r.transformations.len()));
        r.validate().unwrap();
    }
    for k in TransformKind::ALL {
        assert!(pop
            .rules
            .iter()
            .any(|r| r.transformations.iter().any(|t| t.kind == k)));
    }
    assert_eq!(pop, init_rule_population(&cfg, &reg, &mut rng(3)).unwrap());
    let bad = RuleEvoConfig {
        rule_pop_size: 0,
        ..cfg
    };
    assert_eq!(
        init_rule_population(&bad, &reg, &mut rng(3)),
        Err(RuleEvoError::EmptyRulePopulation)
    );
}

#[test]
fn weight_update_examples() {
    let cfg = quiet();
    let w = update_rule_weight(1.0, 0.5, 0.2, &cfg, &mut rng(0));
    assert!((w - 1.03).abs() < 1e-12);
    assert_eq!(update_rule_weight(1.0, 0.4, 0.4, &cfg, &mut rng(0)), 1.0);
    let mut w = 1.0;
    let mut last = w;
    for _ in 0..200 {
        w = update_rule_weight(w, 0.0, 1.0, &cfg, &mut rng(0));
        assert!(w < last || w == 0.0);
        last = w;
    }
    assert_eq!(w, 0.0);
    assert_eq!(
        update_rule_weight(9.99, 1.0, 0.0, &cfg, &mut rng(0)),
        MAX_WEIGHT
    );
}

#[test]
fn splice_examples() {
    let a = ['a', 'b'];
    let x = ['x', 'y'];
    assert_eq!(splice(&a, &x, 1, &mut rng(0)), vec!['a', 'y']);
    assert_eq!(splice(&a, &x, 2, &mut rng(0)), vec!['a', 'b']);
    let empty: [char; 0] = [];
    assert_eq!(splice(&empty, &x, 2, &mut rng(0)).len(), 1);
}

#[test]
fn crossover_examples() {
    let reg = registry();
    let p1 = rule_from(&reg, &[0, 1], &[0], 0.8);
    let p2 = rule_from(&reg, &[2, 3], &[5], 1.2);
    let always = RuleEvoConfig {
        p_crossover: 1.0,
        ..quiet()
    };
    let child = crossover_rules(&p1, &p2, &always, &mut rng(1));
    assert!((child.weight - 1.0).abs() < 1e-12);
    assert_eq!(child.conditions[0], reg.conditions[0]);
    assert_eq!(child.transformations, vec![reg.transformations[0].clone()]);
    let never = RuleEvoConfig {
        p_crossover: 0.0,
        ..quiet()
    };
    assert_eq!(crossover_rules(&p1, &p2, &never, &mut rng(1)), p1);
}

#[test]
fn mutation_examples() {
    let reg = registry();
    let r = rule_from(&reg, &[0, 1], &[0, 1, 2], 1.0);
    let added = mutate_rule_with(&r, ListEdit::Add, ListEdit::Reorder, &reg, &mut rng(2));
    assert_eq!(added.conditions.len(), 3);
    let single = rule_from(&reg, &[0], &[0], 1.0);
    let removed = mutate_rule_with(
        &single,
        ListEdit::Remove,
        ListEdit::Remove,
        &reg,
        &mut rng(2),
    );
    assert_eq!(removed, single);
    let reordered = mutate_rule_with(&r, ListEdit::Reorder, ListEdit::Reorder, &reg, &mut rng(5));
    assert_eq!(reordered.conditions, r.conditions);
    let names = |x: &Rule| {
        let mut v: Vec<String> = x
            .transformations
            .iter()
            .map(|t| t.name().to_string())
            .collect();
        v.sort();
        v
    };
    assert_eq!(names(&reordered), names(&r));
    let off = RuleEvoConfig {
        p_mutation: 0.0,
        ..quiet()
    };
    assert_eq!(mutate_rule(&r, &off, &reg, &mut rng(2)), r);
}

#[test]
fn acceptance_is_strict() {
    let reg = registry();
    let old = init_rule_population(&RuleEvoConfig::default(), &reg, &mut rng(1)).unwrap();
    let mut cand = old.clone();
    cand.generation = 1;
    let (p, accepted) =
        accept_rule_generation(old.clone(), cand.clone(), &[0.61], &[0.64]).unwrap();
    assert!(accepted);
    assert_eq!(p, cand);
    let (p, accepted) =
        accept_rule_generation(old.clone(), cand.clone(), &[0.61], &[0.61]).unwrap();
    assert!(!accepted);
    assert_eq!(p, old);
    let (_, accepted) =
        accept_rule_generation(old.clone(), cand.clone(), &[0.64], &[0.61]).unwrap();
    assert!(!accepted);
    assert!(accept_rule_generation(old, cand, &[], &[0.5]).is_err());
}

#[test]
fn rewards_are_min_max_normalized() {
    let r = normalized_rewards(&[(1, 0.2), (1, 0.4), (2, 0.9), (3, 0.5)]);
    assert_eq!(r[&1], 0.0);
    assert_eq!(r[&2], 1.0);
    assert!((r[&3] - (0.5 - 0.3) / 0.6).abs() < 1e-12);
    assert!(normalized_rewards(&[]).is_empty());
}

#[test]
fn rewards_move_weights_and_baselines() {
    let reg = registry();
    let cfg = quiet();
    let mut pop = init_rule_population(
        &RuleEvoConfig {
            rule_pop_size: 3,
            ..cfg.clone()
        },
        &reg,
        &mut rng(4),
    )
    .unwrap();
    let rewards: BTreeMap<u64, f64> = [(0, 1.0), (1, 0.0)].into_iter().collect();
    apply_rewards(&mut pop, &rewards, &cfg, &mut rng(0));
    assert!((pop.rules[0].weight - 1.1).abs() < 1e-12);
    assert_eq!(pop.rules[1].weight, 1.0);
    assert_eq!(pop.rules[2].weight, 1.0);
    assert!((pop.reward_baselines[&0] - 0.1).abs() < 1e-12);
}

#[test]
fn rule_selection_follows_weights_among_applicable_rules() {
    let reg = registry();
    // condition 0 needs an aromatic ring
    let mut a = rule_from(&reg, &[0], &[0], 3.0);
    a.id = 1;
    let mut b = rule_from(&reg, &[1], &[0], 1.0);
    b.id = 2;
    let rules = vec![a, b];
    let phenol = parse_smiles("Oc1ccccc1").unwrap();
    let facts = MolFacts::new(&phenol);
    let mut r = rng(9);
    let picks = (0..4000)
        .filter(|_| select_rule(&rules, &facts, &mut r).unwrap().id == 1)
        .count();
    assert!((picks as f64 / 4000.0 - 0.75).abs() < 0.03, "{picks}");
    let alkane = parse_smiles("CCCC").unwrap();
    assert!(select_rule(&rules, &MolFacts::new(&alkane), &mut r).is_none());
}

proptest! {
    #[test]
    fn operators_keep_rules_valid(seed in any::<u64>()) {
        let reg = registry();
        let cfg = RuleEvoConfig { p_crossover: 0.7, p_mutation: 0.9, ..RuleEvoConfig::default() };
        let mut r = rng(seed);
        let mut pop = init_rule_population(&cfg, &reg, &mut r).unwrap();
        for _ in 0..5 {
            pop = propose_rules(&pop, &cfg, &reg, &mut r);
            prop_assert_eq!(pop.rules.len(), cfg.rule_pop_size);
            for rule in &pop.rules {
                prop_assert!(rule.validate().is_ok());
            }
        }
    }

    #[test]
    fn zero_advantage_is_a_fixed_point(w in 0.0f64..10.0, r in 0.0f64..1.0) {
        prop_assert_eq!(update_rule_weight(w, r, r, &quiet(), &mut rng(0)), w);
    }
}
