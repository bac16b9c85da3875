use molevo::molgraph::{parse_smiles, write_smiles_with_ranks};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus() -> Vec<String> {
    include_str!("data/corpus_1000.smi")
        .lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect()
}

#[test]
fn canonical_form_is_idempotent_and_order_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    for s in corpus() {
        let m = match parse_smiles(&s) {
            Ok(m) => m,
            Err(e) => {
                failures.push(format!("{s}: parse {e}"));
                continue;
            }
        };
        let c = m.canonical_smiles().to_string();
        let again = parse_smiles(&c).map(|x| x.canonical_smiles().to_string());
        if again.as_deref() != Ok(c.as_str()) {
            failures.push(format!("{s}: not idempotent {c} -> {again:?}"));
            continue;
        }
        for _ in 0..3 {
            let mut ranks: Vec<usize> = (0..m.num_atoms()).collect();
            ranks.shuffle(&mut rng);
            let w = write_smiles_with_ranks(&m, &ranks);
            let p = parse_smiles(&w).map(|x| x.canonical_smiles().to_string());
            if p.as_deref() != Ok(c.as_str()) {
                failures.push(format!("{s}: permuted {w} -> {p:?}, expected {c}"));
                break;
            }
        }
    }
    assert!(
        failures.is_empty(),
        "{} failures:\n{}",
        failures.len(),
        failures[..failures.len().min(20)].join("\n")
    );
}
