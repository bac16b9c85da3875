//! Regenerates `data/sa_fragments.txt` from `data/reference_corpus.smi`.
//!
//!     cargo run --release --example build_sa_table

use std::path::Path;

use molevo::descriptors::sa_table_from_corpus;
use molevo::molgraph::parse_smiles;

fn main() -> std::io::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let corpus = std::fs::read_to_string(root.join("data/reference_corpus.smi"))?;
    let molecules: Vec<_> = corpus
        .lines()
        .filter(|l| !l.trim().is_empty())
        .filter_map(|l| parse_smiles(l.trim()).ok())
        .collect();
    let table = sa_table_from_corpus(&molecules);
    let out = root.join("data/sa_fragments.txt");
    std::fs::write(&out, table.to_text())?;
    println!(
        "{} molecules, {} environments, typical count {} -> {}",
        table.molecules,
        table.counts.len(),
        table.typical,
        out.display()
    );
    Ok(())
}
