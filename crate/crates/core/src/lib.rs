pub mod descriptors;
pub mod engine;
pub mod fitness;
pub mod mol_evo;
pub mod molgraph;
pub mod pattern;
pub mod rule_evo;
pub mod ruleset;
