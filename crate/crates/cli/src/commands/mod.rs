pub mod bench;
pub mod generate;
pub mod landscape;
pub mod protocol;
pub mod report;

use anyhow::{Context, Result};
use shotqaoa::problems::ProblemInstance;
use shotqaoa::protocol::FixedParameterTable;
use std::path::Path;

/// Loads an instance file with path context on failure.
pub fn load_instance(path: &Path) -> Result<ProblemInstance> {
    ProblemInstance::load(path).with_context(|| format!("loading instance {}", path.display()))
}

/// The built-in fixed-parameter table, or an override file.
pub fn load_table(path: Option<&Path>) -> Result<FixedParameterTable> {
    match path {
        None => Ok(FixedParameterTable::builtin()),
        Some(path) => FixedParameterTable::load(path)
            .with_context(|| format!("loading fixed-parameter table {}", path.display())),
    }
}
