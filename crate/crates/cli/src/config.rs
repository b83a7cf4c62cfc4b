//! Experiment document `{ "pam": {...}, "canonical": {...}, "sim": {...} }`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use pamflow_core::{Pam, Params};
use pamflow_sim::SimConfig;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub pam: Option<Pam>,
    pub canonical: Option<Params>,
    pub sim: Option<SimConfig>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}
