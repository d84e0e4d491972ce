//! The on-disk protocol-run record: the `ProtocolResult` plus the exact
//! configuration and library version that produced it.

use serde::{Deserialize, Serialize};
use shotqaoa::protocol::{ProtocolConfig, ProtocolResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolRecord {
    pub library_version: String,
    pub instance: String,
    pub p: usize,
    pub backend: String,
    pub config: ProtocolConfig,
    pub result: ProtocolResult,
}

impl ProtocolRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serialization cannot fail")
    }
}
