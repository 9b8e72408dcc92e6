//! Run provenance. Every emitted artifact carries (or references) a
//! manifest sufficient to reproduce it: the exact command, the seed and
//! where it came from, the parameter block and the substream derivation
//! scheme. Integer-mode outputs are bit-reproducible from the manifest on
//! the same platform.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    /// "flag", "env" (LL_SEED) or "entropy".
    pub seed_source: String,
    pub params: Value,
    pub artifact_version: String,
    pub timestamp_unix: u64,
    pub threads: usize,
    /// How per-trial substreams derive from the root seed.
    pub substream_scheme: String,
}

pub const SUBSTREAM_SCHEME: &str =
    "ChaCha8(seed).stream(splitmix_chain(tag, indices...)); see rng::substream_id";

impl RunManifest {
    pub fn new(
        command: String,
        seed: u64,
        seed_source: &str,
        params: Value,
        threads: usize,
    ) -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            command,
            seed,
            seed_source: seed_source.to_string(),
            params,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix,
            threads,
            substream_scheme: SUBSTREAM_SCHEME.to_string(),
        }
    }
}
