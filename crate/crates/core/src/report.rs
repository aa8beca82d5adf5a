//! Report envelope shared by every tool output. Each report embeds the
//! config digest, scale convention, and seed that produced it, so any
//! number in any file can be traced back to an exact rerun. Wall-clock
//! data lives in a separate `run_meta.json` — never inside a report, so
//! repeated runs produce byte-identical report files.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::detector::Mode;
use crate::Result;
use crate::io::write_json;

/// A tool's payload wrapped with the provenance that reproduces it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub tool: String,
    pub config_digest: String,
    pub mode: Mode,
    pub rng_seed: u64,
    pub payload: T,
}

impl<T> Report<T> {
    pub fn new(tool: &str, config: &RunConfig, payload: T) -> Report<T> {
        Report {
            tool: tool.to_string(),
            config_digest: config.digest(),
            mode: config.mode,
            rng_seed: config.rng_seed,
            payload,
        }
    }
}

impl<T: Serialize> Report<T> {
    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

/// Timing record written beside reports. Kept out of the reports
/// themselves so their bytes depend only on config and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub tool: String,
    pub started_unix_secs: u64,
    pub elapsed_secs: f64,
}

impl RunMeta {
    pub fn start(tool: &str) -> RunMetaTimer {
        RunMetaTimer {
            tool: tool.to_string(),
            started: SystemTime::now(),
            instant: std::time::Instant::now(),
        }
    }
}

/// Running timer; `finish` snapshots it into a serializable record.
pub struct RunMetaTimer {
    tool: String,
    started: SystemTime,
    instant: std::time::Instant,
}

impl RunMetaTimer {
    pub fn finish(self) -> RunMeta {
        RunMeta {
            tool: self.tool,
            started_unix_secs: self
                .started
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            elapsed_secs: self.instant.elapsed().as_secs_f64(),
        }
    }
}
