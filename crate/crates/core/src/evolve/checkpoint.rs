use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{EvolveConfig, Observer};
use crate::diagnostics::{invariants, InvariantTriple};
use crate::error::Result;
use crate::fields::io::{encode_binary, FieldMeta};
use crate::fields::ComplexField;

/// JSON written next to each checkpoint binary. The grid keys sit at the top
/// level so the file doubles as the sidecar read by `fields::io::read_field`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    #[serde(flatten)]
    pub grid: FieldMeta,
    pub config: EvolveConfig,
    pub invariants: InvariantTriple,
}

/// Writes `ckpt_NNNN.bin` / `ckpt_NNNN.json` into a directory whenever at
/// least `interval` of wall time has passed since the previous write.
#[derive(Debug)]
pub struct CheckpointObserver {
    dir: PathBuf,
    config: EvolveConfig,
    interval: Duration,
    last: Option<Instant>,
    pub written: Vec<PathBuf>,
}

impl CheckpointObserver {
    pub fn new(dir: &Path, config: EvolveConfig, interval: Duration) -> Self {
        Self { dir: dir.to_path_buf(), config, interval, last: None, written: Vec::new() }
    }

    pub fn write(&mut self, field: &ComplexField) -> Result<PathBuf> {
        let path = self.dir.join(format!("ckpt_{:04}.bin", self.written.len()));
        fs::write(&path, encode_binary(field))?;
        let record = CheckpointRecord { grid: FieldMeta::of(field), config: self.config, invariants: invariants(field) };
        fs::write(path.with_extension("json"), serde_json::to_string_pretty(&record)? + "\n")?;
        self.last = Some(Instant::now());
        self.written.push(path.clone());
        Ok(path)
    }
}

impl Observer for CheckpointObserver {
    fn observe(&mut self, field: &ComplexField) -> Result<()> {
        let due = match self.last {
            None => true,
            Some(t) => t.elapsed() >= self.interval,
        };
        if due {
            self.write(field)?;
        }
        Ok(())
    }
}
