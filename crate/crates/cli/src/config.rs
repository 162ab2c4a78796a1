//! Run configuration: one TOML file, overridden field by field by flags.
//!
//! ```toml
//! network = "../crates/core/fixtures/tanh_demo.json"   # relative to this file
//! delta = 0.1
//! seed = 7
//! samples = 10000
//! point = [0.5, 0.5]                 # eval / sensitivity
//!
//! [[input]]                           # union of boxes, one table per box
//! bounds = [[-1.0, 2.0], [0.4, 0.6]]
//!
//! spec = [{ min = -3.7, max = -1.5 }, {}]   # one entry per output, {} = free
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::failure::Failure;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub network: Option<PathBuf>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub point: Option<Vec<f64>>,
    /// Previously exported tubes, used by `sample` instead of recomputing.
    pub tubes: Option<PathBuf>,
    #[serde(default)]
    pub input: Vec<BoxDoc>,
    pub spec: Option<Vec<BoundDoc>>,
    pub arm: Option<ArmDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDoc {
    pub bounds: Vec<[f64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundDoc {
    pub min: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmDoc {
    pub link1: Option<f64>,
    pub link2: Option<f64>,
    pub theta1_zone: Option<[f64; 2]>,
    pub theta2_zone: Option<[f64; 2]>,
    pub grid: Option<usize>,
}

impl FileConfig {
    /// Parses `path` and rebases its relative paths onto the file's directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::from_io(path, e))?;
        let mut cfg: FileConfig = toml::from_str(&text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.network, &mut cfg.out, &mut cfg.tubes].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}
