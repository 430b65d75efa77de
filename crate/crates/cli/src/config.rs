//! Run configuration: one JSON document per run, overridden field by field by flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use affmax::FamilySpec;

use crate::{Common, Failure, FamilyArgs};

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub theorem: Option<String>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub theta: Option<f64>,
    pub theta_range: Option<String>,
    pub variant: Option<String>,
    pub spec: Option<FamilySpec>,
    pub samples: Option<usize>,
    pub grid: Option<Vec<usize>>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// Settings shared by all commands after merging.
#[derive(Debug, Clone)]
pub struct Context {
    pub grid: Option<Vec<usize>>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// Family selection after merging.
#[derive(Debug, Clone, Default)]
pub struct FamilySel {
    pub theorem: Option<String>,
    pub n: Option<usize>,
    pub theta: Option<f64>,
    pub variant: Option<String>,
    pub spec: Option<FamilySpec>,
    pub spec_error: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, Failure> {
        let text =
            fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
    }

    pub fn merge_common(&self, c: &Common) -> Context {
        Context {
            grid: c.grid.clone().or_else(|| self.grid.clone()),
            tol: c.tol.or(self.tol),
            seed: c.seed.or(self.seed).unwrap_or(1),
            out: c.out.clone().or_else(|| self.out.clone()),
            workers: c.workers.or(self.workers),
        }
    }

    pub fn merge_family(&self, f: &FamilyArgs) -> FamilySel {
        let (spec, spec_error) = match &f.spec {
            Some(s) => match parse_spec(s) {
                Ok(spec) => (Some(spec), None),
                Err(e) => (None, Some(e)),
            },
            None => (self.spec.clone(), None),
        };
        FamilySel {
            theorem: f.theorem.clone().or_else(|| self.theorem.clone()),
            n: f.n.or(self.n),
            theta: f.theta.or(self.theta),
            variant: f.variant.clone().or_else(|| self.variant.clone()),
            spec,
            spec_error,
        }
    }
}

/// A spec argument is a path when such a file exists, otherwise inline JSON.
fn parse_spec(arg: &str) -> Result<FamilySpec, String> {
    let text = if Path::new(arg).is_file() {
        fs::read_to_string(arg).map_err(|e| format!("cannot read spec {arg}: {e}"))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| format!("bad family spec: {e}"))
}
