use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rectpack_core::lshape::LShape;
use rectpack_core::model::{Container, Instance, InstanceRef, Packing, Placement};
use rectpack_core::rational::{parse_q, Q};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    pub fn new(code: i32, msg: impl Into<String>) -> Self {
        CliError { code, msg: msg.into() }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::new(EXIT_USAGE, msg)
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::new(EXIT_INVALID, msg)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Packing file written by `solve`/`oracle` and read by `verify`/`render`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceRef>,
    pub placements: Vec<Placement>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub containers: Vec<Container>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lshape: Option<LShape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profit: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified: Option<bool>,
}

impl SolutionFile {
    pub fn packing(&self) -> Packing {
        Packing::new(self.placements.clone())
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn read_instance(path: &Path) -> CliResult<Instance> {
    let inst: Instance = read_json(path)?;
    inst.check().map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Ok(inst)
}

/// Instance from `--instance`, falling back to the packing file's reference.
pub fn resolve_instance(explicit: Option<&Path>, sol: &SolutionFile, sol_path: &Path) -> CliResult<Instance> {
    if let Some(p) = explicit {
        return read_instance(p);
    }
    match &sol.instance {
        Some(InstanceRef::Inline(i)) => {
            i.check().map_err(|e| CliError::usage(e.to_string()))?;
            Ok(i.clone())
        }
        Some(InstanceRef::Path(p)) => {
            let direct = PathBuf::from(p);
            let rel = sol_path.parent().map(|d| d.join(p)).unwrap_or_else(|| direct.clone());
            read_instance(if direct.exists() { &direct } else { &rel })
        }
        None => Err(CliError::usage("no --instance given and the packing file names none")),
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serialisable") + "\n"
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::usage(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::usage(e.to_string()))
        }
    }
}

pub fn rational(s: &str) -> Result<Q, String> {
    let q = parse_q(s).map_err(|e| e.to_string())?;
    if q <= Q::from_integer(0) {
        return Err(format!("`{s}` must be positive"));
    }
    Ok(q)
}

pub fn threads() -> usize {
    std::env::var("RECTPACK_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
