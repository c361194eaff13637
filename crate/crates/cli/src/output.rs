//! Atomic file emission and the JSON report shapes.
//!
//! Everything numeric is serialized as a full-precision decimal string so
//! that identical configs produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fail;

/// Writes a file atomically (temp file + rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| format!("creating {}: {e}", dir.display()))?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f =
            fs::File::create(&tmp).map_err(|e| format!("creating {}: {e}", tmp.display()))?;
        f.write_all(bytes)
            .map_err(|e| format!("writing {}: {e}", tmp.display()))?;
        f.sync_all().ok();
    }
    fs::rename(&tmp, path).map_err(|e| format!("renaming to {}: {e}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| format!("serializing {}: {e}", path.display()))?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, String> {
    let bytes = fs::read(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    serde_json::from_slice(&bytes).map_err(|e| format!("parsing {}: {e}", path.display()))
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

/// CSV emission with a fixed header; fields are already strings.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), String> {
    let mut s = String::new();
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    write_atomic(path, s.as_bytes())
}

/// Two-column whitespace-separated plot data.
pub fn write_plot(path: &Path, rows: &[(String, String)]) -> Result<(), String> {
    let mut s = String::new();
    for (a, b) in rows {
        s.push_str(a);
        s.push(' ');
        s.push_str(b);
        s.push('\n');
    }
    write_atomic(path, s.as_bytes())
}

pub fn must<T>(r: Result<T, String>) -> T {
    match r {
        Ok(v) => v,
        Err(msg) => fail("E_CONFIG", 2, &msg),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TunedJson {
    pub version: String,
    pub precision: u32,
    pub family: String,
    pub parameters: serde_json::Map<String, serde_json::Value>,
    pub target: String,
    pub depth: usize,
    pub tol: String,
    pub t_star: String,
    pub verified_quotients: Vec<u64>,
    pub rho_estimate: String,
    pub rho_residual: String,
    pub bracket_width: String,
    pub probes: usize,
    pub descriptor: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct DenjoyJson {
    pub version: String,
    pub precision: u32,
    pub descriptor: String,
    pub target: String,
    pub alpha: String,
    pub n_max: usize,
    pub samples: usize,
    pub delta_hat: String,
    pub a_sup: String,
    pub lambda_hat: String,
    pub s_n_rate: Option<String>,
    pub kneps_rate: String,
    pub kneps_refined_max: String,
    pub max_exact_relation_residual: String,
    pub s_over_eps_max: String,
    pub s_over_eps_min: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct MeasureIdentityJson {
    pub level: usize,
    pub defect: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct ConjugacyJson {
    pub version: String,
    pub precision: u32,
    pub descriptor: String,
    pub target: String,
    pub orbit_length: usize,
    pub normalization: String,
    pub density_mass: String,
    pub min_h: String,
    pub max_h: String,
    pub gamma_gap_max: String,
    pub max_position_gap: String,
    pub homological_residual: String,
    pub homological_grid: usize,
    pub commutation_residual: String,
    pub measure_identity: Vec<MeasureIdentityJson>,
    pub holder_verdict: String,
    pub holder_slope: Option<String>,
    pub holder_scales_used: usize,
}
