//! Run configuration: JSON file in, flag overrides on top, then validation
//! into a fully resolved [`RunConfig`] that the reports embed verbatim.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use khess::hessalg::HermitianMatrix;
use khess::wirtinger::{stock_field_by_name, stock_field_names, stock_fields, PolyWire};
use khess::C;

use crate::CliError;

/// A field request: a stock field by name, or an inline polynomial given
/// as its wire form (multi-indices over the real coordinates).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSelect {
    Name(String),
    Inline { name: String, wire: PolyWire },
}

/// An inline Hermitian matrix for the identity suites, entries row-major
/// as `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixInput {
    pub name: String,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixInput {
    /// Validates squareness and Hermitian symmetry; any defect is a
    /// configuration error.
    pub fn to_matrix(&self) -> Result<HermitianMatrix<f64>, CliError> {
        let n = self.entries.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in &self.entries {
            if row.len() != n {
                return Err(CliError::validation(format!(
                    "matrix '{}' is not square: {} rows but a row of length {}",
                    self.name,
                    n,
                    row.len()
                )));
            }
            flat.extend(row.iter().map(|e| C::new(e[0], e[1])));
        }
        HermitianMatrix::from_entries(n, flat).map_err(|e| {
            CliError::validation(format!("matrix '{}' is not Hermitian: {e}", self.name))
        })
    }
}

/// The exact shape of the JSON config file. Every field is optional;
/// unknown keys are rejected so typos fail loudly.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    #[serde(alias = "R")]
    pub radius: Option<f64>,
    pub k: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub radial_order: Option<usize>,
    pub angular_count: Option<usize>,
    pub tol_scale: Option<f64>,
    pub fields: Option<Vec<FieldSelect>>,
    pub matrices: Option<Vec<MatrixInput>>,
    pub use_delta_oracle: Option<bool>,
    pub matrix_count: Option<usize>,
    pub point_count: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

/// Flag-level overrides (a subset of the file settings).
#[derive(Debug, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub radius: Option<f64>,
    pub k: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub radial_order: Option<usize>,
    pub angular_count: Option<usize>,
    pub tol_scale: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

/// Fully resolved, validated configuration. Serialized into every report
/// so a run can be reproduced from the report alone.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub radius: f64,
    pub k: Vec<usize>,
    pub seed: u64,
    pub radial_order: usize,
    pub angular_count: usize,
    pub tol_scale: f64,
    pub fields: Vec<FieldSelect>,
    pub matrices: Vec<MatrixInput>,
    pub use_delta_oracle: bool,
    pub matrix_count: usize,
    pub point_count: usize,
    pub out_dir: PathBuf,
}

/// Largest dimension the generalized-delta reference formulas serve.
pub const ORACLE_DIM_LIMIT: usize = 4;

pub fn load_config_file(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::validation(format!("cannot read config {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::validation(format!("cannot parse config {}: {e}", path.display()))
    })
}

pub fn resolve(file: ConfigFile, over: Overrides) -> Result<RunConfig, CliError> {
    let n = over.n.or(file.n).unwrap_or(3);
    let cfg = RunConfig {
        n,
        radius: over.radius.or(file.radius).unwrap_or(1.0),
        k: over.k.or(file.k).unwrap_or_else(|| vec![1, 2]),
        seed: over.seed.or(file.seed).unwrap_or(42),
        radial_order: over.radial_order.or(file.radial_order).unwrap_or(16),
        angular_count: over.angular_count.or(file.angular_count).unwrap_or(4096),
        tol_scale: over.tol_scale.or(file.tol_scale).unwrap_or(1.0),
        fields: file.fields.unwrap_or_default(),
        matrices: file.matrices.unwrap_or_default(),
        use_delta_oracle: file.use_delta_oracle.unwrap_or(n <= ORACLE_DIM_LIMIT),
        matrix_count: file.matrix_count.unwrap_or(200),
        point_count: file.point_count.unwrap_or(100),
        out_dir: over.out_dir.or(file.out_dir).unwrap_or_else(|| PathBuf::from("reports")),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.n == 0 {
        return Err(CliError::validation("n must be at least 1"));
    }
    if !cfg.radius.is_finite() || cfg.radius <= 0.0 {
        return Err(CliError::validation(format!("radius must be positive, got {}", cfg.radius)));
    }
    if cfg.k.is_empty() {
        return Err(CliError::validation("k list must not be empty"));
    }
    for &k in &cfg.k {
        if k == 0 || k > cfg.n {
            return Err(CliError::validation(format!(
                "k = {k} out of range for n = {} (need 1 <= k <= n)",
                cfg.n
            )));
        }
    }
    if !cfg.tol_scale.is_finite() || cfg.tol_scale <= 0.0 {
        return Err(CliError::validation(format!(
            "tol_scale must be positive, got {}",
            cfg.tol_scale
        )));
    }
    if cfg.use_delta_oracle && cfg.n > ORACLE_DIM_LIMIT {
        return Err(CliError::validation(format!(
            "oracle limit: the generalized-delta reference serves n <= {ORACLE_DIM_LIMIT}, got n = {}",
            cfg.n
        )));
    }
    if cfg.matrix_count == 0 || cfg.point_count == 0 {
        return Err(CliError::validation("matrix_count and point_count must be at least 1"));
    }
    for m in &cfg.matrices {
        let mat = m.to_matrix()?;
        if mat.n() != cfg.n {
            return Err(CliError::validation(format!(
                "matrix '{}' has dimension {} but the run dimension is {}",
                m.name,
                mat.n(),
                cfg.n
            )));
        }
    }
    Ok(())
}

/// A named polynomial field ready to run.
pub struct ResolvedField {
    pub name: String,
    pub field: khess::PolyField64,
}

/// Expands the field selection (default: the whole stock list) into
/// concrete polynomials. Unknown names and mismatched inline dimensions
/// are configuration errors.
pub fn resolve_fields(cfg: &RunConfig) -> Result<Vec<ResolvedField>, CliError> {
    if cfg.fields.is_empty() {
        return Ok(stock_fields(cfg.n, cfg.radius)
            .into_iter()
            .map(|s| ResolvedField { name: s.name.to_string(), field: s.field })
            .collect());
    }
    let mut out = Vec::with_capacity(cfg.fields.len());
    for select in &cfg.fields {
        match select {
            FieldSelect::Name(name) => {
                let field = stock_field_by_name(name, cfg.n, cfg.radius).ok_or_else(|| {
                    CliError::validation(format!(
                        "unknown stock field '{name}'; available: {}",
                        stock_field_names().join(", ")
                    ))
                })?;
                out.push(ResolvedField { name: name.clone(), field });
            }
            FieldSelect::Inline { name, wire } => {
                if wire.n != cfg.n {
                    return Err(CliError::validation(format!(
                        "inline field '{name}' has n = {} but the run dimension is {}",
                        wire.n, cfg.n
                    )));
                }
                let field = khess::PolyField64::from_wire(wire).map_err(|e| {
                    CliError::validation(format!("inline field '{name}': {e}"))
                })?;
                if !field.is_real_valued(1e-12) {
                    return Err(CliError::validation(format!(
                        "inline field '{name}' is not real-valued"
                    )));
                }
                out.push(ResolvedField { name: name.clone(), field });
            }
        }
    }
    Ok(out)
}
