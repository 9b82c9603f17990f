//! Input schemas, JSON helpers and atomic report writing.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use poissonlin::linalg::{self, CMat};
use poissonlin::thompson::{Mode, SpectraProblem};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub r: usize,
    pub n: usize,
    pub spectra: Vec<Vec<f64>>,
    pub mode: Mode,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    /// Rows of `[re, im]` pairs.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

pub fn read_problem(path: &Path, mode_override: Option<Mode>) -> anyhow::Result<SpectraProblem> {
    let file: ProblemFile = read_json(path)?;
    if file.spectra.len() != file.n {
        bail!("{}: field `n` is {} but `spectra` has {} entries", path.display(), file.n, file.spectra.len());
    }
    if let Some((j, s)) = file.spectra.iter().enumerate().find(|(_, s)| s.len() != file.r) {
        bail!("{}: `spectra[{j}]` has {} entries, expected r = {}", path.display(), s.len(), file.r);
    }
    let problem = SpectraProblem::from_vectors(file.spectra, mode_override.unwrap_or(file.mode))
        .map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(problem)
}

pub fn read_matrix(path: &Path) -> anyhow::Result<CMat> {
    let file: MatrixFile = read_json(path)?;
    let r = file.matrix.len();
    if r == 0 || file.matrix.iter().any(|row| row.len() != r) {
        bail!("{}: field `matrix` must be a non-empty square array", path.display());
    }
    Ok(CMat::from_fn(r, r, |i, j| linalg::c(file.matrix[i][j][0], file.matrix[i][j][1])))
}

pub fn complex_matrix(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

/// Writes via a temporary file in the target directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| anyhow!("cannot write {}: {}", path.display(), e.error))?;
    Ok(())
}

/// Comma-separated reals, e.g. `1,-1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
            .collect::<Result<_, _>>()
            .map(FloatList)
    }
}
