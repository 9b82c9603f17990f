use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::ChamberPoint;
use crate::linalg::CMat;

/// Which of the singular-value / eigenvalue problems is posed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    AdditiveComplex,
    MultiplicativeComplex,
    AdditiveReal,
    MultiplicativeReal,
    TwistedMultiplicative,
    TwistedAdditive,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::AdditiveComplex,
        Mode::MultiplicativeComplex,
        Mode::AdditiveReal,
        Mode::MultiplicativeReal,
        Mode::TwistedMultiplicative,
        Mode::TwistedAdditive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::AdditiveComplex => "additive-complex",
            Mode::MultiplicativeComplex => "multiplicative-complex",
            Mode::AdditiveReal => "additive-real",
            Mode::MultiplicativeReal => "multiplicative-real",
            Mode::TwistedMultiplicative => "twisted-multiplicative",
            Mode::TwistedAdditive => "twisted-additive",
        }
    }

    pub fn is_additive(self) -> bool {
        matches!(self, Mode::AdditiveComplex | Mode::AdditiveReal | Mode::TwistedAdditive)
    }

    pub fn is_real(self) -> bool {
        matches!(self, Mode::AdditiveReal | Mode::MultiplicativeReal)
    }

    pub fn is_twisted(self) -> bool {
        matches!(self, Mode::TwistedAdditive | Mode::TwistedMultiplicative)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mode {s:?}")))
    }
}

/// A feasibility instance: `n` radial labels of size `r`.
///
/// For multiplicative modes the labels are logarithms of the eigenvalues of
/// `A A^†`, so the conventional singular values are `exp(λ/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectraProblem {
    pub r: usize,
    pub n: usize,
    pub spectra: Vec<ChamberPoint>,
    pub mode: Mode,
}

impl SpectraProblem {
    pub fn new(spectra: Vec<ChamberPoint>, mode: Mode) -> Result<Self> {
        let n = spectra.len();
        if n == 0 {
            return Err(Error::InvalidParameter("at least one spectrum is required".into()));
        }
        let r = spectra[0].dim();
        for s in &spectra {
            if s.dim() != r {
                return Err(Error::DimensionMismatch { expected: r, found: s.dim() });
            }
        }
        Ok(Self { r, n, spectra, mode })
    }

    /// Builds a problem from raw vectors, rejecting unsorted input.
    pub fn from_vectors(spectra: Vec<Vec<f64>>, mode: Mode) -> Result<Self> {
        let spectra = spectra.into_iter().map(ChamberPoint::new).collect::<Result<Vec<_>>>()?;
        Self::new(spectra, mode)
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Self { mode, ..self.clone() }
    }

    pub fn trace_sum(&self) -> f64 {
        self.spectra.iter().map(ChamberPoint::sum).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Feasible,
    InfeasibleCertified,
    Undetermined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Feasible => "feasible",
            Verdict::InfeasibleCertified => "infeasible-certified",
            Verdict::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A violated necessary condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `trace`, `weyl` or `symmetry`.
    pub kind: String,
    pub detail: String,
    /// Amount by which the inequality fails.
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    pub verdict: Verdict,
    /// `B_j` (additive) or `A_j` (multiplicative), empty unless a search ran.
    pub witnesses: Vec<CMat>,
    /// Frobenius norm of `Σ B_j` or `A_1⋯A_n - I`; `None` if no search ran.
    pub residual: Option<f64>,
    pub restarts_used: usize,
    pub iterations: usize,
    pub certificate: Option<Certificate>,
    /// Residual after each accepted step of the winning restart.
    pub residual_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub polish_tol: f64,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-6, polish_tol: 1e-12, restarts: 32, max_iters: 5000, seed: 0 }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.polish_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParameter("restarts and max_iters must be at least 1".into()));
        }
        Ok(())
    }
}
