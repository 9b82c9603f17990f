//! Feasibility of the additive and multiplicative spectral problems, and the
//! transfer of solutions between double cosets and dressing orbits.

mod instances;
mod problem;
mod screen;
mod solver;
mod transfer;

pub use instances::random_feasible_instance;
pub use problem::{Certificate, FeasibilityResult, Mode, SolverOptions, SpectraProblem, Verdict};
pub use screen::{weyl_necessary, ScreenResult};
pub use solver::{solve, solve_additive, solve_multiplicative, witness_constraint_defect, witness_spectrum_defect};
pub use transfer::{
    conjugate_solution, coset_label, product_residual, transfer_coset_to_dressing, transfer_coset_to_dressing_from,
    CosetSolution, DressingSolution,
};

use crate::error::Result;
use crate::lie::ChamberPoint;

/// The four equivalent formulations, in the order
/// multiplicative-complex, additive-complex, multiplicative-real, additive-real.
pub const EQUIVALENT_MODES: [Mode; 4] =
    [Mode::MultiplicativeComplex, Mode::AdditiveComplex, Mode::MultiplicativeReal, Mode::AdditiveReal];

#[derive(Debug, Clone)]
pub struct CrossCheckReport {
    pub entries: Vec<(Mode, FeasibilityResult)>,
    /// Some formulation is feasible while another is certified infeasible.
    pub contradiction: bool,
}

impl CrossCheckReport {
    pub fn all(&self, verdict: Verdict) -> bool {
        self.entries.iter().all(|(_, r)| r.verdict == verdict)
    }

    pub fn max_residual(&self) -> Option<f64> {
        self.entries.iter().filter_map(|(_, r)| r.residual).fold(None, |m, v| Some(m.map_or(v, |x: f64| x.max(v))))
    }
}

/// Runs the four untwisted solvers on the same labels.
pub fn cross_check(spectra: &[ChamberPoint], opts: &SolverOptions) -> Result<CrossCheckReport> {
    let mut entries = Vec::with_capacity(4);
    for mode in EQUIVALENT_MODES {
        let p = SpectraProblem::new(spectra.to_vec(), mode)?;
        entries.push((mode, solve(&p, opts)?));
    }
    let feasible = entries.iter().any(|(_, r)| r.verdict == Verdict::Feasible);
    let certified = entries.iter().any(|(_, r)| r.verdict == Verdict::InfeasibleCertified);
    Ok(CrossCheckReport { entries, contradiction: feasible && certified })
}
