//! Necessary conditions shared by all modes.
//!
//! If `Σ B_j = 0` then `Σ_{j≠j0} B_j = -B_{j0}`, and subadditivity of the
//! largest eigenvalue gives `Σ_{j≠j0} λ_max(B_j) ≥ -λ_min(B_{j0})`, with the
//! mirrored bound for `λ_min`. For `A_1⋯A_n = I` the same inequalities hold
//! for the logarithms of the eigenvalues of `A A^†` by submultiplicativity of
//! the operator norm, and `|det| = 1` gives the trace condition.

use super::problem::{Certificate, Mode, SpectraProblem};

pub const TRACE_TOL: f64 = 1e-9;
const INEQUALITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenResult {
    pub passed: bool,
    pub certificate: Option<Certificate>,
    pub trace_sum: f64,
}

pub fn weyl_necessary(p: &SpectraProblem) -> ScreenResult {
    let trace_sum = p.trace_sum();
    let fail = |kind: &str, detail: String, violation: f64| ScreenResult {
        passed: false,
        certificate: Some(Certificate { kind: kind.into(), detail, violation }),
        trace_sum,
    };
    if !(trace_sum.abs() <= TRACE_TOL) {
        return fail("trace", format!("sum of all labels is {trace_sum:.6e}, not 0"), trace_sum.abs());
    }
    if matches!(p.mode, Mode::TwistedAdditive | Mode::TwistedMultiplicative) {
        for (j, s) in p.spectra.iter().enumerate() {
            let d = s.max_distance(&s.negated_reversed());
            if d > TRACE_TOL {
                return fail("symmetry", format!("label {j} is not invariant under λ ↦ -reversed(λ)"), d);
            }
        }
    }
    let scale = p.spectra.iter().flat_map(|s| s.values()).fold(1.0_f64, |m, v| m.max(v.abs()));
    let tol = INEQUALITY_TOL * scale * p.n as f64;
    let maxes: Vec<f64> = p.spectra.iter().map(|s| s.values()[0]).collect();
    let mins: Vec<f64> = p.spectra.iter().map(|s| *s.values().last().expect("r >= 1")).collect();
    let sum_max: f64 = maxes.iter().sum();
    let sum_min: f64 = mins.iter().sum();
    for j0 in 0..p.n {
        let upper = sum_max - maxes[j0] + mins[j0];
        if upper < -tol {
            return fail(
                "weyl",
                format!("sum of largest labels over factors other than {j0} is below minus the smallest label of factor {j0}"),
                -upper,
            );
        }
        let lower = sum_min - mins[j0] + maxes[j0];
        if lower > tol {
            return fail(
                "weyl",
                format!("sum of smallest labels over factors other than {j0} exceeds minus the largest label of factor {j0}"),
                lower,
            );
        }
    }
    ScreenResult { passed: true, certificate: None, trace_sum }
}
