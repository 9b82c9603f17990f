//! Riemannian Levenberg-Marquardt search over products of compact groups.
//!
//! Every mode is written as `X_j = G_j D_j H_j^†` with a fixed base matrix
//! `D_j` carrying the prescribed label and `G_j, H_j` ranging over a compact
//! group (`H_j = G_j` in additive modes). Twisted modes are solved in the
//! eigenbasis `W` of `P`, where the fixed-point subgroup is block diagonal.

use nalgebra::Cholesky;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lie::orthonormal_basis;
use crate::linalg::{self, re, CMat, RMat};
use crate::rng::stream;

use super::problem::{FeasibilityResult, Mode, SolverOptions, SpectraProblem, Verdict};
use super::screen::weyl_necessary;

/// Restarts evaluated together; fixed so results do not depend on the
/// number of worker threads.
const BATCH: usize = 4;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;
const STALL_WINDOW: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GroupKind {
    Unitary,
    SpecialOrthogonal,
    /// `U(p) x U(r-p)` in the eigenbasis of `P`.
    Block(usize),
}

/// Eigenbasis of the anti-diagonal permutation: `+1` eigenvectors first.
pub(crate) fn twisted_frame(r: usize) -> (CMat, usize) {
    let q = r / 2;
    let p = r - q;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut w = CMat::zeros(r, r);
    for i in 0..q {
        w[(i, i)] = re(s);
        w[(r - 1 - i, i)] = re(s);
        w[(i, p + i)] = re(s);
        w[(r - 1 - i, p + i)] = re(-s);
    }
    if p > q {
        w[(q, q)] = re(1.0);
    }
    (w, p)
}

struct Layout {
    r: usize,
    additive: bool,
    kind: GroupKind,
    bases: Vec<CMat>,
    algebra: Vec<CMat>,
    frame: Option<CMat>,
}

impl Layout {
    fn new(p: &SpectraProblem) -> Self {
        let r = p.r;
        let (kind, frame) = match p.mode {
            Mode::AdditiveComplex | Mode::MultiplicativeComplex => (GroupKind::Unitary, None),
            Mode::AdditiveReal | Mode::MultiplicativeReal => (GroupKind::SpecialOrthogonal, None),
            Mode::TwistedAdditive | Mode::TwistedMultiplicative => {
                let (w, plus) = twisted_frame(r);
                (GroupKind::Block(plus), Some(w))
            }
        };
        let bases = p.spectra.iter().map(|s| base_matrix(p.mode, s.values())).collect();
        Self { r, additive: p.mode.is_additive(), kind, bases, algebra: algebra_basis(kind, r), frame }
    }

    fn groups_per_factor(&self) -> usize {
        if self.additive {
            1
        } else {
            2
        }
    }

    fn random_group<R: Rng>(&self, rng: &mut R) -> CMat {
        match self.kind {
            GroupKind::Unitary => linalg::haar_unitary(rng, self.r),
            GroupKind::SpecialOrthogonal => linalg::haar_special_orthogonal(rng, self.r),
            GroupKind::Block(p) => {
                let a = linalg::haar_unitary(rng, p);
                let b = linalg::haar_unitary(rng, self.r - p);
                block_diag(&a, &b)
            }
        }
    }

    fn retract(&self, g: &CMat, y: &CMat) -> CMat {
        let moved = g * (linalg::identity(self.r) + y);
        let (mut q, _) = linalg::qr_positive(&moved).expect("I + skew is invertible");
        match self.kind {
            GroupKind::SpecialOrthogonal => q.apply(|z| *z = re(z.re)),
            GroupKind::Block(p) => {
                for i in 0..self.r {
                    for j in 0..self.r {
                        if (i < p) != (j < p) {
                            q[(i, j)] = Complex64::default();
                        }
                    }
                }
            }
            GroupKind::Unitary => {}
        }
        q
    }

    /// Factors `X_j` in working coordinates.
    fn factors(&self, groups: &[CMat]) -> Vec<CMat> {
        self.bases
            .iter()
            .enumerate()
            .map(|(j, d)| {
                if self.additive {
                    &groups[j] * d * groups[j].adjoint()
                } else {
                    &groups[2 * j] * d * groups[2 * j + 1].adjoint()
                }
            })
            .collect()
    }

    fn residual_matrix(&self, factors: &[CMat]) -> CMat {
        if self.additive {
            factors.iter().fold(CMat::zeros(self.r, self.r), |acc, x| acc + x)
        } else {
            factors.iter().fold(linalg::identity(self.r), |acc, x| acc * x) - linalg::identity(self.r)
        }
    }

    fn jacobian(&self, groups: &[CMat], factors: &[CMat]) -> RMat {
        let n = factors.len();
        let m = 2 * self.r * self.r;
        let dim = self.algebra.len();
        let mut jac = RMat::zeros(m, groups.len() * dim);
        let mut put = |col: usize, d: &CMat| {
            for (row, v) in linalg::flatten_re_im(d).into_iter().enumerate() {
                jac[(row, col)] = v;
            }
        };
        if self.additive {
            for j in 0..n {
                let g = &groups[j];
                for (k, y) in self.algebra.iter().enumerate() {
                    let d = g * linalg::commutator(y, &self.bases[j]) * g.adjoint();
                    put(j * dim + k, &d);
                }
            }
        } else {
            let mut prefix = Vec::with_capacity(n);
            let mut acc = linalg::identity(self.r);
            for f in factors {
                prefix.push(acc.clone());
                acc = acc * f;
            }
            let mut suffix = vec![linalg::identity(self.r); n];
            for j in (0..n.saturating_sub(1)).rev() {
                suffix[j] = &factors[j + 1] * &suffix[j + 1];
            }
            for j in 0..n {
                let g = &groups[2 * j];
                let h = &groups[2 * j + 1];
                let left = &prefix[j] * g;
                let right = h.adjoint() * &suffix[j];
                for (k, y) in self.algebra.iter().enumerate() {
                    put((2 * j) * dim + k, &(&left * y * &self.bases[j] * &right));
                    put((2 * j + 1) * dim + k, &(-(&left * &self.bases[j] * y * &right)));
                }
            }
        }
        jac
    }

    fn to_original(&self, x: &CMat) -> CMat {
        match &self.frame {
            Some(w) => w * x * w.adjoint(),
            None => x.clone(),
        }
    }
}

fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let p = a.nrows();
    let r = p + b.nrows();
    let mut m = CMat::zeros(r, r);
    m.view_mut((0, 0), (p, p)).copy_from(a);
    m.view_mut((p, p), (r - p, r - p)).copy_from(b);
    m
}

fn algebra_basis(kind: GroupKind, r: usize) -> Vec<CMat> {
    match kind {
        GroupKind::Unitary => orthonormal_basis(r).into_iter().map(|e| e.into_matrix()).collect(),
        GroupKind::SpecialOrthogonal => {
            let mut out = Vec::new();
            for j in 0..r {
                for k in j + 1..r {
                    let mut m = CMat::zeros(r, r);
                    m[(j, k)] = re(1.0);
                    m[(k, j)] = re(-1.0);
                    out.push(m);
                }
            }
            out
        }
        GroupKind::Block(p) => {
            let embed = |m: CMat, offset: usize| {
                let mut out = CMat::zeros(r, r);
                let s = m.nrows();
                out.view_mut((offset, offset), (s, s)).copy_from(&m);
                out
            };
            let mut out: Vec<CMat> = orthonormal_basis(p).into_iter().map(|e| embed(e.into_matrix(), 0)).collect();
            if r > p {
                out.extend(orthonormal_basis(r - p).into_iter().map(|e| embed(e.into_matrix(), p)));
            }
            out
        }
    }
}

/// Base matrix with the prescribed label, in working coordinates.
fn base_matrix(mode: Mode, lambda: &[f64]) -> CMat {
    let r = lambda.len();
    let q = r / 2;
    let p = r - q;
    match mode {
        Mode::AdditiveComplex | Mode::AdditiveReal => linalg::diag_real(lambda),
        Mode::MultiplicativeComplex | Mode::MultiplicativeReal => {
            linalg::diag_real(&lambda.iter().map(|v| (0.5 * v).exp()).collect::<Vec<_>>())
        }
        Mode::TwistedAdditive => {
            let mut m = CMat::zeros(r, r);
            for i in 0..q {
                m[(i, p + i)] = re(lambda[i]);
                m[(p + i, i)] = re(lambda[i]);
            }
            m
        }
        Mode::TwistedMultiplicative => {
            let mut m = linalg::identity(r);
            for i in 0..q {
                let t = 0.5 * lambda[i];
                m[(i, i)] = re(t.cosh());
                m[(p + i, p + i)] = re(t.cosh());
                m[(i, p + i)] = re(t.sinh());
                m[(p + i, i)] = re(t.sinh());
            }
            m
        }
    }
}

struct Outcome {
    groups: Vec<CMat>,
    residual: f64,
    iterations: usize,
    trace: Vec<f64>,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn run_restart(layout: &Layout, opts: &SolverOptions, n: usize, index: usize) -> Outcome {
    let mut rng = stream(opts.seed, index as u64);
    let count = n * layout.groups_per_factor();
    let mut groups: Vec<CMat> = (0..count).map(|_| layout.random_group(&mut rng)).collect();
    let mut factors = layout.factors(&groups);
    let mut res = linalg::flatten_re_im(&layout.residual_matrix(&factors));
    let mut f = 0.5 * res.iter().map(|v| v * v).sum::<f64>();
    let mut trace = vec![(2.0 * f).sqrt()];
    let mut nu = 1.0;
    let dim = layout.algebra.len();
    let mut iterations = 0;
    while iterations < opts.max_iters {
        let current = (2.0 * f).sqrt();
        if current <= opts.polish_tol || dim == 0 {
            break;
        }
        if trace.len() > STALL_WINDOW {
            let old = trace[trace.len() - 1 - STALL_WINDOW];
            if current > opts.tol && current > 0.999 * old {
                break;
            }
        }
        iterations += 1;
        let jac = layout.jacobian(&groups, &factors);
        let rvec = RMat::from_column_slice(res.len(), 1, &res);
        let grad = jac.transpose() * &rvec;
        if grad.amax() <= 1e-15 * current.max(1.0) {
            break;
        }
        let mut accepted = false;
        for _attempt in 0..8 {
            let mu = nu * 2.0 * f + 1e-15;
            let mut jjt = &jac * jac.transpose();
            for i in 0..jjt.nrows() {
                jjt[(i, i)] += mu;
            }
            let Some(chol) = Cholesky::new(jjt) else {
                nu *= 10.0;
                continue;
            };
            let step = -(jac.transpose() * chol.solve(&rvec));
            let slope = (grad.transpose() * &step)[(0, 0)];
            if !(slope < 0.0) {
                nu *= 10.0;
                continue;
            }
            let mut alpha = 1.0;
            for _ in 0..MAX_HALVINGS {
                let trial: Vec<CMat> = groups
                    .iter()
                    .enumerate()
                    .map(|(i, g)| {
                        let mut y = CMat::zeros(layout.r, layout.r);
                        for (k, a) in layout.algebra.iter().enumerate() {
                            y += a.scale(alpha * step[(i * dim + k, 0)]);
                        }
                        layout.retract(g, &y)
                    })
                    .collect();
                let trial_factors = layout.factors(&trial);
                let trial_res = linalg::flatten_re_im(&layout.residual_matrix(&trial_factors));
                let trial_f = 0.5 * trial_res.iter().map(|v| v * v).sum::<f64>();
                if trial_f <= f + ARMIJO * alpha * slope {
                    groups = trial;
                    factors = trial_factors;
                    res = trial_res;
                    f = trial_f;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if accepted {
                nu = if alpha == 1.0 { (nu * 0.25).max(1e-8) } else { nu * 4.0 };
                break;
            }
            nu *= 10.0;
        }
        if !accepted {
            break;
        }
        trace.push((2.0 * f).sqrt());
    }
    Outcome { groups, residual: norm(&res), iterations, trace }
}

fn check_mode(p: &SpectraProblem, additive: bool) -> Result<()> {
    if p.mode.is_additive() != additive {
        return Err(Error::InvalidParameter(format!(
            "mode {} is not {}",
            p.mode,
            if additive { "additive" } else { "multiplicative" }
        )));
    }
    Ok(())
}

pub fn solve_additive(p: &SpectraProblem, opts: &SolverOptions) -> Result<FeasibilityResult> {
    check_mode(p, true)?;
    solve(p, opts)
}

pub fn solve_multiplicative(p: &SpectraProblem, opts: &SolverOptions) -> Result<FeasibilityResult> {
    check_mode(p, false)?;
    solve(p, opts)
}

/// Screens with the necessary conditions, then searches with restarts.
pub fn solve(p: &SpectraProblem, opts: &SolverOptions) -> Result<FeasibilityResult> {
    opts.validate()?;
    let screen = weyl_necessary(p);
    if !screen.passed {
        return Ok(FeasibilityResult {
            verdict: Verdict::InfeasibleCertified,
            witnesses: Vec::new(),
            residual: None,
            restarts_used: 0,
            iterations: 0,
            certificate: screen.certificate,
            residual_trace: Vec::new(),
        });
    }
    let layout = Layout::new(p);
    let mut best: Option<(usize, Outcome)> = None;
    let mut iterations = 0;
    let mut used = 0;
    let mut start = 0;
    while start < opts.restarts {
        let end = (start + BATCH).min(opts.restarts);
        let batch: Vec<Outcome> = (start..end).into_par_iter().map(|i| run_restart(&layout, opts, p.n, i)).collect();
        for (offset, outcome) in batch.into_iter().enumerate() {
            iterations += outcome.iterations;
            let better = match &best {
                None => true,
                Some((_, b)) => outcome.residual < b.residual,
            };
            if better {
                best = Some((start + offset, outcome));
            }
        }
        used = end;
        if best.as_ref().is_some_and(|(_, b)| b.residual <= opts.tol) {
            break;
        }
        start = end;
    }
    let (_, outcome) = best.expect("at least one restart");
    let witnesses = layout.factors(&outcome.groups).iter().map(|x| layout.to_original(x)).collect();
    log::debug!("{} solve: residual {:.3e} after {} restarts", p.mode, outcome.residual, used);
    Ok(FeasibilityResult {
        verdict: if outcome.residual <= opts.tol { Verdict::Feasible } else { Verdict::Undetermined },
        witnesses,
        residual: Some(outcome.residual),
        restarts_used: used,
        iterations,
        certificate: None,
        residual_trace: outcome.trace,
    })
}

/// Largest deviation of the witnesses' labels from the prescribed ones.
pub fn witness_spectrum_defect(p: &SpectraProblem, witnesses: &[CMat]) -> f64 {
    witnesses
        .iter()
        .zip(&p.spectra)
        .map(|(w, s)| {
            let got = if p.mode.is_additive() {
                linalg::herm_eigenvalues(&linalg::hermitian_part(w))
            } else {
                linalg::herm_eigenvalues(&(w * w.adjoint())).into_iter().map(f64::ln).collect()
            };
            got.iter().zip(s.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Largest violation of the structural constraint of the mode: hermiticity,
/// reality, `PB + BP = 0` or `P A^† P A = I`.
pub fn witness_constraint_defect(mode: Mode, witnesses: &[CMat]) -> f64 {
    witnesses
        .iter()
        .map(|w| {
            let r = w.nrows();
            let p = linalg::anti_diagonal(r);
            let mut d: f64 = 0.0;
            if mode.is_additive() {
                d = d.max(linalg::max_abs(&(w - w.adjoint())));
            }
            if mode.is_real() {
                d = d.max(w.iter().fold(0.0_f64, |m, z| m.max(z.im.abs())));
            }
            match mode {
                Mode::TwistedAdditive => d = d.max(linalg::max_abs(&(&p * w + w * &p))),
                Mode::TwistedMultiplicative => {
                    d = d.max(linalg::max_abs(&(&p * w.adjoint() * &p * w - linalg::identity(r))))
                }
                Mode::MultiplicativeReal => {
                    if linalg::determinant(w).re <= 0.0 {
                        d = d.max(1.0);
                    }
                }
                _ => {}
            }
            d
        })
        .fold(0.0, f64::max)
}
