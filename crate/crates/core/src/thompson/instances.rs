use crate::lie::ChamberPoint;
use crate::linalg::{self, CMat};
use crate::rng::stream;

use super::problem::{Mode, SpectraProblem};
use super::transfer::coset_label;

fn general_exp(m: &CMat) -> CMat {
    m.clone().exp()
}

/// Samples witnesses first and reads off their labels, so the returned
/// problem is feasible by construction.
pub fn random_feasible_instance(r: usize, n: usize, mode: Mode, seed: u64) -> (SpectraProblem, Vec<CMat>) {
    assert!(r >= 1 && n >= 1, "r and n must be positive");
    let mut rng = stream(seed, 0);
    let p = linalg::anti_diagonal(r);
    let mut witnesses: Vec<CMat> = Vec::with_capacity(n);
    if mode.is_additive() {
        for _ in 0..n - 1 {
            let b = match mode {
                Mode::AdditiveComplex => linalg::random_hermitian(&mut rng, r),
                Mode::AdditiveReal => linalg::random_real_symmetric(&mut rng, r),
                _ => {
                    let h = linalg::random_hermitian(&mut rng, r);
                    (&h - &p * &h * &p).scale(0.5)
                }
            };
            witnesses.push(b);
        }
        let sum = witnesses.iter().fold(CMat::zeros(r, r), |acc, b| acc + b);
        witnesses.push(-sum);
    } else {
        for _ in 0..n - 1 {
            let a = match mode {
                Mode::MultiplicativeComplex => general_exp(&linalg::ginibre(&mut rng, r).scale(0.5)),
                Mode::MultiplicativeReal => general_exp(&linalg::real_gaussian(&mut rng, r).scale(0.5)),
                _ => {
                    let x = linalg::ginibre(&mut rng, r).scale(0.5);
                    general_exp(&(&x - &p * x.adjoint() * &p).scale(0.5))
                }
            };
            witnesses.push(a);
        }
        let prod = witnesses.iter().fold(linalg::identity(r), |acc, a| acc * a);
        let mut last = linalg::inverse(&prod).expect("product of exponentials is invertible");
        if mode.is_real() {
            last.apply(|z| z.im = 0.0);
        }
        witnesses.push(last);
    }
    let spectra: Vec<ChamberPoint> = witnesses
        .iter()
        .map(|w| {
            if mode.is_additive() {
                ChamberPoint::from_unsorted(linalg::herm_eigenvalues(&linalg::hermitian_part(w)))
            } else {
                coset_label(w)
            }
        })
        .map(|s| if mode.is_twisted() { symmetrize(s) } else { s })
        .collect();
    let spectra = balance_trace(spectra);
    (SpectraProblem::new(spectra, mode).expect("consistent sizes"), witnesses)
}

/// Removes rounding asymmetry from a label known to satisfy `λ = -reversed(λ)`.
fn symmetrize(s: ChamberPoint) -> ChamberPoint {
    let v = s.values();
    let r = v.len();
    ChamberPoint::from_unsorted((0..r).map(|i| 0.5 * (v[i] - v[r - 1 - i])).collect())
}

/// Moves the rounding error of the total trace onto the last label entry.
fn balance_trace(mut spectra: Vec<ChamberPoint>) -> Vec<ChamberPoint> {
    let total: f64 = spectra.iter().map(ChamberPoint::sum).sum();
    if let Some(last) = spectra.last_mut() {
        let mut v = last.values().to_vec();
        let r = v.len() as f64;
        for x in v.iter_mut() {
            *x -= total / r;
        }
        *last = ChamberPoint::from_unsorted(v);
    }
    spectra
}
