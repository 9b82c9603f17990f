//! Numerical checks of the identities relating `β`, the dressing action and
//! the symplectic forms on orbits.

use std::f64::consts::PI;

use crate::decomp::{dressing_left, e_inverse, e_map, TriangularPositive, UnitaryElement};
use crate::error::{Error, Result};
use crate::lie::{
    dual_pairing_raw, modular_tau, pairing_raw, structure_constants, AntiHermitianElement, ChamberPoint,
    HermitianElement, RootDatum, StructureConstants,
};
use crate::linalg::{self, CMat, RMat};

use super::beta::{d_beta, DEFAULT_NODES};
use super::dressing::{generating_vector, s_matrix, SMatrix};
use super::pushforward::Pushforward;

/// Regularity threshold for orbit labels.
pub const REGULARITY_TOL: f64 = 1e-8;
const LINEARIZATION_STEP: f64 = 1e-5;

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// `max_b |F^{ab}_a - 4π ρ^b|`.
pub fn verify_lemma1(r: usize) -> Result<f64> {
    let sc = structure_constants(r)?;
    Ok(sc.lemma1_residual(&RootDatum::new(r)?))
}

fn lemma2_with(sc: &StructureConstants, rho: &[f64], s: &SMatrix) -> f64 {
    let n = sc.dim_algebra;
    let mut worst: f64 = 0.0;
    for b in 0..n {
        let mut acc = 0.0;
        for a in 0..n {
            for cc in 0..n {
                acc += sc.big_f(a, cc, b) * s.get(a, cc);
            }
            acc += 4.0 * PI * rho[a] * s.get(a, b);
        }
        worst = worst.max(acc.abs());
    }
    worst
}

/// `max_b |F^{ac}_b S_ac + 4π ρ^a S_ab|`.
pub fn verify_lemma2(l: &TriangularPositive) -> f64 {
    let r = l.dim();
    let sc = structure_constants(r).expect("r >= 1");
    let rho = sc.rho_coordinates(&RootDatum::new(r).expect("r >= 1"));
    lemma2_with(&sc, &rho, &s_matrix(l))
}

/// `max_b |Σ_a (ε^a)^R S_ab|`, differentiating along the right-invariant
/// fields `l ↦ exp(t ε^a) l` by central differences.
pub fn verify_lemma2_divergence(l: &TriangularPositive, step: f64) -> Result<f64> {
    if !(step > 0.0 && step <= 1e-2) {
        return Err(Error::InvalidParameter(format!("finite-difference step {step} out of range")));
    }
    let r = l.dim();
    let sc = structure_constants(r)?;
    let n = sc.dim_algebra;
    let mut div = vec![0.0; n];
    for a in 0..n {
        let flow = |t: f64| -> Result<TriangularPositive> {
            let g = sc.dual_basis[a].matrix().scale(t).exp();
            TriangularPositive::new(g * l.matrix())
        };
        let plus = s_matrix(&flow(step)?);
        let minus = s_matrix(&flow(-step)?);
        for (b, d) in div.iter_mut().enumerate() {
            *d += (plus.get(a, b) - minus.get(a, b)) / (2.0 * step);
        }
    }
    Ok(div.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// `|½ S_ab F^{ab}_c ξ^c - 2π S_cb ρ^b ξ^c|`.
pub fn verify_lemma3(l: &TriangularPositive, xi: &AntiHermitianElement) -> Result<f64> {
    same_dim(l.dim(), xi.dim())?;
    let r = l.dim();
    let sc = structure_constants(r)?;
    let rho = sc.rho_coordinates(&RootDatum::new(r)?);
    let x = xi.coordinates(&sc.basis);
    let s = s_matrix(l);
    let n = sc.dim_algebra;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for a in 0..n {
        for b in 0..n {
            let sab = s.get(a, b);
            for cc in 0..n {
                lhs += 0.5 * sab * sc.big_f(a, b, cc) * x[cc];
            }
            rhs += 2.0 * PI * s.get(a, b) * rho[b] * x[a];
        }
    }
    Ok((lhs - rhs).abs())
}

/// Outcome of the bivector contraction check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropHardReport {
    pub residual: f64,
    /// The dressing orbit through `l` is not of maximal dimension.
    pub degenerate: bool,
}

/// Symplectic form of the dressing orbit through `l` on two generators,
/// from the moment map condition `ι(ξ_{K*}) Ω = <θ^R, ξ>`.
fn orbit_form(l: &TriangularPositive, linv: &CMat, xi: &CMat, eta: &CMat) -> f64 {
    let lm = l.matrix();
    let theta_r = lm * super::dressing::generating_left(eta, lm, linv) * linv;
    dual_pairing_raw(&theta_r, xi)
}

/// Evaluates `ι(δ(ξ)_M) Ω` and `4π ι(ξ_M) <θ^R, ρ♯>` on the dressing orbit
/// through `l`. Bivectors contract as `ι(X ∧ Y) Ω = Ω(Y, X) - Ω(X, Y)`.
pub fn verify_prop_hard(l: &TriangularPositive, xi: &AntiHermitianElement) -> Result<PropHardReport> {
    same_dim(l.dim(), xi.dim())?;
    let r = l.dim();
    let sc = structure_constants(r)?;
    let roots = RootDatum::new(r)?;
    let x = xi.coordinates(&sc.basis);
    let n = sc.dim_algebra;
    let linv = l.inverse().into_matrix();

    let mut lhs = 0.0;
    for a in 0..n {
        for b in 0..n {
            let coeff: f64 = (0..n).map(|cc| 0.5 * sc.big_f(a, b, cc) * x[cc]).sum();
            if coeff == 0.0 {
                continue;
            }
            let ea = sc.basis[a].matrix();
            let eb = sc.basis[b].matrix();
            lhs += coeff * (orbit_form(l, &linv, eb, ea) - orbit_form(l, &linv, ea, eb));
        }
    }
    let v = generating_vector(xi, l)?;
    let rhs = 4.0 * PI * dual_pairing_raw(&(v * &linv), roots.rho_sharp().matrix());
    let degenerate = !l.radial_label().is_regular(REGULARITY_TOL);
    Ok(PropHardReport { residual: (lhs - rhs).abs(), degenerate })
}

/// Compares `dβ(ξ_{k*}, v)` with `<dE(v) E^{-1}, ξ> - <v, ξ>`, where
/// `ξ_{k*} = [ξ, μ]` and `dβ` is taken by central differences.
pub fn verify_contraction(
    mu: &HermitianElement,
    xi: &AntiHermitianElement,
    v: &HermitianElement,
    fd_step: f64,
) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&fd_step) {
        return Err(Error::InvalidParameter(format!("fd_step {fd_step} outside [1e-7, 1e-3]")));
    }
    same_dim(mu.dim(), xi.dim())?;
    same_dim(mu.dim(), v.dim())?;
    let generator = HermitianElement::from_unchecked(linalg::commutator(xi.matrix(), mu.matrix()));
    let lhs = d_beta(mu, &generator, v, DEFAULT_NODES, fd_step)?;
    let push = Pushforward::at(mu);
    let rhs = dual_pairing_raw(&push.right(v.matrix()), xi.matrix()) - pairing_raw(v.matrix(), xi.matrix());
    Ok((lhs - rhs).abs())
}

fn orbit_point(mu0: &ChamberPoint, k: &UnitaryElement) -> Result<TriangularPositive> {
    same_dim(mu0.dim(), k.dim())?;
    if !mu0.is_regular(REGULARITY_TOL) {
        return Err(Error::Degenerate(format!("orbit label {:?} is not regular", mu0.values())));
    }
    dressing_left(k, &e_map(&mu0.to_hermitian()))
}

/// `|Ω - ω - dΦ^*β|` on the pair of generators `(ξ_1, ξ_2)` at the point
/// `l = dressing_left(k, E(diag μ0))` of a dressing orbit. `ω` is the KKS
/// form at `μ = E^{-1}(l)`.
pub fn verify_linearization_on_orbit(
    mu0: &ChamberPoint,
    k: &UnitaryElement,
    xi1: &AntiHermitianElement,
    xi2: &AntiHermitianElement,
) -> Result<f64> {
    same_dim(k.dim(), xi1.dim())?;
    same_dim(k.dim(), xi2.dim())?;
    let l = orbit_point(mu0, k)?;
    let mu = e_inverse(&l);
    let basis = crate::lie::orthonormal_basis(k.dim());
    let x1 = xi1.coordinates(&basis);
    let x2 = xi2.coordinates(&basis);
    let s = s_matrix(&l);
    let n = basis.len();
    let mut big_omega = 0.0;
    for a in 0..n {
        for b in 0..n {
            big_omega += x1[a] * x2[b] * s.get(b, a);
        }
    }
    let kks = pairing_raw(mu.matrix(), &linalg::commutator(xi1.matrix(), xi2.matrix()));
    let u1 = HermitianElement::from_unchecked(linalg::commutator(xi1.matrix(), mu.matrix()));
    let u2 = HermitianElement::from_unchecked(linalg::commutator(xi2.matrix(), mu.matrix()));
    let db = d_beta(&mu, &u1, &u2, DEFAULT_NODES, LINEARIZATION_STEP)?;
    Ok((big_omega - kks - db).abs())
}

/// Indices of a maximal independent subset of the vectors, chosen greedily by
/// largest residual norm (column-pivoted Gram-Schmidt).
pub(crate) fn pivoted_frame(vectors: &[Vec<f64>], rel_tol: f64) -> Vec<usize> {
    let mut work: Vec<Vec<f64>> = vectors.to_vec();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = work.iter().map(|v| norm(v)).fold(0.0_f64, f64::max);
    let mut chosen = Vec::new();
    if scale == 0.0 {
        return chosen;
    }
    loop {
        let (best, best_norm) = work
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .map(|(i, v)| (i, norm(v)))
            .fold((usize::MAX, 0.0), |acc, (i, nv)| if nv > acc.1 { (i, nv) } else { acc });
        if best == usize::MAX || best_norm <= rel_tol * scale {
            break;
        }
        chosen.push(best);
        let q: Vec<f64> = work[best].iter().map(|x| x / best_norm).collect();
        for (i, v) in work.iter_mut().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let p: f64 = v.iter().zip(&q).map(|(a, b)| a * b).sum();
            for (x, qq) in v.iter_mut().zip(&q) {
                *x -= p * qq;
            }
        }
    }
    chosen
}

/// Ratio of the Liouville volumes of `Ω` and of the KKS form `ω` at the
/// orbit point `l = dressing_left(k, E(diag μ0))`, corrected by `τ(l)^{-1/2}`.
/// The result equals the hyperbolic Duflo factor at `μ0`.
pub fn verify_volume_theorem(mu0: &ChamberPoint, k: &UnitaryElement) -> Result<f64> {
    let r = k.dim();
    let l = orbit_point(mu0, k)?;
    if r == 1 {
        return Ok(1.0);
    }
    let mu = e_inverse(&l);
    let basis = crate::lie::orthonormal_basis(r);
    let tangents: Vec<Vec<f64>> = basis
        .iter()
        .map(|e| linalg::flatten_re_im(&linalg::commutator(e.matrix(), mu.matrix())))
        .collect();
    let mut frame = pivoted_frame(&tangents, 1e-9);
    frame.sort_unstable();
    if frame.len() != r * r - r {
        return Err(Error::Degenerate(format!("orbit tangent frame has rank {}", frame.len())));
    }
    let s = s_matrix(&l);
    let d = frame.len();
    let mut big = RMat::zeros(d, d);
    let mut kks = RMat::zeros(d, d);
    for (i, &a) in frame.iter().enumerate() {
        for (j, &b) in frame.iter().enumerate() {
            big[(i, j)] = s.get(b, a);
            kks[(i, j)] = pairing_raw(mu.matrix(), &linalg::commutator(basis[a].matrix(), basis[b].matrix()));
        }
    }
    let det_big = big.determinant().abs();
    let det_kks = kks.determinant().abs();
    if !(det_kks > 0.0) {
        return Err(Error::Degenerate("KKS form is degenerate on the chosen frame".into()));
    }
    Ok((det_big / det_kks).sqrt() / modular_tau(&l).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::hyperbolic_duflo;
    use crate::linalg::{haar_unitary, random_hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_l(rng: &mut ChaCha8Rng, r: usize) -> TriangularPositive {
        e_map(&HermitianElement::new(random_hermitian(rng, r)).unwrap())
    }

    fn random_xi(rng: &mut ChaCha8Rng, r: usize) -> AntiHermitianElement {
        AntiHermitianElement::new(random_hermitian(rng, r) * linalg::I).unwrap()
    }

    #[test]
    fn identities_vanish_at_trivial_inputs() {
        let id = TriangularPositive::identity(3);
        assert_eq!(verify_lemma2(&id), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let xi = random_xi(&mut rng, 3);
        assert_eq!(verify_lemma3(&id, &xi).unwrap(), 0.0);
        let l = random_l(&mut rng, 3);
        assert_eq!(verify_lemma3(&l, &AntiHermitianElement::zeros(3)).unwrap(), 0.0);
        assert_eq!(verify_prop_hard(&l, &AntiHermitianElement::zeros(3)).unwrap().residual, 0.0);
        assert!(verify_prop_hard(&id, &xi).unwrap().residual < 1e-15);
        assert!(verify_prop_hard(&id, &xi).unwrap().degenerate);
    }

    #[test]
    fn appendix_identities_hold_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for r in 1..=3 {
            assert!(verify_lemma1(r).unwrap() <= 1e-12);
            for _ in 0..10 {
                let l = random_l(&mut rng, r);
                let xi = random_xi(&mut rng, r);
                assert!(verify_lemma2(&l) <= 1e-10, "r={r}");
                assert!(verify_lemma3(&l, &xi).unwrap() <= 1e-10, "r={r}");
                let report = verify_prop_hard(&l, &xi).unwrap();
                assert!(report.residual <= 1e-9, "r={r}: {report:?}");
            }
        }
    }

    #[test]
    fn lemma2_divergence_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for r in [2, 3] {
            let l = random_l(&mut rng, r);
            assert!(verify_lemma2_divergence(&l, 1e-5).unwrap() < 1e-7, "r={r}");
        }
    }

    #[test]
    fn contraction_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let mu = HermitianElement::new(random_hermitian(&mut rng, 2)).unwrap();
        let v = HermitianElement::new(random_hermitian(&mut rng, 2)).unwrap();
        assert!(verify_contraction(&mu, &AntiHermitianElement::zeros(2), &v, 1e-5).unwrap() < 1e-12);
        let xi = random_xi(&mut rng, 2);
        assert!(verify_contraction(&mu, &xi, &v, 1e-5).unwrap() < 1e-5);
        assert!(verify_contraction(&mu, &xi, &v, 1e-2).is_err());
        let mu1 = HermitianElement::from_diagonal(&[0.8]);
        let v1 = HermitianElement::from_diagonal(&[-0.3]);
        let xi1 = random_xi(&mut rng, 1);
        assert!(verify_contraction(&mu1, &xi1, &v1, 1e-5).unwrap() < 1e-12);
    }

    #[test]
    fn linearization_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let mu0 = ChamberPoint::new(vec![1.0, -1.0]).unwrap();
        let k = UnitaryElement::new(haar_unitary(&mut rng, 2)).unwrap();
        let xi = random_xi(&mut rng, 2);
        assert!(verify_linearization_on_orbit(&mu0, &k, &xi, &xi).unwrap() < 1e-9);
        let eta = random_xi(&mut rng, 2);
        assert!(verify_linearization_on_orbit(&mu0, &k, &xi, &eta).unwrap() < 1e-5);
        let one = ChamberPoint::new(vec![0.5]).unwrap();
        let k1 = UnitaryElement::identity(1);
        let x1 = random_xi(&mut rng, 1);
        let y1 = random_xi(&mut rng, 1);
        assert!(verify_linearization_on_orbit(&one, &k1, &x1, &y1).unwrap() < 1e-12);
        let bad = ChamberPoint::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(verify_linearization_on_orbit(&bad, &k, &xi, &eta), Err(Error::Degenerate(_))));
    }

    #[test]
    fn volume_ratio_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        let mu0 = ChamberPoint::new(vec![1.0, -1.0]).unwrap();
        let k = UnitaryElement::new(haar_unitary(&mut rng, 2)).unwrap();
        let ratio = verify_volume_theorem(&mu0, &k).unwrap();
        assert!((ratio - 1.0_f64.sinh()).abs() < 1e-6, "{ratio}");
        let small = ChamberPoint::new(vec![1e-4, -1e-4]).unwrap();
        assert!((verify_volume_theorem(&small, &k).unwrap() - 1.0).abs() < 1e-6);
        let mu3 = ChamberPoint::new(vec![1.2, 0.1, -0.7]).unwrap();
        let k3 = UnitaryElement::new(haar_unitary(&mut rng, 3)).unwrap();
        let ratio3 = verify_volume_theorem(&mu3, &k3).unwrap();
        assert!((ratio3 - hyperbolic_duflo(&mu3)).abs() < 1e-5, "{ratio3}");
    }

    #[test]
    fn pivoted_frame_finds_rank() {
        let v = vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let mut f = pivoted_frame(&v, 1e-12);
        f.sort_unstable();
        assert_eq!(f, vec![1, 2]);
    }
}
