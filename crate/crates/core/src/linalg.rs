//! Small dense complex linear-algebra helpers on top of `nalgebra`.
//!
//! Everything in this crate works with `r x r` complex matrices for small `r`
//! (desk scale, `r <= 5` in practice), so dynamically sized matrices are used
//! throughout.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn identity(r: usize) -> CMat {
    CMat::identity(r, r)
}

pub fn diag_real(values: &[f64]) -> CMat {
    let r = values.len();
    CMat::from_fn(r, r, |i, j| if i == j { re(values[i]) } else { Complex64::default() })
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// `tr(a b)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    let r = a.nrows();
    let mut acc = Complex64::default();
    for i in 0..r {
        for k in 0..r {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `max |m - m^†|` relative to `max(1, max|m|)`.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    let scale = max_abs(m).max(1.0);
    max_abs(&(m - m.adjoint())) / scale
}

/// `max |m + m^†|` relative to `max(1, max|m|)`.
pub fn anti_hermitian_deviation(m: &CMat) -> f64 {
    let scale = max_abs(m).max(1.0);
    max_abs(&(m + m.adjoint())) / scale
}

pub fn unitary_deviation(m: &CMat) -> f64 {
    let r = m.nrows();
    max_abs(&(m * m.adjoint() - identity(r)))
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted
/// non-increasingly; the columns of the returned unitary follow that order.
pub fn herm_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let r = m.nrows();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(r, r, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, sorted non-increasingly.
pub fn herm_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut w: Vec<f64> = SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().copied().collect();
    w.sort_by(|a, b| b.total_cmp(a));
    w
}

/// `U f(D) U^†` for a Hermitian matrix `m = U D U^†`.
pub fn herm_apply(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (w, u) = herm_eigen(m);
    let mut scaled = u.clone();
    for (j, &wj) in w.iter().enumerate() {
        let fj = f(wj);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= fj;
        }
    }
    let out = scaled * u.adjoint();
    hermitian_part(&out)
}

pub fn exp_herm(m: &CMat) -> CMat {
    herm_apply(m, f64::exp)
}

/// Matrix logarithm of a positive-definite Hermitian matrix. The caller is
/// responsible for positivity.
pub fn log_herm(m: &CMat) -> CMat {
    herm_apply(m, f64::ln)
}

/// First divided difference of `exp`, stable for nearby arguments.
fn exp_divided_difference(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d.abs() < 1e-8 {
        // e^b (1 + d/2 + d^2/6)
        b.exp() * (1.0 + d * (0.5 + d / 6.0))
    } else if d > 0.0 {
        b.exp() * d.exp_m1() / d
    } else {
        a.exp() * (-d).exp_m1() / (-d)
    }
}

/// Directional derivative of `exp` at the Hermitian matrix `mu` along `x`
/// (Daleckii-Krein formula).
pub fn dexp_herm(mu: &CMat, x: &CMat) -> CMat {
    let (w, u) = herm_eigen(mu);
    let r = w.len();
    let xt = u.adjoint() * x * &u;
    let g = CMat::from_fn(r, r, |i, j| xt[(i, j)] * exp_divided_difference(w[i], w[j]));
    u.clone() * g * u.adjoint()
}

/// QR factorization `m = q r` with `r` upper triangular and a strictly
/// positive real diagonal. Returns `None` if `m` is numerically singular.
pub fn qr_positive(m: &CMat) -> Option<(CMat, CMat)> {
    let n = m.nrows();
    let qr = m.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let norm = d.norm();
        if !(norm > 1e-300) {
            return None;
        }
        let phase = d / norm;
        // q <- q D, r <- D^{-1} r
        for i in 0..n {
            q[(i, k)] *= phase;
        }
        let inv = phase.conj();
        for j in 0..n {
            r[(k, j)] *= inv;
        }
        r[(k, k)] = re(r[(k, k)].re);
    }
    Some((q, r))
}

pub fn determinant(m: &CMat) -> Complex64 {
    m.clone().lu().determinant()
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

/// Inverse of an invertible lower-triangular matrix by forward substitution.
pub fn lower_triangular_inverse(l: &CMat) -> CMat {
    let r = l.nrows();
    let mut inv = CMat::zeros(r, r);
    for col in 0..r {
        for i in col..r {
            let mut acc = if i == col { re(1.0) } else { Complex64::default() };
            for k in col..i {
                acc -= l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = acc / l[(i, i)];
        }
    }
    inv
}

/// Estimate of the 2-norm condition number from the singular values.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0_f64, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Complex Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, r: usize) -> CMat {
    CMat::from_fn(r, r, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        c(a, b) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn real_gaussian<R: Rng + ?Sized>(rng: &mut R, r: usize) -> CMat {
    CMat::from_fn(r, r, |_, _| re(rng.sample(StandardNormal)))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the phases of the
/// triangular factor absorbed.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, r: usize) -> CMat {
    loop {
        if let Some((q, _)) = qr_positive(&ginibre(rng, r)) {
            return q;
        }
    }
}

/// Haar-distributed element of `SO(r)`.
pub fn haar_special_orthogonal<R: Rng + ?Sized>(rng: &mut R, r: usize) -> CMat {
    loop {
        if let Some((mut q, _)) = qr_positive(&real_gaussian(rng, r)) {
            if determinant(&q).re < 0.0 {
                for i in 0..r {
                    q[(i, 0)] = -q[(i, 0)];
                }
            }
            return q;
        }
    }
}

/// Random Hermitian matrix from the Gaussian unitary ensemble (unit scale).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, r: usize) -> CMat {
    hermitian_part(&ginibre(rng, r))
}

pub fn random_real_symmetric<R: Rng + ?Sized>(rng: &mut R, r: usize) -> CMat {
    hermitian_part(&real_gaussian(rng, r))
}

/// Real matrix of `(re, im)` blocks flattened row-major; used for residual vectors.
pub fn flatten_re_im(m: &CMat) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
    out
}

/// Anti-diagonal permutation `P_{ij} = δ_{i, r-1-j}`.
pub fn anti_diagonal(r: usize) -> CMat {
    CMat::from_fn(r, r, |i, j| if i + j + 1 == r { re(1.0) } else { Complex64::default() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qr_positive_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in 1..=5 {
            let m = ginibre(&mut rng, r);
            let (q, rr) = qr_positive(&m).unwrap();
            assert!(max_abs(&(&q * &rr - &m)) < 1e-13);
            assert!(unitary_deviation(&q) < 1e-13);
            for k in 0..r {
                assert!(rr[(k, k)].re > 0.0 && rr[(k, k)].im == 0.0);
                for i in k + 1..r {
                    assert!(rr[(i, k)].norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn exp_log_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_hermitian(&mut rng, 4);
        assert!(max_abs(&(log_herm(&exp_herm(&m)) - &m)) < 1e-12);
    }

    #[test]
    fn dexp_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mu = random_hermitian(&mut rng, 3);
        let x = random_hermitian(&mut rng, 3);
        let h = 1e-5;
        let fd = (exp_herm(&(&mu + x.scale(h))) - exp_herm(&(&mu - x.scale(h)))).scale(0.5 / h);
        assert!(max_abs(&(fd - dexp_herm(&mu, &x))) < 1e-8);
    }

    #[test]
    fn dexp_handles_repeated_eigenvalues() {
        let mu = diag_real(&[1.0, 1.0, -0.5]);
        let x = CMat::from_fn(3, 3, |i, j| c((i + j) as f64, (i as f64) - (j as f64)));
        let x = hermitian_part(&x);
        let h = 1e-5;
        let fd = (exp_herm(&(&mu + x.scale(h))) - exp_herm(&(&mu - x.scale(h)))).scale(0.5 / h);
        assert!(max_abs(&(fd - dexp_herm(&mu, &x))) < 1e-8);
    }

    #[test]
    fn haar_special_orthogonal_has_unit_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let q = haar_special_orthogonal(&mut rng, 3);
            assert!((determinant(&q) - re(1.0)).norm() < 1e-12);
            assert!(q.iter().all(|z| z.im == 0.0));
        }
    }

    #[test]
    fn lower_triangular_inverse_is_inverse() {
        let l = CMat::from_fn(3, 3, |i, j| if i >= j { c(1.0 + (i * j) as f64, i as f64 - j as f64) } else { re(0.0) });
        let inv = lower_triangular_inverse(&l);
        assert!(max_abs(&(&l * inv - identity(3))) < 1e-13);
    }
}
