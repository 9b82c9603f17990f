//! Infinitesimal dressing action and the matrix `S_ab`.

use num_complex::Complex64;

use crate::decomp::TriangularPositive;
use crate::error::{Error, Result};
use crate::lie::{dual_pairing_raw, orthonormal_basis, AntiHermitianElement, TriangularAlgebraElement};
use crate::linalg::{re, CMat, RMat};

/// Splits `x ∈ gl(r, C)` as `A + T` with `A ∈ u(r)` and `T` lower triangular
/// with real diagonal.
pub fn project_g(x: &CMat) -> (AntiHermitianElement, TriangularAlgebraElement) {
    let t = triangular_part(x);
    let a = x - &t;
    (AntiHermitianElement::from_unchecked(a), TriangularAlgebraElement::from_unchecked(t))
}

pub(crate) fn triangular_part(x: &CMat) -> CMat {
    let r = x.nrows();
    CMat::from_fn(r, r, |i, j| {
        if i == j {
            re(x[(i, i)].re)
        } else if i > j {
            x[(i, j)] + x[(j, i)].conj()
        } else {
            Complex64::default()
        }
    })
}

/// Left-trivialized generator `θ^L(ξ_{K*}) = pr_{k*}(l^{-1} ξ l)` of the
/// dressing action at `l`.
pub fn generating_left(xi: &CMat, l: &CMat, linv: &CMat) -> CMat {
    triangular_part(&(linv * xi * l))
}

/// Tangent vector `ξ_{K*}(l) = d/dt dressing_left(exp(tξ), l)` as a matrix.
pub fn generating_vector(xi: &AntiHermitianElement, l: &TriangularPositive) -> Result<CMat> {
    if xi.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: xi.dim() });
    }
    let linv = l.inverse();
    Ok(l.matrix() * generating_left(xi.matrix(), l.matrix(), linv.matrix()))
}

/// `θ^L(v_a)` for the basis generator `e_a`.
pub fn dressing_vector(a: usize, l: &TriangularPositive) -> Result<TriangularAlgebraElement> {
    let r = l.dim();
    if a >= r * r {
        return Err(Error::InvalidParameter(format!("basis index {a} out of range for r = {r}")));
    }
    let basis = orthonormal_basis(r);
    let linv = l.inverse();
    Ok(TriangularAlgebraElement::from_unchecked(generating_left(basis[a].matrix(), l.matrix(), linv.matrix())))
}

/// Components `S_ab = <θ^R(v_a), e_b>` of the dressing generators in the
/// right-invariant frame `(ε^b)^R`.
#[derive(Debug, Clone)]
pub struct SMatrix {
    pub base_point: TriangularPositive,
    pub entries: RMat,
}

impl SMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[(a, b)]
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        (&self.entries + self.entries.transpose()).amax()
    }
}

pub fn s_matrix(l: &TriangularPositive) -> SMatrix {
    let r = l.dim();
    let n = r * r;
    let basis = orthonormal_basis(r);
    let lm = l.matrix();
    let linv = l.inverse().into_matrix();
    let mut entries = RMat::zeros(n, n);
    for a in 0..n {
        let right = lm * generating_left(basis[a].matrix(), lm, &linv) * &linv;
        for b in 0..n {
            entries[(a, b)] = dual_pairing_raw(&right, basis[b].matrix());
        }
    }
    SMatrix { base_point: l.clone(), entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{dressing_left, e_map, UnitaryElement};
    use crate::lie::HermitianElement;
    use crate::linalg::{self, ginibre, random_hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lower_real_diag(m: &CMat) -> bool {
        let r = m.nrows();
        (0..r).all(|i| m[(i, i)].im == 0.0 && (i + 1..r).all(|j| m[(i, j)] == Complex64::default()))
    }

    #[test]
    fn projection_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let h = random_hermitian(&mut rng, 3);
        let anti = &h * linalg::I;
        let (a, t) = project_g(&anti);
        assert!(linalg::max_abs(&(a.matrix() - &anti)) < 1e-15);
        assert!(linalg::max_abs(t.matrix()) < 1e-15);

        let tri = TriangularAlgebraElement::from_hermitian(&HermitianElement::new(h).unwrap());
        let (a, t) = project_g(tri.matrix());
        assert!(linalg::max_abs(a.matrix()) < 1e-15);
        assert!(linalg::max_abs(&(t.matrix() - tri.matrix())) < 1e-15);

        let x = ginibre(&mut rng, 4);
        let (a, t) = project_g(&x);
        assert!(linalg::max_abs(&(a.matrix() + t.matrix() - &x)) <= 1e-14);
        assert!(linalg::anti_hermitian_deviation(a.matrix()) <= 1e-14);
        assert!(lower_real_diag(t.matrix()));
    }

    #[test]
    fn dressing_vector_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let basis = orthonormal_basis(2);
        let l = e_map(&HermitianElement::new(random_hermitian(&mut rng, 2)).unwrap());
        for (a, e) in basis.iter().enumerate() {
            let h = 1e-6;
            let exp_k = |s: f64| {
                // exp(s e_a) via the Hermitian generator -i e_a: exp(s e_a) = exp(i s (-i e_a))
                let (w, u) = linalg::herm_eigen(&(e.matrix() * (-linalg::I)));
                let d = CMat::from_fn(2, 2, |i, j| if i == j { Complex64::from_polar(1.0, s * w[i]) } else { Complex64::default() });
                UnitaryElement::new(&u * d * u.adjoint()).unwrap()
            };
            let plus = dressing_left(&exp_k(h), &l).unwrap();
            let minus = dressing_left(&exp_k(-h), &l).unwrap();
            let fd = (plus.matrix() - minus.matrix()).scale(0.5 / h);
            let v = l.matrix() * dressing_vector(a, &l).unwrap().matrix();
            assert!(linalg::max_abs(&(fd - v)) < 1e-6, "a={a}");
        }
        let one = e_map(&HermitianElement::from_diagonal(&[0.4]));
        assert!(linalg::max_abs(dressing_vector(0, &one).unwrap().matrix()) < 1e-15);
        for a in 0..9 {
            let v = dressing_vector(a, &TriangularPositive::identity(3)).unwrap();
            assert!(linalg::max_abs(v.matrix()) < 1e-15);
        }
        assert!(dressing_vector(4, &l).is_err());
    }

    #[test]
    fn s_matrix_examples() {
        assert!(s_matrix(&TriangularPositive::identity(3)).entries.amax() < 1e-15);
        assert!(s_matrix(&e_map(&HermitianElement::from_diagonal(&[1.3]))).entries.amax() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..10 {
            let l = e_map(&HermitianElement::new(random_hermitian(&mut rng, 2)).unwrap());
            let s = s_matrix(&l);
            assert!(s.antisymmetry_defect() <= 1e-12);
            assert!(s.entries.amax() > 1e-3);
        }
    }
}
