//! The double `G = GL(r, C) = K* K`, the map `E: k* → K*`, dressing actions
//! and the two compatible involutions.
//!
//! `K*` is realized as lower-triangular matrices with positive diagonal, so
//! `E(μ)` is the Cholesky factor of `exp(μ)`.

use nalgebra::Cholesky;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lie::HermitianElement;
use crate::linalg::{self, re, CMat};

const GROUP_TOLERANCE: f64 = 1e-12;
const DET_GUARD: f64 = 1e-300;
const CONDITION_WARNING: f64 = 1e12;

fn square_dim(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.nrows() == 0 {
        return Err(Error::ZeroRank);
    }
    Ok(m.nrows())
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// An element of `K = U(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryElement(CMat);

impl UnitaryElement {
    pub fn new(m: CMat) -> Result<Self> {
        square_dim(&m)?;
        let deviation = linalg::unitary_deviation(&m);
        let det_dev = (linalg::determinant(&m).norm() - 1.0).abs();
        if !(deviation <= GROUP_TOLERANCE && det_dev <= GROUP_TOLERANCE) {
            return Err(Error::NotUnitary { deviation: deviation.max(det_dev) });
        }
        Ok(Self(m))
    }

    pub fn identity(r: usize) -> Self {
        Self(linalg::identity(r))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }
}

/// An element of `K* = AN`: lower triangular with positive real diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularPositive(CMat);

impl TriangularPositive {
    /// Validates the shape; entries above the diagonal and imaginary parts of
    /// the diagonal up to `1e-12` (relative) are zeroed.
    pub fn new(m: CMat) -> Result<Self> {
        let r = square_dim(&m)?;
        let scale = linalg::max_abs(&m).max(1.0);
        let mut out = m;
        for i in 0..r {
            let d = out[(i, i)];
            if d.im.abs() > GROUP_TOLERANCE * scale || !(d.re > 0.0) || !d.re.is_finite() {
                return Err(Error::NotTriangularPositive(format!("diagonal entry {i} is {d}")));
            }
            out[(i, i)] = re(d.re);
            for j in i + 1..r {
                if out[(i, j)].norm() > GROUP_TOLERANCE * scale {
                    return Err(Error::NotTriangularPositive(format!("entry ({i},{j}) above the diagonal")));
                }
                out[(i, j)] = Complex64::default();
            }
        }
        Ok(Self(out))
    }

    pub fn identity(r: usize) -> Self {
        Self(linalg::identity(r))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn inverse(&self) -> Self {
        Self(linalg::lower_triangular_inverse(&self.0))
    }

    /// Group product; the product of two lower-triangular matrices with
    /// positive diagonal stays in `K*`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        let mut m = &self.0 * &other.0;
        for i in 0..m.nrows() {
            m[(i, i)] = re(m[(i, i)].re);
            for j in i + 1..m.ncols() {
                m[(i, j)] = Complex64::default();
            }
        }
        Ok(Self(m))
    }

    /// `l l^†`, positive definite.
    pub fn gram(&self) -> CMat {
        &self.0 * self.0.adjoint()
    }

    /// Radial label: sorted spectrum of `E^{-1}(l)`.
    pub fn radial_label(&self) -> crate::lie::ChamberPoint {
        crate::lie::ChamberPoint::from_unsorted(
            linalg::herm_eigenvalues(&self.gram()).into_iter().map(f64::ln).collect(),
        )
    }
}

/// An invertible complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement(CMat);

impl GroupElement {
    pub fn new(m: CMat) -> Result<Self> {
        square_dim(&m)?;
        let det_abs = linalg::determinant(&m).norm();
        if !(det_abs > DET_GUARD) {
            return Err(Error::Singular { det_abs });
        }
        Ok(Self(m))
    }

    pub fn identity(r: usize) -> Self {
        Self(linalg::identity(r))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }
}

impl From<TriangularPositive> for GroupElement {
    fn from(l: TriangularPositive) -> Self {
        Self(l.0)
    }
}

impl From<UnitaryElement> for GroupElement {
    fn from(k: UnitaryElement) -> Self {
        Self(k.0)
    }
}

fn warn_if_ill_conditioned(r: &CMat) {
    let diag: Vec<f64> = (0..r.nrows()).map(|i| r[(i, i)].re).collect();
    let max = diag.iter().copied().fold(0.0_f64, f64::max);
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    if max / min > CONDITION_WARNING {
        log::warn!("factorization of an ill-conditioned matrix (diagonal ratio {:.3e})", max / min);
    }
}

fn factor_star_k_raw(g: &CMat) -> Result<(CMat, CMat)> {
    let (q, r) = linalg::qr_positive(&g.adjoint())
        .ok_or_else(|| Error::Singular { det_abs: linalg::determinant(g).norm() })?;
    warn_if_ill_conditioned(&r);
    Ok((r.adjoint(), q.adjoint()))
}

/// `g = l k` with `l ∈ K*`, `k ∈ U(r)`.
pub fn factor_star_k(g: &GroupElement) -> Result<(TriangularPositive, UnitaryElement)> {
    let (l, k) = factor_star_k_raw(g.matrix())?;
    Ok((TriangularPositive(l), UnitaryElement(k)))
}

/// `g = k l` with `k ∈ U(r)`, `l ∈ K*`.
pub fn factor_k_star(g: &GroupElement) -> Result<(UnitaryElement, TriangularPositive)> {
    let m = g.matrix();
    let p = linalg::anti_diagonal(g.dim());
    let (q, r) = linalg::qr_positive(&(m * &p)).ok_or_else(|| Error::Singular { det_abs: linalg::determinant(m).norm() })?;
    warn_if_ill_conditioned(&r);
    let k = &q * &p;
    let l = &p * r * &p;
    Ok((UnitaryElement(k), TriangularPositive(l)))
}

/// The unique `l ∈ K*` with `l l^† = p`.
pub fn cholesky_star(p: &HermitianElement) -> Result<TriangularPositive> {
    let m = p.matrix();
    let eig = linalg::herm_eigenvalues(m);
    let max = eig.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let min = *eig.last().expect("r >= 1");
    if !(min > 1e-12 * max) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    let chol = Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite { min_eigenvalue: min })?;
    let mut l = chol.unpack();
    for i in 0..l.nrows() {
        l[(i, i)] = re(l[(i, i)].re);
    }
    Ok(TriangularPositive(l))
}

/// `E(μ)`: the Cholesky factor of `exp(μ)`.
pub fn e_map(mu: &HermitianElement) -> TriangularPositive {
    let p = HermitianElement::from_unchecked(linalg::exp_herm(mu.matrix()));
    cholesky_star(&p).expect("exp of a Hermitian matrix is positive definite")
}

/// `E^{-1}(l) = log(l l^†)`.
pub fn e_inverse(l: &TriangularPositive) -> HermitianElement {
    HermitianElement::from_unchecked(linalg::log_herm(&l.gram()))
}

/// Both factors of `k l = l^k k^l`.
pub fn dress(k: &UnitaryElement, l: &TriangularPositive) -> Result<(TriangularPositive, UnitaryElement)> {
    same_dim(k.dim(), l.dim())?;
    let (lk, kl) = factor_star_k_raw(&(k.matrix() * l.matrix()))?;
    Ok((TriangularPositive(lk), UnitaryElement(kl)))
}

/// Left dressing action of `K` on `K*`: `l ↦ l^k`.
pub fn dressing_left(k: &UnitaryElement, l: &TriangularPositive) -> Result<TriangularPositive> {
    Ok(dress(k, l)?.0)
}

/// Dressing action of `K*` on `K`: the unitary factor `k^l` of `k l`.
pub fn dressing_right(l: &TriangularPositive, k: &UnitaryElement) -> Result<UnitaryElement> {
    Ok(dress(k, l)?.1)
}

/// The two compatible anti-Poisson involutions of the double.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Involution {
    /// Entrywise complex conjugation.
    Real,
    /// `g ↦ P (g^†)^{-1} P` with `P` the anti-diagonal permutation.
    Twisted,
}

impl Involution {
    pub fn apply_matrix(self, g: &CMat) -> Result<CMat> {
        match self {
            Involution::Real => Ok(g.map(|z| z.conj())),
            Involution::Twisted => {
                let p = linalg::anti_diagonal(g.nrows());
                let inv = linalg::inverse(&g.adjoint())
                    .ok_or_else(|| Error::Singular { det_abs: linalg::determinant(g).norm() })?;
                Ok(&p * inv * &p)
            }
        }
    }

    pub fn apply_group(self, g: &GroupElement) -> Result<GroupElement> {
        GroupElement::new(self.apply_matrix(g.matrix())?)
    }

    pub fn apply_unitary(self, k: &UnitaryElement) -> UnitaryElement {
        match self {
            Involution::Real => UnitaryElement(k.matrix().map(|z| z.conj())),
            Involution::Twisted => {
                let p = linalg::anti_diagonal(k.dim());
                UnitaryElement(&p * k.matrix() * &p)
            }
        }
    }

    pub fn apply_triangular(self, l: &TriangularPositive) -> TriangularPositive {
        match self {
            Involution::Real => TriangularPositive(l.matrix().map(|z| z.conj())),
            Involution::Twisted => {
                let p = linalg::anti_diagonal(l.dim());
                let inv = l.inverse();
                TriangularPositive(&p * inv.matrix().adjoint() * &p)
            }
        }
    }

    /// The induced involution of `k*`, compatible with `E`.
    pub fn apply_hermitian(self, mu: &HermitianElement) -> HermitianElement {
        match self {
            Involution::Real => HermitianElement::from_unchecked(mu.matrix().map(|z| z.conj())),
            Involution::Twisted => {
                let p = linalg::anti_diagonal(mu.dim());
                HermitianElement::from_unchecked(-(&p * mu.matrix() * &p))
            }
        }
    }
}

pub fn sigma_real(g: &GroupElement) -> Result<GroupElement> {
    Involution::Real.apply_group(g)
}

pub fn sigma_twisted(g: &GroupElement) -> Result<GroupElement> {
    Involution::Twisted.apply_group(g)
}
