//! Fixed-convention Lie data for `k = u(r)` and its dual.
//!
//! Conventions used throughout the crate:
//!
//! * `k` is the algebra of anti-Hermitian matrices with the positive-definite
//!   invariant form `B(ξ, η) = -tr(ξ η)`.
//! * `k*` is identified with Hermitian matrices through
//!   `<μ, ξ> = (1/i) tr(μ ξ)`, so `B♯(μ) = iμ`.
//! * The same dual space is realized inside `gl(r, C)` as the algebra of lower
//!   triangular matrices with real diagonal, paired with `k` by
//!   `<T, ξ> = 2 Im tr(T ξ)`. The two pictures are related by `μ = T + T^†`.
//! * Positive roots are `α_{jk}`, `j < k`, normalized so that
//!   `π <α_{jk}, B♯(diag λ)> = (λ_j - λ_k) / 2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::decomp::{e_map, TriangularPositive};
use crate::error::{Error, Result};
use crate::linalg::{self, c, re, CMat, RMat, I};

const ELEMENT_TOLERANCE: f64 = 1e-12;

fn check_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.nrows() == 0 {
        return Err(Error::ZeroRank);
    }
    Ok(m.nrows())
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// A point of `k*`, stored as a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianElement(CMat);

impl HermitianElement {
    /// Validates hermiticity to `1e-12` (relative to the max-norm) and stores
    /// the exactly symmetrized matrix.
    pub fn new(m: CMat) -> Result<Self> {
        check_square(&m)?;
        let deviation = linalg::hermitian_deviation(&m);
        if !(deviation <= ELEMENT_TOLERANCE) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(linalg::hermitian_part(&m)))
    }

    pub(crate) fn from_unchecked(m: CMat) -> Self {
        Self(linalg::hermitian_part(&m))
    }

    pub fn zeros(r: usize) -> Self {
        Self(CMat::zeros(r, r))
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        Self(linalg::diag_real(values))
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

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self(&self.0 - &other.0))
    }

    /// Coadjoint action `k μ k^†`.
    pub fn conjugate_by(&self, k: &CMat) -> Self {
        Self::from_unchecked(k * &self.0 * k.adjoint())
    }

    /// Eigenvalues sorted non-increasingly: the radial label of the orbit.
    pub fn spectrum(&self) -> ChamberPoint {
        ChamberPoint(linalg::herm_eigenvalues(&self.0))
    }
}

/// A point of `k = u(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiHermitianElement(CMat);

impl AntiHermitianElement {
    pub fn new(m: CMat) -> Result<Self> {
        check_square(&m)?;
        let deviation = linalg::anti_hermitian_deviation(&m);
        if !(deviation <= ELEMENT_TOLERANCE) {
            return Err(Error::NotAntiHermitian { deviation });
        }
        Ok(Self((&m - m.adjoint()).scale(0.5)))
    }

    pub(crate) fn from_unchecked(m: CMat) -> Self {
        Self((&m - m.adjoint()).scale(0.5))
    }

    pub fn zeros(r: usize) -> Self {
        Self(CMat::zeros(r, r))
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

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    /// Coordinates `ξ^a = B(ξ, e_a)` in the orthonormal basis.
    pub fn coordinates(&self, basis: &[AntiHermitianElement]) -> Vec<f64> {
        basis.iter().map(|e| killing_form_raw(&self.0, &e.0)).collect()
    }

    pub fn from_coordinates(coords: &[f64], basis: &[AntiHermitianElement]) -> Self {
        let r = basis[0].dim();
        let mut m = CMat::zeros(r, r);
        for (x, e) in coords.iter().zip(basis) {
            m += e.0.scale(*x);
        }
        Self(m)
    }
}

/// A lower-triangular matrix with real diagonal: an element of the dual
/// algebra `a ⊕ n`, i.e. the Lie algebra of `K*`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularAlgebraElement(CMat);

impl TriangularAlgebraElement {
    pub fn new(m: CMat) -> Result<Self> {
        let r = check_square(&m)?;
        let scale = linalg::max_abs(&m).max(1.0);
        let mut out = m;
        for i in 0..r {
            if out[(i, i)].im.abs() > ELEMENT_TOLERANCE * scale {
                return Err(Error::NotTriangularAlgebra(format!("diagonal entry {i} is not real")));
            }
            out[(i, i)] = re(out[(i, i)].re);
            for j in i + 1..r {
                if out[(i, j)].norm() > ELEMENT_TOLERANCE * scale {
                    return Err(Error::NotTriangularAlgebra(format!("entry ({i},{j}) above the diagonal")));
                }
                out[(i, j)] = Complex64::default();
            }
        }
        Ok(Self(out))
    }

    pub(crate) fn from_unchecked(m: CMat) -> Self {
        Self(m)
    }

    pub fn zeros(r: usize) -> Self {
        Self(CMat::zeros(r, r))
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

    /// The Hermitian picture `T + T^†` of the same dual vector.
    pub fn to_hermitian(&self) -> HermitianElement {
        HermitianElement(&self.0 + self.0.adjoint())
    }

    /// Inverse of [`Self::to_hermitian`].
    pub fn from_hermitian(mu: &HermitianElement) -> Self {
        let m = mu.matrix();
        let r = mu.dim();
        Self(CMat::from_fn(r, r, |i, j| {
            if i == j {
                re(0.5 * m[(i, i)].re)
            } else if i > j {
                m[(i, j)]
            } else {
                Complex64::default()
            }
        }))
    }
}

/// Radial coordinate: a non-increasing real vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ChamberPoint(Vec<f64>);

impl ChamberPoint {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::ZeroRank);
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::UnsortedSpectrum(values));
        }
        Ok(Self(values))
    }

    /// Sorts the input non-increasingly.
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `λ ↦ -reversed(λ)`, the label of the negated orbit.
    pub fn negated_reversed(&self) -> Self {
        Self(self.0.iter().rev().map(|v| -v).collect())
    }

    pub fn is_regular(&self, tol: f64) -> bool {
        self.0.windows(2).all(|w| w[0] - w[1] > tol)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn to_hermitian(&self) -> HermitianElement {
        HermitianElement::from_diagonal(&self.0)
    }

    pub fn max_distance(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Root data of `u(r)` for the diagonal torus.
#[derive(Debug, Clone, PartialEq)]
pub struct RootDatum {
    pub dim: usize,
    pub positive_roots: Vec<(usize, usize)>,
    /// Diagonal of `-i ρ♯`.
    pub rho_vector: Vec<f64>,
    /// `π <α_{jk}, B♯(diag λ)> = normalization * (λ_j - λ_k)`.
    pub normalization: f64,
}

impl RootDatum {
    pub fn new(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::ZeroRank);
        }
        let mut positive_roots = Vec::with_capacity(r * (r - 1) / 2);
        for j in 0..r {
            for k in j + 1..r {
                positive_roots.push((j, k));
            }
        }
        // ρ♯ = B♯(ρ) = i diag(p), with <α_{jk}, i diag(z)> = (z_j - z_k) / 2π.
        let mut rho_vector = vec![0.0; r];
        for &(j, k) in &positive_roots {
            rho_vector[j] += 0.5 / (2.0 * PI);
            rho_vector[k] -= 0.5 / (2.0 * PI);
        }
        Ok(Self { dim: r, positive_roots, rho_vector, normalization: 0.5 })
    }

    pub fn rho_sharp(&self) -> AntiHermitianElement {
        AntiHermitianElement(linalg::diag_real(&self.rho_vector) * I)
    }

    /// `π <α_{jk}, B♯(diag λ)>` for each positive root, in root order.
    pub fn root_values(&self, lambda: &[f64]) -> Vec<f64> {
        self.positive_roots.iter().map(|&(j, k)| self.normalization * (lambda[j] - lambda[k])).collect()
    }
}

/// `<μ, ξ> = (1/i) tr(μ ξ)`.
pub fn pairing(mu: &HermitianElement, xi: &AntiHermitianElement) -> Result<f64> {
    check_dims(mu.dim(), xi.dim())?;
    Ok(pairing_raw(mu.matrix(), xi.matrix()))
}

pub(crate) fn pairing_raw(mu: &CMat, xi: &CMat) -> f64 {
    (linalg::trace_product(mu, xi) * (-I)).re
}

/// Pairing of the triangular realization of `k*` with `k`: `2 Im tr(T ξ)`.
pub fn dual_pairing(t: &TriangularAlgebraElement, xi: &AntiHermitianElement) -> Result<f64> {
    check_dims(t.dim(), xi.dim())?;
    Ok(dual_pairing_raw(t.matrix(), xi.matrix()))
}

pub(crate) fn dual_pairing_raw(t: &CMat, xi: &CMat) -> f64 {
    2.0 * linalg::trace_product(t, xi).im
}

/// The invariant inner product `B(ξ, η) = -tr(ξ η)` on `k`.
pub fn killing_form(xi: &AntiHermitianElement, eta: &AntiHermitianElement) -> Result<f64> {
    check_dims(xi.dim(), eta.dim())?;
    Ok(killing_form_raw(xi.matrix(), eta.matrix()))
}

pub(crate) fn killing_form_raw(xi: &CMat, eta: &CMat) -> f64 {
    -linalg::trace_product(xi, eta).re
}

/// `B♯: k* → k`, the unique `ζ` with `B(ζ, η) = <μ, η>`; here `ζ = iμ`.
pub fn b_sharp(mu: &HermitianElement) -> AntiHermitianElement {
    AntiHermitianElement(mu.matrix() * I)
}

/// Inverse of [`b_sharp`].
pub fn b_flat(zeta: &AntiHermitianElement) -> HermitianElement {
    HermitianElement(zeta.matrix() * (-I))
}

/// The standard `B`-orthonormal basis of `u(r)`: `i E_jj`, then for each
/// `j < k` the pair `(E_jk - E_kj)/√2`, `i(E_jk + E_kj)/√2`.
pub fn orthonormal_basis(r: usize) -> Vec<AntiHermitianElement> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(r * r);
    for j in 0..r {
        let mut m = CMat::zeros(r, r);
        m[(j, j)] = I;
        basis.push(AntiHermitianElement(m));
    }
    for j in 0..r {
        for k in j + 1..r {
            let mut a = CMat::zeros(r, r);
            a[(j, k)] = re(s);
            a[(k, j)] = re(-s);
            basis.push(AntiHermitianElement(a));
            let mut b = CMat::zeros(r, r);
            b[(j, k)] = c(0.0, s);
            b[(k, j)] = c(0.0, s);
            basis.push(AntiHermitianElement(b));
        }
    }
    basis
}

/// Structure constants of `k` and `k*` in the basis `e_a` and its dual `ε^a`.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    pub rank: usize,
    pub dim_algebra: usize,
    f: Vec<f64>,
    big_f: Vec<f64>,
    pub basis: Vec<AntiHermitianElement>,
    pub dual_basis: Vec<TriangularAlgebraElement>,
}

impl StructureConstants {
    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.dim_algebra + b) * self.dim_algebra + c
    }

    /// `f_{ab}^c` with `[e_a, e_b] = f_{ab}^c e_c`.
    #[inline]
    pub fn f(&self, a: usize, b: usize, c: usize) -> f64 {
        self.f[self.idx(a, b, c)]
    }

    /// `F^{ab}_c` with `[ε^a, ε^b] = F^{ab}_c ε^c`.
    #[inline]
    pub fn big_f(&self, a: usize, b: usize, c: usize) -> f64 {
        self.big_f[self.idx(a, b, c)]
    }

    /// Coordinates `ρ^b` of `ρ♯ = ρ^b e_b`.
    pub fn rho_coordinates(&self, roots: &RootDatum) -> Vec<f64> {
        roots.rho_sharp().coordinates(&self.basis)
    }

    fn jacobi(&self, g: impl Fn(usize, usize, usize) -> f64) -> f64 {
        let n = self.dim_algebra;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    for e in 0..n {
                        let mut s = 0.0;
                        for d in 0..n {
                            s += g(a, b, d) * g(d, cc, e) + g(b, cc, d) * g(d, a, e) + g(cc, a, d) * g(d, b, e);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn jacobi_residual(&self) -> f64 {
        self.jacobi(|a, b, c| self.f(a, b, c))
    }

    pub fn dual_jacobi_residual(&self) -> f64 {
        self.jacobi(|a, b, c| self.big_f(a, b, c))
    }

    /// Max-norm defect of `[e_a, ε^b] = -f_{ac}^b ε^c + F^{bc}_a e_c` over all
    /// basis pairs.
    pub fn mixed_residual(&self) -> f64 {
        let n = self.dim_algebra;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let lhs = linalg::commutator(self.basis[a].matrix(), self.dual_basis[b].matrix());
                let mut rhs = CMat::zeros(self.rank, self.rank);
                for cc in 0..n {
                    rhs -= self.dual_basis[cc].matrix().scale(self.f(a, cc, b));
                    rhs += self.basis[cc].matrix().scale(self.big_f(b, cc, a));
                }
                worst = worst.max(linalg::max_abs(&(lhs - rhs)));
            }
        }
        worst
    }

    /// Max over `a, b` of `|B(e_a, e_b) - δ_ab|` and `|<ε^a, e_b> - δ_ab|`.
    pub fn basis_residual(&self) -> f64 {
        let n = self.dim_algebra;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let delta = if a == b { 1.0 } else { 0.0 };
                let bb = killing_form_raw(self.basis[a].matrix(), self.basis[b].matrix());
                let pp = dual_pairing_raw(self.dual_basis[a].matrix(), self.basis[b].matrix());
                worst = worst.max((bb - delta).abs()).max((pp - delta).abs());
            }
        }
        worst
    }

    /// `max_b |f_{ab}^a|` summed over `a`.
    pub fn trace_f_residual(&self) -> f64 {
        let n = self.dim_algebra;
        (0..n).map(|b| (0..n).map(|a| self.f(a, b, a)).sum::<f64>().abs()).fold(0.0, f64::max)
    }

    /// Defect of `F^{ab}_a = 4π ρ^b`, componentwise max.
    pub fn lemma1_residual(&self, roots: &RootDatum) -> f64 {
        let n = self.dim_algebra;
        let rho = self.rho_coordinates(roots);
        (0..n)
            .map(|b| ((0..n).map(|a| self.big_f(a, b, a)).sum::<f64>() - 4.0 * PI * rho[b]).abs())
            .fold(0.0, f64::max)
    }

    /// Antisymmetry defect of both constant arrays in their first two indices.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim_algebra;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    worst = worst
                        .max((self.f(a, b, cc) + self.f(b, a, cc)).abs())
                        .max((self.big_f(a, b, cc) + self.big_f(b, a, cc)).abs());
                }
            }
        }
        worst
    }
}

/// Computes `f` and `F` from explicit matrix brackets of the basis elements.
pub fn structure_constants(r: usize) -> Result<StructureConstants> {
    if r == 0 {
        return Err(Error::ZeroRank);
    }
    let basis = orthonormal_basis(r);
    // ε^a is the triangular element whose Hermitian picture is B♭(e_a) = -i e_a.
    let dual_basis: Vec<TriangularAlgebraElement> =
        basis.iter().map(|e| TriangularAlgebraElement::from_hermitian(&b_flat(e))).collect();
    let n = r * r;
    let mut f = vec![0.0; n * n * n];
    let mut big_f = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            let kk = linalg::commutator(basis[a].matrix(), basis[b].matrix());
            let dd = linalg::commutator(dual_basis[a].matrix(), dual_basis[b].matrix());
            for cc in 0..n {
                f[(a * n + b) * n + cc] = killing_form_raw(&kk, basis[cc].matrix());
                big_f[(a * n + b) * n + cc] = dual_pairing_raw(&dd, basis[cc].matrix());
            }
        }
    }
    Ok(StructureConstants { rank: r, dim_algebra: n, f, big_f, basis, dual_basis })
}

/// `sinh(x)/x`, continued by the series near zero.
pub(crate) fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// Hyperbolic Duflo factor `J_h^{1/2}` at the Cartan point `B♯(diag λ)`:
/// `∏_{j<k} sinh(x_{jk}) / x_{jk}` with `x_{jk} = (λ_j - λ_k)/2`.
pub fn hyperbolic_duflo(lambda: &ChamberPoint) -> f64 {
    hyperbolic_duflo_of(lambda.values())
}

/// Same as [`hyperbolic_duflo`] for an unsorted vector; the result does not
/// depend on the order.
pub fn hyperbolic_duflo_of(lambda: &[f64]) -> f64 {
    let mut prod = 1.0;
    for j in 0..lambda.len() {
        for k in j + 1..lambda.len() {
            prod *= sinhc(0.5 * (lambda[j] - lambda[k]));
        }
    }
    prod
}

/// Modular function of `K*`, from the `A`-part of `l`:
/// `τ = exp(-4π <μ, ρ♯>)` with `μ = 2 log diag(l)`.
pub fn modular_tau(l: &TriangularPositive) -> f64 {
    let r = l.dim();
    let roots = RootDatum::new(r).expect("r >= 1");
    let m = l.matrix();
    let radial: f64 = (0..r).map(|j| 2.0 * m[(j, j)].re.ln() * roots.rho_vector[j]).sum();
    (-4.0 * PI * radial).exp()
}

fn triangular_coordinates(m: &CMat) -> Vec<f64> {
    let r = m.nrows();
    let mut v = Vec::with_capacity(r * r);
    for j in 0..r {
        v.push(m[(j, j)].re);
    }
    for j in 0..r {
        for k in 0..j {
            v.push(m[(j, k)].re);
            v.push(m[(j, k)].im);
        }
    }
    v
}

fn triangular_coordinate_basis(r: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(r * r);
    for j in 0..r {
        let mut m = CMat::zeros(r, r);
        m[(j, j)] = re(1.0);
        out.push(m);
    }
    for j in 0..r {
        for k in 0..j {
            let mut a = CMat::zeros(r, r);
            a[(j, k)] = re(1.0);
            out.push(a);
            let mut b = CMat::zeros(r, r);
            b[(j, k)] = I;
            out.push(b);
        }
    }
    out
}

/// `det Ad_l` on the triangular algebra, by assembling the `r² x r²` real
/// matrix of the adjoint action.
pub fn modular_tau_direct(l: &TriangularPositive) -> f64 {
    let r = l.dim();
    let n = r * r;
    let lm = l.matrix();
    let linv = l.inverse();
    let linv = linv.matrix();
    let basis = triangular_coordinate_basis(r);
    let mut ad = RMat::zeros(n, n);
    for (col, t) in basis.iter().enumerate() {
        let image = lm * t * linv;
        for (row, v) in triangular_coordinates(&image).into_iter().enumerate() {
            ad[(row, col)] = v;
        }
    }
    ad.determinant()
}

/// Calibration oracle for the root normalization.
///
/// Returns `sqrt(det dE_μ / det dE_0)` at `μ = diag λ`, where `dE` is computed
/// by central finite differences in `B`-orthonormal coordinates on `k*` and
/// expressed in the left-invariant trivialization `l^{-1} dl` of `T K*`.
/// The square root of this Jacobian ratio is the hyperbolic Duflo factor.
pub fn duflo_normalization_oracle(r: usize, lambda: &ChamberPoint) -> Result<f64> {
    if r == 0 {
        return Err(Error::ZeroRank);
    }
    check_dims(r, lambda.dim())?;
    if !lambda.is_regular(1e-8) {
        return Err(Error::Degenerate("calibration oracle needs distinct eigenvalues".into()));
    }
    let jac = |mu: &HermitianElement| -> f64 {
        let step = 1e-5;
        let basis = orthonormal_basis(r);
        let l = e_map(mu);
        let linv = l.inverse();
        let n = r * r;
        let mut jm = RMat::zeros(n, n);
        for (col, e) in basis.iter().enumerate() {
            let dir = b_flat(e);
            let plus = e_map(&mu.add(&dir.scale(step)).expect("dims"));
            let minus = e_map(&mu.add(&dir.scale(-step)).expect("dims"));
            let d = (plus.matrix() - minus.matrix()).scale(0.5 / step);
            let left = linv.matrix() * d;
            for (row, eb) in basis.iter().enumerate() {
                jm[(row, col)] = dual_pairing_raw(&left, eb.matrix());
            }
        }
        jm.determinant().abs()
    };
    let at = jac(&lambda.to_hermitian());
    let origin = jac(&HermitianElement::zeros(r));
    Ok((at / origin).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{e_map, TriangularPositive};
    use crate::linalg::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pairing_examples() {
        let mu = HermitianElement::from_diagonal(&[1.0, 0.0]);
        let xi = AntiHermitianElement::new(linalg::diag_real(&[1.0, 0.0]) * I).unwrap();
        assert!((pairing(&mu, &xi).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(pairing(&HermitianElement::zeros(2), &xi).unwrap(), 0.0);
    }

    #[test]
    fn pairing_with_i_mu_is_trace_of_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_hermitian(&mut rng, 4);
        let mu = HermitianElement::new(m.clone()).unwrap();
        let xi = AntiHermitianElement::new(&m * I).unwrap();
        // independent oracle: sum_{ij} |m_ij|^2
        let oracle: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        assert!((pairing(&mu, &xi).unwrap() - oracle).abs() < 1e-12 * oracle.max(1.0));
    }

    #[test]
    fn pairing_rejects_dimension_mismatch() {
        let mu = HermitianElement::zeros(2);
        let xi = AntiHermitianElement::zeros(3);
        assert!(matches!(pairing(&mu, &xi), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn b_sharp_defining_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mu = HermitianElement::from_diagonal(&[1.0, -1.0]);
        let zeta = b_sharp(&mu);
        for _ in 0..10 {
            let eta = AntiHermitianElement::new(random_hermitian(&mut rng, 2) * I).unwrap();
            let lhs = killing_form(&zeta, &eta).unwrap();
            let rhs = pairing(&mu, &eta).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
        assert_eq!(b_sharp(&HermitianElement::zeros(2)), AntiHermitianElement::zeros(2));
        let m = HermitianElement::new(random_hermitian(&mut rng, 3)).unwrap();
        let z = b_sharp(&m);
        let p = pairing(&m, &z).unwrap();
        assert!((p - killing_form(&z, &z).unwrap()).abs() < 1e-12 && p >= 0.0);
    }

    #[test]
    fn elements_reject_wrong_symmetry() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = re(1.0);
        assert!(matches!(HermitianElement::new(m.clone()), Err(Error::NotHermitian { .. })));
        assert!(matches!(AntiHermitianElement::new(m), Err(Error::NotAntiHermitian { .. })));
        assert!(matches!(ChamberPoint::new(vec![0.0, 1.0]), Err(Error::UnsortedSpectrum(_))));
    }

    #[test]
    fn abelian_structure_constants_vanish() {
        let sc = structure_constants(1).unwrap();
        assert_eq!(sc.f(0, 0, 0), 0.0);
        assert_eq!(sc.big_f(0, 0, 0), 0.0);
        assert!(structure_constants(0).is_err());
    }

    #[test]
    fn rank_two_structure_constants_are_consistent() {
        let sc = structure_constants(2).unwrap();
        assert!(sc.jacobi_residual() <= 1e-12);
        assert!(sc.dual_jacobi_residual() <= 1e-12);
        assert!(sc.mixed_residual() <= 1e-12);
        assert!(sc.basis_residual() <= 1e-12);
        assert!(sc.antisymmetry_residual() <= 1e-15);
        // u(2) is not abelian and neither is its dual
        let nonzero = (0..4).any(|a| (0..4).any(|b| (0..4).any(|c| sc.f(a, b, c).abs() > 0.1)));
        let nonzero_dual = (0..4).any(|a| (0..4).any(|b| (0..4).any(|c| sc.big_f(a, b, c).abs() > 0.1)));
        assert!(nonzero && nonzero_dual);
    }

    #[test]
    fn traces_of_structure_constants() {
        for r in 1..=5 {
            let sc = structure_constants(r).unwrap();
            let roots = RootDatum::new(r).unwrap();
            assert!(sc.trace_f_residual() <= 1e-12, "r={r}");
            assert!(sc.lemma1_residual(&roots) <= 1e-12, "r={r}");
        }
    }

    #[test]
    fn root_datum_shape() {
        let roots = RootDatum::new(4).unwrap();
        assert_eq!(roots.positive_roots.len(), 6);
        // half-sum of positive-root coordinate vectors (scaled by 1/2π)
        let mut half_sum = vec![0.0; 4];
        for &(j, k) in &roots.positive_roots {
            half_sum[j] += 0.5;
            half_sum[k] -= 0.5;
        }
        for (a, b) in half_sum.iter().zip(&roots.rho_vector) {
            assert!((a / (2.0 * PI) - b).abs() < 1e-15);
        }
        assert_eq!(roots.root_values(&[1.0, -1.0, 0.0, 0.0])[0], 1.0);
    }

    #[test]
    fn hyperbolic_duflo_examples() {
        assert_eq!(hyperbolic_duflo(&ChamberPoint::new(vec![0.0; 3]).unwrap()), 1.0);
        let v = hyperbolic_duflo(&ChamberPoint::new(vec![1.0, -1.0]).unwrap());
        assert!((v - 1.0_f64.sinh()).abs() < 1e-15);
        assert!((v - 1.17520).abs() < 1e-5);
        // continuity across a wall
        let a = hyperbolic_duflo_of(&[1.0, 0.5, 0.5]);
        let b = hyperbolic_duflo_of(&[1.0, 0.5 + 1e-9, 0.5]);
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn modular_tau_examples() {
        assert_eq!(modular_tau(&TriangularPositive::identity(3)), 1.0);
        let l = e_map(&HermitianElement::from_diagonal(&[1.0, -1.0]));
        assert!((modular_tau(&l) - (-2.0_f64).exp()).abs() < 1e-14);
        assert!((modular_tau_direct(&l) - (-2.0_f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn normalization_oracle_fixes_the_root_scale() {
        let lambda = ChamberPoint::new(vec![1.0, -1.0]).unwrap();
        let v = duflo_normalization_oracle(2, &lambda).unwrap();
        assert!((v - 1.0_f64.sinh()).abs() < 1e-6, "{v}");
        let one = duflo_normalization_oracle(1, &ChamberPoint::new(vec![3.0]).unwrap()).unwrap();
        assert!((one - 1.0).abs() < 1e-8);
        assert!(duflo_normalization_oracle(2, &ChamberPoint::new(vec![1.0, 1.0]).unwrap()).is_err());
    }
}
