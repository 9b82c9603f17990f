//! Passing between double-coset solutions `g_1⋯g_n = e` and dressing-orbit
//! solutions `l_1⋯l_n = e` in `K*`.

use crate::decomp::{factor_star_k, GroupElement, TriangularPositive, UnitaryElement};
use crate::error::{Error, Result};
use crate::lie::ChamberPoint;
use crate::linalg::{self, CMat};

/// Radial label of the double coset `K g K`: sorted `log` eigenvalues of `g g^†`.
pub fn coset_label(g: &CMat) -> ChamberPoint {
    ChamberPoint::from_unsorted(linalg::herm_eigenvalues(&(g * g.adjoint())).into_iter().map(f64::ln).collect())
}

#[derive(Debug, Clone)]
pub struct CosetSolution {
    pub matrices: Vec<GroupElement>,
    pub labels: Vec<ChamberPoint>,
}

impl CosetSolution {
    pub fn new(matrices: Vec<GroupElement>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidParameter("empty product".into()));
        }
        let r = matrices[0].dim();
        for m in &matrices {
            if m.dim() != r {
                return Err(Error::DimensionMismatch { expected: r, found: m.dim() });
            }
        }
        let labels = matrices.iter().map(|g| coset_label(g.matrix())).collect();
        Ok(Self { matrices, labels })
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    /// `max|g_1⋯g_n - I|`.
    pub fn product_residual(&self) -> f64 {
        let r = self.dim();
        let prod = self.matrices.iter().fold(linalg::identity(r), |acc, g| acc * g.matrix());
        linalg::max_abs(&(prod - linalg::identity(r)))
    }
}

#[derive(Debug, Clone)]
pub struct DressingSolution {
    pub points: Vec<TriangularPositive>,
    /// `k_1, …, k_{n+1}`; `k_{n+1}` equals `k_1` up to the closure defect.
    pub unitaries: Vec<UnitaryElement>,
}

impl DressingSolution {
    pub fn product_residual(&self) -> f64 {
        product_residual(&self.points)
    }

    pub fn closure_defect(&self) -> f64 {
        let first = self.unitaries.first().expect("non-empty");
        let last = self.unitaries.last().expect("non-empty");
        linalg::max_abs(&(first.matrix() - last.matrix()))
    }

    pub fn labels(&self) -> Vec<ChamberPoint> {
        self.points.iter().map(TriangularPositive::radial_label).collect()
    }
}

pub fn product_residual(points: &[TriangularPositive]) -> f64 {
    let r = points[0].dim();
    let prod = points.iter().fold(linalg::identity(r), |acc, l| acc * l.matrix());
    linalg::max_abs(&(prod - linalg::identity(r)))
}

const PRODUCT_TOL: f64 = 1e-8;

/// Starting from `k_1 = I`, factors `k_j g_j = l_j k_{j+1}` for each `j`.
pub fn transfer_coset_to_dressing(sol: &CosetSolution) -> Result<DressingSolution> {
    transfer_coset_to_dressing_from(sol, &UnitaryElement::identity(sol.dim()))
}

/// As [`transfer_coset_to_dressing`] with an arbitrary `k_1`; the result is
/// the diagonal dressing translate of the one obtained from `k_1 = I`.
pub fn transfer_coset_to_dressing_from(sol: &CosetSolution, k1: &UnitaryElement) -> Result<DressingSolution> {
    let residual = sol.product_residual();
    if !(residual <= PRODUCT_TOL) {
        return Err(Error::Precondition(format!("product of coset representatives is off by {residual:.3e}")));
    }
    if k1.dim() != sol.dim() {
        return Err(Error::DimensionMismatch { expected: sol.dim(), found: k1.dim() });
    }
    let mut unitaries = vec![k1.clone()];
    let mut points = Vec::with_capacity(sol.matrices.len());
    for g in &sol.matrices {
        let k = unitaries.last().expect("non-empty");
        let (l, next) = factor_star_k(&GroupElement::new(k.matrix() * g.matrix())?)?;
        points.push(l);
        unitaries.push(next);
    }
    Ok(DressingSolution { points, unitaries })
}

/// `(l_1, …, l_n) ↦ (l_n^{-1}, …, l_1^{-1})`: a solution for the labels
/// `-reversed(λ_j)` in reverse order.
pub fn conjugate_solution(points: &[TriangularPositive]) -> Result<Vec<TriangularPositive>> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty product".into()));
    }
    let residual = product_residual(points);
    if !(residual <= PRODUCT_TOL) {
        return Err(Error::Precondition(format!("product is off by {residual:.3e}")));
    }
    points
        .iter()
        .rev()
        .map(|l| Ok(factor_star_k(&GroupElement::from(l.inverse()))?.0))
        .collect()
}
