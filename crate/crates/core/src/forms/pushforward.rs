//! Pushforward of tangent vectors of `k*` through `E`.
//!
//! With `P = exp(μ) = l l^†`, a variation `dP` determines `dl` through
//! `l^{-1} dP l^{-†} = A + A^†` where `A = l^{-1} dl` is lower triangular with
//! real diagonal. `dP` itself is the Daleckii-Krein derivative of `exp`.

use num_complex::Complex64;

use crate::decomp::{e_map, TriangularPositive};
use crate::lie::HermitianElement;
use crate::linalg::{self, re, CMat};

/// Cached data at a base point `μ` for evaluating `dE_μ` repeatedly.
#[derive(Debug, Clone)]
pub struct Pushforward {
    mu: CMat,
    l: TriangularPositive,
    linv: CMat,
}

impl Pushforward {
    pub fn at(mu: &HermitianElement) -> Self {
        let l = e_map(mu);
        let linv = l.inverse().into_matrix();
        Self { mu: mu.matrix().clone(), l, linv }
    }

    pub fn base(&self) -> &TriangularPositive {
        &self.l
    }

    /// Left-trivialized differential `l^{-1} dE_μ(x)`.
    pub fn left(&self, x: &CMat) -> CMat {
        let dp = linalg::dexp_herm(&self.mu, x);
        let y = &self.linv * dp * self.linv.adjoint();
        let r = y.nrows();
        CMat::from_fn(r, r, |i, j| {
            if i == j {
                re(0.5 * y[(i, i)].re)
            } else if i > j {
                y[(i, j)]
            } else {
                Complex64::default()
            }
        })
    }

    /// `dE_μ(x)` as a matrix tangent to `K*` at `l`.
    pub fn tangent(&self, x: &CMat) -> CMat {
        self.l.matrix() * self.left(x)
    }

    /// Right-trivialized differential `dE_μ(x) l^{-1}`.
    pub fn right(&self, x: &CMat) -> CMat {
        self.tangent(x) * &self.linv
    }
}

/// `dE_μ(x)`.
pub fn e_differential(mu: &HermitianElement, x: &HermitianElement) -> CMat {
    Pushforward::at(mu).tangent(x.matrix())
}
