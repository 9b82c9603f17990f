//! The 1-form `β = H(E^* ω)` on `k*` and the form evaluator.

use std::fmt;

use crate::error::{Error, Result};
use crate::lie::{b_flat, orthonormal_basis, pairing_raw, AntiHermitianElement, HermitianElement};
use crate::linalg::CMat;

use super::homotopy::{exterior_derivative_one_form, homotopy_two_form};
use super::pushforward::Pushforward;
use super::quadrature::GaussLegendre;

pub const DEFAULT_NODES: usize = 64;
pub const MIN_NODES: usize = 8;

/// `ω_μ(u, v) = -Im tr(A_u A_v^†)` with `A_x = E(μ)^{-1} dE_μ(x)`: the
/// antisymmetrized pullback of `(1/2i) B^C(θ^L, θ̄^L)` through `E`.
pub fn pulled_back_two_form(mu: &HermitianElement, u: &HermitianElement, v: &HermitianElement) -> f64 {
    let push = Pushforward::at(mu);
    two_form_with(&push, u.matrix(), v.matrix())
}

fn two_form_with(push: &Pushforward, u: &CMat, v: &CMat) -> f64 {
    let au = push.left(u);
    let av = push.left(v);
    -crate::linalg::trace_product(&au, &av.adjoint()).im
}

/// Linear coordinates `x^a = <μ, e_a>` on `k*`.
pub(crate) struct HermitianChart {
    basis: Vec<AntiHermitianElement>,
    dual: Vec<CMat>,
}

impl HermitianChart {
    pub(crate) fn new(r: usize) -> Self {
        let basis = orthonormal_basis(r);
        let dual = basis.iter().map(|e| b_flat(e).into_matrix()).collect();
        Self { basis, dual }
    }

    pub(crate) fn coords(&self, mu: &CMat) -> Vec<f64> {
        self.basis.iter().map(|e| pairing_raw(mu, e.matrix())).collect()
    }

    pub(crate) fn point(&self, x: &[f64]) -> CMat {
        let r = self.dual[0].nrows();
        let mut m = CMat::zeros(r, r);
        for (c, h) in x.iter().zip(&self.dual) {
            m += h.scale(*c);
        }
        m
    }
}

fn check_nodes(nodes: usize) -> Result<()> {
    if nodes < MIN_NODES {
        return Err(Error::InvalidParameter(format!("quadrature needs at least {MIN_NODES} nodes, got {nodes}")));
    }
    Ok(())
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

fn beta_with(chart: &HermitianChart, quad: &GaussLegendre, x: &[f64], v: &[f64]) -> f64 {
    homotopy_two_form(quad, x, v, |y, a, b| {
        let push = Pushforward::at(&HermitianElement::from_unchecked(chart.point(y)));
        two_form_with(&push, &chart.point(a), &chart.point(b))
    })
}

/// `β_μ(v) = ∫_0^1 t ω_{tμ}(μ, v) dt` by Gauss-Legendre quadrature.
pub fn beta_eval(mu: &HermitianElement, v: &HermitianElement, nodes: usize) -> Result<f64> {
    check_nodes(nodes)?;
    same_dim(mu.dim(), v.dim())?;
    let quad = GaussLegendre::new(nodes)?;
    let chart = HermitianChart::new(mu.dim());
    Ok(beta_with(&chart, &quad, &chart.coords(mu.matrix()), &chart.coords(v.matrix())))
}

/// `dβ_μ(u, v)` by central differences of [`beta_eval`] with step `step`.
pub fn d_beta(mu: &HermitianElement, u: &HermitianElement, v: &HermitianElement, nodes: usize, step: f64) -> Result<f64> {
    check_nodes(nodes)?;
    same_dim(mu.dim(), u.dim())?;
    same_dim(mu.dim(), v.dim())?;
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("finite-difference step must be positive, got {step}")));
    }
    let quad = GaussLegendre::new(nodes)?;
    let chart = HermitianChart::new(mu.dim());
    let x = chart.coords(mu.matrix());
    Ok(exterior_derivative_one_form(
        &x,
        &chart.coords(u.matrix()),
        &chart.coords(v.matrix()),
        step,
        |y, w| beta_with(&chart, &quad, y, w),
    ))
}

type Rule = dyn Fn(&HermitianElement, &[HermitianElement]) -> f64 + Send + Sync;

/// A differential form on `k*` of degree 1 or 2, evaluated pointwise.
pub struct FormEvaluator {
    pub base_dim: usize,
    pub degree: usize,
    rule: Box<Rule>,
}

impl fmt::Debug for FormEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormEvaluator").field("base_dim", &self.base_dim).field("degree", &self.degree).finish()
    }
}

impl FormEvaluator {
    pub fn new(
        base_dim: usize,
        degree: usize,
        rule: impl Fn(&HermitianElement, &[HermitianElement]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if degree != 1 && degree != 2 {
            return Err(Error::InvalidParameter(format!("form degree must be 1 or 2, got {degree}")));
        }
        Ok(Self { base_dim, degree, rule: Box::new(rule) })
    }

    pub fn beta(r: usize, nodes: usize) -> Result<Self> {
        check_nodes(nodes)?;
        Self::new(r * r, 1, move |mu, args| beta_eval(mu, &args[0], nodes).expect("validated"))
    }

    pub fn d_beta(r: usize, nodes: usize, step: f64) -> Result<Self> {
        check_nodes(nodes)?;
        Self::new(r * r, 2, move |mu, args| d_beta(mu, &args[0], &args[1], nodes, step).expect("validated"))
    }

    pub fn pulled_back(r: usize) -> Self {
        Self::new(r * r, 2, |mu, args| pulled_back_two_form(mu, &args[0], &args[1])).expect("degree 2")
    }

    pub fn evaluate(&self, mu: &HermitianElement, args: &[HermitianElement]) -> Result<f64> {
        if args.len() != self.degree {
            return Err(Error::InvalidParameter(format!("expected {} tangent arguments, got {}", self.degree, args.len())));
        }
        same_dim(self.base_dim, mu.dim() * mu.dim())?;
        for a in args {
            same_dim(mu.dim(), a.dim())?;
        }
        Ok((self.rule)(mu, args))
    }

    /// Largest defect of linearity in the first slot (`u ↦ s u + w`) and, for
    /// 2-forms, of antisymmetry.
    pub fn multilinearity_defect(&self, mu: &HermitianElement, args: &[HermitianElement], w: &HermitianElement, s: f64) -> Result<f64> {
        let base = self.evaluate(mu, args)?;
        let mut shifted = args.to_vec();
        shifted[0] = args[0].scale(s).add(w)?;
        let mut only_w = args.to_vec();
        only_w[0] = w.clone();
        let lin = (self.evaluate(mu, &shifted)? - s * base - self.evaluate(mu, &only_w)?).abs();
        if self.degree == 2 {
            let swapped = [args[1].clone(), args[0].clone()];
            let alt = (self.evaluate(mu, &swapped)? + base).abs();
            return Ok(lin.max(alt));
        }
        Ok(lin)
    }
}
