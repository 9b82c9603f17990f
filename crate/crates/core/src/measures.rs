//! Monte Carlo Duistermaat-Heckman measures on `k*` and `K*` and the radial
//! form of the hyperbolic Duflo identity.
//!
//! For K-invariant orbit measures `u_1, u_2` the identity
//! `D_h(u_1) * D_h(u_2) = D_h(u_1 * u_2)` with `D_h = E_* ∘ J_h^{1/2}`
//! reduces, after taking radial parts and normalizing, to
//! `p_mult(λ) = p_add(λ) J_h^{1/2}(λ) / (J_h^{1/2}(λ_1) J_h^{1/2}(λ_2))`:
//! `J_h^{1/2}` is constant on each orbit and `E` maps K-invariant measures on
//! coadjoint orbits to K-invariant measures on dressing orbits, so no power of
//! the modular function enters.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::decomp::{dressing_left, e_map, TriangularPositive, UnitaryElement};
use crate::error::{Error, Result};
use crate::lie::{hyperbolic_duflo, hyperbolic_duflo_of, ChamberPoint, HermitianElement};
use crate::linalg::{self, CMat};
use crate::rng::stream;

/// Samples per independent random stream.
pub const CHUNK: usize = 4096;
pub const MIN_COMPARE_SAMPLES: usize = 100_000;
const MULTIPLICATIVE_STREAM_OFFSET: u64 = 1 << 40;

/// Uniform points `k diag(λ) k^†` of a coadjoint orbit.
pub fn sample_coadjoint(lambda: &ChamberPoint, count: usize, seed: u64) -> Vec<HermitianElement> {
    let r = lambda.dim();
    let d = linalg::diag_real(lambda.values());
    let mut rng = stream(seed, 0);
    (0..count)
        .map(|_| {
            let k = linalg::haar_unitary(&mut rng, r);
            HermitianElement::from_unchecked(&k * &d * k.adjoint())
        })
        .collect()
}

/// Uniform points `dressing_left(k, E(diag λ))` of a dressing orbit.
pub fn sample_dressing(lambda: &ChamberPoint, count: usize, seed: u64) -> Vec<TriangularPositive> {
    let r = lambda.dim();
    let base = e_map(&lambda.to_hermitian());
    let mut rng = stream(seed, 0);
    (0..count)
        .map(|_| {
            let k = UnitaryElement::new(linalg::haar_unitary(&mut rng, r)).expect("Haar sample is unitary");
            dressing_left(&k, &base).expect("matching sizes")
        })
        .collect()
}

/// Radial label of the product `l_1 l_2` in `K*`.
pub fn radial_of_product(l1: &TriangularPositive, l2: &TriangularPositive) -> Result<ChamberPoint> {
    Ok(l1.mul(l2)?.radial_label())
}

/// Per-coordinate regular grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinSpec {
    pub min: f64,
    pub max: f64,
    pub bins: usize,
}

impl BinSpec {
    pub fn width(&self) -> f64 {
        (self.max - self.min) / self.bins as f64
    }

    /// Bin index, clamped into range.
    pub fn index(&self, x: f64) -> usize {
        let t = ((x - self.min) / self.width()).floor();
        if t < 0.0 {
            0
        } else {
            (t as usize).min(self.bins - 1)
        }
    }

    pub fn center(&self, i: usize) -> f64 {
        self.min + (i as f64 + 0.5) * self.width()
    }
}

pub type Histogram = BTreeMap<Vec<u32>, f64>;

/// Weighted samples of a radial measure together with its binning.
#[derive(Debug, Clone)]
pub struct EmpiricalRadialMeasure {
    pub dim: usize,
    pub samples: Vec<ChamberPoint>,
    pub weights: Vec<f64>,
    pub total_mass: f64,
    pub bin_spec: Vec<BinSpec>,
}

impl EmpiricalRadialMeasure {
    pub fn new(samples: Vec<ChamberPoint>, weights: Vec<f64>, bin_spec: Vec<BinSpec>) -> Result<Self> {
        if samples.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: samples.len(), found: weights.len() });
        }
        if samples.is_empty() {
            return Err(Error::Undersampled { count: 0, min: 1 });
        }
        let dim = samples[0].dim();
        if bin_spec.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: bin_spec.len() });
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidParameter("weights must be non-negative".into()));
        }
        let total_mass = weights.iter().sum();
        Ok(Self { dim, samples, weights, total_mass, bin_spec })
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn reweighted(&self, f: impl Fn(&ChamberPoint) -> f64) -> Result<Self> {
        let weights = self.samples.iter().zip(&self.weights).map(|(s, w)| w * f(s)).collect();
        Self::new(self.samples.clone(), weights, self.bin_spec.clone())
    }

    pub fn with_bins(&self, bin_spec: Vec<BinSpec>) -> Result<Self> {
        Self::new(self.samples.clone(), self.weights.clone(), bin_spec)
    }

    pub fn histogram(&self) -> Histogram {
        let mut h = Histogram::new();
        for (s, w) in self.samples.iter().zip(&self.weights) {
            let key = s.values().iter().zip(&self.bin_spec).map(|(x, b)| b.index(*x) as u32).collect();
            *h.entry(key).or_insert(0.0) += w;
        }
        h
    }

    /// Histogram scaled to unit mass.
    pub fn normalized_histogram(&self) -> Histogram {
        let mut h = self.histogram();
        let mass: f64 = h.values().sum();
        if mass > 0.0 {
            h.values_mut().for_each(|v| *v /= mass);
        }
        h
    }

    /// Weighted empirical CDF of one coordinate: sorted `(value, weight)`.
    fn marginal(&self, coord: usize) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> =
            self.samples.iter().zip(&self.weights).map(|(s, w)| (s.values()[coord], *w / self.total_mass)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    }
}

/// Weighted two-sample Kolmogorov-Smirnov statistic of one coordinate.
pub fn ks_statistic(a: &EmpiricalRadialMeasure, b: &EmpiricalRadialMeasure, coord: usize) -> f64 {
    let xa = a.marginal(coord);
    let xb = b.marginal(coord);
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0, 0.0);
    let mut sup: f64 = 0.0;
    while i < xa.len() || j < xb.len() {
        let next = match (xa.get(i), xb.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => break,
        };
        while i < xa.len() && xa[i].0 <= next {
            fa += xa[i].1;
            i += 1;
        }
        while j < xb.len() && xb[j].0 <= next {
            fb += xb[j].1;
            j += 1;
        }
        sup = sup.max((fa - fb).abs());
    }
    sup
}

/// `Σ |p - q|` over the union of occupied bins of two normalized histograms,
/// summed in key order so the result is exactly symmetric.
pub fn l1_distance(p: &Histogram, q: &Histogram) -> f64 {
    let keys: std::collections::BTreeSet<&Vec<u32>> = p.keys().chain(q.keys()).collect();
    keys.into_iter()
        .map(|k| (p.get(k).copied().unwrap_or(0.0) - q.get(k).copied().unwrap_or(0.0)).abs())
        .sum()
}

/// Grid covering `[Σ_j min λ_j, Σ_j max λ_j]` in every coordinate; both
/// convolutions are supported there.
pub fn default_bins(lambdas: &[ChamberPoint], bins: usize) -> Vec<BinSpec> {
    let r = lambdas[0].dim();
    let lo: f64 = lambdas.iter().map(|l| *l.values().last().expect("r >= 1")).sum();
    let hi: f64 = lambdas.iter().map(|l| l.values()[0]).sum();
    if hi - lo > 0.0 {
        let pad = 1e-9 * (hi - lo);
        vec![BinSpec { min: lo - pad, max: hi + pad, bins }; r]
    } else {
        // degenerate support: put the single point in the middle of a bin
        let w = 1.0 / bins as f64;
        let min = lo - ((bins / 2) as f64 + 0.5) * w;
        vec![BinSpec { min, max: min + bins as f64 * w, bins }; r]
    }
}

fn check_spectra(lambdas: &[ChamberPoint]) -> Result<usize> {
    if lambdas.len() < 2 {
        return Err(Error::InvalidParameter("at least two spectra are required".into()));
    }
    let r = lambdas[0].dim();
    for l in lambdas {
        if l.dim() != r {
            return Err(Error::DimensionMismatch { expected: r, found: l.dim() });
        }
    }
    Ok(r)
}

fn chunked<T: Send>(count: usize, f: impl Fn(u64, usize) -> Vec<T> + Sync) -> Vec<T> {
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> =
        (0..chunks).into_par_iter().map(|c| f(c as u64, CHUNK.min(count - c * CHUNK))).collect();
    parts.into_iter().flatten().collect()
}

/// Radial law of `X_1 + … + X_n` for independent uniform `X_j ∈ O_{λ_j}`.
pub fn dh_additive(lambdas: &[ChamberPoint], count: usize, seed: u64) -> Result<EmpiricalRadialMeasure> {
    dh_additive_binned(lambdas, count, seed, 200)
}

pub fn dh_additive_binned(lambdas: &[ChamberPoint], count: usize, seed: u64, bins: usize) -> Result<EmpiricalRadialMeasure> {
    let r = check_spectra(lambdas)?;
    if count == 0 {
        return Err(Error::Undersampled { count, min: 1 });
    }
    let diags: Vec<CMat> = lambdas.iter().map(|l| linalg::diag_real(l.values())).collect();
    let samples = chunked(count, |c, len| {
        let mut rng = stream(seed, c);
        (0..len)
            .map(|_| {
                let mut sum = CMat::zeros(r, r);
                for d in &diags {
                    let k = linalg::haar_unitary(&mut rng, r);
                    sum += &k * d * k.adjoint();
                }
                ChamberPoint::from_unsorted(linalg::herm_eigenvalues(&linalg::hermitian_part(&sum)))
            })
            .collect()
    });
    EmpiricalRadialMeasure::new(samples, vec![1.0; count], default_bins(lambdas, bins))
}

/// Radial law of `l_1 ⋯ l_n` for independent uniform points of the dressing
/// orbits through `E(diag λ_j)`.
pub fn dh_multiplicative(lambdas: &[ChamberPoint], count: usize, seed: u64) -> Result<EmpiricalRadialMeasure> {
    dh_multiplicative_binned(lambdas, count, seed, 200)
}

pub fn dh_multiplicative_binned(
    lambdas: &[ChamberPoint],
    count: usize,
    seed: u64,
    bins: usize,
) -> Result<EmpiricalRadialMeasure> {
    let r = check_spectra(lambdas)?;
    if count == 0 {
        return Err(Error::Undersampled { count, min: 1 });
    }
    let bases: Vec<TriangularPositive> = lambdas.iter().map(|l| e_map(&l.to_hermitian())).collect();
    let samples = chunked(count, |c, len| {
        let mut rng = stream(seed, MULTIPLICATIVE_STREAM_OFFSET + c);
        (0..len)
            .map(|_| {
                let mut prod = TriangularPositive::identity(r);
                for b in &bases {
                    let k = UnitaryElement::new(linalg::haar_unitary(&mut rng, r)).expect("unitary");
                    let l = dressing_left(&k, b).expect("matching sizes");
                    prod = prod.mul(&l).expect("matching sizes");
                }
                prod.radial_label()
            })
            .collect()
    });
    EmpiricalRadialMeasure::new(samples, vec![1.0; count], default_bins(lambdas, bins))
}

/// Outcome of comparing the two sides of the radial Duflo identity.
#[derive(Debug, Clone)]
pub struct MeasureComparison {
    pub l1_distance: f64,
    pub ks_statistic: Vec<f64>,
    pub count_additive: usize,
    pub count_multiplicative: usize,
    pub bin_spec: Vec<BinSpec>,
    pub additive_reweighted: Histogram,
    pub multiplicative: Histogram,
}

impl MeasureComparison {
    /// Rows `(bin centers, reweighted additive mass, multiplicative mass)`
    /// over all occupied bins, in index order.
    pub fn rows(&self) -> Vec<(Vec<f64>, f64, f64)> {
        let keys: std::collections::BTreeSet<&Vec<u32>> =
            self.additive_reweighted.keys().chain(self.multiplicative.keys()).collect();
        keys.into_iter()
            .map(|k| {
                let centers = k.iter().zip(&self.bin_spec).map(|(i, b)| b.center(*i as usize)).collect();
                let a = self.additive_reweighted.get(k).copied().unwrap_or(0.0);
                let m = self.multiplicative.get(k).copied().unwrap_or(0.0);
                (centers, a, m)
            })
            .collect()
    }

    /// CSV with header `bin_center_1,…,bin_center_r,density_additive_reweighted,density_multiplicative`.
    pub fn to_csv(&self) -> String {
        let r = self.bin_spec.len();
        let mut out = String::new();
        let header: Vec<String> = (1..=r).map(|i| format!("bin_center_{i}")).collect();
        out.push_str(&header.join(","));
        out.push_str(",density_additive_reweighted,density_multiplicative\n");
        for (centers, a, m) in self.rows() {
            let mut fields: Vec<String> = centers.iter().map(|c| format!("{c:.16e}")).collect();
            fields.push(format!("{a:.16e}"));
            fields.push(format!("{m:.16e}"));
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Compares the multiplicative radial law of two dressing orbits with the
/// additive radial law of the matching coadjoint orbits reweighted by
/// `J_h^{1/2}(λ) / (J_h^{1/2}(λ_1) J_h^{1/2}(λ_2))`.
pub fn duflo_compare(
    lambda1: &ChamberPoint,
    lambda2: &ChamberPoint,
    count: usize,
    bins: usize,
    seed: u64,
) -> Result<MeasureComparison> {
    if count < MIN_COMPARE_SAMPLES {
        return Err(Error::Undersampled { count, min: MIN_COMPARE_SAMPLES });
    }
    if bins == 0 {
        return Err(Error::InvalidParameter("bins must be positive".into()));
    }
    if lambda1.dim() > 3 {
        return Err(Error::InvalidParameter(format!("rank {} is above 3", lambda1.dim())));
    }
    let lambdas = [lambda1.clone(), lambda2.clone()];
    let add = dh_additive_binned(&lambdas, count, seed, bins)?;
    let mult = dh_multiplicative_binned(&lambdas, count, seed, bins)?;
    let constant = hyperbolic_duflo(lambda1) * hyperbolic_duflo(lambda2);
    let add = add.reweighted(|s| hyperbolic_duflo_of(s.values()) / constant)?;
    let pa = add.normalized_histogram();
    let pm = mult.normalized_histogram();
    Ok(MeasureComparison {
        l1_distance: l1_distance(&pa, &pm),
        ks_statistic: (0..add.dim).map(|c| ks_statistic(&add, &mult, c)).collect(),
        count_additive: add.count(),
        count_multiplicative: mult.count(),
        bin_spec: add.bin_spec.clone(),
        additive_reweighted: pa,
        multiplicative: pm,
    })
}
