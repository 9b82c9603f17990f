//! The radial de Rham homotopy operator on a vector space `R^N`.
//!
//! For a `k`-form `α`, `(Hα)_x(v_2, …, v_k) = ∫_0^1 t^{k-1} α_{tx}(x, v_2, …, v_k) dt`
//! and `dH + Hd = id` on forms of positive degree.

use super::quadrature::GaussLegendre;

fn scaled(x: &[f64], t: f64) -> Vec<f64> {
    x.iter().map(|v| v * t).collect()
}

/// `H` of a 1-form: a function.
pub fn homotopy_one_form(quad: &GaussLegendre, x: &[f64], alpha: impl Fn(&[f64], &[f64]) -> f64) -> f64 {
    quad.integrate(|t| alpha(&scaled(x, t), x))
}

/// `H` of a 2-form, evaluated on `v`.
pub fn homotopy_two_form(
    quad: &GaussLegendre,
    x: &[f64],
    v: &[f64],
    omega: impl Fn(&[f64], &[f64], &[f64]) -> f64,
) -> f64 {
    quad.integrate(|t| t * omega(&scaled(x, t), x, v))
}

/// Exterior derivative of a 1-form by central differences along constant
/// vector fields: `dα_x(u, v) = D_u(α(v)) - D_v(α(u))`.
pub fn exterior_derivative_one_form(
    x: &[f64],
    u: &[f64],
    v: &[f64],
    step: f64,
    alpha: impl Fn(&[f64], &[f64]) -> f64,
) -> f64 {
    let shift = |d: &[f64], s: f64| -> Vec<f64> { x.iter().zip(d).map(|(a, b)| a + s * b).collect() };
    let du = (alpha(&shift(u, step), v) - alpha(&shift(u, -step), v)) / (2.0 * step);
    let dv = (alpha(&shift(v, step), u) - alpha(&shift(v, -step), u)) / (2.0 * step);
    du - dv
}

/// Gradient pairing `df_x(v)` by central differences.
pub fn exterior_derivative_function(x: &[f64], v: &[f64], step: f64, f: impl Fn(&[f64]) -> f64) -> f64 {
    let plus: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + step * b).collect();
    let minus: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - step * b).collect();
    (f(&plus) - f(&minus)) / (2.0 * step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random 1-form with cubic polynomial coefficients on `R^n`.
    struct PolyForm {
        n: usize,
        // a_i(x) = c_i + Σ_j l_ij x_j + Σ_jk q_ijk x_j x_k + Σ_jkl s_ijkl x_j x_k x_l
        c: Vec<f64>,
        l: Vec<f64>,
        q: Vec<f64>,
        s: Vec<f64>,
    }

    impl PolyForm {
        fn random(rng: &mut ChaCha8Rng, n: usize) -> Self {
            let mut draw = |len: usize| (0..len).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
            Self { n, c: draw(n), l: draw(n * n), q: draw(n * n * n), s: draw(n * n * n * n) }
        }

        fn coeff(&self, i: usize, x: &[f64]) -> f64 {
            let n = self.n;
            let mut a = self.c[i];
            for j in 0..n {
                a += self.l[i * n + j] * x[j];
                for k in 0..n {
                    a += self.q[(i * n + j) * n + k] * x[j] * x[k];
                    for m in 0..n {
                        a += self.s[((i * n + j) * n + k) * n + m] * x[j] * x[k] * x[m];
                    }
                }
            }
            a
        }

        fn eval(&self, x: &[f64], v: &[f64]) -> f64 {
            (0..self.n).map(|i| self.coeff(i, x) * v[i]).sum()
        }

        /// Exact `dα` from the polynomial derivative.
        fn d(&self, x: &[f64], u: &[f64], v: &[f64]) -> f64 {
            let n = self.n;
            let mut out = 0.0;
            for i in 0..n {
                for j in 0..n {
                    // ∂_j a_i
                    let mut g = self.l[i * n + j];
                    for k in 0..n {
                        g += (self.q[(i * n + j) * n + k] + self.q[(i * n + k) * n + j]) * x[k];
                        for m in 0..n {
                            g += (self.s[((i * n + j) * n + k) * n + m]
                                + self.s[((i * n + k) * n + j) * n + m]
                                + self.s[((i * n + k) * n + m) * n + j])
                                * x[k]
                                * x[m];
                        }
                    }
                    out += g * (u[j] * v[i] - v[j] * u[i]);
                }
            }
            out
        }
    }

    #[test]
    fn homotopy_formula_on_polynomial_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let quad = GaussLegendre::new(8).unwrap();
        for n in [1usize, 3, 4] {
            for _ in 0..5 {
                let alpha = PolyForm::random(&mut rng, n);
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
                let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let h_d = homotopy_two_form(&quad, &x, &v, |y, a, b| alpha.d(y, a, b));
                let d_h = exterior_derivative_function(&x, &v, 1e-5, |y| {
                    homotopy_one_form(&quad, y, |z, w| alpha.eval(z, w))
                });
                let direct = alpha.eval(&x, &v);
                assert!((h_d + d_h - direct).abs() < 1e-8, "n={n}: {h_d} + {d_h} vs {direct}");
            }
        }
    }

    #[test]
    fn finite_difference_derivative_of_exact_form_vanishes() {
        // α = d(x_0^2 x_1) is closed
        let alpha = |x: &[f64], v: &[f64]| 2.0 * x[0] * x[1] * v[0] + x[0] * x[0] * v[1];
        let d = exterior_derivative_one_form(&[0.3, -0.7], &[1.0, 0.2], &[-0.4, 1.0], 1e-4, alpha);
        assert!(d.abs() < 1e-10);
    }
}
