//! Gauss-Legendre rules and a tensor-product integrator over a rotated box.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("order", "must be positive"));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A box in the plane aligned with the principal axes of a positive-definite
/// quadratic form `Q(x, y) = a x^2 + 2 b xy + c y^2`, each side spanning
/// `+-half_width / sqrt(lambda_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalBox {
    /// Unit vectors of the principal axes.
    axes: [[f64; 2]; 2],
    /// Half-extent along each axis.
    extents: [f64; 2],
}

impl PrincipalBox {
    pub fn from_quadratic_form(a: f64, b: f64, c: f64, half_width: f64) -> Result<Self> {
        let mean = 0.5 * (a + c);
        let diff = 0.5 * (a - c);
        let rad = diff.hypot(b);
        let lambdas = [mean + rad, mean - rad];
        if lambdas[1].is_nan() || lambdas[1] <= 0.0 || !lambdas[0].is_finite() {
            return Err(Error::Domain {
                value: lambdas[1],
                context: "integrand envelope is not positive definite".into(),
            });
        }
        let angle = 0.5 * (2.0 * b).atan2(a - c);
        let (s, co) = angle.sin_cos();
        Ok(Self {
            axes: [[co, s], [-s, co]],
            extents: [
                half_width / lambdas[0].sqrt(),
                half_width / lambdas[1].sqrt(),
            ],
        })
    }

    pub fn extents(&self) -> [f64; 2] {
        self.extents
    }

    /// Tensor-product integral of `f(x, y)` over the box; `f` returns any
    /// summable value.
    pub fn integrate<T, F>(&self, rule: &GaussLegendre, mut f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
        F: FnMut(f64, f64) -> T,
    {
        let [u_axis, v_axis] = self.axes;
        let [eu, ev] = self.extents;
        let mut total = T::default();
        for (xu, wu) in rule.nodes().iter().zip(rule.weights()) {
            let u = eu * xu;
            for (xv, wv) in rule.nodes().iter().zip(rule.weights()) {
                let v = ev * xv;
                let x = u * u_axis[0] + v * v_axis[0];
                let y = u * u_axis[1] + v * v_axis[1];
                total = total + f(x, y) * (wu * wv);
            }
        }
        total * (eu * ev)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rules_are_exact() {
        let r = GaussLegendre::new(3).unwrap();
        let x = (0.6f64).sqrt();
        assert!((r.nodes()[0] + x).abs() < 1e-15);
        assert!(r.nodes()[1].abs() < 1e-15);
        assert!((r.weights()[0] - 5.0 / 9.0).abs() < 1e-15);
        assert!((r.weights()[1] - 8.0 / 9.0).abs() < 1e-15);
        // degree 2n-1 polynomials integrate exactly
        let r = GaussLegendre::new(6).unwrap();
        let v = r.integrate(-1.0, 2.0, |x| x.powi(11) - 3.0 * x.powi(4) + 1.0);
        let exact = (2f64.powi(12) - 1.0) / 12.0 - 3.0 * (32.0 + 1.0) / 5.0 + 3.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 8, 33, 96, 192] {
            let r = GaussLegendre::new(n).unwrap();
            let s: f64 = r.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}: {s}");
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        }
        assert!(GaussLegendre::new(0).is_err());
    }

    #[test]
    fn anisotropic_gaussian() {
        // exp(-Q) with Q = 3x^2 + 2*1.2xy + 0.6y^2 integrates to pi / sqrt(det)
        let (a, b, c) = (3.0, 1.2, 0.6);
        let pb = PrincipalBox::from_quadratic_form(a, b, c, 7.0).unwrap();
        let rule = GaussLegendre::new(64).unwrap();
        let v: f64 = pb.integrate(&rule, |x, y| {
            (-(a * x * x + 2.0 * b * x * y + c * y * y)).exp()
        });
        let exact = PI / (a * c - b * b).sqrt();
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
    }

    #[test]
    fn indefinite_form_is_rejected() {
        assert!(PrincipalBox::from_quadratic_form(1.0, 2.0, 1.0, 6.0).is_err());
    }
}
