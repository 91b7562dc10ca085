//! First and second quadrature moments of the input and teleported states,
//! with `X = (a + a^+)/sqrt 2` and `P = i(a^+ - a)/sqrt 2`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64;

use crate::channel::{chi_output, gamma, ChannelParams};
use crate::error::{Error, Result};
use crate::states::{chi_input, ComplexPoint, InputState, ResourceSpec};

/// Means, variances and the symmetrized cross-variance
/// `<XP + PX> - 2<X><P>` of a single mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub cov_xp: f64,
}

impl QuadratureMoments {
    /// `var_x var_p - (cov_xp / 2)^2`, bounded below by 1/4 for physical states.
    pub fn uncertainty_product(&self) -> f64 {
        self.var_x * self.var_p - 0.25 * self.cov_xp * self.cov_xp
    }

    pub fn satisfies_heisenberg(&self) -> bool {
        self.uncertainty_product() >= 0.25 - 1e-9
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.mean_x - other.mean_x,
            self.mean_p - other.mean_p,
            self.var_x - other.var_x,
            self.var_p - other.var_p,
            self.cov_xp - other.cov_xp,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Output minus input moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentDeviations {
    pub d_x: f64,
    pub d_p: f64,
    pub d_var_x: f64,
    pub d_var_p: f64,
    pub d_cov_xp: f64,
}

pub fn input_moments(state: &InputState) -> QuadratureMoments {
    let beta = state.beta();
    let (sin_phi, cos_phi) = state.varphi().sin_cos();
    let (ch, sh) = ((2.0 * state.s()).cosh(), (2.0 * state.s()).sinh());
    QuadratureMoments {
        mean_x: SQRT_2 * beta.re,
        mean_p: SQRT_2 * beta.im,
        var_x: 0.5 * (ch - cos_phi * sh),
        var_p: 0.5 * (ch + cos_phi * sh),
        cov_xp: -sin_phi * sh,
    }
}

/// Excess variance added identically to both output quadratures.
///
/// Full expression in `(g~, phi_res, theta, delta)`; the unit-gain, optimal-phase
/// and Gaussian special cases are not separate code paths.
pub fn sigma(res: &ResourceSpec, params: &ChannelParams) -> f64 {
    let r = res.r();
    let tau = params.tau();
    let gt = params.effective_gain();
    let phi = res.phi_res();
    let eh = (0.5 * tau).exp();
    let et = tau.exp();
    let (s2d, c2d) = (2.0 * res.delta()).sin_cos();
    let (sin_tp, cos_tp) = (res.theta() - phi).sin_cos();

    let twist = gt / eh * sin_tp * phi.sin() * s2d;
    let narrow = (-2.0 * r - tau).exp() * (1.0 + et * gt * gt - 2.0 * eh * gt * phi.cos());
    let wide = (2.0 * r - tau).exp() * (1.0 + et * gt * gt + 2.0 * eh * gt * phi.cos());
    gamma(params).value() + twist
        - 0.25 * narrow * (c2d - cos_tp * s2d - 2.0)
        - 0.25 * wide * (c2d + cos_tp * s2d - 2.0)
}

pub fn output_moments(
    input: &InputState,
    res: &ResourceSpec,
    params: &ChannelParams,
) -> QuadratureMoments {
    let m = input_moments(input);
    let gt = params.effective_gain();
    let excess = sigma(res, params);
    QuadratureMoments {
        mean_x: gt * m.mean_x,
        mean_p: gt * m.mean_p,
        var_x: gt * gt * m.var_x + excess,
        var_p: gt * gt * m.var_p + excess,
        cov_xp: gt * gt * m.cov_xp,
    }
}

pub fn deviations(
    input: &InputState,
    res: &ResourceSpec,
    params: &ChannelParams,
) -> MomentDeviations {
    let m = input_moments(input);
    let gt = params.effective_gain();
    let amp = gt * gt - 1.0;
    let excess = sigma(res, params);
    MomentDeviations {
        d_x: (gt - 1.0) * m.mean_x,
        d_p: (gt - 1.0) * m.mean_p,
        d_var_x: amp * m.var_x + excess,
        d_var_p: amp * m.var_p + excess,
        d_cov_xp: amp * m.cov_xp,
    }
}

/// Settings of the finite-difference moment extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifference {
    pub step: f64,
    /// Largest accepted disagreement between the last two Richardson levels.
    pub tolerance: f64,
}

impl Default for FiniteDifference {
    fn default() -> Self {
        Self {
            step: 1e-3,
            tolerance: 1e-6,
        }
    }
}

/// First and second derivative at zero of `u -> f(u)`, from central
/// differences at `h`, `h/2`, `h/4` with two Richardson levels.
fn richardson_derivatives<F>(f: F, h: f64, tol: f64) -> Result<(Complex64, Complex64)>
where
    F: Fn(f64) -> Complex64,
{
    let f0 = f(0.0);
    let steps = [h, 0.5 * h, 0.25 * h];
    let mut d1 = [Complex64::default(); 3];
    let mut d2 = [Complex64::default(); 3];
    for (k, &hk) in steps.iter().enumerate() {
        let (fp, fm) = (f(hk), f(-hk));
        d1[k] = (fp - fm) / (2.0 * hk);
        d2[k] = (fp - 2.0 * f0 + fm) / (hk * hk);
    }
    let extrapolate = |d: [Complex64; 3]| {
        let l1 = [(4.0 * d[1] - d[0]) / 3.0, (4.0 * d[2] - d[1]) / 3.0];
        let l2 = (16.0 * l1[1] - l1[0]) / 15.0;
        (l1[1], l2)
    };
    let (a1, b1) = extrapolate(d1);
    let (a2, b2) = extrapolate(d2);
    let spread = (a1 - b1).norm().max((a2 - b2).norm());
    if spread.is_nan() || spread > tol * b2.norm().max(1.0) {
        return Err(Error::Convergence(format!(
            "Richardson levels disagree by {spread:e} (step {h})"
        )));
    }
    Ok((b1, b2))
}

/// `(<Z>, <Z^2>)` for `Z = cos(t) X + sin(t) P`, using
/// `<e^{iuZ}> = chi(i e^{it} u / sqrt 2)`.
fn directional_moments<C>(chi: &C, angle: f64, fd: &FiniteDifference) -> Result<(f64, f64)>
where
    C: Fn(ComplexPoint) -> Complex64,
{
    let dir = Complex64::i() * Complex64::from_polar(FRAC_1_SQRT_2, angle);
    let (d1, d2) = richardson_derivatives(|u| chi(dir * u), fd.step, fd.tolerance)?;
    // d/du <e^{iuZ}> = i<Z>, d^2/du^2 = -<Z^2>
    Ok((d1.im, -d2.re))
}

/// Moments of the state with characteristic function `chi` by finite
/// differences along the X, P and diagonal directions.
pub fn moments_from_characteristic<C>(chi: C, fd: &FiniteDifference) -> Result<QuadratureMoments>
where
    C: Fn(ComplexPoint) -> Complex64,
{
    if !(fd.step > 0.0 && fd.step <= 0.1) {
        return Err(Error::invalid(
            "step",
            format!("must lie in (0, 0.1], got {}", fd.step),
        ));
    }
    let (mx, x2) = directional_moments(&chi, 0.0, fd)?;
    let (mp, p2) = directional_moments(&chi, std::f64::consts::FRAC_PI_2, fd)?;
    let (md, d2) = directional_moments(&chi, std::f64::consts::FRAC_PI_4, fd)?;
    let var_x = x2 - mx * mx;
    let var_p = p2 - mp * mp;
    // Var((X+P)/sqrt2) = (var_x + var_p)/2 + cov_xp/2
    let var_d = d2 - md * md;
    Ok(QuadratureMoments {
        mean_x: mx,
        mean_p: mp,
        var_x,
        var_p,
        cov_xp: 2.0 * var_d - var_x - var_p,
    })
}

/// Output moments extracted numerically from `chi_out`.
pub fn moments_numeric(
    input: &InputState,
    res: &ResourceSpec,
    params: &ChannelParams,
    step: f64,
) -> Result<QuadratureMoments> {
    let fd = FiniteDifference {
        step,
        ..FiniteDifference::default()
    };
    moments_from_characteristic(|a| chi_output(input, res, params, a), &fd)
}

/// Input moments extracted numerically from `chi_in`.
pub fn input_moments_numeric(input: &InputState, step: f64) -> Result<QuadratureMoments> {
    let fd = FiniteDifference {
        step,
        ..FiniteDifference::default()
    };
    moments_from_characteristic(|a| chi_input(input, a), &fd)
}
