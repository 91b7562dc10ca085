//! Teleportation fidelity: the closed forms for squeezed Bell resources at the
//! optimal phases, and a quadrature evaluation of the phase-space overlap
//! `F = (1/pi) int d^2a chi_in(a) chi_out(-a)` that serves as their oracle.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::{chi_output, gamma, resource_arguments, ChannelParams};
use crate::error::{Error, Result};
use crate::quadrature::{GaussLegendre, PrincipalBox};
use crate::states::{angles_close, chi_input, InputState, ResourceSpec};

const PHASE_TOL: f64 = 1e-9;
const RANGE_SLACK: f64 = 1e-9;

/// The `Lambda`, `Delta`, `omega^2` bundle shared by the closed forms.
///
/// `omega1_sq = (1 - g~)^2 (beta - beta^*)^2 = -4 (1 - g~)^2 Im(beta)^2` is never
/// positive and `omega2_sq = 4 (1 - g~)^2 Re(beta)^2` is never negative, so the
/// prefactor `exp(omega1^2/Lambda1 - omega2^2/Lambda2)` is at most one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    pub delta1: f64,
    pub delta2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub omega1_sq: f64,
    pub omega2_sq: f64,
}

pub fn derived_quantities(
    input: &InputState,
    res: &ResourceSpec,
    params: &ChannelParams,
) -> DerivedQuantities {
    let r = res.r();
    let tau = params.tau();
    let gt = params.effective_gain();
    // 1 + e^{4r} + 2 x (1 - e^{4r}) + x^2 (1 + e^{4r}) with x = e^{tau/2} g~,
    // grouped so the e^{4r} terms do not cancel in floating point
    let x = (0.5 * tau).exp() * gt;
    let e4r = (4.0 * r).exp();
    let (plus, minus) = ((1.0 + x).powi(2), e4r * (1.0 - x).powi(2));
    let delta1 = plus + minus;
    let delta2 = plus - minus;

    let s = input.s();
    let base = (-2.0 * r - tau).exp() * delta1 + 4.0 * gamma(params).value();
    let lambda1 = base + 2.0 * (2.0 * s).exp() * (1.0 + gt * gt);
    let lambda2 = base + 2.0 * (-2.0 * s).exp() * (1.0 + gt * gt);

    let beta = input.beta();
    let k = (1.0 - gt).powi(2);
    let omega1_sq = -4.0 * k * beta.im * beta.im;
    let omega2_sq = 4.0 * k * beta.re * beta.re;

    DerivedQuantities {
        delta1,
        delta2,
        lambda1,
        lambda2,
        omega1_sq,
        omega2_sq,
    }
}

fn check_optimal_phases(res: &ResourceSpec) -> Result<()> {
    if angles_close(res.phi_res(), PI, PHASE_TOL) && angles_close(res.theta(), 0.0, PHASE_TOL) {
        Ok(())
    } else {
        Err(Error::PhaseConvention(format!(
            "closed form requires (phi_res, theta) = (pi, 0), got ({}, {})",
            res.phi_res(),
            res.theta()
        )))
    }
}

fn check_range(value: f64, what: &str) -> Result<f64> {
    if (0.0..=1.0 + RANGE_SLACK).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            value,
            context: format!("{what} must lie in [0, 1]"),
        })
    }
}

/// Closed-form fidelity for a coherent squeezed input and a squeezed Bell
/// resource at `(phi_res, theta) = (pi, 0)`.
///
/// When the displacement terms are active (`g~ != 1` and `beta != 0`) the
/// expression assumes the input squeezing axis `varphi = 0`; other input
/// phases are rejected in that regime. With `g~ = 1` or `beta = 0` the
/// fidelity does not depend on `varphi`.
pub fn fidelity_closed_form(
    input: &InputState,
    res: &ResourceSpec,
    params: &ChannelParams,
) -> Result<f64> {
    check_optimal_phases(res)?;
    let q = derived_quantities(input, res, params);
    let displaced = !params.is_unit_effective_gain() && input.beta() != Complex64::new(0.0, 0.0);
    if displaced && !angles_close(input.varphi(), 0.0, PHASE_TOL) {
        return Err(Error::PhaseConvention(format!(
            "closed form with g~ != 1 and beta != 0 requires varphi = 0, got {}",
            input.varphi()
        )));
    }

    let DerivedQuantities {
        delta1: d1,
        delta2: d2,
        lambda1: l1,
        lambda2: l2,
        omega1_sq: w1,
        omega2_sq: w2,
    } = q;
    let e = (-(2.0 * res.r() + params.tau())).exp();
    let (sd, cd) = res.delta().sin_cos();

    let first = 1.0
        + e * sd * (d2 * cd - d1 * sd) * ((1.0 + 2.0 * w1 / l1) / l1 + (1.0 - 2.0 * w2 / l2) / l2);
    let second = 0.25
        * e
        * e
        * d2
        * d2
        * sd
        * sd
        * ((3.0 + 12.0 * w1 / l1 + 4.0 * w1 * w1 / (l1 * l1)) / (l1 * l1)
            + (3.0 - 12.0 * w2 / l2 + 4.0 * w2 * w2 / (l2 * l2)) / (l2 * l2)
            + 2.0 / (l1 * l2) * (1.0 + 2.0 * w1 / l1 - 2.0 * w2 / l2 - 4.0 * w1 * w2 / (l1 * l2)));
    let f = 4.0 / (l1 * l2).sqrt() * (w1 / l1 - w2 / l2).exp() * (first + second);
    check_range(f, "fidelity")
}

/// Fidelity at effective gain one, where it no longer depends on `beta`.
///
/// The gain in `params` is ignored and replaced by `1/T`.
pub fn fidelity_beta_independent(
    input_s: f64,
    res: &ResourceSpec,
    params: &ChannelParams,
) -> Result<f64> {
    check_optimal_phases(res)?;
    let input = InputState::new(Complex64::new(0.0, 0.0), input_s, 0.0)?;
    let params = params.with_unit_effective_gain();
    let q = derived_quantities(&input, res, &params);
    let (l1, l2) = (q.lambda1, q.lambda2);
    let e = (-(2.0 * res.r() + params.tau())).exp();
    let (sd, cd) = res.delta().sin_cos();
    let quartic = 0.25
        * e
        * e
        * q.delta2
        * q.delta2
        * sd
        * sd
        * (3.0 / (l1 * l1) + 3.0 / (l2 * l2) + 2.0 / (l1 * l2));
    let quadratic = e * sd * (q.delta2 * cd - q.delta1 * sd) * (1.0 / l1 + 1.0 / l2);
    let f = 4.0 / (l1 * l2).sqrt() * (quartic + quadratic + 1.0);
    check_range(f, "fidelity")
}

/// Tensor-product Gauss-Legendre rule for the overlap integral.
///
/// The box is aligned with the principal axes of the Gaussian envelope of the
/// integrand and extends `half_width` envelope lengths `1/sqrt(lambda)` along
/// each axis; `half_width = 6` leaves a tail factor `e^{-36}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRule {
    pub order: usize,
    pub half_width: f64,
    /// Maximum change allowed when the order is doubled.
    pub tolerance: f64,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self {
            order: 96,
            half_width: 6.0,
            tolerance: 1e-9,
        }
    }
}

impl QuadratureRule {
    pub fn new(order: usize, half_width: f64) -> Result<Self> {
        let rule = Self {
            order,
            half_width,
            ..Self::default()
        };
        rule.validate()?;
        Ok(rule)
    }

    fn validate(&self) -> Result<()> {
        if self.order < 8 {
            return Err(Error::invalid(
                "order",
                format!("must be >= 8, got {}", self.order),
            ));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::invalid("half_width", "must be positive and finite"));
        }
        Ok(())
    }
}

/// Exponent `Q(a)` of the Gaussian envelope `|integrand| <= poly(a) e^{-Q(a)}`.
fn envelope_exponent(
    input: &InputState,
    res: &ResourceSpec,
    params: &ChannelParams,
    alpha: Complex64,
) -> f64 {
    let gt = params.effective_gain();
    let (a1, a2) = resource_arguments(params, -alpha);
    let (x1, x2) = res.xi(a1, a2);
    0.5 * input.squeezed_argument(alpha).norm_sqr()
        + 0.5 * input.squeezed_argument(-alpha * gt).norm_sqr()
        + gamma(params).value() * alpha.norm_sqr()
        + 0.5 * (x1.norm_sqr() + x2.norm_sqr())
}

fn overlap(
    input: &InputState,
    res: &ResourceSpec,
    params: &ChannelParams,
    region: &PrincipalBox,
    order: usize,
) -> Result<Complex64> {
    let rule = GaussLegendre::new(order)?;
    let total: Complex64 = region.integrate(&rule, |x, y| {
        let a = Complex64::new(x, y);
        chi_input(input, a) * chi_output(input, res, params, -a)
    });
    Ok(total / PI)
}

/// Fidelity by direct quadrature of the overlap integral. Any phases allowed.
///
/// Evaluates at `rule.order` and twice that order; the result is the
/// higher-order value, and a change larger than `rule.tolerance` is reported
/// as [`Error::Convergence`].
pub fn fidelity_numeric(
    input: &InputState,
    res: &ResourceSpec,
    params: &ChannelParams,
    rule: &QuadratureRule,
) -> Result<f64> {
    rule.validate()?;
    let q = |x: f64, y: f64| envelope_exponent(input, res, params, Complex64::new(x, y));
    // Q is a homogeneous quadratic form, three samples fix it
    let a = q(1.0, 0.0);
    let c = q(0.0, 1.0);
    let b = 0.5 * (q(1.0, 1.0) - a - c);
    let region = PrincipalBox::from_quadratic_form(a, b, c, rule.half_width)?;

    let coarse = overlap(input, res, params, &region, rule.order)?;
    let fine = overlap(input, res, params, &region, 2 * rule.order)?;
    let change = (fine - coarse).norm();
    if change > rule.tolerance {
        return Err(Error::Convergence(format!(
            "fidelity quadrature changed by {change:e} when doubling order {}",
            rule.order
        )));
    }
    if fine.im.abs() > 1e3 * rule.tolerance.max(1e-12) {
        return Err(Error::Domain {
            value: fine.im,
            context: "imaginary part of the overlap integral".into(),
        });
    }
    Ok(fine.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{preset_resource, ResourceKind};
    use crate::units::db_to_natural;

    fn sb(r: f64, delta: f64) -> ResourceSpec {
        ResourceSpec::squeezed_bell(r, PI, delta, 0.0).unwrap()
    }

    #[test]
    fn twin_beam_coherent_state_fidelity() {
        let ideal = ChannelParams::ideal();
        for r in [0.0, 0.3, 1.1, 2.0] {
            let f = fidelity_closed_form(&InputState::vacuum(), &sb(r, 0.0), &ideal).unwrap();
            assert!((f - 1.0 / (1.0 + (-2.0 * r).exp())).abs() < 1e-12);
        }
        let f = fidelity_closed_form(&InputState::vacuum(), &sb(0.0, 0.0), &ideal).unwrap();
        assert!((f - 0.5).abs() < 1e-15);
        let fs = fidelity_beta_independent(0.0, &sb(0.0, 0.0), &ideal).unwrap();
        assert!((fs - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derived_quantities_ideal_unit_gain() {
        let ideal = ChannelParams::ideal();
        for r in [0.0, 0.5, 1.7] {
            let q = derived_quantities(&InputState::vacuum(), &sb(r, 0.3), &ideal);
            assert!((q.delta1 - 4.0).abs() < 1e-9 * (4.0 * r).exp());
            assert!((q.delta2 - 4.0).abs() < 1e-9 * (4.0 * r).exp());
            let lam = 4.0 * (1.0 + (-2.0 * r).exp());
            assert!((q.lambda1 - lam).abs() < 1e-12);
            assert!((q.lambda2 - lam).abs() < 1e-12);
            assert_eq!((q.omega1_sq, q.omega2_sq), (0.0, 0.0));
        }
    }

    #[test]
    fn omega_signs() {
        let p = ChannelParams::new(1.0, 0.0, 0.0, 1.4).unwrap();
        let real = InputState::new(Complex64::new(0.7, 0.0), 0.2, 0.0).unwrap();
        let q = derived_quantities(&real, &sb(0.4, 0.1), &p);
        assert_eq!(q.omega1_sq, 0.0);
        assert!(q.omega2_sq > 0.0);
        let cplx = InputState::new(Complex64::new(0.7, -0.4), 0.2, 0.0).unwrap();
        let q = derived_quantities(&cplx, &sb(0.4, 0.1), &p);
        assert!(q.omega1_sq < 0.0);
        assert!(q.lambda1 > 0.0 && q.lambda2 > 0.0);
    }

    #[test]
    fn closed_form_rejects_other_phases() {
        let ideal = ChannelParams::ideal();
        let wrong = ResourceSpec::squeezed_bell(0.5, 0.0, 0.2, 0.0).unwrap();
        assert!(matches!(
            fidelity_closed_form(&InputState::vacuum(), &wrong, &ideal),
            Err(Error::PhaseConvention(_))
        ));
        let wrong = ResourceSpec::squeezed_bell(0.5, PI, 0.2, 0.3).unwrap();
        assert!(fidelity_beta_independent(0.0, &wrong, &ideal).is_err());
        // phi_res = -pi is the same phase
        let ok = ResourceSpec::squeezed_bell(0.5, -PI, 0.2, 2.0 * PI).unwrap();
        assert!(fidelity_closed_form(&InputState::vacuum(), &ok, &ideal).is_ok());
        // displaced input off the varphi = 0 axis with g~ != 1
        let p = ChannelParams::new(1.0, 0.0, 0.0, 1.2).unwrap();
        let inp = InputState::new(Complex64::new(0.5, 0.0), 0.3, 1.0).unwrap();
        assert!(matches!(
            fidelity_closed_form(&inp, &sb(0.5, 0.2), &p),
            Err(Error::PhaseConvention(_))
        ));
    }

    #[test]
    fn pss_and_pas_presets_are_accepted() {
        let ideal = ChannelParams::ideal();
        for kind in [ResourceKind::PhotonAdded, ResourceKind::PhotonSubtracted] {
            let res = preset_resource(kind, 0.6, PI).unwrap();
            let f = fidelity_closed_form(&InputState::vacuum(), &res, &ideal).unwrap();
            let n = fidelity_numeric(
                &InputState::vacuum(),
                &res,
                &ideal,
                &QuadratureRule::default(),
            )
            .unwrap();
            assert!((f - n).abs() < 1e-10);
        }
    }

    #[test]
    fn numeric_vacuum_through_unsqueezed_twin_beam() {
        let res = preset_resource(ResourceKind::TwinBeam, 0.0, PI).unwrap();
        let f = fidelity_numeric(
            &InputState::vacuum(),
            &res,
            &ChannelParams::ideal(),
            &QuadratureRule::default(),
        )
        .unwrap();
        assert!((f - 0.5).abs() < 1e-13);
    }

    #[test]
    fn numeric_matches_closed_form_with_loss_and_gain() {
        let p = ChannelParams::from_reflectivity(0.05, 0.1, 0.2, 1.3).unwrap();
        let inp = InputState::new(Complex64::new(0.5, 0.3), 0.5, 0.0).unwrap();
        let res = sb(0.7, 0.4);
        let closed = fidelity_closed_form(&inp, &res, &p).unwrap();
        let num = fidelity_numeric(&inp, &res, &p, &QuadratureRule::default()).unwrap();
        assert!((closed - num).abs() < 1e-10, "{closed} vs {num}");
    }

    #[test]
    fn beta_independent_agrees_with_general_form() {
        let p = ChannelParams::from_reflectivity(0.05, 0.1, 0.3, 1.0).unwrap();
        let pu = p.with_unit_effective_gain();
        let res = sb(db_to_natural(10.0), 0.35);
        let s = db_to_natural(5.0);
        let fs = fidelity_beta_independent(s, &res, &p).unwrap();
        for beta in [Complex64::new(0.0, 0.0), Complex64::new(1.5, -0.7)] {
            let inp = InputState::new(beta, s, 0.4).unwrap();
            let f = fidelity_closed_form(&inp, &res, &pu).unwrap();
            assert!((f - fs).abs() < 1e-13);
        }
    }

    #[test]
    fn rule_validation() {
        assert!(QuadratureRule::new(4, 6.0).is_err());
        assert!(QuadratureRule::new(16, 0.0).is_err());
        assert!(QuadratureRule::new(16, 6.0).is_ok());
    }

    #[test]
    fn too_coarse_rule_fails_to_converge() {
        let rule = QuadratureRule::new(8, 6.0).unwrap();
        let inp = InputState::new(Complex64::new(1.5, 1.0), 1.1, 0.0).unwrap();
        let p = ChannelParams::new(1.0, 0.0, 0.0, 1.4).unwrap();
        let r = fidelity_numeric(&inp, &sb(1.0, 0.5), &p, &rule);
        assert!(matches!(r, Err(Error::Convergence(_))), "{r:?}");
    }
}
