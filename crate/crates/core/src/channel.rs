//! Output characteristic function of the VBK protocol with detector
//! inefficiency, lossy fiber and non-unity gain.

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::states::{chi_input, chi_resource, ComplexPoint, InputState, ResourceSpec};

/// Imperfections and gain of the protocol.
///
/// `t` is the amplitude transmissivity of the fictitious beam splitter in front
/// of Alice's detectors (`R^2 = 1 - T^2`), `tau` the scaled fiber time, `n_th`
/// the bath photon number and `g` the gain applied by Bob.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    t: f64,
    tau: f64,
    n_th: f64,
    g: f64,
}

impl ChannelParams {
    pub fn new(t: f64, tau: f64, n_th: f64, g: f64) -> Result<Self> {
        let t = ensure_finite("t", t)?;
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::invalid("t", format!("must lie in (0, 1], got {t}")));
        }
        if ensure_finite("tau", tau)? < 0.0 {
            return Err(Error::invalid("tau", format!("must be >= 0, got {tau}")));
        }
        if ensure_finite("n_th", n_th)? < 0.0 {
            return Err(Error::invalid("n_th", format!("must be >= 0, got {n_th}")));
        }
        if ensure_finite("g", g)? <= 0.0 {
            return Err(Error::invalid("g", format!("must be > 0, got {g}")));
        }
        Ok(Self { t, tau, n_th, g })
    }

    /// Channel specified by detector reflectivity `R^2` instead of `T`.
    pub fn from_reflectivity(r_sq: f64, tau: f64, n_th: f64, g: f64) -> Result<Self> {
        let r_sq = ensure_finite("r_sq", r_sq)?;
        if !(0.0..1.0).contains(&r_sq) {
            return Err(Error::invalid(
                "r_sq",
                format!("must lie in [0, 1), got {r_sq}"),
            ));
        }
        Self::new((1.0 - r_sq).sqrt(), tau, n_th, g)
    }

    /// The gain `g = 1/T`, i.e. effective gain exactly one.
    pub fn unit_effective_gain(t: f64, tau: f64, n_th: f64) -> Result<Self> {
        let mut p = Self::new(t, tau, n_th, 1.0)?;
        p.g = 1.0 / p.t;
        Ok(p)
    }

    pub fn ideal() -> Self {
        Self {
            t: 1.0,
            tau: 0.0,
            n_th: 0.0,
            g: 1.0,
        }
    }

    /// Same imperfections, gain reset to `1/T`.
    pub fn with_unit_effective_gain(mut self) -> Self {
        self.g = 1.0 / self.t;
        self
    }

    pub fn with_gain(self, g: f64) -> Result<Self> {
        Self::new(self.t, self.tau, self.n_th, g)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n_th(&self) -> f64 {
        self.n_th
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// `R^2 = 1 - T^2`.
    pub fn r_sq(&self) -> f64 {
        1.0 - self.t * self.t
    }

    pub fn reflectivity(&self) -> f64 {
        self.r_sq().sqrt()
    }

    /// Effective gain `g T`.
    pub fn effective_gain(&self) -> f64 {
        self.g * self.t
    }

    pub fn is_unit_effective_gain(&self) -> bool {
        (self.effective_gain() - 1.0).abs() <= 1e-12
    }
}

/// Gaussian noise exponent of the output state.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GammaValue(pub f64);

impl GammaValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `(1 - e^{-tau})(1/2 + n_th) + g^2 R^2`.
pub fn gamma(params: &ChannelParams) -> GammaValue {
    GammaValue(-(-params.tau).exp_m1() * (0.5 + params.n_th) + params.g * params.g * params.r_sq())
}

/// `chi_out(a) = e^{-Gamma |a|^2} chi_in(g~ a) chi_res(g~ a^*, e^{-tau/2} a)`.
pub fn chi_output(
    input: &InputState,
    res: &ResourceSpec,
    params: &ChannelParams,
    alpha: ComplexPoint,
) -> Complex64 {
    let gt = params.effective_gain();
    let (alice, bob) = resource_arguments(params, alpha);
    let noise = (-gamma(params).value() * alpha.norm_sqr()).exp();
    noise * chi_input(input, alpha * gt) * chi_resource(res, alice, bob)
}

/// Arguments fed to the resource characteristic function: mode 1 (Alice)
/// receives `g~ a^*`, mode 2 (Bob) receives `e^{-tau/2} a`.
pub fn resource_arguments(params: &ChannelParams, alpha: ComplexPoint) -> (Complex64, Complex64) {
    (
        alpha.conj() * params.effective_gain(),
        alpha * (-0.5 * params.tau).exp(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{preset_resource, ResourceKind};
    use crate::units::db_to_natural;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(&ChannelParams::ideal()).value(), 0.0);
        let far = ChannelParams::new(1.0, 60.0, 0.0, 1.0).unwrap();
        assert!((gamma(&far).value() - 0.5).abs() < 1e-15);
        let p = ChannelParams::unit_effective_gain(0.95f64.sqrt(), 0.1, 0.0).unwrap();
        let expect = (1.0 - (-0.1f64).exp()) * 0.5 + 0.05 / 0.95;
        assert!((gamma(&p).value() - expect).abs() < 1e-15);
        assert!((gamma(&p).value() - 0.10021).abs() < 1e-5);
    }

    #[test]
    fn reflectivity_accessors() {
        let p = ChannelParams::from_reflectivity(0.05, 0.1, 0.0, 1.0).unwrap();
        assert!((p.t() * p.t() - 0.95).abs() < 1e-15);
        assert!((p.r_sq() - 0.05).abs() < 1e-15);
        let q = p.with_unit_effective_gain();
        assert!((q.effective_gain() - 1.0).abs() < 1e-15);
        assert!(q.is_unit_effective_gain());
        assert!(!p.is_unit_effective_gain());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ChannelParams::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(ChannelParams::new(1.1, 0.0, 0.0, 1.0).is_err());
        assert!(ChannelParams::new(1.0, -0.1, 0.0, 1.0).is_err());
        assert!(ChannelParams::new(1.0, 0.0, -1.0, 1.0).is_err());
        assert!(ChannelParams::new(1.0, 0.0, 0.0, 0.0).is_err());
        assert!(ChannelParams::from_reflectivity(1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn vacuum_through_unsqueezed_twin_beam() {
        let twb = preset_resource(ResourceKind::TwinBeam, 0.0, PI).unwrap();
        let v = chi_output(
            &InputState::vacuum(),
            &twb,
            &ChannelParams::ideal(),
            c(1.0, 0.0),
        );
        assert!((v - (-1.5f64).exp()).norm() < 1e-15);
    }

    #[test]
    fn strong_twin_beam_approaches_identity() {
        // |chi_in(a)| (1 - e^{-|a|^2 e^{-2r}}) peaks at e^{-1} 2 e^{-2r} for the vacuum
        let inp = InputState::vacuum();
        let p = ChannelParams::ideal();
        for (r_db, bound) in [(25.0, 2.5e-3), (30.0, 1e-3)] {
            let twb = preset_resource(ResourceKind::TwinBeam, db_to_natural(r_db), PI).unwrap();
            let mut worst: f64 = 0.0;
            for i in -20..=20 {
                for j in -20..=20 {
                    let a = c(i as f64 * 0.1, j as f64 * 0.1);
                    if a.norm() > 2.0 {
                        continue;
                    }
                    worst = worst.max((chi_output(&inp, &twb, &p, a) - chi_input(&inp, a)).norm());
                }
            }
            assert!(worst < bound, "r = {r_db} dB: {worst}");
        }
    }

    proptest! {
        #[test]
        fn output_normalized_hermitian_factorized(
            br in -2.0f64..2.0, bi in -2.0f64..2.0, s in 0.0f64..1.2, vp in 0.0f64..TAU,
            r in 0.0f64..1.2, phi in 0.0f64..TAU, d in -1.5f64..1.5, th in 0.0f64..TAU,
            r_sq in 0.0f64..0.1, tau in 0.0f64..0.3, n_th in 0.0f64..0.5, g in 0.7f64..1.4,
            ar in -1.5f64..1.5, ai in -1.5f64..1.5,
        ) {
            let inp = InputState::new(c(br, bi), s, vp).unwrap();
            let res = ResourceSpec::squeezed_bell(r, phi, d, th).unwrap();
            let p = ChannelParams::from_reflectivity(r_sq, tau, n_th, g).unwrap();
            let a = c(ar, ai);
            prop_assert!((chi_output(&inp, &res, &p, c(0.0, 0.0)) - 1.0).norm() < 1e-12);
            let out = chi_output(&inp, &res, &p, a);
            prop_assert!((chi_output(&inp, &res, &p, -a) - out.conj()).norm() < 1e-12);

            let (alice, bob) = resource_arguments(&p, a);
            let parts = [chi_input(&inp, a * p.effective_gain()), chi_resource(&res, alice, bob)];
            if out.norm() > 1e-6 && parts.iter().all(|z| z.norm() > 1e-6) {
                let lhs = out.ln();
                let rhs = -gamma(&p).value() * a.norm_sqr() + parts[0].ln() + parts[1].ln();
                // compare modulo 2 pi i
                let diff = lhs - rhs;
                let wrapped = c(diff.re, (diff.im + PI).rem_euclid(2.0 * PI) - PI);
                prop_assert!(wrapped.norm() < 1e-12, "{:?}", wrapped);
            }
        }
    }
}
