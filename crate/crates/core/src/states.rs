//! Characteristic functions of the coherent squeezed input and of the
//! squeezed Bell family of two-mode resources.
//!
//! Displacements follow the Glauber convention `D(a) = exp(a a^+ - a^* a)`,
//! squeezing follows `S(e) = exp(-e a^+^2 / 2 + e^* a^2 / 2)` and
//! `S12(z) = exp(-z a1^+ a2^+ + z^* a1 a2)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::units;

/// A point of the complex phase-space plane; `d^2 a = d(re) d(im)`.
pub type ComplexPoint = Complex64;

/// Reduce an angle into `[0, 2pi)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Whether two angles agree modulo `2pi` within `tol`.
pub fn angles_close(a: f64, b: f64, tol: f64) -> bool {
    let d = normalize_angle(a - b);
    d <= tol || TAU - d <= tol
}

/// Coherent squeezed state `D(beta) S(s e^{i varphi}) |0>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputState {
    beta: Complex64,
    s: f64,
    varphi: f64,
}

impl InputState {
    pub fn new(beta: Complex64, s: f64, varphi: f64) -> Result<Self> {
        ensure_finite("beta", beta.re)?;
        ensure_finite("beta", beta.im)?;
        ensure_finite("varphi", varphi)?;
        if ensure_finite("s", s)? < 0.0 {
            return Err(Error::invalid(
                "s",
                format!("squeezing must be >= 0, got {s}"),
            ));
        }
        Ok(Self {
            beta,
            s,
            varphi: normalize_angle(varphi),
        })
    }

    /// Input squeezing given in dB.
    pub fn from_db(beta: Complex64, s_db: f64, varphi: f64) -> Result<Self> {
        Self::new(beta, units::db_to_natural(s_db), varphi)
    }

    pub fn vacuum() -> Self {
        Self {
            beta: Complex64::new(0.0, 0.0),
            s: 0.0,
            varphi: 0.0,
        }
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn s_db(&self) -> f64 {
        units::natural_to_db(self.s)
    }

    pub fn varphi(&self) -> f64 {
        self.varphi
    }

    /// `a cosh s + a^* e^{i varphi} sinh s`, the argument of the Gaussian factor.
    pub fn squeezed_argument(&self, alpha: ComplexPoint) -> Complex64 {
        alpha * self.s.cosh() + alpha.conj() * Complex64::from_polar(self.s.sinh(), self.varphi)
    }
}

/// Characteristic function `Tr[rho_in D(alpha)]` of the coherent squeezed input.
///
/// Uses `D(b)^+ D(a) D(b) = e^{a b^* - a^* b} D(a)`, so the displacement only
/// contributes a phase and `chi(0) = 1` holds for every state.
pub fn chi_input(state: &InputState, alpha: ComplexPoint) -> Complex64 {
    let phase = alpha * state.beta.conj() - alpha.conj() * state.beta;
    let g = state.squeezed_argument(alpha);
    (phase - 0.5 * g.norm_sqr()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResourceKind {
    /// Gaussian twin beam, `delta = 0`.
    TwinBeam,
    /// Photon-added squeezed state `a1^+ a2^+ S12 |0,0>`.
    PhotonAdded,
    /// Photon-subtracted squeezed state `a1 a2 S12 |0,0>`.
    PhotonSubtracted,
    /// Squeezed Bell state with free mixing angle and phase.
    SqueezedBell,
}

impl ResourceKind {
    pub fn label(self) -> &'static str {
        match self {
            ResourceKind::TwinBeam => "TwB",
            ResourceKind::PhotonAdded => "PAS",
            ResourceKind::PhotonSubtracted => "PSS",
            ResourceKind::SqueezedBell => "SB",
        }
    }
}

/// Two-mode resource `S12(r e^{i phi}) (cos d |0,0> + e^{i theta} sin d |1,1>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceSpec {
    r: f64,
    phi_res: f64,
    delta: f64,
    theta: f64,
    kind: ResourceKind,
}

impl ResourceSpec {
    /// A squeezed Bell resource with free `(delta, theta)`.
    pub fn squeezed_bell(r: f64, phi_res: f64, delta: f64, theta: f64) -> Result<Self> {
        check_r(r)?;
        ensure_finite("phi_res", phi_res)?;
        ensure_finite("delta", delta)?;
        ensure_finite("theta", theta)?;
        Ok(Self {
            r,
            phi_res,
            delta,
            theta,
            kind: ResourceKind::SqueezedBell,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn r_db(&self) -> f64 {
        units::natural_to_db(self.r)
    }

    pub fn phi_res(&self) -> f64 {
        self.phi_res
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn kind(&self) -> ResourceKind {
        self.kind
    }

    /// Same squeezing and phases, free mixing angle `delta`.
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.kind = ResourceKind::SqueezedBell;
        self.delta = delta;
        self
    }

    /// `(xi_1, xi_2)` with `xi_k = a_k cosh r + a_l^* e^{i phi} sinh r`.
    pub fn xi(&self, alpha1: ComplexPoint, alpha2: ComplexPoint) -> (Complex64, Complex64) {
        let c = self.r.cosh();
        let sh = Complex64::from_polar(self.r.sinh(), self.phi_res);
        (
            alpha1 * c + alpha2.conj() * sh,
            alpha2 * c + alpha1.conj() * sh,
        )
    }
}

fn check_r(r: f64) -> Result<f64> {
    if ensure_finite("r", r)? >= 0.0 {
        Ok(r)
    } else {
        Err(Error::invalid(
            "r",
            format!("squeezing must be >= 0, got {r}"),
        ))
    }
}

/// Build a resource from one of the named families.
///
/// PAS and PSS fix `delta = arccos[(cosh 2r)^{-1/2} sinh r]` and
/// `delta = arccos[(cosh 2r)^{-1/2} cosh r]` respectively, both with
/// `theta = phi_res - pi`. `SqueezedBell` returns `delta = theta = 0` as a
/// placeholder for the caller to fill in.
///
/// PSS at `r = 0` is degenerate (`a1 a2 |0,0> = 0`); the formula gives `delta = 0`,
/// i.e. the vacuum, and that is what is returned.
pub fn preset_resource(kind: ResourceKind, r: f64, phi_res: f64) -> Result<ResourceSpec> {
    check_r(r)?;
    ensure_finite("phi_res", phi_res)?;
    let norm = (2.0 * r).cosh().sqrt();
    let (delta, theta) = match kind {
        ResourceKind::TwinBeam | ResourceKind::SqueezedBell => (0.0, 0.0),
        ResourceKind::PhotonAdded => ((r.sinh() / norm).clamp(-1.0, 1.0).acos(), phi_res - PI),
        ResourceKind::PhotonSubtracted => ((r.cosh() / norm).clamp(-1.0, 1.0).acos(), phi_res - PI),
    };
    Ok(ResourceSpec {
        r,
        phi_res,
        delta,
        theta,
        kind,
    })
}

/// Characteristic function `Tr[rho_res D1(alpha1) D2(alpha2)]`.
///
/// The `|0,0><1,1|` coherence contributes `e^{i theta} xi_1^* xi_2^* + c.c.`;
/// this orientation is the one consistent with the excess-noise formula used
/// in [`crate::moments::sigma`]. At `theta = 0` or `pi` both orientations agree.
pub fn chi_resource(res: &ResourceSpec, alpha1: ComplexPoint, alpha2: ComplexPoint) -> Complex64 {
    let (x1, x2) = res.xi(alpha1, alpha2);
    let n1 = x1.norm_sqr();
    let n2 = x2.norm_sqr();
    let (sd, cd) = res.delta.sin_cos();
    let e = Complex64::from_polar(1.0, res.theta);
    let coherence = e * (x1 * x2).conj() + e.conj() * (x1 * x2);
    let poly = Complex64::new(1.0 + sd * sd * (n1 * n2 - n1 - n2), 0.0) + sd * cd * coherence;
    poly * (-0.5 * (n1 + n2)).exp()
}
