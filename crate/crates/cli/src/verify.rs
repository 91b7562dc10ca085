//! Equivalence checks between closed forms and their numerical oracles.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use cvtele_core::{
    argmin_sigma_bruteforce, chi_resource, db_to_natural, delta_opt_fidelity, delta_opt_variance,
    fidelity_beta_independent, fidelity_closed_form, fidelity_numeric, moments_numeric,
    output_moments, preset_resource, sigma, ChannelParams, InputState, QuadratureRule,
    ResourceKind, ResourceSpec,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::emit::format_value;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    /// Largest absolute discrepancy over the cases.
    pub error: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.error < self.tolerance
    }
}

fn compute(e: cvtele_core::Error) -> CliError {
    CliError::compute(e.to_string())
}

fn uniform_db(rng: &mut StdRng, max_db: f64) -> f64 {
    db_to_natural(rng.gen_range(0.0..=max_db))
}

/// Random `(input, resource, channel)` in the domain of the closed-form
/// fidelity: squeezing up to 10 dB, `tau <= 0.3`, `R^2 <= 0.1`,
/// `n_th <= 0.5`, `|beta| <= 2`, `delta in (-pi/4, pi/4]`, optimal phases.
/// Half the cases use a random gain with `varphi = 0`, the others unit
/// effective gain with a random `varphi`.
pub fn random_fidelity_case(rng: &mut StdRng) -> Result<(InputState, ResourceSpec, ChannelParams)> {
    let r = uniform_db(rng, 10.0);
    let s = uniform_db(rng, 10.0);
    let beta = Complex64::from_polar(rng.gen_range(0.0..=2.0), rng.gen_range(0.0..2.0 * PI));
    let delta = FRAC_PI_4 - rng.gen_range(0.0..PI / 2.0);
    let r_sq = rng.gen_range(0.0..=0.1);
    let tau = rng.gen_range(0.0..=0.3);
    let n_th = rng.gen_range(0.0..=0.5);
    let t = (1.0f64 - r_sq).sqrt();
    let (g, varphi) = if rng.gen_bool(0.5) {
        (rng.gen_range(0.7..1.3) / t, 0.0)
    } else {
        (1.0 / t, rng.gen_range(0.0..2.0 * PI))
    };
    Ok((
        InputState::new(beta, s, varphi).map_err(compute)?,
        ResourceSpec::squeezed_bell(r, PI, delta, 0.0).map_err(compute)?,
        ChannelParams::new(t, tau, n_th, g).map_err(compute)?,
    ))
}

/// Random case with every phase free, for the moment oracle.
pub fn random_moment_case(rng: &mut StdRng) -> Result<(InputState, ResourceSpec, ChannelParams)> {
    let r = uniform_db(rng, 10.0);
    let s = uniform_db(rng, 10.0);
    let beta = Complex64::from_polar(rng.gen_range(0.0..=2.0), rng.gen_range(0.0..2.0 * PI));
    let t = (1.0f64 - rng.gen_range(0.0..=0.1)).sqrt();
    Ok((
        InputState::new(beta, s, rng.gen_range(0.0..2.0 * PI)).map_err(compute)?,
        ResourceSpec::squeezed_bell(
            r,
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(-PI / 2.0..PI / 2.0),
            rng.gen_range(0.0..2.0 * PI),
        )
        .map_err(compute)?,
        ChannelParams::new(
            t,
            rng.gen_range(0.0..=0.3),
            rng.gen_range(0.0..=0.5),
            rng.gen_range(0.7..1.3) / t,
        )
        .map_err(compute)?,
    ))
}

/// Largest `|quadrature - closed form|` fidelity gap over `cases` random points.
pub fn fidelity_oracle_error(cases: usize, seed: u64) -> Result<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let rule = QuadratureRule::default();
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let (input, res, params) = random_fidelity_case(&mut rng)?;
        let closed = fidelity_closed_form(&input, &res, &params).map_err(compute)?;
        let numeric = fidelity_numeric(&input, &res, &params, &rule).map_err(compute)?;
        worst = worst.max((closed - numeric).abs());
    }
    Ok(worst)
}

/// Largest gap between finite-difference and closed-form output moments.
pub fn moment_oracle_error(cases: usize, seed: u64) -> Result<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let (input, res, params) = random_moment_case(&mut rng)?;
        let numeric = moments_numeric(&input, &res, &params, 1e-3).map_err(compute)?;
        worst = worst.max(numeric.max_abs_diff(&output_moments(&input, &res, &params)));
    }
    Ok(worst)
}

const R_GRID: [f64; 6] = [0.0, 0.2, 0.5, 1.0, 1.7, 2.5];

fn lossy() -> ChannelParams {
    ChannelParams::from_reflectivity(0.05, 0.1, 0.0, 1.0)
        .expect("valid channel")
        .with_unit_effective_gain()
}

/// Runs every check. `tolerance` replaces the per-check tolerances.
pub fn run_suite(cases: usize, tolerance: Option<f64>) -> Result<Vec<CheckOutcome>> {
    let ideal = ChannelParams::ideal();
    let sb = |r: f64, d: f64| ResourceSpec::squeezed_bell(r, PI, d, 0.0).map_err(compute);
    let mut out = Vec::new();
    let mut push = |name, cases, error: f64, tol: f64| {
        out.push(CheckOutcome {
            name,
            cases,
            error,
            tolerance: tolerance.unwrap_or(tol),
        })
    };

    push(
        "fidelity: quadrature = closed form",
        cases,
        fidelity_oracle_error(cases, 1)?,
        1e-8,
    );
    push(
        "moments: finite differences = closed form",
        cases,
        moment_oracle_error(cases, 2)?,
        1e-6,
    );

    let mut e = 0.0f64;
    for r in R_GRID {
        let f =
            fidelity_closed_form(&InputState::vacuum(), &sb(r, 0.0)?, &ideal).map_err(compute)?;
        e = e.max((f - 1.0 / (1.0 + (-2.0 * r).exp())).abs());
    }
    push(
        "twin beam, coherent input: F = 1/(1+e^-2r)",
        R_GRID.len(),
        e,
        1e-12,
    );

    let e = R_GRID
        .iter()
        .map(|&r| (delta_opt_variance(r, 0.0) - FRAC_PI_8).abs())
        .fold(0.0, f64::max);
    push(
        "variance-optimal angle at tau = 0 is pi/8",
        R_GRID.len(),
        e,
        1e-12,
    );

    let mut e = 0.0f64;
    for r in R_GRID {
        let s = sigma(&sb(r, FRAC_PI_8)?, &ideal);
        e = e.max((s - (2.0 - 2f64.sqrt()) * (-2.0 * r).exp()).abs());
    }
    push(
        "ideal squeezed Bell excess (2-sqrt2)e^-2r",
        R_GRID.len(),
        e,
        1e-12,
    );

    let mut e = 0.0f64;
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..cases {
        let r = uniform_db(&mut rng, 20.0);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let twb = preset_resource(ResourceKind::TwinBeam, r, phi).map_err(compute)?;
        let bell = ResourceSpec::squeezed_bell(r, phi, 0.0, rng.gen_range(0.0..2.0 * PI))
            .map_err(compute)?;
        let a1 = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let a2 = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        e = e.max((chi_resource(&twb, a1, a2) - chi_resource(&bell, a1, a2)).norm());
    }
    push(
        "squeezed Bell at delta = 0 equals twin beam",
        cases,
        e,
        1e-12,
    );

    let mut e = 0.0f64;
    for r in R_GRID {
        for params in [ideal, lossy()] {
            let found = argmin_sigma_bruteforce(r, &params, 64).map_err(compute)?;
            e = e.max((found - delta_opt_variance(r, params.tau())).abs());
        }
    }
    push(
        "variance-optimal angle: brute force = closed form",
        2 * R_GRID.len(),
        e,
        1e-6,
    );

    let mut e = 0.0f64;
    let h = 1e-4;
    for r in R_GRID {
        for s_db in [0.0, 5.0, 10.0] {
            let s = db_to_natural(s_db);
            for params in [ideal, lossy()] {
                let d = delta_opt_fidelity(s, r, &params);
                let f = |x: f64| fidelity_beta_independent(s, &sb(r, x)?, &params).map_err(compute);
                e = e.max(((f(d + h)? - f(d - h)?) / (2.0 * h)).abs());
            }
        }
    }
    push(
        "fidelity-optimal angle is stationary",
        6 * R_GRID.len(),
        e,
        1e-6,
    );

    let mut e = 0.0f64;
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..cases {
        let (input, res, params) = random_fidelity_case(&mut rng)?;
        let params = params.with_unit_effective_gain();
        let reference = fidelity_beta_independent(input.s(), &res, &params).map_err(compute)?;
        let f = fidelity_closed_form(&input, &res, &params).map_err(compute)?;
        e = e.max((f - reference).abs());
    }
    push(
        "fidelity at unit effective gain is beta-independent",
        cases,
        e,
        1e-10,
    );

    Ok(out)
}

pub fn render(outcomes: &[CheckOutcome]) -> String {
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    let mut s = format!(
        "{:<width$}  {:>6}  {:>24}  {:>24}  result\n",
        "check", "cases", "max error", "tolerance"
    );
    for o in outcomes {
        s += &format!(
            "{:<width$}  {:>6}  {:>24}  {:>24}  {}\n",
            o.name,
            o.cases,
            format_value(o.error),
            format_value(o.tolerance),
            if o.passed() { "PASS" } else { "FAIL" }
        );
    }
    s
}
