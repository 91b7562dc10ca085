//! The two ways of tuning the squeezed Bell mixing angle: maximal fidelity
//! and minimal output-minus-input variance.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::fidelity::{derived_quantities, fidelity_beta_independent};
use crate::moments::sigma;
use crate::states::{InputState, ResourceSpec};
pub use crate::units::{db_to_natural, natural_to_db};

/// Default effective input squeezing used by the sub-optimal angle.
pub const DEFAULT_S_BAR_DB: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Procedure {
    FidelityMax,
    VarianceMin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult {
    pub delta_star: f64,
    /// Fidelity at `delta_star` for [`Procedure::FidelityMax`], excess
    /// variance for [`Procedure::VarianceMin`].
    pub objective_value: f64,
    pub procedure: Procedure,
    pub params: ChannelParams,
    pub r: f64,
}

fn optimal_phase_resource(r: f64, delta: f64) -> Result<ResourceSpec> {
    ResourceSpec::squeezed_bell(r, PI, delta, 0.0)
}

/// Mixing angle maximizing the `beta`-independent fidelity for input
/// squeezing `input_s`, evaluated at effective gain one.
///
/// Principal branch of the arctangent; the denominator stays positive over
/// the parameter ranges of interest, which keeps this a maximum.
pub fn delta_opt_fidelity(input_s: f64, r: f64, params: &ChannelParams) -> f64 {
    let params = params.with_unit_effective_gain();
    let input = InputState::new(Complex64::new(0.0, 0.0), input_s.max(0.0), 0.0)
        .unwrap_or_else(|_| InputState::vacuum());
    let res = ResourceSpec::squeezed_bell(r.max(0.0), PI, 0.0, 0.0)
        .expect("finite non-negative squeezing");
    let q = derived_quantities(&input, &res, &params);
    let (l1, l2) = (q.lambda1, q.lambda2);
    let e = (-2.0 * r - params.tau()).exp();
    let prod = 4.0 * l1 * l2 * (l1 + l2);
    let num = prod * q.delta2;
    let den =
        prod * q.delta1 - e * q.delta2 * q.delta2 * (3.0 * l1 * l1 + 2.0 * l1 * l2 + 3.0 * l2 * l2);
    0.5 * (num / den).atan()
}

/// `delta_opt_fidelity` at a fixed effective input squeezing `s_bar`.
pub fn delta_subopt(s_bar: f64, r: f64, params: &ChannelParams) -> f64 {
    delta_opt_fidelity(s_bar, r, params)
}

/// Mixing angle minimizing the excess variance at effective gain one.
/// Depends only on `r` and `tau`.
pub fn delta_opt_variance(r: f64, tau: f64) -> f64 {
    let eh = (0.5 * tau).exp();
    let plus = (1.0 + eh).powi(2);
    let minus = (4.0 * r).exp() * (1.0 - eh).powi(2);
    0.5 * ((plus - minus) / (plus + minus)).atan()
}

pub fn optimize_fidelity(
    input_s: f64,
    r: f64,
    params: &ChannelParams,
) -> Result<OptimizationResult> {
    let delta = delta_opt_fidelity(input_s, r, params);
    let value = fidelity_beta_independent(input_s, &optimal_phase_resource(r, delta)?, params)?;
    Ok(OptimizationResult {
        delta_star: delta,
        objective_value: value,
        procedure: Procedure::FidelityMax,
        params: params.with_unit_effective_gain(),
        r,
    })
}

pub fn optimize_variance(r: f64, params: &ChannelParams) -> Result<OptimizationResult> {
    let params = params.with_unit_effective_gain();
    let delta = delta_opt_variance(r, params.tau());
    Ok(OptimizationResult {
        delta_star: delta,
        objective_value: sigma(&optimal_phase_resource(r, delta)?, &params),
        procedure: Procedure::VarianceMin,
        params,
        r,
    })
}

/// Outcome of a one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
pub fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<Minimum> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for it in 0..max_iter {
        if (b - a).abs() <= xtol {
            let (x, value) = if fc < fd { (c, fc) } else { (d, fd) };
            return Ok(Minimum {
                x,
                value,
                iterations: it,
            });
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    Err(Error::Convergence(format!(
        "golden section did not reach width {xtol:e} in {max_iter} iterations"
    )))
}

/// Grid scan of `f` over one period `(lo, lo + period]` followed by a
/// golden-section refinement around the best grid point.
pub fn grid_then_golden<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    period: f64,
    grid_size: usize,
    xtol: f64,
) -> Result<Minimum> {
    if grid_size < 3 {
        return Err(Error::invalid("grid_size", "must be >= 3"));
    }
    let step = period / grid_size as f64;
    let (best, _) = (1..=grid_size)
        .map(|i| lo + step * i as f64)
        .map(|x| (x, f(x)))
        .fold((lo + period, f64::INFINITY), |acc, (x, v)| {
            if v < acc.1 {
                (x, v)
            } else {
                acc
            }
        });
    golden_section(f, best - step, best + step, xtol, 500)
}

/// Numerical minimizer of the unit-gain excess variance over
/// `delta in (-pi/2, pi/2]` at `(phi_res, theta) = (pi, 0)`; the oracle for
/// [`delta_opt_variance`].
///
/// Returns [`Error::BranchMismatch`] if the minimum is not in
/// `(-pi/4, pi/4]`, the branch of the closed form.
pub fn argmin_sigma_bruteforce(r: f64, params: &ChannelParams, grid_size: usize) -> Result<f64> {
    let params = params.with_unit_effective_gain();
    let base = optimal_phase_resource(r, 0.0)?;
    let min = grid_then_golden(
        |d| sigma(&base.with_delta(d), &params),
        -FRAC_PI_2,
        PI,
        grid_size,
        1e-10,
    )?;
    // sigma has period pi in delta
    let x = (min.x + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
    if !(x > -FRAC_PI_4 && x <= FRAC_PI_4) {
        return Err(Error::BranchMismatch {
            found: x,
            expected: delta_opt_variance(r, params.tau()),
        });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::db_to_natural;

    #[test]
    fn fidelity_angle_ideal_coherent() {
        let ideal = ChannelParams::ideal();
        for r in [0.0, 0.3, 1.0, 2.5] {
            let d = delta_opt_fidelity(0.0, r, &ideal);
            assert!(
                (d - 0.5 * (1.0 + (-2.0 * r).exp()).atan()).abs() < 1e-12,
                "r = {r}"
            );
        }
        assert!((delta_opt_fidelity(0.0, 0.0, &ideal) - 0.5 * 2f64.atan()).abs() < 1e-14);
        assert!((delta_opt_fidelity(0.0, 0.0, &ideal) - 0.5536).abs() < 1e-4);
        assert!((delta_opt_fidelity(0.0, 12.0, &ideal) - PI / 8.0).abs() < 1e-9);
    }

    #[test]
    fn subopt_is_opt_at_s_bar() {
        let p = ChannelParams::from_reflectivity(0.05, 0.1, 0.0, 1.0).unwrap();
        let s = db_to_natural(DEFAULT_S_BAR_DB);
        assert_eq!(delta_subopt(s, 0.9, &p), delta_opt_fidelity(s, 0.9, &p));
    }

    #[test]
    fn variance_angle() {
        for r in [0.0, 0.5, 2.0] {
            assert!((delta_opt_variance(r, 0.0) - PI / 8.0).abs() < 1e-15);
        }
        for tau in [0.05, 0.1, 0.3] {
            let e: f64 = (tau / 2.0f64).exp();
            let expect = 0.5 * (2.0 * e / (1.0 + tau.exp())).atan();
            assert!((delta_opt_variance(0.0, tau) - expect).abs() < 1e-15);
        }
        assert!((delta_opt_variance(20.0, 0.1) + PI / 8.0).abs() < 1e-12);
    }

    #[test]
    fn golden_section_quadratic() {
        let m = golden_section(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-10, 200).unwrap();
        // a flat minimum is only resolved to ~sqrt(eps)
        assert!((m.x - 0.3).abs() < 1e-7);
        assert!((m.value - 1.0).abs() < 1e-15);
        assert!(golden_section(|x| x, 0.0, 1.0, 1e-12, 5).is_err());
    }

    #[test]
    fn grid_search_picks_global_minimum() {
        // two wells, the deeper one near 2.0
        let f = |x: f64| {
            -(-(x - 2.0f64).powi(2) * 20.0).exp() - 0.5 * (-(x + 1.0f64).powi(2) * 20.0).exp()
        };
        let m = grid_then_golden(f, -3.0, 6.0, 60, 1e-10).unwrap();
        assert!((m.x - 2.0).abs() < 1e-6);
        assert!(grid_then_golden(f, -3.0, 6.0, 2, 1e-10).is_err());
    }

    #[test]
    fn bruteforce_matches_closed_form_ideal() {
        let ideal = ChannelParams::ideal();
        let d = argmin_sigma_bruteforce(0.7, &ideal, 64).unwrap();
        assert!((d - PI / 8.0).abs() < 1e-6);
        let opt = optimize_variance(0.7, &ideal).unwrap();
        assert!((opt.objective_value - (2.0 - 2f64.sqrt()) * (-1.4f64).exp()).abs() < 1e-12);
        assert_eq!(opt.procedure, Procedure::VarianceMin);
    }

    #[test]
    fn fidelity_result_is_consistent() {
        let p = ChannelParams::from_reflectivity(0.05, 0.1, 0.0, 1.0).unwrap();
        let s = db_to_natural(5.0);
        let res = optimize_fidelity(s, db_to_natural(10.0), &p).unwrap();
        assert!(res.objective_value > 0.0 && res.objective_value <= 1.0);
        assert!(res.params.is_unit_effective_gain());
        let at = |d: f64| {
            fidelity_beta_independent(s, &optimal_phase_resource(res.r, d).unwrap(), &p).unwrap()
        };
        assert_eq!(at(res.delta_star), res.objective_value);
        assert!(at(res.delta_star + 1e-3) < res.objective_value);
        assert!(at(res.delta_star - 1e-3) < res.objective_value);
    }
}
