//! Named scalar observables evaluated at one sweep point for one resource.

use cvtele_core::{
    delta_opt_fidelity, delta_opt_variance, delta_subopt, deviations, fidelity_closed_form,
    fidelity_numeric, output_moments, sigma, ChannelParams, Error, InputState, QuadratureRule,
    ResourceContext, ResourceSpec,
};

use crate::error::{CliError, Result};

/// What an observable sees at a sweep point.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation<'a> {
    pub input: &'a InputState,
    pub resource: &'a ResourceSpec,
    pub params: &'a ChannelParams,
    pub context: &'a ResourceContext,
}

pub trait Observable: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn evaluate(&self, ev: &Evaluation<'_>) -> cvtele_core::Result<f64>;
}

struct Scalar {
    name: &'static str,
    description: &'static str,
    eval: fn(&Evaluation<'_>) -> cvtele_core::Result<f64>,
}

impl Observable for Scalar {
    fn name(&self) -> &'static str {
        self.name
    }

    fn description(&self) -> &'static str {
        self.description
    }

    fn evaluate(&self, ev: &Evaluation<'_>) -> cvtele_core::Result<f64> {
        (self.eval)(ev)
    }
}

/// Closed form where it applies, quadrature otherwise.
pub fn fidelity(
    input: &InputState,
    res: &ResourceSpec,
    params: &ChannelParams,
) -> cvtele_core::Result<f64> {
    match fidelity_closed_form(input, res, params) {
        Err(Error::PhaseConvention(_)) => {
            fidelity_numeric(input, res, params, &QuadratureRule::default())
        }
        other => other,
    }
}

pub struct ObservableRegistry {
    entries: Vec<Box<dyn Observable>>,
    groups: Vec<(&'static str, Vec<&'static str>)>,
}

impl ObservableRegistry {
    pub fn with_defaults() -> Self {
        macro_rules! scalar {
            ($name:expr, $desc:expr, $f:expr) => {
                Box::new(Scalar {
                    name: $name,
                    description: $desc,
                    eval: $f,
                }) as Box<dyn Observable>
            };
        }
        let entries = vec![
            scalar!("fidelity", "teleportation fidelity", |ev| fidelity(
                ev.input,
                ev.resource,
                ev.params
            )),
            scalar!("var_x", "output variance of X", |ev| {
                Ok(output_moments(ev.input, ev.resource, ev.params).var_x)
            }),
            scalar!("var_p", "output variance of P", |ev| {
                Ok(output_moments(ev.input, ev.resource, ev.params).var_p)
            }),
            scalar!("cov_xp", "output symmetrized X-P covariance", |ev| {
                Ok(output_moments(ev.input, ev.resource, ev.params).cov_xp)
            }),
            scalar!("sigma", "excess variance added by the protocol", |ev| Ok(
                sigma(ev.resource, ev.params)
            )),
            scalar!("d_x", "output minus input mean of X", |ev| {
                Ok(deviations(ev.input, ev.resource, ev.params).d_x)
            }),
            scalar!("d_p", "output minus input mean of P", |ev| {
                Ok(deviations(ev.input, ev.resource, ev.params).d_p)
            }),
            scalar!("d_var_x", "output minus input variance of X", |ev| {
                Ok(deviations(ev.input, ev.resource, ev.params).d_var_x)
            }),
            scalar!("d_var_p", "output minus input variance of P", |ev| {
                Ok(deviations(ev.input, ev.resource, ev.params).d_var_p)
            }),
            scalar!("d_cov_xp", "output minus input covariance", |ev| {
                Ok(deviations(ev.input, ev.resource, ev.params).d_cov_xp)
            }),
            scalar!("delta", "mixing angle of the resource", |ev| Ok(ev
                .resource
                .delta())),
            scalar!(
                "delta_opt",
                "fidelity-optimal angle for the actual input squeezing",
                |ev| {
                    Ok(delta_opt_fidelity(
                        ev.context.input_s,
                        ev.context.r,
                        ev.params,
                    ))
                }
            ),
            scalar!(
                "delta_subopt",
                "fidelity-optimal angle for s = s_bar",
                |ev| { Ok(delta_subopt(ev.context.s_bar, ev.context.r, ev.params)) }
            ),
            scalar!("delta_optvar", "variance-optimal angle", |ev| {
                Ok(delta_opt_variance(ev.context.r, ev.params.tau()))
            }),
        ];
        Self {
            entries,
            groups: vec![(
                "deviations",
                vec!["d_x", "d_p", "d_var_x", "d_var_p", "d_cov_xp"],
            )],
        }
    }

    pub fn register(&mut self, obs: Box<dyn Observable>) -> Result<()> {
        if self.get(obs.name()).is_some() || self.groups.iter().any(|(g, _)| *g == obs.name()) {
            return Err(CliError::config(format!(
                "observable `{}` already registered",
                obs.name()
            )));
        }
        self.entries.push(obs);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&dyn Observable> {
        self.entries
            .iter()
            .find(|o| o.name() == name)
            .map(|b| b.as_ref())
    }

    /// A scalar observable, or the members of a group such as `deviations`.
    pub fn expand(&self, name: &str) -> Result<Vec<&dyn Observable>> {
        if let Some(obs) = self.get(name) {
            return Ok(vec![obs]);
        }
        if let Some((_, members)) = self.groups.iter().find(|(g, _)| *g == name) {
            return members
                .iter()
                .map(|m| {
                    self.get(m)
                        .ok_or_else(|| CliError::config(format!("group member `{m}` missing")))
                })
                .collect();
        }
        Err(CliError::config(format!(
            "unknown observable `{name}` (known: {})",
            self.names().collect::<Vec<_>>().join(", ")
        )))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries
            .iter()
            .map(|o| o.name())
            .chain(self.groups.iter().map(|(g, _)| *g))
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Observable> {
        self.entries.iter().map(|b| b.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cvtele_core::StrategyRegistry;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn deviations_group_expands() {
        let reg = ObservableRegistry::with_defaults();
        let names: Vec<_> = reg
            .expand("deviations")
            .unwrap()
            .iter()
            .map(|o| o.name())
            .collect();
        assert_eq!(names, ["d_x", "d_p", "d_var_x", "d_var_p", "d_cov_xp"]);
        assert_eq!(reg.expand("sigma").unwrap().len(), 1);
        assert!(reg.expand("purity").is_err());
    }

    #[test]
    fn values_at_ideal_twin_beam() {
        let reg = ObservableRegistry::with_defaults();
        let params = ChannelParams::ideal();
        let input = InputState::vacuum();
        let ctx = ResourceContext::new(0.5, params);
        let res = StrategyRegistry::with_defaults()
            .lookup("twb")
            .unwrap()
            .resolve(&ctx)
            .unwrap();
        let ev = Evaluation {
            input: &input,
            resource: &res,
            params: &params,
            context: &ctx,
        };
        let get = |n: &str| reg.get(n).unwrap().evaluate(&ev).unwrap();
        assert!((get("fidelity") - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-12);
        assert!((get("sigma") - (-1.0f64).exp()).abs() < 1e-12);
        assert!((get("var_x") - 0.5 - (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(get("d_x"), 0.0);
        assert!((get("delta_optvar") - PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn fidelity_falls_back_to_quadrature() {
        let params = ChannelParams::new(1.0, 0.0, 0.0, 0.8).unwrap();
        let input = InputState::new(Complex64::new(0.4, 0.2), 0.3, 0.7).unwrap();
        let res = ResourceSpec::squeezed_bell(0.4, PI, 0.2, 0.0).unwrap();
        assert!(fidelity_closed_form(&input, &res, &params).is_err());
        let f = fidelity(&input, &res, &params).unwrap();
        assert!(f > 0.0 && f < 1.0);
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut reg = ObservableRegistry::with_defaults();
        let dup = Box::new(Scalar {
            name: "deviations",
            description: "",
            eval: |_| Ok(0.0),
        });
        assert!(reg.register(dup).is_err());
        assert!(reg.iter().count() >= 14);
    }
}
