//! Named resource strategies.
//!
//! Every entangled resource used in a comparison is produced by a
//! [`ResourceStrategy`]: the fixed families (twin beam, photon-added,
//! photon-subtracted) and the squeezed Bell state tuned by one of the
//! optimization procedures. Strategies are registered by name in a
//! [`StrategyRegistry`] and picked at runtime.

use std::f64::consts::PI;
use std::fmt;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::optimize::{delta_opt_fidelity, delta_opt_variance, delta_subopt, DEFAULT_S_BAR_DB};
use crate::states::{preset_resource, ResourceKind, ResourceSpec};
use crate::units::db_to_natural;

/// Everything a strategy may look at when choosing the resource.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceContext {
    /// Two-mode squeezing, natural units.
    pub r: f64,
    /// Two-mode squeezing phase for the fixed families.
    pub phi_res: f64,
    pub params: ChannelParams,
    /// Actual input squeezing, natural units.
    pub input_s: f64,
    /// Effective input squeezing assumed by the sub-optimal angle.
    pub s_bar: f64,
    /// Mixing angle and phase for the free squeezed Bell strategy.
    pub delta: f64,
    pub theta: f64,
}

impl ResourceContext {
    pub fn new(r: f64, params: ChannelParams) -> Self {
        Self {
            r,
            phi_res: PI,
            params,
            input_s: 0.0,
            s_bar: db_to_natural(DEFAULT_S_BAR_DB),
            delta: 0.0,
            theta: 0.0,
        }
    }

    pub fn with_input_s(mut self, s: f64) -> Self {
        self.input_s = s;
        self
    }

    pub fn with_s_bar(mut self, s_bar: f64) -> Self {
        self.s_bar = s_bar;
        self
    }
}

pub trait ResourceStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn resolve(&self, ctx: &ResourceContext) -> Result<ResourceSpec>;
}

impl fmt::Debug for dyn ResourceStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResourceStrategy")
            .field("name", &self.name())
            .finish()
    }
}

struct Preset {
    name: &'static str,
    description: &'static str,
    kind: ResourceKind,
}

impl ResourceStrategy for Preset {
    fn name(&self) -> &'static str {
        self.name
    }

    fn description(&self) -> &'static str {
        self.description
    }

    fn resolve(&self, ctx: &ResourceContext) -> Result<ResourceSpec> {
        preset_resource(self.kind, ctx.r, ctx.phi_res)
    }
}

/// Squeezed Bell state at `(phi_res, theta) = (pi, 0)` with an angle rule.
struct TunedBell {
    name: &'static str,
    description: &'static str,
    angle: fn(&ResourceContext) -> f64,
}

impl ResourceStrategy for TunedBell {
    fn name(&self) -> &'static str {
        self.name
    }

    fn description(&self) -> &'static str {
        self.description
    }

    fn resolve(&self, ctx: &ResourceContext) -> Result<ResourceSpec> {
        ResourceSpec::squeezed_bell(ctx.r, PI, (self.angle)(ctx), 0.0)
    }
}

struct FreeBell;

impl ResourceStrategy for FreeBell {
    fn name(&self) -> &'static str {
        "sb-free"
    }

    fn description(&self) -> &'static str {
        "squeezed Bell state with user-supplied delta, theta and phi_res"
    }

    fn resolve(&self, ctx: &ResourceContext) -> Result<ResourceSpec> {
        ResourceSpec::squeezed_bell(ctx.r, ctx.phi_res, ctx.delta, ctx.theta)
    }
}

#[derive(Debug, Default)]
pub struct StrategyRegistry {
    entries: Vec<Box<dyn ResourceStrategy>>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry holding `twb`, `pas`, `pss`, `sb-subopt`, `sb-opt`,
    /// `sb-optvar` and `sb-free`.
    pub fn with_defaults() -> Self {
        let mut reg = Self::empty();
        let builtins: Vec<Box<dyn ResourceStrategy>> = vec![
            Box::new(Preset {
                name: "twb",
                description: "Gaussian twin beam (delta = 0)",
                kind: ResourceKind::TwinBeam,
            }),
            Box::new(Preset {
                name: "pas",
                description: "photon-added squeezed state",
                kind: ResourceKind::PhotonAdded,
            }),
            Box::new(Preset {
                name: "pss",
                description: "photon-subtracted squeezed state",
                kind: ResourceKind::PhotonSubtracted,
            }),
            Box::new(TunedBell {
                name: "sb-subopt",
                description: "squeezed Bell state at the fidelity-optimal angle for s = s_bar",
                angle: |ctx| delta_subopt(ctx.s_bar, ctx.r, &ctx.params),
            }),
            Box::new(TunedBell {
                name: "sb-opt",
                description: "squeezed Bell state at the fidelity-optimal angle for the actual s",
                angle: |ctx| delta_opt_fidelity(ctx.input_s, ctx.r, &ctx.params),
            }),
            Box::new(TunedBell {
                name: "sb-optvar",
                description: "squeezed Bell state at the variance-optimal angle",
                angle: |ctx| delta_opt_variance(ctx.r, ctx.params.tau()),
            }),
            Box::new(FreeBell),
        ];
        for s in builtins {
            reg.register(s).expect("builtin names are unique");
        }
        reg
    }

    pub fn register(&mut self, strategy: Box<dyn ResourceStrategy>) -> Result<()> {
        if self.get(strategy.name()).is_some() {
            return Err(Error::invalid(
                "strategy",
                format!("`{}` already registered", strategy.name()),
            ));
        }
        self.entries.push(strategy);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&dyn ResourceStrategy> {
        self.entries
            .iter()
            .find(|s| s.name() == name)
            .map(|b| b.as_ref())
    }

    pub fn lookup(&self, name: &str) -> Result<&dyn ResourceStrategy> {
        self.get(name).ok_or_else(|| Error::Unknown {
            what: "resource strategy",
            name: name.to_string(),
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|s| s.name())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn ResourceStrategy> {
        self.entries.iter().map(|b| b.as_ref())
    }
}
