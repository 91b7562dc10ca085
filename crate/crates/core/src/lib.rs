//! Continuous-variable teleportation of coherent squeezed states through
//! ideal and lossy Vaidman-Braunstein-Kimble channels, with Gaussian and
//! non-Gaussian (squeezed Bell, photon-added, photon-subtracted) resources.
//!
//! * [`states`]: characteristic functions of inputs and resources
//! * [`channel`]: the output characteristic function of the protocol
//! * [`fidelity`]: closed-form fidelities and their quadrature oracle
//! * [`moments`]: quadrature moments, excess noise, finite-difference oracle
//! * [`optimize`]: fidelity- and variance-optimal mixing angles
//! * [`strategy`]: resource strategies registered by name

pub mod channel;
pub mod error;
pub mod fidelity;
pub mod moments;
pub mod optimize;
pub mod quadrature;
pub mod states;
pub mod strategy;
pub mod units;

pub use channel::{chi_output, gamma, ChannelParams, GammaValue};
pub use error::{Error, Result};
pub use fidelity::{
    derived_quantities, fidelity_beta_independent, fidelity_closed_form, fidelity_numeric,
    DerivedQuantities, QuadratureRule,
};
pub use moments::{
    deviations, input_moments, moments_numeric, output_moments, sigma, MomentDeviations,
    QuadratureMoments,
};
pub use optimize::{
    argmin_sigma_bruteforce, delta_opt_fidelity, delta_opt_variance, delta_subopt,
    OptimizationResult, Procedure,
};
pub use states::{
    chi_input, chi_resource, preset_resource, ComplexPoint, InputState, ResourceKind, ResourceSpec,
};
pub use strategy::{ResourceContext, ResourceStrategy, StrategyRegistry};
pub use units::{db_to_natural, natural_to_db};
