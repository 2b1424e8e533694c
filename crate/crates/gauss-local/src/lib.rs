//! Local fractional integral and maximal operators on the Gauss measure
//! space, the commutators they generate with BMO functions, the associated
//! BMO/BLO norm estimators, and an empirical verification harness that
//! checks the governing identities and inequalities at desk scale.

pub mod bmo;
pub mod commutators;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod harness;
pub mod operators;
pub mod oracle;
pub mod quadrature;
pub mod report;
pub mod rules;
pub mod special;

pub use error::{Error, Result};
pub use functions::{
    ball_average, ess_inf_estimate, evaluate, lp_norm, make_atom, validate_atom, AtomSpec,
    FunctionSpec, NormDomain, RealFunction,
};
pub use geometry::{
    admissibility_radius, build_covering, is_admissible, AdmissibleClass, Ball, BoxRegion,
    CoveringFamily, GaussContext, Point,
};
pub use operators::{
    frac_integral, frac_integral_dual, frac_integral_tilde, frac_integral_tilde_dual,
    frac_maximal, local_maximal, sharp_maximal, BallSearchGrid, OperatorParams,
};
pub use harness::{run_check, TheoremCheckConfig, TheoremId};
pub use quadrature::{
    integrate_gauss, integrate_singular, mc_integrate, CounterRng, IntegralEstimate, Method,
    QuadratureConfig,
};
pub use report::VerificationReport;

/// Library version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
