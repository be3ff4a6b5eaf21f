//! Entropy-based admissibility checks for equations of state: thermostatic
//! entropy models, Lax entropy pairs for the Euler equations, numerical
//! convexity certificates, cross-checks between them, and a 1D finite-volume
//! solver that tracks total entropy.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod convexity;
pub mod eos;
pub mod error;
pub mod euler1d;
pub mod jet;
pub mod lax;
pub mod propcheck;
pub mod thermo;

pub use convexity::{
    certify_eta_convex, certify_sigma_concave, certify_temperature_positive, certify_wagner,
    CertifyConfig, ConvexityReport, DerivativeRoute, Region, Region2, Region3, Sampling,
    TemperatureReport, Verdict,
};
pub use eos::{EntropyTable, EosKind, EosModel, ExtensiveState, PolytropicParams};
pub use error::{Error, Result};
pub use euler1d::{Boundary, InitialCondition, RunOutput, SimConfig, SimState, StepDiagnostics};
pub use lax::{ConservedState, LaxPair};
pub use propcheck::{equivalence_check, EquivalenceVerdict, Witness};
pub use thermo::ThermoPoint;
