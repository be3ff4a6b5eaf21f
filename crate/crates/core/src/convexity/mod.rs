//! Sampling certificates for the curvature properties of an equation of state:
//! concavity of Σ(M, V, E), convexity of η(U), positivity of T, and convexity
//! of -s in the Lagrangian variables (τ, u, e + u²/2).
//!
//! A certificate holds for the sampled points only; `samples_checked` on every
//! report records how much evidence it rests on.

mod eigen;
mod hessian;
mod region;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::eos::{EosModel, ExtensiveState};
use crate::error::{Error, Result};
use crate::jet::{compose, max_abs, Jet3, Mat3, Vec3};
use crate::lax::{self, ConservedState};
use crate::thermo;

pub use eigen::{eigenvalues_sym3, min_max_eigenvalues_sym3};
pub use hessian::{hessian3, relative_steps};
pub use region::{Region, Region2, Region3, Sampling};

pub const DEFAULT_TOL_REL: f64 = 1e-7;
pub const DEFAULT_STEP_REL: f64 = 1e-4;
pub const DEFAULT_E_FLOOR: f64 = 0.1;
pub const DEFAULT_SAMPLES: usize = 512;

/// How Hessians are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeRoute {
    /// Chain rule from the model's σ-jet: exact for closed-form models,
    /// cell-aligned differences for tables.
    Jet,
    /// [`hessian3`] applied to the scalar function itself.
    Stencil,
}

impl DerivativeRoute {
    pub fn name(self) -> &'static str {
        match self {
            DerivativeRoute::Jet => "jet",
            DerivativeRoute::Stencil => "stencil",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyConfig {
    /// Eigenvalue tolerance relative to `1 + max|H_ij|`.
    pub tol_rel: f64,
    /// Stencil step relative to `1 + |x_i|`.
    pub step_rel: f64,
    pub route: DerivativeRoute,
    /// Conserved and Lagrangian samples with specific energy below this are skipped.
    pub e_floor: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            tol_rel: DEFAULT_TOL_REL,
            step_rel: DEFAULT_STEP_REL,
            route: DerivativeRoute::Jet,
            e_floor: DEFAULT_E_FLOOR,
        }
    }
}

impl CertifyConfig {
    pub fn stencil() -> Self {
        CertifyConfig {
            route: DerivativeRoute::Stencil,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_rel > 0.0) || !(self.step_rel > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tol_rel and step_rel must be positive (got {}, {})",
                self.tol_rel, self.step_rel
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    Convex,
    Concave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    CertifiedConvex,
    CertifiedConcave,
    Violated,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CertifiedConvex => "certified-convex",
            Verdict::CertifiedConcave => "certified-concave",
            Verdict::Violated => "violated",
            Verdict::Indeterminate => "indeterminate",
        }
    }

    pub fn is_certified(self) -> bool {
        matches!(self, Verdict::CertifiedConvex | Verdict::CertifiedConcave)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "certified-convex" => Ok(Verdict::CertifiedConvex),
            "certified-concave" => Ok(Verdict::CertifiedConcave),
            "violated" => Ok(Verdict::Violated),
            "indeterminate" => Ok(Verdict::Indeterminate),
            other => Err(Error::InvalidConfig(format!("unknown verdict `{other}`"))),
        }
    }
}

/// Outcome of a Hessian-sampling certificate.
///
/// `worst_*` refer to the sample whose wrong-sign eigenvalue (λ_max for a
/// concavity check, λ_min for convexity) is largest relative to its own
/// tolerance `tolerance_used = tol_rel·(1 + max|H_ij|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub property: Curvature,
    pub verdict: Verdict,
    pub worst_eigenvalue: f64,
    pub worst_point: Vec3,
    pub tolerance_used: f64,
    pub samples_checked: usize,
    pub samples_skipped: usize,
    /// Smallest and largest eigenvalue seen over all samples.
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub route: DerivativeRoute,
}

impl ConvexityReport {
    /// Wrong-sign eigenvalue of the worst sample divided by its tolerance;
    /// above 1 means violated.
    pub fn normalized_excess(&self) -> f64 {
        self.wrong_side() / self.tolerance_used
    }

    fn wrong_side(&self) -> f64 {
        match self.property {
            Curvature::Concave => self.worst_eigenvalue,
            Curvature::Convex => -self.worst_eigenvalue,
        }
    }
}

struct Sample {
    point: Vec3,
    lo: f64,
    hi: f64,
    tol: f64,
}

/// Evaluate the Hessian at every admissible point (in parallel, order
/// preserved) and reduce to a report. `hess_at(x, step_rel)` returns `None`
/// for points to skip.
fn certify_points<F>(
    points: &[Vec3],
    property: Curvature,
    cfg: &CertifyConfig,
    hess_at: F,
) -> Result<ConvexityReport>
where
    F: Fn(&Vec3, f64) -> Result<Option<Mat3>> + Sync,
{
    cfg.validate()?;
    let evaluated: Vec<Result<Option<Sample>>> = points
        .par_iter()
        .map(|x| {
            Ok(hess_at(x, cfg.step_rel)?.map(|h| {
                let (lo, hi) = min_max_eigenvalues_sym3(&h);
                Sample {
                    point: *x,
                    lo,
                    hi,
                    tol: cfg.tol_rel * (1.0 + max_abs(&h)),
                }
            }))
        })
        .collect();

    let mut samples = Vec::with_capacity(evaluated.len());
    for s in evaluated {
        if let Some(s) = s? {
            samples.push(s);
        }
    }
    if samples.is_empty() {
        return Err(Error::InfeasibleRegion(
            "no sample point is admissible for the model".into(),
        ));
    }

    let wrong = |s: &Sample| match property {
        Curvature::Concave => s.hi,
        Curvature::Convex => -s.lo,
    };
    let mut worst = &samples[0];
    for s in &samples[1..] {
        if wrong(s) / s.tol > wrong(worst) / worst.tol {
            worst = s;
        }
    }
    let min_eigenvalue = samples.iter().map(|s| s.lo).fold(f64::INFINITY, f64::min);
    let max_eigenvalue = samples
        .iter()
        .map(|s| s.hi)
        .fold(f64::NEG_INFINITY, f64::max);

    let excess = wrong(worst) / worst.tol;
    let verdict = if !excess.is_finite() {
        Verdict::Indeterminate
    } else if excess > 1.0 {
        Verdict::Violated
    } else if cfg.route == DerivativeRoute::Stencil && excess > 0.0 && {
        // wrong-sign but tolerated: it must not grow past tolerance at half the step
        match hess_at(&worst.point, 0.5 * cfg.step_rel)? {
            Some(h) => {
                let (lo, hi) = min_max_eigenvalues_sym3(&h);
                let w = match property {
                    Curvature::Concave => hi,
                    Curvature::Convex => -lo,
                };
                w > worst.tol
            }
            None => true,
        }
    } {
        Verdict::Indeterminate
    } else {
        match property {
            Curvature::Concave => Verdict::CertifiedConcave,
            Curvature::Convex => Verdict::CertifiedConvex,
        }
    };

    Ok(ConvexityReport {
        property,
        verdict,
        worst_eigenvalue: match property {
            Curvature::Concave => worst.hi,
            Curvature::Convex => worst.lo,
        },
        worst_point: worst.point,
        tolerance_used: worst.tol,
        samples_checked: samples.len(),
        samples_skipped: points.len() - samples.len(),
        min_eigenvalue,
        max_eigenvalue,
        route: cfg.route,
    })
}

/// Hessian of Σ at an extensive state.
pub fn sigma_hessian(
    model: &EosModel,
    x: Vec3,
    cfg: &CertifyConfig,
    step_rel: f64,
) -> Result<Mat3> {
    let s = ExtensiveState::from_array(x)?;
    match cfg.route {
        DerivativeRoute::Jet => Ok(model.extensive_jet(&s)?.hess),
        DerivativeRoute::Stencil => {
            model.check_extensive(&s)?;
            hessian3(
                |y| model.sigma_extensive(&ExtensiveState::from_array(y)?),
                x,
                relative_steps(x, step_rel),
            )
        }
    }
}

/// Hessian of η at a conserved state.
pub fn eta_hessian(model: &EosModel, x: Vec3, cfg: &CertifyConfig, step_rel: f64) -> Result<Mat3> {
    let u = ConservedState::from_array(x)?;
    match cfg.route {
        DerivativeRoute::Jet => Ok(lax::eta_jet(model, &u)?.hess),
        DerivativeRoute::Stencil => hessian3(
            |y| lax::lax_entropy(model, &ConservedState::from_array(y)?),
            x,
            relative_steps(x, step_rel),
        ),
    }
}

/// `(τ, u, ê) ↦ -σ(1/τ, ê - u²/2)`.
pub fn lagrangian_entropy(model: &EosModel, x: Vec3) -> Result<f64> {
    let [tau, u, total] = x;
    if !(tau > 0.0) {
        return Err(Error::domain("specific volume", tau, "must be positive"));
    }
    Ok(-model.sigma_specific(1.0 / tau, total - 0.5 * u * u)?)
}

/// Jet of [`lagrangian_entropy`] by the chain rule through ρ = 1/τ, e = ê - u²/2.
pub fn lagrangian_jet(model: &EosModel, x: Vec3) -> Result<Jet3> {
    let [tau, u, total] = x;
    if !(tau > 0.0) {
        return Err(Error::domain("specific volume", tau, "must be positive"));
    }
    let rho = 1.0 / tau;
    let e = total - 0.5 * u * u;
    let j = model.specific_jet(rho, e)?;
    let rho_jet = Jet3 {
        value: rho,
        grad: [-1.0 / (tau * tau), 0.0, 0.0],
        hess: [[2.0 / (tau * tau * tau), 0.0, 0.0], [0.0; 3], [0.0; 3]],
    };
    let e_jet = Jet3 {
        value: e,
        grad: [0.0, -u, 1.0],
        hess: [[0.0; 3], [0.0, -1.0, 0.0], [0.0; 3]],
    };
    Ok(compose(
        -j.sigma,
        [-j.d_rho, -j.d_e],
        [[-j.d_rho_rho, -j.d_rho_e], [-j.d_rho_e, -j.d_e_e]],
        &[rho_jet, e_jet],
    ))
}

fn lagrangian_hessian(
    model: &EosModel,
    x: Vec3,
    cfg: &CertifyConfig,
    step_rel: f64,
) -> Result<Mat3> {
    match cfg.route {
        DerivativeRoute::Jet => Ok(lagrangian_jet(model, x)?.hess),
        DerivativeRoute::Stencil => hessian3(
            |y| lagrangian_entropy(model, y),
            x,
            relative_steps(x, step_rel),
        ),
    }
}

fn usable(model: &EosModel, rho: f64, e: f64, cfg: &CertifyConfig) -> bool {
    e >= cfg.e_floor && model.is_differentiable_at(rho, e)
}

/// Concavity of Σ over a region of (M, V, E). Every sample must be admissible.
pub fn certify_sigma_concave(
    model: &EosModel,
    region: &Region3,
    cfg: &CertifyConfig,
) -> Result<ConvexityReport> {
    certify_points(&region.points(), Curvature::Concave, cfg, |x, step| {
        sigma_hessian(model, *x, cfg, step).map(Some)
    })
}

/// Convexity of η over a region of (ρ, q, ε). Samples whose recovered e is
/// below `cfg.e_floor` or not differentiable for the model are skipped.
pub fn certify_eta_convex(
    model: &EosModel,
    region: &Region3,
    cfg: &CertifyConfig,
) -> Result<ConvexityReport> {
    if !(region.bounds[0].0 > 0.0) {
        return Err(Error::InvalidRegion(
            "density interval must be positive".into(),
        ));
    }
    certify_points(&region.points(), Curvature::Convex, cfg, |x, step| {
        let u = ConservedState::from_array(*x)?;
        if !usable(model, u.rho, u.internal_energy(), cfg) {
            return Ok(None);
        }
        eta_hessian(model, *x, cfg, step).map(Some)
    })
}

/// Convexity of -s over a region of Lagrangian variables (τ, u, e + u²/2).
pub fn certify_wagner(
    model: &EosModel,
    region: &Region3,
    cfg: &CertifyConfig,
) -> Result<ConvexityReport> {
    if !(region.bounds[0].0 > 0.0) {
        return Err(Error::InvalidRegion(
            "specific-volume interval must be positive".into(),
        ));
    }
    certify_points(&region.points(), Curvature::Convex, cfg, |x, step| {
        let [tau, u, total] = *x;
        if !usable(model, 1.0 / tau, total - 0.5 * u * u, cfg) {
            return Ok(None);
        }
        lagrangian_hessian(model, *x, cfg, step).map(Some)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureWitness {
    pub rho: f64,
    pub e: f64,
    /// `None` when ∂σ/∂e was too small to invert.
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureReport {
    pub all_positive: bool,
    pub min_temperature: f64,
    pub min_point: [f64; 2],
    pub violations: usize,
    /// The first few non-positive (or degenerate) samples.
    pub witnesses: Vec<TemperatureWitness>,
    pub samples_checked: usize,
}

impl TemperatureReport {
    pub fn verdict_str(&self) -> &'static str {
        if self.all_positive {
            "all-positive"
        } else {
            "violated"
        }
    }
}

const MAX_WITNESSES: usize = 8;

/// Sign of T over a region of (ρ, e).
pub fn certify_temperature_positive(
    model: &EosModel,
    region: &Region2,
) -> Result<TemperatureReport> {
    let points = region.points();
    let temps: Vec<Result<Option<f64>>> = points
        .par_iter()
        .map(|&[rho, e]| match thermo::temperature(model, rho, e) {
            Ok(t) => Ok(Some(t)),
            Err(Error::Degenerate { .. }) => Ok(None),
            Err(err) => Err(err),
        })
        .collect();

    let mut report = TemperatureReport {
        all_positive: true,
        min_temperature: f64::INFINITY,
        min_point: points[0],
        violations: 0,
        witnesses: Vec::new(),
        samples_checked: points.len(),
    };
    for (p, t) in points.iter().zip(temps) {
        let t = t?;
        if let Some(t) = t {
            if t < report.min_temperature {
                report.min_temperature = t;
                report.min_point = *p;
            }
        }
        if !matches!(t, Some(t) if t > 0.0) {
            report.all_positive = false;
            report.violations += 1;
            if report.witnesses.len() < MAX_WITNESSES {
                report.witnesses.push(TemperatureWitness {
                    rho: p[0],
                    e: p[1],
                    temperature: t,
                });
            }
        }
    }
    Ok(report)
}

/// M, V, E ∈ [0.5, 2].
pub fn default_extensive_region(samples: usize, sampling: Sampling) -> Region3 {
    Region::new([(0.5, 2.0); 3], samples, sampling).expect("static bounds")
}

/// ρ ∈ [0.5, 2], q ∈ [-1, 1], ε ∈ [1, 3].
pub fn default_conserved_region(samples: usize, sampling: Sampling) -> Region3 {
    Region::new([(0.5, 2.0), (-1.0, 1.0), (1.0, 3.0)], samples, sampling).expect("static bounds")
}

/// τ ∈ [0.5, 2], u ∈ [-1, 1], ê ∈ [1, 3].
pub fn default_lagrangian_region(samples: usize, sampling: Sampling) -> Region3 {
    Region::new([(0.5, 2.0), (-1.0, 1.0), (1.0, 3.0)], samples, sampling).expect("static bounds")
}

/// ρ, e ∈ [0.5, 2].
pub fn default_temperature_region(samples: usize, sampling: Sampling) -> Region2 {
    Region::new([(0.5, 2.0); 2], samples, sampling).expect("static bounds")
}
