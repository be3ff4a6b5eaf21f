//! Equations of state given as a thermostatic entropy function Σ(M, V, E).
//!
//! Every model is first-order homogeneous by construction. Closed-form models
//! evaluate Σ directly; the tabulated model stores the specific entropy
//! σ(ρ, e) and defines Σ(M, V, E) = M·σ(M/V, E/M).

mod table;

use std::ops::Add;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{compose, Jet3, SpecificJet};

pub use table::{linspace, EntropyTable, DEFAULT_STEP_CELLS};

/// Mass, volume and internal energy of a gas sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensiveState {
    pub mass: f64,
    pub volume: f64,
    pub energy: f64,
}

impl ExtensiveState {
    pub fn new(mass: f64, volume: f64, energy: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::domain("mass", mass, "mass must be positive"));
        }
        if !(volume > 0.0) {
            return Err(Error::domain("volume", volume, "volume must be positive"));
        }
        if !energy.is_finite() {
            return Err(Error::domain("energy", energy, "energy must be finite"));
        }
        Ok(ExtensiveState {
            mass,
            volume,
            energy,
        })
    }

    pub fn from_array(x: [f64; 3]) -> Result<Self> {
        Self::new(x[0], x[1], x[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.mass, self.volume, self.energy]
    }

    /// `λ·(M, V, E)`.
    pub fn scale(self, lambda: f64) -> Self {
        ExtensiveState {
            mass: lambda * self.mass,
            volume: lambda * self.volume,
            energy: lambda * self.energy,
        }
    }

    /// `(1 - t)·self + t·other`.
    pub fn lerp(self, other: Self, t: f64) -> Self {
        ExtensiveState {
            mass: (1.0 - t) * self.mass + t * other.mass,
            volume: (1.0 - t) * self.volume + t * other.volume,
            energy: (1.0 - t) * self.energy + t * other.energy,
        }
    }

    pub fn density(&self) -> f64 {
        self.mass / self.volume
    }

    pub fn specific_energy(&self) -> f64 {
        self.energy / self.mass
    }
}

impl Add for ExtensiveState {
    type Output = ExtensiveState;

    fn add(self, rhs: Self) -> Self {
        ExtensiveState {
            mass: self.mass + rhs.mass,
            volume: self.volume + rhs.volume,
            energy: self.energy + rhs.energy,
        }
    }
}

/// Parameters of the constant-specific-heat entropy
/// `Σ = M·Cv·(ln(E·M0 / (E0·M)) + (γ-1)·ln(V·M0 / (V0·M)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolytropicParams {
    pub gamma: f64,
    pub cv: f64,
    pub m0: f64,
    pub v0: f64,
    pub e0: f64,
}

impl PolytropicParams {
    pub fn new(gamma: f64, cv: f64) -> Result<Self> {
        Self::with_reference(gamma, cv, 1.0, 1.0, 1.0)
    }

    pub fn with_reference(gamma: f64, cv: f64, m0: f64, v0: f64, e0: f64) -> Result<Self> {
        let checks = [
            ("gamma", gamma),
            ("cv", cv),
            ("m0", m0),
            ("v0", v0),
            ("e0", e0),
        ];
        for (name, value) in checks {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(PolytropicParams {
            gamma,
            cv,
            m0,
            v0,
            e0,
        })
    }

    fn sigma(&self, m: f64, v: f64, e: f64) -> f64 {
        m * self.cv
            * ((e * self.m0 / (self.e0 * m)).ln()
                + (self.gamma - 1.0) * (v * self.m0 / (self.v0 * m)).ln())
    }

    fn specific_jet(&self, rho: f64, e: f64, sigma: f64) -> SpecificJet {
        let (cv, gm1) = (self.cv, self.gamma - 1.0);
        SpecificJet {
            sigma,
            d_rho: -cv * gm1 / rho,
            d_e: cv / e,
            d_rho_rho: cv * gm1 / (rho * rho),
            d_rho_e: 0.0,
            d_e_e: -cv / (e * e),
        }
    }
}

impl Default for PolytropicParams {
    fn default() -> Self {
        PolytropicParams {
            gamma: 1.4,
            cv: 1.0,
            m0: 1.0,
            v0: 1.0,
            e0: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EosKind {
    Polytropic,
    PathologicalGamma,
    NegativeTemperature,
    Tabulated,
}

impl EosKind {
    pub fn name(self) -> &'static str {
        match self {
            EosKind::Polytropic => "polytropic",
            EosKind::PathologicalGamma => "pathological-gamma",
            EosKind::NegativeTemperature => "negative-temperature",
            EosKind::Tabulated => "tabulated",
        }
    }
}

/// Rectangular admissible domain in specific variables (ρ, e); bounds are open
/// for closed-form models and closed for tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecificDomain {
    pub rho: (f64, f64),
    pub e: (f64, f64),
}

impl SpecificDomain {
    pub fn contains(&self, rho: f64, e: f64) -> bool {
        rho >= self.rho.0 && rho <= self.rho.1 && e >= self.e.0 && e <= self.e.1
    }
}

/// An equation of state. Immutable; cloning a tabulated model shares its table.
#[derive(Debug, Clone, PartialEq)]
pub enum EosModel {
    Polytropic(PolytropicParams),
    /// The polytropic formula with γ < 1 allowed, which breaks concavity.
    PathologicalGamma(PolytropicParams),
    /// `Σ = -(E² + V²)/M`: concave, but ∂Σ/∂E < 0 for E > 0.
    NegativeTemperature,
    Tabulated(Arc<EntropyTable>),
}

impl EosModel {
    pub fn polytropic(gamma: f64, cv: f64) -> Result<Self> {
        Ok(EosModel::Polytropic(PolytropicParams::new(gamma, cv)?))
    }

    pub fn pathological_gamma(gamma: f64, cv: f64) -> Result<Self> {
        Ok(EosModel::PathologicalGamma(PolytropicParams::new(
            gamma, cv,
        )?))
    }

    pub fn negative_temperature() -> Self {
        EosModel::NegativeTemperature
    }

    pub fn tabulated(table: EntropyTable) -> Self {
        EosModel::Tabulated(Arc::new(table))
    }

    /// Sample this model's σ on the given axes into a tabulated model.
    pub fn tabulate(&self, rho: Vec<f64>, e: Vec<f64>) -> Result<EosModel> {
        let table = EntropyTable::from_fn(rho, e, |r, en| self.sigma_specific(r, en))?;
        Ok(EosModel::tabulated(table))
    }

    pub fn kind(&self) -> EosKind {
        match self {
            EosModel::Polytropic(_) => EosKind::Polytropic,
            EosModel::PathologicalGamma(_) => EosKind::PathologicalGamma,
            EosModel::NegativeTemperature => EosKind::NegativeTemperature,
            EosModel::Tabulated(_) => EosKind::Tabulated,
        }
    }

    pub fn polytropic_params(&self) -> Option<&PolytropicParams> {
        match self {
            EosModel::Polytropic(p) | EosModel::PathologicalGamma(p) => Some(p),
            _ => None,
        }
    }

    /// Closed-form models carry exact first and second derivatives.
    pub fn has_analytic_derivatives(&self) -> bool {
        !matches!(self, EosModel::Tabulated(_))
    }

    pub fn specific_domain(&self) -> SpecificDomain {
        match self {
            EosModel::Polytropic(_) | EosModel::PathologicalGamma(_) => SpecificDomain {
                rho: (0.0, f64::INFINITY),
                e: (0.0, f64::INFINITY),
            },
            EosModel::NegativeTemperature => SpecificDomain {
                rho: (0.0, f64::INFINITY),
                e: (f64::NEG_INFINITY, f64::INFINITY),
            },
            EosModel::Tabulated(t) => SpecificDomain {
                rho: t.rho_range(),
                e: t.e_range(),
            },
        }
    }

    /// Whether derivatives can be taken at (ρ, e): always inside the open
    /// domain for closed forms, and at least one differencing stencil away
    /// from the table edges otherwise.
    pub fn is_differentiable_at(&self, rho: f64, e: f64) -> bool {
        match self {
            EosModel::Tabulated(t) => t.stencil_fits(rho, e),
            _ => self.check_specific(rho, e).is_ok(),
        }
    }

    pub fn check_specific(&self, rho: f64, e: f64) -> Result<()> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::domain("density", rho, "density must be positive"));
        }
        if !e.is_finite() {
            return Err(Error::domain("specific energy", e, "must be finite"));
        }
        match self {
            EosModel::Polytropic(_) | EosModel::PathologicalGamma(_) if e <= 0.0 => Err(
                Error::domain("specific energy", e, "must be positive for this model"),
            ),
            EosModel::Tabulated(t) => t.check_range(rho, e),
            _ => Ok(()),
        }
    }

    pub fn check_extensive(&self, s: &ExtensiveState) -> Result<()> {
        if !(s.mass > 0.0) {
            return Err(Error::domain("mass", s.mass, "mass must be positive"));
        }
        if !(s.volume > 0.0) {
            return Err(Error::domain("volume", s.volume, "volume must be positive"));
        }
        match self {
            EosModel::Polytropic(_) | EosModel::PathologicalGamma(_) if !(s.energy > 0.0) => Err(
                Error::domain("energy", s.energy, "must be positive for this model"),
            ),
            EosModel::Tabulated(t) => t.check_range(s.density(), s.specific_energy()),
            _ => Ok(()),
        }
    }

    /// Σ(M, V, E).
    pub fn sigma_extensive(&self, s: &ExtensiveState) -> Result<f64> {
        self.check_extensive(s)?;
        Ok(match self {
            EosModel::Polytropic(p) | EosModel::PathologicalGamma(p) => {
                p.sigma(s.mass, s.volume, s.energy)
            }
            EosModel::NegativeTemperature => -(s.energy * s.energy + s.volume * s.volume) / s.mass,
            EosModel::Tabulated(t) => s.mass * t.interpolate(s.density(), s.specific_energy())?,
        })
    }

    /// σ(ρ, e) = Σ(1, 1/ρ, e).
    pub fn sigma_specific(&self, rho: f64, e: f64) -> Result<f64> {
        self.check_specific(rho, e)?;
        match self {
            EosModel::Tabulated(t) => t.interpolate(rho, e),
            _ => self.sigma_extensive(&ExtensiveState {
                mass: 1.0,
                volume: 1.0 / rho,
                energy: e,
            }),
        }
    }

    /// σ and its first and second partial derivatives at (ρ, e).
    pub fn specific_jet(&self, rho: f64, e: f64) -> Result<SpecificJet> {
        match self {
            EosModel::Polytropic(p) | EosModel::PathologicalGamma(p) => {
                let sigma = self.sigma_specific(rho, e)?;
                Ok(p.specific_jet(rho, e, sigma))
            }
            EosModel::NegativeTemperature => {
                let sigma = self.sigma_specific(rho, e)?;
                Ok(SpecificJet {
                    sigma,
                    d_rho: 2.0 / (rho * rho * rho),
                    d_e: -2.0 * e,
                    d_rho_rho: -6.0 / (rho * rho * rho * rho),
                    d_rho_e: 0.0,
                    d_e_e: -2.0,
                })
            }
            EosModel::Tabulated(t) => t.difference_jet(rho, e),
        }
    }

    /// Σ with gradient and Hessian in (M, V, E), by the chain rule through
    /// Σ = M·σ(M/V, E/M).
    pub fn extensive_jet(&self, s: &ExtensiveState) -> Result<Jet3> {
        self.check_extensive(s)?;
        let x = s.to_array();
        let m = s.mass;
        let j = self.specific_jet(s.density(), s.specific_energy())?;
        let outer_grad = [j.sigma, m * j.d_rho, m * j.d_e];
        let outer_hess = [
            [0.0, j.d_rho, j.d_e],
            [j.d_rho, m * j.d_rho_rho, m * j.d_rho_e],
            [j.d_e, m * j.d_rho_e, m * j.d_e_e],
        ];
        let inner = [
            Jet3::coordinate(x, 0),
            Jet3::ratio(x, 0, 1),
            Jet3::ratio(x, 2, 0),
        ];
        Ok(compose(m * j.sigma, outer_grad, outer_hess, &inner))
    }
}

/// Worst relative homogeneity residual `|Σ(λs) - λΣ(s)| / (1 + |λΣ(s)|)` over `lambdas`.
pub fn check_homogeneity(model: &EosModel, s: &ExtensiveState, lambdas: &[f64]) -> Result<f64> {
    let base = model.sigma_extensive(s)?;
    let mut worst = 0.0_f64;
    for &lambda in lambdas {
        if !(lambda > 0.0) {
            return Err(Error::domain(
                "lambda",
                lambda,
                "scaling factor must be positive",
            ));
        }
        let scaled = model.sigma_extensive(&s.scale(lambda))?;
        let expected = lambda * base;
        worst = worst.max((scaled - expected).abs() / (1.0 + expected.abs()));
    }
    Ok(worst)
}

/// `Σ(a + b) - Σ(a) - Σ(b)`; nonnegative for a model satisfying the second law.
pub fn check_superadditivity(
    model: &EosModel,
    a: &ExtensiveState,
    b: &ExtensiveState,
) -> Result<f64> {
    let joined = model.sigma_extensive(&(*a + *b))?;
    Ok(joined - model.sigma_extensive(a)? - model.sigma_extensive(b)?)
}
