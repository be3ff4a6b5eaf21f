//! Temperature and pressure derived from the specific entropy σ(ρ, e):
//! `1/T = ∂σ/∂e` and `p = -ρ²·(∂σ/∂ρ)/(∂σ/∂e)`.

use crate::eos::{EosModel, ExtensiveState};
use crate::error::{Error, Result};

/// Relative floor on |∂σ/∂e| below which temperature and pressure are refused.
pub const DEGENERACY_FLOOR_REL: f64 = 1e-12;

/// Relative volume step for the extensive pressure route.
const VOLUME_STEP_REL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint {
    pub rho: f64,
    pub e: f64,
    pub s: f64,
    pub temperature: f64,
    pub pressure: f64,
    pub dsigma_drho: f64,
    pub dsigma_de: f64,
}

/// (∂σ/∂ρ, ∂σ/∂e): analytic for closed forms, differenced for tables.
pub fn entropy_gradient(model: &EosModel, rho: f64, e: f64) -> Result<(f64, f64)> {
    let j = model.specific_jet(rho, e)?;
    Ok((j.d_rho, j.d_e))
}

fn checked_inverse_slope(sigma: f64, e: f64, dsigma_de: f64) -> Result<f64> {
    let floor = DEGENERACY_FLOOR_REL * (1.0 + sigma.abs() / (1.0 + e.abs()));
    if !(dsigma_de.abs() >= floor) {
        return Err(Error::Degenerate {
            value: dsigma_de.abs(),
            floor,
        });
    }
    Ok(1.0 / dsigma_de)
}

/// `T = 1/(∂σ/∂e)`. Negative values are returned as they are.
pub fn temperature(model: &EosModel, rho: f64, e: f64) -> Result<f64> {
    let j = model.specific_jet(rho, e)?;
    checked_inverse_slope(j.sigma, e, j.d_e)
}

/// `p = -ρ²·(∂σ/∂ρ)/(∂σ/∂e)`.
pub fn pressure(model: &EosModel, rho: f64, e: f64) -> Result<f64> {
    let j = model.specific_jet(rho, e)?;
    let t = checked_inverse_slope(j.sigma, e, j.d_e)?;
    Ok(-rho * rho * j.d_rho * t)
}

/// `p = T·∂Σ/∂V` at (M, V, E) = (1, 1/ρ, e), with the volume derivative taken
/// by central differences of the extensive entropy.
pub fn pressure_from_extensive(model: &EosModel, rho: f64, e: f64) -> Result<f64> {
    let t = temperature(model, rho, e)?;
    let v = 1.0 / rho;
    let h = VOLUME_STEP_REL * v;
    let plus = model.sigma_extensive(&ExtensiveState::new(1.0, v + h, e)?)?;
    let minus = model.sigma_extensive(&ExtensiveState::new(1.0, v - h, e)?)?;
    Ok(t * (plus - minus) / (2.0 * h))
}

pub fn thermo_point(model: &EosModel, rho: f64, e: f64) -> Result<ThermoPoint> {
    let j = model.specific_jet(rho, e)?;
    let t = checked_inverse_slope(j.sigma, e, j.d_e)?;
    Ok(ThermoPoint {
        rho,
        e,
        s: j.sigma,
        temperature: t,
        pressure: -rho * rho * j.d_rho * t,
        dsigma_drho: j.d_rho,
        dsigma_de: j.d_e,
    })
}
