//! Conserved variables of the 1D Euler system, the physical flux, and the
//! mathematical entropy pair η = -ρs, ξ = uη with its entropy variables.

use std::ops::{Add, Mul, Sub};

use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::jet::{compose, Jet3};
use crate::thermo;

/// U = (ρ, q = ρu, ε = ρe + ρu²/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState {
    pub rho: f64,
    pub q: f64,
    pub eps: f64,
}

impl ConservedState {
    pub fn new(rho: f64, q: f64, eps: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::domain("density", rho, "density must be positive"));
        }
        if !q.is_finite() || !eps.is_finite() {
            return Err(Error::domain(
                "conserved state",
                if q.is_finite() { eps } else { q },
                "must be finite",
            ));
        }
        Ok(ConservedState { rho, q, eps })
    }

    /// Build from density, velocity and specific internal energy.
    pub fn from_primitive(rho: f64, u: f64, e: f64) -> Result<Self> {
        Self::new(rho, rho * u, rho * e + 0.5 * rho * u * u)
    }

    pub fn from_array(x: [f64; 3]) -> Result<Self> {
        Self::new(x[0], x[1], x[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.rho, self.q, self.eps]
    }

    pub fn velocity(&self) -> f64 {
        self.q / self.rho
    }

    /// Internal energy per unit volume, ρe = ε - q²/(2ρ).
    pub fn internal_energy_density(&self) -> f64 {
        self.eps - self.q * self.q / (2.0 * self.rho)
    }

    pub fn internal_energy(&self) -> f64 {
        internal_energy(self)
    }

    pub fn lerp(self, other: Self, t: f64) -> Self {
        (1.0 - t) * self + t * other
    }

    pub fn reflect(self) -> Self {
        ConservedState { q: -self.q, ..self }
    }
}

impl Add for ConservedState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        ConservedState {
            rho: self.rho + o.rho,
            q: self.q + o.q,
            eps: self.eps + o.eps,
        }
    }
}

impl Sub for ConservedState {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        ConservedState {
            rho: self.rho - o.rho,
            q: self.q - o.q,
            eps: self.eps - o.eps,
        }
    }
}

impl Mul<ConservedState> for f64 {
    type Output = ConservedState;
    fn mul(self, u: ConservedState) -> ConservedState {
        ConservedState {
            rho: self * u.rho,
            q: self * u.q,
            eps: self * u.eps,
        }
    }
}

/// Specific internal energy e = ε/ρ - q²/(2ρ²).
pub fn internal_energy(u: &ConservedState) -> f64 {
    u.internal_energy_density() / u.rho
}

fn check_admissible(model: &EosModel, u: &ConservedState) -> Result<f64> {
    if !(u.rho > 0.0) {
        return Err(Error::domain("density", u.rho, "density must be positive"));
    }
    let e = internal_energy(u);
    model.check_specific(u.rho, e)?;
    Ok(e)
}

/// f(U) = (ρu, ρu² + p, (ε + p)u).
pub fn euler_flux(model: &EosModel, u: &ConservedState) -> Result<[f64; 3]> {
    let e = check_admissible(model, u)?;
    let p = thermo::pressure(model, u.rho, e)?;
    let vel = u.velocity();
    Ok([u.q, u.q * vel + p, (u.eps + p) * vel])
}

/// η(U) = -ρ·σ(ρ, e(U)).
pub fn lax_entropy(model: &EosModel, u: &ConservedState) -> Result<f64> {
    let e = check_admissible(model, u)?;
    Ok(-u.rho * model.sigma_specific(u.rho, e)?)
}

/// η(U) = -Σ(ρ, 1, ρe), the extensive route through homogeneity.
pub fn lax_entropy_extensive(model: &EosModel, u: &ConservedState) -> Result<f64> {
    check_admissible(model, u)?;
    let s = crate::eos::ExtensiveState::new(u.rho, 1.0, u.internal_energy_density())?;
    Ok(-model.sigma_extensive(&s)?)
}

/// ξ(U) = u·η(U).
pub fn lax_entropy_flux(model: &EosModel, u: &ConservedState) -> Result<f64> {
    Ok(u.velocity() * lax_entropy(model, u)?)
}

/// η with gradient (the entropy variables) and Hessian in (ρ, q, ε), by the
/// chain rule through η = -P(ρ, e(U)) with P = ρσ.
pub fn eta_jet(model: &EosModel, u: &ConservedState) -> Result<Jet3> {
    let e = check_admissible(model, u)?;
    let j = model.specific_jet(u.rho, e)?;
    let (rho, q, eps) = (u.rho, u.q, u.eps);
    let (r2, r3) = (rho * rho, rho * rho * rho);
    let e_jet = Jet3 {
        value: e,
        grad: [-eps / r2 + q * q / r3, -q / r2, 1.0 / rho],
        hess: [
            [
                2.0 * eps / r3 - 3.0 * q * q / (r2 * r2),
                2.0 * q / r3,
                -1.0 / r2,
            ],
            [2.0 * q / r3, -1.0 / r2, 0.0],
            [-1.0 / r2, 0.0, 0.0],
        ],
    };
    let outer_grad = [-(j.sigma + rho * j.d_rho), -rho * j.d_e];
    let outer_hess = [
        [
            -(2.0 * j.d_rho + rho * j.d_rho_rho),
            -(j.d_e + rho * j.d_rho_e),
        ],
        [-(j.d_e + rho * j.d_rho_e), -rho * j.d_e_e],
    ];
    let inner = [Jet3::coordinate(u.to_array(), 0), e_jet];
    Ok(compose(-rho * j.sigma, outer_grad, outer_hess, &inner))
}

/// Godunov's entropy variables φ = ∇_U η.
pub fn entropy_variables(model: &EosModel, u: &ConservedState) -> Result<[f64; 3]> {
    Ok(eta_jet(model, u)?.grad)
}

/// φ by central differences of η with per-coordinate steps `h`.
pub fn entropy_variables_fd(model: &EosModel, u: &ConservedState, h: [f64; 3]) -> Result<[f64; 3]> {
    gradient_fd(
        |x| lax_entropy(model, &ConservedState::from_array(x)?),
        u.to_array(),
        h,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaxPair {
    pub eta: f64,
    pub xi: f64,
    pub phi: [f64; 3],
}

pub fn lax_pair(model: &EosModel, u: &ConservedState) -> Result<LaxPair> {
    let jet = eta_jet(model, u)?;
    Ok(LaxPair {
        eta: jet.value,
        xi: u.velocity() * jet.value,
        phi: jet.grad,
    })
}

fn gradient_fd<F>(f: F, x: [f64; 3], h: [f64; 3]) -> Result<[f64; 3]>
where
    F: Fn([f64; 3]) -> Result<f64>,
{
    let mut g = [0.0; 3];
    for i in 0..3 {
        let (mut xp, mut xm) = (x, x);
        xp[i] += h[i];
        xm[i] -= h[i];
        g[i] = (f(xp)? - f(xm)?) / (2.0 * h[i]);
    }
    Ok(g)
}

/// Per-coordinate steps `base·(1 + |U_i|)`.
pub fn scaled_steps(u: &ConservedState, base: f64) -> [f64; 3] {
    u.to_array().map(|x| base * (1.0 + x.abs()))
}

/// Max-norm of `∇ξ - φ·∇f` at `u`, the pointwise defect of the entropy-pair
/// compatibility relation. `h` is the base step, scaled per coordinate by
/// `1 + |U_i|`; φ is analytic where the model allows it.
pub fn compatibility_residual(model: &EosModel, u: &ConservedState, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "step must be positive, got {h}"
        )));
    }
    let x = u.to_array();
    let steps = scaled_steps(u, h);
    let phi = entropy_variables(model, u)?;
    let grad_xi = gradient_fd(
        |y| lax_entropy_flux(model, &ConservedState::from_array(y)?),
        x,
        steps,
    )?;
    // jac[i][j] = ∂f_i/∂U_j
    let mut jac = [[0.0; 3]; 3];
    for j in 0..3 {
        let (mut xp, mut xm) = (x, x);
        xp[j] += steps[j];
        xm[j] -= steps[j];
        let fp = euler_flux(model, &ConservedState::from_array(xp)?)?;
        let fm = euler_flux(model, &ConservedState::from_array(xm)?)?;
        for i in 0..3 {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * steps[j]);
        }
    }
    let mut worst = 0.0_f64;
    for j in 0..3 {
        let pulled: f64 = (0..3).map(|i| phi[i] * jac[i][j]).sum();
        worst = worst.max((grad_xi[j] - pulled).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn ideal() -> EosModel {
        EosModel::polytropic(1.4, 1.0).unwrap()
    }

    fn cs(r: f64, q: f64, e: f64) -> ConservedState {
        ConservedState::new(r, q, e).unwrap()
    }

    #[test]
    fn internal_energy_examples() {
        assert_eq!(internal_energy(&cs(1.0, 0.0, 1.0)), 1.0);
        assert_eq!(internal_energy(&cs(2.0, 2.0, 3.0)), 1.0);
        assert_eq!(internal_energy(&cs(1.0, 2.0, 3.0)), 1.0);
        assert!(ConservedState::new(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn flux_examples() {
        let f = euler_flux(&ideal(), &cs(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(f[0], 0.0);
        assert_relative_eq!(f[1], 0.4, max_relative = 1e-14);
        assert_eq!(f[2], 0.0);
        let f = euler_flux(&ideal(), &cs(1.0, 1.0, 1.5)).unwrap();
        assert_eq!(f[0], 1.0);
        assert_relative_eq!(f[1], 1.4, max_relative = 1e-14);
        assert_relative_eq!(f[2], 1.9, max_relative = 1e-14);
        // e = 1.0 - 1.0 = 0 is outside the polytropic domain
        assert!(euler_flux(&ideal(), &cs(1.0, 1.0, 0.5)).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(lax_entropy(&ideal(), &cs(1.0, 0.0, 1.0)).unwrap(), 0.0);
        assert_relative_eq!(
            lax_entropy(&ideal(), &cs(1.0, 0.0, 2.0)).unwrap(),
            -LN_2,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            lax_entropy(&ideal(), &cs(2.0, 2.0, 3.0)).unwrap(),
            0.8 * LN_2,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            lax_entropy_flux(&ideal(), &cs(1.0, 1.0, 2.5)).unwrap(),
            -LN_2,
            max_relative = 1e-14
        );
        assert_eq!(lax_entropy_flux(&ideal(), &cs(1.7, 0.0, 2.5)).unwrap(), 0.0);
    }

    #[test]
    fn entropy_routes_agree() {
        for model in [ideal(), EosModel::negative_temperature()] {
            for u in [cs(1.0, 0.0, 1.0), cs(2.0, 2.0, 3.0), cs(0.4, -0.3, 1.7)] {
                let a = lax_entropy(&model, &u).unwrap();
                let b = lax_entropy_extensive(&model, &u).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-10, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn entropy_variables_examples() {
        let phi = entropy_variables(&ideal(), &cs(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(phi[1], 0.0);
        assert_relative_eq!(phi[2], -1.0, max_relative = 1e-14);
        let fd = entropy_variables_fd(&ideal(), &cs(1.0, 0.0, 1.0), [1e-5; 3]).unwrap();
        for i in 0..3 {
            assert!((fd[i] - phi[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn eta_hessian_matches_differences() {
        let u = cs(1.3, 0.4, 2.2);
        for model in [ideal(), EosModel::negative_temperature()] {
            let jet = eta_jet(&model, &u).unwrap();
            let h = 1e-4;
            for j in 0..3 {
                let mut up = u.to_array();
                let mut um = u.to_array();
                up[j] += h;
                um[j] -= h;
                let gp =
                    entropy_variables(&model, &ConservedState::from_array(up).unwrap()).unwrap();
                let gm =
                    entropy_variables(&model, &ConservedState::from_array(um).unwrap()).unwrap();
                for i in 0..3 {
                    let fd = (gp[i] - gm[i]) / (2.0 * h);
                    assert!(
                        (fd - jet.hess[i][j]).abs() < 1e-6,
                        "{i}{j}: {fd} vs {}",
                        jet.hess[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn compatibility_at_rest() {
        let u = cs(1.0, 0.0, 1.0);
        assert!(compatibility_residual(&ideal(), &u, 1e-5).unwrap() <= 1e-6);
        assert!(
            compatibility_residual(&EosModel::negative_temperature(), &u, 1e-5).unwrap() <= 1e-5
        );
        assert!(compatibility_residual(&ideal(), &u, 0.0).is_err());
    }

    #[test]
    fn lax_pair_consistent() {
        let u = cs(1.0, 1.0, 2.5);
        let pair = lax_pair(&ideal(), &u).unwrap();
        assert_relative_eq!(pair.eta, -LN_2, max_relative = 1e-14);
        assert_relative_eq!(pair.xi, -LN_2, max_relative = 1e-14);
    }
}
