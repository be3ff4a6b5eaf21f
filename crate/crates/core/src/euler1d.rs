//! First-order finite-volume solver for the 1D Euler equations (Rusanov flux,
//! forward Euler in time) that tracks the physical entropy ∫ρs dx.
//!
//! For smooth flows ρs is conserved, so the total entropy drift measures the
//! scheme's dissipation and must vanish under refinement. Across shocks the
//! total entropy must not decrease.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::lax::{euler_flux, ConservedState};
use crate::thermo;

/// Multiplier on the local wave-speed estimate.
pub const DEFAULT_WAVE_SPEED_FACTOR: f64 = 1.2;
const SOUND_SPEED_FLOOR2: f64 = 1e-12;
/// Relative slack when deciding that `t_end` has been reached.
const TIME_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Transmissive,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// (ρ, u, p) = (1, 0, 1) left of the midpoint, (0.125, 0, 0.1) right of it.
    Sod,
    /// ρ = 1 + 0.2·sin(2πx), u = 0.1, p = 1.
    SmoothWave,
    Custom(Vec<ConservedState>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub model: EosModel,
    pub n: usize,
    pub domain: (f64, f64),
    pub cfl: f64,
    pub t_end: f64,
    pub boundary: Boundary,
    pub initial: InitialCondition,
    pub wave_speed_factor: f64,
    pub max_steps: usize,
}

impl SimConfig {
    /// Sod shock tube on [0, 1], transmissive, CFL 0.45, t_end 0.2.
    pub fn sod(model: EosModel, n: usize) -> Self {
        SimConfig {
            model,
            n,
            domain: (0.0, 1.0),
            cfl: 0.45,
            t_end: 0.2,
            boundary: Boundary::Transmissive,
            initial: InitialCondition::Sod,
            wave_speed_factor: DEFAULT_WAVE_SPEED_FACTOR,
            max_steps: 1_000_000,
        }
    }

    /// Periodic smooth density wave on [0, 1], CFL 0.45, t_end 0.5.
    pub fn smooth(model: EosModel, n: usize) -> Self {
        SimConfig {
            t_end: 0.5,
            boundary: Boundary::Periodic,
            initial: InitialCondition::SmoothWave,
            ..Self::sod(model, n)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidConfig(format!(
                "need at least 4 cells, got {}",
                self.n
            )));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cfl must lie in (0, 1), got {}",
                self.cfl
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if !(self.domain.0 < self.domain.1) {
            return Err(Error::InvalidConfig("domain must satisfy a < b".into()));
        }
        if !(self.wave_speed_factor >= 1.0) {
            return Err(Error::InvalidConfig(
                "wave_speed_factor must be at least 1".into(),
            ));
        }
        if let InitialCondition::Custom(cells) = &self.initial {
            if cells.len() != self.n {
                return Err(Error::InvalidConfig(format!(
                    "custom initial data has {} cells, expected {}",
                    cells.len(),
                    self.n
                )));
            }
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.domain.1 - self.domain.0) / self.n as f64
    }

    pub fn cell_centre(&self, i: usize) -> f64 {
        self.domain.0 + (i as f64 + 0.5) * self.dx()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub cells: Vec<ConservedState>,
    pub t: f64,
    pub dx: f64,
    pub entropy_total: f64,
    pub entropy_history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub t: f64,
    pub dt: f64,
    pub entropy_total: f64,
    pub d_s: f64,
    /// `dt·(ρus|right - ρus|left)`, the entropy carried out through the ends.
    pub boundary_outflow: f64,
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub state: SimState,
    pub initial_entropy: f64,
    /// Row 0 is the initial state.
    pub diagnostics: Vec<StepDiagnostics>,
    pub min_ds: f64,
    /// `S(t_end) - S(0) + total boundary outflow`.
    pub entropy_produced: f64,
    /// Σ |dS + boundary outflow| over steps.
    pub budget_residual_l1: f64,
}

fn gamma_of(model: &EosModel) -> Result<f64> {
    match model {
        EosModel::Polytropic(p) => Ok(p.gamma),
        _ => Err(Error::Unsupported(format!(
            "closed-form initial data needs a polytropic model, got {}",
            model.kind().name()
        ))),
    }
}

fn from_pressure(rho: f64, u: f64, p: f64, gamma: f64) -> Result<ConservedState> {
    ConservedState::from_primitive(rho, u, p / ((gamma - 1.0) * rho))
}

pub fn initial_sod(config: &SimConfig) -> Result<Vec<ConservedState>> {
    let gamma = gamma_of(&config.model)?;
    let split = 0.5 * (config.domain.0 + config.domain.1);
    let left = from_pressure(1.0, 0.0, 1.0, gamma)?;
    let right = from_pressure(0.125, 0.0, 0.1, gamma)?;
    Ok((0..config.n)
        .map(|i| {
            if config.cell_centre(i) < split {
                left
            } else {
                right
            }
        })
        .collect())
}

/// The smooth periodic wave evaluated at `x`.
pub fn smooth_wave_state(x: f64, gamma: f64) -> Result<ConservedState> {
    let rho = 1.0 + 0.2 * (2.0 * std::f64::consts::PI * x).sin();
    from_pressure(rho, 0.1, 1.0, gamma)
}

/// Smooth wave sampled at cell centres.
pub fn initial_smooth(config: &SimConfig) -> Result<Vec<ConservedState>> {
    let gamma = gamma_of(&config.model)?;
    (0..config.n)
        .map(|i| smooth_wave_state(config.cell_centre(i), gamma))
        .collect()
}

/// |u| + c with c² ≈ (1 + p/(ρe))·p/ρ, which is γp/ρ for a polytropic gas.
pub fn wave_speed(model: &EosModel, u: &ConservedState) -> Result<f64> {
    let e = u.internal_energy();
    let p = thermo::pressure(model, u.rho, e)?;
    let c2 = (1.0 + p / (u.rho * e)) * p / u.rho;
    Ok(u.velocity().abs() + c2.max(SOUND_SPEED_FLOOR2).sqrt())
}

/// Rusanov flux `½(f(UL) + f(UR)) - ½·a·(UR - UL)`.
pub fn numerical_flux(
    model: &EosModel,
    ul: &ConservedState,
    ur: &ConservedState,
    wave_speed_factor: f64,
) -> Result<[f64; 3]> {
    for u in [ul, ur] {
        if !(u.rho > 0.0) {
            return Err(Error::domain("density", u.rho, "must be positive"));
        }
    }
    let fl = euler_flux(model, ul)?;
    let fr = euler_flux(model, ur)?;
    let a = wave_speed_factor * wave_speed(model, ul)?.max(wave_speed(model, ur)?);
    let jump = [ur.rho - ul.rho, ur.q - ul.q, ur.eps - ul.eps];
    Ok([0, 1, 2].map(|k| 0.5 * (fl[k] + fr[k]) - 0.5 * a * jump[k]))
}

/// ∫ρs dx as a cell sum.
pub fn total_entropy(model: &EosModel, cells: &[ConservedState], dx: f64) -> Result<f64> {
    let mut sum = 0.0;
    for u in cells {
        sum += u.rho * model.sigma_specific(u.rho, u.internal_energy())?;
    }
    Ok(sum * dx)
}

fn totals(cells: &[ConservedState], dx: f64) -> (f64, f64, f64) {
    let (mut m, mut q, mut e) = (0.0, 0.0, 0.0);
    for u in cells {
        m += u.rho;
        q += u.q;
        e += u.eps;
    }
    (m * dx, q * dx, e * dx)
}

fn entropy_flux_at(model: &EosModel, u: &ConservedState) -> Result<f64> {
    Ok(u.q * model.sigma_specific(u.rho, u.internal_energy())?)
}

pub fn initial_state(config: &SimConfig) -> Result<SimState> {
    config.validate()?;
    let cells = match &config.initial {
        InitialCondition::Sod => initial_sod(config)?,
        InitialCondition::SmoothWave => initial_smooth(config)?,
        InitialCondition::Custom(cells) => cells.clone(),
    };
    for (i, u) in cells.iter().enumerate() {
        config
            .model
            .check_specific(u.rho, u.internal_energy())
            .map_err(|err| Error::StepRejected {
                time: 0.0,
                cell: i,
                reason: format!("inadmissible initial state: {err}"),
            })?;
    }
    let dx = config.dx();
    let entropy_total = total_entropy(&config.model, &cells, dx)?;
    Ok(SimState {
        cells,
        t: 0.0,
        dx,
        entropy_total,
        entropy_history: vec![entropy_total],
    })
}

/// Advance one forward-Euler step with `dt = cfl·dx / max wave speed`,
/// truncated so as not to pass `t_end`.
pub fn step(state: &SimState, config: &SimConfig) -> Result<(SimState, StepDiagnostics)> {
    let model = &config.model;
    let cells = &state.cells;
    let n = cells.len();
    let reject = |cell: usize, err: Error| Error::StepRejected {
        time: state.t,
        cell,
        reason: err.to_string(),
    };

    let speeds: Vec<Result<f64>> = cells.par_iter().map(|u| wave_speed(model, u)).collect();
    let mut max_speed = 0.0_f64;
    for (i, s) in speeds.into_iter().enumerate() {
        max_speed = max_speed.max(s.map_err(|e| reject(i, e))?);
    }
    let max_speed = config.wave_speed_factor * max_speed;
    let mut dt = config.cfl * state.dx / max_speed;
    if state.t + dt > config.t_end {
        dt = config.t_end - state.t;
    }

    // interface k sits between cells k-1 and k (k = 0..=n)
    let neighbour = |k: isize| -> ConservedState {
        match config.boundary {
            Boundary::Periodic => cells[k.rem_euclid(n as isize) as usize],
            Boundary::Transmissive => cells[k.clamp(0, n as isize - 1) as usize],
        }
    };
    let fluxes: Vec<Result<[f64; 3]>> = (0..=n)
        .into_par_iter()
        .map(|k| {
            numerical_flux(
                model,
                &neighbour(k as isize - 1),
                &neighbour(k as isize),
                config.wave_speed_factor,
            )
        })
        .collect();
    let mut flux = Vec::with_capacity(n + 1);
    for (k, f) in fluxes.into_iter().enumerate() {
        flux.push(f.map_err(|e| reject(k.min(n - 1), e))?);
    }

    let ratio = dt / state.dx;
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let (fl, fr) = (flux[i], flux[i + 1]);
        let u = cells[i];
        let rho = u.rho - ratio * (fr[0] - fl[0]);
        let q = u.q - ratio * (fr[1] - fl[1]);
        let eps = u.eps - ratio * (fr[2] - fl[2]);
        let updated = ConservedState::new(rho, q, eps).map_err(|e| Error::StepRejected {
            time: state.t + dt,
            cell: i,
            reason: e.to_string(),
        })?;
        model
            .check_specific(updated.rho, updated.internal_energy())
            .map_err(|e| Error::StepRejected {
                time: state.t + dt,
                cell: i,
                reason: e.to_string(),
            })?;
        next.push(updated);
    }

    let boundary_outflow = match config.boundary {
        Boundary::Periodic => 0.0,
        Boundary::Transmissive => {
            dt * (entropy_flux_at(model, &cells[n - 1])? - entropy_flux_at(model, &cells[0])?)
        }
    };
    let entropy_total = total_entropy(model, &next, state.dx)?;
    let (mass, momentum, energy) = totals(&next, state.dx);
    let mut history = state.entropy_history.clone();
    history.push(entropy_total);
    let diag = StepDiagnostics {
        t: state.t + dt,
        dt,
        entropy_total,
        d_s: entropy_total - state.entropy_total,
        boundary_outflow,
        mass,
        momentum,
        energy,
    };
    Ok((
        SimState {
            cells: next,
            t: state.t + dt,
            dx: state.dx,
            entropy_total,
            entropy_history: history,
        },
        diag,
    ))
}

pub fn run(config: &SimConfig) -> Result<RunOutput> {
    let mut state = initial_state(config)?;
    let initial_entropy = state.entropy_total;
    let (mass, momentum, energy) = totals(&state.cells, state.dx);
    let mut diagnostics = vec![StepDiagnostics {
        t: 0.0,
        dt: 0.0,
        entropy_total: initial_entropy,
        d_s: 0.0,
        boundary_outflow: 0.0,
        mass,
        momentum,
        energy,
    }];
    let mut min_ds = f64::INFINITY;
    let mut outflow = 0.0;
    let mut residual = 0.0;
    let mut steps = 0;
    while state.t < config.t_end * (1.0 - TIME_EPS) {
        if steps >= config.max_steps {
            return Err(Error::StepRejected {
                time: state.t,
                cell: 0,
                reason: format!("step limit {} reached", config.max_steps),
            });
        }
        let (next, diag) = step(&state, config)?;
        min_ds = min_ds.min(diag.d_s);
        outflow += diag.boundary_outflow;
        residual += (diag.d_s + diag.boundary_outflow).abs();
        diagnostics.push(diag);
        state = next;
        steps += 1;
    }
    Ok(RunOutput {
        entropy_produced: state.entropy_total - initial_entropy + outflow,
        initial_entropy,
        diagnostics,
        min_ds,
        budget_residual_l1: residual,
        state,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementReport {
    pub ns: Vec<usize>,
    /// |S(t_end) - S(0)| per resolution.
    pub drifts: Vec<f64>,
    /// Observed order between the coarsest and finest resolution.
    pub observed_order: f64,
}

/// `log(d_first / d_last) / log(N_last / N_first)`.
pub fn observed_order(ns: &[usize], drifts: &[f64]) -> f64 {
    let (n0, n1) = (ns[0] as f64, ns[ns.len() - 1] as f64);
    (drifts[0] / drifts[drifts.len() - 1]).ln() / (n1 / n0).ln()
}

/// Run `base` at each cell count and measure how the total-entropy drift
/// shrinks with resolution.
pub fn refinement_study(base: &SimConfig, ns: &[usize]) -> Result<RefinementReport> {
    if ns.len() < 2 {
        return Err(Error::InvalidConfig(
            "refinement needs at least two resolutions".into(),
        ));
    }
    let mut drifts = Vec::with_capacity(ns.len());
    for &n in ns {
        let cfg = SimConfig { n, ..base.clone() };
        let out = run(&cfg)?;
        drifts.push((out.state.entropy_total - out.initial_entropy).abs());
    }
    let observed_order = observed_order(ns, &drifts);
    Ok(RefinementReport {
        ns: ns.to_vec(),
        drifts,
        observed_order,
    })
}

/// Rows `t,entropy_total,dS,mass,momentum,energy`.
pub fn write_diagnostics<W: Write>(mut w: W, rows: &[StepDiagnostics]) -> io::Result<()> {
    writeln!(w, "t,entropy_total,dS,mass,momentum,energy")?;
    for r in rows {
        writeln!(
            w,
            "{:?},{:?},{:?},{:?},{:?},{:?}",
            r.t, r.entropy_total, r.d_s, r.mass, r.momentum, r.energy
        )?;
    }
    Ok(())
}

/// Rows `x,rho,u,p,s` at cell centres.
pub fn write_profile<W: Write>(mut w: W, state: &SimState, config: &SimConfig) -> Result<()> {
    let io_err = |e: io::Error| Error::InvalidConfig(format!("write failed: {e}"));
    writeln!(w, "x,rho,u,p,s").map_err(io_err)?;
    for (i, u) in state.cells.iter().enumerate() {
        let e = u.internal_energy();
        let p = thermo::pressure(&config.model, u.rho, e)?;
        let s = config.model.sigma_specific(u.rho, e)?;
        writeln!(
            w,
            "{:?},{:?},{:?},{:?},{:?}",
            config.cell_centre(i),
            u.rho,
            u.velocity(),
            p,
            s
        )
        .map_err(io_err)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal() -> EosModel {
        EosModel::polytropic(1.4, 1.0).unwrap()
    }

    #[test]
    fn sod_and_smooth_initial_states() {
        let cfg = SimConfig::sod(ideal(), 10);
        let cells = initial_sod(&cfg).unwrap();
        let (l, r) = (cells[0], cells[9]);
        assert_eq!((l.rho, l.q), (1.0, 0.0));
        assert!((l.eps - 2.5).abs() < 1e-14);
        assert_eq!((r.rho, r.q), (0.125, 0.0));
        assert!((r.eps - 0.25).abs() < 1e-14);
        let w = smooth_wave_state(0.0, 1.4).unwrap();
        assert_eq!(w.rho, 1.0);
        assert!((w.q - 0.1).abs() < 1e-15);
        assert!((w.eps - 2.505).abs() < 1e-14);
        let neg = SimConfig::sod(EosModel::negative_temperature(), 10);
        assert!(matches!(initial_sod(&neg), Err(Error::Unsupported(_))));
    }

    #[test]
    fn flux_consistency_and_mirror_symmetry() {
        let m = ideal();
        for u in [
            ConservedState::new(1.0, 0.0, 2.5).unwrap(),
            ConservedState::new(0.3, -0.2, 0.9).unwrap(),
        ] {
            assert_eq!(
                numerical_flux(&m, &u, &u, 1.2).unwrap(),
                euler_flux(&m, &u).unwrap()
            );
        }
        let ul = ConservedState::new(1.0, 0.3, 2.5).unwrap();
        let ur = ConservedState::new(0.5, -0.1, 1.0).unwrap();
        let f = numerical_flux(&m, &ul, &ur, 1.2).unwrap();
        let g = numerical_flux(&m, &ur.reflect(), &ul.reflect(), 1.2).unwrap();
        assert!((f[0] + g[0]).abs() < 1e-14);
        assert!((f[1] - g[1]).abs() < 1e-14);
        assert!((f[2] + g[2]).abs() < 1e-14);
    }

    #[test]
    fn rest_state_is_steady() {
        let u = ConservedState::new(1.0, 0.0, 2.5).unwrap();
        let cfg = SimConfig {
            initial: InitialCondition::Custom(vec![u; 16]),
            boundary: Boundary::Periodic,
            ..SimConfig::sod(ideal(), 16)
        };
        let s0 = initial_state(&cfg).unwrap();
        let (s1, d) = step(&s0, &cfg).unwrap();
        for c in &s1.cells {
            assert!(
                (c.rho - 1.0).abs() < 1e-14 && c.q.abs() < 1e-14 && (c.eps - 2.5).abs() < 1e-14
            );
        }
        assert!(d.d_s.abs() < 1e-12);
        assert_eq!(s1.entropy_history.len(), 2);
    }

    #[test]
    fn periodic_step_conserves_mass() {
        let cfg = SimConfig::smooth(ideal(), 50);
        let s0 = initial_state(&cfg).unwrap();
        let m0: f64 = s0.cells.iter().map(|c| c.rho).sum::<f64>() * s0.dx;
        let (_, d) = step(&s0, &cfg).unwrap();
        assert!((d.mass - m0).abs() <= 1e-14 * m0);
    }

    #[test]
    fn config_validation() {
        let mut cfg = SimConfig::sod(ideal(), 100);
        cfg.cfl = 1.5;
        assert!(cfg.validate().is_err());
        cfg.cfl = 0.45;
        cfg.n = 3;
        assert!(cfg.validate().is_err());
        cfg.n = 100;
        cfg.t_end = 0.0;
        assert!(cfg.validate().is_err());
        cfg.t_end = 0.2;
        cfg.initial = InitialCondition::Custom(vec![]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn inadmissible_initial_cell_is_rejected() {
        let mut cells = vec![ConservedState::new(1.0, 0.0, 2.5).unwrap(); 8];
        cells[5] = ConservedState::new(1.0, 0.0, -1.0).unwrap();
        let cfg = SimConfig {
            initial: InitialCondition::Custom(cells),
            ..SimConfig::sod(ideal(), 8)
        };
        assert!(matches!(
            run(&cfg),
            Err(Error::StepRejected { cell: 5, .. })
        ));
    }

    #[test]
    fn diagnostics_csv_layout() {
        let cfg = SimConfig::sod(ideal(), 20);
        let out = run(&cfg).unwrap();
        let mut buf = Vec::new();
        write_diagnostics(&mut buf, &out.diagnostics).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,entropy_total,dS,mass,momentum,energy"
        );
        assert_eq!(text.lines().count(), out.diagnostics.len() + 1);
        let mut buf = Vec::new();
        write_profile(&mut buf, &out.state, &cfg).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,rho,u,p,s\n"));
        assert_eq!(text.lines().count(), 21);
    }
}
