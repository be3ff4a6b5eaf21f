//! Executable versions of the entropy/convexity equivalence and of each
//! construction used to prove it: the mixed-state internal energy, its lower
//! bound from convexity of q²/ρ, the two-state probe that isolates the
//! temperature sign, and the midpoint-concavity consequence of homogeneity
//! plus superadditivity.

use crate::convexity::{
    certify_eta_convex, certify_sigma_concave, certify_temperature_positive, CertifyConfig,
    ConvexityReport, Region, Region2, Region3, TemperatureReport, Verdict,
};
use crate::eos::{EosModel, ExtensiveState};
use crate::error::{Error, Result};
use crate::lax::{lax_entropy, ConservedState};

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Eigenvalue {
        check: &'static str,
        point: [f64; 3],
        eigenvalue: f64,
        tolerance: f64,
    },
    Temperature {
        rho: f64,
        e: f64,
        temperature: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceVerdict {
    pub sigma_concave: bool,
    pub temperature_positive: bool,
    pub eta_convex: bool,
    /// `(sigma_concave && temperature_positive) == eta_convex`.
    pub consistent: bool,
    pub witnesses: Vec<Witness>,
    pub sigma: ConvexityReport,
    pub temperature: TemperatureReport,
    pub eta: ConvexityReport,
    pub temperature_region: Region2,
    pub warnings: Vec<String>,
}

impl EquivalenceVerdict {
    /// The Hessian certificate whose worst sample sits closest to its
    /// tolerance (normalized excess nearest 1 on a log scale).
    pub fn thinnest_certificate(&self) -> (&'static str, f64) {
        let closeness = |r: &ConvexityReport| {
            let x = r.normalized_excess().abs().max(f64::MIN_POSITIVE);
            x.ln().abs()
        };
        if closeness(&self.sigma) <= closeness(&self.eta) {
            ("sigma", self.sigma.normalized_excess())
        } else {
            ("eta", self.eta.normalized_excess())
        }
    }
}

fn intersect(a: (f64, f64), b: (f64, f64)) -> Option<(f64, f64)> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (lo < hi).then_some((lo, hi))
}

/// (ρ, e) box covered by an extensive region: ρ = M/V, e = E/M.
fn extensive_image(r: &Region3) -> [(f64, f64); 2] {
    let [(m0, m1), (v0, v1), (e0, e1)] = r.bounds;
    [
        (m0 / v1, m1 / v0),
        ((e0 / m1).min(e0 / m0), (e1 / m0).max(e1 / m1)),
    ]
}

/// Bounding (ρ, e) box of a conserved region, with e clipped at `e_floor`.
fn conserved_image(r: &Region3, e_floor: f64) -> [(f64, f64); 2] {
    let [(r0, r1), (q0, q1), (eps0, eps1)] = r.bounds;
    let q_max2 = q0.abs().max(q1.abs()).powi(2);
    let q_min2 = if q0 <= 0.0 && q1 >= 0.0 {
        0.0
    } else {
        q0.abs().min(q1.abs()).powi(2)
    };
    let e_lo = (eps0 / r1).min(eps0 / r0) - q_max2 / (2.0 * r0 * r0);
    let e_hi = (eps1 / r0).max(eps1 / r1) - q_min2 / (2.0 * r1 * r1);
    [(r0, r1), (e_lo.max(e_floor), e_hi)]
}

fn model_box(model: &EosModel) -> [(f64, f64); 2] {
    match model {
        EosModel::Tabulated(t) => t.differentiable_box(),
        _ => {
            let d = model.specific_domain();
            [d.rho, d.e]
        }
    }
}

/// Run the Σ-concavity, temperature and η-convexity certificates and check
/// that they agree with the equivalence (Σ concave and T > 0) ⇔ η convex.
///
/// The temperature region is the overlap of the (ρ, e) images of the two
/// regions, restricted to where the model can be differentiated.
pub fn equivalence_check(
    model: &EosModel,
    region_extensive: &Region3,
    region_conserved: &Region3,
    cfg: &CertifyConfig,
) -> Result<EquivalenceVerdict> {
    let mut warnings = Vec::new();
    let ext = extensive_image(region_extensive);
    let cons = conserved_image(region_conserved, cfg.e_floor);
    let dom = model_box(model);

    let overlap = intersect(ext[0], cons[0]).zip(intersect(ext[1], cons[1]));
    let base = match overlap {
        Some((r, e)) => [r, e],
        None => {
            warnings.push(
                "extensive and conserved regions do not overlap in (rho, e); \
                 temperature is sampled over the extensive image only"
                    .to_string(),
            );
            ext
        }
    };
    let temp_bounds = intersect(base[0], dom[0])
        .zip(intersect(base[1], dom[1]))
        .ok_or_else(|| {
            Error::InfeasibleRegion("temperature region lies outside the model domain".into())
        })?;
    let temperature_region = Region::new(
        [temp_bounds.0, temp_bounds.1],
        region_extensive.sample_count,
        region_extensive.sampling,
    )?;

    let sigma = certify_sigma_concave(model, region_extensive, cfg)?;
    let temperature = certify_temperature_positive(model, &temperature_region)?;
    let eta = certify_eta_convex(model, region_conserved, cfg)?;

    for (name, r) in [("sigma", &sigma), ("eta", &eta)] {
        if r.verdict == Verdict::Indeterminate {
            warnings.push(format!("{name} certificate is indeterminate"));
        }
    }

    let sigma_concave = sigma.verdict == Verdict::CertifiedConcave;
    let temperature_positive = temperature.all_positive;
    let eta_convex = eta.verdict == Verdict::CertifiedConvex;

    let mut witnesses = Vec::new();
    for (check, r) in [("sigma", &sigma), ("eta", &eta)] {
        if r.verdict == Verdict::Violated {
            witnesses.push(Witness::Eigenvalue {
                check,
                point: r.worst_point,
                eigenvalue: r.worst_eigenvalue,
                tolerance: r.tolerance_used,
            });
        }
    }
    witnesses.extend(temperature.witnesses.iter().map(|w| Witness::Temperature {
        rho: w.rho,
        e: w.e,
        temperature: w.temperature,
    }));

    Ok(EquivalenceVerdict {
        sigma_concave,
        temperature_positive,
        eta_convex,
        consistent: (sigma_concave && temperature_positive) == eta_convex,
        witnesses,
        sigma,
        temperature,
        eta,
        temperature_region,
        warnings,
    })
}

/// Internal energy per unit volume of the mixed state `(1-t)U1 + tU2`:
/// `(1-t)ε1 + tε2 - ½((1-t)q1 + tq2)² / ((1-t)ρ1 + tρ2)`.
pub fn mixing_energy(u1: &ConservedState, u2: &ConservedState, t: f64) -> Result<f64> {
    let rho = (1.0 - t) * u1.rho + t * u2.rho;
    if !(rho > 0.0) {
        return Err(Error::domain("mixed density", rho, "must be positive"));
    }
    let q = (1.0 - t) * u1.q + t * u2.q;
    Ok((1.0 - t) * u1.eps + t * u2.eps - 0.5 * q * q / rho)
}

/// `mixing_energy - [(1-t)ε1 + tε2 - ½((1-t)q1²/ρ1 + t·q2²/ρ2)]`, which is
/// nonnegative because (ρ, q) ↦ q²/ρ is convex.
pub fn mixing_lower_bound_gap(u1: &ConservedState, u2: &ConservedState, t: f64) -> Result<f64> {
    let mixed = mixing_energy(u1, u2, t)?;
    let bound = (1.0 - t) * u1.eps + t * u2.eps
        - 0.5 * ((1.0 - t) * u1.q * u1.q / u1.rho + t * u2.q * u2.q / u2.rho);
    Ok(mixed - bound)
}

/// The pair `U1 = (ρ, √(8ρΔE), E + 4ΔE)`, `U2 = (ρ, 0, E)`: equal internal
/// energy per volume E, while their midpoint carries E + ΔE.
pub fn delta_e_states(
    rho: f64,
    energy: f64,
    delta: f64,
) -> Result<(ConservedState, ConservedState)> {
    if !(rho > 0.0) {
        return Err(Error::domain("density", rho, "must be positive"));
    }
    if !(delta > 0.0) {
        return Err(Error::domain("energy increment", delta, "must be positive"));
    }
    Ok((
        ConservedState::new(rho, (8.0 * rho * delta).sqrt(), energy + 4.0 * delta)?,
        ConservedState::new(rho, 0.0, energy)?,
    ))
}

/// [`delta_e_states`], additionally requiring both states and their
/// midpoint to be admissible for `model`.
pub fn delta_e_states_for(
    model: &EosModel,
    rho: f64,
    energy: f64,
    delta: f64,
) -> Result<(ConservedState, ConservedState)> {
    let (u1, u2) = delta_e_states(rho, energy, delta)?;
    for u in [u1, u2, u1.lerp(u2, 0.5)] {
        model.check_specific(u.rho, u.internal_energy())?;
    }
    Ok((u1, u2))
}

/// `(1-t)η(U1) + tη(U2) - η((1-t)U1 + tU2)`.
pub fn jensen_gap_eta(
    model: &EosModel,
    u1: &ConservedState,
    u2: &ConservedState,
    t: f64,
) -> Result<f64> {
    let mid = u1.lerp(*u2, t);
    Ok(
        (1.0 - t) * lax_entropy(model, u1)? + t * lax_entropy(model, u2)?
            - lax_entropy(model, &mid)?,
    )
}

/// Concavity margin of Σ(·, 1, ·) along a segment of unit-volume states:
/// `Σ((1-t)ρ1 + tρ2, 1, (1-t)w1 + tw2) - (1-t)Σ(ρ1, 1, w1) - tΣ(ρ2, 1, w2)`.
pub fn unit_volume_concavity_margin(
    model: &EosModel,
    (rho1, w1): (f64, f64),
    (rho2, w2): (f64, f64),
    t: f64,
) -> Result<f64> {
    let a = ExtensiveState::new(rho1, 1.0, w1)?;
    let b = ExtensiveState::new(rho2, 1.0, w2)?;
    Ok(model.sigma_extensive(&a.lerp(b, t))?
        - (1.0 - t) * model.sigma_extensive(&a)?
        - t * model.sigma_extensive(&b)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prop1Report {
    /// Smallest `Σ((1-t)a + tb) - (1-t)Σ(a) - tΣ(b)` found.
    pub worst_margin: f64,
    pub worst_pair: usize,
    pub worst_t: f64,
    /// Largest disagreement between the direct margin and the margin
    /// recomputed through unit-volume states.
    pub route_discrepancy: f64,
    pub checked: usize,
}

/// Midpoint-concavity spot check of Σ over state pairs and interpolation
/// weights. Each margin is computed directly and again by rescaling both
/// states to unit volume, mixing with volume weights, and scaling back.
pub fn prop1_spotcheck(
    model: &EosModel,
    pairs: &[(ExtensiveState, ExtensiveState)],
    ts: &[f64],
) -> Result<Prop1Report> {
    let mut report = Prop1Report {
        worst_margin: f64::INFINITY,
        worst_pair: 0,
        worst_t: 0.0,
        route_discrepancy: 0.0,
        checked: 0,
    };
    for (k, (a, b)) in pairs.iter().enumerate() {
        let sa = model.sigma_extensive(a)?;
        let sb = model.sigma_extensive(b)?;
        for &t in ts {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::domain("t", t, "must lie in [0, 1]"));
            }
            let direct = model.sigma_extensive(&a.lerp(*b, t))? - (1.0 - t) * sa - t * sb;

            let vol = (1.0 - t) * a.volume + t * b.volume;
            let wa = (1.0 - t) * a.volume / vol;
            let wb = t * b.volume / vol;
            let unit =
                |s: &ExtensiveState| ExtensiveState::new(s.density(), 1.0, s.energy / s.volume);
            let (ua, ub) = (unit(a)?, unit(b)?);
            let mixed = ExtensiveState::new(
                wa * ua.mass + wb * ub.mass,
                1.0,
                wa * ua.energy + wb * ub.energy,
            )?;
            let via_unit = vol
                * (model.sigma_extensive(&mixed)?
                    - wa * model.sigma_extensive(&ua)?
                    - wb * model.sigma_extensive(&ub)?);

            report.route_discrepancy = report.route_discrepancy.max((direct - via_unit).abs());
            report.checked += 1;
            if direct < report.worst_margin {
                report.worst_margin = direct;
                report.worst_pair = k;
                report.worst_t = t;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::{default_conserved_region, default_extensive_region, Sampling};
    use approx::assert_relative_eq;

    fn cs(r: f64, q: f64, e: f64) -> ConservedState {
        ConservedState::new(r, q, e).unwrap()
    }

    fn ideal() -> EosModel {
        EosModel::polytropic(1.4, 1.0).unwrap()
    }

    #[test]
    fn equivalence_matrix() {
        let ext = default_extensive_region(512, Sampling::Grid);
        let cons = default_conserved_region(512, Sampling::Grid);
        let cfg = CertifyConfig::default();
        let cases = [
            (ideal(), (true, true, true)),
            (
                EosModel::pathological_gamma(0.8, 1.0).unwrap(),
                (false, true, false),
            ),
            (EosModel::negative_temperature(), (true, false, false)),
        ];
        for (model, expected) in cases {
            let v = equivalence_check(&model, &ext, &cons, &cfg).unwrap();
            assert_eq!(
                (v.sigma_concave, v.temperature_positive, v.eta_convex),
                expected
            );
            assert!(v.consistent);
            assert!(v.warnings.is_empty(), "{:?}", v.warnings);
            assert_eq!(v.temperature_region.bounds, [(0.5, 2.0), (0.25, 4.0)]);
        }
    }

    #[test]
    fn disjoint_regions_warn() {
        let ext = Region3::grid([(0.5, 1.0), (1.0, 2.0), (0.5, 1.0)], 27).unwrap();
        let cons = Region3::grid([(5.0, 6.0), (-0.1, 0.1), (10.0, 12.0)], 27).unwrap();
        let v = equivalence_check(&ideal(), &ext, &cons, &CertifyConfig::default()).unwrap();
        assert_eq!(v.warnings.len(), 1);
        assert!(v.consistent);
    }

    #[test]
    fn mixing_energy_examples() {
        assert_eq!(
            mixing_energy(&cs(1.0, 0.0, 1.0), &cs(1.0, 0.0, 1.0), 0.5).unwrap(),
            1.0
        );
        assert_eq!(
            mixing_energy(&cs(1.0, 2.0, 3.0), &cs(1.0, 0.0, 1.0), 0.5).unwrap(),
            1.5
        );
        let u1 = cs(1.3, 0.7, 2.9);
        assert_eq!(
            mixing_energy(&u1, &cs(1.0, 0.0, 1.0), 0.0).unwrap(),
            u1.eps - u1.q * u1.q / (2.0 * u1.rho)
        );
    }

    #[test]
    fn lower_bound_gap_examples() {
        assert_eq!(
            mixing_lower_bound_gap(&cs(1.0, 0.0, 2.0), &cs(3.0, 0.0, 1.0), 0.3).unwrap(),
            0.0
        );
        let g = mixing_lower_bound_gap(&cs(1.0, 1.0, 2.0), &cs(2.0, 0.0, 2.0), 0.5).unwrap();
        assert_relative_eq!(g, 0.25 - 0.25 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn delta_e_pair() {
        let (u1, u2) = delta_e_states(1.0, 1.0, 0.5).unwrap();
        assert_eq!(u1, cs(1.0, 2.0, 3.0));
        assert_eq!(u2, cs(1.0, 0.0, 1.0));
        assert!((u1.internal_energy_density() - 1.0).abs() < 1e-12);
        for t in [0.0, 0.25, 0.5, 1.0] {
            let m = mixing_energy(&u1, &u2, t).unwrap();
            assert!((m - (1.0 + 4.0 * t * (1.0 - t) * 0.5)).abs() < 1e-12);
        }
        assert!(delta_e_states(1.0, 1.0, 0.0).is_err());
        assert!(delta_e_states_for(&ideal(), 1.0, -1.0, 0.1).is_err());
    }

    #[test]
    fn jensen_gap_examples() {
        let u = cs(1.2, 0.3, 2.0);
        assert_eq!(jensen_gap_eta(&ideal(), &u, &u, 0.4).unwrap(), 0.0);
        let (u1, u2) = delta_e_states(1.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(
            jensen_gap_eta(&ideal(), &u1, &u2, 0.5).unwrap(),
            1.5f64.ln(),
            max_relative = 1e-12
        );
        // both states: η = ρe² + 1/ρ = 2; midpoint (1, 1, 2): ρe = 1.5, η = 3.25
        let neg = EosModel::negative_temperature();
        assert_relative_eq!(
            jensen_gap_eta(&neg, &u1, &u2, 0.5).unwrap(),
            -1.25,
            max_relative = 1e-12
        );
    }

    #[test]
    fn prop1_examples() {
        let st = |m, v, e| ExtensiveState::new(m, v, e).unwrap();
        let a = st(1.0, 1.0, 1.0);
        let r = prop1_spotcheck(&ideal(), &[(a, a)], &[0.3]).unwrap();
        assert!(r.worst_margin.abs() < 1e-15);
        // Σ(1.5,1,1.5) - ½Σ(1,1,1) - ½Σ(2,1,2) = -0.6·ln 1.5 + 0.4·ln 2
        let r = prop1_spotcheck(&ideal(), &[(a, st(2.0, 1.0, 2.0))], &[0.5]).unwrap();
        assert_relative_eq!(
            r.worst_margin,
            0.4 * 2f64.ln() - 0.6 * 1.5f64.ln(),
            max_relative = 1e-12
        );
        assert!(r.route_discrepancy < 1e-14);
        assert!(prop1_spotcheck(&ideal(), &[(a, a)], &[1.5]).is_err());
    }
}
