//! Kinetic energy `⟨K⟩ = m⟨v²⟩/2 + I⟨ω_x'² + ω_y'²⟩/2`, its long-time
//! residuals, and the cooling scan over `β/z`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dispersions::{total_dispersions, Contributions, DipoleParams, DispersionBreakdown, Environment, Parts, Scale};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyParts {
    pub translational: f64,
    pub rotational: f64,
    pub total: f64,
}

impl EnergyParts {
    pub fn new(translational: f64, rotational: f64) -> Self {
        Self { translational, rotational, total: translational + rotational }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub thermal: EnergyParts,
    pub vacuum: EnergyParts,
    pub mixed: EnergyParts,
    pub total: EnergyParts,
    /// `(mβ⁴/p²)⟨K⟩` when β is finite and p > 0.
    pub dimensionless_total: Option<f64>,
}

impl EnergyBreakdown {
    fn assemble(dp: &DipoleParams, beta: Scale, thermal: EnergyParts, vacuum: EnergyParts, mixed: EnergyParts) -> Self {
        let total = EnergyParts::new(
            thermal.translational + vacuum.translational + mixed.translational,
            thermal.rotational + vacuum.rotational + mixed.rotational,
        );
        let dimensionless_total = energy_unit(dp, beta).map(|u| total.total / u);
        Self { thermal, vacuum, mixed, total, dimensionless_total }
    }
}

/// `p²/(mβ⁴)`, the natural energy unit at finite temperature.
pub fn energy_unit(dp: &DipoleParams, beta: Scale) -> Option<f64> {
    match beta {
        Scale::Finite(b) if dp.p > 0.0 => Some(dp.p * dp.p / (dp.m * b.powi(4))),
        _ => None,
    }
}

/// Energy assembled from an already computed dispersion breakdown.
pub fn energy_from_dispersions(dp: &DipoleParams, d: &DispersionBreakdown, beta: Scale) -> EnergyBreakdown {
    let half_m = dp.m / 2.0;
    let half_i = dp.moment_of_inertia() / 2.0;
    let pick = |f: fn(&Parts) -> f64| {
        EnergyParts::new(half_m * (f(&d.vx) + f(&d.vy) + f(&d.vz)), half_i * (f(&d.wx) + f(&d.wy)))
    };
    EnergyBreakdown::assemble(dp, beta, pick(|p| p.thermal), pick(|p| p.vacuum), pick(|p| p.mixed))
}

pub fn kinetic_energy(dp: &DipoleParams, env: &Environment, tau: f64) -> Result<EnergyBreakdown> {
    let d = total_dispersions(dp, env, tau)?;
    Ok(energy_from_dispersions(dp, &d, env.beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualOptions {
    /// Starting `τ/(2z)` for the mixed part.
    pub eta_max: f64,
    pub rel_tol: f64,
    pub max_doublings: usize,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self { eta_max: 200.0, rel_tol: 1e-6, max_doublings: 6 }
    }
}

/// Evidence that the mixed residual has settled: values at `eta_max` and
/// `eta_max/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedCertificate {
    pub eta_max: f64,
    pub previous: f64,
    pub current: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualEnergy {
    pub energy: EnergyBreakdown,
    pub certificate: Option<MixedCertificate>,
}

pub fn thermal_residual(dp: &DipoleParams, beta: f64) -> EnergyParts {
    let unit = dp.p * dp.p / (dp.m * beta.powi(4));
    let gamma = dp.gamma(beta);
    EnergyParts::new(unit * PI * PI / 45.0, unit * 4.0 * gamma * gamma / 9.0)
}

pub fn vacuum_residual(dp: &DipoleParams, z: f64) -> EnergyParts {
    let unit = dp.p * dp.p / (16.0 * PI * PI * dp.m * z.powi(4));
    let cos2 = (2.0 * dp.theta).cos();
    EnergyParts::new(unit * (4.0 - 3.0 * cos2), unit * 4.0 * z * z / (dp.a * dp.a) * (1.0 + cos2))
}

fn mixed_energy_at(dp: &DipoleParams, beta: f64, z: f64, eta: f64) -> Result<EnergyParts> {
    let env = Environment::new(Scale::Finite(beta), Scale::Finite(z), Contributions::MIXED)?;
    Ok(kinetic_energy(dp, &env, 2.0 * z * eta)?.mixed)
}

/// Mixed long-time energy from a doubling sequence in `τ/(2z)`.
///
/// Accepts once two successive values differ by less than `rel_tol` times
/// the larger of the value itself and the thermal plus vacuum residual.
pub fn mixed_residual(dp: &DipoleParams, beta: f64, z: f64, opts: &ResidualOptions) -> Result<(EnergyParts, MixedCertificate)> {
    let floor = (thermal_residual(dp, beta).total + vacuum_residual(dp, z).total).abs();
    let mut eta = opts.eta_max;
    let mut previous = mixed_energy_at(dp, beta, z, eta / 2.0)?;
    for _ in 0..=opts.max_doublings {
        let current = mixed_energy_at(dp, beta, z, eta)?;
        let scale = current.total.abs().max(floor);
        let settled = [
            (current.translational, previous.translational),
            (current.rotational, previous.rotational),
        ]
        .iter()
        .all(|(c, p)| (c - p).abs() <= opts.rel_tol * scale);
        if settled {
            return Ok((current, MixedCertificate { eta_max: eta, previous: previous.total, current: current.total }));
        }
        previous = current;
        eta *= 2.0;
    }
    let current = mixed_energy_at(dp, beta, z, eta / 2.0)?;
    Err(Error::ResidualNotConverged { eta_max: eta / 2.0, previous: previous.total, current: current.total })
}

pub fn residual_energy(dp: &DipoleParams, env: &Environment) -> Result<ResidualEnergy> {
    residual_energy_with(dp, env, &ResidualOptions::default())
}

pub fn residual_energy_with(dp: &DipoleParams, env: &Environment, opts: &ResidualOptions) -> Result<ResidualEnergy> {
    dp.validate()?;
    let env = Environment::new(env.beta, env.z, env.contributions)?;
    let active = env.active();
    let beta = env.beta.finite();
    let z = env.z.finite();
    let mut parts = [EnergyParts::default(); 3];
    let mut certificate = None;
    if let (true, Some(b)) = (active.thermal, beta) {
        parts[0] = thermal_residual(dp, b);
    }
    if let (true, Some(z)) = (active.vacuum, z) {
        parts[1] = vacuum_residual(dp, z);
    }
    if let (true, Some(b), Some(z)) = (active.mixed, beta, z) {
        let (m, cert) = mixed_residual(dp, b, z, opts)?;
        parts[2] = m;
        certificate = Some(cert);
    }
    let energy = EnergyBreakdown::assemble(dp, env.beta, parts[0], parts[1], parts[2]);
    Ok(ResidualEnergy { energy, certificate })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingPoint {
    pub beta_over_z: f64,
    /// All energies in units of `p²/(mβ⁴)`.
    pub thermal: f64,
    pub vacuum: f64,
    pub mixed: f64,
    pub total: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignChange {
    pub lower: f64,
    pub upper: f64,
    pub root: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoolingScan {
    pub theta: f64,
    pub gamma: f64,
    pub points: Vec<CoolingPoint>,
    pub sign_changes: Vec<SignChange>,
}

pub const COOLING_RANGE: (f64, f64) = (0.05, 20.0);
const BISECTION_TOL: f64 = 1e-4;

/// Residual energy with and without the wall, at fixed β, as a function of
/// `β/z`. `dp.theta` is replaced by `theta`.
pub fn cooling_point(dp: &DipoleParams, theta: f64, beta: f64, ratio: f64, opts: &ResidualOptions) -> Result<CoolingPoint> {
    let dp = DipoleParams::new(dp.p, dp.m, dp.a, theta)?;
    if !(dp.p > 0.0) {
        return Err(Error::InvalidParameter("cooling scan needs p > 0".into()));
    }
    let env = Environment::full(beta, beta / ratio)?;
    let r = residual_energy_with(&dp, &env, opts)?.energy;
    let unit = dp.p * dp.p / (dp.m * beta.powi(4));
    let thermal = r.thermal.total / unit;
    let vacuum = r.vacuum.total / unit;
    let mixed = r.mixed.total / unit;
    let total = r.total.total / unit;
    Ok(CoolingPoint { beta_over_z: ratio, thermal, vacuum, mixed, total, difference: vacuum + mixed })
}

pub fn cooling_scan(
    dp: &DipoleParams,
    theta: f64,
    beta: f64,
    ratios: &[f64],
    opts: &ResidualOptions,
) -> Result<CoolingScan> {
    if ratios.is_empty() {
        return Err(Error::InvalidParameter("empty beta/z grid".into()));
    }
    for w in ratios.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter("beta/z grid must be strictly increasing".into()));
        }
    }
    let (lo, hi) = COOLING_RANGE;
    if ratios.iter().any(|r| !(*r >= lo && *r <= hi)) {
        return Err(Error::InvalidParameter(format!("beta/z grid must lie within [{lo}, {hi}]")));
    }
    let points = ratios
        .iter()
        .map(|&r| cooling_point(dp, theta, beta, r, opts))
        .collect::<Result<Vec<_>>>()?;

    let mut sign_changes = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.difference == 0.0 || (a.difference > 0.0) == (b.difference > 0.0) {
            continue;
        }
        let (mut x0, mut x1) = (a.beta_over_z, b.beta_over_z);
        let mut f0 = a.difference;
        while x1 - x0 > BISECTION_TOL {
            let xm = 0.5 * (x0 + x1);
            let fm = cooling_point(dp, theta, beta, xm, opts)?.difference;
            if (fm > 0.0) == (f0 > 0.0) {
                x0 = xm;
                f0 = fm;
            } else {
                x1 = xm;
            }
        }
        sign_changes.push(SignChange { lower: a.beta_over_z, upper: b.beta_over_z, root: 0.5 * (x0 + x1) });
    }
    Ok(CoolingScan { theta, gamma: beta / dp.a, points, sign_changes })
}

/// Log-spaced grid of `n` points over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersions::{f_beta, g_beta};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn dp(theta: f64) -> DipoleParams {
        DipoleParams::new(1.3, 0.9, 0.7, theta).unwrap()
    }

    #[test]
    fn thermal_energy_closed_form() {
        let d = dp(0.3);
        let beta = 1.4;
        let env = Environment::new(Scale::Finite(beta), Scale::Infinite, Contributions::ALL).unwrap();
        for tau in [0.2, 1.0, 7.5] {
            let k = kinetic_energy(&d, &env, tau).unwrap();
            let x = tau / beta;
            let gamma = beta / d.a;
            let unit = d.p * d.p / (d.m * beta.powi(4));
            assert_relative_eq!(k.thermal.translational, unit * PI * PI * f_beta(x) / 45.0, max_relative = 1e-14);
            assert_relative_eq!(k.thermal.rotational, unit * 4.0 * gamma * gamma * g_beta(x) / 9.0, max_relative = 1e-14);
            assert_relative_eq!(k.dimensionless_total.unwrap(), k.total.total / unit, max_relative = 1e-15);
        }
    }

    #[test]
    fn zero_time_is_zero() {
        let k = kinetic_energy(&dp(0.5), &Environment::full(1.0, 0.8).unwrap(), 0.0).unwrap();
        assert_eq!(k.total.total, 0.0);
    }

    #[test]
    fn residuals_match_long_time_limit() {
        let d = dp(0.9);
        let th = Environment::new(Scale::Finite(1.0), Scale::Infinite, Contributions::THERMAL).unwrap();
        let r = residual_energy(&d, &th).unwrap();
        let late = kinetic_energy(&d, &th, 1e7).unwrap();
        assert_relative_eq!(r.energy.total.total, late.total.total, max_relative = 1e-6);
        let vc = Environment::new(Scale::Infinite, Scale::Finite(1.0), Contributions::VACUUM).unwrap();
        let r = residual_energy(&d, &vc).unwrap();
        let late = kinetic_energy(&d, &vc, 1e7).unwrap();
        assert_relative_eq!(r.energy.total.total, late.total.total, max_relative = 1e-6);
        assert!(r.energy.dimensionless_total.is_none());
    }

    #[test]
    fn rotational_dominates_at_large_gamma() {
        let d = DipoleParams::new(1.0, 1.0, 1e-3, 0.0).unwrap();
        let r = residual_energy(&d, &Environment::new(Scale::Finite(1.0), Scale::Infinite, Contributions::ALL).unwrap()).unwrap();
        let ratio = r.energy.thermal.rotational / r.energy.thermal.translational;
        assert_relative_eq!(ratio, (4.0e6 / 9.0) / (PI * PI / 45.0), max_relative = 1e-12);
    }

    #[test]
    fn vacuum_residual_orientation_order() {
        // at z/a = 10 the parallel dipole picks up the rotational term
        let (z, a) = (10.0, 1.0);
        let par = vacuum_residual(&DipoleParams::new(1.0, 1.0, a, 0.0).unwrap(), z);
        let perp = vacuum_residual(&DipoleParams::new(1.0, 1.0, a, PI / 2.0).unwrap(), z);
        assert!(par.total > perp.total);
        assert!(perp.rotational.abs() < 1e-18);
        assert!(par.rotational > par.translational);
    }

    #[test]
    fn mixed_residual_certificate() {
        let d = dp(PI / 2.0);
        let (e, cert) = mixed_residual(&d, 1.0, 1.0, &ResidualOptions::default()).unwrap();
        assert!(cert.eta_max >= 200.0);
        assert!((cert.current - cert.previous).abs() <= 1e-6 * cert.current.abs().max(1.0) * 10.0);
        assert_eq!(e.total, cert.current);
        let bad = ResidualOptions { eta_max: 4.0, rel_tol: 1e-14, max_doublings: 1 };
        assert!(matches!(mixed_residual(&d, 1.0, 1.0, &bad), Err(Error::ResidualNotConverged { .. })));
    }

    #[test]
    fn mixed_residual_fades_when_cold() {
        let d = dp(0.0);
        let (e, _) = mixed_residual(&d, 50.0, 1.0, &ResidualOptions::default()).unwrap();
        let vac = vacuum_residual(&d, 1.0);
        assert!(e.total.abs() < 1e-3 * vac.total);
    }

    #[test]
    fn cooling_dip_perpendicular() {
        let d = DipoleParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let grid = log_grid(0.05, 20.0, 41);
        let scan = cooling_scan(&d, PI / 2.0, 1.0, &grid, &ResidualOptions::default()).unwrap();
        assert!(scan.points.iter().any(|p| p.beta_over_z > 0.5 && p.beta_over_z < 2.0 && p.difference < 0.0));
        assert!(!scan.sign_changes.is_empty());
        for s in &scan.sign_changes {
            assert!(s.root >= s.lower && s.root <= s.upper);
        }
        let again = cooling_scan(&d, PI / 2.0, 1.0, &grid, &ResidualOptions::default()).unwrap();
        assert_eq!(scan, again);
        let par = cooling_scan(&d, 0.0, 1.0, &grid, &ResidualOptions::default()).unwrap();
        assert_eq!(par.points.len(), grid.len());
        // hot and far: the wall terms fade roughly like β/z
        let first = scan.points[0];
        assert!(first.difference.abs() < 2e-2 * first.thermal);
        assert!(scan.points[..8].windows(2).all(|w| w[0].difference.abs() < w[1].difference.abs()));
    }

    #[test]
    fn cooling_grid_validation() {
        let d = dp(0.0);
        let o = ResidualOptions::default();
        assert!(cooling_scan(&d, 0.0, 1.0, &[], &o).is_err());
        assert!(cooling_scan(&d, 0.0, 1.0, &[1.0, 0.5], &o).is_err());
        assert!(cooling_scan(&d, 0.0, 1.0, &[0.01, 1.0], &o).is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.05, 20.0, 7);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[6], 20.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    proptest! {
        #[test]
        fn energy_equals_dispersion_assembly(eta in 0.05f64..6.0, theta in 0.0f64..1.57, zb in 0.3f64..3.0) {
            prop_assume!((eta - 1.0).abs() > 1e-3);
            let d = dp(theta);
            let env = Environment::full(1.0 / zb, 1.0).unwrap();
            let tau = 2.0 * eta;
            let k = kinetic_energy(&d, &env, tau).unwrap();
            let b = total_dispersions(&d, &env, tau).unwrap();
            let inertia = d.moment_of_inertia();
            let manual = d.m / 2.0 * (b.vx.total + b.vy.total + b.vz.total) + inertia / 2.0 * (b.wx.total + b.wy.total);
            prop_assert!((k.total.total - manual).abs() <= 1e-12 * manual.abs().max(1e-300));
        }

        #[test]
        fn thermal_energy_non_negative(tau in 0.0f64..50.0, beta in 0.1f64..5.0) {
            let env = Environment::new(Scale::Finite(beta), Scale::Infinite, Contributions::THERMAL).unwrap();
            let k = kinetic_energy(&dp(0.2), &env, tau).unwrap();
            prop_assert!(k.thermal.translational >= 0.0 && k.thermal.rotational >= 0.0);
        }

        #[test]
        fn residuals_non_negative(theta in 0.0f64..1.5707, z in 0.1f64..10.0, beta in 0.1f64..10.0) {
            let d = dp(theta);
            prop_assert!(thermal_residual(&d, beta).total >= 0.0);
            let v = vacuum_residual(&d, z);
            prop_assert!(v.translational >= 0.0 && v.rotational >= 0.0);
        }
    }
}
