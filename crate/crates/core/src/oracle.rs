//! Brute-force dispersions straight from the field two-point functions.
//!
//! The double time integral over `[0, τ]²` is folded onto the difference
//! variable, `∫∫ G(t - t') = 2 Re ∫₀^τ (τ - u) G(u + iε) du`, and integrated
//! along a path that steps over the light cone. Spatial derivatives are
//! central differences on a two-step stencil, extrapolated in the step; the
//! result is then extrapolated in ε. Nothing here touches the closed forms.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlators::{continued_sum, image_sum, Contribution};
use crate::dispersions::{DipoleParams, Environment, Scale};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_path, integrate_path_fixed, integrate_path_with, richardson, ErrorMeasure, PathEstimate};
use crate::specfun::{log_gamma, ComplexValue};

/// Width of the excluded band around the light-cone time `τ = 2z`.
pub const ORACLE_WINDOW: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    Adaptive,
    FixedTensor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadratureRule,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// ε₀ in units of the smallest of `2z` and β.
    pub eps0: f64,
    /// Difference step in units of the local distance to the nearest singularity.
    pub fd_step: f64,
    pub max_evals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rule: QuadratureRule::Adaptive, abs_tol: 1e-13, rel_tol: 1e-4, eps0: 1e-3, fd_step: 1e-2, max_evals: 100_000 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.abs_tol, self.rel_tol, self.eps0, self.fd_step].iter().all(|v| *v > 0.0 && v.is_finite());
        if !ok || self.max_evals == 0 || self.eps0 >= 0.5 || self.fd_step >= 0.5 {
            return Err(Error::InvalidParameter(format!("bad quadrature spec {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    fn weighted(terms: &[(f64, Estimate)]) -> Estimate {
        terms.iter().fold(Estimate::default(), |acc, (w, e)| Estimate {
            value: acc.value + w * e.value,
            error: acc.error + w.abs() * e.error,
        })
    }
}

/// Per-unit (`p = m = I = 1`) double time integrals for one contribution.
///
/// `velocity[k][i]` is `∫∫ ∂_i∂_i' ⟨E_j E_j⟩` with `j = x` for `k = 0` and
/// `j = z` for `k = 1`; `cross[i]` is the same with `⟨E_x E_z⟩`;
/// `angular[j]` is `∫∫ ⟨E_j E_j⟩` at coincidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitIntegrals {
    pub part: Contribution,
    pub velocity: [[Estimate; 3]; 2],
    pub cross: [Estimate; 3],
    pub angular: [Estimate; 3],
    pub evals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleVelocity {
    pub part: Contribution,
    pub vx: Estimate,
    pub vy: Estimate,
    pub vz: Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleAngular {
    pub part: Contribution,
    pub wx: Estimate,
    pub wy: Estimate,
}

// stencil: centre, then ±h, ±h/2, ±h/4 along x, y, z
const OFFSETS: [f64; 6] = [1.0, -1.0, 0.5, -0.5, 0.25, -0.25];
const GEOMETRIES: usize = 19;
// tensor pieces per geometry: xx, yy, zz, xz
const PIECES: usize = 4;
const KERNEL: usize = GEOMETRIES * PIECES;
// integrand layout: 3 pairs (xx, zz, xz) × 3 axes × two extrapolated steps,
// then xx, yy, zz at coincidence, then a rounding bound for each of the 12
const VALUES: usize = 21;
const OUT: usize = VALUES + 12;


fn geometry(base_z: f64, h: f64) -> [[f64; 3]; GEOMETRIES] {
    let mut g = [[0.0, 0.0, base_z]; GEOMETRIES];
    for axis in 0..3 {
        for (k, o) in OFFSETS.iter().enumerate() {
            g[1 + 6 * axis + k][axis] += o * h;
        }
    }
    g
}

fn kernel(w: Complex64, geo: &[[f64; 3]; GEOMETRIES], image: bool) -> [Complex64; KERNEL] {
    let mut out = [Complex64::new(0.0, 0.0); KERNEL];
    let w2 = w * w;
    let (tangential, normal) = if image { (-1.0, 1.0) } else { (1.0, 1.0) };
    for (g, d) in geo.iter().enumerate() {
        let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let s = w2 - r2;
        let inv = (s * s * s * (PI * PI)).inv();
        let diag = w2 + r2;
        out[g * PIECES] = (diag - 2.0 * d[0] * d[0]) * inv * tangential;
        out[g * PIECES + 1] = (diag - 2.0 * d[1] * d[1]) * inv * tangential;
        out[g * PIECES + 2] = (diag - 2.0 * d[2] * d[2]) * inv * normal;
        out[g * PIECES + 3] = inv * (-2.0 * d[0] * d[2] * normal);
    }
    out
}

struct Setup {
    part: Contribution,
    beta: f64,
    c: f64,
    tau: f64,
    sum_tol: f64,
}

impl Setup {
    fn base_z(&self) -> f64 {
        match self.part {
            Contribution::Thermal => 0.0,
            _ => self.c,
        }
    }

    fn length(&self) -> f64 {
        match self.part {
            Contribution::Thermal => self.beta,
            Contribution::Vacuum => self.c,
            Contribution::Mixed => self.c.min(self.beta),
        }
    }

    /// Distance from `w` to the closest singularity that a small change of
    /// the separation can move.
    fn local_scale(&self, w: Complex64) -> f64 {
        let c = self.c;
        let near = |v: Complex64| (v * v - c * c).norm() / (v.norm() + c);
        match self.part {
            Contribution::Vacuum => c.min(near(w)),
            Contribution::Mixed => {
                let ib = Complex64::new(0.0, self.beta);
                c.min(self.beta).min(near(w + ib)).min(near(w - ib))
            }
            Contribution::Thermal => {
                let ib = Complex64::new(0.0, self.beta);
                (w + ib).norm().min((w - ib).norm())
            }
        }
    }

    /// Relative rounding in one correlator value: a few operations per
    /// kernel, growing like the square root of the number of image terms.
    fn rounding(&self) -> f64 {
        let terms = match self.part {
            Contribution::Vacuum => 1.0,
            _ => 2.0 * (2.0 * (self.tau + self.c) / self.beta + (3.0 * self.sum_tol).powf(-1.0 / 3.0)),
        };
        8.0 * f64::EPSILON * terms.sqrt()
    }

    /// Powers of ε removed in turn. The integrand is real on the real
    /// axis, so odd powers cancel unless the path steps over a pole.
    fn eps_steps(&self) -> Vec<i32> {
        eps_orders(self.part == Contribution::Vacuum && self.tau > self.c)
    }

    fn path(&self) -> Vec<Complex64> {
        let re = |x: f64| Complex64::new(x, 0.0);
        let (c, tau) = (self.c, self.tau);
        match self.part {
            Contribution::Vacuum if tau > c => {
                let r = 0.5 * c.min(tau - c);
                vec![re(0.0), re(c - r), Complex64::new(c, r), re(c + r), re(tau)]
            }
            Contribution::Mixed if tau > c => vec![re(0.0), re(c), re(tau)],
            _ => vec![re(0.0), re(tau)],
        }
    }

    fn correlator(&self, w: Complex64, geo: &[[f64; 3]; GEOMETRIES]) -> Result<[Complex64; KERNEL]> {
        let reach = w.norm() + self.c + geo[1][0].abs();
        match self.part {
            Contribution::Vacuum => Ok(kernel(w, geo, true)),
            Contribution::Thermal => continued_sum(|v| kernel(v, geo, false), w, self.beta, reach, self.sum_tol, f64::MIN_POSITIVE),
            Contribution::Mixed => continued_sum(|v| kernel(v, geo, true), w, self.beta, reach, self.sum_tol, f64::MIN_POSITIVE),
        }
    }

    /// `(τ - w)` times the stencil combinations at `w + iε`.
    fn integrand(&self, w: Complex64, eps: f64, fd_step: f64) -> Result<[Complex64; OUT]> {
        let h = fd_step * self.local_scale(w);
        let geo = geometry(self.base_z(), h);
        let g = self.correlator(w + Complex64::new(0.0, eps), &geo)?;
        let weight = Complex64::new(self.tau, 0.0) - w;
        let mut out = [Complex64::new(0.0, 0.0); OUT];
        let rounding = self.rounding();
        for (q, piece) in [0usize, 2, 3].iter().enumerate() {
            let centre = g[*piece];
            for axis in 0..3 {
                let at = |k: usize| g[(1 + 6 * axis + k) * PIECES + piece];
                let second = |k: usize, step: f64| (at(k) + at(k + 1) - centre * 2.0) / (step * step);
                let noise = |k: usize, step: f64| (at(k).norm() + at(k + 1).norm() + 2.0 * centre.norm()) / (step * step);
                let (d1, d2, d4) = (second(0, h), second(2, h / 2.0), second(4, h / 4.0));
                let sign = if axis == 2 && self.part != Contribution::Thermal { 1.0 } else { -1.0 };
                let slot = 2 * (3 * q + axis);
                out[slot] = richardson(d1, d2, 4.0) * sign * weight;
                out[slot + 1] = richardson(d2, d4, 4.0) * sign * weight;
                // the final value is (64 d4 - 20 d2 + d1)/45
                let n = (64.0 * noise(4, h / 4.0) + 20.0 * noise(2, h / 2.0) + noise(0, h)) / 45.0;
                out[VALUES + 3 * q + axis] = Complex64::new(rounding * n * weight.norm(), 0.0);
            }
        }
        for piece in 0..3 {
            out[18 + piece] = g[piece] * weight;
            out[VALUES + 9 + piece] = Complex64::new(rounding * (g[piece] * weight).norm(), 0.0);
        }
        Ok(out)
    }
}

// components far below the largest of their kind are held to this
// fraction of its tolerance instead of their own
const GROUP_FLOOR: f64 = 1e-4;

fn group_tolerance(v: &[Complex64; OUT], abs_tol: f64, rel_tol: f64) -> [f64; OUT] {
    // only the real part survives the fold
    let vel = v[..18].iter().map(|x| x.re.abs()).fold(0.0, f64::max);
    let ang = v[18..VALUES].iter().map(|x| x.re.abs()).fold(0.0, f64::max);
    // rounding bounds need no accuracy of their own
    let mut t = [f64::INFINITY; OUT];
    for (d, slot) in t.iter_mut().enumerate().take(VALUES) {
        let scale = if d < 18 { vel } else { ang };
        *slot = abs_tol.max(rel_tol * v[d].re.abs()).max(GROUP_FLOOR * rel_tol * scale);
    }
    t
}

fn integrate(setup: &Setup, eps: f64, spec: &QuadratureSpec) -> Result<PathEstimate<OUT>> {
    let nodes = setup.path();
    let failure = std::cell::RefCell::new(None);
    let f = |w: Complex64| match setup.integrand(w, eps, spec.fd_step) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            [Complex64::new(0.0, 0.0); OUT]
        }
    };
    let tol = |v: &[Complex64; OUT]| group_tolerance(v, 0.05 * spec.abs_tol, 0.05 * spec.rel_tol);
    let est = match spec.rule {
        QuadratureRule::Adaptive => integrate_path_with(f, &nodes, tol, ErrorMeasure::RealPart, spec.max_evals),
        QuadratureRule::FixedTensor => integrate_path_fixed(f, &nodes, 20, tol, spec.max_evals),
    };
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(est),
    }
}

fn require_finite(s: Scale, name: &str, part: Contribution) -> Result<f64> {
    s.finite()
        .filter(|v| *v > 0.0 && v.is_finite())
        .ok_or_else(|| Error::InvalidParameter(format!("{part:?} contribution needs a finite positive {name}")))
}

/// The per-unit integrals of one contribution at elapsed time `tau`.
pub fn oracle_unit_integrals(part: Contribution, beta: Scale, z: Scale, tau: f64, spec: &QuadratureSpec) -> Result<UnitIntegrals> {
    let out = unit_integrals_uncertified(part, beta, z, tau, spec)?;
    check_tolerance(&out, spec)?;
    Ok(out)
}

/// Same as [`oracle_unit_integrals`] but returns the estimates without
/// enforcing the requested tolerance.
pub fn unit_integrals_uncertified(part: Contribution, beta: Scale, z: Scale, tau: f64, spec: &QuadratureSpec) -> Result<UnitIntegrals> {
    spec.validate()?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("tau = {tau} must be non-negative")));
    }
    let (beta, c) = match part {
        Contribution::Thermal => (require_finite(beta, "beta", part)?, 0.0),
        Contribution::Vacuum => (f64::INFINITY, 2.0 * require_finite(z, "z", part)?),
        Contribution::Mixed => (require_finite(beta, "beta", part)?, 2.0 * require_finite(z, "z", part)?),
    };
    if part != Contribution::Thermal {
        let eta = tau / c;
        if (eta - 1.0).abs() < ORACLE_WINDOW {
            return Err(Error::Singular { eta, window: ORACLE_WINDOW });
        }
    }
    let setup = Setup { part, beta, c, tau, sum_tol: 1e-3 * spec.rel_tol };
    let eps = spec.eps0 * setup.length();
    let order = setup.eps_steps();
    let levels = (0..order.len() + 1)
        .map(|k| integrate(&setup, eps / 2f64.powi(k as i32), spec))
        .collect::<Result<Vec<_>>>()?;
    let slot = |d: usize| {
        let values: Vec<f64> = levels.iter().map(|l| 2.0 * l.value[d].re).collect();
        let errors: Vec<f64> = levels.iter().map(|l| 2.0 * l.error[d]).collect();
        extrapolate(&values, &errors, &order)
    };
    // rounding carried through the ε table like a quadrature error
    let rounding = |d: usize| {
        let bounds: Vec<f64> = levels.iter().map(|l| 2.0 * l.value[VALUES + d].norm()).collect();
        extrapolate(&vec![0.0; bounds.len()], &bounds, &order).error
    };
    let derivative = |q: usize, axis: usize| {
        let s = 2 * (3 * q + axis);
        let (coarse, fine) = (slot(s), slot(s + 1));
        // the two extrapolants differ by the h⁴ term; remove it as well
        let value = richardson(coarse.value, fine.value, 16.0);
        let step = (fine.value - coarse.value).abs() / 15.0;
        Estimate { value, error: (16.0 * fine.error + coarse.error) / 15.0 + step + rounding(3 * q + axis) }
    };
    let angular = |piece: usize| {
        let e = slot(18 + piece);
        Estimate { value: e.value, error: e.error + rounding(9 + piece) }
    };
    let out = UnitIntegrals {
        part,
        velocity: [0, 1].map(|q| [0, 1, 2].map(|axis| derivative(q, axis))),
        cross: [0, 1, 2].map(|axis| derivative(2, axis)),
        angular: [0, 1, 2].map(angular),
        evals: levels.iter().map(|l| l.evals).sum(),
    };
    Ok(out)
}

/// Powers of ε removed by the table; a path stepping over a pole picks up
/// every power, otherwise only even ones.
fn eps_orders(over_pole: bool) -> Vec<i32> {
    if over_pole {
        vec![1, 2, 3]
    } else {
        vec![2, 4]
    }
}

/// Richardson table over levels `ε, ε/2, ε/4, …`, removing `ε^order[k]` at
/// stage `k`. The error adds the propagated quadrature errors to the size
/// of the last term removed.
fn extrapolate(values: &[f64], errors: &[f64], order: &[i32]) -> Estimate {
    let mut v = values.to_vec();
    let mut e = errors.to_vec();
    let mut correction = 0.0;
    for &p in order {
        let r = 2f64.powi(p);
        correction = (v[v.len() - 1] - v[v.len() - 2]).abs() / (r - 1.0);
        v = v.windows(2).map(|w| richardson(w[0], w[1], r)).collect();
        e = e.windows(2).map(|w| (r * w[1] + w[0]) / (r - 1.0)).collect();
    }
    Estimate { value: v[0], error: e[0] + correction }
}

fn check_tolerance(u: &UnitIntegrals, spec: &QuadratureSpec) -> Result<()> {
    let groups: [Vec<Estimate>; 2] = [u.velocity.iter().flatten().chain(u.cross.iter()).copied().collect(), u.angular.to_vec()];
    for g in groups {
        let scale = g.iter().map(|e| e.value.abs()).fold(0.0, f64::max);
        for e in g {
            let requested = spec.abs_tol.max(spec.rel_tol * e.value.abs()).max(GROUP_FLOOR * spec.rel_tol * scale);
            if !(e.error <= requested) {
                return Err(Error::ToleranceNotMet { achieved: e.error, requested });
            }
        }
    }
    Ok(())
}

fn active_parts(env: &Environment) -> Result<Vec<Contribution>> {
    let env = Environment::new(env.beta, env.z, env.contributions)?;
    let a = env.active();
    let mut parts = Vec::new();
    if a.thermal {
        parts.push(Contribution::Thermal);
    }
    if a.vacuum {
        parts.push(Contribution::Vacuum);
    }
    if a.mixed {
        parts.push(Contribution::Mixed);
    }
    Ok(parts)
}

fn unit_sets(dp: &DipoleParams, env: &Environment, tau: f64, spec: &QuadratureSpec) -> Result<Vec<UnitIntegrals>> {
    dp.validate()?;
    active_parts(env)?.into_iter().map(|part| oracle_unit_integrals(part, env.beta, env.z, tau, spec)).collect()
}

/// Lab-frame velocity dispersions, dipole `p(cos θ, 0, sin θ)`.
pub fn velocity_from_units(dp: &DipoleParams, u: &UnitIntegrals) -> OracleVelocity {
    let k = dp.p * dp.p / (dp.m * dp.m);
    let (c2, s2) = (dp.theta.cos().powi(2), dp.theta.sin().powi(2));
    let axis = |i: usize| Estimate::weighted(&[(k * c2, u.velocity[0][i]), (k * s2, u.velocity[1][i])]);
    OracleVelocity { part: u.part, vx: axis(0), vy: axis(1), vz: axis(2) }
}

/// Body-frame angular-velocity dispersions.
pub fn angular_from_units(dp: &DipoleParams, u: &UnitIntegrals) -> OracleAngular {
    let inertia = dp.moment_of_inertia();
    let k = dp.p * dp.p / (inertia * inertia);
    let (c2, s2) = (dp.theta.cos().powi(2), dp.theta.sin().powi(2));
    OracleAngular {
        part: u.part,
        wx: Estimate::weighted(&[(k * c2, u.angular[2]), (k * s2, u.angular[0])]),
        wy: Estimate::weighted(&[(k, u.angular[1])]),
    }
}

pub fn oracle_velocity_dispersion(dp: &DipoleParams, env: &Environment, tau: f64, spec: &QuadratureSpec) -> Result<Vec<OracleVelocity>> {
    Ok(unit_sets(dp, env, tau, spec)?.iter().map(|u| velocity_from_units(dp, u)).collect())
}

pub fn oracle_angular_dispersion(dp: &DipoleParams, env: &Environment, tau: f64, spec: &QuadratureSpec) -> Result<Vec<OracleAngular>> {
    Ok(unit_sets(dp, env, tau, spec)?.iter().map(|u| angular_from_units(dp, u)).collect())
}

/// Largest `|2 p_x p_z/m² ∫∫ ∂_i∂_i' ⟨E_x E_z⟩|` over axes and active
/// contributions.
pub fn oracle_cross_terms(dp: &DipoleParams, env: &Environment, tau: f64, spec: &QuadratureSpec) -> Result<f64> {
    let w = 2.0 * dp.p * dp.p * dp.theta.cos() * dp.theta.sin() / (dp.m * dp.m);
    Ok(unit_sets(dp, env, tau, spec)?
        .iter()
        .flat_map(|u| u.cross.iter().map(|e| (w * e.value).abs()))
        .fold(0.0, f64::max))
}

fn check_right_half(z: ComplexValue) -> Result<()> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(Error::Domain(format!("oracle needs Re z > 0, got {z}")));
    }
    Ok(())
}

fn line_integral(f: impl Fn(Complex64) -> Result<Complex64>, a: Complex64, b: Complex64) -> Result<Complex64> {
    let failure = std::cell::RefCell::new(None);
    let est = integrate_path(
        |t: Complex64| match f(t) {
            Ok(v) => [v],
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                [Complex64::new(0.0, 0.0)]
            }
        },
        &[a, b],
        1e-15,
        1e-14,
        200_000,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !est.converged {
        return Err(Error::ToleranceNotMet { achieved: est.error[0], requested: 1e-14 * est.value[0].norm() });
    }
    Ok(est.value[0])
}

/// `∫₀^z ln Γ(t) dt` along the straight path, with the `-ln t` part of the
/// integrand near the origin done by hand.
pub fn oracle_psi_m2(zc: ComplexValue) -> Result<ComplexValue> {
    check_right_half(zc)?;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let smooth = line_integral(|t| log_gamma(t + one), zero, zc)?;
    Ok(smooth - (zc * zc.ln() - zc))
}

/// `ψ(z) = -γ + Σ (1/n - 1/(n+z-1))` summed to a large cutoff with an
/// asymptotic tail; γ comes from the same harmonic sums.
pub fn oracle_digamma(zc: ComplexValue) -> Result<ComplexValue> {
    check_right_half(zc)?;
    const N: usize = 200_000;
    let n = N as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut harmonic = 0.0;
    for k in (1..=N).rev() {
        let kf = k as f64;
        sum += (kf + zc - 1.0).inv() * -1.0 + 1.0 / kf;
        harmonic += 1.0 / kf;
    }
    let gamma = harmonic - n.ln() - 1.0 / (2.0 * n) + 1.0 / (12.0 * n * n);
    let asym = |x: Complex64| x.ln() - (x * 2.0).inv() - (x * x * 12.0).inv();
    // Σ_{k>N} (1/k - 1/(k+z-1)) = ψ(N+z) - ψ(N+1)
    let tail = asym(zc + n) - asym(Complex64::new(n + 1.0, 0.0));
    Ok(sum + tail - gamma)
}

/// `s(a, b)` with the `ψ⁽⁻²⁾` difference done as a line integral of ln Γ
/// from `a` to `a + b`.
pub fn oracle_s_func(a: ComplexValue, b: ComplexValue) -> Result<ComplexValue> {
    check_right_half(a)?;
    check_right_half(a + b)?;
    if b.norm() == 0.0 {
        return Err(Error::Pole("s(a, b) at b = 0".into()));
    }
    let area = line_integral(log_gamma, a, a + b)?;
    let b2 = b * b;
    Ok(-oracle_digamma(a)? / b + log_gamma(a + b)? * 2.0 / b2 - area * 2.0 / (b2 * b))
}

fn folded_integral<F>(f: F, nodes: &[Complex64], tau: f64, eps: f64, spec: &QuadratureSpec) -> Result<(f64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let failure = std::cell::RefCell::new(None);
    let g = |w: Complex64| match f(w + Complex64::new(0.0, eps)) {
        Ok(v) => [v * (Complex64::new(tau, 0.0) - w)],
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            [Complex64::new(0.0, 0.0)]
        }
    };
    let tol = |v: &[Complex64; 1]| [(0.05 * spec.abs_tol).max(0.05 * spec.rel_tol * v[0].re.abs())];
    let est = match spec.rule {
        QuadratureRule::Adaptive => integrate_path_with(g, nodes, tol, ErrorMeasure::RealPart, spec.max_evals),
        QuadratureRule::FixedTensor => integrate_path_fixed(g, nodes, 20, tol, spec.max_evals),
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((2.0 * est.value[0].re, 2.0 * est.error[0]))
}

fn eps_extrapolated<F>(f: F, nodes: &[Complex64], tau: f64, length: f64, order: Vec<i32>, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let eps = spec.eps0 * length;
    let levels = (0..order.len() + 1)
        .map(|k| folded_integral(&f, nodes, tau, eps / 2f64.powi(k as i32), spec))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = levels.iter().map(|l| l.0).collect();
    let errors: Vec<f64> = levels.iter().map(|l| l.1).collect();
    let est = extrapolate(&values, &errors, &order);
    let requested = spec.abs_tol.max(spec.rel_tol * est.value.abs());
    if !(est.error <= requested) {
        return Err(Error::ToleranceNotMet { achieved: est.error, requested });
    }
    Ok(est)
}

fn indented(c: f64, tau: f64) -> Vec<Complex64> {
    let re = |x: f64| Complex64::new(x, 0.0);
    if tau > c {
        let r = 0.5 * c.min(tau - c);
        vec![re(0.0), re(c - r), Complex64::new(c, r), re(c + r), re(tau)]
    } else {
        vec![re(0.0), re(tau)]
    }
}

/// `∫₀^τ∫₀^τ (Δt² - b²)/(Δt² - c²)³` by quadrature.
pub fn oracle_int2_vacuum(b: f64, c: f64, tau: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    if !(c > 0.0) || !(tau >= 0.0) || !b.is_finite() || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("oracle_int2_vacuum(b={b}, c={c}, tau={tau})")));
    }
    if (tau / c - 1.0).abs() < ORACLE_WINDOW {
        return Err(Error::Singular { eta: tau / c, window: ORACLE_WINDOW });
    }
    let f = |w: Complex64| {
        let w2 = w * w;
        let s = w2 - c * c;
        Ok((w2 - b * b) / (s * s * s))
    };
    eps_extrapolated(f, &indented(c, tau), tau, c, eps_orders(tau > c), spec)
}

/// `Σ_{n≥1} ∫₀^τ∫₀^τ ((Δt - inβ)² - b²)/((Δt - inβ)² - c²)³` with the
/// image sum done term by term inside the quadrature.
pub fn oracle_int2_thermal(b: f64, c: f64, tau: f64, beta: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    if !(beta > 0.0) || !(c >= 0.0) || !(tau >= 0.0) || !b.is_finite() || !tau.is_finite() || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("oracle_int2_thermal(b={b}, c={c}, tau={tau}, beta={beta})")));
    }
    let term = |v: Complex64| {
        let v2 = v * v;
        let s = v2 - c * c;
        [(v2 - b * b) / (s * s * s)]
    };
    let sum_tol = 1e-3 * spec.rel_tol;
    // the n-sum alone; ∫∫ over the square folds to 2 Re ∫ (τ - u) Σ(u - inβ)
    let f = |w: Complex64| Ok(image_sum(term, w, beta, w.norm() + c, sum_tol, f64::MIN_POSITIVE, -1.0)?[0]);
    // no pole on the real axis, so no ε
    let (value, error) = folded_integral(f, &[Complex64::new(0.0, 0.0), Complex64::new(tau, 0.0)], tau, 0.0, spec)?;
    let requested = spec.abs_tol.max(spec.rel_tol * value.abs());
    if !(error <= requested) {
        return Err(Error::ToleranceNotMet { achieved: error, requested });
    }
    Ok(Estimate { value, error })
}
