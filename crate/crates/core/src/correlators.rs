//! Renormalized electric-field two-point functions near a perfectly
//! conducting plane at `z = 0`, split into thermal, vacuum (image) and mixed
//! parts, and the two closed-form double-time integrals built on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{polygamma_checked, ComplexValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Contribution {
    Thermal,
    Vacuum,
    Mixed,
}

/// Separation between two spacetime points. `dzh` is `z + z'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    pub dt: ComplexValue,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    pub dzh: f64,
}

impl Separation {
    pub fn coincident(dt: ComplexValue, z: f64) -> Self {
        Self { dt, dx: 0.0, dy: 0.0, dz: 0.0, dzh: 2.0 * z }
    }

    pub fn swap_transverse(self) -> Self {
        Self { dx: self.dy, dy: self.dx, ..self }
    }
}

pub const DEFAULT_SUM_TOL: f64 = 1e-10;
const MAX_IMAGE_TERMS: usize = 2_000_000;

/// Free-space tensor `[δ_ij(Δt² + r²) - 2 Δx_i Δx_j] / (π² s³)` with
/// `s = Δt² - r²`.
pub fn free_tensor(i: Axis, j: Axis, dt: Complex64, d: [f64; 3]) -> Complex64 {
    let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    let dt2 = dt * dt;
    let s = dt2 - r2;
    let delta = if i == j { 1.0 } else { 0.0 };
    let num = (dt2 + r2) * delta - 2.0 * d[i.index()] * d[j.index()];
    num / (s * s * s * (PI * PI))
}

/// Image tensor for the mirrored point; `d[2]` is `z + z'`.
pub fn image_tensor(i: Axis, j: Axis, dt: Complex64, d: [f64; 3]) -> Complex64 {
    let parity = if j == Axis::Z { 1.0 } else { -1.0 };
    free_tensor(i, j, dt, d) * parity
}

/// Wall (image) part of `<E_axis E_axis>`.
pub fn corr_vc(axis: Axis, sep: Separation) -> Result<ComplexValue> {
    check_sep(&sep)?;
    let d = [sep.dx, sep.dy, sep.dzh];
    let s = sep.dt * sep.dt - (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    if s.norm() == 0.0 {
        return Err(Error::Pole(format!("light cone at dt = {}", sep.dt)));
    }
    Ok(image_tensor(axis, axis, sep.dt, d))
}

/// Thermal part of `<E_axis E_axis>`.
pub fn corr_th(axis: Axis, sep: Separation, beta: f64, tol: f64) -> Result<f64> {
    check_sum_args(&sep, beta, tol)?;
    let d = [sep.dx, sep.dy, sep.dz];
    let sum = image_sum(|w| [free_tensor(axis, axis, w, d)], sep.dt, beta, reach(&sep, d), tol, tol, -1.0)?;
    Ok(2.0 * sum[0].re)
}

/// Mixed (wall plus bath) part of `<E_axis E_axis>`.
pub fn corr_mx(axis: Axis, sep: Separation, beta: f64, tol: f64) -> Result<f64> {
    check_sum_args(&sep, beta, tol)?;
    let d = [sep.dx, sep.dy, sep.dzh];
    let sum = image_sum(|w| [image_tensor(axis, axis, w, d)], sep.dt, beta, reach(&sep, d), tol, tol, -1.0)?;
    Ok(2.0 * sum[0].re)
}

/// Any tensor component of one contribution, analytically continued in
/// `dt` off the real axis. On the real axis the thermal and mixed parts
/// reduce to `corr_th` and `corr_mx`.
pub fn field_correlator(
    part: Contribution,
    i: Axis,
    j: Axis,
    sep: Separation,
    beta: f64,
    tol: f64,
) -> Result<ComplexValue> {
    check_sep(&sep)?;
    match part {
        Contribution::Vacuum => Ok(image_tensor(i, j, sep.dt, [sep.dx, sep.dy, sep.dzh])),
        Contribution::Thermal => {
            check_sum_args(&sep, beta, tol)?;
            let d = [sep.dx, sep.dy, sep.dz];
            let v = continued_sum(|w| [free_tensor(i, j, w, d)], sep.dt, beta, reach(&sep, d), tol, tol)?;
            Ok(v[0])
        }
        Contribution::Mixed => {
            check_sum_args(&sep, beta, tol)?;
            let d = [sep.dx, sep.dy, sep.dzh];
            let v = continued_sum(|w| [image_tensor(i, j, w, d)], sep.dt, beta, reach(&sep, d), tol, tol)?;
            Ok(v[0])
        }
    }
}

fn check_sep(sep: &Separation) -> Result<()> {
    let ok = [sep.dt.re, sep.dt.im, sep.dx, sep.dy, sep.dz, sep.dzh].iter().all(|v| v.is_finite());
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter("non-finite separation".into()))
    }
}

fn check_sum_args(sep: &Separation, beta: f64, tol: f64) -> Result<()> {
    check_sep(sep)?;
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} must be positive")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {tol} must be positive")));
    }
    Ok(())
}

fn reach(sep: &Separation, d: [f64; 3]) -> f64 {
    sep.dt.norm() + (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// `Σ_{n≥1} kernel(dt + i·sign·nβ)` for a vector of kernels.
///
/// Terms fall off as `n⁻⁴` once `nβ` exceeds the separation scale `reach`,
/// so the tail after term `n` is bounded by `n|t_n|/3`. The sum stops when
/// that bound is below `max(rel_tol·|sum|, abs_tol)`, and the remainder is
/// then added from the model `t_k ≈ C (k + a)⁻⁴` with `a = dt/(i·sign·β)`.
pub(crate) fn image_sum<const D: usize, F>(
    kernel: F,
    dt: Complex64,
    beta: f64,
    reach: f64,
    rel_tol: f64,
    abs_tol: f64,
    sign: f64,
) -> Result<[Complex64; D]>
where
    F: Fn(Complex64) -> [Complex64; D],
{
    let mut sum = [Complex64::new(0.0, 0.0); D];
    let mut last = f64::INFINITY;
    let mut rising = 0;
    for n in 1..=MAX_IMAGE_TERMS {
        let w = dt + Complex64::new(0.0, sign * n as f64 * beta);
        let term = kernel(w);
        let mut mag = 0.0f64;
        for d in 0..D {
            sum[d] += term[d];
            mag = mag.max(term[d].norm());
        }
        if !mag.is_finite() {
            return Err(Error::Pole(format!("image term {n} at dt = {dt}")));
        }
        let decaying = n as f64 * beta > 2.0 * reach;
        if decaying {
            if mag > last {
                rising += 1;
                if rising >= 3 {
                    return Err(Error::NonConvergence {
                        terms: n,
                        reason: "term magnitudes grew over three consecutive n".into(),
                    });
                }
            } else {
                rising = 0;
            }
            let tail = mag * n as f64 / 3.0;
            let size = sum.iter().map(|s| s.norm()).fold(0.0, f64::max);
            if tail < (rel_tol * size).max(abs_tol) || mag == 0.0 {
                let a = dt / Complex64::new(0.0, sign * beta);
                let k = a + n as f64;
                let u = k + 0.5;
                // midpoint Euler–Maclaurin for Σ_{j>n} (j + a)⁻⁴
                let rest = k.powi(4) * (u.powi(-3) / 3.0 - u.powi(-5) / 6.0);
                for d in 0..D {
                    sum[d] += term[d] * rest;
                }
                return Ok(sum);
            }
        }
        last = mag;
    }
    Err(Error::NonConvergence { terms: MAX_IMAGE_TERMS, reason: "term cap reached".into() })
}

/// `2 Re Σ kernel(dt - inβ)` continued analytically to complex `dt`.
pub(crate) fn continued_sum<const D: usize, F>(
    kernel: F,
    dt: Complex64,
    beta: f64,
    reach: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<[Complex64; D]>
where
    F: Fn(Complex64) -> [Complex64; D],
{
    let lower = image_sum(&kernel, dt, beta, reach, rel_tol, abs_tol, -1.0)?;
    let mut out = [Complex64::new(0.0, 0.0); D];
    if dt.im == 0.0 {
        for d in 0..D {
            out[d] = Complex64::new(2.0 * lower[d].re, 0.0);
        }
    } else {
        let upper = image_sum(&kernel, dt, beta, reach, rel_tol, abs_tol, 1.0)?;
        for d in 0..D {
            out[d] = lower[d] + upper[d];
        }
    }
    Ok(out)
}

/// `∫₀^τ∫₀^τ dt dt' (Δt² - b²)/(Δt² - c²)³` with the principal-value
/// prescription at the light cone.
pub fn int2_vacuum(b: f64, c: f64, tau: f64) -> Result<f64> {
    if !(c > 0.0) || !(tau >= 0.0) || !b.is_finite() || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("int2_vacuum(b={b}, c={c}, tau={tau})")));
    }
    if tau == c {
        return Err(Error::Pole(format!("tau = c = {c}")));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    let (b2, c2) = (b * b, c * c);
    let log_term = 2.0 * ((c - tau) / (c + tau)).abs().ln();
    Ok(tau * tau * (b2 - c2) / (4.0 * c2 * c2 * (c2 - tau * tau)) - (c2 + 3.0 * b2) / (16.0 * c2 * c2 * c) * tau * log_term)
}

/// `Σ_{n≥1} ∫₀^τ∫₀^τ dt dt' ((Δt - inβ)² - b²)/((Δt - inβ)² - c²)³`.
pub fn int2_thermal(b: f64, c: f64, tau: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) || !(c >= 0.0) || !(tau >= 0.0) || !b.is_finite() || !tau.is_finite() || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("int2_thermal(b={b}, c={c}, tau={tau}, beta={beta})")));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    let one = Complex64::new(1.0, 0.0);
    let a1 = Complex64::new(1.0, tau / beta);
    let a2 = Complex64::new(1.0, -tau / beta);

    let value = if c == 0.0 {
        // E(c) is even in c; the derivative operator tends to -b² E''(0)/4
        let e0 = (polygamma_checked(1, a1)? + polygamma_checked(1, a2)? - 2.0 * polygamma_checked(1, one)?) * (4.0 / 3.0);
        let g2 = (polygamma_checked(3, a1)? + polygamma_checked(3, a2)? - 2.0 * polygamma_checked(3, one)?) * (2.0 / 15.0);
        let e2 = g2 * (-2.0 / (beta * beta));
        e0 - e2 * (b * b / 4.0)
    } else {
        let mut e = Complex64::new(0.0, 0.0);
        let mut de = Complex64::new(0.0, 0.0);
        for sigma in [1.0, -1.0] {
            let bb = Complex64::new(0.0, sigma * c / beta);
            let dbdc = Complex64::new(0.0, sigma / beta);
            for (a, w) in [(a1, 1.0), (a2, 1.0), (one, -2.0)] {
                let (s, ds) = s_func_with_derivative(a, bb)?;
                e += s * w;
                de += ds * dbdc * w;
            }
        }
        e + de * ((c * c - b * b) / (4.0 * c))
    };
    Ok(-value.re / (8.0 * beta * beta))
}

/// `s(a, b) = -ψ(a)/b + 2 ψ⁽⁻¹⁾(a+b)/b² - 2[ψ⁽⁻²⁾(a+b) - ψ⁽⁻²⁾(a)]/b³`.
///
/// Uses the Taylor series in `b` when `|b| < 0.1|a|`.
pub fn s_func(a: ComplexValue, b: ComplexValue) -> Result<ComplexValue> {
    Ok(s_func_with_derivative(a, b)?.0)
}

const S_SERIES_TERMS: usize = 15;

/// `s(a, b)` and `∂s/∂b`.
pub fn s_func_with_derivative(a: ComplexValue, b: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
    if b.norm() == 0.0 {
        return Err(Error::Pole("s(a, b) at b = 0".into()));
    }
    if b.norm() < 0.1 * a.norm() {
        polygamma_checked(0, a)?;
        polygamma_checked(0, a + b)?;
        // s = Σ_m 2(m+2)/(m+3)! ψ^(m+1)(a) b^m
        let mut s = Complex64::new(0.0, 0.0);
        let mut ds = Complex64::new(0.0, 0.0);
        let mut bm = Complex64::new(1.0, 0.0);
        let mut bm1 = Complex64::new(0.0, 0.0);
        let mut fact = 6.0;
        for m in 0..S_SERIES_TERMS {
            let coef = 2.0 * (m as f64 + 2.0) / fact;
            let psi = polygamma_checked(m as i32 + 1, a)?;
            s += psi * bm * coef;
            ds += psi * bm1 * (coef * m as f64);
            bm1 = bm;
            bm *= b;
            fact *= m as f64 + 4.0;
        }
        return Ok((s, ds));
    }
    let ab = a + b;
    let p0a = polygamma_checked(0, a)?;
    let p0ab = polygamma_checked(0, ab)?;
    let pm1 = polygamma_checked(-1, ab)?;
    let dm2 = polygamma_checked(-2, ab)? - polygamma_checked(-2, a)?;
    let b2 = b * b;
    let b3 = b2 * b;
    let s = -p0a / b + pm1 * 2.0 / b2 - dm2 * 2.0 / b3;
    let ds = p0a / b2 + p0ab * 2.0 / b2 - pm1 * 6.0 / b3 + dm2 * 6.0 / (b2 * b2);
    Ok((s, ds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_real;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sep(dt: Complex64, dx: f64, dy: f64, dz: f64, dzh: f64) -> Separation {
        Separation { dt, dx, dy, dz, dzh }
    }

    #[test]
    fn vacuum_coincidence_values() {
        let z = 0.7;
        let eps = 1e-7;
        let x = corr_vc(Axis::X, Separation::coincident(c(0.0, eps), z)).unwrap();
        let zz = corr_vc(Axis::Z, Separation::coincident(c(0.0, eps), z)).unwrap();
        let expect = 1.0 / (16.0 * PI * PI * z.powi(4));
        assert_relative_eq!(x.re, expect, max_relative = 1e-10);
        assert_relative_eq!(zz.re, expect, max_relative = 1e-10);
        let far = corr_vc(Axis::X, sep(c(0.3, 1e-3), 0.1, 0.2, 0.0, 1e4)).unwrap();
        assert!(far.norm() < 1e-15);
    }

    #[test]
    fn vacuum_pole_detected() {
        let r = corr_vc(Axis::X, sep(c(2.0, 0.0), 0.0, 0.0, 0.0, 2.0));
        assert!(matches!(r, Err(Error::Pole(_))));
    }

    #[test]
    fn thermal_coincidence_is_zeta4() {
        for beta in [0.5f64, 1.0, 3.0] {
            let expect = PI * PI / (45.0 * beta.powi(4));
            for axis in Axis::ALL {
                let v = corr_th(axis, sep(c(0.0, 0.0), 0.0, 0.0, 0.0, 5.0), beta, 1e-15).unwrap();
                assert_relative_eq!(v, expect, max_relative = 1e-10);
            }
        }
        let cold = corr_th(Axis::X, sep(c(0.4, 0.0), 0.1, 0.0, 0.2, 1.0), 1e6, 1e-10).unwrap();
        assert!(cold.abs() < 1e-20);
    }

    #[test]
    fn mixed_limits() {
        let cold = corr_mx(Axis::Z, sep(c(0.4, 0.0), 0.0, 0.0, 0.0, 2.0), 1e6, 1e-10).unwrap();
        assert!(cold.abs() < 1e-20);
        let far = corr_mx(Axis::X, sep(c(0.4, 0.0), 0.0, 0.0, 0.0, 1e5), 1.0, 1e-10).unwrap();
        assert!(far.abs() < 1e-14);
        let v = corr_mx(Axis::X, Separation::coincident(c(0.0, 0.0), 0.5), 1.0, 1e-12).unwrap();
        assert!(v.is_finite() && v != 0.0);
    }

    #[test]
    fn bad_sum_arguments() {
        let s = Separation::coincident(c(0.0, 0.0), 1.0);
        assert!(matches!(corr_th(Axis::X, s, 0.0, 1e-10), Err(Error::InvalidParameter(_))));
        assert!(matches!(corr_mx(Axis::X, s, 1.0, -1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn continued_sum_matches_real_axis_form() {
        let s = sep(c(0.8, 0.0), 0.1, 0.05, 0.0, 1.3);
        let direct = corr_mx(Axis::Z, s, 0.9, 1e-13).unwrap();
        let cont = field_correlator(Contribution::Mixed, Axis::Z, Axis::Z, s, 0.9, 1e-13).unwrap();
        assert_relative_eq!(cont.re, direct, max_relative = 1e-12);
        let eps = 1e-6;
        let off = field_correlator(Contribution::Mixed, Axis::Z, Axis::Z, sep(c(0.8, eps), 0.1, 0.05, 0.0, 1.3), 0.9, 1e-13).unwrap();
        assert!((off - cont).norm() < 1e-4 * cont.norm());
    }

    #[test]
    fn cross_components_vanish_at_coincidence() {
        for part in [Contribution::Thermal, Contribution::Vacuum, Contribution::Mixed] {
            let s = Separation::coincident(c(0.7, 1e-3), 0.5);
            let v = field_correlator(part, Axis::X, Axis::Z, s, 1.0, 1e-12).unwrap();
            assert_eq!(v.norm(), 0.0);
        }
    }

    #[test]
    fn int2_vacuum_examples() {
        assert_eq!(int2_vacuum(0.3, 2.0, 0.0).unwrap(), 0.0);
        let (cc, tau) = (1.5, 0.8);
        let lhs = int2_vacuum(cc, cc, tau).unwrap();
        let rhs = -(tau / (4.0 * cc.powi(3))) * (((cc - tau) / (cc + tau)).powi(2)).ln();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
        assert!(matches!(int2_vacuum(0.0, 2.0, 2.0), Err(Error::Pole(_))));
        // b=0, c=2, τ=1: the integrand is smooth, so plain quadrature applies
        let (q, _, ok) = integrate_real(|u| 2.0 * (1.0 - u) * (u * u) / (u * u - 4.0).powi(3), 0.0, 1.0, 1e-15, 1e-13, 10_000);
        assert!(ok);
        assert_relative_eq!(int2_vacuum(0.0, 2.0, 1.0).unwrap(), q, max_relative = 1e-12);
        assert_relative_eq!(int2_vacuum(0.0, 2.0, 1.0).unwrap(), -0.003_667_516_322_894_117, max_relative = 1e-12);
    }

    #[test]
    fn int2_thermal_examples() {
        assert_eq!(int2_thermal(0.0, 2.0, 0.0, 1.0).unwrap(), 0.0);
        // reference values from direct quadrature of the image sum
        assert_relative_eq!(int2_thermal(0.0, 2.0, 1.0, 1.0).unwrap(), 0.026_042_873_016_613_573, max_relative = 1e-8);
        assert_relative_eq!(int2_thermal(1.5, 2.0, 3.0, 0.7).unwrap(), 0.381_370_354_223_225_46, max_relative = 1e-8);
    }

    #[test]
    fn int2_thermal_zero_c_is_continuous() {
        let at0 = int2_thermal(0.4, 0.0, 1.3, 0.8).unwrap();
        let near = int2_thermal(0.4, 1e-4, 1.3, 0.8).unwrap();
        assert_relative_eq!(at0, near, max_relative = 1e-7);
    }

    #[test]
    fn s_func_small_b_limit() {
        let a = c(1.0, 0.0);
        let limit = s_func(a, c(1e-9, 0.0)).unwrap();
        assert_relative_eq!(limit.re, 2.0 / 3.0 * PI * PI / 6.0, max_relative = 1e-8);
        assert!(matches!(s_func(a, c(0.0, 0.0)), Err(Error::Pole(_))));
        // both branches agree across the switch
        let inside = s_func(a, c(0.0999, 0.0)).unwrap();
        let outside = s_func(a, c(0.1001, 0.0)).unwrap();
        assert!((inside - outside).norm() < 1e-3 * inside.norm());
    }

    #[test]
    fn s_func_reference() {
        // a = 1, b = i from the same definition evaluated in extended precision
        let v = s_func(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let w = s_func(c(1.0, 0.0), c(0.0, -1.0)).unwrap();
        assert!((v - w.conj()).norm() < 1e-14);
        let near = s_func(c(1.0, 0.0), c(0.0, 0.0999)).unwrap();
        let far = s_func(c(1.0, 0.0), c(0.0, 0.1001)).unwrap();
        assert!((near - far).norm() < 2e-3 * near.norm());
    }

    proptest! {
        #[test]
        fn y_from_x(dt in 0.0f64..3.0, eps in 1e-4f64..1e-2, dx in -0.5f64..0.5, dy in -0.5f64..0.5, dz in -0.5f64..0.5, z in 0.3f64..2.0, beta in 0.3f64..3.0) {
            let s = sep(c(dt, eps), dx, dy, dz, 2.0 * z);
            let t = s.swap_transverse();
            prop_assert_eq!(corr_vc(Axis::Y, s).unwrap(), corr_vc(Axis::X, t).unwrap());
            prop_assert_eq!(corr_th(Axis::Y, s, beta, 1e-10).unwrap(), corr_th(Axis::X, t, beta, 1e-10).unwrap());
            prop_assert_eq!(corr_mx(Axis::Y, s, beta, 1e-10).unwrap(), corr_mx(Axis::X, t, beta, 1e-10).unwrap());
        }

        #[test]
        fn thermal_isotropy_at_coincidence(dt in 0.0f64..4.0, beta in 0.3f64..3.0) {
            let s = sep(c(dt, 0.0), 0.0, 0.0, 0.0, 1.0);
            let x = corr_th(Axis::X, s, beta, 1e-13).unwrap();
            for axis in [Axis::Y, Axis::Z] {
                let v = corr_th(axis, s, beta, 1e-13).unwrap();
                prop_assert!((v - x).abs() <= 1e-10 * x.abs());
            }
        }

        #[test]
        fn s_func_conjugation(ar in 0.5f64..3.0, ai in -5.0f64..5.0, bi in -4.0f64..4.0, br in -0.2f64..0.2) {
            prop_assume!(bi.abs() + br.abs() > 1e-3);
            let a = c(ar, ai);
            let b = c(br, bi);
            let v = s_func(a, b).unwrap();
            let w = s_func(a.conj(), b.conj()).unwrap();
            prop_assert!((v - w.conj()).norm() <= 1e-12 * v.norm().max(1.0));
        }

        #[test]
        fn s_func_derivative_by_difference(ai in -5.0f64..5.0, bi in 0.05f64..4.0) {
            let a = c(1.0, ai);
            let b = c(0.0, bi);
            let h = 1e-3;
            let (_, ds) = s_func_with_derivative(a, b).unwrap();
            let cd = |h: f64| (s_func(a, b + h).unwrap() - s_func(a, b - h).unwrap()) / (2.0 * h);
            let fd = crate::quadrature::richardson(cd(h), cd(h / 2.0), 4.0);
            prop_assert!((fd - ds).norm() <= 1e-5 * ds.norm().max(1e-3));
        }
    }
}
