//! Closed-form velocity and angular-velocity dispersions.
//!
//! All quantities are in natural units (ħ = c = k_B = ε₀ = 1). The dipole
//! points along `cosθ x̂ + sinθ ẑ`; the wall is the plane `z = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{csch_sq, polygamma_checked, two_plus_cosh2_csch4, ComplexValue};

/// Half-width of the excluded window around `η = 1`.
pub const SINGULAR_WINDOW: f64 = 1e-9;

const SERIES_SWITCH: f64 = 0.15;

const F_SERIES: [f64; 10] = [
    9.399_623_239_132_722_494_1,
    -32.469_697_011_334_145_745,
    77.688_015_642_448_843_396,
    -152.487_352_336_873_623_85,
    264.262_567_833_743_974_53,
    -420.398_397_868_513_259_78,
    628.280_512_308_491_381_74,
    -895.297_166_509_711_997_36,
    1_228.838_368_902_771_888_1,
    -1_636.295_009_110_712_618_5,
];

const G_SERIES: [f64; 10] = [
    1.973_920_880_217_871_723_8,
    -3.092_352_096_317_537_690_0,
    4.272_840_860_334_686_386_8,
    -5.476_785_579_261_514_578_4,
    6.688_843_749_931_028_805_8,
    -7.903_536_371_318_468_804_2,
    9.119_045_885_305_480_677_4,
    -10.334_800_182_330_988_497,
    11.550_625_954_074_622_035,
    -12.766_472_183_105_543_439,
];

/// A length scale that may be sent to infinity (no wall, or zero temperature).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scale {
    Finite(f64),
    Infinite,
}

impl Scale {
    pub fn finite(self) -> Option<f64> {
        match self {
            Scale::Finite(v) => Some(v),
            Scale::Infinite => None,
        }
    }

    fn validate(self, name: &str) -> Result<()> {
        match self {
            Scale::Finite(v) if !(v > 0.0) || !v.is_finite() => {
                Err(Error::InvalidParameter(format!("{name} = {v} must be positive and finite")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contributions {
    pub thermal: bool,
    pub vacuum: bool,
    pub mixed: bool,
}

impl Contributions {
    pub const ALL: Contributions = Contributions { thermal: true, vacuum: true, mixed: true };
    pub const THERMAL: Contributions = Contributions { thermal: true, vacuum: false, mixed: false };
    pub const VACUUM: Contributions = Contributions { thermal: false, vacuum: true, mixed: false };
    pub const MIXED: Contributions = Contributions { thermal: false, vacuum: false, mixed: true };

    /// Comma list such as `th,vc,mx`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.thermal {
            parts.push("th");
        }
        if self.vacuum {
            parts.push("vc");
        }
        if self.mixed {
            parts.push("mx");
        }
        parts.join(",")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleParams {
    pub p: f64,
    pub m: f64,
    pub a: f64,
    pub theta: f64,
}

impl DipoleParams {
    pub fn new(p: f64, m: f64, a: f64, theta: f64) -> Result<Self> {
        let dp = Self { p, m, a, theta };
        dp.validate()?;
        Ok(dp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 0.0) || !self.p.is_finite() {
            return Err(Error::InvalidParameter(format!("p = {} must be non-negative", self.p)));
        }
        if !(self.m > 0.0) || !self.m.is_finite() {
            return Err(Error::InvalidParameter(format!("m = {} must be positive", self.m)));
        }
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::InvalidParameter(format!("a = {} must be positive", self.a)));
        }
        if !(0.0..=PI / 2.0).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!("theta = {} outside [0, pi/2]", self.theta)));
        }
        Ok(())
    }

    pub fn moment_of_inertia(&self) -> f64 {
        self.m * self.a * self.a / 4.0
    }

    /// γ = β/a.
    pub fn gamma(&self, beta: f64) -> f64 {
        beta / self.a
    }

    fn cos2_sin2(&self) -> (f64, f64) {
        let c = self.theta.cos();
        let s = self.theta.sin();
        (c * c, s * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub beta: Scale,
    pub z: Scale,
    pub contributions: Contributions,
}

impl Environment {
    pub fn new(beta: Scale, z: Scale, contributions: Contributions) -> Result<Self> {
        beta.validate("beta")?;
        z.validate("z")?;
        Ok(Self { beta, z, contributions })
    }

    /// All three contributions at finite β and z.
    pub fn full(beta: f64, z: f64) -> Result<Self> {
        Self::new(Scale::Finite(beta), Scale::Finite(z), Contributions::ALL)
    }

    /// The thermal part is live only at finite β, the vacuum part only with
    /// a wall, and the mixed part needs both.
    pub fn active(&self) -> Contributions {
        let hot = self.beta.finite().is_some();
        let wall = self.z.finite().is_some();
        Contributions {
            thermal: self.contributions.thermal && hot,
            vacuum: self.contributions.vacuum && wall,
            mixed: self.contributions.mixed && hot && wall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Parts {
    pub thermal: f64,
    pub vacuum: f64,
    pub mixed: f64,
    pub total: f64,
}

impl Parts {
    fn new(thermal: f64, vacuum: f64, mixed: f64) -> Self {
        Self { thermal, vacuum, mixed, total: thermal + vacuum + mixed }
    }
}

/// Lab-frame `v_x, v_y, v_z` and body-frame `ω_x', ω_y'` dispersions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DispersionBreakdown {
    pub vx: Parts,
    pub vy: Parts,
    pub vz: Parts,
    pub wx: Parts,
    pub wy: Parts,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Velocity {
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Angular {
    pub wx: f64,
    pub wy: f64,
}

/// The five translational shape functions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TranslationalShapes {
    pub x_par: f64,
    pub x_perp: f64,
    pub y_par: f64,
    pub z_par: f64,
    pub z_perp: f64,
}

impl TranslationalShapes {
    pub fn as_array(&self) -> [f64; 5] {
        [self.x_par, self.x_perp, self.y_par, self.z_par, self.z_perp]
    }

    fn assemble(&self, pre: f64, c2: f64, s2: f64) -> Velocity {
        Velocity {
            vx: pre * (self.x_par * c2 + self.x_perp * s2),
            vy: pre * (self.y_par * c2 + self.x_perp * s2),
            vz: pre * (self.z_par * c2 + self.z_perp * s2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AngularShapes {
    pub par: f64,
    pub perp: f64,
}

impl AngularShapes {
    fn assemble(&self, pre: f64, c2: f64, s2: f64) -> Angular {
        Angular { wx: pre * (self.par * c2 + self.perp * s2), wy: pre * self.perp }
    }
}

fn series(coef: &[f64], x2: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, c| acc * x2 + c) * x2
}

/// f_β(x) = 1 + 45/(π⁴x⁴) - 15 (2 + cosh 2πx) csch⁴(πx), with x = τ/β.
pub fn f_beta(x: f64) -> f64 {
    if x < SERIES_SWITCH {
        return series(&F_SERIES, x * x);
    }
    let y = PI * x;
    1.0 + 45.0 / (y * y * y * y) - 15.0 * two_plus_cosh2_csch4(y)
}

/// g_β(x) = 1 - 3/(π²x²) + 3 csch²(πx), with x = τ/β.
pub fn g_beta(x: f64) -> f64 {
    if x < SERIES_SWITCH {
        return series(&G_SERIES, x * x);
    }
    let y = PI * x;
    1.0 - 3.0 / (y * y) + 3.0 * csch_sq(y)
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("eta = {eta} must be non-negative")));
    }
    if (eta - 1.0).abs() < SINGULAR_WINDOW {
        return Err(Error::Singular { eta, window: SINGULAR_WINDOW });
    }
    Ok(())
}

/// ln|(η+1)/(η-1)|
fn light_cone_log(eta: f64) -> f64 {
    if eta > 1.0 {
        (2.0 / (eta - 1.0)).ln_1p()
    } else {
        2.0 * eta.atanh()
    }
}

pub fn vacuum_translational_shapes(eta: f64) -> Result<TranslationalShapes> {
    check_eta(eta)?;
    let e2 = eta * eta;
    let l = eta * light_cone_log(eta);
    let d = e2 - 1.0;
    Ok(TranslationalShapes {
        x_par: (e2 * (7.0 - 5.0 * e2) / (d * d) + 4.5 * l) / 4.0,
        x_perp: -e2 / d + 1.5 * l,
        y_par: (e2 * (5.0 - 3.0 * e2) / (d * d) + 1.5 * l) / 4.0,
        z_par: -e2 * (7.0 - 8.0 * e2 + 3.0 * e2 * e2) / (d * d * d) + 1.5 * l,
        z_perp: e2 * (4.0 - 3.0 * e2) / (d * d) + 3.0 * l,
    })
}

pub fn vacuum_angular_shapes(eta: f64) -> Result<AngularShapes> {
    check_eta(eta)?;
    let l = eta * light_cone_log(eta);
    Ok(AngularShapes { par: l, perp: -eta * eta / (eta * eta - 1.0) + 0.5 * l })
}

/// `f` and its first `n` derivatives in the wall distance.
pub fn mixed_f(z: f64, tau: f64, beta: f64, n: usize) -> Result<Vec<ComplexValue>> {
    if n > 4 {
        return Err(Error::InvalidParameter(format!("derivative order {n} exceeds 4")));
    }
    if !(z > 0.0) || !(beta > 0.0) || !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!("mixed_f(z={z}, tau={tau}, beta={beta})")));
    }
    let u0 = Complex64::new(1.0, 2.0 * z / beta);
    let um = Complex64::new(1.0, (2.0 * z - tau) / beta);
    let up = Complex64::new(1.0, (2.0 * z + tau) / beta);
    let step = Complex64::new(0.0, 2.0 / beta);
    let mut factor = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let j = k as i32 - 2;
        let v = polygamma_checked(j, u0)? * 2.0 - polygamma_checked(j, um)? - polygamma_checked(j, up)?;
        out.push(v * factor);
        factor *= step;
    }
    Ok(out)
}

fn ladder(ladder: &[ComplexValue], z: f64, coef: &[f64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zk = 1.0;
    for (k, c) in coef.iter().enumerate() {
        acc += ladder[k] * (c * zk);
        zk *= z;
    }
    acc.im
}

pub fn mixed_translational_shapes(z: f64, tau: f64, beta: f64) -> Result<TranslationalShapes> {
    let f = mixed_f(z, tau, beta, 4)?;
    let r = beta / z;
    Ok(TranslationalShapes {
        x_par: r / 4.0 * ladder(&f, z, &[9.0, -9.0, 4.0, -1.0]),
        x_perp: r * ladder(&f, z, &[3.0, -3.0, 1.0]),
        y_par: r / 4.0 * ladder(&f, z, &[3.0, -3.0, 2.0, -1.0]),
        z_par: r * ladder(&f, z, &[3.0, -3.0, 1.75, -0.75, 0.25]),
        z_perp: 2.0 * r * ladder(&f, z, &[3.0, -3.0, 1.25, -0.25]),
    })
}

pub fn mixed_angular_shapes(z: f64, tau: f64, beta: f64) -> Result<AngularShapes> {
    let f = mixed_f(z, tau, beta, 2)?;
    let r = beta / z;
    Ok(AngularShapes { par: 2.0 * r * ladder(&f, z, &[1.0, -1.0]), perp: r * ladder(&f, z, &[1.0, -1.0, 1.0]) })
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("tau = {tau} must be non-negative and finite")));
    }
    Ok(())
}

/// Thermal dispersions in the lab frame; only the thermal parts are set.
pub fn thermal_dispersions(dp: &DipoleParams, beta: f64, tau: f64) -> Result<DispersionBreakdown> {
    dp.validate()?;
    check_tau(tau)?;
    Scale::Finite(beta).validate("beta")?;
    let (v, w) = thermal_parts(dp, beta, tau);
    let zero = Parts::default();
    let only = |x: f64| Parts { thermal: x, total: x, ..zero };
    Ok(DispersionBreakdown { vx: only(v.vx), vy: only(v.vy), vz: only(v.vz), wx: only(w.wx), wy: only(w.wy) })
}

fn thermal_parts(dp: &DipoleParams, beta: f64, tau: f64) -> (Velocity, Angular) {
    let x = tau / beta;
    let b4 = beta.powi(4);
    let v_total = 2.0 * PI * PI * dp.p * dp.p * f_beta(x) / (45.0 * dp.m * dp.m * b4);
    let inertia = dp.moment_of_inertia();
    let w_total = 2.0 * dp.p * dp.p * g_beta(x) / (9.0 * inertia * inertia * beta * beta);
    // body frame diag(2, 2, 1)·v0 rotated about ŷ
    let v0 = v_total / 5.0;
    let (c2, s2) = dp.cos2_sin2();
    let v = Velocity { vx: v0 * (c2 + 2.0 * s2), vy: 2.0 * v0, vz: v0 * (2.0 * c2 + s2) };
    (v, Angular { wx: w_total / 2.0, wy: w_total / 2.0 })
}

pub fn vacuum_velocity_dispersions(dp: &DipoleParams, z: f64, tau: f64) -> Result<Velocity> {
    dp.validate()?;
    check_tau(tau)?;
    Scale::Finite(z).validate("z")?;
    let shapes = vacuum_translational_shapes(tau / (2.0 * z))?;
    let pre = dp.p * dp.p / (8.0 * PI * PI * dp.m * dp.m * z.powi(4));
    let (c2, s2) = dp.cos2_sin2();
    Ok(shapes.assemble(pre, c2, s2))
}

pub fn vacuum_angular_dispersions(dp: &DipoleParams, z: f64, tau: f64) -> Result<Angular> {
    dp.validate()?;
    check_tau(tau)?;
    Scale::Finite(z).validate("z")?;
    let shapes = vacuum_angular_shapes(tau / (2.0 * z))?;
    let inertia = dp.moment_of_inertia();
    let pre = dp.p * dp.p / (8.0 * inertia * inertia * PI * PI * z * z);
    let (c2, s2) = dp.cos2_sin2();
    Ok(shapes.assemble(pre, c2, s2))
}

pub fn mixed_velocity_dispersions(dp: &DipoleParams, z: f64, tau: f64, beta: f64) -> Result<Velocity> {
    dp.validate()?;
    check_tau(tau)?;
    Scale::Finite(z).validate("z")?;
    Scale::Finite(beta).validate("beta")?;
    let shapes = mixed_translational_shapes(z, tau, beta)?;
    let pre = dp.p * dp.p / (16.0 * PI * PI * dp.m * dp.m * z.powi(4));
    let (c2, s2) = dp.cos2_sin2();
    Ok(shapes.assemble(pre, c2, s2))
}

pub fn mixed_angular_dispersions(dp: &DipoleParams, z: f64, tau: f64, beta: f64) -> Result<Angular> {
    dp.validate()?;
    check_tau(tau)?;
    Scale::Finite(z).validate("z")?;
    Scale::Finite(beta).validate("beta")?;
    let shapes = mixed_angular_shapes(z, tau, beta)?;
    let inertia = dp.moment_of_inertia();
    let pre = dp.p * dp.p / (16.0 * inertia * inertia * PI * PI * z * z);
    let (c2, s2) = dp.cos2_sin2();
    Ok(shapes.assemble(pre, c2, s2))
}

/// Sum of the active contributions; inactive ones are exact zeros.
pub fn total_dispersions(dp: &DipoleParams, env: &Environment, tau: f64) -> Result<DispersionBreakdown> {
    dp.validate()?;
    check_tau(tau)?;
    let env = Environment::new(env.beta, env.z, env.contributions)?;
    let active = env.active();
    let (mut vt, mut wt) = (Velocity::default(), Angular::default());
    let (mut vv, mut wv) = (Velocity::default(), Angular::default());
    let (mut vm, mut wm) = (Velocity::default(), Angular::default());
    if active.thermal {
        let beta = env.beta.finite().unwrap_or(f64::INFINITY);
        (vt, wt) = thermal_parts(dp, beta, tau);
    }
    if active.vacuum {
        let z = env.z.finite().unwrap_or(f64::INFINITY);
        vv = vacuum_velocity_dispersions(dp, z, tau)?;
        wv = vacuum_angular_dispersions(dp, z, tau)?;
    }
    if active.mixed {
        let z = env.z.finite().unwrap_or(f64::INFINITY);
        let beta = env.beta.finite().unwrap_or(f64::INFINITY);
        vm = mixed_velocity_dispersions(dp, z, tau, beta)?;
        wm = mixed_angular_dispersions(dp, z, tau, beta)?;
    }
    Ok(DispersionBreakdown {
        vx: Parts::new(vt.vx, vv.vx, vm.vx),
        vy: Parts::new(vt.vy, vv.vy, vm.vy),
        vz: Parts::new(vt.vz, vv.vz, vm.vz),
        wx: Parts::new(wt.wx, wv.wx, wm.wx),
        wy: Parts::new(wt.wy, wv.wy, wm.wy),
    })
}
