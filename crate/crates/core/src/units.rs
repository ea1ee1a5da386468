//! SI quantities, conversion to natural units, and the order-of-magnitude
//! estimates for a molecule in a thermal bath.
//!
//! Natural units set ħ = c = k_B = ε₀ = 1 and leave one length free; a
//! [`NaturalUnits`] value fixes it.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dispersions::{f_beta, g_beta};
use crate::error::{Error, Result};

/// Pinned constants, SI.
pub mod constants {
    /// J s
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// m/s
    pub const C: f64 = 2.997_924_58e8;
    /// J/K
    pub const K_B: f64 = 1.380_649e-23;
    /// F/m
    pub const EPSILON_0: f64 = 8.854_187_813e-12;
    /// C m
    pub const DEBYE: f64 = 3.335_640_952e-30;
    /// kg
    pub const GRAM: f64 = 1e-3;
    /// m
    pub const ANGSTROM: f64 = 1e-10;
    /// m
    pub const NANOMETRE: f64 = 1e-9;
}

use constants::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "m/s")]
    MetrePerSecond,
    #[serde(rename = "rad/s")]
    RadianPerSecond,
    #[serde(rename = "s")]
    Second,
    #[serde(rename = "J/s")]
    JoulePerSecond,
    #[serde(rename = "K")]
    Kelvin,
    #[serde(rename = "m")]
    Metre,
    #[serde(rename = "D")]
    Debye,
    #[serde(rename = "g")]
    Gram,
    #[serde(rename = "1")]
    Dimensionless,
}

impl Unit {
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::MetrePerSecond => "m/s",
            Unit::RadianPerSecond => "rad/s",
            Unit::Second => "s",
            Unit::JoulePerSecond => "J/s",
            Unit::Kelvin => "K",
            Unit::Metre => "m",
            Unit::Debye => "D",
            Unit::Gram => "g",
            Unit::Dimensionless => "1",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SIQuantity {
    pub value: f64,
    pub unit: Unit,
}

impl SIQuantity {
    pub fn new(value: f64, unit: Unit) -> Self {
        Self { value, unit }
    }

    /// The value, provided the unit is `expected`.
    pub fn get(&self, expected: Unit) -> Result<f64> {
        if self.unit != expected {
            return Err(Error::UnitMismatch { expected: expected.to_string(), got: self.unit.to_string() });
        }
        Ok(self.value)
    }
}

impl fmt::Display for SIQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} {}", self.value, self.unit)
    }
}

/// Natural units with `length` metres as the unit of length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalUnits {
    pub length: f64,
}

impl Default for NaturalUnits {
    fn default() -> Self {
        Self { length: 1.0 }
    }
}

impl NaturalUnits {
    pub fn new(length: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidParameter(format!("length unit {length} must be positive")));
        }
        Ok(Self { length })
    }

    /// Multiply an SI value (in the SI base unit behind `unit`) by this to
    /// get the natural value.
    fn factor(&self, unit: Unit) -> f64 {
        let l = self.length;
        match unit {
            Unit::MetrePerSecond => 1.0 / C,
            Unit::RadianPerSecond => l / C,
            Unit::Second => C / l,
            Unit::JoulePerSecond => l * l / (HBAR * C * C),
            Unit::Kelvin => K_B * l / (HBAR * C),
            Unit::Metre => 1.0 / l,
            Unit::Debye => DEBYE / ((EPSILON_0 * HBAR * C).sqrt() * l),
            Unit::Gram => GRAM * C * l / HBAR,
            Unit::Dimensionless => 1.0,
        }
    }

    pub fn to_natural(&self, q: SIQuantity) -> f64 {
        q.value * self.factor(q.unit)
    }

    pub fn from_natural(&self, value: f64, unit: Unit) -> SIQuantity {
        SIQuantity::new(value / self.factor(unit), unit)
    }

    /// Inverse temperature `β = ħc/(k_B T)` as a natural length.
    pub fn beta(&self, t: SIQuantity) -> Result<f64> {
        let t = positive(t, Unit::Kelvin, "T")?;
        Ok(1.0 / self.to_natural(SIQuantity::new(t, Unit::Kelvin)))
    }
}

fn positive(q: SIQuantity, unit: Unit, name: &str) -> Result<f64> {
    let v = q.get(unit)?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} = {v} {unit} must be positive")));
    }
    Ok(v)
}

fn non_negative(q: SIQuantity, unit: Unit, name: &str) -> Result<f64> {
    let v = q.get(unit)?;
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} = {v} {unit} must be non-negative")));
    }
    Ok(v)
}

/// `ħc/k_B` in m K: `z/β = z T / ZT_LENGTH`.
pub const ZT_LENGTH: f64 = HBAR * C / K_B;

/// γ = β/a = ħc/(a k_B T).
pub fn gamma_parameter(a: SIQuantity, t: SIQuantity) -> Result<f64> {
    let a = positive(a, Unit::Metre, "a")?;
    let t = positive(t, Unit::Kelvin, "T")?;
    Ok(ZT_LENGTH / (a * t))
}

/// z/β = z k_B T/(ħc).
pub fn z_over_beta(z: SIQuantity, t: SIQuantity) -> Result<f64> {
    let z = positive(z, Unit::Metre, "z")?;
    let t = positive(t, Unit::Kelvin, "T")?;
    Ok(z * t / ZT_LENGTH)
}

/// Asymptotic thermal velocity spread `√(2π²p²/(45m²β⁴))`.
pub fn delta_v(p: SIQuantity, m: SIQuantity, t: SIQuantity) -> Result<SIQuantity> {
    let n = NaturalUnits::default();
    let p = n.to_natural(SIQuantity::new(non_negative(p, Unit::Debye, "p")?, Unit::Debye));
    let m = n.to_natural(SIQuantity::new(positive(m, Unit::Gram, "m")?, Unit::Gram));
    let beta = n.beta(t)?;
    let v2 = 2.0 * PI * PI * p * p / (45.0 * m * m * beta.powi(4));
    Ok(n.from_natural(v2.sqrt(), Unit::MetrePerSecond))
}

/// Asymptotic thermal angular-velocity spread `√(2p²/(9I²β²))`, `I = ma²/4`.
pub fn delta_omega(p: SIQuantity, m: SIQuantity, a: SIQuantity, t: SIQuantity) -> Result<SIQuantity> {
    let n = NaturalUnits::default();
    let p = n.to_natural(SIQuantity::new(non_negative(p, Unit::Debye, "p")?, Unit::Debye));
    let m = n.to_natural(SIQuantity::new(positive(m, Unit::Gram, "m")?, Unit::Gram));
    let a = n.to_natural(SIQuantity::new(positive(a, Unit::Metre, "a")?, Unit::Metre));
    let beta = n.beta(t)?;
    let inertia = m * a * a / 4.0;
    let w2 = 2.0 * p * p / (9.0 * inertia * inertia * beta * beta);
    Ok(n.from_natural(w2.sqrt(), Unit::RadianPerSecond))
}

/// Level both thermal shape functions must reach for the transient to count
/// as over.
pub const TRANSIENT_LEVEL: f64 = 0.95;

/// Smallest `x = τ/β` with `f_β(x) ≥ 0.95` and `g_β(x) ≥ 0.95`.
pub fn transient_multiple() -> f64 {
    let low = |x: f64| f_beta(x).min(g_beta(x)) - TRANSIENT_LEVEL;
    let step = 1e-2;
    let mut hi = step;
    while low(hi) < 0.0 {
        hi += step;
    }
    let mut lo = hi - step;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if low(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `τ_e = c_e ħ/(k_B T)`.
pub fn transient_time(t: SIQuantity) -> Result<SIQuantity> {
    let t = positive(t, Unit::Kelvin, "T")?;
    Ok(SIQuantity::new(transient_multiple() * HBAR / (K_B * t), Unit::Second))
}

/// Larmor power of a dipole rotating at `omega`: `p²ω⁴/(6ε₀c³)`.
pub fn radiated_power(p: SIQuantity, omega: SIQuantity) -> Result<SIQuantity> {
    let p = non_negative(p, Unit::Debye, "p")? * DEBYE;
    let w = non_negative(omega, Unit::RadianPerSecond, "omega")?;
    Ok(SIQuantity::new(p * p * w.powi(4) / (6.0 * EPSILON_0 * C.powi(3)), Unit::JoulePerSecond))
}

/// Rotation angle beyond which a fixed dipole direction is no longer a
/// fair assumption. An engineering choice.
pub const VALIDITY_LIMIT: f64 = 0.1;

/// Rotation angle `τΔω` in radians.
pub fn validity_bound(tau: SIQuantity, delta_omega: SIQuantity) -> Result<f64> {
    let t = non_negative(tau, Unit::Second, "tau")?;
    let w = non_negative(delta_omega, Unit::RadianPerSecond, "delta_omega")?;
    Ok(t * w)
}

/// A KCl-like molecule: 10.27 D, 1.2e-22 g, 1 Å.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Molecule {
    pub p: SIQuantity,
    pub m: SIQuantity,
    pub a: SIQuantity,
}

impl Default for Molecule {
    fn default() -> Self {
        Self {
            p: SIQuantity::new(10.27, Unit::Debye),
            m: SIQuantity::new(1.2e-22, Unit::Gram),
            a: SIQuantity::new(ANGSTROM, Unit::Metre),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimates {
    pub temperature: SIQuantity,
    pub gamma: f64,
    pub delta_v: SIQuantity,
    pub delta_omega: SIQuantity,
    pub transient_time: SIQuantity,
    /// `τ_e Δω` in radians.
    pub rotation_angle: f64,
    pub rotation_warning: bool,
    /// Power radiated when rotating at `Δω`.
    pub radiated_power: SIQuantity,
}

pub fn estimates(mol: &Molecule, t: SIQuantity) -> Result<Estimates> {
    let dw = delta_omega(mol.p, mol.m, mol.a, t)?;
    let te = transient_time(t)?;
    let angle = validity_bound(te, dw)?;
    Ok(Estimates {
        temperature: t,
        gamma: gamma_parameter(mol.a, t)?,
        delta_v: delta_v(mol.p, mol.m, t)?,
        delta_omega: dw,
        transient_time: te,
        rotation_angle: angle,
        rotation_warning: angle > VALIDITY_LIMIT,
        radiated_power: radiated_power(mol.p, dw)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn q(v: f64, u: Unit) -> SIQuantity {
        SIQuantity::new(v, u)
    }

    fn kelvin(t: f64) -> SIQuantity {
        q(t, Unit::Kelvin)
    }

    #[test]
    fn gamma_reference_values() {
        let g = gamma_parameter(q(NANOMETRE, Unit::Metre), kelvin(1.0)).unwrap();
        assert_relative_eq!(g, 2.29e6, max_relative = 1e-2);
        let warm = gamma_parameter(q(NANOMETRE, Unit::Metre), kelvin(300.0)).unwrap();
        assert!((7.0e3..8.0e3).contains(&warm));
        let wide = gamma_parameter(q(2.0 * NANOMETRE, Unit::Metre), kelvin(1.0)).unwrap();
        assert_relative_eq!(wide, g / 2.0, max_relative = 1e-14);
        assert!(matches!(gamma_parameter(kelvin(1.0), kelvin(1.0)), Err(Error::UnitMismatch { .. })));
        assert!(gamma_parameter(q(0.0, Unit::Metre), kelvin(1.0)).is_err());
    }

    #[test]
    fn zt_constant() {
        let r = z_over_beta(q(1.0, Unit::Metre), kelvin(1.0)).unwrap();
        assert_relative_eq!(r, 4.37e2, max_relative = 1e-2);
    }

    #[test]
    fn velocity_spread() {
        let mol = Molecule::default();
        let v = delta_v(mol.p, mol.m, kelvin(1.0)).unwrap();
        assert_eq!(v.unit, Unit::MetrePerSecond);
        assert_relative_eq!(v.value, 7.2e-15, max_relative = 5e-2);
        let hot = delta_v(mol.p, mol.m, kelvin(300.0)).unwrap();
        assert_relative_eq!(hot.value, 6.5e-10, max_relative = 2e-2);
        assert_eq!(delta_v(q(0.0, Unit::Debye), mol.m, kelvin(1.0)).unwrap().value, 0.0);
    }

    #[test]
    fn angular_spread() {
        let mol = Molecule::default();
        let w = delta_omega(mol.p, mol.m, mol.a, kelvin(1.0)).unwrap();
        assert_relative_eq!(w.value, 4.7e3, max_relative = 5e-2);
        let hot = delta_omega(mol.p, mol.m, mol.a, kelvin(300.0)).unwrap();
        assert_relative_eq!(hot.value, 1.4e6, max_relative = 2e-2);
        assert_eq!(delta_omega(q(0.0, Unit::Debye), mol.m, mol.a, kelvin(1.0)).unwrap().value, 0.0);
    }

    #[test]
    fn transient() {
        let x = transient_multiple();
        assert!(f_beta(x) >= TRANSIENT_LEVEL && g_beta(x) >= TRANSIENT_LEVEL);
        assert!(f_beta(x - 1e-6).min(g_beta(x - 1e-6)) < TRANSIENT_LEVEL);
        let t1 = transient_time(kelvin(1.0)).unwrap().value;
        assert!((0.3e-11..=3e-11).contains(&t1));
        let t300 = transient_time(kelvin(300.0)).unwrap().value;
        assert_relative_eq!(t300 * 300.0, t1, max_relative = 1e-14);
    }

    #[test]
    fn power_scaling() {
        let p = Molecule::default().p;
        assert_eq!(radiated_power(p, q(0.0, Unit::RadianPerSecond)).unwrap().value, 0.0);
        let one = radiated_power(p, q(1e6, Unit::RadianPerSecond)).unwrap().value;
        let two = radiated_power(p, q(2e6, Unit::RadianPerSecond)).unwrap().value;
        assert_relative_eq!(two / one, 16.0, max_relative = 1e-14);
    }

    #[test]
    fn estimate_table() {
        let e = estimates(&Molecule::default(), kelvin(1.0)).unwrap();
        assert!(e.rotation_angle > 1e-9 && e.rotation_angle < 1e-7);
        assert!(!e.rotation_warning);
        assert_relative_eq!(validity_bound(q(2.0, Unit::Second), q(0.1, Unit::RadianPerSecond)).unwrap(), 0.2);
    }

    #[test]
    fn natural_round_trip_for_every_unit() {
        let units = [
            Unit::MetrePerSecond,
            Unit::RadianPerSecond,
            Unit::Second,
            Unit::JoulePerSecond,
            Unit::Kelvin,
            Unit::Metre,
            Unit::Debye,
            Unit::Gram,
            Unit::Dimensionless,
        ];
        let n = NaturalUnits::new(1e-9).unwrap();
        for u in units {
            let x = q(3.7e-5, u);
            let back = n.from_natural(n.to_natural(x), u);
            assert_eq!(back.unit, u);
            assert_relative_eq!(back.value, x.value, max_relative = 1e-12);
        }
        assert_relative_eq!(n.to_natural(q(C, Unit::MetrePerSecond)), 1.0);
    }

    proptest! {
        #[test]
        fn round_trip_identity(v in -1e30f64..1e30, l in 1e-15f64..1e3, k in 0usize..9) {
            let units = [
                Unit::MetrePerSecond, Unit::RadianPerSecond, Unit::Second, Unit::JoulePerSecond,
                Unit::Kelvin, Unit::Metre, Unit::Debye, Unit::Gram, Unit::Dimensionless,
            ];
            let n = NaturalUnits::new(l).unwrap();
            let back = n.from_natural(n.to_natural(q(v, units[k])), units[k]);
            prop_assert!((back.value - v).abs() <= 1e-12 * v.abs());
        }
    }
}
