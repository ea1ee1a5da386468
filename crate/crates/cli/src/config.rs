//! Flag parsing and conversion of physical inputs to natural units.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dipole_core::dispersions::{Contributions, DipoleParams, Scale};
use dipole_core::figures::Grid;
use dipole_core::oracle::{QuadratureRule, QuadratureSpec};
use dipole_core::units::{constants, Molecule, NaturalUnits, SIQuantity, Unit};
use dipole_core::{Error, Result};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "dipole", version, about = "Velocity and angular-velocity dispersions of a dipole in a photon gas near a conducting wall")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Curve data for one of figures 2 to 9.
    #[command(allow_negative_numbers = true)]
    Figure {
        #[arg(value_parser = clap::value_parser!(u32).range(2..=9))]
        id: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Dispersions split by contribution at each τ.
    #[command(allow_negative_numbers = true)]
    Dispersion {
        #[command(flatten)]
        common: Common,
    },
    /// Kinetic energy split by contribution at each τ, or its long-time value.
    #[command(allow_negative_numbers = true)]
    Energy {
        /// Report the τ → ∞ residual instead of a τ sweep.
        #[arg(long)]
        residual: bool,
        #[command(flatten)]
        common: Common,
    },
    /// SI order-of-magnitude estimates for a molecule.
    #[command(allow_negative_numbers = true)]
    Estimate {
        #[command(flatten)]
        common: Common,
    },
    /// Check the closed forms against the quadrature oracle.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Residual energy with and without the wall against β/z.
    #[command(allow_negative_numbers = true)]
    Cooling {
        /// Log-spaced β/z grid `lo:hi:n`.
        #[arg(long, value_parser = parse_grid)]
        ratio_range: Option<Grid>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Figure { common, .. }
            | Command::Dispersion { common }
            | Command::Energy { common, .. }
            | Command::Estimate { common }
            | Command::Verify { common }
            | Command::Cooling { common, .. } => common,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Adaptive,
    FixedTensor,
}

/// Flags shared by every subcommand.
///
/// With `--T` all inputs are SI: debye, grams, metres, seconds, kelvin.
/// Otherwise they are natural (ħ = c = k_B = ε₀ = 1). `inf` is accepted for
/// `--z` (no wall), `--beta` (zero temperature), and `--T 0` means zero
/// temperature.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Dipole moment (D with --T).
    #[arg(long = "p")]
    pub p: Option<f64>,
    /// Mass (g with --T).
    #[arg(long = "m")]
    pub m: Option<f64>,
    /// Dipole length (m with --T).
    #[arg(long = "a")]
    pub a: Option<f64>,
    /// Angle between the dipole axis and the wall normal, radians.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Distance from the wall (m with --T); omitted means no wall.
    #[arg(long = "z")]
    pub z: Option<f64>,
    /// Temperature in kelvin; switches every input to SI.
    #[arg(long = "T", conflicts_with = "beta")]
    pub temperature: Option<f64>,
    /// Inverse temperature in natural units.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Single measurement time (s with --T).
    #[arg(long, conflicts_with = "tau_range")]
    pub tau: Option<f64>,
    /// Evenly spaced times `lo:hi:n`; for figures, the abscissa grid.
    #[arg(long, value_parser = parse_grid)]
    pub tau_range: Option<Grid>,
    /// Contributions to include, e.g. `th,vc`.
    #[arg(long, value_parser = parse_contributions)]
    pub contrib: Option<Contributions>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pass/fail tolerance for verify.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Quadrature rule for verify.
    #[arg(long, value_enum)]
    pub rule: Option<Rule>,
    /// Relative tolerance of the quadrature for verify.
    #[arg(long)]
    pub quad_rel_tol: Option<f64>,
    /// Evaluation budget per integral for verify.
    #[arg(long)]
    pub max_evals: Option<usize>,
    /// No effect: nothing here is random.
    #[arg(long)]
    pub seedless: bool,
}

pub fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("expected lo:hi:n, got {s:?}"));
    };
    let lo: f64 = lo.trim().parse().map_err(|e| format!("lo: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("hi: {e}"))?;
    let n: usize = n.trim().parse().map_err(|e| format!("n: {e}"))?;
    Grid::new(lo, hi, n).map_err(|e| e.to_string())
}

pub fn parse_contributions(s: &str) -> std::result::Result<Contributions, String> {
    let mut c = Contributions { thermal: false, vacuum: false, mixed: false };
    for tok in s.split(',').map(str::trim) {
        match tok {
            "th" => c.thermal = true,
            "vc" => c.vacuum = true,
            "mx" => c.mixed = true,
            "all" => c = Contributions::ALL,
            other => return Err(format!("unknown contribution {other:?}; use th, vc, mx")),
        }
    }
    Ok(c)
}

/// Physical inputs in natural units, plus how to show results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physical {
    pub dp: DipoleParams,
    pub beta: Scale,
    pub z: Scale,
    pub contributions: Contributions,
    /// SI inputs, with one metre as the natural length unit.
    pub si: bool,
}

fn scale(v: f64, name: &str) -> Result<Scale> {
    if v == f64::INFINITY {
        Ok(Scale::Infinite)
    } else if v > 0.0 && v.is_finite() {
        Ok(Scale::Finite(v))
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be positive or inf")))
    }
}

impl Common {
    pub fn si(&self) -> bool {
        self.temperature.is_some()
    }

    pub fn units(&self) -> NaturalUnits {
        NaturalUnits::default()
    }

    /// SI molecule, with the reference molecule filling gaps.
    pub fn molecule(&self) -> Molecule {
        let d = Molecule::default();
        Molecule {
            p: self.p.map_or(d.p, |v| SIQuantity::new(v, Unit::Debye)),
            m: self.m.map_or(d.m, |v| SIQuantity::new(v, Unit::Gram)),
            a: self.a.map_or(d.a, |v| SIQuantity::new(v, Unit::Metre)),
        }
    }

    pub fn physical(&self) -> Result<Physical> {
        let theta = self.theta.unwrap_or(0.0);
        let contributions = self.contrib.unwrap_or(Contributions::ALL);
        if let Some(t) = self.temperature {
            let nu = self.units();
            let mol = self.molecule();
            let dp = DipoleParams::new(nu.to_natural(mol.p), nu.to_natural(mol.m), nu.to_natural(mol.a), theta)?;
            let beta = if t == 0.0 { Scale::Infinite } else { Scale::Finite(nu.beta(SIQuantity::new(t, Unit::Kelvin))?) };
            let z = match self.z {
                None => Scale::Infinite,
                Some(z) => scale(z, "z")?.finite().map_or(Scale::Infinite, |z| Scale::Finite(nu.to_natural(SIQuantity::new(z, Unit::Metre)))),
            };
            return Ok(Physical { dp, beta, z, contributions, si: true });
        }
        let dp = DipoleParams::new(self.p.unwrap_or(1.0), self.m.unwrap_or(1.0), self.a.unwrap_or(1.0), theta)?;
        let beta = match self.beta {
            None => Scale::Infinite,
            Some(b) => scale(b, "beta")?,
        };
        let z = match self.z {
            None => Scale::Infinite,
            Some(z) => scale(z, "z")?,
        };
        Ok(Physical { dp, beta, z, contributions, si: false })
    }

    /// Requested times in natural units, paired with the value as given.
    pub fn times(&self) -> Result<Vec<(f64, f64)>> {
        let given = match (self.tau, self.tau_range) {
            (Some(t), None) => vec![t],
            (None, Some(g)) => g.points(),
            _ => return Err(Error::InvalidParameter("give --tau or --tau-range".into())),
        };
        let nu = self.units();
        given
            .into_iter()
            .map(|t| {
                if !(t >= 0.0) || !t.is_finite() {
                    return Err(Error::InvalidParameter(format!("tau = {t} must be non-negative")));
                }
                let nat = if self.si() { nu.to_natural(SIQuantity::new(t, Unit::Second)) } else { t };
                Ok((t, nat))
            })
            .collect()
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        let mut spec = QuadratureSpec::default();
        if let Some(r) = self.rule {
            spec.rule = match r {
                Rule::Adaptive => QuadratureRule::Adaptive,
                Rule::FixedTensor => QuadratureRule::FixedTensor,
            };
        }
        if let Some(t) = self.quad_rel_tol {
            spec.rel_tol = t;
        }
        if let Some(n) = self.max_evals {
            spec.max_evals = n;
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Multipliers from natural results to SI with a one-metre length unit.
pub struct SiFactors {
    pub velocity2: f64,
    pub angular2: f64,
    pub energy: f64,
}

pub const SI: SiFactors = SiFactors {
    velocity2: constants::C * constants::C,
    angular2: constants::C * constants::C,
    energy: constants::HBAR * constants::C,
};

pub const DEFAULT_COOLING_THETA: f64 = PI / 2.0;
