//! Curve data for figures 2–9.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dispersions::{
    f_beta, g_beta, mixed_angular_shapes, mixed_translational_shapes, vacuum_angular_shapes, vacuum_translational_shapes,
    Contributions, DipoleParams, Environment, Scale,
};
use crate::energy::{cooling_point, kinetic_energy, log_grid, ResidualOptions, COOLING_RANGE};
use crate::error::{Error, Result};
use crate::report::Records;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FigureId(u32);

impl FigureId {
    pub const ALL: [FigureId; 8] = [FigureId(2), FigureId(3), FigureId(4), FigureId(5), FigureId(6), FigureId(7), FigureId(8), FigureId(9)];

    pub fn new(id: u32) -> Result<Self> {
        if (2..=9).contains(&id) {
            Ok(Self(id))
        } else {
            Err(Error::InvalidParameter(format!("figure id {id} not in 2..=9")))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for FigureId {
    type Error = Error;
    fn try_from(id: u32) -> Result<Self> {
        Self::new(id)
    }
}

impl From<FigureId> for u32 {
    fn from(id: FigureId) -> u32 {
        id.0
    }
}

/// `n` evenly spaced points over `[lo, hi]`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let g = Self { lo, hi, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lo.is_finite() && self.hi.is_finite() && self.n >= 1 && (self.lo < self.hi || (self.n == 1 && self.lo == self.hi));
        if !ok {
            return Err(Error::InvalidParameter(format!("empty or malformed range {}:{}:{}", self.lo, self.hi, self.n)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| if i == self.n - 1 { self.hi } else { self.lo + step * i as f64 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    /// Abscissa grid; each figure has its own default.
    pub grid: Option<Grid>,
    /// Orientation for figure 9.
    pub theta: Option<f64>,
    /// β/a for the energy figures.
    pub gamma: f64,
    /// z/β for figures 5 and 6.
    pub z_over_beta: f64,
    /// Parts kept in figure 8.
    pub contributions: Contributions,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self { grid: None, theta: None, gamma: 1.0, z_over_beta: 1.0, contributions: Contributions::ALL }
    }
}

/// Columns of numbers; the first is the abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Abscissae dropped because they fall in a singular window.
    pub excluded: Vec<f64>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), excluded: Vec::new() }
    }

    /// Push a row, or record the abscissa if the point is singular.
    fn push(&mut self, x: f64, row: Result<Vec<f64>>) -> Result<()> {
        match row {
            Ok(mut r) => {
                r.insert(0, x);
                self.rows.push(r);
                Ok(())
            }
            Err(Error::Singular { .. }) => {
                self.excluded.push(x);
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Number of curves, i.e. columns after the abscissa.
    pub fn curves(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn to_records(&self) -> Records {
        let mut r = Records::new(self.columns.clone());
        for row in &self.rows {
            r.push(row.iter().map(|v| serde_json::json!(v)).collect());
        }
        if !self.excluded.is_empty() {
            let xs: Vec<String> = self.excluded.iter().map(|x| x.to_string()).collect();
            r.notes.push(format!("excluded (singular): {}", xs.join(" ")));
        }
        r
    }
}

fn default_grid(id: u32) -> Grid {
    match id {
        2 => Grid { lo: 0.0, hi: 20.0, n: 401 },
        3 | 4 => Grid { lo: 0.0, hi: 4.0, n: 401 },
        5 | 6 => Grid { lo: 0.0, hi: 10.0, n: 401 },
        7 => Grid { lo: 0.0, hi: 10.0, n: 401 },
        8 => Grid { lo: 0.0, hi: 5.0, n: 401 },
        _ => Grid { lo: COOLING_RANGE.0, hi: COOLING_RANGE.1, n: 200 },
    }
}

pub const FIGURE8_Z_OVER_BETA: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

pub fn figure(id: FigureId, opts: &FigureOptions) -> Result<Table> {
    let grid = opts.grid.unwrap_or_else(|| default_grid(id.get()));
    grid.validate()?;
    if !(opts.gamma > 0.0) || !opts.gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma = {} must be positive", opts.gamma)));
    }
    let xs = grid.points();
    let mut t = match id.get() {
        2 => {
            let mut t = Table::new(&["tau_over_beta", "f_beta", "g_beta"]);
            for &x in &xs {
                t.push(x, Ok(vec![f_beta(x), g_beta(x)]))?;
            }
            t
        }
        3 => {
            let mut t = Table::new(&["eta", "vx_par", "vx_perp", "vy_par", "vz_par", "vz_perp"]);
            for &x in &xs {
                t.push(x, vacuum_translational_shapes(x).map(|s| s.as_array().to_vec()))?;
            }
            t
        }
        4 => {
            let mut t = Table::new(&["eta", "w_par", "w_perp"]);
            for &x in &xs {
                t.push(x, vacuum_angular_shapes(x).map(|s| vec![s.par, s.perp]))?;
            }
            t
        }
        5 | 6 => {
            let zb = opts.z_over_beta;
            if !(zb > 0.0) || !zb.is_finite() {
                return Err(Error::InvalidParameter(format!("z/beta = {zb} must be positive")));
            }
            let (beta, z) = (1.0, zb);
            if id.get() == 5 {
                let mut t = Table::new(&["eta", "vx_par", "vx_perp", "vy_par", "vz_par", "vz_perp"]);
                for &x in &xs {
                    t.push(x, mixed_translational_shapes(z, 2.0 * z * x, beta).map(|s| s.as_array().to_vec()))?;
                }
                t
            } else {
                let mut t = Table::new(&["eta", "w_par", "w_perp"]);
                for &x in &xs {
                    t.push(x, mixed_angular_shapes(z, 2.0 * z * x, beta).map(|s| vec![s.par, s.perp]))?;
                }
                t
            }
        }
        7 => {
            // p = m = β = 1, so energies are already in units of p²/(mβ⁴)
            let dp = DipoleParams::new(1.0, 1.0, 1.0 / opts.gamma, 0.0)?;
            let env = Environment::new(Scale::Finite(1.0), Scale::Infinite, Contributions::THERMAL)?;
            let mut t = Table::new(&["tau_over_beta", "total", "translational", "rotational"]);
            for &x in &xs {
                let row = kinetic_energy(&dp, &env, x).map(|e| vec![e.total.total, e.total.translational, e.total.rotational]);
                t.push(x, row)?;
            }
            t
        }
        8 => {
            let mut names = vec!["eta".to_string()];
            for (label, _) in [("par", 0.0), ("perp", PI / 2.0)] {
                for zb in FIGURE8_Z_OVER_BETA {
                    names.push(format!("{label}_zb{zb}"));
                }
            }
            let mut t = Table { columns: names, rows: Vec::new(), excluded: Vec::new() };
            for &x in &xs {
                let row = (|| {
                    let mut r = Vec::new();
                    for theta in [0.0, PI / 2.0] {
                        let dp = DipoleParams::new(1.0, 1.0, 1.0 / opts.gamma, theta)?;
                        for zb in FIGURE8_Z_OVER_BETA {
                            let env = Environment::new(Scale::Finite(1.0), Scale::Finite(zb), opts.contributions)?;
                            r.push(kinetic_energy(&dp, &env, 2.0 * zb * x)?.total.total);
                        }
                    }
                    Ok(r)
                })();
                t.push(x, row)?;
            }
            t
        }
        _ => {
            let theta = opts.theta.unwrap_or(PI / 2.0);
            let dp = DipoleParams::new(1.0, 1.0, 1.0 / opts.gamma, theta)?;
            let ropts = ResidualOptions::default();
            let (lo, hi) = COOLING_RANGE;
            if !(grid.lo >= lo && grid.hi <= hi && grid.lo > 0.0) {
                return Err(Error::InvalidParameter(format!("beta/z range must lie within [{lo}, {hi}]")));
            }
            let ratios = if opts.grid.is_some() { xs.clone() } else { log_grid(grid.lo, grid.hi, grid.n) };
            let mut t = Table::new(&["beta_over_z", "K_th", "K_vc", "K", "K_reference_theta0"]);
            for &x in &ratios {
                let row = (|| {
                    let p = cooling_point(&dp, theta, 1.0, x, &ropts)?;
                    let r = cooling_point(&dp, 0.0, 1.0, x, &ropts)?;
                    Ok(vec![p.thermal, p.vacuum, p.total, r.total])
                })();
                t.push(x, row)?;
            }
            t
        }
    };
    if t.rows.is_empty() {
        let eta = t.excluded.first().copied().unwrap_or(f64::NAN);
        return Err(Error::Singular { eta, window: crate::dispersions::SINGULAR_WINDOW });
    }
    t.excluded.sort_by(f64::total_cmp);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig(id: u32) -> Table {
        figure(FigureId::new(id).unwrap(), &FigureOptions::default()).unwrap()
    }

    fn last(t: &Table, col: &str) -> f64 {
        *t.column(col).unwrap().last().unwrap()
    }

    #[test]
    fn ids() {
        assert!(FigureId::new(1).is_err());
        assert!(FigureId::new(10).is_err());
        assert_eq!(FigureId::ALL.len(), 8);
    }

    #[test]
    fn figure2_tends_to_one() {
        let t = fig(2);
        assert_eq!(t.curves(), 2);
        assert!((last(&t, "f_beta") - 1.0).abs() < 1e-3);
        assert!((last(&t, "g_beta") - 1.0).abs() < 1e-3);
        assert_eq!(t.rows[0][1], 0.0);
    }

    #[test]
    fn figure3_drops_light_cone() {
        let t = fig(3);
        assert_eq!(t.curves(), 5);
        assert_eq!(t.excluded, vec![1.0]);
        assert_eq!(t.rows.len(), 400);
    }

    #[test]
    fn figure4_asymptotes() {
        let opts = FigureOptions { grid: Some(Grid::new(50.0, 100.0, 3).unwrap()), ..Default::default() };
        let t = figure(FigureId::new(4).unwrap(), &opts).unwrap();
        assert!((last(&t, "w_par") - 2.0).abs() < 1e-3);
        assert!(last(&t, "w_perp").abs() < 1e-3);
    }

    #[test]
    fn figure6_goes_negative() {
        let t = fig(6);
        assert_eq!(t.curves(), 2);
        assert!(t.excluded.is_empty());
        assert!(t.rows.iter().any(|r| r[0] >= 5.0 && (r[1] < 0.0 || r[2] < 0.0)));
    }

    #[test]
    fn figure9_dips_below_thermal() {
        let opts = FigureOptions { grid: Some(Grid::new(0.5, 2.0, 16).unwrap()), ..Default::default() };
        let t = figure(FigureId::new(9).unwrap(), &opts).unwrap();
        assert_eq!(t.curves(), 4);
        assert!(t.rows.iter().any(|r| r[3] < r[1]));
        let out = figure(FigureId::new(9).unwrap(), &FigureOptions { grid: Some(Grid::new(0.01, 1.0, 3).unwrap()), ..Default::default() });
        assert!(out.is_err());
    }

    #[test]
    fn records_note_exclusions() {
        let r = fig(4).to_records();
        assert_eq!(r.notes, vec!["excluded (singular): 1".to_string()]);
        assert_eq!(r.columns, vec!["eta", "w_par", "w_perp"]);
        assert_eq!(fig(4), fig(4));
    }

    #[test]
    fn grids() {
        assert!(Grid::new(1.0, 1.0, 2).is_err());
        assert!(Grid::new(2.0, 1.0, 5).is_err());
        assert_eq!(Grid::new(0.0, 1.0, 3).unwrap().points(), vec![0.0, 0.5, 1.0]);
        assert_eq!(Grid::new(0.3, 0.3, 1).unwrap().points(), vec![0.3]);
    }
}
