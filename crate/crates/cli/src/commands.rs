//! One function per subcommand, each producing a table.

use dipole_core::dispersions::{total_dispersions, Environment, Parts, Scale};
use dipole_core::energy::{cooling_scan, kinetic_energy, log_grid, residual_energy, EnergyParts, ResidualOptions, COOLING_RANGE};
use dipole_core::figures::{figure, FigureId, FigureOptions};
use dipole_core::report::Records;
use dipole_core::units::{estimates, gamma_parameter, z_over_beta, SIQuantity, Unit};
use dipole_core::verify::{standard_points, verify_points, DEFAULT_VERIFY_TOL, STANDARD_THETAS};
use dipole_core::{Error, Result};
use serde_json::{json, Value};

use crate::config::{Common, SI, DEFAULT_COOLING_THETA};

pub struct Outcome {
    pub records: Records,
    /// Set when the run completed but its checks did not pass.
    pub failed: bool,
}

impl From<Records> for Outcome {
    fn from(records: Records) -> Self {
        Self { records, failed: false }
    }
}

fn num(v: f64) -> Value {
    json!(v)
}

fn units_note(si: bool) -> String {
    if si {
        "units: SI (tau s, velocity m^2/s^2, angular rad^2/s^2, energy J)".into()
    } else {
        "units: natural (hbar = c = k_B = eps0 = 1)".into()
    }
}

pub fn figure_cmd(id: u32, c: &Common) -> Result<Outcome> {
    let id = FigureId::new(id)?;
    let mut opts = FigureOptions { grid: c.tau_range, theta: c.theta, ..FigureOptions::default() };
    if let Some(ct) = c.contrib {
        opts.contributions = ct;
    }
    if let Some(t) = c.temperature {
        let mol = c.molecule();
        let t = SIQuantity::new(t, Unit::Kelvin);
        if c.a.is_some() {
            opts.gamma = gamma_parameter(mol.a, t)?;
        }
        if let Some(z) = c.z {
            opts.z_over_beta = z_over_beta(SIQuantity::new(z, Unit::Metre), t)?;
        }
    } else {
        let beta = c.beta.unwrap_or(1.0);
        opts.gamma = beta / c.a.unwrap_or(1.0);
        if let Some(z) = c.z {
            opts.z_over_beta = z / beta;
        }
    }
    let table = figure(id, &opts)?;
    let mut r = table.to_records();
    r.notes.insert(0, format!("figure {}", id.get()));
    Ok(r.into())
}

const PARTS: [&str; 4] = ["thermal", "vacuum", "mixed", "total"];

fn parts_row(p: &Parts, k: f64) -> [Value; 4] {
    [num(p.thermal * k), num(p.vacuum * k), num(p.mixed * k), num(p.total * k)]
}

pub fn dispersion_cmd(c: &Common) -> Result<Outcome> {
    let ph = c.physical()?;
    let env = Environment::new(ph.beta, ph.z, ph.contributions)?;
    let (kv, kw) = if ph.si { (SI.velocity2, SI.angular2) } else { (1.0, 1.0) };
    let mut cols = vec!["tau".to_string()];
    for q in ["vx", "vy", "vz", "wx", "wy"] {
        cols.extend(PARTS.iter().map(|p| format!("{q}_{p}")));
    }
    let mut r = Records::new(cols);
    r.notes.push(units_note(ph.si));
    for (given, tau) in c.times()? {
        let d = total_dispersions(&ph.dp, &env, tau)?;
        let mut row = vec![num(given)];
        for (p, k) in [(&d.vx, kv), (&d.vy, kv), (&d.vz, kv), (&d.wx, kw), (&d.wy, kw)] {
            row.extend(parts_row(p, k));
        }
        r.push(row);
    }
    Ok(r.into())
}

fn energy_columns() -> Vec<String> {
    let mut cols = Vec::new();
    for p in PARTS {
        for k in ["translational", "rotational", "total"] {
            cols.push(format!("{p}_{k}"));
        }
    }
    cols.push("dimensionless_total".into());
    cols
}

fn energy_cells(parts: [&EnergyParts; 4], dimensionless: Option<f64>, k: f64) -> Vec<Value> {
    let mut row = Vec::new();
    for e in parts {
        row.extend([num(e.translational * k), num(e.rotational * k), num(e.total * k)]);
    }
    row.push(dimensionless.map_or(Value::Null, num));
    row
}

pub fn energy_cmd(residual: bool, c: &Common) -> Result<Outcome> {
    let ph = c.physical()?;
    let env = Environment::new(ph.beta, ph.z, ph.contributions)?;
    let k = if ph.si { SI.energy } else { 1.0 };
    if residual {
        let res = residual_energy(&ph.dp, &env)?;
        let e = res.energy;
        let mut cols = energy_columns();
        cols.extend(["mixed_eta_max", "mixed_previous", "mixed_current"].map(String::from));
        let mut r = Records::new(cols);
        r.notes.push(units_note(ph.si));
        r.notes.push("long-time residual".into());
        let mut row = energy_cells([&e.thermal, &e.vacuum, &e.mixed, &e.total], e.dimensionless_total, k);
        match res.certificate {
            Some(cert) => row.extend([num(cert.eta_max), num(cert.previous * k), num(cert.current * k)]),
            None => row.extend([Value::Null, Value::Null, Value::Null]),
        }
        r.push(row);
        return Ok(r.into());
    }
    let mut cols = vec!["tau".to_string()];
    cols.extend(energy_columns());
    let mut r = Records::new(cols);
    r.notes.push(units_note(ph.si));
    for (given, tau) in c.times()? {
        let e = kinetic_energy(&ph.dp, &env, tau)?;
        let mut row = vec![num(given)];
        row.extend(energy_cells([&e.thermal, &e.vacuum, &e.mixed, &e.total], e.dimensionless_total, k));
        r.push(row);
    }
    Ok(r.into())
}

pub fn estimate_cmd(c: &Common) -> Result<Outcome> {
    if c.beta.is_some() {
        return Err(Error::InvalidParameter("estimate takes SI input: use --T instead of --beta".into()));
    }
    let t = SIQuantity::new(c.temperature.unwrap_or(1.0), Unit::Kelvin);
    let mol = c.molecule();
    let e = estimates(&mol, t)?;
    let mut r = Records::new(["quantity", "value", "unit"]);
    let mut row = |name: &str, q: SIQuantity| r.push(vec![json!(name), num(q.value), json!(q.unit.symbol())]);
    row("temperature", e.temperature);
    row("gamma", SIQuantity::new(e.gamma, Unit::Dimensionless));
    if let Some(z) = c.z {
        row("z_over_beta", SIQuantity::new(z_over_beta(SIQuantity::new(z, Unit::Metre), t)?, Unit::Dimensionless));
    }
    row("delta_v", e.delta_v);
    row("delta_omega", e.delta_omega);
    row("transient_time", e.transient_time);
    row("rotation_angle", SIQuantity::new(e.rotation_angle, Unit::Dimensionless));
    row("radiated_power", e.radiated_power);
    r.notes.push(format!("molecule: p = {}, m = {}, a = {}", mol.p, mol.m, mol.a));
    if e.rotation_warning {
        r.notes.push("warning: rotation angle over the transient exceeds 0.1 rad; the fixed-orientation result is not reliable".into());
    }
    Ok(r.into())
}

pub fn verify_cmd(c: &Common) -> Result<Outcome> {
    let spec = c.quadrature()?;
    let tol = c.tol.unwrap_or(DEFAULT_VERIFY_TOL);
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {tol} must be positive")));
    }
    let rep = verify_points(&standard_points(), &STANDARD_THETAS, &spec, tol)?;
    let mut r = Records::new([
        "name", "part", "eta", "z_over_beta", "theta", "oracle", "oracle_error", "closed", "rel_error", "passed",
    ]);
    for ch in &rep.checks {
        r.push(vec![
            json!(ch.name),
            json!(ch.part),
            num(ch.eta),
            num(ch.z_over_beta),
            ch.theta.map_or(Value::Null, num),
            num(ch.oracle),
            num(ch.oracle_error),
            num(ch.closed),
            num(ch.rel_error),
            json!(ch.passed),
        ]);
    }
    r.notes.push(format!(
        "tolerance {} checks {} failures {} oracle-errors {} evals {}",
        rep.tolerance,
        rep.checks.len(),
        rep.failures,
        rep.errors.len(),
        rep.evals
    ));
    for e in &rep.errors {
        r.notes.push(format!("oracle error: {:?} eta {} z/beta {}: {}", e.part, e.eta, e.z_over_beta, e.message));
    }
    Ok(Outcome { records: r, failed: !rep.passed })
}

pub fn cooling_cmd(ratio_range: Option<dipole_core::figures::Grid>, c: &Common) -> Result<Outcome> {
    let ph = c.physical()?;
    let beta = match (ph.beta, ph.si) {
        (Scale::Finite(b), _) => b,
        (Scale::Infinite, false) if c.beta.is_none() => 1.0,
        _ => return Err(Error::InvalidParameter("cooling scan needs a finite temperature".into())),
    };
    let theta = c.theta.unwrap_or(DEFAULT_COOLING_THETA);
    let g = match ratio_range {
        Some(g) => g,
        None => dipole_core::figures::Grid { lo: COOLING_RANGE.0, hi: COOLING_RANGE.1, n: 200 },
    };
    g.validate()?;
    if !(g.lo > 0.0) {
        return Err(Error::InvalidParameter("beta/z range must be positive".into()));
    }
    let scan = cooling_scan(&ph.dp, theta, beta, &log_grid(g.lo, g.hi, g.n), &ResidualOptions::default())?;
    let mut r = Records::new(["beta_over_z", "thermal", "vacuum", "mixed", "total", "difference"]);
    r.notes.push(format!("theta {} gamma {}; energies in units of p^2/(m beta^4); difference = K - K_th", scan.theta, scan.gamma));
    for s in &scan.sign_changes {
        r.notes.push(format!("sign change in [{}, {}] near {}", s.lower, s.upper, s.root));
    }
    if scan.sign_changes.is_empty() {
        r.notes.push("no sign change on the grid".into());
    }
    for p in &scan.points {
        r.push([p.beta_over_z, p.thermal, p.vacuum, p.mixed, p.total, p.difference].map(num).to_vec());
    }
    Ok(r.into())
}
