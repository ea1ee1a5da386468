//! Oracle against closed forms on a grid of sample points.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlators::Contribution;
use crate::dispersions::{
    f_beta, g_beta, mixed_angular_dispersions, mixed_angular_shapes, mixed_translational_shapes, mixed_velocity_dispersions,
    vacuum_angular_dispersions, vacuum_angular_shapes, vacuum_translational_shapes, vacuum_velocity_dispersions, AngularShapes,
    DipoleParams, Scale, TranslationalShapes,
};
use crate::error::Result;
use crate::oracle::{angular_from_units, unit_integrals_uncertified, velocity_from_units, QuadratureSpec, UnitIntegrals};

pub const STANDARD_ETAS: [f64; 3] = [0.5, 2.0, 5.0];
pub const STANDARD_Z_OVER_BETA: [f64; 3] = [0.5, 1.0, 2.0];
pub const STANDARD_THETAS: [f64; 3] = [0.0, PI / 4.0, PI / 2.0];
pub const DEFAULT_VERIFY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub eta: f64,
    pub z_over_beta: f64,
}

pub fn standard_points() -> Vec<SamplePoint> {
    let mut v = Vec::new();
    for eta in STANDARD_ETAS {
        for z_over_beta in STANDARD_Z_OVER_BETA {
            v.push(SamplePoint { eta, z_over_beta });
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub part: Contribution,
    pub eta: f64,
    pub z_over_beta: f64,
    pub theta: Option<f64>,
    pub oracle: f64,
    pub oracle_error: f64,
    pub closed: f64,
    pub rel_error: f64,
    pub passed: bool,
}

/// A sample point where the oracle itself could not run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobFailure {
    pub part: Contribution,
    pub eta: f64,
    pub z_over_beta: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub spec: QuadratureSpec,
    pub checks: Vec<Check>,
    pub errors: Vec<JobFailure>,
    pub failures: usize,
    pub evals: usize,
    pub passed: bool,
}

struct Job {
    point: SamplePoint,
    part: Contribution,
}

fn check(
    name: &str,
    job: &Job,
    theta: Option<f64>,
    oracle: (f64, f64),
    closed: f64,
    tol: f64,
) -> Check {
    let rel_error = if closed == 0.0 { oracle.0.abs() } else { ((oracle.0 - closed) / closed).abs() };
    Check {
        name: name.to_string(),
        part: job.part,
        eta: job.point.eta,
        z_over_beta: job.point.z_over_beta,
        theta,
        oracle: oracle.0,
        oracle_error: oracle.1,
        closed,
        rel_error,
        passed: rel_error <= tol,
    }
}

fn shape_checks(job: &Job, u: &UnitIntegrals, z: f64, tol: f64, out: &mut Vec<Check>) -> Result<()> {
    let beta = 1.0;
    let tau = 2.0 * z * job.point.eta;
    let (t, a, pre) = match job.part {
        Contribution::Vacuum => (vacuum_translational_shapes(job.point.eta)?, vacuum_angular_shapes(job.point.eta)?, 8.0),
        Contribution::Mixed => (mixed_translational_shapes(z, tau, beta)?, mixed_angular_shapes(z, tau, beta)?, 16.0),
        Contribution::Thermal => unreachable!(),
    };
    let kt = pre * PI * PI * z.powi(4);
    let ka = pre * PI * PI * z * z;
    let TranslationalShapes { x_par, x_perp, y_par, z_par, z_perp } = t;
    let AngularShapes { par, perp } = a;
    let v = &u.velocity;
    let shapes = [
        ("x_par", v[0][0], kt, x_par),
        ("x_perp", v[1][0], kt, x_perp),
        ("y_par", v[0][1], kt, y_par),
        ("y_perp", v[1][1], kt, x_perp),
        ("z_par", v[0][2], kt, z_par),
        ("z_perp", v[1][2], kt, z_perp),
        ("w_par", u.angular[2], ka, par),
        ("w_perp", u.angular[0], ka, perp),
        ("w_perp_y", u.angular[1], ka, perp),
    ];
    for (name, e, k, closed) in shapes {
        out.push(check(name, job, None, (e.value * k, e.error * k), closed, tol));
    }
    Ok(())
}

fn thermal_checks(job: &Job, u: &UnitIntegrals, tau: f64, tol: f64, out: &mut Vec<Check>) {
    let beta = 1.0;
    let x = tau / beta;
    let v_total = 2.0 * PI * PI * f_beta(x) / (45.0 * beta.powi(4));
    let w_total = 2.0 * g_beta(x) / (9.0 * beta * beta);
    for (k, name) in [(0, "v_total_par"), (1, "v_total_perp")] {
        let e = u.velocity[k];
        let sum = (e[0].value + e[1].value + e[2].value, e[0].error + e[1].error + e[2].error);
        out.push(check(name, job, None, sum, v_total, tol));
    }
    let a = u.angular;
    out.push(check("w_total_par", job, None, (a[2].value + a[1].value, a[2].error + a[1].error), w_total, tol));
    out.push(check("w_total_perp", job, None, (a[0].value + a[1].value, a[0].error + a[1].error), w_total, tol));
}

fn dispersion_checks(job: &Job, u: &UnitIntegrals, z: f64, tau: f64, thetas: &[f64], tol: f64, out: &mut Vec<Check>) -> Result<()> {
    let beta = 1.0;
    for &theta in thetas {
        let dp = DipoleParams::new(1.0, 1.0, 1.0, theta)?;
        let ov = velocity_from_units(&dp, u);
        let oa = angular_from_units(&dp, u);
        let (cv, ca) = match job.part {
            Contribution::Vacuum => (vacuum_velocity_dispersions(&dp, z, tau)?, vacuum_angular_dispersions(&dp, z, tau)?),
            Contribution::Mixed => (mixed_velocity_dispersions(&dp, z, tau, beta)?, mixed_angular_dispersions(&dp, z, tau, beta)?),
            Contribution::Thermal => continue,
        };
        let pairs = [("vx", ov.vx, cv.vx), ("vy", ov.vy, cv.vy), ("vz", ov.vz, cv.vz), ("wx", oa.wx, ca.wx), ("wy", oa.wy, ca.wy)];
        for (name, e, closed) in pairs {
            out.push(check(name, job, Some(theta), (e.value, e.error), closed, tol));
        }
    }
    Ok(())
}

fn run_job(job: &Job, thetas: &[f64], spec: &QuadratureSpec, tol: f64) -> Result<(Vec<Check>, usize)> {
    let beta = 1.0;
    let z = job.point.z_over_beta * beta;
    let tau = 2.0 * z * job.point.eta;
    let u = unit_integrals_uncertified(job.part, Scale::Finite(beta), Scale::Finite(z), tau, spec)?;
    let mut out = Vec::new();
    match job.part {
        Contribution::Thermal => thermal_checks(job, &u, tau, tol, &mut out),
        _ => {
            shape_checks(job, &u, z, tol, &mut out)?;
            dispersion_checks(job, &u, z, tau, thetas, tol, &mut out)?;
        }
    }
    Ok((out, u.evals))
}

/// Oracle against closed forms at `β = 1`, `z = z/β`, `τ = 2zη`, for every
/// contribution. A point where the oracle errors counts as a failure.
pub fn verify_points(points: &[SamplePoint], thetas: &[f64], spec: &QuadratureSpec, tol: f64) -> Result<VerifyReport> {
    spec.validate()?;
    let parts = [Contribution::Thermal, Contribution::Vacuum, Contribution::Mixed];
    let jobs: Vec<Job> = points.iter().flat_map(|&point| parts.map(|part| Job { point, part })).collect();
    let results: Vec<_> = jobs.par_iter().map(|j| run_job(j, thetas, spec, tol)).collect();
    let mut checks = Vec::new();
    let mut errors = Vec::new();
    let mut evals = 0;
    for (job, r) in jobs.iter().zip(results) {
        match r {
            Ok((c, n)) => {
                checks.extend(c);
                evals += n;
            }
            Err(e) => errors.push(JobFailure {
                part: job.part,
                eta: job.point.eta,
                z_over_beta: job.point.z_over_beta,
                message: e.to_string(),
            }),
        }
    }
    let failures = checks.iter().filter(|c| !c.passed).count() + errors.len();
    Ok(VerifyReport { tolerance: tol, spec: *spec, passed: failures == 0, failures, evals, checks, errors })
}

pub fn verify_standard(spec: &QuadratureSpec) -> Result<VerifyReport> {
    verify_points(&standard_points(), &STANDARD_THETAS, spec, DEFAULT_VERIFY_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_all_parts() {
        let r = verify_points(&[SamplePoint { eta: 2.0, z_over_beta: 1.0 }], &[0.0, PI / 2.0], &QuadratureSpec::default(), 1e-3).unwrap();
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
        }
        // 4 thermal totals, 9 shapes and 2×5 dispersions per wall part
        assert_eq!(r.checks.len(), 4 + 2 * (9 + 10));
        assert!(r.passed);
    }

    #[test]
    fn oracle_errors_count_as_failures() {
        // η = 1 sits in the light-cone window for the wall parts
        let r = verify_points(&[SamplePoint { eta: 1.0, z_over_beta: 1.0 }], &[0.0], &QuadratureSpec::default(), 1e-3).unwrap();
        assert_eq!(r.errors.len(), 2);
        assert!(!r.passed);
        assert_eq!(r.failures, 2 + r.checks.iter().filter(|c| !c.passed).count());
    }

    #[test]
    fn standard_grid() {
        assert_eq!(standard_points().len(), 9);
    }
}
