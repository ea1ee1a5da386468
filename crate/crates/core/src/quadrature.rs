//! Adaptive Gauss–Kronrod integration along complex polylines, fixed
//! Gauss–Legendre rules, and Richardson extrapolation.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_148_510,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEstimate<const D: usize> {
    pub value: [Complex64; D],
    pub error: [f64; D],
    pub evals: usize,
    pub converged: bool,
}

/// How the gap between the Kronrod and Gauss estimates is turned into an
/// error; `RealPart` suits callers that keep only the real part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMeasure {
    Norm,
    RealPart,
}

impl ErrorMeasure {
    fn apply(self, z: Complex64) -> f64 {
        match self {
            ErrorMeasure::Norm => z.norm(),
            ErrorMeasure::RealPart => z.re.abs(),
        }
    }
}

#[derive(Clone, Copy)]
struct Panel<const D: usize> {
    a: Complex64,
    b: Complex64,
    value: [Complex64; D],
    error: [f64; D],
}

fn gk21<const D: usize, F>(f: &F, a: Complex64, b: Complex64, measure: ErrorMeasure) -> Panel<D>
where
    F: Fn(Complex64) -> [Complex64; D],
{
    let center = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let zero = [Complex64::new(0.0, 0.0); D];
    let mut kronrod = zero;
    let mut gauss = zero;

    let fc = f(center);
    for d in 0..D {
        kronrod[d] = fc[d] * WGK[10];
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for d in 0..D {
            let s = f1[d] + f2[d];
            kronrod[d] += s * WGK[j];
            if j % 2 == 1 {
                gauss[d] += s * WG[j / 2];
            }
        }
    }
    let mut error = [0.0; D];
    for d in 0..D {
        kronrod[d] *= half;
        gauss[d] *= half;
        error[d] = measure.apply(kronrod[d] - gauss[d]);
    }
    Panel { a, b, value: kronrod, error }
}

/// Integrate `f(w) dw` along the polyline through `nodes`.
///
/// Panels are bisected greedily until every component satisfies
/// `error <= max(abs_tol, rel_tol * |value|)` or `max_evals` is exhausted.
pub fn integrate_path<const D: usize, F>(
    f: F,
    nodes: &[Complex64],
    abs_tol: f64,
    rel_tol: f64,
    max_evals: usize,
) -> PathEstimate<D>
where
    F: Fn(Complex64) -> [Complex64; D],
{
    let tol = |v: &[Complex64; D]| v.map(|x| abs_tol.max(rel_tol * x.norm()));
    integrate_path_with(f, nodes, tol, ErrorMeasure::Norm, max_evals)
}

/// Like [`integrate_path`] with per-component tolerances computed from the
/// running values by `tol`.
pub fn integrate_path_with<const D: usize, F, T>(
    f: F,
    nodes: &[Complex64],
    tol: T,
    measure: ErrorMeasure,
    max_evals: usize,
) -> PathEstimate<D>
where
    F: Fn(Complex64) -> [Complex64; D],
    T: Fn(&[Complex64; D]) -> [f64; D],
{
    let mut panels: Vec<Panel<D>> = nodes
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| gk21(&f, w[0], w[1], measure))
        .collect();
    let mut evals = 21 * panels.len();

    loop {
        let mut value = [Complex64::new(0.0, 0.0); D];
        let mut error = [0.0; D];
        for p in &panels {
            for d in 0..D {
                value[d] += p.value[d];
                error[d] += p.error[d];
            }
        }
        let tol = tol(&value);
        let converged = (0..D).all(|d| error[d] <= tol[d]);
        if converged || evals + 42 > max_evals || panels.is_empty() {
            return PathEstimate { value, error, evals, converged };
        }

        // split every panel within a factor of four of the worst one
        let scores: Vec<f64> = panels
            .iter()
            .map(|p| (0..D).map(|d| p.error[d] / tol[d]).fold(0.0, f64::max))
            .collect();
        let worst = scores.iter().cloned().fold(0.0, f64::max);
        let mut next = Vec::with_capacity(panels.len() + 8);
        for (p, score) in panels.into_iter().zip(scores) {
            if score >= 0.25 * worst && evals + 42 <= max_evals {
                let mid = (p.a + p.b) * 0.5;
                next.push(gk21(&f, p.a, mid, measure));
                next.push(gk21(&f, mid, p.b, measure));
                evals += 42;
            } else {
                next.push(p);
            }
        }
        panels = next;
    }
}

/// Real-line convenience wrapper around [`integrate_path`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_evals: usize) -> (f64, f64, bool)
where
    F: Fn(f64) -> f64,
{
    let est = integrate_path(
        |w: Complex64| [Complex64::new(f(w.re), 0.0)],
        &[Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
        abs_tol,
        rel_tol,
        max_evals,
    );
    (est.value[0].re, est.error[0], est.converged)
}

/// Composite Gauss–Legendre rule of the given order along a polyline,
/// doubling the panel count on every segment until the change between the
/// last two levels meets `tol` or the budget runs out. That change is the
/// reported error.
pub fn integrate_path_fixed<const D: usize, F, T>(f: F, nodes: &[Complex64], order: usize, tol: T, max_evals: usize) -> PathEstimate<D>
where
    F: Fn(Complex64) -> [Complex64; D],
    T: Fn(&[Complex64; D]) -> [f64; D],
{
    let (x, w) = gauss_legendre(order);
    let segments: Vec<(Complex64, Complex64)> = nodes.windows(2).filter(|s| s[0] != s[1]).map(|s| (s[0], s[1])).collect();
    let zero = [Complex64::new(0.0, 0.0); D];
    if segments.is_empty() {
        return PathEstimate { value: zero, error: [0.0; D], evals: 0, converged: true };
    }
    let level = |panels: usize| {
        let mut acc = zero;
        for &(a, b) in &segments {
            let step = (b - a) / panels as f64;
            for p in 0..panels {
                let lo = a + step * p as f64;
                let center = lo + step * 0.5;
                let half = step * 0.5;
                for (xi, wi) in x.iter().zip(&w) {
                    let v = f(center + half * *xi);
                    for d in 0..D {
                        acc[d] += v[d] * half * *wi;
                    }
                }
            }
        }
        acc
    };
    let cost = |panels: usize| panels * order * segments.len();
    let mut panels = 1;
    let mut evals = cost(1);
    let mut value = level(1);
    let mut error = [f64::INFINITY; D];
    let mut converged = false;
    while !converged && evals + cost(2 * panels) <= max_evals {
        panels *= 2;
        evals += cost(panels);
        let next = level(panels);
        for d in 0..D {
            error[d] = (next[d] - value[d]).norm();
        }
        value = next;
        let t = tol(&value);
        converged = (0..D).all(|d| error[d] <= t[d]);
    }
    PathEstimate { value, error, evals, converged }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// One Richardson step: `fine + (fine - coarse) / (ratio - 1)`, where `ratio`
/// is the factor by which the leading error term shrinks between the two.
pub fn richardson<T>(coarse: T, fine: T, ratio: f64) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    fine + (fine - coarse) * (1.0 / (ratio - 1.0))
}
