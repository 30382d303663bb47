//! Wall-time comparison of the Wigner evaluation paths for a fixed
//! superposition `Σ c_k φ_k` over a hyperbolic set.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use hagedorn_core::approximation::hyperbolic_set;
use hagedorn_core::hagedorn::CoefficientVector;
use hagedorn_core::phase::{wigner_closed, wigner_superposition};
use hagedorn_core::quadrature::{wigner_quadrature, QuadratureSpec, Window};
use hagedorn_core::{ParameterSet, PhasePoint, C64};
use rand::Rng;

use crate::error::{Failure, Outcome};
use crate::parallel::par_map;
use crate::testkit::{c, random_params, random_point, rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Recurrence,
    Closed,
    Quadrature,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Recurrence => "recurrence",
            Method::Closed => "closed",
            Method::Quadrature => "quadrature",
        }
    }
}

impl FromStr for Method {
    type Err = Failure;

    fn from_str(s: &str) -> Outcome<Self> {
        match s.trim() {
            "recurrence" => Ok(Method::Recurrence),
            "closed" => Ok(Method::Closed),
            "quadrature" => Ok(Method::Quadrature),
            other => Err(Failure::Usage(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub dim: usize,
    pub cap: u64,
    pub npoints: usize,
    pub methods: Vec<Method>,
    pub workers: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub method: Method,
    pub seconds: f64,
    /// Against the recurrence values.
    pub max_abs_dev: f64,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub set_size: usize,
    pub npoints: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, m: Method) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.method == m)
    }

    /// `time(a) / time(b)`.
    pub fn ratio(&self, a: Method, b: Method) -> Option<f64> {
        Some(self.row(a)?.seconds / self.row(b)?.seconds)
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "|K| = {}, N = {}", self.set_size, self.npoints)?;
        writeln!(f, "{:<12} {:>12} {:>14}", "method", "seconds", "max|dev|")?;
        for r in &self.rows {
            writeln!(f, "{:<12} {:>12.4} {:>14.3e}", r.method.name(), r.seconds, r.max_abs_dev)?;
        }
        if let Some(ratio) = self.ratio(Method::Quadrature, Method::Recurrence) {
            writeln!(f, "quadrature/recurrence wall-time ratio: {ratio:.1}")?;
        }
        Ok(())
    }
}

/// A trapezoid rule for the lag integral of `Σ c_k φ_k` at points within a
/// few widths of `(q, p)`: the box clears the turning point of the highest
/// order by eight widths and the step resolves both packets' band limits plus
/// the momentum offset.
pub fn lag_spec(max_order: u32) -> QuadratureSpec {
    let turning = (2.0 * max_order as f64 + 1.0).sqrt();
    let radius = turning + 8.0;
    let h = std::f64::consts::PI / (2.0 * turning + 12.0);
    QuadratureSpec::trapezoid((2.0 * radius / h).ceil() as usize + 1, radius)
}

fn evaluate(method: Method, params: &ParameterSet, cv: &CoefficientVector, pt: &PhasePoint) -> Outcome<f64> {
    Ok(match method {
        Method::Recurrence => wigner_superposition(params, cv, pt)?.re,
        Method::Closed => {
            let coeffs = cv.coeffs();
            let mut acc = C64::new(0.0, 0.0);
            for (a, k) in cv.set().iter().enumerate() {
                let mut row = C64::new(0.0, 0.0);
                for (b, l) in cv.set().iter().enumerate() {
                    row += wigner_closed(params, k, l, pt)? * coeffs[b];
                }
                acc += coeffs[a].conj() * row;
            }
            acc.re
        }
        Method::Quadrature => {
            if params.dim() > 2 {
                return Err(Failure::Usage("quadrature is limited to d ≤ 2".into()));
            }
            let lag = Window::position(params)?.lag();
            let spec = lag_spec(cv.set().max_order());
            let f = |x: &[f64]| cv.evaluate(params, x);
            wigner_quadrature(params.eps(), &lag, &spec, &pt.x, &pt.xi, f, f)?.value.re
        }
    })
}

/// The fixed problem: seeded parameters with `ε = 1`, unit-norm random
/// coefficients on `{Π(1+k_j) ≤ K}`, and points within two widths of
/// `(q, p)`.
pub fn problem(cfg: &BenchConfig) -> Outcome<(ParameterSet, CoefficientVector, Vec<PhasePoint>)> {
    let mut r = rng(cfg.seed);
    let params = random_params(&mut r, cfg.dim, 1.0, 0.3);
    let set = hyperbolic_set(cfg.dim, cfg.cap)?;
    let raw: Vec<C64> = (0..set.len()).map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
    let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let cv = CoefficientVector::new(set, raw.iter().map(|z| z / norm).collect())?;
    let points = (0..cfg.npoints)
        .map(|_| PhasePoint::new(random_point(&mut r, params.position(), 2.0), random_point(&mut r, params.momentum(), 2.0)))
        .collect();
    Ok((params, cv, points))
}

pub fn run(cfg: &BenchConfig) -> Outcome<BenchReport> {
    let (params, cv, points) = problem(cfg)?;
    let time = |m: Method| -> Outcome<(f64, Vec<f64>)> {
        let start = Instant::now();
        let v = par_map(&points, cfg.workers, |_, pt| evaluate(m, &params, &cv, pt))?;
        Ok((start.elapsed().as_secs_f64(), v))
    };
    let (ref_time, reference) = time(Method::Recurrence)?;
    let mut rows = Vec::new();
    for &m in &cfg.methods {
        let (seconds, values) = if m == Method::Recurrence { (ref_time, reference.clone()) } else { time(m)? };
        let max_abs_dev = values.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        rows.push(BenchRow { method: m, seconds, max_abs_dev });
    }
    Ok(BenchReport { set_size: cv.set().len(), npoints: points.len(), rows })
}
