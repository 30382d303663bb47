//! The `hagkit` command line. Every command validates its parameter file
//! before computing anything.
//!
//! Exit codes: 0 success, 1 validation or usage, 2 numerical, 3 I/O.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hagedorn_core::approximation::{error_report, hyperbolic_set, project, projection_spec, wigner_of_function};
use hagedorn_core::dynamics::{propagate, Callable, Potential, Quadratic, Quartic, StepConfig, TrajectoryState};
use hagedorn_core::hagedorn::{wavepacket_eval, wavepacket_table, CoefficientVector};
use hagedorn_core::linalg::RMatrix;
use hagedorn_core::phase::{fbi_closed, husimi, wigner_closed, wigner_table};
use hagedorn_core::quadrature::{fbi_quadrature, wigner_quadrature, Axis, Grid, Window};
use hagedorn_core::special::hermite_function;
use hagedorn_core::{IndexSet, MultiIndex, ParameterSet, PhasePoint, C64};

use crate::acceptance;
use crate::bench::{self, lag_spec, BenchConfig, Method};
use crate::error::{Failure, Outcome};
use crate::io::{self, CoefficientFile, ParamsFile, PotentialFile, Table};
use crate::parallel::{par_map, workers_from_env};

#[derive(Parser, Debug)]
#[command(name = "hagkit", version, about = "Hagedorn wavepackets: evaluation, phase-space transforms, projection and propagation")]
struct Cli {
    /// Worker threads; overrides HAGKIT_WORKERS.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Tolerance for the structural checks on (Q, P).
    #[arg(long, global = true, default_value_t = hagedorn_core::params::DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Sites {
    /// CSV of points, one per row.
    #[arg(long, conflicts_with = "grid")]
    points: Option<PathBuf>,
    /// Tensor grid `min:max:count,...`, last axis fastest.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum WignerMethod {
    Closed,
    Recurrence,
    Quadrature,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TransformMethod {
    Closed,
    Quadrature,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the structural conditions on a parameter file.
    Validate { file: PathBuf },
    /// Evaluate φ_k on position points.
    Eval {
        file: PathBuf,
        /// Multi-index, comma separated.
        #[arg(long)]
        k: String,
        #[command(flatten)]
        sites: Sites,
    },
    /// Wigner transform W(φ_k, φ_l) on phase-space points.
    Wigner {
        file: PathBuf,
        #[arg(long)]
        k: String,
        #[arg(long)]
        l: String,
        #[arg(long, value_enum, default_value_t = WignerMethod::Closed)]
        method: WignerMethod,
        #[command(flatten)]
        sites: Sites,
    },
    /// FBI transform of φ_k on phase-space points.
    Fbi {
        file: PathBuf,
        #[arg(long)]
        k: String,
        #[arg(long, value_enum, default_value_t = TransformMethod::Closed)]
        method: TransformMethod,
        #[command(flatten)]
        sites: Sites,
    },
    /// Husimi density |FBI|² of φ_k on phase-space points.
    Husimi {
        file: PathBuf,
        #[arg(long)]
        k: String,
        #[arg(long, value_enum, default_value_t = TransformMethod::Closed)]
        method: TransformMethod,
        #[command(flatten)]
        sites: Sites,
    },
    /// Project a function onto the basis over {k : Π(1+k_j) ≤ K}.
    Project {
        file: PathBuf,
        /// `builtin:shifted-gaussian(q0,p0,sigma)`, `builtin:hermite-product(k1,...)`
        /// or a samples CSV with columns x1..xd, re, im on a tensor grid.
        #[arg(long)]
        function: String,
        #[arg(long = "K")]
        cap: u64,
        /// Trapezoid nodes per axis; the default resolves every φ_k of the set.
        #[arg(long)]
        quad: Option<usize>,
        /// Also project with K, K/2, K/4, ... and print the residual trend.
        #[arg(long)]
        study: bool,
        /// Coefficient JSON; stdout when absent and no study is requested.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wigner function of Σ c_k φ_k from a coefficient file.
    Wignerfun {
        file: PathBuf,
        #[arg(long)]
        coeffs: PathBuf,
        #[command(flatten)]
        sites: Sites,
    },
    /// Propagate (q, p, Q, P, S) by Störmer–Verlet.
    Propagate {
        file: PathBuf,
        /// `harmonic`, `quartic`, or a JSON potential file.
        #[arg(long)]
        potential: String,
        #[arg(long = "T")]
        t_final: f64,
        #[arg(long)]
        dt: f64,
        /// Reject a step whose structural residual exceeds this.
        #[arg(long, default_value_t = 1e-8)]
        drift_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the Wigner evaluation paths on a fixed superposition.
    Bench {
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long = "K", default_value_t = 20)]
        cap: u64,
        #[arg(long, default_value_t = 10_000)]
        npoints: usize,
        #[arg(long, default_value = "recurrence,closed,quadrature")]
        method_list: String,
        #[arg(long, default_value_t = 13)]
        seed: u64,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Criterion numbers, comma separated; all when absent.
        #[arg(long)]
        only: Option<String>,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("hagkit: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Outcome<()> {
    let workers = match cli.workers {
        Some(0) => return Err(Failure::Usage("--workers must be positive".into())),
        Some(n) => n,
        None => workers_from_env()?,
    };
    let tol = cli.tol;
    match cli.command {
        Command::Validate { file } => validate(&file, tol),
        Command::Eval { file, k, sites } => eval(&file, tol, &k, &sites, workers),
        Command::Wigner { file, k, l, method, sites } => wigner(&file, tol, &k, &l, method, &sites, workers),
        Command::Fbi { file, k, method, sites } => fbi(&file, tol, &k, method, &sites, workers, false),
        Command::Husimi { file, k, method, sites } => fbi(&file, tol, &k, method, &sites, workers, true),
        Command::Project { file, function, cap, quad, study, out } => {
            project_cmd(&file, tol, &function, cap, quad, study, out.as_deref())
        }
        Command::Wignerfun { file, coeffs, sites } => wignerfun(&file, tol, &coeffs, &sites, workers),
        Command::Propagate { file, potential, t_final, dt, drift_tol, out } => {
            propagate_cmd(&file, tol, &potential, t_final, dt, drift_tol, out.as_deref())
        }
        Command::Bench { d, cap, npoints, method_list, seed } => {
            let methods = method_list.split(',').map(str::parse).collect::<Outcome<Vec<Method>>>()?;
            if d > 2 && methods.contains(&Method::Quadrature) {
                return Err(Failure::Usage("quadrature is limited to d ≤ 2".into()));
            }
            let report = bench::run(&BenchConfig { dim: d, cap, npoints, methods, workers, seed })?;
            print!("{report}");
            Ok(())
        }
        Command::Selftest { only } => selftest(only.as_deref()),
    }
}

fn load(file: &Path, tol: f64) -> Outcome<(ParamsFile, ParameterSet)> {
    let pf = io::read_params(file)?;
    let params = pf.to_params(tol)?;
    Ok((pf, params))
}

fn validate(file: &Path, tol: f64) -> Outcome<()> {
    let report = io::read_params(file)?.report(tol)?;
    println!("symmetry    |QᵀP − PᵀQ|        {:.3e}", report.symmetry_residual);
    println!("symplectic  |Q*P − P*Q − 2i|   {:.3e}", report.symplectic_residual);
    println!("width       min eig Im(PQ⁻¹)   {:.3e}", report.width_min_eigenvalue);
    println!("invertible  min sv Q, P        {:.3e}, {:.3e}", report.q_min_singular, report.p_min_singular);
    println!("tolerance                      {:.1e}", report.tol);
    if report.passed() {
        println!("valid");
        Ok(())
    } else {
        Err(Failure::Usage("parameters fail validation".into()))
    }
}

fn parse_index(s: &str, d: usize) -> Outcome<MultiIndex> {
    let k: Vec<u32> = s
        .split(',')
        .map(|v| v.trim().parse::<u32>().map_err(|_| Failure::Usage(format!("bad multi-index '{s}'"))))
        .collect::<Outcome<_>>()?;
    if k.len() != d {
        return Err(Failure::Usage(format!("multi-index '{s}' needs {d} entries")));
    }
    Ok(MultiIndex(k))
}

/// Points of dimension `n` from `--points` or `--grid`.
fn sites(s: &Sites, n: usize) -> Outcome<Vec<Vec<f64>>> {
    match (&s.points, &s.grid) {
        (Some(path), None) => io::read_rows(path, n),
        (None, Some(spec)) => {
            let grid = io::parse_grid(spec)?;
            if grid.dim() != n {
                return Err(Failure::Usage(format!("grid has {} axes, expected {n}", grid.dim())));
            }
            Ok(io::grid_points(&grid))
        }
        _ => Err(Failure::Usage("exactly one of --points or --grid is required".into())),
    }
}

fn phase_sites(s: &Sites, d: usize) -> Outcome<Vec<PhasePoint>> {
    Ok(sites(s, 2 * d)?
        .into_iter()
        .map(|mut r| {
            let xi = r.split_off(d);
            PhasePoint::new(r, xi)
        })
        .collect())
}

fn finite_at(v: f64, what: &str, point: &[f64]) -> Outcome<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Numerical(format!("non-finite {what} at point {point:?}")))
    }
}

/// Tags a per-point failure with the point.
fn at_point<T>(r: hagedorn_core::Result<T>, point: &[f64]) -> Outcome<T> {
    r.map_err(|e| match Failure::from(e) {
        Failure::Numerical(m) => Failure::Numerical(format!("{m} at point {point:?}")),
        other => other,
    })
}

fn base_table(header: Vec<String>, command: &str, pf: &ParamsFile, tol: f64) -> Table {
    Table::new(header)
        .meta("command", command)
        .meta("params_hash", pf.hash())
        .meta("epsilon", io::fmt_float(pf.epsilon))
        .meta("tol", format!("{tol:e}"))
}

fn eval(file: &Path, tol: f64, k: &str, s: &Sites, workers: usize) -> Outcome<()> {
    let (pf, params) = load(file, tol)?;
    let d = params.dim();
    let k = parse_index(k, d)?;
    let pts = sites(s, d)?;
    let values = par_map(&pts, workers, |_, x| at_point(wavepacket_eval(&params, &k, x), x))?;
    let mut header = io::coordinate_header("x", d);
    header.extend(["re".to_string(), "im".to_string()]);
    let mut table = base_table(header, "eval", &pf, tol).meta("k", &k);
    for (x, v) in pts.iter().zip(values) {
        let mut row = x.clone();
        row.push(finite_at(v.re, "value", x)?);
        row.push(finite_at(v.im, "value", x)?);
        table.rows.push(row);
    }
    table.write(s.out.as_deref())
}

fn phase_header(d: usize, values: &[&str]) -> Vec<String> {
    let mut h = io::coordinate_header("x", d);
    h.extend(io::coordinate_header("xi", d));
    h.extend(values.iter().map(|v| v.to_string()));
    h
}

fn require_quadrature_dim(d: usize) -> Outcome<()> {
    if d > 2 {
        return Err(Failure::Usage("the quadrature method is limited to d ≤ 2".into()));
    }
    Ok(())
}

fn wigner(file: &Path, tol: f64, k: &str, l: &str, method: WignerMethod, s: &Sites, workers: usize) -> Outcome<()> {
    let (pf, params) = load(file, tol)?;
    let d = params.dim();
    let (k, l) = (parse_index(k, d)?, parse_index(l, d)?);
    if method == WignerMethod::Quadrature {
        require_quadrature_dim(d)?;
    }
    let pts = phase_sites(s, d)?;
    let set = IndexSet::closure(d, [k.clone(), l.clone()])?;
    let lag = Window::position(&params)?.lag();
    let spec = lag_spec(k.order().max(l.order()));
    let values = par_map(&pts, workers, |_, pt| {
        let flat = [pt.x.clone(), pt.xi.clone()].concat();
        at_point(
            match method {
                WignerMethod::Closed => wigner_closed(&params, &k, &l, pt),
                WignerMethod::Recurrence => wigner_table(&params, &set, pt).map(|t| t.get(&k, &l).expect("closure holds k, l")),
                WignerMethod::Quadrature => {
                    let f = |x: &[f64]| wavepacket_eval(&params, &k, x);
                    let g = |x: &[f64]| wavepacket_eval(&params, &l, x);
                    wigner_quadrature(params.eps(), &lag, &spec, &pt.x, &pt.xi, f, g).map(|r| r.value)
                }
            },
            &flat,
        )
    })?;
    let method_name = format!("{method:?}").to_lowercase();
    let mut table = base_table(phase_header(d, &["re", "im"]), "wigner", &pf, tol)
        .meta("method", method_name)
        .meta("k", &k)
        .meta("l", &l);
    if method == WignerMethod::Quadrature {
        table = table.meta("quadrature", format!("trapezoid {} nodes, radius {}", spec.nodes_per_axis, spec.truncation_radius));
    }
    push_phase_rows(&mut table, &pts, values.iter().map(|v| vec![v.re, v.im]))?;
    table.write(s.out.as_deref())
}

fn push_phase_rows(table: &mut Table, pts: &[PhasePoint], values: impl Iterator<Item = Vec<f64>>) -> Outcome<()> {
    for (pt, vals) in pts.iter().zip(values) {
        let mut row = [pt.x.clone(), pt.xi.clone()].concat();
        for v in vals {
            row.push(finite_at(v, "value", &row[..2 * pt.dim()])?);
        }
        table.rows.push(row);
    }
    Ok(())
}

fn fbi(file: &Path, tol: f64, k: &str, method: TransformMethod, s: &Sites, workers: usize, density: bool) -> Outcome<()> {
    let (pf, params) = load(file, tol)?;
    let d = params.dim();
    let k = parse_index(k, d)?;
    if method == TransformMethod::Quadrature {
        require_quadrature_dim(d)?;
    }
    let pts = phase_sites(s, d)?;
    let window = Window::position(&params)?.scaled(1.5);
    let spec = lag_spec(k.order());
    let values = par_map(&pts, workers, |_, pt| {
        let flat = [pt.x.clone(), pt.xi.clone()].concat();
        let t = match method {
            TransformMethod::Closed if density => return at_point(husimi(&params, &k, &pt.x, &pt.xi), &flat).map(|h| C64::new(h, 0.0)),
            TransformMethod::Closed => fbi_closed(&params, &k, &pt.x, &pt.xi),
            TransformMethod::Quadrature => {
                fbi_quadrature(params.eps(), &window, &spec, &pt.x, &pt.xi, |x| wavepacket_eval(&params, &k, x)).map(|r| r.value)
            }
        };
        at_point(t, &flat).map(|t| if density { C64::new(t.norm_sqr(), 0.0) } else { t })
    })?;
    let (command, cols): (&str, &[&str]) = if density { ("husimi", &["value"]) } else { ("fbi", &["re", "im"]) };
    let mut table = base_table(phase_header(d, cols), command, &pf, tol)
        .meta("method", format!("{method:?}").to_lowercase())
        .meta("k", &k);
    let rows = values.iter().map(|v| if density { vec![v.re] } else { vec![v.re, v.im] });
    push_phase_rows(&mut table, &pts, rows)?;
    table.write(s.out.as_deref())
}

/// A builtin test function or tabulated samples.
enum Target {
    /// Π_j (πσ²)^{-1/4} exp(−(x_j−q₀)²/(2σ²) + i p₀(x_j−q₀)/ε).
    ShiftedGaussian { q0: f64, p0: f64, sigma: f64 },
    /// Π_j ε^{-1/4} h_{k_j}((x_j−q_j)/√ε) · e^{i pᵀ(x−q)/ε}, the basis
    /// function of `Q = Id, P = i·Id` centred at the parameter file's (q, p).
    HermiteProduct(MultiIndex),
    Samples { grid: Grid, values: Vec<C64> },
}

fn builtin_args(s: &str, name: &str) -> Option<Outcome<Vec<f64>>> {
    let inner = s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    Some(
        inner
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("bad argument '{v}' in {s}"))))
            .collect(),
    )
}

fn parse_target(spec: &str, d: usize) -> Outcome<Target> {
    if let Some(body) = spec.strip_prefix("builtin:") {
        if let Some(args) = builtin_args(body, "shifted-gaussian") {
            let a = args?;
            if a.len() != 3 || !(a[2] > 0.0) {
                return Err(Failure::Usage("shifted-gaussian takes (q0, p0, sigma > 0)".into()));
            }
            return Ok(Target::ShiftedGaussian { q0: a[0], p0: a[1], sigma: a[2] });
        }
        if let Some(args) = builtin_args(body, "hermite-product") {
            let a = args?;
            if a.len() != d || a.iter().any(|v| *v < 0.0 || v.fract() != 0.0) {
                return Err(Failure::Usage(format!("hermite-product takes {d} non-negative integers")));
            }
            return Ok(Target::HermiteProduct(MultiIndex(a.iter().map(|v| *v as u32).collect())));
        }
        return Err(Failure::Usage(format!("unknown builtin '{body}'")));
    }
    let rows = io::read_rows(Path::new(spec), d + 2)?;
    let grid = sample_grid(&rows, d).ok_or_else(|| {
        Failure::Io(format!("{spec}: samples must fill a uniform tensor grid, listed with the last axis fastest"))
    })?;
    let values = rows.iter().map(|r| C64::new(r[d], r[d + 1])).collect();
    Ok(Target::Samples { grid, values })
}

/// The uniform tensor grid the sample rows enumerate, if they do.
fn sample_grid(rows: &[Vec<f64>], d: usize) -> Option<Grid> {
    let mut axes = Vec::with_capacity(d);
    for j in 0..d {
        let mut v: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        if v.len() < 2 {
            return None;
        }
        axes.push(Axis::new(v[0], v[v.len() - 1], v.len()).ok()?);
    }
    let grid = Grid::new(axes);
    if grid.len() != rows.len() {
        return None;
    }
    let ok = rows.iter().enumerate().all(|(i, r)| {
        grid.point(i).iter().zip(r).zip(&grid.axes).all(|((g, x), a)| (g - x).abs() <= 1e-9 * a.step())
    });
    ok.then_some(grid)
}

impl Target {
    fn eval(&self, params: &ParameterSet, x: &[f64]) -> hagedorn_core::Result<C64> {
        let eps = params.eps();
        Ok(match self {
            Target::ShiftedGaussian { q0, p0, sigma } => x
                .iter()
                .map(|&xj| {
                    let u = xj - q0;
                    C64::new(-u * u / (2.0 * sigma * sigma), p0 * u / eps).exp() * (std::f64::consts::PI * sigma * sigma).powf(-0.25)
                })
                .product(),
            Target::HermiteProduct(k) => {
                let se = eps.sqrt();
                let mut v = C64::new(1.0, 0.0);
                let mut phase = 0.0;
                for (j, &xj) in x.iter().enumerate() {
                    let u = xj - params.position()[j];
                    v *= hermite_function(k.get(j), u / se) / se.sqrt();
                    phase += params.momentum()[j] * u / eps;
                }
                v * C64::new(0.0, phase).exp()
            }
            Target::Samples { .. } => unreachable!("samples are integrated on their own grid"),
        })
    }
}

struct Fit {
    coeffs: CoefficientVector,
    l2_residual: f64,
    bessel_defect: f64,
    warning: Option<String>,
}

fn fit(params: &ParameterSet, target: &Target, cap: u64, quad: Option<usize>) -> Outcome<Fit> {
    let set = hyperbolic_set(params.dim(), cap)?;
    if let Target::Samples { grid, values } = target {
        // The samples' own trapezoid rule.
        let n = set.len();
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        let mut norm = 0.0;
        let mut tables = Vec::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            let x = grid.point(i);
            let w = grid.weight(i);
            let t = wavepacket_table(params, &set, &x)?;
            for (c, phi) in coeffs.iter_mut().zip(&t) {
                *c += phi.conj() * v * w;
            }
            norm += v.norm_sqr() * w;
            tables.push(t);
        }
        let mut res = 0.0;
        for (i, (v, t)) in values.iter().zip(&tables).enumerate() {
            let approx: C64 = t.iter().zip(&coeffs).map(|(a, b)| a * b).sum();
            res += (v - approx).norm_sqr() * grid.weight(i);
        }
        let captured: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        return Ok(Fit {
            coeffs: CoefficientVector::new(set, coeffs)?,
            l2_residual: res.sqrt(),
            bessel_defect: norm - captured,
            warning: None,
        });
    }
    let window = Window::position(params)?;
    let mut spec = projection_spec(&set);
    if let Some(n) = quad {
        spec.nodes_per_axis = n;
    }
    let f = |x: &[f64]| target.eval(params, x);
    let proj = project(params, &set, &window, &spec, f)?;
    let report = error_report(params, &proj.coeffs, &window, &spec, f)?;
    let warning = (proj.boundary_ratio > hagedorn_core::quadrature::BOUNDARY_WARNING)
        .then(|| format!("quadrature box truncates the integrand (boundary ratio {:.1e})", proj.boundary_ratio));
    Ok(Fit { coeffs: proj.coeffs, l2_residual: report.l2_residual, bessel_defect: report.bessel_defect, warning })
}

fn project_cmd(file: &Path, tol: f64, function: &str, cap: u64, quad: Option<usize>, study: bool, out: Option<&Path>) -> Outcome<()> {
    let (_, params) = load(file, tol)?;
    let target = parse_target(function, params.dim())?;
    let result = fit(&params, &target, cap, quad)?;
    if let Some(w) = &result.warning {
        eprintln!("hagkit: warning: {w}");
    }
    if study {
        let mut caps = vec![cap];
        while *caps.last().expect("non-empty") > 1 {
            let next = caps.last().expect("non-empty") / 2;
            caps.push(next);
        }
        caps.reverse();
        let mut table = Table::new(vec!["K".into(), "size".into(), "l2_residual".into(), "bessel_defect".into(), "ratio".into()])
            .meta("command", "project --study")
            .meta("function", function);
        let mut prev = f64::NAN;
        for kc in caps {
            let f = if kc == cap { Fit { coeffs: result.coeffs.clone(), warning: None, ..result } } else { fit(&params, &target, kc, quad)? };
            table.rows.push(vec![kc as f64, f.coeffs.set().len() as f64, f.l2_residual, f.bessel_defect, f.l2_residual / prev]);
            prev = f.l2_residual;
        }
        table.write(None)?;
    }
    let mut file_out = CoefficientFile::new(&params, function, &result.coeffs);
    file_out.cap = Some(cap);
    file_out.l2_residual = Some(result.l2_residual);
    file_out.bessel_defect = Some(result.bessel_defect);
    match out {
        Some(path) => io::write_json(path, &file_out),
        None if !study => {
            println!("{}", serde_json::to_string_pretty(&file_out).expect("plain data serializes"));
            Ok(())
        }
        None => Ok(()),
    }
}

fn wignerfun(file: &Path, tol: f64, coeffs: &Path, s: &Sites, workers: usize) -> Outcome<()> {
    let (pf, params) = load(file, tol)?;
    let cf: CoefficientFile = io::read_json(coeffs)?;
    let cv = cf.coefficients(&pf.hash())?;
    let d = params.dim();
    let pts = phase_sites(s, d)?;
    let values = par_map(&pts, workers, |_, pt| {
        at_point(wigner_of_function(&params, &cv, pt), &[pt.x.clone(), pt.xi.clone()].concat())
    })?;
    let mut table = base_table(phase_header(d, &["value"]), "wignerfun", &pf, tol)
        .meta("function", &cf.function)
        .meta("coefficients", cv.set().len());
    push_phase_rows(&mut table, &pts, values.iter().map(|v| vec![*v]))?;
    table.write(s.out.as_deref())
}

fn potential_from_file(path: &Path, d: usize) -> Outcome<Box<dyn Potential + Send + Sync>> {
    let pf: PotentialFile = io::read_json(path)?;
    if pf.hessian.len() != d || pf.hessian.iter().any(|r| r.len() != d) {
        return Err(Failure::Io(format!("{}: hessian must be {d}x{d}", path.display())));
    }
    let h = RMatrix::from_fn(d, d, |i, j| pf.hessian[i][j]);
    let g = pf.gradient.clone().unwrap_or_else(|| vec![0.0; d]);
    if g.len() != d {
        return Err(Failure::Io(format!("{}: gradient needs {d} entries", path.display())));
    }
    let quad = Quadratic::new(h, g, pf.offset)?;
    let Some(a) = pf.quartic.clone() else {
        return Ok(Box::new(quad));
    };
    if a.len() != d {
        return Err(Failure::Io(format!("{}: quartic needs {d} entries", path.display())));
    }
    let (qv, qg, qh) = (quad.clone(), quad.clone(), quad);
    let (av, ag, ah) = (a.clone(), a.clone(), a);
    Ok(Box::new(Callable {
        dim: d,
        value: Box::new(move |x| qv.value(x) + x.iter().zip(&av).map(|(x, a)| 0.25 * a * x.powi(4)).sum::<f64>()),
        gradient: Box::new(move |x| qg.gradient(x).iter().zip(x.iter().zip(&ag)).map(|(g, (x, a))| g + a * x.powi(3)).collect()),
        hessian: Box::new(move |x| {
            let mut h = qh.hessian(x);
            for j in 0..x.len() {
                h[(j, j)] += 3.0 * ah[j] * x[j] * x[j];
            }
            h
        }),
    }))
}

fn propagate_cmd(file: &Path, tol: f64, potential: &str, t_final: f64, dt: f64, drift_tol: f64, out: Option<&Path>) -> Outcome<()> {
    let (pf, params) = load(file, tol)?;
    let d = params.dim();
    let pot: Box<dyn Potential + Send + Sync> = match potential {
        "harmonic" => Box::new(Quadratic::harmonic(d)),
        "quartic" => Box::new(Quartic { dim: d }),
        path => potential_from_file(Path::new(path), d)?,
    };
    if !(drift_tol > 0.0) {
        return Err(Failure::Usage("--drift-tol must be positive".into()));
    }
    let traj = propagate(&TrajectoryState::new(params), pot.as_ref(), t_final, dt, &StepConfig { drift_tol })?;
    let mut table = base_table(io::trajectory_header(d), "propagate", &pf, tol)
        .meta("potential", potential)
        .meta("T", io::fmt_float(t_final))
        .meta("dt", io::fmt_float(dt))
        .meta("drift_tol", format!("{drift_tol:e}"));
    if let Some(e) = &traj.failure {
        table = table.meta("status", format!("stopped early: {e}"));
    }
    table.rows = traj.states.iter().map(io::trajectory_row).collect();
    table.write(out)?;
    match traj.failure {
        Some(e) => Err(Failure::from(e)),
        None => Ok(()),
    }
}

fn selftest(only: Option<&str>) -> Outcome<()> {
    let ids: Vec<u32> = match only {
        Some(list) => list
            .split(',')
            .map(|v| v.trim().parse::<u32>().map_err(|_| Failure::Usage(format!("bad criterion '{v}'"))))
            .collect::<Outcome<_>>()?,
        None => acceptance::CRITERIA.iter().map(|(id, _)| *id).collect(),
    };
    let mut failed = 0;
    for id in ids {
        let r = acceptance::run_one(id).ok_or_else(|| Failure::Usage(format!("no criterion {id}")))?;
        println!("{r}");
        if !r.passed() {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Failure::Numerical(format!("{failed} acceptance criteria failed")));
    }
    Ok(())
}
