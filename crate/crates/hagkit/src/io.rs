//! File formats: parameter JSON, grids, point CSVs, result CSVs, coefficient
//! JSON and trajectory CSVs.
//!
//! Result CSVs open with `#`-prefixed metadata lines and carry every float
//! with 17 significant digits, so a parse of the file reproduces the values
//! bit for bit. Nothing time-dependent is written.

use std::fs;
use std::io::Write;
use std::path::Path;

use hagedorn_core::dynamics::TrajectoryState;
use hagedorn_core::hagedorn::CoefficientVector;
use hagedorn_core::linalg::CMatrix;
use hagedorn_core::params::{validate, ValidationReport};
use hagedorn_core::quadrature::{Axis, Grid};
use hagedorn_core::{IndexSet, MultiIndex, ParameterSet, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Failure, Outcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
        MatrixFile { re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    fn to_matrix(&self, d: usize, name: &str) -> Outcome<CMatrix> {
        let square = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if !square(&self.re) || !square(&self.im) {
            return Err(Failure::Io(format!("schema: {name}.re and {name}.im must be {d}x{d}")));
        }
        Ok(CMatrix::from_fn(d, d, |i, j| C64::new(self.re[i][j], self.im[i][j])))
    }
}

/// `{epsilon, q, p, Q: {re, im}, P: {re, im}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub epsilon: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    #[serde(rename = "Q")]
    pub qm: MatrixFile,
    #[serde(rename = "P")]
    pub pm: MatrixFile,
}

impl ParamsFile {
    pub fn from_params(params: &ParameterSet) -> Self {
        ParamsFile {
            epsilon: params.eps(),
            q: params.position().to_vec(),
            p: params.momentum().to_vec(),
            qm: MatrixFile::from_matrix(params.q_matrix()),
            pm: MatrixFile::from_matrix(params.p_matrix()),
        }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    fn matrices(&self) -> Outcome<(CMatrix, CMatrix)> {
        let d = self.dim();
        if d == 0 || self.p.len() != d {
            return Err(Failure::Io("schema: q and p must be non-empty and of equal length".into()));
        }
        Ok((self.qm.to_matrix(d, "Q")?, self.pm.to_matrix(d, "P")?))
    }

    pub fn report(&self, tol: f64) -> Outcome<ValidationReport> {
        let (qm, pm) = self.matrices()?;
        validate(self.epsilon, &self.q, &self.p, &qm, &pm, tol).map_err(|e| Failure::Io(format!("schema: {e}")))
    }

    /// Validates at `tol`; a failed structural condition is a usage error.
    pub fn to_params(&self, tol: f64) -> Outcome<ParameterSet> {
        let report = self.report(tol)?;
        if !report.passed() {
            return Err(Failure::Usage(format!("parameters fail validation: {report}")));
        }
        let (qm, pm) = self.matrices()?;
        Ok(ParameterSet::with_tolerance(self.epsilon, self.q.clone(), self.p.clone(), qm, pm, tol)?)
    }

    /// First 16 hex digits of the SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("plain data serializes");
        let digest = Sha256::digest(json.as_bytes());
        format!("{digest:x}")[..16].to_string()
    }
}

fn read_to_string(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(&path.display().to_string(), e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Outcome<T> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome<()> {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::io(&path.display().to_string(), e))
}

pub fn read_params(path: &Path) -> Outcome<ParamsFile> {
    read_json(path)
}

/// `min:max:count` per axis, axes separated by commas. Endpoints are
/// inclusive and `count ≥ 2`.
pub fn parse_grid(spec: &str) -> Outcome<Grid> {
    let mut axes = Vec::new();
    for part in spec.split(',') {
        let fields: Vec<&str> = part.trim().split(':').collect();
        let bad = || Failure::Usage(format!("grid axis '{part}' is not min:max:count"));
        if fields.len() != 3 {
            return Err(bad());
        }
        let min: f64 = fields[0].parse().map_err(|_| bad())?;
        let max: f64 = fields[1].parse().map_err(|_| bad())?;
        let count: usize = fields[2].parse().map_err(|_| bad())?;
        if count < 2 || !(min < max) {
            return Err(Failure::Usage(format!("grid axis '{part}' needs min < max and count ≥ 2")));
        }
        axes.push(Axis::new(min, max, count)?);
    }
    Ok(Grid::new(axes))
}

pub fn grid_points(grid: &Grid) -> Vec<Vec<f64>> {
    (0..grid.len()).map(|i| grid.point(i)).collect()
}

/// Rows of `columns` numbers from a CSV. `#` lines are skipped, and so is a
/// first row that does not parse as numbers.
pub fn read_rows(path: &Path, columns: usize) -> Outcome<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Failure::io(&path.display().to_string(), e))?;
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::io(&path.display().to_string(), e))?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) if row.len() == columns => rows.push(row),
            Ok(row) => {
                return Err(Failure::Io(format!(
                    "{}: row {} has {} columns, expected {columns}",
                    path.display(),
                    n + 1,
                    row.len()
                )))
            }
            Err(_) if n == 0 => continue,
            Err(e) => return Err(Failure::Io(format!("{}: row {}: {e}", path.display(), n + 1))),
        }
    }
    Ok(rows)
}

/// Phase-space points `(x, ξ)` from a CSV with `2d` columns.
pub fn read_phase_points(path: &Path, d: usize) -> Outcome<Vec<(Vec<f64>, Vec<f64>)>> {
    Ok(read_rows(path, 2 * d)?.into_iter().map(|mut r| {
        let xi = r.split_off(d);
        (r, xi)
    }).collect())
}

/// A result table with `#` metadata.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table { meta: Vec::new(), header, rows: Vec::new() }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn write_to(&self, out: impl Write) -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(out);
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| fmt_float(*v)))?;
        }
        w.flush()
    }

    /// To a file, or to stdout when `path` is `None`.
    pub fn write(&self, path: Option<&Path>) -> Outcome<()> {
        let result = match path {
            Some(p) => fs::File::create(p).and_then(|f| self.write_to(f)),
            None => self.write_to(std::io::stdout().lock()),
        };
        result.map_err(|e| Failure::io(&path.map_or("stdout".into(), |p| p.display().to_string()), e))
    }
}

/// Round-trip representation: 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn coordinate_header(prefix: &str, d: usize) -> Vec<String> {
    (1..=d).map(|j| format!("{prefix}{j}")).collect()
}

/// Coefficients of `Σ c_k φ_k` together with the basis they belong to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientFile {
    pub params_hash: String,
    pub params: ParamsFile,
    pub function: String,
    pub cap: Option<u64>,
    pub l2_residual: Option<f64>,
    pub bessel_defect: Option<f64>,
    pub indices: Vec<Vec<u32>>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl CoefficientFile {
    pub fn new(params: &ParameterSet, function: &str, cv: &CoefficientVector) -> Self {
        let pf = ParamsFile::from_params(params);
        CoefficientFile {
            params_hash: pf.hash(),
            params: pf,
            function: function.to_string(),
            cap: None,
            l2_residual: None,
            bessel_defect: None,
            indices: cv.set().iter().map(|k| k.0.clone()).collect(),
            re: cv.coeffs().iter().map(|c| c.re).collect(),
            im: cv.coeffs().iter().map(|c| c.im).collect(),
        }
    }

    /// The coefficients, after checking them against `expected_hash`.
    pub fn coefficients(&self, expected_hash: &str) -> Outcome<CoefficientVector> {
        if self.params.hash() != self.params_hash {
            return Err(Failure::Usage("coefficient file: embedded parameters do not match its hash".into()));
        }
        if self.params_hash != expected_hash {
            return Err(Failure::Usage(format!(
                "coefficient file was computed for parameters {} but {} were given",
                self.params_hash, expected_hash
            )));
        }
        let n = self.indices.len();
        if self.re.len() != n || self.im.len() != n {
            return Err(Failure::Io("schema: indices, re and im must have equal length".into()));
        }
        let d = self.params.dim();
        if self.indices.iter().any(|k| k.len() != d) {
            return Err(Failure::Io(format!("schema: every index needs {d} entries")));
        }
        let set = IndexSet::new(d, self.indices.iter().map(|k| MultiIndex(k.clone())))?;
        let map = self
            .indices
            .iter()
            .zip(self.re.iter().zip(&self.im))
            .map(|(k, (re, im))| (MultiIndex(k.clone()), C64::new(*re, *im)))
            .collect::<std::collections::BTreeMap<_, _>>();
        let coeffs = set.iter().map(|k| map[k]).collect();
        Ok(CoefficientVector::new(set, coeffs)?)
    }
}

/// `V(x) = ½xᵀHx + gᵀx + v₀ + Σ a_j x_j⁴/4`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    pub hessian: Vec<Vec<f64>>,
    #[serde(default)]
    pub gradient: Option<Vec<f64>>,
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub quartic: Option<Vec<f64>>,
}

pub fn trajectory_header(d: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend(coordinate_header("q", d));
    h.extend(coordinate_header("p", d));
    for name in ["Q", "P"] {
        for i in 1..=d {
            for j in 1..=d {
                h.push(format!("{name}{i}{j}_re"));
                h.push(format!("{name}{i}{j}_im"));
            }
        }
    }
    h.push("S".into());
    h.push("residual".into());
    h
}

pub fn trajectory_row(s: &TrajectoryState) -> Vec<f64> {
    let d = s.params.dim();
    let mut row = vec![s.t];
    row.extend_from_slice(s.params.position());
    row.extend_from_slice(s.params.momentum());
    for m in [s.params.q_matrix(), s.params.p_matrix()] {
        for i in 0..d {
            for j in 0..d {
                row.push(m[(i, j)].re);
                row.push(m[(i, j)].im);
            }
        }
    }
    row.push(s.action);
    row.push(s.residual);
    row
}
