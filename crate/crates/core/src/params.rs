//! Hagedorn parameter sets `(ε, q, p, Q, P)` and the maps between them.
//!
//! A [`ParameterSet`] can only be obtained through validation, so every
//! downstream routine may assume
//!
//! * `QᵀP − PᵀQ = 0` and `Q*P − P*Q = 2i·Id`,
//! * `Q` and `P` invertible,
//! * `Im(PQ⁻¹)` positive definite.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};

pub const DEFAULT_TOL: f64 = 1e-10;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Every residual that [`validate`] inspects, reported together.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub tol: f64,
    /// `max |QᵀP − PᵀQ|`.
    pub symmetry_residual: f64,
    /// `max |Q*P − P*Q − 2i·Id|`.
    pub symplectic_residual: f64,
    /// Smallest eigenvalue of `Im(PQ⁻¹)`; NaN when `Q` is singular.
    pub width_min_eigenvalue: f64,
    pub q_min_singular: f64,
    pub p_min_singular: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.symmetry_residual <= self.tol
            && self.symplectic_residual <= self.tol
            && self.q_min_singular > self.tol
            && self.p_min_singular > self.tol
            && self.width_min_eigenvalue > 0.0
    }

    pub fn worst_residual(&self) -> f64 {
        self.symmetry_residual.max(self.symplectic_residual)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "symmetry {:.3e}, symplectic {:.3e}, min eig Im(C) {:.3e}, \
             min sv Q {:.3e}, min sv P {:.3e} (tol {:.1e})",
            self.symmetry_residual,
            self.symplectic_residual,
            self.width_min_eigenvalue,
            self.q_min_singular,
            self.p_min_singular,
            self.tol
        )
    }
}

fn check_shapes(eps: f64, q: &[f64], p: &[f64], qm: &CMatrix, pm: &CMatrix) -> Result<usize> {
    let d = q.len();
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidInput("epsilon must be finite and positive".into()));
    }
    for n in [p.len(), qm.nrows(), qm.ncols(), pm.nrows(), pm.ncols()] {
        if n != d {
            return Err(Error::DimensionMismatch { expected: d, found: n });
        }
    }
    if q.iter().chain(p.iter()).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("position or momentum"));
    }
    if !linalg::all_finite(qm) || !linalg::all_finite(pm) {
        return Err(Error::NonFinite("Q or P"));
    }
    Ok(d)
}

/// Residuals of the structural conditions on `(Q, P)`.
///
/// Shape and finiteness problems are errors; a failed condition is reported,
/// not raised.
pub fn validate(
    eps: f64,
    q: &[f64],
    p: &[f64],
    qm: &CMatrix,
    pm: &CMatrix,
    tol: f64,
) -> Result<ValidationReport> {
    let d = check_shapes(eps, q, p, qm, pm)?;
    let sym = qm.transpose() * pm - pm.transpose() * qm;
    let spl = qm.adjoint() * pm - pm.adjoint() * qm - linalg::identity(d) * (I * 2.0);
    let width_min_eigenvalue = match qm.clone().try_inverse() {
        Some(qi) => linalg::min_sym_eigenvalue(&linalg::imag_part(&(pm * qi))),
        None => f64::NAN,
    };
    Ok(ValidationReport {
        tol,
        symmetry_residual: linalg::max_abs(&sym),
        symplectic_residual: linalg::max_abs(&spl),
        width_min_eigenvalue,
        q_min_singular: linalg::min_singular_value(qm),
        p_min_singular: linalg::min_singular_value(pm),
    })
}

/// A validated parameter set with cached derived quantities.
#[derive(Clone, Debug)]
pub struct ParameterSet {
    eps: f64,
    q: Vec<f64>,
    p: Vec<f64>,
    qm: CMatrix,
    pm: CMatrix,
    q_inv: CMatrix,
    c: CMatrix,
    det_q_inv_sqrt: C64,
}

impl ParameterSet {
    pub fn new(eps: f64, q: Vec<f64>, p: Vec<f64>, qm: CMatrix, pm: CMatrix) -> Result<Self> {
        Self::with_tolerance(eps, q, p, qm, pm, DEFAULT_TOL)
    }

    pub fn with_tolerance(
        eps: f64,
        q: Vec<f64>,
        p: Vec<f64>,
        qm: CMatrix,
        pm: CMatrix,
        tol: f64,
    ) -> Result<Self> {
        let report = validate(eps, &q, &p, &qm, &pm, tol)?;
        if !report.passed() {
            return Err(Error::InvalidParameters(Box::new(report)));
        }
        let q_inv = linalg::inverse(&qm, "Q")?;
        let c = &pm * &q_inv;
        let det_q_inv_sqrt = C64::new(1.0, 0.0) / qm.determinant().sqrt();
        Ok(ParameterSet { eps, q, p, qm, pm, q_inv, c, det_q_inv_sqrt })
    }

    /// Hermite functions: `Q = Id`, `P = i·Id`.
    pub fn standard(eps: f64, q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        let d = q.len();
        Self::new(eps, q, p, linalg::identity(d), linalg::identity(d) * I)
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn position(&self) -> &[f64] {
        &self.q
    }

    pub fn momentum(&self) -> &[f64] {
        &self.p
    }

    pub fn q_matrix(&self) -> &CMatrix {
        &self.qm
    }

    pub fn p_matrix(&self) -> &CMatrix {
        &self.pm
    }

    pub fn q_inverse(&self) -> &CMatrix {
        &self.q_inv
    }

    /// `C = PQ⁻¹`, complex symmetric with positive definite imaginary part.
    pub fn width(&self) -> &CMatrix {
        &self.c
    }

    /// The branch of `det(Q)^{-1/2}` in use; principal unless replaced.
    pub fn det_q_inv_sqrt(&self) -> C64 {
        self.det_q_inv_sqrt
    }

    /// Replaces the branch of `det(Q)^{-1/2}`; `root` must square to `1/det(Q)`.
    pub fn with_det_root(mut self, root: C64) -> Result<Self> {
        let target = C64::new(1.0, 0.0) / self.qm.determinant();
        if (root * root - target).norm() > 1e-8 * target.norm() {
            return Err(Error::InvalidInput("root does not square to 1/det(Q)".into()));
        }
        self.det_q_inv_sqrt = root;
        Ok(self)
    }

    pub fn with_center(&self, q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != self.dim() || p.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: q.len() });
        }
        let mut out = self.clone();
        out.q = q;
        out.p = p;
        Ok(out)
    }

    /// Right-multiplies `Q` and `P` by a unitary `U`.
    pub fn rotated(&self, u: &CMatrix) -> Result<Self> {
        Self::new(self.eps, self.q.clone(), self.p.clone(), &self.qm * u, &self.pm * u)
    }

    pub fn report(&self, tol: f64) -> ValidationReport {
        validate(self.eps, &self.q, &self.p, &self.qm, &self.pm, tol)
            .expect("shapes were checked at construction")
    }
}

/// `C`, `Im C` and the residual of `Im C = (QQ*)⁻¹`.
#[derive(Clone, Debug)]
pub struct WidthMatrix {
    pub c: CMatrix,
    pub im_c: RMatrix,
    pub inverse_gram_residual: f64,
}

pub fn width_matrix(params: &ParameterSet) -> WidthMatrix {
    let c = params.width().clone();
    let im_c = linalg::imag_part(&c);
    let gram = params.q_matrix() * params.q_matrix().adjoint();
    let residual = match gram.try_inverse() {
        Some(g) => linalg::max_abs(&(g - linalg::complexify(&im_c))),
        None => f64::INFINITY,
    };
    WidthMatrix { c, im_c, inverse_gram_residual: residual }
}

/// `F = [[Re Q, Im Q], [Re P, Im P]]`, a real symplectic 2d×2d matrix.
pub fn symplectic_embed(params: &ParameterSet) -> RMatrix {
    let d = params.dim();
    let mut f = RMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let qv = params.q_matrix()[(i, j)];
            let pv = params.p_matrix()[(i, j)];
            f[(i, j)] = qv.re;
            f[(i, j + d)] = qv.im;
            f[(i + d, j)] = pv.re;
            f[(i + d, j + d)] = pv.im;
        }
    }
    f
}

/// `J = [[0, −Id], [Id, 0]]`.
pub fn symplectic_j(d: usize) -> RMatrix {
    let mut j = RMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        j[(i, i + d)] = -1.0;
        j[(i + d, i)] = 1.0;
    }
    j
}

/// `F⁻¹ = −J Fᵀ J`.
pub fn symplectic_inverse(f: &RMatrix) -> RMatrix {
    let j = symplectic_j(f.nrows() / 2);
    -(&j * f.transpose() * &j)
}

/// `max |FᵀJF − J|`.
pub fn symplectic_defect(f: &RMatrix) -> f64 {
    let j = symplectic_j(f.nrows() / 2);
    linalg::max_abs_real(&(f.transpose() * &j * f - &j))
}

pub fn is_complex_symmetric(w: &CMatrix, tol: f64) -> bool {
    linalg::max_abs(&(w - w.transpose())) <= tol
}

/// Parameters of a squeezed state: `Q = (Id+W)(Id−W*W)^{-1/2}`,
/// `P = i(Id−W)(Id−W*W)^{-1/2}`.
pub fn from_squeeze(eps: f64, q: Vec<f64>, p: Vec<f64>, w: &CMatrix) -> Result<ParameterSet> {
    let d = q.len();
    if w.nrows() != d || w.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: w.nrows() });
    }
    if !is_complex_symmetric(w, DEFAULT_TOL) {
        return Err(Error::InvalidInput("squeeze matrix must be complex symmetric".into()));
    }
    if linalg::spectral_norm(w) >= 1.0 {
        return Err(Error::InvalidInput("squeeze matrix must have spectral norm < 1".into()));
    }
    let id = linalg::identity(d);
    let s = linalg::hermitian_inv_sqrt(&(&id - w.adjoint() * w), "Id − W*W")?;
    let qm = (&id + w) * &s;
    let pm = (&id - w) * &s * I;
    ParameterSet::new(eps, q, p, qm, pm)
}

/// `W = (Q+iP)(Q−iP)⁻¹` and the unitary `V` from `Q − iP = |Q−iP|V*`.
///
/// `from_squeeze(W)` returns `(QV, PV)`.
#[derive(Clone, Debug)]
pub struct SqueezeData {
    pub w: CMatrix,
    pub v: CMatrix,
}

pub fn to_squeeze(params: &ParameterSet) -> Result<SqueezeData> {
    let qm = params.q_matrix();
    let pm = params.p_matrix();
    let minus = qm - pm * I;
    let plus = qm + pm * I;
    let w = plus * linalg::inverse(&minus, "Q − iP")?;
    let abs_inv = linalg::hermitian_inv_sqrt(&(&minus * minus.adjoint()), "|Q − iP|²")?;
    let v = minus.adjoint() * abs_inv;
    Ok(SqueezeData { w, v })
}

/// `Q = |Q|U*` with `|Q| = (QQ*)^{1/2}`; returns `(|Q|, PU)` and `U`.
pub fn polar_normalize(params: &ParameterSet) -> Result<(ParameterSet, CMatrix)> {
    let qm = params.q_matrix();
    let abs_q = linalg::hermitian_sqrt(&(qm * qm.adjoint()), "QQ*")?;
    // QQ* is real symmetric, so |Q| is real up to rounding.
    let abs_q = linalg::complexify(&linalg::real_part(&abs_q));
    let u = qm.adjoint() * linalg::inverse(&abs_q, "|Q|")?;
    let out = ParameterSet::new(
        params.eps(),
        params.position().to_vec(),
        params.momentum().to_vec(),
        abs_q,
        params.p_matrix() * &u,
    )?;
    Ok((out, u))
}

/// Fourier image: `ℱφ_k[q,p,Q,P] = phase·branch·φ_k[p,−q,P,−Q]` for every `k`.
///
/// `phase = e^{−ipᵀq/ε}`. `branch` is the unimodular factor reconciling the
/// principal `det(·)^{-1/2}` of both sides. No `k`-dependent factor appears:
/// the raising operators of `(P, −Q)` already carry the `(−i)^{|k|}` that the
/// Fourier transform produces on Hermite functions.
#[derive(Clone, Debug)]
pub struct FourierDual {
    pub params: ParameterSet,
    pub phase: C64,
    pub branch: C64,
}

pub fn fourier_dual(params: &ParameterSet) -> Result<FourierDual> {
    let neg_q: Vec<f64> = params.position().iter().map(|x| -x).collect();
    let dual = ParameterSet::new(
        params.eps(),
        params.momentum().to_vec(),
        neg_q,
        params.p_matrix().clone(),
        -params.q_matrix(),
    )?;
    let pq: f64 = params.position().iter().zip(params.momentum()).map(|(a, b)| a * b).sum();
    let phase = (-I * (pq / params.eps())).exp();
    // Gaussian integral of exp(−uᵀ(−iC)u/(2ε)) on the branch continuous in Re(−iC) > 0.
    let minus_ic = params.width() * (-I);
    let gauss = linalg::det_inv_sqrt_right_half(&minus_ic, "Im C")?;
    let branch = params.det_q_inv_sqrt() * gauss / dual.det_q_inv_sqrt();
    Ok(FourierDual { params: dual, phase, branch })
}

/// `T_{a,b}φ_k[q,p,Q,P] = phase·φ_k[q+a, p+b, Q, P]` with
/// `phase = e^{(i/ε) bᵀ(q + a/2)}`.
pub fn translate_params(params: &ParameterSet, a: &[f64], b: &[f64]) -> Result<(ParameterSet, C64)> {
    let d = params.dim();
    if a.len() != d || b.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: a.len().min(b.len()) });
    }
    let q: Vec<f64> = params.position().iter().zip(a).map(|(x, y)| x + y).collect();
    let p: Vec<f64> = params.momentum().iter().zip(b).map(|(x, y)| x + y).collect();
    let arg: f64 = b
        .iter()
        .zip(params.position().iter().zip(a))
        .map(|(bj, (qj, aj))| bj * (qj + 0.5 * aj))
        .sum();
    let phase = (I * (arg / params.eps())).exp();
    Ok((params.with_center(q, p)?, phase))
}
