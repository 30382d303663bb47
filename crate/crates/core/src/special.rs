//! Hermite and Laguerre scalars, and their closed-form phase-space transforms
//! at `ε = 1`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fm;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn finite(z: C64, what: &'static str) -> Result<C64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Physicists' Hermite polynomial `h_k`: `h_{k+1} = 2x h_k − 2k h_{k−1}`.
pub fn hermite_poly(k: u32, x: C64) -> Result<C64> {
    finite(x, "hermite argument")?;
    let (mut prev, mut cur) = (C64::new(0.0, 0.0), ONE);
    for n in 0..k {
        let next = x * cur * 2.0 - prev * (2.0 * n as f64);
        prev = cur;
        cur = next;
    }
    finite(cur, "hermite polynomial")
}

/// Generalized Laguerre polynomial `L_k^{(γ)}` by the three-term recurrence.
pub fn laguerre_poly(k: u32, gamma: f64, x: C64) -> Result<C64> {
    finite(x, "laguerre argument")?;
    if k == 0 {
        return Ok(ONE);
    }
    let (mut prev, mut cur) = (ONE, ONE * (1.0 + gamma) - x);
    for n in 1..k {
        let n = n as f64;
        let next = ((ONE * (2.0 * n + 1.0 + gamma) - x) * cur - prev * (n + gamma)) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    finite(cur, "laguerre polynomial")
}

/// L²-normalized Hermite function, `‖φ_k‖ = 1`.
pub fn hermite_function(k: u32, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = fm::exp(-0.5 * x * x) / fm::sqrt(fm::sqrt(core::f64::consts::PI));
    let s2 = core::f64::consts::SQRT_2;
    for n in 0..k {
        let next = (s2 * x * cur - fm::sqrt(n as f64) * prev) / fm::sqrt(n as f64 + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `sqrt(m!/n!)` for `m ≤ n`, as a running product.
fn sqrt_factorial_ratio(m: u32, n: u32) -> f64 {
    (m + 1..=n).fold(1.0, |acc, i| acc / fm::sqrt(i as f64))
}

/// `W(φ_k, φ_l)(x, ξ)` for Hermite functions at `ε = 1`, with `z = x + iξ`.
///
/// The `k < l` branch is the conjugate of `(l, k)`, so Hermitian symmetry is
/// exact.
pub fn hermite_wigner(k: u32, l: u32, x: f64, xi: f64) -> Result<C64> {
    if k < l {
        return hermite_wigner(l, k, x, xi).map(|w| w.conj());
    }
    let z = C64::new(x, xi);
    let r2 = z.norm_sqr();
    let m = k - l;
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    let scale = sign / core::f64::consts::PI
        * fm::powi(core::f64::consts::SQRT_2, m as i32)
        * sqrt_factorial_ratio(l, k)
        * fm::exp(-r2);
    let lag = laguerre_poly(l, m as f64, ONE * (2.0 * r2))?;
    finite(z.powu(m) * lag * scale, "hermite wigner")
}

/// FBI transform of the Hermite function `φ_k` at `ε = 1`.
pub fn hermite_fbi(k: u32, x: f64, xi: f64) -> Result<C64> {
    let z = C64::new(x, xi);
    let phase = C64::new(0.0, 0.5 * x * xi).exp();
    let norm = fm::sqrt(
        core::f64::consts::PI * fm::powi(2.0, k as i32 + 1) * fm::factorial(k),
    );
    finite(
        phase * z.conj().powu(k) * (fm::exp(-0.25 * z.norm_sqr()) / norm),
        "hermite fbi",
    )
}

pub fn hermite_husimi(k: u32, x: f64, xi: f64) -> Result<f64> {
    hermite_fbi(k, x, xi).map(|t| t.norm_sqr())
}

/// Two-argument Laguerre kernel
/// `Σ_ν m!n!/((m−ν)!(n−ν)!ν!) 2^ν (2η)^{m−ν} (2ζ)^{n−ν}` in closed form.
pub fn laguerre_kernel_two(m: u32, n: u32, eta: C64, zeta: C64) -> Result<C64> {
    let arg = eta * zeta * (-2.0);
    if m <= n {
        let lag = laguerre_poly(m, (n - m) as f64, arg)?;
        finite(
            zeta.powu(n - m) * lag * (fm::powi(2.0, n as i32) * fm::factorial(m)),
            "laguerre kernel",
        )
    } else {
        let lag = laguerre_poly(n, (m - n) as f64, arg)?;
        finite(
            eta.powu(m - n) * lag * (fm::powi(2.0, m as i32) * fm::factorial(n)),
            "laguerre kernel",
        )
    }
}

/// One-argument kernel `ℒ_{m,n}(ζ) = laguerre_kernel_two(m, n, ζ, −ζ̄)`.
pub fn laguerre_kernel_one(m: u32, n: u32, zeta: C64) -> Result<C64> {
    laguerre_kernel_two(m, n, zeta, -zeta.conj())
}

/// `ℒ_{m,n}(ζ)/√(2^{m+n} m! n!)`, evaluated without forming the factorials.
pub(crate) fn laguerre_kernel_one_normalized(m: u32, n: u32, zeta: C64) -> Result<C64> {
    let r2 = zeta.norm_sqr();
    if m <= n {
        let d = n - m;
        let lag = laguerre_poly(m, d as f64, ONE * (2.0 * r2))?;
        let s = fm::powi(core::f64::consts::SQRT_2, d as i32) * sqrt_factorial_ratio(m, n);
        Ok((-zeta.conj()).powu(d) * lag * s)
    } else {
        let d = m - n;
        let lag = laguerre_poly(n, d as f64, ONE * (2.0 * r2))?;
        let s = fm::powi(core::f64::consts::SQRT_2, d as i32) * sqrt_factorial_ratio(n, m);
        Ok(zeta.powu(d) * lag * s)
    }
}
