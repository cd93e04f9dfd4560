//! Multiresolution scaling data: sector step functions, the low-pass filter
//! built from Bessel coefficients, the normalization identities of the three
//! variants, and unitary completion to a full filter bank.
//!
//! Variants and their per-orbit normalization identities (`N = nu + 1`):
//!
//! | variant        | orbit                   | weights     | identity                                  |
//! |----------------|-------------------------|-------------|-------------------------------------------|
//! | root-of-unity  | `t e^{2 pi i j / N}`    | 1           | `sum_j |m0|^2 = c (nu+1)`, `c = nu/(nu+2)` |
//! | q-root         | `t e^{2 pi i j / N}`    | 1           | same with `c_q = (1-q^nu)/(1-q^{nu+2})`    |
//! | q-radial       | `t q^j`                 | `q^{-2j}`   | `sum_j q^{-2j} |m0|^2 = d_q = 1/(1-q^{2N})`|
//!
//! A filter bank is unitary when the weighted matrix of filters over the
//! orbit is unitary at every grid point; the first row of that matrix is the
//! normalized m0 row, so unitarity implies the m0 identity of the variant.

use crate::qcalc::QParam;
use crate::special::{bessel_j, bessel_j_real, BesselOrder, SeriesParams, SpecialError};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Step function on a sector of the unit disk: aperture `2 pi / m`, radial
/// shift `k`, rotation by `rotation` apertures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorStep {
    pub m: u32,
    pub shift_k: i64,
    pub rotation: u32,
}

/// Finitely supported coefficient sequence `b` for the low-pass filter,
/// starting at index `k_start`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterCoeffs {
    pub k_start: i64,
    pub b: Vec<Complex64>,
    pub nu: u32,
}

impl FilterCoeffs {
    pub fn support(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.b
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.k_start + i as i64, c))
    }
}

/// Normalization variant of a filter bank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// Classical roots of unity, constant `c = nu / (nu + 2)`.
    RootOfUnity,
    /// Roots of unity with the q-inner-product constant
    /// `c_q = (1 - q^nu) / (1 - q^{nu+2})`.
    QRoot(QParam),
    /// Radial q-orbit with weights `rho_j = q^{-2j}` and
    /// `d_q = 1 / (1 - q^{2(nu+1)})`.
    QRadial(QParam),
}

impl Variant {
    pub fn q(&self) -> Option<f64> {
        match self {
            Variant::RootOfUnity => None,
            Variant::QRoot(q) | Variant::QRadial(q) => Some(q.0),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Variant::RootOfUnity => "c",
            Variant::QRoot(_) => "c_q",
            Variant::QRadial(_) => "d_q",
        }
    }
}

/// The variant's normalization constant (`c`, `c_q` or `d_q`).
pub fn normalization_constant(variant: Variant, nu: u32) -> f64 {
    let n = nu as f64;
    match variant {
        Variant::RootOfUnity => n / (n + 2.0),
        Variant::QRoot(q) => (1.0 - q.0.powf(n)) / (1.0 - q.0.powf(n + 2.0)),
        Variant::QRadial(q) => 1.0 / (1.0 - q.0.powi(2 * (nu as i32 + 1))),
    }
}

/// Branch-orbit weights `rho_j`.
pub fn orbit_weights(variant: Variant, nu: u32) -> Vec<f64> {
    match variant {
        Variant::RootOfUnity | Variant::QRoot(_) => vec![1.0; nu as usize + 1],
        Variant::QRadial(q) => (0..=nu as i32).map(|j| q.0.powi(-2 * j)).collect(),
    }
}

/// The row normalizer `Z`: weighted squared row sums of a unitary bank equal
/// `Z` at every grid point. For the root variants `Z = c (nu+1)`; for the
/// radial variant the weights already carry the branch measure and `Z = d_q`.
pub fn row_normalizer(variant: Variant, nu: u32) -> f64 {
    let c = normalization_constant(variant, nu);
    match variant {
        Variant::RootOfUnity | Variant::QRoot(_) => c * (nu as f64 + 1.0),
        Variant::QRadial(_) => c,
    }
}

/// Orbit points `sigma_j(t)`, `j = 0..=nu`.
pub fn orbit_points(variant: Variant, nu: u32, t: Complex64) -> Vec<Complex64> {
    match variant {
        Variant::RootOfUnity | Variant::QRoot(_) => (0..=nu as i64)
            .map(|j| {
                t * Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * j as f64 / (nu as f64 + 1.0),
                )
            })
            .collect(),
        Variant::QRadial(q) => (0..=nu as i32).map(|j| t * q.0.powi(j)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MraError {
    /// A weighted m0 row failed the unit-norm precondition; carries the
    /// worst grid index and its deviation.
    RowNotNormalized { grid_index: usize, deviation: f64 },
    /// Requested point is not on the sampled grid.
    OffGrid,
    LengthMismatch,
    InvalidParameter(&'static str),
    Special(SpecialError),
    Serde(String),
}

impl fmt::Display for MraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MraError::RowNotNormalized {
                grid_index,
                deviation,
            } => write!(
                f,
                "m0 row at grid index {grid_index} deviates from unit norm by {deviation:e}"
            ),
            MraError::OffGrid => write!(f, "point is not on the sampled grid"),
            MraError::LengthMismatch => write!(f, "input lengths are inconsistent"),
            MraError::InvalidParameter(s) => write!(f, "invalid parameter: {s}"),
            MraError::Special(e) => write!(f, "bessel evaluation: {e}"),
            MraError::Serde(s) => write!(f, "serialization: {s}"),
        }
    }
}

impl std::error::Error for MraError {}

impl From<SpecialError> for MraError {
    fn from(e: SpecialError) -> Self {
        MraError::Special(e)
    }
}

/// A sampled filter bank: `nu + 1` filters on `grid x orbit`, plus the
/// variant data. `filters[i][g * (nu+1) + j]` is filter `i` at orbit point
/// `sigma_j(grid[g])`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub nu: u32,
    pub variant: Variant,
    pub grid: Vec<Complex64>,
    pub filters: Vec<Vec<Complex64>>,
    pub rho: Vec<f64>,
}

impl FilterBank {
    pub fn orbit_len(&self) -> usize {
        self.nu as usize + 1
    }

    /// The sampled m0 row (filter 0) at grid point `g`.
    pub fn m0_row(&self, g: usize) -> &[Complex64] {
        let n = self.orbit_len();
        &self.filters[0][g * n..(g + 1) * n]
    }

    /// The weighted filter matrix at grid index `g`:
    /// `M_{i,j} = sqrt(rho_j) m_i(sigma_j t) / sqrt(Z)`.
    pub fn matrix_at(&self, g: usize) -> DMatrix<Complex64> {
        let n = self.orbit_len();
        let z = row_normalizer(self.variant, self.nu).sqrt();
        DMatrix::from_fn(n, n, |i, j| {
            self.filters[i][g * n + j] * (self.rho[j].sqrt() / z)
        })
    }
}

/// Samples of the low-pass filter synthesized from Bessel coefficients:
///
/// ```text
/// m0(t) = sum_k b_k [ (k+1)^{nu+1} sum_{|h|<=K} J_h(t k) J_{nu+1-h}(t)
///                     - k^{nu+1} J_{nu+1}(k t) ]
/// ```
pub fn build_m0(
    coeffs: &FilterCoeffs,
    t_grid: &[Complex64],
    window: usize,
) -> Result<Vec<Complex64>, MraError> {
    if window == 0 {
        return Err(MraError::InvalidParameter("window must be >= 1"));
    }
    let p = SeriesParams::default();
    let nu = coeffs.nu;
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, bk) in coeffs.support() {
            if bk == Complex64::new(0.0, 0.0) {
                continue;
            }
            let kf = k as f64;
            let mut inner = Complex64::new(0.0, 0.0);
            for h in -(window as i64)..=(window as i64) {
                let jh = bessel_j(BesselOrder(h as f64), t * kf, p)?;
                let jrest = bessel_j(BesselOrder((nu as i64 + 1 - h) as f64), t, p)?;
                inner += jh * jrest;
            }
            let grow = (kf + 1.0).powi(nu as i32 + 1);
            let shrink = kf.powi(nu as i32 + 1);
            let jn1 = bessel_j(BesselOrder(nu as f64 + 1.0), t * kf, p)?;
            acc += bk * (inner * grow - jn1 * shrink);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Real-axis evaluation of the same synthesis, for the shifted-translate
/// identity below.
fn m0_real(coeffs: &FilterCoeffs, x: f64, window: usize) -> Result<f64, MraError> {
    let nu = coeffs.nu;
    let mut acc = 0.0;
    let j_signed = |h: i64, arg: f64| -> Result<f64, MraError> {
        let v = bessel_j_real(h.unsigned_abs() as usize, arg.abs())?;
        // J_{-h} = (-1)^h J_h and J_h(-x) = (-1)^h J_h(x).
        let mut sign = 1.0;
        if h < 0 && h % 2 != 0 {
            sign = -sign;
        }
        if arg < 0.0 && h % 2 != 0 {
            sign = -sign;
        }
        Ok(sign * v)
    };
    for (k, bk) in coeffs.support() {
        if bk == Complex64::new(0.0, 0.0) {
            continue;
        }
        let kf = k as f64;
        let mut inner = 0.0;
        for h in -(window as i64)..=(window as i64) {
            inner += j_signed(h, x * kf)? * j_signed(nu as i64 + 1 - h, x)?;
        }
        let grow = (kf + 1.0).powi(nu as i32 + 1);
        let shrink = kf.powi(nu as i32 + 1);
        acc += bk.re * (inner * grow - j_signed(nu as i64 + 1, kf * x)? * shrink);
    }
    Ok(acc)
}

/// Max over the grid of
/// `| sum_{|j| <= j_window} |m0(t+j)|^2 (t+j)^{-2} - 1/(2(nu+1)) |`.
pub fn real_line_m0_identity(
    coeffs: &FilterCoeffs,
    t_grid: &[f64],
    window: usize,
    j_window: i64,
) -> Result<f64, MraError> {
    let target = 1.0 / (2.0 * (coeffs.nu as f64 + 1.0));
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let mut sum = 0.0;
        for j in -j_window..=j_window {
            let x = t + j as f64;
            if x == 0.0 {
                continue;
            }
            let v = m0_real(coeffs, x, window)?;
            sum += v * v / (x * x);
        }
        worst = worst.max((sum - target).abs());
    }
    Ok(worst)
}

/// Least-squares construction of real coefficients satisfying the windowed
/// real-line identity on `t_grid` (Gauss-Newton on the quadratic system,
/// with backtracking). The identity holds for no generic coefficient set;
/// this builds a witness so the residual check has something to verify.
pub fn fit_real_line_coeffs(
    nu: u32,
    t_grid: &[f64],
    support: usize,
    window: usize,
    j_window: i64,
    seed: u64,
) -> Result<FilterCoeffs, MraError> {
    if support == 0 {
        return Err(MraError::InvalidParameter("support must be >= 1"));
    }
    let target = 1.0 / (2.0 * (nu as f64 + 1.0));
    let basis = |k: i64, x: f64| -> Result<f64, MraError> {
        let c = FilterCoeffs {
            k_start: k,
            b: vec![Complex64::new(1.0, 0.0)],
            nu,
        };
        m0_real(&c, x, window)
    };
    // Precompute the basis table over all shifted arguments.
    let ks: Vec<i64> = (0..support as i64).collect();
    let mut xs = Vec::new();
    for (gi, &t) in t_grid.iter().enumerate() {
        for j in -j_window..=j_window {
            let x = t + j as f64;
            if x != 0.0 {
                xs.push((gi, x));
            }
        }
    }
    let mut phi = vec![0.0; xs.len() * ks.len()];
    for (xi, &(_, x)) in xs.iter().enumerate() {
        for (ki, &k) in ks.iter().enumerate() {
            phi[xi * ks.len() + ki] = basis(k, x)?;
        }
    }
    let g_count = t_grid.len();
    let eval = |b: &[f64]| -> nalgebra::DVector<f64> {
        let mut r = nalgebra::DVector::zeros(g_count);
        for (xi, &(gi, x)) in xs.iter().enumerate() {
            let row = &phi[xi * ks.len()..(xi + 1) * ks.len()];
            let y: f64 = row.iter().zip(b).map(|(p, c)| p * c).sum();
            r[gi] += y * y / (x * x);
        }
        for gi in 0..g_count {
            r[gi] -= target;
        }
        r
    };

    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut rand01 = move || {
        state ^= state >> 33;
        state = state.wrapping_mul(0xff51afd7ed558ccd);
        state ^= state >> 33;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };

    for _attempt in 0..8 {
        let mut b: Vec<f64> = (0..support).map(|_| rand01() - 0.5).collect();
        for _iter in 0..300 {
            let r = eval(&b);
            if r.norm() < 1e-12 {
                return Ok(FilterCoeffs {
                    k_start: 0,
                    b: b.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
                    nu,
                });
            }
            // Jacobian d r_g / d b_k = sum_x 2 y phi / x^2.
            let mut jac = DMatrix::<f64>::zeros(g_count, support);
            for (xi, &(gi, x)) in xs.iter().enumerate() {
                let row = &phi[xi * ks.len()..(xi + 1) * ks.len()];
                let y: f64 = row.iter().zip(&b).map(|(p, c)| p * c).sum();
                for k in 0..support {
                    jac[(gi, k)] += 2.0 * y * row[k] / (x * x);
                }
            }
            let svd = nalgebra::SVD::new(jac, true, true);
            let step = match svd.solve(&r, 1e-13) {
                Ok(s) => s,
                Err(_) => break,
            };
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let trial: Vec<f64> = b
                    .iter()
                    .zip(step.iter())
                    .map(|(c, s)| c - lambda * s)
                    .collect();
                if eval(&trial).norm() < r.norm() {
                    b = trial;
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
    }
    Err(MraError::InvalidParameter(
        "gauss-newton did not converge; widen the support or change the seed",
    ))
}

/// `integral_0^inf  phi_nu^(k)(x) phi_nu^(0)(x) x dx` by Gauss quadrature
/// over the support overlap; the closed form is `delta_{k,0} / (2(nu+1))`.
pub fn haar_xnu_inner(k: i64, nu: u32) -> f64 {
    let lo = (k as f64).max(0.0);
    let hi = (k as f64 + 1.0).min(1.0);
    if lo >= hi {
        return 0.0;
    }
    const X: [f64; 4] = [
        -0.8611363115940526,
        -0.3399810435848563,
        0.3399810435848563,
        0.8611363115940526,
    ];
    const W: [f64; 4] = [
        0.3478548451374538,
        0.6521451548625461,
        0.6521451548625461,
        0.3478548451374538,
    ];
    let panels = 8;
    let h = (hi - lo) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        for i in 0..4 {
            let x: f64 = mid + 0.5 * h * X[i];
            acc += 0.5 * h * W[i] * x.powi(2 * nu as i32 + 1);
        }
    }
    acc
}

/// Closed form of the sector inner product `<phi^(k,N) | phi^(0,0)>` on the
/// disk with the polar weight `|z|^{nu+1} e^{i (nu+1) Arg z}`:
///
/// ```text
/// prefactor * delta_{k,0} * delta_{N mod m, 0} * (e^{i a (nu+1)} - 1) / (i (nu+1)),
/// a = 2 pi / m,
/// ```
///
/// with prefactor `1/(nu+2)` classically and `(1-q)/(1-q^{nu+2})` deformed.
pub fn sector_inner(
    k: i64,
    rotation: u32,
    nu: u32,
    m: u32,
    deformed: Option<QParam>,
) -> Complex64 {
    if m == 0 || k != 0 || rotation % m != 0 {
        return Complex64::new(0.0, 0.0);
    }
    let alpha = 2.0 * std::f64::consts::PI / m as f64;
    let n1 = nu as f64 + 1.0;
    let radial = match deformed {
        None => 1.0 / (nu as f64 + 2.0),
        Some(q) => (1.0 - q.0) / (1.0 - q.0.powi(nu as i32 + 2)),
    };
    let angular = (Complex64::from_polar(1.0, alpha * n1) - Complex64::new(1.0, 0.0))
        / Complex64::new(0.0, n1);
    radial * angular
}

/// Max-over-grid residual of the variant's m0 normalization identity for a
/// sampled m0 orbit row set.
pub fn orbit_normalization_residual(
    m0_orbit: &[Vec<Complex64>],
    variant: Variant,
    nu: u32,
) -> Result<f64, MraError> {
    let n = nu as usize + 1;
    let w = orbit_weights(variant, nu);
    let z = row_normalizer(variant, nu);
    let mut worst: f64 = 0.0;
    for row in m0_orbit {
        if row.len() != n {
            return Err(MraError::LengthMismatch);
        }
        let sum: f64 = row.iter().zip(&w).map(|(v, wj)| wj * v.norm_sqr()).sum();
        worst = worst.max((sum / z - 1.0).abs());
    }
    Ok(worst)
}

/// Deterministic unitary completion of one normalized row: the Householder
/// reflection taking `e_0` to the row (image's first component made real
/// nonnegative) supplies rows `1..=nu`; the first row is kept verbatim.
/// The degenerate case (row proportional to `e_0`) falls back to the
/// identity rows.
fn complete_row(u: &[Complex64]) -> DMatrix<Complex64> {
    let n = u.len();
    let mut v: Vec<Complex64> = u.iter().map(|c| c.conj()).collect();
    let phase = if v[0].norm() > 0.0 {
        v[0].conj() / v[0].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    for c in v.iter_mut() {
        *c *= phase;
    }
    // w = v - e0; P = I - 2 w w* / (w* w) swaps e0 and v.
    let mut w = v.clone();
    w[0] -= 1.0;
    let wnorm: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    let mut p = DMatrix::<Complex64>::identity(n, n);
    if wnorm > 1e-28 {
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] -= 2.0 * w[i] * w[j].conj() / wnorm;
            }
        }
    }
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        out[(0, j)] = u[j];
    }
    for i in 1..n {
        for j in 0..n {
            out[(i, j)] = p[(i, j)];
        }
    }
    out
}

/// Complete a normalized m0 orbit-row set into a full filter bank whose
/// matrix is unitary at every grid point.
pub fn complete_filter_bank(
    nu: u32,
    variant: Variant,
    grid: Vec<Complex64>,
    m0_orbit: &[Vec<Complex64>],
) -> Result<FilterBank, MraError> {
    let n = nu as usize + 1;
    if m0_orbit.len() != grid.len() {
        return Err(MraError::LengthMismatch);
    }
    let w = orbit_weights(variant, nu);
    let z = row_normalizer(variant, nu);
    let mut worst = (0usize, 0.0f64);
    for (g, row) in m0_orbit.iter().enumerate() {
        if row.len() != n {
            return Err(MraError::LengthMismatch);
        }
        let s: f64 = row.iter().zip(&w).map(|(v, wj)| wj * v.norm_sqr()).sum();
        let dev = (s / z - 1.0).abs();
        if dev > worst.1 {
            worst = (g, dev);
        }
    }
    if worst.1 > 1e-10 {
        return Err(MraError::RowNotNormalized {
            grid_index: worst.0,
            deviation: worst.1,
        });
    }

    let mut filters = vec![vec![Complex64::new(0.0, 0.0); grid.len() * n]; n];
    for (g, row) in m0_orbit.iter().enumerate() {
        let u: Vec<Complex64> = row
            .iter()
            .zip(&w)
            .map(|(v, wj)| v * (wj / z).sqrt())
            .collect();
        let unitary = complete_row(&u);
        for j in 0..n {
            filters[0][g * n + j] = row[j];
            for i in 1..n {
                // Unscale: m_i(sigma_j t) = U_{i,j} sqrt(Z / rho_j).
                filters[i][g * n + j] = unitary[(i, j)] * (z / w[j]).sqrt();
            }
        }
    }
    Ok(FilterBank {
        nu,
        variant,
        grid,
        filters,
        rho: w,
    })
}

/// The weighted filter matrix at a grid point, plus its unitarity defect
/// `max |M M* - I|`.
pub fn matrix_m(bank: &FilterBank, t: Complex64) -> Result<(DMatrix<Complex64>, f64), MraError> {
    let g = bank
        .grid
        .iter()
        .position(|&p| (p - t).norm() <= 1e-12 * p.norm().max(1.0))
        .ok_or(MraError::OffGrid)?;
    let m = bank.matrix_at(g);
    let defect = unitarity_defect(&m);
    Ok((m, defect))
}

/// `max_entry |M M* - I|`.
pub fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let prod = m * m.adjoint();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

/// Max unitarity defect over the whole grid.
pub fn bank_unitarity_residual(bank: &FilterBank) -> f64 {
    (0..bank.grid.len())
        .map(|g| unitarity_defect(&bank.matrix_at(g)))
        .fold(0.0, f64::max)
}

/// Uniform grid of `n` points on the unit circle.
pub fn default_circle_grid(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|g| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * g as f64 / n as f64))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct FilterBankJson {
    nu: u32,
    variant: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    grid: Vec<[f64; 2]>,
    filters: Vec<Vec<[f64; 2]>>,
    rho: Vec<f64>,
}

impl FilterBank {
    /// JSON document `{nu, variant, q?, grid, filters, rho}` with complex
    /// numbers as `[re, im]` pairs; round-trips bit-exactly.
    pub fn to_json(&self) -> String {
        let doc = FilterBankJson {
            nu: self.nu,
            variant: self.variant.tag().to_string(),
            q: self.variant.q(),
            grid: self.grid.iter().map(|c| [c.re, c.im]).collect(),
            filters: self
                .filters
                .iter()
                .map(|f| f.iter().map(|c| [c.re, c.im]).collect())
                .collect(),
            rho: self.rho.clone(),
        };
        serde_json::to_string(&doc).expect("filter bank serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, MraError> {
        let doc: FilterBankJson =
            serde_json::from_str(s).map_err(|e| MraError::Serde(e.to_string()))?;
        let variant = match (doc.variant.as_str(), doc.q) {
            ("c", None) => Variant::RootOfUnity,
            ("c_q", Some(q)) => Variant::QRoot(QParam(q)),
            ("d_q", Some(q)) => Variant::QRadial(QParam(q)),
            _ => return Err(MraError::Serde(format!("bad variant {:?}", doc.variant))),
        };
        Ok(FilterBank {
            nu: doc.nu,
            variant,
            grid: doc.grid.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
            filters: doc
                .filters
                .iter()
                .map(|f| f.iter().map(|p| Complex64::new(p[0], p[1])).collect())
                .collect(),
            rho: doc.rho,
        })
    }
}

/// A constant-profile normalized m0 row for each grid point (equal weighted
/// contribution per orbit slot), handy as a seed bank.
pub fn constant_profile_rows(variant: Variant, nu: u32, grid_len: usize) -> Vec<Vec<Complex64>> {
    let n = nu as usize + 1;
    let w = orbit_weights(variant, nu);
    let z = row_normalizer(variant, nu);
    let row: Vec<Complex64> = (0..n)
        .map(|j| Complex64::new((z / (n as f64 * w[j])).sqrt(), 0.0))
        .collect();
    vec![row; grid_len]
}

/// Seeded pseudo-random normalized m0 rows, for exercising completion.
pub fn random_unit_rows(
    variant: Variant,
    nu: u32,
    grid_len: usize,
    seed: u64,
) -> Vec<Vec<Complex64>> {
    let n = nu as usize + 1;
    let w = orbit_weights(variant, nu);
    let z = row_normalizer(variant, nu);
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    let mut rand = move || {
        state ^= state >> 30;
        state = state.wrapping_mul(0xbf58476d1ce4e5b9);
        state ^= state >> 27;
        state = state.wrapping_mul(0x94d049bb133111eb);
        state ^= state >> 31;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (0..grid_len)
        .map(|_| {
            let mut row: Vec<Complex64> =
                (0..n).map(|_| Complex64::new(rand(), rand())).collect();
            let s: f64 = row.iter().zip(&w).map(|(v, wj)| wj * v.norm_sqr()).sum();
            let scale = (z / s).sqrt();
            for v in row.iter_mut() {
                *v *= scale;
            }
            row
        })
        .collect()
}
