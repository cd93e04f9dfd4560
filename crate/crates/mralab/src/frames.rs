//! Tight frames from Bessel-coefficient filter banks: the residue-theorem
//! diagonal constraint, off-diagonal orthogonality, frame-bound estimation
//! through the isometry family, and the deformed (q-Bessel) variant.
//!
//! The frame family is realized on the transform side: its members are the
//! vectors `S_0^s S_r e` over scales `s`, branch filters `r >= 1` and basis
//! shifts `e`, together with the coarse tail `S_0^{s_max+1} e`. Summing
//! `|<f, .>|^2` over the family telescopes through the Cuntz relations, so a
//! unitary bank is a tight frame with constant 1 up to window leakage.

use crate::cuntz::{CuntzError, CuntzRep, LatticeFunction};
use crate::mra::{orbit_weights, row_normalizer, FilterBank, Variant};
use crate::qcalc::{q_bessel_j, QError, QParam};
use crate::special::SeriesParams;
use num_complex::Complex64;
use std::fmt;

/// Bessel-coefficient filter specification: `m_0(z) = sum_k b_k J_k(z)` and
/// `m_r(sigma_j z) = sum_k b_k J_{k+r}(z phase_j)`, with `phase_j = q^j` in
/// the deformed case.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselFilterSpec {
    /// Coefficients `b_0, b_1, ...` (support on `k >= 0`, factorial weights).
    pub b: Vec<Complex64>,
    pub nu: u32,
    pub deformed: Option<QParam>,
}

/// Frame bounds `A <= B`; tight when they coincide within tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub a: f64,
    pub b: f64,
}

impl FrameBounds {
    pub fn is_tight(&self, tol: f64) -> bool {
        (self.b - self.a).abs() < tol
    }
}

/// Frame-bound estimate plus a leakage flag raised when the truncated
/// family visibly misses mass.
#[derive(Debug, Clone, Copy)]
pub struct FrameEstimate {
    pub bounds: FrameBounds,
    pub leakage_flagged: bool,
}

/// Truncation of the frame family: scales `0..=max_scale`, optionally the
/// completing coarse subspace.
#[derive(Debug, Clone, Copy)]
pub struct FrameTruncation {
    pub max_scale: usize,
    pub include_coarse_tail: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrameError {
    /// Spec violates the diagonal or off-diagonal constraint beyond 1e-8.
    ConstraintViolation { diagonal: f64, off_diagonal: f64 },
    EmptyTestSet,
    ZeroTestFunction,
    Cuntz(CuntzError),
    Q(QError),
}

impl fmt::Display for FrameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameError::ConstraintViolation {
                diagonal,
                off_diagonal,
            } => write!(
                f,
                "coefficient constraints violated: diagonal {diagonal:e}, off-diagonal {off_diagonal:e}"
            ),
            FrameError::EmptyTestSet => write!(f, "no test functions supplied"),
            FrameError::ZeroTestFunction => write!(f, "test functions must be nonzero"),
            FrameError::Cuntz(e) => write!(f, "representation: {e}"),
            FrameError::Q(e) => write!(f, "q-series: {e}"),
        }
    }
}

impl std::error::Error for FrameError {}

impl From<CuntzError> for FrameError {
    fn from(e: CuntzError) -> Self {
        FrameError::Cuntz(e)
    }
}

impl From<QError> for FrameError {
    fn from(e: QError) -> Self {
        FrameError::Q(e)
    }
}

/// `| 1 - (nu+1) sum_k |b_k|^2 / (k! 2^k)^2 |`: the diagonal constraint the
/// residue calculus imposes on the coefficients.
pub fn residue_diagonal_residual(spec: &BesselFilterSpec) -> f64 {
    let mut sum = 0.0;
    let mut fact = 1.0;
    for (k, b) in spec.b.iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        let w = fact * 2f64.powi(k as i32);
        sum += b.norm_sqr() / (w * w);
    }
    (1.0 - (spec.nu as f64 + 1.0) * sum).abs()
}

/// Off-diagonal cross-correlation `sum_k b_k conj(c_{n+k})`.
pub fn offdiagonal_residual(b: &[Complex64], c: &[Complex64], n: i64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, bk) in b.iter().enumerate() {
        let idx = k as i64 + n;
        if idx >= 0 && (idx as usize) < c.len() {
            acc += bk * c[idx as usize].conj();
        }
    }
    acc
}

/// Worst autocorrelation defect of the spec over shifts `1..=nu`.
pub fn spec_offdiagonal_defect(spec: &BesselFilterSpec) -> f64 {
    (1..=spec.nu as i64)
        .map(|n| offdiagonal_residual(&spec.b, &spec.b, n).norm())
        .fold(0.0, f64::max)
}

/// Frame-bound estimate `A = min, B = max` over the test functions of
///
/// ```text
/// ( sum_{s <= s_max} sum_{r >= 1} ||S_r* (S_0*)^s f||^2  [+ ||(S_0*)^{s_max+1} f||^2] ) / ||f||^2
/// ```
pub fn frame_bounds_estimate(
    rep: &CuntzRep,
    tests: &[LatticeFunction],
    truncation: FrameTruncation,
) -> Result<FrameEstimate, FrameError> {
    if tests.is_empty() {
        return Err(FrameError::EmptyTestSet);
    }
    let n = rep.nu as usize + 1;
    let mut a = f64::INFINITY;
    let mut b: f64 = 0.0;
    for f in tests {
        let norm = f.norm_sqr();
        if norm == 0.0 {
            return Err(FrameError::ZeroTestFunction);
        }
        let mut acc = 0.0;
        let mut coarse = f.clone();
        for _s in 0..=truncation.max_scale {
            for r in 1..n {
                acc += rep.apply_s_star(r, &coarse)?.norm_sqr();
            }
            coarse = rep.apply_s_star(0, &coarse)?;
        }
        if truncation.include_coarse_tail {
            acc += coarse.norm_sqr();
        }
        let ratio = acc / norm;
        a = a.min(ratio);
        b = b.max(ratio);
    }
    let leakage_flagged = a < 1.0 - 1e-6 || b > 1.0 + 1e-6;
    Ok(FrameEstimate {
        bounds: FrameBounds { a, b },
        leakage_flagged,
    })
}

/// Build the deformed filter bank `m_r(sigma_j z) = sum_k b_k J_{k+r}(z q^j; q)`
/// on a grid, after checking the coefficient constraints. The bank's
/// unitarity residual is the caller's to report; nothing here asserts it.
pub fn deformed_bank_from_bessel(
    spec: &BesselFilterSpec,
    grid: Vec<Complex64>,
) -> Result<FilterBank, FrameError> {
    let q = spec.deformed.unwrap_or(QParam(0.5));
    let diag = residue_diagonal_residual(spec);
    let off = spec_offdiagonal_defect(spec);
    if diag > 1e-8 || off > 1e-8 {
        return Err(FrameError::ConstraintViolation {
            diagonal: diag,
            off_diagonal: off,
        });
    }
    let nu = spec.nu;
    let n = nu as usize + 1;
    let p = SeriesParams::default();
    let variant = Variant::QRadial(q);
    let mut filters = vec![vec![Complex64::new(0.0, 0.0); grid.len() * n]; n];
    for (g, &t) in grid.iter().enumerate() {
        for j in 0..n {
            let arg = t * q.0.powi(j as i32);
            for (r, filter) in filters.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, bk) in spec.b.iter().enumerate() {
                    if bk.norm() == 0.0 {
                        continue;
                    }
                    acc += bk * q_bessel_j((k + r) as f64, arg, q, p)?;
                }
                filter[g * n + j] = acc;
            }
        }
    }
    Ok(FilterBank {
        nu,
        variant,
        grid,
        filters,
        rho: orbit_weights(variant, nu),
    })
}

/// Frame bounds straight from a Bessel coefficient spec: the deformed bank
/// is sampled on a small lattice fiber grid, lifted to its representation,
/// and probed with seeded unit vectors.
///
/// The radial window is deliberately narrow (`|k| <= 2`): the deformed
/// filters are series-evaluated and the series cancels catastrophically at
/// the large radii a wide fiber grid would reach. Deformed banks are not
/// unitary in general and the window is leaky, so the ratio is a
/// diagnostic, never an assertion.
pub fn bessel_spec_frame_bounds(
    spec: &BesselFilterSpec,
    truncation: FrameTruncation,
    test_seeds: &[u64],
) -> Result<FrameEstimate, FrameError> {
    let q = spec.deformed.unwrap_or(QParam(0.5));
    let angular = spec.nu + 1;
    let (k_min, k_max) = (-2i64, 2i64);
    let grid = crate::cuntz::fiber_grid(Variant::QRadial(q), spec.nu, k_min, k_max, angular, 0.5)?;
    let bank = deformed_bank_from_bessel(spec, grid)?;
    let rep = CuntzRep::from_bank(&bank, k_min, k_max, angular, 0.5)?;
    let tests: Vec<LatticeFunction> = test_seeds
        .iter()
        .map(|&s| LatticeFunction::random_unit(rep.q, k_min, k_max, angular, 1, s))
        .collect();
    frame_bounds_estimate(&rep, &tests, truncation)
}

/// Report-style summary for a deformed bank: unitarity residual and the m0
/// normalization defect, both diagnostics rather than assertions.
pub fn deformed_bank_diagnostics(bank: &FilterBank) -> (f64, f64) {
    let unit = crate::mra::bank_unitarity_residual(bank);
    let w = orbit_weights(bank.variant, bank.nu);
    let z = row_normalizer(bank.variant, bank.nu);
    let n = bank.orbit_len();
    let mut worst: f64 = 0.0;
    for g in 0..bank.grid.len() {
        let row = bank.m0_row(g);
        let s: f64 = row.iter().zip(&w).map(|(v, wj)| wj * v.norm_sqr()).sum();
        worst = worst.max((s / z - 1.0).abs());
    }
    let _ = n;
    (unit, worst)
}
