//! Classical gamma and Bessel-J machinery.
//!
//! The Bessel function of the first kind of order `alpha` is evaluated from
//! its power series
//!
//! ```text
//! J_a(z) = (z/2)^a  sum_{k>=0}  (-1)^k / (k! Gamma(a+k+1)) (z/2)^{2k}
//! ```
//!
//! which is accurate in `f64` for moderate `|z|`. For large real arguments
//! and integer order the alternating series cancels catastrophically, so the
//! evaluation switches to the classical downward three-term recurrence
//! (Miller's algorithm with the `J_0 + 2 J_2 + 2 J_4 + ... = 1` normalization).

use num_complex::Complex64;
use std::fmt;

/// Truncation control for the Bessel power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesParams {
    /// Stop once the next term's modulus drops below `rel_tol` times the
    /// modulus of the current partial sum.
    pub rel_tol: f64,
    /// Hard cap on the number of series terms.
    pub max_terms: usize,
}

impl Default for SeriesParams {
    fn default() -> Self {
        SeriesParams {
            rel_tol: 1e-14,
            max_terms: 500,
        }
    }
}

impl SeriesParams {
    pub fn validate(&self) -> Result<(), SpecialError> {
        if !(self.rel_tol > 0.0) || self.max_terms == 0 {
            return Err(SpecialError::Domain);
        }
        Ok(())
    }
}

/// Order of a Bessel function `J_alpha`.
///
/// Integer orders are the main case; all transform uses require
/// `alpha > -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder(pub f64);

impl BesselOrder {
    /// Returns `Some(n)` when the order is (exactly) an integer.
    pub fn as_integer(&self) -> Option<i64> {
        if self.0.fract() == 0.0 && self.0.abs() < 1e15 {
            Some(self.0 as i64)
        } else {
            None
        }
    }
}

/// Errors from special function evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialError {
    /// Input outside the function's domain (e.g. `x <= 0` for gamma).
    Domain,
    /// Series reached `max_terms` before the tail bound held.
    NonConvergence,
    /// The alternating series lost too many digits to rounding for the
    /// requested tolerance and no stable evaluation path applies.
    PrecisionLoss,
}

impl fmt::Display for SpecialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecialError::Domain => write!(f, "argument outside function domain"),
            SpecialError::NonConvergence => {
                write!(f, "series did not converge within max_terms")
            }
            SpecialError::PrecisionLoss => {
                write!(f, "series evaluation would lose too many digits to rounding")
            }
        }
    }
}

impl std::error::Error for SpecialError {}

// Lanczos approximation, g = 10.900511, 11 terms (Pugh's thesis; the same
// coefficient set ships in statrs and Boost). Relative error ~1e-15 on the
// positive real axis.
const LANCZOS_G: f64 = 10.900511;
const LANCZOS_COEFFS: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];
const TWO_SQRT_E_OVER_PI: f64 = 1.8603827342052657173362492472666631120594218414086;

/// Gamma function on the positive real axis.
///
/// All callers in this crate evaluate `Gamma(alpha + k + 1)` with
/// `alpha > -1`, so poles and the negative axis are out of scope.
pub fn gamma(x: f64) -> Result<f64, SpecialError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecialError::Domain);
    }
    if x < 0.5 {
        // Reflection through Gamma(x) Gamma(1-x) = pi / sin(pi x).
        let mut s = LANCZOS_COEFFS[0];
        for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            s += c / (i as f64 - x);
        }
        let base = (0.5 - x + LANCZOS_G) / std::f64::consts::E;
        Ok(std::f64::consts::PI
            / ((std::f64::consts::PI * x).sin() * s * TWO_SQRT_E_OVER_PI * base.powf(0.5 - x)))
    } else {
        let mut s = LANCZOS_COEFFS[0];
        for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            s += c / (x + i as f64 - 1.0);
        }
        let base = (x - 0.5 + LANCZOS_G) / std::f64::consts::E;
        Ok(s * TWO_SQRT_E_OVER_PI * base.powf(x - 0.5))
    }
}

/// Modulus above which the power series is abandoned for integer orders in
/// favour of the downward recurrence. At `|z| = 12` the series still keeps
/// roughly eleven significant digits.
const SERIES_CUTOFF: f64 = 12.0;

/// Bessel function of the first kind, complex argument.
///
/// Integer orders accept any real argument (the large-argument range is
/// handled by the downward recurrence); non-integer orders require
/// `alpha > -1` and a moderate `|z|` so the series stays accurate.
pub fn bessel_j(alpha: BesselOrder, z: Complex64, p: SeriesParams) -> Result<Complex64, SpecialError> {
    p.validate()?;
    if let Some(n) = alpha.as_integer() {
        return bessel_j_int(n, z, p);
    }
    if alpha.0 <= -1.0 {
        return Err(SpecialError::Domain);
    }
    if z.norm() > 2.0 * SERIES_CUTOFF {
        // No recurrence normalization is available off the integer lattice.
        return Err(SpecialError::PrecisionLoss);
    }
    bessel_series(alpha.0, z, p)
}

fn bessel_j_int(n: i64, z: Complex64, p: SeriesParams) -> Result<Complex64, SpecialError> {
    // J_{-n}(z) = (-1)^n J_n(z)
    let (n, sign) = if n < 0 {
        (-n, if n % 2 == 0 { 1.0 } else { -1.0 })
    } else {
        (n, 1.0)
    };
    let value = if z.im == 0.0 && z.re.abs() > SERIES_CUTOFF {
        let x = z.re;
        let v = bessel_j_array_real(n as usize, x.abs())?[n as usize];
        // J_n(-x) = (-1)^n J_n(x)
        let refl = if x < 0.0 && n % 2 != 0 { -v } else { v };
        Complex64::new(refl, 0.0)
    } else if z.norm() > 2.0 * SERIES_CUTOFF {
        return Err(SpecialError::PrecisionLoss);
    } else {
        bessel_series(n as f64, z, p)?
    };
    Ok(sign * value)
}

/// Power series evaluation; assumes `alpha > -1`.
fn bessel_series(alpha: f64, z: Complex64, p: SeriesParams) -> Result<Complex64, SpecialError> {
    let half = z / 2.0;
    // (z/2)^alpha: exact powers for integer order, principal branch otherwise.
    let lead = if alpha.fract() == 0.0 {
        half.powi(alpha as i32)
    } else {
        if z.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        half.powf(alpha)
    };
    let mut term = lead / gamma(alpha + 1.0)?;
    let mut sum = term;
    let half_sq = half * half;
    for k in 0..p.max_terms {
        let kf = k as f64;
        term *= -half_sq / ((kf + 1.0) * (alpha + kf + 1.0));
        let next = sum + term;
        if term.norm() < p.rel_tol * next.norm().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        sum = next;
    }
    Err(SpecialError::NonConvergence)
}

/// All of `J_0(x) ... J_{n_max}(x)` for real `x >= 0` by downward recurrence
/// with the even-order normalization sum. Stable for the large arguments the
/// series cannot reach.
pub fn bessel_j_array_real(n_max: usize, x: f64) -> Result<Vec<f64>, SpecialError> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecialError::Domain);
    }
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    if x <= SERIES_CUTOFF {
        // Small arguments: the series is already accurate, order by order.
        let p = SeriesParams::default();
        let mut out = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            out.push(bessel_series(n as f64, Complex64::new(x, 0.0), p)?.re);
        }
        return Ok(out);
    }
    // Start high enough that J_start(x) is negligible relative to the peak.
    let start = (x.ceil() as usize).max(n_max) + (8.0 * x.powf(1.0 / 3.0)) as usize + 24;
    let start = start + (start % 2); // even start keeps the parity bookkeeping simple
    let mut jp = 0.0_f64; // J_{k+1}
    let mut j = 1e-300_f64; // J_k seed
    let mut out = vec![0.0; n_max + 1];
    let mut norm = 0.0_f64; // J_0 + 2 sum_{k>=1} J_{2k}
    for k in (0..=start).rev() {
        let jm = (2.0 * (k as f64 + 1.0) / x) * j - jp;
        jp = j;
        j = jm;
        // j now holds J_k
        if k <= n_max {
            out[k] = j;
        }
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if j.abs() > 1e250 {
            jp /= 1e250;
            j /= 1e250;
            norm /= 1e250;
            for v in out.iter_mut() {
                *v /= 1e250;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    Ok(out)
}

/// Scalar `J_n(x)` for real `x >= 0`, without the array allocation of
/// [`bessel_j_array_real`]. This is the hot path of the Hankel quadrature.
pub fn bessel_j_real(n: usize, x: f64) -> Result<f64, SpecialError> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecialError::Domain);
    }
    if x <= SERIES_CUTOFF {
        return Ok(bessel_series(n as f64, Complex64::new(x, 0.0), SeriesParams::default())?.re);
    }
    let start = (x.ceil() as usize).max(n) + (8.0 * x.powf(1.0 / 3.0)) as usize + 24;
    let start = start + (start % 2);
    let mut jp = 0.0_f64;
    let mut j = 1e-300_f64;
    let mut out = 0.0_f64;
    let mut norm = 0.0_f64;
    for k in (0..=start).rev() {
        let jm = (2.0 * (k as f64 + 1.0) / x) * j - jp;
        jp = j;
        j = jm;
        if k == n {
            out = j;
        }
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if j.abs() > 1e250 {
            jp /= 1e250;
            j /= 1e250;
            norm /= 1e250;
            out /= 1e250;
        }
    }
    Ok(out / norm)
}

/// `|J_n(x+y) - sum_{k=-K}^{K} J_k(x) J_{n-k}(y)|`: defect of the addition
/// formula under a symmetric window of width `2K+1`.
pub fn addition_formula_residual(
    n: i64,
    x: Complex64,
    y: Complex64,
    window: usize,
) -> Result<f64, SpecialError> {
    if window == 0 {
        return Err(SpecialError::Domain);
    }
    let p = SeriesParams::default();
    let k_max = window as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -k_max..=k_max {
        let jk = bessel_j(BesselOrder(k as f64), x, p)?;
        let jnk = bessel_j(BesselOrder((n - k) as f64), y, p)?;
        sum += jk * jnk;
    }
    let lhs = bessel_j(BesselOrder(n as f64), x + y, p)?;
    Ok((lhs - sum).norm())
}

/// `e^{i pi k nu} J_nu(z)`: the value the half-turn phase identity
/// `J_nu(z e^{i pi k}) = e^{i pi k nu} J_nu(z)` assigns to the rotated
/// argument.
pub fn half_turn_phase(
    nu: f64,
    k: i64,
    z: Complex64,
    p: SeriesParams,
) -> Result<Complex64, SpecialError> {
    let phase = Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 * nu);
    Ok(phase * bessel_j(BesselOrder(nu), z, p)?)
}
