//! Hankel transform by quadrature and its q-analogue as lattice sums.
//!
//! Classical side: `g(t) = integral_0^R J_a(x t) f(x) x dx` with a composite
//! rule on `[0, R]`; the same kernel matrix drives inversion and the
//! Plancherel check. The quadrature calibration committed in the test suite
//! (panel count and cutoff) comes from the convergence study in
//! `tests/quadrature_calibration.rs`.
//!
//! q side, on the lattice `{q^k}`:
//!
//! ```text
//! g(q^n) = sum_k q^{2k} J_a(q^{k+n}; q^2) f(q^k)
//! ```
//!
//! a pair that is exactly self-inverse by the orthogonality relation
//! `sum_k q^{2k+m+n} J_a(q^{k+n}; q^2) J_a(q^{k+m}; q^2) = delta_{m,n}`.

use crate::qcalc::{q_bessel_j, q_bessel_lattice, QError, QLattice, QParam};
use crate::special::{bessel_j_real, SeriesParams, SpecialError};
use num_complex::Complex64;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadRule {
    CompositeGauss,
    CompositeSimpson,
}

/// Quadrature configuration for the half-line integrals, truncated at `cutoff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureParams {
    pub rule: QuadRule,
    pub panels: usize,
    pub cutoff: f64,
}

impl QuadratureParams {
    pub fn new(rule: QuadRule, panels: usize, cutoff: f64) -> Result<Self, TransformError> {
        if panels == 0 || !(cutoff > 0.0) {
            return Err(TransformError::InvalidQuadrature);
        }
        Ok(QuadratureParams {
            rule,
            panels,
            cutoff,
        })
    }

    /// Node/weight table of the configured rule on `[0, cutoff]`.
    pub fn nodes_weights(&self) -> (Vec<f64>, Vec<f64>) {
        let h = self.cutoff / self.panels as f64;
        match self.rule {
            QuadRule::CompositeGauss => {
                // 4-point Gauss-Legendre per panel (exact through degree 7).
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
                let mut nodes = Vec::with_capacity(4 * self.panels);
                let mut weights = Vec::with_capacity(4 * self.panels);
                for p in 0..self.panels {
                    let a = p as f64 * h;
                    let mid = a + 0.5 * h;
                    for i in 0..4 {
                        nodes.push(mid + 0.5 * h * X[i]);
                        weights.push(0.5 * h * W[i]);
                    }
                }
                (nodes, weights)
            }
            QuadRule::CompositeSimpson => {
                let n = 2 * self.panels;
                let step = self.cutoff / n as f64;
                let mut nodes = Vec::with_capacity(n + 1);
                let mut weights = Vec::with_capacity(n + 1);
                for i in 0..=n {
                    nodes.push(i as f64 * step);
                    let w = if i == 0 || i == n {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    weights.push(w * step / 3.0);
                }
                (nodes, weights)
            }
        }
    }
}

/// A radial function held as samples on a quadrature node set.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledRadialFunction {
    pub nodes: Vec<f64>,
    pub values: Vec<Complex64>,
    pub cutoff: f64,
}

impl SampledRadialFunction {
    pub fn new(
        nodes: Vec<f64>,
        values: Vec<Complex64>,
        cutoff: f64,
    ) -> Result<Self, TransformError> {
        if nodes.len() != values.len() {
            return Err(TransformError::LengthMismatch);
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TransformError::NonIncreasingNodes);
        }
        Ok(SampledRadialFunction {
            nodes,
            values,
            cutoff,
        })
    }

    /// Sample a function on the node set of `qp`.
    pub fn from_fn<F>(f: F, qp: &QuadratureParams) -> Self
    where
        F: Fn(f64) -> f64,
    {
        let (nodes, _) = qp.nodes_weights();
        let values = nodes.iter().map(|&x| Complex64::new(f(x), 0.0)).collect();
        SampledRadialFunction {
            nodes,
            values,
            cutoff: qp.cutoff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformError {
    InvalidQuadrature,
    LengthMismatch,
    NonIncreasingNodes,
    /// Samples were not taken on the quadrature's own node set.
    NodeMismatch,
    Special(SpecialError),
    Q(QError),
}

impl fmt::Display for TransformError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformError::InvalidQuadrature => write!(f, "panels must be >= 1 and cutoff > 0"),
            TransformError::LengthMismatch => write!(f, "nodes and values differ in length"),
            TransformError::NonIncreasingNodes => write!(f, "nodes must be strictly increasing"),
            TransformError::NodeMismatch => {
                write!(f, "sample nodes do not match the quadrature node set")
            }
            TransformError::Special(e) => write!(f, "bessel evaluation: {e}"),
            TransformError::Q(e) => write!(f, "q-series evaluation: {e}"),
        }
    }
}

impl std::error::Error for TransformError {}

impl From<SpecialError> for TransformError {
    fn from(e: SpecialError) -> Self {
        TransformError::Special(e)
    }
}

impl From<QError> for TransformError {
    fn from(e: QError) -> Self {
        TransformError::Q(e)
    }
}

/// Value of a truncated half-line integral plus how much of it the final
/// panel contributed; large tails mean the cutoff was too small.
#[derive(Debug, Clone, Copy)]
pub struct QuadValue {
    pub value: Complex64,
    pub tail_fraction: f64,
}

impl QuadValue {
    pub fn flagged(&self) -> bool {
        self.tail_fraction > 1e-8
    }
}

fn check_alignment(f: &SampledRadialFunction, nodes: &[f64]) -> Result<(), TransformError> {
    if f.nodes.len() != nodes.len()
        || f.nodes
            .iter()
            .zip(nodes)
            .any(|(a, b)| (a - b).abs() > 1e-12 * b.abs().max(1.0))
    {
        return Err(TransformError::NodeMismatch);
    }
    Ok(())
}

/// `integral_0^R J_alpha(x t) f(x) x dx` by the configured rule.
///
/// `alpha` must be a nonnegative integer here: the quadrature drives Bessel
/// arguments far beyond where the power series survives in f64, and the
/// recurrence evaluation exists on integer orders only.
pub fn hankel_forward(
    f: &SampledRadialFunction,
    alpha: u32,
    t: f64,
    qp: &QuadratureParams,
) -> Result<QuadValue, TransformError> {
    let (nodes, weights) = qp.nodes_weights();
    check_alignment(f, &nodes)?;
    let mut total = Complex64::new(0.0, 0.0);
    let mut last_panel = Complex64::new(0.0, 0.0);
    let per_panel = nodes.len() / qp.panels.max(1);
    for (i, (&x, &w)) in nodes.iter().zip(&weights).enumerate() {
        let kernel = bessel_j_real(alpha as usize, (x * t).abs())?;
        let contribution = f.values[i] * kernel * x * w;
        total += contribution;
        if per_panel > 0 && i >= nodes.len() - per_panel {
            last_panel += contribution;
        }
    }
    Ok(QuadValue {
        value: total,
        tail_fraction: last_panel.norm() / total.norm().max(f64::MIN_POSITIVE),
    })
}

/// Uniform tabulation of `J_alpha` on `[0, max_arg]` with 6-point Lagrange
/// interpolation between nodes (error ~ h^6, far below the quadrature
/// tolerances). The kernel matrix needs tens of millions of evaluations;
/// the table needs one recurrence evaluation per node.
pub struct BesselTable {
    alpha: u32,
    h: f64,
    values: Vec<f64>,
}

impl BesselTable {
    pub fn new(alpha: u32, max_arg: f64) -> Result<Self, TransformError> {
        let h = 0.02;
        let n = (max_arg / h).ceil() as usize + 8;
        let mut values = Vec::with_capacity(n + 1);
        for i in 0..=n {
            values.push(bessel_j_real(alpha as usize, i as f64 * h)?);
        }
        Ok(BesselTable { alpha, h, values })
    }

    pub fn eval(&self, u: f64) -> f64 {
        debug_assert!(u >= 0.0);
        let pos = u / self.h;
        let mut base = pos.floor() as usize;
        // Center a 6-point stencil, clamped to the table.
        base = base.saturating_sub(2).min(self.values.len() - 6);
        let mut out = 0.0;
        for a in 0..6 {
            let xa = (base + a) as f64;
            let mut weight = 1.0;
            for b in 0..6 {
                if a != b {
                    let xb = (base + b) as f64;
                    weight *= (pos - xb) / (xa - xb);
                }
            }
            out += weight * self.values[base + a];
        }
        out
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }
}

/// Precomputed kernel matrix `J_alpha(x_i x_j)` over one node set, shared by
/// the forward transform, the inversion and the Plancherel identity.
pub struct HankelPlan {
    pub alpha: u32,
    pub qp: QuadratureParams,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kernel: Vec<f64>,
}

impl HankelPlan {
    pub fn new(alpha: u32, qp: QuadratureParams) -> Result<Self, TransformError> {
        let (nodes, weights) = qp.nodes_weights();
        let n = nodes.len();
        let max_node = nodes.last().copied().unwrap_or(0.0);
        let table = BesselTable::new(alpha, max_node * max_node)?;
        let mut kernel = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = table.eval(nodes[i] * nodes[j]);
                kernel[i * n + j] = v;
                kernel[j * n + i] = v;
            }
        }
        Ok(HankelPlan {
            alpha,
            qp,
            nodes,
            weights,
            kernel,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Transform samples on the plan's nodes into samples on the same nodes
    /// (the t-grid reuses the x-grid).
    pub fn apply(&self, values: &[Complex64]) -> Result<Vec<Complex64>, TransformError> {
        if values.len() != self.nodes.len() {
            return Err(TransformError::LengthMismatch);
        }
        let n = self.nodes.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.kernel[i * n..(i + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += values[j] * (row[j] * self.nodes[j] * self.weights[j]);
            }
            *o = acc;
        }
        Ok(out)
    }
}

/// Relative L2 distance (against the measure `x dx` on the nodes) between
/// `f` and forward-then-inverse applied to `f`.
pub fn hankel_roundtrip_error(
    f: &SampledRadialFunction,
    alpha: u32,
    qp: &QuadratureParams,
) -> Result<f64, TransformError> {
    let plan = HankelPlan::new(alpha, *qp)?;
    check_alignment(f, plan.nodes())?;
    let forward = plan.apply(&f.values)?;
    let back = plan.apply(&forward)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..f.values.len() {
        let w = plan.weights[i] * plan.nodes[i];
        num += w * (back[i] - f.values[i]).norm_sqr();
        den += w * f.values[i].norm_sqr();
    }
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok((num / den).sqrt())
}

/// `| integral rho F(rho) G(rho) drho  -  integral x f(x) g(x) dx |`
/// for `F`, `G` the Hankel transforms of `f`, `g`.
pub fn plancherel_residual(
    f: &SampledRadialFunction,
    g: &SampledRadialFunction,
    alpha: u32,
    qp: &QuadratureParams,
) -> Result<f64, TransformError> {
    let plan = HankelPlan::new(alpha, *qp)?;
    check_alignment(f, plan.nodes())?;
    check_alignment(g, plan.nodes())?;
    let ff = plan.apply(&f.values)?;
    let gg = plan.apply(&g.values)?;
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut rhs = Complex64::new(0.0, 0.0);
    for i in 0..f.values.len() {
        let w = plan.weights[i] * plan.nodes[i];
        lhs += ff[i] * gg[i] * w;
        rhs += f.values[i] * g.values[i] * w;
    }
    Ok((lhs - rhs).norm())
}

/// One q-Hankel lattice sum plus the share its window-boundary terms carried.
#[derive(Debug, Clone, Copy)]
pub struct QSumValue {
    pub value: Complex64,
    pub boundary_fraction: f64,
}

impl QSumValue {
    pub fn flagged(&self) -> bool {
        self.boundary_fraction > 1e-12
    }
}

/// `g(q^n) = sum_{k in window} q^{2k} J_alpha(q^{k+n}; q^2) f(q^k)`.
///
/// `f_values[i]` is the sample at `k = window.k_min + i`.
pub fn q_hankel_forward(
    f_values: &[Complex64],
    alpha: f64,
    q: QParam,
    n: i64,
    window: QLattice,
) -> Result<QSumValue, TransformError> {
    let len = (window.k_max - window.k_min + 1) as usize;
    if f_values.len() != len {
        return Err(TransformError::LengthMismatch);
    }
    let bessel = q_bessel_lattice(alpha, q, window.k_min + n, window.k_max + n)?;
    let mut total = Complex64::new(0.0, 0.0);
    let mut boundary = Complex64::new(0.0, 0.0);
    for (i, k) in window.iter().enumerate() {
        let term = f_values[i] * (q.0.powi(2 * k as i32) * bessel[i]);
        total += term;
        if k == window.k_min || k == window.k_max {
            boundary += term;
        }
    }
    Ok(QSumValue {
        value: total,
        boundary_fraction: boundary.norm() / total.norm().max(f64::MIN_POSITIVE),
    })
}

/// The inverse lattice sum; by the symmetry of the pair it is the same
/// formula with the roles of the indices swapped.
pub fn q_hankel_inverse(
    g_values: &[Complex64],
    alpha: f64,
    q: QParam,
    k: i64,
    window: QLattice,
) -> Result<QSumValue, TransformError> {
    q_hankel_forward(g_values, alpha, q, k, window)
}

/// Windowed orthogonality sum
/// `sum_k q^{2k+m+n} J_alpha(q^{k+n}; q^2) J_alpha(q^{k+m}; q^2)`,
/// which contracts to `delta_{m,n}`.
pub fn q_orthogonality_check(
    m: i64,
    n: i64,
    alpha: f64,
    q: QParam,
    window: QLattice,
) -> Result<QSumValue, TransformError> {
    let lo = window.k_min + m.min(n);
    let hi = window.k_max + m.max(n);
    let bessel = q_bessel_lattice(alpha, q, lo, hi)?;
    let at = |s: i64| bessel[(s - lo) as usize];
    let mut total = 0.0;
    let mut boundary = 0.0;
    for k in window.iter() {
        let term = q.0.powi((2 * k + m + n) as i32) * at(k + n) * at(k + m);
        total += term;
        if k == window.k_min || k == window.k_max {
            boundary += term;
        }
    }
    Ok(QSumValue {
        value: Complex64::new(total, 0.0),
        boundary_fraction: boundary.abs() / total.abs().max(f64::MIN_POSITIVE),
    })
}

/// q-Hankel transform of `f` against the substituted lattice
/// `x_k = (1-q)^{1/2} q^k`:
///
/// ```text
/// g_q(lambda) = (1-q)^2 sum_k q^{2k} f(x_k) J_alpha((1-q) lambda x_k; q^2)
/// ```
///
/// which tends to `integral f(x) J_alpha(lambda x) x dx` as `q -> 1`.
pub fn q_hankel_scaled(
    f: impl Fn(f64) -> f64,
    alpha: f64,
    q: QParam,
    lambda: f64,
) -> Result<Complex64, TransformError> {
    let s = (1.0 - q.0).sqrt();
    // Window: lattice points where a decaying f can matter at all.
    let x_hi = 12.0_f64;
    let x_lo = 1e-6_f64;
    let k_lo = ((x_hi / s).ln() / q.0.ln()).floor() as i64; // negative
    let k_hi = ((x_lo / s).ln() / q.0.ln()).ceil() as i64;
    let p = SeriesParams::default();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in k_lo..=k_hi {
        let x = s * q.0.powi(k as i32);
        let fx = f(x);
        if fx == 0.0 {
            continue;
        }
        let arg = Complex64::new((1.0 - q.0) * lambda * x, 0.0);
        let j = q_bessel_j(alpha, arg, QParam(q.0 * q.0), p)?;
        acc += j * (fx * q.0.powi(2 * k as i32));
    }
    Ok(acc * (1.0 - q.0) * (1.0 - q.0))
}

/// Max-over-lambda deviation between the scaled q-Hankel transform and the
/// classical transform of the same function.
pub fn q_to_classical_error(
    f: impl Fn(f64) -> f64 + Copy,
    alpha: u32,
    q: QParam,
    lambdas: &[f64],
    qp: &QuadratureParams,
) -> Result<f64, TransformError> {
    let sampled = SampledRadialFunction::from_fn(f, qp);
    let mut worst = 0.0_f64;
    for &lambda in lambdas {
        let classical = hankel_forward(&sampled, alpha, lambda, qp)?.value;
        let deformed = q_hankel_scaled(f, alpha as f64, q, lambda)?;
        worst = worst.max((classical - deformed).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss_qp() -> QuadratureParams {
        QuadratureParams::new(QuadRule::CompositeGauss, 400, 12.0).unwrap()
    }

    fn gaussian(x: f64) -> f64 {
        (-0.5 * x * x).exp()
    }

    #[test]
    fn quadrature_integrates_polynomials() {
        // integral_0^2 x^5 dx = 32/3; 4-point Gauss is exact, Simpson close.
        for (rule, tol) in [
            (QuadRule::CompositeGauss, 1e-13),
            (QuadRule::CompositeSimpson, 1e-6),
        ] {
            let qp = QuadratureParams::new(rule, 50, 2.0).unwrap();
            let (nodes, weights) = qp.nodes_weights();
            let got: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(&x, &w)| w * x.powi(5))
                .sum();
            assert!(
                (got - 32.0 / 3.0).abs() < tol,
                "{rule:?}: got {got}, want {}",
                32.0 / 3.0
            );
        }
    }

    #[test]
    fn forward_of_zero_is_zero() {
        let qp = gauss_qp();
        let f = SampledRadialFunction::from_fn(|_| 0.0, &qp);
        let v = hankel_forward(&f, 0, 1.0, &qp).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn gaussian_is_self_reciprocal_at_order_zero() {
        // Known closed form: the order-0 transform of exp(-x^2/2) is itself.
        let qp = gauss_qp();
        let f = SampledRadialFunction::from_fn(gaussian, &qp);
        let got = hankel_forward(&f, 0, 1.0, &qp).unwrap();
        let want = (-0.5_f64).exp();
        assert!(
            (got.value.re - want).abs() < 1e-8,
            "got {} want {want}",
            got.value.re
        );
        assert!(!got.flagged());
        // Brute-force oracle at 10x the panel density.
        let dense = QuadratureParams::new(QuadRule::CompositeGauss, 4000, 12.0).unwrap();
        let fd = SampledRadialFunction::from_fn(gaussian, &dense);
        let oracle = hankel_forward(&fd, 0, 1.0, &dense).unwrap();
        assert!((got.value - oracle.value).norm() < 1e-9);
    }

    #[test]
    fn step_function_times_x_nu_closed_form() {
        // f = x^nu on [0, 1], nu = 1, t = 2: the transform is J_2(2)/2
        // (frozen from the dense-quadrature oracle; also the antiderivative
        // of u^{nu+1} J_nu(u) is u^{nu+1} J_{nu+1}(u)).
        let qp = QuadratureParams::new(QuadRule::CompositeGauss, 600, 1.0).unwrap();
        let f = SampledRadialFunction::from_fn(|x| x, &qp);
        let got = hankel_forward(&f, 1, 2.0, &qp).unwrap().value.re;
        let frozen = 0.17641701430781886;
        assert!((got - frozen).abs() < 1e-10, "got {got}");
        let dense = QuadratureParams::new(QuadRule::CompositeGauss, 6000, 1.0).unwrap();
        let fd = SampledRadialFunction::from_fn(|x| x, &dense);
        let oracle = hankel_forward(&fd, 1, 2.0, &dense).unwrap().value.re;
        assert!((got - oracle).abs() < 1e-11);
    }

    #[test]
    fn bessel_table_matches_direct_evaluation() {
        for alpha in [0u32, 1, 2] {
            let table = BesselTable::new(alpha, 150.0).unwrap();
            assert_eq!(table.alpha(), alpha);
            for i in 0..500 {
                let u = 0.3 * i as f64 + 0.013;
                let direct = bessel_j_real(alpha as usize, u).unwrap();
                assert!(
                    (table.eval(u) - direct).abs() < 1e-11,
                    "alpha={alpha} u={u}: table {} direct {}",
                    table.eval(u),
                    direct
                );
            }
        }
    }

    #[test]
    fn roundtrip_of_zero_is_zero() {
        let qp = gauss_qp();
        let f = SampledRadialFunction::from_fn(|_| 0.0, &qp);
        assert_eq!(hankel_roundtrip_error(&f, 0, &qp).unwrap(), 0.0);
    }

    #[test]
    fn roundtrip_gaussian_order_zero() {
        let qp = gauss_qp();
        let f = SampledRadialFunction::from_fn(gaussian, &qp);
        let err = hankel_roundtrip_error(&f, 0, &qp).unwrap();
        assert!(err < 1e-6, "roundtrip error {err}");
    }

    #[test]
    fn simpson_rule_agrees_with_gauss() {
        let qp_g = gauss_qp();
        let qp_s = QuadratureParams::new(QuadRule::CompositeSimpson, 800, 12.0).unwrap();
        let fg = SampledRadialFunction::from_fn(gaussian, &qp_g);
        let fs = SampledRadialFunction::from_fn(gaussian, &qp_s);
        let a = hankel_forward(&fg, 0, 1.0, &qp_g).unwrap().value;
        let b = hankel_forward(&fs, 0, 1.0, &qp_s).unwrap().value;
        assert!((a - b).norm() < 1e-8, "gauss {a} simpson {b}");
    }

    #[test]
    fn node_mismatch_is_rejected() {
        let qp = gauss_qp();
        let other = QuadratureParams::new(QuadRule::CompositeGauss, 100, 12.0).unwrap();
        let f = SampledRadialFunction::from_fn(gaussian, &other);
        assert!(matches!(
            hankel_forward(&f, 0, 1.0, &qp),
            Err(TransformError::NodeMismatch)
        ));
    }

    #[test]
    fn plancherel_gaussians_and_zero() {
        let qp = gauss_qp();
        let zero = SampledRadialFunction::from_fn(|_| 0.0, &qp);
        assert_eq!(plancherel_residual(&zero, &zero, 0, &qp).unwrap(), 0.0);
        let f = SampledRadialFunction::from_fn(gaussian, &qp);
        let r = plancherel_residual(&f, &f, 0, &qp).unwrap();
        assert!(r < 1e-6, "plancherel residual {r}");
    }

    #[test]
    fn q_hankel_delta_input() {
        // f = delta at k = 0 picks out the single term J_alpha(q^n; q^2).
        let q = QParam(0.5);
        let window = QLattice::new(0, 0).unwrap();
        let f = [Complex64::new(1.0, 0.0)];
        let got = q_hankel_forward(&f, 0.0, q, 0, window).unwrap().value;
        let want = q_bessel_j(
            0.0,
            Complex64::new(1.0, 0.0),
            QParam(0.25),
            SeriesParams::default(),
        )
        .unwrap();
        assert!((got - want).norm() < 1e-15);
    }

    #[test]
    fn q_hankel_roundtrip_on_compact_support() {
        let q = QParam(0.5);
        let window = QLattice::new(-40, 60).unwrap();
        let len = (window.k_max - window.k_min + 1) as usize;
        // Deterministic pseudo-random values supported on k in [-3, 3].
        let mut f = vec![Complex64::new(0.0, 0.0); len];
        for k in -3..=3i64 {
            let idx = (k - window.k_min) as usize;
            let x = (k as f64 * 0.7).sin() + 0.3;
            let y = (k as f64 * 1.3).cos() * 0.4;
            f[idx] = Complex64::new(x, y);
        }
        let g: Vec<Complex64> = window
            .iter()
            .map(|n| q_hankel_forward(&f, 0.0, q, n, window).unwrap().value)
            .collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for k in -3..=3i64 {
            let idx = (k - window.k_min) as usize;
            let back = q_hankel_inverse(&g, 0.0, q, k, window).unwrap().value;
            num += (back - f[idx]).norm_sqr();
            den += f[idx].norm_sqr();
        }
        let rel = (num / den).sqrt();
        assert!(rel < 1e-8, "roundtrip error {rel}");
    }

    #[test]
    fn q_orthogonality_spot_checks() {
        let window = QLattice::new(-80, 80).unwrap();
        for &(m, n, alpha, qv) in &[
            (0i64, 0i64, 0.0, 0.5),
            (0, 1, 0.0, 0.5),
            (2, 2, 1.0, 0.3),
            (-3, 1, 1.0, 0.7),
        ] {
            let got = q_orthogonality_check(m, n, alpha, QParam(qv), window)
                .unwrap()
                .value
                .re;
            let want = if m == n { 1.0 } else { 0.0 };
            assert!(
                (got - want).abs() < 1e-8,
                "m={m} n={n} alpha={alpha} q={qv}: {got}"
            );
        }
    }

    #[test]
    fn q_to_one_error_shrinks() {
        let qp = gauss_qp();
        let lambdas = [0.5, 1.0, 1.5];
        let e_low = q_to_classical_error(gaussian, 0, QParam(0.9), &lambdas, &qp).unwrap();
        let e_high = q_to_classical_error(gaussian, 0, QParam(0.99), &lambdas, &qp).unwrap();
        assert!(
            e_high < e_low,
            "error did not shrink: q=0.9 -> {e_low}, q=0.99 -> {e_high}"
        );
    }
}
