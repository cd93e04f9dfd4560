//! Python bindings for the mralab verification library.
//!
//! The native extension is named `mralab_py`; `python/smoke_test.py` at the
//! repository root builds it with cargo and exercises the surface.

use mralab::bwm;
use mralab::cuntz;
use mralab::markov::{self, Normalization};
use mralab::mra;
use mralab::qcalc::{self, QLattice, QParam};
use mralab::report;
use mralab::special::{self, BesselOrder, SeriesParams};
use mralab::transforms;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::BTreeMap;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Gamma function on the positive real axis.
#[pyfunction]
fn gamma(x: f64) -> PyResult<f64> {
    special::gamma(x).map_err(err)
}

/// Bessel function of the first kind at a complex argument.
#[pyfunction]
fn bessel_j(alpha: f64, z: Complex64) -> PyResult<Complex64> {
    special::bessel_j(BesselOrder(alpha), z, SeriesParams::default()).map_err(err)
}

/// Defect of the addition formula under a symmetric order window.
#[pyfunction]
fn addition_formula_residual(n: i64, x: Complex64, y: Complex64, window: usize) -> PyResult<f64> {
    special::addition_formula_residual(n, x, y, window).map_err(err)
}

/// Jackson q-Bessel function `J_alpha(x; q)`.
#[pyfunction]
fn q_bessel_j(alpha: f64, x: Complex64, q: f64) -> PyResult<Complex64> {
    qcalc::q_bessel_j(alpha, x, QParam::new(q).map_err(err)?, SeriesParams::default())
        .map_err(err)
}

/// q-Pochhammer symbol `(a; q)_n`; `n = None` is the infinite product.
#[pyfunction]
#[pyo3(signature = (a, q, n=None))]
fn q_pochhammer(a: Complex64, q: f64, n: Option<u32>) -> PyResult<Complex64> {
    Ok(qcalc::q_pochhammer(a, QParam::new(q).map_err(err)?, n))
}

/// The q-number `[n]_{q^b}`.
#[pyfunction]
#[pyo3(signature = (n, q, base_exponent=1))]
fn q_number(n: u32, q: f64, base_exponent: u32) -> PyResult<f64> {
    Ok(qcalc::q_number(n, QParam::new(q).map_err(err)?, base_exponent))
}

/// Windowed q-Hankel orthogonality sum; contracts to `delta_{m,n}`.
#[pyfunction]
#[pyo3(signature = (m, n, alpha, q, window=80))]
fn q_orthogonality(m: i64, n: i64, alpha: f64, q: f64, window: i64) -> PyResult<f64> {
    let lat = QLattice::new(-window, window).map_err(err)?;
    Ok(
        transforms::q_orthogonality_check(m, n, alpha, QParam::new(q).map_err(err)?, lat)
            .map_err(err)?
            .value
            .re,
    )
}

/// Relative L2 roundtrip error of the Hankel pair on a Gaussian-type test
/// function `x^alpha exp(-x^2/2)` at the given quadrature settings.
#[pyfunction]
#[pyo3(signature = (alpha, panels=1000, cutoff=40.0))]
fn hankel_roundtrip_error(alpha: u32, panels: usize, cutoff: f64) -> PyResult<f64> {
    let qp = transforms::QuadratureParams::new(transforms::QuadRule::CompositeGauss, panels, cutoff)
        .map_err(err)?;
    let a = alpha as i32;
    let f = transforms::SampledRadialFunction::from_fn(
        move |x| x.powi(a) * (-0.5 * x * x).exp(),
        &qp,
    );
    transforms::hankel_roundtrip_error(&f, alpha, &qp).map_err(err)
}

fn parse_variant(variant: &str, q: Option<f64>) -> PyResult<mra::Variant> {
    match (variant, q) {
        ("c", _) => Ok(mra::Variant::RootOfUnity),
        ("c_q", Some(q)) => Ok(mra::Variant::QRoot(QParam::new(q).map_err(err)?)),
        ("d_q", Some(q)) => Ok(mra::Variant::QRadial(QParam::new(q).map_err(err)?)),
        _ => Err(PyValueError::new_err(
            "variant must be 'c', 'c_q' or 'd_q'; the q variants need q",
        )),
    }
}

/// A completed multiresolution filter bank.
#[pyclass]
struct FilterBank {
    inner: mra::FilterBank,
}

#[pymethods]
impl FilterBank {
    /// Complete seeded random normalized m0 rows on a circle grid.
    #[staticmethod]
    #[pyo3(signature = (nu, variant, q=None, grid=64, seed=0))]
    fn complete_random(
        nu: u32,
        variant: &str,
        q: Option<f64>,
        grid: usize,
        seed: u64,
    ) -> PyResult<Self> {
        let variant = parse_variant(variant, q)?;
        let grid = mra::default_circle_grid(grid);
        let rows = mra::random_unit_rows(variant, nu, grid.len(), seed);
        Ok(FilterBank {
            inner: mra::complete_filter_bank(nu, variant, grid, &rows).map_err(err)?,
        })
    }

    /// `max |M M* - I|` over the grid.
    fn unitarity_residual(&self) -> f64 {
        mra::bank_unitarity_residual(&self.inner)
    }

    /// Defect of the variant's m0 normalization identity on the first row.
    fn m0_identity_residual(&self) -> PyResult<f64> {
        let m0: Vec<Vec<Complex64>> = (0..self.inner.grid.len())
            .map(|g| self.inner.m0_row(g).to_vec())
            .collect();
        mra::orbit_normalization_residual(&m0, self.inner.variant, self.inner.nu).map_err(err)
    }

    /// Max reconstruction error of the cyclic Fourier round trip.
    fn cyclic_fourier_roundtrip_error(&self) -> PyResult<f64> {
        let coeffs = cuntz::cyclic_fourier(&self.inner).map_err(err)?;
        let back = cuntz::cyclic_fourier_inverse(&self.inner, &coeffs).map_err(err)?;
        let mut worst: f64 = 0.0;
        for i in 0..self.inner.filters.len() {
            for (a, b) in self.inner.filters[i].iter().zip(&back[i]) {
                worst = worst.max((a - b).norm());
            }
        }
        Ok(worst)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(FilterBank {
            inner: mra::FilterBank::from_json(s).map_err(err)?,
        })
    }

    #[getter]
    fn nu(&self) -> u32 {
        self.inner.nu
    }
}

/// Cuntz-relation residuals of the lattice representation induced by a bank
/// completed from seeded rows on the fiber grid.
#[pyfunction]
#[pyo3(signature = (nu, variant, q=None, seed=0))]
fn cuntz_residuals(nu: u32, variant: &str, q: Option<f64>, seed: u64) -> PyResult<(f64, f64)> {
    let variant = parse_variant(variant, q)?;
    let (k_min, k_max, angular) = (-40i64, 40i64, nu + 1);
    let grid = cuntz::fiber_grid(variant, nu, k_min, k_max, angular, 0.5).map_err(err)?;
    let rows = mra::random_unit_rows(variant, nu, grid.len(), seed);
    let bank = mra::complete_filter_bank(nu, variant, grid, &rows).map_err(err)?;
    let rep = cuntz::CuntzRep::from_bank(&bank, k_min, k_max, angular, 0.5).map_err(err)?;
    let res = cuntz::cuntz_residuals(&rep, 3, 10).map_err(err)?;
    Ok((res.isometry_defect, res.completeness_defect))
}

/// Exact endpoints of the N-adic interval addressed by a digit string,
/// as `(lo_num, hi_num, den)`.
#[pyfunction]
fn partition_interval(base: u32, digits: &str) -> PyResult<(i64, i64, i64)> {
    let word = cuntz::NAdicWord::parse(base, digits).map_err(err)?;
    let iv = cuntz::partition_interval(&word);
    Ok((iv.lo_num as i64, iv.hi_num as i64, iv.den as i64))
}

/// The q-parametric doubly stochastic transition matrix.
#[pyclass]
struct TransitionMatrix {
    inner: markov::TransitionMatrix,
}

#[pymethods]
impl TransitionMatrix {
    #[new]
    #[pyo3(signature = (n, q, row_exact=true))]
    fn new(n: usize, q: f64, row_exact: bool) -> PyResult<Self> {
        let norm = if row_exact {
            Normalization::RowExact
        } else {
            Normalization::Paper
        };
        Ok(TransitionMatrix {
            inner: markov::build_transition(n, q, norm).map_err(err)?,
        })
    }

    fn entries(&self) -> Vec<f64> {
        self.inner.p.clone()
    }

    fn row_sums(&self) -> Vec<f64> {
        self.inner.row_sums()
    }

    fn col_sums(&self) -> Vec<f64> {
        self.inner.col_sums()
    }

    fn doubly_stochastic_defect(&self) -> f64 {
        self.inner.doubly_stochastic_defect()
    }

    /// Seeded inverse-CDF simulation; returns the state path.
    fn simulate(&self, start: usize, steps: usize, seed: u64) -> PyResult<Vec<u8>> {
        Ok(markov::simulate(&self.inner, start, steps, seed)
            .map_err(err)?
            .states)
    }

    fn stationary(&self) -> PyResult<Vec<f64>> {
        Ok(markov::stationary(&self.inner).map_err(err)?.distribution)
    }
}

/// Braid-trace bridge value `q^{(N+j-i+1) mod N} / [N]_{q^2}`.
#[pyfunction]
fn trace_link(n: usize, q: f64, i: usize, j: usize) -> f64 {
    markov::trace_link(n, q, i, j)
}

/// The explicit braid operator pair (G, E) for quantum SO(2m+1).
#[pyclass]
struct BwmSystem {
    m: u32,
    q: f64,
    g: bwm::TensorOperator,
    e: bwm::TensorOperator,
}

#[pymethods]
impl BwmSystem {
    #[new]
    fn new(m: u32, q: f64) -> PyResult<Self> {
        Ok(BwmSystem {
            m,
            q,
            g: bwm::build_g(m, q, bwm::GConfig::LITERAL).map_err(err)?,
            e: bwm::build_e_direct(m, q).map_err(err)?,
        })
    }

    fn x(&self) -> f64 {
        bwm::x_value(self.m, self.q)
    }

    fn trace_e(&self) -> f64 {
        self.e.trace().re
    }

    /// `|E^2 - xE|` relative to the identity's scale.
    fn e_squared_residual(&self) -> f64 {
        bwm::e_squared_check(&self.e, self.m, self.q) / bwm::e_squared_scale(&self.e, self.m, self.q)
    }

    /// `(residual, route_gap)` of the Yang-Baxter check.
    fn ybe_residual(&self) -> PyResult<(f64, f64)> {
        let r = bwm::ybe_residual(&self.g).map_err(err)?;
        Ok((r.residual, r.route_gap))
    }

    fn markov_trace(&self) -> f64 {
        bwm::markov_trace(self.m, self.q)
    }

    fn quantum_dimension(&self) -> f64 {
        bwm::quantum_dimension(self.m, self.q)
    }

    fn eigenvalues(&self) -> Vec<Complex64> {
        bwm::estimate_p(&self.g, self.q).eigenvalues
    }

    /// Roots of `p - 1/p = (x - 1)(q - 1/q)`.
    fn p_from_x(&self) -> (f64, f64) {
        bwm::estimate_p(&self.g, self.q).p_from_x
    }

    /// JSON export of G: `{m, q, arity, dim, entries}` row-major.
    fn g_json(&self) -> String {
        self.g.to_json(Some(self.q))
    }

    /// JSON export of E in the same schema.
    fn e_json(&self) -> String {
        self.e.to_json(Some(self.q))
    }
}

/// Run a named verification suite; returns the JSON report text.
#[pyfunction]
#[pyo3(signature = (suite, overrides=None))]
fn run_suite(suite: &str, overrides: Option<BTreeMap<String, f64>>) -> PyResult<String> {
    let suite = report::Suite::parse(suite)
        .ok_or_else(|| PyValueError::new_err(format!("unknown suite {suite:?}")))?;
    let mut params = report::Params::default();
    if let Some(map) = overrides {
        for (k, v) in map {
            params.set(&k, v).map_err(err)?;
        }
    }
    let rep = report::run_suite(suite, &params).map_err(err)?;
    Ok(report::render(&rep, report::Format::Json))
}

#[pymodule]
fn mralab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(addition_formula_residual, m)?)?;
    m.add_function(wrap_pyfunction!(q_bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(q_pochhammer, m)?)?;
    m.add_function(wrap_pyfunction!(q_number, m)?)?;
    m.add_function(wrap_pyfunction!(q_orthogonality, m)?)?;
    m.add_function(wrap_pyfunction!(hankel_roundtrip_error, m)?)?;
    m.add_function(wrap_pyfunction!(cuntz_residuals, m)?)?;
    m.add_function(wrap_pyfunction!(partition_interval, m)?)?;
    m.add_function(wrap_pyfunction!(trace_link, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_class::<FilterBank>()?;
    m.add_class::<TransitionMatrix>()?;
    m.add_class::<BwmSystem>()?;
    Ok(())
}
