//! Concrete Cuntz-algebra representations on lattice-discretized functions,
//! N-adic projection-valued measures and the cyclic-group Fourier pair.
//!
//! The lattice model uses exact index arithmetic for the branch system with
//! `N = nu + 1`: the covering map folds the radial index, `sigma(k) =
//! floor(k / N)`, and its sections are `sigma_r(k) = N k + r`. The sections
//! have disjoint images (the residue classes mod N) and `sigma . sigma_r =
//! id` holds exactly. Each radial fiber `{N a + r : r}` over a base point
//! carries one unitary from the filter bank; row orthonormality of that
//! unitary gives `S_i* S_j = delta_{ij}` and column orthonormality gives
//! `sum_k S_k S_k* = 1`, up to mass the window edge drops (monitored, never
//! interpolated).

use crate::mra::{orbit_points, FilterBank, MraError, Variant};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Complex-valued function on the radial-by-angular lattice; point `(k, j)`
/// represents `z = q^k e^{2 pi i j / A}` (q-case) or `r^k e^{2 pi i j / A}`
/// on a geometric radial grid (classical case).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction {
    pub q: Option<f64>,
    pub k_min: i64,
    pub k_max: i64,
    pub angular: u32,
    pub values: Vec<Complex64>,
}

impl LatticeFunction {
    pub fn zeros(q: Option<f64>, k_min: i64, k_max: i64, angular: u32) -> Self {
        let len = ((k_max - k_min + 1) as usize) * angular as usize;
        LatticeFunction {
            q,
            k_min,
            k_max,
            angular,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn index(&self, k: i64, j: u32) -> usize {
        ((k - self.k_min) as usize) * self.angular as usize + j as usize
    }

    pub fn get(&self, k: i64, j: u32) -> Complex64 {
        if k < self.k_min || k > self.k_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[self.index(k, j)]
        }
    }

    pub fn set(&mut self, k: i64, j: u32, v: Complex64) {
        let idx = self.index(k, j);
        self.values[idx] = v;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &LatticeFunction) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Seeded pseudo-random unit vector supported on `|k| <= k_support`.
    pub fn random_unit(
        q: Option<f64>,
        k_min: i64,
        k_max: i64,
        angular: u32,
        k_support: i64,
        seed: u64,
    ) -> Self {
        let mut f = LatticeFunction::zeros(q, k_min, k_max, angular);
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(0xabcd);
        let mut rand = move || {
            state ^= state >> 30;
            state = state.wrapping_mul(0xbf58476d1ce4e5b9);
            state ^= state >> 27;
            state = state.wrapping_mul(0x94d049bb133111eb);
            state ^= state >> 31;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for k in -k_support..=k_support {
            for j in 0..angular {
                f.set(k, j, Complex64::new(rand(), rand()));
            }
        }
        let n = f.norm_sqr().sqrt();
        for v in f.values.iter_mut() {
            *v /= n;
        }
        f
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeFunctionJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    k_min: i64,
    k_max: i64,
    #[serde(rename = "A")]
    a: u32,
    values: Vec<[f64; 2]>,
}

impl LatticeFunction {
    /// `{q?, k_min, k_max, A, values}` with row-major `[re, im]` pairs.
    pub fn to_json(&self) -> String {
        let doc = LatticeFunctionJson {
            q: self.q,
            k_min: self.k_min,
            k_max: self.k_max,
            a: self.angular,
            values: self.values.iter().map(|c| [c.re, c.im]).collect(),
        };
        serde_json::to_string(&doc).expect("lattice function serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, CuntzError> {
        let doc: LatticeFunctionJson =
            serde_json::from_str(s).map_err(|e| CuntzError::Serde(e.to_string()))?;
        let expect = ((doc.k_max - doc.k_min + 1) as usize) * doc.a as usize;
        if doc.values.len() != expect {
            return Err(CuntzError::Serde("value table size mismatch".into()));
        }
        Ok(LatticeFunction {
            q: doc.q,
            k_min: doc.k_min,
            k_max: doc.k_max,
            angular: doc.a,
            values: doc
                .values
                .iter()
                .map(|p| Complex64::new(p[0], p[1]))
                .collect(),
        })
    }
}

/// Finite word over `{0, ..., N-1}` addressing a partition interval and a
/// composed isometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NAdicWord {
    pub base: u32,
    pub letters: Vec<u8>,
}

impl NAdicWord {
    pub fn new(base: u32, letters: Vec<u8>) -> Result<Self, CuntzError> {
        if base < 2 || base > 10 {
            return Err(CuntzError::BadWord("base must be in 2..=10"));
        }
        if letters.iter().any(|&a| a as u32 >= base) {
            return Err(CuntzError::BadWord("letter out of range"));
        }
        Ok(NAdicWord { base, letters })
    }

    /// Digit-string form, e.g. `(1,0,2)` in base 3 prints as "102".
    pub fn digits(&self) -> String {
        self.letters.iter().map(|a| (b'0' + a) as char).collect()
    }

    pub fn parse(base: u32, s: &str) -> Result<Self, CuntzError> {
        let letters = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&d| d < base)
                    .map(|d| d as u8)
                    .ok_or(CuntzError::BadWord("invalid digit"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        NAdicWord::new(base, letters)
    }
}

/// Exact endpoints of the N-adic interval `I_k(a) = [lo, lo + N^{-k})`
/// as rationals over the common denominator `N^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NAdicInterval {
    pub lo_num: i128,
    pub hi_num: i128,
    pub den: i128,
}

/// `I_k(a)` with `lo = sum_i a_i N^{-i}`, `hi = lo + N^{-k}`, exactly.
pub fn partition_interval(word: &NAdicWord) -> NAdicInterval {
    let n = word.base as i128;
    let k = word.letters.len() as u32;
    let den = n.pow(k);
    let mut lo = 0i128;
    for &a in &word.letters {
        lo = lo * n + a as i128;
    }
    NAdicInterval {
        lo_num: lo,
        hi_num: lo + 1,
        den,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CuntzError {
    /// Angular resolution must be a positive multiple of `nu + 1`, and the
    /// radial window must contain 0.
    BadGeometry(&'static str),
    /// Bank grid does not enumerate the lattice fiber base points.
    GridIncompatible,
    BadWord(&'static str),
    /// `pvm_measure` requires a unit vector.
    Unnormalized(f64),
    LetterOutOfRange,
    Mra(MraError),
    Serde(String),
}

impl fmt::Display for CuntzError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CuntzError::BadGeometry(s) => write!(f, "bad lattice geometry: {s}"),
            CuntzError::GridIncompatible => {
                write!(f, "bank grid incompatible with the lattice fiber structure")
            }
            CuntzError::BadWord(s) => write!(f, "bad N-adic word: {s}"),
            CuntzError::Unnormalized(n) => {
                write!(f, "function norm {n} differs from 1 beyond 1e-12")
            }
            CuntzError::LetterOutOfRange => write!(f, "letter exceeds nu"),
            CuntzError::Mra(e) => write!(f, "filter bank: {e}"),
            CuntzError::Serde(s) => write!(f, "serialization: {s}"),
        }
    }
}

impl std::error::Error for CuntzError {}

impl From<MraError> for CuntzError {
    fn from(e: MraError) -> Self {
        CuntzError::Mra(e)
    }
}

/// Radial fold and its sections, as exact index maps.
#[derive(Debug, Clone, Copy)]
pub struct BranchMaps {
    pub n: i64,
}

impl BranchMaps {
    pub fn fold(&self, k: i64) -> i64 {
        k.div_euclid(self.n)
    }

    pub fn branch_of(&self, k: i64) -> usize {
        k.rem_euclid(self.n) as usize
    }

    pub fn section(&self, r: usize, k: i64) -> i64 {
        self.n * k + r as i64
    }
}

/// Base points of the radial fibers: fiber `(a, j)` sits over
/// `t_{a,j} = base^{N a} e^{2 pi i j / A}` with `base = q` for the q-radial
/// variant and a fixed geometric radius otherwise.
pub fn fiber_grid(
    variant: Variant,
    nu: u32,
    k_min: i64,
    k_max: i64,
    angular: u32,
    classical_radius: f64,
) -> Result<Vec<Complex64>, CuntzError> {
    if angular == 0 || angular % (nu + 1) != 0 {
        return Err(CuntzError::BadGeometry("angular must be a multiple of nu+1"));
    }
    if k_min > 0 || k_max < 0 {
        return Err(CuntzError::BadGeometry("radial window must contain 0"));
    }
    let n = (nu + 1) as i64;
    let a_min = k_min.div_euclid(n);
    let a_max = k_max.div_euclid(n);
    let base = match variant {
        Variant::QRadial(q) => q.0,
        _ => classical_radius,
    };
    let mut grid = Vec::with_capacity(((a_max - a_min + 1) as usize) * angular as usize);
    for a in a_min..=a_max {
        for j in 0..angular {
            let radius = base.powi((n * a) as i32);
            let theta = 2.0 * std::f64::consts::PI * j as f64 / angular as f64;
            grid.push(Complex64::from_polar(radius, theta));
        }
    }
    Ok(grid)
}

/// A Cuntz-algebra representation: one unitary per radial fiber, drawn from
/// a filter bank sampled on the fiber base points.
pub struct CuntzRep {
    pub nu: u32,
    pub q: Option<f64>,
    pub k_min: i64,
    pub k_max: i64,
    pub angular: u32,
    a_min: i64,
    a_max: i64,
    unitaries: Vec<DMatrix<Complex64>>,
}

impl CuntzRep {
    /// Build the representation from a bank whose grid enumerates the fiber
    /// base points produced by [`fiber_grid`] (same ordering).
    pub fn from_bank(
        bank: &FilterBank,
        k_min: i64,
        k_max: i64,
        angular: u32,
        classical_radius: f64,
    ) -> Result<Self, CuntzError> {
        let expected = fiber_grid(bank.variant, bank.nu, k_min, k_max, angular, classical_radius)?;
        if bank.grid.len() != expected.len()
            || bank
                .grid
                .iter()
                .zip(&expected)
                .any(|(a, b)| (a - b).norm() > 1e-10 * b.norm().max(1e-30))
        {
            return Err(CuntzError::GridIncompatible);
        }
        let n = (bank.nu + 1) as i64;
        let a_min = k_min.div_euclid(n);
        let a_max = k_max.div_euclid(n);
        let unitaries = (0..bank.grid.len()).map(|g| bank.matrix_at(g)).collect();
        Ok(CuntzRep {
            nu: bank.nu,
            q: bank.variant.q(),
            k_min,
            k_max,
            angular,
            a_min,
            a_max,
            unitaries,
        })
    }

    pub fn branches(&self) -> BranchMaps {
        BranchMaps {
            n: (self.nu + 1) as i64,
        }
    }

    fn unitary(&self, a: i64, j: u32) -> Option<&DMatrix<Complex64>> {
        if a < self.a_min || a > self.a_max {
            return None;
        }
        let idx = ((a - self.a_min) as usize) * self.angular as usize + j as usize;
        self.unitaries.get(idx)
    }

    pub fn blank(&self) -> LatticeFunction {
        LatticeFunction::zeros(self.q, self.k_min, self.k_max, self.angular)
    }

    /// `(S_i xi)(N a + r, j) = U(a, j)[i, r] xi(a, j)`: the filter sample on
    /// the fiber (in the unitary gauge) times the folded input.
    pub fn apply_s(&self, i: usize, xi: &LatticeFunction) -> Result<LatticeFunction, CuntzError> {
        self.check_compatible(xi)?;
        if i > self.nu as usize {
            return Err(CuntzError::LetterOutOfRange);
        }
        let br = self.branches();
        let mut out = self.blank();
        for k in self.k_min..=self.k_max {
            let a = br.fold(k);
            let r = br.branch_of(k);
            for j in 0..self.angular {
                let Some(u) = self.unitary(a, j) else { continue };
                let v = u[(i, r)] * xi.get(a, j);
                out.set(k, j, v);
            }
        }
        Ok(out)
    }

    /// `(S_i* eta)(a, j) = sum_r conj(U(a, j)[i, r]) eta(N a + r, j)`,
    /// branch values outside the window treated as zero.
    pub fn apply_s_star(
        &self,
        i: usize,
        eta: &LatticeFunction,
    ) -> Result<LatticeFunction, CuntzError> {
        self.check_compatible(eta)?;
        if i > self.nu as usize {
            return Err(CuntzError::LetterOutOfRange);
        }
        let br = self.branches();
        let mut out = self.blank();
        for a in self.k_min..=self.k_max {
            for j in 0..self.angular {
                let Some(u) = self.unitary(a, j) else { continue };
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..=(self.nu as usize) {
                    acc += u[(i, r)].conj() * eta.get(br.section(r, a), j);
                }
                out.set(a, j, acc);
            }
        }
        Ok(out)
    }

    fn check_compatible(&self, f: &LatticeFunction) -> Result<(), CuntzError> {
        if f.k_min != self.k_min || f.k_max != self.k_max || f.angular != self.angular {
            return Err(CuntzError::BadGeometry("lattice function off the rep grid"));
        }
        Ok(())
    }

    /// l2 mass of `f` in the window-edge region where fiber operations can
    /// drop values; relations are exact only away from it.
    pub fn boundary_mass(&self, f: &LatticeFunction) -> f64 {
        let br = self.branches();
        let n = (self.nu + 1) as i64;
        let partial = |a: i64| n * a < self.k_min || n * a + n - 1 > self.k_max;
        let mut acc = 0.0;
        for k in self.k_min..=self.k_max {
            if partial(k) || partial(br.fold(k)) {
                for j in 0..self.angular {
                    acc += f.get(k, j).norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    /// Composed isometry along a word: `S_a = S_{a_1} ... S_{a_k}`.
    pub fn apply_word(
        &self,
        word: &NAdicWord,
        xi: &LatticeFunction,
    ) -> Result<LatticeFunction, CuntzError> {
        if word.base != self.nu + 1 {
            return Err(CuntzError::BadWord("word base differs from nu+1"));
        }
        let mut cur = xi.clone();
        for &a in word.letters.iter().rev() {
            cur = self.apply_s(a as usize, &cur)?;
        }
        Ok(cur)
    }

    /// `mu_f(I_k(a)) = || S_a* f ||^2` for a unit vector `f`.
    pub fn pvm_measure(
        &self,
        f: &LatticeFunction,
        word: &NAdicWord,
    ) -> Result<f64, CuntzError> {
        let norm = f.norm_sqr().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(CuntzError::Unnormalized(norm));
        }
        if word.base != self.nu + 1 {
            return Err(CuntzError::BadWord("word base differs from nu+1"));
        }
        let mut cur = f.clone();
        for &a in &word.letters {
            cur = self.apply_s_star(a as usize, &cur)?;
        }
        Ok(cur.norm_sqr())
    }
}

/// Residuals of the two Cuntz relations measured over a probe family
/// (indicator basis on the interior plus seeded random vectors).
#[derive(Debug, Clone, Copy)]
pub struct CuntzResiduals {
    /// `max_{i,j} max_probe || (S_i* S_j - delta_{ij}) xi ||`
    pub isometry_defect: f64,
    /// `max_probe || (sum_k S_k S_k* - 1) eta ||`
    pub completeness_defect: f64,
}

/// Probe both relations. The probes are indicators on `|k| <= probe_radius`
/// plus `extra_random` seeded unit vectors on the same support.
pub fn cuntz_residuals(
    rep: &CuntzRep,
    probe_radius: i64,
    extra_random: usize,
) -> Result<CuntzResiduals, CuntzError> {
    let n = rep.nu as usize + 1;
    let mut probes: Vec<LatticeFunction> = Vec::new();
    for k in -probe_radius..=probe_radius {
        for j in 0..rep.angular {
            let mut f = rep.blank();
            f.set(k, j, Complex64::new(1.0, 0.0));
            probes.push(f);
        }
    }
    for s in 0..extra_random {
        probes.push(LatticeFunction::random_unit(
            rep.q,
            rep.k_min,
            rep.k_max,
            rep.angular,
            probe_radius,
            1000 + s as u64,
        ));
    }

    let mut iso: f64 = 0.0;
    let mut comp: f64 = 0.0;
    for xi in &probes {
        for i in 0..n {
            let si_xi = rep.apply_s(i, xi)?;
            for j in 0..n {
                let sj_xi = if j == i { si_xi.clone() } else { rep.apply_s(j, xi)? };
                let back = rep.apply_s_star(i, &sj_xi)?;
                let mut defect = 0.0f64;
                for (idx, v) in back.values.iter().enumerate() {
                    let target = if i == j { xi.values[idx] } else { Complex64::new(0.0, 0.0) };
                    defect += (v - target).norm_sqr();
                }
                iso = iso.max(defect.sqrt());
            }
        }
        let mut total = rep.blank();
        for i in 0..n {
            let part = rep.apply_s(i, &rep.apply_s_star(i, xi)?)?;
            for (t, p) in total.values.iter_mut().zip(&part.values) {
                *t += p;
            }
        }
        let mut defect = 0.0f64;
        for (t, x) in total.values.iter().zip(&xi.values) {
            defect += (t - x).norm_sqr();
        }
        comp = comp.max(defect.sqrt());
    }
    Ok(CuntzResiduals {
        isometry_defect: iso,
        completeness_defect: comp,
    })
}

/// Cyclic-group Fourier coefficients of the bank's filters over each orbit:
/// for root-of-unity orbits
/// `A_{i,j}(t^N) = (1/N) sum_{w^N = t^N} w^{-j} m_i(w)`,
/// and for the radial orbit the characters of `Z_N` in the branch index:
/// `A_{i,j}(t) = (1/N) sum_r e^{-2 pi i r j / N} m_i(t q^r)`.
#[derive(Debug, Clone)]
pub struct CyclicCoeffs {
    pub nu: u32,
    /// `coeffs[i][g * N + j]`
    pub coeffs: Vec<Vec<Complex64>>,
}

pub fn cyclic_fourier(bank: &FilterBank) -> Result<CyclicCoeffs, CuntzError> {
    let n = bank.orbit_len();
    for f in &bank.filters {
        if f.len() != bank.grid.len() * n {
            return Err(CuntzError::GridIncompatible);
        }
    }
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); bank.grid.len() * n]; n];
    for (g, &t) in bank.grid.iter().enumerate() {
        let orbit = orbit_points(bank.variant, bank.nu, t);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (r, &w) in orbit.iter().enumerate() {
                    let phase = match bank.variant {
                        Variant::QRadial(_) => Complex64::from_polar(
                            1.0,
                            -2.0 * std::f64::consts::PI * (r as f64) * (j as f64) / n as f64,
                        ),
                        _ => w.powi(-(j as i32)),
                    };
                    acc += phase * bank.filters[i][g * n + r];
                }
                coeffs[i][g * n + j] = acc / n as f64;
            }
        }
    }
    Ok(CyclicCoeffs {
        nu: bank.nu,
        coeffs,
    })
}

/// Reconstruct filter samples from cyclic Fourier coefficients:
/// `m_i(sigma_s t) = sum_j (sigma_s t)^j A_{i,j}` (root-of-unity) or the
/// plain character sum (radial orbit).
pub fn cyclic_fourier_inverse(
    bank_like: &FilterBank,
    coeffs: &CyclicCoeffs,
) -> Result<Vec<Vec<Complex64>>, CuntzError> {
    let n = bank_like.orbit_len();
    if coeffs.nu != bank_like.nu {
        return Err(CuntzError::GridIncompatible);
    }
    let mut filters = vec![vec![Complex64::new(0.0, 0.0); bank_like.grid.len() * n]; n];
    for (g, &t) in bank_like.grid.iter().enumerate() {
        let orbit = orbit_points(bank_like.variant, bank_like.nu, t);
        for i in 0..n {
            for (s, &w) in orbit.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    let phase = match bank_like.variant {
                        Variant::QRadial(_) => Complex64::from_polar(
                            1.0,
                            2.0 * std::f64::consts::PI * (s as f64) * (j as f64) / n as f64,
                        ),
                        _ => w.powi(j as i32),
                    };
                    acc += phase * coeffs.coeffs[i][g * n + j];
                }
                filters[i][g * n + s] = acc;
            }
        }
    }
    Ok(filters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mra::{
        complete_filter_bank, constant_profile_rows, random_unit_rows, unitarity_defect,
    };
    use crate::qcalc::QParam;

    fn make_rep(variant: Variant, nu: u32, seed: u64) -> CuntzRep {
        let (k_min, k_max, angular) = (-40i64, 40i64, nu + 1);
        let grid = fiber_grid(variant, nu, k_min, k_max, angular, 0.5).unwrap();
        let rows = random_unit_rows(variant, nu, grid.len(), seed);
        let bank = complete_filter_bank(nu, variant, grid, &rows).unwrap();
        CuntzRep::from_bank(&bank, k_min, k_max, angular, 0.5).unwrap()
    }

    #[test]
    fn branch_maps_are_exact_sections() {
        let br = BranchMaps { n: 3 };
        for k in -50..=50i64 {
            for r in 0..3usize {
                assert_eq!(br.fold(br.section(r, k)), k);
                assert_eq!(br.branch_of(br.section(r, k)), r);
            }
        }
        // Images of the sections partition the residue classes.
        assert_eq!(br.section(0, -2), -6);
        assert_eq!(br.section(2, -2), -4);
        assert_eq!(br.fold(-4), -2);
        assert_eq!(br.branch_of(-4), 2);
    }

    #[test]
    fn apply_s_of_zero_and_constant() {
        let rep = make_rep(Variant::QRadial(QParam(0.5)), 1, 3);
        let zero = rep.blank();
        let out = rep.apply_s(0, &zero).unwrap();
        assert_eq!(out.norm_sqr(), 0.0);

        // Constant input reproduces the gauge-weighted filter samples.
        let mut ones = rep.blank();
        for v in ones.values.iter_mut() {
            *v = Complex64::new(1.0, 0.0);
        }
        let out = rep.apply_s(1, &ones).unwrap();
        let br = rep.branches();
        for k in -5..=5i64 {
            let a = br.fold(k);
            let r = br.branch_of(k);
            let u = rep.unitary(a, 0).unwrap();
            assert!((out.get(k, 0) - u[(1, r)]).norm() < 1e-15);
        }
    }

    #[test]
    fn isometry_on_random_vectors() {
        for (variant, nu) in [
            (Variant::QRadial(QParam(0.5)), 1u32),
            (Variant::QRadial(QParam(0.3)), 2),
            (Variant::RootOfUnity, 2),
            (Variant::QRoot(QParam(0.7)), 1),
        ] {
            let rep = make_rep(variant, nu, 11);
            for s in 0..5u64 {
                let xi = LatticeFunction::random_unit(
                    rep.q, rep.k_min, rep.k_max, rep.angular, 6, 100 + s,
                );
                for i in 0..=(nu as usize) {
                    let si = rep.apply_s(i, &xi).unwrap();
                    assert!(
                        (si.norm_sqr().sqrt() - 1.0).abs() < 1e-10,
                        "variant {variant:?} nu {nu} i {i}"
                    );
                }
            }
        }
    }

    #[test]
    fn cuntz_relations_hold_for_unitary_banks() {
        for (variant, nu) in [
            (Variant::QRadial(QParam(0.5)), 1u32),
            (Variant::QRadial(QParam(0.7)), 3),
            (Variant::RootOfUnity, 2),
        ] {
            let rep = make_rep(variant, nu, 5);
            let res = cuntz_residuals(&rep, 4, 6).unwrap();
            assert!(
                res.isometry_defect < 1e-10,
                "variant {variant:?} nu {nu}: {res:?}"
            );
            assert!(
                res.completeness_defect < 1e-10,
                "variant {variant:?} nu {nu}: {res:?}"
            );
        }
    }

    #[test]
    fn zero_bank_breaks_completeness() {
        let nu = 1u32;
        let (k_min, k_max, angular) = (-10i64, 10i64, 2u32);
        let grid = fiber_grid(Variant::RootOfUnity, nu, k_min, k_max, angular, 0.5).unwrap();
        let bank = FilterBank {
            nu,
            variant: Variant::RootOfUnity,
            grid: grid.clone(),
            filters: vec![vec![Complex64::new(0.0, 0.0); grid.len() * 2]; 2],
            rho: vec![1.0, 1.0],
        };
        let rep = CuntzRep::from_bank(&bank, k_min, k_max, angular, 0.5).unwrap();
        let res = cuntz_residuals(&rep, 2, 2).unwrap();
        assert!((res.completeness_defect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_operator_norm_oracle_on_small_grid() {
        // On a small grid the full operator matrix is affordable: the
        // spectral norm of S_0* S_1 must agree with the probe surrogate.
        let nu = 1u32;
        let (k_min, k_max, angular) = (-10i64, 10i64, 2u32);
        let variant = Variant::QRadial(QParam(0.5));
        let grid = fiber_grid(variant, nu, k_min, k_max, angular, 0.5).unwrap();
        let rows = random_unit_rows(variant, nu, grid.len(), 23);
        let bank = complete_filter_bank(nu, variant, grid, &rows).unwrap();
        let rep = CuntzRep::from_bank(&bank, k_min, k_max, angular, 0.5).unwrap();
        let dim = ((k_max - k_min + 1) as usize) * angular as usize;
        // Columns restricted to the interior (|k| <= 4), where no fiber is
        // clipped by the window; rows unrestricted.
        let mut cols = Vec::new();
        for k in -4..=4i64 {
            for j in 0..angular {
                cols.push(((k - k_min) as usize) * angular as usize + j as usize);
            }
        }
        let mut op = DMatrix::<Complex64>::zeros(dim, cols.len());
        for (c, &col) in cols.iter().enumerate() {
            let mut e = rep.blank();
            e.values[col] = Complex64::new(1.0, 0.0);
            let img = rep.apply_s_star(0, &rep.apply_s(1, &e).unwrap()).unwrap();
            for row in 0..dim {
                op[(row, c)] = img.values[row];
            }
        }
        let svd = nalgebra::SVD::new(op, false, false);
        let spectral = svd.singular_values.max();
        assert!(spectral < 1e-10, "S_0* S_1 spectral norm {spectral}");
    }

    #[test]
    fn pvm_measure_partition_of_unity_and_refinement() {
        let nu = 2u32;
        let rep = make_rep(Variant::QRadial(QParam(0.5)), nu, 8);
        let f = LatticeFunction::random_unit(rep.q, rep.k_min, rep.k_max, rep.angular, 3, 77);
        let n = nu + 1;
        // Empty word: the whole space.
        let empty = NAdicWord::new(n, vec![]).unwrap();
        assert!((rep.pvm_measure(&f, &empty).unwrap() - 1.0).abs() < 1e-12);
        // Length-1 words sum to 1.
        let mut total = 0.0;
        for a in 0..n as u8 {
            total += rep
                .pvm_measure(&f, &NAdicWord::new(n, vec![a]).unwrap())
                .unwrap();
        }
        assert!((total - 1.0).abs() < 1e-10, "partition of unity: {total}");
        // Refinement: children of a prefix sum to the prefix.
        for a1 in 0..n as u8 {
            let parent = rep
                .pvm_measure(&f, &NAdicWord::new(n, vec![a1]).unwrap())
                .unwrap();
            let mut children = 0.0;
            for a2 in 0..n as u8 {
                children += rep
                    .pvm_measure(&f, &NAdicWord::new(n, vec![a1, a2]).unwrap())
                    .unwrap();
            }
            assert!(
                (children - parent).abs() < 1e-10,
                "refinement at {a1}: {children} vs {parent}"
            );
        }
    }

    #[test]
    fn pvm_rejects_unnormalized_input() {
        let rep = make_rep(Variant::QRadial(QParam(0.5)), 1, 8);
        let mut f = rep.blank();
        f.set(0, 0, Complex64::new(2.0, 0.0));
        let w = NAdicWord::new(2, vec![0]).unwrap();
        assert!(matches!(
            rep.pvm_measure(&f, &w),
            Err(CuntzError::Unnormalized(_))
        ));
    }

    #[test]
    fn partition_intervals_examples_and_cover() {
        // (0) base 2 -> [0, 1/2).
        let w = NAdicWord::new(2, vec![0]).unwrap();
        assert_eq!(
            partition_interval(&w),
            NAdicInterval {
                lo_num: 0,
                hi_num: 1,
                den: 2
            }
        );
        // (1,0) base 3 -> [1/3, 1/3 + 1/9) = [3/9, 4/9).
        let w = NAdicWord::new(3, vec![1, 0]).unwrap();
        assert_eq!(
            partition_interval(&w),
            NAdicInterval {
                lo_num: 3,
                hi_num: 4,
                den: 9
            }
        );
        // All length-2 words over base 3: 9 exactly disjoint covering tiles.
        let mut tiles = Vec::new();
        for a in 0..3u8 {
            for b in 0..3u8 {
                tiles.push(partition_interval(
                    &NAdicWord::new(3, vec![a, b]).unwrap(),
                ));
            }
        }
        tiles.sort_by_key(|t| t.lo_num);
        assert_eq!(tiles[0].lo_num, 0);
        assert_eq!(tiles.last().unwrap().hi_num, 9);
        for pair in tiles.windows(2) {
            assert_eq!(pair[0].hi_num, pair[1].lo_num);
            assert_eq!(pair[0].den, 9);
        }
    }

    #[test]
    fn word_digit_string_roundtrip() {
        let w = NAdicWord::new(3, vec![1, 0, 2]).unwrap();
        assert_eq!(w.digits(), "102");
        assert_eq!(NAdicWord::parse(3, "102").unwrap(), w);
        assert!(NAdicWord::parse(3, "13").is_err());
        assert!(NAdicWord::new(3, vec![3]).is_err());
    }

    #[test]
    fn cyclic_fourier_roundtrip_and_monomial() {
        for (variant, nu) in [
            (Variant::RootOfUnity, 2u32),
            (Variant::QRoot(QParam(0.5)), 1),
            (Variant::QRadial(QParam(0.5)), 2),
        ] {
            let grid = crate::mra::default_circle_grid(8);
            let rows = random_unit_rows(variant, nu, grid.len(), 17);
            let bank = complete_filter_bank(nu, variant, grid, &rows).unwrap();
            let coeffs = cyclic_fourier(&bank).unwrap();
            let back = cyclic_fourier_inverse(&bank, &coeffs).unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..bank.filters.len() {
                for (a, b) in bank.filters[i].iter().zip(&back[i]) {
                    worst = worst.max((a - b).norm());
                }
            }
            assert!(worst < 1e-10, "variant {variant:?}: roundtrip {worst}");
        }
        // Monomial filter: m_i(w) = w^{j0} concentrates on coefficient j0.
        let nu = 2u32;
        let n = nu as usize + 1;
        let grid = crate::mra::default_circle_grid(4);
        let j0 = 1usize;
        let mut filters = vec![vec![Complex64::new(0.0, 0.0); grid.len() * n]; n];
        for (g, &t) in grid.iter().enumerate() {
            let orbit = orbit_points(Variant::RootOfUnity, nu, t);
            for i in 0..n {
                for (r, &w) in orbit.iter().enumerate() {
                    filters[i][g * n + r] = w.powi(j0 as i32);
                }
            }
        }
        let bank = FilterBank {
            nu,
            variant: Variant::RootOfUnity,
            grid,
            filters,
            rho: vec![1.0; n],
        };
        let coeffs = cyclic_fourier(&bank).unwrap();
        for g in 0..bank.grid.len() {
            for j in 0..n {
                let c = coeffs.coeffs[0][g * n + j];
                if j == j0 {
                    assert!((c.norm() - 1.0).abs() < 1e-12);
                } else {
                    assert!(c.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn boundary_mass_detects_edge_support() {
        let rep = make_rep(Variant::QRadial(QParam(0.5)), 1, 3);
        let interior = LatticeFunction::random_unit(rep.q, rep.k_min, rep.k_max, rep.angular, 3, 5);
        assert_eq!(rep.boundary_mass(&interior), 0.0);
        let mut edge = rep.blank();
        edge.set(rep.k_max, 0, Complex64::new(1.0, 0.0));
        assert!(rep.boundary_mass(&edge) > 0.9);
    }

    #[test]
    fn lattice_function_json_roundtrip() {
        let f = LatticeFunction::random_unit(Some(0.5), -4, 4, 2, 2, 99);
        let json = f.to_json();
        let back = LatticeFunction::from_json(&json).unwrap();
        assert_eq!(f, back);
        assert_eq!(json, back.to_json());
    }

    #[test]
    fn rep_rejects_incompatible_grid() {
        let nu = 1u32;
        let variant = Variant::QRadial(QParam(0.5));
        let grid = crate::mra::default_circle_grid(6);
        let rows = constant_profile_rows(variant, nu, grid.len());
        let bank = complete_filter_bank(nu, variant, grid, &rows).unwrap();
        assert!(matches!(
            CuntzRep::from_bank(&bank, -10, 10, 2, 0.5),
            Err(CuntzError::GridIncompatible)
        ));
        // And completed banks on the right grid produce unitary fibers.
        let rep = make_rep(variant, nu, 1);
        let u = rep.unitary(0, 0).unwrap();
        assert!(unitarity_defect(u) < 1e-12);
    }
}
