//! The q-parametric Markov chain: transition matrix construction in both
//! normalization conventions, seeded simulation, stationary distribution,
//! and the bridge values toward the braid-trace side.
//!
//! With exponents `e(r, s) = ((r - s) mod N) + 1` (diagonal `q`, wrap-around
//! `q^N`), every row and column of `(q^{e(r,s)})` is a permutation of
//! `{q, q^2, ..., q^N}`. Dividing by `q [N]_q` ("row-exact") therefore gives
//! an exactly doubly stochastic matrix; dividing by `[N]_q` ("paper") leaves
//! row sums equal to `q` and is kept for reproducing printed values.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// RNG algorithm identity recorded in reports; simulation output is a pure
/// function of `(matrix, start, steps, seed)` under this generator.
pub const RNG_ALGORITHM: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Divide by `[N]_q`; row sums come out to `q`.
    Paper,
    /// Divide by `q [N]_q`; exactly doubly stochastic.
    RowExact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub n: usize,
    pub q: f64,
    pub normalization: Normalization,
    /// Row-major: `p[s * n + r] = p(r | s)`.
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkovError {
    BadStateCount(usize),
    BadQ(f64),
    BadState(usize),
    /// Simulation requires exact row stochasticity.
    NotRowStochastic { row: usize, sum: f64 },
    PowerIterationDiverged,
}

impl fmt::Display for MarkovError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarkovError::BadStateCount(n) => write!(f, "need N >= 2 states, got {n}"),
            MarkovError::BadQ(q) => write!(f, "q = {q} outside (0, 1)"),
            MarkovError::BadState(s) => write!(f, "state {s} out of range"),
            MarkovError::NotRowStochastic { row, sum } => {
                write!(f, "row {row} sums to {sum}, not 1")
            }
            MarkovError::PowerIterationDiverged => {
                write!(f, "power iteration failed to converge")
            }
        }
    }
}

impl std::error::Error for MarkovError {}

/// `sigma_s(r) = (N + r - s + 1) mod N`, the exponent map in `{0..N-1}`.
pub fn exponent_sigma(s: usize, r: usize, n: usize) -> usize {
    (n + r + n - s + 1) % n
}

/// The exponent the displayed matrix actually uses, in `{1..N}`:
/// `e(r, s) = ((r - s) mod N) + 1`. It differs from [`exponent_sigma`] only
/// where the latter wraps to 0 (there `e = N`).
pub fn display_exponent(s: usize, r: usize, n: usize) -> usize {
    (r + n - s) % n + 1
}

/// `[n]_q = 1 + q + ... + q^{n-1}`.
fn q_bracket(n: usize, q: f64) -> f64 {
    (1.0 - q.powi(n as i32)) / (1.0 - q)
}

/// Build the transition matrix `p(r|s) = q^{e(r,s)} / Z` with
/// `Z = [N]_q` (paper) or `Z = q [N]_q` (row-exact).
pub fn build_transition(
    n: usize,
    q: f64,
    normalization: Normalization,
) -> Result<TransitionMatrix, MarkovError> {
    if n < 2 {
        return Err(MarkovError::BadStateCount(n));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(MarkovError::BadQ(q));
    }
    let z = match normalization {
        Normalization::Paper => q_bracket(n, q),
        Normalization::RowExact => q * q_bracket(n, q),
    };
    let mut p = vec![0.0; n * n];
    for s in 0..n {
        for r in 0..n {
            p[s * n + r] = q.powi(display_exponent(s, r, n) as i32) / z;
        }
    }
    Ok(TransitionMatrix {
        n,
        q,
        normalization,
        p,
    })
}

impl TransitionMatrix {
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|s| self.p[s * self.n..(s + 1) * self.n].iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|r| (0..self.n).map(|s| self.p[s * self.n + r]).sum())
            .collect()
    }

    /// Worst deviation of any row or column sum from 1.
    pub fn doubly_stochastic_defect(&self) -> f64 {
        self.row_sums()
            .iter()
            .chain(self.col_sums().iter())
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// A simulated path, reproducible from `(matrix, start, steps, seed)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainPath {
    pub states: Vec<u8>,
    pub seed: u64,
}

impl ChainPath {
    /// CSV rows `step,state`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,state\n");
        for (i, s) in self.states.iter().enumerate() {
            out.push_str(&format!("{i},{s}\n"));
        }
        out
    }

    pub fn empirical_frequencies(&self, n: usize) -> Vec<f64> {
        let mut counts = vec![0usize; n];
        for &s in &self.states {
            counts[s as usize] += 1;
        }
        counts
            .iter()
            .map(|&c| c as f64 / self.states.len() as f64)
            .collect()
    }
}

/// Inverse-CDF simulation with fixed state ordering `0..N-1` and the
/// declared ChaCha8 generator.
pub fn simulate(
    tm: &TransitionMatrix,
    start: usize,
    steps: usize,
    seed: u64,
) -> Result<ChainPath, MarkovError> {
    if start >= tm.n {
        return Err(MarkovError::BadState(start));
    }
    for (row, sum) in tm.row_sums().into_iter().enumerate() {
        if (sum - 1.0).abs() > 1e-12 {
            return Err(MarkovError::NotRowStochastic { row, sum });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(steps + 1);
    let mut cur = start;
    states.push(cur as u8);
    for _ in 0..steps {
        let u: f64 = rng.random();
        let row = &tm.p[cur * tm.n..(cur + 1) * tm.n];
        let mut acc = 0.0;
        let mut next = tm.n - 1;
        for (r, pr) in row.iter().enumerate() {
            acc += pr;
            if u < acc {
                next = r;
                break;
            }
        }
        cur = next;
        states.push(cur as u8);
    }
    Ok(ChainPath { states, seed })
}

/// Stationary distribution by power iteration on the left action
/// `x <- x P`. A row-exact matrix must converge to the uniform vector; a
/// paper-normalized matrix is rescaled to row sums 1 first and the result
/// flagged accordingly.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryResult {
    pub distribution: Vec<f64>,
    /// True when the input rows did not sum to 1 and the iteration ran on
    /// the rescaled matrix.
    pub rescaled: bool,
}

pub fn stationary(tm: &TransitionMatrix) -> Result<StationaryResult, MarkovError> {
    let n = tm.n;
    let row_sums = tm.row_sums();
    let rescaled = row_sums.iter().any(|s| (s - 1.0).abs() > 1e-12);
    let mut p = tm.p.clone();
    if rescaled {
        for s in 0..n {
            for r in 0..n {
                p[s * n + r] /= row_sums[s];
            }
        }
    }
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let mut next = vec![0.0; n];
        for s in 0..n {
            for r in 0..n {
                next[r] += x[s] * p[s * n + r];
            }
        }
        let total: f64 = next.iter().sum();
        for v in next.iter_mut() {
            *v /= total;
        }
        let diff: f64 = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = next;
        if diff < 1e-15 {
            return Ok(StationaryResult {
                distribution: x,
                rescaled,
            });
        }
    }
    Err(MarkovError::PowerIterationDiverged)
}

/// The braid-trace bridge value `q^{(N + j - i + 1) mod N} / [N]_{q^2}`
/// (meaningful for odd `N = 2m + 1`).
pub fn trace_link(n: usize, q: f64, i: usize, j: usize) -> f64 {
    let expo = (n + j + n - i + 1) % n;
    q.powi(expo as i32) / q_bracket(n, q * q)
}

/// JSON summary of a chain run:
/// `{N, q, normalization, row_sums, col_sums, empirical_freq, stationary}`.
pub fn summary_json(tm: &TransitionMatrix, path: &ChainPath) -> Result<String, MarkovError> {
    let st = stationary(tm)?;
    let doc = serde_json::json!({
        "N": tm.n,
        "q": tm.q,
        "normalization": match tm.normalization {
            Normalization::Paper => "paper",
            Normalization::RowExact => "row-exact",
        },
        "row_sums": tm.row_sums(),
        "col_sums": tm.col_sums(),
        "empirical_freq": path.empirical_frequencies(tm.n),
        "stationary": st.distribution,
    });
    Ok(serde_json::to_string_pretty(&doc).expect("summary serialization cannot fail"))
}
