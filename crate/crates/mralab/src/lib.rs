//! Numerical verification library for multiresolution constructions built on
//! Bessel and q-Bessel special functions.
//!
//! The crate is organized around the objects it verifies:
//!
//! - [`special`]: classical gamma and Bessel-J machinery (power series, the
//!   addition formula, the half-turn phase identity).
//! - [`qcalc`]: q-numbers, q-Pochhammer symbols, Jackson q-Bessel functions
//!   and the Jackson q-integral.
//! - [`transforms`]: the Hankel transform by quadrature and its q-analogue as
//!   lattice sums, with inversion, Plancherel and orthogonality checks.
//! - [`mra`]: multiresolution scaling data: sector step functions, the
//!   low-pass filter built from Bessel coefficients, normalization identities
//!   and unitary completion to a full filter bank.
//! - [`cuntz`]: concrete Cuntz-algebra representations on lattice functions,
//!   N-adic projection-valued measures and the cyclic-group Fourier pair.
//! - [`frames`]: tight-frame construction from Bessel-coefficient filters.
//! - [`markov`]: the q-parametric doubly stochastic Markov chain.
//! - [`bwm`]: the explicit BWM operator for SO_q(N), its trace and braid
//!   relations.
//! - [`report`]: named verification suites and machine-readable reports; the
//!   only I/O layer, surfaced through the `mralab` binary.

pub mod bwm;
pub mod cuntz;
pub mod frames;
pub mod markov;
pub mod mra;
pub mod qcalc;
pub mod report;
pub mod special;
pub mod transforms;

pub use num_complex::Complex64;
