//! Simulation of Bloch-Siegert phase readout, entangled phase teleportation
//! and remote frequency locking of two clocks.
//!
//! The crate is organised bottom-up:
//!
//! - [`qdyn`]: a single two-level atom driven without the rotating-wave
//!   approximation. Exact propagation, the harmonic-ladder expansion, the
//!   first-order perturbative solution and time reversal.
//! - [`pairspace`]: two three-level atoms sharing a singlet, local pi pulses,
//!   the `|+>`/`|->` measurement basis and projective measurements.
//! - [`teleport`]: ensembles of entangled pairs, the `eta` estimator and
//!   two-quadrature recovery of the field phase.
//! - [`freqlock`]: the atom-array mapping round and the frequency servo.
//! - [`harness`]: JSON configuration, CSV output and run manifests used by the
//!   `bso-lock` binary.
//!
//! Units follow `hbar = 1`; frequencies are angular and times are in the
//! reciprocal unit. The protocol epoch is `t = 0`.
//!
//! Runnable walkthroughs live in `examples/`; see the README for the list.

pub mod error;
pub mod freqlock;
pub mod harness;
pub mod linalg;
pub mod pairspace;
pub mod qdyn;
pub mod rng;
pub mod teleport;

pub use error::{Error, Result};
pub use linalg::C64;
