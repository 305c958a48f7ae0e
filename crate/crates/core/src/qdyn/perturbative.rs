//! First-order adiabatic-elimination solution for a pulse starting in `|1>` at `t = 0`.

use super::{bloch_siegert_shift, FieldDrive, TwoLevelAmplitudes, SIGMA_WARN};
use crate::linalg::{cis, C64};

/// Lowest-order ladder amplitudes. `a_{-1}` and `b_1` are second order and omitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeSolution {
    pub a0: C64,
    pub b0: C64,
    pub a1: C64,
    pub bm1: C64,
    /// `a_{-1} + b_{-1}` after adiabatic elimination.
    pub mu_plus: C64,
    /// `a_{-1} - b_{-1}` after adiabatic elimination.
    pub mu_minus: C64,
    pub delta: f64,
    pub sigma: f64,
}

impl PerturbativeSolution {
    /// Sum of squared magnitudes of the four retained amplitudes.
    pub fn norm_sqr(&self) -> f64 {
        self.a0.norm_sqr() + self.b0.norm_sqr() + self.a1.norm_sqr() + self.bm1.norm_sqr()
    }

    /// False when `sigma` exceeds the range where first order is trusted.
    pub fn is_reliable(&self) -> bool {
        self.sigma <= SIGMA_WARN
    }
}

/// Amplitudes at time `t` after switch-on at `t = 0`.
///
/// Logs a warning when `sigma > 1/16`; the result is still returned.
pub fn perturbative_amplitudes(drive: &FieldDrive, t: f64) -> PerturbativeSolution {
    let sigma = drive.sigma();
    if sigma > SIGMA_WARN {
        log::warn!("sigma = {sigma} exceeds 1/16; first-order amplitudes lose accuracy");
    }
    let half = 0.5 * drive.g0() * t;
    let (s, c) = half.sin_cos();
    let a0 = C64::new(c, 0.0);
    PerturbativeSolution {
        a0,
        b0: C64::new(0.0, s),
        a1: C64::new(0.0, -sigma * s),
        bm1: C64::new(sigma * c, 0.0),
        mu_plus: sigma * a0,
        mu_minus: -sigma * a0,
        // the drive is validated, so omega > 0
        delta: bloch_siegert_shift(drive.g0(), drive.omega()).unwrap_or(0.0),
        sigma,
    }
}

/// Lab-frame `(C1, C3)` at time `t` from the ladder sum and the inverse frame transform.
pub fn lab_frame_amplitudes(
    sol: &PerturbativeSolution,
    drive: &FieldDrive,
    t: f64,
) -> TwoLevelAmplitudes {
    let theta = drive.theta(t);
    let beta = cis(-2.0 * theta);
    let c1 = sol.a0 + sol.a1 * beta;
    let c3_rot = sol.b0 + sol.bm1 / beta;
    TwoLevelAmplitudes::new(c1, c3_rot * cis(-theta), t)
}
