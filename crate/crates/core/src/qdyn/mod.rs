//! Two-level dynamics of one atom driven beyond the rotating-wave
//! approximation.
//!
//! The lab-frame Hamiltonian is
//!
//! ```text
//! H(t) = [[0, g(t)], [g(t), eps]],   g(t) = -g0 cos(omega t + phase)
//! ```
//!
//! and the rotating frame is reached with `Q(t) = diag(1, exp(i(omega t + phase)))`.
//! In that frame the coupling is `alpha(t) = -g0 (exp(-2i(omega t + phase)) + 1) / 2`;
//! the first term is the counter-rotating part whose interference with the
//! co-rotating part produces the Bloch-Siegert oscillation.

mod integrate;
mod ladder;
mod perturbative;
mod reversal;

pub use integrate::{apply_pulse, propagate_full, propagate_rwa, propagator_full, rk4_step_count};
pub use ladder::{ladder_solve, HarmonicLadderState};
pub use perturbative::{lab_frame_amplitudes, perturbative_amplitudes, PerturbativeSolution};
pub use reversal::{evolve_and_reverse, ReversalOutcome, TimeReversalPlan};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{cis, fidelity, Mat2, Vec2, C64, ZERO};

/// Above this `sigma` the first-order perturbative picture is flagged unreliable.
pub const SIGMA_WARN: f64 = 1.0 / 16.0;

/// A classical drive `B cos(omega t + phase)` acting on one transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldDrive {
    g0: f64,
    omega: f64,
    phase: f64,
    epsilon: f64,
    rwa: bool,
}

impl FieldDrive {
    /// A resonant (`eps = omega`) drive including the counter-rotating term.
    pub fn new(g0: f64, omega: f64, phase: f64) -> Result<Self> {
        Self::validate(g0, omega, phase, omega)?;
        Ok(Self {
            g0,
            omega,
            phase,
            epsilon: omega,
            rwa: false,
        })
    }

    /// Off-resonant drive. Detuned excitation is outside the modelled
    /// protocol and only exists for experiments with the integrator.
    pub fn detuned_experimental(g0: f64, omega: f64, phase: f64, epsilon: f64) -> Result<Self> {
        Self::validate(g0, omega, phase, epsilon)?;
        Ok(Self {
            g0,
            omega,
            phase,
            epsilon,
            rwa: false,
        })
    }

    fn validate(g0: f64, omega: f64, phase: f64, epsilon: f64) -> Result<()> {
        if !(g0.is_finite() && omega.is_finite() && phase.is_finite() && epsilon.is_finite()) {
            return Err(Error::NonFinite("drive parameters"));
        }
        if g0 < 0.0 {
            return Err(Error::InvalidDrive(format!("g0 must be >= 0, got {g0}")));
        }
        if omega <= 0.0 {
            return Err(Error::InvalidDrive(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        Ok(())
    }

    /// Same drive with the counter-rotating term dropped (or restored).
    pub fn with_rwa(mut self, rwa: bool) -> Self {
        self.rwa = rwa;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_g0(mut self, g0: f64) -> Result<Self> {
        Self::validate(g0, self.omega, self.phase, self.epsilon)?;
        self.g0 = g0;
        Ok(self)
    }

    /// Phase shifted by `delta`, e.g. `PI` to reverse the coupling.
    pub fn shifted(self, delta: f64) -> Self {
        self.with_phase(self.phase + delta)
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn phase(&self) -> f64 {
        self.phase
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn rwa(&self) -> bool {
        self.rwa
    }
    pub fn is_resonant(&self) -> bool {
        self.epsilon == self.omega
    }

    /// `g0 / (4 omega)`, the expansion parameter of all non-RWA corrections.
    pub fn sigma(&self) -> f64 {
        self.g0 / (4.0 * self.omega)
    }

    /// Field phase `omega t + phase` at time `t`.
    #[inline]
    pub fn theta(&self, t: f64) -> f64 {
        self.omega * t + self.phase
    }

    /// Shorter of the optical and Rabi periods.
    fn shortest_period(&self) -> f64 {
        let optical = 2.0 * PI / self.omega;
        let rabi = if self.g0 > 0.0 {
            2.0 * PI / self.g0
        } else {
            f64::INFINITY
        };
        optical.min(rabi)
    }

    /// Largest accepted integration step, 1/200 of the shortest period.
    pub fn max_step(&self) -> f64 {
        self.shortest_period() / 200.0
    }

    /// Default integration step, 1/400 of the shortest period. At 1/200 the
    /// norm drift over a Rabi period reaches ~1e-10 for `g0/omega >= 0.1`.
    pub fn default_step(&self) -> f64 {
        self.shortest_period() / 400.0
    }

    /// Rotating-frame coupling `alpha(t)`.
    #[inline]
    pub fn alpha(&self, t: f64) -> C64 {
        if self.rwa {
            C64::new(-0.5 * self.g0, 0.0)
        } else {
            -0.5 * self.g0 * (cis(-2.0 * self.theta(t)) + 1.0)
        }
    }
}

/// Amplitudes `(C1, C3)` of one driven transition at time `t`, lab frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelAmplitudes {
    pub c1: C64,
    pub c3: C64,
    pub t: f64,
}

impl TwoLevelAmplitudes {
    pub fn new(c1: C64, c3: C64, t: f64) -> Self {
        Self { c1, c3, t }
    }

    /// All population in the lower level.
    pub fn ground(t: f64) -> Self {
        Self::new(C64::new(1.0, 0.0), ZERO, t)
    }

    pub fn excited(t: f64) -> Self {
        Self::new(ZERO, C64::new(1.0, 0.0), t)
    }

    pub fn from_vec(v: Vec2, t: f64) -> Self {
        Self::new(v[0], v[1], t)
    }

    pub fn as_vec(&self) -> Vec2 {
        [self.c1, self.c3]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c3.norm_sqr()
    }

    /// `(|C1|^2, |C3|^2)`.
    pub fn populations(&self) -> (f64, f64) {
        (self.c1.norm_sqr(), self.c3.norm_sqr())
    }

    /// `|<self|other>|^2` of the normalised states; ignores the time stamps.
    pub fn fidelity(&self, other: &Self) -> f64 {
        fidelity(&self.as_vec(), &other.as_vec())
    }

    pub fn is_finite(&self) -> bool {
        crate::linalg::is_finite(&self.as_vec()) && self.t.is_finite()
    }
}

/// Lab-frame Hamiltonian at time `t`.
///
/// With `rwa` set the coupling is the co-rotating part only, expressed in the
/// lab frame: `H_13 = -(g0/2) exp(i theta)`, `H_31 = -(g0/2) exp(-i theta)`.
pub fn hamiltonian_at(drive: &FieldDrive, t: f64) -> Mat2 {
    let eps = C64::new(drive.epsilon(), 0.0);
    if drive.rwa() {
        let half = -0.5 * drive.g0();
        let th = drive.theta(t);
        [[ZERO, half * cis(th)], [half * cis(-th), eps]]
    } else {
        let g = C64::new(-drive.g0() * drive.theta(t).cos(), 0.0);
        [[ZERO, g], [g, eps]]
    }
}

/// Applies `Q(t)` at the state's own time, or `Q(t)^dagger` when `invert` is set.
pub fn rotating_transform(
    state: &TwoLevelAmplitudes,
    drive: &FieldDrive,
    invert: bool,
) -> TwoLevelAmplitudes {
    let th = drive.theta(state.t);
    let factor = if invert { cis(-th) } else { cis(th) };
    TwoLevelAmplitudes::new(state.c1, state.c3 * factor, state.t)
}

/// How a non-RWA pulse is switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseSwitch {
    /// The field jumps to full amplitude. A bare state then carries an extra
    /// free transient of relative size `sigma`.
    Sudden,
    /// The envelope rises slowly on the optical time scale but fast against
    /// the Rabi period: bare levels are carried into the field-dressed levels
    /// that the perturbative solution assumes.
    #[default]
    Adiabatic,
}

/// Maps bare amplitudes onto the field-dressed amplitudes at the state's time.
///
/// Dressed `|1>` is `|1> + sigma e^{i theta}|3>` and dressed `|3>` is
/// `|3> - sigma e^{-i theta}|1>` (normalised), the `n = +-1` ladder satellites
/// of adiabatic elimination written back in the lab frame. Identity for RWA
/// drives.
pub fn switch_on(state: &TwoLevelAmplitudes, drive: &FieldDrive) -> TwoLevelAmplitudes {
    if drive.rwa() {
        return *state;
    }
    let d = dressing_matrix(drive, state.t);
    let v = crate::linalg::mat2_vec(&d, &state.as_vec());
    TwoLevelAmplitudes::from_vec(v, state.t)
}

/// Unitary bare-to-dressed map at time `t`.
pub fn dressing_matrix(drive: &FieldDrive, t: f64) -> Mat2 {
    let s = drive.sigma();
    let norm = (1.0 + s * s).sqrt();
    let (c, s) = (1.0 / norm, s / norm);
    let th = drive.theta(t);
    [
        [C64::new(c, 0.0), -s * cis(-th)],
        [s * cis(th), C64::new(c, 0.0)],
    ]
}

/// Bloch-Siegert shift `Delta = g0^2 / (4 omega)`.
pub fn bloch_siegert_shift(g0: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidDrive(format!(
            "omega must be > 0, got {omega}"
        )));
    }
    Ok(g0 * g0 / (4.0 * omega))
}

/// Probability of finding `|1>` right after a pi/2 pulse ending at `tau`:
/// `[1 + 2 sigma sin(2 omega tau + 2 phi)] / 2`. Meaningful for `0 <= sigma < 1/4`.
pub fn bso_population_signal(sigma: f64, omega: f64, phi: f64, tau: f64) -> f64 {
    0.5 * (1.0 + 2.0 * sigma * (2.0 * omega * tau + 2.0 * phi).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{mat2_adjoint, mat2_mul};
    use proptest::prelude::*;

    #[test]
    fn hamiltonian_at_epoch() {
        let d = FieldDrive::new(1.0, 1.0, 0.0).unwrap();
        let h = hamiltonian_at(&d, 0.0);
        assert_eq!(h[0][1], C64::new(-1.0, 0.0));
        assert_eq!(h[1][0], C64::new(-1.0, 0.0));
        assert_eq!(h[0][0], ZERO);
        assert_eq!(h[1][1], C64::new(1.0, 0.0));
    }

    #[test]
    fn hamiltonian_vanishes_at_quarter_phase() {
        let d = FieldDrive::new(1.0, 1.0, PI / 2.0).unwrap();
        let h = hamiltonian_at(&d, 0.0);
        assert!(h[0][1].norm() < 1e-16);
    }

    proptest! {
        #[test]
        fn hamiltonian_is_hermitian(g0 in 0.0..2.0f64, phase in -7.0..7.0f64, t in -50.0..50.0f64, rwa: bool) {
            let d = FieldDrive::new(g0, 1.3, phase).unwrap().with_rwa(rwa);
            let h = hamiltonian_at(&d, t);
            let ha = mat2_adjoint(&h);
            for i in 0..2 { for j in 0..2 {
                prop_assert!((h[i][j] - ha[i][j]).norm() < 1e-15);
            }}
        }

        #[test]
        fn rotating_transform_round_trip(re1 in -1.0..1.0f64, im3 in -1.0..1.0f64, t in -20.0..20.0f64, phase in -4.0..4.0f64) {
            let d = FieldDrive::new(0.1, 1.0, phase).unwrap();
            let s = TwoLevelAmplitudes::new(C64::new(re1, 0.2), C64::new(0.3, im3), t);
            let there = rotating_transform(&s, &d, false);
            let back = rotating_transform(&there, &d, true);
            prop_assert!((back.c1 - s.c1).norm() < 1e-14);
            prop_assert!((back.c3 - s.c3).norm() < 1e-14);
            prop_assert!((there.c1.norm() - s.c1.norm()).abs() < 1e-14);
            prop_assert!((there.c3.norm() - s.c3.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn rotating_transform_identity_at_zero_phase() {
        let d = FieldDrive::new(0.1, 1.0, 0.0).unwrap();
        let s = TwoLevelAmplitudes::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8), 0.0);
        assert_eq!(rotating_transform(&s, &d, false), s);
    }

    #[test]
    fn drive_validation() {
        assert!(FieldDrive::new(-0.1, 1.0, 0.0).is_err());
        assert!(FieldDrive::new(0.1, 0.0, 0.0).is_err());
        assert!(FieldDrive::new(f64::NAN, 1.0, 0.0).is_err());
        let d = FieldDrive::new(0.2, 2.0, 0.0).unwrap();
        assert_eq!(d.sigma(), 0.025);
        assert!(d.is_resonant());
        assert!(!FieldDrive::detuned_experimental(0.2, 2.0, 0.0, 2.1)
            .unwrap()
            .is_resonant());
    }

    #[test]
    fn bloch_siegert_values() {
        assert!((bloch_siegert_shift(0.2, 1.0).unwrap() - 0.01).abs() < 1e-15);
        assert_eq!(bloch_siegert_shift(0.0, 3.0).unwrap(), 0.0);
        assert!((bloch_siegert_shift(0.05, 1.0).unwrap() - 6.25e-4).abs() < 1e-18);
        assert!(bloch_siegert_shift(0.1, 0.0).is_err());
        assert!(bloch_siegert_shift(0.1, -1.0).is_err());
    }

    #[test]
    fn bso_signal_values() {
        assert_eq!(bso_population_signal(0.0, 1.0, 0.3, 2.0), 0.5);
        // 2 omega tau + 2 phi = pi/2
        let v = bso_population_signal(0.0125, 1.0, 0.0, PI / 4.0);
        assert!((v - 0.5125).abs() < 1e-15);
    }

    #[test]
    fn dressing_is_unitary_and_first_order() {
        let d = FieldDrive::new(0.05, 1.0, 0.7).unwrap();
        let m = dressing_matrix(&d, 3.0);
        let p = mat2_mul(&mat2_adjoint(&m), &m);
        assert!((p[0][0] - 1.0).norm() < 1e-15 && p[0][1].norm() < 1e-15);
        let dressed = switch_on(&TwoLevelAmplitudes::ground(3.0), &d);
        let expect = d.sigma() * cis(d.theta(3.0));
        assert!((dressed.c3 - expect).norm() < d.sigma().powi(3));
        let rwa = d.with_rwa(true);
        assert_eq!(
            switch_on(&TwoLevelAmplitudes::ground(3.0), &rwa),
            TwoLevelAmplitudes::ground(3.0)
        );
    }
}
