//! Two three-level atoms (Alice's and Bob's) sharing an entangled state.
//!
//! Levels `|1>` and `|2>` are degenerate ground states at energy 0 and `|3>`
//! sits at `eps = omega`. The 1-3 and 2-3 transitions are driven by
//! orthogonal polarisations, so a field on one never touches the other.

mod basis;
mod measure;

pub use basis::{plus_minus_basis, rebasis_singlet_check, PlusMinusBasis};
pub use measure::{
    alice_measurement, alice_projection, bob_measurement, bob_success_closed_form,
    bob_success_probability, measurement_unitary, AliceProjector, BobTarget, MeasurementOutcome,
};

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{cis, inner, Vec3, C64, ZERO};
use crate::qdyn::{propagate_rwa, FieldDrive, TwoLevelAmplitudes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Party {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    L1,
    L2,
    L3,
}

impl Level {
    pub fn index(self) -> usize {
        match self {
            Level::L1 => 0,
            Level::L2 => 1,
            Level::L3 => 2,
        }
    }
}

/// Amplitudes `amps[a][b]` for Alice in level `a+1` and Bob in level `b+1`, lab frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairState {
    pub amps: [[C64; 3]; 3],
    pub t: f64,
}

impl PairState {
    pub fn new(amps: [[C64; 3]; 3], t: f64) -> Self {
        Self { amps, t }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    fn flat(&self) -> [C64; 9] {
        let mut out = [ZERO; 9];
        for (i, z) in self.amps.iter().flatten().enumerate() {
            out[i] = *z;
        }
        out
    }

    /// `|<self|other>|^2` of the normalised states.
    pub fn fidelity(&self, other: &PairState) -> f64 {
        crate::linalg::fidelity(&self.flat(), &other.flat())
    }

    pub fn inner(&self, other: &PairState) -> C64 {
        inner(&self.flat(), &other.flat())
    }

    /// Exchanges the roles of Alice and Bob.
    pub fn swap(&self) -> PairState {
        let mut amps = [[ZERO; 3]; 3];
        for (a, row) in self.amps.iter().enumerate() {
            for (b, z) in row.iter().enumerate() {
                amps[b][a] = *z;
            }
        }
        PairState::new(amps, self.t)
    }

    /// Level populations of one party with the other traced out.
    pub fn reduced_populations(&self, party: Party) -> [f64; 3] {
        let mut p = [0.0; 3];
        for (a, row) in self.amps.iter().enumerate() {
            for (b, z) in row.iter().enumerate() {
                let k = match party {
                    Party::A => a,
                    Party::B => b,
                };
                p[k] += z.norm_sqr();
            }
        }
        p
    }

    /// The other party's normalised state given `party` is found in `level`.
    pub fn conditional_state(&self, party: Party, level: Level) -> Result<Vec3> {
        let k = level.index();
        let v: Vec3 = match party {
            Party::A => self.amps[k],
            Party::B => [self.amps[0][k], self.amps[1][k], self.amps[2][k]],
        };
        crate::linalg::normalized(&v).ok_or(Error::ZeroNorm)
    }

    /// Applies `op` to one party's three levels, the identity to the other.
    pub fn apply_local(&self, party: Party, op: &[[C64; 3]; 3]) -> PairState {
        let mut out = [[ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = ZERO;
                for k in 0..3 {
                    acc += match party {
                        Party::A => op[i][k] * self.amps[k][j],
                        Party::B => op[j][k] * self.amps[i][k],
                    };
                }
                out[i][j] = acc;
            }
        }
        PairState::new(out, self.t)
    }

    /// Free evolution of both atoms to time `t` (level 3 at energy `eps`).
    pub fn evolve_free(&self, eps: f64, t: f64) -> Result<PairState> {
        if !t.is_finite() {
            return Err(Error::NonFinite("target time"));
        }
        if t < self.t {
            return Err(Error::TimeOrder {
                t_start: self.t,
                t_end: t,
            });
        }
        let ph = cis(-eps * (t - self.t));
        let mut out = *self;
        for (a, row) in out.amps.iter_mut().enumerate() {
            for (b, z) in row.iter_mut().enumerate() {
                let n = (a == 2) as i32 + (b == 2) as i32;
                *z *= ph.powi(n);
            }
        }
        out.t = t;
        Ok(out)
    }
}

/// `(|1>_A |2>_B - |2>_A |1>_B) / sqrt(2)`.
pub fn prepare_singlet(t: f64) -> PairState {
    let mut amps = [[ZERO; 3]; 3];
    amps[0][1] = C64::new(FRAC_1_SQRT_2, 0.0);
    amps[1][0] = C64::new(-FRAC_1_SQRT_2, 0.0);
    PairState::new(amps, t)
}

/// The state reached after both local pi pulses, up to a global phase:
/// `[|1>_A|3>_B e^{-i(omega t + chi)} - |3>_A|1>_B e^{-i(omega t + phi)}] / sqrt(2)`.
pub fn pulsed_pair_state(t: f64, omega: f64, phi: f64, chi: f64) -> PairState {
    let mut amps = [[ZERO; 3]; 3];
    amps[0][2] = FRAC_1_SQRT_2 * cis(-(omega * t + chi));
    amps[2][0] = -FRAC_1_SQRT_2 * cis(-(omega * t + phi));
    PairState::new(amps, t)
}

/// Resonant pi pulse on one party's 2-3 transition starting at `t_start`.
///
/// The pair first evolves freely to `t_start`; during the pulse the other atom
/// evolves freely. The drive must be an RWA drive.
pub fn apply_local_pi_pulse(
    pair: &PairState,
    party: Party,
    drive: &FieldDrive,
    t_start: f64,
) -> Result<PairState> {
    if !drive.rwa() {
        return Err(Error::RwaMismatch { expected: true });
    }
    if !(drive.g0() > 0.0) {
        return Err(Error::InvalidDrive("pi pulse needs g0 > 0".into()));
    }
    let eps = drive.epsilon();
    let start = pair.evolve_free(eps, t_start)?;
    let duration = std::f64::consts::PI / drive.g0();
    let t_end = t_start + duration;

    // single-atom propagator on levels (2, 3); level 1 stays put
    let col = |c2: C64, c3: C64| -> Result<TwoLevelAmplitudes> {
        propagate_rwa(&TwoLevelAmplitudes::new(c2, c3, t_start), drive, duration)
    };
    let e2 = col(C64::new(1.0, 0.0), ZERO)?;
    let e3 = col(ZERO, C64::new(1.0, 0.0))?;
    let one = C64::new(1.0, 0.0);
    let op = [
        [one, ZERO, ZERO],
        [ZERO, e2.c1, e3.c1],
        [ZERO, e2.c3, e3.c3],
    ];
    let other = match party {
        Party::A => Party::B,
        Party::B => Party::A,
    };
    let free = [
        [one, ZERO, ZERO],
        [ZERO, one, ZERO],
        [ZERO, ZERO, cis(-eps * duration)],
    ];
    let mut out = start.apply_local(party, &op).apply_local(other, &free);
    out.t = t_end;
    Ok(out)
}
