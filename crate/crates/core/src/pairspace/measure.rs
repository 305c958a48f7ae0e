//! Projective measurements: Alice's time-reversed `|+>` detection and Bob's level readout.

use super::{Level, PairState, Party};
use crate::error::{Error, Result};
use crate::linalg::{cis, inner, mat2_vec, normalized, Mat2, Vec3, C64, ZERO};
use crate::qdyn::{dressing_matrix, propagator_full, FieldDrive, TimeReversalPlan};

/// Result of one projective measurement with a supplied uniform draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome<S> {
    pub found_target: bool,
    /// Post-measurement state, renormalised.
    pub collapsed: S,
    /// Born probability of the target outcome.
    pub probability: f64,
}

/// Level Bob detects at the end of his measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BobTarget {
    /// Detect `|1>`; success probability `(1 + 2 sigma sin 2phi)/2` on `|->`.
    Level1,
    /// Detect `|3>` after a time-reversed pulse, as in the locking scheme.
    #[default]
    Level3,
}

impl BobTarget {
    pub fn level(self) -> Level {
        match self {
            BobTarget::Level1 => Level::L1,
            BobTarget::Level3 => Level::L3,
        }
    }
}

/// Alice's measurement as a unitary on her `{|1>, |3>}` levels starting at `t_start`.
///
/// The phase of `drive` is flipped by pi, the field ramps on adiabatically
/// (bare levels follow the dressed ones), runs for `T = m pi/omega`, and is
/// then cut off. Detecting `|1>` afterwards projects onto `U^dagger |1>`,
/// which is `|+>` to first order in sigma.
pub fn measurement_unitary(
    plan: &TimeReversalPlan,
    drive: &FieldDrive,
    t_start: f64,
) -> Result<Mat2> {
    plan.check_drive(drive)?;
    let flipped = drive.shifted(plan.phase_flip);
    let p = propagator_full(&flipped, t_start, t_start + plan.duration, None)?;
    Ok(crate::linalg::mat2_mul(
        &p,
        &dressing_matrix(&flipped, t_start),
    ))
}

/// The single-atom state (levels 1, 2, 3) that a measurement unitary projects onto.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliceProjector {
    pub state: Vec3,
}

impl AliceProjector {
    /// `U^dagger |1>` embedded in three levels.
    pub fn from_unitary(u: &Mat2) -> Self {
        let v = mat2_vec(&crate::linalg::mat2_adjoint(u), &[C64::new(1.0, 0.0), ZERO]);
        Self {
            state: [v[0], ZERO, v[1]],
        }
    }

    pub fn from_state(state: Vec3) -> Result<Self> {
        Ok(Self {
            state: normalized(&state).ok_or(Error::ZeroNorm)?,
        })
    }
}

fn check_draw(draw: f64) -> Result<()> {
    if !(0.0..1.0).contains(&draw) {
        return Err(Error::param(
            "rng_draw",
            format!("must lie in [0, 1), got {draw}"),
        ));
    }
    Ok(())
}

/// Projects `party` onto `projector.state` (or its complement), chosen by `draw`.
pub fn alice_projection(
    pair: &PairState,
    party: Party,
    projector: &AliceProjector,
    draw: f64,
) -> Result<MeasurementOutcome<PairState>> {
    check_draw(draw)?;
    let v = projector.state;
    // component of the pair along v for each level of the other party
    let mut along = [ZERO; 3];
    for (k, slot) in along.iter_mut().enumerate() {
        let col: Vec3 = match party {
            Party::A => [pair.amps[0][k], pair.amps[1][k], pair.amps[2][k]],
            Party::B => pair.amps[k],
        };
        *slot = inner(&v, &col);
    }
    let total = pair.norm_sqr();
    let p_hit: f64 = along.iter().map(|z| z.norm_sqr()).sum::<f64>() / total;
    let found = draw < p_hit;
    let mut amps = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (own, other) = match party {
                Party::A => (i, j),
                Party::B => (j, i),
            };
            let proj = v[own] * along[other];
            amps[i][j] = if found { proj } else { pair.amps[i][j] - proj };
        }
    }
    let mut out = PairState::new(amps, pair.t);
    let n = out.norm_sqr().sqrt();
    if n == 0.0 {
        return Err(Error::ZeroNorm);
    }
    for z in out.amps.iter_mut().flatten() {
        *z /= n;
    }
    Ok(MeasurementOutcome {
        found_target: found,
        collapsed: out,
        probability: p_hit,
    })
}

/// Simulates Alice's four-step measurement on a pair starting at `pair.t`.
///
/// Bob's atom evolves freely meanwhile; the collapsed pair is returned at
/// `pair.t + T`. Fails if `drive.g0` misses `omega/(2m)` by more than 1e-12 relative.
pub fn alice_measurement(
    pair: &PairState,
    plan: &TimeReversalPlan,
    drive: &FieldDrive,
    rng_draw: f64,
) -> Result<MeasurementOutcome<PairState>> {
    check_draw(rng_draw)?;
    let u = measurement_unitary(plan, drive, pair.t)?;
    let one = C64::new(1.0, 0.0);
    let op = [
        [u[0][0], ZERO, u[0][1]],
        [ZERO, one, ZERO],
        [u[1][0], ZERO, u[1][1]],
    ];
    let t_end = pair.t + plan.duration;
    let free_b = [
        [one, ZERO, ZERO],
        [ZERO, one, ZERO],
        [ZERO, ZERO, cis(-drive.epsilon() * plan.duration)],
    ];
    let mut evolved = pair
        .apply_local(Party::A, &op)
        .apply_local(Party::B, &free_b);
    evolved.t = t_end;
    let bare_one = AliceProjector {
        state: [one, ZERO, ZERO],
    };
    alice_projection(&evolved, Party::A, &bare_one, rng_draw)
}

/// `|<target|psi>|^2 / <psi|psi>`.
pub fn bob_success_probability(state: &Vec3, target: Level) -> f64 {
    let n: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    state[target.index()].norm_sqr() / n
}

/// `(1 + 2 sigma sin 2phi) / 2`.
pub fn bob_success_closed_form(sigma: f64, phi: f64) -> f64 {
    0.5 * (1.0 + 2.0 * sigma * (2.0 * phi).sin())
}

/// Detects `target` on a single atom using `draw`.
pub fn bob_measurement(state: &Vec3, target: Level, draw: f64) -> Result<MeasurementOutcome<Vec3>> {
    check_draw(draw)?;
    let p = bob_success_probability(state, target);
    let found = draw < p;
    let k = target.index();
    let mut out = *state;
    if found {
        out = [ZERO; 3];
        out[k] = C64::new(1.0, 0.0);
    } else {
        out[k] = ZERO;
    }
    Ok(MeasurementOutcome {
        found_target: found,
        collapsed: normalized(&out).ok_or(Error::ZeroNorm)?,
        probability: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairspace::{apply_local_pi_pulse, plus_minus_basis, prepare_singlet};
    use crate::rng::StreamKey;
    use rand::Rng;
    use std::f64::consts::PI;

    /// Pair after both weak pi pulses, advanced to `t_ref` with `omega t_ref = 0 mod pi`.
    fn prepared(phi: f64, chi: f64) -> PairState {
        let da = FieldDrive::new(0.01, 1.0, phi).unwrap().with_rwa(true);
        let db = FieldDrive::new(0.01, 1.0, chi).unwrap().with_rwa(true);
        let s = apply_local_pi_pulse(&prepare_singlet(0.0), Party::A, &da, 0.0).unwrap();
        let s = apply_local_pi_pulse(&s, Party::B, &db, s.t).unwrap();
        let t_ref = (s.t / PI).ceil() * PI;
        s.evolve_free(1.0, t_ref).unwrap()
    }

    #[test]
    fn alice_success_is_one_half() {
        let plan = TimeReversalPlan::new(10, 1.0).unwrap();
        let s = plan.sigma();
        for k in 0..8 {
            let phi = k as f64 * PI / 8.0;
            let o = alice_measurement(&prepared(phi, 0.3), &plan, &plan.drive(phi), 0.0).unwrap();
            assert!((o.probability - 0.5).abs() < s * s);
            assert!(o.found_target);
            assert!((o.collapsed.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn physical_readout_matches_closed_form() {
        for m in [5, 10] {
            let plan = TimeReversalPlan::new(m, 1.0).unwrap();
            let s = plan.sigma();
            for k in 0..16 {
                let phi = k as f64 * PI / 8.0;
                let o =
                    alice_measurement(&prepared(phi, -0.8), &plan, &plan.drive(phi), 0.0).unwrap();
                let bob = o.collapsed.conditional_state(Party::A, Level::L1).unwrap();
                let p = bob_success_probability(&bob, Level::L1);
                let cf = bob_success_closed_form(s, phi);
                assert!(
                    (p - cf).abs() < 5.0 * s * s,
                    "m={m} phi={phi} p={p} cf={cf}"
                );
            }
        }
    }

    #[test]
    fn bob_collapses_to_teleported_minus() {
        let plan = TimeReversalPlan::new(10, 1.0).unwrap();
        let s = plan.sigma();
        let (phi, chi) = (0.9, -0.4);
        let o = alice_measurement(&prepared(phi, chi), &plan, &plan.drive(phi), 0.1).unwrap();
        let bob = o.collapsed.conditional_state(Party::A, Level::L1).unwrap();
        let db = FieldDrive::new(plan.g0, 1.0, chi).unwrap();
        let basis = plus_minus_basis(Party::B, &db, o.collapsed.t).with_sigma_phase(phi);
        let f = crate::linalg::fidelity(&bob, &basis.minus);
        assert!(1.0 - f < 2.0 * s * s, "deficit {}", 1.0 - f);
    }

    #[test]
    fn failed_detection_leaves_complement() {
        let plan = TimeReversalPlan::new(10, 1.0).unwrap();
        let o = alice_measurement(&prepared(0.2, 0.1), &plan, &plan.drive(0.2), 0.999).unwrap();
        assert!(!o.found_target);
        assert!((o.collapsed.norm_sqr() - 1.0).abs() < 1e-12);
        let p_alice_one: f64 = o.collapsed.amps[0].iter().map(|z| z.norm_sqr()).sum();
        assert!(p_alice_one < 1e-24);
    }

    #[test]
    fn rejects_off_constraint_drive() {
        let plan = TimeReversalPlan::new(10, 1.0).unwrap();
        let d = FieldDrive::new(0.0501, 1.0, 0.0).unwrap();
        assert!(matches!(
            alice_measurement(&prepared(0.0, 0.0), &plan, &d, 0.5),
            Err(Error::ReversalConstraint { .. })
        ));
        assert!(alice_measurement(&prepared(0.0, 0.0), &plan, &plan.drive(0.0), 1.0).is_err());
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(bob_success_closed_form(0.0, 1.0), 0.5);
        assert!((bob_success_closed_form(0.0125, PI / 4.0) - 0.5125).abs() < 1e-15);
        assert!((bob_success_closed_form(0.0125, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conditional_bob_statistics() {
        let plan = TimeReversalPlan::new(10, 1.0).unwrap();
        let phi = PI / 4.0;
        let pair = prepared(phi, 0.0);
        let u = measurement_unitary(&plan, &plan.drive(phi), pair.t).unwrap();
        let proj = AliceProjector::from_unitary(&u);
        let key = StreamKey::new(7, "collapse-test");
        let (mut m, mut l) = (0u64, 0u64);
        let n = 40_000u64;
        let mut p_exact = 0.0;
        for i in 0..n {
            let mut rng = key.stream(i);
            let o = alice_projection(&pair, Party::A, &proj, rng.random()).unwrap();
            if o.found_target {
                m += 1;
                let bob = o.collapsed.conditional_state(Party::A, Level::L1).unwrap();
                let b = bob_measurement(&bob, Level::L1, rng.random()).unwrap();
                p_exact = b.probability;
                l += b.found_target as u64;
            }
        }
        let rate = l as f64 / m as f64;
        let se = (p_exact * (1.0 - p_exact) / m as f64).sqrt();
        assert!((rate - p_exact).abs() < 4.0 * se, "rate={rate} p={p_exact}");
        let sa = (0.25 / n as f64).sqrt();
        assert!((m as f64 / n as f64 - 0.5).abs() < 4.0 * sa);
    }

    #[test]
    fn bob_measurement_bookkeeping() {
        let psi = [C64::new(0.6, 0.0), ZERO, C64::new(0.0, 0.8)];
        let hit = bob_measurement(&psi, Level::L3, 0.5).unwrap();
        assert!(hit.found_target && (hit.probability - 0.64).abs() < 1e-15);
        let miss = bob_measurement(&psi, Level::L3, 0.7).unwrap();
        assert!(!miss.found_target);
        assert!((miss.collapsed[0].norm() - 1.0).abs() < 1e-15);
    }
}
