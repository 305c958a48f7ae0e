//! Undoing a non-RWA evolution by flipping the field phase.

use std::f64::consts::PI;

use super::{propagate_full, rotating_transform, FieldDrive, TwoLevelAmplitudes};
use crate::error::{Error, Result};
use crate::linalg::{fidelity, Vec2};

/// Measurement timing for integer `m`: `g0 = omega/(2m)`, `T = m pi / omega`,
/// so that `g0 T = pi/2` and `omega T = m pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeReversalPlan {
    pub m: u32,
    pub omega: f64,
    pub g0: f64,
    pub duration: f64,
    pub phase_flip: f64,
}

impl TimeReversalPlan {
    pub fn new(m: u32, omega: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("m", "must be a positive integer"));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidDrive(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        Ok(Self {
            m,
            omega,
            g0: omega / (2.0 * m as f64),
            duration: m as f64 * PI / omega,
            phase_flip: PI,
        })
    }

    /// `g0 / (4 omega) = 1 / (8 m)`.
    pub fn sigma(&self) -> f64 {
        self.g0 / (4.0 * self.omega)
    }

    /// The strong field this plan calls for, at the given phase.
    pub fn drive(&self, phase: f64) -> FieldDrive {
        FieldDrive::new(self.g0, self.omega, phase).expect("plan parameters are valid")
    }

    /// Errors unless `drive.g0` matches the plan within `1e-12` relative.
    pub fn check_drive(&self, drive: &FieldDrive) -> Result<()> {
        let ok = (drive.g0() - self.g0).abs() <= 1e-12 * self.g0
            && (drive.omega() - self.omega).abs() <= 1e-12 * self.omega;
        if ok {
            Ok(())
        } else {
            Err(Error::ReversalConstraint {
                g0: drive.g0(),
                expected: self.g0,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReversalOutcome {
    pub final_state: TwoLevelAmplitudes,
    /// `|<initial|final>|^2`, both taken in the rotating frame of the forward drive.
    pub fidelity: f64,
}

/// Forward for `forward_t`, then the same drive with its phase flipped for
/// another `forward_t`.
pub fn evolve_and_reverse(
    plan: &TimeReversalPlan,
    drive: &FieldDrive,
    initial: &TwoLevelAmplitudes,
    forward_t: f64,
) -> Result<ReversalOutcome> {
    let mid = propagate_full(initial, drive, initial.t + forward_t, None)?;
    let back_drive = drive.shifted(plan.phase_flip);
    let end = propagate_full(&mid, &back_drive, mid.t + forward_t, None)?;
    let a: Vec2 = rotating_transform(initial, drive, false).as_vec();
    let b: Vec2 = rotating_transform(&end, drive, false).as_vec();
    Ok(ReversalOutcome {
        final_state: end,
        fidelity: fidelity(&a, &b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    /// Fidelity deficit at matched `T` is about `1.00 sigma^2` for `m = 10`, `phi = 0`.
    const MATCHED_DEFICIT_C: f64 = 1.1;

    #[test]
    fn plan_invariants() {
        for m in [1, 2, 5, 10, 20, 37] {
            let p = TimeReversalPlan::new(m, 1.7).unwrap();
            assert!((p.g0 * p.duration - PI / 2.0).abs() < 1e-14);
            assert!((p.omega * p.duration - m as f64 * PI).abs() < 1e-12);
            assert!((p.sigma() - 1.0 / (8.0 * m as f64)).abs() < 1e-16);
            assert_eq!(p.phase_flip, PI);
        }
        assert!(TimeReversalPlan::new(0, 1.0).is_err());
        assert!(TimeReversalPlan::new(3, 0.0).is_err());
    }

    #[test]
    fn check_drive_tolerance() {
        let p = TimeReversalPlan::new(10, 1.0).unwrap();
        assert!(p.check_drive(&p.drive(0.3)).is_ok());
        let off = FieldDrive::new(0.05 * (1.0 + 1e-9), 1.0, 0.0).unwrap();
        assert!(matches!(
            p.check_drive(&off),
            Err(Error::ReversalConstraint { .. })
        ));
    }

    #[test]
    fn rwa_reverses_for_any_duration() {
        let p = TimeReversalPlan::new(3, 1.0).unwrap();
        let d = p.drive(0.8).with_rwa(true);
        let s = TwoLevelAmplitudes::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8), 0.4);
        for &t in &[1.0, 4.7, 13.0] {
            let r = evolve_and_reverse(&p, &d, &s, t).unwrap();
            assert!((r.fidelity - 1.0).abs() < 1e-9, "T={t}");
        }
    }

    #[test]
    fn matched_duration_deficit_is_second_order() {
        let p = TimeReversalPlan::new(10, 1.0).unwrap();
        let d = p.drive(0.0);
        let s = p.sigma();
        let r = evolve_and_reverse(&p, &d, &TwoLevelAmplitudes::ground(0.0), p.duration).unwrap();
        assert!(
            1.0 - r.fidelity <= MATCHED_DEFICIT_C * s * s,
            "deficit {}",
            1.0 - r.fidelity
        );
    }

    #[test]
    fn mismatched_duration_is_worse() {
        for m in [2, 5, 10, 20] {
            let p = TimeReversalPlan::new(m, 1.0).unwrap();
            let d = p.drive(0.0);
            let s0 = TwoLevelAmplitudes::ground(0.0);
            let good = evolve_and_reverse(&p, &d, &s0, p.duration).unwrap();
            let bad = evolve_and_reverse(&p, &d, &s0, (m as f64 + 0.25) * PI).unwrap();
            assert!(good.fidelity > bad.fidelity, "m={m}");
            assert!((good.final_state.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }
}
