//! Fixed-step RK4 propagation and closed-form RWA evolution.
//!
//! The RK4 scheme runs in the rotating frame, where the fast `exp(-i eps t)`
//! phase of level 3 is removed and the remaining dynamics are slow apart from
//! the counter-rotating term. States are converted back to the lab frame at
//! the end.

use super::{rotating_transform, switch_on, FieldDrive, PulseSwitch, TwoLevelAmplitudes};
use crate::error::{Error, Result};
use crate::linalg::{cis, Mat2, Vec2, C64, I};

/// Number of equal RK4 steps used for a span, given an optional step hint.
///
/// Hints larger than [`FieldDrive::max_step`] are clamped to it; without a
/// hint [`FieldDrive::default_step`] is used.
pub fn rk4_step_count(drive: &FieldDrive, span: f64, step_hint: Option<f64>) -> usize {
    let h = match step_hint {
        Some(h) if h > 0.0 && h.is_finite() => h.min(drive.max_step()),
        _ => drive.default_step(),
    };
    ((span / h).ceil() as usize).max(1)
}

#[inline]
fn rhs(drive: &FieldDrive, detuning: f64, t: f64, y: &Vec2) -> Vec2 {
    let a = drive.alpha(t);
    // i dy/dt = H~ y
    [-I * (a * y[1]), -I * (a.conj() * y[0] + detuning * y[1])]
}

fn rk4_rotating(drive: &FieldDrive, mut y: Vec2, t0: f64, t1: f64, steps: usize) -> Vec2 {
    let detuning = drive.epsilon() - drive.omega();
    let h = (t1 - t0) / steps as f64;
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let k1 = rhs(drive, detuning, t, &y);
        let y2 = [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]];
        let k2 = rhs(drive, detuning, t + 0.5 * h, &y2);
        let y3 = [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]];
        let k3 = rhs(drive, detuning, t + 0.5 * h, &y3);
        let y4 = [y[0] + h * k3[0], y[1] + h * k3[1]];
        let k4 = rhs(drive, detuning, t + h, &y4);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

fn check_span(state: &TwoLevelAmplitudes, t_end: f64) -> Result<()> {
    if !state.is_finite() || !t_end.is_finite() {
        return Err(Error::NonFinite("state or target time"));
    }
    if t_end < state.t {
        return Err(Error::TimeOrder {
            t_start: state.t,
            t_end,
        });
    }
    Ok(())
}

/// Integrates the full (non-RWA unless the drive says otherwise) Schrodinger
/// equation from `state.t` to `t_end`.
///
/// No renormalisation is applied.
pub fn propagate_full(
    state: &TwoLevelAmplitudes,
    drive: &FieldDrive,
    t_end: f64,
    step_hint: Option<f64>,
) -> Result<TwoLevelAmplitudes> {
    check_span(state, t_end)?;
    if t_end == state.t {
        return Ok(*state);
    }
    let steps = rk4_step_count(drive, t_end - state.t, step_hint);
    let rot = rotating_transform(state, drive, false);
    let y = rk4_rotating(drive, rot.as_vec(), state.t, t_end, steps);
    let out = TwoLevelAmplitudes::from_vec(y, t_end);
    Ok(rotating_transform(&out, drive, true))
}

/// Lab-frame propagator from `t_start` to `t_end`, column `j` being the image of `|j>`.
pub fn propagator_full(
    drive: &FieldDrive,
    t_start: f64,
    t_end: f64,
    step_hint: Option<f64>,
) -> Result<Mat2> {
    let e1 = propagate_full(
        &TwoLevelAmplitudes::ground(t_start),
        drive,
        t_end,
        step_hint,
    )?;
    let e3 = propagate_full(
        &TwoLevelAmplitudes::excited(t_start),
        drive,
        t_end,
        step_hint,
    )?;
    Ok([[e1.c1, e3.c1], [e1.c3, e3.c3]])
}

/// Closed-form evolution under an RWA drive for `duration`.
pub fn propagate_rwa(
    state: &TwoLevelAmplitudes,
    drive: &FieldDrive,
    duration: f64,
) -> Result<TwoLevelAmplitudes> {
    if !drive.rwa() {
        return Err(Error::RwaMismatch { expected: true });
    }
    let t_end = state.t + duration;
    check_span(state, t_end)?;
    if duration == 0.0 {
        return Ok(*state);
    }
    let rot = rotating_transform(state, drive, false);
    let u = rwa_rotating_propagator(drive, duration);
    let y = crate::linalg::mat2_vec(&u, &rot.as_vec());
    Ok(rotating_transform(
        &TwoLevelAmplitudes::from_vec(y, t_end),
        drive,
        true,
    ))
}

/// `exp(-i H~ d)` for `H~ = [[0, -g0/2], [-g0/2, delta]]`.
fn rwa_rotating_propagator(drive: &FieldDrive, d: f64) -> Mat2 {
    let a = -0.5 * drive.g0();
    let delta = drive.epsilon() - drive.omega();
    let w = (a * a + 0.25 * delta * delta).sqrt();
    let global = cis(-0.5 * delta * d);
    let (cos, sinc) = if w > 0.0 {
        ((w * d).cos(), (w * d).sin() / w)
    } else {
        (1.0, d)
    };
    // exp(-i M d) with M = [[-delta/2, a], [a, delta/2]], M^2 = w^2
    let c = C64::new(cos, 0.0);
    [
        [
            global * (c - I * sinc * (-0.5 * delta)),
            global * (-I * sinc * a),
        ],
        [
            global * (-I * sinc * a),
            global * (c - I * sinc * (0.5 * delta)),
        ],
    ]
}

/// Applies a pulse of the given duration, switching on as requested.
pub fn apply_pulse(
    state: &TwoLevelAmplitudes,
    drive: &FieldDrive,
    duration: f64,
    switch: PulseSwitch,
    step_hint: Option<f64>,
) -> Result<TwoLevelAmplitudes> {
    let start = match switch {
        PulseSwitch::Sudden => *state,
        PulseSwitch::Adiabatic => switch_on(state, drive),
    };
    if drive.rwa() {
        propagate_rwa(&start, drive, duration)
    } else {
        propagate_full(&start, drive, state.t + duration, step_hint)
    }
}
