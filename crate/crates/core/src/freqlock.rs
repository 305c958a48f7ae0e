//! Remote frequency locking with two identical atom arrays.
//!
//! Alice and Bob drive their arrays with fields whose phase advances by 2 pi
//! per wavelength along the array, so atom `i` at normalised position `u_i`
//! sees `phi_i = offset_A + 2 pi u_i` on Alice's side and
//! `chi_i = offset_B + 2 pi u_i omega_B / omega_A` on Bob's. After Alice's
//! post-selection each of Bob's subgroup atoms holds `|->` carrying `phi_i`.
//! Bob scans his measurement start time; advancing the start by `vartheta`
//! changes his field phase at the atom to `chi_i - vartheta`, and the success
//! probability peaks at `vartheta_i = chi_i - phi_i`. The slope of
//! `vartheta_i` against `u_i` is `2 pi (omega_B - omega_A) / omega_A`.
//!
//! Converting the slope into a correction is this crate's own choice: a
//! least-squares line fit followed by a proportional update of `omega_B`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sqr, wrap, wrap_pm_pi, Vec3};
use crate::pairspace::{
    alice_projection, plus_minus_basis, pulsed_pair_state, AliceProjector, BobTarget, Level, Party,
};
use crate::qdyn::FieldDrive;
use crate::rng::StreamKey;

/// Largest initial relative mismatch accepted by the servo.
pub const MAX_INITIAL_MISMATCH: f64 = 1e-3;

/// Attempts at a round before giving up on reaching a two-atom subgroup.
pub const MAX_ATTEMPTS: u64 = 64;

/// Corrected adjacent jumps above this are reported as ambiguous.
pub const AMBIGUITY_JUMP: f64 = PI / 2.0;

/// Normalised positions of the atoms along one array, in units of Alice's wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomArray {
    positions: Vec<f64>,
}

impl AtomArray {
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::param(
                "positions",
                "an array needs at least two atoms",
            ));
        }
        if positions.iter().any(|u| !(0.0..1.0).contains(u)) {
            return Err(Error::param(
                "positions",
                "each position must lie in [0, 1)",
            ));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param(
                "positions",
                "positions must be strictly increasing",
            ));
        }
        Ok(Self { positions })
    }

    /// `n` atoms at `u_i = i / n`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i as f64 / n as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockModel {
    pub omega: f64,
    pub phase_offset: f64,
}

/// Per-atom field phases `offset + 2 pi u_i omega / reference_omega`.
pub fn array_phase_map(array: &AtomArray, clock: &ClockModel, reference_omega: f64) -> Vec<f64> {
    let ratio = clock.omega / reference_omega;
    array
        .positions
        .iter()
        .map(|u| clock.phase_offset + 2.0 * PI * u * ratio)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LockConfig {
    pub array: AtomArray,
    pub clock_a: ClockModel,
    pub clock_b: ClockModel,
    pub sigma: f64,
    pub scan_points: usize,
    /// Born draws per scan point; 0 uses the exact probabilities.
    pub trials_per_point: u64,
    pub gain: f64,
    pub rel_tol: f64,
    pub max_rounds: u32,
    pub target: BobTarget,
    pub master_seed: u64,
}

impl Default for LockConfig {
    fn default() -> Self {
        Self {
            array: AtomArray::uniform(16).expect("16 atoms"),
            clock_a: ClockModel {
                omega: 1.0,
                phase_offset: 0.0,
            },
            clock_b: ClockModel {
                omega: 1.0 + 1e-4,
                phase_offset: 0.0,
            },
            sigma: 0.0125,
            scan_points: 64,
            trials_per_point: 0,
            gain: 0.5,
            rel_tol: 1e-6,
            max_rounds: 50,
            target: BobTarget::Level3,
            master_seed: 1,
        }
    }
}

impl LockConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, c) in [
            ("clock_a.omega", &self.clock_a),
            ("clock_b.omega", &self.clock_b),
        ] {
            if !(c.omega.is_finite() && c.omega > 0.0) {
                return Err(Error::param(name, format!("must be > 0, got {}", c.omega)));
            }
            if !c.phase_offset.is_finite() {
                return Err(Error::NonFinite("clock phase offset"));
            }
        }
        if !(self.sigma.is_finite() && (0.0..crate::teleport::SIGMA_MAX).contains(&self.sigma)) {
            return Err(Error::param(
                "sigma",
                format!(
                    "must satisfy 0 <= sigma < 1/16 (perturbative bound), got {}",
                    self.sigma
                ),
            ));
        }
        if self.scan_points < 4 {
            return Err(Error::param(
                "scan_points",
                format!("need at least 4, got {}", self.scan_points),
            ));
        }
        if !(self.gain > 0.0 && self.gain <= 1.0) {
            return Err(Error::param(
                "gain",
                format!("must lie in (0, 1], got {}", self.gain),
            ));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::param(
                "rel_tol",
                format!("must be > 0, got {}", self.rel_tol),
            ));
        }
        if self.max_rounds == 0 {
            return Err(Error::param("max_rounds", "must be at least 1"));
        }
        Ok(())
    }

    /// `|omega_B - omega_A| / omega_A`.
    pub fn rel_error(&self) -> f64 {
        (self.clock_b.omega - self.clock_a.omega).abs() / self.clock_a.omega
    }

    fn drive(&self, omega: f64, phase: f64) -> Result<FieldDrive> {
        FieldDrive::new(4.0 * self.sigma * omega, omega, phase)
    }
}

/// Outcome of one start-time scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Start-time advance (as field phase, in `[0, 2 pi)`) with the highest success.
    pub best_phase: f64,
    /// Success probability (or frequency) at `2 pi k / scan_points`.
    pub curve: Vec<f64>,
}

fn circular_smooth(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|k| (y[(k + n - 1) % n] + y[k] + y[(k + 1) % n]) / 3.0)
        .collect()
}

/// Argmax of a periodic sample, refined by a three-point parabola. Returns
/// the peak position in grid units.
fn refined_peak(y: &[f64]) -> f64 {
    let n = y.len();
    let mut k = 0;
    for (i, v) in y.iter().enumerate() {
        if *v > y[k] {
            k = i;
        }
    }
    let (ym, y0, yp) = (y[(k + n - 1) % n], y[k], y[(k + 1) % n]);
    let den = ym - 2.0 * y0 + yp;
    let offset = if den < 0.0 {
        (0.5 * (ym - yp) / den).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    k as f64 + offset
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Success probability of Bob's measurement when his field at the atom has `phase`.
fn bob_success(bob_state: &Vec3, drive: &FieldDrive, target: BobTarget, phase: f64) -> f64 {
    let basis = plus_minus_basis(Party::B, &drive.with_phase(phase), 0.0);
    let proj = match target {
        BobTarget::Level3 => basis.minus_normalized(),
        BobTarget::Level1 => basis.plus_normalized(),
    };
    inner(&proj, bob_state).norm_sqr() / norm_sqr(bob_state)
}

/// Scans the start-time advance over `scan_points` equally spaced field phases.
///
/// In exact mode the grid peak is refined by a parabola and then polished on
/// the exact probability. In sampled mode (`trials_per_point > 0`) each point is a binomial count and
/// the curve is smoothed with a three-point circular mean before the peak search.
pub fn scan_start_time<R: Rng + ?Sized>(
    bob_state: &Vec3,
    drive: &FieldDrive,
    target: BobTarget,
    scan_points: usize,
    trials_per_point: u64,
    rng: &mut R,
) -> Result<ScanResult> {
    if scan_points < 4 {
        return Err(Error::param(
            "scan_points",
            format!("need at least 4, got {scan_points}"),
        ));
    }
    if norm_sqr(bob_state) == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let step = 2.0 * PI / scan_points as f64;
    let mut curve = Vec::with_capacity(scan_points);
    for k in 0..scan_points {
        let p = bob_success(bob_state, drive, target, drive.phase() - k as f64 * step);
        let v = if trials_per_point == 0 {
            p
        } else {
            let dist = Binomial::new(trials_per_point, p.clamp(0.0, 1.0))
                .map_err(|e| Error::param("trials_per_point", e.to_string()))?;
            dist.sample(rng) as f64 / trials_per_point as f64
        };
        curve.push(v);
    }
    let best_phase = if trials_per_point == 0 {
        // the curve is known exactly: polish the parabola on the true probability
        let start = refined_peak(&curve) * step;
        let f = |v: f64| bob_success(bob_state, drive, target, drive.phase() - v);
        golden_max(f, start - step, start + step)
    } else {
        refined_peak(&circular_smooth(&curve)) * step
    };
    Ok(ScanResult {
        best_phase: wrap(best_phase, 2.0 * PI),
        curve,
    })
}

/// Subgroup and per-atom optimal start-time phases from one entangled round.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingRound {
    pub subgroup: Vec<usize>,
    pub positions: Vec<f64>,
    pub best_phases: Vec<f64>,
}

/// One round with a given attempt index; fails below two post-selected atoms.
pub fn run_mapping_attempt(config: &LockConfig, round: u64, attempt: u64) -> Result<MappingRound> {
    let omega_a = config.clock_a.omega;
    let phases_a = array_phase_map(&config.array, &config.clock_a, omega_a);
    let phases_b = array_phase_map(&config.array, &config.clock_b, omega_a);
    let alice_key = StreamKey::new(config.master_seed, "lock-alice");
    let scan_key = StreamKey::new(config.master_seed, "lock-scan");
    // entangled with phase-aligned pulses on both sides, then mapped at t = 0
    let pair = pulsed_pair_state(0.0, omega_a, 0.0, 0.0);

    let mut subgroup = Vec::new();
    let mut bob_states = Vec::new();
    for (i, &phi) in phases_a.iter().enumerate() {
        let basis = plus_minus_basis(Party::A, &config.drive(omega_a, phi)?, 0.0);
        let proj = AliceProjector::from_state(basis.plus)?;
        let draw: f64 = alice_key.stream_nd(&[round, attempt, i as u64]).random();
        let o = alice_projection(&pair, Party::A, &proj, draw)?;
        if o.found_target {
            subgroup.push(i);
            bob_states.push(conditional_bob(&o.collapsed, &proj)?);
        }
    }
    if subgroup.len() < 2 {
        return Err(Error::SubgroupTooSmall(subgroup.len()));
    }
    let mut best_phases = Vec::with_capacity(subgroup.len());
    for (&i, state) in subgroup.iter().zip(&bob_states) {
        let drive = config.drive(config.clock_b.omega, phases_b[i])?;
        let mut rng = scan_key.stream_nd(&[round, attempt, i as u64]);
        let scan = scan_start_time(
            state,
            &drive,
            config.target,
            config.scan_points,
            config.trials_per_point,
            &mut rng,
        )?;
        best_phases.push(scan.best_phase);
    }
    let positions = subgroup
        .iter()
        .map(|&i| config.array.positions[i])
        .collect();
    Ok(MappingRound {
        subgroup,
        positions,
        best_phases,
    })
}

/// Bob's state after Alice found her atom along `proj`.
fn conditional_bob(collapsed: &crate::pairspace::PairState, proj: &AliceProjector) -> Result<Vec3> {
    // the collapsed pair is |v>_A (x) |bob>; read Bob's factor off the largest Alice component
    let a = (0..3)
        .max_by(|&x, &y| proj.state[x].norm().total_cmp(&proj.state[y].norm()))
        .unwrap_or(0);
    let level = [Level::L1, Level::L2, Level::L3][a];
    collapsed.conditional_state(Party::A, level)
}

/// First attempt of `round` with a usable subgroup.
pub fn run_mapping_round(config: &LockConfig, round: u64) -> Result<(MappingRound, u64)> {
    let mut last = Error::SubgroupTooSmall(0);
    for attempt in 0..MAX_ATTEMPTS {
        match run_mapping_attempt(config, round, attempt) {
            Ok(r) => return Ok((r, attempt + 1)),
            Err(e @ Error::SubgroupTooSmall(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEstimate {
    /// `omega_B - omega_A` estimate.
    pub delta_omega: f64,
    /// Fitted slope of phase against position (rad per wavelength).
    pub slope: f64,
    /// An adjacent unwrapped jump exceeded the ambiguity threshold.
    pub ambiguous: bool,
}

/// Least-squares slope of unwrapped phase against position, scaled to a frequency error.
pub fn estimate_frequency_error(
    positions: &[f64],
    best_phases: &[f64],
    omega_a: f64,
) -> Result<FrequencyEstimate> {
    if positions.len() != best_phases.len() {
        return Err(Error::param("best_phases", "length differs from positions"));
    }
    if positions.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: positions.len(),
        });
    }
    let mut pts: Vec<(f64, f64)> = positions
        .iter()
        .copied()
        .zip(best_phases.iter().copied())
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ambiguous = false;
    let mut unwrapped = Vec::with_capacity(pts.len());
    unwrapped.push(pts[0].1);
    for w in pts.windows(2) {
        let raw = w[1].1 - w[0].1;
        let d = if raw.abs() <= PI {
            raw
        } else {
            wrap_pm_pi(raw)
        };
        ambiguous |= d.abs() > AMBIGUITY_JUMP;
        let prev = *unwrapped.last().expect("nonempty");
        unwrapped.push(prev + d);
    }
    let n = pts.len() as f64;
    let mu = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mp = unwrapped.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (p, y) in pts.iter().zip(&unwrapped) {
        sxy += (p.0 - mu) * (y - mp);
        sxx += (p.0 - mu) * (p.0 - mu);
    }
    if sxx == 0.0 {
        return Err(Error::param("positions", "all positions coincide"));
    }
    let slope = sxy / sxx;
    if ambiguous {
        log::warn!("phase unwrapping ambiguous: adjacent jump above pi/2");
    }
    Ok(FrequencyEstimate {
        delta_omega: slope * omega_a / (2.0 * PI),
        slope,
        ambiguous,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LockRound {
    pub round: u32,
    /// Bob's frequency used in this round.
    pub omega_b: f64,
    pub delta_omega_hat: f64,
    pub subgroup_size: usize,
    pub attempts: u64,
    pub ambiguous: bool,
    /// Relative error after this round's correction.
    pub rel_error_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LockTrace {
    pub rounds: Vec<LockRound>,
    pub converged: bool,
    pub final_omega_b: f64,
    pub final_rel_error: f64,
}

/// Runs mapping rounds and proportional corrections until `rel_tol` or `max_rounds`.
pub fn run_lock_loop(config: &LockConfig) -> Result<LockTrace> {
    config.validate()?;
    let initial = config.rel_error();
    if initial > MAX_INITIAL_MISMATCH {
        return Err(Error::param(
            "clock_b.omega",
            format!("initial relative mismatch {initial} exceeds {MAX_INITIAL_MISMATCH}"),
        ));
    }
    let mut cfg = config.clone();
    let mut rounds = Vec::new();
    let mut converged = false;
    for r in 1..=config.max_rounds {
        let (mapping, attempts) = run_mapping_round(&cfg, u64::from(r))?;
        let est =
            estimate_frequency_error(&mapping.positions, &mapping.best_phases, cfg.clock_a.omega)?;
        let omega_b = cfg.clock_b.omega;
        cfg.clock_b.omega = omega_b - cfg.gain * est.delta_omega;
        let rel = cfg.rel_error();
        rounds.push(LockRound {
            round: r,
            omega_b,
            delta_omega_hat: est.delta_omega,
            subgroup_size: mapping.subgroup.len(),
            attempts,
            ambiguous: est.ambiguous,
            rel_error_after: rel,
        });
        if rel < cfg.rel_tol {
            converged = true;
            break;
        }
    }
    Ok(LockTrace {
        rounds,
        converged,
        final_omega_b: cfg.clock_b.omega,
        final_rel_error: cfg.rel_error(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;

    #[test]
    fn phase_map_examples() {
        let arr = AtomArray::uniform(6).unwrap();
        let a = ClockModel {
            omega: 1.0,
            phase_offset: 0.0,
        };
        let pa = array_phase_map(&arr, &a, 1.0);
        for (p, u) in pa.iter().zip(arr.positions()) {
            assert_eq!(*p, 2.0 * PI * u);
        }
        let b = ClockModel {
            omega: 1.0,
            phase_offset: 0.4,
        };
        for (x, y) in array_phase_map(&arr, &b, 1.0).iter().zip(&pa) {
            assert!((x - y - 0.4).abs() < 1e-15);
        }
        let arr = AtomArray::new(vec![0.0, 2.0 / 3.0]).unwrap();
        let b = ClockModel {
            omega: 1.5,
            phase_offset: 0.0,
        };
        let p = array_phase_map(&arr, &b, 1.0)[1];
        assert!(wrap_pm_pi(p).abs() < 1e-12);
    }

    #[test]
    fn array_validation() {
        assert!(AtomArray::new(vec![0.1]).is_err());
        assert!(AtomArray::new(vec![0.2, 0.1]).is_err());
        assert!(AtomArray::new(vec![0.2, 0.2]).is_err());
        assert!(AtomArray::new(vec![0.0, 1.0]).is_err());
        assert_eq!(AtomArray::uniform(2).unwrap().positions(), &[0.0, 0.5]);
    }

    fn teleported_minus(sigma: f64, phi: f64) -> Vec3 {
        let d = FieldDrive::new(4.0 * sigma, 1.0, phi).unwrap();
        plus_minus_basis(Party::B, &d, 0.0).minus_normalized()
    }

    #[test]
    fn scan_peaks_at_phase_difference() {
        let mut rng = StreamKey::new(0, "t").stream(0);
        for &sigma in &[0.0, 0.0125] {
            let state = teleported_minus(sigma, 1.1);
            let d = FieldDrive::new(4.0 * sigma, 1.0, 2.0).unwrap();
            let s = scan_start_time(&state, &d, BobTarget::Level3, 64, 0, &mut rng).unwrap();
            let expect = 2.0 - 1.1;
            assert!(
                wrap_pm_pi(s.best_phase - expect).abs() < 1e-4,
                "sigma={sigma}"
            );
            let max = s.curve.iter().cloned().fold(0.0, f64::max);
            assert!(max > 0.99);
            // one maximum per period: the curve rises then falls once
            let n = s.curve.len();
            let sign_changes = (0..n)
                .filter(|&k| {
                    let d0 = s.curve[(k + 1) % n] - s.curve[k];
                    let d1 = s.curve[(k + 2) % n] - s.curve[(k + 1) % n];
                    d0 > 0.0 && d1 <= 0.0
                })
                .count();
            assert_eq!(sign_changes, 1);
        }
    }

    #[test]
    fn scan_peak_success_is_one_at_matching_phase() {
        let state = teleported_minus(0.0125, 0.7);
        let d = FieldDrive::new(0.05, 1.0, 0.7).unwrap();
        assert!((bob_success(&state, &d, BobTarget::Level3, 0.7) - 1.0).abs() < 1e-14);
        let s = scan_start_time(
            &state,
            &d,
            BobTarget::Level1,
            16,
            0,
            &mut StreamKey::new(0, "t").stream(0),
        )
        .unwrap();
        assert!(wrap_pm_pi(s.best_phase - PI).abs() < 1e-3);
    }

    #[test]
    fn scan_rejects_too_few_points() {
        let state = teleported_minus(0.0, 0.0);
        let d = FieldDrive::new(0.05, 1.0, 0.0).unwrap();
        let mut rng = StreamKey::new(0, "t").stream(0);
        assert!(scan_start_time(&state, &d, BobTarget::Level3, 3, 0, &mut rng).is_err());
    }

    #[test]
    fn sampled_scan_tracks_exact_scan() {
        let key = StreamKey::new(11, "sampled-scan");
        let n = 200;
        let mut hits = 0;
        for seed in 0..n {
            let mut rng = key.stream(seed);
            let phi: f64 = rng.random::<f64>() * 2.0 * PI;
            let state = teleported_minus(0.0125, phi);
            let d = FieldDrive::new(0.05, 1.0, 0.3).unwrap();
            let exact = scan_start_time(&state, &d, BobTarget::Level3, 64, 0, &mut rng).unwrap();
            let noisy = scan_start_time(&state, &d, BobTarget::Level3, 64, 200, &mut rng).unwrap();
            if wrap_pm_pi(noisy.best_phase - exact.best_phase).abs() < 2.0 * PI / 64.0 {
                hits += 1;
            }
        }
        assert!(hits as f64 >= 0.95 * n as f64, "hits {hits}/{n}");
    }

    #[test]
    fn estimator_examples() {
        let u: Vec<f64> = (0..8).map(|i| i as f64 / 8.0).collect();
        let flat = vec![1.3; 8];
        assert!(
            estimate_frequency_error(&u, &flat, 1.0)
                .unwrap()
                .delta_omega
                .abs()
                < 1e-15
        );
        let d = 1e-4;
        let lin: Vec<f64> = u.iter().map(|x| 2.0 * PI * x * d).collect();
        let e = estimate_frequency_error(&u, &lin, 1.0).unwrap();
        assert!((e.delta_omega / d - 1.0).abs() < 1e-12);
        assert!(!e.ambiguous);
        assert!(matches!(
            estimate_frequency_error(&u[..1], &lin[..1], 1.0),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn estimator_unwraps_across_branch_cut() {
        let u = [0.0, 0.25, 0.5, 0.75];
        let slope = 1.2;
        let raw: Vec<f64> = u.iter().map(|x| wrap(2.9 + slope * x, 2.0 * PI)).collect();
        let e = estimate_frequency_error(&u, &raw, 1.0).unwrap();
        assert!((e.slope - slope).abs() < 1e-12);
        let steep: Vec<f64> = u.iter().map(|x| wrap(2.5 * PI * x, 2.0 * PI)).collect();
        assert!(estimate_frequency_error(&u, &steep, 1.0).unwrap().ambiguous);
    }

    #[test]
    fn subgroup_size_statistics() {
        let cfg = LockConfig {
            array: AtomArray::uniform(16).unwrap(),
            ..Default::default()
        };
        let rounds = 300;
        let mut total = 0usize;
        for r in 0..rounds {
            total += run_mapping_attempt(&cfg, r, 0)
                .map(|m| m.subgroup.len())
                .unwrap_or(0);
        }
        let mean = total as f64 / rounds as f64;
        let se = (16.0 * 0.25 / rounds as f64).sqrt();
        assert!((mean - 8.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn matched_clocks_give_flat_phases() {
        let cfg = LockConfig {
            clock_b: ClockModel {
                omega: 1.0,
                phase_offset: 0.9,
            },
            ..Default::default()
        };
        let (m, _) = run_mapping_round(&cfg, 1).unwrap();
        let step = 2.0 * PI / cfg.scan_points as f64;
        for p in &m.best_phases {
            assert!(wrap_pm_pi(p - m.best_phases[0]).abs() < step);
        }
    }

    #[test]
    fn slope_sign_follows_mismatch() {
        for &d in &[1e-4, -1e-4] {
            let cfg = LockConfig {
                clock_b: ClockModel {
                    omega: 1.0 + d,
                    phase_offset: 0.0,
                },
                ..Default::default()
            };
            let (m, _) = run_mapping_round(&cfg, 3).unwrap();
            let e = estimate_frequency_error(&m.positions, &m.best_phases, 1.0).unwrap();
            assert_eq!(e.slope.signum(), d.signum());
            assert!(
                (e.delta_omega / d - 1.0).abs() < 0.01,
                "ratio {}",
                e.delta_omega / d
            );
        }
    }

    #[test]
    fn exact_mode_converges() {
        let t = run_lock_loop(&LockConfig::default()).unwrap();
        assert!(t.converged && t.final_rel_error < 1e-6);
        assert!(t.rounds.len() <= 50);
        let errs: Vec<f64> = t.rounds.iter().map(|r| (r.omega_b - 1.0).abs()).collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0]);
            assert!((w[1] / w[0] / 0.5 - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn locked_clocks_stay_put() {
        let cfg = LockConfig {
            clock_b: ClockModel {
                omega: 1.0,
                phase_offset: 0.2,
            },
            ..Default::default()
        };
        let t = run_lock_loop(&cfg).unwrap();
        assert!(t.converged);
        assert_eq!(t.rounds.len(), 1);
        assert!(t.final_rel_error < cfg.rel_tol);
    }

    #[test]
    fn nyquist_floor_converges() {
        let cfg = LockConfig {
            array: AtomArray::uniform(2).unwrap(),
            ..Default::default()
        };
        let t = run_lock_loop(&cfg).unwrap();
        assert!(t.converged, "{t:?}");
        assert!(t.rounds.iter().all(|r| r.subgroup_size == 2));
    }

    #[test]
    fn rejects_large_initial_mismatch() {
        let cfg = LockConfig {
            clock_b: ClockModel {
                omega: 1.01,
                phase_offset: 0.0,
            },
            ..Default::default()
        };
        assert!(run_lock_loop(&cfg).is_err());
    }

    #[test]
    fn max_rounds_exhaustion_is_not_an_error() {
        let cfg = LockConfig {
            max_rounds: 2,
            ..Default::default()
        };
        let t = run_lock_loop(&cfg).unwrap();
        assert!(!t.converged);
        assert_eq!(t.rounds.len(), 2);
    }
}
