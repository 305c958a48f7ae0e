//! Phase teleportation over an ensemble of entangled pairs.
//!
//! Each pair goes singlet -> pi pulses -> Alice's `|+>` measurement. Bob
//! reads level 1 only on the pairs Alice reports as successes, and the
//! excess of his success rate over one half estimates `sigma sin(2 phi)`.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::wrap;
use crate::pairspace::{
    alice_measurement, apply_local_pi_pulse, bob_success_closed_form, bob_success_probability,
    prepare_singlet, Level, Party,
};
use crate::qdyn::{FieldDrive, TimeReversalPlan};
use crate::rng::StreamKey;

/// Upper limit on sigma for protocol runs.
pub const SIGMA_MAX: f64 = 1.0 / 16.0;

/// Rabi frequency of the attenuated pi-pulse fields, relative to omega.
const WEAK_G0_RATIO: f64 = 0.01;

/// Multiplier on the first-order standard error used for the phase interval.
pub const CI_Z: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Born probabilities from the closed-form expressions.
    #[default]
    ClosedForm,
    /// Born probabilities from simulating the pulses and Alice's measurement.
    Physical,
}

/// Shift of Alice's phase for the second quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureShift {
    /// `sin(2(phi + pi/4)) = cos(2 phi)`.
    #[default]
    QuarterPi,
    /// Shift by pi/2, which gives `-sin(2 phi)` rather than `cos(2 phi)`.
    HalfPi,
}

impl QuadratureShift {
    pub fn radians(self) -> f64 {
        match self {
            QuadratureShift::QuarterPi => PI / 4.0,
            QuadratureShift::HalfPi => PI / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub pairs_x: u64,
    pub sigma: f64,
    pub phi: f64,
    pub chi: f64,
    pub omega: f64,
    pub m: u32,
    pub mode: Mode,
    pub master_seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            pairs_x: 100_000,
            sigma: 0.0125,
            phi: PI / 4.0,
            chi: 0.0,
            omega: 1.0,
            m: 10,
            mode: Mode::ClosedForm,
            master_seed: 1,
        }
    }
}

impl ProtocolConfig {
    /// `phi - chi`; informational only, the protocol cannot measure it.
    pub fn clock_phase_difference(&self) -> f64 {
        self.phi - self.chi
    }

    pub fn validate(&self) -> Result<()> {
        if self.pairs_x == 0 {
            return Err(Error::param("pairs_x", "must be at least 1"));
        }
        if !(self.sigma.is_finite() && (0.0..SIGMA_MAX).contains(&self.sigma)) {
            return Err(Error::param(
                "sigma",
                format!(
                    "must satisfy 0 <= sigma < 1/16 (perturbative bound), got {}",
                    self.sigma
                ),
            ));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::param(
                "omega",
                format!("must be > 0, got {}", self.omega),
            ));
        }
        if !(self.phi.is_finite() && self.chi.is_finite()) {
            return Err(Error::NonFinite("phi or chi"));
        }
        if self.m == 0 {
            return Err(Error::param("m", "must be a positive integer"));
        }
        if self.mode == Mode::Physical {
            let expected = 1.0 / (8.0 * self.m as f64);
            if (self.sigma - expected).abs() > 1e-12 * expected {
                return Err(Error::param(
                    "sigma",
                    format!(
                        "physical mode needs sigma = g0/(4 omega) = 1/(8m) = {expected} for m = {}, got {}",
                        self.m, self.sigma
                    ),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub alice_selected: bool,
    /// `None` when Alice's pair was not post-selected.
    pub bob_success: Option<bool>,
}

/// Counts and the `eta = L/M - 1/2` estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaEstimate {
    pub x: u64,
    pub m: u64,
    pub l: u64,
    pub eta: f64,
    pub std_err: f64,
}

impl EtaEstimate {
    pub fn from_counts(x: u64, m: u64, l: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyPostSelection);
        }
        let p = l as f64 / m as f64;
        Ok(Self {
            x,
            m,
            l,
            eta: p - 0.5,
            std_err: (p * (1.0 - p) / m as f64).sqrt(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimate {
    pub sin2phi_hat: f64,
    pub cos2phi_hat: f64,
    /// In `[0, pi)`.
    pub phi_hat: f64,
    pub ci_halfwidth: f64,
}

/// A configured protocol with its per-pair Born probabilities resolved.
#[derive(Debug, Clone)]
pub struct Protocol {
    pub config: ProtocolConfig,
    pub p_alice: f64,
    pub p_bob: f64,
    key: StreamKey,
}

impl Protocol {
    pub fn new(config: ProtocolConfig) -> Result<Self> {
        Self::with_label(config, "teleport")
    }

    /// Like [`Protocol::new`] but drawing from the substream family `label`.
    pub fn with_label(config: ProtocolConfig, label: &str) -> Result<Self> {
        config.validate()?;
        let (p_alice, p_bob) = match config.mode {
            Mode::ClosedForm => (0.5, bob_success_closed_form(config.sigma, config.phi)),
            Mode::Physical => physical_probabilities(&config)?,
        };
        Ok(Self {
            config,
            p_alice,
            p_bob,
            key: StreamKey::new(config.master_seed, label),
        })
    }

    #[inline]
    fn trial_unchecked(&self, index: u64) -> TrialOutcome {
        let mut rng = self.key.stream(index);
        let a: f64 = rng.random();
        if a < self.p_alice {
            let b: f64 = rng.random();
            TrialOutcome {
                alice_selected: true,
                bob_success: Some(b < self.p_bob),
            }
        } else {
            TrialOutcome {
                alice_selected: false,
                bob_success: None,
            }
        }
    }

    pub fn run_trial(&self, index: u64) -> Result<TrialOutcome> {
        if index >= self.config.pairs_x {
            return Err(Error::param(
                "pair_index",
                format!("{index} is out of range for {} pairs", self.config.pairs_x),
            ));
        }
        Ok(self.trial_unchecked(index))
    }

    pub fn run_ensemble(&self) -> Result<EtaEstimate> {
        const CHUNK: u64 = 1 << 14;
        let x = self.config.pairs_x;
        let chunks = x.div_ceil(CHUNK);
        let (m, l) = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let (mut m, mut l) = (0u64, 0u64);
                for i in c * CHUNK..((c + 1) * CHUNK).min(x) {
                    let o = self.trial_unchecked(i);
                    m += o.alice_selected as u64;
                    l += (o.bob_success == Some(true)) as u64;
                }
                (m, l)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        EtaEstimate::from_counts(x, m, l)
    }
}

/// Simulates one pair through the pulse sequence and Alice's measurement.
///
/// The pi pulses use attenuated RWA fields; Alice measures starting at the
/// first `t_ref` after the pulses with `omega t_ref = 0 (mod pi)`.
fn physical_probabilities(config: &ProtocolConfig) -> Result<(f64, f64)> {
    let omega = config.omega;
    let weak = WEAK_G0_RATIO * omega;
    let da = FieldDrive::new(weak, omega, config.phi)?.with_rwa(true);
    let db = FieldDrive::new(weak, omega, config.chi)?.with_rwa(true);
    let pair = apply_local_pi_pulse(&prepare_singlet(0.0), Party::A, &da, 0.0)?;
    let pair = apply_local_pi_pulse(&pair, Party::B, &db, pair.t)?;
    let step = PI / omega;
    let t_ref = (pair.t / step).ceil() * step;
    let pair = pair.evolve_free(omega, t_ref)?;
    let plan = TimeReversalPlan::new(config.m, omega)?;
    let outcome = alice_measurement(&pair, &plan, &plan.drive(config.phi), 0.0)?;
    let bob = outcome.collapsed.conditional_state(Party::A, Level::L1)?;
    Ok((
        outcome.probability,
        bob_success_probability(&bob, Level::L1),
    ))
}

/// One trial; builds the protocol each call, so prefer [`Protocol::run_trial`] in loops.
pub fn run_trial(config: &ProtocolConfig, pair_index: u64) -> Result<TrialOutcome> {
    Protocol::new(*config)?.run_trial(pair_index)
}

pub fn run_ensemble(config: &ProtocolConfig) -> Result<EtaEstimate> {
    Protocol::new(*config)?.run_ensemble()
}

/// `sigma sin(2 phi)`.
pub fn eta_expected(sigma: f64, phi: f64) -> f64 {
    sigma * (2.0 * phi).sin()
}

/// Recovers `phi mod pi` from the sine and cosine quadratures.
pub fn recover_phase(
    est_sin: &EtaEstimate,
    est_cos: &EtaEstimate,
    sigma: f64,
) -> Result<PhaseEstimate> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param(
            "sigma",
            format!("must be > 0 to scale quadratures, got {sigma}"),
        ));
    }
    if est_sin.eta.abs() < est_sin.std_err && est_cos.eta.abs() < est_cos.std_err {
        return Err(Error::PhaseIndeterminate);
    }
    let s = est_sin.eta / sigma;
    let c = est_cos.eta / sigma;
    let (se_s, se_c) = (est_sin.std_err / sigma, est_cos.std_err / sigma);
    let r2 = s * s + c * c;
    let phi_hat = wrap(0.5 * s.atan2(c), PI);
    let sd = 0.5 * (c * c * se_s * se_s + s * s * se_c * se_c).sqrt() / r2;
    Ok(PhaseEstimate {
        sin2phi_hat: s,
        cos2phi_hat: c,
        phi_hat,
        ci_halfwidth: CI_Z * sd,
    })
}

/// Both quadrature ensembles and the recovered phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRun {
    pub sin_quadrature: EtaEstimate,
    pub cos_quadrature: EtaEstimate,
    pub phase: PhaseEstimate,
}

/// Runs the ensemble at `phi` and at `phi + shift` on independent substreams.
pub fn run_quadratures(config: &ProtocolConfig, shift: QuadratureShift) -> Result<QuadratureRun> {
    let sin_quadrature = Protocol::with_label(*config, "teleport")?.run_ensemble()?;
    let shifted = ProtocolConfig {
        phi: config.phi + shift.radians(),
        ..*config
    };
    let cos_quadrature = Protocol::with_label(shifted, "teleport-quadrature")?.run_ensemble()?;
    let phase = recover_phase(&sin_quadrature, &cos_quadrature, config.sigma)?;
    Ok(QuadratureRun {
        sin_quadrature,
        cos_quadrature,
        phase,
    })
}

/// Distance between two angles modulo `pi`.
pub fn phase_distance_mod_pi(a: f64, b: f64) -> f64 {
    let d = wrap(a - b, PI);
    d.min(PI - d)
}
