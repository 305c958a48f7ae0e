//! Harmonic (Floquet) ladder expansion of the rotating-frame state.
//!
//! The rotating-frame amplitudes are expanded as
//! `C~1 = sum_n a_n beta^n`, `C~3 = sum_n b_n beta^n` with
//! `beta = exp(-i(2 omega t + 2 phase))`, giving
//!
//! ```text
//! da_n/dt = 2 i n omega a_n + i (g0/2) (b_n + b_{n-1})
//! db_n/dt = 2 i n omega b_n + i (g0/2) (a_n + a_{n+1})
//! ```
//!
//! The generator is `i K` with `K` real symmetric, so the truncated system is
//! solved exactly by diagonalising `K` once.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{rotating_transform, FieldDrive, PulseSwitch, TwoLevelAmplitudes};
use crate::error::{Error, Result};
use crate::linalg::{cis, Vec2, C64, ZERO};

/// Truncated ladder amplitudes at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicLadderState {
    pub n_max: usize,
    /// `(a_n, b_n)` for `n = -n_max ..= n_max`, stored at index `n + n_max`.
    pub coeffs: Vec<(C64, C64)>,
    /// `2 omega t + 2 phase`; `beta = exp(-i beta_phase)`.
    pub beta_phase: f64,
    pub t: f64,
}

impl HarmonicLadderState {
    pub fn coeff(&self, n: i64) -> Option<(C64, C64)> {
        let idx = n + self.n_max as i64;
        if idx < 0 {
            return None;
        }
        self.coeffs.get(idx as usize).copied()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .sum()
    }

    /// Rotating-frame amplitudes `sum_n (a_n, b_n) beta^n`.
    pub fn reconstruct_rotating(&self) -> Vec2 {
        let mut out = [ZERO; 2];
        for (k, (a, b)) in self.coeffs.iter().enumerate() {
            let n = k as f64 - self.n_max as f64;
            let p = cis(-n * self.beta_phase);
            out[0] += a * p;
            out[1] += b * p;
        }
        out
    }

    /// Lab-frame amplitudes.
    pub fn to_lab(&self) -> TwoLevelAmplitudes {
        let y = self.reconstruct_rotating();
        // Q^dagger with theta = beta_phase / 2
        let theta = 0.5 * self.beta_phase;
        TwoLevelAmplitudes::new(y[0], y[1] * cis(-theta), self.t)
    }
}

fn generator(drive: &FieldDrive, n_max: usize) -> DMatrix<f64> {
    let n = 2 * n_max + 1;
    let dim = 2 * n;
    let half = 0.5 * drive.g0();
    let detuning = drive.epsilon() - drive.omega();
    let mut k = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..n {
        let order = i as f64 - n_max as f64;
        let (a, b) = (i, n + i);
        k[(a, a)] = 2.0 * order * drive.omega();
        k[(b, b)] = 2.0 * order * drive.omega() - detuning;
        k[(a, b)] = half;
        k[(b, a)] = half;
        // a_n couples to b_{n-1} through the counter-rotating term
        if i > 0 && !drive.rwa() {
            let bm = n + i - 1;
            k[(a, bm)] = half;
            k[(bm, a)] = half;
        }
    }
    k
}

/// Initial ladder vector for a lab-frame state at `initial.t`.
///
/// With `Adiabatic` switching and `n_max >= 1` the state is placed in the
/// field-dressed levels: `a_0 = c C~1`, `b_0 = c C~3`, `a_1 = -s C~3`,
/// `b_{-1} = s C~1`, where `c, s` are the normalised `1, sigma`.
fn initial_vector(
    drive: &FieldDrive,
    n_max: usize,
    initial: &TwoLevelAmplitudes,
    switch: PulseSwitch,
) -> Vec<C64> {
    let n = 2 * n_max + 1;
    let mut x = vec![ZERO; 2 * n];
    let rot = rotating_transform(initial, drive, false);
    let dress = switch == PulseSwitch::Adiabatic && n_max >= 1 && !drive.rwa();
    if dress {
        let sigma = drive.sigma();
        let norm = (1.0 + sigma * sigma).sqrt();
        let (c, s) = (1.0 / norm, sigma / norm);
        x[n_max] = c * rot.c1;
        x[n + n_max] = c * rot.c3;
        x[n_max + 1] = -s * rot.c3;
        x[n + n_max - 1] = s * rot.c1;
    } else {
        x[n_max] = rot.c1;
        x[n + n_max] = rot.c3;
    }
    x
}

/// Solves the ladder truncated at `|n| <= n_max` from `initial` to `t_end`.
pub fn ladder_solve(
    drive: &FieldDrive,
    n_max: i64,
    t_end: f64,
    initial: &TwoLevelAmplitudes,
    switch: PulseSwitch,
) -> Result<HarmonicLadderState> {
    if n_max < 0 {
        return Err(Error::InvalidTruncation(n_max));
    }
    if !initial.is_finite() || !t_end.is_finite() {
        return Err(Error::NonFinite("state or target time"));
    }
    if t_end < initial.t {
        return Err(Error::TimeOrder {
            t_start: initial.t,
            t_end,
        });
    }
    let n_max = n_max as usize;
    let x0 = initial_vector(drive, n_max, initial, switch);
    let eig = SymmetricEigen::new(generator(drive, n_max));
    let dt = t_end - initial.t;
    let v = &eig.eigenvectors;
    // x(t) = V exp(i L dt) V^T x0, done separately on real and imaginary parts
    let re = DVector::from_iterator(x0.len(), x0.iter().map(|z| z.re));
    let im = DVector::from_iterator(x0.len(), x0.iter().map(|z| z.im));
    let pr = v.transpose() * re;
    let pi = v.transpose() * im;
    let mut yr = DVector::zeros(x0.len());
    let mut yi = DVector::zeros(x0.len());
    for k in 0..x0.len() {
        let z = C64::new(pr[k], pi[k]) * cis(eig.eigenvalues[k] * dt);
        yr[k] = z.re;
        yi[k] = z.im;
    }
    let xr = v * yr;
    let xi = v * yi;
    let n = 2 * n_max + 1;
    let coeffs = (0..n)
        .map(|i| (C64::new(xr[i], xi[i]), C64::new(xr[n + i], xi[n + i])))
        .collect();
    Ok(HarmonicLadderState {
        n_max,
        coeffs,
        beta_phase: 2.0 * drive.theta(t_end),
        t: t_end,
    })
}
