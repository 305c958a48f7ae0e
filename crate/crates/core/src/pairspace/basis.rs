use std::f64::consts::FRAC_1_SQRT_2;

use super::{PairState, Party};
use crate::linalg::{cis, normalized, Vec3, C64, I, ZERO};
use crate::qdyn::FieldDrive;

/// The `|+>`, `|->` pair reached from `|1>` by pi/2 and 3pi/2 pulses of a
/// strong non-RWA field, written to first order in `sigma`:
///
/// ```text
/// |+> = [(1 - 2 sigma S) |1> + i e^{-i theta} (1 + 2 sigma S*) |3>] / sqrt(2)
/// |-> = [(1 + 2 sigma S) |1> - i e^{-i theta} (1 - 2 sigma S*) |3>] / sqrt(2)
/// ```
///
/// with `theta = omega t_ref + phase` and `S = (i/2) exp(-i(2 omega t_ref + 2 sigma_phase))`.
/// The vectors are stored unnormalised, exactly as written.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlusMinusBasis {
    pub party: Party,
    pub drive: FieldDrive,
    pub t_ref: f64,
    /// Phase entering `S`; equal to the drive phase unless overridden.
    pub sigma_phase: f64,
    pub sigma_factor: C64,
    pub plus: Vec3,
    pub minus: Vec3,
}

impl PlusMinusBasis {
    /// Rebuilds the basis with `S` taken from another field's phase.
    ///
    /// Bob's states that pair with Alice's in the singlet carry Alice's `S`:
    /// the teleported phase lives in that factor.
    pub fn with_sigma_phase(&self, sigma_phase: f64) -> Self {
        build(self.party, self.drive, self.t_ref, sigma_phase)
    }

    pub fn plus_normalized(&self) -> Vec3 {
        normalized(&self.plus).expect("basis vectors are nonzero")
    }

    pub fn minus_normalized(&self) -> Vec3 {
        normalized(&self.minus).expect("basis vectors are nonzero")
    }
}

fn build(party: Party, drive: FieldDrive, t_ref: f64, sigma_phase: f64) -> PlusMinusBasis {
    let sigma = if drive.rwa() { 0.0 } else { drive.sigma() };
    let s = 0.5 * I * cis(-(2.0 * drive.omega() * t_ref + 2.0 * sigma_phase));
    let e = I * cis(-drive.theta(t_ref));
    let b = 2.0 * sigma * s;
    let r = FRAC_1_SQRT_2;
    let plus = [r * (1.0 - b), ZERO, r * e * (1.0 + b.conj())];
    let minus = [r * (1.0 + b), ZERO, -r * e * (1.0 - b.conj())];
    PlusMinusBasis {
        party,
        drive,
        t_ref,
        sigma_phase,
        sigma_factor: s,
        plus,
        minus,
    }
}

/// Basis for `party` built from `drive` with `S` evaluated at `t_ref`.
pub fn plus_minus_basis(party: Party, drive: &FieldDrive, t_ref: f64) -> PlusMinusBasis {
    build(party, *drive, t_ref, drive.phase())
}

/// Distance between `pair` and `[|+>_A|->_B - |->_A|+>_B]/sqrt(2)` on the
/// `{1,3} x {1,3}` block, minimised over a global phase.
pub fn rebasis_singlet_check(
    pair: &PairState,
    basis_a: &PlusMinusBasis,
    basis_b: &PlusMinusBasis,
) -> f64 {
    let idx = [0usize, 2];
    let mut cells = [(ZERO, ZERO); 4];
    let mut tp = ZERO;
    for (k, (a, b)) in idx
        .iter()
        .flat_map(|&a| idx.iter().map(move |&b| (a, b)))
        .enumerate()
    {
        let target = FRAC_1_SQRT_2
            * (basis_a.plus[a] * basis_b.minus[b] - basis_a.minus[a] * basis_b.plus[b]);
        let p = pair.amps[a][b];
        tp += target.conj() * p;
        cells[k] = (p, target);
    }
    // best global phase aligns the target with the pair
    let rot = if tp.norm() > 0.0 {
        tp / tp.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    cells
        .iter()
        .map(|(p, t)| (p - rot * t).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, norm_sqr};
    use crate::pairspace::pulsed_pair_state;
    use crate::qdyn::{propagate_full, switch_on, TwoLevelAmplitudes};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn strong(sigma: f64, phase: f64) -> FieldDrive {
        FieldDrive::new(4.0 * sigma, 1.0, phase).unwrap()
    }

    #[test]
    fn zero_sigma_form() {
        let d = strong(0.0125, 0.6).with_rwa(true);
        let t = 2.3;
        let b = plus_minus_basis(Party::A, &d, t);
        let e = I * cis(-(t + 0.6));
        let r = FRAC_1_SQRT_2;
        assert!((b.plus[0] - r).norm() < 1e-15 && (b.plus[2] - r * e).norm() < 1e-15);
        assert!((b.minus[0] - r).norm() < 1e-15 && (b.minus[2] + r * e).norm() < 1e-15);
    }

    #[test]
    fn nearly_orthonormal() {
        let d = strong(0.0125, 0.6);
        let s = d.sigma();
        for k in 0..16 {
            let b = plus_minus_basis(Party::A, &d, k as f64 * 0.37);
            assert!(inner(&b.plus, &b.minus).norm() < 2.0 * s * s);
            assert!((norm_sqr(&b.plus) - 1.0).abs() < 2.0 * s * s);
            assert!((norm_sqr(&b.minus) - 1.0).abs() < 2.0 * s * s);
        }
    }

    #[test]
    fn plus_is_the_half_pulse_image_of_ground() {
        // pi/2 pulse ending at t_ref, started from the dressed ground state
        for &phi in &[0.0, 0.5, 2.0] {
            let d = strong(0.0125, phi);
            let s = d.sigma();
            let t_ref = PI / (2.0 * d.g0());
            let start = switch_on(&TwoLevelAmplitudes::ground(0.0), &d);
            let out = propagate_full(&start, &d, t_ref, None).unwrap();
            let b = plus_minus_basis(Party::A, &d, t_ref);
            let f = crate::linalg::fidelity(&[out.c1, out.c3], &[b.plus[0], b.plus[2]]);
            assert!(1.0 - f < 4.0 * s * s, "phi={phi} deficit={}", 1.0 - f);
        }
    }

    fn rebasis_residual(sigma: f64, phi: f64, chi: f64, t: f64) -> f64 {
        let pair = pulsed_pair_state(t, 1.0, phi, chi);
        let a = plus_minus_basis(Party::A, &strong(sigma, phi), t);
        let b = plus_minus_basis(Party::B, &strong(sigma, chi), t).with_sigma_phase(phi);
        rebasis_singlet_check(&pair, &a, &b)
    }

    #[test]
    fn rebasis_exact_at_zero_sigma() {
        assert!(rebasis_residual(0.0, 0.4, 1.9, 3.0) < 1e-12);
    }

    #[test]
    fn rebasis_second_order() {
        for &sigma in &[0.005, 0.0125, 0.025] {
            for &(phi, chi) in &[(0.0, 0.0), (0.4, 1.9), (2.2, -0.7)] {
                let r = rebasis_residual(sigma, phi, chi, 0.0);
                assert!(r < 4.0 * sigma * sigma, "sigma={sigma} r={r}");
            }
        }
    }

    #[test]
    fn own_phase_bob_basis_is_only_first_order() {
        let sigma = 0.0125;
        let (phi, chi) = (0.4, 1.9);
        let pair = pulsed_pair_state(0.0, 1.0, phi, chi);
        let a = plus_minus_basis(Party::A, &strong(sigma, phi), 0.0);
        let b = plus_minus_basis(Party::B, &strong(sigma, chi), 0.0);
        assert!(rebasis_singlet_check(&pair, &a, &b) > 10.0 * sigma * sigma);
    }

    proptest! {
        #[test]
        fn rebasis_blind_to_global_phase(g in -3.2..3.2f64, phi in -3.0..3.0f64, chi in -3.0..3.0f64) {
            let sigma = 0.0125;
            let mut pair = pulsed_pair_state(0.0, 1.0, phi, chi);
            let a = plus_minus_basis(Party::A, &strong(sigma, phi), 0.0);
            let b = plus_minus_basis(Party::B, &strong(sigma, chi), 0.0).with_sigma_phase(phi);
            let r0 = rebasis_singlet_check(&pair, &a, &b);
            for z in pair.amps.iter_mut().flatten() { *z *= cis(g); }
            let r1 = rebasis_singlet_check(&pair, &a, &b);
            prop_assert!((r0 - r1).abs() < 1e-12);
        }

        #[test]
        fn basis_completeness(re1 in -1.0..1.0f64, im1 in -1.0..1.0f64, re2 in -1.0..1.0f64,
                              re3 in -1.0..1.0f64, im3 in -1.0..1.0f64, t in 0.0..10.0f64) {
            let psi: Vec3 = [C64::new(re1, im1), C64::new(re2, 0.0), C64::new(re3, im3)];
            let n = norm_sqr(&psi);
            prop_assume!(n > 1e-3);
            let psi = psi.map(|z| z / n.sqrt());
            let d = strong(0.0125, 0.8);
            let s = d.sigma();
            let b = plus_minus_basis(Party::A, &d, t);
            let lhs = inner(&b.plus, &psi).norm_sqr() + inner(&b.minus, &psi).norm_sqr();
            let p13 = psi[0].norm_sqr() + psi[2].norm_sqr();
            prop_assert!((lhs - p13).abs() < 4.0 * s * s);
        }
    }
}
