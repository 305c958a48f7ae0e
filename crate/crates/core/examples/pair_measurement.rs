//! Singlet, local pi pulses, and Alice's strong-field measurement.
//!
//! When Alice finds `|1>` (the `|+>` outcome), Bob's atom is left in `|->`
//! carrying her field phase, and his `|1>` probability is
//! `(1 + 2 sigma sin 2phi)/2`.

use std::f64::consts::PI;

use bso_lock::pairspace::{
    alice_measurement, apply_local_pi_pulse, bob_success_closed_form, bob_success_probability,
    prepare_singlet, Level, Party,
};
use bso_lock::qdyn::{FieldDrive, TimeReversalPlan};

fn main() -> bso_lock::Result<()> {
    let plan = TimeReversalPlan::new(10, 1.0)?;
    let sigma = plan.sigma();
    for phi in [0.0, PI / 8.0, PI / 4.0, PI / 2.0] {
        let weak_a = FieldDrive::new(0.01, 1.0, phi)?.with_rwa(true);
        let weak_b = FieldDrive::new(0.01, 1.0, 0.0)?.with_rwa(true);
        let pair = apply_local_pi_pulse(&prepare_singlet(0.0), Party::A, &weak_a, 0.0)?;
        let pair = apply_local_pi_pulse(&pair, Party::B, &weak_b, pair.t)?;
        let t_ref = (pair.t / PI).ceil() * PI;
        let pair = pair.evolve_free(1.0, t_ref)?;
        let out = alice_measurement(&pair, &plan, &plan.drive(phi), 0.0)?;
        let bob = out.collapsed.conditional_state(Party::A, Level::L1)?;
        println!(
            "phi = {phi:.4}: P_A = {:.6}, P_B(1) = {:.6}, closed form {:.6}",
            out.probability,
            bob_success_probability(&bob, Level::L1),
            bob_success_closed_form(sigma, phi)
        );
    }
    Ok(())
}
