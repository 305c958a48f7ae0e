//! Reads the phase of a strong field from the |1> population after a pi/2 pulse.
//!
//! The population carries a term of size `sigma` oscillating at `2 omega` in
//! the pulse end time. Run with `cargo run --example bso_signal`.

use std::f64::consts::PI;

use bso_lock::qdyn::{
    apply_pulse, bloch_siegert_shift, bso_population_signal, FieldDrive, PulseSwitch,
    TwoLevelAmplitudes,
};

fn main() -> bso_lock::Result<()> {
    let (g0, omega, phi) = (0.05, 1.0, PI / 8.0);
    let drive = FieldDrive::new(g0, omega, phi)?;
    let sigma = drive.sigma();
    let half = PI / (2.0 * g0);
    println!(
        "sigma = {sigma}, Bloch-Siegert shift = {:.3e}",
        bloch_siegert_shift(g0, omega)?
    );
    println!(
        "{:>8} {:>12} {:>12} {:>12}",
        "tau", "p1 exact", "formula", "1-formula"
    );
    for k in 0..16 {
        let t0 = k as f64 * PI / 16.0;
        let out = apply_pulse(
            &TwoLevelAmplitudes::ground(t0),
            &drive,
            half,
            PulseSwitch::Adiabatic,
            None,
        )?;
        let f = bso_population_signal(sigma, omega, phi, t0 + half);
        println!(
            "{:>8.4} {:>12.6} {:>12.6} {:>12.6}",
            t0 + half,
            out.c1.norm_sqr(),
            f,
            1.0 - f
        );
    }
    // the exact population follows 1 - formula; the modulation depth is 2 sigma either way
    Ok(())
}
