//! Undoing a strong-field evolution by flipping the field phase.
//!
//! With `g0 = omega/(2m)` the reversal is clean only when the forward time is
//! a multiple of `pi/omega`.

use std::f64::consts::PI;

use bso_lock::qdyn::{evolve_and_reverse, TimeReversalPlan, TwoLevelAmplitudes};

fn main() -> bso_lock::Result<()> {
    for m in [2, 5, 10, 20] {
        let plan = TimeReversalPlan::new(m, 1.0)?;
        let drive = plan.drive(0.0);
        let ground = TwoLevelAmplitudes::ground(0.0);
        let good = evolve_and_reverse(&plan, &drive, &ground, plan.duration)?;
        let off = evolve_and_reverse(&plan, &drive, &ground, (m as f64 + 0.25) * PI)?;
        println!(
            "m = {m:>2}: deficit at m pi {:.3e}, at (m + 1/4) pi {:.3e}, ratio {:.2}",
            1.0 - good.fidelity,
            1.0 - off.fidelity,
            (1.0 - off.fidelity) / (1.0 - good.fidelity)
        );
    }
    Ok(())
}
