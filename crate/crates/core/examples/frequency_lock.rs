//! Locking Bob's clock to Alice's through an entangled atom array.

use bso_lock::freqlock::{run_lock_loop, AtomArray, ClockModel, LockConfig};

fn report(label: &str, config: &LockConfig) -> bso_lock::Result<()> {
    let trace = run_lock_loop(config)?;
    println!("{label}");
    for r in &trace.rounds {
        println!(
            "  round {:>2}: omega_B - omega_A = {:+.3e}, estimate {:+.3e}, subgroup {}",
            r.round,
            r.omega_b - config.clock_a.omega,
            r.delta_omega_hat,
            r.subgroup_size
        );
    }
    println!(
        "  converged = {}, final relative error {:.2e}",
        trace.converged, trace.final_rel_error
    );
    Ok(())
}

fn main() -> bso_lock::Result<()> {
    let exact = LockConfig::default();
    report("exact probabilities, 16 atoms", &exact)?;
    report(
        "exact probabilities, 2 atoms",
        &LockConfig {
            array: AtomArray::uniform(2)?,
            ..exact.clone()
        },
    )?;
    // finite statistics: each scan point is a binomial count
    report(
        "1e8 trials per scan point, 16 atoms",
        &LockConfig {
            trials_per_point: 100_000_000,
            clock_b: ClockModel {
                omega: 1.0 + 1e-3,
                phase_offset: 0.0,
            },
            rel_tol: 1e-4,
            ..exact
        },
    )?;
    Ok(())
}
