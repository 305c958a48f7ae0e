//! Recovering Alice's field phase (mod pi) from Bob's statistics.

use std::f64::consts::PI;

use bso_lock::teleport::{
    eta_expected, phase_distance_mod_pi, run_quadratures, ProtocolConfig, QuadratureShift,
};

fn main() -> bso_lock::Result<()> {
    let config = ProtocolConfig {
        pairs_x: 1_000_000,
        phi: 0.4,
        ..Default::default()
    };
    let run = run_quadratures(&config, QuadratureShift::QuarterPi)?;
    let s = &run.sin_quadrature;
    println!(
        "X = {}, M = {}, L = {}, eta = {:.5} +- {:.5} (expected {:.5})",
        s.x,
        s.m,
        s.l,
        s.eta,
        s.std_err,
        eta_expected(config.sigma, config.phi)
    );
    let c = &run.cos_quadrature;
    println!("second quadrature eta = {:.5} +- {:.5}", c.eta, c.std_err);
    let p = &run.phase;
    println!(
        "phi_hat = {:.4} +- {:.4} (true {:.4} mod pi, off by {:.4})",
        p.phi_hat,
        p.ci_halfwidth,
        config.phi.rem_euclid(PI),
        phase_distance_mod_pi(p.phi_hat, config.phi)
    );
    Ok(())
}
