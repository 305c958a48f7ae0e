use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::Config;
use super::csv::{Cell, CsvTable};
use crate::freqlock::run_lock_loop;
use crate::qdyn::{
    apply_pulse, bso_population_signal, evolve_and_reverse, lab_frame_amplitudes, ladder_solve,
    perturbative_amplitudes, FieldDrive, TimeReversalPlan, TwoLevelAmplitudes,
};
use crate::teleport::{eta_expected, phase_distance_mod_pi, run_quadratures};
use crate::Result;

/// Output of one subcommand: named tables plus a small summary for the manifest.
pub struct CommandOutput {
    pub tables: Vec<(String, CsvTable)>,
    pub summary: Value,
}

pub fn bso_scan(config: &Config) -> Result<CommandOutput> {
    let c = &config.bso_scan;
    let half = PI / (2.0 * c.g0);
    let span = c.periods * 2.0 * PI / c.omega;
    let points: Vec<(f64, usize)> = c
        .phases
        .iter()
        .flat_map(|&phi| (0..c.tau_points).map(move |k| (phi, k)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(phi, k)| -> Result<Vec<Cell>> {
            let t0 = span * k as f64 / c.tau_points as f64;
            let tau = t0 + half;
            let drive = FieldDrive::new(c.g0, c.omega, phi)?;
            let full = apply_pulse(
                &TwoLevelAmplitudes::ground(t0),
                &drive,
                half,
                c.switch,
                None,
            )?;
            // time-translated drive: same theta at the end of a pulse started at 0
            let shifted = drive.shifted(c.omega * t0);
            let pert =
                lab_frame_amplitudes(&perturbative_amplitudes(&shifted, half), &shifted, half);
            let closed = bso_population_signal(drive.sigma(), c.omega, phi, tau);
            Ok(vec![
                phi.into(),
                t0.into(),
                tau.into(),
                full.c1.norm_sqr().into(),
                pert.c1.norm_sqr().into(),
                closed.into(),
                full.norm_sqr().into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = CsvTable::new(&[
        "phi",
        "t_start",
        "tau",
        "p1_full",
        "p1_perturbative",
        "p1_closed_form",
        "norm_sqr",
    ]);
    table.rows = rows;
    let sigma = c.g0 / (4.0 * c.omega);
    Ok(CommandOutput {
        tables: vec![("bso-scan.csv".into(), table)],
        summary: json!({ "sigma": sigma, "rows": points.len() }),
    })
}

pub fn ladder(config: &Config) -> Result<CommandOutput> {
    let c = &config.ladder;
    let drive = FieldDrive::new(c.g0, c.omega, c.phase)?;
    let ground = TwoLevelAmplitudes::ground(0.0);
    let full = apply_pulse(&ground, &drive, c.t_end, c.switch, None)?;
    let mut table = CsvTable::new(&[
        "n_max",
        "t_end",
        "p1_ladder",
        "p1_full",
        "amp_error",
        "norm_sqr",
    ]);
    for n in 0..=c.n_max {
        let lab = ladder_solve(&drive, n, c.t_end, &ground, c.switch)?.to_lab();
        let err = ((lab.c1 - full.c1).norm_sqr() + (lab.c3 - full.c3).norm_sqr()).sqrt();
        table.push(vec![
            n.into(),
            c.t_end.into(),
            lab.c1.norm_sqr().into(),
            full.c1.norm_sqr().into(),
            err.into(),
            lab.norm_sqr().into(),
        ]);
    }
    Ok(CommandOutput {
        tables: vec![("ladder.csv".into(), table)],
        summary: json!({ "sigma": drive.sigma() }),
    })
}

pub fn reversal(config: &Config) -> Result<CommandOutput> {
    let c = &config.reversal;
    let plan = TimeReversalPlan::new(c.m, c.omega)?;
    let drive = plan.drive(c.phase);
    plan.check_drive(&drive)?;
    let ground = TwoLevelAmplitudes::ground(0.0);
    let units: Vec<f64> = (0..c.t_points)
        .map(|k| {
            if c.t_points == 1 {
                c.m as f64
            } else {
                c.m as f64 - c.window + 2.0 * c.window * k as f64 / (c.t_points - 1) as f64
            }
        })
        .collect();
    let rows = units
        .par_iter()
        .map(|&u| -> Result<Vec<Cell>> {
            let t = u * PI / c.omega;
            let r = evolve_and_reverse(&plan, &drive, &ground, t)?;
            Ok(vec![
                c.m.into(),
                u.into(),
                t.into(),
                r.fidelity.into(),
                (1.0 - r.fidelity).into(),
                r.final_state.norm_sqr().into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = CsvTable::new(&[
        "m",
        "t_over_pi",
        "forward_t",
        "fidelity",
        "deficit",
        "norm_sqr",
    ]);
    table.rows = rows;
    Ok(CommandOutput {
        tables: vec![("reversal.csv".into(), table)],
        summary: json!({ "sigma": plan.sigma(), "g0": plan.g0 }),
    })
}

pub fn teleport(config: &Config) -> Result<CommandOutput> {
    let c = &config.teleport;
    let protocol = c.protocol(config.master_seed);
    let run = run_quadratures(&protocol, c.quadrature_shift)?;
    let shift = c.quadrature_shift.radians();
    let mut eta = CsvTable::new(&[
        "quadrature",
        "phi_applied",
        "pairs_x",
        "selected_m",
        "bob_success_l",
        "eta",
        "std_err",
        "eta_expected",
    ]);
    for (name, est, phi) in [
        ("sin", &run.sin_quadrature, c.phi),
        ("cos", &run.cos_quadrature, c.phi + shift),
    ] {
        eta.push(vec![
            name.into(),
            phi.into(),
            est.x.into(),
            est.m.into(),
            est.l.into(),
            est.eta.into(),
            est.std_err.into(),
            eta_expected(c.sigma, phi).into(),
        ]);
    }
    let truth = c.phi.rem_euclid(PI);
    let dist = phase_distance_mod_pi(run.phase.phi_hat, c.phi);
    let mut phase = CsvTable::new(&[
        "phi_true_mod_pi",
        "phi_hat",
        "ci_halfwidth",
        "distance_mod_pi",
        "within_ci",
    ]);
    phase.push(vec![
        truth.into(),
        run.phase.phi_hat.into(),
        run.phase.ci_halfwidth.into(),
        dist.into(),
        (dist <= run.phase.ci_halfwidth).into(),
    ]);
    Ok(CommandOutput {
        tables: vec![
            ("teleport.csv".into(), eta),
            ("teleport-phase.csv".into(), phase),
        ],
        summary: json!({
            "eta": run.sin_quadrature.eta,
            "std_err": run.sin_quadrature.std_err,
            "phi_hat": run.phase.phi_hat,
        }),
    })
}

pub fn lock(config: &Config) -> Result<CommandOutput> {
    let lc = config.lock.lock_config(config.master_seed)?;
    let trace = run_lock_loop(&lc)?;
    let mut table = CsvTable::new(&[
        "round",
        "omega_b",
        "delta_omega_hat",
        "subgroup_size",
        "attempts",
        "ambiguous",
        "rel_error_after",
    ]);
    for r in &trace.rounds {
        table.push(vec![
            r.round.into(),
            r.omega_b.into(),
            r.delta_omega_hat.into(),
            r.subgroup_size.into(),
            r.attempts.into(),
            r.ambiguous.into(),
            r.rel_error_after.into(),
        ]);
    }
    Ok(CommandOutput {
        tables: vec![("lock.csv".into(), table)],
        summary: json!({
            "converged": trace.converged,
            "rounds": trace.rounds.len(),
            "final_omega_b": trace.final_omega_b,
            "final_rel_error": trace.final_rel_error,
        }),
    })
}
