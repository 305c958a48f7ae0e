//! Harmonic-ladder solution against exact integration for growing truncation.

use bso_lock::qdyn::{apply_pulse, ladder_solve, FieldDrive, PulseSwitch, TwoLevelAmplitudes};

fn main() -> bso_lock::Result<()> {
    let drive = FieldDrive::new(0.2, 1.0, 0.3)?;
    let ground = TwoLevelAmplitudes::ground(0.0);
    let t_end = 25.0;
    let exact = apply_pulse(&ground, &drive, t_end, PulseSwitch::Sudden, None)?;
    println!("sigma = {}", drive.sigma());
    for n in 0..=5 {
        let lab = ladder_solve(&drive, n, t_end, &ground, PulseSwitch::Sudden)?.to_lab();
        let err = ((lab.c1 - exact.c1).norm_sqr() + (lab.c3 - exact.c3).norm_sqr()).sqrt();
        println!(
            "n_max = {n}: amplitude error {err:.3e}, norm {:.12}",
            lab.norm_sqr()
        );
    }
    Ok(())
}
