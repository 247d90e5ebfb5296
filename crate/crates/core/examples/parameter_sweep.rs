//! Sweeps the similarity factor, with Monte Carlo overlay, and writes a CSV
//! table and SVG plot to the system temp directory.

use adm::sweep::{emit_csv, emit_plot, run_sweep, Axis, SweepSpec};
use adm::SystemConfig;

fn main() -> adm::Result<()> {
    let base = SystemConfig {
        receptors: 300,
        ..Default::default()
    };
    let spec = SweepSpec::new(base, Axis::Similarity, vec![2.0, 3.0, 4.0, 5.0, 6.0]).with_montecarlo(20_000, 5);
    let result = run_sweep(&spec)?;
    for row in &result.rows {
        let mc = row.montecarlo.expect("overlay requested");
        println!(
            "gamma {:>4}: analytical {:.3e}  simulated {:.3e} +/- {:.1e}",
            row.value, row.mean_bep, mc.mean_bep, mc.half_width
        );
    }
    let dir = std::env::temp_dir();
    emit_csv(&result, base.channels, dir.join("adm_gamma.csv"))?;
    emit_plot(&result, dir.join("adm_gamma.svg"))?;
    println!("wrote {}", dir.join("adm_gamma.{csv,svg}").display());
    Ok(())
}
