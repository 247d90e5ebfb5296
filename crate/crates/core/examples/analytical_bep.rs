//! Per-channel ML thresholds and bit error probabilities at the default
//! operating point, in both variance modes.

use adm::{SystemConfig, VarianceMode};

fn main() -> adm::Result<()> {
    let system = SystemConfig::default().build()?;
    for mode in [VarianceMode::Paper, VarianceMode::Full] {
        let report = system.mean_bep(mode)?;
        println!("{mode} mode, mean BEP {:.4e}", report.mean_bep);
        for (i, d) in report.channels.iter().enumerate() {
            println!(
                "  ch{} mu0 {:.3e} mu1 {:.3e} lambda {:.3e} BEP {:.3e}",
                i + 1,
                d.moments0.mean,
                d.moments1.mean,
                d.threshold,
                d.bep
            );
        }
    }
    Ok(())
}
