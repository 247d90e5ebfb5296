//! Simulates one receptor population, estimates every ligand concentration
//! and compares against the closed-form estimator moments.

use adm::channel::{received_concentrations, SymbolVector};
use adm::estimation::{concentration_moments, estimate_detailed};
use adm::montecarlo::sample_observation;
use adm::rng::StreamKey;
use adm::SystemConfig;

fn main() -> adm::Result<()> {
    let system = SystemConfig::default().build()?;
    let symbols = SymbolVector::new(vec![1, 0, 1, 1, 0])?;
    let c = received_concentrations(&symbols, &system.channel)?;

    let mut rng = StreamKey::new(2024).trial(0);
    let obs = sample_observation(&c, &system.panel, system.receptors(), &mut rng)?;
    let est = estimate_detailed(&obs, &system.panel, &system.sep)?;
    let closed = concentration_moments(&c, &system.panel, &system.sep, system.receptors())?;

    println!("interval counts: {:?}", obs.interval_counts());
    println!("c_tot: true {:.4e}  estimate {:.4e}", c.iter().sum::<f64>(), est.total);
    println!("{:>3} {:>12} {:>12} {:>12}", "i", "true", "estimate", "std dev");
    for i in 0..c.len() {
        println!(
            "{:>3} {:>12.4e} {:>12.4e} {:>12.4e}",
            i + 1,
            c[i],
            est.concentrations[i],
            closed.variance[i].sqrt()
        );
    }
    Ok(())
}
