//! Round-trips a system description through TOML and analyses it.

use adm::SystemConfig;

const SYSTEM: &str = r#"
receptors = 600
channels = 4
gamma = 4.0
variance_mode = "full"
"#;

fn main() -> adm::Result<()> {
    let cfg = SystemConfig::from_toml_str(SYSTEM)?;
    print!("{}", cfg.to_toml_string());
    let system = cfg.build()?;
    println!("cond(S) = {:.3e}", system.sep.condition_number());
    println!("mean BEP = {:.4e}", system.mean_bep(cfg.variance_mode)?.mean_bep);
    Ok(())
}
