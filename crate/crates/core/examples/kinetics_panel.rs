//! Builds a ligand panel and prints its separation matrix, inverse and
//! condition number for a few similarity factors.

use adm::kinetics::{build_panel, separation_matrix};
use nalgebra::DMatrix;

fn show(name: &str, m: &DMatrix<f64>) {
    println!("  {name}:");
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>11.3e}")).collect();
        println!("    {}", cells.join(" "));
    }
}

fn main() -> adm::Result<()> {
    for gamma in [2.0, 5.0, 10.0] {
        let panel = build_panel(4, 0.1, 10.0, gamma, 3.0)?;
        let sep = separation_matrix(&panel)?;
        println!("gamma = {gamma}, cond(S) = {:.3e}", sep.condition_number());
        println!("  k_off      = {:?}", panel.k_off());
        println!("  thresholds = {:?}", sep.thresholds());
        show("S", sep.s());
        show("W", sep.w());
    }
    Ok(())
}
