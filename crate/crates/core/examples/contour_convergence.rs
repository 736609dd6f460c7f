//! Pole and residue eigenvalue versus the number of contour nodes, for the
//! isolated rod (fast) or, with `crystal`, the defect crystal on a circle.

use num_complex::Complex64;
use resonance_poles::cli::convergence_sweep;
use resonance_poles::geometry::{build_crystal, Cylinder, CrystalSpec, Polarization};
use resonance_poles::poles::{Contour, CrystalOperator, ExtractOptions, MullerOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let crystal = std::env::args().nth(1).as_deref() == Some("crystal");
    let (cylinders, contour, nodes) = if crystal {
        let c = build_crystal(&CrystalSpec::defect_7x7(0.25))?;
        (c, Contour::circle(Complex64::new(2.35, -0.02), 0.06, 60), vec![10, 20, 30, 45, 60])
    } else {
        let rod = Cylinder::new([0.0, 0.0], 0.3, Complex64::new(9.0, 0.0), Complex64::new(1.0, 0.0));
        (vec![rod], Contour::circle(Complex64::new(4.39, -0.4), 0.2, 64), vec![4, 6, 8, 12, 16, 24, 32, 48, 64])
    };
    let op = CrystalOperator::for_contour(cylinders, Polarization::EParallel, &contour);
    let sweep = convergence_sweep(
        &op,
        &contour,
        &nodes,
        &ExtractOptions::default(),
        &MullerOptions::default(),
        None,
        &[],
    )?;
    println!("reference k_p = {:.14}", sweep.reference.k_p);
    println!("{:>4} {:>12} {:>12} {:>10}", "N", "|k_N - k|", "|λ_N - λ|", "consist.");
    for (r, p) in sweep.records.iter().zip(&sweep.results) {
        println!("{:4} {:12.3e} {:12.3e} {:10.2e}", r.nodes, r.pole_error, r.eigenvalue_error, p.consistency_residual);
    }
    if let Some(change) = sweep.final_residue_change() {
        println!("residue change over the last step: {change:.2e}");
    }
    Ok(())
}
