//! Defect resonance of a 7×7 rod crystal (radius 0.25, eps = 9) with the
//! centre rod removed, enclosed by the triangle (2.3, 2.4 − 0.1i, 2.4).
//!
//! Each contour node is one 624×624 Foldy–Lax solve; expect ~20 s in a
//! release build on one core.

use num_complex::Complex64;
use resonance_poles::geometry::{build_crystal, CrystalSpec, Polarization};
use resonance_poles::poles::{
    extract_pole, moments, muller_refine, Contour, CrystalOperator, ExtractOptions, MullerOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nodes = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(45);
    let cylinders = build_crystal(&CrystalSpec::defect_7x7(0.25))?;
    let triangle = [Complex64::new(2.3, 0.0), Complex64::new(2.4, -0.1), Complex64::new(2.4, 0.0)];
    let contour = Contour::polygon(&triangle, nodes);
    let op = CrystalOperator::for_contour(cylinders.clone(), Polarization::EParallel, &contour);
    println!("{} rods, T of size {}, {}", cylinders.len(), 2 * op.truncation.l_glob + 1, contour.describe());

    let pole = extract_pole(&moments(&op, &contour)?, &ExtractOptions::default())?;
    println!("contour:  k_p = {:.13}", pole.k_p);
    println!("          rank {}, consistency {:.2e}", pole.rank_estimate, pole.consistency_residual);

    let refined = muller_refine(&op, pole.k_p, &MullerOptions::default())?;
    println!("Müller:   k_p = {:.13}, |1/μ| = {:.2e}", refined.k_p, refined.objective);
    println!("Q = {:.1}", refined.k_p.re / (-2.0 * refined.k_p.im));
    Ok(())
}
