//! Why the residue is taken from contour moments: estimating it as the
//! pointwise limit (k − k_p)·T(k) stalls at a floor and then degrades as the
//! offset shrinks, because T(k) is evaluated ever closer to its singularity.

use num_complex::Complex64;
use resonance_poles::geometry::{Cylinder, Polarization};
use resonance_poles::poles::{
    extract_pole, limit_residue_diagnostic, moments, muller_refine, Contour, CrystalOperator, ExtractOptions,
    MullerOptions, PoleResult,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rod = Cylinder::new([0.0, 0.0], 0.3, Complex64::new(9.0, 0.0), Complex64::new(1.0, 0.0));
    let contour = Contour::circle(Complex64::new(4.39, -0.4), 0.2, 64);
    let op = CrystalOperator::for_contour(vec![rod], Polarization::EParallel, &contour);
    let pole = extract_pole(&moments(&op, &contour)?, &ExtractOptions::default())?;
    let k_p = muller_refine(&op, pole.k_p, &MullerOptions::default())?.k_p;

    let offsets: Vec<f64> = (1..=12).map(|e| 10f64.powi(-e)).collect();
    let diag = limit_residue_diagnostic(&op, &PoleResult { k_p, ..pole }, &offsets)?;
    println!("[{}] relative error of h·T(k_p + h) against the contour residue", diag.tag);
    for (h, e) in diag.offsets.iter().zip(&diag.relative_errors) {
        println!("  h = {h:.0e}  {e:.3e}");
    }
    let best = diag.floor_index();
    println!("floor {:.2e} at h = {:.0e}; floor then growth: {}", diag.relative_errors[best], diag.offsets[best], diag.has_floor_then_growth(10.0));
    Ok(())
}
