//! Field of the defect resonance: the null vector of the Foldy–Lax system at
//! the pole, its symmetry under a quarter turn, and a coarse map of |u|².

use num_complex::Complex64;
use resonance_poles::geometry::{build_crystal, CrystalSpec, Polarization};
use resonance_poles::mst::Truncation;
use resonance_poles::observables::{mode_map, null_mode, rotation_check, Grid};
use resonance_poles::poles::{muller_refine, CrystalOperator, MullerOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cylinders = build_crystal(&CrystalSpec::defect_7x7(0.25))?;
    let guess = Complex64::new(2.32783941582, -0.00371153906);
    let trunc = Truncation::default_for(guess, &cylinders);
    let op = CrystalOperator::new(cylinders.clone(), Polarization::EParallel, trunc);
    let k_p = muller_refine(&op, guess, &MullerOptions::default())?.k_p;

    let mode = null_mode(k_p, &cylinders, Polarization::EParallel, trunc.m_cyl)?;
    let rot = rotation_check(&mode.solution)?;
    println!("k_p = {k_p:.13}");
    println!("σ_min/σ_max = {:.2e}", mode.sigma_ratio());
    println!("quarter turn: phase {:.6}, defect {:.1e}", rot.phase, rot.defect);

    let grid = Grid { x_min: -4.0, x_max: 4.0, nx: 33, y_min: -4.0, y_max: 4.0, ny: 17 };
    let map = mode_map(&mode, &grid)?;
    let peak = map.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    for j in (0..grid.ny).rev() {
        let row: String = (0..grid.nx)
            .map(|i| {
                let level = (map.at(i, j).norm_sqr() / peak).sqrt();
                shades[((level * 9.0).round() as usize).min(9)]
            })
            .collect();
        println!("{row}");
    }
    if let Some(path) = std::env::args().nth(1) {
        let fine = Grid { nx: 161, ny: 161, ..grid };
        std::fs::write(&path, mode_map(&mode, &fine)?.to_csv())?;
        println!("wrote {path}");
    }
    Ok(())
}
