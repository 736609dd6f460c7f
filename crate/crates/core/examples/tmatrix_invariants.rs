//! Global T-matrix of the defect crystal at real wavenumbers: energy
//! conservation, reciprocity and the selection rule of the square symmetry.

use num_complex::Complex64;
use resonance_poles::geometry::{build_crystal, CrystalSpec, Polarization};
use resonance_poles::mst::{global_tmatrix, Truncation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cylinders = build_crystal(&CrystalSpec::defect_7x7(0.25))?;
    println!("{:>5} {:>6} {:>12} {:>12} {:>12}", "k", "L", "|S†S - I|", "reciprocity", "C4");
    for pol in [Polarization::EParallel, Polarization::HParallel] {
        println!("{pol}");
        for k in [1.0, 2.0, 2.33, 2.5] {
            let kc = Complex64::new(k, 0.0);
            let trunc = Truncation::default_for(kc, &cylinders);
            let t = global_tmatrix(kc, &cylinders, pol, trunc)?;
            println!(
                "{k:5.2} {:6} {:12.2e} {:12.2e} {:12.2e}",
                trunc.l_glob,
                t.unitarity_defect(),
                t.reciprocity_defect(),
                t.c4_selection_defect()
            );
        }
    }
    Ok(())
}
