//! Transmission through the defect crystal and the complete crystal near the
//! defect resonance, measured on a segment in the shadow of the crystal.
//! Pass a file name to also write the defect spectrum as CSV.

use resonance_poles::geometry::{build_crystal, CrystalSpec, Polarization};
use resonance_poles::observables::{spectrum, Segment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let shadow = Segment { start: [-3.5, -4.5], end: [3.5, -4.5], samples: 257 };
    let incidence = -std::f64::consts::FRAC_PI_2;
    let defect = build_crystal(&CrystalSpec::defect_7x7(0.25))?;
    let full = build_crystal(&CrystalSpec { removed: vec![], ..CrystalSpec::defect_7x7(0.25) })?;

    let with_defect = spectrum(&defect, Polarization::EParallel, 2.2, 2.45, 26, &shadow, incidence)?;
    let without = spectrum(&full, Polarization::EParallel, 2.2, 2.45, 26, &shadow, incidence)?;
    println!("{:>8} {:>12} {:>12}", "k", "defect", "full");
    for (a, b) in with_defect.points.iter().zip(&without.points) {
        println!("{:8.4} {:12.6} {:12.6}", a.0, a.1, b.1);
    }
    if let Some((k, t)) = with_defect.peak() {
        println!("defect peak {t:.4} at k = {k:.4}, next to Re k_p = 2.3278");
    }
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, with_defect.to_csv())?;
        println!("wrote {path}");
    }
    Ok(())
}
