//! Cylinder functions at a few complex arguments, with the Wronskian and
//! upward-recurrence residuals that the rest of the crate relies on.

use num_complex::Complex64;
use resonance_poles::specfun::cyl_bessel_family;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args = [
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 1.0),
        Complex64::new(6.9, -0.2),
        Complex64::new(9.6, 16.9),
        Complex64::new(40.0, -3.0),
    ];
    for z in args {
        let f = cyl_bessel_family(12, z)?;
        println!("z = {z}");
        for n in [0, 1, 5, 10] {
            println!("  n = {n:2}  J = {:.12e}  Y = {:.12e}  H1 = {:.12e}", f.j[n], f.y[n], f.h1[n]);
        }
        let target = Complex64::new(2.0 / std::f64::consts::PI, 0.0) / z;
        let mut wronskian = 0.0f64;
        let mut recurrence = 0.0f64;
        for n in 0..11 {
            let (p, q) = (f.j[n + 1] * f.y[n], f.j[n] * f.y[n + 1]);
            wronskian = wronskian.max((p - q - target).norm() / p.norm().max(q.norm()).max(target.norm()));
            if n >= 1 {
                let up = f.y[n] * (2.0 * n as f64) / z - f.y[n - 1];
                recurrence = recurrence.max((up - f.y[n + 1]).norm() / f.y[n + 1].norm());
            }
        }
        println!("  wronskian residual {wronskian:.2e}, Y recurrence residual {recurrence:.2e}");
    }
    Ok(())
}
