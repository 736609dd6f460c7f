use num_complex::Complex64;

use super::{harmonic_index, MstError};
use crate::geometry::{Cylinder, Polarization};
use crate::specfun::cyl_bessel_family;

/// Single-rod response per harmonic, indexed by `n + order`.
///
/// `s[n]` maps the regular amplitude of the exciting field to the outgoing
/// amplitude, `c[n]` maps it to the interior amplitude. Orders whose 2×2
/// boundary system is singular are listed in `flagged` and hold NaN.
#[derive(Debug, Clone)]
pub struct MieCoefficients {
    pub order: usize,
    pub s: Vec<Complex64>,
    pub c: Vec<Complex64>,
    pub flagged: Vec<i64>,
}

impl MieCoefficients {
    pub fn s_at(&self, n: i64) -> Complex64 {
        self.s[harmonic_index(n, self.order)]
    }

    pub fn c_at(&self, n: i64) -> Complex64 {
        self.c[harmonic_index(n, self.order)]
    }

    pub fn is_singular(&self) -> bool {
        !self.flagged.is_empty()
    }
}

/// Matches `a J_n(k_b r) + b H_n(k_b r)` outside to `c J_n(k_i r)` inside at
/// `r = R`. For H-parallel the normal derivative is weighted by `1/ε`.
pub fn mie_coefficients(
    k: Complex64,
    cyl: &Cylinder,
    pol: Polarization,
    m_cyl: usize,
) -> Result<MieCoefficients, MstError> {
    let n_bg = cyl.eps_bg.sqrt();
    let n_rod = cyl.eps_rod.sqrt();
    let kb = k * n_bg;
    let ki = k * n_rod;
    let x = kb * cyl.radius;
    let y = ki * cyl.radius;
    let (kappa_b, kappa_i) = match pol {
        Polarization::EParallel => (kb, ki),
        Polarization::HParallel => (kb / cyl.eps_bg, ki / cyl.eps_rod),
    };

    let size = 2 * m_cyl + 1;
    let mut s = vec![Complex64::new(0.0, 0.0); size];
    let mut c = vec![Complex64::new(0.0, 0.0); size];
    let mut flagged = Vec::new();

    if cyl.eps_rod == cyl.eps_bg {
        c.fill(Complex64::new(1.0, 0.0));
        return Ok(MieCoefficients {
            order: m_cyl,
            s,
            c,
            flagged,
        });
    }

    let out = cyl_bessel_family(m_cyl, x)?;
    let inn = cyl_bessel_family(m_cyl, y)?;
    for n in 0..=m_cyl {
        let (jx, jpx, hx, hpx) = (out.j[n], out.j_prime[n], out.h1[n], out.h1_prime[n]);
        let (jy, jpy) = (inn.j[n], inn.j_prime[n]);
        let det = kappa_b * hpx * jy - kappa_i * hx * jpy;
        let (sn, cn) = if det.norm() == 0.0 || !det.is_finite() {
            flagged.push(n as i64);
            if n > 0 {
                flagged.push(-(n as i64));
            }
            let nan = Complex64::new(f64::NAN, f64::NAN);
            (nan, nan)
        } else {
            let sn = (kappa_i * jx * jpy - kappa_b * jy * jpx) / det;
            let cn = kappa_b * (jx * hpx - hx * jpx) / det;
            (sn, cn)
        };
        let ni = n as i64;
        s[harmonic_index(ni, m_cyl)] = sn;
        s[harmonic_index(-ni, m_cyl)] = sn;
        c[harmonic_index(ni, m_cyl)] = cn;
        c[harmonic_index(-ni, m_cyl)] = cn;
    }
    flagged.sort_unstable();
    Ok(MieCoefficients {
        order: m_cyl,
        s,
        c,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rod(radius: f64, eps: f64) -> Cylinder {
        Cylinder::new(
            [0.0, 0.0],
            radius,
            Complex64::new(eps, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    #[test]
    fn no_contrast_is_transparent() {
        let m = mie_coefficients(Complex64::new(2.0, -0.1), &rod(0.3, 1.0), Polarization::EParallel, 5).unwrap();
        assert!(m.s.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
        assert!(m.c.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn lossless_rod_conserves_energy_per_harmonic() {
        for pol in [Polarization::EParallel, Polarization::HParallel] {
            let m = mie_coefficients(Complex64::new(2.0, 0.0), &rod(0.3, 9.0), pol, 8).unwrap();
            for n in -8..=8 {
                let u = Complex64::new(1.0, 0.0) + m.s_at(n) * 2.0;
                assert!((u.norm() - 1.0).abs() < 1e-12, "{pol} n={n}: {}", u.norm());
            }
        }
    }

    #[test]
    fn symmetric_in_order() {
        let m = mie_coefficients(Complex64::new(1.3, -0.2), &rod(0.4, 9.0), Polarization::HParallel, 4).unwrap();
        for n in 1..=4 {
            assert_eq!(m.s_at(n), m.s_at(-n));
            assert_eq!(m.c_at(n), m.c_at(-n));
        }
    }
}
