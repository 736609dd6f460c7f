//! Cylinder harmonics: Bessel `J_n`, `Y_n`, Hankel `H⁽¹⁾_n` and their
//! derivatives for integer order and complex argument.
//!
//! * `J_n`: ascending power series for `|z| <= 12`, Miller backward
//!   recurrence normalized by the generating function beyond.
//! * `Y_n`: forward recurrence on the Hankel function that decays into the
//!   half plane of `z` (`H⁽¹⁾` above the real axis, `H⁽²⁾` below), started
//!   from the log series for `|z| < 2` and from Steed's continued fraction
//!   plus the Wronskian with `J` beyond. `Y_n` then follows from `J_n` and
//!   that Hankel function without cancellation.
//!
//! `H⁽¹⁾_n` is formed as `J_n + i Y_n`, so in the upper half plane it carries
//! the absolute error of `J` and `Y` (of size `e^{Im z}`) even though it
//! decays like `e^{-Im z}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 12.0;
const CONTINUED_FRACTION_LIMIT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("non-finite argument {0}")]
    InvalidArgument(Complex64),
}

/// All integer-order cylinder functions `0..=order_max` at one argument.
///
/// Negative orders follow from `F_{-n} = (-1)^n F_n`, see [`BesselFamily::j_signed`]
/// and friends.
#[derive(Debug, Clone)]
pub struct BesselFamily {
    pub order_max: usize,
    pub argument: Complex64,
    pub j: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub h1: Vec<Complex64>,
    pub j_prime: Vec<Complex64>,
    pub y_prime: Vec<Complex64>,
    pub h1_prime: Vec<Complex64>,
    /// Set when the argument is zero: `y`, `h1` and their derivatives are NaN.
    pub singular_at_origin: bool,
}

#[inline]
fn parity(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl BesselFamily {
    fn signed(values: &[Complex64], n: i64) -> Complex64 {
        let idx = n.unsigned_abs() as usize;
        if n < 0 {
            values[idx] * parity(n)
        } else {
            values[idx]
        }
    }

    pub fn j_signed(&self, n: i64) -> Complex64 {
        Self::signed(&self.j, n)
    }

    pub fn y_signed(&self, n: i64) -> Complex64 {
        Self::signed(&self.y, n)
    }

    pub fn h1_signed(&self, n: i64) -> Complex64 {
        Self::signed(&self.h1, n)
    }

    pub fn j_prime_signed(&self, n: i64) -> Complex64 {
        Self::signed(&self.j_prime, n)
    }

    pub fn h1_prime_signed(&self, n: i64) -> Complex64 {
        Self::signed(&self.h1_prime, n)
    }
}

/// Computes `J_n, Y_n, H⁽¹⁾_n` and derivatives for `n = 0..=order_max`.
pub fn cyl_bessel_family(order_max: usize, z: Complex64) -> Result<BesselFamily, SpecfunError> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpecfunError::InvalidArgument(z));
    }
    // One extra order so that j_prime[0] = -j[1] is available.
    let nmax = order_max + 1;

    if z == Complex64::new(0.0, 0.0) {
        let mut j = vec![Complex64::new(0.0, 0.0); nmax + 1];
        j[0] = Complex64::new(1.0, 0.0);
        let mut j_prime = vec![Complex64::new(0.0, 0.0); order_max + 1];
        if order_max >= 1 {
            j_prime[1] = Complex64::new(0.5, 0.0);
        }
        j.truncate(order_max + 1);
        let nan = vec![Complex64::new(f64::NAN, f64::NAN); order_max + 1];
        return Ok(BesselFamily {
            order_max,
            argument: z,
            j,
            y: nan.clone(),
            h1: nan.clone(),
            j_prime,
            y_prime: nan.clone(),
            h1_prime: nan,
            singular_at_origin: true,
        });
    }

    let r = z.norm();
    let j: Vec<Complex64> = if r <= SERIES_LIMIT {
        (0..=nmax).map(|n| j_series(n, z)).collect()
    } else {
        j_miller(nmax, z)
    };

    // The Hankel function that decays into the half plane of z: H⁽¹⁾ above
    // the real axis, H⁽²⁾ below. Its forward recurrence is stable, while
    // that of Y loses a factor e^{2|Im z|}.
    let i = Complex64::new(0.0, 1.0);
    let sigma = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let (g0, g1) = if r < CONTINUED_FRACTION_LIMIT {
        let (y0, y1) = y01_series(z, j[0], j[1]);
        (j[0] + i * sigma * y0, j[1] + i * sigma * y1)
    } else {
        recessive_hankel01(z, j[0], j[1])
    };
    let mut g = Vec::with_capacity(nmax + 1);
    g.push(g0);
    g.push(g1);
    for n in 1..nmax {
        let next = Complex64::new(2.0 * n as f64, 0.0) / z * g[n] - g[n - 1];
        g.push(next);
    }
    let y: Vec<Complex64> = g.iter().zip(&j).map(|(g, j)| -i * sigma * (g - j)).collect();

    let h1: Vec<Complex64> = j.iter().zip(&y).map(|(a, b)| a + i * b).collect();

    let derive = |f: &[Complex64]| -> Vec<Complex64> {
        (0..=order_max)
            .map(|n| {
                if n == 0 {
                    -f[1]
                } else {
                    f[n - 1] - Complex64::new(n as f64, 0.0) / z * f[n]
                }
            })
            .collect()
    };
    let j_prime = derive(&j);
    let y_prime = derive(&y);
    let h1_prime = derive(&h1);

    let cut = |mut v: Vec<Complex64>| {
        v.truncate(order_max + 1);
        v
    };
    Ok(BesselFamily {
        order_max,
        argument: z,
        j: cut(j),
        y: cut(y),
        h1: cut(h1),
        j_prime,
        y_prime,
        h1_prime,
        singular_at_origin: false,
    })
}

/// `J_n(z)` for a single signed order.
pub fn bessel_j(n: i64, z: Complex64) -> Result<Complex64, SpecfunError> {
    Ok(cyl_bessel_family(n.unsigned_abs() as usize, z)?.j_signed(n))
}

/// `Y_n(z)` for a single signed order.
pub fn bessel_y(n: i64, z: Complex64) -> Result<Complex64, SpecfunError> {
    Ok(cyl_bessel_family(n.unsigned_abs() as usize, z)?.y_signed(n))
}

/// `H⁽¹⁾_n(z)` for a single signed order.
pub fn hankel1(n: i64, z: Complex64) -> Result<Complex64, SpecfunError> {
    Ok(cyl_bessel_family(n.unsigned_abs() as usize, z)?.h1_signed(n))
}

fn j_series(n: usize, z: Complex64) -> Complex64 {
    let half = z * 0.5;
    let mut lead = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        lead *= half / k as f64;
    }
    if lead == Complex64::new(0.0, 0.0) {
        return lead;
    }
    let q = -half * half;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..400 {
        term *= q / ((k * (n + k)) as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && k > 2 {
            break;
        }
    }
    lead * sum
}

/// `Y_0`, `Y_1` from the ascending log series, given `J_0`, `J_1`.
fn y01_series(z: Complex64, j0: Complex64, j1: Complex64) -> (Complex64, Complex64) {
    let half = z * 0.5;
    let log_half = half.ln();
    let q = -half * half;

    // psi(k+1) = -gamma + H_k
    let mut harmonic = 0.0;
    let mut term = Complex64::new(1.0, 0.0); // q^k / (k!)^2
    let mut sum0 = term * (2.0 * -EULER_GAMMA);
    for k in 1..400 {
        harmonic += 1.0 / k as f64;
        term *= q / ((k * k) as f64);
        let add = term * (2.0 * (harmonic - EULER_GAMMA));
        sum0 += add;
        if add.norm() <= 1e-17 * sum0.norm() && k > 2 {
            break;
        }
    }
    let y0 = log_half * j0 * (2.0 / PI) - sum0 / PI;

    // q^k / (k! (k+1)!) with psi(k+1) + psi(k+2)
    let mut harmonic = 0.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum1 = term * (-2.0 * EULER_GAMMA + 1.0);
    for k in 1..400 {
        harmonic += 1.0 / k as f64;
        term *= q / ((k * (k + 1)) as f64);
        let psi_sum = 2.0 * (harmonic - EULER_GAMMA) + 1.0 / (k + 1) as f64;
        let add = term * psi_sum;
        sum1 += add;
        if add.norm() <= 1e-17 * sum1.norm() && k > 2 {
            break;
        }
    }
    let y1 = -Complex64::new(2.0 / PI, 0.0) / z + log_half * j1 * (2.0 / PI) - half * sum1 / PI;
    (y0, y1)
}

/// Miller backward recurrence for `J_0..=J_nmax`, normalized with the
/// generating-function identity `e^{∓iz} = J_0 + 2 Σ (∓i)^n J_n`. The sign is
/// chosen so that the left side grows with `|Im z|` like the `J_n` do.
fn j_miller(nmax: usize, z: Complex64) -> Vec<Complex64> {
    let r = z.norm();
    let start = 2 * (nmax.max(r.ceil() as usize)) + 40 + (8.0 * r.cbrt()) as usize;
    let mut f = vec![Complex64::new(0.0, 0.0); start + 2];
    f[start] = Complex64::new(1e-30, 0.0);
    let two_over_z = Complex64::new(2.0, 0.0) / z;
    for n in (1..=start).rev() {
        let prev = two_over_z * (n as f64) * f[n] - f[n + 1];
        f[n - 1] = prev;
        // Complex division squares magnitudes, so keep the unnormalized
        // sequence well inside the exponent range.
        if prev.norm() > 1e100 {
            for v in f[n - 1..].iter_mut() {
                *v *= 1e-100;
            }
        }
    }
    let unit = if z.im >= 0.0 {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    // Summed from high order down so the small terms accumulate first.
    let mut sum = Complex64::new(0.0, 0.0);
    let mut phase = unit.powu((start % 4) as u32);
    for n in (1..=start).rev() {
        sum += phase * f[n];
        phase *= unit.conj();
    }
    let sum = f[0] + sum * 2.0;
    let target = (unit * z).exp();
    let scale = target / sum;
    f.truncate(nmax + 1);
    f.iter_mut().for_each(|v| *v *= scale);
    f
}

/// `H_0`, `H_1` of the kind that decays into the half plane of `z`, from
/// the Wronskian with `J` and Steed's continued fraction for `H'_0 / H_0`.
fn recessive_hankel01(z: Complex64, j0: Complex64, j1: Complex64) -> (Complex64, Complex64) {
    let upper = z.im >= 0.0;
    let w = if upper { z } else { z.conj() };
    let f = hankel1_log_derivative0(w);
    let f = if upper { f } else { f.conj() };
    // W[J_0, H⁽¹'²⁾_0] = ±2i/(πz), with J_0' = -J_1.
    let wronskian = Complex64::new(0.0, if upper { 2.0 } else { -2.0 } / PI) / z;
    let g0 = wronskian / (j0 * f + j1);
    (g0, -f * g0)
}

/// `H⁽¹⁾'_0(z) / H⁽¹⁾_0(z)` for `Im z >= 0`, `|z|` not small, by modified
/// Lentz evaluation of
/// `-1/(2z) + i + (i/z) · a_1/(b_1 + a_2/(b_2 + ...))`,
/// `a_k = ((2k-1)/2)²`, `b_k = 2(z + ik)`.
fn hankel1_log_derivative0(z: Complex64) -> Complex64 {
    const TINY: f64 = 1e-150;
    let tiny = Complex64::new(TINY, 0.0);
    let mut value = tiny;
    let mut c = tiny;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..10_000 {
        let a = ((2 * k - 1) as f64 / 2.0).powi(2);
        let b = (z + Complex64::new(0.0, k as f64)) * 2.0;
        d = b + d * a;
        if d.norm() < TINY {
            d = tiny;
        }
        c = b + a / c;
        if c.norm() < TINY {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        value *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    let i = Complex64::new(0.0, 1.0);
    -0.5 / z + i + i / z * value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn origin_values_and_flag() {
        let f = cyl_bessel_family(3, c(0.0, 0.0)).unwrap();
        assert!(f.singular_at_origin);
        assert_eq!(f.j, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(f.y.iter().all(|v| v.re.is_nan()));
        assert!(f.h1.iter().all(|v| v.re.is_nan()));
    }

    #[test]
    fn non_finite_argument_rejected() {
        assert!(cyl_bessel_family(2, c(f64::NAN, 0.0)).is_err());
        assert!(cyl_bessel_family(2, c(1.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn wronskian_at_two_plus_i() {
        let z = c(2.0, 1.0);
        let f = cyl_bessel_family(10, z).unwrap();
        let w = c(2.0 / PI, 0.0) / z;
        for n in 0..=9 {
            let res = f.j[n + 1] * f.y[n] - f.j[n] * f.y[n + 1] - w;
            assert!(res.norm() <= 1e-12, "n={n} residual {}", res.norm());
        }
    }

    #[test]
    fn h1_is_j_plus_iy() {
        let f = cyl_bessel_family(6, c(17.0, -0.4)).unwrap();
        for n in 0..=6 {
            assert_eq!(f.h1[n], f.j[n] + c(0.0, 1.0) * f.y[n]);
        }
    }

    #[test]
    fn regimes_agree_at_boundaries() {
        for &z in &[c(11.9, 0.3), c(12.1, -0.2), c(-11.95, 0.5)] {
            let j_s: Vec<_> = (0..=9).map(|n| j_series(n, z)).collect();
            let j_m = j_miller(9, z);
            for n in 0..=8 {
                let scale = j_s[n].norm().max(1e-3);
                assert!((j_s[n] - j_m[n]).norm() / scale < 5e-11, "{z} n={n}");
            }
        }
        for &z in &[c(1.99, 0.1), c(2.01, -0.3), c(-1.5, 1.4), c(0.2, -2.0)] {
            let j0 = j_series(0, z);
            let j1 = j_series(1, z);
            let (y0, y1) = y01_series(z, j0, j1);
            let sigma = if z.im >= 0.0 { 1.0 } else { -1.0 };
            let (g0, g1) = recessive_hankel01(z, j0, j1);
            let i = c(0.0, 1.0);
            assert!((g0 - (j0 + i * sigma * y0)).norm() / g0.norm() < 1e-13, "{z}");
            assert!((g1 - (j1 + i * sigma * y1)).norm() / g1.norm() < 1e-13, "{z}");
        }
    }

    /// Leading terms of the large-argument expansion of `H⁽¹⁾_0`.
    fn hankel1_0_asymptotic(z: Complex64) -> Complex64 {
        let i = c(0.0, 1.0);
        let mut sum = c(1.0, 0.0);
        let mut a = c(1.0, 0.0);
        for k in 1..12 {
            let odd = (2 * k - 1) as f64;
            a *= -odd * odd / (8.0 * k as f64) / z;
            sum += i.powu(k as u32) * a;
        }
        (c(2.0 / PI, 0.0) / z).sqrt() * (i * (z - PI / 4.0)).exp() * sum
    }

    #[test]
    fn decaying_hankel_matches_large_argument_expansion() {
        for &z in &[c(40.0, 0.0), c(38.0, 15.0), c(45.0, 19.0), c(42.0, -3.0)] {
            let f = cyl_bessel_family(2, z).unwrap();
            let j0 = f.j[0];
            let (g0, _) = recessive_hankel01(z, j0, f.j[1]);
            let expect = if z.im >= 0.0 {
                hankel1_0_asymptotic(z)
            } else {
                hankel1_0_asymptotic(z.conj()).conj()
            };
            assert!((g0 - expect).norm() / g0.norm() < 1e-12, "{z}: {g0} vs {expect}");
        }
    }

    #[test]
    fn negative_orders_follow_parity() {
        let f = cyl_bessel_family(5, c(3.3, 0.7)).unwrap();
        assert_eq!(f.j_signed(-3), -f.j[3]);
        assert_eq!(f.h1_signed(-4), f.h1[4]);
    }
}
