use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linalg::{dominant_eigenpair, start_vector};
use super::{OperatorFamily, PoleError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MullerOptions {
    /// Stop once `|g| = 1/|μ|` falls below this.
    pub tol: f64,
    pub max_iter: usize,
    pub power_tol: f64,
    pub power_max_iter: usize,
    pub restarts: usize,
}

impl Default for MullerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_iter: 60,
            power_tol: 1e-13,
            power_max_iter: 500,
            restarts: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MullerResult {
    pub k_p: Complex64,
    /// `|g(k_p)| = 1/|μ(k_p)|`.
    pub objective: f64,
    pub iterations: usize,
    /// `μ(k_p)`, the largest-modulus eigenvalue of `T(k_p)`.
    pub dominant_eigenvalue: Complex64,
    pub dominant_eigenvector: DVector<Complex64>,
}

struct Sample {
    k: Complex64,
    g: Complex64,
    mu: Complex64,
    vector: DVector<Complex64>,
}

fn sample(t_eval: &impl OperatorFamily, k: Complex64, opts: &MullerOptions) -> Result<Sample, PoleError> {
    let t = t_eval
        .evaluate(k)
        .map_err(|source| PoleError::Evaluation { node: 0, z: k, source })?;
    if t.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
        // landed on the pole itself
        return Ok(Sample {
            k,
            g: Complex64::new(0.0, 0.0),
            mu: Complex64::new(f64::INFINITY, 0.0),
            vector: start_vector(t.nrows(), 0),
        });
    }
    for attempt in 0..=opts.restarts {
        let start = start_vector(t.nrows(), attempt);
        let p = dominant_eigenpair(&t, Some(&start), opts.power_tol, opts.power_max_iter);
        if p.converged {
            return Ok(Sample {
                k,
                g: if p.value.norm() == 0.0 { Complex64::new(f64::INFINITY, 0.0) } else { 1.0 / p.value },
                mu: p.value,
                vector: p.vector,
            });
        }
    }
    Err(PoleError::DegenerateEigenvalue { k })
}

/// Müller iteration for a zero of `g(k) = 1/μ(k)`, where `μ(k)` is the
/// largest-modulus eigenvalue of `T(k)`.
///
/// A zero of `g` is a pole of `T`, and `g` is the smallest eigenvalue of
/// `T⁻¹` without ever forming the inverse. The three start points are `k0`
/// and `k0 (1 ± 10⁻⁴ i)`.
pub fn muller_refine(t_eval: &impl OperatorFamily, k0: Complex64, opts: &MullerOptions) -> Result<MullerResult, PoleError> {
    if !(k0.re.is_finite() && k0.im.is_finite()) || k0.norm() == 0.0 {
        return Err(PoleError::InvalidArgument(format!("Müller start point must be finite and nonzero, got {k0}")));
    }
    let offset = Complex64::new(0.0, 1e-4);
    let mut pts = [
        sample(t_eval, k0 * (1.0 - offset), opts)?,
        sample(t_eval, k0 * (1.0 + offset), opts)?,
        sample(t_eval, k0, opts)?,
    ];
    let mut best = best_of(&pts);
    let finish = |s: Sample, iterations| MullerResult {
        k_p: s.k,
        objective: s.g.norm(),
        iterations,
        dominant_eigenvalue: s.mu,
        dominant_eigenvector: s.vector,
    };
    if pts[2].g.norm() < opts.tol {
        let [_, _, s] = pts;
        return Ok(finish(s, 0));
    }
    for it in 1..=opts.max_iter {
        let [x0, x1, x2] = [pts[0].k, pts[1].k, pts[2].k];
        let [f0, f1, f2] = [pts[0].g, pts[1].g, pts[2].g];
        let h1 = x1 - x0;
        let h2 = x2 - x1;
        let d1 = (f1 - f0) / h1;
        let d2 = (f2 - f1) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * a * f2).sqrt();
        let den = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
        let step = if den.norm() == 0.0 || !den.norm().is_finite() {
            h2 * 0.5
        } else {
            -2.0 * f2 / den
        };
        let next = sample(t_eval, x2 + step, opts)?;
        let small_step = step.norm() < 1e-14 * next.k.norm();
        let done = next.g.norm() < opts.tol || small_step;
        let [_, p1, p2] = pts;
        pts = [p1, p2, next];
        if pts[2].g.norm() < best.1 {
            best = (pts[2].k, pts[2].g.norm());
        }
        if done {
            let [_, _, s] = pts;
            return Ok(finish(s, it));
        }
    }
    Err(PoleError::NoConvergence {
        iterations: opts.max_iter,
        best_k: best.0,
        best_objective: best.1,
    })
}

fn best_of(pts: &[Sample; 3]) -> (Complex64, f64) {
    pts.iter()
        .map(|s| (s.k, s.g.norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three samples")
}
