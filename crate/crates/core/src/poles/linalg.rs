use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerIteration {
    pub value: Complex64,
    /// Unit norm, largest-modulus entry real and positive.
    pub vector: DVector<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Normalized all-ones vector, optionally twisted by `e^{i s j}` so that a
/// restart explores a different start direction.
pub(crate) fn start_vector(n: usize, shift: usize) -> DVector<Complex64> {
    let twist = 0.618_033_988_749_894_9 * shift as f64;
    let v = DVector::from_fn(n, |j, _| Complex64::from_polar(1.0, twist * j as f64));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

pub(crate) fn fix_phase(v: &mut DVector<Complex64>) {
    let norm = v.norm();
    if norm == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .copied()
        .fold(Complex64::new(0.0, 0.0), |best, x| if x.norm() > best.norm() * (1.0 + 1e-12) { x } else { best });
    let phase = pivot.conj() / pivot.norm();
    *v *= phase / norm;
}

/// Largest-modulus eigenpair by power iteration with a Rayleigh-quotient
/// estimate. Stops once the estimate moves by less than `tol` relative, or
/// the eigen-residual `‖Av − λv‖` drops below `tol·|λ|`.
pub fn dominant_eigenpair(
    a: &DMatrix<Complex64>,
    start: Option<&DVector<Complex64>>,
    tol: f64,
    max_iter: usize,
) -> PowerIteration {
    let n = a.nrows();
    let mut v = match start {
        Some(s) => s / Complex64::new(s.norm(), 0.0),
        None => start_vector(n, 0),
    };
    let mut value = Complex64::new(0.0, 0.0);
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=max_iter {
        iterations = it;
        let w = a * &v;
        let norm = w.norm();
        if norm == 0.0 {
            value = Complex64::new(0.0, 0.0);
            converged = true;
            break;
        }
        let next = w / Complex64::new(norm, 0.0);
        let aw = a * &next;
        let estimate = next.dotc(&aw);
        let residual = (&aw - &next * estimate).norm();
        let moved = (estimate - value).norm();
        v = next;
        value = estimate;
        if residual <= tol * estimate.norm() || (it > 1 && moved <= tol * estimate.norm()) {
            converged = true;
            break;
        }
    }
    fix_phase(&mut v);
    PowerIteration {
        value,
        vector: v,
        iterations,
        converged,
    }
}
