use num_complex::Complex64;
use rayon::prelude::*;

use super::ObservableError;
use crate::mst::foldy_lax::{harmonic_sum, Radial};
use crate::mst::{local_to_global, LocalSolution, Truncation};

fn interior_index(solution: &LocalSolution, p: [f64; 2]) -> Option<usize> {
    solution.cylinders.iter().position(|c| c.contains(p))
}

/// Total field and its gradient at a point outside every rod.
pub fn field_and_gradient_at(solution: &LocalSolution, p: [f64; 2]) -> Result<(Complex64, [Complex64; 2]), ObservableError> {
    if let Some(j) = interior_index(solution, p) {
        return Err(ObservableError::InsideRod { point: p, index: j });
    }
    let (mut u, mut g) = solution
        .incident
        .value_and_gradient(solution.kb, p)
        .ok_or(ObservableError::IncidentUnknown)?;
    for (cyl, b) in solution.cylinders.iter().zip(&solution.b) {
        let rel = [p[0] - cyl.center[0], p[1] - cyl.center[1]];
        let (v, d) = harmonic_sum(b, solution.m_cyl, Radial::Outgoing, solution.kb, rel)?;
        u += v;
        g[0] += d[0];
        g[1] += d[1];
    }
    Ok((u, g))
}

/// Total field at each point.
///
/// Inside rod `j` the interior expansion `Σ c_j[n] J_n(k_i r_j) e^{inθ_j}` is
/// used; everywhere else, including points exactly on a rod boundary, the
/// incident field plus all outgoing rod expansions. With
/// [`crate::mst::IncidentField::None`] this is the field of a source-free
/// mode.
pub fn field_at(solution: &LocalSolution, points: &[[f64; 2]]) -> Result<Vec<Complex64>, ObservableError> {
    points.par_iter().map(|&p| field_value(solution, p)).collect()
}

fn field_value(solution: &LocalSolution, p: [f64; 2]) -> Result<Complex64, ObservableError> {
    match interior_index(solution, p) {
        Some(j) => {
            let cyl = &solution.cylinders[j];
            let ki = solution.k * cyl.eps_rod.sqrt();
            let rel = [p[0] - cyl.center[0], p[1] - cyl.center[1]];
            Ok(harmonic_sum(&solution.c[j], solution.m_cyl, Radial::Regular, ki, rel)?.0)
        }
        None => Ok(field_and_gradient_at(solution, p)?.0),
    }
}

/// Scattered field of `solution` as outgoing harmonics about the origin,
/// orders `-l_glob..=l_glob`. Valid outside the circumscribing disk.
pub fn global_coefficients(solution: &LocalSolution, l_glob: usize) -> Result<Vec<Complex64>, ObservableError> {
    let trunc = Truncation::new(solution.m_cyl, l_glob)?;
    let gather = local_to_global(solution.kb, &solution.cylinders, trunc)?;
    let stacked = nalgebra::DVector::from_iterator(gather.ncols(), solution.b.iter().flatten().copied());
    Ok((gather * stacked).iter().copied().collect())
}

/// `Σ_n coeffs[n] H⁽¹⁾_n(k r) e^{inθ}` about the origin.
pub fn outgoing_sum(coeffs: &[Complex64], k: Complex64, p: [f64; 2]) -> Result<Complex64, ObservableError> {
    if coeffs.len() % 2 == 0 {
        return Err(ObservableError::InvalidArgument("coefficient vector must have odd length".into()));
    }
    let order = coeffs.len() / 2;
    Ok(harmonic_sum(coeffs, order, Radial::Outgoing, k, p)?.0)
}

/// Scattered part only: the outgoing rod expansions, valid outside every rod.
pub fn scattered_at(solution: &LocalSolution, p: [f64; 2]) -> Result<Complex64, ObservableError> {
    let mut u = Complex64::new(0.0, 0.0);
    for (cyl, b) in solution.cylinders.iter().zip(&solution.b) {
        let rel = [p[0] - cyl.center[0], p[1] - cyl.center[1]];
        u += harmonic_sum(b, solution.m_cyl, Radial::Outgoing, solution.kb, rel)?.0;
    }
    Ok(u)
}
