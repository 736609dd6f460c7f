use num_complex::Complex64;
use serde::Serialize;

use super::extract::PoleResult;
use super::{OperatorFamily, PoleError};

/// Relative error of the pointwise residue `(k − k_p) T(k)` against the
/// contour residue along `k = k_p + h`.
///
/// This is a demonstration, not an estimator: the product of a nearly
/// singular matrix with a vanishing factor loses accuracy as `h → 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitDiagnostic {
    pub tag: &'static str,
    pub k_p: [f64; 2],
    pub offsets: Vec<f64>,
    pub relative_errors: Vec<f64>,
}

impl LimitDiagnostic {
    /// Index of the smallest error.
    pub fn floor_index(&self) -> usize {
        self.relative_errors
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// True when the error reaches a minimum strictly inside the sweep and
    /// grows again by at least `factor` at the smallest offset.
    pub fn has_floor_then_growth(&self, factor: f64) -> bool {
        let i = self.floor_index();
        let last = *self.relative_errors.last().unwrap_or(&0.0);
        i + 1 < self.relative_errors.len() && last > factor * self.relative_errors[i]
    }
}

pub fn limit_residue_diagnostic(
    t_eval: &impl OperatorFamily,
    pole: &PoleResult,
    offsets: &[f64],
) -> Result<LimitDiagnostic, PoleError> {
    if offsets.is_empty() {
        return Err(PoleError::InvalidArgument("limit diagnostic needs at least one offset".into()));
    }
    if offsets.iter().any(|&h| !(h > 0.0 && h.is_finite())) || offsets.windows(2).any(|w| w[1] >= w[0]) {
        return Err(PoleError::InvalidArgument("offsets must be positive and strictly decreasing".into()));
    }
    let p_norm = pole.residue.norm();
    let mut relative_errors = Vec::with_capacity(offsets.len());
    for (node, &h) in offsets.iter().enumerate() {
        let k = pole.k_p + h;
        let t = t_eval
            .evaluate(k)
            .map_err(|source| PoleError::Evaluation { node, z: k, source })?;
        let approx = t * Complex64::new(h, 0.0);
        relative_errors.push((approx - &pole.residue).norm() / p_norm);
    }
    Ok(LimitDiagnostic {
        tag: "DIAGNOSTIC-ONLY",
        k_p: [pole.k_p.re, pole.k_p.im],
        offsets: offsets.to_vec(),
        relative_errors,
    })
}
