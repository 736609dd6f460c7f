use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::contour::{contour_quadrature, Contour};
use super::linalg::dominant_eigenpair;
use super::{OperatorFamily, PoleError};

/// Thresholds for [`extract_pole`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractOptions {
    /// `‖M0‖_F` below `noise_floor · max_j ‖T(z_j)‖_F` means nothing is enclosed.
    pub noise_floor: f64,
    pub consistency_threshold: f64,
    pub rank_tol: f64,
    pub power_tol: f64,
    pub power_max_iter: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            noise_floor: 1e-8,
            consistency_threshold: 1e-3,
            rank_tol: 1e-6,
            power_tol: 1e-13,
            power_max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentPair {
    pub m0: DMatrix<Complex64>,
    pub m1: DMatrix<Complex64>,
    pub contour: Contour,
    pub nodes_used: usize,
    /// Largest `‖T(z_j)‖_F` over the nodes.
    pub sample_scale: f64,
}

/// Zeroth and first contour moments of `t_eval`, one evaluation per node.
///
/// Nodes are evaluated in parallel and summed in node order.
pub fn moments(t_eval: &impl OperatorFamily, contour: &Contour) -> Result<MomentPair, PoleError> {
    let rule = contour_quadrature(contour)?;
    let samples: Vec<_> = rule
        .nodes
        .par_iter()
        .enumerate()
        .map(|(node, &z)| t_eval.evaluate(z).map_err(|source| PoleError::Evaluation { node, z, source }))
        .collect();
    let mut m0: Option<DMatrix<Complex64>> = None;
    let mut m1: Option<DMatrix<Complex64>> = None;
    let mut sample_scale = 0.0f64;
    for ((sample, &z), &w) in samples.into_iter().zip(&rule.nodes).zip(&rule.weights) {
        let t = sample?;
        if let Some(prev) = &m0 {
            if prev.shape() != t.shape() {
                return Err(PoleError::InvalidArgument(format!(
                    "operator changed shape along the contour: {:?} then {:?}",
                    prev.shape(),
                    t.shape()
                )));
            }
        }
        sample_scale = sample_scale.max(t.norm());
        let wt = &t * w;
        match (&mut m0, &mut m1) {
            (Some(a), Some(b)) => {
                *b += &wt * z;
                *a += wt;
            }
            _ => {
                m1 = Some(&wt * z);
                m0 = Some(wt);
            }
        }
    }
    Ok(MomentPair {
        m0: m0.expect("quadrature rule is never empty"),
        m1: m1.expect("quadrature rule is never empty"),
        contour: contour.clone(),
        nodes_used: rule.len(),
        sample_scale,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleResult {
    pub k_p: Complex64,
    /// `P_p`, the zeroth moment.
    pub residue: DMatrix<Complex64>,
    pub rank_estimate: usize,
    pub dominant_eigenvalue: Complex64,
    pub dominant_eigenvector: DVector<Complex64>,
    /// `‖M1 − k_p M0‖_F / ‖M0‖_F`.
    pub consistency_residual: f64,
    /// `tr M1 / tr M0`, kept as a cross-check on `k_p`.
    pub trace_estimate: Complex64,
    pub nodes: usize,
    pub contour: Contour,
}

/// Serialized form of a [`PoleResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleReport {
    pub k_p: [f64; 2],
    pub consistency_residual: f64,
    pub rank: usize,
    pub dominant_eigenvalue: [f64; 2],
    pub trace_estimate: [f64; 2],
    pub nodes: usize,
    pub contour: Contour,
}

impl PoleResult {
    pub fn report(&self) -> PoleReport {
        PoleReport {
            k_p: [self.k_p.re, self.k_p.im],
            consistency_residual: self.consistency_residual,
            rank: self.rank_estimate,
            dominant_eigenvalue: [self.dominant_eigenvalue.re, self.dominant_eigenvalue.im],
            trace_estimate: [self.trace_estimate.re, self.trace_estimate.im],
            nodes: self.nodes,
            contour: self.contour.clone(),
        }
    }
}

/// Pole and residue from a moment pair.
///
/// `k_p = v†M1v / v†M0v` with `v` the dominant eigenvector of `M0`. For a
/// contour around exactly one simple pole the two moments are proportional,
/// so a large [`PoleResult::consistency_residual`] means the contour holds
/// more than that and the result is refused.
pub fn extract_pole(m: &MomentPair, opts: &ExtractOptions) -> Result<PoleResult, PoleError> {
    let m0_norm = m.m0.norm();
    let floor = opts.noise_floor * m.sample_scale;
    if !(m0_norm > floor) {
        return Err(PoleError::NoPoleEnclosed { m0_norm, floor });
    }
    let power = dominant_eigenpair(&m.m0, None, opts.power_tol, opts.power_max_iter);
    let v = &power.vector;
    let den = v.dotc(&(&m.m0 * v));
    let num = v.dotc(&(&m.m1 * v));
    let k_p = num / den;
    let consistency_residual = (&m.m1 - &m.m0 * k_p).norm() / m0_norm;
    let trace_estimate = m.m1.trace() / m.m0.trace();
    if !(consistency_residual <= opts.consistency_threshold) {
        return Err(PoleError::MultiplePoles {
            consistency_residual,
            threshold: opts.consistency_threshold,
            k_estimate: k_p,
        });
    }
    let analysis = residue_analysis(&m.m0, opts.rank_tol);
    if analysis.no_pole {
        return Err(PoleError::NoPoleEnclosed { m0_norm, floor });
    }
    Ok(PoleResult {
        k_p,
        residue: m.m0.clone(),
        rank_estimate: analysis.rank,
        dominant_eigenvalue: power.value,
        dominant_eigenvector: power.vector,
        consistency_residual,
        trace_estimate,
        nodes: m.nodes_used,
        contour: m.contour.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueAnalysis {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// Nonzero eigenvalues, largest modulus first.
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Vec<DVector<Complex64>>,
    pub no_pole: bool,
}

/// Numerical rank of a residue and the eigenpairs of its nonzero part.
///
/// With `M = U_r Σ_r V_r†` the nonzero eigenvalues of `M` are those of the
/// `r × r` matrix `Σ_r V_r† U_r`, and an eigenvector `y` of the latter maps to
/// `U_r y`.
pub fn residue_analysis(m0: &DMatrix<Complex64>, rank_tol: f64) -> ResidueAnalysis {
    let svd = m0.clone().svd(true, true);
    let mut sv: Vec<(usize, f64)> = svd.singular_values.iter().copied().enumerate().collect();
    sv.sort_by(|a, b| b.1.total_cmp(&a.1));
    let singular_values: Vec<f64> = sv.iter().map(|s| s.1).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 || !sigma_max.is_finite() {
        return ResidueAnalysis {
            rank: 0,
            singular_values,
            eigenvalues: Vec::new(),
            eigenvectors: Vec::new(),
            no_pole: true,
        };
    }
    let rank = singular_values.iter().filter(|&&s| s > rank_tol * sigma_max).count();
    let u = svd.u.as_ref().expect("requested");
    let v_t = svd.v_t.as_ref().expect("requested");
    let n = m0.nrows();
    let mut ur = DMatrix::zeros(n, rank);
    let mut svr = DMatrix::zeros(rank, m0.ncols());
    for (col, &(idx, s)) in sv.iter().take(rank).enumerate() {
        ur.set_column(col, &u.column(idx));
        svr.set_row(col, &(v_t.row(idx) * Complex64::new(s, 0.0)));
    }
    let small = &svr * &ur;
    let (values, vectors) = small_eigen(&small);
    let mut pairs: Vec<(Complex64, DVector<Complex64>)> = values
        .into_iter()
        .zip(vectors)
        .map(|(lambda, y)| {
            let mut x = &ur * y;
            super::linalg::fix_phase(&mut x);
            (lambda, x)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()));
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    ResidueAnalysis {
        rank,
        singular_values,
        eigenvalues,
        eigenvectors,
        no_pole: false,
    }
}

/// Eigenpairs of a small dense matrix from its complex Schur form.
fn small_eigen(a: &DMatrix<Complex64>) -> (Vec<Complex64>, Vec<DVector<Complex64>>) {
    let n = a.nrows();
    let (q, t) = Schur::new(a.clone()).unpack();
    let scale = t.norm().max(f64::MIN_POSITIVE);
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = t[(i, i)];
        let mut x = DVector::zeros(n);
        x[i] = Complex64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in j + 1..=i {
                acc += t[(j, l)] * x[l];
            }
            let mut d = t[(j, j)] - lambda;
            if d.norm() < 1e-14 * scale {
                d = Complex64::new(1e-14 * scale, 0.0);
            }
            x[j] = -acc / d;
        }
        let y = &q * x;
        let norm = y.norm();
        values.push(lambda);
        vectors.push(y / Complex64::new(norm, 0.0));
    }
    (values, vectors)
}
