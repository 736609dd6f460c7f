//! Resonance poles of a meromorphic matrix family `T(z)` from contour moments.
//!
//! For a loop enclosing a single simple pole `k_p`,
//!
//! ```text
//! M0 = (1/2πi) ∮ T(z) dz   = P_p
//! M1 = (1/2πi) ∮ z T(z) dz = k_p P_p
//! ```
//!
//! so the residue operator comes out of `M0` directly and the pole is the
//! proportionality factor between the two moments. Müller iteration on the
//! reciprocal of the dominant eigenvalue of `T` gives an independent
//! estimate, and [`limit_residue_diagnostic`] shows why the pointwise limit
//! `(k − k_p) T(k)` is not a usable route to `P_p`.

mod contour;
mod diagnostic;
mod extract;
mod linalg;
mod muller;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{Cylinder, Polarization};
use crate::mst::{global_tmatrix, MstError, TMatrix, Truncation};

pub use contour::{contour_quadrature, gauss_legendre, Contour, ContourShape, QuadratureRule};
pub use diagnostic::{limit_residue_diagnostic, LimitDiagnostic};
pub use extract::{
    extract_pole, moments, residue_analysis, ExtractOptions, MomentPair, PoleReport, PoleResult,
    ResidueAnalysis,
};
pub use linalg::{dominant_eigenpair, PowerIteration};
pub use muller::{muller_refine, MullerOptions, MullerResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoleError {
    #[error("invalid contour: {0}")]
    InvalidContour(String),
    #[error("contour is clockwise (signed area {signed_area:.3e}); list vertices counterclockwise")]
    Orientation { signed_area: f64 },
    #[error("operator evaluation failed at node {node} (z = {z}): {source}")]
    Evaluation {
        node: usize,
        z: Complex64,
        #[source]
        source: MstError,
    },
    #[error("no pole enclosed: ‖M0‖ = {m0_norm:.3e} is below the noise floor {floor:.3e}")]
    NoPoleEnclosed { m0_norm: f64, floor: f64 },
    #[error(
        "moments are not proportional (residual {consistency_residual:.3e} > {threshold:.1e}): \
         several poles or a pole of higher multiplicity inside the contour"
    )]
    MultiplePoles {
        consistency_residual: f64,
        threshold: f64,
        k_estimate: Complex64,
    },
    #[error("Müller iteration did not converge in {iterations} steps (best k = {best_k}, |g| = {best_objective:.3e})")]
    NoConvergence {
        iterations: usize,
        best_k: Complex64,
        best_objective: f64,
    },
    #[error("power iteration stagnated between eigenvalues of similar modulus at k = {k}")]
    DegenerateEigenvalue { k: Complex64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A matrix-valued function of a complex variable, e.g. `z ↦ T(z)`.
pub trait OperatorFamily: Sync {
    fn evaluate(&self, z: Complex64) -> Result<DMatrix<Complex64>, MstError>;
}

impl<F> OperatorFamily for F
where
    F: Fn(Complex64) -> Result<DMatrix<Complex64>, MstError> + Sync,
{
    fn evaluate(&self, z: Complex64) -> Result<DMatrix<Complex64>, MstError> {
        self(z)
    }
}

/// `z ↦ T(z)` for a fixed rod collection at a fixed truncation.
///
/// The truncation must not change along a contour, otherwise the sampled
/// function is not analytic; [`CrystalOperator::for_contour`] sizes it for
/// the largest `|z|` on the loop.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalOperator {
    pub cylinders: Vec<Cylinder>,
    pub polarization: Polarization,
    pub truncation: Truncation,
}

impl CrystalOperator {
    pub fn new(cylinders: Vec<Cylinder>, polarization: Polarization, truncation: Truncation) -> Self {
        Self {
            cylinders,
            polarization,
            truncation,
        }
    }

    pub fn for_contour(cylinders: Vec<Cylinder>, polarization: Polarization, contour: &Contour) -> Self {
        let truncation = Truncation::default_for(Complex64::new(contour.max_modulus(), 0.0), &cylinders);
        Self::new(cylinders, polarization, truncation)
    }

    pub fn tmatrix(&self, z: Complex64) -> Result<TMatrix, MstError> {
        global_tmatrix(z, &self.cylinders, self.polarization, self.truncation)
    }
}

impl OperatorFamily for CrystalOperator {
    fn evaluate(&self, z: Complex64) -> Result<DMatrix<Complex64>, MstError> {
        Ok(self.tmatrix(z)?.entries)
    }
}
