//! Multiple scattering by a finite collection of circular rods.
//!
//! Fields are expanded in cylinder harmonics `Z_n(k r) e^{inθ}` about each
//! rod center, with the time dependence `e^{-iωt}` so that `H⁽¹⁾` is the
//! outgoing wave and resonance poles lie below the real `k` axis. The
//! per-rod outgoing amplitudes solve the Foldy–Lax system and are gathered
//! into a global scattering amplitude `T(k)` about the origin with the
//! normalization that makes `S = I + T` unitary for lossless rods at real `k`.

pub(crate) mod foldy_lax;
mod mie;
mod tmatrix;
mod translation;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::Cylinder;
use crate::specfun::SpecfunError;

pub use foldy_lax::{plane_wave_local_coeffs, solve_foldy_lax, FoldyLaxSystem, IncidentField, LocalSolution};
pub use mie::{mie_coefficients, MieCoefficients};
pub use tmatrix::{global_tmatrix, local_to_global, TMatrix};
pub use translation::{translation_matrix, TranslationKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MstError {
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Mie system singular for order {order} at k = {k}")]
    SingularMie { order: i64, k: Complex64 },
    #[error("Foldy-Lax system singular at k = {k} (pivot ratio {condition_estimate:.3e})")]
    SolverFailure { k: Complex64, condition_estimate: f64 },
}

/// Multipole orders kept per rod (`-m_cyl..=m_cyl`) and about the origin
/// (`-l_glob..=l_glob`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Truncation {
    pub m_cyl: usize,
    pub l_glob: usize,
}

impl Truncation {
    pub fn new(m_cyl: usize, l_glob: usize) -> Result<Self, MstError> {
        if m_cyl < 1 || l_glob < 1 {
            return Err(MstError::InvalidArgument(format!(
                "truncation orders must be >= 1 (got m_cyl = {m_cyl}, l_glob = {l_glob})"
            )));
        }
        Ok(Self { m_cyl, l_glob })
    }

    /// `m_cyl = max(4, ceil(x + 4 x^{1/3}) + 2)` with `x = |k_b| r_max`, and
    /// `l_glob = ceil(|k_b| R_circ) + 8`.
    pub fn default_for(k: Complex64, cylinders: &[Cylinder]) -> Self {
        let (r_max, r_circ, n_bg) = cylinders.iter().fold((0.0f64, 0.0f64, 1.0f64), |acc, c| {
            (
                acc.0.max(c.radius),
                acc.1.max(c.outer_reach()),
                acc.2.max(c.eps_bg.sqrt().norm()),
            )
        });
        let kb = k.norm() * n_bg;
        let x = kb * r_max;
        let m_cyl = 4usize.max((x + 4.0 * x.cbrt()).ceil() as usize + 2);
        let big = kb * r_circ;
        let l_glob = if cylinders.is_empty() {
            1
        } else {
            big.ceil() as usize + 8
        };
        Self { m_cyl, l_glob }
    }
}

/// Maps a signed harmonic order `n ∈ -order..=order` to a storage index.
#[inline]
pub fn harmonic_index(n: i64, order: usize) -> usize {
    (n + order as i64) as usize
}

/// Signed harmonic orders `-order..=order`.
pub fn orders(order: usize) -> impl Iterator<Item = i64> + Clone {
    let o = order as i64;
    -o..=o
}

pub(crate) fn background_wavenumber(k: Complex64, cylinders: &[Cylinder]) -> Result<Complex64, MstError> {
    let Some(first) = cylinders.first() else {
        return Ok(k);
    };
    if cylinders.iter().any(|c| c.eps_bg != first.eps_bg) {
        return Err(MstError::InvalidArgument(
            "all cylinders must share the same background permittivity".into(),
        ));
    }
    Ok(k * first.eps_bg.sqrt())
}
