//! Fields, Poynting-flux transmission and resonance-mode maps.

mod field;
mod flux;
mod mode;

use num_complex::Complex64;
use thiserror::Error;

use crate::mst::MstError;

pub use field::{field_and_gradient_at, field_at, global_coefficients, outgoing_sum, scattered_at};
pub use flux::{plane_wave_solution, segment_flux, spectrum, transmission, Segment, TransmissionSeries};
pub use mode::{
    alignment, field_map, mode_map, null_mode, rotation_check, FieldKind, FieldMap, Grid, NullMode, RotationCheck,
    NULL_MODE_THRESHOLD,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservableError {
    #[error(transparent)]
    Mst(#[from] MstError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("measurement segment intersects rod {index}")]
    SegmentIntersectsRod { index: usize },
    #[error("point ({}, {}) lies inside rod {index}", point[0], point[1])]
    InsideRod { point: [f64; 2], index: usize },
    #[error("incident field is only known through local coefficients")]
    IncidentUnknown,
    #[error("k = {k} is not a pole: σ_min/σ_max = {sigma_ratio:.3e}")]
    NotAPole { k: Complex64, sigma_ratio: f64 },
}
