use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{harmonic_index, MstError};
use crate::specfun::cyl_bessel_family;

/// Which Graf re-expansion a translation matrix performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslationKind {
    /// `J` about the source to `J` about the target; valid everywhere.
    RegularToRegular,
    /// `H⁽¹⁾` about the source to `J` about the target; valid for
    /// `|x - target| < |shift|`.
    OutgoingToRegular,
    /// `H⁽¹⁾` about the source to `H⁽¹⁾` about the target; valid for
    /// `|x - target| > |shift|`.
    OutgoingToOutgoing,
}

/// Re-expands a cylindrical-wave series about a new center.
///
/// `shift = target − source`. With `d = |shift|` and `φ = arg(shift)` the
/// entry coupling source order `n` to target order `m` is
/// `F_{n−m}(k d) e^{i(n−m)φ}`, with `F = H⁽¹⁾` for outgoing-to-regular and
/// `F = J` otherwise. The result has `2 rows + 1` rows and `2 cols + 1`
/// columns.
pub fn translation_matrix(
    kind: TranslationKind,
    k: Complex64,
    shift: [f64; 2],
    rows: usize,
    cols: usize,
) -> Result<DMatrix<Complex64>, MstError> {
    let d = shift[0].hypot(shift[1]);
    if kind == TranslationKind::OutgoingToRegular && d == 0.0 {
        return Err(MstError::InvalidArgument(
            "outgoing-to-regular translation needs a nonzero shift".into(),
        ));
    }
    let phi = shift[1].atan2(shift[0]);
    let span = rows + cols;
    let family = cyl_bessel_family(span, k * d)?;
    let values: Vec<Complex64> = (-(span as i64)..=span as i64)
        .map(|p| {
            let radial = match kind {
                TranslationKind::OutgoingToRegular => family.h1_signed(p),
                _ => family.j_signed(p),
            };
            radial * Complex64::from_polar(1.0, p as f64 * phi)
        })
        .collect();
    let mut out = DMatrix::zeros(2 * rows + 1, 2 * cols + 1);
    for m in -(rows as i64)..=rows as i64 {
        for n in -(cols as i64)..=cols as i64 {
            out[(harmonic_index(m, rows), harmonic_index(n, cols))] =
                values[harmonic_index(n - m, span)];
        }
    }
    Ok(out)
}
