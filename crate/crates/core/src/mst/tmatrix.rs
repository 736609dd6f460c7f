use nalgebra::DMatrix;
use num_complex::Complex64;

use super::foldy_lax::FoldyLaxSystem;
use super::translation::{translation_matrix, TranslationKind};
use super::{background_wavenumber, harmonic_index, MstError, Truncation};
use crate::geometry::{Cylinder, Polarization};

/// Truncated scattering amplitude about the origin.
///
/// Row `n`, column `m` (stored at `n + order`, `m + order`) is the outgoing
/// `H⁽¹⁾_n` amplitude produced by the incoming part of the global harmonic
/// `m`, scaled so that `S = I + T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TMatrix {
    pub k: Complex64,
    pub order: usize,
    pub entries: DMatrix<Complex64>,
}

impl TMatrix {
    pub fn zeros(k: Complex64, order: usize) -> Self {
        let dim = 2 * order + 1;
        Self {
            k,
            order,
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn at(&self, n: i64, m: i64) -> Complex64 {
        self.entries[(harmonic_index(n, self.order), harmonic_index(m, self.order))]
    }

    pub fn scattering_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::identity(self.dimension(), self.dimension()) + &self.entries
    }

    /// `‖S†S − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let s = self.scattering_matrix();
        (s.adjoint() * &s - DMatrix::identity(self.dimension(), self.dimension())).norm()
    }

    /// `max |T[n,m] − (−1)^{n+m} T[−m,−n]| / ‖T‖_F`.
    pub fn reciprocity_defect(&self) -> f64 {
        let o = self.order as i64;
        let scale = self.entries.norm().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for n in -o..=o {
            for m in -o..=o {
                let sign = if (n + m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                worst = worst.max((self.at(n, m) - self.at(-m, -n) * sign).norm());
            }
        }
        worst / scale
    }

    /// Largest entry with `n − m ≢ 0 (mod 4)`, relative to `‖T‖_F`.
    pub fn c4_selection_defect(&self) -> f64 {
        let o = self.order as i64;
        let scale = self.entries.norm().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for n in -o..=o {
            for m in -o..=o {
                if (n - m).rem_euclid(4) != 0 {
                    worst = worst.max(self.at(n, m).norm());
                }
            }
        }
        worst / scale
    }
}

/// Regular global harmonics `J_m(k_b r) e^{imθ}` of orders `-l..=l`
/// re-expanded about every rod, stacked rod by rod.
pub(crate) fn global_to_local(kb: Complex64, cylinders: &[Cylinder], trunc: Truncation) -> Result<DMatrix<Complex64>, MstError> {
    let block = 2 * trunc.m_cyl + 1;
    let mut out = DMatrix::zeros(block * cylinders.len(), 2 * trunc.l_glob + 1);
    for (j, c) in cylinders.iter().enumerate() {
        let t = translation_matrix(TranslationKind::RegularToRegular, kb, c.center, trunc.m_cyl, trunc.l_glob)?;
        out.view_mut((j * block, 0), (block, 2 * trunc.l_glob + 1)).copy_from(&t);
    }
    Ok(out)
}

/// Outgoing rod expansions re-expanded about the origin, valid outside the
/// circumscribing disk.
pub fn local_to_global(kb: Complex64, cylinders: &[Cylinder], trunc: Truncation) -> Result<DMatrix<Complex64>, MstError> {
    let block = 2 * trunc.m_cyl + 1;
    let mut out = DMatrix::zeros(2 * trunc.l_glob + 1, block * cylinders.len());
    for (j, c) in cylinders.iter().enumerate() {
        let shift = [-c.center[0], -c.center[1]];
        let t = translation_matrix(TranslationKind::OutgoingToOutgoing, kb, shift, trunc.l_glob, trunc.m_cyl)?;
        out.view_mut((0, j * block), (2 * trunc.l_glob + 1, block)).copy_from(&t);
    }
    Ok(out)
}

/// Assembles `T(k)`: regular global waves are pushed to every rod, the
/// Foldy–Lax system is solved for all of them with one factorization, and the
/// outgoing rod waves are gathered back about the origin.
pub fn global_tmatrix(
    k: Complex64,
    cylinders: &[Cylinder],
    polarization: Polarization,
    trunc: Truncation,
) -> Result<TMatrix, MstError> {
    if cylinders.is_empty() {
        return Ok(TMatrix::zeros(k, trunc.l_glob));
    }
    let system = FoldyLaxSystem::assemble(k, cylinders, polarization, trunc.m_cyl)?;
    tmatrix_from_system(&system, trunc.l_glob)
}

pub(crate) fn tmatrix_from_system(system: &FoldyLaxSystem, l_glob: usize) -> Result<TMatrix, MstError> {
    let trunc = Truncation {
        m_cyl: system.m_cyl,
        l_glob,
    };
    let kb = background_wavenumber(system.k, &system.cylinders)?;
    let incident = global_to_local(kb, &system.cylinders, trunc)?;
    let outgoing = system.solve_stacked(&incident)?;
    let gather = local_to_global(kb, &system.cylinders, trunc)?;
    Ok(TMatrix {
        k: system.k,
        order: l_glob,
        entries: gather * outgoing * Complex64::new(2.0, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mst::mie_coefficients;

    #[test]
    fn empty_collection_has_zero_t() {
        let t = global_tmatrix(Complex64::new(1.0, 0.0), &[], Polarization::EParallel, Truncation::new(4, 5).unwrap()).unwrap();
        assert_eq!(t.entries.norm(), 0.0);
        assert_eq!(t.scattering_matrix(), DMatrix::identity(11, 11));
    }

    #[test]
    fn centered_rod_gives_diagonal_t() {
        let k = Complex64::new(1.5, -0.1);
        let rod = Cylinder::new([0.0, 0.0], 0.3, Complex64::new(9.0, 0.0), Complex64::new(1.0, 0.0));
        let t = global_tmatrix(k, &[rod], Polarization::HParallel, Truncation::new(6, 6).unwrap()).unwrap();
        let mie = mie_coefficients(k, &rod, Polarization::HParallel, 6).unwrap();
        for n in -6..=6i64 {
            for m in -6..=6i64 {
                let expect = if n == m { mie.s_at(n) * 2.0 } else { Complex64::new(0.0, 0.0) };
                assert!((t.at(n, m) - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
            }
        }
    }
}
