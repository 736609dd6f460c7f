use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;

use super::translation::{translation_matrix, TranslationKind};
use super::{background_wavenumber, harmonic_index, mie_coefficients, MieCoefficients, MstError, Truncation};
use crate::geometry::{Cylinder, Polarization};
use crate::specfun::cyl_bessel_family;

/// Field illuminating the collection.
#[derive(Debug, Clone, PartialEq)]
pub enum IncidentField {
    /// No illumination; used for resonance modes.
    None,
    /// `e^{i k_b (x cos θ + y sin θ)}`.
    PlaneWave { angle: f64 },
    /// The regular global harmonic `J_m(k_b r) e^{imθ}` about the origin.
    RegularHarmonic { order: i64 },
    /// Arbitrary local regular coefficients per rod; the field itself is not
    /// known away from the rods, so only scattered and interior parts can be
    /// evaluated.
    Local(Vec<Vec<Complex64>>),
}

impl IncidentField {
    pub fn local_coefficients(
        &self,
        kb: Complex64,
        cylinders: &[Cylinder],
        m_cyl: usize,
    ) -> Result<Vec<Vec<Complex64>>, MstError> {
        let zero = || vec![Complex64::new(0.0, 0.0); 2 * m_cyl + 1];
        match self {
            IncidentField::None => Ok(cylinders.iter().map(|_| zero()).collect()),
            IncidentField::PlaneWave { angle } => Ok(plane_wave_coeffs_kb(kb, *angle, cylinders, m_cyl)),
            IncidentField::RegularHarmonic { order } => {
                let l = order.unsigned_abs() as usize;
                cylinders
                    .iter()
                    .map(|c| {
                        let t = translation_matrix(TranslationKind::RegularToRegular, kb, c.center, m_cyl, l)?;
                        Ok(t.column(harmonic_index(*order, l)).iter().copied().collect())
                    })
                    .collect()
            }
            IncidentField::Local(a) => {
                if a.len() != cylinders.len() || a.iter().any(|v| v.len() != 2 * m_cyl + 1) {
                    return Err(MstError::InvalidArgument(
                        "local incident coefficients do not match the truncation".into(),
                    ));
                }
                Ok(a.clone())
            }
        }
    }

    /// Value and gradient at `p`, or `None` when the field is only known
    /// through local coefficients.
    pub fn value_and_gradient(&self, kb: Complex64, p: [f64; 2]) -> Option<(Complex64, [Complex64; 2])> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            IncidentField::None => Some((zero, [zero, zero])),
            IncidentField::PlaneWave { angle } => {
                let (s, c) = angle.sin_cos();
                let u = (Complex64::i() * kb * (p[0] * c + p[1] * s)).exp();
                let g = Complex64::i() * kb * u;
                Some((u, [g * c, g * s]))
            }
            IncidentField::RegularHarmonic { order } => {
                let l = order.unsigned_abs() as usize;
                let mut coeffs = vec![zero; 2 * l + 1];
                coeffs[harmonic_index(*order, l)] = Complex64::new(1.0, 0.0);
                harmonic_sum(&coeffs, l, Radial::Regular, kb, p).ok()
            }
            IncidentField::Local(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Radial {
    Regular,
    Outgoing,
}

/// `Σ_n coeffs[n] Z_n(k ρ) e^{inθ}` and its Cartesian gradient at the
/// relative position `rel`, using `(∂x ± i∂y)(Z_n e^{inθ}) = ∓k Z_{n±1} e^{i(n±1)θ}`.
pub(crate) fn harmonic_sum(
    coeffs: &[Complex64],
    order: usize,
    radial: Radial,
    k: Complex64,
    rel: [f64; 2],
) -> Result<(Complex64, [Complex64; 2]), MstError> {
    let rho = rel[0].hypot(rel[1]);
    let theta = rel[1].atan2(rel[0]);
    let fam = cyl_bessel_family(order + 1, k * rho)?;
    let z = |n: i64| match radial {
        Radial::Regular => fam.j_signed(n),
        Radial::Outgoing => fam.h1_signed(n),
    };
    let mut value = Complex64::new(0.0, 0.0);
    let mut plus = Complex64::new(0.0, 0.0);
    let mut minus = Complex64::new(0.0, 0.0);
    for n in -(order as i64)..=order as i64 {
        let a = coeffs[harmonic_index(n, order)];
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        value += a * z(n) * Complex64::from_polar(1.0, n as f64 * theta);
        plus -= a * z(n + 1) * Complex64::from_polar(1.0, (n + 1) as f64 * theta);
        minus += a * z(n - 1) * Complex64::from_polar(1.0, (n - 1) as f64 * theta);
    }
    let plus = plus * k;
    let minus = minus * k;
    let dx = (plus + minus) * 0.5;
    let dy = (plus - minus) / Complex64::new(0.0, 2.0);
    Ok((value, [dx, dy]))
}

fn plane_wave_coeffs_kb(kb: Complex64, angle: f64, cylinders: &[Cylinder], m_cyl: usize) -> Vec<Vec<Complex64>> {
    let (s, c) = angle.sin_cos();
    let base: Vec<Complex64> = (-(m_cyl as i64)..=m_cyl as i64)
        .map(|n| Complex64::i().powi(n as i32) * Complex64::from_polar(1.0, -(n as f64) * angle))
        .collect();
    cylinders
        .iter()
        .map(|cyl| {
            let phase = (Complex64::i() * kb * (cyl.center[0] * c + cyl.center[1] * s)).exp();
            base.iter().map(|v| v * phase).collect()
        })
        .collect()
}

/// Jacobi–Anger coefficients `i^n e^{-inθ0}` of a unit plane wave, shifted to
/// each rod center.
pub fn plane_wave_local_coeffs(
    k: Complex64,
    direction_angle: f64,
    cylinders: &[Cylinder],
    trunc: Truncation,
) -> Result<Vec<Vec<Complex64>>, MstError> {
    let kb = background_wavenumber(k, cylinders)?;
    Ok(plane_wave_coeffs_kb(kb, direction_angle, cylinders, trunc.m_cyl))
}

/// The assembled and factorized Foldy–Lax operator `I − D·H` at one `k`.
pub struct FoldyLaxSystem {
    pub k: Complex64,
    pub kb: Complex64,
    pub polarization: Polarization,
    pub m_cyl: usize,
    pub cylinders: Vec<Cylinder>,
    pub mie: Vec<MieCoefficients>,
    coupling: DMatrix<Complex64>,
    matrix: DMatrix<Complex64>,
    lu: LU<Complex64, Dyn, Dyn>,
}

impl FoldyLaxSystem {
    pub fn assemble(
        k: Complex64,
        cylinders: &[Cylinder],
        polarization: Polarization,
        m_cyl: usize,
    ) -> Result<Self, MstError> {
        let kb = background_wavenumber(k, cylinders)?;
        let block = 2 * m_cyl + 1;
        let dim = block * cylinders.len();

        let mie = cylinders
            .iter()
            .map(|c| mie_coefficients(k, c, polarization, m_cyl))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(m) = mie.iter().find(|m| m.is_singular()) {
            return Err(MstError::SingularMie { order: m.flagged[0], k });
        }

        let mut coupling = DMatrix::zeros(dim, dim);
        for (j, cj) in cylinders.iter().enumerate() {
            for (l, cl) in cylinders.iter().enumerate() {
                if j == l {
                    continue;
                }
                let shift = [cj.center[0] - cl.center[0], cj.center[1] - cl.center[1]];
                let t = translation_matrix(TranslationKind::OutgoingToRegular, kb, shift, m_cyl, m_cyl)?;
                coupling.view_mut((j * block, l * block), (block, block)).copy_from(&t);
            }
        }

        let mut matrix = DMatrix::identity(dim, dim);
        for (j, m) in mie.iter().enumerate() {
            for p in 0..block {
                let row = j * block + p;
                let s = m.s[p];
                for col in 0..dim {
                    matrix[(row, col)] -= s * coupling[(row, col)];
                }
            }
        }
        let lu = matrix.clone().lu();
        Ok(Self {
            k,
            kb,
            polarization,
            m_cyl,
            cylinders: cylinders.to_vec(),
            mie,
            coupling,
            matrix,
            lu,
        })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn block(&self) -> usize {
        2 * self.m_cyl + 1
    }

    /// `I − D·H`.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `H`: outgoing waves of rod `l` re-expanded as regular waves about rod `j`.
    pub fn coupling(&self) -> &DMatrix<Complex64> {
        &self.coupling
    }

    /// Mie diagonal `D` as a flat vector.
    pub fn mie_diagonal(&self) -> DVector<Complex64> {
        DVector::from_iterator(self.dimension(), self.mie.iter().flat_map(|m| m.s.iter().copied()))
    }

    pub fn lu(&self) -> &LU<Complex64, Dyn, Dyn> {
        &self.lu
    }

    fn failure(&self) -> MstError {
        let u = self.lu.u();
        let diag: Vec<f64> = (0..u.nrows()).map(|i| u[(i, i)].norm()).collect();
        let max = diag.iter().cloned().fold(0.0, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        MstError::SolverFailure {
            k: self.k,
            condition_estimate: if min > 0.0 { max / min } else { f64::INFINITY },
        }
    }

    /// Solves `(I − D·H) B = D·A` for a block of stacked right-hand sides.
    pub fn solve_stacked(&self, incident: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>, MstError> {
        let rhs = self.apply_mie(incident);
        self.lu.solve(&rhs).ok_or_else(|| self.failure())
    }

    pub(crate) fn apply_mie(&self, incident: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let d = self.mie_diagonal();
        let mut rhs = incident.clone();
        for (mut row, s) in rhs.row_iter_mut().zip(d.iter()) {
            row *= *s;
        }
        rhs
    }

    /// Solves for one illumination and fills interior amplitudes.
    pub fn solve(&self, incident: IncidentField) -> Result<LocalSolution, MstError> {
        let a = incident.local_coefficients(self.kb, &self.cylinders, self.m_cyl)?;
        let stacked = DMatrix::from_iterator(self.dimension(), 1, a.iter().flatten().copied());
        let rhs = self.apply_mie(&stacked);
        let b = self.lu.solve(&rhs).ok_or_else(|| self.failure())?;
        let residual = (&self.matrix * &b - &rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
        Ok(self.local_solution(incident, a, b.column(0).iter().copied().collect(), residual))
    }

    /// Packs outgoing amplitudes `b` into a [`LocalSolution`], deriving the
    /// interior amplitudes from the total exciting field `a + H·b`.
    pub fn local_solution(
        &self,
        incident: IncidentField,
        a: Vec<Vec<Complex64>>,
        b: Vec<Complex64>,
        residual: f64,
    ) -> LocalSolution {
        let block = self.block();
        let bv = DVector::from_column_slice(&b);
        let exciting = &self.coupling * &bv;
        let mut outgoing = Vec::with_capacity(self.cylinders.len());
        let mut interior = Vec::with_capacity(self.cylinders.len());
        for (j, m) in self.mie.iter().enumerate() {
            outgoing.push(b[j * block..(j + 1) * block].to_vec());
            interior.push(
                (0..block)
                    .map(|p| m.c[p] * (a[j][p] + exciting[j * block + p]))
                    .collect(),
            );
        }
        LocalSolution {
            k: self.k,
            kb: self.kb,
            polarization: self.polarization,
            m_cyl: self.m_cyl,
            cylinders: self.cylinders.clone(),
            incident,
            a,
            b: outgoing,
            c: interior,
            residual,
        }
    }
}

/// Per-rod regular (`a`), outgoing (`b`) and interior (`c`) amplitudes.
#[derive(Debug, Clone)]
pub struct LocalSolution {
    pub k: Complex64,
    pub kb: Complex64,
    pub polarization: Polarization,
    pub m_cyl: usize,
    pub cylinders: Vec<Cylinder>,
    pub incident: IncidentField,
    pub a: Vec<Vec<Complex64>>,
    pub b: Vec<Vec<Complex64>>,
    pub c: Vec<Vec<Complex64>>,
    /// `‖(I − D·H) b − D·a‖ / ‖D·a‖`.
    pub residual: f64,
}

pub fn solve_foldy_lax(
    k: Complex64,
    cylinders: &[Cylinder],
    polarization: Polarization,
    trunc: Truncation,
    incident: IncidentField,
) -> Result<LocalSolution, MstError> {
    FoldyLaxSystem::assemble(k, cylinders, polarization, trunc.m_cyl)?.solve(incident)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rod(center: [f64; 2]) -> Cylinder {
        Cylinder::new(center, 0.3, Complex64::new(9.0, 0.0), Complex64::new(1.0, 0.0))
    }

    #[test]
    fn single_rod_is_pure_mie() {
        let k = Complex64::new(2.0, -0.05);
        let rods = [rod([0.4, -0.2])];
        let trunc = Truncation::new(6, 4).unwrap();
        let sol = solve_foldy_lax(k, &rods, Polarization::EParallel, trunc, IncidentField::PlaneWave { angle: 0.7 }).unwrap();
        let mie = mie_coefficients(k, &rods[0], Polarization::EParallel, 6).unwrap();
        for p in 0..13 {
            assert_eq!(sol.b[0][p], mie.s[p] * sol.a[0][p]);
        }
    }

    #[test]
    fn plane_wave_at_origin_is_powers_of_i() {
        let trunc = Truncation::new(5, 5).unwrap();
        let a = plane_wave_local_coeffs(Complex64::new(1.7, 0.0), 0.0, &[rod([0.0, 0.0])], trunc).unwrap();
        for n in -5..=5i64 {
            let expect = Complex64::i().powi(n as i32);
            assert!((a[0][harmonic_index(n, 5)] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn mirror_pair_is_symmetric() {
        let k = Complex64::new(2.2, 0.0);
        let rods = [rod([-0.6, 0.0]), rod([0.6, 0.0])];
        let trunc = Truncation::new(7, 4).unwrap();
        let sol = solve_foldy_lax(
            k,
            &rods,
            Polarization::EParallel,
            trunc,
            IncidentField::PlaneWave { angle: std::f64::consts::FRAC_PI_2 },
        )
        .unwrap();
        // x -> -x maps Z_n e^{inθ} about one rod to Z_n e^{in(π-θ)} = Z_{-n} e^{-inθ}
        // (up to the parity of Z_{-n}) about the other.
        for n in -7..=7i64 {
            let lhs = sol.b[0][harmonic_index(n, 7)];
            let rhs = sol.b[1][harmonic_index(-n, 7)];
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()), "n={n} {lhs} {rhs}");
        }
    }
}
