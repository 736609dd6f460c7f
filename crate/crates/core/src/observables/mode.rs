use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::field_at;
use super::ObservableError;
use crate::geometry::{Cylinder, Polarization};
use crate::mst::{FoldyLaxSystem, IncidentField, LocalSolution};

/// Largest `σ_min / σ_max` accepted as a pole.
pub const NULL_MODE_THRESHOLD: f64 = 1e-4;

/// Source-free solution of the Foldy–Lax system at a pole.
#[derive(Debug, Clone)]
pub struct NullMode {
    pub k: Complex64,
    /// Extreme singular values of the balanced Foldy–Lax matrix.
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Stacked outgoing amplitudes, unit norm, first significant entry real
    /// and positive.
    pub coefficients: DVector<Complex64>,
    pub solution: LocalSolution,
}

impl NullMode {
    pub fn sigma_ratio(&self) -> f64 {
        self.sigma_min / self.sigma_max
    }
}

fn normalize(v: DVector<Complex64>) -> DVector<Complex64> {
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Makes the first entry above `1e-8` of the largest one real and positive.
fn fix_first_phase(v: &mut DVector<Complex64>) {
    let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if let Some(first) = v.iter().copied().find(|x| x.norm() > 1e-8 * max) {
        *v *= first.conj() / first.norm();
    }
}

/// Null vector of the Foldy–Lax system at a pole.
///
/// A source-free solution satisfies `(D⁻¹ − H) b = 0`. Singular values are
/// taken for the balanced matrix `M = W (D⁻¹ − H) W` with
/// `W = diag(min(|s_n|, 1))^{1/2}`: orders with `|s_n| < 1` are scaled as in
/// `|D|^{-1/2} A |D|^{1/2}` up to a unitary row factor, while resonant orders
/// keep `1/s_n`, which vanishes at a pole of an isolated rod. `σ_min` comes
/// from inverse iteration with `(M†M)⁻¹`, `σ_max` from power iteration with
/// `M†M`, both from the all-ones start vector. The returned coefficients are
/// the physical amplitudes `b = W x`.
pub fn null_mode(
    k_p: Complex64,
    cylinders: &[Cylinder],
    polarization: Polarization,
    m_cyl: usize,
) -> Result<NullMode, ObservableError> {
    if cylinders.is_empty() {
        return Err(ObservableError::InvalidArgument("null mode needs at least one rod".into()));
    }
    let system = FoldyLaxSystem::assemble(k_p, cylinders, polarization, m_cyl)?;
    let s = system.mie_diagonal();
    let weight: Vec<f64> = s.iter().map(|s| s.norm().min(1.0).sqrt()).collect();
    let h = system.coupling();
    let n = h.nrows();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i != j {
            Complex64::new(0.0, 0.0)
        } else if s[i] == Complex64::new(0.0, 0.0) {
            Complex64::new(1.0, 0.0)
        } else {
            weight[i] * weight[i] / s[i]
        };
        diag - h[(i, j)] * (weight[i] * weight[j])
    });
    let ones = normalize(DVector::from_element(n, Complex64::new(1.0, 0.0)));

    let lu = a.clone().lu();
    let adjoint_lu = a.adjoint().lu();
    let mut x = ones.clone();
    let mut sigma_min = f64::INFINITY;
    for _ in 0..100 {
        let y = adjoint_lu.solve(&x).and_then(|z| lu.solve(&z));
        let Some(y) = y else {
            sigma_min = 0.0;
            break;
        };
        x = normalize(y);
        let s = (&a * &x).norm();
        let done = (s - sigma_min).abs() <= 1e-12 * s.max(f64::MIN_POSITIVE);
        sigma_min = s;
        if done {
            break;
        }
    }

    let mut w = ones;
    let mut sigma_max = 0.0f64;
    for _ in 0..1000 {
        let aw = &a * &w;
        let s = aw.norm();
        w = normalize(a.adjoint() * aw);
        let done = (s - sigma_max).abs() <= 1e-10 * s;
        sigma_max = s;
        if done {
            break;
        }
    }

    let ratio = sigma_min / sigma_max;
    if !(ratio <= NULL_MODE_THRESHOLD) {
        return Err(ObservableError::NotAPole { k: k_p, sigma_ratio: ratio });
    }
    let mut x = normalize(DVector::from_iterator(n, x.iter().zip(&weight).map(|(v, w)| v * *w)));
    fix_first_phase(&mut x);
    let block = system.block();
    let zero = vec![Complex64::new(0.0, 0.0); block];
    let solution = system.local_solution(
        IncidentField::None,
        vec![zero; cylinders.len()],
        x.iter().copied().collect(),
        sigma_min,
    );
    Ok(NullMode {
        k: k_p,
        sigma_min,
        sigma_max,
        coefficients: x,
        solution,
    })
}

/// How a nondegenerate mode transforms under a 90° rotation about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationCheck {
    /// Eigenvalue of the rotation on the mode, unimodular for a symmetric mode.
    pub phase: Complex64,
    /// `‖R b − phase · b‖ / ‖b‖`.
    pub defect: f64,
}

/// Applies the 90° rotation to the outgoing amplitudes: the rod at `c` moves
/// to `R c` and its order-`n` amplitude picks up `(−i)^n`.
pub fn rotation_check(solution: &LocalSolution) -> Result<RotationCheck, ObservableError> {
    let block = 2 * solution.m_cyl + 1;
    let b = DVector::from_iterator(block * solution.b.len(), solution.b.iter().flatten().copied());
    let mut rotated = DVector::zeros(b.len());
    for (j, cyl) in solution.cylinders.iter().enumerate() {
        let image = [-cyl.center[1], cyl.center[0]];
        let target = solution
            .cylinders
            .iter()
            .position(|c| (c.center[0] - image[0]).hypot(c.center[1] - image[1]) < 1e-9 && c.radius == cyl.radius)
            .ok_or_else(|| ObservableError::InvalidArgument(format!("rod {j} has no image under a quarter turn")))?;
        for (p, n) in (-(solution.m_cyl as i64)..=solution.m_cyl as i64).enumerate() {
            rotated[target * block + p] = b[j * block + p] * Complex64::new(0.0, -1.0).powi(n as i32);
        }
    }
    let norm2 = b.norm_squared();
    let phase = b.dotc(&rotated) / norm2;
    let defect = (&rotated - &b * phase).norm() / norm2.sqrt();
    Ok(RotationCheck { phase, defect })
}

/// `|a†b| / (‖a‖ ‖b‖)`.
pub fn alignment(a: &[Complex64], b: &[Complex64]) -> f64 {
    let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    dot.norm() / (na * nb)
}

/// Rectangular sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl Grid {
    pub fn validate(&self) -> Result<(), ObservableError> {
        let ok = self.nx >= 2
            && self.ny >= 2
            && self.x_min.is_finite()
            && self.y_min.is_finite()
            && self.x_max > self.x_min
            && self.y_max > self.y_min
            && self.x_max.is_finite()
            && self.y_max.is_finite();
        if ok {
            Ok(())
        } else {
            Err(ObservableError::InvalidArgument(format!("degenerate grid {self:?}")))
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + (self.y_max - self.y_min) * j as f64 / (self.ny - 1) as f64
    }

    /// Row-major by `y`, then `x`.
    pub fn points(&self) -> Vec<[f64; 2]> {
        (0..self.ny)
            .flat_map(|j| (0..self.nx).map(move |i| [self.x(i), self.y(j)]))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Scattering,
    Mode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub grid: Grid,
    /// `ny` rows of `nx` values.
    pub values: Vec<Complex64>,
    pub k: Complex64,
    pub kind: FieldKind,
}

impl FieldMap {
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.grid.nx + i]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,re,im,abs2\n");
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let v = self.at(i, j);
                out.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    self.grid.x(i),
                    self.grid.y(j),
                    v.re,
                    v.im,
                    v.norm_sqr()
                ));
            }
        }
        out
    }
}

pub fn field_map(solution: &LocalSolution, grid: &Grid, kind: FieldKind) -> Result<FieldMap, ObservableError> {
    grid.validate()?;
    let values = field_at(solution, &grid.points())?;
    Ok(FieldMap {
        grid: *grid,
        values,
        k: solution.k,
        kind,
    })
}

/// Field of a null mode on a grid, from the rod expansions.
pub fn mode_map(mode: &NullMode, grid: &Grid) -> Result<FieldMap, ObservableError> {
    field_map(&mode.solution, grid, FieldKind::Mode)
}
