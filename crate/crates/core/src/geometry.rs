//! Cylinder collections built from a square-lattice description.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("removed site ({i}, {j}) outside the {nx}x{ny} lattice")]
    SiteOutOfRange { i: i64, j: i64, nx: usize, ny: usize },
    #[error("removed site ({0}, {1}) listed twice")]
    DuplicateSite(i64, i64),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("permittivity {0} has negative imaginary part")]
    GainMedium(Complex64),
}

/// Electric field along the rod axis (TM) or magnetic field along it (TE).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Polarization {
    #[default]
    #[serde(rename = "E-parallel")]
    EParallel,
    #[serde(rename = "H-parallel")]
    HParallel,
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::EParallel => f.write_str("E-parallel"),
            Polarization::HParallel => f.write_str("H-parallel"),
        }
    }
}

/// A homogeneous circular rod in a homogeneous background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    pub center: [f64; 2],
    pub radius: f64,
    pub eps_rod: Complex64,
    pub eps_bg: Complex64,
}

impl Cylinder {
    pub fn new(center: [f64; 2], radius: f64, eps_rod: Complex64, eps_bg: Complex64) -> Self {
        Self {
            center,
            radius,
            eps_rod,
            eps_bg,
        }
    }

    /// Distance from the origin to the farthest point of the rod.
    pub fn outer_reach(&self) -> f64 {
        self.center[0].hypot(self.center[1]) + self.radius
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        (p[0] - self.center[0]).hypot(p[1] - self.center[1]) < self.radius
    }
}

/// Square lattice of `nx × ny` identical rods with optional vacancies.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalSpec {
    pub nx: usize,
    pub ny: usize,
    pub pitch: f64,
    pub radius: f64,
    pub eps_rod: Complex64,
    pub eps_bg: Complex64,
    pub removed: Vec<(i64, i64)>,
    pub polarization: Polarization,
}

impl CrystalSpec {
    /// The 7×7 rod crystal with its central rod removed.
    pub fn defect_7x7(radius: f64) -> Self {
        Self {
            nx: 7,
            ny: 7,
            pitch: 1.0,
            radius,
            eps_rod: Complex64::new(9.0, 0.0),
            eps_bg: Complex64::new(1.0, 0.0),
            removed: vec![(3, 3)],
            polarization: Polarization::EParallel,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.nx == 0 {
            return Err(GeometryError::NonPositive("nx"));
        }
        if self.ny == 0 {
            return Err(GeometryError::NonPositive("ny"));
        }
        if !(self.pitch > 0.0) {
            return Err(GeometryError::NonPositive("pitch"));
        }
        if !(self.radius > 0.0) {
            return Err(GeometryError::NonPositive("radius"));
        }
        for eps in [self.eps_rod, self.eps_bg] {
            if eps.im < 0.0 {
                return Err(GeometryError::GainMedium(eps));
            }
        }
        let mut seen = BTreeSet::new();
        for &(i, j) in &self.removed {
            if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
                return Err(GeometryError::SiteOutOfRange {
                    i,
                    j,
                    nx: self.nx,
                    ny: self.ny,
                });
            }
            if !seen.insert((i, j)) {
                return Err(GeometryError::DuplicateSite(i, j));
            }
        }
        Ok(())
    }
}

/// Lays out the lattice centered on the origin, row-major in `(j, i)`.
pub fn build_crystal(spec: &CrystalSpec) -> Result<Vec<Cylinder>, GeometryError> {
    spec.validate()?;
    let removed: BTreeSet<(i64, i64)> = spec.removed.iter().copied().collect();
    let half_x = (spec.nx as f64 - 1.0) / 2.0;
    let half_y = (spec.ny as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(spec.nx * spec.ny - removed.len());
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            if removed.contains(&(i as i64, j as i64)) {
                continue;
            }
            let center = [
                (i as f64 - half_x) * spec.pitch,
                (j as f64 - half_y) * spec.pitch,
            ];
            out.push(Cylinder::new(center, spec.radius, spec.eps_rod, spec.eps_bg));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub severity: Severity,
    pub pair: (usize, usize),
    pub distance: f64,
    pub radius_sum: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    pub fn count(&self, severity: Severity) -> usize {
        self.findings.iter().filter(|f| f.severity == severity).count()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return f.write_str("geometry clean");
        }
        for finding in &self.findings {
            let tag = match finding.severity {
                Severity::Warning => "WARNING touching",
                Severity::Error => "ERROR overlap",
            };
            writeln!(
                f,
                "{tag}: rods {} and {} (distance {:.6}, radius sum {:.6})",
                finding.pair.0, finding.pair.1, finding.distance, finding.radius_sum
            )?;
        }
        Ok(())
    }
}

/// Flags overlapping pairs as errors and touching pairs (gap below one part
/// in 1e9 of the radius sum) as warnings.
pub fn validate_geometry(cylinders: &[Cylinder]) -> ValidationReport {
    let mut report = ValidationReport::default();
    for a in 0..cylinders.len() {
        for b in a + 1..cylinders.len() {
            let (ca, cb) = (&cylinders[a], &cylinders[b]);
            let distance = (ca.center[0] - cb.center[0]).hypot(ca.center[1] - cb.center[1]);
            let radius_sum = ca.radius + cb.radius;
            let severity = if distance < radius_sum {
                Severity::Error
            } else if distance <= radius_sum * (1.0 + 1e-9) {
                Severity::Warning
            } else {
                continue;
            };
            report.findings.push(Finding {
                severity,
                pair: (a, b),
                distance,
                radius_sum,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(nx: usize, ny: usize, radius: f64, removed: Vec<(i64, i64)>) -> CrystalSpec {
        CrystalSpec {
            nx,
            ny,
            pitch: 1.0,
            radius,
            eps_rod: Complex64::new(9.0, 0.0),
            eps_bg: Complex64::new(1.0, 0.0),
            removed,
            polarization: Polarization::EParallel,
        }
    }

    #[test]
    fn seven_by_seven_with_central_vacancy() {
        let rods = build_crystal(&spec(7, 7, 0.25, vec![(3, 3)])).unwrap();
        assert_eq!(rods.len(), 48);
        assert!(rods.iter().all(|c| c.center != [0.0, 0.0]));
        let max = rods
            .iter()
            .flat_map(|c| c.center)
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert_eq!(max, 3.0);
        // row-major in (j, i)
        assert_eq!(rods[0].center, [-3.0, -3.0]);
        assert_eq!(rods[1].center, [-2.0, -3.0]);
        assert_eq!(rods[7].center, [-3.0, -2.0]);
    }

    #[test]
    fn single_site_and_fully_removed() {
        let one = build_crystal(&spec(1, 1, 0.3, vec![])).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].center, [0.0, 0.0]);
        let none = build_crystal(&spec(2, 2, 0.3, vec![(0, 0), (1, 0), (0, 1), (1, 1)])).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn bad_removals_rejected() {
        assert!(matches!(
            build_crystal(&spec(3, 3, 0.3, vec![(3, 0)])),
            Err(GeometryError::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            build_crystal(&spec(3, 3, 0.3, vec![(1, 1), (1, 1)])),
            Err(GeometryError::DuplicateSite(1, 1))
        ));
    }

    #[test]
    fn overlap_touching_and_clean() {
        let eps = Complex64::new(9.0, 0.0);
        let bg = Complex64::new(1.0, 0.0);
        let overlap = [
            Cylinder::new([0.0, 0.0], 0.3, eps, bg),
            Cylinder::new([0.5, 0.0], 0.3, eps, bg),
        ];
        let r = validate_geometry(&overlap);
        assert_eq!(r.count(Severity::Error), 1);

        let touching = build_crystal(&spec(2, 1, 0.5, vec![])).unwrap();
        let r = validate_geometry(&touching);
        assert_eq!(r.count(Severity::Warning), 1);
        assert!(!r.has_errors());

        let clean = build_crystal(&spec(3, 3, 0.3, vec![])).unwrap();
        assert!(validate_geometry(&clean).is_clean());
    }

    #[test]
    fn rotation_invariance_of_odd_lattice() {
        let rods = build_crystal(&spec(5, 5, 0.2, vec![(2, 2), (0, 2), (2, 0), (4, 2), (2, 4)])).unwrap();
        let set: BTreeSet<(i64, i64)> = rods
            .iter()
            .map(|c| (c.center[0] as i64, c.center[1] as i64))
            .collect();
        let rotated: BTreeSet<(i64, i64)> = set.iter().map(|&(x, y)| (-y, x)).collect();
        assert_eq!(set, rotated);
    }
}
