use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::field_and_gradient_at;
use super::ObservableError;
use crate::geometry::{Cylinder, Polarization};
use crate::mst::{FoldyLaxSystem, IncidentField, LocalSolution, Truncation};

/// Straight measurement segment for the Poynting flux.
///
/// The flux normal is the segment direction rotated clockwise, so a segment
/// running in `+x` measures flux in `−y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub start: [f64; 2],
    pub end: [f64; 2],
    /// Odd number of Simpson samples.
    pub samples: usize,
}

impl Segment {
    /// Horizontal segment of length `2 nx pitch` at `y = −(ny/2 + 1) pitch`,
    /// with 257 samples.
    pub fn below_crystal(nx: usize, ny: usize, pitch: f64) -> Self {
        let y = -(ny as f64 / 2.0 + 1.0) * pitch;
        let half = nx as f64 * pitch;
        Self {
            start: [-half, y],
            end: [half, y],
            samples: 257,
        }
    }

    pub fn length(&self) -> f64 {
        (self.end[0] - self.start[0]).hypot(self.end[1] - self.start[1])
    }

    pub fn normal(&self) -> [f64; 2] {
        let l = self.length();
        [(self.end[1] - self.start[1]) / l, -(self.end[0] - self.start[0]) / l]
    }

    pub fn translated(&self, shift: [f64; 2]) -> Self {
        Self {
            start: [self.start[0] + shift[0], self.start[1] + shift[1]],
            end: [self.end[0] + shift[0], self.end[1] + shift[1]],
            samples: self.samples,
        }
    }

    pub fn validate(&self, cylinders: &[Cylinder]) -> Result<(), ObservableError> {
        let l = self.length();
        if !(l > 0.0 && l.is_finite()) {
            return Err(ObservableError::InvalidArgument("segment has zero length".into()));
        }
        if self.samples < 3 || self.samples % 2 == 0 {
            return Err(ObservableError::InvalidArgument(format!(
                "segment needs an odd sample count of at least 3 for Simpson's rule, got {}",
                self.samples
            )));
        }
        for (index, c) in cylinders.iter().enumerate() {
            if distance_to_segment(c.center, self.start, self.end) <= c.radius {
                return Err(ObservableError::SegmentIntersectsRod { index });
            }
        }
        Ok(())
    }

    fn points(&self) -> Vec<[f64; 2]> {
        let n = self.samples - 1;
        (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                [
                    self.start[0] + t * (self.end[0] - self.start[0]),
                    self.start[1] + t * (self.end[1] - self.start[1]),
                ]
            })
            .collect()
    }
}

fn distance_to_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let t = ((ap[0] * ab[0] + ap[1] * ab[1]) / (ab[0] * ab[0] + ab[1] * ab[1])).clamp(0.0, 1.0);
    (p[0] - a[0] - t * ab[0]).hypot(p[1] - a[1] - t * ab[1])
}

fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    let mut acc = values[0] + values[n];
    for (i, v) in values.iter().enumerate().take(n).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// `∫ Im(conj(U) ∂U/∂n) dl` over the segment for the total field, and the
/// same for the incident field alone.
pub fn segment_flux(solution: &LocalSolution, segment: &Segment) -> Result<(f64, f64), ObservableError> {
    segment.validate(&solution.cylinders)?;
    let n = segment.normal();
    let samples: Vec<(f64, f64)> = segment
        .points()
        .par_iter()
        .map(|&p| {
            let (u, g) = field_and_gradient_at(solution, p)?;
            let (ui, gi) = solution
                .incident
                .value_and_gradient(solution.kb, p)
                .ok_or(ObservableError::IncidentUnknown)?;
            let du = g[0] * n[0] + g[1] * n[1];
            let dui = gi[0] * n[0] + gi[1] * n[1];
            Ok(((u.conj() * du).im, (ui.conj() * dui).im))
        })
        .collect::<Result<_, ObservableError>>()?;
    let h = segment.length() / (segment.samples - 1) as f64;
    let total: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let incident: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok((simpson(&total, h), simpson(&incident, h)))
}

/// Plane-wave solution at real wavenumber `k`; `incidence` is the
/// propagation direction angle (`−π/2` travels in `−y`).
pub fn plane_wave_solution(
    k: f64,
    cylinders: &[Cylinder],
    polarization: Polarization,
    incidence: f64,
) -> Result<LocalSolution, ObservableError> {
    let kc = Complex64::new(k, 0.0);
    let m_cyl = Truncation::default_for(kc, cylinders).m_cyl;
    if cylinders.is_empty() {
        return Ok(LocalSolution {
            k: kc,
            kb: kc,
            polarization,
            m_cyl,
            cylinders: Vec::new(),
            incident: IncidentField::PlaneWave { angle: incidence },
            a: Vec::new(),
            b: Vec::new(),
            c: Vec::new(),
            residual: 0.0,
        });
    }
    let system = FoldyLaxSystem::assemble(kc, cylinders, polarization, m_cyl)?;
    Ok(system.solve(IncidentField::PlaneWave { angle: incidence })?)
}

/// Transmitted fraction of the incident Poynting flux through `segment`.
pub fn transmission(
    k: f64,
    cylinders: &[Cylinder],
    polarization: Polarization,
    segment: &Segment,
    incidence: f64,
) -> Result<f64, ObservableError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(ObservableError::InvalidArgument(format!("wavenumber must be positive, got {k}")));
    }
    segment.validate(cylinders)?;
    let solution = plane_wave_solution(k, cylinders, polarization, incidence)?;
    let (total, incident) = segment_flux(&solution, segment)?;
    if incident.abs() == 0.0 {
        return Err(ObservableError::InvalidArgument(
            "incident wave carries no flux through the segment".into(),
        ));
    }
    Ok(total / incident)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmissionSeries {
    pub points: Vec<(f64, f64)>,
}

impl TransmissionSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,transmission\n");
        for (k, t) in &self.points {
            out.push_str(&format!("{k:.16e},{t:.16e}\n"));
        }
        out
    }

    /// Sample with the largest ratio.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.points.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Interior samples larger than both neighbours.
    pub fn local_maxima(&self) -> Vec<(f64, f64)> {
        self.points
            .windows(3)
            .filter(|w| w[1].1 > w[0].1 && w[1].1 > w[2].1)
            .map(|w| w[1])
            .collect()
    }
}

/// Transmission at `n_samples` equispaced wavenumbers in `[k_min, k_max]`.
pub fn spectrum(
    cylinders: &[Cylinder],
    polarization: Polarization,
    k_min: f64,
    k_max: f64,
    n_samples: usize,
    segment: &Segment,
    incidence: f64,
) -> Result<TransmissionSeries, ObservableError> {
    if !(k_min > 0.0) || n_samples == 0 || (n_samples > 1 && !(k_max > k_min)) {
        return Err(ObservableError::InvalidArgument(format!(
            "spectrum needs 0 < k_min < k_max and at least one sample, got [{k_min}, {k_max}] x {n_samples}"
        )));
    }
    segment.validate(cylinders)?;
    let ks: Vec<f64> = (0..n_samples)
        .map(|i| {
            if n_samples == 1 {
                k_min
            } else {
                k_min + (k_max - k_min) * i as f64 / (n_samples - 1) as f64
            }
        })
        .collect();
    let points = ks
        .par_iter()
        .map(|&k| Ok((k, transmission(k, cylinders, polarization, segment, incidence)?)))
        .collect::<Result<Vec<_>, ObservableError>>()?;
    Ok(TransmissionSeries { points })
}
