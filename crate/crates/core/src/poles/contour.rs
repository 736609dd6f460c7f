use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PoleError;

/// Closed integration path, positively oriented.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ContourShape {
    Circle { center: [f64; 2], radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    #[serde(flatten)]
    pub shape: ContourShape,
    pub nodes: usize,
}

/// Nodes `z_j` and weights `w_j` with `Σ w_j f(z_j) ≈ (1/2πi) ∮ f(z) dz`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(Complex64::new(0.0, 0.0), |acc, (z, w)| acc + w * f(*z))
    }
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl Contour {
    pub fn circle(center: Complex64, radius: f64, nodes: usize) -> Self {
        Self {
            shape: ContourShape::Circle {
                center: [center.re, center.im],
                radius,
            },
            nodes,
        }
    }

    pub fn polygon(vertices: &[Complex64], nodes: usize) -> Self {
        Self {
            shape: ContourShape::Polygon {
                vertices: vertices.iter().map(|v| [v.re, v.im]).collect(),
            },
            nodes,
        }
    }

    pub fn with_nodes(&self, nodes: usize) -> Self {
        Self {
            shape: self.shape.clone(),
            nodes,
        }
    }

    /// Signed area, positive for counterclockwise polygons.
    pub fn signed_area(&self) -> f64 {
        match &self.shape {
            ContourShape::Circle { radius, .. } => PI * radius * radius,
            ContourShape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                        a[0] * b[1] - b[0] * a[1]
                    })
                    .sum::<f64>()
                    * 0.5
            }
        }
    }

    /// A point strictly inside, used for the winding self-test.
    pub fn interior_point(&self) -> Complex64 {
        match &self.shape {
            ContourShape::Circle { center, radius } => c(*center) + Complex64::from_polar(0.1 * radius, 0.7),
            ContourShape::Polygon { vertices } => {
                vertices.iter().map(|v| c(*v)).sum::<Complex64>() / vertices.len() as f64
            }
        }
    }

    /// Largest `|z|` on the path.
    pub fn max_modulus(&self) -> f64 {
        match &self.shape {
            ContourShape::Circle { center, radius } => c(*center).norm() + radius,
            ContourShape::Polygon { vertices } => vertices.iter().map(|v| c(*v).norm()).fold(0.0, f64::max),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match &self.shape {
            ContourShape::Circle { center, radius } => (z - c(*center)).norm() < *radius,
            ContourShape::Polygon { vertices } => {
                // crossing number
                let n = vertices.len();
                let mut inside = false;
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    if (a[1] > z.im) != (b[1] > z.im) {
                        let x = a[0] + (z.im - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                        if z.re < x {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }

    pub fn describe(&self) -> String {
        match &self.shape {
            ContourShape::Circle { center, radius } => {
                format!("circle:{},{},{}", center[0], center[1], radius)
            }
            ContourShape::Polygon { vertices } => {
                let parts: Vec<String> = vertices.iter().map(|v| format!("{},{}", v[0], v[1])).collect();
                format!("poly:{}", parts.join(";"))
            }
        }
    }

    /// Parses `circle:cx,cy,r` or `poly:x1,y1;x2,y2;...`.
    pub fn parse(text: &str, nodes: usize) -> Result<Self, PoleError> {
        let bad = || PoleError::InvalidContour(format!("cannot parse contour '{text}'"));
        let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
        let nums = |s: &str| -> Result<Vec<f64>, PoleError> {
            s.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
                .collect()
        };
        match kind.trim() {
            "circle" => {
                let v = nums(rest)?;
                if v.len() != 3 {
                    return Err(bad());
                }
                Ok(Self::circle(Complex64::new(v[0], v[1]), v[2], nodes))
            }
            "poly" => {
                let verts = rest
                    .split(';')
                    .map(|p| {
                        let v = nums(p)?;
                        if v.len() != 2 {
                            return Err(bad());
                        }
                        Ok(Complex64::new(v[0], v[1]))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Self::polygon(&verts, nodes))
            }
            _ => Err(bad()),
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(t), p0 = P_{n-1}(t)
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let step = p1 / dp;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Builds the quadrature rule for a contour and checks it by integrating
/// `1/(z − a)` for an interior `a`: a circle with `N >= 16` must return 1 to
/// within 1e-12, any rule must at least land on winding number 1.
pub fn contour_quadrature(contour: &Contour) -> Result<QuadratureRule, PoleError> {
    if contour.nodes < 3 {
        return Err(PoleError::InvalidContour(format!(
            "at least 3 quadrature nodes required, got {}",
            contour.nodes
        )));
    }
    let rule = match &contour.shape {
        ContourShape::Circle { center, radius } => {
            if !(*radius > 0.0) || !radius.is_finite() {
                return Err(PoleError::InvalidContour(format!("circle radius {radius} must be positive")));
            }
            let n = contour.nodes;
            let center = c(*center);
            let mut nodes = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for j in 0..n {
                let offset = Complex64::from_polar(*radius, 2.0 * PI * j as f64 / n as f64);
                nodes.push(center + offset);
                weights.push(offset / n as f64);
            }
            QuadratureRule { nodes, weights }
        }
        ContourShape::Polygon { vertices } => {
            if vertices.len() < 3 {
                return Err(PoleError::InvalidContour(format!(
                    "polygon needs at least 3 vertices, got {}",
                    vertices.len()
                )));
            }
            let area = contour.signed_area();
            if area <= 0.0 {
                return Err(PoleError::Orientation { signed_area: area });
            }
            let per_edge = contour.nodes.div_ceil(vertices.len());
            let (gx, gw) = gauss_legendre(per_edge);
            let two_pi_i = Complex64::new(0.0, 2.0 * PI);
            let mut nodes = Vec::with_capacity(per_edge * vertices.len());
            let mut weights = Vec::with_capacity(per_edge * vertices.len());
            for e in 0..vertices.len() {
                let a = c(vertices[e]);
                let b = c(vertices[(e + 1) % vertices.len()]);
                let mid = (a + b) * 0.5;
                let half = (b - a) * 0.5;
                for (t, w) in gx.iter().zip(&gw) {
                    nodes.push(mid + half * *t);
                    weights.push(half * *w / two_pi_i);
                }
            }
            QuadratureRule { nodes, weights }
        }
    };

    let a = contour.interior_point();
    let winding = rule.apply(|z| Complex64::new(1.0, 0.0) / (z - a));
    let tolerance = match contour.shape {
        ContourShape::Circle { .. } if contour.nodes >= 16 => 1e-12,
        _ => 0.25,
    };
    if (winding - 1.0).norm() > tolerance {
        return Err(PoleError::InvalidContour(format!(
            "winding self-test failed: (1/2πi)∮ dz/(z-a) = {winding}"
        )));
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let quad: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((quad - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn circle_residue_of_simple_pole() {
        let contour = Contour::circle(Complex64::new(2.35, -0.02), 0.06, 32);
        let rule = contour_quadrature(&contour).unwrap();
        let p = Complex64::new(2.33, -0.004);
        let v = rule.apply(|z| Complex64::new(1.0, 0.0) / (z - p));
        // trapezoid aliasing for 1/(z - p) is exactly q^N / (1 - q^N)
        let q = ((p - Complex64::new(2.35, -0.02)) / 0.06).powu(32);
        let exact = 1.0 / (1.0 - q);
        assert!((v - exact).norm() < 1e-14, "{v} vs {exact}");
        assert!((v - 1.0).norm() < 2e-12, "{v}");
        let fine = contour_quadrature(&contour.with_nodes(48)).unwrap();
        let v = fine.apply(|z| Complex64::new(1.0, 0.0) / (z - p));
        assert!((v - 1.0).norm() < 1e-15, "{v}");
    }

    #[test]
    fn triangle_accepted_and_clockwise_rejected() {
        let tri = [Complex64::new(2.3, 0.0), Complex64::new(2.4, -0.1), Complex64::new(2.4, 0.0)];
        let contour = Contour::polygon(&tri, 15);
        assert!(contour.signed_area() > 0.0);
        let rule = contour_quadrature(&contour).unwrap();
        assert_eq!(rule.len(), 15);
        let rev: Vec<_> = tri.iter().rev().copied().collect();
        assert!(matches!(
            contour_quadrature(&Contour::polygon(&rev, 15)),
            Err(PoleError::Orientation { .. })
        ));
    }

    #[test]
    fn too_few_nodes_rejected() {
        let contour = Contour::circle(Complex64::new(0.0, 0.0), 1.0, 2);
        assert!(matches!(contour_quadrature(&contour), Err(PoleError::InvalidContour(_))));
    }

    #[test]
    fn parse_round_trip() {
        let c1 = Contour::parse("circle:2.35,-0.02,0.06", 40).unwrap();
        assert_eq!(c1, Contour::circle(Complex64::new(2.35, -0.02), 0.06, 40));
        let c2 = Contour::parse("poly:2.3,0;2.4,-0.1;2.4,0", 15).unwrap();
        assert_eq!(Contour::parse(&c2.describe(), 15).unwrap(), c2);
        assert!(Contour::parse("square:1,2", 10).is_err());
    }

    #[test]
    fn contains_matches_geometry() {
        let tri = Contour::parse("poly:2.3,0;2.4,-0.1;2.4,0", 15).unwrap();
        assert!(tri.contains(Complex64::new(2.38, -0.01)));
        assert!(!tri.contains(Complex64::new(2.31, -0.05)));
    }
}
