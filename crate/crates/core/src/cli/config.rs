use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{build_crystal, CrystalSpec, Cylinder, Polarization};
use crate::mst::Truncation;
use crate::observables::{Grid, Segment};
use crate::poles::{Contour, ExtractOptions, MullerOptions};

/// A configuration problem, located by dotted key path and line when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.path.is_empty()) {
            (Some(line), false) => write!(f, "line {line}: `{}`: {}", self.path, self.message),
            (Some(line), true) => write!(f, "line {line}: {}", self.message),
            (None, false) => write!(f, "`{}`: {}", self.path, self.message),
            (None, true) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// A permittivity given either as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Permittivity {
    Real(f64),
    Complex([f64; 2]),
}

impl Permittivity {
    pub fn value(self) -> Complex64 {
        match self {
            Permittivity::Real(re) => Complex64::new(re, 0.0),
            Permittivity::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrystalConfig {
    pub nx: usize,
    pub ny: usize,
    pub pitch: f64,
    pub radius: f64,
    pub eps_rod: Permittivity,
    pub eps_bg: Permittivity,
    /// `(i, j)` lattice sites left empty, zero based.
    pub removed: Vec<(i64, i64)>,
    pub polarization: Polarization,
}

impl Default for CrystalConfig {
    fn default() -> Self {
        Self {
            nx: 1,
            ny: 1,
            pitch: 1.0,
            radius: 0.3,
            eps_rod: Permittivity::Real(9.0),
            eps_bg: Permittivity::Real(1.0),
            removed: Vec::new(),
            polarization: Polarization::EParallel,
        }
    }
}

impl CrystalConfig {
    pub fn spec(&self) -> CrystalSpec {
        CrystalSpec {
            nx: self.nx,
            ny: self.ny,
            pitch: self.pitch,
            radius: self.radius,
            eps_rod: self.eps_rod.value(),
            eps_bg: self.eps_bg.value(),
            removed: self.removed.clone(),
            polarization: self.polarization,
        }
    }
}

/// Fixed orders; either left out means "chosen from the wavenumber".
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationConfig {
    pub m_cyl: Option<usize>,
    pub l_glob: Option<usize>,
}

impl TruncationConfig {
    /// Overrides applied on top of the automatic rule for wavenumber `k`.
    pub fn resolve(&self, k: Complex64, cylinders: &[Cylinder]) -> Truncation {
        let auto = Truncation::default_for(k, cylinders);
        Truncation {
            m_cyl: self.m_cyl.unwrap_or(auto.m_cyl),
            l_glob: self.l_glob.unwrap_or(auto.l_glob),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourKind {
    Circle,
    Polygon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContourConfig {
    pub kind: ContourKind,
    /// `[re, im]`.
    pub center: Option<[f64; 2]>,
    pub radius: Option<f64>,
    /// Counterclockwise `[re, im]` vertices.
    pub vertices: Option<Vec<[f64; 2]>>,
    pub nodes: usize,
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self {
            kind: ContourKind::Circle,
            center: Some([4.39, -0.4]),
            radius: Some(0.2),
            vertices: None,
            nodes: 64,
        }
    }
}

impl ContourConfig {
    pub fn from_contour(contour: &Contour) -> Self {
        use crate::poles::ContourShape;
        match &contour.shape {
            ContourShape::Circle { center, radius } => Self {
                kind: ContourKind::Circle,
                center: Some(*center),
                radius: Some(*radius),
                vertices: None,
                nodes: contour.nodes,
            },
            ContourShape::Polygon { vertices } => Self {
                kind: ContourKind::Polygon,
                center: None,
                radius: None,
                vertices: Some(vertices.clone()),
                nodes: contour.nodes,
            },
        }
    }

    pub fn contour(&self) -> Result<Contour, ConfigError> {
        let missing = |key: &str| ConfigError {
            path: format!("contour.{key}"),
            line: None,
            message: format!("required for a {:?} contour", self.kind).to_lowercase(),
        };
        match self.kind {
            ContourKind::Circle => {
                let c = self.center.ok_or_else(|| missing("center"))?;
                let r = self.radius.ok_or_else(|| missing("radius"))?;
                Ok(Contour::circle(Complex64::new(c[0], c[1]), r, self.nodes))
            }
            ContourKind::Polygon => {
                let v = self.vertices.as_ref().ok_or_else(|| missing("vertices"))?;
                let v: Vec<Complex64> = v.iter().map(|p| Complex64::new(p[0], p[1])).collect();
                Ok(Contour::polygon(&v, self.nodes))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub samples: usize,
    /// Propagation direction in degrees; `-90` travels in `−y`.
    pub incidence_deg: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            k_min: 1.0,
            k_max: 6.0,
            samples: 101,
            incidence_deg: -90.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub noise_floor: f64,
    pub consistency: f64,
    pub rank: f64,
    pub power: f64,
    pub power_max_iter: usize,
    pub muller: f64,
    pub muller_max_iter: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        let e = ExtractOptions::default();
        let m = MullerOptions::default();
        Self {
            noise_floor: e.noise_floor,
            consistency: e.consistency_threshold,
            rank: e.rank_tol,
            power: e.power_tol,
            power_max_iter: e.power_max_iter,
            muller: m.tol,
            muller_max_iter: m.max_iter,
        }
    }
}

impl ToleranceConfig {
    pub fn extract(&self) -> ExtractOptions {
        ExtractOptions {
            noise_floor: self.noise_floor,
            consistency_threshold: self.consistency,
            rank_tol: self.rank,
            power_tol: self.power,
            power_max_iter: self.power_max_iter,
        }
    }

    pub fn muller(&self) -> MullerOptions {
        MullerOptions {
            tol: self.muller,
            max_iter: self.muller_max_iter,
            power_tol: self.power,
            power_max_iter: self.power_max_iter,
            ..MullerOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RefineConfig {
    /// Müller start point `[re, im]`; by default the contour estimate.
    pub k0: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceConfig {
    pub nodes: Vec<usize>,
    /// Offsets `h` for the pointwise-limit residue, strictly decreasing.
    pub limit_offsets: Vec<f64>,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            nodes: vec![5, 10, 15, 20, 30, 50, 80, 120, 150],
            limit_offsets: (1..=12).map(|e| 10f64.powi(-e)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModeMapConfig {
    /// By default a square covering the crystal with one pitch of margin.
    pub grid: Option<Grid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub crystal: CrystalConfig,
    pub truncation: TruncationConfig,
    pub contour: ContourConfig,
    pub spectrum: SpectrumConfig,
    /// By default below the crystal, see [`Segment::below_crystal`].
    pub segment: Option<Segment>,
    pub tolerances: ToleranceConfig,
    pub refine: RefineConfig,
    pub convergence: ConvergenceConfig,
    pub mode_map: ModeMapConfig,
    pub output: OutputConfig,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `key` inside `[section]` (or of the section header when the key
/// is absent).
fn locate(text: &str, path: &str) -> Option<usize> {
    let mut parts = path.split('.');
    let section = parts.next()?;
    let key = parts.next();
    let mut current = String::new();
    let mut header = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if current == section {
                header = header.or(Some(i + 1));
            }
            continue;
        }
        if current == section {
            if let Some(k) = key {
                let lhs = line.split('=').next().unwrap_or("").trim();
                if lhs == k {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::parse(text).map_err(|e| ConfigError {
            path: String::new(),
            line: e.span().map(|s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let line = inner
                .span()
                .map(|s| line_of(text, s.start))
                .or_else(|| locate(text, &path));
            ConfigError {
                path: if path == "." { String::new() } else { path },
                line,
                message: inner.message().to_string(),
            }
        })?;
        config.check().map_err(|(path, message)| ConfigError {
            line: locate(text, &path),
            path,
            message,
        })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: String::new(),
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    fn check(&self) -> Result<(), (String, String)> {
        let bad = |path: &str, msg: String| Err((path.to_string(), msg));
        let c = &self.crystal;
        if c.nx == 0 {
            return bad("crystal.nx", "must be at least 1".into());
        }
        if c.ny == 0 {
            return bad("crystal.ny", "must be at least 1".into());
        }
        if !(c.pitch > 0.0 && c.pitch.is_finite()) {
            return bad("crystal.pitch", format!("must be positive, got {}", c.pitch));
        }
        if !(c.radius > 0.0 && c.radius.is_finite()) {
            return bad("crystal.radius", format!("must be positive, got {}", c.radius));
        }
        for (key, eps) in [("crystal.eps_rod", c.eps_rod), ("crystal.eps_bg", c.eps_bg)] {
            if eps.value().im < 0.0 {
                return bad(key, "imaginary part must be non-negative (gain media are not supported)".into());
            }
        }
        if let Err(e) = c.spec().validate() {
            return bad("crystal.removed", e.to_string());
        }
        if build_crystal(&c.spec()).map(|v| v.is_empty()).unwrap_or(true) {
            return bad("crystal.removed", "every site is removed".into());
        }
        if let Some(0) = self.truncation.m_cyl {
            return bad("truncation.m_cyl", "must be at least 1".into());
        }
        if let Some(0) = self.truncation.l_glob {
            return bad("truncation.l_glob", "must be at least 1".into());
        }
        if self.contour.nodes < 3 {
            return bad("contour.nodes", format!("must be at least 3, got {}", self.contour.nodes));
        }
        if let Some(r) = self.contour.radius {
            if !(r > 0.0) {
                return bad("contour.radius", format!("must be positive, got {r}"));
            }
        }
        if let Some(v) = &self.contour.vertices {
            if v.len() < 3 {
                return bad("contour.vertices", "a polygon needs at least 3 vertices".into());
            }
        }
        self.contour.contour().map_err(|e| (e.path, e.message))?;
        let s = &self.spectrum;
        if !(s.k_min > 0.0) {
            return bad("spectrum.k_min", format!("must be positive, got {}", s.k_min));
        }
        if s.samples == 0 {
            return bad("spectrum.samples", "must be at least 1".into());
        }
        if s.samples > 1 && !(s.k_max > s.k_min) {
            return bad("spectrum.k_max", format!("must exceed k_min = {}", s.k_min));
        }
        if let Some(seg) = &self.segment {
            if seg.samples < 3 || seg.samples % 2 == 0 {
                return bad("segment.samples", format!("must be odd and at least 3, got {}", seg.samples));
            }
        }
        let t = &self.tolerances;
        for (key, v) in [
            ("tolerances.noise_floor", t.noise_floor),
            ("tolerances.consistency", t.consistency),
            ("tolerances.rank", t.rank),
            ("tolerances.power", t.power),
            ("tolerances.muller", t.muller),
        ] {
            if !(v > 0.0) {
                return bad(key, format!("must be positive, got {v}"));
            }
        }
        let n = &self.convergence.nodes;
        if n.is_empty() || n.iter().any(|&x| x < 3) || n.windows(2).any(|w| w[1] <= w[0]) {
            return bad("convergence.nodes", "must be strictly increasing node counts of at least 3".into());
        }
        let h = &self.convergence.limit_offsets;
        if h.iter().any(|&x| !(x > 0.0)) || h.windows(2).any(|w| w[1] >= w[0]) {
            return bad("convergence.limit_offsets", "must be positive and strictly decreasing".into());
        }
        if let Some(g) = &self.mode_map.grid {
            if g.validate().is_err() {
                return bad("mode_map.grid", "needs nx, ny >= 2 and x_max > x_min, y_max > y_min".into());
            }
        }
        Ok(())
    }

    pub fn cylinders(&self) -> Vec<Cylinder> {
        build_crystal(&self.crystal.spec()).expect("validated at parse time")
    }

    pub fn segment(&self) -> Segment {
        self.segment
            .unwrap_or_else(|| Segment::below_crystal(self.crystal.nx, self.crystal.ny, self.crystal.pitch))
    }

    pub fn grid(&self) -> Grid {
        self.mode_map.grid.unwrap_or_else(|| {
            let half = (self.crystal.nx.max(self.crystal.ny) as f64 / 2.0 + 1.0) * self.crystal.pitch;
            Grid {
                x_min: -half,
                x_max: half,
                nx: 101,
                y_min: -half,
                y_max: half,
                ny: 101,
            }
        })
    }

    pub fn contour(&self) -> Contour {
        self.contour.contour().expect("validated at parse time")
    }

    /// The config with every default written out.
    pub fn resolved(&self) -> RunConfig {
        let mut out = self.clone();
        out.segment = Some(self.segment());
        out.mode_map.grid = Some(self.grid());
        out
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_single_rod_demo() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.cylinders().len(), 1);
        assert_eq!(c.convergence.nodes, vec![5, 10, 15, 20, 30, 50, 80, 120, 150]);
        assert_eq!(c.contour().nodes, 64);
    }

    #[test]
    fn minimal_crystal_has_48_rods() {
        let text = "[crystal]\nnx = 7\nny = 7\npitch = 1.0\nradius = 0.25\neps_rod = 9.0\nremoved = [[3, 3]]\n";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.cylinders().len(), 48);
        assert_eq!(c.segment(), Segment::below_crystal(7, 7, 1.0));
    }

    #[test]
    fn bad_polarization_names_the_key_and_line() {
        let text = "[crystal]\nnx = 2\npolarization = \"XY\"\n";
        let e = RunConfig::parse(text).unwrap_err();
        assert_eq!(e.path, "crystal.polarization");
        assert_eq!(e.line, Some(3));
        assert!(e.to_string().contains("XY"), "{e}");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let e = RunConfig::parse("[contour]\nnodes = 20\nwobble = 3\n").unwrap_err();
        assert!(e.path.starts_with("contour"), "{e:?}");
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("wobble"));
    }

    #[test]
    fn out_of_range_reports_location() {
        let e = RunConfig::parse("[spectrum]\nk_min = 1.0\n\n[crystal]\nradius = -0.1\n").unwrap_err();
        assert_eq!(e.path, "crystal.radius");
        assert_eq!(e.line, Some(5));
    }

    #[test]
    fn complex_permittivity_and_round_trip() {
        let text = "[crystal]\neps_rod = [9.0, 0.1]\n[contour]\nkind = \"polygon\"\nvertices = [[2.3, 0.0], [2.4, -0.1], [2.4, 0.0]]\nnodes = 15\n";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.crystal.eps_rod.value(), Complex64::new(9.0, 0.1));
        let again = RunConfig::parse(&c.resolved().to_toml()).unwrap();
        assert_eq!(again, c.resolved());
    }
}
