use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{CliError, Command, RunConfig};
use crate::geometry::{validate_geometry, Cylinder};
use crate::mst::{global_tmatrix, mie_coefficients, MstError};
use crate::observables::{mode_map, null_mode, spectrum};
use crate::poles::{
    contour_quadrature, extract_pole, limit_residue_diagnostic, moments, muller_refine, Contour, CrystalOperator,
    ExtractOptions, LimitDiagnostic, MullerOptions, MullerResult, OperatorFamily, PoleError, PoleResult,
};
use crate::specfun::cyl_bessel_family;

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Files written by one command; removed again if the command fails.
struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        fs::write(&path, contents).map_err(|e| CliError::Io {
            path,
            message: e.to_string(),
        })
    }

    fn discard(self) {
        for p in self.written {
            let _ = fs::remove_file(p);
        }
    }
}

/// The operator `z ↦ T(z)` for the configured scene, with orders sized for
/// the contour unless overridden.
fn operator(config: &RunConfig, contour: &Contour) -> CrystalOperator {
    let cylinders = config.cylinders();
    let trunc = config
        .truncation
        .resolve(Complex64::new(contour.max_modulus(), 0.0), &cylinders);
    CrystalOperator::new(cylinders, config.crystal.polarization, trunc)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct RefineReport {
    k_p: [f64; 2],
    objective: f64,
    iterations: usize,
    start: [f64; 2],
    dominant_eigenvalue: [f64; 2],
}

#[derive(Serialize)]
struct ModeReport {
    k_p: [f64; 2],
    sigma_ratio: f64,
    m_cyl: usize,
}

fn start_point(config: &RunConfig, op: &CrystalOperator, contour: &Contour) -> Result<Complex64, CliError> {
    if let Some([re, im]) = config.refine.k0 {
        return Ok(Complex64::new(re, im));
    }
    let m = moments(op, contour)?;
    Ok(extract_pole(&m, &config.tolerances.extract())?.k_p)
}

fn refine(config: &RunConfig) -> Result<(Complex64, MullerResult), CliError> {
    let contour = config.contour();
    let op = operator(config, &contour);
    let k0 = start_point(config, &op, &contour)?;
    Ok((k0, muller_refine(&op, k0, &config.tolerances.muller())?))
}

/// Runs one command and writes its artifacts plus the resolved config into
/// `dir`. Returns the written paths.
pub fn run_command(command: Command, config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let resolved = config.resolved();
    let artifacts = match build_artifacts(command, &resolved) {
        Ok(a) => a,
        Err(CliError::ValidationFailed { failed }) => {
            let report = render_checks(&validation_suite(&resolved));
            let mut out = Outputs::new(dir)?;
            out.write("validate.txt", &report)?;
            out.write("validate.config.toml", &resolved.to_toml())?;
            return Err(CliError::ValidationFailed { failed });
        }
        Err(e) => return Err(e),
    };
    let mut out = Outputs::new(dir)?;
    let mut result = Ok(());
    for (name, contents) in artifacts
        .iter()
        .map(|(n, c)| (n.clone(), c.clone()))
        .chain([(format!("{}.config.toml", command.name()), resolved.to_toml())])
    {
        result = out.write(&name, &contents);
        if result.is_err() {
            break;
        }
    }
    match result {
        Ok(()) => Ok(out.written),
        Err(e) => {
            out.discard();
            Err(e)
        }
    }
}

fn build_artifacts(command: Command, config: &RunConfig) -> Result<Vec<(String, String)>, CliError> {
    let cylinders = config.cylinders();
    let pol = config.crystal.polarization;
    match command {
        Command::Spectrum => {
            let s = &config.spectrum;
            let series = spectrum(
                &cylinders,
                pol,
                s.k_min,
                s.k_max,
                s.samples,
                &config.segment(),
                s.incidence_deg.to_radians(),
            )?;
            Ok(vec![("spectrum.csv".into(), series.to_csv())])
        }
        Command::FindPole => {
            let contour = config.contour();
            let op = operator(config, &contour);
            let m = moments(&op, &contour)?;
            let pole = extract_pole(&m, &config.tolerances.extract())?;
            Ok(vec![("pole.json".into(), json(&pole.report()))])
        }
        Command::RefinePole => {
            let (k0, r) = refine(config)?;
            let report = RefineReport {
                k_p: pair(r.k_p),
                objective: r.objective,
                iterations: r.iterations,
                start: pair(k0),
                dominant_eigenvalue: pair(r.dominant_eigenvalue),
            };
            Ok(vec![("refine.json".into(), json(&report))])
        }
        Command::ModeMap => {
            let (_, r) = refine(config)?;
            let m_cyl = config.truncation.resolve(r.k_p, &cylinders).m_cyl;
            let mode = null_mode(r.k_p, &cylinders, pol, m_cyl)?;
            let map = mode_map(&mode, &config.grid())?;
            let report = ModeReport {
                k_p: pair(r.k_p),
                sigma_ratio: mode.sigma_ratio(),
                m_cyl,
            };
            Ok(vec![("mode_map.csv".into(), map.to_csv()), ("mode.json".into(), json(&report))])
        }
        Command::Convergence => {
            let contour = config.contour();
            let op = operator(config, &contour);
            let sweep = convergence_sweep(
                &op,
                &contour,
                &config.convergence.nodes,
                &config.tolerances.extract(),
                &config.tolerances.muller(),
                config.refine.k0.map(|[re, im]| Complex64::new(re, im)),
                &config.convergence.limit_offsets,
            )?;
            let mut files = vec![("convergence.csv".into(), sweep.to_csv())];
            if let Some(limit) = &sweep.limit {
                let mut csv = String::from("h,relative_error,tag\n");
                for (h, e) in limit.offsets.iter().zip(&limit.relative_errors) {
                    csv.push_str(&format!("{h:.16e},{e:.16e},{}\n", limit.tag));
                }
                files.push(("limit_diagnostic.csv".into(), csv));
            }
            Ok(files)
        }
        Command::Validate => {
            let checks = validation_suite(config);
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::ValidationFailed { failed });
            }
            Ok(vec![("validate.txt".into(), render_checks(&checks))])
        }
    }
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub nodes: usize,
    pub k: Complex64,
    /// `|k_N − k_ref|` against the Müller reference.
    pub pole_error: f64,
    pub eigenvalue: Complex64,
    /// `|λ_N − λ_ref|` against the largest node count.
    pub eigenvalue_error: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceSweep {
    pub records: Vec<ConvergenceRecord>,
    /// Extraction at every node count, in sweep order.
    pub results: Vec<PoleResult>,
    pub reference: MullerResult,
    pub limit: Option<LimitDiagnostic>,
}

impl ConvergenceSweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,k_re,k_im,pole_error,eig_re,eig_im,eig_error\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.nodes, r.k.re, r.k.im, r.pole_error, r.eigenvalue.re, r.eigenvalue.im, r.eigenvalue_error
            ));
        }
        out
    }

    /// Relative Frobenius change of the residue between the last two sweeps.
    pub fn final_residue_change(&self) -> Option<f64> {
        let n = self.results.len();
        (n >= 2).then(|| {
            let (a, b) = (&self.results[n - 2].residue, &self.results[n - 1].residue);
            (a - b).norm() / b.norm()
        })
    }
}

/// Extracts the pole at every node count, refines the last estimate (or
/// `k0`) with Müller as the reference, and runs the pointwise-limit
/// diagnostic at the reference when `offsets` is non-empty.
///
/// Rows below the consistency threshold are kept: early node counts are
/// expected to be inconsistent.
pub fn convergence_sweep(
    op: &impl OperatorFamily,
    contour: &Contour,
    nodes: &[usize],
    extract: &ExtractOptions,
    muller: &MullerOptions,
    k0: Option<Complex64>,
    offsets: &[f64],
) -> Result<ConvergenceSweep, CliError> {
    let lenient = ExtractOptions {
        consistency_threshold: f64::INFINITY,
        ..*extract
    };
    let mut results = Vec::with_capacity(nodes.len());
    for &n in nodes {
        let m = moments(op, &contour.with_nodes(n))?;
        results.push(extract_pole(&m, &lenient)?);
    }
    let last = results.last().ok_or_else(|| PoleError::InvalidArgument("empty node list".into()))?;
    if last.consistency_residual > extract.consistency_threshold {
        return Err(PoleError::MultiplePoles {
            consistency_residual: last.consistency_residual,
            threshold: extract.consistency_threshold,
            k_estimate: last.k_p,
        }
        .into());
    }
    let reference = muller_refine(op, k0.unwrap_or(last.k_p), muller)?;
    let eig_ref = last.dominant_eigenvalue;
    let records = nodes
        .iter()
        .zip(&results)
        .map(|(&n, r)| ConvergenceRecord {
            nodes: n,
            k: r.k_p,
            pole_error: (r.k_p - reference.k_p).norm(),
            eigenvalue: r.dominant_eigenvalue,
            eigenvalue_error: (r.dominant_eigenvalue - eig_ref).norm(),
        })
        .collect();
    let limit = if offsets.is_empty() {
        None
    } else {
        let at_reference = PoleResult {
            k_p: reference.k_p,
            ..last.clone()
        };
        Some(limit_residue_diagnostic(op, &at_reference, offsets)?)
    };
    Ok(ConvergenceSweep {
        records,
        results,
        reference,
        limit,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn render_checks(checks: &[CheckLine]) -> String {
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!("{} {} {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    out
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckLine {
    CheckLine { name, passed, detail }
}

fn failed(name: &'static str, e: impl std::fmt::Display) -> CheckLine {
    check(name, false, format!("error: {e}"))
}

fn is_c4_symmetric(cylinders: &[Cylinder]) -> bool {
    cylinders.iter().all(|c| {
        let image = [-c.center[1], c.center[0]];
        cylinders.iter().any(|d| {
            (d.center[0] - image[0]).hypot(d.center[1] - image[1]) < 1e-9
                && d.radius == c.radius
                && d.eps_rod == c.eps_rod
                && d.eps_bg == c.eps_bg
        })
    })
}

/// Largest Wronskian residual over 20 radii from 1e-3 to 50 and 10 angles,
/// orders up to 40, relative to the size of the products.
fn wronskian_check() -> CheckLine {
    let mut worst = 0.0f64;
    for a in 0..20 {
        for b in 0..10 {
            let r = 1e-3 * 5e4f64.powf(a as f64 / 19.0);
            let theta = -std::f64::consts::PI + (b as f64 + 0.5) * std::f64::consts::PI / 5.0;
            let z = Complex64::from_polar(r, theta);
            let fam = match cyl_bessel_family(41, z) {
                Ok(f) => f,
                Err(e) => return failed("specfun.wronskian", e),
            };
            let target = Complex64::new(2.0 / std::f64::consts::PI, 0.0) / z;
            for n in 0..=40 {
                let p = fam.j[n + 1] * fam.y[n];
                let q = fam.j[n] * fam.y[n + 1];
                let scale = target.norm().max(p.norm()).max(q.norm());
                let e = (p - q - target).norm() / scale;
                worst = if e.is_nan() { f64::INFINITY } else { worst.max(e) };
            }
        }
    }
    check("specfun.wronskian", worst <= 1e-11, format!("max relative residual {worst:.3e} over 200 points"))
}

fn synthetic_check() -> CheckLine {
    let n = 5;
    let u = nalgebra::DVector::from_fn(n, |i, _| Complex64::new(1.0 + i as f64, 0.5 - i as f64 * 0.2));
    let v = nalgebra::DVector::from_fn(n, |i, _| Complex64::new(0.3 * i as f64, 1.0));
    let c = &u * v.adjoint();
    let b = DMatrix::from_fn(n, n, |i, j| Complex64::new((i + j) as f64 * 0.1, (i as f64 - j as f64) * 0.2));
    let p = Complex64::new(0.5, -0.1);
    let t = |z: Complex64| -> Result<DMatrix<Complex64>, MstError> { Ok(&c / (z - p) + &b) };
    match moments(&t, &Contour::circle(p, 0.2, 32)).and_then(|m| extract_pole(&m, &ExtractOptions::default())) {
        Ok(r) => {
            let ek = (r.k_p - p).norm();
            let er = (&r.residue - &c).norm() / c.norm();
            check("poles.synthetic", ek <= 1e-12 && er <= 1e-12, format!("pole error {ek:.3e}, residue error {er:.3e}"))
        }
        Err(e) => failed("poles.synthetic", e),
    }
}

/// Invariant checks for the configured scene.
pub fn validation_suite(config: &RunConfig) -> Vec<CheckLine> {
    let mut out = vec![wronskian_check()];
    let cylinders = config.cylinders();
    let pol = config.crystal.polarization;

    let report = validate_geometry(&cylinders);
    out.push(check("geometry.overlap", !report.has_errors(), format!("{} rods, {}", cylinders.len(), report)));

    let contour = config.contour();
    out.push(match contour_quadrature(&contour) {
        Ok(rule) => check("contour.self_test", true, format!("{} nodes on {}", rule.len(), contour.describe())),
        Err(e) => failed("contour.self_test", e),
    });
    out.push(synthetic_check());

    let k_real = contour.interior_point().re.abs().max(0.1);
    let kc = Complex64::new(k_real, 0.0);
    let trunc = config.truncation.resolve(kc, &cylinders);
    match global_tmatrix(kc, &cylinders, pol, trunc) {
        Ok(t) => {
            let lossless = cylinders.iter().all(|c| c.eps_rod.im == 0.0 && c.eps_bg.im == 0.0);
            let u = t.unitarity_defect();
            out.push(check(
                "tmatrix.unitarity",
                !lossless || u <= 1e-8,
                if lossless { format!("‖S†S − I‖ = {u:.3e} at k = {k_real}") } else { "skipped (lossy media)".into() },
            ));
            let r = t.reciprocity_defect();
            out.push(check("tmatrix.reciprocity", r <= 1e-8, format!("{r:.3e}")));
            if is_c4_symmetric(&cylinders) {
                let c4 = t.c4_selection_defect();
                out.push(check("tmatrix.c4_selection", c4 <= 1e-8, format!("{c4:.3e}")));
            }
            if cylinders.len() == 1 && cylinders[0].center == [0.0, 0.0] {
                out.push(match mie_coefficients(kc, &cylinders[0], pol, trunc.l_glob) {
                    Ok(m) => {
                        let o = trunc.l_glob as i64;
                        let worst = (-o..=o)
                            .map(|n| (t.at(n, n) - m.s_at(n) * 2.0).norm())
                            .fold(0.0, f64::max);
                        check("tmatrix.single_rod_mie", worst <= 1e-12, format!("{worst:.3e}"))
                    }
                    Err(e) => failed("tmatrix.single_rod_mie", e),
                });
            }
        }
        Err(e) => out.push(failed("tmatrix.unitarity", e)),
    }

    let op = operator(config, &contour);
    let pole = moments(&op, &contour).and_then(|m| extract_pole(&m, &config.tolerances.extract()));
    match pole {
        Ok(p) => {
            out.push(check(
                "poles.rank",
                p.rank_estimate >= 1,
                format!("k_p = {:.12}, rank {}, consistency {:.3e}", p.k_p, p.rank_estimate, p.consistency_residual),
            ));
            out.push(match muller_refine(&op, p.k_p, &config.tolerances.muller()) {
                Ok(r) => {
                    let gap = (r.k_p - p.k_p).norm();
                    let tol = 1e-9f64.max(10.0 * p.consistency_residual);
                    check(
                        "poles.contour_vs_muller",
                        gap <= tol,
                        format!("|Δk| = {gap:.3e} (tolerance {tol:.1e}), objective {:.3e}", r.objective),
                    )
                }
                Err(e) => failed("poles.contour_vs_muller", e),
            });
        }
        Err(e) => out.push(failed("poles.rank", e)),
    }
    out
}
