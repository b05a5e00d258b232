//! Verification suites behind the `fbms` binary.
//!
//! Each suite computes its quantities, writes report files into the output
//! directory and returns a list of [`Check`]s. A run passes iff every check
//! passes; module errors propagate as typed [`Error`]s.

use std::path::PathBuf;
use std::sync::Arc;

use nalgebra::{DVector, Matrix3};
use rand::SeedableRng;
use serde::Serialize;
use serde_json::json;

use crate::appendix_curve::{
    curvature_closed_form, curvature_numeric_oracle, make_segment_curve, parameter_samples, random_admissible_curve,
    write_curvature_csv,
};
use crate::discretize::{assemble_operators, build_mesh, OperatorSet};
use crate::error::{Error, Result};
use crate::indexform::{boundary_tensor_basis, gauss_map_matrix, s_orthogonal_basis};
use crate::report::{eigenfield_dump, num, point_rows, spectrum_rows, Bound, Check, Format, ReportWriter};
use crate::sphere::{
    boundary_curvature_identity, check_gauss_map, pullback_problem, reconstruct_surface, roundness, segment_test_in_frame,
    zeta_check,
};
use crate::steklov::{normal_traces, subspace_invariance, DtnMap, SteklovSpectrum, SubspaceTest};
use crate::surface::{
    catenoid_constants, gauss_map_dimension, spec_file::resolve_surface, CatenoidConstants, ParametricSurface, SurfaceKind, Vec3,
};
use crate::tolerances::Tolerances;

/// Seed of the random admissible curves in the appendix suite.
pub const APPENDIX_SEED: u64 = 0x5eed_a99e;
/// Random curves and parameter samples per curve in the appendix suite.
pub const APPENDIX_CURVES: usize = 1000;
pub const APPENDIX_SAMPLES: usize = 50;
/// Boundary samples per component for the segment and curvature checks.
pub const BOUNDARY_SAMPLES: usize = 256;
/// Eigenvalue threshold absorbing discretisation when counting below 1.
pub const BELOW_ONE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Subspace,
    Index,
    Sphere,
    Appendix,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Subspace => "subspace",
            Command::Index => "index",
            Command::Sphere => "sphere",
            Command::Appendix => "appendix",
            Command::VerifyAll => "verify-all",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Built-in name (`catenoid`, `catenoid-rotated:<alpha>`, `disk`) or a
    /// surface-spec path.
    pub surface: String,
    pub n_t: usize,
    pub n_theta: usize,
    pub n_eig: usize,
    pub tolerances: Tolerances,
    pub output: PathBuf,
    pub format: Format,
    pub dump_eigenfields: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            surface: "catenoid".into(),
            n_t: 64,
            n_theta: 128,
            n_eig: 8,
            tolerances: Tolerances::default(),
            output: PathBuf::from("fbms-out"),
            format: Format::Csv,
            dump_eigenfields: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_t < 8 || self.n_theta < 8 {
            return Err(Error::Config(format!("mesh {}x{} is below the 8x8 minimum", self.n_t, self.n_theta)));
        }
        if self.n_eig < 1 {
            return Err(Error::Config("n_eig must be at least 1".into()));
        }
        Ok(())
    }
}

/// Parse `NxM`.
pub fn parse_mesh(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("mesh must look like 64x128, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: Command,
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Analytic targets known for the built-in surfaces.
#[derive(Debug, Clone, Default)]
struct Targets {
    /// Critical catenoid constants and rotation angle.
    catenoid: Option<(CatenoidConstants, f64)>,
    /// Lowest eigenvalues in ascending order.
    spectrum: Option<Vec<f64>>,
    /// Eigenvalues of the normal components, ascending.
    normal: Option<[f64; 3]>,
    kernel_dim: Option<usize>,
    below_one: Option<usize>,
    /// Closed-form geometry (curvature identities to machine precision).
    analytic: bool,
}

fn targets(surface: &ParametricSurface) -> Result<Targets> {
    Ok(match surface.kind {
        SurfaceKind::Catenoid { half_height, alpha, .. } => {
            let k = catenoid_constants()?;
            if (half_height - k.t0).abs() > 1e-12 {
                return Ok(Targets { analytic: true, ..Default::default() });
            }
            let mut n = k.normal_eigenvalues();
            n.sort_by(f64::total_cmp);
            Targets {
                catenoid: Some((k, alpha)),
                spectrum: Some(n.to_vec()),
                normal: Some(n),
                kernel_dim: Some(1),
                below_one: Some(3),
                analytic: true,
            }
        }
        SurfaceKind::Disk { .. } => Targets {
            spectrum: Some(vec![0.0, 1.0, 1.0, 2.0, 2.0]),
            kernel_dim: Some(0),
            below_one: Some(1),
            analytic: true,
            ..Default::default()
        },
        SurfaceKind::Custom => Targets::default(),
    })
}

/// Shared state of one run.
struct Context {
    surface: ParametricSurface,
    ops: OperatorSet,
    targets: Targets,
    cfg: RunConfig,
}

impl Context {
    fn tol(&self) -> &Tolerances {
        &self.cfg.tolerances
    }
}

struct Suite<'a> {
    name: &'static str,
    checks: &'a mut Vec<Check>,
}

impl Suite<'_> {
    fn at_most(&mut self, name: impl Into<String>, v: f64, b: f64) {
        self.checks.push(Check::new(self.name, name, v, Bound::AtMost(b)));
    }
    fn at_least(&mut self, name: impl Into<String>, v: f64, b: f64) {
        self.checks.push(Check::new(self.name, name, v, Bound::AtLeast(b)));
    }
    fn equals(&mut self, name: impl Into<String>, v: f64, b: f64) {
        self.checks.push(Check::new(self.name, name, v, Bound::Equals(b)));
    }
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Execute `command`, write its reports and collect its checks.
pub fn run(command: Command, cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let mut out = ReportWriter::new(&cfg.output, cfg.format)?;
    let surface = resolve_surface(&cfg.surface)?;
    let mut checks = Vec::new();

    if command == Command::Appendix {
        appendix_suite(&surface, cfg, &mut out, &mut checks)?;
    } else {
        let ops = assemble_operators(Arc::new(build_mesh(&surface, cfg.n_t, cfg.n_theta)?));
        let ctx = Context { targets: targets(&surface)?, surface, ops, cfg: cfg.clone() };
        let dtn = DtnMap::new(&ctx.ops, ctx.tol())?;
        match command {
            Command::Spectrum => {
                spectrum_suite(&ctx, &dtn, &mut out, &mut checks)?;
            }
            Command::Subspace => subspace_suite(&ctx, &dtn, &mut out, &mut checks)?,
            Command::Index => index_suite(&ctx, &dtn, &mut out, &mut checks)?,
            Command::Sphere => {
                let spectrum = dtn.spectrum(ctx.cfg.n_eig.min(dtn.compatible.ncols()))?;
                sphere_suite(&ctx, &dtn, &spectrum, &mut out, &mut checks)?
            }
            Command::VerifyAll => {
                // Suites run in a fixed order; a suite that errors becomes a
                // failed check so the remaining suites still report.
                let record = |name: &'static str, r: Result<()>, checks: &mut Vec<Check>| {
                    if let Err(e) = r {
                        let mut c = Check::new(name, format!("error: {e}"), f64::NAN, Bound::AtMost(0.0));
                        c.passed = false;
                        checks.push(c);
                    }
                };
                let spectrum = spectrum_suite(&ctx, &dtn, &mut out, &mut checks);
                let r = subspace_suite(&ctx, &dtn, &mut out, &mut checks);
                record("subspace", r, &mut checks);
                let r = index_suite(&ctx, &dtn, &mut out, &mut checks);
                record("index", r, &mut checks);
                match spectrum {
                    Ok(s) => {
                        let r = sphere_suite(&ctx, &dtn, &s, &mut out, &mut checks);
                        record("sphere", r, &mut checks);
                    }
                    Err(e) => record("spectrum", Err(e), &mut checks),
                }
                let r = appendix_suite(&ctx.surface, cfg, &mut out, &mut checks);
                record("appendix", r, &mut checks);
            }
            Command::Appendix => unreachable!(),
        }
    }
    out.checks(&checks)?;
    Ok(RunReport { command, checks, files: out.files().to_vec() })
}

fn spectrum_suite(ctx: &Context, dtn: &DtnMap<'_>, out: &mut ReportWriter, checks: &mut Vec<Check>) -> Result<SteklovSpectrum> {
    let tol = ctx.tol();
    let spectrum = dtn.spectrum(ctx.cfg.n_eig)?;
    let mut s = Suite { name: "spectrum", checks };
    s.at_most("schur_asymmetry", dtn.asymmetry, tol.symmetry);
    s.at_most("max_weak_residual", max_abs(spectrum.weak_residuals.iter().copied()), tol.discrete);
    s.at_most("b_orthonormality", spectrum.orthonormality_error(&dtn.boundary_mass), tol.discrete);
    if let Some(target) = &ctx.targets.spectrum {
        for (k, (&got, &want)) in spectrum.eigenvalues.iter().zip(target).enumerate() {
            s.at_most(format!("eigenvalue_{k}_error"), (got - want).abs(), tol.eigenvalue);
        }
    }
    if let Some(n) = ctx.targets.below_one {
        if spectrum.len() > n {
            s.equals("count_below_one", spectrum.count_below(BELOW_ONE) as f64, n as f64);
        }
    }
    if let Some(n) = ctx.targets.kernel_dim {
        s.equals("kernel_dimension", dtn.kernel().len() as f64, n as f64);
    }
    let mut kernel_json = Vec::new();
    let zeta = ctx.ops.mesh.sample(|g| g.support);
    for m in dtn.kernel() {
        let mz = ctx.ops.interior_mass.apply(&zeta);
        let mk = ctx.ops.interior_mass.apply(&m.field);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let corr = dot(&m.field, &mz).abs() / (dot(&m.field, &mk) * dot(&zeta, &mz)).sqrt();
        kernel_json.push(json!({ "rayleigh": m.rayleigh, "residual": m.residual, "support_correlation": corr }));
        if ctx.targets.catenoid.is_some() {
            s.at_least("kernel_support_correlation", corr, 0.999);
        }
    }

    let (header, rows) = spectrum_rows(&ctx.ops.mesh, &spectrum);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let extra = json!({
        "surface": ctx.surface.label,
        "mesh": [ctx.cfg.n_t, ctx.cfg.n_theta],
        "kernel": kernel_json,
        "weak_residuals": spectrum.weak_residuals,
    });
    out.table("spectrum", &header, &rows, extra)?;
    if ctx.cfg.dump_eigenfields {
        out.json("eigenfields", eigenfield_dump(&ctx.ops.mesh, &spectrum))?;
    }
    Ok(spectrum)
}

fn matrix_json(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Rotated catenoid with mixed `nu_2, nu_3`: their individual traces are not
/// eigenfunctions.
fn mixes_components(alpha: f64) -> bool {
    (2.0 * alpha).sin().abs() > 1e-6
}

fn subspace_suite(ctx: &Context, dtn: &DtnMap<'_>, out: &mut ReportWriter, checks: &mut Vec<Check>) -> Result<()> {
    let tol = ctx.tol();
    let traces = normal_traces(&ctx.ops);
    let test = subspace_invariance(dtn, &traces)?;
    let mut s = Suite { name: "subspace", checks };
    let report = match &test {
        SubspaceTest::Equatorial { component, eigenvalue, residual } => {
            s.at_most("equatorial_residual", *residual, tol.subspace);
            json!({ "kind": "equatorial", "component": component, "eigenvalue": eigenvalue, "residual": residual })
        }
        SubspaceTest::Full(r) => {
            s.at_most("subspace_residual", r.residual, tol.subspace);
            if let Some(n) = ctx.targets.normal {
                for k in 0..3 {
                    s.at_most(format!("lambda_eigenvalue_{k}_error"), (r.eigenvalues[k] - n[k]).abs(), tol.eigenvalue);
                }
            }
            if let Some((_, alpha)) = ctx.targets.catenoid {
                if mixes_components(alpha) {
                    s.at_least("mixed_component_1_residual", r.component_residuals[1], 0.1);
                    s.at_least("mixed_component_2_residual", r.component_residuals[2], 0.1);
                }
            }
            let basis = s_orthogonal_basis(dtn, &traces)?;
            let scale = max_abs((0..3).map(|k| basis.pairwise_s[(k, k)]));
            s.at_most("basis_pairwise_s", basis.max_off_diagonal_s() / scale, tol.identity);
            let relation = max_abs((&basis.pairwise_s - &basis.predicted_s).iter().copied()) / scale;
            s.at_most("basis_s_equals_lambda_minus_one_b", relation, tol.identity);
            json!({
                "kind": "full",
                "residual": r.residual,
                "lambda": matrix_json(&r.lambda),
                "eigenvalues": r.eigenvalues,
                "rotation": matrix_json(&r.rotation),
                "component_residuals": r.component_residuals,
                "component_quotients": r.component_quotients,
                "off_diagonal": r.off_diagonal,
                "s_orthogonal_basis": basis.to_json(),
            })
        }
    };
    out.json("subspace", report)?;
    Ok(())
}

fn index_suite(ctx: &Context, _dtn: &DtnMap<'_>, out: &mut ReportWriter, checks: &mut Vec<Check>) -> Result<()> {
    let tol = ctx.tol();
    let im = gauss_map_matrix(&ctx.ops);
    let mut s = Suite { name: "index", checks };
    s.at_most("identity_discrepancy", im.max_discrepancy(), tol.identity);
    if gauss_map_dimension(&ctx.surface, 16)? == 3 {
        s.at_most("m_largest_eigenvalue", im.m_eigen.values[2], -0.1);
    }
    if let Some((k, _)) = ctx.targets.catenoid {
        let c2 = k.c * k.c;
        let pi4 = 4.0 * std::f64::consts::PI;
        let m11 = -pi4 * c2 * k.t0;
        let m33 = -pi4 * c2 * (k.t0.sinh() * k.t0.cosh() - k.t0);
        let mut m_closed = [m11, m11, m33];
        m_closed.sort_by(f64::total_cmp);
        let r11 = 2.0 * std::f64::consts::PI / k.t0.powi(3);
        let r33 = pi4 * c2 * k.t0;
        let mut r_closed = [r11, r11, r33];
        r_closed.sort_by(f64::total_cmp);
        for i in 0..3 {
            s.at_most(format!("m_eigenvalue_{i}_relative_error"), (im.m_eigen.values[i] / m_closed[i] - 1.0).abs(), tol.identity);
            s.at_most(format!("r_eigenvalue_{i}_relative_error"), (im.r_eigen.values[i] / r_closed[i] - 1.0).abs(), tol.identity);
        }
    }
    match out.format {
        Format::Json => {
            out.json("index", im.to_json())?;
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for (name, m) in [("M", &im.m), ("M_identity", &im.m_identity), ("discrepancy", &im.discrepancy), ("R", &im.r)] {
                for i in 0..3 {
                    for j in 0..3 {
                        rows.push(vec![name.to_string(), i.to_string(), j.to_string(), num(m[(i, j)])]);
                    }
                }
            }
            out.csv("index", &["matrix", "i", "j", "value"], &rows)?;
        }
    }
    Ok(())
}

/// Boundary-tensor eigenframe with each axis's `L_J` Rayleigh quotient.
fn eigen_frame(ctx: &Context, dtn: &DtnMap<'_>) -> Result<(Matrix3<f64>, [f64; 3])> {
    let frame = boundary_tensor_basis(&ctx.ops.mesh).vectors;
    let nu = normal_traces(&ctx.ops);
    let mut lambdas = [0.0; 3];
    for (k, l) in lambdas.iter_mut().enumerate() {
        let axis = frame.column(k);
        let tr: Vec<f64> = (0..nu[0].len()).map(|n| (0..3).map(|i| axis[i] * nu[i][n]).sum()).collect();
        let v = DVector::from_vec(tr);
        let b = (v.transpose() * &dtn.boundary_mass * &v)[0];
        *l = if b > 0.0 { (v.transpose() * &dtn.schur * &v)[0] / b } else { 0.0 };
    }
    // Snap to exact targets where they are known, so the orthogonality test
    // sees closed-form eigenvalues.
    if let Some(n) = ctx.targets.normal {
        for l in lambdas.iter_mut() {
            *l = *n.iter().min_by(|a, b| (*a - *l).abs().total_cmp(&(*b - *l).abs())).unwrap();
        }
    }
    Ok((frame, lambdas))
}

fn sphere_suite(
    ctx: &Context,
    dtn: &DtnMap<'_>,
    spectrum: &SteklovSpectrum,
    out: &mut ReportWriter,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let tol = ctx.tol();
    check_gauss_map(&ctx.ops, tol.gauss_floor)?;
    let n_eig = spectrum.len();
    let sp = pullback_problem(&ctx.ops, n_eig, tol)?;
    let z = zeta_check(&ctx.ops, tol)?;
    let rec = reconstruct_surface(&ctx.surface, ctx.cfg.n_t, ctx.cfg.n_theta, tol.gauss_floor)?;
    let curv = boundary_curvature_identity(&ctx.surface, BOUNDARY_SAMPLES)?;
    let (frame, lambdas) = eigen_frame(ctx, dtn)?;
    let seg = segment_test_in_frame(&ctx.surface, &frame, lambdas, BOUNDARY_SAMPLES)?;

    let mut s = Suite { name: "sphere", checks };
    for (k, (a, b)) in sp.spectrum.eigenvalues.iter().zip(&spectrum.eigenvalues).enumerate() {
        s.at_most(format!("transformed_eigenvalue_{k}_error"), (a - b).abs(), tol.eigenvalue);
    }
    s.at_most("max_boundary_integral", max_abs(sp.boundary_integrals.iter().copied()), tol.boundary_integral);
    s.at_most("conformality_residual", sp.conformality_residual, tol.discrete);
    s.at_most("gauss_curvature_reciprocity", sp.reciprocity_residual, tol.discrete);
    let s1_scale = max_abs(sp.s1_expected.iter().copied()).max(1.0);
    let s1 = max_abs(sp.s1_values.iter().zip(&sp.s1_expected).map(|(a, b)| a - b)) / s1_scale;
    s.at_most("transformed_index_form", s1, tol.discrete);
    s.at_most("support_interior_residual", z.interior_residual, tol.discrete);
    s.at_most("support_boundary_derivative_error", z.boundary_error, tol.discrete);
    s.at_most("reconstruction_error", rec.max_error, tol.discrete);
    s.at_most("reconstruction_boundary_norm_error", rec.boundary_norm_error, tol.discrete);
    let curv_tol = if ctx.targets.analytic { tol.analytic } else { tol.discrete };
    s.at_most("curvature_identity", max_abs(curv.iter().map(|c| c.identity_residual())), curv_tol);
    if let Some((k, _)) = ctx.targets.catenoid {
        s.at_most("curvature_equals_t0_sq", max_abs(curv.iter().map(|c| c.kappa_sq - k.t0 * k.t0)), tol.analytic);
    }
    s.at_most("image_plane_residual", seg.plane_residual, tol.fit);
    if ctx.targets.catenoid.is_some() {
        s.at_most("image_line_residual", seg.max_line_residual(), tol.fit);
        if let Some(o) = &seg.lambda_orthogonality {
            s.at_most("direction_lambda_orthogonality", max_abs(o.iter().copied()), tol.fit);
        }
        s.at_most("boundary_roundness", seg.max_roundness(), tol.fit);
    }
    let perturbed = perturbed_boundary(BOUNDARY_SAMPLES);
    s.at_least("perturbed_boundary_roundness", roundness(&perturbed)?.residual(), 1e-3);

    let extra = json!({
        "transformed_eigenvalues": sp.spectrum.eigenvalues,
        "boundary_integrals": sp.boundary_integrals,
        "conformality_residual": sp.conformality_residual,
        "reciprocity_residual": sp.reciprocity_residual,
        "support": {
            "interior_residual": z.interior_residual,
            "boundary_error": z.boundary_error,
            "boundary_trace": z.boundary_trace,
            "no_interior_zeros": z.no_interior_zeros,
        },
        "reconstruction": {
            "max_error": rec.max_error,
            "max_error_analytic": rec.max_error_analytic,
            "boundary_norm_error": rec.boundary_norm_error,
            "boundary_normal_error": rec.boundary_normal_error,
        },
        "segment": {
            "frame": (0..3).map(|k| frame.column(k).iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
            "lambdas": lambdas,
            "plane_residual": seg.plane_residual,
            "line_residuals": seg.line_residuals,
            "lambda_orthogonality": seg.lambda_orthogonality,
            "inverse_f_sq_fits": seg.inverse_f_sq_fits,
            "roundness": seg.roundness.iter().map(|c| c.residual()).collect::<Vec<_>>(),
        },
    });
    out.table("f_image", &["x", "y", "z"], &point_rows(&seg.image_points), extra)?;
    Ok(())
}

/// Unit-sphere curve with a `0.05 sin 3 theta` bump in the height,
/// renormalised: not a circle.
pub fn perturbed_boundary(n: usize) -> Vec<Vec3> {
    (0..n)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / n as f64;
            Vec3::new(0.8 * th.cos(), 0.8 * th.sin(), 0.6 + 0.05 * (3.0 * th).sin()).normalize()
        })
        .collect()
}

fn appendix_suite(surface: &ParametricSurface, cfg: &RunConfig, out: &mut ReportWriter, checks: &mut Vec<Check>) -> Result<()> {
    let tol = &cfg.tolerances;
    let mut s = Suite { name: "appendix", checks };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(APPENDIX_SEED);
    let (mut worst_oracle, mut worst_identity, mut worst_rational, mut worst_sphere) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..APPENDIX_CURVES {
        let curve = random_admissible_curve(&mut rng);
        worst_identity = worst_identity.max(max_abs(curve.identity_residuals()));
        for t in parameter_samples(&curve, APPENDIX_SAMPLES) {
            let c = curvature_closed_form(&curve, t)?;
            let o = curvature_numeric_oracle(&curve, t)?;
            worst_oracle = worst_oracle.max((c.kappa_sq - o).abs() / o.abs());
            worst_rational = worst_rational.max(c.difference.abs() / c.kappa_sq.abs());
            worst_sphere = worst_sphere.max((curve.point(t)?.norm_squared() - 1.0).abs());
        }
    }
    s.at_most("closed_form_vs_oracle", worst_oracle, tol.oracle);
    s.at_most("coefficient_identities", worst_identity, tol.analytic);
    s.at_most("closed_form_vs_rational", worst_rational, tol.analytic);
    s.at_most("on_unit_sphere", worst_sphere, tol.analytic);

    let latitude = make_segment_curve([1.0, -1.0, 0.0], [0.3, 0.3, 0.4], (-0.25, 0.25))?;
    s.at_most("latitude_kappa_sq", (curvature_closed_form(&latitude, 0.0)?.kappa_sq - 5.0 / 3.0).abs(), tol.analytic);
    let k0 = curvature_closed_form(&latitude, 0.0)?.kappa_sq;
    let spread = parameter_samples(&latitude, APPENDIX_SAMPLES)
        .into_iter()
        .map(|t| curvature_closed_form(&latitude, t).map(|c| c.kappa_sq - k0))
        .collect::<Result<Vec<_>>>()?;
    s.at_most("latitude_constant_curvature", max_abs(spread), tol.analytic);

    if let SurfaceKind::Catenoid { half_height, .. } = surface.kind {
        // Boundary circle in its own frame: F = b + a cos(2 theta) with
        // a = (r^2/2, -r^2/2, 0), so one a_i vanishes and A = 0.
        let kc = catenoid_constants()?;
        if (half_height - kc.t0).abs() <= 1e-12 {
            let r2 = (kc.c * kc.t0.cosh()).powi(2);
            let z2 = 1.0 - r2;
            let curve = make_segment_curve([r2 / 2.0, -r2 / 2.0, 0.0], [r2 / 2.0, r2 / 2.0, z2], (-0.9, 0.9))?;
            s.at_most("catenoid_boundary_a", curve.coefficients.big_a.abs(), tol.analytic);
            let k = curvature_closed_form(&curve, 0.3)?.kappa_sq;
            s.at_most("catenoid_boundary_kappa_sq", (k - kc.t0 * kc.t0).abs(), tol.analytic);
        }
    }

    let worked = make_segment_curve([1.0, 1.0, -2.0], [0.2, 0.3, 0.5], (-0.15, 0.15))?;
    let ts = parameter_samples(&worked, APPENDIX_SAMPLES);
    match out.format {
        Format::Csv => {
            write_curvature_csv(&worked, &ts, out.create("appendix_curvature", "csv")?)?;
        }
        Format::Json => {
            let rows = ts
                .iter()
                .map(|&t| -> Result<_> {
                    let c = curvature_closed_form(&worked, t)?;
                    let o = curvature_numeric_oracle(&worked, t)?;
                    Ok(json!({ "t": t, "kappa_sq_closed": c.kappa_sq, "kappa_sq_oracle": o, "difference": c.kappa_sq - o }))
                })
                .collect::<Result<Vec<_>>>()?;
            out.json("appendix_curvature", json!({ "curve": worked, "rows": rows }))?;
        }
    }
    Ok(())
}

/// Human-readable summary of a surface.
pub fn describe(name: &str) -> Result<String> {
    let surface = resolve_surface(name)?;
    let mut lines = vec![format!("surface: {}", surface.label)];
    let d = surface.domain;
    lines.push(format!(
        "parameters: t in [{}, {}], theta in [{}, {}]{}",
        d.t_range.0,
        d.t_range.1,
        d.theta_range.0,
        d.theta_range.1,
        if d.periodic { " (periodic)" } else { "" }
    ));
    let mesh = build_mesh(&surface, 16, 256)?;
    let lengths: Vec<String> = mesh.boundary_lengths().iter().map(|l| format!("{l:.10}")).collect();
    lines.push(format!("free boundary components: {}, lengths = [{}]", lengths.len(), lengths.join(", ")));
    lines.push(format!("Gauss map dimension: {}", gauss_map_dimension(&surface, 16)?));
    match surface.kind {
        SurfaceKind::Catenoid { half_height, scale, alpha } => {
            let k = catenoid_constants()?;
            lines.push(format!("T0 = {:.15}, c = {:.13}", k.t0, k.c));
            if (half_height - k.t0).abs() <= 1e-12 {
                let [l1, l2, l3] = k.normal_eigenvalues();
                lines.push(format!("lambda = {{-1, -1, T0^2-1}} = {{{l1}, {l2}, {l3:.13}}}"));
                lines.push(format!("f = -h(eta, eta) = {:.13}; boundary curvature^2 = T0^2 = {:.13}", k.boundary_f(), k.t0 * k.t0));
                lines.push("Dirichlet Jacobi kernel: span(zeta), zeta = X . nu vanishes on the boundary".into());
            } else {
                lines.push(format!("half height {half_height}, scale {scale}: not orthogonal to the sphere"));
            }
            if alpha != 0.0 {
                lines.push(format!("rotated by alpha = {alpha} in the yz-plane"));
            }
            lines.push("constants from the root of coth T = T".into());
        }
        SurfaceKind::Disk { hole_radius } => {
            lines.push("|h|^2 = 0, Jacobi-Steklov = classical Steklov".into());
            lines.push("eigenvalues 0, 1, 1, 2, 2, ...; Dirichlet Jacobi kernel trivial".into());
            lines.push(format!("polar pole cut at r = {hole_radius} with a natural condition"));
        }
        SurfaceKind::Custom => {
            lines.push("user-supplied immersion; derivatives by finite differences where not given".into());
        }
    }
    Ok(lines.join("\n") + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_parsing() {
        assert_eq!(parse_mesh("64x128").unwrap(), (64, 128));
        assert!(parse_mesh("64by128").is_err());
        assert!(parse_mesh("x8").is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig { n_t: 4, ..Default::default() };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.n_t = 16;
        c.n_eig = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn describe_known_and_unknown() {
        let c = describe("catenoid").unwrap();
        assert!(c.contains("T0 = 1.19967864"));
        assert!(c.contains("lambda = {-1, -1, T0^2-1}"));
        assert!(describe("disk").unwrap().contains("|h|^2 = 0, Jacobi-Steklov = classical Steklov"));
        assert!(matches!(describe("foo"), Err(Error::UnknownSurface(_))));
    }

    #[test]
    fn perturbed_curve_is_on_sphere() {
        for p in perturbed_boundary(32) {
            assert!((p.norm() - 1.0).abs() < 1e-15);
        }
    }
}
