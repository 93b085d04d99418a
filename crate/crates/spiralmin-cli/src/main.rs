//! Command-line front end: geometry checks, the fixed-point solve, the
//! verification battery, and mesh export. All outputs are deterministic
//! (fixed key order, 17-significant-digit floats) so identical configs give
//! byte-identical files.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error,
//! 3 solver divergence.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use spiralmin::geometry::{geometry_at, immersion_jet, H_SIGN_NOTE};
use spiralmin::grid::GridFunction;
use spiralmin::mc::mean_curvature_of_jet;
use spiralmin::report::{fmt_f64, Provenance, Report};
use spiralmin::solver::{picard_solve, q_apply, DisplacementMode, SolveResult, SolverConfig};
use spiralmin::verify::{
    constants_probe, embeddedness_check, fd_jet, helicoid_limit, surface_residual, ScalingReport,
};
use spiralmin::{mesh, Error};

#[derive(Parser)]
#[command(name = "spiralmin", version, about = "Minimal graphs over a spiraling disk")]
struct Cli {
    /// Flat JSON config file; unknown keys are rejected, flags override
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Spiral parameter δ in (0, 0.2]
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Domain scale: the solver grid covers [-ε δ^{-1/4}, ε δ^{-1/4}]
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Certificate ball radius factor (‖u‖ ≤ ζδ)
    #[arg(long, global = true)]
    zeta: Option<f64>,
    /// Solver grid node count (odd)
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    #[arg(long, global = true)]
    theta_min: Option<f64>,
    #[arg(long, global = true)]
    theta_max: Option<f64>,
    /// Residual tolerance of the solve
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    /// Hölder exponent of the weighted norms
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Output file path
    #[arg(long, global = true)]
    output: Option<String>,
    /// Output format: obj, csv, or json-report
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every closed-form geometry and functional invariant on a grid
    GeometryCheck,
    /// Solve Q_δ(u) = 0 and write the profile CSV plus a JSON report
    Solve,
    /// Blowup law, helicoid limit, embeddedness, and constants probes
    Verify {
        /// Profile CSV from a previous solve (otherwise solves internally)
        #[arg(long)]
        u_file: Option<PathBuf>,
    },
    /// Triangulate the graph surface and write a Wavefront OBJ
    ExportMesh {
        /// Profile CSV from a previous solve
        #[arg(long)]
        u_file: Option<PathBuf>,
        /// Mesh the raw surface (u = 0) instead
        #[arg(long)]
        flat: bool,
    },
    /// Geometry checks plus the verification battery in one report
    Report,
}

/// Flat JSON config; every key optional, unknown keys rejected.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    delta: Option<f64>,
    epsilon: Option<f64>,
    zeta: Option<f64>,
    grid_n: Option<usize>,
    theta_min: Option<f64>,
    theta_max: Option<f64>,
    tol: Option<f64>,
    max_iters: Option<usize>,
    alpha: Option<f64>,
    mesh_n_s: Option<usize>,
    mesh_n_theta: Option<usize>,
    output: Option<String>,
    format: Option<String>,
}

struct RunConfig {
    solver: SolverConfig,
    theta_min: f64,
    theta_max: f64,
    mesh_n_s: usize,
    mesh_n_theta: usize,
    output: Option<String>,
    format: Option<String>,
}

fn load_config(cli: &Cli) -> Result<RunConfig, String> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            if text.trim().is_empty() {
                FileConfig::default()
            } else {
                serde_json::from_str(&text).map_err(|e| format!("config error: {e}"))?
            }
        }
        None => FileConfig::default(),
    };
    let mut solver = SolverConfig::new(cli.delta.or(file.delta).unwrap_or(0.1));
    if let Some(v) = cli.epsilon.or(file.epsilon) {
        solver.epsilon = v;
    }
    if let Some(v) = cli.zeta.or(file.zeta) {
        solver.zeta = v;
    }
    if let Some(v) = cli.grid_n.or(file.grid_n) {
        solver.n = v;
    }
    if let Some(v) = cli.tol.or(file.tol) {
        solver.tol_residual = v;
    }
    if let Some(v) = cli.max_iters.or(file.max_iters) {
        solver.max_iters = v;
    }
    if let Some(v) = cli.alpha.or(file.alpha) {
        solver.alpha = v;
    }
    let config = RunConfig {
        solver,
        theta_min: cli.theta_min.or(file.theta_min).unwrap_or(0.0),
        theta_max: cli.theta_max.or(file.theta_max).unwrap_or(4.0 * PI),
        mesh_n_s: file.mesh_n_s.unwrap_or(50),
        mesh_n_theta: file.mesh_n_theta.unwrap_or(200),
        output: cli.output.clone().or(file.output),
        format: cli.format.clone().or(file.format),
    };
    if let Some(f) = &config.format {
        if !matches!(f.as_str(), "obj" | "csv" | "json-report") {
            return Err(format!("format must be obj, csv, or json-report, got {f}"));
        }
    }
    if !(config.theta_max > config.theta_min) {
        return Err("theta_max must exceed theta_min".into());
    }
    if config.mesh_n_s < 2 || config.mesh_n_theta < 2 {
        return Err("mesh_n_s and mesh_n_theta must be at least 2".into());
    }
    config.solver.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn write_file(path: &str, content: &str) -> Result<(), String> {
    std::fs::write(path, content).map_err(|e| format!("cannot write {path}: {e}"))
}

/// Profile CSV: header `s,u,du,ddu,Q`, one row per node, 17 significant digits.
fn profile_csv(u: &GridFunction, q: &GridFunction) -> String {
    let d1 = u.d1();
    let d2 = u.d2();
    let mut out = String::from("s,u,du,ddu,Q\n");
    for i in 0..u.n() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(u.s(i)),
            fmt_f64(u.values()[i]),
            fmt_f64(d1[i]),
            fmt_f64(d2[i]),
            fmt_f64(q.values()[i]),
        ));
    }
    out
}

fn read_profile(path: &Path) -> Result<GridFunction, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read u file {}: {e}", path.display()))?;
    let mut s = Vec::new();
    let mut u = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            if !line.starts_with("s,u") {
                return Err(format!("{}: not a profile CSV", path.display()));
            }
            continue;
        }
        let mut cols = line.split(',');
        let (a, b) = (cols.next(), cols.next());
        match (a, b) {
            (Some(a), Some(b)) => {
                s.push(a.parse::<f64>().map_err(|e| format!("bad s value: {e}"))?);
                u.push(b.parse::<f64>().map_err(|e| format!("bad u value: {e}"))?);
            }
            _ => return Err(format!("{}: malformed row {}", path.display(), lineno + 1)),
        }
    }
    if s.len() < 3 {
        return Err("profile CSV has fewer than 3 rows".into());
    }
    let half = s.last().unwrap().abs().max(s[0].abs());
    let g = GridFunction::new(half, u).map_err(|e| e.to_string())?;
    for (i, &si) in s.iter().enumerate() {
        if (g.s(i) - si).abs() > 1e-9 * (1.0 + half) {
            return Err(format!("profile grid is not uniform at row {}", i + 2));
        }
    }
    Ok(g)
}

fn report_path(output: &str) -> String {
    Path::new(output).with_extension("report.json").to_string_lossy().into_owned()
}

/// Residual-history JSON written next to the CSV (also on divergence).
fn solve_report_json(config: &SolverConfig, result: &SolveResult, surface_res: Option<f64>) -> String {
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"delta\": {},\n", fmt_f64(config.delta)));
    out.push_str(&format!("  \"converged\": {},\n", result.converged));
    out.push_str(&format!("  \"iterations\": {},\n", result.iterations));
    out.push_str(&format!("  \"norm_x2\": {},\n", fmt_f64(result.norm_x2)));
    out.push_str(&format!(
        "  \"pointwise_margin\": {},\n",
        fmt_f64(result.pointwise_margin)
    ));
    if let Some(r) = surface_res {
        out.push_str(&format!("  \"surface_residual\": {},\n", fmt_f64(r)));
    }
    out.push_str("  \"residual_history\": [");
    for (i, r) in result.residual_history.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_f64(*r));
    }
    out.push_str("]\n}\n");
    out
}

fn cmd_geometry_check(config: &RunConfig) -> Result<Report, String> {
    let delta = config.solver.delta;
    let mut report = Report::new(&format!("geometry-check delta={delta}"));
    let map = move |s: f64, theta: f64| Ok(immersion_jet(s, theta, delta)?.0);

    let mut worst_fd = 0.0f64;
    let mut worst_det = 0.0f64;
    let mut worst_normal = 0.0f64;
    let mut worst_laplace = 0.0f64;
    let mut worst_h = 0.0f64;
    for i in 0..31 {
        let s = -3.0 + 6.0 * i as f64 / 30.0;
        for j in 0..21 {
            let theta =
                config.theta_min + (config.theta_max - config.theta_min) * j as f64 / 20.0;
            let rec = geometry_at(s, theta, delta).map_err(|e| e.to_string())?;
            let (point, exact) = immersion_jet(s, theta, delta).map_err(|e| e.to_string())?;
            let scale = exact.sup_abs().max(point.norm());
            let fd = fd_jet(&map, s, theta, 1e-4).map_err(|e| e.to_string())?;
            worst_fd = worst_fd.max((fd - exact).sup_abs() / scale);

            let closed = (4.0 * delta * theta).exp() * s.cosh().powi(4);
            worst_det = worst_det.max((rec.det_g - closed).abs() / closed);

            worst_normal = worst_normal
                .max((rec.normal.norm() - 1.0).abs())
                .max(rec.normal.dot(&rec.jet.grad_s).abs() / scale)
                .max(rec.normal.dot(&rec.jet.grad_theta).abs() / scale);

            // Δ_g G = H ν through the stored Laplace coefficients
            let lc = rec.laplace;
            let jet = rec.jet;
            let lap = (lc.c_ss * jet.hess_ss
                + lc.c_tt * jet.hess_theta_theta
                + lc.c_st * jet.hess_s_theta
                + lc.c_s * jet.grad_s
                + lc.c_t * jet.grad_theta)
                / lc.prefactor;
            worst_laplace = worst_laplace.max((lap - rec.h * rec.normal).norm());

            // functional on the jet returns the opposite-orientation trace
            let h_jet = mean_curvature_of_jet(&rec.jet).map_err(|e| e.to_string())?;
            worst_h = worst_h.max((h_jet + rec.h).abs());
        }
    }
    report.check_abs("fd-jet-relative", worst_fd, 1e-6, Provenance::DerivedConstant);
    report.check_abs("det-g-closed-form", worst_det, 1e-10, Provenance::PaperClaim);
    report.check_abs("normal-unit-orthogonal", worst_normal, 1e-12, Provenance::PaperClaim);
    report.check_abs("laplace-coordinates", worst_laplace, 1e-8, Provenance::PaperClaim);
    report.check_abs("h-trace-vs-functional", worst_h, 1e-10, Provenance::DerivedConstant);

    // Q(0) = δ tanh on the solver grid
    let u = GridFunction::zeros(config.solver.half_width(), 401).map_err(|e| e.to_string())?;
    let q = q_apply(&u, delta, DisplacementMode::Delta).map_err(|e| e.to_string())?;
    let mut worst_q = 0.0f64;
    for i in 0..u.n() {
        worst_q = worst_q.max((q.values()[i] - delta * u.s(i).tanh()).abs());
    }
    report.check_abs("q-at-zero", worst_q, 1e-12, Provenance::PaperClaim);
    report.note(H_SIGN_NOTE);
    Ok(report)
}

fn run_solve(config: &RunConfig) -> Result<(SolveResult, GridFunction), (i32, String)> {
    match picard_solve(&config.solver) {
        Ok(result) => {
            let q = q_apply(&result.u, config.solver.delta, DisplacementMode::Delta)
                .map_err(|e| (1, e.to_string()))?;
            Ok((result, q))
        }
        Err(Error::Diverged { iterations, last_residual, residual_history }) => {
            // persist the history, then report divergence
            if let Some(output) = &config.output {
                let fake = SolveResult {
                    converged: false,
                    u: GridFunction::zeros(config.solver.half_width(), config.solver.n)
                        .map_err(|e| (2, e.to_string()))?,
                    residual_history,
                    norm_x2: f64::NAN,
                    pointwise_margin: f64::NAN,
                    iterations,
                };
                let _ = write_file(&report_path(output), &solve_report_json(&config.solver, &fake, None));
            }
            Err((3, format!(
                "no convergence after {iterations} iterations; last residual {last_residual:.3e}"
            )))
        }
        Err(e) => Err((2, e.to_string())),
    }
}

fn cmd_solve(config: &RunConfig) -> Result<Report, (i32, String)> {
    let (result, q) = run_solve(config)?;
    let output = config.output.clone().unwrap_or_else(|| "solve.csv".into());
    let surface_res = surface_residual(&result.u, config.solver.delta, &[0.0, PI])
        .map_err(|e| (1, e.to_string()))?;
    write_file(&output, &profile_csv(&result.u, &q)).map_err(|e| (2, e))?;
    write_file(
        &report_path(&output),
        &solve_report_json(&config.solver, &result, Some(surface_res)),
    )
    .map_err(|e| (2, e))?;

    let mut report = Report::new(&format!("solve delta={}", config.solver.delta));
    let zeta_delta = config.solver.zeta * config.solver.delta;
    report.check_abs(
        "residual-sup",
        *result.residual_history.last().unwrap(),
        config.solver.tol_residual,
        Provenance::PaperClaim,
    );
    report.check_bool(
        "norm-in-ball",
        result.norm_x2,
        zeta_delta,
        result.norm_x2 <= zeta_delta,
        Provenance::PaperClaim,
    );
    report.check_bool(
        "pointwise-quadratic",
        result.pointwise_margin,
        1.0,
        result.pointwise_margin <= 1.0,
        Provenance::DerivedConstant,
    );
    report.check_abs("surface-residual", surface_res, 1e-6, Provenance::DerivedConstant);
    report.note(&format!("iterations: {}", result.iterations));
    report.note(&format!("profile: {output}"));
    Ok(report)
}

fn cmd_verify(config: &RunConfig, u_file: Option<&Path>) -> Result<Report, (i32, String)> {
    let delta = config.solver.delta;
    let mut report = Report::new(&format!("verify delta={delta}"));

    // curvature blowup law across δh₀
    let h0_list: Vec<f64> = [0.01, 0.1, 0.5].iter().map(|x| x / delta).collect();
    let scaling = ScalingReport::compute(delta, &h0_list).map_err(|e| (2, e.to_string()))?;
    for row in &scaling.rows {
        report.check_abs(
            &format!("blowup-ratio-h0-{:.4}", row.h0),
            row.ratio - 2.0,
            1e-3,
            Provenance::DerivedConstant,
        );
    }

    // helicoid limit: linear order in δ
    let rows = helicoid_limit(&[0.04, 0.02, 0.01], 1.5, 2.0 * PI).map_err(|e| (2, e.to_string()))?;
    for w in rows.windows(2) {
        let order = (w[0].1 / w[1].1).log2();
        report.check_abs(
            &format!("helicoid-order-{}-{}", w[0].0, w[1].0),
            order - 1.0,
            0.1,
            Provenance::PaperClaim,
        );
    }

    // embeddedness of the solved (or supplied) graph
    let u = match u_file {
        Some(path) => read_profile(path).map_err(|e| (2, e))?,
        None => run_solve(config)?.0.u,
    };
    let emb = embeddedness_check(&u, delta, config.theta_min, config.theta_max)
        .map_err(|e| (2, e.to_string()))?;
    report.check_bool(
        "sheet-gap-margin",
        emb.margin,
        1.0,
        emb.margin > 1.0,
        Provenance::PaperClaim,
    );
    report.check_bool(
        "displacement-envelope",
        emb.envelope_ratio,
        1.0,
        emb.envelope_ratio <= 1.0,
        Provenance::PaperClaim,
    );
    let surface_res =
        surface_residual(&u, delta, &[0.0, PI]).map_err(|e| (1, e.to_string()))?;
    report.check_abs("surface-residual", surface_res, 1e-6, Provenance::DerivedConstant);

    // lemma constants at this δ
    let probe = constants_probe(&[delta], 3).map_err(|e| (2, e.to_string()))?;
    let row = &probe.rows[0];
    report.check_bool(
        "contraction-ratio",
        row.contraction_max,
        1.0,
        row.contraction_max < 1.0,
        Provenance::PaperClaim,
    );
    report.note(&format!(
        "constants: C1 = {:.4}, C2 = {:.4}, C3 = {:.4}",
        row.c1, row.c2, row.c3
    ));
    Ok(report)
}

fn cmd_export_mesh(
    config: &RunConfig,
    u_file: Option<&Path>,
    flat: bool,
) -> Result<String, (i32, String)> {
    let u = match (u_file, flat) {
        (Some(path), false) => read_profile(path).map_err(|e| (2, e))?,
        (None, true) => GridFunction::zeros(config.solver.half_width(), config.solver.n)
            .map_err(|e| (2, e.to_string()))?,
        (Some(_), true) => return Err((2, "pass either --u-file or --flat, not both".into())),
        (None, false) => return Err((2, "export-mesh needs --u-file or --flat".into())),
    };
    let params = mesh::MeshParams {
        theta_min: config.theta_min,
        theta_max: config.theta_max,
        n_s: config.mesh_n_s,
        n_theta: config.mesh_n_theta,
    };
    let m = mesh::build_mesh(config.solver.delta, &u, &params).map_err(|e| (2, e.to_string()))?;
    let output = config.output.clone().unwrap_or_else(|| "surface.obj".into());
    write_file(&output, &mesh::obj_string(&m)).map_err(|e| (2, e))?;
    Ok(format!(
        "wrote {output}: {} vertices, {} faces",
        m.vertices.len(),
        m.faces.len()
    ))
}

fn finish(report: Report, config: &RunConfig) -> Result<i32, (i32, String)> {
    print!("{}", report.render_text());
    if let Some(output) = &config.output {
        if config.format.as_deref() != Some("csv") && config.format.as_deref() != Some("obj") {
            write_file(output, &report.to_json()).map_err(|e| (2, e))?;
        }
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<i32, (i32, String)> {
    let config = load_config(cli).map_err(|e| (2, e))?;
    match &cli.cmd {
        Cmd::GeometryCheck => {
            let report = cmd_geometry_check(&config).map_err(|e| (2, e))?;
            print!("{}", report.render_text());
            if let Some(output) = &config.output {
                write_file(output, &report.to_json()).map_err(|e| (2, e))?;
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Cmd::Solve => {
            let report = cmd_solve(&config)?;
            print!("{}", report.render_text());
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Cmd::Verify { u_file } => {
            let report = cmd_verify(&config, u_file.as_deref())?;
            finish(report, &config)
        }
        Cmd::ExportMesh { u_file, flat } => {
            let message = cmd_export_mesh(&config, u_file.as_deref(), *flat)?;
            println!("{message}");
            Ok(0)
        }
        Cmd::Report => {
            let mut report = cmd_geometry_check(&config).map_err(|e| (2, e))?;
            report.merge(cmd_verify(&config, None)?);
            finish(report, &config)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
