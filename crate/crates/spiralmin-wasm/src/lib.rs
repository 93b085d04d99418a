//! Browser bindings for the spiral minimal graph demo: surface meshes for a
//! wireframe view, the solved profile with its residual history, and the
//! curvature blowup law.

use wasm_bindgen::prelude::*;

use spiralmin::grid::GridFunction;
use spiralmin::report::fmt_f64;
use spiralmin::solver::{picard_solve, GraphSurface, SolveResult, SolverConfig};
use spiralmin::verify::blowup_scaling;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn config_for(delta: f64, grid_n: usize) -> SolverConfig {
    let mut config = SolverConfig::new(delta);
    config.n = grid_n;
    config
}

fn solve(delta: f64, grid_n: usize) -> Result<(SolverConfig, SolveResult), String> {
    let config = config_for(delta, grid_n);
    let result = picard_solve(&config).map_err(err)?;
    Ok((config, result))
}

fn json_array(values: impl Iterator<Item = f64>) -> String {
    let mut out = String::from("[");
    for (i, v) in values.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_f64(v));
    }
    out.push(']');
    out
}

/// Solves `Q_δ(u) = 0` and returns the profile and certificates as JSON:
/// `{s, u, residual_history, converged, iterations, norm_x2}`.
#[wasm_bindgen]
pub fn solve_profile_json(delta: f64, grid_n: usize) -> Result<String, String> {
    let (_, result) = solve(delta, grid_n)?;
    let n = result.u.n();
    let mut out = String::from("{");
    out.push_str(&format!("\"converged\": {}, ", result.converged));
    out.push_str(&format!("\"iterations\": {}, ", result.iterations));
    out.push_str(&format!("\"norm_x2\": {}, ", fmt_f64(result.norm_x2)));
    out.push_str(&format!("\"s\": {}, ", json_array((0..n).map(|i| result.u.s(i)))));
    out.push_str(&format!("\"u\": {}, ", json_array(result.u.values().iter().copied())));
    out.push_str(&format!(
        "\"residual_history\": {}",
        json_array(result.residual_history.iter().copied())
    ));
    out.push('}');
    Ok(out)
}

/// Vertices of the (optionally solved) graph surface over
/// `θ ∈ [0, 2π · turns]` as interleaved `x, y, z` triples, row-major with the
/// θ index fastest (grid `n_s × n_theta`).
#[wasm_bindgen]
pub fn graph_mesh_vertices(
    delta: f64,
    turns: f64,
    n_s: usize,
    n_theta: usize,
    solved: bool,
) -> Result<Vec<f64>, String> {
    if !(turns > 0.0 && turns.is_finite()) || n_s < 2 || n_theta < 2 {
        return Err("need positive turns and mesh counts of at least 2".into());
    }
    let u = if solved {
        solve(delta, 501)?.1.u
    } else {
        GridFunction::zeros(config_for(delta, 501).half_width(), 501).map_err(err)?
    };
    let surface = GraphSurface::new(delta, &u).map_err(err)?;
    let half = u.half_width();
    let theta_max = 2.0 * std::f64::consts::PI * turns;
    let mut out = Vec::with_capacity(3 * n_s * n_theta);
    for i in 0..n_s {
        let s = -half + 2.0 * half * i as f64 / (n_s - 1) as f64;
        for j in 0..n_theta {
            let theta = theta_max * j as f64 / (n_theta - 1) as f64;
            let p = surface.eval(s, theta).map_err(err)?;
            out.extend_from_slice(&[p.x, p.y, p.z]);
        }
    }
    Ok(out)
}

/// The measured curvature blowup ratio `sup_{h > h₀} |A|² · δ² h₀²` (the law
/// says 2), by grid search confirmed against the analytic maximum.
#[wasm_bindgen]
pub fn blowup_ratio(delta: f64, h0: f64) -> Result<f64, String> {
    Ok(blowup_scaling(delta, h0).map_err(err)?.ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_json_shape() {
        let json = solve_profile_json(0.05, 501).unwrap();
        assert!(json.contains("\"converged\": true"));
        assert!(json.contains("\"residual_history\": ["));
    }

    #[test]
    fn mesh_vertex_count_and_height() {
        let v = graph_mesh_vertices(0.1, 2.0, 8, 16, false).unwrap();
        assert_eq!(v.len(), 3 * 8 * 16);
        // raw surface stays above the plane z = 0
        assert!(v.chunks(3).all(|p| p[2] > 0.0));
    }

    #[test]
    fn blowup_ratio_is_two() {
        let r = blowup_ratio(0.1, 50.0).unwrap();
        assert!((r - 2.0).abs() < 1e-3, "ratio {r}");
    }

    #[test]
    fn errors_propagate() {
        assert!(graph_mesh_vertices(0.5, 2.0, 8, 8, false).is_err());
        assert!(blowup_ratio(0.1, -1.0).is_err());
    }
}
