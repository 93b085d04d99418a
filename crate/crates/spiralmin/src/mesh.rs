//! Triangulated meshes of the spiral surface and its minimal graph, with
//! Wavefront OBJ export.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::check_delta;
use crate::grid::GridFunction;
use crate::report::fmt_f64;
use crate::solver::GraphSurface;

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Vector3<f64>>,
    /// Triangles as 0-based vertex index triples, oriented so the triangle
    /// normal agrees with the side of the surface normal ν.
    pub faces: Vec<[u32; 3]>,
}

/// Parameter window and density of a mesh.
#[derive(Debug, Clone, Copy)]
pub struct MeshParams {
    pub theta_min: f64,
    pub theta_max: f64,
    pub n_s: usize,
    pub n_theta: usize,
}

/// Builds the graph surface mesh over `[-S, S] × [theta_min, theta_max]`
/// with `u` interpolated cubically (pass `u ≡ 0` for the raw immersion).
/// Two triangles per grid quad, `n_s · n_theta` vertices.
pub fn build_mesh(delta: f64, u: &GridFunction, params: &MeshParams) -> Result<Mesh> {
    check_delta(delta)?;
    if params.n_s < 2 || params.n_theta < 2 {
        return Err(Error::InvalidArgument("mesh counts must be at least 2".into()));
    }
    if !(params.theta_max > params.theta_min) {
        return Err(Error::InvalidArgument("theta_max must exceed theta_min".into()));
    }
    let surface = GraphSurface::new(delta, u)?;
    let half = u.half_width();
    let (n_s, n_t) = (params.n_s, params.n_theta);
    let mut vertices = Vec::with_capacity(n_s * n_t);
    for i in 0..n_s {
        let s = -half + 2.0 * half * i as f64 / (n_s - 1) as f64;
        for j in 0..n_t {
            let theta = params.theta_min
                + (params.theta_max - params.theta_min) * j as f64 / (n_t - 1) as f64;
            vertices.push(surface.eval(s, theta)?);
        }
    }
    // quad (i, j): corners at rows i, i+1 and columns j, j+1; winding runs
    // θ-first so triangle normals land on the ν side (ν = −(G_s ∧ G_θ)/|·|,
    // the frame triple being left-handed)
    let mut faces = Vec::with_capacity(2 * (n_s - 1) * (n_t - 1));
    let at = |i: usize, j: usize| (i * n_t + j) as u32;
    for i in 0..n_s - 1 {
        for j in 0..n_t - 1 {
            faces.push([at(i, j), at(i, j + 1), at(i + 1, j + 1)]);
            faces.push([at(i, j), at(i + 1, j + 1), at(i + 1, j)]);
        }
    }
    Ok(Mesh { vertices, faces })
}

/// Serializes a mesh as OBJ: `v x y z` rows then `f i j k` rows with
/// 1-based indices, floats at 17 significant digits.
pub fn obj_string(mesh: &Mesh) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 64);
    for v in &mesh.vertices {
        out.push_str(&format!("v {} {} {}\n", fmt_f64(v.x), fmt_f64(v.y), fmt_f64(v.z)));
    }
    for f in &mesh.faces {
        out.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::geometry_at;

    fn params(n_s: usize, n_theta: usize) -> MeshParams {
        MeshParams {
            theta_min: 0.0,
            theta_max: 4.0 * std::f64::consts::PI,
            n_s,
            n_theta,
        }
    }

    #[test]
    fn combinatorics() {
        let u = GridFunction::zeros(1.0, 401).unwrap();
        let mesh = build_mesh(0.1, &u, &params(50, 200)).unwrap();
        assert_eq!(mesh.vertices.len(), 10_000);
        assert_eq!(mesh.faces.len(), 2 * 49 * 199);
    }

    #[test]
    fn flat_mesh_heights_positive() {
        // with u = 0 every vertex z equals e^{δθ}/δ > 0: one side of the plane
        let d = 0.1;
        let u = GridFunction::zeros(1.0, 401).unwrap();
        let p = params(10, 40);
        let mesh = build_mesh(d, &u, &p).unwrap();
        for (idx, v) in mesh.vertices.iter().enumerate() {
            let j = idx % p.n_theta;
            let theta = p.theta_max * j as f64 / (p.n_theta - 1) as f64;
            let expect = (d * theta).exp() / d;
            assert!((v.z - expect).abs() < 1e-10 * expect);
            assert!(v.z > 0.0);
        }
    }

    #[test]
    fn orientation_agrees_with_normal() {
        let d = 0.1;
        let u = GridFunction::zeros(1.0, 401).unwrap();
        let p = params(20, 60);
        let mesh = build_mesh(d, &u, &p).unwrap();
        for f in mesh.faces.iter().step_by(17) {
            let [a, b, c] = f.map(|i| mesh.vertices[i as usize]);
            let tri_normal = (b - a).cross(&(c - a));
            // recover (s, θ) of the first corner from its index
            let i = f[0] as usize / p.n_theta;
            let j = f[0] as usize % p.n_theta;
            let s = -1.0 + 2.0 * i as f64 / (p.n_s - 1) as f64;
            let theta = p.theta_max * j as f64 / (p.n_theta - 1) as f64;
            let nu = geometry_at(s, theta, d).unwrap().normal;
            assert!(tri_normal.dot(&nu) > 0.0, "face flipped at s={s}, θ={theta}");
        }
    }

    #[test]
    fn obj_format() {
        let u = GridFunction::zeros(1.0, 401).unwrap();
        let mesh = build_mesh(0.1, &u, &params(2, 2)).unwrap();
        let obj = obj_string(&mesh);
        let lines: Vec<&str> = obj.lines().collect();
        assert_eq!(lines.len(), 4 + 2);
        assert!(lines[0].starts_with("v "));
        assert!(lines[4].starts_with("f "));
        // 1-based indices only
        for line in lines.iter().filter(|l| l.starts_with('f')) {
            for tok in line.split_whitespace().skip(1) {
                assert!(tok.parse::<u32>().unwrap() >= 1);
            }
        }
    }
}
