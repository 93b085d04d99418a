//! The mean-curvature functional `H(∇̄)` on jet space: homogeneous of degree
//! −1, rotation invariant, realized concretely as the trace of the second
//! derivatives' normal components against the dual metric of `∇ᵀ∇`.

use nalgebra::Matrix3;
#[cfg(test)]
use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{Jet, JetDirection};

/// Scale-invariant degeneracy tolerance: a jet is immersed when
/// `det(∇ᵀ∇) > DEGENERACY_TOL · |∇|⁴`.
pub const DEGENERACY_TOL: f64 = 1e-24;

/// Hypothesis bound on the conformal defect for derivative estimates.
pub const DEFECT_BOUND: f64 = 0.25;

/// Failure of the parametrization to be conformal: vanishes exactly when the
/// gradient columns are orthogonal and of equal length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalDefect {
    /// `(∇_s/|∇_s|) · (∇_θ/|∇_θ|)`
    pub dot: f64,
    /// `|∇_s|/|∇_θ| − 1`
    pub ratio_minus_one: f64,
}

impl ConformalDefect {
    pub fn magnitude(&self) -> f64 {
        self.dot.hypot(self.ratio_minus_one)
    }
}

fn gram(jet: &Jet) -> (f64, f64, f64, f64) {
    let g_ss = jet.grad_s.dot(&jet.grad_s);
    let g_tt = jet.grad_theta.dot(&jet.grad_theta);
    let g_st = jet.grad_s.dot(&jet.grad_theta);
    (g_ss, g_tt, g_st, g_ss * g_tt - g_st * g_st)
}

fn check_immersed(jet: &Jet) -> Result<(f64, f64, f64, f64)> {
    let (g_ss, g_tt, g_st, det) = gram(jet);
    let scale = jet.grad_norm();
    let tol = DEGENERACY_TOL * scale.powi(4);
    if det <= tol {
        return Err(Error::DegenerateImmersion { det, tol });
    }
    Ok((g_ss, g_tt, g_st, det))
}

/// Mean curvature of a 2-jet: `g^{ij} (∇²_ij · n)` with
/// `n = ∇_s ∧ ∇_θ / |∇_s ∧ ∇_θ|` and `(g^{ij})` the inverse of `∇ᵀ∇`.
pub fn mean_curvature_of_jet(jet: &Jet) -> Result<f64> {
    let (g_ss, g_tt, g_st, det) = check_immersed(jet)?;
    let n = jet.grad_s.cross(&jet.grad_theta) / det.sqrt();
    let a_ss = jet.hess_ss.dot(&n);
    let a_tt = jet.hess_theta_theta.dot(&n);
    let a_st = jet.hess_s_theta.dot(&n);
    // inverse of the 2x2 Gram matrix
    Ok((g_tt * a_ss + g_ss * a_tt - 2.0 * g_st * a_st) / det)
}

/// Conformal defect of the gradient columns.
pub fn conformal_defect(jet: &Jet) -> Result<ConformalDefect> {
    let ns = jet.grad_s.norm();
    let nt = jet.grad_theta.norm();
    if ns == 0.0 || nt == 0.0 {
        return Err(Error::DegenerateImmersion { det: 0.0, tol: 0.0 });
    }
    Ok(ConformalDefect {
        dot: jet.grad_s.dot(&jet.grad_theta) / (ns * nt),
        ratio_minus_one: ns / nt - 1.0,
    })
}

/// `c · jet` for nonzero `c`.
pub fn scale_jet(c: f64, jet: &Jet) -> Result<Jet> {
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "scale factor must be finite and nonzero, got {c}"
        )));
    }
    Ok(jet.scaled(c))
}

/// `R · jet` for a rotation `R` (orthogonal with det +1, checked to 1e−12).
pub fn rotate_jet(r: &Matrix3<f64>, jet: &Jet) -> Result<Jet> {
    let dev = (r * r.transpose() - Matrix3::identity()).amax();
    if dev > 1e-12 || (r.determinant() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(
            "matrix is not a rotation (orthogonal, det +1)".into(),
        ));
    }
    Ok(jet.rotated(r))
}

fn add_scaled(jet: &Jet, dir: &JetDirection, t: f64) -> Jet {
    *jet + dir.scaled(t)
}

/// Directional derivative of the mean-curvature functional at `jet` in
/// direction `dir`, by central finite differences with a magnitude-scaled
/// step and one level of Richardson extrapolation. `order` 1 or 2.
///
/// Requires the conformal defect of `jet` below 1/4, mirroring the
/// hypothesis under which the derivative bounds hold.
pub fn dh(jet: &Jet, dir: &JetDirection, order: u8) -> Result<f64> {
    if order != 1 && order != 2 {
        return Err(Error::InvalidArgument(format!("order must be 1 or 2, got {order}")));
    }
    let defect = conformal_defect(jet)?.magnitude();
    if defect >= DEFECT_BOUND {
        return Err(Error::DefectTooLarge { defect });
    }
    check_immersed(jet)?;

    let h = 1e-5 * jet.grad_norm();
    let eval = |t: f64| mean_curvature_of_jet(&add_scaled(jet, dir, t));
    let diff = |h: f64| -> Result<f64> {
        match order {
            1 => Ok((eval(h)? - eval(-h)?) / (2.0 * h)),
            _ => Ok((eval(h)? - 2.0 * eval(0.0)? + eval(-h)?) / (h * h)),
        }
    };
    // Central differences are O(h²); one Richardson level cancels that term.
    let d_h = diff(h)?;
    let d_h2 = diff(h / 2.0)?;
    Ok((4.0 * d_h2 - d_h) / 3.0)
}
