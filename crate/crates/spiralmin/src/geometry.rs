//! Closed-form geometry of the spiraling immersion
//! `G(s, θ) = (e^{δθ} sinh s sin θ, e^{δθ} sinh s cos θ, e^{δθ}/δ)`:
//! moving frame, derivative jet, unit normal with its derivatives, metric,
//! second fundamental form, mean curvature, and Laplace coefficients.
//!
//! Sign convention: the mean curvature stored here is the trace
//! `H = g^{ij} A_ij` with `A_ij = ∂²G · ν` and `ν` oriented along
//! `G_s ∧ G_θ`. Direct evaluation gives
//! `H = +δ e^{-δθ} tanh(s) cosh⁻²(s)`, which is the convention under which
//! `Q_δ(0) = δ tanh(s)`; see [`H_SIGN_NOTE`].

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Upper cap on the spiral parameter δ. The construction is asymptotic in
/// small δ; the cap keeps the `e^{2πδ}` sheet spacing and near-conformality
/// within tested regimes.
pub const DELTA_MAX: f64 = 0.2;

/// Informational note surfaced by the geometry-check report: the trace
/// convention used here yields `H = +δ e^{-δθ} tanh(s) cosh⁻²(s)`, the
/// opposite sign of the displayed corollary form, but the one consistent
/// with `Q_δ(0) = δ tanh(s)`.
pub const H_SIGN_NOTE: &str = "H-sign-convention: trace(+) vs Corollary(-)";

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite, got {v}")))
    }
}

/// Validates δ ∈ (0, [`DELTA_MAX`]].
pub fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta > 0.0 && delta <= DELTA_MAX {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "delta must lie in (0, {DELTA_MAX}], got {delta}"
        )))
    }
}

/// The rotating orthonormal frame `{e_r, e_r', e_z}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    /// `e_r(θ) = (sin θ, cos θ, 0)`
    pub e_r: Vector3<f64>,
    /// `e_r' = ∂_θ e_r = (cos θ, −sin θ, 0)`
    pub e_r_prime: Vector3<f64>,
    /// `e_z = (0, 0, 1)`
    pub e_z: Vector3<f64>,
}

impl Frame {
    /// The rotation `R_θ` sending `e_x → e_r`, `e_y → e_r'`, `e_z → e_z`,
    /// as a matrix with those images as columns.
    pub fn rotation(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.e_r, self.e_r_prime, self.e_z])
    }

    /// Maps frame components `(p, q, r)` (coefficients of `e_r, e_r', e_z`)
    /// to a vector in standard coordinates.
    pub fn from_components(&self, p: f64, q: f64, r: f64) -> Vector3<f64> {
        p * self.e_r + q * self.e_r_prime + r * self.e_z
    }
}

/// The moving frame at angle θ (radians).
pub fn frame(theta: f64) -> Result<Frame> {
    check_finite("theta", theta)?;
    let (sin, cos) = theta.sin_cos();
    Ok(Frame {
        e_r: Vector3::new(sin, cos, 0.0),
        e_r_prime: Vector3::new(cos, -sin, 0.0),
        e_z: Vector3::new(0.0, 0.0, 1.0),
    })
}

/// First and second derivatives of a map `ℝ² → ℝ³` at one parameter point:
/// a point of the jet space `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub grad_s: Vector3<f64>,
    pub grad_theta: Vector3<f64>,
    pub hess_ss: Vector3<f64>,
    pub hess_theta_theta: Vector3<f64>,
    pub hess_s_theta: Vector3<f64>,
}

/// A tangent direction in jet space, used for directional derivatives of the
/// mean-curvature functional.
pub type JetDirection = Jet;

impl Jet {
    pub fn zero() -> Self {
        let z = Vector3::zeros();
        Jet {
            grad_s: z,
            grad_theta: z,
            hess_ss: z,
            hess_theta_theta: z,
            hess_s_theta: z,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|v| {
            v.iter().all(|x| x.is_finite())
        })
    }

    fn components(&self) -> [Vector3<f64>; 5] {
        [
            self.grad_s,
            self.grad_theta,
            self.hess_ss,
            self.hess_theta_theta,
            self.hess_s_theta,
        ]
    }

    /// `c · Jet`: every derivative vector scaled by `c`.
    pub fn scaled(&self, c: f64) -> Jet {
        Jet {
            grad_s: c * self.grad_s,
            grad_theta: c * self.grad_theta,
            hess_ss: c * self.hess_ss,
            hess_theta_theta: c * self.hess_theta_theta,
            hess_s_theta: c * self.hess_s_theta,
        }
    }

    /// `R · Jet`: every derivative vector rotated by `r`.
    pub fn rotated(&self, r: &Matrix3<f64>) -> Jet {
        Jet {
            grad_s: r * self.grad_s,
            grad_theta: r * self.grad_theta,
            hess_ss: r * self.hess_ss,
            hess_theta_theta: r * self.hess_theta_theta,
            hess_s_theta: r * self.hess_s_theta,
        }
    }

    /// Frobenius norm of the gradient block `(∇_s, ∇_θ)`.
    pub fn grad_norm(&self) -> f64 {
        (self.grad_s.norm_squared() + self.grad_theta.norm_squared()).sqrt()
    }

    /// Frobenius norm of the hessian block.
    pub fn hess_norm(&self) -> f64 {
        (self.hess_ss.norm_squared()
            + self.hess_theta_theta.norm_squared()
            + self.hess_s_theta.norm_squared())
        .sqrt()
    }

    /// Largest absolute entry over all five vectors.
    pub fn sup_abs(&self) -> f64 {
        self.components()
            .iter()
            .map(|v| v.amax())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            grad_s: self.grad_s + o.grad_s,
            grad_theta: self.grad_theta + o.grad_theta,
            hess_ss: self.hess_ss + o.hess_ss,
            hess_theta_theta: self.hess_theta_theta + o.hess_theta_theta,
            hess_s_theta: self.hess_s_theta + o.hess_s_theta,
        }
    }
}

impl std::ops::Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + o.scaled(-1.0)
    }
}

/// Coefficients of the Laplace operator on `G`, stored against the prefactor
/// `e^{2δθ} cosh²(s)`:
///
/// ```text
/// prefactor · Δ_g = c_ss ∂_ss + c_tt ∂_θθ + c_st ∂_sθ + c_s ∂_s + c_t ∂_θ
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceCoeffs {
    pub c_ss: f64,
    pub c_tt: f64,
    pub c_st: f64,
    pub c_s: f64,
    pub c_t: f64,
    pub prefactor: f64,
}

/// All closed-form data of `G` at one point `(s, θ, δ)`.
#[derive(Debug, Clone, Copy)]
pub struct GeometryRecord {
    pub frame: Frame,
    pub point: Vector3<f64>,
    pub jet: Jet,
    /// Unit normal `ν = −cosh⁻¹(s) e_r' + tanh(s) e_z`.
    pub normal: Vector3<f64>,
    /// `(ν_s, ν_θ, ν_ss, ν_sθ, ν_θθ)`.
    pub normal_derivs: [Vector3<f64>; 5],
    pub g_ss: f64,
    pub g_thth: f64,
    pub g_sth: f64,
    pub det_g: f64,
    pub dual_ss: f64,
    pub dual_thth: f64,
    pub dual_sth: f64,
    pub a_ss: f64,
    pub a_thth: f64,
    pub a_sth: f64,
    pub a_norm_sq: f64,
    /// Mean curvature in the trace convention, `+δ e^{-δθ} tanh(s) cosh⁻²(s)`.
    pub h: f64,
    pub laplace: LaplaceCoeffs,
}

/// The point `G(s, θ)` together with its derivative jet, both in closed form.
pub fn immersion_jet(s: f64, theta: f64, delta: f64) -> Result<(Vector3<f64>, Jet)> {
    check_finite("s", s)?;
    check_delta(delta)?;
    let fr = frame(theta)?;
    let e = (delta * theta).exp();
    let (sh, ch) = (s.sinh(), s.cosh());

    let point = e * sh * fr.e_r + (e / delta) * fr.e_z;
    let jet = Jet {
        grad_s: e * ch * fr.e_r,
        grad_theta: fr.from_components(delta * e * sh, e * sh, e),
        hess_ss: e * sh * fr.e_r,
        hess_s_theta: fr.from_components(delta * e * ch, e * ch, 0.0),
        hess_theta_theta: fr.from_components(
            (delta * delta - 1.0) * e * sh,
            2.0 * delta * e * sh,
            delta * e,
        ),
    };
    Ok((point, jet))
}

/// Frame components `(q, r)` of `ν = q(s) e_r' + r(s) e_z` and their first
/// two `s`-derivatives. `q = −sech(s)`, `r = tanh(s)`.
pub(crate) fn normal_profile(s: f64) -> [(f64, f64); 3] {
    let sech = 1.0 / s.cosh();
    let tanh = s.tanh();
    let q = -sech;
    let r = tanh;
    let dq = sech * tanh;
    let dr = sech * sech;
    let ddq = sech * (sech * sech - tanh * tanh);
    let ddr = -2.0 * sech * sech * tanh;
    [(q, r), (dq, dr), (ddq, ddr)]
}

/// Every geometric quantity of `G` at `(s, θ, δ)`, filled from closed forms.
pub fn geometry_at(s: f64, theta: f64, delta: f64) -> Result<GeometryRecord> {
    let (point, jet) = immersion_jet(s, theta, delta)?;
    let fr = frame(theta)?;
    let e = (delta * theta).exp();
    let e2 = e * e;
    let (sh, ch) = (s.sinh(), s.cosh());
    let tanh = sh / ch;
    let sech2 = 1.0 / (ch * ch);

    let [(q, r), (dq, dr), (ddq, ddr)] = normal_profile(s);
    let normal = fr.from_components(0.0, q, r);
    // θ-derivatives pick up the frame rotation: ∂_θ e_r = e_r', ∂_θ e_r' = −e_r.
    let normal_derivs = [
        fr.from_components(0.0, dq, dr),           // ν_s
        fr.from_components(-q, 0.0, 0.0),          // ν_θ
        fr.from_components(0.0, ddq, ddr),         // ν_ss
        fr.from_components(-dq, 0.0, 0.0),         // ν_sθ
        fr.from_components(0.0, -q, 0.0),          // ν_θθ
    ];

    let g_ss = e2 * ch * ch;
    let g_thth = e2 * (ch * ch + delta * delta * sh * sh);
    let g_sth = delta * e2 * sh * ch;
    let det_g = e2 * e2 * ch.powi(4);

    let inv_e2 = 1.0 / e2;
    let dual_ss = inv_e2 * sech2 * (1.0 + delta * delta * tanh * tanh);
    let dual_thth = inv_e2 * sech2;
    let dual_sth = -delta * inv_e2 * tanh * sech2;

    let a_ss = jet.hess_ss.dot(&normal);
    let a_sth = jet.hess_s_theta.dot(&normal);
    let a_thth = jet.hess_theta_theta.dot(&normal);
    let a_norm_sq = inv_e2 * sech2 * sech2 * (2.0 + delta * delta * tanh * tanh);
    let h = dual_ss * a_ss + dual_thth * a_thth + 2.0 * dual_sth * a_sth;

    let laplace = LaplaceCoeffs {
        c_ss: 1.0 + delta * delta * tanh * tanh,
        c_tt: 1.0,
        c_st: -2.0 * delta * tanh,
        c_s: 2.0 * delta * delta * tanh * sech2,
        c_t: -delta * sech2,
        prefactor: e2 * ch * ch,
    };

    Ok(GeometryRecord {
        frame: fr,
        point,
        jet,
        normal,
        normal_derivs,
        g_ss,
        g_thth,
        g_sth,
        det_g,
        dual_ss,
        dual_thth,
        dual_sth,
        a_ss,
        a_thth,
        a_sth,
        a_norm_sq,
        h,
        laplace,
    })
}

/// The standard helicoid `(sinh s sin θ, sinh s cos θ, θ)`, the δ → 0 limit
/// of `G − (0, 0, 1/δ)`.
pub fn helicoid(s: f64, theta: f64) -> Vector3<f64> {
    Vector3::new(s.sinh() * theta.sin(), s.sinh() * theta.cos(), theta)
}
