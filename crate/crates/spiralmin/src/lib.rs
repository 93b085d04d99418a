//! Embedded minimal graphs over a spiraling ∞-valued disk.
//!
//! The surface under study is the immersion
//!
//! ```text
//! G(s, θ) = (e^{δθ} sinh(s) sin(θ), e^{δθ} sinh(s) cos(θ), e^{δθ}/δ)
//! ```
//!
//! a complete embedded infinite-valued disk spiraling down to a plane with
//! quadratic curvature blowup. A normal graph `G + e^{δθ} u(s) ν` over it is
//! minimal when the separated-variables operator `Q_δ(u)` vanishes; this crate
//! evaluates the closed-form geometry of `G`, realizes the mean-curvature
//! functional on 2-jets, solves `Q_δ(u) = 0` by fixed-point iteration, and
//! cross-checks everything against independent finite-difference oracles.
//!
//! Module map:
//! - [`geometry`]: frames, jets, and every closed-form quantity of `G`
//! - [`mc`]: the degree −1 mean-curvature functional on jet space
//! - [`grid`]: sampled functions of `s` with finite-difference derivatives
//! - [`solver`]: `Q_δ`, `L_0`, `L_0⁻¹`, `L_δ`, and the Picard solve
//! - [`norms`]: discrete weighted Hölder norms and local Hölder functions
//! - [`verify`]: finite-difference oracles, curvature blowup law, helicoid
//!   limit, embeddedness, and empirical lemma constants
//! - [`mesh`]: triangulated surface meshes and OBJ export
//! - [`report`]: deterministic check reports (JSON/CSV)

pub mod error;
pub mod geometry;
pub mod grid;
pub mod mc;
pub mod mesh;
pub mod norms;
pub mod report;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{frame, geometry_at, immersion_jet, Frame, GeometryRecord, Jet};
pub use grid::GridFunction;
pub use mc::{conformal_defect, mean_curvature_of_jet, ConformalDefect};
pub use solver::{picard_solve, DisplacementMode, SolveResult, SolverConfig};
