//! Nonconstant extensions of finite data on quadrics, spheres and bounded
//! symmetric domains, built from consecutive powers of a single node
//! function `v`.
//!
//! Given points `x_1, …, x_n` with values `y_i`, the solver finds
//! coefficients `a_ℓ` such that `f = Σ_ℓ a_ℓ d·v^ℓ` satisfies `f(x_i) = y_i`,
//! moving points by small rotations when their nodes collide.

pub mod basis;
pub mod error;
pub mod geometry;
pub mod groups;
pub mod linalg;
pub mod perturb;
pub mod scalar;
pub mod solve;

pub use basis::{BasisFamily, FamilyKind, Orientation};
pub use error::{Error, Result, Singularity};
pub use groups::{GroupElement, GroupKind};
pub use perturb::{Dataset, PerturbationRecord};
pub use scalar::{Arithmetic, Field, GaussianRational, Scalar};
pub use solve::{fit, fit_perturbed, ExtensionMode, WhitneyExtension};
