//! Numerical laboratory for affine maximal type hypersurfaces and
//! Monge–Ampère regularity inequalities.

pub mod error;
pub mod families;
pub mod inequalities;
pub mod jets;
pub mod mameasure;
pub mod ode;
pub mod operator;
pub mod quad;
pub mod surfaces;

pub use error::{Error, Result};
pub use jets::Jet;
pub use surfaces::{ConvexFamily, Domain, FamilySpec, ScalarCurve};
