//! Convex function families, their one-variable building blocks and integration domains.

pub mod curve;
pub mod domain;
pub mod family;

pub use curve::{CurveBackend, CurveExpr, Interval, ScalarCurve};
pub use domain::{Domain, Geometry, Integral};
pub use family::{ConvexFamily, Convexity, ConvexityReport, CurveSpec, FamilySpec};
