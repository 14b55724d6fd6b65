//! Singular, exterior and regular quadrature.

pub mod duffy;
pub mod elem1d;
pub mod exterior;
pub mod gauss;
pub mod triangle;

pub use duffy::{duffy_integrate, duffy_moments, DuffyRule, Point, DEFAULT_DUFFY_ORDER};
pub use elem1d::{elem_integral_1d, same_interval_integral, BivariatePoly};
pub use exterior::{exterior_integral, exterior_integral_1d, polygon_exterior_integral};
pub use gauss::{GaussLegendre, TriangleRule};
pub use triangle::{edge_midpoint_rule, split_right_triangles, SignedRightTriangle};
