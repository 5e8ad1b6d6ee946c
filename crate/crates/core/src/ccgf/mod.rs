//! Gauges of maximal S-free polyhedra, `S = b + ℤⁿ`, as cut-generating
//! functions for the continuous relaxation.

pub mod linalg;
pub mod plane;
pub mod polyhedron;
pub mod simplex;

use serde::Serialize;

use crate::rational::Rational;

pub use plane::{
    approximate_extreme_2d, classify_max_s_free_2d, extremality_2d, gauge_distance_2d,
    quadrilateral_ratio_test, Approximation2D, Classification2D, FacetPoint, ShapeKind,
};
pub use polyhedron::SFreePolyhedron;
pub use simplex::{
    analyze_simplex, construct_delta_n, separation_certificate, simplex_extreme_test, DeltaN,
    SeparationCertificate, SimplexAnalysis,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum VerdictReason {
    SplitRule,
    TriangleRule,
    /// `t` is the witnessing ratio when the ratio condition holds.
    QuadrilateralRatio { t: Option<Rational> },
    SimplexAffineHull { rank: usize },
    /// Some edge carries more than one S-point, so the ratio test does not apply.
    NotCertified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremalityVerdict {
    pub extreme: bool,
    pub reason: VerdictReason,
}
