use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("period/shift mismatch: ({d1}, {c1}) vs ({d2}, {c2})")]
    PeriodMismatch {
        d1: Rational,
        c1: Rational,
        d2: Rational,
        c2: Rational,
    },

    #[error("function does not match the problem variant: {0}")]
    VariantMismatch(String),

    #[error("input is not strongly minimal: {0}")]
    NotStronglyMinimal(String),

    #[error("degenerate slopes at the origin: s+ = {s_plus}, s- = {s_minus}")]
    DegenerateSlopes { s_plus: Rational, s_minus: Rational },

    #[error("not on the breakpoint grid: {0}")]
    NotOnGrid(String),

    #[error("stage `{stage}` failed: {detail}")]
    Stage { stage: &'static str, detail: String },

    #[error("invalid polyhedron: {0}")]
    InvalidPolyhedron(String),

    #[error("polyhedron has no facets")]
    EmptyFacets,

    #[error("polyhedron is unbounded")]
    Unbounded,

    #[error("not S-free: {0}")]
    NotSFree(String),

    #[error("not maximal S-free: {0}")]
    NotMaximal(String),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn stage(stage: &'static str, detail: impl Into<String>) -> Error {
    Error::Stage {
        stage,
        detail: detail.into(),
    }
}
