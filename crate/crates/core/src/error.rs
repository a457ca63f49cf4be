use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A linear map that must be invertible is (numerically) singular.
    #[error("singular map: |det| = {det:e} below guard {guard:e}")]
    Singular { det: f64, guard: f64 },

    /// Shapes of matrices / vectors do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A boundary profile turned back on itself, so the body is not convex.
    #[error("non-convex profile: orientation flip at parameter {at}")]
    NonConvexProfile { at: f64 },

    /// A 2-D support function produced a negative area.
    #[error("negative area {area:e}: support function is not convex")]
    NegativeArea { area: f64 },

    /// A grid is too coarse for the requested tube or step size.
    #[error("under-resolved grid: {detail} (hint: {hint})")]
    Resolution { detail: String, hint: String },

    /// The field does not admit closed-form level sets.
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}
