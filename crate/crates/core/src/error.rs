use thiserror::Error;

/// Library-wide error type.
///
/// Numerical failures carry enough state to be diagnosed without rerunning:
/// a quadrature that fails to converge reports the partial value and the
/// error bound it got stuck at, never a silent NaN.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed its domain check.
    #[error("invalid parameter {name}: {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Adaptive quadrature hit the subdivision cap before the tolerance.
    #[error(
        "quadrature did not converge: partial value {partial}, \
         error bound {error_bound} after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence {
        partial: f64,
        error_bound: f64,
        subdivisions: u32,
    },

    /// An integrand produced a non-finite value inside the integration range.
    #[error("non-finite integrand value at {at}")]
    NonFiniteIntegrand { at: f64 },

    /// The operation needs boundary data backed by a growth profile.
    #[error("{op} requires profile-backed boundary data")]
    ProfileRequired { op: &'static str },

    /// Tabulated profile input rejected.
    #[error("bad profile table: {0}")]
    BadProfileTable(String),

    /// CSV or IO failure while loading a profile table.
    #[error("profile table load failed: {0}")]
    TableLoad(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Domain-check helper: errors unless `ok`.
    pub(crate) fn check(
        ok: bool,
        name: &'static str,
        value: f64,
        reason: &'static str,
    ) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter { name, value, reason })
        }
    }
}
