//! Directed positive currents near a hyperbolic singularity in dimension
//! two: geometry of the straightening map, admissible vanishing profiles,
//! harmonic extension of boundary data, and the mass and flux diagnostics
//! built on top of them.
//!
//! Everything numerical returns certified estimates: a value paired with an
//! error bound that covers quadrature error and truncated tails.

pub mod asymptotics;
pub mod ddc;
pub mod error;
pub mod extension;
pub mod geometry;
pub mod mass;
pub mod profiles;
pub mod quad;
mod special;

pub use asymptotics::{
    check_kernel_lower, check_kernel_upper, check_uv1, check_uv2, kernel_profile, KernelSample,
    LemmaId, LemmaReport,
};
pub use ddc::{
    edge_flux, edge_gradient_term, flux_scan, high_pass_edge_comparison, vertical_edge_flux,
    EdgeKind, FluxReport,
};
pub use error::{Error, Result};
pub use extension::{
    h_on_sector, htilde_bound, kernel_integral, mean_value_residual, poisson_extend,
    NEAR_BOUNDARY_RATIO,
};
pub use geometry::{BidiscPreimage, Hyperbolicity, SectorCoords};
pub use mass::{
    bidisc_mass_parts, mass_bidisc, mass_scan, trace_density, vertical_mass_term, MassReport,
};
pub use profiles::{tail_moment_identity, BoundaryData, EpsilonProfile};
pub use quad::{Estimate, QuadratureSpec};
