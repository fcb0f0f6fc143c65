//! Fundamental efficiency and gain limits of planar and two-layer stacked
//! antenna arrays.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] holds the lattice, stack and phase-space value types.
//! * [`quadrature`] provides the deterministic composite Gauss-Legendre rule
//!   every integral in the crate goes through.
//! * [`feasible2d`] classifies phase pairs against the visible-region ellipse.
//! * [`reflection`] implements the active reflection models (infinite mask,
//!   finite excitation, stacked analytic model) and the coupling/reflection
//!   Fourier bridge.
//! * [`efficiency`] and [`gain`] turn those models into efficiency and
//!   projected-aperture gain limits.
//! * [`feasible3d`] builds the threshold-constrained annuli, feasible volume
//!   and the elevation codebook of a stacked array.
//! * [`beamsim`] is a brute-force array-factor simulator used as an
//!   independent oracle for the geometric claims.

pub mod beamsim;
pub mod efficiency;
pub mod error;
pub mod feasible2d;
pub mod feasible3d;
pub mod gain;
pub mod geometry;
pub mod quadrature;
pub mod reflection;

pub use error::{Error, Result};
pub use geometry::{
    AngularRegion, ArrayLattice2D, ConeAngles, PhaseSet, QuadratureSpec, SphericalDirection,
    Stack3D,
};
