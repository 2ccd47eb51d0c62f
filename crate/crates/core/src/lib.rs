//! Hidden-variable EPRB model with time-symmetric (retarded + advanced)
//! pair interactions.
//!
//! The crate is organized around four layers:
//!
//! - [`sphere`]: geometry and sampling primitives on S² — spin measurement,
//!   projective collapse, the tangent-space distance vector, uniform and
//!   cap sampling.
//! - [`outcome`]: the self-consistency equations for the measurement
//!   outcomes, case classification, and resolution policies for
//!   self-fulfilling prophecies.
//! - [`probability`]: coincidence statistics by quadrature and Monte
//!   Carlo, probability bounds, Bell/CHSH evaluation, parameter sweeps,
//!   and the screening-off analysis.
//! - [`dynamics`]: direct numerical solution of the light-cone interaction
//!   law by outcome-seeded Picard iteration, with extraction of effective
//!   convex weights.

pub mod dynamics;
pub mod error;
pub mod outcome;
pub mod probability;
pub mod sphere;

pub use error::{Error, Result};
