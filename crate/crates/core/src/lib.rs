//! Simulation and optimization of indoor spectrum sharing through programmable
//! reflect-arrays.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] holds the room grid and array layouts. It also enumerates
//!   node placements.
//! * [`channel`] turns geometry into complex multipath channel vectors and
//!   provides a symbol-level Monte-Carlo receiver model.
//! * [`capacity`] evaluates SINR and the feasibility-gated transport capacity,
//!   together with the interference bounds.
//! * [`optimizer`] searches phase configurations and node placements.
//! * [`experiments`] drives config-based sweeps for the `refarray` binary and
//!   hosts the self-validation suite.

pub mod capacity;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod optimizer;

pub use capacity::{
    bound_terms, link_distance_bound, sinr, transport_capacity, upper_bound, BoundTerms,
    CapacityReport, Scenario,
};
pub use channel::{
    channel_vector, effective_gain, simulate_received, ChannelVector, EmpiricalSinr, LinkParams,
    PhaseVector,
};
pub use error::{Error, Result};
pub use geometry::{
    distance_extremes, enumerate_placements, path_geometry, ArrayLayout, Deployment, PathGeometry,
    PlacementSpace, Point2D, Room, WallNormal,
};
pub use optimizer::{
    interference_cancellation_demo, optimize_phases, search_placements, CancellationSetup,
    Objective, PhaseMethod, PhaseSearchConfig, PlacementMode, PlacementSearchConfig, SearchResult,
};
