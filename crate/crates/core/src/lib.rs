//! Joint multi-hop routing and computation offloading in a
//! satellite-terrestrial network, solved exactly by column generation.
//!
//! Every satellite can compute its own data, ship it over inter-satellite
//! links (ISLs) to another satellite, or send it through a gateway's
//! satellite-to-ground link (SGL) to the ground station. The master LP picks
//! local volumes and route flows; pricing finds improving routes with a
//! hop-truncated Bellman-Ford over the ISL duals.
//!
//! The numeric core is generic over [`Scalar`] (`f64` or `f32`); the aliases
//! below fix it to `f64`.

// `!(x > 0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod colgen;
pub mod constellation;
pub mod error;
pub mod experiments;
pub mod lp;
pub mod master;
pub mod pricing;
pub mod report;
pub mod routing;
pub mod scalar;
pub mod scenario;

pub use constellation::NodeId;
pub use error::{Error, Result};
pub use routing::{Route, RouteKind};
pub use scalar::Scalar;
pub use scenario::HopLimits;

pub type Topology = constellation::Topology<f64>;
pub type Edge = constellation::Edge<f64>;
pub type Scenario = scenario::Scenario<f64>;
pub type LpProblem = lp::LpProblem<f64>;
pub type LpSolution = lp::LpSolution<f64>;
pub type LpOptions = lp::LpOptions<f64>;
pub type DualPrices = master::DualPrices<f64>;
pub type MasterSolution = master::MasterSolution<f64>;
pub type Allocation = master::Allocation<f64>;
pub type ColGenOptions = colgen::ColGenOptions<f64>;
pub type ColGenResult = colgen::ColGenResult<f64>;
pub type AuditReport = colgen::AuditReport<f64>;
pub type HopDistanceTable = pricing::HopDistanceTable<f64>;

/// Single-precision variants.
pub mod f32 {
    pub type Topology = crate::constellation::Topology<f32>;
    pub type Scenario = crate::scenario::Scenario<f32>;
    pub type LpProblem = crate::lp::LpProblem<f32>;
    pub type LpSolution = crate::lp::LpSolution<f32>;
    pub type ColGenResult = crate::colgen::ColGenResult<f32>;
}
