//! Capacity expansion planning for meshed AC/DC power networks with series
//! compensation.
//!
//! The crate builds a linear planning model that co-optimizes generation,
//! storage, AC and DC transmission and SSSC ratings over representative
//! snapshots. AC power flow is imposed through a cycle basis of the network,
//! losses through a piecewise-linear envelope, and the dependence of line
//! impedance on line capacity is handled by iterating the LP to a fixed point
//! (see [`planner`]). [`analysis`] compares plans with and without SSSCs.
//!
//! ```no_run
//! use sssc_expansion::prelude::*;
//!
//! let net = load_network("network.json")?;
//! let scenario = load_scenario("scenario.json")?;
//! let outcome = plan(&net, &scenario, &ConvergenceConfig::default(), &MicroLp)?;
//! println!("annual cost {:.0} $", outcome.objective());
//! # Ok::<(), sssc_expansion::Error>(())
//! ```

pub mod analysis;
pub mod cycles;
mod error;
pub mod fixtures;
pub mod losses;
pub mod lp;
pub mod network;
pub mod planner;
pub mod report;
pub mod scenario;
pub mod sssc;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{avoided_transmission, run_pair, sweep_sssc_caps, AvoidedTransmission, BcrCurve, ValueReport};
    pub use crate::lp::{backend_by_name, MicroLp, SolverBackend};
    pub use crate::network::{load_network, Network};
    pub use crate::planner::{plan, ConvergenceConfig, Norm, PlanOutcome};
    pub use crate::scenario::{load_scenario, Scenario, SsscPolicy};
    pub use crate::{Error, Result};
}
