//! Benchmark models built on the generalized cumulative constraint:
//! RCPSP with consumption and production of resources, single machine
//! with inventory constraints, and maximum energy scheduling.

pub mod bench;
pub mod generate;
pub mod instance;
pub mod model;
pub mod search;
pub mod solution;

pub use generate::generate_mesp;
pub use instance::{InstanceError, MespInstance, RcpspCprInstance, SmicInstance};
pub use model::{build_mesp, build_rcpsp_cpr, build_smic, Model};
pub use search::{greedy_mesp_search, static_est_search};
