#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Performance analysis of polling systems in which a group of infinitely
//! many servers visits N queues for random visit times.
//!
//! Each queue behaves as an M/G/∞ queue while it is visited; a customer whose
//! service does not finish within a visit draws a fresh service time at the
//! next visit. The crate provides
//!
//! * [`distributions`]: the laws used for service, visit and travel times,
//!   with closed-form moments and transforms and two-moment fitting;
//! * [`analytic`]: mean queue lengths and generating functions at polling
//!   instants, mean sojourn times and their Laplace–Stieltjes transforms;
//! * [`simulator`]: a discrete-event simulation of the same model used as an
//!   independent oracle;
//! * [`optimizer`]: per-cycle throughput and optimal visiting orders;
//! * [`sweep`]: sojourn means along a grid of one fitted moment;
//! * [`config`], [`commands`]: the JSON config format and the reports behind
//!   the `polling` binary.

pub mod analytic;
pub mod commands;
pub mod config;
pub mod distributions;
pub mod error;
pub mod optimizer;
pub mod quadrature;
pub mod simulator;
pub mod sweep;
pub mod system;

pub use distributions::Distribution;
pub use error::{Error, Result};
pub use quadrature::QuadratureConfig;
pub use system::{QueueSpec, SystemSpec};
