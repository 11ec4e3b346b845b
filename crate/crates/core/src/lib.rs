//! Optimal time allocation and SIC decoding-order scheduling for
//! wireless-powered uplink NOMA networks using harvest-then-transmit.
//!
//! The base station broadcasts energy for a fraction `1 - T` of each frame;
//! users then transmit simultaneously for `T` using only what they
//! harvested, and the base station decodes them with successive
//! interference cancellation. The crate provides:
//!
//! * [`model`]: instances, per-user rates, the rate-region test and metrics;
//! * [`numerics`]: Lambert W, bisection, golden section, simplex, subgradient;
//! * [`timeshare`]: the min-rate time-sharing LP and the greedy permutation builder;
//! * [`schedulers`]: sum-throughput and equal-rate schemes (a) to (d);
//! * [`baseline_tdma`]: the orthogonal harvest-then-transmit reference;
//! * [`sim`]: channel sampling and Monte Carlo experiments;
//! * [`io`]: JSON instance documents and result records.

pub mod baseline_tdma;
pub mod error;
pub mod examples;
pub mod io;
pub mod model;
pub mod numerics;
pub mod schedulers;
pub mod sim;
pub mod timeshare;

pub use error::{Error, Result};
pub use model::{NetworkInstance, RateAllocation, SystemConstants, TimeShareSchedule, UserChannel};
pub use schedulers::{Scheme, SchemeResult, TimeShareMode};
