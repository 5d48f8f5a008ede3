//! Achievable secrecy-rate regions for the two-user symmetric Gaussian
//! interference channel with artificial noise.
//!
//! * [`model`] evaluates the secrecy-rate bounds and their analytic gradients.
//! * [`optima`] holds the closed-form max-min point, single-user point and
//!   critical power.
//! * [`oracle`] is a brute-force grid search that knows nothing about the
//!   closed forms and is used to check them.
//! * [`region`] samples the rate region and builds its Pareto frontier and
//!   time-sharing hull.
//! * [`config`], [`report`], [`verify`] and [`cli`] back the command-line tool.

pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod optima;
pub mod oracle;
pub mod region;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ChannelParams, PowerConstraint, RateGradient, RatePair, Strategy, User};
