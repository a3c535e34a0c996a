//! Simulation and hypothesis testing for Ising models in the
//! high-temperature (Dobrushin) regime.
//!
//! * [`model`]: models, exact laws for small `n`, Dobrushin slack.
//! * [`dynamics`]: Glauber dynamics, mixing schedules, greedy couplings.
//! * [`statistics`]: multilinear functions, tail bounds, empirical tails.
//! * [`estimation`]: maximum pseudo-likelihood for `(h, theta)`.
//! * [`testing`]: departures, MCMC nulls, p-values, power curves.
//! * [`io`]: file formats, Last.fm-style bipartite data, reports.

pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod io;
pub mod model;
pub mod replicas;
pub mod rng;
pub mod statistics;
pub mod testing;

pub use error::{Error, Result};
pub use model::{Graph, IsingModel, SpinConfig};
