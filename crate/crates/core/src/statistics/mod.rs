//! Multilinear statistics, concentration bounds and empirical tails.

mod bilinear;
mod bounds;
mod multilinear;
mod tails;

pub use bilinear::{centered_bilinear_eval, graph_distance_statistic, two_sample_bilinear_eval, DistanceStatistic};
pub use bounds::{
    bilinear_tail_bound, empty_graph_lower_bound, marginal_sum_bound, marginal_sum_exact,
    marginal_sum_exact_with_cap, multilinear_tail_bound, TailBound, TailBoundQuery, TailConstants,
    BILINEAR_EXPONENT_CONSTANT, BILINEAR_RADIUS_CONSTANT,
};
pub use multilinear::MultilinearFn;
pub use tails::{tail_report, EmpiricalTail, TailOptions, TailReport, TailRow};
