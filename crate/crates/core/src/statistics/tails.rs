//! Monte-Carlo tail estimates and the tail-report harness.

use serde::{Deserialize, Serialize};

use crate::dynamics::{sample_replicas, MixingSchedule};
use crate::error::{Error, Result};
use crate::model::{IsingModel, DEFAULT_BRUTE_FORCE_CAP};
use crate::rng::child_seed;

use super::bounds::{bilinear_tail_bound, multilinear_tail_bound, TailBoundQuery, TailConstants};
use super::multilinear::MultilinearFn;

/// Sorted absolute deviations `|v_i - center|`.
///
/// `query(r)` counts deviations `>= r` (a closed tail).
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalTail {
    center: f64,
    sorted_deviations: Vec<f64>,
}

impl EmpiricalTail {
    pub fn new(values: &[f64], center: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("tail sample"));
        }
        let mut sorted_deviations: Vec<f64> = values.iter().map(|v| (v - center).abs()).collect();
        sorted_deviations.sort_by(f64::total_cmp);
        Ok(EmpiricalTail {
            center,
            sorted_deviations,
        })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sample_count(&self) -> usize {
        self.sorted_deviations.len()
    }

    pub fn deviations(&self) -> &[f64] {
        &self.sorted_deviations
    }

    pub fn count_at_least(&self, r: f64) -> usize {
        let below = self.sorted_deviations.partition_point(|&d| d < r);
        self.sorted_deviations.len() - below
    }

    /// Fraction of deviations `>= r`.
    pub fn query(&self, r: f64) -> f64 {
        self.count_at_least(r) as f64 / self.sample_count() as f64
    }

    /// Binomial standard error of [`EmpiricalTail::query`].
    pub fn std_error(&self, r: f64) -> f64 {
        let p = self.query(r);
        (p * (1.0 - p) / self.sample_count() as f64).sqrt()
    }
}

/// One line of a tail report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub r: f64,
    pub empirical: f64,
    pub bound: f64,
    pub radius_valid: bool,
    pub stderr: f64,
}

impl TailRow {
    /// Empirical tail within `sigmas` standard errors of the bound, or `None`
    /// when the bound is not claimed at this radius.
    pub fn consistent_with_bound(&self, sigmas: f64) -> Option<bool> {
        self.radius_valid
            .then_some(self.empirical <= self.bound + sigmas * self.stderr)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub center: f64,
    pub center_is_exact: bool,
    pub rows: Vec<TailRow>,
}

#[derive(Debug, Clone, Copy)]
pub struct TailOptions {
    pub replicas: usize,
    pub schedule: MixingSchedule,
    pub seed: u64,
    /// Constants for the degree-`d` bound when `d != 2`.
    pub constants: Option<TailConstants>,
    pub brute_force_cap: usize,
}

impl TailOptions {
    pub fn new(replicas: usize, schedule: MixingSchedule, seed: u64) -> Self {
        TailOptions {
            replicas,
            schedule,
            seed,
            constants: None,
            brute_force_cap: DEFAULT_BRUTE_FORCE_CAP,
        }
    }
}

/// Samples `f` under `model` with Glauber dynamics and tabulates the
/// empirical tail next to the matching concentration bound at each radius.
///
/// The center is the exact mean when the model is small enough to enumerate;
/// otherwise it is the mean of a second, independent batch of the same size.
pub fn tail_report(model: &IsingModel, f: &MultilinearFn, radii: &[f64], opts: &TailOptions) -> Result<TailReport> {
    if opts.replicas == 0 {
        return Err(Error::Empty("tail replicas"));
    }
    if f.min_nodes() > model.node_count() {
        return Err(Error::Index {
            index: f.min_nodes() - 1,
            n: model.node_count(),
        });
    }
    let eta = model.dobrushin_slack().slack;
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::NotHighTemperature { slack: eta });
    }
    let steps = opts.schedule.t_star;
    let eval = |x: &crate::model::SpinConfig| f.eval(x).expect("range checked");
    let values = sample_replicas(model, steps, opts.replicas, opts.seed, eval);

    let (center, center_is_exact) = if model.node_count() <= opts.brute_force_cap {
        let d = model.exact_pmf_with_cap(opts.brute_force_cap)?;
        (d.expectation(|x| f.eval(x))?, true)
    } else {
        let batch = sample_replicas(model, steps, opts.replicas, child_seed(opts.seed, 1), eval);
        (batch.iter().sum::<f64>() / batch.len() as f64, false)
    };

    let tail = EmpiricalTail::new(&values, center)?;
    let degree = f.degree();
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let query = TailBoundQuery {
            n: model.node_count(),
            eta: eta.min(1.0),
            inf_norm: f.inf_norm(),
            degree,
            radius: r,
        };
        let bound = if degree == 2 {
            bilinear_tail_bound(&query)?
        } else {
            let c = opts.constants.unwrap_or_else(|| TailConstants::default_for(degree));
            multilinear_tail_bound(&query, c)?
        };
        rows.push(TailRow {
            r,
            empirical: tail.query(r),
            bound: bound.bound,
            radius_valid: bound.radius_valid,
            stderr: tail.std_error(r),
        });
    }
    Ok(TailReport {
        center,
        center_is_exact,
        rows,
    })
}
