//! Goodness-of-fit testing against a high-temperature Ising null.
//!
//! Pipeline: fit `(h, theta)` by pseudo-likelihood; reject outright if the
//! fitted coupling is past the high-temperature threshold (the "gate");
//! otherwise sample a null distribution of the chosen statistic from the
//! fitted model with Glauber dynamics and compare the observed value with a
//! two-sided empirical p-value.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{mixing_schedule, mixing_schedule_floored, sample_replicas, MixingSchedule};
use crate::error::{Error, Result};
use crate::estimation::{mple_fit, mple_fit_zero_field, MpleOptions, MpleResult};
use crate::model::{Graph, IsingModel, SpinConfig};
use crate::replicas::run_replicas;
use crate::rng::{child_seed, seeded};
use crate::statistics::{centered_bilinear_eval, DistanceStatistic, MultilinearFn};

/// Critical coupling of the square lattice, `ln(1 + sqrt 2) / 2`.
pub fn grid_critical_theta() -> f64 {
    (1.0 + 2f64.sqrt()).ln() / 2.0
}

/// Parameters of the synthetic departure generator on a `width x height` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepartureSpec {
    pub width: usize,
    pub height: usize,
    pub tau: f64,
    pub seed: u64,
}

impl DepartureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidArgument("grid dimensions must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::InvalidArgument(format!("tau must lie in [0, 1], got {}", self.tau)));
        }
        Ok(())
    }
}

/// Forward offsets `(d_row, d_col)` a node may convert.
const DEPARTURE_OFFSETS: [(isize, isize); 6] = [(0, 1), (0, 2), (1, 1), (1, 0), (2, 0), (1, -1)];

/// Draws a departure configuration seeded by `spec.seed`.
pub fn generate_departure(spec: &DepartureSpec) -> Result<SpinConfig> {
    generate_departure_with_rng(spec, &mut seeded(spec.seed))
}

/// Starts from independent uniform spins, then visits nodes in column-major
/// order; node `(i, j)` picks one of the positions
/// `(i, j+1), (i, j+2), (i+1, j+1), (i+1, j), (i+2, j), (i+1, j-1)` uniformly
/// and, with probability `tau`, copies its current value there. Targets off
/// the grid are skipped (the attempt fails; no redraw). Node `(row, col)` has
/// id `row * width + col`, matching [`Graph::grid`].
pub fn generate_departure_with_rng<R: Rng + ?Sized>(spec: &DepartureSpec, rng: &mut R) -> Result<SpinConfig> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mut x = SpinConfig::random(w * h, rng);
    for col in 0..w {
        for row in 0..h {
            let (dr, dc) = DEPARTURE_OFFSETS[rng.random_range(0..DEPARTURE_OFFSETS.len())];
            let convert = rng.random::<f64>() < spec.tau;
            let (tr, tc) = (row as isize + dr, col as isize + dc);
            if !convert || tr < 0 || tc < 0 || tr >= h as isize || tc >= w as isize {
                continue;
            }
            let value = x[row * w + col];
            x.set(tr as usize * w + tc as usize, value);
        }
    }
    Ok(x)
}

/// Which statistic the test uses.
#[derive(Debug, Clone, PartialEq)]
pub enum StatisticSpec {
    /// `Z_2`: pairs within distance 2 (Manhattan distance on a grid).
    ZLocal,
    /// `Z_k` for a given `k >= 1`.
    Zk(usize),
    /// A user-supplied function; bilinear functions are centered at the
    /// fitted marginals, others are evaluated as is.
    Coefficients(MultilinearFn),
}

impl StatisticSpec {
    pub fn name(&self) -> String {
        match self {
            StatisticSpec::ZLocal => "zlocal".into(),
            StatisticSpec::Zk(k) => format!("z{k}"),
            StatisticSpec::Coefficients(_) => "coefficients".into(),
        }
    }
}

/// A statistic bound to a graph, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub enum Statistic {
    Distance(DistanceStatistic),
    Coefficients(MultilinearFn),
}

impl Statistic {
    pub fn build(spec: &StatisticSpec, graph: &Graph) -> Result<Self> {
        match spec {
            StatisticSpec::ZLocal => Ok(Statistic::Distance(DistanceStatistic::new(graph, 2)?)),
            StatisticSpec::Zk(k) => Ok(Statistic::Distance(DistanceStatistic::new(graph, *k)?)),
            StatisticSpec::Coefficients(f) => {
                if f.min_nodes() > graph.node_count() {
                    return Err(Error::Index {
                        index: f.min_nodes() - 1,
                        n: graph.node_count(),
                    });
                }
                Ok(Statistic::Coefficients(f.clone()))
            }
        }
    }

    /// Value at `x` with every marginal mean equal to `m`.
    pub fn eval(&self, x: &SpinConfig, m: f64) -> Result<f64> {
        match self {
            Statistic::Distance(z) => z.eval_uniform(x, m),
            Statistic::Coefficients(f) if f.is_bilinear() => centered_bilinear_eval(f, &vec![m; x.len()], x),
            Statistic::Coefficients(f) => f.eval(x),
        }
    }
}

/// `count` statistic values, each from an independent chain started uniformly
/// at random and run for `schedule.t_star` steps.
pub fn null_distribution<F>(
    model: &IsingModel,
    statistic: F,
    count: usize,
    schedule: &MixingSchedule,
    seed: u64,
) -> Result<Vec<f64>>
where
    F: Fn(&SpinConfig) -> f64 + Sync + Send,
{
    if count == 0 {
        return Err(Error::Empty("null sample count"));
    }
    if schedule.eta.is_nan() || schedule.eta <= 0.0 {
        return Err(Error::NotHighTemperature { slack: schedule.eta });
    }
    Ok(sample_replicas(model, schedule.t_star, count, seed, statistic))
}

/// Two-sided empirical p-value with add-one smoothing:
/// `2 min(1 + #{null >= obs}, 1 + #{null <= obs}) / (M + 1)`, capped at 1.
pub fn p_value(null_values: &[f64], observed: f64) -> Result<f64> {
    if null_values.is_empty() {
        return Err(Error::Empty("null distribution"));
    }
    let m = null_values.len() as f64;
    let upper = null_values.iter().filter(|&&v| v >= observed).count() as f64;
    let lower = null_values.iter().filter(|&&v| v <= observed).count() as f64;
    Ok((2.0 * (1.0 + upper).min(1.0 + lower) / (m + 1.0)).min(1.0))
}

/// How the gate decides that the fitted coupling is too strong.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Threshold {
    /// `theta_hat > ln(1 + sqrt 2) / 2`.
    GridCritical,
    /// Fitted model violates Dobrushin's condition (slack <= 0).
    Dobrushin,
    /// `theta_hat > value`.
    Value(f64),
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::GridCritical => f.write_str("grid-critical"),
            Threshold::Dobrushin => f.write_str("dobrushin"),
            Threshold::Value(v) => write!(f, "{v}"),
        }
    }
}

impl std::str::FromStr for Threshold {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid-critical" => Ok(Threshold::GridCritical),
            "dobrushin" => Ok(Threshold::Dobrushin),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Threshold::Value)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown threshold '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOptions {
    pub alpha: f64,
    pub null_samples: usize,
    pub mix_multiplier: f64,
    pub threshold: Threshold,
    /// Pin `h = 0` and center at 0.
    pub zero_field: bool,
    /// Slack floor for the null's step budget when the gate is not Dobrushin.
    pub eta_floor: f64,
    pub mple: MpleOptions,
    pub seed: u64,
}

impl Default for TestOptions {
    fn default() -> Self {
        TestOptions {
            alpha: 0.05,
            null_samples: 100,
            mix_multiplier: 1.0,
            threshold: Threshold::GridCritical,
            zero_field: false,
            eta_floor: 0.1,
            mple: MpleOptions::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Reject,
    Retain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub mple: MpleResult,
    pub gate_rejected: bool,
    pub threshold_used: f64,
    pub statistic_name: String,
    pub observed_value: f64,
    pub null_values: Vec<f64>,
    /// `None` when the gate rejected and no null was sampled.
    pub p_value: Option<f64>,
    pub alpha: f64,
    pub verdict: Verdict,
    pub schedule: Option<MixingSchedule>,
    pub note: Option<String>,
}

/// Runs the full pipeline on one observation.
pub fn run_test(graph: &Graph, observation: &SpinConfig, spec: &StatisticSpec, opts: &TestOptions) -> Result<TestReport> {
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", opts.alpha)));
    }
    let statistic = Statistic::build(spec, graph)?;
    let mple = if opts.zero_field {
        mple_fit_zero_field(graph, observation, &opts.mple)?
    } else {
        mple_fit(graph, observation, &opts.mple)?
    };
    let m = mple.h_hat.tanh();
    let observed_value = statistic.eval(observation, m)?;
    let max_degree = (0..graph.node_count()).map(|v| graph.degree(v)).max().unwrap_or(0);
    let threshold_used = match opts.threshold {
        Threshold::GridCritical => grid_critical_theta(),
        Threshold::Value(v) => v,
        Threshold::Dobrushin if max_degree == 0 => f64::INFINITY,
        Threshold::Dobrushin => (1.0 / max_degree as f64).atanh(),
    };
    let fitted = IsingModel::uniform(graph, mple.h_hat, mple.theta_hat)?;
    let over = match opts.threshold {
        Threshold::Dobrushin => !fitted.dobrushin_slack().is_high_temperature(),
        _ => mple.theta_hat > threshold_used,
    };
    let gated = |note: String, mple: MpleResult| TestReport {
        mple,
        gate_rejected: true,
        threshold_used,
        statistic_name: spec.name(),
        observed_value,
        null_values: Vec::new(),
        p_value: None,
        alpha: opts.alpha,
        verdict: Verdict::Reject,
        schedule: None,
        note: Some(note),
    };
    if mple.degenerate {
        let note = format!(
            "degenerate pseudo-likelihood fit: {}",
            mple.degenerate_reason.clone().unwrap_or_default()
        );
        return Ok(gated(note, mple));
    }
    if over {
        let note = format!(
            "fitted coupling {:.6} is past the high-temperature threshold {:.6}",
            mple.theta_hat, threshold_used
        );
        return Ok(gated(note, mple));
    }
    let schedule = match opts.threshold {
        Threshold::Dobrushin => mixing_schedule(&fitted, opts.mix_multiplier)?,
        _ => mixing_schedule_floored(&fitted, opts.mix_multiplier, opts.eta_floor)?,
    };
    let null_values = null_distribution(
        &fitted,
        |x| statistic.eval(x, m).expect("statistic matches graph"),
        opts.null_samples,
        &schedule,
        opts.seed,
    )?;
    let p = p_value(&null_values, observed_value)?;
    Ok(TestReport {
        mple,
        gate_rejected: false,
        threshold_used,
        statistic_name: spec.name(),
        observed_value,
        null_values,
        p_value: Some(p),
        alpha: opts.alpha,
        verdict: if p <= opts.alpha { Verdict::Reject } else { Verdict::Retain },
        schedule: Some(schedule),
        note: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub tau: f64,
    pub stat_reject_rate: f64,
    pub gate_reject_rate: f64,
    pub reps: usize,
}

/// Rejection rates of the full test and of the gate alone over `reps`
/// departures per `tau`.
pub fn power_curve(
    width: usize,
    height: usize,
    taus: &[f64],
    reps: usize,
    spec: &StatisticSpec,
    opts: &TestOptions,
) -> Result<Vec<PowerRow>> {
    if reps == 0 {
        return Err(Error::Empty("power-curve repetitions"));
    }
    let graph = Graph::grid(width, height);
    let mut rows = Vec::with_capacity(taus.len());
    for (ti, &tau) in taus.iter().enumerate() {
        DepartureSpec { width, height, tau, seed: 0 }.validate()?;
        let outcomes = run_replicas(reps, |r| -> Result<(bool, bool)> {
            let rep_seed = child_seed(opts.seed, (ti * reps + r) as u64);
            let departure = generate_departure(&DepartureSpec {
                width,
                height,
                tau,
                seed: rep_seed,
            })?;
            let rep_opts = TestOptions {
                seed: child_seed(rep_seed, 0),
                ..*opts
            };
            let report = run_test(&graph, &departure, spec, &rep_opts)?;
            Ok((report.verdict == Verdict::Reject, report.gate_rejected))
        });
        let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
        let stat = outcomes.iter().filter(|o| o.0).count();
        let gate = outcomes.iter().filter(|o| o.1).count();
        rows.push(PowerRow {
            tau,
            stat_reject_rate: stat as f64 / reps as f64,
            gate_reject_rate: gate as f64 / reps as f64,
            reps,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn critical_theta_value() {
        assert_abs_diff_eq!(grid_critical_theta(), 0.4407, epsilon = 1e-4);
    }

    #[test]
    fn p_value_examples() {
        let null: Vec<f64> = (0..99).map(|i| i as f64).collect();
        assert_abs_diff_eq!(p_value(&null, 99.0).unwrap(), 0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(p_value(&null, -1.0).unwrap(), 0.02, epsilon = 1e-15);
        assert_eq!(p_value(&null, 49.0).unwrap(), 1.0);
        assert!(p_value(&[], 0.0).is_err());
        for obs in [-5.0, 0.0, 10.5, 98.0, 200.0] {
            let p = p_value(&null, obs).unwrap();
            assert!(p > 0.0 && p <= 1.0);
        }
    }

    #[test]
    fn departure_tau_zero_is_the_uniform_init() {
        let spec = DepartureSpec { width: 7, height: 5, tau: 0.0, seed: 3 };
        let mut rng = seeded(3);
        let init = SpinConfig::random(35, &mut rng);
        assert_eq!(generate_departure(&spec).unwrap(), init);
    }

    #[test]
    fn departure_validation() {
        assert!(generate_departure(&DepartureSpec { width: 3, height: 3, tau: 1.5, seed: 0 }).is_err());
        assert!(generate_departure(&DepartureSpec { width: 0, height: 3, tau: 0.5, seed: 0 }).is_err());
    }

    #[test]
    fn threshold_parsing() {
        assert_eq!("grid-critical".parse::<Threshold>().unwrap(), Threshold::GridCritical);
        assert_eq!("dobrushin".parse::<Threshold>().unwrap(), Threshold::Dobrushin);
        assert_eq!("0.3".parse::<Threshold>().unwrap(), Threshold::Value(0.3));
        assert!("hot".parse::<Threshold>().is_err());
    }

    #[test]
    fn gate_precedence_skips_mcmc() {
        let g = Graph::grid(6, 6);
        let spec = DepartureSpec { width: 6, height: 6, tau: 0.0, seed: 1 };
        let x = generate_departure(&spec).unwrap();
        let opts = TestOptions {
            threshold: Threshold::Value(-10.0),
            zero_field: true,
            ..TestOptions::default()
        };
        let r = run_test(&g, &x, &StatisticSpec::ZLocal, &opts).unwrap();
        assert!(r.gate_rejected);
        assert!(r.null_values.is_empty());
        assert_eq!(r.verdict, Verdict::Reject);
        assert!(r.p_value.is_none());
    }

    #[test]
    fn degenerate_fit_rejects() {
        let g = Graph::grid(4, 4);
        let r = run_test(&g, &SpinConfig::all_plus(16), &StatisticSpec::ZLocal, &TestOptions::default()).unwrap();
        assert!(r.mple.degenerate);
        assert!(r.gate_rejected);
        assert_eq!(r.verdict, Verdict::Reject);
        assert!(r.note.unwrap().contains("degenerate"));
    }

    #[test]
    fn dobrushin_threshold_on_grid() {
        let g = Graph::grid(5, 5);
        let x = SpinConfig::random(25, &mut seeded(2));
        let opts = TestOptions {
            threshold: Threshold::Dobrushin,
            null_samples: 10,
            ..TestOptions::default()
        };
        let r = run_test(&g, &x, &StatisticSpec::Zk(1), &opts).unwrap();
        assert_abs_diff_eq!(r.threshold_used, 0.25f64.atanh(), epsilon = 1e-15);
        let fitted = IsingModel::uniform(&g, r.mple.h_hat, r.mple.theta_hat).unwrap();
        assert_eq!(r.gate_rejected, !fitted.dobrushin_slack().is_high_temperature());
    }

    #[test]
    fn report_is_reproducible() {
        let g = Graph::grid(5, 5);
        let x = SpinConfig::random(25, &mut seeded(9));
        let opts = TestOptions {
            null_samples: 20,
            seed: 4,
            ..TestOptions::default()
        };
        let a = run_test(&g, &x, &StatisticSpec::Zk(1), &opts).unwrap();
        let b = run_test(&g, &x, &StatisticSpec::Zk(1), &opts).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        if !a.gate_rejected {
            let p = a.p_value.unwrap();
            assert!(p > 0.0 && p <= 1.0);
            assert_eq!(a.verdict == Verdict::Reject, p <= a.alpha);
        }
    }
}
