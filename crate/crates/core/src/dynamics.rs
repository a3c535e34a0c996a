//! Single-site Glauber dynamics, mixing schedules and greedy couplings.
//!
//! A step picks a node `u` uniformly at random and a uniform draw `U` in
//! `[0, 1)`, then sets `x_u = +1` iff `U < P(x_u = +1 | x_{-u})`. There is no
//! extra laziness: the spin may stay put only because the conditional law says so.
//!
//! The k-greedy coupling runs `k` chains with one shared node choice and one
//! shared draw. Sorting the chains' `+1` probabilities `p_1 <= ... <= p_k`
//! and padding with `p_0 = 0`, `p_{k+1} = 1`, a draw in `[p_l, p_{l+1}]` sends
//! the `l` chains with the smallest probabilities to `-1` and the rest to
//! `+1`. A chain therefore receives `-1` exactly when `U >= p_i`, which is the
//! single-chain threshold rule applied to every chain with the same `U`. The
//! orientation is fixed so that each chain's marginal update is its Glauber
//! update (checked exhaustively in the tests).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{plus_probability, IsingModel, SpinConfig};
use crate::replicas::run_replicas;
use crate::rng::{replica_rng, seeded, ChainRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub node: usize,
    pub uniform_draw: f64,
    pub flipped: bool,
}

/// Applies the update of `node` for a given uniform draw.
#[inline]
pub fn apply_update(model: &IsingModel, x: &mut SpinConfig, node: usize, draw: f64) -> StepRecord {
    let p = plus_probability(model.local_field(x, node));
    let spin = if draw < p { 1 } else { -1 };
    let flipped = x[node] != spin;
    x.set(node, spin);
    StepRecord {
        node,
        uniform_draw: draw,
        flipped,
    }
}

pub fn glauber_step<R: Rng + ?Sized>(model: &IsingModel, x: &mut SpinConfig, rng: &mut R) -> StepRecord {
    let node = rng.random_range(0..model.node_count());
    let draw: f64 = rng.random();
    apply_update(model, x, node, draw)
}

/// Runs `steps` Glauber updates from `start`.
pub fn run_chain<R: Rng + ?Sized>(
    model: &IsingModel,
    start: &SpinConfig,
    steps: u64,
    rng: &mut R,
) -> Result<SpinConfig> {
    if start.len() != model.node_count() {
        return Err(Error::Dimension {
            expected: model.node_count(),
            got: start.len(),
        });
    }
    let mut x = start.clone();
    for _ in 0..steps {
        glauber_step(model, &mut x, rng);
    }
    Ok(x)
}

/// Draws a uniform random start and runs `steps` updates.
pub fn sample_from_random_start<R: Rng + ?Sized>(model: &IsingModel, steps: u64, rng: &mut R) -> SpinConfig {
    let mut x = SpinConfig::random(model.node_count(), rng);
    for _ in 0..steps {
        glauber_step(model, &mut x, rng);
    }
    x
}

/// Runs `count` independent chains, each from its own uniform random start
/// for `steps` updates, and maps every endpoint through `f`. Replica `i` uses
/// [`replica_rng`]`(seed, i)`, so the output is reproducible and independent of
/// thread scheduling.
pub fn sample_replicas<T, F>(model: &IsingModel, steps: u64, count: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&SpinConfig) -> T + Sync + Send,
{
    run_replicas(count, |i| {
        let mut rng = replica_rng(seed, i as u64);
        f(&sample_from_random_start(model, steps, &mut rng))
    })
}

/// Step budget: `t_mix = ceil(n ln n / eta)` (at least 1) and
/// `t_star = ceil((zeta + 2) t_mix)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingSchedule {
    pub t_mix: u64,
    pub t_star: u64,
    pub multiplier: f64,
    pub eta: f64,
}

impl MixingSchedule {
    pub fn from_slack(n: usize, eta: f64, multiplier: f64) -> Result<Self> {
        if eta.is_nan() || eta <= 0.0 {
            return Err(Error::NotHighTemperature { slack: eta });
        }
        if !multiplier.is_finite() || multiplier < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "mixing multiplier must be finite and >= 0, got {multiplier}"
            )));
        }
        let n = n as f64;
        let t_mix = ((n * n.ln() / eta).ceil() as u64).max(1);
        let t_star = ((multiplier + 2.0) * t_mix as f64).ceil() as u64;
        Ok(MixingSchedule {
            t_mix,
            t_star,
            multiplier,
            eta,
        })
    }
}

pub fn mixing_schedule(model: &IsingModel, multiplier: f64) -> Result<MixingSchedule> {
    MixingSchedule::from_slack(model.node_count(), model.dobrushin_slack().slack, multiplier)
}

/// Like [`mixing_schedule`] but uses `max(slack, eta_floor)` as the slack.
///
/// Used for nulls whose fitted coupling lies between the Dobrushin bound and
/// a known critical point (e.g. the square lattice), where the chain still
/// mixes in `O(n log n)` but the Dobrushin slack is not positive.
pub fn mixing_schedule_floored(model: &IsingModel, multiplier: f64, eta_floor: f64) -> Result<MixingSchedule> {
    let slack = model.dobrushin_slack().slack;
    MixingSchedule::from_slack(model.node_count(), slack.max(eta_floor), multiplier)
}

pub fn hamming(x: &SpinConfig, y: &SpinConfig) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(x.as_slice().iter().zip(y.as_slice()).filter(|(a, b)| a != b).count())
}

/// Outcome of one coupled step.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledStep {
    pub node: usize,
    pub uniform_draw: f64,
    pub flipped: Vec<bool>,
}

impl CoupledStep {
    pub fn record(&self, chain: usize) -> StepRecord {
        StepRecord {
            node: self.node,
            uniform_draw: self.uniform_draw,
            flipped: self.flipped[chain],
        }
    }
}

/// Updates `node` in every chain with one shared draw (k-greedy rule).
pub fn apply_coupled_update(
    model: &IsingModel,
    configs: &mut [SpinConfig],
    node: usize,
    draw: f64,
) -> Vec<bool> {
    configs
        .iter_mut()
        .map(|x| apply_update(model, x, node, draw).flipped)
        .collect()
}

/// `k >= 2` Glauber chains on one model under the k-greedy coupling.
#[derive(Debug, Clone)]
pub struct ChainEnsemble<'a> {
    model: &'a IsingModel,
    configs: Vec<SpinConfig>,
    step_count: u64,
    rng: ChainRng,
}

impl<'a> ChainEnsemble<'a> {
    pub fn new(model: &'a IsingModel, configs: Vec<SpinConfig>, seed: u64) -> Result<Self> {
        Self::with_rng(model, configs, seeded(seed))
    }

    pub fn with_rng(model: &'a IsingModel, configs: Vec<SpinConfig>, rng: ChainRng) -> Result<Self> {
        if configs.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "coupling needs at least 2 chains, got {}",
                configs.len()
            )));
        }
        if let Some(bad) = configs.iter().find(|c| c.len() != model.node_count()) {
            return Err(Error::Dimension {
                expected: model.node_count(),
                got: bad.len(),
            });
        }
        Ok(ChainEnsemble {
            model,
            configs,
            step_count: 0,
            rng,
        })
    }

    /// `k` chains started from independent uniform configurations drawn from
    /// the ensemble's own generator.
    pub fn random_starts(model: &'a IsingModel, k: usize, seed: u64) -> Result<Self> {
        let mut rng = seeded(seed);
        let configs = (0..k)
            .map(|_| SpinConfig::random(model.node_count(), &mut rng))
            .collect();
        Self::with_rng(model, configs, rng)
    }

    pub fn coupled_step(&mut self) -> CoupledStep {
        let node = self.rng.random_range(0..self.model.node_count());
        let draw: f64 = self.rng.random();
        let flipped = apply_coupled_update(self.model, &mut self.configs, node, draw);
        self.step_count += 1;
        CoupledStep {
            node,
            uniform_draw: draw,
            flipped,
        }
    }

    pub fn advance(&mut self, steps: u64) {
        for _ in 0..steps {
            self.coupled_step();
        }
    }

    pub fn configs(&self) -> &[SpinConfig] {
        &self.configs
    }

    pub fn chain_count(&self) -> usize {
        self.configs.len()
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn model(&self) -> &IsingModel {
        self.model
    }

    pub fn hamming(&self, i: usize, j: usize) -> usize {
        hamming(&self.configs[i], &self.configs[j]).expect("ensemble configs share a length")
    }

    /// `(i, j, d_H)` for every pair `i < j`.
    pub fn pairwise_hamming(&self) -> Vec<(usize, usize, usize)> {
        let k = self.configs.len();
        (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.hamming(i, j)))
            .collect()
    }

    pub fn is_coalesced(&self) -> bool {
        self.configs.windows(2).all(|w| w[0] == w[1])
    }
}

/// Row of a Hamming trace: after `step` steps, chains `i` and `j` differ in
/// `distance` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HammingTraceRow {
    pub step: u64,
    pub i: usize,
    pub j: usize,
    pub distance: usize,
}

/// Records pairwise distances at step 0 and after every step up to `steps`.
pub fn hamming_trace(ensemble: &mut ChainEnsemble<'_>, steps: u64) -> Vec<HammingTraceRow> {
    let mut rows = Vec::new();
    let emit = |e: &ChainEnsemble<'_>, rows: &mut Vec<HammingTraceRow>| {
        for (i, j, distance) in e.pairwise_hamming() {
            rows.push(HammingTraceRow {
                step: e.step_count(),
                i,
                j,
                distance,
            });
        }
    };
    emit(ensemble, &mut rows);
    for _ in 0..steps {
        ensemble.coupled_step();
        emit(ensemble, &mut rows);
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// `(1 - eta/n)^t d_H(x0, y0)`.
    pub bound: f64,
    pub reps: usize,
}

impl ContractionEstimate {
    pub fn within_bound(&self, sigmas: f64) -> bool {
        self.mean <= self.bound + sigmas * self.std_error
    }
}

/// Mean and standard error of `d_H(X_t, Y_t)` over `reps` independent greedy
/// couplings started at `(x0, y0)`.
pub fn contraction_diagnostic(
    model: &IsingModel,
    x0: &SpinConfig,
    y0: &SpinConfig,
    t: u64,
    reps: usize,
    seed: u64,
) -> Result<ContractionEstimate> {
    let eta = model.dobrushin_slack().slack;
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::NotHighTemperature { slack: eta });
    }
    if reps == 0 {
        return Err(Error::Empty("contraction replicas"));
    }
    let d0 = hamming(x0, y0)?;
    // validates lengths against the model once
    ChainEnsemble::new(model, vec![x0.clone(), y0.clone()], seed)?;
    let distances = run_replicas(reps, |r| {
        let mut e = ChainEnsemble::with_rng(
            model,
            vec![x0.clone(), y0.clone()],
            replica_rng(seed, r as u64),
        )
        .expect("validated above");
        e.advance(t);
        e.hamming(0, 1) as f64
    });
    let (mean, std_error) = mean_and_stderr(&distances);
    let n = model.node_count() as f64;
    Ok(ContractionEstimate {
        mean,
        std_error,
        bound: (1.0 - eta / n).powf(t as f64) * d0 as f64,
        reps,
    })
}

pub(crate) fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Dense one-step Glauber kernel over all `2^n` states (state codes as in
/// [`SpinConfig::from_index`]).
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    states: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    pub fn exact(model: &IsingModel, cap: usize) -> Result<Self> {
        let n = model.node_count();
        if n > cap {
            return Err(Error::TooLarge { n, cap });
        }
        let states = 1usize << n;
        let mut entries = vec![0.0; states * states];
        let pick = 1.0 / n as f64;
        for code in 0..states {
            let x = SpinConfig::from_index(code, n);
            for u in 0..n {
                let p_plus = plus_probability(model.local_field(&x, u));
                let plus = code | 1 << u;
                let minus = code & !(1 << u);
                entries[code * states + plus] += pick * p_plus;
                entries[code * states + minus] += pick * (1.0 - p_plus);
            }
        }
        Ok(TransitionMatrix { states, entries })
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.entries[from * self.states + to]
    }

    /// Row vector times matrix: `(p P)_j = sum_i p_i P_ij`.
    pub fn apply_left(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.states];
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            let row = &self.entries[i * self.states..(i + 1) * self.states];
            for (o, &pij) in out.iter_mut().zip(row) {
                *o += pi * pij;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn threshold_rule_on_isolated_node() {
        let m = IsingModel::empty(1).unwrap();
        let mut x = SpinConfig::all_minus(1);
        let rec = apply_update(&m, &mut x, 0, 0.3);
        assert_eq!(x[0], 1);
        assert!(rec.flipped);
        let rec = apply_update(&m, &mut x, 0, 0.7);
        assert_eq!(x[0], -1);
        assert!(rec.flipped);
        let rec = apply_update(&m, &mut x, 0, 0.9);
        assert!(!rec.flipped);
    }

    #[test]
    fn run_chain_zero_steps_and_determinism() {
        let m = IsingModel::grid(4, 4, 0.2, 0.1).unwrap();
        let start = SpinConfig::all_plus(16);
        let same = run_chain(&m, &start, 0, &mut seeded(1)).unwrap();
        assert_eq!(same, start);
        let a = run_chain(&m, &start, 5000, &mut seeded(42)).unwrap();
        let b = run_chain(&m, &start, 5000, &mut seeded(42)).unwrap();
        assert_eq!(a, b);
        assert!(run_chain(&m, &SpinConfig::all_plus(3), 1, &mut seeded(1)).is_err());
    }

    #[test]
    fn schedule_examples() {
        let s = MixingSchedule::from_slack(100, 1.0, 0.0).unwrap();
        assert_eq!(s.t_mix, 461);
        assert_eq!(s.t_star, 922);

        let one = mixing_schedule(&IsingModel::empty(1).unwrap(), 1.0).unwrap();
        assert_eq!(one.t_mix, 1);
        assert_eq!(one.t_star, 3);

        let grid = IsingModel::grid(40, 40, 0.035, 0.0).unwrap();
        let eta = 1.0 - 4.0 * 0.035f64.tanh();
        let s = mixing_schedule(&grid, 1.0).unwrap();
        assert_eq!(s.t_mix, (1600.0 * 1600f64.ln() / eta).ceil() as u64);
        assert_eq!(s.t_star, 3 * s.t_mix);

        let hot = IsingModel::grid(3, 3, 0.3, 0.0).unwrap();
        assert!(matches!(mixing_schedule(&hot, 1.0), Err(Error::NotHighTemperature { .. })));
        assert!(mixing_schedule_floored(&hot, 1.0, 0.1).is_ok());
        assert!(MixingSchedule::from_slack(10, 0.5, -1.0).is_err());
    }

    #[test]
    fn hamming_examples() {
        let x = SpinConfig::random(10, &mut seeded(3));
        assert_eq!(hamming(&x, &x).unwrap(), 0);
        assert_eq!(hamming(&x, &x.negated()).unwrap(), 10);
        let a = SpinConfig::new(vec![1, 1, -1]).unwrap();
        let b = SpinConfig::new(vec![1, -1, -1]).unwrap();
        assert_eq!(hamming(&a, &b).unwrap(), 1);
        assert!(hamming(&a, &SpinConfig::all_plus(2)).is_err());
    }

    #[test]
    fn identical_chains_stay_identical() {
        let m = IsingModel::grid(3, 3, 0.2, 0.0).unwrap();
        let x = SpinConfig::random(9, &mut seeded(5));
        let mut e = ChainEnsemble::new(&m, vec![x.clone(), x.clone(), x], 11).unwrap();
        for _ in 0..1000 {
            e.coupled_step();
            assert!(e.is_coalesced());
        }
    }

    #[test]
    fn ensemble_validation() {
        let m = IsingModel::empty(3).unwrap();
        assert!(ChainEnsemble::new(&m, vec![SpinConfig::all_plus(3)], 0).is_err());
        assert!(
            ChainEnsemble::new(&m, vec![SpinConfig::all_plus(3), SpinConfig::all_plus(2)], 0).is_err()
        );
    }

    /// Literal sorted-threshold rule, used as an independent reference.
    fn sorted_rule(probs: &[f64], draw: f64) -> Vec<i8> {
        let mut order: Vec<usize> = (0..probs.len()).collect();
        order.sort_by(|&a, &b| probs[a].partial_cmp(&probs[b]).unwrap());
        let mut padded = vec![0.0];
        padded.extend(order.iter().map(|&i| probs[i]));
        padded.push(1.0);
        // l such that draw lies in [p_l, p_{l+1})
        let l = (0..=probs.len())
            .find(|&l| padded[l] <= draw && draw < padded[l + 1])
            .unwrap();
        let mut out = vec![1i8; probs.len()];
        for &i in &order[..l] {
            out[i] = -1;
        }
        out
    }

    #[test]
    fn coupled_update_matches_sorted_rule_and_marginals() {
        let m = IsingModel::new(3, &[(0, 1, 0.4), (1, 2, -0.3)], vec![0.1, -0.2, 0.05]).unwrap();
        let k = 4;
        let mut rng = seeded(9);
        for _ in 0..200 {
            let configs: Vec<_> = (0..k).map(|_| SpinConfig::random(3, &mut rng)).collect();
            for node in 0..3 {
                let probs: Vec<f64> = configs
                    .iter()
                    .map(|c| m.conditional_plus_prob(c, node).unwrap())
                    .collect();
                // breakpoints of the draw where any chain's outcome changes
                let mut cuts: Vec<f64> = probs.clone();
                cuts.push(0.0);
                cuts.push(1.0);
                cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut plus_mass = vec![0.0; k];
                for w in cuts.windows(2) {
                    if w[1] <= w[0] {
                        continue;
                    }
                    let mid = 0.5 * (w[0] + w[1]);
                    let mut cs = configs.clone();
                    apply_coupled_update(&m, &mut cs, node, mid);
                    let expected = sorted_rule(&probs, mid);
                    for i in 0..k {
                        assert_eq!(cs[i][node], expected[i]);
                        if cs[i][node] == 1 {
                            plus_mass[i] += w[1] - w[0];
                        }
                    }
                }
                for i in 0..k {
                    assert_abs_diff_eq!(plus_mass[i], probs[i], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn coalesced_start_contracts_to_zero() {
        let m = IsingModel::grid(3, 3, 0.2, 0.0).unwrap();
        let x = SpinConfig::all_plus(9);
        let est = contraction_diagnostic(&m, &x, &x, 100, 50, 1).unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.bound, 0.0);
        let hot = IsingModel::grid(3, 3, 0.4, 0.0).unwrap();
        assert!(contraction_diagnostic(&hot, &x, &x, 10, 5, 1).is_err());
    }

    #[test]
    fn transition_rows_sum_to_one() {
        let m = IsingModel::new(3, &[(0, 1, 0.4), (1, 2, 0.3)], vec![0.1, 0.0, -0.2]).unwrap();
        let t = TransitionMatrix::exact(&m, 8).unwrap();
        for i in 0..8 {
            let s: f64 = (0..8).map(|j| t.get(i, j)).sum();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-14);
        }
    }
}
