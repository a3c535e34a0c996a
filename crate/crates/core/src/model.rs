//! Ising models on finite graphs, their exact law on small instances, and the
//! Dobrushin high-temperature check.
//!
//! The law of a configuration `x` in `{-1,+1}^n` is proportional to
//! `exp(sum_v theta_v x_v + sum_{uv in E} theta_uv x_u x_v)`, every undirected
//! edge counted once. Logarithms are natural throughout.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Index;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statistics::MultilinearFn;

/// Largest `n` for which brute-force enumeration runs unless overridden.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 20;

/// A ±1 assignment to the nodes of a model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(format!(
                "spin at position {pos} is {}, expected -1 or +1",
                spins[pos]
            )));
        }
        Ok(SpinConfig(spins))
    }

    pub fn all_plus(n: usize) -> Self {
        SpinConfig(vec![1; n])
    }

    pub fn all_minus(n: usize) -> Self {
        SpinConfig(vec![-1; n])
    }

    /// Configuration encoded by the low `n` bits of `code`: bit `i` set means
    /// node `i` is `+1`.
    pub fn from_index(code: usize, n: usize) -> Self {
        SpinConfig((0..n).map(|i| if code >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    /// Inverse of [`SpinConfig::from_index`].
    pub fn to_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Independent uniform ±1 spins.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        SpinConfig((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn set(&mut self, node: usize, spin: i8) {
        debug_assert!(spin == 1 || spin == -1);
        self.0[node] = spin;
    }

    pub fn flip(&mut self, node: usize) {
        self.0[node] = -self.0[node];
    }

    pub fn negated(&self) -> Self {
        SpinConfig(self.0.iter().map(|&s| -s).collect())
    }

    pub fn magnetization(&self) -> i64 {
        self.0.iter().map(|&s| s as i64).sum()
    }

    pub fn plus_count(&self) -> usize {
        self.0.iter().filter(|&&s| s == 1).count()
    }
}

impl Index<usize> for SpinConfig {
    type Output = i8;
    fn index(&self, i: usize) -> &i8 {
        &self.0[i]
    }
}

/// Renders as a `+`/`-` string, e.g. `++-+`.
impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(if s == 1 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Undirected simple graph stored as symmetric adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    /// Builds from undirected edges. Rejects self-loops, out-of-range ids and
    /// repeated pairs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            check_edge(n, u, v)?;
            if adj[u].contains(&v) {
                return Err(Error::InvalidModel(format!("duplicate edge ({u}, {v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Graph { adj })
    }

    /// `width x height` 4-neighbour lattice. Node `(row, col)` has id
    /// `row * width + col`.
    pub fn grid(width: usize, height: usize) -> Self {
        Graph::from_edges(width * height, &grid_edges(width, height)).expect("lattice is simple")
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn average_degree(&self) -> f64 {
        if self.adj.is_empty() {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.node_count() as f64
    }

    /// Undirected edges with `u < v`, in ascending order of `u`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Nodes at graph distance `1..=depth` from `source`, found by BFS
    /// truncated at `depth`.
    pub fn within_distance(&self, source: usize, depth: usize) -> Vec<usize> {
        let n = self.node_count();
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        let mut out = Vec::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            if dist[u] == depth {
                continue;
            }
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    out.push(v);
                    queue.push_back(v);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn check_edge(n: usize, u: usize, v: usize) -> Result<()> {
    if u >= n {
        return Err(Error::Index { index: u, n });
    }
    if v >= n {
        return Err(Error::Index { index: v, n });
    }
    if u == v {
        return Err(Error::InvalidModel(format!("self-loop at node {u}")));
    }
    Ok(())
}

pub(crate) fn grid_edges(width: usize, height: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for row in 0..height {
        for col in 0..width {
            let id = row * width + col;
            if col + 1 < width {
                edges.push((id, id + 1));
            }
            if row + 1 < height {
                edges.push((id, id + width));
            }
        }
    }
    edges
}

/// An Ising model: graph, edge couplings and node fields.
///
/// Immutable once built; adjacency entries are stored in both directions with
/// identical couplings, sorted by neighbour.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    adj: Vec<Vec<(usize, f64)>>,
    fields: Vec<f64>,
}

impl IsingModel {
    /// `edges` lists each undirected edge once as `(u, v, theta_uv)`.
    pub fn new(n: usize, edges: &[(usize, usize, f64)], fields: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("model needs at least one node".into()));
        }
        if fields.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: fields.len(),
            });
        }
        if let Some(v) = fields.iter().position(|h| !h.is_finite()) {
            return Err(Error::InvalidModel(format!("non-finite field at node {v}")));
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(u, v, theta) in edges {
            check_edge(n, u, v)?;
            if !theta.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "non-finite coupling on edge ({u}, {v})"
                )));
            }
            if adj[u].iter().any(|&(w, _)| w == v) {
                return Err(Error::InvalidModel(format!("duplicate edge ({u}, {v})")));
            }
            adj[u].push((v, theta));
            adj[v].push((u, theta));
        }
        for nb in &mut adj {
            nb.sort_by_key(|&(v, _)| v);
        }
        Ok(IsingModel { adj, fields })
    }

    /// Builds from per-node adjacency lists, checking that they are symmetric.
    pub fn from_adjacency(adj: Vec<Vec<(usize, f64)>>, fields: Vec<f64>) -> Result<Self> {
        let n = adj.len();
        let mut edges = Vec::new();
        for (u, list) in adj.iter().enumerate() {
            for &(v, theta) in list {
                check_edge(n, u, v)?;
                let back = adj[v].iter().filter(|&&(w, _)| w == u).collect::<Vec<_>>();
                match back.as_slice() {
                    [(_, t)] if t.to_bits() == theta.to_bits() => {}
                    [] => {
                        return Err(Error::InvalidModel(format!(
                            "asymmetric adjacency: ({u}, {v}) has no reverse entry"
                        )))
                    }
                    [(_, t)] => {
                        return Err(Error::InvalidModel(format!(
                            "asymmetric coupling on ({u}, {v}): {theta} vs {t}"
                        )))
                    }
                    _ => {
                        return Err(Error::InvalidModel(format!("duplicate edge ({v}, {u})")))
                    }
                }
                if u < v {
                    edges.push((u, v, theta));
                }
            }
        }
        IsingModel::new(n, &edges, fields)
    }

    /// Uniform coupling `theta` on every edge of `graph` and field `h` on every node.
    pub fn uniform(graph: &Graph, h: f64, theta: f64) -> Result<Self> {
        let edges: Vec<_> = graph.edges().map(|(u, v)| (u, v, theta)).collect();
        IsingModel::new(graph.node_count(), &edges, vec![h; graph.node_count()])
    }

    pub fn grid(width: usize, height: usize, theta: f64, h: f64) -> Result<Self> {
        IsingModel::uniform(&Graph::grid(width, height), h, theta)
    }

    /// Independent spins, no field.
    pub fn empty(n: usize) -> Result<Self> {
        IsingModel::new(n, &[], vec![0.0; n])
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[u]
    }

    pub fn field(&self, u: usize) -> f64 {
        self.fields[u]
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn has_external_field(&self) -> bool {
        self.fields.iter().any(|&h| h != 0.0)
    }

    /// Undirected edges `(u, v, theta)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nb)| {
            nb.iter()
                .filter(move |&&(v, _)| u < v)
                .map(move |&(v, t)| (u, v, t))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn graph(&self) -> Graph {
        Graph {
            adj: self
                .adj
                .iter()
                .map(|nb| nb.iter().map(|&(v, _)| v).collect())
                .collect(),
        }
    }

    /// Same graph and fields, every coupling multiplied by `factor`.
    pub fn scale_couplings(&self, factor: f64) -> Result<Self> {
        let edges: Vec<_> = self.edges().map(|(u, v, t)| (u, v, t * factor)).collect();
        IsingModel::new(self.node_count(), &edges, self.fields.clone())
    }

    fn check_len(&self, x: &SpinConfig) -> Result<()> {
        if x.len() != self.node_count() {
            return Err(Error::Dimension {
                expected: self.node_count(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `theta_u + sum_{v ~ u} theta_uv x_v`.
    #[inline]
    pub fn local_field(&self, x: &SpinConfig, u: usize) -> f64 {
        self.adj[u]
            .iter()
            .fold(self.fields[u], |acc, &(v, t)| acc + t * x.0[v] as f64)
    }

    /// Unnormalized log-probability of `x`.
    pub fn log_weight(&self, x: &SpinConfig) -> Result<f64> {
        self.check_len(x)?;
        let mut field_part = 0.0;
        let mut edge_part = 0.0;
        for (u, nb) in self.adj.iter().enumerate() {
            field_part += self.fields[u] * x.0[u] as f64;
            for &(v, t) in nb {
                if u < v {
                    edge_part += t * (x.0[u] * x.0[v]) as f64;
                }
            }
        }
        Ok(field_part + edge_part)
    }

    /// Probability that node `u` is `+1` given the other spins of `x`.
    pub fn conditional_plus_prob(&self, x: &SpinConfig, u: usize) -> Result<f64> {
        self.check_len(x)?;
        if u >= self.node_count() {
            return Err(Error::Index {
                index: u,
                n: self.node_count(),
            });
        }
        Ok(plus_probability(self.local_field(x, u)))
    }

    pub fn dobrushin_slack(&self) -> DobrushinReport {
        let per_node_influence: Vec<f64> = self
            .adj
            .iter()
            .map(|nb| nb.iter().map(|&(_, t)| t.abs().tanh()).sum())
            .collect();
        let (worst_node, worst) = per_node_influence
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (v, s)| if s > best.1 { (v, s) } else { best });
        DobrushinReport {
            slack: 1.0 - worst,
            worst_node,
            per_node_influence,
        }
    }

    pub fn exact_pmf(&self) -> Result<ExactDistribution> {
        self.exact_pmf_with_cap(DEFAULT_BRUTE_FORCE_CAP)
    }

    pub fn exact_pmf_with_cap(&self, cap: usize) -> Result<ExactDistribution> {
        let n = self.node_count();
        if n > cap || n >= usize::BITS as usize {
            return Err(Error::TooLarge { n, cap });
        }
        let states = 1usize << n;
        let mut logw = Vec::with_capacity(states);
        for code in 0..states {
            logw.push(self.log_weight(&SpinConfig::from_index(code, n))?);
        }
        let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = logw.iter().map(|&l| (l - max).exp()).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(ExactDistribution {
            n,
            probs,
            log_partition: max + total.ln(),
        })
    }

    /// `E[f(X)]` by enumeration of all `2^n` configurations.
    pub fn exact_expectation(&self, f: &MultilinearFn) -> Result<f64> {
        self.exact_pmf()?.expectation(|x| f.eval(x))
    }
}

/// Logistic form of the single-site law: `e^m / (e^m + e^-m)`.
#[inline]
pub fn plus_probability(local_field: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * local_field).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DobrushinReport {
    pub slack: f64,
    pub worst_node: usize,
    pub per_node_influence: Vec<f64>,
}

impl DobrushinReport {
    pub fn is_high_temperature(&self) -> bool {
        self.slack > 0.0
    }

    pub fn max_influence(&self) -> f64 {
        1.0 - self.slack
    }
}

/// Exact law of a small model, indexed by [`SpinConfig::to_index`].
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    n: usize,
    probs: Vec<f64>,
    log_partition: f64,
}

impl ExactDistribution {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: &SpinConfig) -> f64 {
        self.probs[x.to_index()]
    }

    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    pub fn iter(&self) -> impl Iterator<Item = (SpinConfig, f64)> + '_ {
        let n = self.n;
        self.probs
            .iter()
            .enumerate()
            .map(move |(code, &p)| (SpinConfig::from_index(code, n), p))
    }

    pub fn expectation<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(&SpinConfig) -> Result<f64>,
    {
        let mut acc = 0.0;
        for (x, p) in self.iter() {
            acc += p * f(&x)?;
        }
        Ok(acc)
    }

    /// Total variation distance to an empirical histogram over state codes.
    pub fn tv_distance(&self, counts: &[u64]) -> f64 {
        let total: u64 = counts.iter().sum();
        0.5 * self
            .probs
            .iter()
            .zip(counts)
            .map(|(&p, &c)| (p - c as f64 / total as f64).abs())
            .sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cycle4(theta: f64) -> IsingModel {
        IsingModel::new(
            4,
            &[(0, 1, theta), (1, 2, theta), (2, 3, theta), (3, 0, theta)],
            vec![0.0; 4],
        )
        .unwrap()
    }

    #[test]
    fn log_weight_examples() {
        let single = IsingModel::empty(1).unwrap();
        assert_eq!(single.log_weight(&SpinConfig::all_plus(1)).unwrap(), 0.0);

        let pair = IsingModel::new(2, &[(0, 1, 0.5)], vec![0.0; 2]).unwrap();
        assert_eq!(pair.log_weight(&SpinConfig::all_plus(2)).unwrap(), 0.5);

        let x = SpinConfig::new(vec![1, 1, -1, -1]).unwrap();
        assert_abs_diff_eq!(cycle4(0.3).log_weight(&x).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn log_weight_length_mismatch() {
        let m = cycle4(0.3);
        assert!(matches!(
            m.log_weight(&SpinConfig::all_plus(3)),
            Err(Error::Dimension { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn exact_pmf_examples() {
        let d = IsingModel::empty(1).unwrap().exact_pmf().unwrap();
        assert_eq!(d.probabilities(), &[0.5, 0.5]);

        let h = 0.7;
        let d = IsingModel::new(1, &[], vec![h]).unwrap().exact_pmf().unwrap();
        assert_abs_diff_eq!(
            d.prob(&SpinConfig::all_plus(1)),
            h.exp() / (h.exp() + (-h).exp()),
            epsilon = 1e-15
        );

        let pair = IsingModel::new(2, &[(0, 1, 0.5)], vec![0.0; 2]).unwrap();
        let d = pair.exact_pmf().unwrap();
        let expected = 0.5f64.exp() / (2.0 * 0.5f64.exp() + 2.0 * (-0.5f64).exp());
        assert_abs_diff_eq!(d.prob(&SpinConfig::all_plus(2)), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(d.prob(&SpinConfig::all_minus(2)), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(expected, 0.3655, epsilon = 1e-4);
    }

    #[test]
    fn exact_pmf_respects_cap() {
        let m = IsingModel::empty(21).unwrap();
        assert!(matches!(m.exact_pmf(), Err(Error::TooLarge { n: 21, cap: 20 })));
        let m = IsingModel::empty(5).unwrap();
        assert!(m.exact_pmf_with_cap(4).is_err());
    }

    #[test]
    fn exact_expectation_examples() {
        let pair = IsingModel::new(2, &[(0, 1, 0.5)], vec![0.0; 2]).unwrap();
        let x0 = MultilinearFn::from_terms(1, [(vec![0], 1.0)]).unwrap();
        assert_abs_diff_eq!(pair.exact_expectation(&x0).unwrap(), 0.0, epsilon = 1e-15);

        let x01 = MultilinearFn::from_terms(2, [(vec![0, 1], 1.0)]).unwrap();
        let empty = IsingModel::empty(3).unwrap();
        assert_abs_diff_eq!(empty.exact_expectation(&x01).unwrap(), 0.0, epsilon = 1e-15);

        // E[x0 x1] = P(agree) - P(disagree) = tanh(0.5) for a single edge
        let d = pair.exact_pmf().unwrap();
        let agree = d.prob(&SpinConfig::all_plus(2)) + d.prob(&SpinConfig::all_minus(2));
        let by_states = agree - (1.0 - agree);
        assert_abs_diff_eq!(pair.exact_expectation(&x01).unwrap(), by_states, epsilon = 1e-14);
        assert_abs_diff_eq!(by_states, 0.5f64.tanh(), epsilon = 1e-14);
    }

    #[test]
    fn dobrushin_examples() {
        assert_eq!(IsingModel::empty(5).unwrap().dobrushin_slack().slack, 1.0);

        let path = IsingModel::new(3, &[(0, 1, 0.5), (1, 2, 0.5)], vec![0.0; 3]).unwrap();
        let r = path.dobrushin_slack();
        assert_eq!(r.worst_node, 1);
        assert_abs_diff_eq!(r.slack, 1.0 - 2.0 * 0.5f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.slack, 0.0758, epsilon = 1e-4);

        let grid = IsingModel::grid(5, 5, 0.2, 0.0).unwrap();
        let r = grid.dobrushin_slack();
        assert_abs_diff_eq!(r.slack, 1.0 - 4.0 * 0.2f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.slack, 0.2105, epsilon = 1e-4);
        assert!(r.is_high_temperature());
    }

    #[test]
    fn dobrushin_uses_absolute_couplings() {
        let m = IsingModel::new(2, &[(0, 1, -0.4)], vec![0.0; 2]).unwrap();
        assert_abs_diff_eq!(m.dobrushin_slack().slack, 1.0 - 0.4f64.tanh(), epsilon = 1e-15);
    }

    #[test]
    fn conditional_examples() {
        let iso = IsingModel::empty(1).unwrap();
        assert_eq!(iso.conditional_plus_prob(&SpinConfig::all_plus(1), 0).unwrap(), 0.5);

        let strong = IsingModel::new(1, &[], vec![20.0]).unwrap();
        assert_abs_diff_eq!(
            strong.conditional_plus_prob(&SpinConfig::all_minus(1), 0).unwrap(),
            1.0,
            epsilon = 1e-8
        );

        let star = IsingModel::new(3, &[(0, 1, 0.3), (0, 2, 0.3)], vec![0.0; 3]).unwrap();
        let x = SpinConfig::all_plus(3);
        let expected = 0.6f64.exp() / (0.6f64.exp() + (-0.6f64).exp());
        assert_abs_diff_eq!(star.conditional_plus_prob(&x, 0).unwrap(), expected, epsilon = 1e-15);

        // cross-check against the joint law
        let d = star.exact_pmf().unwrap();
        let mut minus = x.clone();
        minus.set(0, -1);
        let cond = d.prob(&x) / (d.prob(&x) + d.prob(&minus));
        assert_abs_diff_eq!(cond, expected, epsilon = 1e-12);

        assert!(matches!(
            star.conditional_plus_prob(&x, 3),
            Err(Error::Index { index: 3, n: 3 })
        ));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(IsingModel::new(2, &[(0, 0, 0.1)], vec![0.0; 2]).is_err());
        assert!(IsingModel::new(2, &[(0, 2, 0.1)], vec![0.0; 2]).is_err());
        assert!(IsingModel::new(2, &[(0, 1, f64::INFINITY)], vec![0.0; 2]).is_err());
        assert!(IsingModel::new(2, &[(0, 1, 0.1), (1, 0, 0.1)], vec![0.0; 2]).is_err());
        assert!(IsingModel::new(2, &[], vec![f64::NAN, 0.0]).is_err());
        assert!(IsingModel::from_adjacency(vec![vec![(1, 0.2)], vec![]], vec![0.0; 2]).is_err());
        assert!(
            IsingModel::from_adjacency(vec![vec![(1, 0.2)], vec![(0, 0.3)]], vec![0.0; 2]).is_err()
        );
        let ok = IsingModel::from_adjacency(vec![vec![(1, 0.2)], vec![(0, 0.2)]], vec![0.0; 2]);
        assert_eq!(ok.unwrap().edge_count(), 1);
    }

    #[test]
    fn grid_layout() {
        let g = Graph::grid(3, 2);
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 7);
        assert_eq!(g.neighbors(4), &[1, 3, 5]);
        assert_eq!(g.within_distance(0, 2), vec![1, 2, 3, 4]);
    }

    #[test]
    fn spin_config_index_roundtrip() {
        for code in 0..32 {
            assert_eq!(SpinConfig::from_index(code, 5).to_index(), code);
        }
        assert!(SpinConfig::new(vec![1, 0]).is_err());
        assert_eq!(SpinConfig::new(vec![1, -1, 1]).unwrap().to_string(), "+-+");
    }
}
