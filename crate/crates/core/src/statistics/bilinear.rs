//! Bilinear statistics that stay concentrated under an external field:
//! marginal-centered, two-sample, and graph-distance (`Z_k`) forms.

use crate::error::{Error, Result};
use crate::model::{Graph, SpinConfig};

use super::multilinear::{check_marginals, MultilinearFn};

fn require_bilinear(f: &MultilinearFn) -> Result<()> {
    if f.is_bilinear() {
        Ok(())
    } else {
        Err(Error::InvalidFunction("expected a purely bilinear function".into()))
    }
}

/// `sum a_uv (x_u - m_u)(x_v - m_v)`.
pub fn centered_bilinear_eval(a: &MultilinearFn, marginals: &[f64], x: &SpinConfig) -> Result<f64> {
    require_bilinear(a)?;
    if marginals.len() != x.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: marginals.len(),
        });
    }
    check_marginals(marginals, a.min_nodes())?;
    if a.min_nodes() > x.len() {
        return Err(Error::Index {
            index: a.min_nodes() - 1,
            n: x.len(),
        });
    }
    let s = x.as_slice();
    Ok(a.terms().fold(a.constant(), |acc, (set, c)| {
        let (u, v) = (set[0], set[1]);
        acc + c * (s[u] as f64 - marginals[u]) * (s[v] as f64 - marginals[v])
    }))
}

/// `sum a_uv (x1_u - x2_u)(x1_v - x2_v)`.
pub fn two_sample_bilinear_eval(a: &MultilinearFn, x1: &SpinConfig, x2: &SpinConfig) -> Result<f64> {
    require_bilinear(a)?;
    if x1.len() != x2.len() {
        return Err(Error::Dimension {
            expected: x1.len(),
            got: x2.len(),
        });
    }
    if a.min_nodes() > x1.len() {
        return Err(Error::Index {
            index: a.min_nodes() - 1,
            n: x1.len(),
        });
    }
    let (p, q) = (x1.as_slice(), x2.as_slice());
    Ok(a.terms().fold(a.constant(), |acc, (set, c)| {
        let (u, v) = (set[0], set[1]);
        acc + c * ((p[u] - q[u]) * (p[v] - q[v])) as f64
    }))
}

/// Precomputed neighbourhoods for
/// `Z_k(x) = sum_{(u,v): u != v, d(u,v) <= k} (x_u - m_u)(x_v - m_v)`
/// over *ordered* pairs, with `d` the shortest-path distance. Each unordered
/// pair is therefore counted twice and self-pairs are excluded.
#[derive(Debug, Clone)]
pub struct DistanceStatistic {
    k: usize,
    balls: Vec<Vec<usize>>,
}

impl DistanceStatistic {
    pub fn new(graph: &Graph, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("distance radius k must be >= 1".into()));
        }
        let balls = (0..graph.node_count())
            .map(|u| graph.within_distance(u, k))
            .collect();
        Ok(DistanceStatistic { k, balls })
    }

    pub fn radius(&self) -> usize {
        self.k
    }

    pub fn node_count(&self) -> usize {
        self.balls.len()
    }

    /// Number of ordered pairs in the support.
    pub fn ordered_pair_count(&self) -> usize {
        self.balls.iter().map(Vec::len).sum()
    }

    pub fn eval(&self, x: &SpinConfig, marginals: &[f64]) -> Result<f64> {
        let n = self.balls.len();
        if x.len() != n {
            return Err(Error::Dimension { expected: n, got: x.len() });
        }
        if marginals.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: marginals.len(),
            });
        }
        check_marginals(marginals, n)?;
        let s = x.as_slice();
        let centered: Vec<f64> = s.iter().zip(marginals).map(|(&xi, &m)| xi as f64 - m).collect();
        Ok(self
            .balls
            .iter()
            .enumerate()
            .map(|(u, ball)| centered[u] * ball.iter().map(|&v| centered[v]).sum::<f64>())
            .sum())
    }

    /// Evaluation with all marginals equal to `m`.
    pub fn eval_uniform(&self, x: &SpinConfig, m: f64) -> Result<f64> {
        self.eval(x, &vec![m; self.balls.len()])
    }

    /// `value * sum_{u<v, d(u,v) <= k} x_u x_v` as a coefficient map (each
    /// unordered pair once).
    pub fn to_multilinear(&self, value: f64) -> MultilinearFn {
        let terms = self.balls.iter().enumerate().flat_map(|(u, ball)| {
            ball.iter()
                .filter(move |&&v| u < v)
                .map(move |&v| (vec![u, v], value))
        });
        MultilinearFn::from_terms(2, terms).expect("pairs are distinct")
    }
}

/// One-shot `Z_k`; build a [`DistanceStatistic`] to evaluate many configurations.
pub fn graph_distance_statistic(graph: &Graph, k: usize, x: &SpinConfig, marginals: &[f64]) -> Result<f64> {
    DistanceStatistic::new(graph, k)?.eval(x, marginals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn centered_examples() {
        let f = MultilinearFn::all_pairs(4, 1.0);
        let x = SpinConfig::random(4, &mut seeded(1));
        assert_eq!(
            centered_bilinear_eval(&f, &[0.0; 4], &x).unwrap(),
            f.eval(&x).unwrap()
        );
        assert_eq!(
            centered_bilinear_eval(&f, &[1.0; 4], &SpinConfig::all_plus(4)).unwrap(),
            0.0
        );
        assert!(centered_bilinear_eval(&f, &[0.0; 3], &x).is_err());
        let cubic = MultilinearFn::elementary_symmetric(4, 3, 1.0);
        assert!(centered_bilinear_eval(&cubic, &[0.0; 4], &x).is_err());
    }

    #[test]
    fn two_sample_examples() {
        let f = MultilinearFn::all_pairs(3, 1.0);
        let x = SpinConfig::new(vec![1, -1, 1]).unwrap();
        assert_eq!(two_sample_bilinear_eval(&f, &x, &x).unwrap(), 0.0);
        let y = x.negated();
        assert_eq!(
            two_sample_bilinear_eval(&f, &x, &y).unwrap(),
            4.0 * f.eval(&x).unwrap()
        );
        let z = SpinConfig::new(vec![1, 1, -1]).unwrap();
        assert_eq!(
            two_sample_bilinear_eval(&f, &x, &z).unwrap(),
            two_sample_bilinear_eval(&f, &z, &x).unwrap()
        );
        assert!(two_sample_bilinear_eval(&f, &x, &SpinConfig::all_plus(2)).is_err());
    }

    #[test]
    fn distance_statistic_examples() {
        let empty = Graph::empty(5);
        let x = SpinConfig::all_plus(5);
        assert_eq!(graph_distance_statistic(&empty, 1, &x, &[0.0; 5]).unwrap(), 0.0);

        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let x = SpinConfig::new(vec![1, 1, -1]).unwrap();
        assert_eq!(graph_distance_statistic(&path, 1, &x, &[0.0; 3]).unwrap(), 0.0);
        // k = 2 adds (0,2),(2,0): -1 - 1
        assert_eq!(graph_distance_statistic(&path, 2, &x, &[0.0; 3]).unwrap(), -2.0);
        assert!(DistanceStatistic::new(&path, 0).is_err());
    }

    #[test]
    fn ordered_sum_is_twice_the_coefficient_form() {
        let g = Graph::grid(4, 3);
        let z = DistanceStatistic::new(&g, 2).unwrap();
        let f = z.to_multilinear(1.0);
        let x = SpinConfig::random(12, &mut seeded(8));
        assert_eq!(z.eval_uniform(&x, 0.0).unwrap(), 2.0 * f.eval(&x).unwrap());
        assert_eq!(z.ordered_pair_count(), 2 * f.term_count());
    }
}
