use std::path::Path;

use super::{content_lines, parse_field, read_text};
use crate::error::{Error, Result};
use crate::model::Graph;
use crate::statistics::{DistanceStatistic, MultilinearFn};

/// Largest `n` for which the `all-pairs` shorthand is expanded densely.
pub const DENSE_ALL_PAIRS_LIMIT: usize = 10_000;

pub fn load_coefficients(path: impl AsRef<Path>, graph: &Graph) -> Result<MultilinearFn> {
    let path = path.as_ref();
    parse_coefficients(&read_text(path)?, &path.display().to_string(), graph)
}

/// Parses coefficient lines, summing repeated supports:
///
/// * `S: u1 u2 ... uk = a` adds `a * x_u1 ... x_uk`;
/// * `all-pairs a` adds `a * x_u x_v` for every `u < v`;
/// * `distance k a` adds `a * x_u x_v` for every pair at graph distance `<= k`.
///
/// The degree cap is the largest support size seen (at least 2).
pub fn parse_coefficients(text: &str, path: &str, graph: &Graph) -> Result<MultilinearFn> {
    let n = graph.node_count();
    let mut terms: Vec<(Vec<usize>, f64)> = Vec::new();
    for (line, content) in content_lines(text) {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            ["all-pairs", value] => {
                let a: f64 = parse_field(path, line, value, "coefficient")?;
                if !a.is_finite() {
                    return Err(Error::parse(path, line, "non-finite coefficient"));
                }
                if n > DENSE_ALL_PAIRS_LIMIT {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("all-pairs would expand densely over {n} nodes (limit {DENSE_ALL_PAIRS_LIMIT})"),
                    ));
                }
                terms.extend(MultilinearFn::all_pairs(n, a).terms().map(|(s, v)| (s.to_vec(), v)));
            }
            ["distance", k, value] => {
                let k: usize = parse_field(path, line, k, "distance")?;
                let a: f64 = parse_field(path, line, value, "coefficient")?;
                let z = DistanceStatistic::new(graph, k).map_err(|e| Error::parse(path, line, e.to_string()))?;
                if !a.is_finite() {
                    return Err(Error::parse(path, line, "non-finite coefficient"));
                }
                let f = z.to_multilinear(a);
                terms.extend(f.terms().map(|(s, v)| (s.to_vec(), v)));
            }
            [head, ..] if head.starts_with("S:") => {
                let (lhs, rhs) = content
                    .split_once('=')
                    .ok_or_else(|| Error::parse(path, line, "expected 'S: u1 ... uk = a'"))?;
                let nodes = lhs["S:".len()..]
                    .split_whitespace()
                    .map(|t| {
                        let v: usize = parse_field(path, line, t, "node index")?;
                        if v >= n {
                            return Err(Error::parse(path, line, format!("node {v} out of range for {n} nodes")));
                        }
                        Ok(v)
                    })
                    .collect::<Result<Vec<_>>>()?;
                if nodes.is_empty() {
                    return Err(Error::parse(path, line, "empty support"));
                }
                if nodes.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::parse(path, line, "support indices must be distinct and sorted"));
                }
                let a: f64 = parse_field(path, line, rhs.trim(), "coefficient")?;
                terms.push((nodes, a));
            }
            _ => {
                return Err(Error::parse(
                    path,
                    line,
                    "expected 'S: u1 ... uk = a', 'all-pairs a' or 'distance k a'",
                ))
            }
        }
    }
    if terms.is_empty() {
        return Err(Error::parse(path, 1, "no coefficients found"));
    }
    let cap = terms.iter().map(|(s, _)| s.len()).max().unwrap_or(2).max(2);
    MultilinearFn::from_terms(cap, terms).map_err(|e| Error::parse(path, 1, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SpinConfig;

    #[test]
    fn explicit_terms() {
        let g = Graph::empty(4);
        let f = parse_coefficients("S: 0 1 = 0.5\nS: 1 2 3 = -2\nS: 0 1 = 0.25\n", "c", &g).unwrap();
        assert_eq!(f.degree(), 3);
        assert_eq!(f.coefficient(&[0, 1]), 0.75);
        assert_eq!(f.coefficient(&[1, 2, 3]), -2.0);
    }

    #[test]
    fn shorthands() {
        let g = Graph::grid(3, 1);
        let pairs = parse_coefficients("all-pairs 1\n", "c", &g).unwrap();
        assert_eq!(pairs.term_count(), 3);
        let dist = parse_coefficients("distance 1 2.0\n", "c", &g).unwrap();
        assert_eq!(dist.term_count(), 2);
        assert_eq!(dist.coefficient(&[0, 2]), 0.0);
        let x = SpinConfig::all_plus(3);
        assert_eq!(pairs.eval(&x).unwrap(), 3.0);
    }

    #[test]
    fn rejects_malformed() {
        let g = Graph::empty(3);
        for text in ["S: 1 0 = 1\n", "S: 0 0 = 1\n", "S: 0 5 = 1\n", "S: 0 1 1\n", "pairs 1\n", "", "S: = 2\n"] {
            assert!(parse_coefficients(text, "c", &g).is_err(), "{text:?}");
        }
        let big = Graph::empty(DENSE_ALL_PAIRS_LIMIT + 1);
        assert!(parse_coefficients("all-pairs 1\n", "c", &big).is_err());
    }
}
