//! Sparse multilinear functions of ±1 spins.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SpinConfig;

/// `f(x) = c + sum_S a_S prod_{i in S} x_i` over non-empty sets `S` of
/// distinct nodes with `|S| <= degree_cap`.
///
/// Sets are stored sorted, so any ordering of the same indices names the same
/// coefficient; adding a term for an existing set accumulates into it. The
/// constant `c` is kept apart from the coefficient map and is only produced by
/// restriction or centering; it does not count toward `inf_norm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultilinearFn {
    degree_cap: usize,
    coeffs: BTreeMap<Vec<usize>, f64>,
    constant: f64,
    inf_norm: f64,
    max_node: Option<usize>,
}

impl MultilinearFn {
    pub fn zero(degree_cap: usize) -> Self {
        MultilinearFn {
            degree_cap,
            coeffs: BTreeMap::new(),
            constant: 0.0,
            inf_norm: 0.0,
            max_node: None,
        }
    }

    pub fn from_terms<I>(degree_cap: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut f = MultilinearFn::zero(degree_cap);
        for (set, a) in terms {
            f.add_term(set, a)?;
        }
        Ok(f)
    }

    /// `value * sum_{u<v} x_u x_v` on `n` nodes.
    pub fn all_pairs(n: usize, value: f64) -> Self {
        let terms = (0..n).flat_map(|u| (u + 1..n).map(move |v| (vec![u, v], value)));
        MultilinearFn::from_terms(2, terms).expect("pairs are distinct")
    }

    /// `value * e_d(x)`, the sum over all `d`-subsets. Exponential in `d`; use
    /// for small `n` only.
    pub fn elementary_symmetric(n: usize, d: usize, value: f64) -> Self {
        let mut terms = Vec::new();
        let mut idx: Vec<usize> = (0..d).collect();
        if d == 0 || d > n {
            return MultilinearFn::zero(d);
        }
        loop {
            terms.push((idx.clone(), value));
            let mut i = d;
            while i > 0 && idx[i - 1] == n - d + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..d {
                idx[j] = idx[j - 1] + 1;
            }
        }
        MultilinearFn::from_terms(d, terms).expect("subsets are distinct")
    }

    pub fn add_term(&mut self, mut set: Vec<usize>, a: f64) -> Result<()> {
        if !a.is_finite() {
            return Err(Error::InvalidFunction(format!("non-finite coefficient for {set:?}")));
        }
        if set.is_empty() {
            return Err(Error::InvalidFunction("empty index set".into()));
        }
        set.sort_unstable();
        if set.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidFunction(format!(
                "repeated node in index set {set:?}"
            )));
        }
        if set.len() > self.degree_cap {
            return Err(Error::InvalidFunction(format!(
                "set {set:?} exceeds degree cap {}",
                self.degree_cap
            )));
        }
        let top = *set.last().expect("non-empty");
        self.max_node = Some(self.max_node.map_or(top, |m| m.max(top)));
        let entry = self.coeffs.entry(set.clone()).or_insert(0.0);
        let before = entry.abs();
        *entry += a;
        let after = entry.abs();
        if *entry == 0.0 {
            self.coeffs.remove(&set);
        }
        if after >= self.inf_norm {
            self.inf_norm = after;
        } else if before == self.inf_norm {
            self.recompute_norm();
        }
        Ok(())
    }

    fn recompute_norm(&mut self) {
        self.inf_norm = self.coeffs.values().fold(0.0, |m, a| m.max(a.abs()));
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant = c;
        self
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    /// Largest `|S|` with a non-zero coefficient (0 for a constant).
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn inf_norm(&self) -> f64 {
        self.inf_norm
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn coefficient(&self, set: &[usize]) -> f64 {
        let mut key = set.to_vec();
        key.sort_unstable();
        self.coeffs.get(&key).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.coeffs.iter().map(|(s, &a)| (s.as_slice(), a))
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Smallest node count this function can be evaluated on.
    pub fn min_nodes(&self) -> usize {
        self.max_node.map_or(0, |m| m + 1)
    }

    pub fn is_bilinear(&self) -> bool {
        self.coeffs.keys().all(|s| s.len() == 2)
    }

    pub fn eval(&self, x: &SpinConfig) -> Result<f64> {
        if self.min_nodes() > x.len() {
            return Err(Error::Index {
                index: self.min_nodes() - 1,
                n: x.len(),
            });
        }
        let spins = x.as_slice();
        let mut acc = self.constant;
        for (set, &a) in &self.coeffs {
            let sign: i8 = set.iter().fold(1, |s, &i| s * spins[i]);
            acc += a * sign as f64;
        }
        Ok(acc)
    }

    /// Pins `pins` and keeps the part of `f` that multiplies them:
    /// `f^{pins}(x) = sum_{S ⊇ pins} a_S prod_{i in S \ pins} x_i`.
    ///
    /// For a bilinear `f` and one pin `v` this is `sum_{u != v} a_uv x_u`, the
    /// quantity that governs a single-site change at `v`. A set equal to the
    /// pins contributes to the constant.
    pub fn restrict(&self, pins: &[usize]) -> Result<MultilinearFn> {
        let mut sorted = pins.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("pins collide: {pins:?}")));
        }
        if pins.len() >= self.degree_cap {
            return Err(Error::InvalidArgument(format!(
                "cannot pin {} nodes of a degree-{} function",
                pins.len(),
                self.degree_cap
            )));
        }
        let mut out = MultilinearFn::zero(self.degree_cap - pins.len());
        let mut constant = 0.0;
        for (set, &a) in &self.coeffs {
            if !sorted.iter().all(|p| set.binary_search(p).is_ok()) {
                continue;
            }
            let rest: Vec<usize> = set.iter().copied().filter(|i| sorted.binary_search(i).is_err()).collect();
            if rest.is_empty() {
                constant += a;
            } else {
                out.add_term(rest, a)?;
            }
        }
        Ok(out.with_constant(constant))
    }

    pub fn scaled(&self, alpha: f64) -> MultilinearFn {
        let mut out = MultilinearFn::zero(self.degree_cap);
        for (set, &a) in &self.coeffs {
            if alpha * a != 0.0 {
                out.coeffs.insert(set.clone(), alpha * a);
            }
        }
        out.max_node = self.max_node;
        out.constant = alpha * self.constant;
        out.recompute_norm();
        out
    }

    /// `self + other`.
    pub fn plus(&self, other: &MultilinearFn) -> MultilinearFn {
        let mut out = self.clone();
        out.degree_cap = self.degree_cap.max(other.degree_cap);
        for (set, &a) in &other.coeffs {
            out.add_term(set.clone(), a).expect("terms already validated");
        }
        out.constant += other.constant;
        out
    }

    /// Expands `sum a_uv (x_u - m_u)(x_v - m_v)` into monomials; requires a
    /// bilinear function.
    pub fn centered_expansion(&self, marginals: &[f64]) -> Result<MultilinearFn> {
        check_marginals(marginals, self.min_nodes())?;
        if !self.is_bilinear() {
            return Err(Error::InvalidFunction("centering needs a bilinear function".into()));
        }
        let mut out = MultilinearFn::zero(2);
        let mut constant = self.constant;
        for (set, &a) in &self.coeffs {
            let (u, v) = (set[0], set[1]);
            out.add_term(vec![u, v], a)?;
            if marginals[v] != 0.0 {
                out.add_term(vec![u], -a * marginals[v])?;
            }
            if marginals[u] != 0.0 {
                out.add_term(vec![v], -a * marginals[u])?;
            }
            constant += a * marginals[u] * marginals[v];
        }
        Ok(out.with_constant(constant))
    }
}

pub(crate) fn check_marginals(m: &[f64], needed: usize) -> Result<()> {
    if m.len() < needed {
        return Err(Error::Dimension {
            expected: needed,
            got: m.len(),
        });
    }
    if let Some(v) = m.iter().position(|mv| mv.is_nan() || mv.abs() > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "marginal mean at node {v} is {}, must lie in [-1, 1]",
            m[v]
        )));
    }
    Ok(())
}
