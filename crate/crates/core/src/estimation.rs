//! Maximum pseudo-likelihood fitting of the two-parameter null model
//! (uniform field `h`, uniform coupling `theta` on a known graph).
//!
//! The objective is the log of the product of single-site conditionals,
//!
//! ```text
//! PL(h, theta) = sum_v log sigma(2 x_v (h + theta m_v)),   m_v = sum_{u ~ v} x_u,
//! ```
//!
//! which is concave in `(h, theta)`. It is maximized by Newton's method with
//! step halving inside the box `[-cap, cap]^2`. When the observation is
//! separable (some direction increases every conditional, e.g. all spins
//! equal) there is no finite maximizer: the fit is flagged degenerate and the
//! diverging parameters end at the box edge.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Graph, SpinConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpleOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub cap: f64,
}

impl Default for MpleOptions {
    fn default() -> Self {
        MpleOptions {
            tolerance: 1e-8,
            max_iterations: 200,
            cap: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpleResult {
    pub h_hat: f64,
    pub theta_hat: f64,
    pub gradient_norm: f64,
    pub converged: bool,
    pub degenerate: bool,
    pub degenerate_reason: Option<String>,
    pub iterations: usize,
}

/// Spins and neighbour sums as floats; everything the objective needs.
struct Observation {
    spins: Vec<f64>,
    sums: Vec<f64>,
}

impl Observation {
    fn new(graph: &Graph, x: &SpinConfig) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Empty("observation"));
        }
        if x.len() != graph.node_count() {
            return Err(Error::Dimension {
                expected: graph.node_count(),
                got: x.len(),
            });
        }
        let s = x.as_slice();
        let sums = (0..x.len())
            .map(|v| graph.neighbors(v).iter().map(|&u| s[u] as i64).sum::<i64>() as f64)
            .collect();
        Ok(Observation {
            spins: s.iter().map(|&v| v as f64).collect(),
            sums,
        })
    }

    fn value(&self, h: f64, theta: f64) -> f64 {
        self.spins
            .iter()
            .zip(&self.sums)
            .map(|(&s, &m)| -softplus(-2.0 * s * (h + theta * m)))
            .sum()
    }

    /// Gradient `(d/dh, d/dtheta)` and Hessian entries `(hh, h_theta, theta_theta)`.
    fn derivatives(&self, h: f64, theta: f64) -> ([f64; 2], [f64; 3]) {
        let mut g = [0.0; 2];
        let mut hess = [0.0; 3];
        for (&s, &m) in self.spins.iter().zip(&self.sums) {
            let t = 2.0 * s * (h + theta * m);
            let miss = logistic(-t);
            let curv = 4.0 * logistic(t) * miss;
            g[0] += 2.0 * s * miss;
            g[1] += 2.0 * s * m * miss;
            hess[0] -= curv;
            hess[1] -= curv * m;
            hess[2] -= curv * m * m;
        }
        (g, hess)
    }

    fn all_sums_zero(&self) -> bool {
        self.sums.iter().all(|&m| m == 0.0)
    }
}

#[inline]
fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// `ln(1 + e^z)` without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

pub fn pseudo_log_likelihood(graph: &Graph, x: &SpinConfig, h: f64, theta: f64) -> Result<f64> {
    check_finite(h, theta)?;
    Ok(Observation::new(graph, x)?.value(h, theta))
}

/// Analytic gradient `(dPL/dh, dPL/dtheta)`.
pub fn pseudo_log_likelihood_gradient(graph: &Graph, x: &SpinConfig, h: f64, theta: f64) -> Result<[f64; 2]> {
    check_finite(h, theta)?;
    Ok(Observation::new(graph, x)?.derivatives(h, theta).0)
}

/// Hessian as `[[hh, h_theta], [h_theta, theta_theta]]`.
pub fn pseudo_log_likelihood_hessian(graph: &Graph, x: &SpinConfig, h: f64, theta: f64) -> Result<[[f64; 2]; 2]> {
    check_finite(h, theta)?;
    let (_, hs) = Observation::new(graph, x)?.derivatives(h, theta);
    Ok([[hs[0], hs[1]], [hs[1], hs[2]]])
}

fn check_finite(h: f64, theta: f64) -> Result<()> {
    if h.is_finite() && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("parameters must be finite, got h={h} theta={theta}")))
    }
}

/// Which parameters are free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Free {
    Both,
    FieldOnly,
    CouplingOnly,
}

/// Fits `(h, theta)`.
pub fn mple_fit(graph: &Graph, x: &SpinConfig, opts: &MpleOptions) -> Result<MpleResult> {
    let obs = Observation::new(graph, x)?;
    // without neighbour information theta is not identifiable; fix it at 0
    let free = if obs.all_sums_zero() { Free::FieldOnly } else { Free::Both };
    Ok(fit(&obs, free, opts))
}

/// Fits `theta` with `h = 0`.
pub fn mple_fit_zero_field(graph: &Graph, x: &SpinConfig, opts: &MpleOptions) -> Result<MpleResult> {
    let obs = Observation::new(graph, x)?;
    if obs.all_sums_zero() {
        return Ok(MpleResult {
            h_hat: 0.0,
            theta_hat: 0.0,
            gradient_norm: 0.0,
            converged: true,
            degenerate: false,
            degenerate_reason: None,
            iterations: 0,
        });
    }
    Ok(fit(&obs, Free::CouplingOnly, opts))
}

/// Feature vectors `x_v * (1, m_v)` restricted to the free coordinates; the
/// objective is unbounded above iff some direction `w` has `n_v . w >= 0`
/// for every `v` with at least one strict inequality.
fn separating_direction(obs: &Observation, free: Free) -> Option<[i64; 2]> {
    let normals: BTreeSet<[i64; 2]> = obs
        .spins
        .iter()
        .zip(&obs.sums)
        .map(|(&s, &m)| {
            let (s, m) = (s as i64, m as i64);
            match free {
                Free::Both => [s, s * m],
                Free::FieldOnly => [s, 0],
                Free::CouplingOnly => [0, s * m],
            }
        })
        .collect();
    let mut candidates = Vec::new();
    for n in &normals {
        candidates.push(*n);
        candidates.push([-n[0], -n[1]]);
        candidates.push([-n[1], n[0]]);
        candidates.push([n[1], -n[0]]);
    }
    candidates.into_iter().find(|w| {
        if *w == [0, 0] {
            return false;
        }
        let dots = normals.iter().map(|n| n[0] * w[0] + n[1] * w[1]);
        let mut strict = false;
        for d in dots {
            if d < 0 {
                return false;
            }
            strict |= d > 0;
        }
        strict
    })
}

fn fit(obs: &Observation, free: Free, opts: &MpleOptions) -> MpleResult {
    let separation = separating_direction(obs, free);
    let cap = opts.cap;
    let clamp = |v: f64| v.clamp(-cap, cap);
    let (mut h, mut theta) = (0.0, 0.0);
    let mut value = obs.value(h, theta);
    let mut iterations = 0;
    let mut grad_norm;
    for it in 0..opts.max_iterations {
        iterations = it;
        let (g, hs) = obs.derivatives(h, theta);
        let (dh, dt) = match free {
            Free::Both => {
                grad_norm = g[0].abs().max(g[1].abs());
                newton_direction_2d(g, hs)
            }
            Free::FieldOnly => {
                grad_norm = g[0].abs();
                (newton_direction_1d(g[0], hs[0]), 0.0)
            }
            Free::CouplingOnly => {
                grad_norm = g[1].abs();
                (0.0, newton_direction_1d(g[1], hs[2]))
            }
        };
        if separation.is_none() && grad_norm < opts.tolerance {
            break;
        }
        let mut step = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let (nh, nt) = (clamp(h + step * dh), clamp(theta + step * dt));
            let nv = obs.value(nh, nt);
            if nv >= value && (nh != h || nt != theta) {
                h = nh;
                theta = nt;
                value = nv;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        iterations = it + 1;
        if !moved {
            break;
        }
    }
    let (g, _) = obs.derivatives(h, theta);
    grad_norm = match free {
        Free::Both => g[0].abs().max(g[1].abs()),
        Free::FieldOnly => g[0].abs(),
        Free::CouplingOnly => g[1].abs(),
    };
    let degenerate = separation.is_some();
    MpleResult {
        h_hat: h,
        theta_hat: theta,
        gradient_norm: grad_norm,
        converged: !degenerate && grad_norm < opts.tolerance,
        degenerate,
        degenerate_reason: separation.map(|w| {
            format!(
                "observation is separable along direction (h, theta) ~ ({}, {}); no finite maximizer, parameters capped at ±{}",
                w[0], w[1], cap
            )
        }),
        iterations,
    }
}

fn newton_direction_1d(g: f64, curvature: f64) -> f64 {
    if curvature < -1e-300 {
        -g / curvature
    } else {
        g
    }
}

/// Solves `H d = -g` by Cramer's rule, falling back to the gradient when the
/// Hessian is numerically singular.
fn newton_direction_2d(g: [f64; 2], hs: [f64; 3]) -> (f64, f64) {
    let [a, b, c] = hs;
    let det = a * c - b * b;
    let scale = a.abs().max(c.abs());
    if det > 1e-12 * scale * scale && det.is_finite() {
        (-(c * g[0] - b * g[1]) / det, -(a * g[1] - b * g[0]) / det)
    } else {
        (g[0], g[1])
    }
}
