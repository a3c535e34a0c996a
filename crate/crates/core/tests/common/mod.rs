#![allow(dead_code)]

use ising_hightemp::IsingModel;
use rand::Rng;

/// Random graph (each edge with probability `density`) with couplings drawn
/// uniformly from `[-c, c]`, where `c = atanh(0.9 / max_degree)`, so the
/// Dobrushin slack is at least 0.1.
pub fn random_high_temp_model<R: Rng>(rng: &mut R, n: usize, density: f64, with_field: bool) -> IsingModel {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < density {
                pairs.push((u, v));
            }
        }
    }
    let mut degree = vec![0usize; n];
    for &(u, v) in &pairs {
        degree[u] += 1;
        degree[v] += 1;
    }
    let max_degree = degree.iter().copied().max().unwrap_or(0).max(1);
    let c = (0.9 / max_degree as f64).atanh();
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(u, v)| (u, v, rng.random_range(-c..=c)))
        .collect();
    let fields = (0..n)
        .map(|_| if with_field { rng.random_range(-0.5..=0.5) } else { 0.0 })
        .collect();
    IsingModel::new(n, &edges, fields).expect("valid random model")
}
