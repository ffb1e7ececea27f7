//! Seeded random instances.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{RawEdge, RawInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// Integer points in `[0, range]^2`, complete graph, Euclidean costs.
    /// Endpoints are vertices `0..2m` with customers `(2i, 2i + 1)`; the
    /// depot is vertex `2m`.
    Euclidean,
    /// Random connected graph with integer costs in `1..=range`; `m` of its
    /// edges are customers. The depot is vertex 0.
    RandomMetric,
}

pub fn generate(m: usize, k: usize, mode: GenMode, seed: u64, range: u32) -> RawInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range = range.max(1);
    match mode {
        GenMode::Euclidean => euclidean(&mut rng, m, k, range),
        GenMode::RandomMetric => random_graph(&mut rng, m, k, range),
    }
}

fn euclidean(rng: &mut ChaCha8Rng, m: usize, k: usize, range: u32) -> RawInstance {
    let n = 2 * m + 1;
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0..=range) as f64, rng.gen_range(0..=range) as f64))
        .collect();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            let (dx, dy) = (pts[a].0 - pts[b].0, pts[a].1 - pts[b].1);
            let customer = a % 2 == 0 && b == a + 1 && b < 2 * m;
            edges.push(RawEdge::new(a, b, (dx * dx + dy * dy).sqrt(), customer as u8));
        }
    }
    RawInstance::new(n, edges, 2 * m, k).expect("generated instance is valid")
}

fn random_graph(rng: &mut ChaCha8Rng, m: usize, k: usize, range: u32) -> RawInstance {
    let n = 2 * m + 1;
    let mut pairs = Vec::new();
    for v in 1..n {
        pairs.push((rng.gen_range(0..v), v));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.3) && !pairs.contains(&(a, b)) {
                pairs.push((a, b));
            }
        }
    }
    let customers = sample(rng, pairs.len(), m.min(pairs.len())).into_vec();
    let mut edges: Vec<RawEdge> = pairs
        .iter()
        .map(|&(a, b)| RawEdge::new(a, b, rng.gen_range(1..=range) as f64, 0))
        .collect();
    for c in customers {
        edges[c].demand = 1;
    }
    RawInstance::new(n, edges, 0, k).expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::normalize;

    #[test]
    fn empty_instance_is_depot_only() {
        for mode in [GenMode::Euclidean, GenMode::RandomMetric] {
            let raw = generate(0, 2, mode, 1, 50);
            assert_eq!(raw.vertex_count, 1);
            assert!(raw.edges.is_empty());
        }
    }

    #[test]
    fn same_seed_same_instance() {
        for mode in [GenMode::Euclidean, GenMode::RandomMetric] {
            assert_eq!(generate(5, 3, mode, 9, 100), generate(5, 3, mode, 9, 100));
            assert_ne!(generate(5, 3, mode, 9, 100), generate(5, 3, mode, 10, 100));
        }
    }

    #[test]
    fn generated_instances_normalize() {
        for mode in [GenMode::Euclidean, GenMode::RandomMetric] {
            let raw = generate(6, 3, mode, 42, 100);
            assert_eq!(raw.customer_count(), 6);
            let (inst, _) = normalize(&raw).unwrap();
            assert_eq!(inst.customer_count(), 6);
            assert!(inst.distances().metric_violation().is_none());
        }
    }
}
