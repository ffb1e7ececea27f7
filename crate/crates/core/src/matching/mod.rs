//! Exact minimum-cost perfect matching on complete point sets.
//!
//! Distances are read through a closure so the same routine serves matchings
//! over all customer endpoints and over the odd-degree vertices of a tree.

mod blossom;

pub use blossom::max_weight_matching;

use crate::error::{CarpError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Pairs `(a, b)` with `a < b`, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub cost: f64,
}

impl Matching {
    fn from_pairs(mut pairs: Vec<(usize, usize)>, dist: impl Fn(usize, usize) -> f64) -> Self {
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        let cost = pairs.iter().map(|&(a, b)| dist(a, b)).sum();
        Matching { pairs, cost }
    }

    pub fn empty() -> Self {
        Matching {
            pairs: Vec::new(),
            cost: 0.0,
        }
    }
}

fn validate(vertices: &[usize]) -> Result<()> {
    if vertices.len() % 2 == 1 {
        return Err(CarpError::input(format!(
            "perfect matching needs an even vertex set, got {}",
            vertices.len()
        )));
    }
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(CarpError::input("vertex set contains duplicates"));
    }
    Ok(())
}

/// Largest exponent keeping scaled weights below 2^40.
fn weight_scale(max_dist: f64) -> f64 {
    if max_dist <= 0.0 {
        return 1.0;
    }
    let e = (40.0 - max_dist.log2()).floor();
    2f64.powi(e as i32)
}

/// Minimum-cost perfect matching of `vertices` under `dist`.
///
/// Distances are scaled by a power of two and rounded to integers before the
/// blossom run, which is exact for integer distances below 2^40 and within a
/// relative 2^-40 per pair otherwise. The reported cost uses `dist` itself.
pub fn min_cost_perfect_matching(
    vertices: &[usize],
    dist: impl Fn(usize, usize) -> f64,
) -> Result<Matching> {
    validate(vertices)?;
    let n = vertices.len();
    if n == 0 {
        return Ok(Matching::empty());
    }
    let mut max_dist: f64 = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            max_dist = max_dist.max(dist(vertices[a], vertices[b]));
        }
    }
    let scale = weight_scale(max_dist);
    let top = (max_dist * scale).round() as i64 + 1;
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            let scaled = (dist(vertices[a], vertices[b]) * scale).round() as i64;
            edges.push((a, b, top - scaled));
        }
    }
    let mate = max_weight_matching(n, &edges, true);
    let mut pairs = Vec::with_capacity(n / 2);
    for (a, m) in mate.iter().enumerate() {
        let b = m.expect("complete graph on an even vertex set has a perfect matching");
        if a < b {
            pairs.push((vertices[a], vertices[b]));
        }
    }
    Ok(Matching::from_pairs(pairs, dist))
}

pub const ORACLE_CAP: usize = 12;

/// Exhaustive recursion over all perfect matchings; verification only.
pub fn matching_oracle(
    vertices: &[usize],
    dist: impl Fn(usize, usize) -> f64,
) -> Result<Matching> {
    validate(vertices)?;
    if vertices.len() > ORACLE_CAP {
        return Err(CarpError::SizeCap {
            what: "matching oracle vertex count",
            got: vertices.len(),
            cap: ORACLE_CAP,
        });
    }

    fn recurse(
        rest: &mut Vec<usize>,
        dist: &dyn Fn(usize, usize) -> f64,
        current: &mut Vec<(usize, usize)>,
        cost: f64,
        best: &mut Option<(f64, Vec<(usize, usize)>)>,
    ) {
        if rest.is_empty() {
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                *best = Some((cost, current.clone()));
            }
            return;
        }
        let first = rest.remove(0);
        for i in 0..rest.len() {
            let partner = rest.remove(i);
            current.push((first, partner));
            recurse(rest, dist, current, cost + dist(first, partner), best);
            current.pop();
            rest.insert(i, partner);
        }
        rest.insert(0, first);
    }

    let mut rest = vertices.to_vec();
    rest.sort_unstable();
    let mut best = None;
    recurse(&mut rest, &dist, &mut Vec::new(), 0.0, &mut best);
    let pairs = best.map(|(_, p)| p).unwrap_or_default();
    Ok(Matching::from_pairs(pairs, dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn collinear(a: usize, b: usize) -> f64 {
        (a as f64 - b as f64).abs()
    }

    #[test]
    fn four_collinear_points() {
        let m = min_cost_perfect_matching(&[0, 1, 2, 3], collinear).unwrap();
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(m.cost, 2.0);
        let o = matching_oracle(&[0, 1, 2, 3], collinear).unwrap();
        assert_eq!(o.cost, 2.0);
    }

    #[test]
    fn two_points_are_forced() {
        let m = min_cost_perfect_matching(&[7, 3], collinear).unwrap();
        assert_eq!(m.pairs, vec![(3, 7)]);
        assert_eq!(matching_oracle(&[7, 3], collinear).unwrap().pairs, vec![(3, 7)]);
    }

    #[test]
    fn zero_metric() {
        let m = min_cost_perfect_matching(&[0, 1, 2, 3, 4, 5], |_, _| 0.0).unwrap();
        assert_eq!(m.pairs.len(), 3);
        assert_eq!(m.cost, 0.0);
    }

    #[test]
    fn odd_set_is_rejected() {
        assert!(min_cost_perfect_matching(&[0, 1, 2], collinear).is_err());
        assert!(matching_oracle(&[0, 1, 2], collinear).is_err());
    }

    #[test]
    fn oracle_cap() {
        let v: Vec<usize> = (0..14).collect();
        assert!(matches!(
            matching_oracle(&v, collinear),
            Err(CarpError::SizeCap { .. })
        ));
    }

    #[allow(clippy::needless_range_loop)]
    fn random_table(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
        let mut t = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in a + 1..n {
                let w = rng.gen_range(0..50) as f64;
                t[a][b] = w;
                t[b][a] = w;
            }
        }
        t
    }

    #[test]
    fn blossom_matches_oracle_on_random_integer_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = 2 * rng.gen_range(1..=6);
            let t = random_table(&mut rng, n);
            let v: Vec<usize> = (0..n).collect();
            let d = |a: usize, b: usize| t[a][b];
            let fast = min_cost_perfect_matching(&v, d).unwrap();
            let slow = matching_oracle(&v, d).unwrap();
            assert_eq!(fast.cost, slow.cost, "table {t:?}");
        }
    }

    #[test]
    fn cost_is_invariant_under_vertex_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = random_table(&mut rng, 10);
        let d = |a: usize, b: usize| t[a][b];
        let v: Vec<usize> = (0..10).collect();
        let mut w = v.clone();
        w.reverse();
        w.swap(2, 7);
        let a = min_cost_perfect_matching(&v, d).unwrap();
        let b = min_cost_perfect_matching(&w, d).unwrap();
        assert_eq!(a.cost, b.cost);
    }

    #[test]
    fn euclidean_float_costs_agree_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = 2 * rng.gen_range(1..=5);
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
                .collect();
            let d = |a: usize, b: usize| {
                let (dx, dy) = (pts[a].0 - pts[b].0, pts[a].1 - pts[b].1);
                (dx * dx + dy * dy).sqrt()
            };
            let v: Vec<usize> = (0..n).collect();
            let fast = min_cost_perfect_matching(&v, d).unwrap();
            let slow = matching_oracle(&v, d).unwrap();
            assert!((fast.cost - slow.cost).abs() <= 1e-9 * slow.cost.max(1.0));
        }
    }
}
