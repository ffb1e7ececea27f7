//! Exact solvers for small instances, used as verification oracles.

use crate::error::{CarpError, Result};
use crate::model::{MetricInstance, Orientation, Route, Served, Solution, DEPOT};

pub const GROUP_TOUR_CAP: usize = 10;
pub const EXACT_CARP_CAP: usize = 8;

/// Optimal closed walks from the depot for every subset of a customer list.
///
/// Held-Karp over (subset, last customer, orientation of the last customer);
/// the closing leg to the depot is added per subset.
#[derive(Debug, Clone)]
pub struct GroupTourTable {
    customers: Vec<usize>,
    back: Vec<u32>,
    closed: Vec<(f64, u32)>,
}

const NO_STATE: u32 = u32::MAX;

impl GroupTourTable {
    pub fn new(inst: &MetricInstance, customers: &[usize]) -> Result<Self> {
        let g = customers.len();
        if g > GROUP_TOUR_CAP {
            return Err(CarpError::SizeCap {
                what: "group tour customer count",
                got: g,
                cap: GROUP_TOUR_CAP,
            });
        }
        if let Some(&bad) = customers.iter().find(|&&c| c >= inst.customer_count()) {
            return Err(CarpError::input(format!("customer index {bad} out of range")));
        }
        let width = 2 * g;
        let states = 1usize << g;
        let served = |s: usize| served_state(customers, s);
        let mut path = vec![f64::INFINITY; states * width];
        let mut back = vec![NO_STATE; states * width];
        for s in 0..width {
            let x = served(s);
            path[(1 << (s / 2)) * width + s] =
                inst.dist(DEPOT, x.entry()) + inst.dist(x.entry(), x.exit());
        }
        for mask in 1..states {
            for last in 0..width {
                let here = path[mask * width + last];
                if here == f64::INFINITY {
                    continue;
                }
                let at = served(last).exit();
                for next in 0..width {
                    let j = next / 2;
                    if mask >> j & 1 == 1 {
                        continue;
                    }
                    let x = served(next);
                    let cand = here + inst.dist(at, x.entry()) + inst.dist(x.entry(), x.exit());
                    let slot = (mask | 1 << j) * width + next;
                    if cand < path[slot] {
                        path[slot] = cand;
                        back[slot] = last as u32;
                    }
                }
            }
        }
        let mut closed = vec![(0.0, NO_STATE); states];
        for (mask, entry) in closed.iter_mut().enumerate().skip(1) {
            *entry = (f64::INFINITY, NO_STATE);
            for last in 0..width {
                let total = path[mask * width + last] + inst.dist(served(last).exit(), DEPOT);
                if total < entry.0 {
                    *entry = (total, last as u32);
                }
            }
        }
        Ok(GroupTourTable {
            customers: customers.to_vec(),
            back,
            closed,
        })
    }

    /// Optimal cost of serving the subset `mask` of the table's customers.
    pub fn cost(&self, mask: usize) -> f64 {
        self.closed[mask].0
    }

    /// An optimal service order for `mask`.
    pub fn order(&self, mask: usize) -> Vec<Served> {
        let width = 2 * self.customers.len();
        let mut order = Vec::new();
        let (mut mask, mut last) = (mask, self.closed[mask].1);
        while last != NO_STATE {
            order.push(served_state(&self.customers, last as usize));
            let prev = self.back[mask * width + last as usize];
            mask &= !(1 << (last as usize / 2));
            last = prev;
        }
        order.reverse();
        order
    }
}

fn served_state(customers: &[usize], state: usize) -> Served {
    let o = if state.is_multiple_of(2) {
        Orientation::Forward
    } else {
        Orientation::Reversed
    };
    Served::new(customers[state / 2], o)
}

/// Minimum-cost route serving exactly `group`.
pub fn optimal_group_tour(group: &[usize], inst: &MetricInstance) -> Result<Route> {
    if group.is_empty() {
        return Err(CarpError::input("group tour needs at least one customer"));
    }
    let table = GroupTourTable::new(inst, group)?;
    Route::new(inst, table.order((1 << group.len()) - 1))
}

/// Optimal CARP solution by DP over customer subsets. Each block contains the
/// lowest customer of the remaining set.
pub fn exact_carp(inst: &MetricInstance) -> Result<Solution> {
    let m = inst.customer_count();
    if m > EXACT_CARP_CAP {
        return Err(CarpError::SizeCap {
            what: "exact CARP customer count",
            got: m,
            cap: EXACT_CARP_CAP,
        });
    }
    let k = inst.capacity();
    let all: Vec<usize> = (0..m).collect();
    let table = GroupTourTable::new(inst, &all)?;
    let states = 1usize << m;
    let mut best = vec![f64::INFINITY; states];
    let mut block = vec![0usize; states];
    best[0] = 0.0;
    for set in 1..states {
        let low = set & set.wrapping_neg();
        let rest = set ^ low;
        let mut sub = rest;
        loop {
            let b = sub | low;
            if b.count_ones() as usize <= k {
                let cand = table.cost(b) + best[set ^ b];
                if cand < best[set] {
                    best[set] = cand;
                    block[set] = b;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let mut routes = Vec::new();
    let mut set = states - 1;
    while set != 0 {
        let b = block[set];
        routes.push(Route::new(inst, table.order(b))?);
        set ^= b;
    }
    Ok(Solution::new(routes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::delta;
    use crate::model::{check_solution, DistanceMatrix};
    use crate::rpp::{enumerate_best_walk, exact_rpp};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(rng: &mut ChaCha8Rng, m: usize, k: usize) -> MetricInstance {
        let pts: Vec<((f64, f64), (f64, f64))> = (0..m)
            .map(|_| {
                let mut p = || (rng.gen_range(0..20) as f64, rng.gen_range(0..20) as f64);
                (p(), p())
            })
            .collect();
        let depot = (rng.gen_range(0..20) as f64, rng.gen_range(0..20) as f64);
        MetricInstance::from_points(depot, &pts, k).unwrap()
    }

    #[test]
    fn singleton_group_is_triangle() {
        let mut d = DistanceMatrix::zeros(3);
        for (a, b, c) in [(0, 1, 3.0), (1, 2, 4.0), (0, 2, 5.0)] {
            d.set(a, b, c);
            d.set(b, a, c);
        }
        let inst = MetricInstance::new(d, 1).unwrap();
        assert_eq!(optimal_group_tour(&[0], &inst).unwrap().cost, 12.0);
    }

    #[test]
    fn pair_group_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let inst = random_instance(&mut rng, 4, 2);
            let r = optimal_group_tour(&[1, 3], &inst).unwrap();
            let (c, _) = enumerate_best_walk(&inst, &[1, 3]);
            assert!((r.cost - c).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_metric_group() {
        let inst = MetricInstance::new(DistanceMatrix::zeros(7), 3).unwrap();
        assert_eq!(optimal_group_tour(&[0, 1, 2], &inst).unwrap().cost, 0.0);
        assert_eq!(exact_carp(&inst).unwrap().total_cost, 0.0);
    }

    #[test]
    fn capacity_one_optimum_is_twice_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inst = random_instance(&mut rng, 5, 1);
        let opt = exact_carp(&inst).unwrap();
        let all: Vec<usize> = (0..5).collect();
        assert!((opt.total_cost - 2.0 * delta(&all, &inst)).abs() < 1e-9);
    }

    #[test]
    fn large_capacity_optimum_at_most_rpp() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for m in 1..=6 {
            let inst = random_instance(&mut rng, m, 8);
            let opt = exact_carp(&inst).unwrap();
            assert!(opt.total_cost <= exact_rpp(&inst).unwrap().cost + 1e-9);
        }
    }

    #[test]
    fn three_customers_capacity_two_matches_set_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let inst = random_instance(&mut rng, 3, 2);
            let w = |g: &[usize]| enumerate_best_walk(&inst, g).0;
            // {012} is too large for k = 2.
            let partitions = [
                w(&[0]) + w(&[1]) + w(&[2]),
                w(&[0, 1]) + w(&[2]),
                w(&[0, 2]) + w(&[1]),
                w(&[1, 2]) + w(&[0]),
            ];
            let brute = partitions.iter().cloned().fold(f64::INFINITY, f64::min);
            let opt = exact_carp(&inst).unwrap();
            assert!((opt.total_cost - brute).abs() < 1e-9);
            assert!(check_solution(&opt, &inst).is_feasible());
        }
    }

    #[test]
    fn caps_are_enforced() {
        let inst = MetricInstance::new(DistanceMatrix::zeros(19), 2).unwrap();
        assert!(matches!(exact_carp(&inst), Err(CarpError::SizeCap { .. })));
        let big = MetricInstance::new(DistanceMatrix::zeros(23), 2).unwrap();
        let all: Vec<usize> = (0..11).collect();
        assert!(matches!(
            optimal_group_tour(&all, &big),
            Err(CarpError::SizeCap { .. })
        ));
    }

    #[test]
    fn empty_group_is_rejected() {
        let inst = MetricInstance::new(DistanceMatrix::zeros(3), 1).unwrap();
        assert!(optimal_group_tour(&[], &inst).is_err());
    }
}
