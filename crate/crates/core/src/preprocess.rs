//! Raw graph to normalized metric form, and the way back.
//!
//! Every customer endpoint gets its own metric vertex, so customers that share
//! a raw vertex become copies at distance zero from each other. Vertices that
//! carry no customer survive only inside the shortest-path table.

use std::collections::HashMap;

use crate::error::{CarpError, Result};
use crate::model::{DistanceMatrix, MetricInstance, RawInstance, Solution, DEPOT};

/// All-pairs shortest paths over the raw graph.
#[derive(Debug, Clone)]
pub struct MetricClosure {
    dist: DistanceMatrix,
    hops: Vec<usize>,
    /// Cheapest parallel edge between adjacent raw vertices.
    adjacent: Vec<Vec<(usize, f64)>>,
}

const UNREACHABLE: usize = usize::MAX;

impl MetricClosure {
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        self.dist.get(a, b)
    }

    pub fn is_reachable(&self, a: usize, b: usize) -> bool {
        self.hops[a * self.n() + b] != UNREACHABLE
    }

    pub fn n(&self) -> usize {
        self.dist.len()
    }

    fn edge_cost(&self, a: usize, b: usize) -> Option<f64> {
        self.adjacent[a]
            .iter()
            .find(|&&(x, _)| x == b)
            .map(|&(_, c)| c)
    }

    /// Shortest path from `a` to `b` with the fewest edges, choosing the
    /// smallest next vertex at every step.
    pub fn path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        if !self.is_reachable(a, b) {
            return None;
        }
        let n = self.n();
        let mut path = vec![a];
        let mut at = a;
        while at != b {
            let remaining = self.dist(at, b);
            let hops = self.hops[at * n + b];
            let tol = 1e-9 * remaining.max(1.0);
            let next = self.adjacent[at]
                .iter()
                .filter(|&&(x, w)| {
                    self.hops[x * n + b] < hops && (w + self.dist(x, b) - remaining).abs() <= tol
                })
                .map(|&(x, _)| x)
                .min()
                .expect("shortest-path table is inconsistent");
            path.push(next);
            at = next;
        }
        Some(path)
    }

    /// Cost of a raw vertex sequence using the cheapest edge between neighbours.
    pub fn path_cost(&self, path: &[usize]) -> f64 {
        path.windows(2)
            .map(|w| self.edge_cost(w[0], w[1]).expect("path uses a missing edge"))
            .sum()
    }
}

/// Cubic all-pairs closure; pairs compare by (cost, hop count).
///
/// Fails when a customer endpoint cannot be reached from the depot.
pub fn metric_closure(raw: &RawInstance) -> Result<MetricClosure> {
    let n = raw.vertex_count;
    let mut adjacent: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut dist = DistanceMatrix::from_fn(n, |a, b| if a == b { 0.0 } else { f64::INFINITY });
    let mut hops = vec![UNREACHABLE; n * n];
    for v in 0..n {
        hops[v * n + v] = 0;
    }
    for e in &raw.edges {
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            match adjacent[a].iter_mut().find(|(x, _)| *x == b) {
                Some(slot) => slot.1 = slot.1.min(e.cost),
                None => adjacent[a].push((b, e.cost)),
            }
            if (e.cost, 1) < (dist.get(a, b), hops[a * n + b]) {
                dist.set(a, b, e.cost);
                hops[a * n + b] = 1;
            }
        }
    }
    for list in &mut adjacent {
        list.sort_by_key(|&(x, _)| x);
    }
    for via in 0..n {
        for a in 0..n {
            if hops[a * n + via] == UNREACHABLE {
                continue;
            }
            for b in 0..n {
                if hops[via * n + b] == UNREACHABLE {
                    continue;
                }
                let cand = (
                    dist.get(a, via) + dist.get(via, b),
                    hops[a * n + via] + hops[via * n + b],
                );
                if cand < (dist.get(a, b), hops[a * n + b]) {
                    dist.set(a, b, cand.0);
                    hops[a * n + b] = cand.1;
                }
            }
        }
    }
    let closure = MetricClosure {
        dist,
        hops,
        adjacent,
    };
    for e in raw.edges.iter().filter(|e| e.is_customer()) {
        for v in [e.u, e.v] {
            if !closure.is_reachable(raw.depot, v) {
                return Err(CarpError::Infeasible(format!(
                    "customer endpoint {v} is unreachable from depot {}",
                    raw.depot
                )));
            }
        }
    }
    Ok(closure)
}

/// Everything needed to map a metric solution back onto the raw graph.
#[derive(Debug, Clone)]
pub struct LiftMap {
    /// Raw vertex behind each metric vertex (index 0 is the depot).
    pub endpoint_origin: Vec<usize>,
    /// Raw edge index behind each customer.
    pub customer_edge: Vec<usize>,
    /// Raw edge cost of each customer.
    pub customer_raw_cost: Vec<f64>,
    /// Canonical raw path between the origins of every pair of metric vertices.
    pub path_table: HashMap<(usize, usize), Vec<usize>>,
    /// Σ over customers of (raw edge cost - shortest path cost). Every solution
    /// pays exactly this much more on the raw graph than in the metric form;
    /// it is zero when every customer edge is a shortest path.
    pub service_surcharge: f64,
    closure: MetricClosure,
}

impl LiftMap {
    pub fn closure(&self) -> &MetricClosure {
        &self.closure
    }

    fn raw_path(&self, a: usize, b: usize) -> &[usize] {
        &self.path_table[&(self.endpoint_origin[a], self.endpoint_origin[b])]
    }
}

pub fn normalize(raw: &RawInstance) -> Result<(MetricInstance, LiftMap)> {
    let closure = metric_closure(raw)?;
    let customer_edge = raw.customer_edges();
    let mut endpoint_origin = Vec::with_capacity(2 * customer_edge.len() + 1);
    endpoint_origin.push(raw.depot);
    let mut customer_raw_cost = Vec::with_capacity(customer_edge.len());
    let mut service_surcharge = 0.0;
    for &e in &customer_edge {
        let edge = raw.edges[e];
        endpoint_origin.push(edge.u);
        endpoint_origin.push(edge.v);
        customer_raw_cost.push(edge.cost);
        service_surcharge += edge.cost - closure.dist(edge.u, edge.v);
    }
    let dist = DistanceMatrix::from_fn(endpoint_origin.len(), |a, b| {
        if a == b {
            0.0
        } else {
            closure.dist(endpoint_origin[a], endpoint_origin[b])
        }
    });
    let mut path_table = HashMap::new();
    for &a in &endpoint_origin {
        for &b in &endpoint_origin {
            path_table
                .entry((a, b))
                .or_insert_with(|| closure.path(a, b).expect("reachability checked above"));
        }
    }
    let inst = MetricInstance::new(dist, raw.capacity)?;
    Ok((
        inst,
        LiftMap {
            endpoint_origin,
            customer_edge,
            customer_raw_cost,
            path_table,
            service_surcharge,
            closure,
        },
    ))
}

/// A route expressed on the raw graph.
#[derive(Debug, Clone, PartialEq)]
pub struct RawWalk {
    /// Raw vertex sequence, starting and ending at the depot.
    pub vertices: Vec<usize>,
    /// Raw edge indices serviced on this walk, in service order.
    pub serviced: Vec<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedSolution {
    pub walks: Vec<RawWalk>,
    pub total_cost: f64,
}

/// Expand connectors into raw shortest paths and customers into raw edges.
pub fn lift_solution(sol: &Solution, lift: &LiftMap) -> LiftedSolution {
    let closure = &lift.closure;
    let mut walks = Vec::with_capacity(sol.routes.len());
    for route in &sol.routes {
        let mut vertices = vec![lift.endpoint_origin[DEPOT]];
        let mut serviced = Vec::with_capacity(route.served.len());
        let mut cost = 0.0;
        let mut at = DEPOT;
        for s in &route.served {
            let connector = lift.raw_path(at, s.entry());
            cost += closure.path_cost(connector);
            vertices.extend_from_slice(&connector[1..]);
            vertices.push(lift.endpoint_origin[s.exit()]);
            cost += lift.customer_raw_cost[s.customer];
            serviced.push(lift.customer_edge[s.customer]);
            at = s.exit();
        }
        let back = lift.raw_path(at, DEPOT);
        cost += closure.path_cost(back);
        vertices.extend_from_slice(&back[1..]);
        walks.push(RawWalk {
            vertices,
            serviced,
            cost,
        });
    }
    let total_cost = walks.iter().map(|w| w.cost).sum();
    LiftedSolution { walks, total_cost }
}
