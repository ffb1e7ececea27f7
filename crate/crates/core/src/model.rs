//! Instance, tour and solution types shared by every solver.
//!
//! A [`MetricInstance`] always uses the same vertex layout: vertex `0` is the
//! depot and customer `i` (0-based) owns the endpoints `2i + 1` and `2i + 2`.
//! Customers are therefore vertex-disjoint by construction.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{CarpError, Result};

/// Relative tolerance used for every floating-point comparison in the crate.
pub const REL_TOL: f64 = 1e-9;

/// `lhs <= rhs` up to `REL_TOL` relative to the magnitude of both sides.
pub fn approx_le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + REL_TOL * lhs.abs().max(rhs.abs()).max(1.0)
}

pub fn approx_eq(lhs: f64, rhs: f64) -> bool {
    approx_le(lhs, rhs) && approx_le(rhs, lhs)
}

pub const DEPOT: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawEdge {
    pub u: usize,
    pub v: usize,
    pub cost: f64,
    pub demand: u8,
}

impl RawEdge {
    pub fn new(u: usize, v: usize, cost: f64, demand: u8) -> Self {
        RawEdge { u, v, cost, demand }
    }

    pub fn is_customer(&self) -> bool {
        self.demand == 1
    }
}

/// User-supplied graph: arbitrary connectivity, possibly non-metric costs.
#[derive(Debug, Clone, PartialEq)]
pub struct RawInstance {
    pub vertex_count: usize,
    pub edges: Vec<RawEdge>,
    pub depot: usize,
    pub capacity: usize,
}

impl RawInstance {
    /// Validates the instance. Demand-0 self-loops are dropped; demand-1
    /// self-loops are rejected (no serving direction).
    /// Reachability of customers is checked later by the metric closure.
    pub fn new(
        vertex_count: usize,
        edges: Vec<RawEdge>,
        depot: usize,
        capacity: usize,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(CarpError::input("vertex count must be positive"));
        }
        if depot >= vertex_count {
            return Err(CarpError::input(format!(
                "depot {depot} out of range [0, {vertex_count})"
            )));
        }
        if capacity == 0 {
            return Err(CarpError::input("capacity must be at least 1"));
        }
        let mut kept = Vec::with_capacity(edges.len());
        for (idx, e) in edges.into_iter().enumerate() {
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(CarpError::input(format!(
                    "edge {idx}: vertex id out of range [0, {vertex_count})"
                )));
            }
            if !(e.cost.is_finite() && e.cost >= 0.0) {
                return Err(CarpError::input(format!(
                    "edge {idx}: cost must be a finite nonnegative number"
                )));
            }
            if e.demand > 1 {
                return Err(CarpError::input(format!(
                    "edge {idx}: demand must be 0 or 1 (equal-demand scope)"
                )));
            }
            if e.u == e.v {
                if e.is_customer() {
                    return Err(CarpError::input(format!(
                        "edge {idx}: self-loop at vertex {} cannot carry demand",
                        e.u
                    )));
                }
                continue;
            }
            kept.push(e);
        }
        Ok(RawInstance {
            vertex_count,
            edges: kept,
            depot,
            capacity,
        })
    }

    /// Indices into `edges` of the demand-1 edges, in input order.
    pub fn customer_edges(&self) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_customer())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn customer_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_customer()).count()
    }
}

/// Dense symmetric distance table.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                data[a * n + b] = f(a, b);
            }
        }
        DistanceMatrix { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        DistanceMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.n + b]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, value: f64) {
        self.data[a * self.n + b] = value;
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// First violated metric axiom, if any.
    pub fn metric_violation(&self) -> Option<String> {
        let tol = REL_TOL * self.max_entry().max(1.0);
        for a in 0..self.n {
            if self.get(a, a) != 0.0 {
                return Some(format!("dist({a},{a}) = {} != 0", self.get(a, a)));
            }
            for b in 0..self.n {
                let d = self.get(a, b);
                if !(d.is_finite() && d >= 0.0) {
                    return Some(format!("dist({a},{b}) = {d} is not a nonnegative number"));
                }
                if d != self.get(b, a) {
                    return Some(format!("dist({a},{b}) != dist({b},{a})"));
                }
            }
        }
        for a in 0..self.n {
            for b in 0..self.n {
                for h in 0..self.n {
                    if self.get(a, h) > self.get(a, b) + self.get(b, h) + tol {
                        return Some(format!(
                            "triangle inequality fails for ({a},{b},{h})"
                        ));
                    }
                }
            }
        }
        None
    }
}

pub type Point = (f64, f64);

/// Normalized metric form: depot plus `m` vertex-disjoint unit-demand customers.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricInstance {
    dist: DistanceMatrix,
    capacity: usize,
}

impl MetricInstance {
    /// `dist` must be a metric over `2m + 1` vertices laid out as described
    /// in the module documentation.
    pub fn new(dist: DistanceMatrix, capacity: usize) -> Result<Self> {
        if dist.len().is_multiple_of(2) {
            return Err(CarpError::input(format!(
                "metric instance needs 2m + 1 vertices, got {}",
                dist.len()
            )));
        }
        if capacity == 0 {
            return Err(CarpError::input("capacity must be at least 1"));
        }
        if let Some(why) = dist.metric_violation() {
            return Err(CarpError::input(format!("distance table is not a metric: {why}")));
        }
        Ok(MetricInstance { dist, capacity })
    }

    /// Euclidean instance from a depot location and customer segments.
    pub fn from_points(
        depot: Point,
        customers: &[(Point, Point)],
        capacity: usize,
    ) -> Result<Self> {
        let mut pts = Vec::with_capacity(2 * customers.len() + 1);
        pts.push(depot);
        for &(s, t) in customers {
            pts.push(s);
            pts.push(t);
        }
        let dist = DistanceMatrix::from_fn(pts.len(), |a, b| {
            let (dx, dy) = (pts[a].0 - pts[b].0, pts[a].1 - pts[b].1);
            (dx * dx + dy * dy).sqrt()
        });
        Self::new(dist, capacity)
    }

    pub fn with_capacity(&self, capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(CarpError::input("capacity must be at least 1"));
        }
        Ok(MetricInstance {
            dist: self.dist.clone(),
            capacity,
        })
    }

    pub fn customer_count(&self) -> usize {
        self.dist.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.dist.len()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        self.dist.get(a, b)
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }

    /// Endpoint ids `(s_i, t_i)` of customer `i`.
    #[inline]
    pub fn customer(&self, i: usize) -> (usize, usize) {
        (2 * i + 1, 2 * i + 2)
    }

    pub fn customers(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.customer_count()).map(|i| self.customer(i))
    }

    /// Customer owning a non-depot vertex.
    #[inline]
    pub fn owner(&self, vertex: usize) -> Option<usize> {
        if vertex == DEPOT || vertex >= self.vertex_count() {
            None
        } else {
            Some((vertex - 1) / 2)
        }
    }

    pub fn customer_cost(&self, i: usize) -> f64 {
        let (s, t) = self.customer(i);
        self.dist(s, t)
    }

    /// c(E*): total cost of all customer edges.
    pub fn total_customer_cost(&self) -> f64 {
        (0..self.customer_count()).map(|i| self.customer_cost(i)).sum()
    }

    fn check_customer(&self, i: usize) -> Result<()> {
        if i < self.customer_count() {
            Ok(())
        } else {
            Err(CarpError::input(format!(
                "customer index {i} out of range [0, {})",
                self.customer_count()
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    /// Traverse `s -> t`.
    Forward,
    /// Traverse `t -> s`.
    Reversed,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Reversed,
            Orientation::Reversed => Orientation::Forward,
        }
    }
}

/// A customer together with the direction it is traversed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Served {
    pub customer: usize,
    pub orientation: Orientation,
}

impl Served {
    pub fn new(customer: usize, orientation: Orientation) -> Self {
        Served {
            customer,
            orientation,
        }
    }

    pub fn forward(customer: usize) -> Self {
        Served::new(customer, Orientation::Forward)
    }

    /// Vertex where service starts.
    #[inline]
    pub fn entry(&self) -> usize {
        match self.orientation {
            Orientation::Forward => 2 * self.customer + 1,
            Orientation::Reversed => 2 * self.customer + 2,
        }
    }

    /// Vertex where service ends.
    #[inline]
    pub fn exit(&self) -> usize {
        match self.orientation {
            Orientation::Forward => 2 * self.customer + 2,
            Orientation::Reversed => 2 * self.customer + 1,
        }
    }

    pub fn flipped(&self) -> Self {
        Served::new(self.customer, self.orientation.flipped())
    }
}

/// Cost of the closed walk `v0, entry(x1), exit(x1), ..., exit(xl), v0`.
/// The empty sequence is the trivial walk of cost zero.
pub fn walk_cost(inst: &MetricInstance, served: &[Served]) -> f64 {
    let mut cost = 0.0;
    let mut at = DEPOT;
    for s in served {
        cost += inst.dist(at, s.entry()) + inst.dist(s.entry(), s.exit());
        at = s.exit();
    }
    cost + inst.dist(at, DEPOT)
}

/// Vertex sequence of the closed walk, depot at both ends.
pub fn vertex_walk(served: &[Served]) -> Vec<usize> {
    let mut walk = Vec::with_capacity(2 * served.len() + 2);
    walk.push(DEPOT);
    for s in served {
        walk.push(s.entry());
        walk.push(s.exit());
    }
    walk.push(DEPOT);
    walk
}

/// Reverse a closed walk: reversed order with every orientation flipped.
pub fn reverse_walk(served: &[Served]) -> Vec<Served> {
    served.iter().rev().map(Served::flipped).collect()
}

/// A closed walk from the depot serving every customer exactly once.
#[derive(Debug, Clone, PartialEq)]
pub struct RppTour {
    pub order: Vec<Served>,
    pub cost: f64,
}

impl RppTour {
    pub fn new(inst: &MetricInstance, order: Vec<Served>) -> Result<Self> {
        let m = inst.customer_count();
        if order.len() != m {
            return Err(CarpError::input(format!(
                "RPP tour serves {} customers, instance has {m}",
                order.len()
            )));
        }
        let mut seen = vec![false; m];
        for s in &order {
            inst.check_customer(s.customer)?;
            if std::mem::replace(&mut seen[s.customer], true) {
                return Err(CarpError::input(format!(
                    "customer {} served twice in RPP tour",
                    s.customer
                )));
            }
        }
        let cost = walk_cost(inst, &order);
        Ok(RppTour { order, cost })
    }

    /// Same tour traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        RppTour {
            order: reverse_walk(&self.order),
            cost: self.cost,
        }
    }

    pub fn vertex_walk(&self) -> Vec<usize> {
        vertex_walk(&self.order)
    }
}

/// One vehicle route.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub served: Vec<Served>,
    pub cost: f64,
}

impl Route {
    pub fn new(inst: &MetricInstance, served: Vec<Served>) -> Result<Self> {
        let cost = route_cost(&served, inst)?;
        Ok(Route { served, cost })
    }

    pub fn len(&self) -> usize {
        self.served.len()
    }

    pub fn is_empty(&self) -> bool {
        self.served.is_empty()
    }

    pub fn customers(&self) -> impl Iterator<Item = usize> + '_ {
        self.served.iter().map(|s| s.customer)
    }
}

/// Closed-walk cost of a route. Routes must serve at least one customer.
pub fn route_cost(served: &[Served], inst: &MetricInstance) -> Result<f64> {
    if served.is_empty() {
        return Err(CarpError::input("a route must serve at least one customer"));
    }
    for s in served {
        inst.check_customer(s.customer)?;
    }
    Ok(walk_cost(inst, served))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub total_cost: f64,
}

impl Solution {
    pub fn new(routes: Vec<Route>) -> Self {
        let total_cost = routes.iter().map(|r| r.cost).sum();
        Solution { routes, total_cost }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Uncovered(BTreeSet<usize>),
    ServedMoreThanOnce { customer: usize, times: usize },
    InvalidCustomer { route: usize, customer: usize },
    EmptyRoute { route: usize },
    CapacityExceeded { route: usize, served: usize, capacity: usize },
    RouteCostMismatch { route: usize, stored: f64, recomputed: f64 },
    TotalCostMismatch { stored: f64, recomputed: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Uncovered(set) => {
                let ids: Vec<String> = set.iter().map(|c| c.to_string()).collect();
                write!(f, "uncovered: {{{}}}", ids.join(", "))
            }
            Violation::ServedMoreThanOnce { customer, times } => {
                write!(f, "customer {customer} served {times} times")
            }
            Violation::InvalidCustomer { route, customer } => {
                write!(f, "route {route}: invalid customer index {customer}")
            }
            Violation::EmptyRoute { route } => write!(f, "route {route}: serves no customer"),
            Violation::CapacityExceeded {
                route,
                served,
                capacity,
            } => write!(
                f,
                "route {route}: capacity violation ({served} customers > k = {capacity})"
            ),
            Violation::RouteCostMismatch {
                route,
                stored,
                recomputed,
            } => write!(
                f,
                "route {route}: stored cost {stored} != recomputed {recomputed}"
            ),
            Violation::TotalCostMismatch { stored, recomputed } => {
                write!(f, "total cost {stored} != sum of route costs {recomputed}")
            }
        }
    }
}

/// Violations found by [`check_solution`]; empty iff the solution is feasible.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "feasible");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn check_solution(sol: &Solution, inst: &MetricInstance) -> FeasibilityReport {
    let m = inst.customer_count();
    let k = inst.capacity();
    let mut violations = Vec::new();
    let mut times = vec![0usize; m];
    let mut recomputed_total = 0.0;

    for (r, route) in sol.routes.iter().enumerate() {
        if route.served.is_empty() {
            violations.push(Violation::EmptyRoute { route: r });
        }
        if route.served.len() > k {
            violations.push(Violation::CapacityExceeded {
                route: r,
                served: route.served.len(),
                capacity: k,
            });
        }
        let mut valid = true;
        for s in &route.served {
            if s.customer < m {
                times[s.customer] += 1;
            } else {
                valid = false;
                violations.push(Violation::InvalidCustomer {
                    route: r,
                    customer: s.customer,
                });
            }
        }
        if valid {
            let recomputed = walk_cost(inst, &route.served);
            recomputed_total += recomputed;
            if !approx_eq(route.cost, recomputed) {
                violations.push(Violation::RouteCostMismatch {
                    route: r,
                    stored: route.cost,
                    recomputed,
                });
            }
        }
    }

    let uncovered: BTreeSet<usize> = (0..m).filter(|&c| times[c] == 0).collect();
    if !uncovered.is_empty() {
        violations.push(Violation::Uncovered(uncovered));
    }
    for (customer, &t) in times.iter().enumerate() {
        if t > 1 {
            violations.push(Violation::ServedMoreThanOnce { customer, times: t });
        }
    }
    let stored_sum: f64 = sol.routes.iter().map(|r| r.cost).sum();
    if !approx_eq(sol.total_cost, stored_sum) || !approx_eq(sol.total_cost, recomputed_total) {
        violations.push(Violation::TotalCostMismatch {
            stored: sol.total_cost,
            recomputed: recomputed_total,
        });
    }
    FeasibilityReport { violations }
}
