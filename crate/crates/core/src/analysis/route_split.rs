//! Per-route parameters splitting a route's cost into mirrored connector
//! pairs (`alphas`) and customer pairs (`betas`), and the four inequalities
//! they satisfy.

use super::{delta, Check};
use crate::graphkit::constrained_mst;
use crate::model::{vertex_walk, MetricInstance, Route, DEPOT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteSplit {
    /// Number of customers on the route.
    pub l: usize,
    pub t: usize,
    pub parity: Parity,
    pub alpha: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// The route costs nothing, so every claim is vacuous.
    pub degenerate: bool,
}

pub fn route_split(route: &Route, inst: &MetricInstance) -> RouteSplit {
    let l = route.len();
    // v_0, v_1, ..., v_{2l}; index 2l + 1 wraps back to the depot.
    let mut v = vertex_walk(&route.served);
    v.pop();
    let n = v.len();
    let c = |a: usize, b: usize| inst.dist(v[a % n], v[b % n]);
    let total = route.cost;
    let (parity, t) = if l % 2 == 1 {
        (Parity::Odd, l.div_ceil(2))
    } else {
        (Parity::Even, (l + 2) / 2)
    };
    let degenerate = total <= 0.0;
    let scale = if degenerate { 0.0 } else { 1.0 / total };
    let mut alphas = Vec::with_capacity(t);
    let mut betas = Vec::with_capacity(t);
    for i in 1..=t {
        let last = i == t;
        let alpha = if last && parity == Parity::Even {
            c(2 * i - 2, 2 * i - 1)
        } else {
            c(2 * i - 2, 2 * i - 1) + c(2 * l + 2 - 2 * i, (2 * l + 3 - 2 * i) % (2 * l + 1))
        };
        let beta = match (last, parity) {
            (true, Parity::Odd) => c(2 * i - 1, 2 * i),
            (true, Parity::Even) => 0.0,
            _ => c(2 * i - 1, 2 * i) + c(2 * l + 1 - 2 * i, 2 * l + 2 - 2 * i),
        };
        alphas.push(alpha * scale);
        betas.push(beta * scale);
    }
    RouteSplit {
        l,
        t,
        parity,
        alpha: alphas.iter().sum(),
        alphas,
        betas,
        degenerate,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteSplitReport {
    pub parity: Parity,
    pub degenerate: bool,
    pub checks: Vec<Check>,
}

impl RouteSplitReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Checks the four claims with absolute tolerance `1e-9 * c(T)`.
pub fn route_split_check(params: &RouteSplit, route: &Route, inst: &MetricInstance, k: usize) -> RouteSplitReport {
    let ct = route.cost;
    let tol = 1e-9 * ct;
    let mut checks = Vec::new();
    if !params.degenerate {
        let customers: Vec<usize> = route.customers().collect();
        let weighted: f64 = params
            .alphas
            .iter()
            .enumerate()
            .map(|(i, a)| (i + 1) as f64 * a)
            .sum();
        checks.push(Check::within(
            "route.delta",
            delta(&customers, inst),
            (k as f64 / 2.0 + params.alpha - weighted) * ct,
            tol,
        ));

        let mut vertices = vec![DEPOT];
        let mut required = Vec::with_capacity(customers.len());
        for &c in &customers {
            let (s, t) = inst.customer(c);
            vertices.extend([s, t]);
            required.push((s, t));
        }
        let mst = constrained_mst(&vertices, &required, |a, b| inst.dist(a, b))
            .expect("route customers are vertex-disjoint")
            .cost;
        let max_alpha = params.alphas.iter().cloned().fold(0.0, f64::max);
        checks.push(Check::within("route.tree", mst, (1.0 - max_alpha / 2.0) * ct, tol));

        let customer_cost: f64 = customers.iter().map(|&c| inst.customer_cost(c)).sum();
        let expected = (1.0 - params.alpha) * ct;
        checks.push(Check::within("route.customers", customer_cost, expected, tol));
        checks.push(Check::within("route.customers_rev", expected, customer_cost, tol));

        let in_range = params
            .alphas
            .iter()
            .all(|&a| a >= -1e-12 && a <= params.alpha + 1e-12);
        checks.push(Check::within("route.alpha_sum", params.alpha, 1.0, 1e-9));
        checks.push(Check {
            name: "route.alpha_range".into(),
            lhs: params.alphas.iter().cloned().fold(0.0, f64::max),
            rhs: params.alpha,
            holds: in_range,
            advisory: false,
        });
    }
    RouteSplitReport {
        parity: params.parity,
        degenerate: params.degenerate,
        checks,
    }
}
