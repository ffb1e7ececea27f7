//! Lower bounds, per-route parameter checks, the approximation ratio, and a
//! per-instance audit of every inequality the analysis relies on.

mod bounds;
mod route_split;
mod ratio;

pub use bounds::{bound_suite, AnalysisReport, RppChoice};
pub use route_split::{route_split_check, route_split, RouteSplitReport, RouteSplit, Parity};
pub use ratio::{
    crossing_alpha, eta, eta_at_crossings, l_tilde, ratio_closed_form, ratio_grid_search, tau,
    RatioPoint,
};

use crate::model::{approx_le, MetricInstance, DEPOT};
use crate::rpp::{exact_rpp, EXACT_RPP_CAP};

/// Half the summed depot triangles of the given customers.
pub fn delta(group: &[usize], inst: &MetricInstance) -> f64 {
    group
        .iter()
        .map(|&c| {
            let (s, t) = inst.customer(c);
            (inst.dist(DEPOT, s) + inst.dist(s, t) + inst.dist(t, DEPOT)) / 2.0
        })
        .sum()
}

/// One evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Reported but not counted as a violation.
    pub advisory: bool,
}

impl Check {
    pub fn advisory(mut self) -> Self {
        self.advisory = true;
        self
    }

    /// Relative tolerance.
    pub fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        Check {
            name: name.into(),
            lhs,
            rhs,
            holds: approx_le(lhs, rhs),
            advisory: false,
        }
    }

    /// Absolute tolerance `tol`.
    pub fn within(name: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            lhs,
            rhs,
            holds: lhs <= rhs + tol,
            advisory: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBounds {
    /// `2 delta / k`.
    pub lb_delta: f64,
    /// Optimal RPP tour cost, when the instance is small enough.
    pub lb_rpp: Option<f64>,
}

pub fn lower_bounds(inst: &MetricInstance) -> LowerBounds {
    let m = inst.customer_count();
    let all: Vec<usize> = (0..m).collect();
    let lb_delta = 2.0 * delta(&all, inst) / inst.capacity() as f64;
    let lb_rpp = if m <= EXACT_RPP_CAP {
        exact_rpp(inst).ok().map(|t| t.cost)
    } else {
        None
    };
    LowerBounds { lb_delta, lb_rpp }
}
