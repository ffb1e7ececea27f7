//! The two RPP tours fed to tour partitioning, plus an exact RPP solver.
//!
//! * `H1`: spanning tree forced through all customer edges, a matching on its
//!   odd-degree vertices, Euler tour, shortcut.
//! * `H2`: matching on all customer endpoints, customer edges, the cheapest
//!   connectors between the resulting components taken twice, Euler tour,
//!   shortcut.

use crate::error::{CarpError, Result};
use crate::exact::GroupTourTable;
use crate::graphkit::{
    components, connect_components, constrained_mst, euler_tour, shortcut_to_rpp, EulerWalk,
    MultiEdgeSet, SpanningTree,
};
use crate::matching::{min_cost_perfect_matching, Matching};
use crate::model::{MetricInstance, Orientation, RppTour, Served, DEPOT};

/// Spanning tree over the depot and all endpoints containing every customer edge.
pub fn customer_spanning_tree(inst: &MetricInstance) -> SpanningTree {
    let vertices: Vec<usize> = (0..inst.vertex_count()).collect();
    let required: Vec<(usize, usize)> = inst.customers().collect();
    constrained_mst(&vertices, &required, |a, b| inst.dist(a, b))
        .expect("vertex-disjoint customer edges never form a cycle")
}

#[derive(Debug, Clone)]
pub struct H1Construction {
    pub tree: SpanningTree,
    /// Matching on the odd-degree vertices of the tree.
    pub odd_matching: Matching,
    pub graph: MultiEdgeSet,
    pub walk: EulerWalk,
    /// Cost of the Euler tour before shortcutting.
    pub walk_cost: f64,
    pub tour: RppTour,
}

#[derive(Debug, Clone)]
pub struct H2Construction {
    /// Matching on all customer endpoints.
    pub matching: Matching,
    /// Connectors joining the components of matching ∪ customers ∪ depot.
    pub connectors: Vec<(usize, usize)>,
    pub connector_cost: f64,
    pub graph: MultiEdgeSet,
    pub walk: EulerWalk,
    pub walk_cost: f64,
    pub tour: RppTour,
}

/// Reverse the tour if that puts the lower customer index first.
fn canonical_direction(tour: RppTour) -> RppTour {
    match (tour.order.first(), tour.order.last()) {
        (Some(first), Some(last)) if last.customer < first.customer => tour.reversed(),
        _ => tour,
    }
}

fn empty_tour(inst: &MetricInstance) -> RppTour {
    RppTour::new(inst, Vec::new()).expect("empty tour on an empty instance")
}

pub fn construct_h1(inst: &MetricInstance) -> Result<H1Construction> {
    let tree = customer_spanning_tree(inst);
    if inst.customer_count() == 0 {
        return Ok(H1Construction {
            tree,
            odd_matching: Matching::empty(),
            graph: MultiEdgeSet::new(),
            walk: EulerWalk::trivial(DEPOT),
            walk_cost: 0.0,
            tour: empty_tour(inst),
        });
    }
    let mut degree = vec![0usize; inst.vertex_count()];
    for &(a, b) in &tree.edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let odd: Vec<usize> = (0..inst.vertex_count()).filter(|&v| degree[v] % 2 == 1).collect();
    let odd_matching = min_cost_perfect_matching(&odd, |a, b| inst.dist(a, b))?;

    let mut graph = MultiEdgeSet::new();
    for &(a, b) in &tree.edges {
        let customer = inst.owner(a).is_some() && inst.owner(a) == inst.owner(b);
        graph.push(a, b, customer);
    }
    graph.extend_plain(&odd_matching.pairs);
    let walk = euler_tour(&graph, DEPOT)?;
    let walk_cost = walk.cost(|a, b| inst.dist(a, b));
    let tour = canonical_direction(shortcut_to_rpp(&walk.vertices, inst)?);
    Ok(H1Construction {
        tree,
        odd_matching,
        graph,
        walk,
        walk_cost,
        tour,
    })
}

pub fn construct_h2(inst: &MetricInstance) -> Result<H2Construction> {
    let m = inst.customer_count();
    if m == 0 {
        return Ok(H2Construction {
            matching: Matching::empty(),
            connectors: Vec::new(),
            connector_cost: 0.0,
            graph: MultiEdgeSet::new(),
            walk: EulerWalk::trivial(DEPOT),
            walk_cost: 0.0,
            tour: empty_tour(inst),
        });
    }
    let endpoints: Vec<usize> = (1..inst.vertex_count()).collect();
    let matching = min_cost_perfect_matching(&endpoints, |a, b| inst.dist(a, b))?;

    let mut graph = MultiEdgeSet::new();
    graph.extend_plain(&matching.pairs);
    for (s, t) in inst.customers() {
        graph.push(s, t, true);
    }
    let all: Vec<usize> = (0..inst.vertex_count()).collect();
    let parts = components(&all, &graph);
    let connectors = connect_components(&parts, |a, b| inst.dist(a, b));
    let connector_cost = connectors.iter().map(|&(a, b)| inst.dist(a, b)).sum();
    graph.extend_plain(&connectors);
    graph.extend_plain(&connectors);

    let walk = euler_tour(&graph, DEPOT)?;
    let walk_cost = walk.cost(|a, b| inst.dist(a, b));
    let tour = canonical_direction(shortcut_to_rpp(&walk.vertices, inst)?);
    Ok(H2Construction {
        matching,
        connectors,
        connector_cost,
        graph,
        walk,
        walk_cost,
        tour,
    })
}

pub fn build_h1(inst: &MetricInstance) -> Result<RppTour> {
    construct_h1(inst).map(|c| c.tour)
}

pub fn build_h2(inst: &MetricInstance) -> Result<RppTour> {
    construct_h2(inst).map(|c| c.tour)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RppSelect {
    H1,
    H2,
    /// The cheaper of the two; ties go to `H1`.
    Best,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RppChoice {
    H1,
    H2,
}

/// Which tour `select` picks given the two constructed tours.
pub fn choose(select: RppSelect, h1: &RppTour, h2: &RppTour) -> RppChoice {
    match select {
        RppSelect::H1 => RppChoice::H1,
        RppSelect::H2 => RppChoice::H2,
        RppSelect::Best if h2.cost < h1.cost => RppChoice::H2,
        RppSelect::Best => RppChoice::H1,
    }
}

pub const EXACT_RPP_CAP: usize = 10;

/// Optimal RPP tour by dynamic programming over customer subsets.
pub fn exact_rpp(inst: &MetricInstance) -> Result<RppTour> {
    let m = inst.customer_count();
    if m > EXACT_RPP_CAP {
        return Err(CarpError::SizeCap {
            what: "exact RPP customer count",
            got: m,
            cap: EXACT_RPP_CAP,
        });
    }
    if m == 0 {
        return Ok(empty_tour(inst));
    }
    let table = GroupTourTable::new(inst, &(0..m).collect::<Vec<_>>())?;
    RppTour::new(inst, table.order((1 << m) - 1)).map(canonical_direction)
}

/// Every order and orientation of `group`; verification only.
pub fn enumerate_best_walk(inst: &MetricInstance, group: &[usize]) -> (f64, Vec<Served>) {
    fn permute(
        inst: &MetricInstance,
        rest: &mut Vec<usize>,
        prefix: &mut Vec<Served>,
        best: &mut (f64, Vec<Served>),
    ) {
        if rest.is_empty() {
            let c = crate::model::walk_cost(inst, prefix);
            if c < best.0 {
                *best = (c, prefix.clone());
            }
            return;
        }
        for i in 0..rest.len() {
            let c = rest.remove(i);
            for o in [Orientation::Forward, Orientation::Reversed] {
                prefix.push(Served::new(c, o));
                permute(inst, rest, prefix, best);
                prefix.pop();
            }
            rest.insert(i, c);
        }
    }
    let mut best = (f64::INFINITY, Vec::new());
    permute(inst, &mut group.to_vec(), &mut Vec::new(), &mut best);
    best
}
