//! Spanning structures, Euler tours and shortcutting over the metric.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{CarpError, Result};
use crate::model::{MetricInstance, Orientation, RppTour, Served, DEPOT};

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merge the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// One copy of an edge in a multigraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaggedEdge {
    pub a: usize,
    pub b: usize,
    pub customer: bool,
}

/// Edge multiset; a pair listed twice has multiplicity two.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MultiEdgeSet {
    edges: Vec<TaggedEdge>,
}

impl MultiEdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, a: usize, b: usize, customer: bool) {
        self.edges.push(TaggedEdge { a, b, customer });
    }

    /// Union with multiplicities.
    pub fn extend_plain(&mut self, pairs: &[(usize, usize)]) {
        for &(a, b) in pairs {
            self.push(a, b, false);
        }
    }

    pub fn edges(&self) -> &[TaggedEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn multiplicity(&self, a: usize, b: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| (e.a, e.b) == (a, b) || (e.a, e.b) == (b, a))
            .count()
    }

    pub fn degrees(&self) -> BTreeMap<usize, usize> {
        let mut deg = BTreeMap::new();
        for e in &self.edges {
            *deg.entry(e.a).or_insert(0) += 1;
            *deg.entry(e.b).or_insert(0) += 1;
        }
        deg
    }

    pub fn cost(&self, dist: impl Fn(usize, usize) -> f64) -> f64 {
        self.edges.iter().map(|e| dist(e.a, e.b)).sum()
    }

    /// Unordered pairs with multiplicity, for multiset comparisons.
    pub fn pair_counts(&self) -> BTreeMap<(usize, usize), usize> {
        let mut counts = BTreeMap::new();
        for e in &self.edges {
            *counts.entry((e.a.min(e.b), e.a.max(e.b))).or_insert(0) += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    /// Required edges followed by the added ones.
    pub edges: Vec<(usize, usize)>,
    /// The added edge set E'.
    pub added: Vec<(usize, usize)>,
    pub cost: f64,
    pub added_cost: f64,
}

/// Cheapest spanning tree over `vertices` that contains every `required` edge.
///
/// Kruskal with the union-find seeded by the required edges, which is the same
/// as running Kruskal on the graph with each required component contracted.
pub fn constrained_mst(
    vertices: &[usize],
    required: &[(usize, usize)],
    dist: impl Fn(usize, usize) -> f64,
) -> Result<SpanningTree> {
    let index: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    if index.len() != vertices.len() {
        return Err(CarpError::input("vertex set contains duplicates"));
    }
    let mut uf = UnionFind::new(vertices.len());
    let mut required_cost = 0.0;
    for &(a, b) in required {
        let (Some(&ia), Some(&ib)) = (index.get(&a), index.get(&b)) else {
            return Err(CarpError::input(format!(
                "required edge ({a},{b}) leaves the vertex set"
            )));
        };
        if !uf.union(ia, ib) {
            return Err(CarpError::precondition(format!(
                "required edges contain a cycle through ({a},{b})"
            )));
        }
        required_cost += dist(a, b);
    }
    let mut candidates = Vec::new();
    for (i, &a) in vertices.iter().enumerate() {
        for &b in &vertices[i + 1..] {
            let (a, b) = (a.min(b), a.max(b));
            candidates.push((dist(a, b), a, b));
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut added = Vec::new();
    let mut added_cost = 0.0;
    for (d, a, b) in candidates {
        if added.len() + required.len() + 1 >= vertices.len() {
            break;
        }
        if uf.union(index[&a], index[&b]) {
            added.push((a, b));
            added_cost += d;
        }
    }
    let mut edges = required.to_vec();
    edges.extend_from_slice(&added);
    Ok(SpanningTree {
        edges,
        added,
        cost: required_cost + added_cost,
        added_cost,
    })
}

/// Cheapest edge set joining the given components into one.
///
/// Each component pair contributes a single candidate (its cheapest vertex
/// pair, ties to the smallest ids); Kruskal runs over those candidates.
pub fn connect_components(
    components: &[Vec<usize>],
    dist: impl Fn(usize, usize) -> f64,
) -> Vec<(usize, usize)> {
    let mut candidates = Vec::new();
    for i in 0..components.len() {
        for j in i + 1..components.len() {
            let mut best: Option<(f64, usize, usize)> = None;
            for &a in &components[i] {
                for &b in &components[j] {
                    let (x, y) = (a.min(b), a.max(b));
                    let cand = (dist(x, y), x, y);
                    let better = match best {
                        None => true,
                        Some(cur) => cand
                            .0
                            .total_cmp(&cur.0)
                            .then((cand.1, cand.2).cmp(&(cur.1, cur.2)))
                            .is_lt(),
                    };
                    if better {
                        best = Some(cand);
                    }
                }
            }
            if let Some((d, a, b)) = best {
                candidates.push((d, a, b, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut uf = UnionFind::new(components.len());
    let mut connectors = Vec::new();
    for (_, a, b, i, j) in candidates {
        if uf.union(i, j) {
            connectors.push((a, b));
        }
    }
    connectors
}

/// Connected components of a multigraph over an explicit vertex list.
pub fn components(vertices: &[usize], graph: &MultiEdgeSet) -> Vec<Vec<usize>> {
    let index: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(vertices.len());
    for e in graph.edges() {
        uf.union(index[&e.a], index[&e.b]);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &v) in vertices.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// A closed walk through a multigraph.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerWalk {
    /// Vertex sequence, first equal to last.
    pub vertices: Vec<usize>,
    /// Index into the source edge list of each step.
    pub edge_ids: Vec<usize>,
}

impl EulerWalk {
    /// The walk that stays at `start`.
    pub fn trivial(start: usize) -> Self {
        EulerWalk {
            vertices: vec![start],
            edge_ids: Vec::new(),
        }
    }

    pub fn cost(&self, dist: impl Fn(usize, usize) -> f64) -> f64 {
        self.vertices.windows(2).map(|w| dist(w[0], w[1])).sum()
    }
}

/// Hierholzer's algorithm. At each vertex the unused edge with the smallest
/// (neighbour, edge index) is taken first.
pub fn euler_tour(graph: &MultiEdgeSet, start: usize) -> Result<EulerWalk> {
    for (v, d) in graph.degrees() {
        if d % 2 == 1 {
            return Err(CarpError::precondition(format!(
                "vertex {v} has odd degree {d}"
            )));
        }
    }
    let mut adjacency: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (id, e) in graph.edges().iter().enumerate() {
        adjacency.entry(e.a).or_default().push((e.b, id));
        adjacency.entry(e.b).or_default().push((e.a, id));
    }
    for list in adjacency.values_mut() {
        list.sort_unstable();
    }
    let mut cursor: BTreeMap<usize, usize> = adjacency.keys().map(|&v| (v, 0)).collect();
    let mut used = vec![false; graph.len()];
    let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
    let mut circuit: Vec<(usize, Option<usize>)> = Vec::with_capacity(graph.len() + 1);
    while let Some(&(v, _)) = stack.last() {
        let next = adjacency.get(&v).and_then(|list| {
            let c = cursor.get_mut(&v).unwrap();
            while *c < list.len() && used[list[*c].1] {
                *c += 1;
            }
            list.get(*c).copied()
        });
        match next {
            Some((w, id)) => {
                used[id] = true;
                stack.push((w, Some(id)));
            }
            None => circuit.push(stack.pop().unwrap()),
        }
    }
    if let Some(id) = used.iter().position(|u| !u) {
        let e = graph.edges()[id];
        return Err(CarpError::precondition(format!(
            "edge ({},{}) is not connected to start vertex {start}",
            e.a, e.b
        )));
    }
    circuit.reverse();
    let vertices = circuit.iter().map(|&(v, _)| v).collect();
    let edge_ids = circuit.iter().filter_map(|&(_, id)| id).collect();
    Ok(EulerWalk { vertices, edge_ids })
}

/// Keep the first traversal of every customer edge, in walk order, and join
/// consecutive served customers directly.
pub fn shortcut_to_rpp(walk: &[usize], inst: &MetricInstance) -> Result<RppTour> {
    if walk.first() != Some(&DEPOT) || walk.last() != Some(&DEPOT) {
        return Err(CarpError::precondition("walk must start and end at the depot"));
    }
    let m = inst.customer_count();
    let mut seen = vec![false; m];
    let mut order = Vec::with_capacity(m);
    for step in walk.windows(2) {
        let (a, b) = (step[0], step[1]);
        let (Some(ca), Some(cb)) = (inst.owner(a), inst.owner(b)) else {
            continue;
        };
        if ca != cb || a == b || seen[ca] {
            continue;
        }
        seen[ca] = true;
        let orientation = if a == inst.customer(ca).0 {
            Orientation::Forward
        } else {
            Orientation::Reversed
        };
        order.push(Served::new(ca, orientation));
    }
    let missing: BTreeSet<usize> = (0..m).filter(|&c| !seen[c]).collect();
    if !missing.is_empty() {
        return Err(CarpError::precondition(format!(
            "walk never traverses customers {missing:?}"
        )));
    }
    RppTour::new(inst, order)
}
