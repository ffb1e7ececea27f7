//! Cutting an RPP tour into capacity-feasible routes.
//!
//! Both partitioners keep the tour's customer order and orientations; each
//! fragment is closed through the depot.

use crate::analysis::delta;
use crate::error::{CarpError, Result};
use crate::model::{approx_le, MetricInstance, Route, RppTour, Served, Solution, DEPOT};
use crate::rpp::{choose, construct_h1, construct_h2, H1Construction, H2Construction, RppChoice, RppSelect};

fn check_capacity(k: usize) -> Result<()> {
    if k == 0 {
        return Err(CarpError::precondition("capacity must be at least 1"));
    }
    Ok(())
}

fn solution_from_cuts(inst: &MetricInstance, order: &[Served], cuts: &[usize]) -> Solution {
    let mut routes = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0;
    for &end in cuts.iter().chain(std::iter::once(&order.len())) {
        if end > start {
            routes.push(Route::new(inst, order[start..end].to_vec()).expect("valid fragment"));
        }
        start = end;
    }
    Solution::new(routes)
}

/// Candidate `i` (1-based): first route `x_1..x_i`, then blocks of `k`.
pub fn jitp_candidate(inst: &MetricInstance, tour: &RppTour, k: usize, i: usize) -> Result<Solution> {
    check_capacity(k)?;
    if i == 0 || i > k {
        return Err(CarpError::precondition(format!("candidate index {i} outside 1..={k}")));
    }
    let m = tour.order.len();
    let cuts: Vec<usize> = (0..).map(|j| i + j * k).take_while(|&c| c < m).collect();
    Ok(solution_from_cuts(inst, &tour.order, &cuts))
}

/// The cheapest of the `k` candidate partitions; ties go to the smaller `i`.
pub fn jitp_candidates(inst: &MetricInstance, tour: &RppTour, k: usize) -> Result<Solution> {
    check_capacity(k)?;
    let mut best: Option<Solution> = None;
    for i in 1..=k {
        let sol = jitp_candidate(inst, tour, k, i)?;
        if best.as_ref().is_none_or(|b| sol.total_cost < b.total_cost) {
            best = Some(sol);
        }
    }
    Ok(best.expect("k >= 1"))
}

/// Optimal split of the cyclic customer sequence into contiguous arcs of at
/// most `k` customers. A fragment passing from `x_m` to `x_1` uses the direct
/// connector between them.
pub fn jitp_dp(inst: &MetricInstance, tour: &RppTour, k: usize) -> Result<Solution> {
    check_capacity(k)?;
    let m = tour.order.len();
    if m == 0 {
        return Ok(Solution::new(Vec::new()));
    }
    let mut best: Option<(f64, Vec<Served>, Vec<usize>)> = None;
    // Some arc starts at most k - 1 positions before x_1.
    for back in 0..k.min(m) {
        let first = (m - back) % m;
        let seq: Vec<Served> = (0..m).map(|j| tour.order[(first + j) % m]).collect();
        let (cost, cuts) = line_dp(inst, &seq, k);
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, seq, cuts));
        }
    }
    let (_, seq, cuts) = best.expect("m >= 1");
    Ok(solution_from_cuts(inst, &seq, &cuts))
}

/// Minimum-cost split of a line of customers into runs of at most `k`.
/// Returns the cost and the interior cut positions.
fn line_dp(inst: &MetricInstance, seq: &[Served], k: usize) -> (f64, Vec<usize>) {
    let m = seq.len();
    let mut best = vec![f64::INFINITY; m + 1];
    let mut from = vec![0usize; m + 1];
    best[0] = 0.0;
    for a in 0..m {
        if best[a] == f64::INFINITY {
            continue;
        }
        let mut inner = 0.0;
        for b in a + 1..=(a + k).min(m) {
            let x = seq[b - 1];
            if b - 1 > a {
                inner += inst.dist(seq[b - 2].exit(), x.entry());
            }
            inner += inst.dist(x.entry(), x.exit());
            let cost = inst.dist(DEPOT, seq[a].entry()) + inner + inst.dist(x.exit(), DEPOT);
            if best[a] + cost < best[b] {
                best[b] = best[a] + cost;
                from[b] = a;
            }
        }
    }
    let mut cuts = Vec::new();
    let mut at = from[m];
    while at > 0 {
        cuts.push(at);
        at = from[at];
    }
    cuts.reverse();
    (best[m], cuts)
}

/// Every contiguous cyclic partition with arcs of at most `k` customers,
/// enumerated over cut subsets; verification only.
pub fn cyclic_partition_oracle(inst: &MetricInstance, tour: &RppTour, k: usize) -> f64 {
    let m = tour.order.len();
    if m == 0 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << m) {
        let starts: Vec<usize> = (0..m).filter(|&g| mask >> g & 1 == 1).collect();
        let mut total = 0.0;
        let mut ok = true;
        for (idx, &s) in starts.iter().enumerate() {
            let next = starts[(idx + 1) % starts.len()];
            let len = if next > s { next - s } else { next + m - s };
            if len > k {
                ok = false;
                break;
            }
            let arc: Vec<Served> = (0..len).map(|j| tour.order[(s + j) % m]).collect();
            total += crate::model::walk_cost(inst, &arc);
        }
        if ok && total < best {
            best = total;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMode {
    Candidates,
    Dp,
}

pub fn partition_tour(
    inst: &MetricInstance,
    tour: &RppTour,
    k: usize,
    mode: PartitionMode,
) -> Result<Solution> {
    match mode {
        PartitionMode::Candidates => jitp_candidates(inst, tour, k),
        PartitionMode::Dp => jitp_dp(inst, tour, k),
    }
}

/// Both tour constructions, the selected tour and its partition.
#[derive(Debug, Clone)]
pub struct AlgorithmRun {
    pub h1: H1Construction,
    pub h2: H2Construction,
    pub choice: RppChoice,
    pub solution: Solution,
}

impl AlgorithmRun {
    pub fn tour(&self) -> &RppTour {
        match self.choice {
            RppChoice::H1 => &self.h1.tour,
            RppChoice::H2 => &self.h2.tour,
        }
    }
}

/// Build `H1` and `H2`, pick one per `select`, partition it per `mode`.
pub fn run_algorithm(inst: &MetricInstance, select: RppSelect, mode: PartitionMode) -> Result<AlgorithmRun> {
    let h1 = construct_h1(inst)?;
    let h2 = construct_h2(inst)?;
    let choice = choose(select, &h1.tour, &h2.tour);
    let tour = match choice {
        RppChoice::H1 => &h1.tour,
        RppChoice::H2 => &h2.tour,
    };
    let solution = partition_tour(inst, tour, inst.capacity(), mode)?;
    Ok(AlgorithmRun {
        h1,
        h2,
        choice,
        solution,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `cost(sol) <= (2/k) delta + ((k-1)/k) c(tour)`.
pub fn jitp_bound_report(sol: &Solution, tour: &RppTour, inst: &MetricInstance, k: usize) -> PartitionBound {
    let kf = k as f64;
    let all: Vec<usize> = (0..inst.customer_count()).collect();
    let rhs = 2.0 / kf * delta(&all, inst) + (kf - 1.0) / kf * tour.cost;
    PartitionBound {
        lhs: sol.total_cost,
        rhs,
        holds: approx_le(sol.total_cost, rhs),
    }
}
