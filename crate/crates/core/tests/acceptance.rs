//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails outside `KNOWN_FAILURES`.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use carp_core::analysis::{
    bound_suite, ratio_closed_form, ratio_grid_search, AnalysisReport, Parity,
};
use carp_core::cli::{generate, GenMode};
use carp_core::exact::exact_carp;
use carp_core::graphkit::{constrained_mst, EulerWalk, MultiEdgeSet};
use carp_core::matching::min_cost_perfect_matching;
use carp_core::model::{
    check_solution, walk_cost, MetricInstance, Orientation, RppTour, Served, Solution,
};
use carp_core::partition::jitp_dp;
use carp_core::preprocess::normalize;
use carp_core::rpp::{construct_h1, construct_h2, exact_rpp};

/// Criteria expected to fail, each with the check names allowed to fail.
const KNOWN_FAILURES: &[(u32, &str)] = &[(4, "chain.route_minima")];

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    allowed: bool,
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn ratio_table() -> Outcome {
    let table = [(3, 1.889), (4, 2.000), (5, 2.086), (6, 2.143), (7, 2.184)];
    let mut bad = Vec::new();
    for (k, want) in table {
        let got = ratio_closed_form(k).unwrap().ratio;
        if !close(got, want, 1e-3) {
            bad.push(format!("k={k}: {got:.4} vs {want}"));
        }
    }
    let k8 = ratio_closed_form(8).unwrap().ratio;
    if !close(k8, 2.5 - 32.0 / 112.0, 1e-12) {
        bad.push(format!("k=8: {k8}"));
    }
    Outcome {
        id: 1,
        title: "ratio table k=3..8",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("all within 1e-3, k=8 value {k8:.4}")
        } else {
            bad.join("; ")
        },
        allowed: false,
    }
}

fn grid_vs_closed_form() -> Outcome {
    let worst = (3..=100usize)
        .into_par_iter()
        .map(|k| {
            let l_max = (4.0 * (k as f64).sqrt()).ceil() as usize;
            let grid = ratio_grid_search(k, l_max, 100_000).unwrap();
            ((grid - ratio_closed_form(k).unwrap().ratio).abs(), k)
        })
        .reduce(|| (0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
    Outcome {
        id: 2,
        title: "grid search vs closed form, k=3..100",
        pass: worst.0 <= 1e-6,
        detail: format!("max |diff| = {:.2e} at k={}", worst.0, worst.1),
        allowed: false,
    }
}

struct SweepCase {
    inst: MetricInstance,
    report: AnalysisReport,
}

fn sweep_instances() -> Vec<SweepCase> {
    let mut specs = Vec::new();
    for seed in 0..300u64 {
        let m = 1 + (seed as usize % 7);
        let k = 1 + (seed as usize / 7) % 5;
        specs.push((seed, m, k, GenMode::Euclidean));
        specs.push((seed, m, k, GenMode::RandomMetric));
    }
    specs
        .into_par_iter()
        .map(|(seed, m, k, mode)| {
            let raw = generate(m, k, mode, 1000 + seed, 100);
            let (inst, _) = normalize(&raw).unwrap();
            let report = bound_suite(&inst).unwrap();
            SweepCase { inst, report }
        })
        .collect()
}

fn approximation_sweep(cases: &[SweepCase]) -> Outcome {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for (idx, c) in cases.iter().enumerate() {
        let r = &c.report;
        let opt = r.opt.as_ref().unwrap().total_cost;
        if !check_solution(&r.run.solution, &c.inst).is_feasible() {
            bad.push(format!("case {idx}: infeasible output"));
        }
        for name in ["partition.tour_bound", "lower.delta", "lower.rpp"] {
            if !r.checks.iter().any(|ch| ch.name == name && ch.holds) {
                bad.push(format!("case {idx}: {name}"));
            }
        }
        let bound = ratio_closed_form(r.k.max(3)).unwrap().ratio;
        if r.k >= 3 && r.alg_cost() > bound * opt + 1e-9 {
            bad.push(format!("case {idx}: alg {} > {bound} * {opt}", r.alg_cost()));
        }
        if opt > 0.0 {
            worst = worst.max(r.alg_cost() / opt);
        }
    }
    Outcome {
        id: 3,
        title: "approximation guarantee sweep",
        pass: bad.is_empty() && cases.len() >= 500,
        detail: if bad.is_empty() {
            format!("{} instances, worst alg/opt = {worst:.4}", cases.len())
        } else {
            bad.join("; ")
        },
        allowed: false,
    }
}

fn bound_check_suite(cases: &[SweepCase]) -> Outcome {
    let mut failures: BTreeMap<String, usize> = BTreeMap::new();
    let mut evaluated: BTreeMap<String, usize> = BTreeMap::new();
    for c in cases {
        for ch in &c.report.checks {
            *evaluated.entry(ch.name.clone()).or_default() += 1;
            if !ch.holds {
                *failures.entry(ch.name.clone()).or_default() += 1;
            }
        }
    }
    let required = [
        "partition.tour_bound",
        "lower.delta",
        "lower.rpp",
        "h1.vs_opt",
        "h2.vs_opt",
        "h2.construction",
        "h2.matching",
        "h2.connectors",
        "routes.delta_split",
        "routes.tree_split",
        "h1.tour_branch",
        "chain.best_tour",
        "chain.opt_branches",
        "chain.route_minima",
    ];
    let missing: Vec<&str> = required
        .iter()
        .filter(|n| evaluated.get(**n).copied().unwrap_or(0) < cases.len())
        .copied()
        .collect();
    let allowed = failures
        .keys()
        .all(|n| KNOWN_FAILURES.iter().any(|&(id, name)| id == 4 && name == n));
    let detail = if failures.is_empty() && missing.is_empty() {
        format!("{} checks per instance, 0 violations", evaluated.len())
    } else {
        let mut parts: Vec<String> = failures
            .iter()
            .map(|(n, c)| format!("{n} violated on {c}/{} instances", cases.len()))
            .collect();
        if !missing.is_empty() {
            parts.push(format!("not evaluated everywhere: {missing:?}"));
        }
        let sums = failures.get("chain.route_sums").copied().unwrap_or(0);
        parts.push(format!("summed form chain.route_sums violated on {sums}"));
        parts.join("; ")
    };
    Outcome {
        id: 4,
        title: "bound check suite",
        pass: failures.is_empty() && missing.is_empty(),
        detail,
        allowed: allowed && missing.is_empty(),
    }
}

fn route_splits_sweep(cases: &[SweepCase]) -> Outcome {
    let (mut odd, mut even, mut degenerate, mut bad) = (0, 0, 0, 0);
    for c in cases {
        for l in &c.report.route_splits {
            if l.degenerate {
                degenerate += 1;
                continue;
            }
            match l.parity {
                Parity::Odd => odd += 1,
                Parity::Even => even += 1,
            }
            if !l.holds() || l.checks.len() < 4 {
                bad += 1;
            }
        }
    }
    Outcome {
        id: 5,
        title: "per-route parameter verifier",
        pass: bad == 0 && odd >= 100 && even >= 100,
        detail: format!("{odd} odd-l, {even} even-l routes, {degenerate} zero-cost, {bad} failing"),
        allowed: false,
    }
}

fn brute_matching(v: &[usize], d: &dyn Fn(usize, usize) -> f64) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for i in 1..v.len() {
        let rest: Vec<usize> = v[1..].iter().enumerate().filter(|&(j, _)| j + 1 != i).map(|(_, &x)| x).collect();
        best = best.min(d(v[0], v[i]) + brute_matching(&rest, d));
    }
    best
}

/// Every labelled tree on `n` vertices via Prüfer sequences.
fn all_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![Vec::new()];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let len = n - 2;
    let mut out = Vec::new();
    let mut seq = vec![0usize; len];
    loop {
        let mut degree = vec![1usize; n];
        for &x in &seq {
            degree[x] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &x in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf.min(x), leaf.max(x)));
            degree[leaf] -= 1;
            degree[x] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
        let mut i = 0;
        while i < len {
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == len {
            return out;
        }
    }
}

fn brute_cyclic_partition(inst: &MetricInstance, order: &[Served], k: usize) -> f64 {
    let m = order.len();
    let mut best = f64::INFINITY;
    for first in 0..m {
        let rotated: Vec<Served> = (0..m).map(|j| order[(first + j) % m]).collect();
        // Splits of the rotated line; every cyclic partition has a rotation
        // that starts at one of its arcs.
        for cuts in 0u32..(1 << (m - 1)) {
            let mut total = 0.0;
            let mut start = 0;
            let mut ok = true;
            for end in 1..=m {
                if end == m || cuts >> (end - 1) & 1 == 1 {
                    if end - start > k {
                        ok = false;
                        break;
                    }
                    total += walk_cost(inst, &rotated[start..end]);
                    start = end;
                }
            }
            if ok {
                best = best.min(total);
            }
        }
    }
    best
}

fn brute_rpp(inst: &MetricInstance) -> f64 {
    fn go(inst: &MetricInstance, left: &mut Vec<usize>, acc: &mut Vec<Served>, best: &mut f64) {
        if left.is_empty() {
            *best = best.min(walk_cost(inst, acc));
            return;
        }
        for i in 0..left.len() {
            let c = left.swap_remove(i);
            for o in [Orientation::Forward, Orientation::Reversed] {
                acc.push(Served::new(c, o));
                go(inst, left, acc, best);
                acc.pop();
            }
            left.push(c);
            let last = left.len() - 1;
            left.swap(i, last);
        }
    }
    let mut best = f64::INFINITY;
    go(inst, &mut (0..inst.customer_count()).collect(), &mut Vec::new(), &mut best);
    best
}

fn random_points_instance(rng: &mut ChaCha8Rng, m: usize, k: usize) -> MetricInstance {
    let pts: Vec<((f64, f64), (f64, f64))> = (0..m)
        .map(|_| {
            let mut p = || (rng.gen_range(0..60) as f64, rng.gen_range(0..60) as f64);
            (p(), p())
        })
        .collect();
    let depot = (rng.gen_range(0..60) as f64, rng.gen_range(0..60) as f64);
    MetricInstance::from_points(depot, &pts, k).unwrap()
}

#[allow(clippy::needless_range_loop)]
fn oracle_equivalences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut bad = Vec::new();

    for trial in 0..200 {
        let n = 2 * rng.gen_range(1..=5);
        let w: Vec<Vec<f64>> = {
            let mut t = vec![vec![0.0; n]; n];
            for a in 0..n {
                for b in a + 1..n {
                    let x = rng.gen_range(0..100) as f64;
                    t[a][b] = x;
                    t[b][a] = x;
                }
            }
            t
        };
        let v: Vec<usize> = (0..n).collect();
        let d = |a: usize, b: usize| w[a][b];
        let fast = min_cost_perfect_matching(&v, d).unwrap().cost;
        if fast != brute_matching(&v, &d) {
            bad.push(format!("matching trial {trial}"));
        }
    }

    for trial in 0..100 {
        let n = rng.gen_range(2..=7);
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0..30) as f64, rng.gen_range(0..30) as f64))
            .collect();
        let d = |a: usize, b: usize| ((pts[a].0 - pts[b].0).powi(2) + (pts[a].1 - pts[b].1).powi(2)).sqrt();
        let mut required = Vec::new();
        let mut v = 0;
        while v + 1 < n && rng.gen_bool(0.5) {
            required.push((v, v + 1));
            v += 2;
        }
        let vertices: Vec<usize> = (0..n).collect();
        let fast = constrained_mst(&vertices, &required, d).unwrap().cost;
        let brute = all_trees(n)
            .into_iter()
            .filter(|t| required.iter().all(|r| t.contains(r)))
            .map(|t| t.iter().map(|&(a, b)| d(a, b)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        if !close(fast, brute, 1e-9 * brute.max(1.0)) {
            bad.push(format!("tree trial {trial}: {fast} vs {brute}"));
        }
    }

    for trial in 0..100 {
        let m = rng.gen_range(1..=8);
        let k = rng.gen_range(1..=5);
        let inst = random_points_instance(&mut rng, m, k);
        let mut ids: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            ids.swap(i, rng.gen_range(0..=i));
        }
        let order: Vec<Served> = ids
            .into_iter()
            .map(|c| Served::new(c, if rng.gen_bool(0.5) { Orientation::Forward } else { Orientation::Reversed }))
            .collect();
        let tour = RppTour::new(&inst, order.clone()).unwrap();
        let dp = jitp_dp(&inst, &tour, k).unwrap().total_cost;
        let brute = brute_cyclic_partition(&inst, &order, k);
        if !close(dp, brute, 1e-9 * brute.max(1.0)) {
            bad.push(format!("partition trial {trial}: {dp} vs {brute}"));
        }
    }

    for trial in 0..50 {
        let m = rng.gen_range(1..=5);
        let inst = random_points_instance(&mut rng, m, 2);
        let fast = exact_rpp(&inst).unwrap().cost;
        let brute = brute_rpp(&inst);
        if !close(fast, brute, 1e-9 * brute.max(1.0)) {
            bad.push(format!("rpp trial {trial}: {fast} vs {brute}"));
        }
    }

    Outcome {
        id: 6,
        title: "oracle equivalences",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            "200 matchings, 100 trees, 100 partitions, 50 RPP tours agree".into()
        } else {
            bad.join("; ")
        },
        allowed: false,
    }
}

fn serves_each_once(tour: &RppTour, m: usize) -> bool {
    let mut seen = vec![0; m];
    for s in &tour.order {
        seen[s.customer] += 1;
    }
    tour.order.len() == m && seen.iter().all(|&c| c == 1)
}

fn euler_uses_every_edge_once(graph: &MultiEdgeSet, walk: &EulerWalk) -> bool {
    if walk.edge_ids.len() != graph.len() || walk.vertices.len() != graph.len() + 1 {
        return false;
    }
    let mut ids = walk.edge_ids.clone();
    ids.sort_unstable();
    if ids.iter().enumerate().any(|(i, &e)| i != e) {
        return false;
    }
    walk.edge_ids.iter().enumerate().all(|(step, &e)| {
        let edge = graph.edges()[e];
        let (x, y) = (walk.vertices[step], walk.vertices[step + 1]);
        (x, y) == (edge.a, edge.b) || (y, x) == (edge.a, edge.b)
    })
}

fn structural_invariants(cases: &[SweepCase]) -> Outcome {
    let mut bad = Vec::new();
    let (mut tours, mut walks, mut solutions) = (0, 0, 0);
    for (idx, c) in cases.iter().enumerate() {
        let m = c.inst.customer_count();
        let h1 = construct_h1(&c.inst).unwrap();
        let h2 = construct_h2(&c.inst).unwrap();
        let exact = exact_rpp(&c.inst).unwrap();
        for (name, tour) in [("h1", &h1.tour), ("h2", &h2.tour), ("exact", &exact)] {
            tours += 1;
            if !serves_each_once(tour, m) {
                bad.push(format!("case {idx}: {name} coverage"));
            }
        }
        for (name, graph, walk, walk_c, tour) in [
            ("h1", &h1.graph, &h1.walk, h1.walk_cost, &h1.tour),
            ("h2", &h2.graph, &h2.walk, h2.walk_cost, &h2.tour),
        ] {
            walks += 1;
            if !euler_uses_every_edge_once(graph, walk) {
                bad.push(format!("case {idx}: {name} euler multiset"));
            }
            if tour.cost > walk_c + 1e-9 * walk_c.max(1.0) {
                bad.push(format!("case {idx}: {name} shortcut raised cost"));
            }
        }
        let dp = jitp_dp(&c.inst, c.report.run.tour(), c.inst.capacity()).unwrap();
        let opt = exact_carp(&c.inst).unwrap();
        let emitted: [(&str, &Solution); 3] =
            [("alg", &c.report.run.solution), ("dp", &dp), ("opt", &opt)];
        for (name, sol) in emitted {
            solutions += 1;
            let rep = check_solution(sol, &c.inst);
            if !rep.is_feasible() {
                bad.push(format!("case {idx}: {name}: {rep}"));
            }
        }
    }
    Outcome {
        id: 7,
        title: "structural invariants",
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{tours} tours, {walks} Euler walks, {solutions} solutions checked")
        } else {
            bad.into_iter().take(5).collect::<Vec<_>>().join("; ")
        },
        allowed: false,
    }
}

fn sqrt_trend() -> Outcome {
    let mut values = Vec::new();
    let mut pass = true;
    for e in 1..=6 {
        let k = 10usize.pow(e);
        let v = (2.5 - ratio_closed_form(k).unwrap().ratio) * (k as f64).sqrt();
        pass &= (0.3..=3.0).contains(&v);
        values.push(format!("10^{e}: {v:.4}"));
    }
    Outcome {
        id: 8,
        title: "(5/2 - ratio) * sqrt(k) band",
        pass,
        detail: values.join(", "),
        allowed: false,
    }
}

fn main() {
    let start = Instant::now();
    let cases = sweep_instances();
    let outcomes = vec![
        ratio_table(),
        grid_vs_closed_form(),
        approximation_sweep(&cases),
        bound_check_suite(&cases),
        route_splits_sweep(&cases),
        oracle_equivalences(),
        structural_invariants(&cases),
        sqrt_trend(),
    ];
    let mut unexpected = 0;
    for o in &outcomes {
        let status = match (o.pass, o.allowed) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("[{status}] {} {}: {}", o.id, o.title, o.detail);
    }
    println!("acceptance finished in {:.1?}", start.elapsed());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
