#![allow(dead_code)]

use kpcst::laminar::LaminarFamily;
use kpcst::pruning::PruneGraph;
use kpcst::{generate_random, parse_instance, Instance, Rational, Tree};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const EX_A: &str = "kpcst 1\nn 2 m 1\nroot 0\nk 2\npenalties inf 1\ne 0 1 4\n";
pub const EX_B: &str = "kpcst 1\nn 3 m 2\nroot 0\nk 0\npenalties inf 0 0\ne 0 1 1\ne 0 2 1\n";
pub const EX_C: &str = "kpcst 1\nn 3 m 3\nroot 0\nk 0\npenalties inf 5 5\ne 0 1 1\ne 1 2 1\ne 0 2 3\n";

pub fn int(x: i64) -> Rational {
    Rational::from_integer(x)
}

/// The three hand fixtures at every feasible `k`.
pub fn fixtures() -> Vec<Instance> {
    let mut out = Vec::new();
    for text in [EX_A, EX_B, EX_C] {
        let base = parse_instance(text).unwrap();
        for k in 0..=base.n() {
            out.push(base.with_k(k).unwrap());
        }
    }
    out
}

/// Small random instance: `n ∈ [3,12]`, any connected edge count, integer
/// costs and penalties up to 20, any `k`.
pub fn small_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(3..=12);
    let m = rng.gen_range(n - 1..=n * (n - 1) / 2);
    let k = rng.gen_range(0..=n);
    generate_random(n, m, 20, 20, k, rng.gen()).unwrap()
}

/// Small instance tilted towards expensive edges so the threshold search runs.
pub fn costly_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(3..=12);
    let m = rng.gen_range(n - 1..=n * (n - 1) / 2);
    let k = rng.gen_range(n / 2..=n);
    generate_random(n, m, 20, 4, k, rng.gen()).unwrap()
}

/// `c(T) + 2·π(V∖V(T))`, recomputed from the raw instance.
pub fn bound_lhs(inst: &Instance, t: &Tree) -> Rational {
    let mut total = Rational::zero();
    for &j in &t.edges {
        total += &inst.edge(j).cost;
    }
    for v in 0..inst.n() {
        if !t.vertices.contains(&v) {
            total += &inst.penalty(v).mul_int(2);
        }
    }
    total
}

/// Dual load of an edge, summed over every family set it crosses.
pub fn load(fam: &LaminarFamily<Rational>, u: usize, v: usize) -> Rational {
    let mut s = Rational::zero();
    for l in fam.sets() {
        if l.vertices.contains(&u) != l.vertices.contains(&v) {
            s += &l.y;
        }
    }
    s
}

pub fn tight(inst: &Instance, fam: &LaminarFamily<Rational>, j: usize) -> bool {
    let e = inst.edge(j);
    load(fam, e.u, e.v) == e.cost
}

/// Feasibility of the duals: no edge overpacked, no finite-penalty set over
/// its potential, no negative value, and no processed set holding the root.
pub fn dual_violations(inst: &Instance, fam: &LaminarFamily<Rational>, processed: &[usize], lambda: &Rational) -> Vec<String> {
    let mut out = Vec::new();
    for (j, e) in inst.edges().iter().enumerate() {
        if load(fam, e.u, e.v) > e.cost {
            out.push(format!("edge {j} overpacked"));
        }
    }
    for (id, l) in fam.sets().iter().enumerate() {
        if l.y.is_negative() {
            out.push(format!("set {id} has negative dual"));
        }
        if l.vertices.contains(&inst.root()) {
            continue;
        }
        let mut inner = Rational::zero();
        for s in fam.sets() {
            if s.vertices.iter().all(|v| l.vertices.contains(v)) {
                inner += &s.y;
            }
        }
        let mut pot = lambda.mul_int(l.vertices.len() as i64);
        for &v in &l.vertices {
            pot += inst.penalty(v);
        }
        if inner > pot {
            out.push(format!("set {id} exceeds its potential"));
        }
    }
    for &id in processed {
        if fam.set(id).vertices.contains(&inst.root()) {
            out.push(format!("processed set {id} holds the root"));
        }
    }
    out
}

/// Random connected graph with at most one cycle, rooted at 0, and a random
/// root-free laminar collection over its vertices.
pub fn prune_pair(rng: &mut ChaCha8Rng) -> (PruneGraph, Vec<Vec<usize>>) {
    let n = rng.gen_range(2..=10);
    let mut order: Vec<usize> = (1..n).collect();
    order.shuffle(rng);
    order.insert(0, 0);
    let mut edges = Vec::new();
    for i in 1..n {
        let p = order[rng.gen_range(0..i)];
        edges.push((p, order[i], edges.len()));
    }
    if n >= 3 && rng.gen_bool(0.4) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && !edges.iter().any(|&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u)) {
            edges.push((u, v, edges.len()));
        }
    }
    let h = PruneGraph::new(n, &(0..n).collect::<Vec<_>>(), &edges);
    (h, laminar(rng, n))
}

/// Random binary merges of a random subset of non-root singletons, then a
/// random subcollection of everything built.
pub fn laminar(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<usize>> {
    let mut tops: Vec<Vec<usize>> = (1..n).filter(|_| rng.gen_bool(0.8)).map(|v| vec![v]).collect();
    let mut all = tops.clone();
    while tops.len() > 1 && rng.gen_bool(0.7) {
        tops.shuffle(rng);
        let a = tops.pop().unwrap();
        let b = tops.pop().unwrap();
        let mut u: Vec<usize> = a.into_iter().chain(b).collect();
        u.sort_unstable();
        all.push(u.clone());
        tops.push(u);
    }
    all.retain(|_| rng.gen_bool(0.75));
    all
}

/// Reference pruning: rescan the collection and delete the first degree-one
/// set until none is left.
pub fn naive_prune(h: &PruneGraph, sets: &[Vec<usize>]) -> PruneGraph {
    let mut alive: Vec<bool> = (0..h.n()).map(|v| h.contains(v)).collect();
    loop {
        let deg = |b: &Vec<usize>, alive: &[bool]| {
            h.edges()
                .iter()
                .filter(|&&(u, v, _)| alive[u] && alive[v] && (b.contains(&u) != b.contains(&v)))
                .count()
        };
        let Some(b) = sets.iter().find(|b| deg(b, &alive) == 1) else { break };
        for &v in b {
            alive[v] = false;
        }
    }
    let vs: Vec<usize> = (0..h.n()).filter(|&v| alive[v]).collect();
    PruneGraph::new(h.n(), &vs, h.edges())
}

/// A connected subgraph between `inner` and `outer` containing `inner`,
/// grown by adding random edges of `outer` that touch it.
pub fn between(rng: &mut ChaCha8Rng, inner: &PruneGraph, outer: &PruneGraph) -> PruneGraph {
    let mut vs: Vec<bool> = (0..outer.n()).map(|v| inner.contains(v)).collect();
    let mut es: Vec<(usize, usize, usize)> = inner.edges().to_vec();
    let mut rest: Vec<_> = outer.edges().iter().copied().filter(|e| !inner.has_edge(e.2)).collect();
    rest.shuffle(rng);
    let mut changed = true;
    while changed {
        changed = false;
        for e in &rest {
            if es.contains(e) || !(vs[e.0] || vs[e.1]) || !rng.gen_bool(0.6) {
                continue;
            }
            vs[e.0] = true;
            vs[e.1] = true;
            es.push(*e);
            changed = true;
        }
    }
    let list: Vec<usize> = (0..outer.n()).filter(|&v| vs[v]).collect();
    PruneGraph::new(outer.n(), &list, &es)
}
