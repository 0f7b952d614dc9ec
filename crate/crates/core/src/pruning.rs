//! Pruning: repeatedly delete a processed set that has exactly one edge
//! leaving it, plus the traced variants that record the deletions as a
//! subset path.
//!
//! Collections of processed sets are passed as sorted local vertex lists;
//! witnesses in a [`SubsetPath`] are indices into that slice.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::laminar::fmt_set;

/// A subgraph given by a vertex mask and a list of `(u, v, edge)` triples
/// whose endpoints are both present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneGraph {
    alive: Vec<bool>,
    edges: Vec<(usize, usize, usize)>,
}

impl PruneGraph {
    pub fn new(n: usize, vertices: &[usize], edges: &[(usize, usize, usize)]) -> Self {
        let mut alive = vec![false; n];
        for &v in vertices {
            alive[v] = true;
        }
        let mut edges: Vec<_> = edges.iter().copied().filter(|&(u, v, _)| alive[u] && alive[v]).collect();
        edges.sort_by_key(|e| e.2);
        edges.dedup_by_key(|e| e.2);
        PruneGraph { alive, edges }
    }

    /// The graph formed by the given edges plus the root.
    pub fn from_edges(inst: &Instance, edge_ids: &[usize]) -> Self {
        let mut vs = vec![inst.root()];
        let mut es = Vec::with_capacity(edge_ids.len());
        for &j in edge_ids {
            let e = inst.edge(j);
            vs.push(e.u);
            vs.push(e.v);
            es.push((e.u, e.v, j));
        }
        PruneGraph::new(inst.n(), &vs, &es)
    }

    pub fn n(&self) -> usize {
        self.alive.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.alive[v]
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&v| self.alive[v]).collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    pub fn edge_ids(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.2).collect()
    }

    pub fn has_edge(&self, id: usize) -> bool {
        self.edges.iter().any(|e| e.2 == id)
    }

    pub fn without_edge(&self, id: usize) -> Self {
        PruneGraph { alive: self.alive.clone(), edges: self.edges.iter().copied().filter(|e| e.2 != id).collect() }
    }

    /// Induced subgraph on `vertices ∩ V(H)`.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut alive = vec![false; self.alive.len()];
        for &v in vertices {
            alive[v] = self.alive[v];
        }
        let edges = self.edges.iter().copied().filter(|&(u, v, _)| alive[u] && alive[v]).collect();
        PruneGraph { alive, edges }
    }

    pub fn union(&self, other: &PruneGraph) -> Self {
        let vs: Vec<usize> = (0..self.n()).filter(|&v| self.alive[v] || other.alive[v]).collect();
        let es: Vec<_> = self.edges.iter().chain(&other.edges).copied().collect();
        PruneGraph::new(self.n(), &vs, &es)
    }

    pub fn is_subgraph_of(&self, other: &PruneGraph) -> bool {
        (0..self.n()).all(|v| !self.alive[v] || other.alive[v]) && self.edges.iter().all(|e| other.has_edge(e.2))
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n()];
        for &(u, v, j) in &self.edges {
            adj[u].push((v, j));
            adj[v].push((u, j));
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.alive.iter().position(|&a| a) else {
            return true;
        };
        let adj = self.adjacency();
        let mut seen = vec![false; self.n()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == self.num_vertices()
    }

    /// `|δ_H(B)|`: edges with exactly one endpoint in `B`.
    pub fn degree(&self, set: &[usize]) -> usize {
        let mut inside = vec![false; self.n()];
        for &v in set {
            inside[v] = true;
        }
        self.edges.iter().filter(|&&(u, v, _)| inside[u] != inside[v]).count()
    }

    pub fn is_pruned_with<'s>(&self, sets: impl IntoIterator<Item = &'s Vec<usize>>) -> bool {
        sets.into_iter().all(|b| self.degree(b) != 1)
    }

    /// Vertex path from `from` to `to`, if one exists.
    pub fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        if !self.alive[from] || !self.alive[to] {
            return None;
        }
        let adj = self.adjacency();
        let mut parent = vec![usize::MAX; self.n()];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &adj[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if parent[to] == usize::MAX {
            return None;
        }
        let mut out = vec![to];
        while *out.last().unwrap() != from {
            out.push(parent[*out.last().unwrap()]);
        }
        out.reverse();
        Some(out)
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.iter().find(|&&(u, v, _)| (u, v) == (a, b) || (u, v) == (b, a)).map(|e| e.2)
    }
}

/// One deletion: the set, the vertices it removed, and the inside endpoint
/// of the single edge that left it.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Deletion {
    set: usize,
    part: Vec<usize>,
    link: usize,
}

#[derive(Clone, Copy)]
enum Rule<'r> {
    First,
    Rank(&'r [usize]),
    Minimal,
}

fn prune_core(h: &PruneGraph, sets: &[Vec<usize>], allowed: &dyn Fn(usize) -> bool, rule: Rule) -> (PruneGraph, Vec<Deletion>) {
    let n = h.n();
    let nb = sets.len();
    let mut in_set = vec![vec![false; n]; nb];
    let mut member: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (b, s) in sets.iter().enumerate() {
        if !allowed(b) {
            continue;
        }
        for &v in s {
            in_set[b][v] = true;
            member[v].push(b);
        }
    }
    let mut deg = vec![0usize; nb];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, &(u, v, _)) in h.edges.iter().enumerate() {
        adj[u].push(k);
        adj[v].push(k);
        for &b in &member[u] {
            if !in_set[b][v] {
                deg[b] += 1;
            }
        }
        for &b in &member[v] {
            if !in_set[b][u] {
                deg[b] += 1;
            }
        }
    }
    let mut alive = h.alive.clone();
    let mut edge_alive = vec![true; h.edges.len()];
    let mut log = Vec::new();
    loop {
        let pick = (0..nb).filter(|&b| allowed(b) && deg[b] == 1).min_by(|&a, &b| match rule {
            Rule::First => a.cmp(&b),
            Rule::Rank(rank) => rank[a].cmp(&rank[b]),
            Rule::Minimal => (sets[a].len(), &sets[a]).cmp(&(sets[b].len(), &sets[b])),
        });
        let Some(b) = pick else { break };
        let part: Vec<usize> = sets[b].iter().copied().filter(|&v| alive[v]).collect();
        let mut link = usize::MAX;
        for &v in &part {
            for &k in &adj[v] {
                let (x, y, _) = h.edges[k];
                if edge_alive[k] && in_set[b][x] != in_set[b][y] {
                    link = v;
                }
            }
        }
        for &v in &part {
            for &k in &adj[v] {
                if !edge_alive[k] {
                    continue;
                }
                edge_alive[k] = false;
                let (x, y, _) = h.edges[k];
                for &c in &member[x] {
                    if !in_set[c][y] {
                        deg[c] -= 1;
                    }
                }
                for &c in &member[y] {
                    if !in_set[c][x] {
                        deg[c] -= 1;
                    }
                }
            }
            alive[v] = false;
        }
        log.push(Deletion { set: b, part, link });
    }
    let edges = h.edges.iter().zip(&edge_alive).filter(|(_, &a)| a).map(|(e, _)| *e).collect();
    (PruneGraph { alive, edges }, log)
}

/// Deletes degree-one processed sets until none is left.
pub fn pp_run(h: &PruneGraph, sets: &[Vec<usize>]) -> PruneGraph {
    prune_core(h, sets, &|_| true, Rule::First).0
}

/// Same as [`pp_run`], always deleting the degree-one set of lowest rank.
pub fn pp_run_ordered(h: &PruneGraph, sets: &[Vec<usize>], rank: &[usize]) -> PruneGraph {
    prune_core(h, sets, &|_| true, Rule::Rank(rank)).0
}

/// `D_1, …, D_{ℓ+1}` with witnesses `B_i` and links `v_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetPath {
    pub parts: Vec<Vec<usize>>,
    pub witnesses: Vec<usize>,
    pub links: Vec<usize>,
}

impl SubsetPath {
    /// `ℓ`, the number of witnessed parts.
    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn part_of(&self, v: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.binary_search(&v).is_ok())
    }

    /// `D1={…} B1={…} v1=<id> | … | Dl+1={…}` in original ids.
    pub fn dump(&self, sets: &[Vec<usize>], labels: &[usize]) -> String {
        let lab = |vs: &[usize]| fmt_set(vs.iter().map(|&v| labels[v]));
        let mut out = String::new();
        for i in 0..self.len() {
            write!(
                out,
                "D{n}={} B{n}={} v{n}={} | ",
                lab(&self.parts[i]),
                lab(&sets[self.witnesses[i]]),
                labels[self.links[i]],
                n = i + 1
            )
            .unwrap();
        }
        write!(out, "D{}={}", self.len() + 1, lab(self.parts.last().unwrap())).unwrap();
        out
    }

    fn from_log(log: Vec<Deletion>, rest: &PruneGraph) -> Self {
        let mut parts = Vec::with_capacity(log.len() + 1);
        let mut witnesses = Vec::with_capacity(log.len());
        let mut links = Vec::with_capacity(log.len());
        for d in log {
            parts.push(d.part);
            witnesses.push(d.set);
            links.push(d.link);
        }
        parts.push(rest.vertices());
        SubsetPath { parts, witnesses, links }
    }
}

fn not_path(msg: String) -> Error {
    Error::NotSubsetPath(msg)
}

/// Checks the three defining conditions of a subset path of `h` processed
/// with `sets`, plus that the parts partition `V(h)`.
pub fn verify_subset_path(h: &PruneGraph, sets: &[Vec<usize>], path: &SubsetPath) -> Result<()> {
    let l = path.len();
    if path.parts.len() != l + 1 || path.links.len() != l {
        return Err(not_path("mismatched lengths".into()));
    }
    let mut owner = vec![usize::MAX; h.n()];
    for (i, p) in path.parts.iter().enumerate() {
        if p.windows(2).any(|w| w[0] >= w[1]) {
            return Err(not_path(format!("part {} is not sorted", i + 1)));
        }
        for &v in p {
            if v >= h.n() || !h.contains(v) || owner[v] != usize::MAX {
                return Err(not_path(format!("parts do not partition V(H) at vertex {v}")));
            }
            owner[v] = i;
        }
    }
    if (0..h.n()).any(|v| h.contains(v) && owner[v] == usize::MAX) {
        return Err(not_path("parts do not cover V(H)".into()));
    }
    if !h.induced(&path.parts[l]).is_pruned_with(sets) {
        return Err(not_path("last part is not pruned".into()));
    }
    let mut suffix: Vec<usize> = path.parts[l].clone();
    for i in (0..l).rev() {
        suffix.extend_from_slice(&path.parts[i]);
        let v = path.links[i];
        if owner.get(v) != Some(&i) {
            return Err(not_path(format!("link v{} is not in D{}", i + 1, i + 1)));
        }
        if !h.edges.iter().any(|&(a, b, _)| (a == v && owner[b] == i + 1) || (b == v && owner[a] == i + 1)) {
            return Err(not_path(format!("no edge from v{} into D{}", i + 1, i + 2)));
        }
        let b = sets.get(path.witnesses[i]).ok_or_else(|| not_path(format!("witness B{} out of range", i + 1)))?;
        if path.parts[i].iter().any(|v| b.binary_search(v).is_err()) {
            return Err(not_path(format!("D{} is not inside B{}", i + 1, i + 1)));
        }
        if b.iter().any(|&v| v < h.n() && owner[v] != usize::MAX && owner[v] > i) {
            return Err(not_path(format!("B{} meets a later part", i + 1)));
        }
        let sub = h.induced(&suffix);
        if !sub.is_connected() {
            return Err(not_path(format!("suffix from D{} is disconnected", i + 1)));
        }
        if !sub.is_pruned_with(sets.iter().filter(|s| s.binary_search(&v).is_err())) {
            return Err(not_path(format!("suffix from D{} is not pruned", i + 1)));
        }
    }
    Ok(())
}

/// Prunes deleting an inclusion-wise minimal degree-one set each time and
/// returns the deletions as a subset path, verified before returning.
pub fn pp_trace_minimal(h: &PruneGraph, sets: &[Vec<usize>]) -> Result<SubsetPath> {
    let (rest, log) = prune_core(h, sets, &|_| true, Rule::Minimal);
    let path = SubsetPath::from_log(log, &rest);
    verify_subset_path(h, sets, &path)?;
    Ok(path)
}

/// The subset path when the last list entry is a subset.
pub fn subset_path_subset_case(h_hat: &PruneGraph, sets: &[Vec<usize>]) -> Result<SubsetPath> {
    pp_trace_minimal(h_hat, sets)
}

/// The unique cycle of a connected graph with `|E| ≤ |V|`, as sorted edge ids.
pub fn find_cycle(h: &PruneGraph) -> Result<Option<Vec<usize>>> {
    if h.edges.len() > h.num_vertices() {
        return Err(Error::Precondition("graph has more edges than vertices".into()));
    }
    let mut deg = vec![0usize; h.n()];
    for &(u, v, _) in &h.edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    let adj = h.adjacency();
    let mut gone = vec![false; h.n()];
    let mut stack: Vec<usize> = (0..h.n()).filter(|&v| h.contains(v) && deg[v] <= 1).collect();
    while let Some(x) = stack.pop() {
        if gone[x] {
            continue;
        }
        gone[x] = true;
        for &(y, _) in &adj[x] {
            if !gone[y] {
                deg[y] -= 1;
                if deg[y] == 1 {
                    stack.push(y);
                }
            }
        }
    }
    let cycle: Vec<usize> = h.edges.iter().filter(|&&(u, v, _)| !gone[u] && !gone[v]).map(|e| e.2).collect();
    Ok((!cycle.is_empty()).then_some(cycle))
}

/// Output of the edge-case construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCasePath {
    /// The cycle edge removed from the host.
    pub removed: usize,
    /// `Ĥ − e`.
    pub host: PruneGraph,
    pub path: SubsetPath,
    /// `Ĥ − e₊` had no degree-one set, so `e = e₊` was used.
    pub degenerate: bool,
}

/// The subset path when the last list entry is the edge `e_plus`: find a
/// cycle edge `e` whose removal lets pruning proceed as a path, then trace
/// `Ĥ − e` in two legs.
pub fn subset_path_edge_case(h_hat: &PruneGraph, sets: &[Vec<usize>], e_plus: usize, root: usize) -> Result<EdgeCasePath> {
    let step = |name: &str, msg: String| Error::Internal(format!("edge case, {name}: {msg}"));
    let cycle = find_cycle(h_hat)?.ok_or_else(|| step("cycle", "the pruned union has no cycle".into()))?;
    if !cycle.contains(&e_plus) {
        return Err(step("cycle", "the last list edge is not on the cycle".into()));
    }
    let &(a, b, _) = h_hat.edges.iter().find(|e| e.2 == e_plus).unwrap();
    let h1 = h_hat.without_edge(e_plus);

    let (_, first) = prune_core(&h1, sets, &|_| true, Rule::Minimal);
    let Some(first) = first.first() else {
        let host = h1;
        let (rest, log) = prune_core(&host, sets, &|_| true, Rule::Minimal);
        let path = SubsetPath::from_log(log, &rest);
        verify_subset_path(&host, sets, &path).map_err(|e| step("degenerate fallback", e.to_string()))?;
        return Ok(EdgeCasePath { removed: e_plus, host, path, degenerate: true });
    };
    let first_set = &sets[first.set];
    let (v, v2) = match (first_set.binary_search(&a).is_ok(), first_set.binary_search(&b).is_ok()) {
        (true, false) => (a, b),
        (false, true) => (b, a),
        _ => return Err(step("step 1", "first deleted set does not split the edge".into())),
    };

    let allowed1 = |i: usize| sets[i].binary_search(&v2).is_err();
    let (h1_hat, _) = prune_core(&h1, sets, &allowed1, Rule::First);
    let kv = h1.path(root, v).ok_or_else(|| step("step 3", "no root path to v".into()))?;
    let pos = kv
        .iter()
        .rposition(|&x| h1_hat.contains(x))
        .ok_or_else(|| step("step 3", "root was pruned".into()))?;
    if pos + 1 >= kv.len() {
        return Err(step("step 3", "v survived pruning".into()));
    }
    let (u, u2) = (kv[pos], kv[pos + 1]);
    let e = h1.edge_between(u, u2).unwrap();
    if !cycle.contains(&e) {
        return Err(step("step 3", "chosen edge is not on the cycle".into()));
    }

    let h2 = h_hat.without_edge(e);
    if !h2.is_pruned_with(sets.iter().filter(|s| s.binary_search(&u2).is_err())) {
        return Err(step("step 4", "H - e is not pruned away from u'".into()));
    }
    let (mid, log1) = prune_core(&h2, sets, &allowed1, Rule::Minimal);
    let (rest, log2) = prune_core(&mid, sets, &|_| true, Rule::Minimal);
    let mut log = log1;
    log.extend(log2);
    let path = SubsetPath::from_log(log, &rest);
    verify_subset_path(&h2, sets, &path).map_err(|err| step("step 5", err.to_string()))?;

    let (pa, pb) = (path.part_of(a).unwrap(), path.part_of(b).unwrap());
    let i = pa.min(pb);
    if pa.abs_diff(pb) != 1 {
        return Err(step("links", "e+ does not join consecutive parts".into()));
    }
    let (pu, pu2) = (path.part_of(u).unwrap(), path.part_of(u2).unwrap());
    if pu.min(pu2) != 0 || pu.max(pu2) < i + 1 {
        return Err(step("links", "e does not join D1 to a part after e+".into()));
    }
    Ok(EdgeCasePath { removed: e, host: h2, path, degenerate: false })
}
