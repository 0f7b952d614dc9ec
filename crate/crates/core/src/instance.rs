//! Rooted instances, the `.kpcst` text format, and reductions.
//!
//! Internally every instance works over dense local indices `0..n` for
//! vertices and `0..m` for edges. A reduced instance remembers the original
//! vertex ids (`labels`) and original edge ids; both lists stay increasing,
//! so comparing local indices gives the same answer as comparing ids.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::{ExtendedRational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub cost: Rational,
    /// Input index in the original instance.
    pub id: usize,
}

/// Unvalidated instance data, as read from text or built by hand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawInstance {
    pub n: usize,
    pub root: usize,
    pub k: usize,
    pub penalties: Vec<ExtendedRational>,
    pub edges: Vec<(usize, usize, Rational)>,
}

/// A validated instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    labels: Vec<usize>,
    edges: Vec<Edge>,
    penalties: Vec<ExtendedRational>,
    root: usize,
    k: usize,
    adj: Vec<Vec<(usize, usize)>>,
}

/// Vertex set plus edge set; vertices and edges are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Tree {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Tree {
    pub fn new(mut vertices: Vec<usize>, mut edges: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        edges.sort_unstable();
        edges.dedup();
        Tree { vertices, edges }
    }

    pub fn singleton(v: usize) -> Self {
        Tree { vertices: vec![v], edges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

pub fn validate_instance(raw: &RawInstance) -> std::result::Result<(), Vec<String>> {
    let mut errs = Vec::new();
    let n = raw.n;
    if n == 0 {
        errs.push("empty vertex set".to_string());
    }
    if raw.penalties.len() != n {
        errs.push(format!("expected {n} penalties, found {}", raw.penalties.len()));
    }
    if raw.root >= n {
        errs.push(format!("root {} out of range", raw.root));
    }
    if raw.k > n {
        errs.push("k exceeds |V|".to_string());
    }
    for (v, p) in raw.penalties.iter().enumerate() {
        match p {
            ExtendedRational::Finite(x) if x.is_negative() => {
                errs.push(format!("negative penalty on vertex {v}"));
            }
            ExtendedRational::Finite(_) if v == raw.root => {
                errs.push("root penalty must be inf".to_string());
            }
            ExtendedRational::PositiveInfinity if v != raw.root => {
                errs.push(format!("infinite penalty on non-root vertex {v}"));
            }
            _ => {}
        }
    }
    let mut seen = std::collections::HashSet::new();
    let mut dsu: Vec<usize> = (0..n).collect();
    fn find(d: &mut [usize], mut x: usize) -> usize {
        while d[x] != x {
            d[x] = d[d[x]];
            x = d[x];
        }
        x
    }
    for (i, (u, v, c)) in raw.edges.iter().enumerate() {
        if *u >= n || *v >= n {
            errs.push(format!("edge {i} has an endpoint out of range"));
            continue;
        }
        if u == v {
            errs.push(format!("self-loop at edge {i}"));
            continue;
        }
        if c.is_negative() {
            errs.push(format!("negative cost on edge {i}"));
        }
        if !seen.insert((*u.min(v), *u.max(v))) {
            errs.push(format!("duplicate edge {i} ({u},{v})"));
        }
        let (a, b) = (find(&mut dsu, *u), find(&mut dsu, *v));
        dsu[a] = b;
    }
    if n > 0 && errs.is_empty() {
        let r = find(&mut dsu, 0);
        if (1..n).any(|v| find(&mut dsu, v) != r) {
            errs.push("disconnected graph".to_string());
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

impl Instance {
    pub fn new(raw: RawInstance) -> Result<Self> {
        validate_instance(&raw).map_err(Error::Invalid)?;
        let edges = raw
            .edges
            .into_iter()
            .enumerate()
            .map(|(id, (u, v, cost))| Edge { u, v, cost, id })
            .collect();
        Ok(Self::assemble((0..raw.n).collect(), edges, raw.penalties, raw.root, raw.k))
    }

    fn assemble(
        labels: Vec<usize>,
        edges: Vec<Edge>,
        penalties: Vec<ExtendedRational>,
        root: usize,
        k: usize,
    ) -> Self {
        let mut adj = vec![Vec::new(); labels.len()];
        for (j, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, j));
            adj[e.v].push((e.u, j));
        }
        Instance { labels, edges, penalties, root, k, adj }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, j: usize) -> &Edge {
        &self.edges[j]
    }

    pub fn penalties(&self) -> &[ExtendedRational] {
        &self.penalties
    }

    /// Finite penalty of a non-root vertex.
    pub fn penalty(&self, v: usize) -> &Rational {
        self.penalties[v].finite().expect("only the root has an infinite penalty")
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// Original id of local vertex `v`.
    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Local index of an original vertex id.
    pub fn local_vertex(&self, label: usize) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    /// Local index of an original edge id.
    pub fn local_edge(&self, id: usize) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn total_cost(&self) -> Rational {
        self.edges.iter().map(|e| &e.cost).sum()
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        if k > self.n() {
            return Err(Error::Invalid(vec!["k exceeds |V|".into()]));
        }
        let mut out = self.clone();
        out.k = k;
        Ok(out)
    }

    /// Maps a tree over local indices to original ids.
    pub fn lift_tree(&self, t: &Tree) -> Tree {
        Tree::new(
            t.vertices.iter().map(|&v| self.labels[v]).collect(),
            t.edges.iter().map(|&j| self.edges[j].id).collect(),
        )
    }

    /// Induced subinstance on local vertices `keep`.
    pub fn induce_local(&self, keep: &[usize]) -> Result<Self> {
        let mut map = vec![usize::MAX; self.n()];
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for (i, &v) in sorted.iter().enumerate() {
            if v >= self.n() {
                return Err(Error::Precondition(format!("vertex {v} out of range")));
            }
            map[v] = i;
        }
        if map[self.root] == usize::MAX {
            return Err(Error::Precondition("root not in S".into()));
        }
        let labels = sorted.iter().map(|&v| self.labels[v]).collect();
        let penalties = sorted.iter().map(|&v| self.penalties[v].clone()).collect();
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| map[e.u] != usize::MAX && map[e.v] != usize::MAX)
            .map(|e| Edge { u: map[e.u], v: map[e.v], cost: e.cost.clone(), id: e.id })
            .collect();
        let out = Self::assemble(labels, edges, penalties, map[self.root], self.k);
        if !out.is_connected() {
            return Err(internal_disconnected());
        }
        Ok(out)
    }

    fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == n
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            n: self.n(),
            root: self.root,
            k: self.k,
            penalties: self.penalties.clone(),
            edges: self.edges.iter().map(|e| (e.u, e.v, e.cost.clone())).collect(),
        }
    }
}

fn internal_disconnected() -> Error {
    Error::Internal("induced subgraph is disconnected".into())
}

/// Induced subinstance on a set of original vertex ids.
pub fn induce_subgraph(inst: &Instance, s: &[usize]) -> Result<Instance> {
    let mut local = Vec::with_capacity(s.len());
    for &label in s {
        match inst.local_vertex(label) {
            Some(v) => local.push(v),
            None => return Err(Error::Precondition(format!("vertex {label} not in instance"))),
        }
    }
    inst.induce_local(&local)
}

/// Checks that `t` is a tree of `inst` containing the root; ids are local.
pub fn check_tree(inst: &Instance, t: &Tree) -> Result<()> {
    let n = inst.n();
    let bad = |m: &str| Err(Error::Precondition(m.to_string()));
    if t.vertices.windows(2).any(|w| w[0] >= w[1]) || t.edges.windows(2).any(|w| w[0] >= w[1]) {
        return bad("tree lists must be sorted and distinct");
    }
    if t.vertices.iter().any(|&v| v >= n) || t.edges.iter().any(|&j| j >= inst.m()) {
        return bad("tree refers to an unknown vertex or edge");
    }
    if !t.contains(inst.root()) {
        return bad("tree does not contain the root");
    }
    if t.edges.len() + 1 != t.vertices.len() {
        return bad("not a tree: wrong edge count");
    }
    let mut dsu: Vec<usize> = (0..n).collect();
    fn find(d: &mut [usize], mut x: usize) -> usize {
        while d[x] != x {
            d[x] = d[d[x]];
            x = d[x];
        }
        x
    }
    for &j in &t.edges {
        let e = inst.edge(j);
        if !t.contains(e.u) || !t.contains(e.v) {
            return bad("tree edge leaves the vertex set");
        }
        let (a, b) = (find(&mut dsu, e.u), find(&mut dsu, e.v));
        if a == b {
            return bad("not a tree: cycle");
        }
        dsu[a] = b;
    }
    Ok(())
}

pub fn edge_cost(inst: &Instance, t: &Tree) -> Rational {
    t.edges.iter().map(|&j| &inst.edge(j).cost).sum()
}

/// Penalties of the vertices of `inst` not spanned by `t`.
pub fn penalty_cost(inst: &Instance, t: &Tree) -> Rational {
    (0..inst.n()).filter(|&v| !t.contains(v)).map(|v| inst.penalty(v)).sum()
}

/// `c(E(T)) + π(V \ V(T))` for a tree given in the instance's own ids.
pub fn objective(inst: &Instance, t: &Tree) -> Result<Rational> {
    check_tree(inst, t)?;
    Ok(edge_cost(inst, t) + penalty_cost(inst, t))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    Instance::new(parse_raw(text)?)
}

/// Parses the text format without validating the instance.
pub fn parse_raw(text: &str) -> Result<RawInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| -> Result<(usize, Vec<&str>)> {
        lines
            .next()
            .map(|(i, l)| (i, l.split_whitespace().collect()))
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("unexpected end of input, expected {what}") })
    };
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let int = |line: usize, s: &str| -> Result<usize> {
        s.parse::<usize>().map_err(|_| perr(line, format!("malformed integer `{s}`")))
    };

    let (ln, tok) = next("header")?;
    if tok != ["kpcst", "1"] {
        return Err(perr(ln, "malformed header, expected `kpcst 1`".into()));
    }
    let (ln, tok) = next("sizes")?;
    if tok.len() != 4 || tok[0] != "n" || tok[2] != "m" {
        return Err(perr(ln, "malformed line, expected `n <n> m <m>`".into()));
    }
    let n = int(ln, tok[1])?;
    let m = int(ln, tok[3])?;
    let (ln, tok) = next("root")?;
    if tok.len() != 2 || tok[0] != "root" {
        return Err(perr(ln, "malformed line, expected `root <id>`".into()));
    }
    let root = int(ln, tok[1])?;
    let (ln, tok) = next("k")?;
    if tok.len() != 2 || tok[0] != "k" {
        return Err(perr(ln, "malformed line, expected `k <k>`".into()));
    }
    let k = int(ln, tok[1])?;
    let (ln, tok) = next("penalties")?;
    if tok.first() != Some(&"penalties") || tok.len() != n + 1 {
        return Err(perr(ln, format!("malformed line, expected `penalties` with {n} values")));
    }
    let penalties = tok[1..]
        .iter()
        .map(|s| s.parse::<ExtendedRational>().map_err(|e| perr(ln, e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, tok) = next("edge")?;
        if tok.len() != 4 || tok[0] != "e" {
            return Err(perr(ln, "malformed line, expected `e <u> <v> <cost>`".into()));
        }
        let cost = tok[3].parse::<Rational>().map_err(|e| perr(ln, e.to_string()))?;
        edges.push((int(ln, tok[1])?, int(ln, tok[2])?, cost));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(perr(ln, "unexpected trailing line".into()));
    }
    Ok(RawInstance { n, root, k, penalties, edges })
}

/// Emits the canonical text form, using local indices as ids.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut s = String::new();
    writeln!(s, "kpcst 1").unwrap();
    writeln!(s, "n {} m {}", inst.n(), inst.m()).unwrap();
    writeln!(s, "root {}", inst.root()).unwrap();
    writeln!(s, "k {}", inst.k()).unwrap();
    s.push_str("penalties");
    for p in inst.penalties() {
        write!(s, " {p}").unwrap();
    }
    s.push('\n');
    for e in inst.edges() {
        writeln!(s, "e {} {} {}", e.u, e.v, e.cost).unwrap();
    }
    s
}

/// Random connected simple instance with integer data and root 0.
pub fn generate_random(
    n: usize,
    m: usize,
    max_cost: u64,
    max_penalty: u64,
    k: usize,
    seed: u64,
) -> Result<Instance> {
    if n == 0 || m + 1 < n || m > n * (n - 1) / 2 {
        return Err(Error::Precondition(format!("no connected simple graph with n={n}, m={m}")));
    }
    if k > n {
        return Err(Error::Precondition("k exceeds |V|".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut present = vec![vec![false; n]; n];
    let mut pairs = Vec::with_capacity(m);
    for i in 1..n {
        let (a, b) = (order[i], order[rng.gen_range(0..i)]);
        present[a][b] = true;
        present[b][a] = true;
        pairs.push((a.min(b), a.max(b)));
    }
    let mut rest: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| !present[u][v]).collect();
    rest.shuffle(&mut rng);
    pairs.extend(rest.into_iter().take(m + 1 - n));
    pairs.shuffle(&mut rng);
    let edges = pairs
        .into_iter()
        .map(|(u, v)| (u, v, Rational::from_integer(rng.gen_range(0..=max_cost) as i64)))
        .collect();
    let penalties = (0..n)
        .map(|v| {
            if v == 0 {
                ExtendedRational::PositiveInfinity
            } else {
                ExtendedRational::Finite(Rational::from_integer(rng.gen_range(0..=max_penalty) as i64))
            }
        })
        .collect();
    Instance::new(RawInstance { n, root: 0, k, penalties, edges })
}
