//! Exhaustive solver for small instances: the cheapest tree on a vertex set
//! `S` is a minimum spanning tree of `G[S]`, so enumerating every `S ∋ r`
//! with `|S| ≥ k` gives the optimum.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::instance::{Instance, Tree};
use crate::numeric::Rational;

pub const DEFAULT_LIMIT: usize = 18;

#[derive(Clone, Debug, PartialEq)]
pub struct ExactResult {
    pub opt: Rational,
    /// Witness over local indices.
    pub tree: Tree,
    /// Vertex sets with `|S| ≥ k` that were examined.
    pub examined: u64,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
}

/// Kruskal over `order` (edge indices sorted by cost, then index).
fn mst_mask(inst: &Instance, order: &[usize], mask: u64) -> Option<(Vec<usize>, Rational)> {
    let inside = |v: usize| mask >> v & 1 == 1;
    let size = mask.count_ones() as usize;
    let mut dsu = Dsu((0..inst.n()).collect());
    let mut edges = Vec::with_capacity(size.saturating_sub(1));
    let mut cost = Rational::zero();
    for &j in order {
        if edges.len() + 1 == size {
            break;
        }
        let e = inst.edge(j);
        if !inside(e.u) || !inside(e.v) {
            continue;
        }
        let (a, b) = (dsu.find(e.u), dsu.find(e.v));
        if a != b {
            dsu.0[a] = b;
            edges.push(j);
            cost += &e.cost;
        }
    }
    (edges.len() + 1 == size).then_some((edges, cost))
}

fn sorted_edges(inst: &Instance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.m()).collect();
    order.sort_by(|&a, &b| inst.edge(a).cost.cmp(&inst.edge(b).cost).then(a.cmp(&b)));
    order
}

/// Minimum spanning tree of `G[S]`, or `None` when `G[S]` is disconnected.
pub fn mst(inst: &Instance, subset: &[usize]) -> Option<(Tree, Rational)> {
    if subset.is_empty() {
        return None;
    }
    let order = sorted_edges(inst);
    let mut inside = vec![false; inst.n()];
    for &v in subset {
        inside[v] = true;
    }
    let mut dsu = Dsu((0..inst.n()).collect());
    let mut edges = Vec::new();
    let mut cost = Rational::zero();
    for j in order {
        let e = inst.edge(j);
        if inside[e.u] && inside[e.v] {
            let (a, b) = (dsu.find(e.u), dsu.find(e.v));
            if a != b {
                dsu.0[a] = b;
                edges.push(j);
                cost += &e.cost;
            }
        }
    }
    let mut vs = subset.to_vec();
    vs.sort_unstable();
    vs.dedup();
    (edges.len() + 1 == vs.len()).then(|| (Tree::new(vs, edges), cost))
}

pub fn exact_solve(inst: &Instance) -> Result<ExactResult> {
    exact_solve_with(inst, DEFAULT_LIMIT, Exec::Auto)
}

pub fn exact_solve_with(inst: &Instance, limit: usize, exec: Exec) -> Result<ExactResult> {
    let n = inst.n();
    if n > limit || n > 62 {
        return Err(Error::OverLimit { n, limit });
    }
    let root = inst.root();
    let k = inst.k().max(1);
    let order = sorted_edges(inst);
    let total_penalty: Rational = (0..n).filter(|&v| v != root).map(|v| inst.penalty(v)).sum();
    // Masks over the non-root vertices, with the root bit spliced in, so
    // that enumeration is in ascending order of the full bitmask.
    let free = (n - 1) as u32;
    let low = (1u64 << root) - 1;
    let splice = |x: u64| (x & low) | 1 << root | (x & !low) << 1;
    let count = 1u64 << free;
    let chunks = 64u64.min(count);
    let per = count.div_ceil(chunks);

    let best = exec.map_range(chunks as usize, |c| {
        let mut best: Option<(Rational, u64)> = None;
        let mut examined = 0u64;
        for x in c as u64 * per..((c as u64 + 1) * per).min(count) {
            let mask = splice(x);
            if (mask.count_ones() as usize) < k {
                continue;
            }
            examined += 1;
            let Some((_, cost)) = mst_mask(inst, &order, mask) else { continue };
            let kept: Rational = (0..n).filter(|&v| v != root && mask >> v & 1 == 1).map(|v| inst.penalty(v)).sum();
            let value = cost + (&total_penalty - &kept);
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, mask));
            }
        }
        (best, examined)
    });
    let examined = best.iter().map(|b| b.1).sum();
    let (opt, mask) = best
        .into_iter()
        .filter_map(|b| b.0)
        .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)))
        .ok_or_else(|| Error::Precondition("no feasible vertex set".into()))?;
    let (edges, _) = mst_mask(inst, &order, mask).unwrap();
    let vertices = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
    Ok(ExactResult { opt, tree: Tree::new(vertices, edges), examined })
}
