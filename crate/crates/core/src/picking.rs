//! Picking exactly `k` vertices from a threshold tuple.
//!
//! The two growth runs of the tuple give trees `T₋` (fewer than `k`
//! vertices after pruning) and `T₊` (at least `k`). Their union is pruned,
//! its deletions are traced as a subset path, and the path is cut inside one
//! processed set `W`, walking down the binary family of `T₋`'s run to take
//! exactly the missing number of vertices.

use std::fmt::Write as _;

use crate::error::{internal, Error, Result};
use crate::growth::{Event, GrowthConfig, GrowthOutput, GrowthState};
use crate::instance::{Instance, Tree};
use crate::laminar::{fmt_set, LaminarFamily, SetId};
use crate::numeric::Rational;
use crate::pruning::{pp_run, subset_path_edge_case, subset_path_subset_case, PruneGraph, SubsetPath};
use crate::threshold::gw_run;

#[derive(Clone, Debug)]
pub struct PickContext {
    pub lambda: Rational,
    pub tau_minus: Vec<Event>,
    pub tau_plus: Vec<Event>,
    pub minus: GrowthOutput,
    pub plus: GrowthOutput,
    pub sigma: Event,
    /// Processed sets of the `τ₋` run in processing order; path witnesses
    /// index into this list.
    pub sets_minus: Vec<Vec<usize>>,
    /// `Ĥ`, or `Ĥ − e` when the last list entry is an edge.
    pub host: PruneGraph,
    /// `(e₊, e)` in the edge case, as local edge indices.
    pub cycle_edges: Option<(usize, usize)>,
    pub degenerate: bool,
    pub path: SubsetPath,
    /// 1-based index of the cut part.
    pub t: usize,
    pub m: usize,
    /// `W = B_t` in the family of the `τ₋` run.
    pub w_set: SetId,
    pub entry: usize,
    pub picked: Vec<Vec<usize>>,
    /// The last picked vertex, unless another picked vertex is needed for
    /// the degree-one and containment properties.
    pub w: usize,
    pub tree: Tree,
}

impl PickContext {
    pub fn w_vertices(&self) -> &[usize] {
        &self.minus.family.set(self.w_set).vertices
    }

    pub fn dump(&self, inst: &Instance) -> String {
        let labels = inst.labels();
        let lab = |vs: &[usize]| fmt_set(vs.iter().map(|&v| labels[v]));
        let mut out = String::new();
        let kind = if self.sigma.is_edge() { "edge" } else { "subset" };
        writeln!(out, "sigma {} ({kind})", self.sigma).unwrap();
        if let Some((ep, e)) = self.cycle_edges {
            writeln!(out, "cycle e+=E#{} e=E#{}{}", inst.edge(ep).id, inst.edge(e).id, if self.degenerate { " degenerate" } else { "" })
                .unwrap();
        }
        writeln!(out, "path {}", self.path.dump(&self.sets_minus, labels)).unwrap();
        writeln!(out, "t={} m={} W={} entry={}", self.t, self.m, lab(self.w_vertices()), labels[self.entry]).unwrap();
        let picked: Vec<String> = self.picked.iter().map(|p| lab(p)).collect();
        writeln!(out, "picked {} w={}", picked.join(" "), labels[self.w]).unwrap();
        out
    }
}

/// Largest 1-based `t` with `|D_t ∪ … ∪ D_{ℓ+1}| ≥ k`, and the number of
/// vertices `m` still needed from `D_t`.
pub fn choose_t(sizes: &[usize], k: usize) -> Result<(usize, usize)> {
    let last = *sizes.last().ok_or_else(|| Error::Precondition("empty subset path".into()))?;
    if last >= k || sizes.iter().sum::<usize>() < k {
        return Err(Error::Precondition("parts do not straddle k".into()));
    }
    let mut suffix = last;
    for t in (1..sizes.len()).rev() {
        let with = suffix + sizes[t - 1];
        if with >= k {
            return Ok((t, k - suffix));
        }
        suffix = with;
    }
    unreachable!()
}

/// Walks down from `w_set` taking exactly `m` vertices of `d_t`, entering
/// each step through `v`.
pub fn pick_vertices(
    fam: &LaminarFamily<Rational>,
    host: &PruneGraph,
    d_t: &[usize],
    w_set: SetId,
    entry: usize,
    m: usize,
) -> Result<Vec<Vec<usize>>> {
    let mut in_dt = vec![false; host.n()];
    for &v in d_t {
        in_dt[v] = true;
    }
    let count = |id: SetId| fam.set(id).vertices.iter().filter(|&&v| in_dt[v]).count();
    if !in_dt[entry] || !fam.set(w_set).contains(entry) || m == 0 || count(w_set) < m {
        return Err(Error::Precondition("picking starts outside W ∩ D_t".into()));
    }
    let (mut s, mut v, mut m) = (w_set, entry, m);
    let mut parts = Vec::new();
    while m > 1 {
        let (c1, c2) = fam.children_of(s).ok_or_else(|| internal("picking reached a singleton with m > 1"))?;
        let (s1, s2) = if fam.set(c1).contains(v) { (c1, c2) } else { (c2, c1) };
        let n1 = count(s1);
        if n1 >= m {
            s = s1;
            continue;
        }
        let (a, b) = (&fam.set(s1), &fam.set(s2));
        let v2 = host
            .edges()
            .iter()
            .find_map(|&(x, y, _)| {
                if !in_dt[x] || !in_dt[y] {
                    None
                } else if a.contains(x) && b.contains(y) {
                    Some(y)
                } else if a.contains(y) && b.contains(x) {
                    Some(x)
                } else {
                    None
                }
            })
            .ok_or_else(|| internal("no host edge between the two children"))?;
        let part: Vec<usize> = a.vertices.iter().copied().filter(|&x| in_dt[x]).collect();
        if part.is_empty() {
            return Err(internal("empty picked part"));
        }
        m -= part.len();
        parts.push(part);
        s = s2;
        v = v2;
    }
    parts.push(vec![v]);
    Ok(parts)
}

/// Subgraph of `host` induced by the union of `parts`, checked to be a tree
/// through the root.
pub fn assemble_tree(host: &PruneGraph, parts: &[Vec<usize>], root: usize) -> Result<Tree> {
    let mut vs: Vec<usize> = parts.iter().flatten().copied().collect();
    vs.sort_unstable();
    if vs.windows(2).any(|w| w[0] == w[1]) {
        return Err(internal("parts overlap"));
    }
    let sub = host.induced(&vs);
    if sub.num_vertices() != vs.len() || !sub.contains(root) {
        return Err(internal("parts leave the host or miss the root"));
    }
    if !sub.is_connected() || sub.edges().len() + 1 != vs.len() {
        return Err(internal("induced subgraph is not a tree"));
    }
    Ok(Tree::new(vs, sub.edge_ids()))
}

pub fn pv_run(inst: &Instance, lambda: &Rational, tau: &[Event]) -> Result<PickContext> {
    let k = inst.k();
    let sigma = tau.last().cloned().ok_or_else(|| Error::Precondition("empty list".into()))?;
    let short = &tau[..tau.len() - 1];
    let full = gw_run(inst, lambda, tau)?;
    let part = gw_run(inst, lambda, short)?;
    let (minus, plus, tau_minus, tau_plus) = if full.spans() >= k {
        if part.spans() >= k {
            return Err(Error::Precondition("not a threshold tuple: both sides span k".into()));
        }
        (part, full, short.to_vec(), tau.to_vec())
    } else {
        if part.spans() < k {
            return Err(Error::Precondition("not a threshold tuple: neither side spans k".into()));
        }
        (full, part, tau.to_vec(), short.to_vec())
    };
    let (minus, plus) = (minus.gp, plus.gp);
    let sets_minus = minus.processed_sets();
    let sets_plus = plus.processed_sets();
    let mut union: Vec<usize> = minus.tree.edges.iter().chain(&plus.tree.edges).copied().collect();
    union.sort_unstable();
    union.dedup();
    let h_hat = pp_run(&PruneGraph::from_edges(inst, &union), &sets_plus);

    let (host, path, cycle_edges, degenerate) = if sigma.is_edge() {
        let extra: Vec<usize> = plus.tree.edges.iter().copied().filter(|e| !minus.tree.edges.contains(e)).collect();
        let [e_plus] = extra[..] else {
            return Err(internal("the two trees do not differ in exactly one edge"));
        };
        let out = subset_path_edge_case(&h_hat, &sets_minus, e_plus, inst.root())?;
        (out.host, out.path, Some((e_plus, out.removed)), out.degenerate)
    } else {
        let path = subset_path_subset_case(&h_hat, &sets_minus)?;
        (h_hat, path, None, false)
    };

    let sizes: Vec<usize> = path.parts.iter().map(|p| p.len()).collect();
    let (t, m) = choose_t(&sizes, k)?;
    let w_set = minus.processed[path.witnesses[t - 1]];
    let entry = path.links[t - 1];
    let picked = pick_vertices(&minus.family, &host, &path.parts[t - 1], w_set, entry, m)?;
    let w = picked.last().unwrap()[0];
    let mut seq: Vec<Vec<usize>> = picked.iter().rev().cloned().collect();
    seq.extend(path.parts[t..].iter().cloned());
    let tree = assemble_tree(&host, &seq, inst.root())?;
    if tree.vertices.len() != k {
        return Err(internal(format!("picked tree spans {} vertices instead of {k}", tree.vertices.len())));
    }
    let mut ctx = PickContext {
        lambda: lambda.clone(),
        tau_minus,
        tau_plus,
        minus,
        plus,
        sigma,
        sets_minus,
        host,
        cycle_edges,
        degenerate,
        path,
        t,
        m,
        w_set,
        entry,
        picked,
        w,
        tree,
    };
    // The walk-down can leave a processed set inside a wholesale part with a
    // single tree edge once its sibling neighbour is dropped. Any picked
    // vertex satisfying both w-properties serves the analysis equally.
    if !w_properties_hold(inst, &ctx) {
        let cands: Vec<usize> = ctx.picked.iter().rev().flatten().copied().filter(|&v| v != w).collect();
        for v in cands {
            ctx.w = v;
            if w_properties_hold(inst, &ctx) {
                return Ok(ctx);
            }
        }
        ctx.w = w;
    }
    Ok(ctx)
}

fn w_properties_hold(inst: &Instance, ctx: &PickContext) -> bool {
    verify_w_in_l(ctx).is_ok() && verify_degree_one_contains_w(inst, ctx).is_ok()
}

/// Every set of the `τ₋` family inside `W` that meets `V(T)` and an
/// unprocessed-away vertex of `W ∖ V(T)` contains `w`.
pub fn verify_w_in_l(ctx: &PickContext) -> Result<()> {
    let fam = &ctx.minus.family;
    let w_vs = ctx.w_vertices();
    let outside: Vec<usize> = w_vs.iter().copied().filter(|&v| !ctx.tree.contains(v)).collect();
    let covered = |v: usize| {
        ctx.sets_minus
            .iter()
            .any(|b| b.contains(&v) && b.iter().all(|x| outside.binary_search(x).is_ok()))
    };
    for s in fam.sets() {
        if !s.vertices.iter().all(|v| w_vs.binary_search(v).is_ok()) {
            continue;
        }
        let meets_t = s.vertices.iter().any(|&v| ctx.tree.contains(v));
        let loose = s.vertices.iter().any(|&v| !ctx.tree.contains(v) && !covered(v));
        if meets_t && loose && !s.contains(ctx.w) {
            return Err(internal(format!("set {} misses w", fmt_set(s.vertices.iter().copied()))));
        }
    }
    Ok(())
}

/// Every processed set of the `τ₋` run with one edge of `T` leaving it
/// contains `w`.
pub fn verify_degree_one_contains_w(inst: &Instance, ctx: &PickContext) -> Result<()> {
    let t = PruneGraph::from_edges(inst, &ctx.tree.edges);
    for b in &ctx.sets_minus {
        if t.degree(b) == 1 && b.binary_search(&ctx.w).is_err() {
            return Err(internal(format!("degree-one set {} misses w", fmt_set(b.iter().copied()))));
        }
    }
    Ok(())
}

/// Replays the `τ₋` run and returns the largest excess of
/// `Σ_{A∈𝓐} |δ_T(A)|` over `2(|𝓐| − |𝓐_w[W]|)` across iterations, where
/// `𝓐` is the active sets meeting `V(T)`. Never positive when the bound
/// holds.
pub fn degree_bound_excess(
    inst: &Instance,
    lambda: &Rational,
    tau_minus: &[Event],
    tree: &Tree,
    w_vertices: &[usize],
    w: usize,
) -> Result<i64> {
    let mut worst = i64::MIN;
    let mut st = GrowthState::new(inst, lambda.clone());
    st.run_observed(tau_minus, &GrowthConfig::default(), &mut |s| {
        let fam = s.family();
        let (mut lhs, mut na, mut naw) = (0i64, 0i64, 0i64);
        for id in s.active_sets() {
            let set = fam.set(id);
            if !set.vertices.iter().any(|&v| tree.contains(v)) {
                continue;
            }
            na += 1;
            if set.contains(w) && set.vertices.iter().all(|v| w_vertices.binary_search(v).is_ok()) {
                naw += 1;
            }
            lhs += tree
                .edges
                .iter()
                .filter(|&&j| set.contains(inst.edge(j).u) != set.contains(inst.edge(j).v))
                .count() as i64;
        }
        worst = worst.max(lhs - 2 * (na - naw));
    })?;
    Ok(if worst == i64::MIN { 0 } else { worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    fn int(x: i64) -> Rational {
        Rational::from_integer(x)
    }

    #[test]
    fn t_choice() {
        assert_eq!(choose_t(&[1, 1], 2).unwrap(), (1, 1));
        assert_eq!(choose_t(&[3, 2, 4], 5).unwrap(), (2, 1));
        assert_eq!(choose_t(&[3, 2, 4], 7).unwrap(), (1, 1));
        assert_eq!(choose_t(&[3, 2, 4], 9).unwrap(), (1, 3));
        assert!(choose_t(&[3, 2, 4], 4).is_err());
        assert!(choose_t(&[3, 2, 4], 10).is_err());
    }

    #[test]
    fn ex_a_picking() {
        let inst = parse_instance("kpcst 1\nn 2 m 1\nroot 0\nk 2\npenalties inf 1\ne 0 1 4\n").unwrap();
        let ctx = pv_run(&inst, &int(1), &[Event::Subset(vec![1])]).unwrap();
        assert_eq!(ctx.tree, Tree::new(vec![0, 1], vec![0]));
        assert_eq!(ctx.picked, vec![vec![1]]);
        assert_eq!((ctx.t, ctx.m, ctx.w, ctx.entry), (1, 1, 1, 1));
        assert_eq!(ctx.w_vertices(), &[1]);
        assert_eq!(ctx.tau_minus, vec![Event::Subset(vec![1])]);
        verify_w_in_l(&ctx).unwrap();
        verify_degree_one_contains_w(&inst, &ctx).unwrap();
        let excess = degree_bound_excess(&inst, &ctx.lambda, &ctx.tau_minus, &ctx.tree, ctx.w_vertices(), ctx.w);
        assert!(excess.unwrap() <= 0);
        assert!(pv_run(&inst, &int(0), &[Event::Subset(vec![1])]).is_err());
    }

    #[test]
    fn assembly() {
        let h = PruneGraph::new(3, &[0, 1, 2], &[(0, 1, 0), (1, 2, 1)]);
        assert_eq!(assemble_tree(&h, &[vec![0]], 0).unwrap(), Tree::singleton(0));
        assert_eq!(assemble_tree(&h, &[vec![1], vec![0]], 0).unwrap(), Tree::new(vec![0, 1], vec![0]));
        assert!(assemble_tree(&h, &[vec![2], vec![0]], 0).is_err());
    }
}
