//! The outer driver and run certificates.
//!
//! Each outer iteration either accepts the pruned tree at potential zero
//! (when it already spans `k` vertices) or finds a threshold tuple and picks
//! a `k`-vertex tree from it, then shrinks the graph to the root side of the
//! top split of the family. The cheapest stored tree on the input instance
//! wins.

use std::fmt;

use crate::error::{internal, Error, Result};
use crate::exec::Exec;
use crate::growth::{gp_run, Event};
use crate::instance::{edge_cost, penalty_cost, Instance, Tree};
use crate::laminar::LaminarFamily;
use crate::numeric::Rational;
use crate::picking::{degree_bound_excess, pv_run};
use crate::threshold::{gw_run, ts_run, TsConfig};

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub certificates: bool,
    /// Run the threshold search in check mode.
    pub check: bool,
    pub exec: Exec,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { certificates: true, check: false, exec: Exec::Auto }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Gw0,
    Pv,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Gw0 => "GW0",
            Branch::Pv => "PV",
        })
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GW0" => Ok(Branch::Gw0),
            "PV" => Ok(Branch::Pv),
            _ => Err(Error::Parse { line: 0, msg: format!("unknown branch `{s}`") }),
        }
    }
}

/// `lhs ≤ rhs`, both exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub name: String,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl Inequality {
    fn new(name: &str, lhs: Rational, rhs: Rational) -> Self {
        Inequality { name: name.into(), lhs, rhs }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Everything needed to re-derive the analysis bounds of one stored tree.
/// Vertex and edge ids are original.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub iteration: usize,
    pub branch: Branch,
    pub lambda: Rational,
    /// The list of the run whose duals are certified (`τ₋` for PV).
    pub tau: Vec<Event>,
    pub graph: Vec<usize>,
    pub tree: Tree,
    /// `W` and `w` for the PV branch.
    pub w_set: Option<Vec<usize>>,
    pub w: Option<usize>,
    pub y: Vec<(Vec<usize>, Rational)>,
    pub inequalities: Vec<Inequality>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.inequalities.iter().all(Inequality::holds)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `|V(G)|` at the start of the iteration.
    pub n: usize,
    pub branch: Branch,
    pub lambda: Option<Rational>,
    pub tau: Option<Vec<Event>>,
    /// Original ids.
    pub tree: Tree,
    pub objective: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    /// Original ids.
    pub tree: Tree,
    pub objective: Rational,
    pub edge_cost: Rational,
    pub penalty_cost: Rational,
    pub iterations: Vec<IterationRecord>,
    /// Index into `iterations` of the returned tree.
    pub chosen: usize,
    pub certificates: Vec<Certificate>,
}

/// Maps a tree in original ids to `inst`'s local ids.
pub fn localize_tree(inst: &Instance, t: &Tree) -> Result<Tree> {
    let vs = t
        .vertices
        .iter()
        .map(|&v| inst.local_vertex(v).ok_or_else(|| Error::Precondition(format!("unknown vertex {v}"))))
        .collect::<Result<Vec<_>>>()?;
    let es = t
        .edges
        .iter()
        .map(|&e| inst.local_edge(e).ok_or_else(|| Error::Precondition(format!("unknown edge {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Tree::new(vs, es))
}

pub fn solve(inst: &Instance) -> Result<Solution> {
    solve_with(inst, &SolveOptions::default())
}

pub fn solve_with(inst: &Instance, opts: &SolveOptions) -> Result<Solution> {
    let k = inst.k();
    let mut g = inst.clone();
    let mut iterations = Vec::new();
    let mut certificates = Vec::new();
    let zero = Rational::zero();
    while g.n() >= k {
        let iteration = iterations.len() + 1;
        let gw0 = gw_run(&g, &zero, &[])?;
        if gw0.spans() >= k {
            let tree = gw0.tree();
            if opts.certificates {
                certificates.push(certify(&g, iteration, Branch::Gw0, &zero, &[], &gw0.gp.family, &tree, None)?);
            }
            iterations.push(record(inst, &g, iteration, Branch::Gw0, None, None, &tree)?);
            break;
        }
        let ts = ts_run(&g, &TsConfig { check: opts.check, exec: opts.exec })?;
        let ctx = pv_run(&g, &ts.lambda, &ts.tau)?;
        if opts.certificates {
            let w = Some((ctx.w_vertices().to_vec(), ctx.w));
            certificates.push(certify(&g, iteration, Branch::Pv, &ts.lambda, &ctx.tau_minus, &ctx.minus.family, &ctx.tree, w)?);
        }
        iterations.push(record(inst, &g, iteration, Branch::Pv, Some(ts.lambda.clone()), Some(ts.tau.clone()), &ctx.tree)?);
        g = reduce_step(&g, &ctx.minus.family)?;
    }
    let chosen = (0..iterations.len())
        .min_by(|&a, &b| iterations[a].objective.cmp(&iterations[b].objective).then(a.cmp(&b)))
        .ok_or_else(|| internal("no tree was stored"))?;
    let tree = iterations[chosen].tree.clone();
    let local = localize_tree(inst, &tree)?;
    Ok(Solution {
        objective: iterations[chosen].objective.clone(),
        edge_cost: edge_cost(inst, &local),
        penalty_cost: penalty_cost(inst, &local),
        tree,
        iterations,
        chosen,
        certificates,
    })
}

fn record(
    inst: &Instance,
    g: &Instance,
    iteration: usize,
    branch: Branch,
    lambda: Option<Rational>,
    tau: Option<Vec<Event>>,
    tree: &Tree,
) -> Result<IterationRecord> {
    let lifted = g.lift_tree(tree);
    let objective = crate::instance::objective(inst, &localize_tree(inst, &lifted)?)?;
    Ok(IterationRecord { iteration, n: g.n(), branch, lambda, tau, tree: lifted, objective })
}

/// Restricts `g` to the child of the top family set that holds the root.
pub fn reduce_step(g: &Instance, fam: &LaminarFamily<Rational>) -> Result<Instance> {
    let top = fam
        .sets()
        .iter()
        .position(|s| s.vertices.len() == g.n())
        .ok_or_else(|| internal("family has no top set"))?;
    let (a, b) = fam.children_of(top).ok_or_else(|| internal("top set has no proper subsets"))?;
    let lr = if fam.set(a).contains_root { a } else { b };
    g.induce_local(&fam.set(lr).vertices)
}

/// Sums of duals used by the bounds.
struct Duals<'a> {
    fam: &'a LaminarFamily<Rational>,
}

impl Duals<'_> {
    /// `Σ y_L` over `L` meeting `s` without containing it, optionally
    /// skipping root sets.
    fn crossing(&self, s: &[bool], skip_root: bool) -> Rational {
        let total = s.iter().filter(|&&x| x).count();
        self.fam
            .sets()
            .iter()
            .filter(|l| !(skip_root && l.contains_root))
            .filter(|l| {
                let inside = l.vertices.iter().filter(|&&v| s[v]).count();
                inside > 0 && inside < total
            })
            .map(|l| &l.y)
            .sum()
    }

    /// `Σ y_L` over `L ⊆ s`.
    fn inside(&self, s: &[bool]) -> Rational {
        self.fam.sets().iter().filter(|l| l.vertices.iter().all(|&v| s[v])).map(|l| &l.y).sum()
    }

    /// `Σ y_L` over `L ⊆ W` with `w ∈ L`.
    fn at_w(&self, w_set: &[usize], w: usize) -> Rational {
        self.fam
            .sets()
            .iter()
            .filter(|l| l.contains(w) && l.vertices.iter().all(|v| w_set.binary_search(v).is_ok()))
            .map(|l| &l.y)
            .sum()
    }

    fn load(&self, u: usize, v: usize) -> Rational {
        self.fam.sets().iter().filter(|l| l.contains(u) != l.contains(v)).map(|l| &l.y).sum()
    }
}

/// Computes the inequalities of one stored tree; `tree` and `W` are local to
/// `g`. Fails if any of them is violated.
#[allow(clippy::too_many_arguments)]
pub fn certify(
    g: &Instance,
    iteration: usize,
    branch: Branch,
    lambda: &Rational,
    tau: &[Event],
    fam: &LaminarFamily<Rational>,
    tree: &Tree,
    w: Option<(Vec<usize>, usize)>,
) -> Result<Certificate> {
    let ineqs = inequalities(g, branch, lambda, tau, fam, tree, w.as_ref())?;
    let labels = g.labels();
    let cert = Certificate {
        iteration,
        branch,
        lambda: lambda.clone(),
        tau: tau.to_vec(),
        graph: labels.to_vec(),
        tree: g.lift_tree(tree),
        w_set: w.as_ref().map(|(ws, _)| ws.iter().map(|&v| labels[v]).collect()),
        w: w.as_ref().map(|&(_, x)| labels[x]),
        y: fam.y_support().into_iter().map(|(vs, y)| (vs.into_iter().map(|v| labels[v]).collect(), y)).collect(),
        inequalities: ineqs,
    };
    if let Some(bad) = cert.inequalities.iter().find(|i| !i.holds()) {
        return Err(Error::Certificate { name: bad.name.clone(), lhs: bad.lhs.to_string(), rhs: bad.rhs.to_string() });
    }
    Ok(cert)
}

fn inequalities(
    g: &Instance,
    branch: Branch,
    lambda: &Rational,
    tau: &[Event],
    fam: &LaminarFamily<Rational>,
    tree: &Tree,
    w: Option<&(Vec<usize>, usize)>,
) -> Result<Vec<Inequality>> {
    let n = g.n();
    let d = Duals { fam };
    let in_t: Vec<bool> = (0..n).map(|v| tree.contains(v)).collect();
    let out_t: Vec<bool> = in_t.iter().map(|&x| !x).collect();
    let all = vec![true; n];
    let cost = edge_cost(g, tree);
    let slack: Rational = tree
        .edges
        .iter()
        .map(|&j| {
            let e = g.edge(j);
            &e.cost - &d.load(e.u, e.v)
        })
        .sum();
    let mut out = vec![Inequality::new("tight_edges", slack, Rational::zero())];
    let unspanned = (0..n).filter(|&v| !in_t[v]);
    let penalty: Rational = unspanned.clone().map(|v| g.penalty(v)).sum();
    match branch {
        Branch::Gw0 => {
            out.push(Inequality::new("gw0_edge", cost, d.crossing(&in_t, true).mul_int(2)));
            out.push(Inequality::new("gw0_penalty", penalty, d.inside(&out_t)));
        }
        Branch::Pv => {
            let (w_set, w) = w.ok_or_else(|| internal("PV certificate without W"))?;
            let yw = d.at_w(w_set, *w);
            let penalty_l = penalty + lambda.mul_int(unspanned.count() as i64);
            let total = d.crossing(&all, false).mul_int(2);
            out.push(Inequality::new("pv_edge", cost.clone(), &d.crossing(&in_t, false).mul_int(2) - &yw.mul_int(2)));
            out.push(Inequality::new("pv_penalty", penalty_l.clone(), &d.inside(&out_t) + &yw));
            out.push(Inequality::new("pv_combined", &cost + &penalty_l.mul_int(2), total));
            let excess = degree_bound_excess(g, lambda, tau, tree, w_set, *w)?;
            out.push(Inequality::new("pv_degree", Rational::from_integer(excess), Rational::zero()));
        }
    }
    Ok(out)
}

/// Re-derives a certificate from the input instance: rebuilds the graph,
/// reruns the growth phase, compares the duals and recomputes the bounds.
pub fn check_certificate(inst: &Instance, cert: &Certificate) -> Result<()> {
    let fail = |m: String| Err(Error::Inconsistent(m));
    let g = crate::instance::induce_subgraph(inst, &cert.graph)?;
    let out = gp_run(&g, &cert.lambda, &cert.tau)?;
    let labels = g.labels();
    let y: Vec<(Vec<usize>, Rational)> = out
        .family
        .y_support()
        .into_iter()
        .map(|(vs, y)| (vs.into_iter().map(|v| labels[v]).collect(), y))
        .collect();
    if y != cert.y {
        return fail(format!("certificate {}: dual values do not match a fresh run", cert.iteration));
    }
    let tree = localize_tree(&g, &cert.tree)?;
    crate::instance::check_tree(&g, &tree)?;
    let w = match (&cert.w_set, cert.w) {
        (Some(ws), Some(x)) => {
            let ws: Vec<usize> = ws.iter().filter_map(|&v| g.local_vertex(v)).collect();
            let x = g.local_vertex(x).ok_or_else(|| Error::Precondition("w is not in the graph".into()))?;
            if !out.processed_sets().contains(&ws) || ws.binary_search(&x).is_err() || !tree.contains(x) {
                return fail(format!("certificate {}: W or w is inconsistent with the run", cert.iteration));
            }
            Some((ws, x))
        }
        _ => None,
    };
    if cert.branch == Branch::Pv && tree.vertices.len() != inst.k() {
        return fail(format!("certificate {}: picked tree does not span k vertices", cert.iteration));
    }
    let ineqs = inequalities(&g, cert.branch, &cert.lambda, &cert.tau, &out.family, &tree, w.as_ref())?;
    if ineqs != cert.inequalities {
        return fail(format!("certificate {}: recorded inequalities differ from recomputed ones", cert.iteration));
    }
    if let Some(bad) = ineqs.iter().find(|i| !i.holds()) {
        return Err(Error::Certificate { name: bad.name.clone(), lhs: bad.lhs.to_string(), rhs: bad.rhs.to_string() });
    }
    Ok(())
}

/// `c(E(T)) + 2π(V∖V(T)) ≤ 2·opt`.
pub fn check_ratio(sol: &Solution, opt: &Rational) -> bool {
    &sol.edge_cost + &sol.penalty_cost.mul_int(2) <= opt.mul_int(2)
}

/// Lower bound on any tree `t_star` from duals respecting `c` and `π^λ`:
/// with `L*` the smallest family set containing `V(T*)`,
/// `Σ_{L∈𝓛(L*)} y_L − λ|L*∖V(T*)| ≤ c(E(T*)) + π(L*∖V(T*))`.
pub fn verify_opt_lower_bound(inst: &Instance, fam: &LaminarFamily<Rational>, lambda: &Rational, t_star: &Tree) -> bool {
    let Some(l_star) = fam
        .sets()
        .iter()
        .filter(|l| t_star.vertices.iter().all(|&v| l.contains(v)))
        .min_by_key(|l| l.vertices.len())
    else {
        return false;
    };
    let mut in_l = vec![false; inst.n()];
    for &v in &l_star.vertices {
        in_l[v] = true;
    }
    let d = Duals { fam };
    let rest: Vec<usize> = l_star.vertices.iter().copied().filter(|&v| !t_star.contains(v)).collect();
    let lhs = &d.crossing(&in_l, false) - &lambda.mul_int(rest.len() as i64);
    let rhs = edge_cost(inst, t_star) + rest.iter().map(|&v| inst.penalty(v)).sum::<Rational>();
    lhs <= rhs
}
