//! Threshold search: grow a tie-breaking list until two consecutive lists
//! at one potential straddle `k` spanned vertices.
//!
//! The search keeps one symbolic state for the current list over the
//! current interval `[a, b]`. A concrete run at a potential `p` inside the
//! interval is the symbolic state evaluated at `p` followed by an ordinary
//! continuation, so each probe costs one partial run instead of a full one.

use std::fmt;

use crate::error::{internal, Error, Result};
use crate::exec::Exec;
use crate::growth::{is_respected, parse_tau, Event, GrowthConfig, GrowthOutput, GrowthState};
use crate::instance::{Instance, Tree};
use crate::numeric::{Affine, AffineFn, ExtendedRational, Rational};
use crate::pruning::{pp_run, PruneGraph};

/// Growth followed by pruning.
#[derive(Clone, Debug)]
pub struct GwOutput {
    pub gp: GrowthOutput,
    pub pruned: PruneGraph,
}

impl GwOutput {
    pub fn spans(&self) -> usize {
        self.pruned.num_vertices()
    }

    /// The pruned tree over local indices.
    pub fn tree(&self) -> Tree {
        Tree::new(self.pruned.vertices(), self.pruned.edge_ids())
    }
}

fn prune_output(inst: &Instance, gp: GrowthOutput) -> GwOutput {
    let pruned = pp_run(&PruneGraph::from_edges(inst, &gp.tree.edges), &gp.processed_sets());
    GwOutput { gp, pruned }
}

pub fn gw_run(inst: &Instance, lambda: &Rational, tau: &[Event]) -> Result<GwOutput> {
    let gp = crate::growth::gp_run(inst, lambda, tau)?;
    Ok(prune_output(inst, gp))
}

fn gw_from(inst: &Instance, state: GrowthState<'_, Rational>, tau: &[Event]) -> Result<GwOutput> {
    let gp = state.run(tau, &GrowthConfig::default())?;
    Ok(prune_output(inst, gp))
}

pub fn spans_at_least_k(inst: &Instance, lambda: &Rational, tau: &[Event], k: usize) -> Result<bool> {
    if k == 0 {
        return Ok(true);
    }
    Ok(gw_run(inst, lambda, tau)?.spans() >= k)
}

/// Increase-functions of the object collection after replaying `tau`
/// symbolically.
pub fn increase_functions(inst: &Instance, tau: &[Event]) -> Result<Vec<(Event, AffineFn)>> {
    let mut st = GrowthState::symbolic(inst);
    for ev in tau {
        st.apply(ev)
            .map_err(|e| Error::NotRespected(format!("list not respected on interval: {e}")))?;
    }
    Ok(st.objects())
}

fn finite_lines(q: &[(Event, AffineFn)]) -> Vec<Affine> {
    let mut lines: Vec<Affine> = q.iter().filter_map(|(_, f)| f.as_finite().cloned()).collect();
    lines.sort_by(|x, y| (&x.slope, &x.intercept).cmp(&(&y.slope, &y.intercept)));
    lines.dedup();
    lines
}

/// Potentials in `(a, b)` where the minimum of the finite increase-functions
/// changes from one line to another, ascending.
pub fn diverging_potentials(q: &[(Event, AffineFn)], a: &Rational, b: &Rational) -> Vec<Rational> {
    let lines = finite_lines(q);
    let mut out = Vec::new();
    let Some(mut cur) = lines.iter().min_by(|x, y| (x.eval(a), &x.slope).cmp(&(y.eval(a), &y.slope))) else {
        return out;
    };
    let mut x = a.clone();
    loop {
        // The next line to undercut `cur` has a smaller slope; take the
        // earliest crossing, and among lines crossing there the flattest.
        let mut next: Option<(Rational, &Affine)> = None;
        for l in lines.iter().filter(|l| l.slope < cur.slope) {
            let Some(p) = cur.intersect(l) else { continue };
            if p <= x {
                continue;
            }
            let better = match &next {
                None => true,
                Some((q, m)) => p < *q || (p == *q && l.slope < m.slope),
            };
            if better {
                next = Some((p, l));
            }
        }
        match next {
            Some((p, l)) if p < *b => {
                out.push(p.clone());
                x = p;
                cur = l;
            }
            _ => break,
        }
    }
    out
}

/// Every pairwise crossing of distinct finite lines inside `(a, b)`; a
/// superset of [`diverging_potentials`].
pub fn intersection_candidates(q: &[(Event, AffineFn)], a: &Rational, b: &Rational) -> Vec<Rational> {
    let lines = finite_lines(q);
    let mut out = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if let Some(p) = lines[i].intersect(&lines[j]) {
                if p > *a && p < *b {
                    out.push(p);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Given a predicate that is false at `0` and true at `len - 1`, finds `j`
/// with `f(j)` false and `f(j + 1)` true by bisection.
pub fn find_crossing_index(len: usize, mut f: impl FnMut(usize) -> Result<bool>) -> Result<usize> {
    if len < 2 {
        return Err(internal("crossing search needs two potentials"));
    }
    let (mut lo, mut hi) = (0, len - 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TsConfig {
    /// Re-verify loop invariants with full runs each iteration.
    pub check: bool,
    pub exec: Exec,
}

/// One iteration of the search, for diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct TsStep {
    pub a: Rational,
    pub b: Rational,
    pub potentials: usize,
    pub j: usize,
    pub lambda0: Rational,
    pub sigma: Event,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdTuple {
    pub lambda: Rational,
    pub tau: Vec<Event>,
    /// `GW(λ, τ)` spans at least `k` (otherwise the shortened list does).
    pub full_spans_k: bool,
    pub steps: Vec<TsStep>,
}

impl ThresholdTuple {
    pub fn sigma(&self) -> &Event {
        self.tau.last().expect("threshold lists are never empty")
    }

    pub fn shortened(&self) -> &[Event] {
        &self.tau[..self.tau.len() - 1]
    }
}

impl fmt::Display for ThresholdTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.tau.iter().map(|e| e.to_string()).collect();
        write!(f, "lambda={}; tau=[{}]", self.lambda, items.join(", "))
    }
}

/// Parses `lambda=<r>; tau=[…]` into a potential and a list.
pub fn parse_threshold(text: &str) -> Result<(Rational, Vec<Event>)> {
    let bad = || Error::Parse { line: 0, msg: format!("bad threshold tuple `{text}`") };
    let (l, t) = text.split_once(';').ok_or_else(bad)?;
    let lambda = l.trim().strip_prefix("lambda=").ok_or_else(bad)?.parse()?;
    let tau = parse_tau(t.trim().strip_prefix("tau=").ok_or_else(bad)?)?;
    Ok((lambda, tau))
}

pub fn ts_run(inst: &Instance, cfg: &TsConfig) -> Result<ThresholdTuple> {
    let k = inst.k();
    let n = inst.n();
    if k > n {
        return Err(Error::Precondition("k exceeds |V|".into()));
    }
    let zero = Rational::zero();
    if spans_at_least_k(inst, &zero, &[], k)? {
        return Err(Error::Precondition("GW(0, ∅) already spans k vertices".into()));
    }
    let mut a = zero;
    let mut b = inst.total_cost() + Rational::one();
    let mut tau: Vec<Event> = Vec::new();
    let mut sym = GrowthState::symbolic(inst);
    let mut steps = Vec::new();
    let spans_at = |sym: &GrowthState<'_, Affine>, tau: &[Event], p: &Rational| -> Result<bool> {
        Ok(gw_from(inst, sym.eval(p), tau)?.spans() >= k)
    };

    for _ in 0..=3 * n.saturating_sub(1) {
        if cfg.check {
            check_iteration(inst, &sym, &tau, &a, &b)?;
        }
        let q = sym.objects();
        let mut ps = vec![a.clone()];
        ps.extend(diverging_potentials(&q, &a, &b));
        ps.push(b.clone());
        let j = find_crossing_index(ps.len(), |i| spans_at(&sym, &tau, &ps[i]))?;
        let lambda0 = Rational::midpoint(&ps[j], &ps[j + 1]);
        let mut probe = sym.eval(&lambda0);
        let sigma = probe
            .step(&tau)?
            .ok_or_else(|| internal("growth finished before the list was extended"))?;
        if cfg.check {
            let full = crate::growth::gp_run(inst, &lambda0, &tau)?;
            if full.trace.get(tau.len()).map(|t| &t.event) != Some(&sigma) {
                return Err(internal("probe disagrees with a full run"));
            }
        }
        steps.push(TsStep {
            a: a.clone(),
            b: b.clone(),
            potentials: ps.len() - 2,
            j,
            lambda0,
            sigma: sigma.clone(),
        });
        let before = sym.clone();
        sym.apply(&sigma)?;
        tau.push(sigma);
        a = ps[j].clone();
        b = ps[j + 1].clone();
        for low in [true, false] {
            let (p, inner) = if low { (&a, &b) } else { (&b, &a) };
            if respects_at(&before, &tau, p)? {
                continue;
            }
            match settle_endpoint(inst, &sym, &tau, p, inner, low)? {
                Settled::Moved(q) => *(if low { &mut a } else { &mut b }) = q,
                Settled::Tuple(lambda, tau) => return Ok(ThresholdTuple { lambda, tau, full_spans_k: low, steps }),
            }
        }
        let (at_a, at_b) = cfg.exec.join(|| spans_at(&sym, &tau, &a), || spans_at(&sym, &tau, &b));
        if at_a? {
            return Ok(ThresholdTuple { lambda: a, tau, full_spans_k: true, steps });
        }
        if !at_b? {
            return Ok(ThresholdTuple { lambda: b, tau, full_spans_k: false, steps });
        }
    }
    Err(internal("threshold search exceeded 3|V|-3 iterations"))
}

/// Whether the last entry of `tau` is processed at `p` right after the
/// state `before`, which stands for the run through `tau` minus that entry.
fn respects_at(before: &GrowthState<'_, Affine>, tau: &[Event], p: &Rational) -> Result<bool> {
    Ok(before.eval(p).step(tau)?.as_ref() == tau.last())
}

enum Settled {
    Moved(Rational),
    Tuple(Rational, Vec<Event>),
}

const SETTLE_TRIES: u32 = 8;

/// An external edge without active endpoints can turn tight exactly at an
/// end `p` of the interval, where the extended list then loses its last
/// entry. Interior points keep the list, so first try to pull `p` inwards
/// while staying on its side of `k`. Failing that, the count jumps at `p`
/// itself: search the ties at `p` for a list on the other side, preferring
/// the order of events just inside the interval, and return its first
/// prefix that crosses `k`.
fn settle_endpoint(
    inst: &Instance,
    sym: &GrowthState<'_, Affine>,
    tau: &[Event],
    p: &Rational,
    inner: &Rational,
    low: bool,
) -> Result<Settled> {
    let k = inst.k();
    let side = |x: &Rational| -> Result<bool> { Ok(gw_from(inst, sym.eval(x), tau)?.spans() >= k) };
    let mut near = p.clone();
    let mut gap = inner - p;
    for _ in 0..SETTLE_TRIES {
        gap = gap.div_int(2);
        near = p + &gap;
        if side(&near)? != low {
            return Ok(Settled::Moved(near));
        }
    }
    let base = tau.len() - 1;
    let guide: Vec<Event> = sym.eval(&near).run(tau, &GrowthConfig::default())?.events().split_off(base);
    let mut budget = SEARCH_LEAVES;
    let mut st = start_state(inst, p, &tau[..base])?;
    let rho = search_list(inst, &mut st, &mut tau[..base].to_vec(), &guide, low, &mut budget)?
        .ok_or_else(|| internal(format!("no respected list crosses k at {p}")))?;
    let spans = |len: usize| -> Result<bool> { Ok(gw_run(inst, p, &rho[..len])?.spans() >= k) };
    // Prefix |τ| - 1 sits on the side opposite to `low` by the loop invariant.
    let j = find_crossing_index(rho.len() - base + 1, |i| Ok(spans(base + i)? == low))?;
    let mut out = rho;
    out.truncate(base + j + 1);
    Ok(Settled::Tuple(p.clone(), out))
}

const SEARCH_LEAVES: usize = 1 << 12;

fn start_state<'a>(inst: &'a Instance, lambda: &Rational, prefix: &[Event]) -> Result<GrowthState<'a, Rational>> {
    let mut st = GrowthState::new(inst, lambda.clone());
    for _ in 0..prefix.len() {
        st.step(prefix)?;
    }
    Ok(st)
}

/// Depth-first search over the tie choices of the run at a fixed potential,
/// guide events first, for a respected list whose outcome spans at least `k`
/// exactly when `want` holds. Gives up after `budget` complete lists.
fn search_list(
    inst: &Instance,
    st: &mut GrowthState<'_, Rational>,
    rho: &mut Vec<Event>,
    guide: &[Event],
    want: bool,
    budget: &mut usize,
) -> Result<Option<Vec<Event>>> {
    if st.is_finished() {
        *budget = budget.saturating_sub(1);
        let hit = gw_run(inst, st.lambda(), rho)?.spans() >= inst.k();
        return Ok((hit == want).then(|| rho.clone()));
    }
    let mut options: Vec<Event> = guide.iter().filter(|g| !rho.contains(g)).cloned().collect();
    for (e, _) in st.candidates() {
        if !options.contains(&e) {
            options.push(e);
        }
    }
    for ev in options {
        if *budget == 0 {
            break;
        }
        rho.push(ev.clone());
        let mut trial = st.clone();
        if trial.step(rho)?.as_ref() == Some(&ev) {
            if let Some(found) = search_list(inst, &mut trial, rho, guide, want, budget)? {
                return Ok(Some(found));
            }
        }
        rho.pop();
    }
    Ok(None)
}

/// Loop invariants of the search plus agreement between the symbolic
/// object collection and concrete candidates inside the interval.
fn check_iteration(inst: &Instance, sym: &GrowthState<'_, Affine>, tau: &[Event], a: &Rational, b: &Rational) -> Result<()> {
    let k = inst.k();
    for (p, want) in [(a, false), (b, true)] {
        if !is_respected(inst, p, tau) {
            return Err(internal(format!("list not respected at {p}")));
        }
        if spans_at_least_k(inst, p, tau, k)? != want {
            return Err(internal(format!("bracket invariant fails at {p}")));
        }
    }
    let q = sym.objects();
    for frac in [(1, 4), (1, 2), (3, 4)] {
        let lambda = a + &(b - a).mul_int(frac.0).div_int(frac.1);
        let got = concrete_candidates(inst, &lambda, tau)?;
        let want: Vec<(Event, ExtendedRational)> = q.iter().map(|(e, f)| (e.clone(), f.eval(&lambda))).collect();
        if got != want {
            return Err(internal(format!("symbolic and concrete candidates differ at {lambda}")));
        }
    }
    Ok(())
}

/// Candidate increments of a fresh concrete run at the start of iteration
/// `|τ| + 1`.
pub fn concrete_candidates(inst: &Instance, lambda: &Rational, tau: &[Event]) -> Result<Vec<(Event, ExtendedRational)>> {
    let mut st = GrowthState::new(inst, lambda.clone());
    for _ in 0..tau.len() {
        st.step(tau)?;
    }
    Ok(st.candidates())
}

/// Which case of the comparison between the two runs applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Edge,
    Subset,
}

#[derive(Clone, Debug, Default)]
pub struct ThresholdReport {
    pub respected: bool,
    pub straddles: bool,
    pub branch: Option<Branch>,
    pub diagnostics: Vec<String>,
}

impl ThresholdReport {
    pub fn ok(&self) -> bool {
        self.respected && self.straddles && self.diagnostics.is_empty()
    }
}

/// Checks the threshold conditions for `(λ, τ)` and the relation between
/// `GP(λ, τ)` and `GP(λ, τ̃)`.
pub fn verify_threshold(inst: &Instance, lambda: &Rational, tau: &[Event]) -> ThresholdReport {
    let mut r = ThresholdReport::default();
    let Some(sigma) = tau.last() else {
        r.diagnostics.push("empty list".into());
        return r;
    };
    let short = &tau[..tau.len() - 1];
    r.respected = is_respected(inst, lambda, tau);
    if !r.respected {
        r.diagnostics.push("list is not respected".into());
        return r;
    }
    let (full, part) = match (gw_run(inst, lambda, tau), gw_run(inst, lambda, short)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => {
            r.diagnostics.push(e.to_string());
            return r;
        }
    };
    let k = inst.k();
    r.straddles = (full.spans() >= k) != (part.spans() >= k);
    if !r.straddles {
        r.diagnostics.push(format!("no straddle: {} and {} spanned vertices", full.spans(), part.spans()));
    }
    let (t, t2) = (&full.gp.tree, &part.gp.tree);
    if full.gp.family.y_support() != part.gp.family.y_support() {
        r.diagnostics.push("dual values differ".into());
    }
    let (bs, bs2) = (full.gp.processed_sets(), part.gp.processed_sets());
    let sorted = |mut v: Vec<Vec<usize>>| {
        v.sort();
        v
    };
    match sigma {
        Event::Edge(id) => {
            r.branch = Some(Branch::Edge);
            let j = inst.local_edge(*id).unwrap();
            if sorted(bs.clone()) != sorted(bs2.clone()) {
                r.diagnostics.push("processed collections differ".into());
            }
            if t2.edges.contains(&j) {
                r.diagnostics.push("σ is already in T'".into());
            }
            if t.edges.iter().any(|e| *e != j && !t2.edges.contains(e)) {
                r.diagnostics.push("T is not inside T' + σ".into());
            }
        }
        Event::Subset(vs) => {
            r.branch = Some(Branch::Subset);
            let local: Vec<usize> = vs.iter().filter_map(|&l| inst.local_vertex(l)).collect();
            if t != t2 {
                r.diagnostics.push("trees differ".into());
            }
            if bs2.contains(&local) {
                r.diagnostics.push("σ is already processed in the shortened run".into());
            }
            let mut with = bs2.clone();
            with.push(local);
            if sorted(bs.clone()) != sorted(with) {
                r.diagnostics.push("processed collections do not differ by σ".into());
            }
        }
    }
    r
}
