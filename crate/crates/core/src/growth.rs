//! The growth phase with a tie-breaking list.
//!
//! One engine serves two scalar types. With [`Rational`] it is the ordinary
//! run at a fixed potential. With [`Affine`] every dual value is a function
//! of the potential; a symbolic run never compares scalars and instead reads
//! the event of each iteration from the list, which is only meaningful on an
//! interval where that list is respected.

use std::fmt;
use std::fmt::Write as _;

use crate::error::{internal, Error, Result};
use crate::instance::{Instance, Tree};
use crate::laminar::{fmt_set, LaminarFamily, SetId};
use crate::numeric::{Affine, AffineFn, ExtendedRational, Rational, Scalar};

/// An edge (by original input index) or a subset (by sorted original ids).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    Edge(usize),
    Subset(Vec<usize>),
}

impl Event {
    pub fn is_edge(&self) -> bool {
        matches!(self, Event::Edge(_))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Edge(i) => write!(f, "E#{i}"),
            Event::Subset(vs) => f.write_str(&fmt_set(vs.iter().copied()).replacen('{', "S{", 1)),
        }
    }
}

/// Parses `E#i,S{a b c}`; brackets around the list and spaces after commas
/// are accepted. An empty string or `[]` is the empty list.
pub fn parse_tau(text: &str) -> Result<Vec<Event>> {
    let bad = |m: String| Error::Parse { line: 0, msg: m };
    let s = text.trim();
    let s = s.strip_prefix('[').map(|t| t.strip_suffix(']').unwrap_or(t)).unwrap_or(s).trim();
    let mut out = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("E#") {
            let end = r.find(',').unwrap_or(r.len());
            let id = r[..end].trim().parse().map_err(|_| bad(format!("bad edge event in `{text}`")))?;
            out.push(Event::Edge(id));
            rest = &r[end..];
        } else if let Some(r) = rest.strip_prefix("S{") {
            let end = r.find('}').ok_or_else(|| bad(format!("unclosed subset in `{text}`")))?;
            let mut vs = r[..end]
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad(format!("bad subset event in `{text}`")))?;
            if vs.is_empty() {
                return Err(bad("empty subset event".into()));
            }
            vs.sort_unstable();
            vs.dedup();
            out.push(Event::Subset(vs));
            rest = &r[end + 1..];
        } else {
            return Err(bad(format!("unrecognised event in `{text}`")));
        }
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
            if rest.is_empty() {
                return Err(bad("trailing comma".into()));
            }
        } else if !rest.is_empty() {
            return Err(bad(format!("expected `,` in `{text}`")));
        }
    }
    Ok(out)
}

pub fn format_tau(tau: &[Event]) -> String {
    tau.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry<S> {
    pub iteration: usize,
    pub delta: S,
    pub event: Event,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Local {
    Edge(usize),
    Subset(SetId),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GrowthConfig {
    /// Verify gp1–gp5 at every iteration boundary.
    pub check_invariants: bool,
}

#[derive(Clone, Debug)]
pub struct GrowthState<'a, S: Scalar> {
    inst: &'a Instance,
    lambda: S,
    family: LaminarFamily<S>,
    forest: Vec<usize>,
    processed: Vec<SetId>,
    load: Vec<S>,
    maximal: Vec<SetId>,
    trace: Vec<TraceEntry<S>>,
}

impl<'a, S: Scalar> GrowthState<'a, S> {
    pub fn new(inst: &'a Instance, lambda: S) -> Self {
        GrowthState {
            inst,
            lambda,
            family: LaminarFamily::new_singletons(inst),
            forest: Vec::new(),
            processed: Vec::new(),
            load: vec![S::zero(); inst.m()],
            maximal: (0..inst.n()).collect(),
            trace: Vec::new(),
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn family(&self) -> &LaminarFamily<S> {
        &self.family
    }

    pub fn forest(&self) -> &[usize] {
        &self.forest
    }

    pub fn processed(&self) -> &[SetId] {
        &self.processed
    }

    pub fn load(&self, edge: usize) -> &S {
        &self.load[edge]
    }

    pub fn trace(&self) -> &[TraceEntry<S>] {
        &self.trace
    }

    /// Number of completed iterations.
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn is_finished(&self) -> bool {
        self.maximal.len() <= 1
    }

    pub fn maximal_sets(&self) -> &[SetId] {
        &self.maximal
    }

    pub fn is_active(&self, id: SetId) -> bool {
        self.family.is_maximal(id) && !self.family.set(id).processed
    }

    pub fn active_sets(&self) -> Vec<SetId> {
        self.maximal.iter().copied().filter(|&id| !self.family.set(id).processed).collect()
    }

    /// Number of active endpoints of an external edge, `None` if internal.
    pub fn active_endpoints(&self, edge: usize) -> Option<usize> {
        let e = self.inst.edge(edge);
        let (a, b) = (self.family.maximal_of(e.u), self.family.maximal_of(e.v));
        if a == b {
            return None;
        }
        Some(usize::from(!self.family.set(a).processed) + usize::from(!self.family.set(b).processed))
    }

    fn slack(&self, edge: usize) -> S {
        S::constant(&self.inst.edge(edge).cost).minus(&self.load[edge])
    }

    fn increase_of(&self, ev: Local) -> Option<S> {
        match ev {
            Local::Edge(j) => match self.active_endpoints(j)? {
                0 => Some(S::zero()),
                a => Some(self.slack(j).divided(a as i64)),
            },
            Local::Subset(id) => {
                let p = self.family.penalty_at(id, &self.lambda)?;
                Some(p.minus(&self.family.set(id).inner))
            }
        }
    }

    fn grow(&mut self, delta: &S) {
        for &id in &self.maximal {
            let s = self.family.set_mut(id);
            if !s.processed {
                s.y = s.y.plus(delta);
                s.inner = s.inner.plus(delta);
            }
        }
        for j in 0..self.inst.m() {
            if let Some(a) = self.active_endpoints(j) {
                if a > 0 {
                    self.load[j] = self.load[j].plus(&delta.times(a as i64));
                }
            }
        }
    }

    fn process(&mut self, ev: Local) -> Result<()> {
        match ev {
            Local::Edge(j) => {
                let e = self.inst.edge(j);
                let (a, b) = (self.family.maximal_of(e.u), self.family.maximal_of(e.v));
                let id = self.family.merge(a, b)?;
                self.maximal.retain(|&x| x != a && x != b);
                self.maximal.push(id);
                self.forest.push(j);
            }
            Local::Subset(id) => {
                self.family.set_mut(id).processed = true;
                self.processed.push(id);
            }
        }
        Ok(())
    }

    fn to_event(&self, ev: Local) -> Event {
        match ev {
            Local::Edge(j) => Event::Edge(self.inst.edge(j).id),
            Local::Subset(id) => {
                Event::Subset(self.family.set(id).vertices.iter().map(|&v| self.inst.label(v)).collect())
            }
        }
    }

    /// Resolves an event against the current state: an external edge, or an
    /// active maximal set with exactly this vertex set.
    fn resolve(&self, ev: &Event) -> Option<Local> {
        match ev {
            Event::Edge(id) => {
                let j = self.inst.local_edge(*id)?;
                self.active_endpoints(j).map(|_| Local::Edge(j))
            }
            Event::Subset(labels) => {
                let local: Option<Vec<usize>> = labels.iter().map(|&l| self.inst.local_vertex(l)).collect();
                let local = local?;
                let id = self.family.maximal_of(*local.first()?);
                (self.family.set(id).vertices == local && self.is_active(id)).then_some(Local::Subset(id))
            }
        }
    }

    fn finish_iteration(&mut self, delta: S, ev: Local) -> Result<()> {
        let event = self.to_event(ev);
        self.process(ev)?;
        let iteration = self.trace.len() + 1;
        self.trace.push(TraceEntry { iteration, delta, event });
        if self.trace.len() > 3 * self.inst.n() {
            return Err(internal("growth phase exceeded 3|V|-3 iterations"));
        }
        Ok(())
    }

    /// Iteration dump, one line per iteration: `i=<n> Δ=<r> <event>`.
    pub fn dump_trace(&self) -> String {
        let mut out = String::new();
        for t in &self.trace {
            writeln!(out, "i={} Δ={} {}", t.iteration, t.delta, t.event).unwrap();
        }
        out
    }
}

/// Candidate increments and tight objects at the start of an iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct Deltas {
    pub delta1: Option<Rational>,
    pub delta2: Option<Rational>,
    /// Tight external edges (local indices).
    pub tight_edges: Vec<usize>,
    /// Tight active subsets.
    pub tight_sets: Vec<SetId>,
}

impl Deltas {
    pub fn delta(&self) -> Option<Rational> {
        if !self.tight_edges.is_empty() || !self.tight_sets.is_empty() {
            return Some(Rational::zero());
        }
        match (&self.delta1, &self.delta2) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        }
    }
}

impl<'a> GrowthState<'a, Rational> {
    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    fn tight_now(&self) -> (Vec<usize>, Vec<SetId>) {
        let edges = (0..self.inst.m())
            .filter(|&j| self.active_endpoints(j).is_some() && self.load[j] == self.inst.edge(j).cost)
            .collect();
        let mut sets: Vec<SetId> = self
            .active_sets()
            .into_iter()
            .filter(|&id| self.family.penalty_at(id, &self.lambda).is_some_and(|p| p == self.family.set(id).inner))
            .collect();
        sets.sort_by(|&a, &b| self.family.set(a).vertices.cmp(&self.family.set(b).vertices));
        (edges, sets)
    }

    /// The candidate increments of the listing: `Δ1` is computed only when no
    /// external edge is tight and `Δ2` only when no active subset is tight.
    pub fn next_deltas(&self) -> Result<Deltas> {
        let (tight_edges, tight_sets) = self.tight_now();
        let mut delta1 = None;
        if tight_edges.is_empty() {
            // Track the minimum of slack/a as an unreduced pair.
            let mut best: Option<(Rational, i64)> = None;
            for j in 0..self.inst.m() {
                match self.active_endpoints(j) {
                    Some(a) if a > 0 => {
                        let s = self.slack(j);
                        let a = a as i64;
                        let better = match &best {
                            None => true,
                            Some((bs, ba)) => Rational::cmp_scaled(&s, *ba, bs, a).is_lt(),
                        };
                        if better {
                            best = Some((s, a));
                        }
                    }
                    _ => {}
                }
            }
            delta1 = best.map(|(s, a)| s.div_int(a));
        }
        let mut delta2 = None;
        if tight_sets.is_empty() {
            for id in self.active_sets() {
                if let Some(p) = self.family.penalty_at(id, &self.lambda) {
                    let d = p - &self.family.set(id).inner;
                    if delta2.as_ref().is_none_or(|b: &Rational| d < *b) {
                        delta2 = Some(d);
                    }
                }
            }
        }
        Ok(Deltas { delta1, delta2, tight_edges, tight_sets })
    }

    /// Priority rule: the list entry if it is tight, then the first tight
    /// edge, then the first tight subset.
    fn select(&self, tau: &[Event], edges: &[usize], sets: &[SetId]) -> Option<Local> {
        let i = self.trace.len() + 1;
        if i <= tau.len() {
            if let Some(ev) = self.resolve(&tau[i - 1]) {
                let tight = match ev {
                    Local::Edge(j) => edges.contains(&j),
                    Local::Subset(id) => sets.contains(&id),
                };
                if tight {
                    return Some(ev);
                }
            }
        }
        edges.first().map(|&j| Local::Edge(j)).or_else(|| sets.first().map(|&id| Local::Subset(id)))
    }

    /// Runs one iteration; returns the processed event, or `None` once the
    /// only active set is `V`.
    pub fn step(&mut self, tau: &[Event]) -> Result<Option<Event>> {
        if self.is_finished() {
            return Ok(None);
        }
        let d = self.next_deltas()?;
        let delta = d.delta().ok_or_else(|| internal("no candidate increment with several maximal sets"))?;
        let (edges, sets) = if delta.is_zero() {
            (d.tight_edges, d.tight_sets)
        } else {
            self.grow(&delta);
            self.tight_now()
        };
        let ev = self.select(tau, &edges, &sets).ok_or_else(|| internal("nothing became tight"))?;
        let event = self.to_event(ev);
        self.finish_iteration(delta, ev)?;
        Ok(Some(event))
    }

    /// Increase needed by each member of the object collection at the
    /// current iteration.
    pub fn candidates(&self) -> Vec<(Event, ExtendedRational)> {
        let mut out = Vec::new();
        for j in 0..self.inst.m() {
            match self.active_endpoints(j) {
                Some(0) if self.load[j] == self.inst.edge(j).cost => {
                    out.push((self.to_event(Local::Edge(j)), Rational::zero().into()));
                }
                Some(a) if a > 0 => {
                    out.push((self.to_event(Local::Edge(j)), self.slack(j).div_int(a as i64).into()));
                }
                _ => {}
            }
        }
        let mut sets = self.active_sets();
        sets.sort_by(|&a, &b| self.family.set(a).vertices.cmp(&self.family.set(b).vertices));
        for id in sets {
            let v = match self.increase_of(Local::Subset(id)) {
                Some(x) => ExtendedRational::Finite(x),
                None => ExtendedRational::PositiveInfinity,
            };
            out.push((self.to_event(Local::Subset(id)), v));
        }
        out
    }

    pub fn run(mut self, tau: &[Event], cfg: &GrowthConfig) -> Result<GrowthOutput> {
        self.run_observed(tau, cfg, &mut |_| {})?;
        Ok(self.into_output())
    }

    /// Runs to completion, calling `observe` at the start of every iteration.
    pub fn run_observed(
        &mut self,
        tau: &[Event],
        cfg: &GrowthConfig,
        observe: &mut dyn FnMut(&GrowthState<'a, Rational>),
    ) -> Result<()> {
        if cfg.check_invariants {
            self.check_invariants()?;
        }
        while !self.is_finished() {
            observe(self);
            self.step(tau)?;
            if cfg.check_invariants {
                self.check_invariants()?;
            }
        }
        Ok(())
    }

    pub fn into_output(self) -> GrowthOutput {
        let tree = Tree::new((0..self.inst.n()).collect(), self.forest.clone());
        GrowthOutput {
            lambda: self.lambda,
            tree,
            processed: self.processed,
            family: self.family,
            trace: self.trace,
        }
    }

    /// gp1–gp5, recomputing loads and inner sums from scratch.
    pub fn check_invariants(&self) -> Result<()> {
        let fam = &self.family;
        let n = self.inst.n();
        let fail = |m: String| Err(internal(m));
        // gp1
        let mut covered = vec![0usize; n];
        for &id in &self.maximal {
            if !fam.is_maximal(id) {
                return fail(format!("gp1: set {id} listed as maximal has a parent"));
            }
            for &v in &fam.set(id).vertices {
                covered[v] += 1;
            }
        }
        if covered.iter().any(|&c| c != 1) {
            return fail("gp1: maximal sets do not partition V".into());
        }
        if fam.maximal_sets().count() != self.maximal.len() {
            return fail("gp1: maximal set list out of date".into());
        }
        for (id, s) in fam.sets().iter().enumerate() {
            if s.vertices.is_empty() {
                return fail(format!("gp1: set {id} is empty"));
            }
            if let Some((a, b)) = s.children {
                let (x, y) = (fam.set(a), fam.set(b));
                if x.parent != Some(id) || y.parent != Some(id) {
                    return fail(format!("gp1: child links of set {id} are broken"));
                }
                let mut u: Vec<usize> = x.vertices.iter().chain(&y.vertices).copied().collect();
                u.sort_unstable();
                if u.windows(2).any(|w| w[0] == w[1]) || u != s.vertices {
                    return fail(format!("gp1: set {id} is not the disjoint union of its children"));
                }
            } else if s.vertices.len() != 1 {
                return fail(format!("gp1: set {id} has no children but is not a singleton"));
            }
            if s.contains_root != s.contains(self.inst.root()) {
                return fail(format!("gp1: root flag of set {id} is wrong"));
            }
        }
        // gp2
        let inner = fam.recompute_inner();
        let mut load = vec![Rational::zero(); self.inst.m()];
        for s in fam.sets() {
            if s.y.is_zero() {
                continue;
            }
            if s.y.is_negative() {
                return fail("gp2: negative dual value".into());
            }
            for (j, e) in self.inst.edges().iter().enumerate() {
                if s.contains(e.u) != s.contains(e.v) {
                    load[j] += &s.y;
                }
            }
        }
        for (j, e) in self.inst.edges().iter().enumerate() {
            if load[j] != self.load[j] {
                return fail(format!("gp2: maintained load of edge {} is stale", e.id));
            }
            if load[j] > e.cost {
                return fail(format!("gp2: edge {} is overpacked", e.id));
            }
        }
        for (id, s) in fam.sets().iter().enumerate() {
            if inner[id] != s.inner {
                return fail(format!("gp2: inner sum of set {id} is stale"));
            }
            if let Some(p) = fam.penalty_at(id, &self.lambda) {
                if s.inner > p {
                    return fail(format!("gp2: set {id} exceeds its penalty"));
                }
            }
        }
        // gp3
        let mut dsu: Vec<usize> = (0..n).collect();
        fn find(d: &mut [usize], mut x: usize) -> usize {
            while d[x] != x {
                d[x] = d[d[x]];
                x = d[x];
            }
            x
        }
        for &j in &self.forest {
            let e = self.inst.edge(j);
            let (a, b) = (find(&mut dsu, e.u), find(&mut dsu, e.v));
            if a == b {
                return fail("gp3: F has a cycle".into());
            }
            dsu[a] = b;
            if self.load[j] != e.cost {
                return fail(format!("gp3: forest edge {} is not tight", e.id));
            }
        }
        for (id, s) in fam.sets().iter().enumerate() {
            if s.vertices.len() < 2 {
                continue;
            }
            let inside: Vec<usize> = self
                .forest
                .iter()
                .copied()
                .filter(|&j| s.contains(self.inst.edge(j).u) && s.contains(self.inst.edge(j).v))
                .collect();
            if inside.len() + 1 != s.vertices.len() {
                return fail(format!("gp3: F is not connected inside set {id}"));
            }
        }
        // gp4, gp5
        for &id in &self.processed {
            let s = fam.set(id);
            if s.contains_root {
                return fail(format!("gp5: processed set {id} contains the root"));
            }
            match fam.penalty_at(id, &self.lambda) {
                Some(p) if p == s.inner => {}
                _ => return fail(format!("gp4: processed set {id} is not tight")),
            }
        }
        Ok(())
    }
}

impl<'a> GrowthState<'a, Affine> {
    /// Symbolic state at the start of the run.
    pub fn symbolic(inst: &'a Instance) -> Self {
        GrowthState::new(inst, Affine::identity())
    }

    /// Processes `ev` with the increment read from its own increase-function.
    pub fn apply(&mut self, ev: &Event) -> Result<()> {
        let local = self
            .resolve(ev)
            .ok_or_else(|| Error::NotRespected(format!("{ev} cannot be processed at iteration {}", self.trace.len() + 1)))?;
        let delta = self
            .increase_of(local)
            .ok_or_else(|| Error::NotRespected(format!("{ev} contains the root")))?;
        if !delta.intercept.is_zero() || !delta.slope.is_zero() {
            self.grow(&delta);
        }
        self.finish_iteration(delta, local)
    }

    /// Increase-functions of the object collection: active subsets,
    /// external edges with an active endpoint, and identically tight
    /// external edges without one.
    pub fn objects(&self) -> Vec<(Event, AffineFn)> {
        let mut out = Vec::new();
        for j in 0..self.inst.m() {
            match self.active_endpoints(j) {
                Some(0) => {
                    let s = self.slack(j);
                    if s.intercept.is_zero() && s.slope.is_zero() {
                        out.push((self.to_event(Local::Edge(j)), AffineFn::Finite(Affine::default())));
                    }
                }
                Some(a) => {
                    out.push((self.to_event(Local::Edge(j)), AffineFn::Finite(self.slack(j).divided(a as i64))));
                }
                None => {}
            }
        }
        let mut sets = self.active_sets();
        sets.sort_by(|&a, &b| self.family.set(a).vertices.cmp(&self.family.set(b).vertices));
        for id in sets {
            let f = match self.increase_of(Local::Subset(id)) {
                Some(a) => AffineFn::Finite(a),
                None => AffineFn::Infinite,
            };
            out.push((self.to_event(Local::Subset(id)), f));
        }
        out
    }

    /// The concrete state this symbolic state stands for at `lambda`.
    pub fn eval(&self, lambda: &Rational) -> GrowthState<'a, Rational> {
        GrowthState {
            inst: self.inst,
            lambda: lambda.clone(),
            family: self.family.eval(lambda),
            forest: self.forest.clone(),
            processed: self.processed.clone(),
            load: self.load.iter().map(|a| a.eval(lambda)).collect(),
            maximal: self.maximal.clone(),
            trace: self
                .trace
                .iter()
                .map(|t| TraceEntry { iteration: t.iteration, delta: t.delta.eval(lambda), event: t.event.clone() })
                .collect(),
        }
    }
}

/// Result of a complete run at a fixed potential.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthOutput {
    pub lambda: Rational,
    /// The final tree over local indices; spans every vertex.
    pub tree: Tree,
    /// Processed sets in processing order.
    pub processed: Vec<SetId>,
    pub family: LaminarFamily<Rational>,
    pub trace: Vec<TraceEntry<Rational>>,
}

impl GrowthOutput {
    pub fn events(&self) -> Vec<Event> {
        self.trace.iter().map(|t| t.event.clone()).collect()
    }

    /// Vertex lists of the processed sets, in processing order.
    pub fn processed_sets(&self) -> Vec<Vec<usize>> {
        self.processed.iter().map(|&id| self.family.set(id).vertices.clone()).collect()
    }

    pub fn dump_trace(&self) -> String {
        let mut out = String::new();
        for t in &self.trace {
            writeln!(out, "i={} Δ={} {}", t.iteration, t.delta, t.event).unwrap();
        }
        out
    }
}

pub fn gp_run(inst: &Instance, lambda: &Rational, tau: &[Event]) -> Result<GrowthOutput> {
    gp_run_with(inst, lambda, tau, &GrowthConfig::default())
}

pub fn gp_run_with(inst: &Instance, lambda: &Rational, tau: &[Event], cfg: &GrowthConfig) -> Result<GrowthOutput> {
    if lambda.is_negative() {
        return Err(Error::Precondition("potential must be non-negative".into()));
    }
    GrowthState::new(inst, lambda.clone()).run(tau, cfg)
}

/// Whether the first `|τ|` events of `GP(λ, τ)` are exactly `τ`.
pub fn is_respected(inst: &Instance, lambda: &Rational, tau: &[Event]) -> bool {
    match gp_run(inst, lambda, tau) {
        Ok(out) => out.trace.len() >= tau.len() && out.trace.iter().zip(tau).all(|(t, e)| t.event == *e),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_random, parse_instance};

    fn int(x: i64) -> Rational {
        Rational::from_integer(x)
    }

    fn ex_a() -> Instance {
        parse_instance("kpcst 1\nn 2 m 1\nroot 0\nk 2\npenalties inf 1\ne 0 1 4\n").unwrap()
    }

    #[test]
    fn ex_a_at_zero() {
        let out = gp_run(&ex_a(), &int(0), &[]).unwrap();
        assert_eq!(out.dump_trace(), "i=1 Δ=1 S{1}\ni=2 Δ=2 E#0\n");
        assert_eq!(out.tree.edges, vec![0]);
        assert_eq!(out.processed_sets(), vec![vec![1]]);
        assert_eq!(out.family.set(0).y, int(3));
        assert_eq!(out.family.set(1).y, int(1));
        assert_eq!(out.family.set(2).inner, int(4));
    }

    #[test]
    fn ex_a_list_priority() {
        let tau = vec![Event::Subset(vec![1])];
        let out = gp_run(&ex_a(), &int(1), &tau).unwrap();
        assert_eq!(out.dump_trace(), "i=1 Δ=2 S{1}\ni=2 Δ=0 E#0\n");
        assert_eq!(out.family.set(0).y, int(2));
        assert_eq!(out.family.set(1).y, int(2));
        let plain = gp_run(&ex_a(), &int(1), &[]).unwrap();
        assert_eq!(plain.events()[0], Event::Edge(0));
    }

    #[test]
    fn high_potential_processes_nothing() {
        let out = gp_run(&ex_a(), &int(6), &[]).unwrap();
        assert!(out.processed.is_empty());
        assert_eq!(out.tree.vertices, vec![0, 1]);
    }

    #[test]
    fn deltas_on_ex_a() {
        let inst = ex_a();
        let mut st = GrowthState::new(&inst, int(0));
        let d = st.next_deltas().unwrap();
        assert_eq!((d.delta1.clone(), d.delta2.clone()), (Some(int(2)), Some(int(1))));
        assert!(d.tight_edges.is_empty() && d.tight_sets.is_empty());
        st.step(&[]).unwrap();
        let d = st.next_deltas().unwrap();
        assert_eq!(d.delta1, Some(int(2)));
        assert_eq!(d.delta2, None);
    }

    #[test]
    fn tight_edge_forces_zero_step() {
        let inst = parse_instance("kpcst 1\nn 3 m 2\nroot 0\nk 1\npenalties inf 3 3\ne 0 1 0\ne 1 2 5\n").unwrap();
        let st = GrowthState::new(&inst, int(0));
        let d = st.next_deltas().unwrap();
        assert_eq!(d.delta(), Some(int(0)));
        assert_eq!(d.tight_edges, vec![0]);
        assert_eq!(d.delta1, None);
    }

    #[test]
    fn selection_rules() {
        let inst = parse_instance(
            "kpcst 1\nn 4 m 3\nroot 0\nk 1\npenalties inf 1 1 1\ne 0 1 2\ne 0 2 2\ne 0 3 2\n",
        )
        .unwrap();
        let st = GrowthState::new(&inst, int(0));
        assert_eq!(st.select(&[], &[2, 0], &[]), Some(Local::Edge(2)));
        assert_eq!(st.select(&[], &[], &[1, 2]), Some(Local::Subset(1)));
        let tau = vec![Event::Subset(vec![1])];
        assert_eq!(st.select(&tau, &[0], &[1]), Some(Local::Subset(1)));
        assert_eq!(st.select(&tau, &[0], &[]), Some(Local::Edge(0)));
    }

    #[test]
    fn respected_lists() {
        let inst = ex_a();
        let tau = vec![Event::Subset(vec![1])];
        assert!(is_respected(&inst, &int(1), &tau));
        assert!(!is_respected(&inst, &int(2), &tau));
        assert!(is_respected(&inst, &int(2), &[]));
    }

    #[test]
    fn tau_text() {
        let t = parse_tau("E#3,S{2 1 5}").unwrap();
        assert_eq!(t, vec![Event::Edge(3), Event::Subset(vec![1, 2, 5])]);
        assert_eq!(format_tau(&t), "E#3,S{1 2 5}");
        assert_eq!(parse_tau("[E#3, S{1}]").unwrap().len(), 2);
        assert!(parse_tau("").unwrap().is_empty());
        assert!(parse_tau("[]").unwrap().is_empty());
        for bad in ["E#", "S{}", "X", "E#1,", "S{1", "E#1 E#2"] {
            assert!(parse_tau(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn symbolic_matches_concrete() {
        let inst = ex_a();
        let mut sym = GrowthState::symbolic(&inst);
        let objs = sym.objects();
        assert_eq!(objs[0], (Event::Edge(0), AffineFn::new(int(2), int(0))));
        assert_eq!(objs[1], (Event::Subset(vec![0]), AffineFn::Infinite));
        assert_eq!(objs[2], (Event::Subset(vec![1]), AffineFn::new(int(1), int(1))));
        sym.apply(&Event::Subset(vec![1])).unwrap();
        let edge = sym.objects()[0].1.clone();
        assert_eq!(edge, AffineFn::new(int(2), int(-2)));
        for l in [int(0), Rational::new(1, 2).unwrap(), int(1)] {
            let mut conc = GrowthState::new(&inst, l.clone());
            conc.step(&[Event::Subset(vec![1])]).unwrap();
            assert_eq!(conc.candidates()[0].1, edge.eval(&l));
            assert_eq!(sym.eval(&l).family().sets(), conc.family().sets());
        }
        assert!(sym.apply(&Event::Subset(vec![1])).is_err());
    }

    #[test]
    fn invariants_and_bound_on_random_instances() {
        for seed in 0..40 {
            let n = 3 + (seed as usize % 8);
            let m = (n - 1) + (seed as usize * 7) % (n * (n - 1) / 2 - (n - 1) + 1);
            let inst = generate_random(n, m, 10, 10, 1, seed).unwrap();
            for l in [int(0), int(3), Rational::new(7, 3).unwrap()] {
                let cfg = GrowthConfig { check_invariants: true };
                let out = gp_run_with(&inst, &l, &[], &cfg).unwrap();
                assert!(out.trace.len() <= 3 * n - 3);
                assert_eq!(out.tree.edges.len(), n - 1);
            }
        }
    }
}
