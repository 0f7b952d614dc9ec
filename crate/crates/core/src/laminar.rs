//! Binary laminar family with dual values.
//!
//! Sets are created in merge order: ids `0..n` are the singletons and every
//! merged set gets the next id. The map from a vertex to its current maximal
//! set is a weighted quick-find: merging relabels the smaller side, so
//! lookups are O(1) through a shared reference and all merges together cost
//! O(n log n).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::numeric::{Affine, AffineFn, Rational, Scalar};

pub type SetId = usize;

#[derive(Clone, Debug, PartialEq)]
pub struct LaminarSet<S> {
    /// Sorted local vertices; doubles as the canonical key.
    pub vertices: Vec<usize>,
    pub children: Option<(SetId, SetId)>,
    pub parent: Option<SetId>,
    pub y: S,
    /// Sum of `y` over this set and everything below it.
    pub inner: S,
    pub processed: bool,
    pub contains_root: bool,
    /// Sum of finite penalties; `None` when the root is inside.
    pub penalty_sum: Option<Rational>,
}

impl<S> LaminarSet<S> {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaminarFamily<S> {
    sets: Vec<LaminarSet<S>>,
    rep: Vec<usize>,
    rep_size: Vec<usize>,
    top_of_rep: Vec<SetId>,
}

impl<S: Scalar> LaminarFamily<S> {
    pub fn new_singletons(inst: &Instance) -> Self {
        let n = inst.n();
        let sets = (0..n)
            .map(|v| LaminarSet {
                vertices: vec![v],
                children: None,
                parent: None,
                y: S::zero(),
                inner: S::zero(),
                processed: false,
                contains_root: v == inst.root(),
                penalty_sum: inst.penalties()[v].finite().cloned(),
            })
            .collect();
        LaminarFamily { sets, rep: (0..n).collect(), rep_size: vec![1; n], top_of_rep: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn n(&self) -> usize {
        self.rep.len()
    }

    pub fn set(&self, id: SetId) -> &LaminarSet<S> {
        &self.sets[id]
    }

    pub fn sets(&self) -> &[LaminarSet<S>] {
        &self.sets
    }

    pub(crate) fn set_mut(&mut self, id: SetId) -> &mut LaminarSet<S> {
        &mut self.sets[id]
    }

    /// Current maximal set containing `v`.
    pub fn maximal_of(&self, v: usize) -> SetId {
        self.top_of_rep[self.rep[v]]
    }

    pub fn is_maximal(&self, id: SetId) -> bool {
        self.sets[id].parent.is_none()
    }

    pub fn maximal_sets(&self) -> impl Iterator<Item = SetId> + '_ {
        (0..self.sets.len()).filter(|&i| self.sets[i].parent.is_none())
    }

    /// Merges two distinct maximal sets into a new maximal set.
    pub fn merge(&mut self, l1: SetId, l2: SetId) -> Result<SetId> {
        if l1 == l2 || l1 >= self.sets.len() || l2 >= self.sets.len() {
            return Err(Error::Precondition("merge needs two distinct sets".into()));
        }
        if !self.is_maximal(l1) || !self.is_maximal(l2) {
            return Err(Error::Precondition("merge of a non-maximal set".into()));
        }
        let id = self.sets.len();
        let (a, b) = (&self.sets[l1], &self.sets[l2]);
        let mut vertices = Vec::with_capacity(a.size() + b.size());
        let (mut i, mut j) = (0, 0);
        while i < a.vertices.len() || j < b.vertices.len() {
            if j == b.vertices.len() || (i < a.vertices.len() && a.vertices[i] < b.vertices[j]) {
                vertices.push(a.vertices[i]);
                i += 1;
            } else {
                vertices.push(b.vertices[j]);
                j += 1;
            }
        }
        let penalty_sum = match (&a.penalty_sum, &b.penalty_sum) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        };
        let node = LaminarSet {
            vertices,
            children: Some((l1, l2)),
            parent: None,
            y: S::zero(),
            inner: a.inner.plus(&b.inner),
            processed: false,
            contains_root: a.contains_root || b.contains_root,
            penalty_sum,
        };
        let (ra, rb) = (self.rep[a.vertices[0]], self.rep[b.vertices[0]]);
        let (big, small) = if self.rep_size[ra] >= self.rep_size[rb] { (ra, rb) } else { (rb, ra) };
        let small_set = if small == ra { l1 } else { l2 };
        for &v in &self.sets[small_set].vertices {
            self.rep[v] = big;
        }
        self.rep_size[big] += self.rep_size[small];
        self.top_of_rep[big] = id;
        self.sets[l1].parent = Some(id);
        self.sets[l2].parent = Some(id);
        self.sets.push(node);
        Ok(id)
    }

    /// `𝓛(S)`: sets holding some but not all vertices of `s`.
    pub fn crossing_sets(&self, s: &[usize]) -> Vec<SetId> {
        let mask = self.mask(s);
        let total = s.len();
        (0..self.sets.len())
            .filter(|&i| {
                let hit = self.sets[i].vertices.iter().filter(|&&v| mask[v]).count();
                hit > 0 && hit < total
            })
            .collect()
    }

    /// `𝓛[S]`: sets contained in `s`.
    pub fn contained_sets(&self, s: &[usize]) -> Vec<SetId> {
        let mask = self.mask(s);
        (0..self.sets.len()).filter(|&i| self.sets[i].vertices.iter().all(|&v| mask[v])).collect()
    }

    /// `𝓛_v`: the chain from `{v}` up to its maximal set.
    pub fn sets_containing(&self, v: usize) -> Vec<SetId> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.sets[cur].parent {
            out.push(p);
            cur = p;
        }
        out
    }

    pub fn children_of(&self, id: SetId) -> Option<(SetId, SetId)> {
        self.sets[id].children
    }

    /// `λ ↦ π^λ_L`.
    pub fn penalty_fn(&self, id: SetId) -> AffineFn {
        let s = &self.sets[id];
        match &s.penalty_sum {
            Some(p) => AffineFn::new(p.clone(), Rational::from_integer(s.size() as i64)),
            None => AffineFn::Infinite,
        }
    }

    /// `π^λ_L` as a scalar, or `None` for root-containing sets.
    pub fn penalty_at(&self, id: SetId, lambda: &S) -> Option<S> {
        let s = &self.sets[id];
        s.penalty_sum.as_ref().map(|p| S::constant(p).plus(&lambda.times(s.size() as i64)))
    }

    /// Looks up a set by its vertex list.
    pub fn find_set(&self, vertices: &[usize]) -> Option<SetId> {
        let &first = vertices.first()?;
        if first >= self.n() {
            return None;
        }
        self.sets_containing(first).into_iter().find(|&id| self.sets[id].vertices == vertices)
    }

    fn mask(&self, s: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.n()];
        for &v in s {
            m[v] = true;
        }
        m
    }

    /// Inner sums recomputed from `y` alone.
    pub fn recompute_inner(&self) -> Vec<S> {
        let mut inner: Vec<S> = Vec::with_capacity(self.sets.len());
        for s in &self.sets {
            let mut acc = s.y.clone();
            if let Some((a, b)) = s.children {
                acc = acc.plus(&inner[a]).plus(&inner[b]);
            }
            inner.push(acc);
        }
        inner
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LaminarFamily<T> {
        LaminarFamily {
            sets: self
                .sets
                .iter()
                .map(|s| LaminarSet {
                    vertices: s.vertices.clone(),
                    children: s.children,
                    parent: s.parent,
                    y: f(&s.y),
                    inner: f(&s.inner),
                    processed: s.processed,
                    contains_root: s.contains_root,
                    penalty_sum: s.penalty_sum.clone(),
                })
                .collect(),
            rep: self.rep.clone(),
            rep_size: self.rep_size.clone(),
            top_of_rep: self.top_of_rep.clone(),
        }
    }

    /// One line per set: `S<id>: {v…} y=<r> inner=<r> processed=<0|1>`.
    pub fn dump(&self, labels: &[usize]) -> String {
        let mut out = String::new();
        for (i, s) in self.sets.iter().enumerate() {
            writeln!(
                out,
                "S{i}: {} y={} inner={} processed={}",
                fmt_set(s.vertices.iter().map(|&v| labels[v])),
                s.y,
                s.inner,
                u8::from(s.processed)
            )
            .unwrap();
        }
        out
    }
}

impl LaminarFamily<Affine> {
    pub fn eval(&self, lambda: &Rational) -> LaminarFamily<Rational> {
        self.map_scalar(|a| a.eval(lambda))
    }
}

impl LaminarFamily<Rational> {
    /// Nonzero dual values keyed by vertex list.
    pub fn y_support(&self) -> Vec<(Vec<usize>, Rational)> {
        let mut out: Vec<_> =
            self.sets.iter().filter(|s| !s.y.is_zero()).map(|s| (s.vertices.clone(), s.y.clone())).collect();
        out.sort();
        out
    }

    pub fn sum_y(&self, ids: &[SetId]) -> Rational {
        ids.iter().map(|&i| &self.sets[i].y).sum()
    }

    /// Checks `inner(L) ≤ π^λ_L` for every set.
    pub fn respects_penalties(&self, lambda: &Rational) -> bool {
        (0..self.sets.len()).all(|i| match self.penalty_at(i, lambda) {
            Some(p) => self.sets[i].inner <= p,
            None => true,
        })
    }
}

/// `{a b c}`.
pub fn fmt_set(vs: impl IntoIterator<Item = usize>) -> String {
    let items: Vec<String> = vs.into_iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(" "))
}
