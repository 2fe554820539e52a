//! Uniform hypergraphs on `[n]` and the combinatorial operations on them:
//! colex order, links, compressions, gluing and vertex deletion.
//!
//! Vertices are 1-based. Edges are stored canonically (sorted vertex lists)
//! in a `BTreeSet` whose iteration order is the colex order.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::binom::binom;
use crate::error::{invalid, Error, Result};

/// A set of vertices stored as a strictly increasing list of positive integers.
///
/// `Ord` is the colexicographic order: `A < B` iff the largest element of the
/// symmetric difference lies in `B`. Edges of different sizes compare by size.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Edge(Vec<u32>);

impl Edge {
    /// Builds an edge from a strictly increasing list of positive vertices.
    pub fn new(vertices: Vec<u32>) -> Result<Self> {
        if vertices.first() == Some(&0) {
            return Err(invalid("vertices are 1-based; found 0"));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!(
                "edge {vertices:?} is not strictly increasing"
            )));
        }
        Ok(Edge(vertices))
    }

    /// Sorts the input first; repeated vertices are rejected.
    pub fn from_unsorted(mut vertices: Vec<u32>) -> Result<Self> {
        vertices.sort_unstable();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(invalid(format!("vertex {} repeated within an edge", w[0])));
        }
        Edge::new(vertices)
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_vertex(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// The edge with `v` removed (unchanged if `v` is absent).
    pub fn without(&self, v: u32) -> Edge {
        Edge(self.0.iter().copied().filter(|&u| u != v).collect())
    }

    /// The edge with `v` added (unchanged if already present).
    pub fn with(&self, v: u32) -> Edge {
        match self.0.binary_search(&v) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut out = self.0.clone();
                out.insert(pos, v);
                Edge(out)
            }
        }
    }

    fn relabel(&self, f: impl Fn(u32) -> u32) -> Edge {
        let mut out: Vec<u32> = self.0.iter().map(|&v| f(v)).collect();
        out.sort_unstable();
        out.dedup();
        Edge(out)
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| {
            // the first difference from the top decides
            self.0.iter().rev().cmp(other.0.iter().rev())
        })
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Colex comparison of two sets of the same size.
pub fn colex_compare(a: &Edge, b: &Edge) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(invalid(format!(
            "cannot colex-compare sets of sizes {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.cmp(b))
}

/// 1-based position of `e` among all `|e|`-subsets of the positive integers in colex order.
///
/// Panics if the rank does not fit in a `u64`.
pub fn colex_rank(e: &Edge) -> u64 {
    let mut rank: u128 = 0;
    for (p, &v) in e.vertices().iter().enumerate() {
        rank += binom(v as u64 - 1, p as u64 + 1).expect("colex rank overflow");
    }
    u64::try_from(rank + 1).expect("colex rank overflow")
}

/// Inverse of [`colex_rank`]: the `k`-th `r`-set in colex order (`k >= 1`).
pub fn colex_unrank(r: u32, k: u64) -> Result<Edge> {
    if r == 0 || k == 0 {
        return Err(invalid("colex_unrank needs r >= 1 and k >= 1"));
    }
    let mut rem = (k - 1) as u128;
    let mut out = vec![0u32; r as usize];
    for p in (1..=r as u64).rev() {
        // largest c with binom(c, p) <= rem
        let mut c = p - 1;
        while binom(c + 1, p)? <= rem {
            c += 1;
        }
        rem -= binom(c, p)?;
        out[p as usize - 1] = c as u32 + 1;
    }
    Edge::new(out)
}

/// An `r`-uniform hypergraph on the vertex set `[n]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    r: u32,
    n: u32,
    edges: BTreeSet<Edge>,
}

/// The three link families of a vertex pair `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairLinkDecomposition {
    /// `(r-2)`-sets `f` with `f + {i, j}` an edge.
    pub common: BTreeSet<Edge>,
    /// `(r-1)`-sets `f` avoiding `j` with `f + i` an edge and `f + j` not an edge.
    pub only_i: BTreeSet<Edge>,
    /// `(r-1)`-sets `f` with `f + i` a non-edge and `f + j` an edge.
    pub cross: BTreeSet<Edge>,
}

impl Hypergraph {
    /// Validates and builds a hypergraph. Duplicate edges are an error.
    pub fn new(r: u32, n: u32, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if r == 0 {
            return Err(invalid("uniformity must be at least 1"));
        }
        let mut set = BTreeSet::new();
        for e in edges {
            if e.len() != r as usize {
                return Err(invalid(format!(
                    "edge {e:?} has {} vertices, expected {r}",
                    e.len()
                )));
            }
            if e.max_vertex().is_some_and(|v| v > n) {
                return Err(invalid(format!("edge {e:?} leaves the vertex set [{n}]")));
            }
            if !set.insert(e.clone()) {
                return Err(invalid(format!("duplicate edge {e:?}")));
            }
        }
        Ok(Hypergraph { r, n, edges: set })
    }

    /// Convenience constructor from raw vertex lists (each list may be unsorted).
    pub fn from_lists(r: u32, n: u32, lists: &[&[u32]]) -> Result<Self> {
        let edges = lists
            .iter()
            .map(|l| Edge::from_unsorted(l.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Hypergraph::new(r, n, edges)
    }

    pub fn empty(r: u32, n: u32) -> Result<Self> {
        Hypergraph::new(r, n, [])
    }

    fn from_set_unchecked(r: u32, n: u32, edges: BTreeSet<Edge>) -> Self {
        Hypergraph { r, n, edges }
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in colex order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter()
    }

    pub fn edge_set(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    /// Same edges on a larger vertex set.
    pub fn with_vertex_count(&self, n: u32) -> Result<Self> {
        Hypergraph::new(self.r, n, self.edges.iter().cloned())
    }

    pub fn degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|e| e.contains(v)).count()
    }

    fn check_vertex(&self, v: u32) -> Result<()> {
        if v == 0 || v > self.n {
            return Err(invalid(format!("vertex {v} is outside [{}]", self.n)));
        }
        Ok(())
    }

    /// The `(r - |S|)`-uniform link of `S`: sets `f` disjoint from `S` with `f + S` an edge.
    pub fn link(&self, s: &[u32]) -> Result<Hypergraph> {
        let s = Edge::from_unsorted(s.to_vec())?;
        if s.len() >= self.r as usize {
            return Err(invalid(format!(
                "link of a {}-set in a {}-uniform hypergraph is undefined",
                s.len(),
                self.r
            )));
        }
        for &v in s.vertices() {
            self.check_vertex(v)?;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| s.vertices().iter().all(|&v| e.contains(v)))
            .map(|e| {
                Edge(
                    e.vertices()
                        .iter()
                        .copied()
                        .filter(|&u| !s.contains(u))
                        .collect(),
                )
            })
            .collect();
        Ok(Hypergraph::from_set_unchecked(
            self.r - s.len() as u32,
            self.n,
            edges,
        ))
    }

    /// Splits the links of `i` and `j` into the common link, the part only `i` sees,
    /// and the cross family (non-edges through `i` that are edges through `j`).
    pub fn pair_decomposition(&self, i: u32, j: u32) -> Result<PairLinkDecomposition> {
        if i == j {
            return Err(invalid("pair decomposition needs two distinct vertices"));
        }
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        let mut common = BTreeSet::new();
        let mut through_i = BTreeSet::new();
        let mut through_j = BTreeSet::new();
        for e in &self.edges {
            match (e.contains(i), e.contains(j)) {
                (true, true) => {
                    common.insert(e.without(i).without(j));
                }
                (true, false) => {
                    through_i.insert(e.without(i));
                }
                (false, true) => {
                    through_j.insert(e.without(j));
                }
                (false, false) => {}
            }
        }
        let only_i = through_i.difference(&through_j).cloned().collect();
        let cross = through_j.difference(&through_i).cloned().collect();
        Ok(PairLinkDecomposition {
            common,
            only_i,
            cross,
        })
    }

    pub fn covers_pair(&self, i: u32, j: u32) -> bool {
        i != j && self.edges.iter().any(|e| e.contains(i) && e.contains(j))
    }

    /// True iff every pair of vertices in `[n]` lies in some edge.
    pub fn covers_pairs(&self) -> bool {
        let n = self.n as usize;
        let mut covered = vec![false; n * n];
        for e in &self.edges {
            for (a, &u) in e.vertices().iter().enumerate() {
                for &v in &e.vertices()[a + 1..] {
                    covered[(u as usize - 1) * n + (v as usize - 1)] = true;
                }
            }
        }
        (0..n).all(|u| (u + 1..n).all(|v| covered[u * n + v]))
    }

    /// Pairs `(i, j)`, `i < j`, not covered by any edge.
    pub fn uncovered_pairs(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                if !self.covers_pair(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The shift `C_ij`: every edge through `j` but not `i` moves to `i`
    /// unless its image is already an edge.
    pub fn compress(&self, i: u32, j: u32) -> Result<Hypergraph> {
        if i == 0 || i >= j {
            return Err(invalid(format!("compression needs 1 <= i < j, got ({i}, {j})")));
        }
        let mut out = BTreeSet::new();
        for e in &self.edges {
            if e.contains(j) && !e.contains(i) {
                let shifted = e.without(j).with(i);
                if self.edges.contains(&shifted) {
                    out.insert(e.clone());
                } else {
                    out.insert(shifted);
                }
            } else {
                out.insert(e.clone());
            }
        }
        Ok(Hypergraph::from_set_unchecked(self.r, self.n, out))
    }

    /// True iff `C_ij` fixes the edge set for every `i < j`.
    pub fn is_left_compressed(&self) -> bool {
        self.edges.iter().all(|e| {
            e.vertices().iter().all(|&j| {
                (1..j)
                    .filter(|&i| !e.contains(i))
                    .all(|i| self.edges.contains(&e.without(j).with(i)))
            })
        })
    }

    /// Applies compressions in lexicographic `(i, j)` sweeps until a sweep changes nothing.
    pub fn left_compress_closure(&self) -> Hypergraph {
        let mut g = self.clone();
        loop {
            let mut changed = false;
            for i in 1..=g.n {
                for j in i + 1..=g.n {
                    let next = g.compress(i, j).expect("i < j");
                    if next != g {
                        changed = true;
                        g = next;
                    }
                }
            }
            if !changed {
                return g;
            }
        }
    }

    /// Identifies the uncovered pair `{i, j}` into one vertex. The merged vertex takes the
    /// smaller label; labels above the larger one shift down by one.
    pub fn glue(&self, i: u32, j: u32) -> Result<Hypergraph> {
        if i == j {
            return Err(invalid("gluing needs two distinct vertices"));
        }
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        if self.covers_pair(i, j) {
            return Err(Error::Precondition(format!(
                "pair {{{i}, {j}}} is covered by an edge and cannot be glued"
            )));
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let relabel = |v: u32| match v.cmp(&hi) {
            Ordering::Less => v,
            Ordering::Equal => lo,
            Ordering::Greater => v - 1,
        };
        let edges = self.edges.iter().map(|e| e.relabel(relabel)).collect();
        Ok(Hypergraph::from_set_unchecked(self.r, self.n - 1, edges))
    }

    /// Removes `v` and its edges; vertices above `v` shift down by one.
    pub fn delete_vertex(&self, v: u32) -> Result<Hypergraph> {
        self.check_vertex(v)?;
        let edges = self
            .edges
            .iter()
            .filter(|e| !e.contains(v))
            .map(|e| e.relabel(|u| if u > v { u - 1 } else { u }))
            .collect();
        Ok(Hypergraph::from_set_unchecked(self.r, self.n - 1, edges))
    }

    /// `r`-subsets of `[n]` that are not edges, in colex order.
    pub fn non_edges(&self) -> Vec<Edge> {
        let total = binom(self.n as u64, self.r as u64).expect("binomial overflow") as u64;
        (1..=total)
            .map(|k| colex_unrank(self.r, k).expect("valid rank"))
            .filter(|e| !self.edges.contains(e))
            .collect()
    }

    /// Replaces edge `remove` by the non-edge `add`.
    pub fn swap_edge(&self, remove: &Edge, add: Edge) -> Result<Hypergraph> {
        if !self.edges.contains(remove) {
            return Err(invalid(format!("{remove:?} is not an edge")));
        }
        if self.edges.contains(&add) {
            return Err(invalid(format!("{add:?} is already an edge")));
        }
        let mut edges = self.edges.clone();
        edges.remove(remove);
        edges.insert(add);
        Hypergraph::new(self.r, self.n, edges)
    }
}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hypergraph(r={}, n={}, ", self.r, self.n)?;
        f.debug_set().entries(self.edges.iter()).finish()?;
        write!(f, ")")
    }
}

/// `C_{r,m}`: the first `m` `r`-sets in colex order, on the vertices they use.
pub fn build_colex(r: u32, m: u64) -> Result<Hypergraph> {
    if r == 0 || m == 0 {
        return Err(invalid("build_colex needs r >= 1 and m >= 1"));
    }
    let edges: BTreeSet<Edge> = (1..=m)
        .map(|k| colex_unrank(r, k))
        .collect::<Result<_>>()?;
    let n = edges
        .last()
        .and_then(Edge::max_vertex)
        .expect("at least one edge");
    Ok(Hypergraph::from_set_unchecked(r, n, edges))
}

/// The complete `r`-graph `K^r_t`.
pub fn complete(r: u32, t: u32) -> Result<Hypergraph> {
    if r == 0 || r > t {
        return Err(invalid(format!("complete graph needs 1 <= r <= t, got r={r}, t={t}")));
    }
    let m = binom(t as u64, r as u64)? as u64;
    build_colex(r, m)
}
