//! Leaf-labelled phylogenetic trees with exact edge lengths.
//!
//! Vertices are plain indices. Leaf `k` (labels run `1..=n`) is always vertex
//! `k - 1`; internal vertices are numbered from `n` upwards. Internal edges
//! carry nonnegative lengths, pendant edges any rational length.

mod enumerate;
mod newick;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub use enumerate::{enumerate_topologies, TopologyMode};
pub use newick::parse_newick;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: Rational,
}

impl Edge {
    pub fn new(u: usize, v: usize, length: Rational) -> Self {
        Edge { u, v, length }
    }

    fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Leaf set on the side of an edge away from leaf 1, sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Split(Vec<usize>);

impl Split {
    pub fn side(&self) -> &[usize] {
        &self.0
    }

    pub fn separates(&self, a: usize, b: usize) -> bool {
        self.0.binary_search(&a).is_ok() != self.0.binary_search(&b).is_ok()
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct PhyloTree {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl PhyloTree {
    /// Builds and validates a tree on leaves `1..=n` (vertices `0..n`) and
    /// internal vertices `n..vertex_count`.
    pub fn new(n: usize, vertex_count: usize, edges: Vec<Edge>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidTree(format!(
                "need at least two leaves, got {n}"
            )));
        }
        if vertex_count < n || edges.len() + 1 != vertex_count {
            return Err(Error::InvalidTree(format!(
                "{} edges cannot form a tree on {vertex_count} vertices",
                edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); vertex_count];
        for (id, e) in edges.iter().enumerate() {
            if e.u >= vertex_count || e.v >= vertex_count || e.u == e.v {
                return Err(Error::InvalidTree(format!(
                    "edge {id} has bad endpoints ({}, {})",
                    e.u, e.v
                )));
            }
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        let tree = PhyloTree { n, edges, adj };
        if tree.reachable_from(0, None).len() != vertex_count {
            return Err(Error::InvalidTree("graph is disconnected".into()));
        }
        for v in 0..vertex_count {
            let deg = tree.adj[v].len();
            if v < n && deg != 1 {
                return Err(Error::InvalidTree(format!(
                    "leaf {} has degree {deg}",
                    v + 1
                )));
            }
            if v >= n && deg < 3 {
                return Err(Error::InvalidTree(format!(
                    "internal vertex {v} has degree {deg}"
                )));
            }
        }
        for (id, e) in tree.edges.iter().enumerate() {
            if tree.is_internal_edge(id) && e.length.is_negative() {
                return Err(Error::InvalidTree(format!(
                    "internal edge {id} has negative length {}",
                    rational::format(&e.length)
                )));
            }
        }
        Ok(tree)
    }

    pub fn n_leaves(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Result<&Edge> {
        self.edges.get(e).ok_or(Error::UnknownEdge(e))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// `(neighbour, edge id)` pairs.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn is_internal_edge(&self, e: usize) -> bool {
        self.edges[e].u >= self.n && self.edges[e].v >= self.n
    }

    pub fn is_binary(&self) -> bool {
        (self.n..self.vertex_count()).all(|v| self.degree(v) == 3)
    }

    pub fn internal_vertices(&self) -> std::ops::Range<usize> {
        self.n..self.vertex_count()
    }

    pub fn total_length(&self) -> Rational {
        self.edges
            .iter()
            .fold(Rational::zero(), |acc, e| acc + &e.length)
    }

    /// Same topology, new lengths (indexed by edge id).
    pub fn with_lengths(&self, lengths: Vec<Rational>) -> Result<PhyloTree> {
        if lengths.len() != self.edges.len() {
            return Err(Error::Dimension(format!(
                "{} lengths for {} edges",
                lengths.len(),
                self.edges.len()
            )));
        }
        let edges = self
            .edges
            .iter()
            .zip(lengths)
            .map(|(e, l)| Edge::new(e.u, e.v, l))
            .collect();
        PhyloTree::new(self.n, self.vertex_count(), edges)
    }

    fn reachable_from(&self, start: usize, skip_edge: Option<usize>) -> Vec<usize> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![start];
        let mut out = Vec::new();
        seen[start] = true;
        while let Some(x) = stack.pop() {
            out.push(x);
            for &(y, e) in &self.adj[x] {
                if Some(e) != skip_edge && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        out
    }

    fn check_leaf(&self, label: usize) -> Result<usize> {
        if label == 0 || label > self.n {
            return Err(Error::UnknownLeaf(label));
        }
        Ok(label - 1)
    }

    /// Distances from `start` to every vertex.
    fn distances_from(&self, start: usize) -> Vec<Rational> {
        let mut dist = vec![Rational::zero(); self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            for &(y, e) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    dist[y] = &dist[x] + &self.edges[e].length;
                    stack.push(y);
                }
            }
        }
        dist
    }

    pub fn leaf_distance(&self, i: usize, j: usize) -> Result<Rational> {
        let a = self.check_leaf(i)?;
        let b = self.check_leaf(j)?;
        if a == b {
            return Err(Error::OutOfRange(format!(
                "leaf_distance needs distinct leaves, got {i} twice"
            )));
        }
        Ok(self.distances_from(a)[b].clone())
    }

    /// `n x n` leaf distance table; entry `[i-1][j-1]` is `d(i, j)`.
    pub fn distance_matrix(&self) -> Vec<Vec<Rational>> {
        (0..self.n)
            .map(|a| self.distances_from(a)[..self.n].to_vec())
            .collect()
    }

    pub fn edge_split(&self, e: usize) -> Result<Split> {
        let edge = self.edge(e)?;
        let side_u = self.reachable_from(edge.u, Some(e));
        let side = if side_u.contains(&0) {
            self.reachable_from(edge.v, Some(e))
        } else {
            side_u
        };
        let mut leaves: Vec<usize> = side
            .into_iter()
            .filter(|&x| x < self.n)
            .map(|x| x + 1)
            .collect();
        leaves.sort_unstable();
        Ok(Split(leaves))
    }

    pub fn splits(&self) -> Vec<Split> {
        (0..self.edges.len())
            .map(|e| self.edge_split(e).expect("edge ids are in range"))
            .collect()
    }

    /// Pendant edges by leaf label, then internal edges by split.
    pub fn canonical_edge_order(&self) -> Vec<usize> {
        let mut pendant: Vec<(usize, usize)> = (0..self.edges.len())
            .filter(|&e| !self.is_internal_edge(e))
            .map(|e| (self.edges[e].u.min(self.edges[e].v), e))
            .collect();
        pendant.sort_unstable();
        let mut internal: Vec<(Split, usize)> = (0..self.edges.len())
            .filter(|&e| self.is_internal_edge(e))
            .map(|e| (self.edge_split(e).expect("edge ids are in range"), e))
            .collect();
        internal.sort();
        pendant
            .into_iter()
            .map(|(_, e)| e)
            .chain(internal.into_iter().map(|(_, e)| e))
            .collect()
    }

    /// Merges the endpoints of every listed internal edge.
    pub fn contract_edges(&self, contract: &BTreeSet<usize>) -> Result<PhyloTree> {
        if let Some(&bad) = contract
            .iter()
            .find(|&&e| e >= self.edges.len() || !self.is_internal_edge(e))
        {
            return Err(Error::InvalidTree(format!(
                "edge {bad} is not an internal edge"
            )));
        }
        let mut parent: Vec<usize> = (0..self.vertex_count()).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for &e in contract {
            let (a, b) = (
                find(&mut parent, self.edges[e].u),
                find(&mut parent, self.edges[e].v),
            );
            parent[a.max(b)] = a.min(b);
        }
        let mut new_id = vec![usize::MAX; self.vertex_count()];
        let mut next = self.n;
        for v in 0..self.vertex_count() {
            let root = find(&mut parent, v);
            if v < self.n {
                new_id[v] = v;
            } else if root == v {
                new_id[v] = next;
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(id, _)| !contract.contains(id))
            .map(|(_, e)| {
                let u = new_id[find(&mut parent, e.u)];
                let v = new_id[find(&mut parent, e.v)];
                Edge::new(u, v, e.length.clone())
            })
            .collect();
        PhyloTree::new(self.n, next, edges)
    }

    /// Contract every zero-length internal edge.
    pub fn canonical_form(&self) -> PhyloTree {
        let zero: BTreeSet<usize> = (0..self.edges.len())
            .filter(|&e| self.is_internal_edge(e) && self.edges[e].length.is_zero())
            .collect();
        self.contract_edges(&zero)
            .expect("contracting internal edges keeps a valid tree")
    }

    /// Split → length after contracting zero-length internal edges; two
    /// trees are the same phylogenetic tree iff these maps agree.
    pub fn canonical_key(&self) -> BTreeMap<Split, Rational> {
        let canon = self.canonical_form();
        canon
            .splits()
            .into_iter()
            .zip(canon.edges.iter().map(|e| e.length.clone()))
            .collect()
    }

    pub fn same_tree(&self, other: &PhyloTree) -> bool {
        self.n == other.n && self.canonical_key() == other.canonical_key()
    }

    /// The minimal subtree joining the leaves in `leaves`, with degree-2
    /// vertices suppressed. Its leaf `k` is original leaf `labels[k - 1]`.
    pub fn spanned_subtree(&self, leaves: &[usize]) -> Result<SpannedSubtree> {
        let mut labels = leaves.to_vec();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() < 2 {
            return Err(Error::OutOfRange(format!(
                "spanned subtree needs at least two leaves, got {leaves:?}"
            )));
        }
        for &l in &labels {
            self.check_leaf(l)?;
        }
        let nv = self.vertex_count();
        let mut keep = vec![true; nv];
        let mut degree: Vec<usize> = (0..nv).map(|v| self.degree(v)).collect();
        let wanted = |v: usize| v < self.n && labels.binary_search(&(v + 1)).is_ok();
        let mut stack: Vec<usize> = (0..nv).filter(|&v| degree[v] == 1 && !wanted(v)).collect();
        while let Some(v) = stack.pop() {
            if !keep[v] {
                continue;
            }
            keep[v] = false;
            for &(w, _) in &self.adj[v] {
                if keep[w] {
                    degree[w] -= 1;
                    if degree[w] == 1 && !wanted(w) {
                        stack.push(w);
                    }
                }
            }
        }
        // Branch vertices survive; chains through degree-2 vertices collapse.
        let m = labels.len();
        let mut new_id = vec![usize::MAX; nv];
        for (k, &l) in labels.iter().enumerate() {
            new_id[l - 1] = k;
        }
        let mut next = m;
        for v in self.n..nv {
            if keep[v] && degree[v] >= 3 {
                new_id[v] = next;
                next += 1;
            }
        }
        let mut edges = Vec::new();
        for start in 0..nv {
            if new_id[start] == usize::MAX {
                continue;
            }
            for &(first, e0) in &self.adj[start] {
                if !keep[first] {
                    continue;
                }
                let mut len = self.edges[e0].length.clone();
                let (mut prev, mut cur) = (start, first);
                while new_id[cur] == usize::MAX {
                    let &(nxt, e) = self.adj[cur]
                        .iter()
                        .find(|&&(w, _)| keep[w] && w != prev)
                        .expect("chain vertex has two kept neighbours");
                    len += &self.edges[e].length;
                    prev = cur;
                    cur = nxt;
                }
                if start < cur {
                    edges.push(Edge::new(new_id[start], new_id[cur], len));
                }
            }
        }
        let tree = PhyloTree::new(m, next, edges)?;
        Ok(SpannedSubtree { tree, labels })
    }

    /// Renames leaf `i` to `perm[i - 1]`.
    pub fn relabel_leaves(&self, perm: &[usize]) -> Result<PhyloTree> {
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (1..=self.n).collect::<Vec<_>>() {
            return Err(Error::InvalidTree(format!(
                "{perm:?} is not a permutation of 1..={}",
                self.n
            )));
        }
        let map = |x: usize| if x < self.n { perm[x] - 1 } else { x };
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(map(e.u), map(e.v), e.length.clone()))
            .collect();
        PhyloTree::new(self.n, self.vertex_count(), edges)
    }

    pub fn to_newick(&self) -> String {
        newick::write_newick(self)
    }

    pub fn topology(&self) -> Topology {
        Topology::from_tree(self)
    }
}

impl fmt::Display for PhyloTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_newick())
    }
}

/// A spanned subtree together with the original labels of its leaves.
#[derive(Clone, Debug)]
pub struct SpannedSubtree {
    pub tree: PhyloTree,
    pub labels: Vec<usize>,
}

impl SpannedSubtree {
    /// Distance between two leaves given by their original labels.
    pub fn distance(&self, a: usize, b: usize) -> Result<Rational> {
        let pos = |x: usize| {
            self.labels
                .binary_search(&x)
                .map(|p| p + 1)
                .map_err(|_| Error::UnknownLeaf(x))
        };
        self.tree.leaf_distance(pos(a)?, pos(b)?)
    }
}

/// A combinatorial tree: a [`PhyloTree`] whose lengths are ignored (all
/// stored as zero).
#[derive(Clone, Debug)]
pub struct Topology(PhyloTree);

/// One of the three ways to pull apart a degree-4 vertex.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub topology: Topology,
    /// Id of the inserted internal edge in `topology`.
    pub new_edge: usize,
}

impl Topology {
    pub fn from_tree(t: &PhyloTree) -> Topology {
        let zeros = vec![Rational::zero(); t.edges.len()];
        Topology(
            t.with_lengths(zeros)
                .expect("zero lengths are always valid"),
        )
    }

    pub fn tree(&self) -> &PhyloTree {
        &self.0
    }

    pub fn n_leaves(&self) -> usize {
        self.0.n
    }

    pub fn edge_count(&self) -> usize {
        self.0.edges.len()
    }

    pub fn with_lengths(&self, lengths: Vec<Rational>) -> Result<PhyloTree> {
        self.0.with_lengths(lengths)
    }

    /// Sorted split list, which identifies the topology.
    pub fn key(&self) -> Vec<Split> {
        let mut s = self.0.splits();
        s.sort();
        s
    }

    /// Length 1 on `e`, 0 elsewhere.
    pub fn split_metric(&self, e: usize) -> Result<PhyloTree> {
        self.0.edge(e)?;
        let lengths = (0..self.edge_count())
            .map(|i| {
                if i == e {
                    rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        self.0.with_lengths(lengths)
    }

    pub fn degree4_vertices(&self) -> Vec<usize> {
        self.0
            .internal_vertices()
            .filter(|&v| self.0.degree(v) == 4)
            .collect()
    }

    /// Splits vertex `v` (degree 4) along each of its three pairings of
    /// incident edges. Ordered by the split of the inserted edge.
    pub fn resolutions(&self, v: usize) -> Result<Vec<Resolution>> {
        let t = &self.0;
        if v >= t.vertex_count() || t.degree(v) != 4 {
            return Err(Error::InvalidTree(format!(
                "vertex {v} does not have degree 4"
            )));
        }
        let incident: Vec<usize> = t.adj[v].iter().map(|&(_, e)| e).collect();
        let w = t.vertex_count();
        let mut out = Vec::with_capacity(3);
        for partner in 1..4 {
            let moved: Vec<usize> = (1..4)
                .filter(|&k| k != partner)
                .map(|k| incident[k])
                .collect();
            let mut edges: Vec<Edge> = t
                .edges
                .iter()
                .enumerate()
                .map(|(id, e)| {
                    if moved.contains(&id) {
                        Edge::new(w, e.other(v), Rational::zero())
                    } else {
                        Edge::new(e.u, e.v, Rational::zero())
                    }
                })
                .collect();
            edges.push(Edge::new(v, w, Rational::zero()));
            let tree = PhyloTree::new(t.n, w + 1, edges)?;
            let new_edge = tree.edges.len() - 1;
            out.push(Resolution {
                topology: Topology(tree),
                new_edge,
            });
        }
        out.sort_by_key(|r| {
            r.topology
                .0
                .edge_split(r.new_edge)
                .expect("new edge exists")
        });
        Ok(out)
    }

    pub fn contract_edge(&self, e: usize) -> Result<Topology> {
        Ok(Topology(self.0.contract_edges(&BTreeSet::from([e]))?))
    }
}
