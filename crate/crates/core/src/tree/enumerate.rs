//! Exhaustive enumeration of small leaf-labelled topologies by leaf
//! insertion: leaf `k + 1` goes onto every edge (subdividing it) and, when
//! multifurcations are allowed, onto every internal vertex.

use std::collections::HashSet;

use num_traits::Zero;

use super::{Edge, PhyloTree, Topology};
use crate::combinat::mask_of;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TopologyMode {
    All,
    Binary,
    /// Exactly one vertex of degree 4, every other internal vertex of degree 3.
    OneDegree4,
}

/// Edge list over fixed vertex ids: leaves `0..n_final`, internal from `n_final`.
#[derive(Clone)]
struct Draft {
    edges: Vec<(usize, usize)>,
    next_internal: usize,
}

impl Draft {
    fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    fn internal(&self, n_final: usize) -> std::ops::Range<usize> {
        n_final..self.next_internal
    }

    fn degree_profile_ok(&self, n_final: usize, mode: TopologyMode) -> bool {
        let mut fours = 0;
        for v in self.internal(n_final) {
            match self.degree(v) {
                3 => {}
                4 if mode != TopologyMode::Binary => fours += 1,
                _ if mode == TopologyMode::All => {}
                _ => return false,
            }
        }
        mode != TopologyMode::OneDegree4 || fours <= 1
    }

    fn into_topology(self, n: usize) -> Topology {
        let Draft {
            edges,
            next_internal,
        } = self;
        let edges = edges
            .into_iter()
            .map(|(a, b)| Edge::new(a, b, Rational::zero()))
            .collect();
        Topology(PhyloTree::new(n, next_internal, edges).expect("insertion keeps a valid tree"))
    }
}

fn split_key(topo: &Topology) -> Vec<u64> {
    let mut masks: Vec<u64> = topo.key().iter().map(|s| mask_of(s.side())).collect();
    masks.sort_unstable();
    masks
}

pub fn enumerate_topologies(n: usize, mode: TopologyMode) -> Result<Vec<Topology>> {
    if !(3..=9).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "topology enumeration supports 3 <= n <= 9, got {n}"
        )));
    }
    let centre = n;
    let mut layer = vec![Draft {
        edges: vec![(0, centre), (1, centre), (2, centre)],
        next_internal: n + 1,
    }];
    for leaf in 3..n {
        let mut next_layer = Vec::new();
        for d in &layer {
            for (i, &(a, b)) in d.edges.iter().enumerate() {
                let w = d.next_internal;
                let mut edges = d.edges.clone();
                edges[i] = (a, w);
                edges.push((w, b));
                edges.push((w, leaf));
                next_layer.push(Draft {
                    edges,
                    next_internal: w + 1,
                });
            }
            if mode != TopologyMode::Binary {
                for v in d.internal(n) {
                    let mut edges = d.edges.clone();
                    edges.push((v, leaf));
                    next_layer.push(Draft {
                        edges,
                        next_internal: d.next_internal,
                    });
                }
            }
        }
        next_layer.retain(|d| d.degree_profile_ok(n, mode));
        layer = next_layer;
    }
    let mut seen = HashSet::new();
    let mut out: Vec<(Vec<u64>, Topology)> = Vec::new();
    for d in layer {
        let topo = d.into_topology(n);
        if mode == TopologyMode::OneDegree4 && topo.degree4_vertices().len() != 1 {
            continue;
        }
        let key = split_key(&topo);
        if seen.insert(key.clone()) {
            out.push((key, topo));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out.into_iter().map(|(_, t)| t).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// (2n-5)!! binary unrooted trees on n leaves.
    fn double_factorial_count(n: usize) -> usize {
        (1..=2 * n - 5).step_by(2).product()
    }

    #[test]
    fn binary_counts() {
        assert_eq!(
            enumerate_topologies(3, TopologyMode::Binary).unwrap().len(),
            1
        );
        assert_eq!(
            enumerate_topologies(5, TopologyMode::Binary).unwrap().len(),
            15
        );
        assert_eq!(
            enumerate_topologies(6, TopologyMode::Binary).unwrap().len(),
            105
        );
        for n in 4..=8 {
            assert_eq!(
                enumerate_topologies(n, TopologyMode::Binary).unwrap().len(),
                double_factorial_count(n)
            );
        }
    }

    #[test]
    fn all_counts_match_known_totals() {
        // unrooted leaf-labelled trees without degree-2 vertices: 4, 26, 236
        assert_eq!(enumerate_topologies(4, TopologyMode::All).unwrap().len(), 4);
        assert_eq!(
            enumerate_topologies(5, TopologyMode::All).unwrap().len(),
            26
        );
        assert_eq!(
            enumerate_topologies(6, TopologyMode::All).unwrap().len(),
            236
        );
    }

    #[test]
    fn one_degree4_counts() {
        let stars = enumerate_topologies(4, TopologyMode::OneDegree4).unwrap();
        assert_eq!(stars.len(), 1);
        // each such topology is the contraction of exactly three binary ones:
        // count = (#binary * #internal edges) / 3
        for n in 5..=7 {
            let binary = double_factorial_count(n);
            let expected = binary * (n - 3) / 3;
            assert_eq!(
                enumerate_topologies(n, TopologyMode::OneDegree4)
                    .unwrap()
                    .len(),
                expected
            );
        }
    }

    #[test]
    fn edges_bounded_by_2n_minus_3() {
        for topo in enumerate_topologies(6, TopologyMode::All).unwrap() {
            let n = topo.n_leaves();
            assert!(topo.edge_count() <= 2 * n - 3);
            assert_eq!(topo.edge_count() == 2 * n - 3, topo.tree().is_binary());
        }
    }

    #[test]
    fn guardrail() {
        assert!(enumerate_topologies(2, TopologyMode::All).is_err());
        assert!(enumerate_topologies(10, TopologyMode::Binary).is_err());
    }
}
