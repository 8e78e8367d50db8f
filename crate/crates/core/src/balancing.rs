//! Balancing audits at codimension-one cones of tree space.
//!
//! Around a topology `g` with a single degree-4 vertex, the images of the
//! split metrics of `g` span the cone's linear hull; the three resolutions of
//! the vertex add one ray each. For the image to be balanced those three rays
//! must be linearly dependent modulo the hull.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dissim::{d_classic, d_weighted};
use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::tree::{enumerate_topologies, parse_newick, PhyloTree, Topology, TopologyMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    Classic,
    Weighted,
}

impl MapKind {
    pub fn name(self) -> &'static str {
        match self {
            MapKind::Classic => "classic",
            MapKind::Weighted => "weighted",
        }
    }

    fn apply(self, t: &PhyloTree, r: usize) -> Result<Vec<crate::Rational>> {
        let v = match self {
            MapKind::Classic => d_classic(t, r)?,
            MapKind::Weighted => d_weighted(t, r)?,
        };
        Ok(v.into_values())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancingReport {
    pub n: usize,
    pub r: usize,
    pub map_kind: MapKind,
    /// Canonical Newick of the audited topology.
    pub topology: String,
    /// Position in the enumeration order, when produced by [`audit_all`].
    pub topology_index: Option<usize>,
    pub base_rank: usize,
    pub full_rank: usize,
    pub dependent_mod_base: bool,
    pub kernel_vector: Option<Vec<BigInt>>,
}

impl BalancingReport {
    pub fn to_json_value(&self) -> Value {
        json!({
            "n": self.n,
            "r": self.r,
            "map_kind": self.map_kind.name(),
            "topology": self.topology,
            "topology_index": self.topology_index,
            "base_rank": self.base_rank,
            "full_rank": self.full_rank,
            "dependent_mod_base": self.dependent_mod_base,
            "kernel_vector": self.kernel_vector.as_ref().map(|k| k.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
        })
    }
}

/// The 7-leaf topology with cherries `12`, `34`, `56` and leaf 7 all meeting
/// at one degree-4 vertex.
pub fn reference_cone() -> Topology {
    parse_newick("((1,2),(3,4),(5,6),7);")
        .expect("literal tree")
        .topology()
}

fn degree4_centre(g: &Topology) -> Result<usize> {
    let t = g.tree();
    let fours = g.degree4_vertices();
    if fours.len() != 1
        || t.internal_vertices()
            .any(|v| t.degree(v) != 3 && t.degree(v) != 4)
    {
        return Err(Error::InvalidTree(
            "need exactly one degree-4 vertex and all other internal vertices of degree 3".into(),
        ));
    }
    Ok(fours[0])
}

/// Rows: images of the split metrics of `g` (canonical edge order), then of
/// the inserted edge in each of the three resolutions (sorted by split).
pub fn star_matrix(g: &Topology, r: usize, kind: MapKind) -> Result<RationalMatrix> {
    let v = degree4_centre(g)?;
    let n = g.n_leaves();
    if r < 2 || r > n {
        return Err(Error::OutOfRange(format!(
            "star_matrix needs 2 <= r <= n, got n={n}, r={r}"
        )));
    }
    let mut rows = Vec::new();
    for e in g.tree().canonical_edge_order() {
        rows.push(kind.apply(&g.split_metric(e)?, r)?);
    }
    for res in g.resolutions(v)? {
        rows.push(kind.apply(&res.topology.split_metric(res.new_edge)?, r)?);
    }
    RationalMatrix::from_rows(rows)
}

pub fn audit(g: &Topology, r: usize, kind: MapKind) -> Result<BalancingReport> {
    let m = star_matrix(g, r, kind)?;
    let base = m.select_rows(&(0..g.edge_count()).collect::<Vec<_>>());
    let base_rank = base.rank();
    let full_rank = m.rank();
    let dependent_mod_base = full_rank < base_rank + 3;
    let kernel_vector = if dependent_mod_base && m.rows() - full_rank == 1 {
        m.left_kernel_basis().into_iter().next()
    } else {
        None
    };
    Ok(BalancingReport {
        n: g.n_leaves(),
        r,
        map_kind: kind,
        topology: g.tree().to_newick(),
        topology_index: None,
        base_rank,
        full_rank,
        dependent_mod_base,
        kernel_vector,
    })
}

/// Audits every topology with exactly one degree-4 vertex, in enumeration
/// order.
pub fn audit_all(n: usize, r: usize, kind: MapKind) -> Result<Vec<BalancingReport>> {
    if !(4..=8).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "audit_all supports 4 <= n <= 8, got {n}"
        )));
    }
    let topologies = enumerate_topologies(n, TopologyMode::OneDegree4)?;
    topologies
        .par_iter()
        .enumerate()
        .map(|(k, g)| {
            let mut rep = audit(g, r, kind)?;
            rep.topology_index = Some(k);
            Ok(rep)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn star_on_four_leaves() {
        let g = parse_newick("(1,2,3,4);").unwrap().topology();
        let m = star_matrix(&g, 2, MapKind::Classic).unwrap();
        assert_eq!((m.rows(), m.cols()), (7, 6));
        // resolution rows: 14|23, 13|24, 12|34 in split order {2,3}, {2,4}, {3,4}
        let expect = [[1, 1, 0, 0, 1, 1], [1, 0, 1, 1, 0, 1], [0, 1, 1, 1, 1, 0]];
        for (k, row) in expect.iter().enumerate() {
            assert_eq!(m.row(4 + k), row.map(int).as_slice());
        }
        let rep = audit(&g, 2, MapKind::Classic).unwrap();
        assert_eq!((rep.base_rank, rep.full_rank), (4, 6));
        assert!(rep.dependent_mod_base);
    }

    #[test]
    fn reference_cone_ranks() {
        let g = reference_cone();
        let c = audit(&g, 4, MapKind::Classic).unwrap();
        assert_eq!((c.full_rank, c.dependent_mod_base), (13, false));
        let w = audit(&g, 4, MapKind::Weighted).unwrap();
        assert_eq!(w.full_rank, 12);
        let k: Vec<i64> = vec![0, 0, 0, 0, 0, 0, 1, 1, 1, 1, -1, -1, -1];
        assert_eq!(
            w.kernel_vector.unwrap(),
            k.into_iter().map(BigInt::from).collect::<Vec<_>>()
        );
        assert!(audit(&g, 2, MapKind::Classic).unwrap().dependent_mod_base);
    }

    #[test]
    fn rejects_wrong_degrees() {
        let binary = parse_newick("((1,2),(3,4),5);").unwrap().topology();
        assert!(star_matrix(&binary, 2, MapKind::Classic).is_err());
        let two_fours = parse_newick("((1,2,3),(4,5,6));").unwrap().topology();
        assert!(audit(&two_fours, 3, MapKind::Weighted).is_err());
        assert!(audit_all(9, 4, MapKind::Classic).is_err());
    }

    #[test]
    fn relabel_invariance() {
        let g = reference_cone();
        let perm = [3, 7, 1, 5, 2, 6, 4];
        let h = g.tree().relabel_leaves(&perm).unwrap().topology();
        for kind in [MapKind::Classic, MapKind::Weighted] {
            let (a, b) = (audit(&g, 4, kind).unwrap(), audit(&h, 4, kind).unwrap());
            assert_eq!((a.base_rank, a.full_rank), (b.base_rank, b.full_rank));
        }
    }

    #[test]
    fn small_scan() {
        for rep in audit_all(6, 2, MapKind::Classic).unwrap() {
            assert!(rep.dependent_mod_base);
        }
        let reps = audit_all(6, 3, MapKind::Weighted).unwrap();
        assert_eq!(reps.len(), 105 * 3 / 3);
        assert!(reps.iter().all(|r| r.dependent_mod_base));
        assert!(reps
            .iter()
            .enumerate()
            .all(|(k, r)| r.topology_index == Some(k)));
    }
}
