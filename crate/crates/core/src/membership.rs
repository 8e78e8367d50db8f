//! Membership test for weighted dissimilarity vectors and tree recovery.
//!
//! A vector passes when every cube hyperplane vanishes on it and every leaf
//! quadruple satisfies the four-point condition (for one or for every
//! choice of padding set `A`). Cube conditions gate the four-point scan.

use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::combinat::{enumerate_cubes, merge_sorted, relabel_cube, subsets, subsets_of, RSubset};
use crate::dissim::{d_weighted, recover_d2, SubsetVector};
use crate::error::{Error, Result};
use crate::linalg::cube_rows;
use crate::rational::{self, Rational};
use crate::tree::{Edge, PhyloTree};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FourPointMode {
    /// Only the lex-smallest padding set per quadruple.
    #[default]
    SingleA,
    AllA,
}

impl FourPointMode {
    pub fn name(self) -> &'static str {
        match self {
            FourPointMode::SingleA => "single_A",
            FourPointMode::AllA => "all_A",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourPointViolation {
    pub quadruple: [usize; 4],
    pub a: Vec<usize>,
    /// `w_{ijA}+w_{klA}`, `w_{ikA}+w_{jlA}`, `w_{ilA}+w_{jkA}`.
    pub sums: [Rational; 3],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeViolation {
    pub six: Vec<usize>,
    pub shift: Vec<usize>,
    pub cube: usize,
    /// Black sum minus white sum.
    pub imbalance: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub n: usize,
    pub r: usize,
    pub verdict: Verdict,
    pub mode: FourPointMode,
    /// False when cube violations short-circuited the four-point scan.
    pub four_point_checked: bool,
    pub four_point_violations: Vec<FourPointViolation>,
    pub cube_violations: Vec<CubeViolation>,
    pub witness_tree: Option<PhyloTree>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json_value(&self) -> Value {
        let fmt_all = |xs: &[Rational]| xs.iter().map(rational::format).collect::<Vec<_>>();
        json!({
            "n": self.n,
            "r": self.r,
            "verdict": if self.passed() { "pass" } else { "fail" },
            "mode": self.mode.name(),
            "four_point_checked": self.four_point_checked,
            "four_point_violations": self.four_point_violations.iter().map(|v| json!({
                "quadruple": v.quadruple,
                "A": v.a,
                "sums": fmt_all(&v.sums),
            })).collect::<Vec<_>>(),
            "cube_violations": self.cube_violations.iter().map(|v| json!({
                "I": v.six,
                "J": v.shift,
                "cube": v.cube,
                "imbalance": rational::format(&v.imbalance),
            })).collect::<Vec<_>>(),
            "witness_tree": self.witness_tree.as_ref().map(PhyloTree::to_newick),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("certificates always serialize")
    }
}

fn check_range(w: &SubsetVector) -> Result<()> {
    let (n, r) = (w.n(), w.r());
    if r < 2 || r + 2 > n {
        return Err(Error::OutOfRange(format!(
            "membership needs 2 <= r <= n-2, got n={n}, r={r}"
        )));
    }
    Ok(())
}

/// Every nonzero cube hyperplane value, in `(I, J, cube)` order.
pub fn check_cube_conditions(w: &SubsetVector) -> Result<Vec<CubeViolation>> {
    check_range(w)?;
    let cubes = enumerate_cubes();
    let rows = cube_rows(w.n(), w.r());
    let found: Vec<Option<CubeViolation>> = rows
        .into_par_iter()
        .map(|row| {
            let six = RSubset::from_sorted_unchecked(row.six.clone());
            let cube = relabel_cube(&cubes[row.cube], &six).expect("six-subset");
            let side = |ts: &[[usize; 3]; 4]| {
                ts.iter().fold(Rational::zero(), |acc, t| {
                    acc + w.at(&merge_sorted(&row.shift, t))
                })
            };
            let imbalance = side(&cube.black) - side(&cube.white);
            (!imbalance.is_zero()).then(|| CubeViolation {
                six: row.six,
                shift: row.shift,
                cube: row.cube,
                imbalance,
            })
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

fn three_sums(w: &SubsetVector, q: &[usize], a: &[usize]) -> [Rational; 3] {
    let x = |p: usize, s: usize| w.at(&merge_sorted(&[q[p], q[s]], a)).clone();
    [x(0, 1) + x(2, 3), x(0, 2) + x(1, 3), x(0, 3) + x(1, 2)]
}

/// Maximum of the three sums attained at least twice.
pub fn four_point_holds(sums: &[Rational; 3]) -> bool {
    let max = sums.iter().max().expect("three sums");
    sums.iter().filter(|s| *s == max).count() >= 2
}

pub fn check_four_point(w: &SubsetVector, mode: FourPointMode) -> Result<Vec<FourPointViolation>> {
    check_range(w)?;
    let (n, r) = (w.n(), w.r());
    let found: Vec<Vec<FourPointViolation>> = subsets(n, 4)
        .into_par_iter()
        .map(|q| {
            let rest: Vec<usize> = (1..=n).filter(|x| !q.contains(x)).collect();
            let pads = match mode {
                FourPointMode::SingleA => vec![rest[..r - 2].to_vec()],
                FourPointMode::AllA => subsets_of(&rest, r - 2),
            };
            pads.into_iter()
                .filter_map(|a| {
                    let sums = three_sums(w, &q, &a);
                    (!four_point_holds(&sums)).then(|| FourPointViolation {
                        quadruple: [q[0], q[1], q[2], q[3]],
                        a,
                        sums,
                    })
                })
                .collect()
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

pub fn is_weighted_dissimilarity(w: &SubsetVector, mode: FourPointMode) -> Result<Certificate> {
    let cube_violations = check_cube_conditions(w)?;
    let four_point_checked = cube_violations.is_empty();
    let four_point_violations = if four_point_checked {
        check_four_point(w, mode)?
    } else {
        Vec::new()
    };
    let verdict = if cube_violations.is_empty() && four_point_violations.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Certificate {
        n: w.n(),
        r: w.r(),
        verdict,
        mode,
        four_point_checked,
        four_point_violations,
        cube_violations,
        witness_tree: None,
    })
}

/// Rebuilds the tree realising a pairwise vector by repeatedly joining a
/// cherry. Zero-length internal edges are contracted in the result.
pub fn reconstruct_tree(d: &SubsetVector) -> Result<PhyloTree> {
    let n = d.n();
    if d.r() != 2 {
        return Err(Error::Dimension(format!(
            "reconstruct_tree takes a pair vector, got r={}",
            d.r()
        )));
    }
    if n == 2 {
        return PhyloTree::new(2, 2, vec![Edge::new(0, 1, d.at(&[1, 2]).clone())]);
    }
    if n >= 4 {
        if let Some(v) = check_four_point(d, FourPointMode::SingleA)?.first() {
            return Err(Error::NotTreeMetric {
                quadruple: v.quadruple,
            });
        }
    }

    // node ids: leaves 0..n, joined nodes from n; dist grows as nodes appear
    let mut dist: Vec<Vec<Rational>> = vec![vec![Rational::zero(); 2 * n]; 2 * n];
    for p in subsets(n, 2) {
        let v = d.at(&p).clone();
        dist[p[0] - 1][p[1] - 1] = v.clone();
        dist[p[1] - 1][p[0] - 1] = v;
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut edges = Vec::new();
    let mut next = n;
    let two = rational::int(2);

    while active.len() > 3 {
        let (i, j) = find_cherry(&dist, &active)
            .ok_or_else(|| Error::Internal("four-point metric without a cherry".into()))?;
        let k = *active
            .iter()
            .find(|&&k| k != i && k != j)
            .expect("at least four active nodes");
        let li = (&dist[i][j] + &dist[i][k] - &dist[j][k]) / &two;
        let lj = &dist[i][j] - &li;
        let v = next;
        next += 1;
        for &m in &active {
            if m != i && m != j {
                let dv = (&dist[i][m] + &dist[j][m] - &dist[i][j]) / &two;
                dist[v][m] = dv.clone();
                dist[m][v] = dv;
            }
        }
        edges.push(Edge::new(v, i, li));
        edges.push(Edge::new(v, j, lj));
        active.retain(|&m| m != i && m != j);
        active.push(v);
    }

    let (a, b, c) = (active[0], active[1], active[2]);
    let centre = next;
    let arm = |x: usize, y: usize, z: usize| (&dist[x][y] + &dist[x][z] - &dist[y][z]) / &two;
    edges.push(Edge::new(centre, a, arm(a, b, c)));
    edges.push(Edge::new(centre, b, arm(b, a, c)));
    edges.push(Edge::new(centre, c, arm(c, a, b)));
    for e in &edges {
        if e.u >= n && e.v >= n && e.length < Rational::zero() {
            return Err(Error::Internal(
                "negative internal edge from a four-point metric".into(),
            ));
        }
    }
    Ok(PhyloTree::new(n, centre + 1, edges)?.canonical_form())
}

fn find_cherry(dist: &[Vec<Rational>], active: &[usize]) -> Option<(usize, usize)> {
    for (x, &i) in active.iter().enumerate() {
        for &j in &active[x + 1..] {
            let mut diffs = active
                .iter()
                .filter(|&&k| k != i && k != j)
                .map(|&k| &dist[i][k] - &dist[j][k]);
            let first = diffs.next()?;
            if diffs.all(|d| d == first) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Membership test followed by reconstruction. The rebuilt tree is always
/// re-checked against `w`; a mismatch is reported as an internal error.
pub fn recover_tree(w: &SubsetVector, mode: FourPointMode) -> Result<Certificate> {
    let mut cert = is_weighted_dissimilarity(w, mode)?;
    if !cert.passed() {
        return Ok(cert);
    }
    let tree = match reconstruct_tree(&recover_d2(w)?) {
        Ok(t) => t,
        Err(e) => {
            return Err(Error::Internal(format!(
                "vector passed membership but reconstruction failed: {e}"
            )))
        }
    };
    if d_weighted(&tree, w.r())? != *w {
        return Err(Error::Internal(
            "reconstructed tree does not reproduce the input vector".into(),
        ));
    }
    cert.witness_tree = Some(tree);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissim::{d2, d_classic};
    use crate::rational::{frac, int};
    use crate::tree::parse_newick;

    fn pairs(n: usize, vals: &[i64]) -> SubsetVector {
        SubsetVector::new(n, 2, vals.iter().map(|&v| int(v)).collect()).unwrap()
    }

    fn seven_leaf_tree() -> PhyloTree {
        parse_newick("(((1:1,2:1):1,(3:1,4:1):1):1,(5:1,6:1):1,7:1);").unwrap()
    }

    #[test]
    fn four_point_examples() {
        let q = d2(&parse_newick("(1:1,2:1,(3:1,4:1):1);").unwrap());
        assert_eq!(three_sums(&q, &[1, 2, 3, 4], &[]), [int(4), int(6), int(6)]);
        assert!(check_four_point(&q, FourPointMode::SingleA)
            .unwrap()
            .is_empty());
        // 12 13 14 23 24 34
        let bad = pairs(4, &[2, 5, 3, 3, 3, 2]);
        let v = check_four_point(&bad, FourPointMode::AllA).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].sums, [int(4), int(8), int(6)]);
        let constant = SubsetVector::new(7, 3, vec![frac(5, 2); 35]).unwrap();
        assert!(check_four_point(&constant, FourPointMode::AllA)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn cube_examples() {
        let w = d_weighted(&seven_leaf_tree(), 4).unwrap();
        assert!(check_cube_conditions(&w).unwrap().is_empty());
        let mut bumped = w.clone();
        let s = RSubset::new(vec![1, 2, 3, 4], 7).unwrap();
        bumped.set(&s, w.get(&s).unwrap() + int(1)).unwrap();
        let v = check_cube_conditions(&bumped).unwrap();
        assert!(!v.is_empty());
        assert!(v
            .iter()
            .all(|c| c.imbalance == int(1) || c.imbalance == int(-1)));
        let wide = SubsetVector::new(7, 5, (0..21).map(|k| int(k * k)).collect()).unwrap();
        assert!(check_cube_conditions(&wide).unwrap().is_empty());
        assert!(check_cube_conditions(&d2(&seven_leaf_tree()))
            .unwrap()
            .is_empty());
        assert!(check_cube_conditions(&SubsetVector::zeros(7, 6).unwrap()).is_err());
    }

    #[test]
    fn membership_examples() {
        let t = seven_leaf_tree();
        for r in 2..=5 {
            let w = d_weighted(&t, r).unwrap();
            for mode in [FourPointMode::SingleA, FourPointMode::AllA] {
                assert!(
                    is_weighted_dissimilarity(&w, mode).unwrap().passed(),
                    "r={r}"
                );
            }
        }
        let generic =
            parse_newick("(((1:3,2:1/2):2,(3:5,4:1):1/3):7/4,(5:2,6:9/2):3/2,7:5/3);").unwrap();
        let c = is_weighted_dissimilarity(&d_classic(&generic, 4).unwrap(), FourPointMode::SingleA)
            .unwrap();
        assert!(!c.passed());
        assert!(is_weighted_dissimilarity(
            &SubsetVector::zeros(7, 4).unwrap(),
            FourPointMode::AllA
        )
        .unwrap()
        .passed());
    }

    #[test]
    fn reconstruct_examples() {
        let q = reconstruct_tree(&pairs(4, &[2, 3, 3, 3, 3, 2])).unwrap();
        assert_eq!(q.to_newick(), "(1:1,2:1,(3:1,4:1):1);");
        let star = reconstruct_tree(&pairs(4, &[2; 6])).unwrap();
        assert_eq!(star.to_newick(), "(1:1,2:1,3:1,4:1);");
        let two = reconstruct_tree(&pairs(2, &[-1])).unwrap();
        assert_eq!(two.leaf_distance(1, 2).unwrap(), int(-1));
        let bad = reconstruct_tree(&pairs(4, &[2, 5, 3, 3, 3, 2]));
        assert!(matches!(
            bad,
            Err(Error::NotTreeMetric {
                quadruple: [1, 2, 3, 4]
            })
        ));
    }

    #[test]
    fn reconstruct_negative_pendants_and_multifurcation() {
        let t = parse_newick("((1:-2,2:1/3):0,(3:4,4:-1):5/2,5:-7,(6:1,7:0):1);")
            .unwrap()
            .canonical_form();
        let back = reconstruct_tree(&d2(&t)).unwrap();
        assert!(back.same_tree(&t));
        assert_eq!(d2(&back), d2(&t));
    }

    #[test]
    fn recover_examples() {
        let t = seven_leaf_tree();
        let w = d_weighted(&t, 4).unwrap();
        let cert = recover_tree(&w, FourPointMode::SingleA).unwrap();
        assert!(cert.witness_tree.as_ref().unwrap().same_tree(&t));
        let tripled = recover_tree(&w.scale(&int(3)), FourPointMode::SingleA)
            .unwrap()
            .witness_tree
            .unwrap();
        let lengths: Vec<Rational> = t.edges().iter().map(|e| &e.length * int(3)).collect();
        assert!(tripled.same_tree(&t.with_lengths(lengths).unwrap()));
        let mut bumped = w.clone();
        let s = RSubset::new(vec![2, 4, 6, 7], 7).unwrap();
        bumped.set(&s, w.get(&s).unwrap() + frac(1, 3)).unwrap();
        let cert = recover_tree(&bumped, FourPointMode::SingleA).unwrap();
        assert!(!cert.passed() && cert.witness_tree.is_none());
        let json = cert.to_json_value();
        assert_eq!(json["verdict"], "fail");
        assert!(json["witness_tree"].is_null());
    }
}
