//! Subsets of `[n] = {1, ..., n}` in lexicographic order, and the fifteen
//! cube subgraphs of the triple graph on `([6] choose 3)`.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// A strictly increasing tuple of labels from `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct RSubset(Vec<usize>);

impl RSubset {
    pub fn new(elements: Vec<usize>, n: usize) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidSubset("empty subset".into()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSubset(format!(
                "{elements:?} is not strictly increasing"
            )));
        }
        if elements[0] < 1 || elements[elements.len() - 1] > n {
            return Err(Error::InvalidSubset(format!(
                "{elements:?} not inside 1..={n}"
            )));
        }
        Ok(RSubset(elements))
    }

    /// Sorts first; fails on repeated or out-of-range labels.
    pub fn from_unsorted(mut elements: Vec<usize>, n: usize) -> Result<Self> {
        elements.sort_unstable();
        Self::new(elements, n)
    }

    pub(crate) fn from_sorted_unchecked(elements: Vec<usize>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        RSubset(elements)
    }

    pub fn elements(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    /// Bit `i - 1` set for every element `i`.
    pub fn mask(&self) -> u64 {
        mask_of(&self.0)
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl fmt::Display for RSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

pub fn mask_of(elements: &[usize]) -> u64 {
    elements.iter().fold(0u64, |m, &x| m | (1u64 << (x - 1)))
}

/// Position of `s` among the `r`-subsets of `[n]` in lex order, 0-based.
pub fn lex_rank(s: &RSubset, n: usize) -> Result<usize> {
    let els = s.elements();
    if els.iter().any(|&x| x < 1 || x > n) {
        return Err(Error::InvalidSubset(format!("{s} not inside 1..={n}")));
    }
    Ok(rank_sorted(els, n))
}

/// Lex rank of an already validated sorted slice.
pub(crate) fn rank_sorted(els: &[usize], n: usize) -> usize {
    let r = els.len();
    let mut rank = 0;
    let mut prev = 0;
    for (pos, &c) in els.iter().enumerate() {
        for v in prev + 1..c {
            rank += binomial(n - v, r - pos - 1);
        }
        prev = c;
    }
    rank
}

pub fn lex_unrank(k: usize, n: usize, r: usize) -> Result<RSubset> {
    let total = binomial(n, r);
    if r == 0 || k >= total {
        return Err(Error::OutOfRange(format!(
            "rank {k} not below C({n},{r}) = {total}"
        )));
    }
    let mut k = k;
    let mut out = Vec::with_capacity(r);
    let mut v = 1;
    for pos in 0..r {
        loop {
            let block = binomial(n - v, r - pos - 1);
            if k < block {
                break;
            }
            k -= block;
            v += 1;
        }
        out.push(v);
        v += 1;
    }
    Ok(RSubset(out))
}

/// All `r`-subsets of the sorted label list `ground`, in lex order.
pub fn subsets_of(ground: &[usize], r: usize) -> Vec<Vec<usize>> {
    let m = ground.len();
    let mut out = Vec::with_capacity(binomial(m, r));
    if r > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.iter().map(|&i| ground[i]).collect());
        let mut i = r;
        while i > 0 && idx[i - 1] == i - 1 + m - r {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All `r`-subsets of `[n]`, in lex order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let ground: Vec<usize> = (1..=n).collect();
    subsets_of(&ground, r)
}

/// Sorted union of two disjoint sorted lists.
pub(crate) fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out
}

pub type Triple = [usize; 3];

/// A 3-cube inside the graph on triples (adjacent when they share a pair),
/// with its black/white bipartition. The lex-smallest vertex is black.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cube {
    pub id: usize,
    pub black: [Triple; 4],
    pub white: [Triple; 4],
}

impl Cube {
    /// The eight vertices, sorted.
    pub fn vertices(&self) -> Vec<Triple> {
        let mut v: Vec<Triple> = self
            .black
            .iter()
            .chain(self.white.iter())
            .copied()
            .collect();
        v.sort_unstable();
        v
    }
}

fn shares_pair(a: &Triple, b: &Triple) -> bool {
    a.iter().filter(|x| b.contains(x)).count() == 2
}

/// Q3 on vertices `0..8`: adjacent iff the labels differ in one bit.
fn is_cube_graph(adj: &[[bool; 8]; 8]) -> bool {
    if (0..8).any(|i| adj[i].iter().filter(|&&e| e).count() != 3) {
        return false;
    }
    let mut image = [usize::MAX; 8];
    let mut used = [false; 8];
    fn extend(
        v: usize,
        adj: &[[bool; 8]; 8],
        image: &mut [usize; 8],
        used: &mut [bool; 8],
    ) -> bool {
        if v == 8 {
            return true;
        }
        for target in 0..8 {
            if used[target] {
                continue;
            }
            let consistent = (0..v).all(|u| adj[u][v] == (image[u] ^ target).is_power_of_two());
            if consistent {
                image[v] = target;
                used[target] = true;
                if extend(v + 1, adj, image, used) {
                    return true;
                }
                used[target] = false;
            }
        }
        false
    }
    extend(0, adj, &mut image, &mut used)
}

fn bipartition(vertices: &[Triple]) -> ([Triple; 4], [Triple; 4]) {
    let mut color = [None::<bool>; 8];
    color[0] = Some(true);
    let mut stack = vec![0usize];
    while let Some(u) = stack.pop() {
        for w in 0..8 {
            if shares_pair(&vertices[u], &vertices[w]) && color[w].is_none() {
                color[w] = Some(!color[u].unwrap());
                stack.push(w);
            }
        }
    }
    let black: Vec<Triple> = (0..8)
        .filter(|&i| color[i] == Some(true))
        .map(|i| vertices[i])
        .collect();
    let white: Vec<Triple> = (0..8)
        .filter(|&i| color[i] == Some(false))
        .map(|i| vertices[i])
        .collect();
    (black.try_into().unwrap(), white.try_into().unwrap())
}

fn brute_force_cubes() -> Vec<Cube> {
    let triples: Vec<Triple> = subsets(6, 3)
        .into_iter()
        .map(|t| [t[0], t[1], t[2]])
        .collect();
    let mut found = Vec::new();
    for pick in subsets_of(&(0..20).collect::<Vec<_>>(), 8) {
        let verts: Vec<Triple> = pick.iter().map(|&i| triples[i]).collect();
        let mut adj = [[false; 8]; 8];
        let mut regular = true;
        for i in 0..8 {
            for j in 0..8 {
                adj[i][j] = i != j && shares_pair(&verts[i], &verts[j]);
            }
            if adj[i].iter().filter(|&&e| e).count() != 3 {
                regular = false;
                break;
            }
        }
        if regular && is_cube_graph(&adj) {
            // `verts` is sorted, so verts[0] is the lex-smallest triple.
            let (black, white) = bipartition(&verts);
            found.push(Cube {
                id: 0,
                black,
                white,
            });
        }
    }
    found.sort_by_key(|c| c.vertices());
    for (id, c) in found.iter_mut().enumerate() {
        c.id = id;
    }
    found
}

/// The 15 cubes on `([6] choose 3)`, ordered by sorted vertex list.
///
/// Computed once by exhaustive search over all 8-subsets of the 20 triples.
pub fn enumerate_cubes() -> &'static [Cube] {
    static CUBES: OnceLock<Vec<Cube>> = OnceLock::new();
    CUBES.get_or_init(|| {
        let cubes = brute_force_cubes();
        assert_eq!(
            cubes.len(),
            15,
            "triple graph must contain exactly 15 induced cubes"
        );
        cubes
    })
}

/// A cube transported onto a 6-subset `I` by the monotone map `[6] -> I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelabeledCube {
    pub id: usize,
    pub black: [Triple; 4],
    pub white: [Triple; 4],
}

pub fn relabel_cube(cube: &Cube, target: &RSubset) -> Result<RelabeledCube> {
    let labels = target.elements();
    if labels.len() != 6 {
        return Err(Error::InvalidSubset(format!(
            "cube relabel target {target} must have 6 elements"
        )));
    }
    let map = |t: &Triple| [labels[t[0] - 1], labels[t[1] - 1], labels[t[2] - 1]];
    Ok(RelabeledCube {
        id: cube.id,
        black: cube.black.map(|t| map(&t)),
        white: cube.white.map(|t| map(&t)),
    })
}
