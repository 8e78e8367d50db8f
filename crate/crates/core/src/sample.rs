//! Seeded random inputs for property checks: trees, `2 × n` matrices and
//! torus points. Everything is driven by a ChaCha stream, so a seed fixes
//! the whole sample.

use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebraic::{pluecker_2n, PlueckerVector};
use crate::combinat::binomial;
use crate::dissim::SubsetVector;
use crate::error::Result;
use crate::linalg::RationalMatrix;
use crate::rational::{frac, Rational};
use crate::tree::{Edge, PhyloTree};

pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform over `{p/q : lo <= p/q <= hi, 1 <= q <= 4}` by numerator, per
/// denominator.
pub fn random_rational<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> Rational {
    let q = rng.gen_range(1..=4);
    frac(rng.gen_range(lo * q..=hi * q), q)
}

/// A random tree on `n` leaves: random binary topology by leaf insertion,
/// pendant lengths in `[-2, 5]`, internal lengths in `[0, 5]` with roughly
/// one in six exactly zero.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Result<PhyloTree> {
    if n == 2 {
        return PhyloTree::new(2, 2, vec![Edge::new(0, 1, random_rational(rng, -2, 5))]);
    }
    let centre = n;
    let mut edges: Vec<(usize, usize)> = vec![(0, centre), (1, centre), (2, centre)];
    let mut next = n + 1;
    for leaf in 3..n {
        let k = rng.gen_range(0..edges.len());
        let (a, b) = edges[k];
        edges[k] = (a, next);
        edges.push((next, b));
        edges.push((next, leaf));
        next += 1;
    }
    let edges = edges
        .into_iter()
        .map(|(a, b)| {
            let length = if a < n || b < n {
                random_rational(rng, -2, 5)
            } else if rng.gen_ratio(1, 6) {
                Rational::zero()
            } else {
                random_rational(rng, 0, 5)
            };
            Edge::new(a, b, length)
        })
        .collect();
    PhyloTree::new(n, next, edges)
}

/// A `2 × n` matrix with entries in `[-9, 9]` whose `2 × 2` minors are all
/// nonzero (rejection sampling), with its Plücker vector.
pub fn random_2xn<R: Rng>(rng: &mut R, n: usize) -> Result<(RationalMatrix, PlueckerVector)> {
    loop {
        let rows = (0..2)
            .map(|_| (0..n).map(|_| random_rational(rng, -9, 9)).collect())
            .collect();
        let m = RationalMatrix::from_rows(rows)?;
        if let Ok(x) = pluecker_2n(&m) {
            return Ok((m, x));
        }
    }
}

/// A random point with nonzero rational pair coordinates, generically off
/// the Grassmannian.
pub fn random_torus_point<R: Rng>(rng: &mut R, n: usize) -> Result<PlueckerVector> {
    let values = (0..binomial(n, 2))
        .map(|_| loop {
            let v = random_rational(rng, -9, 9);
            if !v.is_zero() {
                break v;
            }
        })
        .collect();
    PlueckerVector::new(SubsetVector::new(n, 2, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a: Vec<String> = (0..5)
            .map(|_| random_tree(&mut rng(7), 8).unwrap().to_newick())
            .collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut r = rng(7);
        let t1 = random_tree(&mut r, 8).unwrap();
        let t2 = random_tree(&mut r, 8).unwrap();
        assert_ne!(t1.to_newick(), t2.to_newick());
    }

    #[test]
    fn lengths_respect_ranges() {
        let mut r = rng(DEFAULT_SEED);
        for n in 2..=9 {
            let t = random_tree(&mut r, n).unwrap();
            for (e, edge) in t.edges().iter().enumerate() {
                let (lo, hi) = if t.is_internal_edge(e) {
                    (0, 5)
                } else {
                    (-2, 5)
                };
                assert!(edge.length >= frac(lo, 1) && edge.length <= frac(hi, 1));
            }
        }
        let (_, x) = random_2xn(&mut r, 6).unwrap();
        assert!(x.coords().values().iter().all(|v| !v.is_zero()));
    }
}
