//! Exact evaluation of the polynomial identities behind the weighted map:
//! Plücker coordinates of `2 × n` matrices, the monomial map `φ_r`, the cube
//! binomials `ψ`, and the three-term Plücker relations.

use num_traits::{One, Zero};

use crate::combinat::{merge_sorted, relabel_cube, subsets, subsets_of, Cube, RSubset};
use crate::dissim::SubsetVector;
use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::rational::Rational;

/// A point of the open torus: a subset vector with no zero coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlueckerVector(SubsetVector);

impl PlueckerVector {
    pub fn new(coords: SubsetVector) -> Result<Self> {
        if let Some((set, _)) = coords.entries().find(|(_, v)| v.is_zero()) {
            return Err(Error::ZeroCoordinate(format!("coordinate {set:?} is zero")));
        }
        Ok(PlueckerVector(coords))
    }

    pub fn coords(&self) -> &SubsetVector {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn r(&self) -> usize {
        self.0.r()
    }
}

/// The `2 × 2` minors of a `2 × n` matrix.
pub fn pluecker_2n(m: &RationalMatrix) -> Result<PlueckerVector> {
    if m.rows() != 2 || m.cols() < 2 {
        return Err(Error::Dimension(format!(
            "pluecker_2n takes a 2 x n matrix (n >= 2), got {} x {}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.cols();
    let mut values = Vec::new();
    for p in subsets(n, 2) {
        let (i, j) = (p[0] - 1, p[1] - 1);
        let minor = m.get(0, i) * m.get(1, j) - m.get(0, j) * m.get(1, i);
        if minor.is_zero() {
            return Err(Error::ZeroCoordinate(format!(
                "minor on columns {},{} vanishes",
                p[0], p[1]
            )));
        }
        values.push(minor);
    }
    PlueckerVector::new(SubsetVector::new(n, 2, values)?)
}

/// `x_I ↦ ∏_{i<j ∈ I} x_ij`.
pub fn phi_r(x: &PlueckerVector, r: usize) -> Result<PlueckerVector> {
    if x.r() != 2 {
        return Err(Error::Dimension(format!(
            "phi_r takes pair coordinates, got r={}",
            x.r()
        )));
    }
    let n = x.n();
    if r < 2 || r > n {
        return Err(Error::OutOfRange(format!(
            "phi_r needs 2 <= r <= n, got n={n}, r={r}"
        )));
    }
    let c = x.coords();
    let values = subsets(n, r)
        .into_iter()
        .map(|set| {
            subsets_of(&set, 2)
                .iter()
                .fold(Rational::one(), |acc, p| acc * c.at(p))
        })
        .collect();
    PlueckerVector::new(SubsetVector::new(n, r, values)?)
}

/// Validates `(I, J)` for a cube binomial on `r`-subsets of `[n]`.
fn check_cube_index(n: usize, r: usize, six: &RSubset, shift: &[usize]) -> Result<()> {
    if r < 3 || r + 3 > n {
        return Err(Error::OutOfRange(format!(
            "cube binomials need 3 <= r <= n-3, got n={n}, r={r}"
        )));
    }
    if six.len() != 6 || six.elements().last().is_some_and(|&x| x > n) {
        return Err(Error::InvalidSubset(format!(
            "{six} is not a 6-subset of [{n}]"
        )));
    }
    if shift.len() + 3 != r
        || shift.windows(2).any(|w| w[0] >= w[1])
        || shift.iter().any(|&x| x == 0 || x > n)
    {
        return Err(Error::InvalidSubset(format!(
            "shift {shift:?} is not a sorted {}-subset of [{n}]",
            r - 3
        )));
    }
    if let Some(x) = shift.iter().find(|&&x| six.contains(x)) {
        return Err(Error::InvalidSubset(format!(
            "shift meets the six-subset in {x}"
        )));
    }
    Ok(())
}

/// `ψ = ∏_{K∈B} x_{J⊔K} − ∏_{K∈W} x_{J⊔K}`, indices sorted, no sign.
pub fn eval_psi(x: &SubsetVector, cube: &Cube, six: &RSubset, shift: &[usize]) -> Result<Rational> {
    check_cube_index(x.n(), x.r(), six, shift)?;
    let c = relabel_cube(cube, six)?;
    let prod = |ts: &[[usize; 3]; 4]| {
        ts.iter().fold(Rational::one(), |acc, t| {
            acc * x.at(&merge_sorted(shift, t))
        })
    };
    Ok(prod(&c.black) - prod(&c.white))
}

/// Exponent vector of `ψ`'s first monomial minus that of its second, over
/// lex-ordered `r`-subsets.
pub fn psi_exponents(
    n: usize,
    r: usize,
    cube: &Cube,
    six: &RSubset,
    shift: &[usize],
) -> Result<Vec<i64>> {
    check_cube_index(n, r, six, shift)?;
    let c = relabel_cube(cube, six)?;
    let mut out = vec![0; crate::combinat::binomial(n, r)];
    for (ts, sign) in [(&c.black, 1), (&c.white, -1)] {
        for t in ts.iter() {
            out[crate::combinat::rank_sorted(&merge_sorted(shift, t), n)] += sign;
        }
    }
    Ok(out)
}

/// Sorts `tuple`, returning the sorted indices and the permutation sign.
fn sort_with_sign(tuple: &[usize]) -> (Vec<usize>, i32) {
    let mut inversions = 0;
    for a in 0..tuple.len() {
        for b in a + 1..tuple.len() {
            if tuple[a] > tuple[b] {
                inversions += 1;
            }
        }
    }
    let mut sorted = tuple.to_vec();
    sorted.sort_unstable();
    (sorted, if inversions % 2 == 0 { 1 } else { -1 })
}

/// Coordinate at an unsorted index tuple, with the sort's sign applied.
fn signed_coord(x: &SubsetVector, tuple: &[usize]) -> Rational {
    let (sorted, sign) = sort_with_sign(tuple);
    let v = x.at(&sorted).clone();
    if sign < 0 {
        -v
    } else {
        v
    }
}

fn check_quadruple(n: usize, r: usize, q: [usize; 4], a: &[usize]) -> Result<()> {
    if !(q[0] >= 1 && q[0] < q[1] && q[1] < q[2] && q[2] < q[3] && q[3] <= n) {
        return Err(Error::InvalidSubset(format!(
            "{q:?} must satisfy 1 <= i < j < k < l <= {n}"
        )));
    }
    if a.len() + 2 != r {
        return Err(Error::InvalidSubset(format!(
            "A must have {} elements, got {}",
            r.saturating_sub(2),
            a.len()
        )));
    }
    if a.windows(2).any(|w| w[0] >= w[1]) || a.iter().any(|&t| t == 0 || t > n) {
        return Err(Error::InvalidSubset(format!(
            "A = {a:?} is not a sorted subset of [{n}]"
        )));
    }
    if let Some(t) = a.iter().find(|t| q.contains(t)) {
        return Err(Error::InvalidSubset(format!(
            "A meets the quadruple in {t}"
        )));
    }
    Ok(())
}

/// `x_{ijA} x_{klA} − x_{ikA} x_{jlA} + x_{ilA} x_{jkA}`, each index tuple
/// sorted with its permutation sign.
pub fn eval_three_term(x: &SubsetVector, q: [usize; 4], a: &[usize]) -> Result<Rational> {
    check_quadruple(x.n(), x.r(), q, a)?;
    let [i, j, k, l] = q;
    let t = |p: usize, s: usize| {
        let mut tuple = vec![p, s];
        tuple.extend_from_slice(a);
        signed_coord(x, &tuple)
    };
    Ok(t(i, j) * t(k, l) - t(i, k) * t(j, l) + t(i, l) * t(j, k))
}

/// Checks the pullback of the three-term relation along `φ_r` against its
/// factorisation
/// `(x_ij x_kl − x_ik x_jl + x_il x_jk) · ∏_{B ⊆ A} x_B² · ∏_{t∈A} x_it x_jt x_kt x_lt`,
/// where `x_pt` for `t < p` means `−x_tp`.
pub fn pullback_identity_check(x2: &PlueckerVector, q: [usize; 4], a: &[usize]) -> Result<bool> {
    let r = a.len() + 2;
    check_quadruple(x2.n(), r, q, a)?;
    let x = x2.coords();
    let lhs = eval_three_term(phi_r(x2, r)?.coords(), q, a)?;
    let [i, j, k, l] = q;
    let pair = |p: usize, s: usize| signed_coord(x, &[p, s]);
    let mut rhs = pair(i, j) * pair(k, l) - pair(i, k) * pair(j, l) + pair(i, l) * pair(j, k);
    for b in subsets_of(a, 2) {
        let v = x.at(&b);
        rhs *= v * v;
    }
    for &t in a {
        for p in q {
            rhs *= pair(p, t);
        }
    }
    Ok(lhs == rhs)
}
