//! Dense matrices over the rationals, exact rank and left kernels, and the
//! three structured matrices of the weighted dissimilarity story:
//!
//! * `M`, the 0/1 incidence of pairs inside `r`-subsets ([`trop_phi_matrix`]),
//! * `M⁺`, its explicit left inverse ([`left_inverse_matrix`]),
//! * `N`, one ±1 row per cube hyperplane ([`cube_relation_matrix`]).
//!
//! Rows and columns indexed by subsets always follow lex order.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::combinat::{
    binomial, enumerate_cubes, merge_sorted, rank_sorted, relabel_cube, subsets, subsets_of,
    RSubset,
};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{}", self.rows, self.cols)?;
        f.write_str(&self.dump())
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let n_rows = rows.len();
        Ok(RationalMatrix {
            rows: n_rows,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Zero-row matrix with a fixed column count.
    pub fn empty(cols: usize) -> Self {
        RationalMatrix {
            rows: 0,
            cols,
            data: Vec::new(),
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rational::int(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: Vec<Rational>) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Dimension(format!(
                "row of length {} into {} columns",
                row.len(),
                self.cols
            )));
        }
        self.data.extend(row);
        self.rows += 1;
        Ok(())
    }

    /// Rows picked (and possibly repeated) by index.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        RationalMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "{} columns, vector of length {}",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    *self.get(i, j)
                        == if i == j {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Exact rank over `Q`.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.eliminate(false)
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut work = self.clone();
        let mut pivots = Vec::new();
        work.eliminate_tracking(true, &mut pivots);
        (work, pivots)
    }

    fn eliminate(&mut self, reduce_above: bool) -> usize {
        let mut pivots = Vec::new();
        self.eliminate_tracking(reduce_above, &mut pivots);
        pivots.len()
    }

    /// Gaussian elimination; in each column the pivot is the entry of
    /// smallest bit length among the remaining rows (ties: lowest row).
    fn eliminate_tracking(&mut self, reduce_above: bool, pivots: &mut Vec<usize>) {
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let pick = (row..self.rows)
                .filter(|&i| !self.get(i, col).is_zero())
                .min_by_key(|&i| bit_length(self.get(i, col)));
            let Some(p) = pick else { continue };
            self.swap_rows(row, p);
            let inv = self.get(row, col).recip();
            for j in col..self.cols {
                let v = self.get(row, j) * &inv;
                self.set(row, j, v);
            }
            let pivot_row: Vec<Rational> = self.row(row)[col..].to_vec();
            let targets: Box<dyn Iterator<Item = usize>> = if reduce_above {
                Box::new((0..self.rows).filter(|&i| i != row))
            } else {
                Box::new(row + 1..self.rows)
            };
            for i in targets {
                let factor = self.get(i, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for (off, pv) in pivot_row.iter().enumerate() {
                    if pv.is_zero() {
                        continue;
                    }
                    let j = col + off;
                    let v = self.get(i, j) - &factor * pv;
                    self.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Basis of `{v : v * self = 0}`, each vector scaled to coprime integers
    /// with a positive leading entry.
    pub fn left_kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let t = self.transpose();
        let (reduced, pivots) = t.rref();
        let n = t.cols;
        let mut basis = Vec::new();
        for free in (0..n).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Rational::zero(); n];
            v[free] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -reduced.get(r, free).clone();
            }
            basis.push(normalize_integer(&v));
        }
        basis
    }

    /// One row per line, entries separated by single spaces.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(rational::format).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_dump(text: &str) -> Result<RationalMatrix> {
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|tok| rational::parse(tok, false))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }
}

fn bit_length(q: &Rational) -> u64 {
    q.numer().bits() + q.denom().bits()
}

/// Scale to integers, divide out the gcd, make the first nonzero entry positive.
pub fn normalize_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    let sign = if ints
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative())
    {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    ints.into_iter().map(|x| x / &g * &sign).collect()
}

/// `M`: rows are `r`-subsets, columns are pairs, `M[I][J] = 1` iff `J ⊆ I`.
pub fn trop_phi_matrix(n: usize, r: usize) -> Result<RationalMatrix> {
    if r < 2 || r > n {
        return Err(Error::OutOfRange(format!(
            "trop_phi_matrix needs 2 <= r <= n, got n={n}, r={r}"
        )));
    }
    let mut m = RationalMatrix::zeros(binomial(n, r), binomial(n, 2));
    for (row, set) in subsets(n, r).iter().enumerate() {
        for pair in subsets_of(set, 2) {
            m.set(row, rank_sorted(&pair, n), Rational::one());
        }
    }
    Ok(m)
}

/// `M⁺`: rows are pairs `J`, columns are `r`-subsets `I`; the entry depends
/// only on `|I ∩ J|` (2, 1 or 0).
pub fn left_inverse_matrix(n: usize, r: usize) -> Result<RationalMatrix> {
    if r < 2 || r + 2 > n {
        return Err(Error::OutOfRange(format!(
            "left_inverse_matrix needs 2 <= r <= n-2, got n={n}, r={r}"
        )));
    }
    let r_q = rational::int(r as i64);
    let inv_binom = |k: usize| Rational::new(BigInt::one(), BigInt::from(binomial(n - 2, k)));
    let contained = inv_binom(r - 2);
    let touching = -(&r_q - rational::int(2)) / (&r_q - rational::int(1)) * inv_binom(r - 1);
    let disjoint = (&r_q - rational::int(2)) / &r_q * inv_binom(r);
    let mut m = RationalMatrix::zeros(binomial(n, 2), binomial(n, r));
    let sets = subsets(n, r);
    for (row, pair) in subsets(n, 2).iter().enumerate() {
        for (col, set) in sets.iter().enumerate() {
            let meet = pair.iter().filter(|x| set.binary_search(x).is_ok()).count();
            let v = match meet {
                2 => contained.clone(),
                1 => touching.clone(),
                _ => disjoint.clone(),
            };
            m.set(row, col, v);
        }
    }
    Ok(m)
}

/// Row label of the cube relation matrix: 6-subset `I`, `(r-3)`-subset `J`
/// of the complement, and a cube id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeRow {
    pub six: Vec<usize>,
    pub shift: Vec<usize>,
    pub cube: usize,
}

/// Every `(I, J, cube)` triple, in row order of [`cube_relation_matrix`]:
/// `I` lex, then `J` lex, then cube id.
pub fn cube_rows(n: usize, r: usize) -> Vec<CubeRow> {
    if r < 3 || r + 3 > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    for six in subsets(n, 6) {
        let rest: Vec<usize> = (1..=n).filter(|x| six.binary_search(x).is_err()).collect();
        for shift in subsets_of(&rest, r - 3) {
            for cube in 0..enumerate_cubes().len() {
                out.push(CubeRow {
                    six: six.clone(),
                    shift: shift.clone(),
                    cube,
                });
            }
        }
    }
    out
}

/// `N`: one row per cube hyperplane, `+1` at the black columns `J ⊔ K` and
/// `-1` at the white ones. Zero rows outside `3 <= r <= n-3`.
pub fn cube_relation_matrix(n: usize, r: usize) -> Result<RationalMatrix> {
    if r > n {
        return Err(Error::OutOfRange(format!(
            "cube_relation_matrix needs r <= n, got n={n}, r={r}"
        )));
    }
    let cols = binomial(n, r);
    let rows = cube_rows(n, r);
    let mut m = RationalMatrix::zeros(rows.len(), cols);
    let cubes = enumerate_cubes();
    for (i, label) in rows.iter().enumerate() {
        let six = RSubset::from_sorted_unchecked(label.six.clone());
        let cube = relabel_cube(&cubes[label.cube], &six)?;
        for (triples, sign) in [(&cube.black, 1), (&cube.white, -1)] {
            for t in triples.iter() {
                let col = rank_sorted(&merge_sorted(&label.shift, t), n);
                m.set(i, col, rational::int(sign));
            }
        }
    }
    Ok(m)
}
