//! Exact sparse linear algebra over arbitrary-precision rationals.
//!
//! Matrices are immutable after construction and all operations are pure,
//! so values can be shared freely across threads. Rank and kernel are
//! computed by exact Gaussian elimination; pivots are chosen Markowitz-style
//! (sparsest column, then sparsest row) to limit fill-in, which is the
//! dominant cost at the sizes this crate works at.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact rational scalar. `num-rational` keeps values in lowest terms with a
/// positive denominator after every operation, which is exactly the
/// normalization this crate relies on.
pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `p` or `p/q`, matching the file formats used by the
/// CLI.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational, ExactlaError> {
    let bad = || ExactlaError::BadRational(s.to_string());
    match s.split_once('/') {
        None => {
            let n: BigInt = s.trim().parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactlaError {
    #[error("entry index ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not idempotent: p*p differs from p at ({row}, {col})")]
    NotIdempotent { row: usize, col: usize },
    #[error("projector must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
}

/// Sparse matrix over the rationals. No zero entries are stored; indices are
/// validated at construction and the value is immutable afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl SparseMatrix {
    /// The zero matrix.
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n).map(|i| ((i, i), Rational::one())).collect();
        SparseMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicate positions
    /// are summed; exact zeros are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self, ExactlaError> {
        let mut entries: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(ExactlaError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            if v.is_zero() {
                continue;
            }
            let slot = entries.entry((r, c)).or_insert_with(Rational::zero);
            *slot += v;
            if slot.is_zero() {
                entries.remove(&(r, c));
            }
        }
        Ok(SparseMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Convenience constructor from dense `i64` rows, mostly for tests.
    pub fn from_dense_i64(data: &[&[i64]]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        let triplets = data.iter().enumerate().flat_map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(move |(c, &v)| (r, c, rat_int(v)))
        });
        SparseMatrix::from_triplets(rows, cols, triplets).expect("indices in range")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    /// Exact matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix, ExactlaError> {
        if self.cols != rhs.rows {
            return Err(ExactlaError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        // rows of rhs, for cache-friendly accumulation
        let mut rhs_rows: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); rhs.rows];
        for (&(r, c), v) in &rhs.entries {
            rhs_rows[r].push((c, v));
        }
        let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (&(r, k), a) in &self.entries {
            for &(c, b) in &rhs_rows[k] {
                let slot = acc.entry((r, c)).or_insert_with(Rational::zero);
                *slot += a * b;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(SparseMatrix {
            rows: self.rows,
            cols: rhs.cols,
            entries: acc,
        })
    }

    /// Exact matrix-vector product.
    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, ExactlaError> {
        if v.len() != self.cols {
            return Err(ExactlaError::DimensionMismatch(format!(
                "{}x{} * vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Rational::zero(); self.rows];
        for (&(r, c), a) in &self.entries {
            if !v[c].is_zero() {
                out[r] += a * &v[c];
            }
        }
        Ok(out)
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        Eliminator::new(self).rank()
    }

    /// A basis of the null space. Exactly `cols - rank` vectors are returned
    /// and `self * v = 0` holds exactly for each of them. The basis is the
    /// canonical one read off the reduced row echelon form: one vector per
    /// free column, with a `1` in that position.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        Eliminator::new(self).kernel_basis()
    }

    /// Rank of an idempotent matrix, i.e. the dimension of its image. For a
    /// group-averaging operator in characteristic zero this is the dimension
    /// of the (co)invariants.
    pub fn projector_rank(&self) -> Result<usize, ExactlaError> {
        if self.rows != self.cols {
            return Err(ExactlaError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let square = self.matmul(self)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                if square.get(r, c) != self.get(r, c) {
                    return Err(ExactlaError::NotIdempotent { row: r, col: c });
                }
            }
        }
        Ok(self.rank())
    }
}

impl fmt::Display for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} sparse, {} nonzero", self.rows, self.cols, self.nnz())?;
        for (&(r, c), v) in &self.entries {
            writeln!(f, "  ({}, {}) = {}", r, c, format_rational(v))?;
        }
        Ok(())
    }
}

/// Working state for exact Gaussian elimination. Rows are sparse maps;
/// column occupancy is tracked so pivot selection can favour sparse columns.
struct Eliminator {
    cols: usize,
    rows: Vec<BTreeMap<usize, Rational>>,
    col_rows: Vec<Vec<usize>>, // may contain stale row ids; filtered on use
}

impl Eliminator {
    fn new(m: &SparseMatrix) -> Self {
        let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); m.rows];
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); m.cols];
        for (&(r, c), v) in &m.entries {
            rows[r].insert(c, v.clone());
            col_rows[c].push(r);
        }
        Eliminator {
            cols: m.cols,
            rows,
            col_rows,
        }
    }

    fn live_rows(&mut self, col: usize) -> Vec<usize> {
        let rows = &self.rows;
        self.col_rows[col].retain(|&r| rows[r].contains_key(&col));
        self.col_rows[col].clone()
    }

    /// row_dst -= factor * row_src
    fn row_axpy(&mut self, dst: usize, src: usize, factor: &Rational) {
        let src_row = self.rows[src].clone();
        for (c, v) in src_row {
            let delta = factor * &v;
            let entry = self.rows[dst].entry(c).or_insert_with(Rational::zero);
            let was_present = !entry.is_zero();
            *entry -= delta;
            if entry.is_zero() {
                self.rows[dst].remove(&c);
            } else if !was_present {
                self.col_rows[c].push(dst);
            }
        }
    }

    /// Markowitz-style rank: repeatedly pivot on the sparsest active column,
    /// choosing the shortest row within it.
    fn rank(&mut self) -> usize {
        let mut col_active = vec![true; self.cols];
        let mut rank = 0;
        loop {
            let mut best: Option<(usize, usize, usize)> = None; // (col_count, col, row)
            for c in 0..self.cols {
                if !col_active[c] {
                    continue;
                }
                let live = self.live_rows(c);
                if live.is_empty() {
                    col_active[c] = false;
                    continue;
                }
                let count = live.len();
                let row = live
                    .iter()
                    .copied()
                    .min_by_key(|&r| (self.rows[r].len(), r))
                    .expect("nonempty");
                if best.map_or(true, |(bc, _, _)| count < bc) {
                    best = Some((count, c, row));
                    if count == 1 {
                        break; // cannot do better
                    }
                }
            }
            let Some((_, pc, pr)) = best else {
                return rank;
            };
            let pivot = self.rows[pr][&pc].clone();
            for r in self.live_rows(pc) {
                if r == pr {
                    continue;
                }
                let factor = &self.rows[r][&pc] / &pivot;
                self.row_axpy(r, pr, &factor);
            }
            self.rows[pr].clear();
            col_active[pc] = false;
            rank += 1;
        }
    }

    /// Reduced row echelon form with pivot columns in increasing order, then
    /// the canonical kernel basis: for each free column f, the vector with
    /// v[f] = 1 and v[pivot col of row r] = -rref[r][f].
    fn kernel_basis(&mut self) -> Vec<Vec<Rational>> {
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut used_row = vec![false; self.rows.len()];
        for c in 0..self.cols {
            let candidates: Vec<usize> = self
                .live_rows(c)
                .into_iter()
                .filter(|&r| !used_row[r])
                .collect();
            let Some(&pr) = candidates
                .iter()
                .min_by_key(|&&r| (self.rows[r].len(), r))
            else {
                continue;
            };
            let pivot = self.rows[pr][&c].clone();
            // normalize the pivot row
            if !pivot.is_one() {
                let row = std::mem::take(&mut self.rows[pr]);
                self.rows[pr] = row.into_iter().map(|(k, v)| (k, v / &pivot)).collect();
            }
            for r in self.live_rows(c) {
                if r == pr {
                    continue;
                }
                let factor = self.rows[r][&c].clone();
                self.row_axpy(r, pr, &factor);
            }
            used_row[pr] = true;
            pivots.push((pr, c));
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivot_cols.contains(&f) {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for &(r, c) in &pivots {
                if let Some(x) = self.rows[r].get(&f) {
                    v[c] = -x.clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Sparse linear combination of basis indices, used throughout the crate for
/// bracket tables, products, and differentials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinComb(BTreeMap<usize, Rational>);

impl LinComb {
    pub fn zero() -> Self {
        LinComb(BTreeMap::new())
    }

    pub fn term(index: usize, coeff: Rational) -> Self {
        let mut lc = LinComb::zero();
        lc.add(index, coeff);
        lc
    }

    pub fn add(&mut self, index: usize, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.0.entry(index).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.0.remove(&index);
        }
    }

    pub fn add_scaled(&mut self, other: &LinComb, scale: &Rational) {
        if scale.is_zero() {
            return;
        }
        for (&i, c) in &other.0 {
            self.add(i, c * scale);
        }
    }

    pub fn scaled(&self, scale: &Rational) -> LinComb {
        let mut out = LinComb::zero();
        out.add_scaled(self, scale);
        out
    }

    pub fn negated(&self) -> LinComb {
        self.scaled(&-Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.0.iter().map(|(&i, c)| (i, c))
    }

    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> LinComb {
        let mut out = LinComb::zero();
        for (i, c) in self.iter() {
            out.add(f(i), c.clone());
        }
        out
    }

    /// Renders `c1 label1 + c2 label2 ...` with rationals as `p/q`, the form
    /// used in the Lie-algebra and manifold text formats.
    pub fn to_text(&self, labels: &[String]) -> String {
        if self.is_zero() {
            return String::new();
        }
        self.0
            .iter()
            .map(|(&i, c)| format!("{} {}", format_rational(c), labels[i]))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl FromIterator<(usize, Rational)> for LinComb {
    fn from_iter<T: IntoIterator<Item = (usize, Rational)>>(iter: T) -> Self {
        let mut lc = LinComb::zero();
        for (i, c) in iter {
            lc.add(i, c);
        }
        lc
    }
}

/// Koszul sign of swapping adjacent symbols of the given degrees.
pub fn koszul_swap_sign(deg_a: i32, deg_b: i32) -> Rational {
    if deg_a.rem_euclid(2) == 1 && deg_b.rem_euclid(2) == 1 {
        -Rational::one()
    } else {
        Rational::one()
    }
}

pub fn is_odd(degree: i32) -> bool {
    degree.rem_euclid(2) == 1
}

/// Sign (-1)^k as a rational.
pub fn sign_pow(k: i32) -> Rational {
    if k.rem_euclid(2) == 1 {
        -Rational::one()
    } else {
        Rational::one()
    }
}
