//! Bit-packed GF(2) matrices, Gauss-Jordan elimination with a cooperative
//! deadline, and Macaulay matrices of bounded degree.

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;

use crate::boolring::{BoolPoly, Monomial, VarId};
use crate::error::{Error, Result};

/// Dense row-major bit matrix. Column `c` lives in word `c / 64`, bit `c % 64`.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "all rows must have identical width");
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b & 1 == 1);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        let w = &mut self.data[r * self.stride + c / 64];
        let mask = 1u64 << (c % 64);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / 64] ^= 1u64 << (c % 64);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row_is_zero(&self, r: usize) -> bool {
        self.row_words(r).iter().all(|&w| w == 0)
    }

    /// Column indices of the set bits of row `r`, ascending.
    pub fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(r).iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * s);
        head[lo * s..(lo + 1) * s].swap_with_slice(&mut tail[..s]);
    }

    fn truncate_rows(&mut self, n: usize) {
        self.rows = n;
        self.data.truncate(n * self.stride);
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in self.row_ones(i).collect::<Vec<_>>() {
                let src = other.row_words(k).to_vec();
                let dst = &mut out.data[i * out.stride..(i + 1) * out.stride];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d ^= s;
                }
            }
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn augment(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for c in self.row_ones(i) {
                out.set(i, c, true);
            }
            for c in other.row_ones(i) {
                out.set(i, self.cols + c, true);
            }
        }
        out
    }

    /// Columns `from..to` as a new matrix.
    pub fn column_slice(&self, from: usize, to: usize) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, to - from);
        for i in 0..self.rows {
            for c in self.row_ones(i).filter(|&c| c >= from && c < to) {
                out.set(i, c - from, true);
            }
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The elimination ran past its deadline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimedOut;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Nonzero rows of the reduced row echelon form.
    pub matrix: BitMatrix,
    /// Pivot column of each row, strictly increasing.
    pub pivots: Vec<usize>,
}

// Below this many words per elimination pass the rayon overhead dominates.
const PAR_THRESHOLD_WORDS: usize = 1 << 15;

/// Reduced row echelon form over GF(2). Zero rows are dropped.
///
/// The deadline is polled before every column, so an expired budget is
/// noticed within one elimination pass.
pub fn rref(mut m: BitMatrix, deadline: Option<Instant>) -> std::result::Result<Rref, TimedOut> {
    let stride = m.stride;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(TimedOut);
        }
        let w = c / 64;
        let bit = 1u64 << (c % 64);
        let Some(p) = (r..m.rows).find(|&i| m.data[i * stride + w] & bit != 0) else {
            continue;
        };
        m.swap_rows(r, p);
        let pivot: Vec<u64> = m.data[r * stride + w..(r + 1) * stride].to_vec();
        let reduce = |(i, row): (usize, &mut [u64])| {
            if i != r && row[w] & bit != 0 {
                for (d, s) in row[w..].iter_mut().zip(&pivot) {
                    *d ^= s;
                }
            }
        };
        if m.rows * (stride - w) >= PAR_THRESHOLD_WORDS {
            m.data.par_chunks_mut(stride).enumerate().for_each(reduce);
        } else {
            m.data.chunks_mut(stride).enumerate().for_each(reduce);
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate_rows(r);
    Ok(Rref { matrix: m, pivots })
}

/// Column labels of a Macaulay matrix: monomials in descending order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MacaulayIndex {
    columns: Vec<Monomial>,
    lookup: HashMap<Monomial, usize>,
}

impl MacaulayIndex {
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(monomials: I) -> Self {
        let mut columns: Vec<Monomial> = monomials.into_iter().collect();
        columns.sort_unstable_by(|a, b| b.cmp(a));
        columns.dedup();
        let lookup = columns
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        MacaulayIndex { columns, lookup }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, m: &Monomial) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    pub fn monomial(&self, c: usize) -> &Monomial {
        &self.columns[c]
    }

    pub fn columns(&self) -> &[Monomial] {
        &self.columns
    }
}

/// All squarefree monomials of degree at most `max_deg` over `universe`.
pub fn multipliers(universe: &[VarId], max_deg: usize) -> Vec<Monomial> {
    fn rec(universe: &[VarId], start: usize, left: usize, cur: &mut Vec<VarId>, out: &mut Vec<Monomial>) {
        out.push(Monomial::from_vars(cur.iter().copied()));
        if left == 0 {
            return;
        }
        for i in start..universe.len() {
            cur.push(universe[i]);
            rec(universe, i + 1, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(universe, 0, max_deg, &mut Vec::new(), &mut out);
    out
}

/// Row polynomials `m * p` for every `p` and every multiplier `m` over
/// `universe` with `deg(m) + deg(p) <= d`. Rows that vanish are dropped.
pub fn macaulay_rows(polys: &[BoolPoly], d: usize, universe: &[VarId]) -> Result<Vec<BoolPoly>> {
    let mut rows = Vec::new();
    let mut cache: HashMap<usize, Vec<Monomial>> = HashMap::new();
    for p in polys {
        if p.is_zero() {
            continue;
        }
        let deg = p.degree() as usize;
        if deg > d {
            return Err(Error::DegreeExceeded { degree: deg, bound: d });
        }
        let mults = cache
            .entry(d - deg)
            .or_insert_with(|| multipliers(universe, d - deg));
        for m in mults.iter() {
            let row = if m.is_one() { p.clone() } else { p.mul_monomial(m) };
            if !row.is_zero() {
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// Encodes polynomials as rows over the columns of the monomials they use.
pub fn polys_to_matrix(rows: &[BoolPoly]) -> (BitMatrix, MacaulayIndex) {
    let idx = MacaulayIndex::from_monomials(rows.iter().flat_map(|p| p.terms().iter().cloned()));
    let mut m = BitMatrix::zeros(rows.len(), idx.len());
    for (i, p) in rows.iter().enumerate() {
        for t in p.terms() {
            m.set(i, idx.column(t).expect("column exists"), true);
        }
    }
    (m, idx)
}

/// The degree-`d` Macaulay matrix of `polys`, with multipliers drawn from
/// `universe`.
pub fn macaulay_build(
    polys: &[BoolPoly],
    d: usize,
    universe: &[VarId],
) -> Result<(BitMatrix, MacaulayIndex)> {
    let rows = macaulay_rows(polys, d, universe)?;
    Ok(polys_to_matrix(&rows))
}

/// Decodes each nonzero row back into a polynomial.
pub fn extract_polys(m: &BitMatrix, idx: &MacaulayIndex) -> Vec<BoolPoly> {
    assert_eq!(m.cols(), idx.len());
    (0..m.rows())
        .filter(|&r| !m.row_is_zero(r))
        .map(|r| {
            // ascending columns are descending monomials
            BoolPoly::from_sorted_unchecked(m.row_ones(r).map(|c| idx.monomial(c).clone()).collect())
        })
        .collect()
}
