//! Pattern matrices over the symbols `0`, `*` and `?`.
//!
//! A pattern matrix describes a class of real matrices: `0` entries are
//! exactly zero, `*` entries are nonzero and `?` entries are arbitrary. The
//! symbol set forms a commutative semiring under [`sym_add`] and [`sym_mul`],
//! which lifts to entrywise addition and matrix-style multiplication of
//! patterns.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One entry of a pattern matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// Fixed zero.
    Zero,
    /// Nonzero, otherwise free.
    Star,
    /// Arbitrary real value, zero included.
    Any,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Zero, Symbol::Star, Symbol::Any];

    pub fn token(self) -> &'static str {
        match self {
            Symbol::Zero => "0",
            Symbol::Star => "*",
            Symbol::Any => "?",
        }
    }

    pub fn is_zero(self) -> bool {
        self == Symbol::Zero
    }

    /// Whether the real value `x` is allowed at an entry carrying this symbol.
    pub fn admits(self, x: f64) -> bool {
        match self {
            Symbol::Zero => x == 0.0,
            Symbol::Star => x != 0.0 && x.is_finite(),
            Symbol::Any => x.is_finite(),
        }
    }
}

/// Symbol addition: `0` is the identity, `* + *` may cancel to anything.
pub fn sym_add(a: Symbol, b: Symbol) -> Symbol {
    use Symbol::*;
    match (a, b) {
        (Zero, s) | (s, Zero) => s,
        _ => Any,
    }
}

/// Symbol multiplication: `0` annihilates, `*` is the identity.
pub fn sym_mul(a: Symbol, b: Symbol) -> Symbol {
    use Symbol::*;
    match (a, b) {
        (Zero, _) | (_, Zero) => Zero,
        (Star, Star) => Star,
        _ => Any,
    }
}

impl Add for Symbol {
    type Output = Symbol;
    fn add(self, rhs: Symbol) -> Symbol {
        sym_add(self, rhs)
    }
}

impl Mul for Symbol {
    type Output = Symbol;
    fn mul(self, rhs: Symbol) -> Symbol {
        sym_mul(self, rhs)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Symbol {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "0" => Ok(Symbol::Zero),
            "*" => Ok(Symbol::Star),
            "?" => Ok(Symbol::Any),
            other => Err(other.to_string()),
        }
    }
}

/// Dense row-major grid of [`Symbol`]s.
///
/// Zero-sized dimensions are allowed so that networks without external
/// inputs (or nodes without inputs/outputs) have a well-defined `H`, `B`
/// or `C`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Symbol>,
}

impl PatternMatrix {
    pub fn filled(rows: usize, cols: usize, s: Symbol) -> Self {
        Self {
            rows,
            cols,
            entries: vec![s; rows * cols],
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, Symbol::Zero)
    }

    /// The `n x n` pattern with `*` on the diagonal and `0` elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Symbol::Star);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Symbol>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Ragged {
                    row: i + 1,
                    found: row.len(),
                    expected: cols,
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    /// Builds a pattern from rows of textual tokens, reporting the 1-based
    /// position of the first bad token.
    pub fn from_tokens<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, tok)| {
                        tok.as_ref()
                            .parse::<Symbol>()
                            .map_err(|token| Error::BadToken {
                                row: i + 1,
                                col: j + 1,
                                token,
                            })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(parsed)
    }

    /// Parses the JSON array-of-arrays text form, e.g. `[["*","0"],["?","*"]]`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let grid: Vec<Vec<String>> = serde_json::from_str(s)?;
        Self::from_tokens(&grid)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("token grids always serialize")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> Symbol {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Symbol) {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        self.entries[i * self.cols + j] = s;
    }

    pub fn row(&self, i: usize) -> &[Symbol] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.rows).map(move |i| self.get(i, j))
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), Symbol)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .map(|(k, &s)| ((k / self.cols, k % self.cols), s))
    }

    pub fn to_rows(&self) -> Vec<Vec<Symbol>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_all_zero(&self) -> bool {
        self.entries.iter().all(|s| s.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for ((i, j), s) in self.iter() {
            t.set(j, i, s);
        }
        t
    }

    /// Copies the `rows x cols` window starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j));
            }
        }
        out
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op: "add",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    /// Pattern product; each entry folds `sym_mul` terms left to right with
    /// `sym_add`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s = (0..self.cols)
                    .map(|l| self.get(i, l) * other.get(l, j))
                    .fold(Symbol::Zero, |acc, t| acc + t);
                out.set(i, j, s);
            }
        }
        Ok(out)
    }

    /// Every row has exactly one `*` and zeros elsewhere.
    pub fn rows_are_unit_star(&self) -> bool {
        (0..self.rows).all(|i| is_unit_star(self.row(i).iter().copied()))
    }

    /// Every column has exactly one `*` and zeros elsewhere.
    pub fn columns_are_unit_star(&self) -> bool {
        (0..self.cols).all(|j| is_unit_star(self.column(j)))
    }

    /// `[self other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                op: "hstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        Ok(out)
    }

    /// Block-diagonal pattern `diag(blocks...)`.
    pub fn block_diag(blocks: &[PatternMatrix]) -> Self {
        let rows = blocks.iter().map(Self::rows).sum();
        let cols = blocks.iter().map(Self::cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.paste(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Assembles a rectangular grid of blocks. Blocks in the same block-row
    /// must agree on their row count and blocks in the same block-column on
    /// their column count.
    pub fn assemble_blocks(grid: &[Vec<PatternMatrix>]) -> Result<Self> {
        let Some(first) = grid.first() else {
            return Ok(Self::zeros(0, 0));
        };
        let row_heights: Vec<usize> = grid
            .iter()
            .map(|br| br.first().map_or(0, Self::rows))
            .collect();
        let col_widths: Vec<usize> = first.iter().map(Self::cols).collect();
        for (bi, block_row) in grid.iter().enumerate() {
            if block_row.len() != col_widths.len() {
                return Err(Error::BlockMismatch {
                    block: (bi, block_row.len()),
                    found: (block_row.len(), 0),
                    expected: (col_widths.len(), 0),
                });
            }
            for (bj, block) in block_row.iter().enumerate() {
                let expected = (row_heights[bi], col_widths[bj]);
                if block.shape() != expected {
                    return Err(Error::BlockMismatch {
                        block: (bi, bj),
                        found: block.shape(),
                        expected,
                    });
                }
            }
        }
        let mut out = Self::zeros(row_heights.iter().sum(), col_widths.iter().sum());
        let mut r0 = 0;
        for (bi, block_row) in grid.iter().enumerate() {
            let mut c0 = 0;
            for (bj, block) in block_row.iter().enumerate() {
                out.paste(r0, c0, block);
                c0 += col_widths[bj];
            }
            r0 += row_heights[bi];
        }
        Ok(out)
    }

    fn paste(&mut self, r0: usize, c0: usize, block: &PatternMatrix) {
        for ((i, j), s) in block.iter() {
            self.set(r0 + i, c0 + j, s);
        }
    }
}

pub(crate) fn is_unit_star(line: impl Iterator<Item = Symbol>) -> bool {
    let mut stars = 0;
    for s in line {
        match s {
            Symbol::Zero => {}
            Symbol::Star => stars += 1,
            Symbol::Any => return false,
        }
    }
    stars == 1
}

impl fmt::Display for PatternMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<&str> = self.row(i).iter().map(|s| s.token()).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for PatternMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let grid: Vec<Vec<&str>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|s| s.token()).collect())
            .collect();
        grid.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PatternMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let grid = Vec::<Vec<String>>::deserialize(deserializer)?;
        PatternMatrix::from_tokens(&grid).map_err(serde::de::Error::custom)
    }
}

/// Which sufficient condition for `P(M)P(N) = P(MN)` a pair satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProductExactness {
    /// Every row of `N` is a single `*`.
    RowCondition,
    /// Every column of `M` is a single `*`.
    ColumnCondition,
    Both,
    Neither,
}

impl ProductExactness {
    pub fn is_exact(self) -> bool {
        self != ProductExactness::Neither
    }
}

pub fn product_exactness(m: &PatternMatrix, n: &PatternMatrix) -> Result<ProductExactness> {
    if m.cols() != n.rows() {
        return Err(Error::DimensionMismatch {
            op: "product_exactness",
            left: m.shape(),
            right: n.shape(),
        });
    }
    Ok(match (n.rows_are_unit_star(), m.columns_are_unit_star()) {
        (true, true) => ProductExactness::Both,
        (true, false) => ProductExactness::RowCondition,
        (false, true) => ProductExactness::ColumnCondition,
        (false, false) => ProductExactness::Neither,
    })
}

/// A numeric matrix drawn from (or checked against) a pattern class.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub values: DMatrix<f64>,
}

impl Realization {
    pub fn new(values: DMatrix<f64>) -> Self {
        Self { values }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }
}

/// Membership of `x` in the pattern class of `m`.
pub fn is_member(x: &Realization, m: &PatternMatrix) -> Result<bool> {
    if x.shape() != m.shape() {
        return Err(Error::DimensionMismatch {
            op: "is_member",
            left: x.shape(),
            right: m.shape(),
        });
    }
    Ok(m.iter().all(|((i, j), s)| s.admits(x.values[(i, j)])))
}

/// Magnitude band for `*` entries.
pub const STAR_MAGNITUDE: (f64, f64) = (0.5, 2.0);
/// Half-width of the uniform range for `?` entries.
pub const ANY_RANGE: f64 = 2.0;
/// Probability that a `?` entry is drawn as an exact zero.
pub const ANY_ZERO_PROBABILITY: f64 = 0.25;

/// Draws one member of the pattern class of `m` from `rng`.
pub fn sample_with<R: Rng + ?Sized>(m: &PatternMatrix, rng: &mut R) -> Realization {
    let mut values = DMatrix::zeros(m.rows(), m.cols());
    for ((i, j), s) in m.iter() {
        values[(i, j)] = match s {
            Symbol::Zero => 0.0,
            Symbol::Star => {
                let mag = rng.gen_range(STAR_MAGNITUDE.0..=STAR_MAGNITUDE.1);
                if rng.gen::<bool>() {
                    mag
                } else {
                    -mag
                }
            }
            Symbol::Any => {
                if rng.gen_bool(ANY_ZERO_PROBABILITY) {
                    0.0
                } else {
                    rng.gen_range(-ANY_RANGE..=ANY_RANGE)
                }
            }
        };
    }
    Realization::new(values)
}

/// Deterministic sample for a fixed seed.
pub fn sample_realization(m: &PatternMatrix, seed: u64) -> Realization {
    sample_with(m, &mut ChaCha8Rng::seed_from_u64(seed))
}
