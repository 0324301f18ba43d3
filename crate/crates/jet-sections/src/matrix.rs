//! Wronskian-like matrices built from staircase tuples, and their
//! exact determinants.
//!
//! Every matrix entry here is either empty or a nonzero rational
//! multiple of a single jet variable: the column of type `α` in the
//! variable `χ` has `binom(α, l-1)·χ^{(α-l+1)}` on row `l` and is
//! empty below row `α + 1`. Three constructions are provided:
//!
//! * `delta0`: the affine chart-0 matrix, one block of columns per
//!   coordinate in descending coordinate order, size `s_1`;
//! * `homogeneous`: the same columns homogenized, padded with trailing
//!   columns in `X_0` up to size `M + 1`;
//! * `delta_j`: the chart-`j` dehomogenization, obtained from the
//!   homogeneous matrix by deleting every row and column containing
//!   `X_j` itself (derivative order 0) and renaming the remaining
//!   variables to chart-`j` coordinates.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::combinatorics::StaircaseTuple;
use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::polynomial::Polynomial;
use crate::scalar::{binom, Scalar};
use crate::space::{JetVar, VarSpace};

/// An optional entry `coeff · var`; stored coefficients are nonzero.
pub type Entry = Option<(Scalar, JetVar)>;

/// How a [`JetMatrix`] was built.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Construction {
    Delta0,
    Homogeneous,
    DeltaJ(usize),
}

/// A square matrix whose entries are single-variable terms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JetMatrix {
    space: VarSpace,
    entries: Vec<Vec<Entry>>,
    provenance: Option<(StaircaseTuple, Construction)>,
}

/// The column of type `alpha` in coordinate `coord`: row `l` (1-based)
/// holds `binom(alpha, l-1) · coord^{(alpha-l+1)}`, empty once
/// `l > alpha + 1`.
pub fn column(alpha: usize, coord: usize, length: usize) -> Vec<Entry> {
    (1..=length)
        .map(|l| {
            if l <= alpha + 1 {
                Some((
                    binom(alpha as i64, l as i64 - 1),
                    JetVar::new(coord, alpha + 1 - l),
                ))
            } else {
                None
            }
        })
        .collect()
}

impl JetMatrix {
    pub fn from_columns(
        space: VarSpace,
        columns: Vec<Vec<Entry>>,
        provenance: Option<(StaircaseTuple, Construction)>,
    ) -> Result<Self> {
        let size = columns.len();
        for col in &columns {
            if col.len() != size {
                return Err(Error::InvalidInput(format!(
                    "column of length {} in a {size}x{size} matrix",
                    col.len()
                )));
            }
            for entry in col.iter().flatten() {
                space.check_var(entry.1)?;
                if entry.0.is_zero() {
                    return Err(Error::InvalidInput("stored zero coefficient".into()));
                }
            }
        }
        // Row-major storage.
        let entries: Vec<Vec<Entry>> = (0..size)
            .map(|r| columns.iter().map(|c| c[r].clone()).collect())
            .collect();
        Ok(JetMatrix {
            space,
            entries,
            provenance,
        })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn provenance(&self) -> Option<&(StaircaseTuple, Construction)> {
        self.provenance.as_ref()
    }

    /// Entry at `(row, col)`, 0-based.
    pub fn entry(&self, row: usize, col: usize) -> &Entry {
        &self.entries[row][col]
    }

    fn check_diagonal(&self) -> Result<()> {
        for i in 0..self.size() {
            if self.entries[i][i].is_none() {
                return Err(Error::ZeroDiagonal { row: i });
            }
        }
        Ok(())
    }

    pub fn to_poly_matrix(&self) -> PolyMatrix {
        let entries = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| match e {
                        Some((c, v)) => {
                            Polynomial::monomial(self.space, Monomial::var(*v), c.clone())
                                .expect("entry variable was validated")
                        }
                        None => Polynomial::zero(self.space),
                    })
                    .collect()
            })
            .collect();
        PolyMatrix {
            space: self.space,
            entries,
        }
    }

    pub fn determinant(&self) -> Polynomial {
        self.to_poly_matrix().determinant()
    }

    /// The diagonal product, certified to be the smallest monomial of
    /// the determinant.
    ///
    /// This checks the two hypotheses of the minimal-monomial theorem
    /// rather than assuming them: every diagonal entry is present, and
    /// each present entry is strictly smaller (as a variable) than
    /// every other present entry weakly above and weakly to the right
    /// of it.
    pub fn diagonal_minimum(&self) -> Result<(Monomial, Scalar)> {
        self.check_diagonal()?;
        let n = self.size();
        for i in 0..n {
            for j in 0..n {
                let Some((_, vij)) = &self.entries[i][j] else {
                    continue;
                };
                for l in 0..=i {
                    for m in j..n {
                        if (l, m) == (i, j) {
                            continue;
                        }
                        if let Some((_, vlm)) = &self.entries[l][m] {
                            if vij >= vlm {
                                return Err(Error::DominanceViolation {
                                    row: i,
                                    col: j,
                                    drow: l,
                                    dcol: m,
                                });
                            }
                        }
                    }
                }
            }
        }
        let mut mono = Monomial::one();
        let mut coeff = Scalar::one();
        for i in 0..n {
            let (c, v) = self.entries[i][i].as_ref().expect("diagonal checked");
            mono = mono.mul_var(*v);
            coeff *= c.clone();
        }
        Ok((mono, coeff))
    }

    /// Plain-text rendering with aligned columns.
    pub fn render_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| match e {
                        None => "0".to_string(),
                        Some((c, v)) => {
                            let var = self.space.render_var(*v);
                            if c.is_one() {
                                var
                            } else if (-c).is_one() {
                                format!("-{var}")
                            } else {
                                format!("{c}*{var}")
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        let n = self.size();
        let widths: Vec<usize> = (0..n)
            .map(|j| cells.iter().map(|row| row[j].len()).max().unwrap_or(1))
            .collect();
        let mut out = String::new();
        for row in &cells {
            out.push('[');
            for (j, cell) in row.iter().enumerate() {
                if j > 0 {
                    out.push_str("  ");
                }
                let _ = write!(out, "{:>width$}", cell, width = widths[j]);
            }
            out.push_str("]\n");
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    coeff: Scalar,
    coord: usize,
    order: usize,
}

impl Serialize for JetMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let grid: Vec<Vec<Option<EntryRepr>>> = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        e.as_ref().map(|(c, v)| EntryRepr {
                            coeff: c.clone(),
                            coord: v.coord,
                            order: v.order,
                        })
                    })
                    .collect()
            })
            .collect();
        grid.serialize(serializer)
    }
}

/// The chart-0 matrix of a staircase tuple: size `s_1`, with column
/// blocks in descending coordinate order `j = N..1` and, inside block
/// `j`, columns of types `α^j_1 < ⋯ < α^j_{n_j}` in coordinate `j`.
pub fn build_delta0(t: &StaircaseTuple) -> Result<JetMatrix> {
    t.validate()?;
    let n = t.ambient_dim();
    let space = VarSpace::affine(0, n)?;
    let size = t.total_len();
    let mut columns = Vec::with_capacity(size);
    for j in (1..=n).rev() {
        for &alpha in t.block(j).entries() {
            columns.push(column(alpha, j, size));
        }
    }
    let m = JetMatrix::from_columns(space, columns, Some((t.clone(), Construction::Delta0)))?;
    m.check_diagonal()?;
    Ok(m)
}

/// The homogenized matrix: the same column blocks in the homogeneous
/// variables `X_j`, followed by columns of types `s_1, …, M` in `X_0`,
/// all of length `M + 1`. The all-empty tuple gives the 0×0 matrix.
pub fn build_homogeneous(t: &StaircaseTuple) -> Result<JetMatrix> {
    t.validate()?;
    let n = t.ambient_dim();
    let space = VarSpace::homogeneous(n);
    let m = t.max_entry();
    if m < 0 {
        return JetMatrix::from_columns(
            space,
            Vec::new(),
            Some((t.clone(), Construction::Homogeneous)),
        );
    }
    let size = m as usize + 1;
    let mut columns = Vec::with_capacity(size);
    for j in (1..=n).rev() {
        for &alpha in t.block(j).entries() {
            columns.push(column(alpha, j, size));
        }
    }
    for alpha in t.total_len()..=m as usize {
        columns.push(column(alpha, 0, size));
    }
    let mat =
        JetMatrix::from_columns(space, columns, Some((t.clone(), Construction::Homogeneous)))?;
    mat.check_diagonal()?;
    Ok(mat)
}

/// The chart-`j` dehomogenization: delete every row and column of the
/// homogeneous matrix containing `X_j` (order 0), then rename `X_0` to
/// the chart's own coordinate `x_{jj}` and each surviving `X_i` to
/// `x_{ji}`. For `j = 0` this reproduces `build_delta0` exactly, up to
/// the variable renaming.
pub fn build_delta_j(t: &StaircaseTuple, j: usize) -> Result<JetMatrix> {
    let n = t.ambient_dim();
    if j > n {
        return Err(Error::InvalidChart { chart: j, n });
    }
    let h = build_homogeneous(t)?;
    let size = h.size();
    let target = JetVar::new(j, 0);
    let mut keep_rows = Vec::new();
    let mut keep_cols: Vec<bool> = vec![true; size];
    for r in 0..size {
        let mut row_clean = true;
        for c in 0..size {
            if let Some((_, v)) = h.entry(r, c) {
                if *v == target {
                    row_clean = false;
                    keep_cols[c] = false;
                }
            }
        }
        if row_clean {
            keep_rows.push(r);
        }
    }
    let space = VarSpace::affine(j, n)?;
    let cols: Vec<usize> = (0..size).filter(|&c| keep_cols[c]).collect();
    debug_assert_eq!(keep_rows.len(), cols.len());
    let columns: Vec<Vec<Entry>> = cols
        .iter()
        .map(|&c| {
            keep_rows
                .iter()
                .map(|&r| {
                    h.entry(r, c).as_ref().map(|(coeff, v)| {
                        debug_assert_ne!(v.coord, j, "deleted coordinate must not survive");
                        let coord = if v.coord == 0 { j } else { v.coord };
                        (coeff.clone(), JetVar::new(coord, v.order))
                    })
                })
                .collect()
        })
        .collect();
    let m = JetMatrix::from_columns(space, columns, Some((t.clone(), Construction::DeltaJ(j))))?;
    m.check_diagonal()?;
    Ok(m)
}

/// A square matrix of polynomials, with an exact determinant.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    space: VarSpace,
    entries: Vec<Vec<Polynomial>>,
}

impl PolyMatrix {
    pub fn new(space: VarSpace, entries: Vec<Vec<Polynomial>>) -> Result<Self> {
        let size = entries.len();
        for row in &entries {
            if row.len() != size {
                return Err(Error::InvalidInput(format!(
                    "row of length {} in a {size}x{size} matrix",
                    row.len()
                )));
            }
            for p in row {
                space.check_same(p.space())?;
            }
        }
        Ok(PolyMatrix { space, entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn entry(&self, row: usize, col: usize) -> &Polynomial {
        &self.entries[row][col]
    }

    /// Exact determinant by cofactor expansion with memoization on the
    /// set of remaining columns (the row index is determined by the
    /// popcount, so the column bitmask is a complete key). The 0×0
    /// determinant is 1.
    pub fn determinant(&self) -> Polynomial {
        let n = self.size();
        assert!(n <= 64, "determinant limited to size 64");
        let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut memo: HashMap<u64, Polynomial> = HashMap::new();
        self.det_rec(full, &mut memo)
    }

    fn det_rec(&self, colmask: u64, memo: &mut HashMap<u64, Polynomial>) -> Polynomial {
        if colmask == 0 {
            return Polynomial::one(self.space);
        }
        if let Some(p) = memo.get(&colmask) {
            return p.clone();
        }
        // Expand along the row with index = number of already-consumed
        // rows; rows are consumed top-down.
        let remaining = colmask.count_ones() as usize;
        let row = self.size() - remaining;
        let mut acc = Polynomial::zero(self.space);
        let mut sign_negative = false;
        for col in 0..self.size() {
            if colmask & (1 << col) == 0 {
                continue;
            }
            let e = &self.entries[row][col];
            if !e.is_zero() {
                let minor = self.det_rec(colmask & !(1 << col), memo);
                let term = e * &minor;
                if sign_negative {
                    acc = &acc - &term;
                } else {
                    acc = &acc + &term;
                }
            }
            sign_negative = !sign_negative;
        }
        memo.insert(colmask, acc.clone());
        acc
    }
}
