//! Dense matrices, classification matrices and their pseudo-inverses.
//!
//! A classification matrix `K` is an `n × m` 0/1 matrix with exactly one
//! `1` per row and no zero column. Its Moore-Penrose pseudo-inverse is the
//! transpose of `K` with every row divided by its sum, i.e. by the size of
//! the corresponding class. Lumping a transition matrix `M` through `K`
//! yields `K† M K`, the abstract system over classes.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pts::{row_enabled, Classification, LabelledPts};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a classification matrix: {0}")]
    NotClassificationMatrix(String),
}

/// Row-major dense matrix of `f64`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from nested rows. Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Entrywise comparison with absolute tolerance.
    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> Option<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}", self.rows, self.cols)?;
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

/// The `n × m` 0/1 matrix with `K[i][j] = 1` iff state `i` is in class `j`.
pub fn classification_matrix(c: &Classification) -> Matrix {
    let mut k = Matrix::zeros(c.n(), c.m());
    for (state, &class) in c.assignment().iter().enumerate() {
        k[(state, class)] = 1.0;
    }
    k
}

/// Checks the classification-matrix shape: 0/1 entries, one `1` per row,
/// no empty column. Returns the column sums (class sizes).
fn class_sizes(k: &Matrix) -> Result<Vec<usize>, LinalgError> {
    let mut sizes = vec![0usize; k.cols()];
    for i in 0..k.rows() {
        let mut ones = 0;
        for (j, &x) in k.row(i).iter().enumerate() {
            if x == 1.0 {
                ones += 1;
                sizes[j] += 1;
            } else if x != 0.0 {
                return Err(LinalgError::NotClassificationMatrix(format!(
                    "entry ({i}, {j}) = {x} is not 0 or 1"
                )));
            }
        }
        if ones != 1 {
            return Err(LinalgError::NotClassificationMatrix(format!(
                "row {i} has {ones} unit entries"
            )));
        }
    }
    if let Some(j) = sizes.iter().position(|&s| s == 0) {
        return Err(LinalgError::NotClassificationMatrix(format!(
            "column {j} is empty"
        )));
    }
    Ok(sizes)
}

/// Pseudo-inverse of a classification matrix: its row-normalised transpose.
pub fn pseudo_inverse(k: &Matrix) -> Result<Matrix, LinalgError> {
    let sizes = class_sizes(k)?;
    let mut p = k.transpose();
    for (j, &size) in sizes.iter().enumerate() {
        let inv = 1.0 / size as f64;
        for x in p.row_mut(j) {
            *x *= inv;
        }
    }
    Ok(p)
}

/// Checks the four Penrose identities for `p` as the pseudo-inverse of `k`:
/// `KPK = K`, `PKP = P`, and symmetry of both `KP` and `PK`.
pub fn penrose_check(k: &Matrix, p: &Matrix, tol: f64) -> Result<bool, LinalgError> {
    if k.rows() != p.cols() || k.cols() != p.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "K is {}x{}, P is {}x{}",
            k.rows(),
            k.cols(),
            p.rows(),
            p.cols()
        )));
    }
    let kp = k.mul(p)?;
    let pk = p.mul(k)?;
    Ok(kp.mul(k)?.approx_eq(k, tol)
        && pk.mul(p)?.approx_eq(p, tol)
        && kp.transpose().approx_eq(&kp, tol)
        && pk.transpose().approx_eq(&pk, tol))
}

/// The lumped matrix `K† M K`, computed literally by matrix products.
pub fn lump(m: &Matrix, k: &Matrix) -> Result<Matrix, LinalgError> {
    if m.rows() != m.cols() {
        return Err(LinalgError::DimensionMismatch(format!(
            "transition matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() != k.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "transition matrix has {} states, classification matrix {}",
            m.rows(),
            k.rows()
        )));
    }
    let p = pseudo_inverse(k)?;
    p.mul(m)?.mul(k)
}

/// Same result as [`lump`] without materialising `K` or `K†`: entry `(i, j)`
/// is the mean over states of class `i` of their total mass into class `j`.
pub fn lump_by_classification(m: &Matrix, c: &Classification) -> Matrix {
    assert_eq!(m.rows(), c.n());
    let classes = c.m();
    let assign = c.assignment();
    let mut out = Matrix::zeros(classes, classes);
    let mut sizes = vec![0usize; classes];
    for (s, &ci) in assign.iter().enumerate() {
        sizes[ci] += 1;
        let row = m.row(s);
        let dst = out.row_mut(ci);
        for (t, &x) in row.iter().enumerate() {
            dst[assign[t]] += x;
        }
    }
    for (ci, &size) in sizes.iter().enumerate() {
        let inv = 1.0 / size as f64;
        for x in out.row_mut(ci) {
            *x *= inv;
        }
    }
    out
}

/// Total mass of `row` into each class of `c`.
pub fn block_masses(row: &[f64], c: &Classification) -> Vec<f64> {
    let mut out = vec![0.0; c.m()];
    for (t, &x) in row.iter().enumerate() {
        out[c.class_of(t)] += x;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// Operator norm induced by the max vector norm: max absolute row sum.
    OpInf,
    /// Largest absolute entry.
    EntryMax,
    Frobenius,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::OpInf, NormKind::EntryMax, NormKind::Frobenius];

    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::OpInf => "op-inf",
            NormKind::EntryMax => "entry-max",
            NormKind::Frobenius => "frobenius",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "op-inf" => Ok(NormKind::OpInf),
            "entry-max" => Ok(NormKind::EntryMax),
            "frobenius" => Ok(NormKind::Frobenius),
            other => Err(format!(
                "unknown norm `{other}` (expected op-inf, entry-max or frobenius)"
            )),
        }
    }
}

pub fn matrix_norm(m: &Matrix, kind: NormKind) -> f64 {
    match kind {
        NormKind::OpInf => (0..m.rows())
            .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max),
        NormKind::EntryMax => m.as_slice().iter().map(|x| x.abs()).fold(0.0, f64::max),
        NormKind::Frobenius => m.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt(),
    }
}

/// First witness that a classification is not lumpable for a system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LumpViolation {
    pub action: String,
    /// Two states of the same class that behave differently.
    pub states: (usize, usize),
    pub block: usize,
    /// Target block whose incoming mass differs; `None` when the two states
    /// disagree on whether the action is enabled.
    pub target: Option<usize>,
}

impl fmt::Display for LumpViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.states;
        match self.target {
            Some(t) => write!(
                f,
                "action `{}`: states {p} and {q} of block {} send different mass into block {t}",
                self.action, self.block
            ),
            None => write!(
                f,
                "action `{}`: states {p} and {q} of block {} differ in enabledness",
                self.action, self.block
            ),
        }
    }
}

/// Ordinary lumpability plus equal enabledness per block. Returns the first
/// violation in (action, block, state, target) order.
pub fn lumpability_violation(
    p: &LabelledPts,
    c: &Classification,
    tol: f64,
) -> Option<LumpViolation> {
    assert_eq!(p.n(), c.n(), "classification size does not match system");
    let blocks = c.blocks();
    for (a, m) in p.actions().iter().zip(p.matrices()) {
        for (b, members) in blocks.iter().enumerate() {
            let rep = members[0];
            let rep_enabled = row_enabled(m, rep);
            let rep_mass = block_masses(m.row(rep), c);
            for &s in &members[1..] {
                if row_enabled(m, s) != rep_enabled {
                    return Some(LumpViolation {
                        action: a.clone(),
                        states: (rep, s),
                        block: b,
                        target: None,
                    });
                }
                let mass = block_masses(m.row(s), c);
                if let Some(t) = (0..c.m()).find(|&t| (mass[t] - rep_mass[t]).abs() > tol) {
                    return Some(LumpViolation {
                        action: a.clone(),
                        states: (rep, s),
                        block: b,
                        target: Some(t),
                    });
                }
            }
        }
    }
    None
}

pub fn is_lumpable(p: &LabelledPts, c: &Classification, tol: f64) -> bool {
    lumpability_violation(p, c, tol).is_none()
}
