//! Max-plus arithmetic over exact rationals.
//!
//! The tropical semifield is `(Q ∪ {-inf}, max, +)`: `⊕` is `max`, `⊙` is
//! ordinary addition and `-inf` is the additive identity. Matrices are dense
//! and row-major. The only tropically invertible square matrices are the
//! generalized permutation matrices (exactly one finite entry in every row and
//! column), so regularity is decided structurally.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, Q};

/// An element of the tropical semifield. `NegInf` sorts below every finite value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TropScalar {
    NegInf,
    Finite(Q),
}

use TropScalar::{Finite, NegInf};

impl TropScalar {
    pub fn zero() -> Self {
        Finite(crate::rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            Finite(v) => Some(v),
            NegInf => None,
        }
    }

    /// Tropical sum: `max(a, b)`.
    pub fn oplus(&self, other: &Self) -> Self {
        std::cmp::max(self, other).clone()
    }

    /// Tropical product: `a + b`, absorbing at `-inf`.
    pub fn odot(&self, other: &Self) -> Self {
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => NegInf,
        }
    }

    /// Tropical inverse of a finite scalar.
    pub fn inv(&self) -> Option<Self> {
        self.finite().map(|v| Finite(-v))
    }
}

impl From<Q> for TropScalar {
    fn from(v: Q) -> Self {
        Finite(v)
    }
}

impl fmt::Display for TropScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => f.write_str("-inf"),
            Finite(v) => f.write_str(&fmt_q(v)),
        }
    }
}

impl Serialize for TropScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Add for &TropScalar {
    type Output = TropScalar;
    fn add(self, rhs: Self) -> TropScalar {
        self.oplus(rhs)
    }
}

impl Mul for &TropScalar {
    type Output = TropScalar;
    fn mul(self, rhs: Self) -> TropScalar {
        self.odot(rhs)
    }
}

pub fn trop_add(a: &TropScalar, b: &TropScalar) -> TropScalar {
    a.oplus(b)
}

pub fn trop_mul(a: &TropScalar, b: &TropScalar) -> TropScalar {
    a.odot(b)
}

/// Dense tropical matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TropMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<TropScalar>,
}

impl TropMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<TropScalar>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<TropScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn filled(rows: usize, cols: usize, value: TropScalar) -> Self {
        Self { rows, cols, entries: vec![value; rows * cols] }
    }

    /// Tropical identity: `0` on the diagonal, `-inf` elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::filled(n, n, NegInf);
        for i in 0..n {
            m.entries[i * n + i] = TropScalar::zero();
        }
        m
    }

    /// Diagonal matrix with the given finite entries.
    pub fn diagonal(diag: &[Q]) -> Self {
        let n = diag.len();
        let mut m = Self::filled(n, n, NegInf);
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * n + i] = Finite(d.clone());
        }
        m
    }

    /// Permutation matrix `P` with `P[k][perm[k]] = 0`, so `(P ⊙ v)_k = v_{perm(k)}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::filled(n, n, NegInf);
        for (k, &l) in perm.iter().enumerate() {
            m.entries[k * n + l] = TropScalar::zero();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &TropScalar {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[TropScalar] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<TropScalar>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// `(A ⊙ B)[k][m] = max_l (A[k][l] + B[l][m])`.
    pub fn mul(&self, other: &TropMatrix) -> Result<TropMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for k in 0..self.rows {
            for m in 0..other.cols {
                let mut acc = NegInf;
                for l in 0..self.cols {
                    let term = self.get(k, l).odot(other.get(l, m));
                    if term > acc {
                        acc = term;
                    }
                }
                out.push(acc);
            }
        }
        Ok(TropMatrix { rows: self.rows, cols: other.cols, entries: out })
    }

    /// `A ⊙ v`.
    pub fn apply(&self, v: &[TropScalar]) -> Result<Vec<TropScalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|k| {
                self.row(k)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a.odot(b))
                    .max()
                    .unwrap_or(NegInf)
            })
            .collect())
    }

    /// Scalar shift `c ⊙ A`.
    pub fn scale(&self, c: &TropScalar) -> TropMatrix {
        TropMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.odot(c)).collect(),
        }
    }

    /// Position of the single finite entry of each row, if every row and every
    /// column carries exactly one.
    fn finite_pattern(&self) -> Option<Vec<usize>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut col_seen = vec![false; n];
        let mut pattern = Vec::with_capacity(n);
        for r in 0..n {
            let mut finite = self.row(r).iter().enumerate().filter(|(_, e)| e.is_finite());
            let (c, _) = finite.next()?;
            if finite.next().is_some() || col_seen[c] {
                return None;
            }
            col_seen[c] = true;
            pattern.push(c);
        }
        Some(pattern)
    }

    pub fn is_generalized_permutation(&self) -> bool {
        self.finite_pattern().is_some()
    }

    /// Every row and column has exactly one entry equal to 0, all others `-inf`.
    pub fn is_permutation_matrix(&self) -> bool {
        match self.finite_pattern() {
            Some(p) => p.iter().enumerate().all(|(r, &c)| *self.get(r, c) == TropScalar::zero()),
            None => false,
        }
    }

    /// The column index of the 0 in each row, for a permutation matrix.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        if self.is_permutation_matrix() {
            self.finite_pattern()
        } else {
            None
        }
    }

    pub fn is_regular(&self) -> Result<bool> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(self.is_generalized_permutation())
    }

    /// Tropical inverse: the entry `c` at `(k, π(k))` becomes `-c` at `(π(k), k)`.
    pub fn invert(&self) -> Result<TropMatrix> {
        if !self.is_regular()? {
            return Err(Error::NotRegular);
        }
        let n = self.rows;
        let pattern = self.finite_pattern().expect("regular");
        let mut out = TropMatrix::filled(n, n, NegInf);
        for (k, &c) in pattern.iter().enumerate() {
            out.entries[c * n + k] = self.get(k, c).inv().expect("finite");
        }
        Ok(out)
    }

    /// Normalized representative of the class modulo scalars: shifted so the
    /// first finite entry of the first row is 0.
    pub fn pgl_representative(&self) -> Result<TropMatrix> {
        if !self.is_regular()? {
            return Err(Error::NotRegular);
        }
        let first = self.row(0).iter().find(|e| e.is_finite()).expect("regular row");
        Ok(self.scale(&first.inv().expect("finite")))
    }
}

impl fmt::Display for TropMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for TropMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

pub fn mat_mul(a: &TropMatrix, b: &TropMatrix) -> Result<TropMatrix> {
    a.mul(b)
}

pub fn is_regular(a: &TropMatrix) -> Result<bool> {
    a.is_regular()
}

pub fn invert(a: &TropMatrix) -> Result<TropMatrix> {
    a.invert()
}

/// True iff `b = c ⊙ a` for some finite `c`.
pub fn pgl_equal(a: &TropMatrix, b: &TropMatrix) -> Result<bool> {
    if !a.is_regular()? || !b.is_regular()? {
        return Err(Error::NotRegular);
    }
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch("matrices of different order".into()));
    }
    Ok(a.pgl_representative()? == b.pgl_representative()?)
}

/// A point of tropical projective space: a coordinate vector that is not all
/// `-inf`, taken modulo adding a common finite constant.
#[derive(Clone, Debug)]
pub struct ProjPoint {
    coords: Vec<TropScalar>,
}

impl ProjPoint {
    pub fn new(coords: Vec<TropScalar>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionMismatch("projective points need at least 2 coordinates".into()));
        }
        if coords.iter().all(|c| !c.is_finite()) {
            return Err(Error::AllBottom);
        }
        Ok(Self { coords })
    }

    /// Projective dimension `n` (there are `n + 1` coordinates).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[TropScalar] {
        &self.coords
    }

    /// Representative with the last finite coordinate shifted to 0.
    pub fn normalized(&self) -> Vec<TropScalar> {
        let last = self.coords.iter().rev().find(|c| c.is_finite()).expect("not all -inf");
        let shift = last.inv().expect("finite");
        self.coords.iter().map(|c| c.odot(&shift)).collect()
    }
}

impl PartialEq for ProjPoint {
    fn eq(&self, other: &Self) -> bool {
        self.coords.len() == other.coords.len() && self.normalized() == other.normalized()
    }
}

impl Eq for ProjPoint {}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(" : "))
    }
}

pub fn proj_equal(p: &ProjPoint, q: &ProjPoint) -> Result<bool> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(format!("TP^{} vs TP^{}", p.dim(), q.dim())));
    }
    Ok(p == q)
}
