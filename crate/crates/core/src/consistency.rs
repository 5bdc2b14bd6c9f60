//! Consistency of intersection matrices.
//!
//! A matrix is consistent when, for all pairwise distinct `i, j, k`, the
//! entry `±i` in row `k` lies between `+j` and `-j` exactly when the matching
//! entry `∓k` in row `i` does. "Between `+j` and `-j`" is the cyclic arc
//! that starts right after `+j` and ends right before `-j`. The verdict does
//! not depend on that choice of arc (the complementary arc flips both sides
//! of the biconditional), but the sides reported in a witness do.
//!
//! Consistent matrices are exactly the ones strictly embeddable into some
//! closed orientable surface.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{Cell, IntersectionMatrix, Label, SignedEntry};

/// A triple violating the betweenness biconditional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConsistencyWitness {
    pub i: Label,
    pub j: Label,
    pub k: Label,
    /// The entry `±i` in row `k`.
    pub offending_entry: SignedEntry,
    /// Whether `offending_entry` lies in the arc from `+j` to `-j` of row `k`.
    pub side_in_row_k: bool,
    /// Whether the matching `∓k` lies in the arc from `+j` to `-j` of row `i`.
    pub side_in_row_i: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent(ConsistencyWitness),
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::Consistent)
    }

    pub fn witness(&self) -> Option<&ConsistencyWitness> {
        match self {
            Consistency::Consistent => None,
            Consistency::Inconsistent(w) => Some(w),
        }
    }
}

/// `true` iff, walking `row` cyclically from just after `+j`, the entry `x`
/// is met before `-j`.
pub fn is_between(row: &[SignedEntry], x: SignedEntry, j: Label) -> Result<bool> {
    if x.label == j {
        return Err(Error::Precondition(format!(
            "entry {x} is one of the arc endpoints"
        )));
    }
    let find = |e: SignedEntry| {
        row.iter()
            .position(|y| *y == e)
            .ok_or_else(|| Error::Precondition(format!("entry {e} does not occur in the row")))
    };
    let start = find(SignedEntry::plus(j))?;
    let end = find(SignedEntry::minus(j))?;
    let at = find(x)?;
    Ok(in_arc(row.len(), start, end, at))
}

#[inline]
pub(crate) fn in_arc(len: usize, start: usize, end: usize, at: usize) -> bool {
    let off = (at + len - start) % len;
    off != 0 && off < (end + len - start) % len
}

/// Position of every cell in every row: `pos[r][slot(cell)]`.
pub(crate) struct PositionIndex {
    n: usize,
    pos: Vec<usize>,
}

#[inline]
fn slot(n: usize, c: Cell) -> usize {
    c.index() + if c.is_minus() { n } else { 0 }
}

impl PositionIndex {
    pub(crate) fn new(rows: &[Vec<Cell>]) -> Self {
        let n = rows.len();
        let mut pos = vec![usize::MAX; n * 2 * n];
        for (r, row) in rows.iter().enumerate() {
            for (p, c) in row.iter().enumerate() {
                pos[r * 2 * n + slot(n, *c)] = p;
            }
        }
        PositionIndex { n, pos }
    }

    #[inline]
    pub(crate) fn get(&self, row: usize, c: Cell) -> usize {
        self.pos[row * 2 * self.n + slot(self.n, c)]
    }
}

/// Side test for the pair of rows `(k, i)` and arc label `j`, both signs.
/// Returns the first failing sign as `(entry in row k, side in k, side in i)`.
#[inline]
pub(crate) fn check_pair(
    rows: &[Vec<Cell>],
    index: &PositionIndex,
    k: usize,
    j: usize,
    i: usize,
) -> Option<(Cell, bool, bool)> {
    let len = rows[k].len();
    let (ks, ke) = (index.get(k, Cell::plus(j)), index.get(k, Cell::minus(j)));
    let (is, ie) = (index.get(i, Cell::plus(j)), index.get(i, Cell::minus(j)));
    for minus in [true, false] {
        let in_k = Cell::new(i, minus);
        let in_i = Cell::new(k, !minus);
        let side_k = in_arc(len, ks, ke, index.get(k, in_k));
        let side_i = in_arc(len, is, ie, index.get(i, in_i));
        if side_k != side_i {
            return Some((in_k, side_k, side_i));
        }
    }
    None
}

/// Checks every ordered triple `(k, j, i)` in ascending label order, trying
/// the entry `-i` of row `k` before `+i`, and returns the first witness.
pub fn check_consistency(matrix: &IntersectionMatrix) -> Consistency {
    let rows = matrix.cells();
    let n = rows.len();
    if n < 3 {
        return Consistency::Consistent;
    }
    let index = PositionIndex::new(rows);
    for k in 0..n {
        for j in (0..n).filter(|j| *j != k) {
            for i in (0..n).filter(|i| *i != k && *i != j) {
                if let Some((cell, side_k, side_i)) = check_pair(rows, &index, k, j, i) {
                    let labels = matrix.labels();
                    return Consistency::Inconsistent(ConsistencyWitness {
                        i: labels[i],
                        j: labels[j],
                        k: labels[k],
                        offending_entry: matrix.entry(cell),
                        side_in_row_k: side_k,
                        side_in_row_i: side_i,
                    });
                }
            }
        }
    }
    Consistency::Consistent
}

/// Fast boolean form used by the enumeration and the analysis code.
pub(crate) fn rows_consistent(rows: &[Vec<Cell>]) -> bool {
    let n = rows.len();
    if n < 3 {
        return true;
    }
    let index = PositionIndex::new(rows);
    (0..n).all(|k| {
        (0..n).filter(|j| *j != k).all(|j| {
            (0..n)
                .filter(|i| *i != k && *i != j)
                .all(|i| check_pair(rows, &index, k, j, i).is_none())
        })
    })
}

/// A matrix is strictly embeddable into some closed orientable surface iff
/// it is consistent.
pub fn strictly_embeddable(matrix: &IntersectionMatrix) -> bool {
    check_consistency(matrix).is_consistent()
}

/// For an inconsistent matrix, a label triple whose 3-submatrix is already
/// inconsistent. The triple is taken from the first witness, sorted.
pub fn inconsistent_triple(matrix: &IntersectionMatrix) -> Option<[Label; 3]> {
    check_consistency(matrix).witness().map(|w| {
        let mut t = [w.i, w.j, w.k];
        t.sort_unstable();
        t
    })
}
