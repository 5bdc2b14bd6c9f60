//! Intersection matrices and their structural operations.
//!
//! An intersection matrix on a label set `L` has one cyclic row per label
//! `i`. Walking along curve `i`, the row records every crossing as `+k`
//! (curve `k` comes from the left) or `-k` (curve `k` comes from the right).
//! Rows are cyclic; two matrices are equal when their rows agree up to a
//! rotation of each row.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Curve label. Labels are positive; `0` is never a valid label.
pub type Label = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    /// The crossing curve comes from the left.
    Plus,
    /// The crossing curve comes from the right.
    Minus,
}

impl Sign {
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// One crossing record `±k`.
///
/// The derived ordering compares the sign first (`+` before `-`) and then the
/// label, which is the total order used by the serializer and by canonical
/// forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignedEntry {
    pub sign: Sign,
    pub label: Label,
}

impl SignedEntry {
    pub fn new(sign: Sign, label: Label) -> Self {
        SignedEntry { sign, label }
    }

    pub fn plus(label: Label) -> Self {
        SignedEntry::new(Sign::Plus, label)
    }

    pub fn minus(label: Label) -> Self {
        SignedEntry::new(Sign::Minus, label)
    }

    pub fn negated(self) -> Self {
        SignedEntry::new(self.sign.flipped(), self.label)
    }
}

impl fmt::Display for SignedEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.sign.symbol(), self.label)
    }
}

impl FromStr for SignedEntry {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let sign = match s.chars().next() {
            Some('+') => Sign::Plus,
            Some('-') => Sign::Minus,
            _ => return Err(format!("entry `{s}` must start with '+' or '-'")),
        };
        let digits = &s[1..];
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!(
                "entry `{s}` must be a sign followed by a decimal label"
            ));
        }
        let label = digits
            .parse::<Label>()
            .map_err(|e| format!("entry `{s}`: {e}"))?;
        Ok(SignedEntry::new(sign, label))
    }
}

/// Index-based packed entry used by the algorithms: the low 15 bits hold the
/// row index of the crossing curve, the high bit is set for `-`.
///
/// Since labels are stored in ascending order, the numeric order of cells
/// equals the order of the corresponding `SignedEntry` values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Cell(pub(crate) u16);

impl Cell {
    const MINUS: u16 = 0x8000;
    pub(crate) const MAX_CURVES: usize = 0x7fff;

    #[inline]
    pub(crate) fn new(index: usize, minus: bool) -> Cell {
        debug_assert!(index < Self::MAX_CURVES);
        Cell(index as u16 | if minus { Self::MINUS } else { 0 })
    }

    #[inline]
    pub(crate) fn plus(index: usize) -> Cell {
        Cell::new(index, false)
    }

    #[inline]
    pub(crate) fn minus(index: usize) -> Cell {
        Cell::new(index, true)
    }

    #[inline]
    pub(crate) fn index(self) -> usize {
        (self.0 & !Self::MINUS) as usize
    }

    #[inline]
    pub(crate) fn is_minus(self) -> bool {
        self.0 & Self::MINUS != 0
    }

    #[inline]
    pub(crate) fn negated(self) -> Cell {
        Cell(self.0 ^ Self::MINUS)
    }

    #[inline]
    pub(crate) fn with_index(self, index: usize) -> Cell {
        Cell::new(index, self.is_minus())
    }
}

/// Rotates `row` in place so that it starts with its minimal cell.
pub(crate) fn normalize_row(row: &mut [Cell]) {
    if let Some((pos, _)) = row.iter().enumerate().min_by_key(|(_, c)| **c) {
        row.rotate_left(pos);
    }
}

fn cyclic_eq(a: &[Cell], b: &[Cell]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    match b.iter().position(|c| *c == a[0]) {
        Some(off) => (0..a.len()).all(|t| a[t] == b[(off + t) % b.len()]),
        None => false,
    }
}

/// Why a candidate row map fails the permutation condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// A row label is zero.
    ZeroLabel,
    /// Two rows carry the same label.
    DuplicateRow,
    /// An entry names a label that has no row.
    UnknownLabel,
    /// Row `i` contains `±i`.
    SelfReference,
    /// An entry occurs twice in the row.
    DuplicateEntry,
    /// An entry required by the permutation condition is absent.
    MissingEntry,
}

/// First offending row (and entry, when there is one) of an invalid matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub row: Label,
    pub position: Option<usize>,
    pub entry: Option<SignedEntry>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ViolationKind::ZeroLabel => "label 0 is not allowed",
            ViolationKind::DuplicateRow => "duplicate row label",
            ViolationKind::UnknownLabel => "entry names a label without a row",
            ViolationKind::SelfReference => "row refers to its own label",
            ViolationKind::DuplicateEntry => "duplicate entry",
            ViolationKind::MissingEntry => "missing entry",
        };
        write!(f, "row {}", self.row)?;
        if let Some(p) = self.position {
            write!(f, " position {p}")?;
        }
        if let Some(e) = self.entry {
            write!(f, " entry {e}")?;
        }
        write!(f, ": {what}")
    }
}

/// Checks the permutation condition: row `i` must be a permutation of
/// `{+k, -k : k != i}` over the row labels.
///
/// Rows are examined in ascending label order and, within a row, from left
/// to right; the first problem found is reported.
pub fn validate(rows: &[(Label, Vec<SignedEntry>)]) -> std::result::Result<(), Violation> {
    let mut labels = BTreeSet::new();
    for (label, _) in rows {
        if *label == 0 {
            return Err(Violation {
                row: 0,
                position: None,
                entry: None,
                kind: ViolationKind::ZeroLabel,
            });
        }
        if !labels.insert(*label) {
            return Err(Violation {
                row: *label,
                position: None,
                entry: None,
                kind: ViolationKind::DuplicateRow,
            });
        }
    }

    for (label, row) in rows.iter().sorted_by_key(|(l, _)| *l) {
        let violation = |position, entry, kind| Violation {
            row: *label,
            position,
            entry,
            kind,
        };
        let mut seen = BTreeSet::new();
        for (p, e) in row.iter().enumerate() {
            if !labels.contains(&e.label) {
                return Err(violation(Some(p), Some(*e), ViolationKind::UnknownLabel));
            }
            if e.label == *label {
                return Err(violation(Some(p), Some(*e), ViolationKind::SelfReference));
            }
            if !seen.insert(*e) {
                return Err(violation(Some(p), Some(*e), ViolationKind::DuplicateEntry));
            }
        }
        for k in labels.iter().filter(|k| *k != label) {
            for e in [SignedEntry::plus(*k), SignedEntry::minus(*k)] {
                if !seen.contains(&e) {
                    return Err(violation(None, Some(e), ViolationKind::MissingEntry));
                }
            }
        }
    }
    Ok(())
}

/// A bijection of a label set onto itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelPermutation {
    map: BTreeMap<Label, Label>,
}

impl LabelPermutation {
    /// Builds a permutation from `(from, to)` pairs; the image set must equal
    /// the domain.
    pub fn new(pairs: impl IntoIterator<Item = (Label, Label)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (from, to) in pairs {
            if map.insert(from, to).is_some() {
                return Err(Error::NotABijection(format!("label {from} mapped twice")));
            }
        }
        let domain: BTreeSet<_> = map.keys().copied().collect();
        let image: BTreeSet<_> = map.values().copied().collect();
        if domain != image {
            return Err(Error::NotABijection(
                "image set differs from domain".to_string(),
            ));
        }
        Ok(LabelPermutation { map })
    }

    pub fn identity(labels: &[Label]) -> Self {
        LabelPermutation {
            map: labels.iter().map(|l| (*l, *l)).collect(),
        }
    }

    /// Transposition of `a` and `b` on `labels`.
    pub fn swap(labels: &[Label], a: Label, b: Label) -> Result<Self> {
        if !labels.contains(&a) || !labels.contains(&b) {
            return Err(Error::UnknownLabel(if labels.contains(&a) { b } else { a }));
        }
        Self::new(labels.iter().map(|&l| {
            (
                l,
                if l == a {
                    b
                } else if l == b {
                    a
                } else {
                    l
                },
            )
        }))
    }

    /// Cycle notation on `labels`: `cycle[0] -> cycle[1] -> ... -> cycle[0]`.
    pub fn cycle(labels: &[Label], cycle: &[Label]) -> Result<Self> {
        let mut map: BTreeMap<Label, Label> = labels.iter().map(|l| (*l, *l)).collect();
        for (t, l) in cycle.iter().enumerate() {
            if !map.contains_key(l) {
                return Err(Error::UnknownLabel(*l));
            }
            map.insert(*l, cycle[(t + 1) % cycle.len()]);
        }
        Self::new(map)
    }

    pub fn apply(&self, label: Label) -> Option<Label> {
        self.map.get(&label).copied()
    }

    pub fn inverse(&self) -> Self {
        LabelPermutation {
            map: self.map.iter().map(|(a, b)| (*b, *a)).collect(),
        }
    }

    pub fn domain(&self) -> impl Iterator<Item = Label> + '_ {
        self.map.keys().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Label, Label)> + '_ {
        self.map.iter().map(|(a, b)| (*a, *b))
    }
}

impl fmt::Display for LabelPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.map.iter().map(|(a, b)| format!("{a}:{b}")).join(",");
        f.write_str(&s)
    }
}

impl FromStr for LabelPermutation {
    type Err = Error;

    /// Parses `a:b,c:d,...`.
    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (t, item) in s.split(',').enumerate() {
            let bad = |message: &str| Error::Syntax {
                line: 1,
                column: t + 1,
                message: format!("{message} in `{item}`"),
            };
            let (a, b) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| bad("expected `from:to`"))?;
            let a: Label = a.trim().parse().map_err(|_| bad("bad label"))?;
            let b: Label = b.trim().parse().map_err(|_| bad("bad label"))?;
            pairs.push((a, b));
        }
        Self::new(pairs)
    }
}

/// A validated intersection matrix.
///
/// Rows are kept in ascending label order. Each row keeps whatever rotation
/// it was built with; equality and hashing ignore row rotation.
#[derive(Debug, Clone)]
pub struct IntersectionMatrix {
    labels: Vec<Label>,
    rows: Vec<Vec<Cell>>,
}

impl PartialEq for IntersectionMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| cyclic_eq(a, b))
    }
}

impl Eq for IntersectionMatrix {}

impl Hash for IntersectionMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let normal = self.normalized();
        normal.labels.hash(state);
        normal.rows.hash(state);
    }
}

impl IntersectionMatrix {
    /// Validates and builds a matrix from labelled rows given in any order.
    pub fn new(rows: Vec<(Label, Vec<SignedEntry>)>) -> Result<Self> {
        validate(&rows).map_err(Error::Validation)?;
        if rows.len() > Cell::MAX_CURVES {
            return Err(Error::Capability(format!(
                "at most {} curves are supported",
                Cell::MAX_CURVES
            )));
        }
        let mut rows = rows;
        rows.sort_by_key(|(l, _)| *l);
        let labels: Vec<Label> = rows.iter().map(|(l, _)| *l).collect();
        let cells = rows
            .iter()
            .map(|(_, row)| {
                row.iter()
                    .map(|e| {
                        let idx = labels.binary_search(&e.label).expect("validated");
                        Cell::new(idx, e.sign == Sign::Minus)
                    })
                    .collect()
            })
            .collect();
        Ok(IntersectionMatrix {
            labels,
            rows: cells,
        })
    }

    /// Builds from index-based rows without validation. Callers guarantee the
    /// permutation condition.
    pub(crate) fn from_cells(labels: Vec<Label>, rows: Vec<Vec<Cell>>) -> Self {
        debug_assert_eq!(labels.len(), rows.len());
        debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
        IntersectionMatrix { labels, rows }
    }

    /// Index-based rows on labels `1..=n`.
    pub(crate) fn from_cells_default(rows: Vec<Vec<Cell>>) -> Self {
        let labels = (1..=rows.len() as Label).collect();
        Self::from_cells(labels, rows)
    }

    pub(crate) fn cells(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Number of curves.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Length of every row, `2(n-1)`.
    pub fn row_len(&self) -> usize {
        2 * self.n().saturating_sub(1)
    }

    pub fn index_of(&self, label: Label) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    fn require(&self, label: Label) -> Result<usize> {
        self.index_of(label).ok_or(Error::UnknownLabel(label))
    }

    pub(crate) fn entry(&self, cell: Cell) -> SignedEntry {
        SignedEntry::new(
            if cell.is_minus() {
                Sign::Minus
            } else {
                Sign::Plus
            },
            self.labels[cell.index()],
        )
    }

    /// Row of `label` in its stored rotation.
    pub fn row(&self, label: Label) -> Option<Vec<SignedEntry>> {
        let idx = self.index_of(label)?;
        Some(self.row_at(idx))
    }

    pub(crate) fn row_at(&self, idx: usize) -> Vec<SignedEntry> {
        self.rows[idx].iter().map(|c| self.entry(*c)).collect()
    }

    /// All rows as `(label, entries)` in ascending label order.
    pub fn rows(&self) -> Vec<(Label, Vec<SignedEntry>)> {
        (0..self.n())
            .map(|i| (self.labels[i], self.row_at(i)))
            .collect()
    }

    /// Rotates row `label` left by `k` positions.
    pub fn rotate_row(&self, label: Label, k: usize) -> Result<Self> {
        let idx = self.require(label)?;
        let mut out = self.clone();
        let len = out.rows[idx].len();
        if len > 0 {
            out.rows[idx].rotate_left(k % len);
        }
        Ok(out)
    }

    /// Every row rotated to start with its minimal entry.
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            normalize_row(row);
        }
        out
    }

    /// Reverses the orientation of curve `j`: row `j` is reversed and negated,
    /// and `±j` is negated in every other row.
    pub fn reorient(&self, j: Label) -> Result<Self> {
        let jx = self.require(j)?;
        Ok(self.reorient_indices(|i| i == jx))
    }

    /// Reorients every curve whose index bit is set in `mask`.
    pub fn reorient_mask(&self, mask: u64) -> Self {
        self.reorient_indices(|i| i < 64 && mask & (1 << i) != 0)
    }

    pub fn reorient_all(&self) -> Self {
        self.reorient_indices(|_| true)
    }

    fn reorient_indices(&self, flip: impl Fn(usize) -> bool) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut row: Vec<Cell> = row
                    .iter()
                    .map(|c| {
                        if flip(i) != flip(c.index()) {
                            c.negated()
                        } else {
                            *c
                        }
                    })
                    .collect();
                if flip(i) {
                    row.reverse();
                }
                row
            })
            .collect();
        IntersectionMatrix::from_cells(self.labels.clone(), rows)
    }

    /// Mirror image: the reflected surface swaps left and right at every
    /// crossing, so every sign is negated.
    pub fn mirror(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|c| c.negated()).collect())
            .collect();
        IntersectionMatrix::from_cells(self.labels.clone(), rows)
    }

    /// Applies `perm`: row `i` becomes row `perm(i)` and `±k` becomes
    /// `±perm(k)`.
    pub fn relabel(&self, perm: &LabelPermutation) -> Result<Self> {
        let domain: Vec<Label> = perm.domain().collect();
        if domain != self.labels {
            return Err(Error::NotABijection(format!(
                "permutation domain {:?} differs from label set {:?}",
                domain, self.labels
            )));
        }
        let image: Vec<usize> = self
            .labels
            .iter()
            .map(|l| {
                self.index_of(perm.apply(*l).expect("in domain"))
                    .expect("in image")
            })
            .collect();
        Ok(self.permute_indices(&image))
    }

    /// Row `i` moves to index `image[i]`; labels stay in place.
    pub(crate) fn permute_indices(&self, image: &[usize]) -> Self {
        let mut rows = vec![Vec::new(); self.n()];
        for (i, row) in self.rows.iter().enumerate() {
            rows[image[i]] = row.iter().map(|c| c.with_index(image[c.index()])).collect();
        }
        IntersectionMatrix::from_cells(self.labels.clone(), rows)
    }

    /// The submatrix obtained by deleting row `j` and every entry `±j`.
    pub fn submatrix_delete(&self, j: Label) -> Result<Self> {
        if self.n() < 3 {
            return Err(Error::TooFewCurves {
                needed: 3,
                actual: self.n(),
            });
        }
        let jx = self.require(j)?;
        let keep: Vec<usize> = (0..self.n()).filter(|i| *i != jx).collect();
        Ok(self.sub_by_indices(&keep))
    }

    /// Restriction to the curves in `keep` (original labels are kept).
    pub fn submatrix(&self, keep: &[Label]) -> Result<Self> {
        let mut idxs = keep
            .iter()
            .map(|l| self.require(*l))
            .collect::<Result<Vec<_>>>()?;
        idxs.sort_unstable();
        idxs.dedup();
        if idxs.is_empty() {
            return Err(Error::OutOfRange("empty label subset".to_string()));
        }
        Ok(self.sub_by_indices(&idxs))
    }

    /// Restriction to sorted, distinct row indices.
    pub(crate) fn sub_by_indices(&self, keep: &[usize]) -> Self {
        let mut new_index = vec![usize::MAX; self.n()];
        for (t, i) in keep.iter().enumerate() {
            new_index[*i] = t;
        }
        let rows = keep
            .iter()
            .map(|i| {
                self.rows[*i]
                    .iter()
                    .filter(|c| new_index[c.index()] != usize::MAX)
                    .map(|c| c.with_index(new_index[c.index()]))
                    .collect()
            })
            .collect();
        let labels = keep.iter().map(|i| self.labels[*i]).collect();
        IntersectionMatrix::from_cells(labels, rows)
    }

    /// All `m`-submatrices, one per `m`-subset of labels, in lexicographic
    /// subset order.
    pub fn all_submatrices(&self, m: usize) -> Result<Vec<(Vec<Label>, Self)>> {
        if m < 2 || m > self.n() {
            return Err(Error::OutOfRange(format!(
                "submatrix size {m} not in 2..={}",
                self.n()
            )));
        }
        Ok((0..self.n())
            .combinations(m)
            .map(|idxs| {
                let labels = idxs.iter().map(|i| self.labels[*i]).collect();
                (labels, self.sub_by_indices(&idxs))
            })
            .collect())
    }
}

impl fmt::Display for IntersectionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::to_psm(self))
    }
}
