//! Canonical forms of intersection matrices under relabelling and row
//! rotation.
//!
//! The canonical form is the lexicographically least flattened encoding over
//! all `n!` relabellings onto `1..=n`, where every row is rotated to start at
//! its minimal entry and entries compare by sign (`+` first) and then label.
//! The search is brute force and limited to `n <= 8`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::matrix::{Cell, IntersectionMatrix, Label};

pub const MAX_CANONICAL_CURVES: usize = 8;
const MAX_CELLS: usize = MAX_CANONICAL_CURVES * 2 * (MAX_CANONICAL_CURVES - 1);

/// Canonical representative of an isomorphism class.
///
/// Ordered by curve count first and then by the flattened encoding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    n: usize,
    cells: Vec<Cell>,
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The representative matrix on labels `1..=n`.
    pub fn to_matrix(&self) -> IntersectionMatrix {
        let len = 2 * self.n.saturating_sub(1);
        let rows = if len == 0 {
            vec![Vec::new(); self.n]
        } else {
            self.cells.chunks(len).map(|c| c.to_vec()).collect()
        };
        IntersectionMatrix::from_cells_default(rows)
    }

    /// `.psm` text with a `# canonical` header.
    pub fn to_psm(&self) -> String {
        crate::format::to_psm_with_comments(&self.to_matrix(), &["canonical".to_string()])
    }

    pub(crate) fn from_flat(n: usize, cells: Vec<Cell>) -> Self {
        CanonicalForm { n, cells }
    }
}

impl fmt::Display for CanonicalForm {
    /// Single-line encoding, rows separated by `|`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.to_matrix();
        let s = m
            .rows()
            .iter()
            .map(|(_, row)| row.iter().map(|e| e.to_string()).join(" "))
            .join(" | ");
        write!(f, "n{} {}", self.n, s)
    }
}

static PERMUTATIONS: [OnceLock<Vec<Vec<u8>>>; MAX_CANONICAL_CURVES + 1] =
    [const { OnceLock::new() }; MAX_CANONICAL_CURVES + 1];

/// All permutations of `0..n` as image tables, in lexicographic order.
pub(crate) fn permutations(n: usize) -> &'static [Vec<u8>] {
    PERMUTATIONS[n].get_or_init(|| (0..n as u8).permutations(n).collect::<Vec<_>>())
}

/// Writes relabelled row `row` (old indices mapped through `image`) into
/// `out`, rotated to start at its minimum.
#[inline]
fn write_row(row: &[Cell], image: &[u8], out: &mut [Cell]) {
    let len = row.len();
    let mut min_pos = 0;
    let mut min = Cell(u16::MAX);
    for (p, c) in row.iter().enumerate() {
        let m = c.with_index(image[c.index()] as usize);
        if m < min {
            min = m;
            min_pos = p;
        }
    }
    for t in 0..len {
        let c = row[(min_pos + t) % len];
        out[t] = c.with_index(image[c.index()] as usize);
    }
}

/// Search state shared by the canonical-form and canonicity routines.
struct Search<'a> {
    rows: &'a [Vec<Cell>],
    n: usize,
    len: usize,
}

impl Search<'_> {
    /// Compares the encoding under `image` with `best` row by row, writing it
    /// into `scratch`. Stops at the first row that is larger.
    fn compare(
        &self,
        image: &[u8],
        inverse: &mut [usize],
        best: &[Cell],
        scratch: &mut [Cell],
    ) -> Ordering {
        for (old, new) in image.iter().enumerate() {
            inverse[*new as usize] = old;
        }
        let mut ord = Ordering::Equal;
        for (t, old) in inverse.iter().enumerate().take(self.n) {
            let seg = &mut scratch[t * self.len..(t + 1) * self.len];
            write_row(&self.rows[*old], image, seg);
            if ord == Ordering::Equal {
                ord = (*seg).cmp(&best[t * self.len..(t + 1) * self.len]);
                if ord == Ordering::Greater {
                    return ord;
                }
            }
        }
        ord
    }
}

pub(crate) fn canonical_cells(rows: &[Vec<Cell>]) -> Vec<Cell> {
    let n = rows.len();
    let len = 2 * n.saturating_sub(1);
    let total = n * len;
    let search = Search { rows, n, len };
    let mut best = [Cell(u16::MAX); MAX_CELLS];
    let mut scratch = [Cell(0); MAX_CELLS];
    let mut inverse = [0usize; MAX_CANONICAL_CURVES];
    for image in permutations(n) {
        if search.compare(
            image,
            &mut inverse[..n],
            &best[..total],
            &mut scratch[..total],
        ) == Ordering::Less
        {
            best[..total].copy_from_slice(&scratch[..total]);
        }
    }
    best[..total].to_vec()
}

/// `true` iff `rows` (on indices `0..n`, every row starting at its minimal
/// cell) already is its own canonical form.
pub(crate) fn is_canonical(rows: &[Vec<Cell>]) -> bool {
    let n = rows.len();
    let len = 2 * n.saturating_sub(1);
    let total = n * len;
    let mut current = [Cell(0); MAX_CELLS];
    for (t, row) in rows.iter().enumerate() {
        current[t * len..(t + 1) * len].copy_from_slice(row);
    }
    let search = Search { rows, n, len };
    let mut scratch = [Cell(0); MAX_CELLS];
    let mut inverse = [0usize; MAX_CANONICAL_CURVES];
    permutations(n).iter().all(|image| {
        search.compare(
            image,
            &mut inverse[..n],
            &current[..total],
            &mut scratch[..total],
        ) != Ordering::Less
    })
}

/// Partial canonicity test for the first `prefix.len()` rows of an
/// `n`-matrix (rows normalized). Fails iff some relabelling whose first `m`
/// target rows all come from the prefix already encodes them smaller, which
/// rules out every completion.
pub(crate) fn prefix_may_be_canonical(prefix: &[&[Cell]], n: usize) -> bool {
    let r = prefix.len();
    let len = 2 * n.saturating_sub(1);
    let mut seg = [Cell(0); 2 * (MAX_CANONICAL_CURVES - 1)];
    let mut inverse = [0usize; MAX_CANONICAL_CURVES];
    permutations(n).iter().all(|image| {
        for (old, new) in image.iter().enumerate() {
            inverse[*new as usize] = old;
        }
        for t in 0..n {
            let old = inverse[t];
            if old >= r {
                return true;
            }
            write_row(prefix[old], image, &mut seg[..len]);
            match seg[..len].cmp(prefix[t]) {
                Ordering::Less => return false,
                Ordering::Greater => return true,
                Ordering::Equal => {}
            }
        }
        true
    })
}

pub(crate) fn canonical_of_rows(rows: &[Vec<Cell>]) -> CanonicalForm {
    CanonicalForm::from_flat(rows.len(), canonical_cells(rows))
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_CANONICAL_CURVES {
        return Err(Error::Capability(format!(
            "canonical forms are limited to {MAX_CANONICAL_CURVES} curves, got {n}"
        )));
    }
    Ok(())
}

pub fn canonical_form(matrix: &IntersectionMatrix) -> Result<CanonicalForm> {
    check_size(matrix.n())?;
    Ok(canonical_of_rows(matrix.cells()))
}

/// The permutation (original label to canonical label) realising the
/// canonical form.
pub fn canonical_labelling(matrix: &IntersectionMatrix) -> Result<Vec<(Label, Label)>> {
    let form = canonical_form(matrix)?;
    let target = form.to_matrix();
    for image in permutations(matrix.n()) {
        let img: Vec<usize> = image.iter().map(|x| *x as usize).collect();
        let relabelled =
            IntersectionMatrix::from_cells_default(matrix.permute_indices(&img).cells().to_vec());
        if relabelled == target {
            return Ok(matrix
                .labels()
                .iter()
                .zip(&img)
                .map(|(l, t)| (*l, *t as Label + 1))
                .collect());
        }
    }
    unreachable!("canonical form is attained by some permutation")
}

pub fn are_isomorphic(a: &IntersectionMatrix, b: &IntersectionMatrix) -> Result<bool> {
    if a.n() != b.n() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_matrix;
    use crate::matrix::LabelPermutation;

    fn m_delta() -> IntersectionMatrix {
        parse_matrix("n 3\n1: +2 +3 -2 -3\n2: -1 +3 +1 -3\n3: -1 -2 +1 +2").unwrap()
    }

    #[test]
    fn invariant_under_all_relabellings() {
        let a = m_delta();
        let c = canonical_form(&a).unwrap();
        for image in permutations(3) {
            let p = LabelPermutation::new((1..=3).map(|l| (l, image[l as usize - 1] as Label + 1)))
                .unwrap();
            let b = a.relabel(&p).unwrap().rotate_row(2, 1).unwrap();
            assert_eq!(canonical_form(&b).unwrap(), c);
        }
    }

    #[test]
    fn canonical_matrix_is_canonical() {
        let c = canonical_form(&m_delta()).unwrap();
        let m = c.to_matrix();
        assert!(is_canonical(m.cells()));
        assert_eq!(canonical_form(&m).unwrap(), c);
        assert!(are_isomorphic(&m, &m_delta()).unwrap());
    }

    #[test]
    fn labelling_maps_onto_form() {
        let a = m_delta().rotate_row(1, 1).unwrap();
        let pairs = canonical_labelling(&a).unwrap();
        let p = LabelPermutation::new(pairs).unwrap();
        assert_eq!(
            a.relabel(&p).unwrap(),
            canonical_form(&a).unwrap().to_matrix()
        );
    }

    #[test]
    fn size_mismatch_is_not_isomorphic() {
        let m2 = parse_matrix("n 2\n1: +2 -2\n2: -1 +1").unwrap();
        assert!(!are_isomorphic(&m2, &m_delta()).unwrap());
    }

    #[test]
    fn rejects_large_inputs() {
        let n = 9u32;
        let rows = (1..=n)
            .map(|i| {
                let row = (1..=n)
                    .filter(|k| *k != i)
                    .flat_map(|k| {
                        [
                            crate::matrix::SignedEntry::plus(k),
                            crate::matrix::SignedEntry::minus(k),
                        ]
                    })
                    .collect();
                (i, row)
            })
            .collect();
        let m = IntersectionMatrix::new(rows).unwrap();
        assert!(matches!(canonical_form(&m), Err(Error::Capability(_))));
    }

    #[test]
    fn display_is_single_line() {
        let c = canonical_form(&m_delta()).unwrap();
        let s = c.to_string();
        assert!(s.starts_with("n3 "));
        assert!(!s.contains('\n'));
        assert!(c.to_psm().starts_with("# canonical\nn 3\n"));
    }
}
