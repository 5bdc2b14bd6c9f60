//! Exhaustive enumeration of intersection matrices for small `n`, one
//! representative per isomorphism class (relabelling and row rotation).
//!
//! Every row is generated in its normalized rotation (minimal entry first),
//! so a matrix is a tuple of normalized rows and the search only emits tuples
//! that equal their own canonical form. Two sound prunings cut the tree:
//!
//! * the first row of a canonical form is the least relabelled row of the
//!   matrix, so a partial matrix is dropped as soon as some chosen row can be
//!   relabelled into something smaller than row 1;
//! * for filters that imply consistency, every pair of chosen rows is checked
//!   against every arc label (the consistency condition for a triple only
//!   reads the two rows it compares).
//!
//! The forest is split into shards by the choices for rows 1 and 2; shards
//! run in parallel and their results are merged by canonical form, so the
//! output does not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::rows_antipodal;
use crate::canonical::{
    canonical_of_rows, is_canonical, permutations, prefix_may_be_canonical, CanonicalForm,
};
use crate::consistency::{in_arc, rows_consistent};
use crate::embedding::{rows_genus, GenusScratch};
use crate::error::{Error, Result};
use crate::matrix::{normalize_row, Cell, IntersectionMatrix};

/// Largest `n` enumerated by default.
pub const MAX_EXHAUSTIVE_N: usize = 4;
/// Largest `n` accepted with the long-running flag.
pub const MAX_LONG_RUNNING_N: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusFilter {
    All,
    Consistent,
    Genus0,
    Om,
}

impl CensusFilter {
    fn implies_consistency(self) -> bool {
        !matches!(self, CensusFilter::All)
    }
}

impl fmt::Display for CensusFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CensusFilter::All => "all",
            CensusFilter::Consistent => "consistent",
            CensusFilter::Genus0 => "genus0",
            CensusFilter::Om => "om",
        })
    }
}

impl FromStr for CensusFilter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "all" => Ok(CensusFilter::All),
            "consistent" => Ok(CensusFilter::Consistent),
            "genus0" => Ok(CensusFilter::Genus0),
            "om" => Ok(CensusFilter::Om),
            _ => Err(format!(
                "unknown filter `{s}` (all, consistent, genus0, om)"
            )),
        }
    }
}

/// One isomorphism class found by the census.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusEntry {
    pub form: CanonicalForm,
    pub n: usize,
    pub genus: usize,
    pub consistent: bool,
    pub om: bool,
}

impl CensusEntry {
    pub(crate) fn from_rows(rows: &[Vec<Cell>], scratch: &mut GenusScratch) -> CensusEntry {
        let consistent = rows_consistent(rows);
        CensusEntry {
            form: canonical_of_rows(rows),
            n: rows.len(),
            genus: rows_genus(rows, scratch),
            consistent,
            om: consistent && rows_antipodal(rows),
        }
    }

    fn from_canonical_rows(rows: Vec<Vec<Cell>>, scratch: &mut GenusScratch) -> CensusEntry {
        let consistent = rows_consistent(&rows);
        CensusEntry {
            n: rows.len(),
            genus: rows_genus(&rows, scratch),
            consistent,
            om: consistent && rows_antipodal(&rows),
            form: CanonicalForm::from_flat(rows.len(), rows.concat()),
        }
    }

    pub fn matrix(&self) -> IntersectionMatrix {
        self.form.to_matrix()
    }

    fn passes(&self, filter: CensusFilter) -> bool {
        match filter {
            CensusFilter::All => true,
            CensusFilter::Consistent => self.consistent,
            CensusFilter::Genus0 => self.genus == 0,
            CensusFilter::Om => self.om,
        }
    }

    /// `.psm` block with `genus`, `consistent` and `om` header comments.
    pub fn to_psm(&self) -> String {
        let yes = |b: bool| if b { "yes" } else { "no" };
        crate::format::to_psm_with_comments(
            &self.matrix(),
            &[
                format!("genus: {}", self.genus),
                format!("consistent: {}", yes(self.consistent)),
                format!("om: {}", yes(self.om)),
            ],
        )
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CensusOptions {
    /// Permits `n = 5`, which takes a long time.
    pub allow_long_running: bool,
    /// Disables the consistency pruning (the symmetry pruning stays on).
    pub disable_consistency_pruning: bool,
}

/// All normalized rows for row index `r` of an `n`-matrix.
pub(crate) fn candidate_rows(n: usize, r: usize) -> Vec<Vec<Cell>> {
    let others: Vec<usize> = (0..n).filter(|k| *k != r).collect();
    if others.is_empty() {
        return vec![Vec::new()];
    }
    let first = Cell::plus(others[0]);
    let rest: Vec<Cell> = others
        .iter()
        .flat_map(|k| [Cell::plus(*k), Cell::minus(*k)])
        .filter(|c| *c != first)
        .collect();
    let len = rest.len();
    rest.into_iter()
        .permutations(len)
        .map(|tail| {
            let mut row = Vec::with_capacity(len + 1);
            row.push(first);
            row.extend(tail);
            row
        })
        .collect()
}

/// Every matrix of size `n` (rows normalized), without any pruning.
pub(crate) fn raw_matrices(n: usize) -> impl Iterator<Item = Vec<Vec<Cell>>> {
    (0..n)
        .map(|r| candidate_rows(n, r))
        .multi_cartesian_product()
}

/// Least relabelling of `row` (row index `r`) that sends `r` to index 0.
fn least_relabelled_row(n: usize, r: usize, row: &[Cell]) -> Vec<Cell> {
    let mut best: Option<Vec<Cell>> = None;
    for image in permutations(n).iter().filter(|img| img[r] == 0) {
        let mut mapped: Vec<Cell> = row
            .iter()
            .map(|c| c.with_index(image[c.index()] as usize))
            .collect();
        normalize_row(&mut mapped);
        if best.as_ref().is_none_or(|b| mapped < *b) {
            best = Some(mapped);
        }
    }
    best.unwrap_or_default()
}

struct Candidate {
    row: Vec<Cell>,
    least: Vec<Cell>,
    pos: Vec<usize>,
}

struct Space {
    n: usize,
    len: usize,
    filter: CensusFilter,
    prune_consistency: bool,
    candidates: Vec<Vec<Candidate>>,
}

#[inline]
fn slot(n: usize, c: Cell) -> usize {
    c.index() + if c.is_minus() { n } else { 0 }
}

impl Space {
    fn new(n: usize, filter: CensusFilter, prune_consistency: bool) -> Space {
        let len = 2 * n.saturating_sub(1);
        let candidates = (0..n)
            .map(|r| {
                candidate_rows(n, r)
                    .into_iter()
                    .filter(|row| {
                        filter != CensusFilter::Om || rows_antipodal(std::slice::from_ref(row))
                    })
                    .map(|row| {
                        let mut pos = vec![usize::MAX; 2 * n];
                        for (p, c) in row.iter().enumerate() {
                            pos[slot(n, *c)] = p;
                        }
                        Candidate {
                            least: least_relabelled_row(n, r, &row),
                            row,
                            pos,
                        }
                    })
                    .collect()
            })
            .collect();
        Space {
            n,
            len,
            filter,
            prune_consistency,
            candidates,
        }
    }

    /// Consistency of the pair of rows `(k, i)` for every arc label.
    fn pair_consistent(&self, k: usize, ck: &Candidate, i: usize, ci: &Candidate) -> bool {
        let n = self.n;
        (0..n).filter(|j| *j != k && *j != i).all(|j| {
            let (ks, ke) = (
                ck.pos[slot(n, Cell::plus(j))],
                ck.pos[slot(n, Cell::minus(j))],
            );
            let (is, ie) = (
                ci.pos[slot(n, Cell::plus(j))],
                ci.pos[slot(n, Cell::minus(j))],
            );
            [false, true].iter().all(|minus| {
                let at_k = ck.pos[slot(n, Cell::new(i, *minus))];
                let at_i = ci.pos[slot(n, Cell::new(k, !*minus))];
                in_arc(self.len, ks, ke, at_k) == in_arc(self.len, is, ie, at_i)
            })
        })
    }

    /// Can candidate `c` be placed as row `r` after `chosen`?
    fn admissible(&self, chosen: &[usize], r: usize, c: usize) -> bool {
        let cand = &self.candidates[r][c];
        if r == 0 {
            if cand.least != cand.row {
                return false;
            }
        } else if cand.least < self.candidates[0][chosen[0]].row {
            return false;
        }
        if self.prune_consistency
            && !chosen
                .iter()
                .enumerate()
                .all(|(k, ck)| self.pair_consistent(k, &self.candidates[k][*ck], r, cand))
        {
            return false;
        }
        let mut prefix: [&[Cell]; MAX_LONG_RUNNING_N] = [&[]; MAX_LONG_RUNNING_N];
        for (k, ck) in chosen.iter().enumerate() {
            prefix[k] = &self.candidates[k][*ck].row;
        }
        prefix[r] = &cand.row;
        prefix_may_be_canonical(&prefix[..=r], self.n)
    }

    fn search(
        &self,
        chosen: &mut Vec<usize>,
        emit: &mut dyn FnMut(CensusEntry),
        scratch: &mut GenusScratch,
    ) {
        let r = chosen.len();
        if r == self.n {
            let rows: Vec<Vec<Cell>> = chosen
                .iter()
                .enumerate()
                .map(|(k, c)| self.candidates[k][*c].row.clone())
                .collect();
            // a full prefix that survived the partial test is canonical
            debug_assert!(is_canonical(&rows));
            if self.filter.implies_consistency() && !rows_consistent(&rows) {
                return;
            }
            let entry = CensusEntry::from_canonical_rows(rows, scratch);
            if entry.passes(self.filter) {
                emit(entry);
            }
            return;
        }
        for c in 0..self.candidates[r].len() {
            if self.admissible(chosen, r, c) {
                chosen.push(c);
                self.search(chosen, emit, scratch);
                chosen.pop();
            }
        }
    }

    fn shards(&self) -> Vec<Vec<usize>> {
        let mut shards = Vec::new();
        for c0 in 0..self.candidates[0].len() {
            if !self.admissible(&[], 0, c0) {
                continue;
            }
            if self.n < 2 {
                shards.push(vec![c0]);
                continue;
            }
            for c1 in 0..self.candidates[1].len() {
                if self.admissible(&[c0], 1, c1) {
                    shards.push(vec![c0, c1]);
                }
            }
        }
        shards
    }
}

fn check_range(n: usize, options: CensusOptions) -> Result<()> {
    let max = if options.allow_long_running {
        MAX_LONG_RUNNING_N
    } else {
        MAX_EXHAUSTIVE_N
    };
    if !(2..=max).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "census size {n} not in 2..={max}{}",
            if options.allow_long_running || n != MAX_LONG_RUNNING_N {
                ""
            } else {
                " (n = 5 needs the long-running flag)"
            }
        )));
    }
    Ok(())
}

/// All isomorphism classes of valid `n`-matrices passing `filter`, in
/// ascending canonical order.
pub fn enumerate_census(n: usize, filter: CensusFilter) -> Result<Vec<CensusEntry>> {
    enumerate_census_with(n, filter, CensusOptions::default())
}

pub fn enumerate_census_with(
    n: usize,
    filter: CensusFilter,
    options: CensusOptions,
) -> Result<Vec<CensusEntry>> {
    let space = prepare(n, filter, options)?;
    let found: Vec<Vec<CensusEntry>> = space
        .shards()
        .into_par_iter()
        .map(|mut prefix| {
            let mut out = Vec::new();
            let mut scratch = GenusScratch::default();
            space.search(&mut prefix, &mut |e| out.push(e), &mut scratch);
            out
        })
        .collect();
    let merged: BTreeMap<CanonicalForm, CensusEntry> = found
        .into_iter()
        .flatten()
        .map(|e| (e.form.clone(), e))
        .collect();
    Ok(merged.into_values().collect())
}

/// Streams every class to `visit` without collecting, in no particular
/// order. Each class is visited exactly once. Returns the class count.
pub fn visit_census<F>(
    n: usize,
    filter: CensusFilter,
    options: CensusOptions,
    visit: F,
) -> Result<usize>
where
    F: Fn(&CensusEntry) + Sync,
{
    let space = prepare(n, filter, options)?;
    let count = space
        .shards()
        .into_par_iter()
        .map(|mut prefix| {
            let mut count = 0;
            let mut scratch = GenusScratch::default();
            space.search(
                &mut prefix,
                &mut |e| {
                    visit(&e);
                    count += 1;
                },
                &mut scratch,
            );
            count
        })
        .sum();
    Ok(count)
}

fn prepare(n: usize, filter: CensusFilter, options: CensusOptions) -> Result<Space> {
    check_range(n, options)?;
    Ok(Space::new(
        n,
        filter,
        filter.implies_consistency() && !options.disable_consistency_pruning,
    ))
}

/// Reference enumeration over the full product of rows with canonical-form
/// deduplication and no pruning. Exponential; meant for `n <= 3`.
pub fn enumerate_census_unpruned(n: usize, filter: CensusFilter) -> Result<Vec<CensusEntry>> {
    if !(2..=3).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "unpruned census size {n} not in 2..=3"
        )));
    }
    let mut scratch = GenusScratch::default();
    let merged: BTreeMap<CanonicalForm, CensusEntry> = raw_matrices(n)
        .map(|rows| CensusEntry::from_rows(&rows, &mut scratch))
        .filter(|e| e.passes(filter))
        .map(|e| (e.form.clone(), e))
        .collect();
    Ok(merged.into_values().collect())
}

/// Group elements acting on classes: optional mirror, then reorientation of
/// the curves set in `mask`.
fn image(form: &CanonicalForm, mirror: bool, mask: u64) -> CanonicalForm {
    let mut m = form.to_matrix();
    if mirror {
        m = m.mirror();
    }
    canonical_of_rows(m.reorient_mask(mask).cells())
}

fn orbits(entries: &[CensusEntry], mirror: bool, reorient: bool) -> Result<Vec<Vec<usize>>> {
    let Some(first) = entries.first() else {
        return Ok(Vec::new());
    };
    let n = first.n;
    if entries.iter().any(|e| e.n != n) {
        return Err(Error::Precondition(
            "entries of different sizes".to_string(),
        ));
    }
    let index: BTreeMap<&CanonicalForm, usize> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (&e.form, i))
        .collect();
    let masks = if reorient { 1u64 << n } else { 1 };
    let mirrors: &[bool] = if mirror { &[false, true] } else { &[false] };
    let mut orbit_of = vec![usize::MAX; entries.len()];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let mut members: Vec<usize> = mirrors
            .iter()
            .flat_map(|m| (0..masks).map(move |mask| (*m, mask)))
            .filter_map(|(m, mask)| index.get(&image(&e.form, m, mask)).copied())
            .sorted()
            .dedup()
            .collect();
        members.retain(|j| orbit_of[*j] == usize::MAX);
        for j in &members {
            orbit_of[*j] = out.len();
        }
        out.push(members);
    }
    Ok(out)
}

/// Partition of `entries` (by index) into reorientation orbits, ordered by
/// smallest member.
pub fn count_reorientation_orbits(entries: &[CensusEntry]) -> Result<Vec<Vec<usize>>> {
    orbits(entries, false, true)
}

/// Class counts under the four candidate equivalences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EquivalenceCounts {
    /// Relabelling and row rotation.
    pub relabel_rotation: usize,
    /// Additionally identifying mirror images.
    pub with_mirror: usize,
    /// Additionally identifying reorientations.
    pub with_reorientation: usize,
    /// Mirror images and reorientations.
    pub with_both: usize,
}

pub fn equivalence_counts(entries: &[CensusEntry]) -> Result<EquivalenceCounts> {
    Ok(EquivalenceCounts {
        relabel_rotation: entries.len(),
        with_mirror: orbits(entries, true, false)?.len(),
        with_reorientation: orbits(entries, false, true)?.len(),
        with_both: orbits(entries, true, true)?.len(),
    })
}

/// Machine-readable census summary.
#[derive(Debug, Clone, Serialize)]
pub struct CensusSummary {
    pub format: &'static str,
    pub n: usize,
    pub filter: CensusFilter,
    pub classes: usize,
    pub consistent: usize,
    pub genus0: usize,
    pub om: usize,
    pub by_genus: BTreeMap<usize, usize>,
    pub equivalence: EquivalenceCounts,
    /// Reorientation orbits as lists of class indices (0-based, census order).
    pub reorientation_orbits: Vec<Vec<usize>>,
}

pub fn summarize(n: usize, filter: CensusFilter, entries: &[CensusEntry]) -> Result<CensusSummary> {
    let mut by_genus = BTreeMap::new();
    for e in entries {
        *by_genus.entry(e.genus).or_insert(0) += 1;
    }
    Ok(CensusSummary {
        format: "pscirc-census/1",
        n,
        filter,
        classes: entries.len(),
        consistent: entries.iter().filter(|e| e.consistent).count(),
        genus0: entries.iter().filter(|e| e.genus == 0).count(),
        om: entries.iter().filter(|e| e.om).count(),
        by_genus,
        equivalence: equivalence_counts(entries)?,
        reorientation_orbits: count_reorientation_orbits(entries)?,
    })
}

/// Census as `.psm` blocks separated by blank lines.
pub fn census_to_psm(n: usize, filter: CensusFilter, entries: &[CensusEntry]) -> String {
    let mut s = format!(
        "{}\n# census n={n} filter={filter} classes={}\n\n",
        crate::format::PSM_VERSION_COMMENT,
        entries.len()
    );
    s.push_str(&entries.iter().map(|e| e.to_psm()).join("\n"));
    s
}
