//! Subarrangement-based analysis: quad profiles, isomorphism through labelled
//! 4-submatrices, sphere embeddability through 4-submatrices, uniform
//! oriented matroid recognition and the classification of 3-arrangements.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;
use serde::Serialize;

use crate::canonical::{canonical_form, canonical_of_rows, CanonicalForm};
use crate::consistency::{check_consistency, rows_consistent};
use crate::embedding::{self, rows_genus, EmbeddedGraph, GenusScratch};
use crate::error::{Error, Result};
use crate::matrix::{normalize_row, Cell, IntersectionMatrix, Label};

/// Canonical forms of all 4-submatrices, keyed by label subset.
///
/// Two profiles compare equal when their multisets of forms agree; the keys
/// are informational.
#[derive(Debug, Clone)]
pub struct QuadProfile {
    entries: Vec<(Vec<Label>, CanonicalForm)>,
}

impl QuadProfile {
    pub fn entries(&self) -> &[(Vec<Label>, CanonicalForm)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorted multiset of the forms.
    pub fn multiset(&self) -> Vec<CanonicalForm> {
        self.entries
            .iter()
            .map(|(_, f)| f.clone())
            .sorted()
            .collect()
    }

    /// Sorted list of single-line canonical-form strings.
    pub fn export(&self) -> Vec<String> {
        self.multiset().iter().map(|f| f.to_string()).collect()
    }
}

impl PartialEq for QuadProfile {
    fn eq(&self, other: &Self) -> bool {
        self.multiset() == other.multiset()
    }
}

impl Eq for QuadProfile {}

pub fn quad_profile(matrix: &IntersectionMatrix) -> Result<QuadProfile> {
    if matrix.n() < 4 {
        return Err(Error::TooFewCurves {
            needed: 4,
            actual: matrix.n(),
        });
    }
    let entries = (0..matrix.n())
        .combinations(4)
        .map(|idxs| {
            let sub = matrix.sub_by_indices(&idxs);
            let labels = sub.labels().to_vec();
            (labels, canonical_of_rows(sub.cells()))
        })
        .collect();
    Ok(QuadProfile { entries })
}

/// Outcome of the labelled 4-subarrangement isomorphism test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadIsomorphism {
    pub isomorphic: bool,
    /// Set when an input is inconsistent: the answer is then computed the
    /// same way but carries no guarantee.
    pub advisory: bool,
    /// Label bijection from the first matrix onto the second, when found.
    pub bijection: Option<Vec<(Label, Label)>>,
}

/// 4-submatrices of `matrix` keyed by index bitmask. Rows keep the global
/// indices, each rotated to start at its minimum.
fn labelled_quads(matrix: &IntersectionMatrix) -> BTreeMap<u64, ([usize; 4], Vec<Vec<Cell>>)> {
    (0..matrix.n())
        .combinations(4)
        .map(|idxs| {
            let mask = idxs.iter().fold(0u64, |m, i| m | 1 << i);
            let rows = idxs
                .iter()
                .map(|r| {
                    matrix.cells()[*r]
                        .iter()
                        .filter(|c| mask & (1 << c.index()) != 0)
                        .copied()
                        .collect()
                })
                .collect();
            (mask, ([idxs[0], idxs[1], idxs[2], idxs[3]], rows))
        })
        .collect()
}

struct QuadMatcher {
    n: usize,
    quads_a: BTreeMap<u64, ([usize; 4], Vec<Vec<Cell>>)>,
    quads_b: BTreeMap<u64, ([usize; 4], Vec<Vec<Cell>>)>,
}

impl QuadMatcher {
    /// Checks the labelled 4-submatrix of A on `subset` against B's on the
    /// image subset, under the partial bijection `image`.
    fn quad_matches(&self, subset: &[usize], image: &[usize]) -> bool {
        let mask_a = subset.iter().fold(0u64, |m, i| m | 1 << i);
        let mask_b = subset.iter().fold(0u64, |m, i| m | 1 << image[*i]);
        let (idx_a, rows_a) = &self.quads_a[&mask_a];
        let (idx_b, rows_b) = &self.quads_b[&mask_b];
        idx_a.iter().zip(rows_a).all(|(r, row)| {
            let mut mapped: Vec<Cell> =
                row.iter().map(|c| c.with_index(image[c.index()])).collect();
            normalize_row(&mut mapped);
            let mut target = rows_b[idx_b
                .iter()
                .position(|x| *x == image[*r])
                .expect("in subset")]
            .clone();
            normalize_row(&mut target);
            mapped == target
        })
    }

    fn extend(&self, image: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let t = image.len();
        if t == self.n {
            return true;
        }
        for candidate in 0..self.n {
            if used[candidate] {
                continue;
            }
            image.push(candidate);
            used[candidate] = true;
            let ok = t < 3
                || (0..t).combinations(3).all(|mut s| {
                    s.push(t);
                    self.quad_matches(&s, image)
                });
            if ok && self.extend(image, used) {
                return true;
            }
            image.pop();
            used[candidate] = false;
        }
        false
    }
}

/// Decides isomorphism by searching for a label bijection under which every
/// labelled 4-submatrix of `a` equals the corresponding one of `b`.
///
/// The whole matrices are never compared; only 4-submatrices are. Quad
/// profiles (unlabelled multisets) are compared first as a filter.
pub fn iso_via_quads(a: &IntersectionMatrix, b: &IntersectionMatrix) -> Result<QuadIsomorphism> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    if a.n() < 4 {
        return Err(Error::TooFewCurves {
            needed: 4,
            actual: a.n(),
        });
    }
    if a.n() > 64 {
        return Err(Error::Capability("at most 64 curves".to_string()));
    }
    let advisory = !check_consistency(a).is_consistent() || !check_consistency(b).is_consistent();
    let no = QuadIsomorphism {
        isomorphic: false,
        advisory,
        bijection: None,
    };
    if quad_profile(a)? != quad_profile(b)? {
        return Ok(no);
    }
    let matcher = QuadMatcher {
        n: a.n(),
        quads_a: labelled_quads(a),
        quads_b: labelled_quads(b),
    };
    let mut image = Vec::with_capacity(a.n());
    let mut used = vec![false; a.n()];
    if matcher.extend(&mut image, &mut used) {
        let bijection = image
            .iter()
            .enumerate()
            .map(|(i, t)| (a.labels()[i], b.labels()[*t]))
            .collect();
        Ok(QuadIsomorphism {
            isomorphic: true,
            advisory,
            bijection: Some(bijection),
        })
    } else {
        Ok(no)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SphereByQuads {
    pub embeddable: bool,
    /// First (lexicographic) label subset whose submatrix is not
    /// sphere-embeddable. For fewer than four curves this is the whole label
    /// set.
    pub witness: Option<Vec<Label>>,
}

/// Sphere embeddability decided from the 4-submatrices alone.
///
/// The witness is the lexicographically first inconsistent 4-subset if there
/// is one (so an inconsistent matrix always gets a witness holding an
/// inconsistent triple), otherwise the first 4-subset of positive genus.
pub fn is_sphere_embeddable_via_quads(matrix: &IntersectionMatrix) -> SphereByQuads {
    if matrix.n() < 4 {
        let embeddable = embedding::is_sphere_embeddable_direct(matrix);
        return SphereByQuads {
            embeddable,
            witness: (!embeddable).then(|| matrix.labels().to_vec()),
        };
    }
    let mut scratch = GenusScratch::default();
    let mut first = None;
    for idxs in (0..matrix.n()).combinations(4) {
        let sub = matrix.sub_by_indices(&idxs);
        if rows_genus(sub.cells(), &mut scratch) == 0 {
            continue;
        }
        if !rows_consistent(sub.cells()) {
            first = Some(sub.labels().to_vec());
            break;
        }
        first.get_or_insert_with(|| sub.labels().to_vec());
    }
    SphereByQuads {
        embeddable: first.is_none(),
        witness: first,
    }
}

/// `true` iff every row is antipodal: position `p + n - 1` holds the negation
/// of position `p`. Row rotation does not affect this.
pub(crate) fn rows_antipodal(rows: &[Vec<Cell>]) -> bool {
    rows.iter().all(|row| {
        let half = row.len() / 2;
        (0..half).all(|p| row[p + half] == row[p].negated())
    })
}

/// Index of the first row that is not antipodal, if any.
pub fn first_non_antipodal_row(matrix: &IntersectionMatrix) -> Option<Label> {
    matrix
        .cells()
        .iter()
        .position(|row| !rows_antipodal(std::slice::from_ref(row)))
        .map(|i| matrix.labels()[i])
}

pub(crate) fn rows_uniform_oriented_matroid(rows: &[Vec<Cell>]) -> bool {
    rows_antipodal(rows) && rows_consistent(rows)
}

/// Recognizes matrices of uniform rank-3 oriented matroids: every row is
/// antipodal (`±k` at position `p` iff `∓k` at position `p + n - 1`) and
/// the matrix is consistent.
///
/// The positional condition alone admits inconsistent matrices (for instance
/// a 3-matrix whose first row is `+2 -3 -2 +3` with the other two rows of the
/// symmetric Venn arrangement), which are not representable on the sphere, so
/// consistency is required as well.
pub fn is_uniform_oriented_matroid(matrix: &IntersectionMatrix) -> bool {
    rows_uniform_oriented_matroid(matrix.cells())
}

/// Isomorphism types of consistent 3-arrangements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TripleType {
    Alpha,
    Beta,
    Gamma,
    Delta,
    Epsilon,
}

impl fmt::Display for TripleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TripleType::Alpha => "alpha",
            TripleType::Beta => "beta",
            TripleType::Gamma => "gamma",
            TripleType::Delta => "delta",
            TripleType::Epsilon => "epsilon",
        })
    }
}

/// The five reference classes of consistent 3-matrices.
///
/// * `Delta` is the only class mapped to itself by all eight reorientations.
/// * The other four form one reorientation orbit. `Epsilon` is the member
///   with no face outside all three curves (it cannot be drawn in the plane
///   with every curve counterclockwise), `Alpha` is `Epsilon` with all three
///   curves reversed, and `Beta`, `Gamma` are the remaining two in ascending
///   canonical order. The `Beta`/`Gamma` assignment is a naming convention.
pub fn triple_reference() -> &'static BTreeMap<CanonicalForm, TripleType> {
    static REFERENCE: OnceLock<BTreeMap<CanonicalForm, TripleType>> = OnceLock::new();
    REFERENCE.get_or_init(build_triple_reference)
}

fn build_triple_reference() -> BTreeMap<CanonicalForm, TripleType> {
    let classes: Vec<CanonicalForm> = crate::enumerate::raw_matrices(3)
        .filter(|rows| rows_consistent(rows))
        .map(|rows| canonical_of_rows(&rows))
        .sorted()
        .dedup()
        .collect();
    assert_eq!(classes.len(), 5, "consistent 3-classes");

    let orbit = |f: &CanonicalForm| -> Vec<CanonicalForm> {
        let m = f.to_matrix();
        (0..8u64)
            .map(|mask| canonical_of_rows(m.reorient_mask(mask).cells()))
            .sorted()
            .dedup()
            .collect()
    };
    let (delta, rest): (Vec<_>, Vec<_>) =
        classes.iter().cloned().partition(|f| orbit(f).len() == 1);
    assert_eq!(delta.len(), 1, "exactly one reorientation-closed class");

    let no_outer_face = |f: &CanonicalForm| {
        let g = EmbeddedGraph::build(&f.to_matrix());
        let faces = g.trace_faces();
        let inside = g.face_containment(&faces).expect("genus 0");
        !inside.iter().any(|sides| sides.iter().all(|s| !s))
    };
    let eps: Vec<_> = rest.iter().filter(|f| no_outer_face(f)).cloned().collect();
    assert_eq!(eps.len(), 1, "exactly one class without an outer face");
    let eps = eps.into_iter().next().expect("one");
    let alpha = canonical_of_rows(eps.to_matrix().reorient_all().cells());
    assert_ne!(alpha, eps);

    let mut others = rest.iter().filter(|f| **f != eps && **f != alpha).cloned();
    let beta = others.next().expect("beta");
    let gamma = others.next().expect("gamma");

    BTreeMap::from([
        (alpha, TripleType::Alpha),
        (beta, TripleType::Beta),
        (gamma, TripleType::Gamma),
        (delta[0].clone(), TripleType::Delta),
        (eps, TripleType::Epsilon),
    ])
}

/// Classifies a consistent 3-matrix.
pub fn classify_triple(matrix: &IntersectionMatrix) -> Result<TripleType> {
    if matrix.n() != 3 {
        return Err(Error::Precondition(format!(
            "classification needs exactly 3 curves, got {}",
            matrix.n()
        )));
    }
    if !check_consistency(matrix).is_consistent() {
        return Err(Error::Precondition("matrix is inconsistent".to_string()));
    }
    let form = canonical_form(matrix)?;
    Ok(*triple_reference()
        .get(&form)
        .expect("every consistent 3-class is a reference class"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_matrix;
    use crate::matrix::LabelPermutation;

    fn m_delta() -> IntersectionMatrix {
        parse_matrix("n 3\n1: +2 +3 -2 -3\n2: -1 +3 +1 -3\n3: -1 -2 +1 +2").unwrap()
    }

    fn m_bad() -> IntersectionMatrix {
        parse_matrix("n 3\n1: +2 -3 -2 +3\n2: -1 +3 +1 -3\n3: -1 -2 +1 +2").unwrap()
    }

    #[test]
    fn delta_classifies_as_delta() {
        assert_eq!(classify_triple(&m_delta()).unwrap(), TripleType::Delta);
        assert_eq!(
            classify_triple(&m_delta().reorient_all()).unwrap(),
            TripleType::Delta
        );
        for mask in 0..8 {
            assert_eq!(
                classify_triple(&m_delta().reorient_mask(mask)).unwrap(),
                TripleType::Delta
            );
        }
    }

    #[test]
    fn alpha_and_epsilon_are_inside_out() {
        for (form, ty) in triple_reference() {
            let flipped = classify_triple(&form.to_matrix().reorient_all()).unwrap();
            match ty {
                TripleType::Alpha => assert_eq!(flipped, TripleType::Epsilon),
                TripleType::Epsilon => assert_eq!(flipped, TripleType::Alpha),
                TripleType::Delta => assert_eq!(flipped, TripleType::Delta),
                _ => assert_ne!(flipped, TripleType::Delta),
            }
        }
    }

    #[test]
    fn classify_rejects_bad_input() {
        assert!(classify_triple(&m_bad()).is_err());
        let m2 = parse_matrix("n 2\n1: +2 -2\n2: -1 +1").unwrap();
        assert!(classify_triple(&m2).is_err());
    }

    #[test]
    fn om_recognizer() {
        assert!(is_uniform_oriented_matroid(&m_delta()));
        let m2 = parse_matrix("n 2\n1: +2 -2\n2: -1 +1").unwrap();
        assert!(is_uniform_oriented_matroid(&m2));
        assert!(!is_uniform_oriented_matroid(&m_bad()));
        // positional condition holds on every row of the inconsistent matrix
        assert_eq!(first_non_antipodal_row(&m_bad()), None);
        let rotated = m_delta().rotate_row(1, 1).unwrap();
        assert!(is_uniform_oriented_matroid(&rotated));
    }

    #[test]
    fn quads_need_four_curves() {
        assert!(quad_profile(&m_delta()).is_err());
        assert!(iso_via_quads(&m_delta(), &m_delta()).is_err());
        let small = is_sphere_embeddable_via_quads(&m_bad());
        assert!(!small.embeddable);
        assert_eq!(small.witness, Some(vec![1, 2, 3]));
    }

    fn four_circles() -> IntersectionMatrix {
        use crate::geom::{matrix_from_circles, Circle, CircleArrangement};
        let c = |x, y, r| Circle::new(x, y, r);
        let arr = CircleArrangement::new(vec![
            (1, c(0.0, 0.0, 1.0)),
            (2, c(1.0, 0.1, 1.1)),
            (3, c(0.4, 0.9, 0.9)),
            (4, c(0.5, -0.3, 1.2)),
        ]);
        matrix_from_circles(&arr).unwrap()
    }

    #[test]
    fn quad_profile_of_four_curves_is_its_form() {
        let m = four_circles();
        let p = quad_profile(&m).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.multiset(), vec![canonical_form(&m).unwrap()]);
        assert_eq!(p.export().len(), 1);
    }

    #[test]
    fn iso_via_quads_finds_relabelling() {
        let m = four_circles();
        let p = LabelPermutation::cycle(m.labels(), &[1, 3, 2, 4]).unwrap();
        let r = iso_via_quads(&m, &m.relabel(&p).unwrap()).unwrap();
        assert!(r.isomorphic);
        assert!(!r.advisory);
        assert_eq!(r.bijection.unwrap().len(), 4);
    }
}
