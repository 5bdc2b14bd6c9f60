#![allow(dead_code)]

use pscirc::{parse_matrix, IntersectionMatrix, Label, LabelPermutation, SignedEntry};
use rand::seq::SliceRandom;
use rand::Rng;

pub const M2: &str = "n 2\n1: +2 -2\n2: -1 +1\n";
pub const M_DELTA: &str = "n 3\n1: +2 +3 -2 -3\n2: -1 +3 +1 -3\n3: -1 -2 +1 +2\n";
pub const M_BAD: &str = "n 3\n1: +2 -3 -2 +3\n2: -1 +3 +1 -3\n3: -1 -2 +1 +2\n";
pub const TORUS_QUAD: &str = include_str!("../fixtures/torus_quad.psm");

pub fn m2() -> IntersectionMatrix {
    parse_matrix(M2).unwrap()
}

pub fn m_delta() -> IntersectionMatrix {
    parse_matrix(M_DELTA).unwrap()
}

pub fn m_bad() -> IntersectionMatrix {
    parse_matrix(M_BAD).unwrap()
}

pub fn torus_quad() -> IntersectionMatrix {
    parse_matrix(TORUS_QUAD).unwrap()
}

/// Uniformly shuffled rows on labels `1..=n`.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> IntersectionMatrix {
    let n = n as Label;
    let rows = (1..=n)
        .map(|i| {
            let mut row: Vec<SignedEntry> = (1..=n)
                .filter(|k| *k != i)
                .flat_map(|k| [SignedEntry::plus(k), SignedEntry::minus(k)])
                .collect();
            row.shuffle(rng);
            (i, row)
        })
        .collect();
    IntersectionMatrix::new(rows).unwrap()
}

/// Swaps two distinct positions of one row.
pub fn transpose<R: Rng>(rng: &mut R, m: &IntersectionMatrix) -> IntersectionMatrix {
    let mut rows = m.rows();
    let r = rng.gen_range(0..rows.len());
    let len = rows[r].1.len();
    let a = rng.gen_range(0..len);
    let mut b = rng.gen_range(0..len - 1);
    if b >= a {
        b += 1;
    }
    rows[r].1.swap(a, b);
    IntersectionMatrix::new(rows).unwrap()
}

pub fn random_permutation<R: Rng>(rng: &mut R, labels: &[Label]) -> LabelPermutation {
    let mut image = labels.to_vec();
    image.shuffle(rng);
    LabelPermutation::new(labels.iter().copied().zip(image)).unwrap()
}

/// Relabels with a random permutation and rotates every row randomly.
pub fn scramble<R: Rng>(rng: &mut R, m: &IntersectionMatrix) -> IntersectionMatrix {
    let p = random_permutation(rng, m.labels());
    let mut out = m.relabel(&p).unwrap();
    for l in out.labels().to_vec() {
        let k = rng.gen_range(0..out.row_len().max(1));
        out = out.rotate_row(l, k).unwrap();
    }
    out
}
