//! Exhaustive checks over the small censuses.

mod common;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use pscirc::{
    are_isomorphic, build_embedded_graph, canonical_form, census_to_psm, check_consistency,
    classify_triple, count_reorientation_orbits, enumerate_census, enumerate_census_with, genus,
    is_sphere_embeddable_direct, is_sphere_embeddable_via_quads, iso_via_quads, parse_many,
    summarize, visit_census, CanonicalForm, CensusFilter, CensusOptions, IntersectionMatrix, Label,
    SignedEntry, TripleType,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

const FILTERS: [CensusFilter; 4] = [
    CensusFilter::All,
    CensusFilter::Consistent,
    CensusFilter::Genus0,
    CensusFilter::Om,
];

fn long_running() -> CensusOptions {
    CensusOptions {
        allow_long_running: true,
        ..CensusOptions::default()
    }
}

#[test]
fn pruned_search_matches_reference_at_three() {
    for filter in FILTERS {
        let pruned = enumerate_census(3, filter).unwrap();
        let reference = pscirc::enumerate::enumerate_census_unpruned(3, filter).unwrap();
        assert_eq!(pruned, reference, "{filter}");
    }
}

#[test]
fn three_curve_facts() {
    let all = enumerate_census(3, CensusFilter::All).unwrap();
    for e in &all {
        assert_eq!(e.consistent, e.genus == 0, "{}", e.form);
    }
    let spherical = enumerate_census(3, CensusFilter::Genus0).unwrap();
    assert_eq!(
        spherical,
        enumerate_census(3, CensusFilter::Consistent).unwrap()
    );
    let types: BTreeSet<TripleType> = spherical
        .iter()
        .map(|e| classify_triple(&e.matrix()).unwrap())
        .collect();
    assert_eq!(types.len(), 5);
    assert_eq!(classify_triple(&m_delta()).unwrap(), TripleType::Delta);
}

#[test]
fn triple_names_follow_the_convention() {
    let reference = pscirc::triple_reference();
    let of = |t: TripleType| {
        reference
            .iter()
            .find(|(_, v)| **v == t)
            .unwrap()
            .0
            .to_matrix()
    };
    let eps = of(TripleType::Epsilon);
    assert_eq!(
        canonical_form(&eps.reorient_all()).unwrap(),
        canonical_form(&of(TripleType::Alpha)).unwrap()
    );
    // epsilon has no face lying outside all three curves
    let outer = |m: &IntersectionMatrix| {
        let g = build_embedded_graph(m);
        let faces = g.trace_faces();
        g.face_containment(&faces)
            .unwrap()
            .iter()
            .any(|s| s.iter().all(|x| !x))
    };
    for t in [
        TripleType::Alpha,
        TripleType::Beta,
        TripleType::Gamma,
        TripleType::Delta,
    ] {
        assert!(outer(&of(t)), "{t}");
    }
    assert!(!outer(&eps));
    let forms: Vec<_> = [TripleType::Beta, TripleType::Gamma]
        .iter()
        .map(|t| canonical_form(&of(*t)).unwrap())
        .collect();
    assert!(forms[0] < forms[1]);
}

#[test]
fn reorientation_orbits() {
    let two = enumerate_census(2, CensusFilter::All).unwrap();
    assert_eq!(count_reorientation_orbits(&two).unwrap(), vec![vec![0]]);
    let three = enumerate_census(3, CensusFilter::Genus0).unwrap();
    let orbits = count_reorientation_orbits(&three).unwrap();
    let mut sizes: Vec<usize> = orbits.iter().map(|o| o.len()).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, [1, 4]);
    for o in &orbits {
        let classes: Vec<_> = o.iter().map(|i| three[*i].clone()).collect();
        assert_eq!(count_reorientation_orbits(&classes).unwrap().len(), 1);
        let types: BTreeSet<_> = classes
            .iter()
            .map(|e| classify_triple(&e.matrix()).unwrap())
            .collect();
        if o.len() == 1 {
            assert_eq!(types, BTreeSet::from([TripleType::Delta]));
        } else {
            assert!(!types.contains(&TripleType::Delta));
        }
    }
}

#[test]
fn census_output_is_deterministic_and_parses_back() {
    for n in 2..=4 {
        let a = census_to_psm(
            n,
            CensusFilter::Genus0,
            &enumerate_census(n, CensusFilter::Genus0).unwrap(),
        );
        let b = census_to_psm(
            n,
            CensusFilter::Genus0,
            &enumerate_census(n, CensusFilter::Genus0).unwrap(),
        );
        assert_eq!(a, b);
        let parsed = parse_many(&a).unwrap();
        let census = enumerate_census(n, CensusFilter::Genus0).unwrap();
        assert_eq!(parsed.len(), census.len());
        for (m, e) in parsed.iter().zip(&census) {
            assert_eq!(canonical_form(m).unwrap(), e.form);
        }
        assert!(a.contains("# genus: 0\n# consistent: yes\n# om: "));
    }
}

#[test]
fn entries_are_coherent_at_four() {
    for filter in [
        CensusFilter::Consistent,
        CensusFilter::Genus0,
        CensusFilter::Om,
    ] {
        let census = enumerate_census(4, filter).unwrap();
        let forms: BTreeSet<_> = census.iter().map(|e| e.form.clone()).collect();
        assert_eq!(forms.len(), census.len());
        assert!(census.windows(2).all(|w| w[0].form < w[1].form));
        for e in &census {
            let m = e.matrix();
            assert_eq!(e.genus, genus(&m));
            assert_eq!(e.consistent, check_consistency(&m).is_consistent());
            assert_eq!(e.om, pscirc::is_uniform_oriented_matroid(&m));
            assert_eq!(canonical_form(&m).unwrap(), e.form);
        }
    }
    let consistent = enumerate_census(4, CensusFilter::Consistent).unwrap();
    let genus0 = enumerate_census(4, CensusFilter::Genus0).unwrap();
    let from_consistent: Vec<_> = consistent
        .iter()
        .filter(|e| e.genus == 0)
        .cloned()
        .collect();
    assert_eq!(from_consistent, genus0);
    let s = summarize(4, CensusFilter::Consistent, &consistent).unwrap();
    assert_eq!((s.classes, s.genus0, s.om), (110, 72, 3));
}

#[test]
fn consistency_pruning_is_sound() {
    for n in 3..=4 {
        let pruned = enumerate_census(n, CensusFilter::Consistent).unwrap();
        let options = CensusOptions {
            disable_consistency_pruning: true,
            ..CensusOptions::default()
        };
        let unpruned = enumerate_census_with(n, CensusFilter::Consistent, options).unwrap();
        assert_eq!(pruned, unpruned);
    }
}

/// Every consistent matrix with a fixed first row, found by brute force over
/// the other three rows, has its class in the consistent census.
#[test]
fn unpruned_slices_at_four_are_covered() {
    let census: BTreeSet<CanonicalForm> = enumerate_census(4, CensusFilter::Consistent)
        .unwrap()
        .into_iter()
        .map(|e| e.form)
        .collect();
    let rows_for = |i: Label| -> Vec<Vec<SignedEntry>> {
        use itertools::Itertools;
        let cells: Vec<SignedEntry> = (1..=4)
            .filter(|k| *k != i)
            .flat_map(|k| [SignedEntry::plus(k), SignedEntry::minus(k)])
            .collect();
        let first = cells[0];
        cells[1..]
            .iter()
            .copied()
            .permutations(5)
            .map(|tail| std::iter::once(first).chain(tail).collect())
            .collect()
    };
    let parse_row = |s: &str| -> Vec<SignedEntry> {
        s.split_whitespace().map(|t| t.parse().unwrap()).collect()
    };
    let (r2, r3, r4) = (rows_for(2), rows_for(3), rows_for(4));
    for first in ["+2 -2 +3 -3 +4 -4", "+2 +3 +4 -2 -3 -4"] {
        let mut found = BTreeSet::new();
        for a in &r2 {
            for b in &r3 {
                // cheap prefilter on the triple 1, 2, 3
                let t = IntersectionMatrix::new(vec![
                    (1, parse_row(first)),
                    (2, a.clone()),
                    (3, b.clone()),
                    (4, r4[0].clone()),
                ])
                .unwrap();
                if !check_consistency(&t.submatrix(&[1, 2, 3]).unwrap()).is_consistent() {
                    continue;
                }
                for c in &r4 {
                    let m = IntersectionMatrix::new(vec![
                        (1, parse_row(first)),
                        (2, a.clone()),
                        (3, b.clone()),
                        (4, c.clone()),
                    ])
                    .unwrap();
                    if check_consistency(&m).is_consistent() {
                        found.insert(canonical_form(&m).unwrap());
                    }
                }
            }
        }
        assert!(!found.is_empty());
        assert!(found.is_subset(&census), "slice {first}");
    }
}

#[test]
fn quads_decide_isomorphism_on_the_consistent_census() {
    let census = enumerate_census(4, CensusFilter::Consistent).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut pool: Vec<IntersectionMatrix> = census.iter().map(|e| e.matrix()).collect();
    for e in census.iter().step_by(3) {
        pool.push(scramble(&mut rng, &e.matrix()));
    }
    for a in 0..pool.len() {
        for b in a..pool.len() {
            let direct = are_isomorphic(&pool[a], &pool[b]).unwrap();
            assert_eq!(
                iso_via_quads(&pool[a], &pool[b]).unwrap().isomorphic,
                direct
            );
        }
    }
    // distinct census entries are never isomorphic
    assert!(!are_isomorphic(&pool[0], &pool[1]).unwrap());
}

#[test]
fn triples_do_not_decide_isomorphism() {
    let census = enumerate_census(4, CensusFilter::Genus0).unwrap();
    let profile = |m: &IntersectionMatrix| -> Vec<TripleType> {
        let mut t: Vec<_> = m
            .all_submatrices(3)
            .unwrap()
            .iter()
            .map(|(_, s)| classify_triple(s).unwrap())
            .collect();
        t.sort();
        t
    };
    let beta_only: Vec<_> = census
        .iter()
        .filter(|e| profile(&e.matrix()).iter().all(|t| *t == TripleType::Beta))
        .collect();
    assert!(
        beta_only.len() >= 2,
        "{} classes with only beta triples",
        beta_only.len()
    );
}

#[test]
fn rotation_systems_and_faces_over_every_four_curve_class() {
    let bad = AtomicUsize::new(0);
    let classes = visit_census(4, CensusFilter::All, CensusOptions::default(), |e| {
        let g = build_embedded_graph(&e.matrix());
        let faces = g.trace_faces();
        let mut seen = [0u8; 48];
        for f in &faces {
            for d in &f.darts {
                seen[*d] += 1;
            }
        }
        if !g.rotation_descriptions_agree()
            || seen.iter().any(|c| *c != 1)
            || faces.len() + e.genus * 2 != 14
        {
            bad.fetch_add(1, Ordering::Relaxed);
        }
    })
    .unwrap();
    assert_eq!(classes, 8_642_070);
    assert_eq!(bad.into_inner(), 0);
}

#[test]
fn sphere_by_quads_over_the_consistent_five_curve_census() {
    let census = enumerate_census_with(5, CensusFilter::Consistent, long_running()).unwrap();
    assert_eq!(census.len(), 70_548);
    let mut spherical = 0;
    for e in &census {
        let m = e.matrix();
        let direct = is_sphere_embeddable_direct(&m);
        assert_eq!(
            direct,
            is_sphere_embeddable_via_quads(&m).embeddable,
            "{}",
            e.form
        );
        spherical += direct as usize;
    }
    assert_eq!(spherical, 14_108);
    let om = enumerate_census_with(5, CensusFilter::Om, long_running()).unwrap();
    assert_eq!(om.len(), census.iter().filter(|e| e.om).count());
    for e in &om {
        for (_, s) in e.matrix().all_submatrices(3).unwrap() {
            assert_eq!(classify_triple(&s).unwrap(), TripleType::Delta);
        }
    }
}

#[test]
fn five_needs_the_long_running_flag() {
    assert!(enumerate_census(5, CensusFilter::Om).is_err());
    assert!(enumerate_census_with(6, CensusFilter::Om, long_running()).is_err());
}
