//! Chain-map and quasi-isomorphism checks for elementary events on random
//! diagrams.

use endkh::cobordism::verify_chain_map;
use endkh::random::{random_diagram, random_event, EventClass};
use endkh::{homology_dims, induced_homology_map, rank, Movie, MovieEvent};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn kind_counts(evs: &[MovieEvent]) -> std::collections::BTreeMap<&'static str, usize> {
    let mut m = std::collections::BTreeMap::new();
    for e in evs {
        *m.entry(e.kind()).or_insert(0) += 1;
    }
    m
}

const STRESS: usize = 300;
fn check_event(d: &endkh::Diagram, ev: MovieEvent) {
    let m = Movie::new(d.clone(), vec![ev]);
    let report = verify_chain_map(&m).unwrap();
    assert!(
        report.passed(),
        "{ev:?} on {d:?} is not a chain map: {:?}",
        report.witness
    );
    if ev.is_reidemeister() {
        let target = m.target().unwrap();
        let (hs, ht) = (homology_dims(d).unwrap(), homology_dims(&target).unwrap());
        assert_eq!(hs, ht, "{ev:?} on {d:?} changed homology");
        for (b, dim) in hs.0 {
            let f = induced_homology_map(&m, b).unwrap();
            assert_eq!(
                rank(&f),
                dim,
                "{ev:?} on {d:?} is not an isomorphism at {b}"
            );
        }
    }
}

#[test]
fn random_reidemeister_events_are_quasi_isomorphisms() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut seen = Vec::new();
    for _ in 0..STRESS {
        let d = random_diagram(&mut rng, 5);
        if let Some(ev) = random_event(&mut rng, &d, EventClass::Reidemeister, 6) {
            check_event(&d, ev);
            seen.push(ev);
        }
    }
    let counts = kind_counts(&seen);
    for k in ["r1+", "r1-", "r1+inv", "r1-inv", "r2+", "r2-", "r3"] {
        assert!(
            counts.get(k).copied().unwrap_or(0) > 0,
            "no {k} sampled: {counts:?}"
        );
    }
}

#[test]
fn random_morse_events_are_chain_maps() {
    let mut rng = StdRng::seed_from_u64(12);
    let mut seen = Vec::new();
    for _ in 0..200 {
        let d = random_diagram(&mut rng, 6);
        if let Some(ev) = random_event(&mut rng, &d, EventClass::Morse, 6) {
            check_event(&d, ev);
            seen.push(ev);
        }
    }
    let counts = kind_counts(&seen);
    for k in ["birth", "death", "saddle"] {
        assert!(
            counts.get(k).copied().unwrap_or(0) > 0,
            "no {k} sampled: {counts:?}"
        );
    }
}

#[test]
fn reversed_random_movies_land_back_on_the_source() {
    use endkh::random::random_movie;
    use endkh::{apply_differential, enumerate_generators, reverse_aligned, ChainVector, Transfer};
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..150 {
        let d = random_diagram(&mut rng, 4);
        let m = random_movie(&mut rng, d, 5, EventClass::Any, 5);
        let (rev, back) = reverse_aligned(&m).unwrap();
        assert_eq!(rev.chi(), m.chi());
        assert_eq!(back.crossings.len(), m.source.n_crossings());
        let t = Transfer::new(&m).unwrap();
        let target = m.target().unwrap();
        // Read on the source itself, the transfer still commutes with d.
        for g in enumerate_generators(&target, None) {
            let c = ChainVector::single(g);
            let left = apply_differential(&m.source, &t.apply(&c).unwrap()).unwrap();
            let right = t.apply(&apply_differential(&target, &c).unwrap()).unwrap();
            assert_eq!(left, right, "{:?}", m.events);
        }
    }
}
