//! Invariants checked on random inputs, mostly against the naive oracle in
//! `common::oracle`.

mod common;

use common::oracle::{as_table, from_gen, to_gen, Oracle};
use endkh::complex::differential_of;
use endkh::formats::{parse_diagram, parse_movie, serialize_diagram, serialize_movie};
use endkh::random::{random_diagram, random_movie, EventClass};
use endkh::tower::{parse_certificate, parse_tower, verify_survival, SurvivalOptions};
use endkh::{
    apply_movie, enumerate_generators, eventual_rank, homology_dims, is_cycle_local, kernel_basis,
    rank, reverse_movie, solve, BitVec, F2Matrix,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn matrix() -> impl Strategy<Value = Vec<Vec<u8>>> {
    (1usize..9, 1usize..9)
        .prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(0u8..2, c), r))
}

fn square() -> impl Strategy<Value = Vec<Vec<u8>>> {
    (1usize..8)
        .prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(0u8..2, n), n))
}

/// Rank by brute force: the number of distinct row combinations is 2^rank.
fn span_size_rank(rows: &[Vec<u8>]) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    for mask in 0u32..(1 << rows.len()) {
        let mut acc = vec![0u8; rows[0].len()];
        for (i, r) in rows.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (a, b) in acc.iter_mut().zip(r) {
                    *a ^= b;
                }
            }
        }
        seen.insert(acc);
    }
    seen.len().trailing_zeros() as usize
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_matches_span_size(rows in matrix()) {
        let a = F2Matrix::from_dense(&rows).unwrap();
        prop_assert_eq!(rank(&a), span_size_rank(&rows));
        prop_assert_eq!(rank(&a), rank(&a.transpose()));
    }

    #[test]
    fn kernel_is_exact(rows in matrix()) {
        let a = F2Matrix::from_dense(&rows).unwrap();
        let ker = kernel_basis(&a);
        prop_assert_eq!(ker.len(), a.cols() - rank(&a));
        for v in &ker {
            prop_assert!(a.mul_vec(v).unwrap().is_zero());
        }
    }

    #[test]
    fn solve_finds_preimages(rows in matrix(), seed in any::<u64>()) {
        let a = F2Matrix::from_dense(&rows).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let x: Vec<bool> = (0..a.cols()).map(|_| rand::Rng::gen_bool(&mut rng, 0.5)).collect();
        let b = a.mul_vec(&BitVec::from_bools(&x)).unwrap();
        let y = solve(&a, &b).unwrap().expect("b is in the image");
        prop_assert_eq!(a.mul_vec(&y).unwrap(), b);
    }

    #[test]
    fn eventual_rank_is_rank_of_a_high_power(rows in square()) {
        let t = F2Matrix::from_dense(&rows).unwrap();
        let mut p = t.clone();
        for _ in 0..t.rows() {
            p = p.mul(&t).unwrap();
        }
        prop_assert_eq!(eventual_rank(&t).unwrap(), rank(&p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homology_matches_the_oracle(seed in any::<u64>()) {
        let d = random_diagram(&mut StdRng::seed_from_u64(seed), 6);
        let want = as_table(&Oracle::new(&d).homology());
        prop_assert_eq!(homology_dims(&d).unwrap(), want, "{:?}", d);
    }

    #[test]
    fn differential_matches_the_oracle(seed in any::<u64>()) {
        let d = random_diagram(&mut StdRng::seed_from_u64(seed), 5);
        let o = Oracle::new(&d);
        for g in enumerate_generators(&d, None) {
            let want: endkh::ChainVector = o.d(&to_gen(&g)).iter().map(from_gen).collect();
            let got = differential_of(&d, &g).unwrap();
            prop_assert_eq!(&got, &want, "at {:?}", g);
            prop_assert_eq!(is_cycle_local(&d, &g).unwrap(), want.is_zero());
        }
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let d = random_diagram(&mut rng, 7);
        prop_assert_eq!(parse_diagram(&serialize_diagram(&d)).unwrap(), d.clone());
        let m = random_movie(&mut rng, d, 4, EventClass::Any, 7);
        let back = parse_movie(&serialize_movie(&m)).unwrap();
        prop_assert_eq!(back.events, m.events);
    }

    #[test]
    fn movies_shift_q_by_chi(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let d = random_diagram(&mut rng, 5);
        let m = random_movie(&mut rng, d.clone(), 3, EventClass::Any, 6);
        let target = m.target().unwrap();
        for g in enumerate_generators(&d, None).into_iter().take(64) {
            if !is_cycle_local(&d, &g).unwrap() {
                continue;
            }
            let b = endkh::bigrading(&d, &g).unwrap();
            let img = apply_movie(&m, &endkh::ChainVector::single(g)).unwrap();
            if let Some(t) = img.bigrading(&target).unwrap() {
                prop_assert_eq!(t, b.shift_q(m.chi()));
            }
        }
    }

    #[test]
    fn reversing_twice_keeps_chi(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let d = random_diagram(&mut rng, 5);
        let m = random_movie(&mut rng, d, 4, EventClass::Any, 6);
        let r = reverse_movie(&m).unwrap();
        prop_assert_eq!(r.chi(), m.chi());
        prop_assert_eq!(reverse_movie(&r).unwrap().chi(), m.chi());
    }
}

#[test]
fn passing_certificates_have_constant_shifted_gradings() {
    for (tower, cert) in [
        ("standard_tower.json", "standard_certificate.json"),
        ("exotic_tower.json", "exotic_certificate.json"),
    ] {
        let t = parse_tower(&common::read_data(tower)).unwrap();
        let c = parse_certificate(&common::read_data(cert)).unwrap();
        let r = verify_survival(&t, &c, &SurvivalOptions::default()).unwrap();
        assert!(r.passed, "{tower}");
        let stages = t.stages_upto(r.depth).unwrap();
        let shifted: std::collections::BTreeSet<(i64, i64)> = r
            .stages
            .iter()
            .map(|s| {
                let (h, q) = s.bigrading.unwrap();
                (h, q - stages[s.stage].chi_shift)
            })
            .collect();
        assert_eq!(shifted.len(), 1, "{tower}: {shifted:?}");
    }
}
