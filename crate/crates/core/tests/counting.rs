use std::collections::BTreeMap;

use mol_core::seqcore::{cond_empirical_entropy, count_blocks, empirical_cond_prob, empirical_prob, BlockStats};
use mol_core::{Alphabet, Sequence};
use proptest::prelude::*;

fn naive_counts(x: &[u32], k: usize) -> BTreeMap<Vec<u32>, u64> {
    let mut m = BTreeMap::new();
    for w in x.windows(k) {
        *m.entry(w.to_vec()).or_insert(0) += 1;
    }
    m
}

fn sequence(max_size: usize, max_len: usize) -> impl Strategy<Value = Sequence> {
    (1..=max_size, 1..=max_len).prop_flat_map(|(size, len)| {
        prop::collection::vec(0..size as u32, len)
            .prop_map(move |data| Sequence::new(Alphabet::new(size).unwrap(), data).unwrap())
    })
}

proptest! {
    #[test]
    fn counts_match_rescan(x in sequence(5, 300), k in 1usize..9) {
        prop_assume!(k <= x.len());
        let table = count_blocks(&x, k).unwrap();
        let expect: Vec<(Vec<u32>, u64)> = naive_counts(x.symbols(), k).into_iter().collect();
        prop_assert_eq!(table.to_sorted_vec(), expect);
        prop_assert_eq!(table.windows() as usize, x.len() - k + 1);
    }

    #[test]
    fn wide_alphabets_match_rescan(data in prop::collection::vec(0u32..(1 << 20), 1..200), k in 1usize..6) {
        prop_assume!(k <= data.len());
        let x = Sequence::new(Alphabet::new(1 << 20).unwrap(), data).unwrap();
        let expect: Vec<(Vec<u32>, u64)> = naive_counts(x.symbols(), k).into_iter().collect();
        prop_assert_eq!(count_blocks(&x, k).unwrap().to_sorted_vec(), expect);
    }

    #[test]
    fn window_identity(x in sequence(4, 200), k in 0usize..5) {
        prop_assume!(k < x.len() - 1);
        let stats = BlockStats::new(&x, k + 1);
        let full = stats.full(k + 1).unwrap();
        let trimmed = stats.trimmed(k).unwrap();
        let mut sums: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        full.for_each(|b, c| *sums.entry(b[..k].to_vec()).or_insert(0) += c);
        prop_assert_eq!(sums.into_iter().collect::<Vec<_>>(), trimmed.to_sorted_vec());
    }

    #[test]
    fn entropy_bounds_and_relabeling(x in sequence(4, 300), k in 0usize..4, shift in 0u32..4) {
        prop_assume!(k < x.len());
        let h = cond_empirical_entropy(&x, k).unwrap();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (x.alphabet().size() as f64).ln() + 1e-12);
        let size = x.alphabet().size() as u32;
        let perm: Vec<u32> = (0..size).map(|s| (s + shift) % size).collect();
        let y = x.relabel(&perm).unwrap();
        prop_assert!((cond_empirical_entropy(&y, k).unwrap() - h).abs() < 1e-12);
        if k >= 1 {
            let t = count_blocks(&x, k).unwrap();
            let u = count_blocks(&y, k).unwrap();
            prop_assert_eq!(t.distinct(), u.distinct());
            t.for_each(|b, c| {
                let mapped: Vec<u32> = b.iter().map(|&s| perm[s as usize]).collect();
                assert_eq!(u.count(&mapped), c);
            });
        }
    }

    #[test]
    fn probabilities_sum_to_one(x in sequence(3, 200)) {
        prop_assume!(x.len() >= 3);
        let size = x.alphabet().size() as u32;
        let mut total = 0.0;
        for a in 0..size {
            for b in 0..size {
                total += empirical_prob(&x, &[a, b]).unwrap();
            }
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
        // Continuations of an observed context.
        let ctx = x.symbols()[0];
        let s: f64 = (0..size)
            .map(|b| empirical_cond_prob(&x, &[ctx, b]).unwrap().unwrap())
            .sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }
}

#[test]
fn conditional_probability_examples() {
    let x = Sequence::new(Alphabet::new(2).unwrap(), vec![0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
    assert_eq!(empirical_cond_prob(&x, &[0, 1]).unwrap(), Some(1.0));
    let x = Sequence::new(Alphabet::new(2).unwrap(), vec![0, 1]).unwrap();
    assert_eq!(empirical_cond_prob(&x, &[1, 1]).unwrap(), None);
}
