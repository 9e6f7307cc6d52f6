use mol_core::fluctuation::{delta, phi, Window};
use mol_core::seqcore::occurrences;
use mol_core::{
    build_flatspot_chain, derive_seed, estimate_order_fluctuation, naive_flatspot_order, sample_markov, Alphabet,
    FlatspotConfig, FluctuationConfig, Sequence,
};
use proptest::prelude::*;

fn sequence(max_size: usize, min_len: usize, max_len: usize) -> impl Strategy<Value = Sequence> {
    (2..=max_size, min_len..=max_len).prop_flat_map(|(size, len)| {
        prop::collection::vec(0..size as u32, len)
            .prop_map(move |data| Sequence::new(Alphabet::new(size).unwrap(), data).unwrap())
    })
}

fn all_blocks(size: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|b| {
                (0..size).map(move |s| {
                    let mut c = b.clone();
                    c.push(s);
                    c
                })
            })
            .collect();
    }
    out
}

/// `max [P̂(a_k|a_1^{k-1}) - P̂(a_k|a_{k-m}^{k-1})] N_{n-1}(a_1^{k-1})` over every
/// block of every length in the window, by direct rescans.
fn phi_conditional_form(x: &Sequence, m: usize, max_k: usize) -> f64 {
    let sym = x.symbols();
    let trimmed = &sym[..sym.len() - 1];
    let size = x.alphabet().size() as u32;
    let mut best = 0.0f64;
    for k in (m + 1)..=max_k {
        for a in all_blocks(size, k) {
            let ctx = occurrences(trimmed, &a[..k - 1]);
            if ctx == 0 {
                continue;
            }
            let full = occurrences(sym, &a) as f64 / ctx as f64;
            let suffix = &a[k - 1 - m..];
            let sctx = occurrences(trimmed, &suffix[..m]);
            let trunc = occurrences(sym, suffix) as f64 / sctx as f64;
            best = best.max((full - trunc) * ctx as f64);
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn delta_sums_to_zero_over_last_symbol(x in sequence(3, 10, 200), m in 0usize..3, extra in 1usize..3) {
        let k = m + extra;
        prop_assume!(k < x.len());
        let sym = x.symbols();
        let size = x.alphabet().size() as u32;
        // Every observed context in x_1^{n-1}.
        for start in 0..(sym.len() - k + 1).min(30) {
            let ctx = &sym[start..start + k - 1];
            let total: f64 = (0..size)
                .map(|b| {
                    let mut a = ctx.to_vec();
                    a.push(b);
                    delta(&x, m, &a).unwrap()
                })
                .sum();
            prop_assert!(total.abs() < 1e-9, "sum {}", total);
        }
    }

    #[test]
    fn conditional_and_delta_forms_agree(x in sequence(3, 5, 150), m in 0usize..3, max_k in 1usize..5) {
        prop_assume!(max_k < x.len());
        let cfg = FluctuationConfig::with_k_max(max_k);
        let got = phi(&x, m, &cfg).unwrap();
        let want = phi_conditional_form(&x, m, max_k);
        prop_assert!(got >= 0.0);
        prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{} vs {}", got, want);
    }

    #[test]
    fn wider_window_never_decreases_phi(x in sequence(3, 10, 150), m in 0usize..3, k in 1usize..5) {
        prop_assume!(k + 2 <= x.len());
        let a = phi(&x, m, &FluctuationConfig::with_k_max(k)).unwrap();
        let b = phi(&x, m, &FluctuationConfig::with_k_max(k + 1)).unwrap();
        prop_assert!(b >= a);
    }

    #[test]
    fn relabeling_keeps_the_estimate(x in sequence(3, 20, 300), shift in 1u32..3) {
        let size = x.alphabet().size() as u32;
        let perm: Vec<u32> = (0..size).map(|s| (s + shift) % size).collect();
        let cfg = FluctuationConfig::with_k_max(3);
        let a = estimate_order_fluctuation(&x, &cfg).unwrap();
        let b = estimate_order_fluctuation(&x.relabel(&perm).unwrap(), &cfg).unwrap();
        prop_assert_eq!(a.chosen_order, b.chosen_order);
        prop_assert!(a.is_consistent());
    }
}

#[test]
fn loglog_window_is_the_default_alternative() {
    let cfg = FluctuationConfig {
        window: Window::LogLog,
        ..Default::default()
    };
    let x = Sequence::new(Alphabet::new(2).unwrap(), [0, 1].repeat(50_000)).unwrap();
    let r = estimate_order_fluctuation(&x, &cfg).unwrap();
    // k < log log 1e5 = 2.44 allows k <= 2, enough to see order 1.
    assert_eq!(r.chosen_order, 1);
    assert_eq!(r.diagnostics["max_block_length"], 2.0);
}

#[test]
fn flatspot_failure_is_stable_across_n() {
    let model = build_flatspot_chain(2, 0.9).unwrap();
    for n in [10_000, 100_000, 1_000_000] {
        for i in 0..5 {
            let x = sample_markov(&model, n, derive_seed(77, i)).unwrap();
            let naive = naive_flatspot_order(&x, &FlatspotConfig::default()).unwrap();
            assert_eq!(naive.chosen_order, 0, "n={n}");
            // At n = 1e4 the order-2 signal 0.4 * n/4 is about n^{3/4}, so M# is
            // only expected to settle from 1e5 on.
            if n >= 100_000 {
                let m = estimate_order_fluctuation(&x, &FluctuationConfig::with_k_max(4)).unwrap();
                assert_eq!(m.chosen_order, 2, "n={n}");
            }
        }
    }
}
