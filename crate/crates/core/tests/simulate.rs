use mol_core::seqcore::count_blocks;
use mol_core::simulate::{random_kernel, Concentration};
use mol_core::{
    build_flatspot_chain, sample_lattice, sample_markov, stationary_distribution, theoretical_entropies, Alphabet,
    LatticeModel, MarkovModel,
};

/// Largest gap between empirical conditional frequencies at context length
/// `order` and the kernel rows, over observed contexts.
fn kernel_distance(model: &MarkovModel, n: usize, seed: u64) -> f64 {
    let x = sample_markov(model, n, seed).unwrap();
    let m = model.order();
    let joint = count_blocks(&x, m + 1).unwrap();
    let mut worst = 0.0f64;
    joint.for_each(|block, _| {
        let context = &block[..m];
        let denom: u64 = (0..model.alphabet().size() as u32)
            .map(|b| {
                let mut a = context.to_vec();
                a.push(b);
                joint.count(&a)
            })
            .sum();
        let p = model.row(model.context_index(context))[block[m] as usize];
        worst = worst.max((joint.count(block) as f64 / denom as f64 - p).abs());
    });
    worst
}

#[test]
fn empirical_frequencies_approach_the_kernel() {
    let two = MarkovModel::two_state(0.1, 0.1).unwrap();
    assert!(kernel_distance(&two, 1_000_000, 1) < 0.005);
    let models = [
        MarkovModel::two_state(0.1, 0.3).unwrap(),
        MarkovModel::cyclic_shift(4, 0.8).unwrap(),
        build_flatspot_chain(2, 0.9).unwrap(),
        random_kernel(2, Alphabet::new(3).unwrap(), Concentration::Dirichlet { alpha: 1.0 }, 4).unwrap(),
    ];
    for m in &models {
        let d = kernel_distance(m, 1_000_000, 2);
        assert!(d < 0.01, "{d}");
    }
}

#[test]
fn stationary_law_examples() {
    let pi = stationary_distribution(&MarkovModel::two_state(0.1, 0.1).unwrap()).unwrap();
    assert!((pi[0] - 0.5).abs() < 1e-12 && (pi[1] - 0.5).abs() < 1e-12);
    let pi = stationary_distribution(&MarkovModel::two_state(0.1, 0.3).unwrap()).unwrap();
    assert!((pi[0] - 0.75).abs() < 1e-10 && (pi[1] - 0.25).abs() < 1e-10);
    let iid = MarkovModel::iid(vec![0.2, 0.3, 0.5]).unwrap();
    assert_eq!(stationary_distribution(&iid).unwrap(), vec![0.2, 0.3, 0.5]);
}

#[test]
fn entropies_are_nonincreasing_and_flat_after_the_order() {
    for seed in 0..10 {
        let m = random_kernel(
            2,
            Alphabet::new(2).unwrap(),
            Concentration::Dirichlet { alpha: 0.7 },
            seed,
        )
        .unwrap();
        let h = theoretical_entropies(&m, 5).unwrap();
        for w in h.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{h:?}");
        }
        assert!(h[2..].iter().all(|&v| v == h[2]));
        assert!(h[1] > h[2]);
    }
    let m = random_kernel(
        1,
        Alphabet::new(2).unwrap(),
        Concentration::Dirichlet { alpha: 1.0 },
        99,
    )
    .unwrap();
    let h = theoretical_entropies(&m, 2).unwrap();
    assert!(h[0] > h[1]);
    let u = random_kernel(1, Alphabet::new(4).unwrap(), Concentration::Uniform, 0).unwrap();
    assert_eq!(u.effective_order(), 0);
    assert!(theoretical_entropies(&u, 3)
        .unwrap()
        .iter()
        .all(|&v| (v - 4f64.ln()).abs() < 1e-12));
}

#[test]
fn iid_lattice_frequencies() {
    let m = LatticeModel::Iid { probs: vec![0.5, 0.5] };
    let x = sample_lattice(&m, 256, 3).unwrap();
    let ones = x.grid().iter().filter(|&&s| s == 1).count() as f64 / (256.0 * 256.0);
    assert!((ones - 0.5).abs() < 0.01);
}

#[test]
fn gibbs_field_is_more_correlated_than_iid() {
    let iid = LatticeModel::Iid { probs: vec![0.5, 0.5] };
    let gibbs = LatticeModel::NearestNeighborGibbs {
        alphabet: 2,
        coupling: 0.4,
        sweeps: 500,
    };
    for seed in 0..3 {
        let a = sample_lattice(&iid, 256, seed).unwrap().neighbor_agreement();
        let b = sample_lattice(&gibbs, 256, seed).unwrap().neighbor_agreement();
        assert!(b > a, "{b} <= {a}");
    }
    let x = sample_lattice(&gibbs, 32, 11).unwrap();
    assert_eq!(x, sample_lattice(&gibbs, 32, 11).unwrap());
}

#[test]
fn potts_fields_sample() {
    let m = LatticeModel::NearestNeighborGibbs {
        alphabet: 3,
        coupling: 0.5,
        sweeps: 20,
    };
    let x = sample_lattice(&m, 16, 0).unwrap();
    assert_eq!(x.alphabet().size(), 3);
    assert!(x.grid().contains(&2));
}
