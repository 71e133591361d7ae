//! Distributional checks against chi-square critical values.

mod common;

use rand::SeedableRng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use qals_core::qals::PermutationState;
use qals_core::sampler::{
    random_bits, ExhaustiveSampler, SaSchedule, Sampler, SimulatedAnnealing, UniformRandomSampler,
};
use qals_core::{brute_force_qubo, embed_naive, Mt64, Topology};

const ALPHA: f64 = 0.001;

fn critical(df: f64) -> f64 {
    ChiSquared::new(df).unwrap().inverse_cdf(1.0 - ALPHA)
}

#[test]
fn random_bits_are_uniform() {
    let mut backend = UniformRandomSampler::new(2024);
    let mut counts = [0u64; 128];
    for _ in 0..1000 {
        let values = random_bits(&mut backend, 7000, 7).unwrap();
        assert_eq!(values.len(), 1000);
        for v in values {
            counts[v as usize] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / 128.0;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    assert!(stat < critical(127.0), "chi-square {stat}");
}

#[test]
fn full_shuffle_places_values_uniformly() {
    let n = 52;
    let trials = 100_000;
    let mut rng = Mt64::seed_from_u64(52);
    let identity = PermutationState::identity(n);
    let mut table = vec![vec![0u64; n]; n];
    for _ in 0..trials {
        let s = identity.perturb(1.0, &mut rng);
        for (pos, &v) in s.perm().iter().enumerate() {
            table[v][pos] += 1;
        }
    }
    let expected = trials as f64 / n as f64;
    let stat: f64 = table
        .iter()
        .flatten()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let df = ((n - 1) * (n - 1)) as f64;
    assert!(stat < critical(df), "chi-square {stat} over df {df}");
}

#[test]
fn partial_shuffle_moves_only_selected_positions() {
    let mut rng = Mt64::seed_from_u64(7);
    let n = 1000;
    let mut moved = 0usize;
    for _ in 0..50 {
        let s = PermutationState::identity(n).perturb(0.1, &mut rng);
        moved += s
            .perm()
            .iter()
            .enumerate()
            .filter(|(i, &v)| *i != v)
            .count();
    }
    // at most the selected ~10% can move
    let rate = moved as f64 / (50.0 * n as f64);
    assert!(rate < 0.12, "{rate}");
    assert!(rate > 0.07, "{rate}");
}

#[test]
fn annealing_sanity_gate() {
    let mut hits = 0;
    for seed in 0..100u64 {
        let mut rng = Mt64::seed_from_u64(1000 + seed);
        let q = common::random_qubo(10, &mut rng);
        let (_, opt) = brute_force_qubo(&q).unwrap();
        let emb = embed_naive(&q, &Topology::complete(10)).unwrap();
        let mut sa = SimulatedAnnealing::new(SaSchedule::default(), seed).unwrap();
        let r = sa.sample(&emb.weights, 200).unwrap();
        if (r.energy - opt).abs() <= 0.05 * opt.abs() {
            hits += 1;
        }
    }
    assert!(hits >= 95, "{hits}/100 within 5%");
}

#[test]
fn exhaustive_backend_ignores_reads() {
    let mut rng = Mt64::seed_from_u64(3);
    let q = common::random_qubo(9, &mut rng);
    let emb = embed_naive(&q, &Topology::complete(9)).unwrap();
    let mut s = ExhaustiveSampler::default();
    let a = s.sample(&emb.weights, 1).unwrap();
    for k in [2, 10, 1000] {
        assert_eq!(s.sample(&emb.weights, k).unwrap(), a);
    }
}
