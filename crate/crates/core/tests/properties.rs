//! Randomized invariants checked against independent reference code.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;

use qals_core::problems::{
    ckk_solve, kk_heuristic, refine_tsp_solution, tsp_cost, tsp_to_qubo, NppInstance, Tour,
    TspInstance,
};
use qals_core::qals::{project_weights, PermutationState, TabuMatrix};
use qals_core::sampler::wire::{encode_request, RequestReader};
use qals_core::sampler::{ExhaustiveSampler, SaSchedule, Sampler, SimulatedAnnealing};
use qals_core::{
    brute_force_qubo, embed_naive, qubo_to_ising, BinarySolution, Mt64, QuboProblem, Topology,
    WeightAssignment,
};

fn qubo_strategy(max_n: usize) -> impl Strategy<Value = QuboProblem> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-100.0f64..100.0, n * (n + 1) / 2).prop_map(move |vals| {
            let mut q = QuboProblem::new(n).unwrap();
            let mut it = vals.into_iter();
            for i in 0..n {
                for j in i..n {
                    q.set(i, j, it.next().unwrap()).unwrap();
                }
            }
            q
        })
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluate_matches_naive_sum(q in qubo_strategy(12), seed in any::<u64>()) {
        let mut rng = Mt64::seed_from_u64(seed);
        for _ in 0..32 {
            let x = common::random_bits(q.n(), &mut rng);
            let f = q.evaluate(&BinarySolution::new(x.clone()).unwrap()).unwrap();
            prop_assert!(close(f, common::naive_energy(&q, &x)));
        }
    }

    #[test]
    fn brute_force_is_a_lower_bound(q in qubo_strategy(10)) {
        let (x, best) = brute_force_qubo(&q).unwrap();
        prop_assert_eq!(q.evaluate(&x).unwrap(), best);
        for bits in common::all_assignments(q.n()) {
            prop_assert!(best <= common::naive_energy(&q, &bits) + 1e-9);
        }
    }

    #[test]
    fn ising_conserves_energy(q in qubo_strategy(10), dense in any::<bool>()) {
        let (w, offset) = qubo_to_ising(&q, dense);
        for bits in common::all_assignments(q.n()) {
            let x = BinarySolution::new(bits.clone()).unwrap();
            let e = w.energy(&x.to_spins()).unwrap() + offset;
            prop_assert!(close(e, common::naive_energy(&q, &bits)));
        }
    }

    #[test]
    fn embedding_stays_on_the_graph(
        q in qubo_strategy(20),
        extra in 0usize..10,
        density in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let mut rng = Mt64::seed_from_u64(seed);
        let t = common::random_topology(q.n() + extra, density, &mut rng);
        let emb = embed_naive(&q, &t).unwrap();
        let w = &emb.weights;
        prop_assert_eq!(w.len(), q.n());
        for &node in w.nodes() {
            prop_assert!(t.nodes().binary_search(&node).is_ok());
        }
        for &(a, b, _) in w.couplers() {
            let (u, v) = (w.nodes()[a], w.nodes()[b]);
            prop_assert!(t.has_edge(u, v));
        }
        let mut seen = emb.node_index.clone();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), q.n());
    }

    #[test]
    fn complete_embedding_preserves_energy(q in qubo_strategy(8)) {
        let emb = embed_naive(&q, &Topology::complete(q.n())).unwrap();
        for bits in common::all_assignments(q.n()) {
            prop_assert!(close(emb.weights.energy(&bits), common::naive_energy(&q, &bits)));
        }
    }

    #[test]
    fn projection_on_complete_graph_is_lossless(q in qubo_strategy(8), seed in any::<u64>()) {
        let n = q.n();
        let mut rng = Mt64::seed_from_u64(seed);
        let state = PermutationState::from_perm(common::random_perm(n, &mut rng)).unwrap();
        let emb = project_weights(&q, &Topology::complete(n), &state).unwrap();
        // node a carries variable inverse[a]
        for bits in common::all_assignments(n) {
            let mut x = vec![0u8; n];
            for (a, &b) in bits.iter().enumerate() {
                x[emb.node_index[a]] = b;
            }
            prop_assert!(close(emb.weights.energy(&bits), common::naive_energy(&q, &x)));
        }
    }

    #[test]
    fn wire_round_trip_is_exact(q in qubo_strategy(16)) {
        let weights = WeightAssignment::from_node_entries(
            (0..q.n()).map(|i| (3 * i + 1, 3 * i + 1, 0.0)).chain(
                q.nonzeros().map(|(i, j, v)| (3 * i + 1, 3 * j + 1, v)),
            ),
        )
        .unwrap();
        let text = encode_request(&weights);
        let mut reader = RequestReader::new(text.as_bytes());
        let back = reader.read_request().unwrap().unwrap();
        prop_assert_eq!(&back, &weights);
        prop_assert!(reader.read_request().unwrap().is_none());
    }

    #[test]
    fn sample_energy_is_recomputable(q in qubo_strategy(10), seed in any::<u64>()) {
        let weights = WeightAssignment::from_node_entries(
            (0..q.n()).map(|i| (i, i, 0.0)).chain(q.nonzeros()),
        )
        .unwrap();
        let mut sa = SimulatedAnnealing::new(SaSchedule::geometric(20), seed).unwrap();
        let r = sa.sample(&weights, 2).unwrap();
        prop_assert!(close(r.energy, common::naive_energy(&q, &r.bits)));
        let again = SimulatedAnnealing::new(SaSchedule::geometric(20), seed)
            .unwrap()
            .sample(&weights, 2)
            .unwrap();
        prop_assert_eq!(&again, &r);
        let e = ExhaustiveSampler::default().sample(&weights, 1).unwrap();
        prop_assert!(close(e.energy, common::naive_energy(&q, &e.bits)));
        prop_assert!(e.energy <= r.energy + 1e-9);
    }

    #[test]
    fn tabu_matrix_is_symmetric(
        n in 1usize..12,
        seeds in prop::collection::vec(any::<u64>(), 1..6),
        spin in any::<bool>(),
    ) {
        let mut s = TabuMatrix::zeros(n, spin);
        for seed in &seeds {
            let z = common::random_bits(n, &mut Mt64::seed_from_u64(*seed));
            s.update(&BinarySolution::new(z).unwrap());
        }
        prop_assert_eq!(s.updates(), seeds.len());
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(s.get(i, j), s.get(j, i));
            }
        }
    }

    #[test]
    fn permutation_perturbation_stays_bijective(
        n in 0usize..40,
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let mut rng = Mt64::seed_from_u64(seed);
        let state = PermutationState::from_perm(common::random_perm(n, &mut rng)).unwrap();
        let next = state.perturb(p, &mut rng);
        for i in 0..n {
            prop_assert_eq!(next.inverse()[next.perm()[i]], i);
        }
    }

    #[test]
    fn kk_never_beats_ckk(nums in prop::collection::vec(1u64..1000, 1..14)) {
        let inst = NppInstance::new(nums.clone()).unwrap();
        let exact = ckk_solve(&inst, None);
        prop_assert!(!exact.truncated);
        prop_assert_eq!(exact.difference, common::brute_partition(&nums));
        prop_assert_eq!(inst.diff(&exact.solution).unwrap(), exact.difference);
        prop_assert!(kk_heuristic(&inst) >= exact.difference);
    }

    #[test]
    fn npp_energy_identity(nums in prop::collection::vec(1u64..1000, 1..10)) {
        let inst = NppInstance::new(nums).unwrap();
        let q = inst.to_qubo().unwrap();
        let c = i128::from(inst.sum());
        for bits in common::all_assignments(inst.len()) {
            let x = BinarySolution::new(bits).unwrap();
            let f = q.evaluate(&x).unwrap();
            // energies stay far below 2^53 here, so the float value is exact
            prop_assert_eq!(f.fract(), 0.0);
            let d = i128::from(inst.diff(&x).unwrap());
            prop_assert_eq!(c * c + 4 * f as i128, d * d);
        }
    }

    #[test]
    fn refinement_yields_bijections(n in 2usize..8, seed in any::<u64>()) {
        let mut rng = Mt64::seed_from_u64(seed);
        let inst = TspInstance::random(n, 10.0, &mut rng).unwrap();
        let x = BinarySolution::new(common::random_bits(n * n, &mut rng)).unwrap();
        let tour = refine_tsp_solution(&x, &inst, &mut rng).unwrap();
        let mut order = tour.order().to_vec();
        order.sort_unstable();
        prop_assert_eq!(order, (0..n).collect::<Vec<_>>());
        let again = refine_tsp_solution(&tour.to_solution(), &inst, &mut rng).unwrap();
        prop_assert_eq!(again, tour);
    }

    #[test]
    fn tsp_energy_identity(n in 3usize..6, seed in any::<u64>()) {
        let mut rng = Mt64::seed_from_u64(seed);
        let inst = TspInstance::random(n, 10.0, &mut rng).unwrap();
        let q = tsp_to_qubo(&inst).unwrap();
        let tour = Tour::new(common::random_perm(n, &mut rng)).unwrap();
        let f = q.evaluate(&tour.to_solution()).unwrap();
        let shift = 2.0 * inst.penalty() * n as f64;
        prop_assert!((f + shift - tsp_cost(&inst, &tour).unwrap()).abs() <= 1e-9 * (1.0 + shift));
    }
}
