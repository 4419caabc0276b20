//! Randomized structural invariants, driven by proptest.
//!
//! Each property draws small shape parameters plus a 64-bit seed and builds
//! its random objects from a seeded generator, so failures shrink to a
//! minimal (shape, seed) pair and replay deterministically.

use proptest::prelude::*;
use rand::Rng;

use qcomm::commsim::{
    ceil_log2, decode_index, disj_eval, encode_index, sk_eval, sk_protocol_right_start, sk_to_disj,
    InstanceFile, PjInstance, PublicCoins, SkInstance,
};
use qcomm::linalg::{hermiticity_deviation, trace_re, CMatrix};
use qcomm::metrics::{
    binary_entropy, classical_fidelity, fidelity, hellinger, l1_distance, relative_entropy,
    trace_distance, von_neumann_entropy, Distribution, ExtendedReal,
};
use qcomm::qsim::safe_storage_transform;
use qcomm::quantum::{
    derive_seed, hermitian_fn, partial_trace, random_channel, random_density, random_povm,
    rng_from_seed, tensor, DensityMatrix, MatrixFn, PureState, TensorLayout,
};
use qcomm::suites::{run_suite, SuiteId};
use qcomm::Tolerances;

/// Largest absolute entry of `a − b`.
fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A density matrix drawn from the Ginibre ensemble at the given shape.
fn density(dim: usize, rank: usize, seed: u64) -> DensityMatrix {
    random_density(dim, rank, &mut rng_from_seed(seed)).unwrap()
}

proptest! {
    // ---- quantum-core invariants ------------------------------------------

    /// Every sampled density matrix re-validates: Hermitian within 1e-9,
    /// eigenvalues ≥ −1e-9, trace within 1e-9 of one.
    #[test]
    fn sampled_density_revalidates(dim in 2usize..=8, rank_off in 0usize..8, seed in any::<u64>()) {
        let rank = 1 + rank_off % dim;
        let rho = density(dim, rank, seed);
        prop_assert!(hermiticity_deviation(rho.matrix()).unwrap() <= 1e-9);
        prop_assert!(rho.eigenvalues().iter().all(|&v| v >= -1e-9));
        prop_assert!((rho.eigenvalues().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(DensityMatrix::new(rho.matrix().clone(), &Tolerances::default()).is_ok());
        prop_assert!(rho.rank() <= dim);
        prop_assert!(rho.purity() <= 1.0 + 1e-9);
    }

    /// Tracing out an independent factor recovers the other factor exactly.
    #[test]
    fn partial_trace_inverts_tensor(da in 2usize..=4, db in 2usize..=4, seed in any::<u64>()) {
        let a = density(da, da, seed);
        let b = density(db, db, derive_seed(seed, 1));
        let joint = tensor(&a, &b);
        let layout = TensorLayout::bipartite(da, db);
        let got_a = partial_trace(&joint, &layout, &[0]).unwrap();
        let got_b = partial_trace(&joint, &layout, &[1]).unwrap();
        prop_assert!(max_entry_diff(got_a.matrix(), a.matrix()) <= 1e-10);
        prop_assert!(max_entry_diff(got_b.matrix(), b.matrix()) <= 1e-10);
        prop_assert!((trace_re(got_a.matrix()) - 1.0).abs() <= 1e-10);
    }

    /// Channels output valid density matrices: trace preserved, PSD kept.
    #[test]
    fn channel_preserves_density_invariants(
        dim in 2usize..=6,
        kraus in 1usize..=4,
        rank_off in 0usize..6,
        seed in any::<u64>(),
    ) {
        let rank = 1 + rank_off % dim;
        let t = random_channel(dim, kraus, &mut rng_from_seed(seed)).unwrap();
        let rho = density(dim, rank, derive_seed(seed, 1));
        let out = t.apply(&rho).unwrap();
        prop_assert!((trace_re(out.matrix()) - 1.0).abs() <= 1e-9);
        prop_assert!(out.eigenvalues().iter().all(|&v| v >= -1e-9));
        prop_assert!(DensityMatrix::new(out.matrix().clone(), &Tolerances::default()).is_ok());
    }

    /// The principal square root squares back to its input.
    #[test]
    fn matrix_sqrt_squares_back(
        dim in 2usize..=8,
        rank_off in 0usize..8,
        scale in 0.1f64..10.0,
        seed in any::<u64>(),
    ) {
        let rank = 1 + rank_off % dim;
        // An arbitrary-trace PSD matrix: a density matrix times a positive scalar.
        let psd = density(dim, rank, seed).matrix().scale(scale);
        let root = hermitian_fn(&psd, MatrixFn::Sqrt, &Tolerances::default()).unwrap();
        prop_assert!(max_entry_diff(&(&root * &root), &psd) <= 1e-9 * scale.max(1.0));
    }

    /// Measurement outcomes form a probability vector.
    #[test]
    fn povm_outcomes_are_probabilities(
        dim in 2usize..=6,
        outcomes in 2usize..=8,
        seed in any::<u64>(),
    ) {
        let povm = random_povm(dim, outcomes, &mut rng_from_seed(seed)).unwrap();
        let rho = density(dim, dim, derive_seed(seed, 1));
        let probs = povm.measure(&rho).unwrap();
        prop_assert_eq!(probs.len(), outcomes);
        prop_assert!(probs.iter().all(|&p| (-1e-10..=1.0 + 1e-10).contains(&p)));
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    // ---- metric invariants ------------------------------------------------

    /// Trace distance: symmetric, in [0, 2], exactly 0 against itself.
    #[test]
    fn trace_distance_axioms(dim in 2usize..=6, seed in any::<u64>()) {
        let a = density(dim, dim, seed);
        let b = density(dim, 1 + (seed % dim as u64) as usize, derive_seed(seed, 1));
        let dab = trace_distance(&a, &b).unwrap();
        let dba = trace_distance(&b, &a).unwrap();
        prop_assert!((dab - dba).abs() <= 1e-10);
        prop_assert!((0.0..=2.0 + 1e-9).contains(&dab));
        prop_assert!(trace_distance(&a, &a).unwrap() <= 1e-14);
    }

    /// Fidelity: symmetric, in [0, 1], numerically 1 against itself; the
    /// Hellinger distance stays in [0, 1] and near 0 against itself.
    #[test]
    fn fidelity_and_hellinger_axioms(dim in 2usize..=6, seed in any::<u64>()) {
        let a = density(dim, dim, seed);
        let b = density(dim, 1 + (seed % dim as u64) as usize, derive_seed(seed, 1));
        let fab = fidelity(&a, &b).unwrap();
        prop_assert!((fab - fidelity(&b, &a).unwrap()).abs() <= 1e-9);
        prop_assert!((0.0..=1.0).contains(&fab));
        prop_assert!(fidelity(&a, &a).unwrap() >= 1.0 - 1e-12);
        let h = hellinger(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&h));
        // √ amplifies the ~1e-13 fidelity noise floor, hence the loose zero.
        prop_assert!(hellinger(&a, &a).unwrap() <= 1e-6);
    }

    /// Entropy: zero on pure states, maximal on the mixed state, bounded by
    /// log₂ dim in between.
    #[test]
    fn entropy_range(dim in 2usize..=8, rank_off in 0usize..8, seed in any::<u64>()) {
        let rank = 1 + rank_off % dim;
        let s = von_neumann_entropy(&density(dim, rank, seed));
        let cap = (dim as f64).log2();
        prop_assert!((-1e-9..=cap + 1e-9).contains(&s));
        let pure = DensityMatrix::from_pure(&PureState::basis(dim, 0).unwrap());
        prop_assert!(von_neumann_entropy(&pure).abs() <= 1e-9);
        let mixed = DensityMatrix::maximally_mixed(dim);
        prop_assert!((von_neumann_entropy(&mixed) - cap).abs() <= 1e-9);
    }

    /// Binary entropy: symmetric around ½, zero at the endpoints, peaked at ½.
    #[test]
    fn binary_entropy_shape(p in 0.0f64..=1.0) {
        let h = binary_entropy(p);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&h));
        prop_assert!((h - binary_entropy(1.0 - p)).abs() <= 1e-9);
        prop_assert!(binary_entropy(0.0) == 0.0 && binary_entropy(1.0) == 0.0);
        prop_assert!((binary_entropy(0.5) - 1.0).abs() <= 1e-12);
    }

    /// Relative entropy: nonnegative and zero against itself when finite;
    /// infinite exactly on support mismatch.
    #[test]
    fn relative_entropy_sign_and_support(dim in 2usize..=6, seed in any::<u64>()) {
        let full = density(dim, dim, seed);
        let low = density(dim, 1 + (seed % (dim as u64 - 1)) as usize, derive_seed(seed, 1));
        match relative_entropy(&full, &low).unwrap() {
            // Full-rank ρ₁ always has weight outside a rank-deficient ρ₂.
            ExtendedReal::Infinite => {}
            ExtendedReal::Finite(v) => prop_assert!(false, "expected support mismatch, got {v}"),
        }
        match relative_entropy(&low, &full).unwrap() {
            ExtendedReal::Finite(v) => prop_assert!(v >= -1e-9),
            ExtendedReal::Infinite => prop_assert!(false, "full-rank ρ₂ cannot mismatch"),
        }
        match relative_entropy(&full, &full).unwrap() {
            ExtendedReal::Finite(v) => prop_assert!(v.abs() <= 1e-9),
            ExtendedReal::Infinite => prop_assert!(false, "self-divergence must be finite"),
        }
    }

    /// Classical distributions respect the same fidelity/distance ranges.
    #[test]
    fn classical_metric_ranges(n in 2usize..=16, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let draw = |rng: &mut rand_chacha::ChaCha12Rng| {
            let raw: Vec<f64> = (0..n).map(|_| -(rng.gen::<f64>().max(1e-12)).ln()).collect();
            let total: f64 = raw.iter().sum();
            Distribution::new(raw.into_iter().map(|v| v / total).collect()).unwrap()
        };
        let p = draw(&mut rng);
        let q = draw(&mut rng);
        let f = classical_fidelity(&p, &q).unwrap();
        prop_assert!((0.0..=1.0 + 1e-9).contains(&f));
        prop_assert!((f - classical_fidelity(&q, &p).unwrap()).abs() <= 1e-12);
        let l1 = l1_distance(&p, &q).unwrap();
        prop_assert!((0.0..=2.0 + 1e-12).contains(&l1));
        prop_assert!(l1_distance(&p, &p).unwrap() == 0.0);
    }

    // ---- protocol bookkeeping invariants -----------------------------------

    /// Index codecs roundtrip at every width that fits.
    #[test]
    fn index_codec_roundtrip(width in 1usize..=16, value in any::<usize>()) {
        let v = value & ((1 << width) - 1);
        let bits = encode_index(v, width);
        prop_assert_eq!(bits.len(), width);
        prop_assert_eq!(decode_index(&bits), v);
    }

    /// `ceil_log2` is the least width that covers the domain.
    #[test]
    fn ceil_log2_minimal(n in 1usize..=1_000_000) {
        let w = ceil_log2(n);
        prop_assert!(n <= 1 << w);
        prop_assert!(w == 0 || n > 1 << (w - 1));
    }

    /// Random pointer-chasing instances validate, roundtrip through JSON,
    /// and the right-start protocol agrees with the oracle in `k` rounds.
    #[test]
    fn pointer_chasing_roundtrip(n in 2usize..=5, k in 1usize..=3, seed in any::<u64>()) {
        let inst = SkInstance::random(n, k, &mut rng_from_seed(seed)).unwrap();
        prop_assert!(inst.validate().is_ok());
        let file = InstanceFile::Sk { n, k, root: inst.clone() };
        match InstanceFile::from_json(&file.to_json()).unwrap() {
            InstanceFile::Sk { root, .. } => prop_assert_eq!(&root, &inst),
            _ => prop_assert!(false, "variant changed in flight"),
        }
        let run = sk_protocol_right_start(&inst).unwrap();
        prop_assert_eq!(run.output, sk_eval(&inst).unwrap());
        prop_assert_eq!(run.transcript.rounds(), k);
        prop_assert!(run.transcript.round_bits().iter().all(|&b| b == ceil_log2(n)));
    }

    /// The disjointness reduction never produces two witnesses and always
    /// agrees with the pointer-chasing oracle.
    #[test]
    fn disjointness_reduction_sound(n in 2usize..=4, k in 1usize..=3, seed in any::<u64>()) {
        let inst = SkInstance::random(n, k, &mut rng_from_seed(seed)).unwrap();
        let disj = sk_to_disj(&inst).unwrap();
        prop_assert!(disj.intersection().len() <= 1);
        prop_assert_eq!(disj_eval(&disj), sk_eval(&inst).unwrap());
    }

    /// Shared coins replay bit-for-bit from the same seed and sampled sets
    /// are distinct in-range indices.
    #[test]
    fn public_coins_replay(seed in any::<u64>(), bound in 1usize..=1000, count_off in 0usize..=1000) {
        let count = count_off % (bound + 1);
        let mut c1 = PublicCoins::new(seed);
        let mut c2 = PublicCoins::new(seed);
        let s1 = c1.sample_distinct(bound, count).unwrap();
        let s2 = c2.sample_distinct(bound, count).unwrap();
        prop_assert_eq!(&s1, &s2);
        prop_assert_eq!(c1.draws(), c2.draws());
        prop_assert_eq!(s1.len(), count);
        let mut sorted = s1.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), count);
        prop_assert!(s1.iter().all(|&v| v < bound));
        prop_assert_eq!(c1.index(bound), c2.index(bound));
        prop_assert_eq!(c1.unit().to_bits(), c2.unit().to_bits());
    }

    /// Fixing message lengths pays exactly the per-round worst case.
    #[test]
    fn safe_storage_is_pointwise_max(
        branches in prop::collection::vec(prop::collection::vec(0usize..50, 0..6), 1..5),
    ) {
        let fixed = safe_storage_transform(&branches).unwrap();
        let rounds = branches.iter().map(Vec::len).max().unwrap_or(0);
        prop_assert_eq!(fixed.len(), rounds);
        for (r, &len) in fixed.iter().enumerate() {
            let want = branches.iter().map(|b| b.get(r).copied().unwrap_or(0)).max().unwrap();
            prop_assert_eq!(len, want);
        }
        // A single branch is already fixed-length: the transform is identity.
        let lone = safe_storage_transform(&branches[..1]).unwrap();
        prop_assert_eq!(lone, branches[0].clone());
    }

    /// Pointer-jumping instances roundtrip through the instance file format.
    #[test]
    fn pointer_jumping_roundtrip(n in 2usize..=16, seed in any::<u64>()) {
        let inst = PjInstance::random(n, &mut rng_from_seed(seed)).unwrap();
        let file = InstanceFile::Pj { n, f_a: inst.f_a().to_vec(), f_b: inst.f_b().to_vec() };
        match InstanceFile::from_json(&file.to_json()).unwrap() {
            InstanceFile::Pj { f_a, f_b, .. } => {
                prop_assert_eq!(PjInstance::new(f_a, f_b).unwrap(), inst);
            }
            _ => prop_assert!(false, "variant changed in flight"),
        }
    }
}

proptest! {
    // Suite runs are heavier; a handful of cases suffices to pin determinism.
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// A suite run is a pure function of (id, trials, seed): replaying yields
    /// byte-identical serialized reports.
    #[test]
    fn suite_reports_replay_identically(seed in any::<u64>()) {
        let a = run_suite(SuiteId::MetricAxioms, Some(20), seed).unwrap();
        let b = run_suite(SuiteId::MetricAxioms, Some(20), seed).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        prop_assert_eq!(ja, jb);
    }
}
