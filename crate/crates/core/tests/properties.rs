use proptest::prelude::*;

use specmix::complexes::{
    combinations, gen_complex, gen_hypergraph, orientation_sign, ComplexKind, Hypergraph, HypergraphKind, SimplicialComplex,
};
use specmix::hypergraph_mixing::{hypergraph_ratio, rho_alpha, rho_envelope};
use specmix::lemma_lab::{dyadic_decompose, sign_split};
use specmix::report::{DisjointTuple, EnumerationMode};
use specmix::simplicial_mixing::{count_f, rho_simplicial, simplicial_ratio, verify_mixing_simplicial};
use specmix::simplicial_ops::{kernel_basis, operator_matrix, restricted_norm, OperatorKind, DEFAULT_KERNEL_TOL};
use specmix::sweep::Budget;
use specmix::tensor_forms::{count_e, eval_form, indicator, make_form, spectral_norm_estimate, EstimatorOptions, FormKind};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

fn lm_complex(n: usize, d: usize, p: f64, seed: u64) -> SimplicialComplex {
    gen_complex(ComplexKind::LinialMeshulam { p, seed }, n, d).unwrap()
}

fn gnp(n: usize, k: usize, alpha: f64, seed: u64) -> Hypergraph {
    gen_hypergraph(HypergraphKind::Gnp { alpha, seed }, n, k).unwrap()
}

/// Vertex labels `0..=parts` drawn per vertex; label 0 leaves the vertex out.
fn tuple_from(labels: &[u8], parts: usize) -> DisjointTuple {
    let mut out = vec![Vec::new(); parts];
    for (v, &l) in labels.iter().enumerate() {
        if l > 0 {
            out[l as usize - 1].push(v);
        }
    }
    DisjointTuple::new(out).unwrap()
}

fn relabel(h: &Hypergraph, perm: &[usize]) -> Hypergraph {
    let edges = h.edges().iter().map(|e| e.iter().map(|&v| perm[v]).collect()).collect();
    Hypergraph::from_unsorted(h.n(), h.k(), edges).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn orientation_sign_is_swap_symmetric(n in 3usize..=8, d in 1usize..=3, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        prop_assume!(d < n);
        let cells = combinations(n, d);
        let s = &cells[a.index(cells.len())];
        let t = &cells[b.index(cells.len())];
        let shared = s.iter().filter(|v| t.contains(v)).count();
        prop_assume!(shared + 1 >= d);
        prop_assert_eq!(orientation_sign(s, t).unwrap(), orientation_sign(t, s).unwrap());
    }

    #[test]
    fn degree_double_counting(n in 4usize..=9, k in 2usize..=4, alpha in 0.0f64..=1.0, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let h = gnp(n, k, alpha, seed);
        prop_assert_eq!(h.degree_profile().total(), k * h.edges().len());
        let x = lm_complex(n, k - 1, alpha, seed);
        prop_assert_eq!(x.degree_profile().total(), k * x.facets().len());
    }

    #[test]
    fn operator_identities(n in 4usize..=7, d in 1usize..=2, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let x = lm_complex(n, d, p, seed);
        let a = operator_matrix(&x, OperatorKind::Adjacency).unwrap();
        prop_assert_eq!(&a.matrix, &a.matrix.transpose());
        let deg = operator_matrix(&x, OperatorKind::Degree).unwrap();
        let lap = operator_matrix(&x, OperatorKind::Laplacian).unwrap();
        prop_assert_eq!(&lap.matrix, &(&deg.matrix - &a.matrix));

        let basis = kernel_basis(&x, DEFAULT_KERNEL_TOL);
        prop_assert!(restricted_norm(&a, &basis).unwrap() <= a.spectral_norm() + 1e-10);
        let j = operator_matrix(&x, OperatorKind::AllPairs).unwrap();
        let jq = &j.matrix * &basis.basis;
        prop_assert!(jq.iter().all(|v| v.abs() <= 1e-8));
    }

    #[test]
    fn f_is_additive_and_part_symmetric(n in 4usize..=8, p in 0.2f64..=1.0, seed in any::<u64>(),
                                         labels in prop::collection::vec(0u8..=3, 8), split in prop::collection::vec(any::<bool>(), 8)) {
        let x = lm_complex(n, 2, p, seed);
        let t = tuple_from(&labels[..n], 3);
        let whole = count_f(&x, &t).unwrap();
        let (left, right): (Vec<usize>, Vec<usize>) = t.parts[0].iter().partition(|&&v| split[v]);
        let with = |s0: Vec<usize>| DisjointTuple::new(vec![s0, t.parts[1].clone(), t.parts[2].clone()]).unwrap();
        prop_assert_eq!(whole, count_f(&x, &with(left)).unwrap() + count_f(&x, &with(right)).unwrap());
        let rotated = DisjointTuple::new(vec![t.parts[2].clone(), t.parts[0].clone(), t.parts[1].clone()]).unwrap();
        prop_assert_eq!(whole, count_f(&x, &rotated).unwrap());
    }

    #[test]
    fn simplicial_rho_modes_are_ordered_and_witness_reproduces(n in 4usize..=7, p in 0.0f64..=1.0, seed in any::<u64>(), alpha in 0.0f64..=5.0) {
        let x = lm_complex(n, 2, p, seed);
        let budget = Budget::default();
        let full = rho_simplicial(&x, alpha, &EnumerationMode::Exhaustive, budget).unwrap();
        let tail = rho_simplicial(&x, alpha, &EnumerationMode::SingletonTail, budget).unwrap();
        let sampled = rho_simplicial(&x, alpha, &EnumerationMode::Sample { count: 300, seed }, budget).unwrap();
        prop_assert!(full.rho >= tail.rho && tail.rho >= sampled.rho);
        let w = full.witness.unwrap();
        prop_assert_eq!(simplicial_ratio(count_f(&x, &w).unwrap(), &w.sizes(), alpha, n), full.rho);
    }

    #[test]
    fn simplicial_mixing_never_fails(n in 4usize..=7, p in 0.0f64..=1.0, seed in any::<u64>(), alpha in 0.0f64..=5.0) {
        let x = lm_complex(n, 2, p, seed);
        let rep = verify_mixing_simplicial(&x, alpha, Budget::default()).unwrap();
        prop_assert!(rep.pass && rep.min_margin.unwrap() >= -1e-8);
    }

    #[test]
    fn form_symmetry_and_multilinearity(n in 3usize..=7, k in 2usize..=3, alpha in 0.0f64..=1.0, seed in any::<u64>(),
                                        raw in prop::collection::vec(-1.0f64..1.0, 28), c in -2.0f64..2.0) {
        prop_assume!(k <= n);
        let h = gnp(n, k, 0.5, seed);
        let xs: Vec<&[f64]> = raw.chunks(7).take(k + 1).map(|v| &v[..n]).collect();
        for kind in [FormKind::Adjacency, FormKind::Complete, FormKind::AllOnes, FormKind::DiagonalGap, FormKind::DensityShift { alpha }, FormKind::FriedmanWigderson] {
            let phi = make_form(kind, &h);
            let base = eval_form(&phi, &xs[..k]).unwrap();
            let mut rev = xs[..k].to_vec();
            rev.reverse();
            prop_assert!((eval_form(&phi, &rev).unwrap() - base).abs() <= 1e-10 * (1.0 + base.abs()));
            let mixed: Vec<f64> = xs[0].iter().zip(xs[k]).map(|(a, b)| a + c * b).collect();
            let mut swapped = xs[..k].to_vec();
            swapped[0] = xs[k];
            let other = eval_form(&phi, &swapped).unwrap();
            let mut combo = xs[..k].to_vec();
            combo[0] = &mixed;
            let lhs = eval_form(&phi, &combo).unwrap();
            prop_assert!((lhs - (base + c * other)).abs() <= 1e-10 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn count_e_matches_indicator_evaluation(n in 3usize..=12, k in 2usize..=3, seed in any::<u64>(), masks in prop::collection::vec(any::<u16>(), 3)) {
        prop_assume!(k <= n);
        let h = gnp(n, k, 0.5, seed);
        let sets: Vec<Vec<usize>> = masks[..k].iter().map(|m| (0..n).filter(|v| m >> v & 1 == 1).collect()).collect();
        let ind: Vec<Vec<f64>> = sets.iter().map(|s| indicator(n, s)).collect();
        let refs: Vec<&[f64]> = ind.iter().map(Vec::as_slice).collect();
        prop_assert_eq!(count_e(&h, &sets).unwrap() as f64, eval_form(&make_form(FormKind::Adjacency, &h), &refs).unwrap());
    }

    #[test]
    fn more_starts_never_lower_the_estimate(n in 4usize..=7, seed in any::<u64>(), starts in 1usize..6) {
        let h = gnp(n, 3, 0.5, seed);
        let phi = make_form(FormKind::DensityShift { alpha: 0.5 }, &h);
        let opts = |s| EstimatorOptions { starts: s, seed, ..EstimatorOptions::default() };
        let few = spectral_norm_estimate(&phi, &opts(starts), &[], &[]).unwrap();
        let many = spectral_norm_estimate(&phi, &opts(starts + 3), &[], &[]).unwrap();
        prop_assert!(many.value >= few.value);
    }

    #[test]
    fn hypergraph_rho_bounds_and_relabeling(n in 4usize..=8, alpha in 0.05f64..0.95, seed in any::<u64>(), perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle()) {
        let h = gnp(n, 3, alpha, seed);
        let budget = Budget::default();
        let full = rho_alpha(&h, alpha, &EnumerationMode::Exhaustive, budget).unwrap();
        let wit = rho_alpha(&h, alpha, &EnumerationMode::SingletonWitness, budget).unwrap();
        let env = rho_envelope(n, 3, h.max_degree(), alpha, 0.5).unwrap();
        prop_assert!(full.rho >= wit.rho && wit.rho >= 0.0);
        prop_assert!(full.rho <= env.sanity_upper + 1e-9);
        prop_assert!(wit.rho >= env.witness_lower - 1e-9);
        let w = full.witness.clone().unwrap();
        prop_assert_eq!(hypergraph_ratio(count_e(&h, &w.parts).unwrap(), &w.sizes(), alpha), full.rho);

        let perm: Vec<usize> = perm.into_iter().filter(|&v| v < n).collect();
        let moved = rho_alpha(&relabel(&h, &perm), alpha, &EnumerationMode::Exhaustive, budget).unwrap();
        prop_assert!((moved.rho - full.rho).abs() <= 1e-12 * (1.0 + full.rho));
    }

    #[test]
    fn generation_is_worker_independent(n in 4usize..=9, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let pool = |w| rayon::ThreadPoolBuilder::new().num_threads(w).build().unwrap();
        let one = pool(1).install(|| (lm_complex(n, 2, p, seed), gnp(n, 3, p, seed)));
        let many = pool(6).install(|| (lm_complex(n, 2, p, seed), gnp(n, 3, p, seed)));
        prop_assert_eq!(one, many);
    }

    #[test]
    fn dyadic_roundtrip(levels in prop::collection::vec(prop::option::of((0u32..1075, any::<bool>())), 1..16)) {
        let x: Vec<f64> = levels
            .iter()
            .map(|l| l.map_or(0.0, |(e, neg)| if neg { -(-f64::from(e)).exp2() } else { (-f64::from(e)).exp2() }))
            .collect();
        let d = dyadic_decompose(&x).unwrap();
        prop_assert_eq!(d.reconstruct(), x);
        for (j, _) in levels.iter().enumerate() {
            prop_assert!(d.layers.iter().filter(|l| l[j] != 0).count() <= 1);
        }
    }

    #[test]
    fn sign_split_recombines(x in prop::collection::vec(-1i8..=1, 0..20)) {
        let (plus, minus) = sign_split(&x).unwrap();
        for i in 0..x.len() {
            prop_assert_eq!(i16::from(plus[i]) - i16::from(minus[i]), i16::from(x[i]));
            prop_assert!(plus[i] == 0 || minus[i] == 0);
        }
    }
}

#[test]
fn regular_alpha_shift_matches_adjacency_on_cycles() {
    for (n, d) in [(5, 1), (6, 2), (7, 2), (6, 3)] {
        let x = gen_complex(ComplexKind::Complete, n, d).unwrap();
        let r = x.degree_profile().max as f64;
        let basis = kernel_basis(&x, DEFAULT_KERNEL_TOL);
        let a = restricted_norm(&operator_matrix(&x, OperatorKind::Adjacency).unwrap(), &basis).unwrap();
        let s = restricted_norm(&operator_matrix(&x, OperatorKind::AlphaShift(r)).unwrap(), &basis).unwrap();
        assert!((a - s).abs() <= 1e-10, "n={n} d={d}: {a} vs {s}");
    }
}
