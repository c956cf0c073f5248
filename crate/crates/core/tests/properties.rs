use proptest::prelude::*;

use specfilter::filters::{
    apply_exact, apply_spatial, cayley_seminorm, filter_matrix, FilterSpec,
};
use specfilter::graph::{
    build_shift, gen_geometric_graph, perturb, permute_shift, Permutation, PerturbationMode,
    ShiftKind,
};
use specfilter::io::{graph_to_json, parse_graph, parse_signals, signals_to_csv};
use specfilter::linalg::{
    cayley_transform, eig_symmetric, spectral_norm, spectral_norm_real, spectral_norm_symmetric,
    unitarity_defect, vec_dist, vec_norm, Cx, Matrix,
};
use specfilter::rng::{derive_seed, Rng};
use specfilter::stability::{
    check_equivariance, check_lemma1, op_distance, random_spec, random_symmetric, theorem1_bound,
};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

fn kind() -> impl Strategy<Value = ShiftKind> {
    prop_oneof![
        Just(ShiftKind::Unnormalized),
        Just(ShiftKind::Normalized),
        Just(ShiftKind::NormalizedTranslated),
        Just(ShiftKind::Adjacency),
    ]
}

fn signal(n: usize, rng: &mut Rng) -> Vec<Cx> {
    (0..n).map(|_| Cx::new(rng.normal(), rng.normal())).collect()
}

fn random_cayley(order: usize, rng: &mut Rng) -> FilterSpec {
    let coeffs = (0..=order).map(|_| Cx::new(rng.normal(), rng.normal())).collect();
    FilterSpec::cayley(coeffs, false).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn graph_json_round_trip(n in 2usize..20, seed in any::<u64>(), width in 0.1f64..1.0) {
        let g = gen_geometric_graph(n, seed, width).unwrap();
        let back = parse_graph(&graph_to_json(&g)).unwrap();
        prop_assert_eq!(back.n(), g.n());
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.coords(), g.coords());
    }

    #[test]
    fn signal_csv_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e300f64..1e300, 5), 1..6)) {
        let cx: Vec<Vec<Cx>> = rows.iter().map(|r| r.iter().map(|&x| Cx::real(x)).collect()).collect();
        let back = parse_signals(&signals_to_csv(&cx, false), Some(5)).unwrap();
        prop_assert_eq!(back, rows);
    }

    #[test]
    fn rng_streams_are_reproducible(seed in any::<u64>(), path in prop::collection::vec(any::<u64>(), 0..4)) {
        let child = derive_seed(seed, &path);
        prop_assert_eq!(child, derive_seed(seed, &path));
        let mut a = Rng::new(child);
        let mut b = Rng::new(child);
        for _ in 0..32 {
            prop_assert_eq!(a.normal().to_bits(), b.normal().to_bits());
            let u = a.uniform();
            prop_assert_eq!(u.to_bits(), b.uniform().to_bits());
            prop_assert!((0.0..1.0).contains(&u));
        }
        let mut extended = path.clone();
        extended.push(0);
        prop_assert_ne!(derive_seed(seed, &extended), child);
    }

    #[test]
    fn eigendecomposition_reconstructs(n in 1usize..14, seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let a = random_symmetric(n, &mut rng);
        let eig = eig_symmetric(&a).unwrap();
        let scale = a.max_abs().max(1.0);
        prop_assert!(eig.reconstruct().sub(&a).max_abs() <= 1e-11 * scale * n as f64);
        let v = &eig.eigenvectors;
        prop_assert!(v.transpose().matmul(v).sub(&Matrix::identity(n)).max_abs() <= 1e-12 * n as f64);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn norms_are_consistent(n in 1usize..12, seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let a = random_symmetric(n, &mut rng);
        let sym = spectral_norm_symmetric(&a);
        let real = spectral_norm_real(&a);
        let complex = spectral_norm(&a.to_complex());
        let tol = 1e-10 * sym.max(1.0);
        prop_assert!((sym - real).abs() <= tol);
        prop_assert!((sym - complex).abs() <= tol);
        prop_assert!(sym <= a.frobenius() + tol);
        prop_assert!(a.frobenius() <= (n as f64).sqrt() * sym + tol);
    }

    #[test]
    fn cayley_transform_is_unitary(n in 1usize..12, seed in any::<u64>(), scale in 0.01f64..100.0) {
        let mut rng = Rng::new(seed);
        let a = random_symmetric(n, &mut rng).scale(scale);
        prop_assert!(unitarity_defect(&cayley_transform(&a).unwrap()) <= 1e-10);
        for _ in 0..8 {
            let x = rng.normal() * scale;
            prop_assert!((Cx::cayley(x).abs() - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn exact_and_spatial_paths_agree(n in 2usize..12, seed in any::<u64>(), kind in kind()) {
        let g = gen_geometric_graph(n, seed, 0.5).unwrap();
        let s = build_shift(&g, kind).unwrap();
        let mut rng = Rng::new(derive_seed(seed, &[1]));
        let rho = spectral_norm_symmetric(s.matrix()).max(1.0);
        let spec = random_spec(5, rho, &mut rng).unwrap();
        let f = signal(n, &mut rng);
        let exact = apply_exact(&spec, &s, &f).unwrap();
        let spatial = apply_spatial(&spec, &s, &f).unwrap();
        let op = spectral_norm(&filter_matrix(&spec, &s).unwrap());
        prop_assert!(vec_dist(&exact, &spatial) <= 1e-8 * op.max(1e-300) * vec_norm(&f));
    }

    #[test]
    fn filters_commute_with_relabeling(n in 2usize..12, seed in any::<u64>(), kind in kind()) {
        let g = gen_geometric_graph(n, seed, 0.5).unwrap();
        let s = build_shift(&g, kind).unwrap();
        let mut rng = Rng::new(derive_seed(seed, &[2]));
        let rho = spectral_norm_symmetric(s.matrix()).max(1.0);
        let spec = random_spec(4, rho, &mut rng).unwrap();
        let p = Permutation::random(n, derive_seed(seed, &[3]));
        let f = signal(n, &mut rng);
        prop_assert!(check_equivariance(&spec, &s, &p, &f).unwrap() <= 1e-9);
        let back = permute_shift(&permute_shift(&s, &p).unwrap(), &p.inverse()).unwrap();
        prop_assert_eq!(back.matrix(), s.matrix());
    }

    #[test]
    fn bound_scales_with_seminorm(semi in 0.0f64..1e3, k in 0.0f64..10.0, shift in 0.0f64..100.0, e in 0.0f64..0.99) {
        let base = theorem1_bound(semi, shift, e).unwrap();
        let scaled = theorem1_bound(k * semi, shift, e).unwrap();
        prop_assert!((scaled - k * base).abs() <= 1e-12 * scaled.abs().max(1e-300));
        let larger = theorem1_bound(semi, shift, (e + 0.005).min(0.995)).unwrap();
        prop_assert!(larger >= base);
        prop_assert!(theorem1_bound(semi, shift, 1.0).is_err());
    }

    #[test]
    fn difference_of_powers_is_bounded(n in 1usize..8, seed in any::<u64>(), l in 0u32..7) {
        let mut rng = Rng::new(seed);
        let b = random_symmetric(n, &mut rng);
        let d = b.add(&random_symmetric(n, &mut rng).scale(0.1));
        prop_assert!(check_lemma1(&b, &d, l).unwrap().holds);
    }

    #[test]
    fn cayley_filters_obey_the_bound(
        n in 3usize..12,
        seed in any::<u64>(),
        kind in kind(),
        order in 1usize..5,
        magnitude in 1e-5f64..0.5,
    ) {
        let g = gen_geometric_graph(n, seed, 0.5).unwrap();
        let s = build_shift(&g, kind).unwrap();
        let mut rng = Rng::new(derive_seed(seed, &[4]));
        let spec = random_cayley(order, &mut rng);
        let (s2, e) = perturb(&s, PerturbationMode::DenseGaussian, magnitude, derive_seed(seed, &[5]), false).unwrap();
        let bound = theorem1_bound(
            cayley_seminorm(&spec).unwrap().value(),
            spectral_norm_symmetric(s.matrix()),
            e.op_norm(),
        ).unwrap();
        prop_assert!(op_distance(&spec, &s, &s2).unwrap() <= bound * (1.0 + 1e-9));
    }
}
