use hessqr::driver::{deflate, solve, SolveConfig};
use hessqr::iqr::{comp_tau, iqr_multi, potential_pow};
use hessqr::numkernel::c;
use hessqr::oracle::{iqr_exact, matched_distance, resolvent_tau};
use hessqr::ritz::{regularize, RegularizationParams};
use hessqr::shifting::{build_net, find};
use hessqr::{Complex, DenseMatrix, HessenbergMatrix, ShiftList};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

fn hessenberg(n: usize, seed: u64) -> HessenbergMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    HessenbergMatrix::from_dense_truncated(DenseMatrix::from_fn(n, |_, _| {
        c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    }))
}

fn shift() -> impl Strategy<Value = C> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iqr_preserves_structure_and_norm(n in 3usize..20, seed in any::<u64>(), s in prop::collection::vec(shift(), 1..5)) {
        let h = hessenberg(n, seed);
        let out = iqr_multi(&h, &ShiftList::new(s.clone()).unwrap()).unwrap();
        prop_assert!(out.next_h.as_dense().is_upper_hessenberg());
        prop_assert_eq!(out.r_nn_per_step.len(), s.len());
        prop_assert!(out.r_nn_per_step.iter().all(|&r| r >= 0.0));
        let drift = (out.next_h.frobenius() - h.frobenius()).abs();
        prop_assert!(drift <= 1e-13 * (n * s.len()) as f64 * h.frobenius());
    }

    #[test]
    fn iqr_tracks_the_exact_step(n in 3usize..10, seed in any::<u64>(), s in shift()) {
        let h = hessenberg(n, seed);
        let p = ShiftList::single(s).unwrap();
        let approx = iqr_multi(&h, &p).unwrap().next_h;
        let (exact, _) = iqr_exact(&h, &p).unwrap();
        let err = approx.as_dense().cast().sub(&exact).frobenius();
        let tau = resolvent_tau(&h, &p).unwrap();
        // forward error scales with ‖H‖ / τ
        prop_assert!(err <= 1e-12 * h.frobenius() * (1.0 + h.frobenius() / tau));
    }

    #[test]
    fn comp_tau_matches_resolvent(n in 3usize..10, seed in any::<u64>(), s in prop::collection::vec(shift(), 1..4)) {
        let h = hessenberg(n, seed);
        let p = ShiftList::new(s).unwrap();
        let exact = resolvent_tau(&h, &p).unwrap();
        prop_assume!(exact > 1e-6);
        let approx = comp_tau(&h, &p).unwrap();
        prop_assert!((approx - exact).abs() <= 1e-3 * exact);
    }

    #[test]
    fn potential_is_the_subdiagonal_product(n in 3usize..16, k in 1usize..3, seed in any::<u64>()) {
        let h = hessenberg(n, seed);
        let direct: f64 = (n - k..n).map(|i| h.sub(i).norm()).product();
        prop_assert!((potential_pow(&h, k).unwrap().to_f64() - direct).abs() <= 1e-14 * direct);
    }

    #[test]
    fn find_returns_a_ritz_value(seed in any::<u64>(), logk in 0u32..4) {
        let k = 1usize << logk;
        let h = hessenberg(k + 4, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let ritz: Vec<C> = (0..k).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let r = find(&h, &ShiftList::new(ritz.clone()).unwrap()).unwrap();
        prop_assert!(ritz.contains(&r));
    }

    #[test]
    fn regularized_values_stay_in_their_disks(seed in any::<u64>(), eta2 in 1e-9f64..1.0, s in prop::collection::vec(shift(), 1..8)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = RegularizationParams { eta1: eta2 / 10.0, eta2, beta: 2.0 * eta2 };
        let r = ShiftList::new(s.clone()).unwrap();
        let out = regularize(&r, &params, &mut rng).unwrap();
        for (a, b) in s.iter().zip(out.roots()) {
            prop_assert!((a - b).norm() <= eta2 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn deflation_partitions_rows(n in 4usize..20, seed in any::<u64>(), cut in prop::collection::vec(any::<bool>(), 19)) {
        let mut h = hessenberg(n, seed);
        for i in 1..n {
            if cut[i - 1] {
                h.set(i, i - 1, c(1e-12, 0.0));
            }
        }
        let blocks = deflate(&h, 1e-9, n - 1);
        let mut next = 0;
        for (offset, b) in &blocks {
            prop_assert_eq!(*offset, next);
            prop_assert!((1..b.n()).all(|i| b.sub(i).norm() > 1e-9));
            next += b.n();
        }
        prop_assert_eq!(next, n);
    }

    #[test]
    fn net_points_lie_in_the_disk(eps in 0.02f64..2.0) {
        let net = build_net(eps).unwrap();
        prop_assert!(net.iter().all(|z| z.norm() <= 1.0 + 1.99 * eps));
    }

    #[test]
    fn matching_ignores_order(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<C> = (0..n).map(|_| c(rng.random(), rng.random())).collect();
        let mut b = a.clone();
        b.reverse();
        prop_assert_eq!(matched_distance(&a, &b).unwrap(), 0.0);
    }
}

#[test]
fn solve_is_reproducible_for_a_seed() {
    let h = hessenberg(14, 3).into_dense();
    let cfg = SolveConfig {
        b: Some(2.0),
        gap: Some(1e-3),
        degree: Some(4),
        seed: 21,
        ..Default::default()
    };
    let a = solve(&h, &cfg).unwrap();
    let b = solve(&h, &cfg).unwrap();
    assert_eq!(a.eigenvalues, b.eigenvalues);
    assert_eq!(a.tree, b.tree);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let c = pool.install(|| solve(&h, &cfg)).unwrap();
    assert_eq!(a.eigenvalues, c.eigenvalues);
    assert_eq!(a.tree, c.tree);
}

#[test]
fn different_seeds_agree_on_the_spectrum() {
    let h = hessenberg(14, 4).into_dense();
    let run = |seed| {
        let cfg = SolveConfig {
            b: Some(2.0),
            gap: Some(1e-3),
            degree: Some(4),
            seed,
            perturb: false,
            ..Default::default()
        };
        solve(&h, &cfg).unwrap().eigenvalues
    };
    let d = matched_distance(&run(1), &run(2)).unwrap();
    assert!(d < 1e-8, "{d}");
}
