use intertwine::discrete::{check_duality, DualityKind, IntertwiningMode, SiteSystem};
use intertwine::gsip::{uniform_cells, ConductanceFn, GsipModel};
use intertwine::orthopoly::{meixner, PolyParams};
use intertwine::pointconfig::{AlphaMeasure, Factor, Region, SymmetricFunctionSpec};
use intertwine::scalar::binomial;
use intertwine::verify::{
    consistency_check, detailed_balance_check, exact_intertwining_discrete, mc_classical_intertwining_gsip,
    stationarity_check_gsip,
};
use proptest::prelude::*;

fn system(sigma: i8, c01: f64, c02: f64, c12: f64, alpha: [f64; 3]) -> SiteSystem {
    let c = vec![vec![0.0, c01, c02], vec![c01, 0.0, c12], vec![c02, c12, 0.0]];
    let alpha = if sigma == -1 { alpha.map(|a| a.ceil()) } else { alpha };
    SiteSystem::new(3, c, alpha.to_vec(), sigma).unwrap()
}

fn weights() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(0.25f64..3.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn consistency_holds_for_any_rates(sigma in -1i8..=1, c01 in 0.1f64..2.0, c02 in 0.0f64..2.0,
                                       c12 in 0.1f64..2.0, alpha in weights()) {
        let sys = system(sigma, c01, c02, c12, alpha);
        let r = consistency_check(&sys, 2, true, 1e-12).unwrap();
        prop_assert_eq!(r.lhs, 0.0);
        prop_assert!(detailed_balance_check(&sys, 0.3, 2, 1e-12).unwrap().pass);
    }

    #[test]
    fn duality_for_any_time(sigma in -1i8..=1, t in 0.0f64..3.0, theta in 0.05f64..0.95,
                            alpha in weights(), kind_index in 0usize..3) {
        let sys = system(sigma, 1.0, 0.3, 0.8, alpha);
        let kind = DualityKind::ALL[kind_index];
        let r = check_duality(&sys, theta, kind, t, &[1, 0, 1], &[1, 1, 1], 1e-10).unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn meixner_convolution_any_parameters(a in 0.1f64..4.0, b in 0.1f64..4.0, p in 0.05f64..0.9,
                                          x in 0u64..8, y in 0u64..8, n in 0u32..6) {
        let joint = meixner(n, x + y, a + b, p);
        let split: f64 = (0..=n)
            .map(|k| binomial::<f64>(n.into(), k.into()) * meixner(k, x, a, p) * meixner(n - k, y, b, p))
            .sum();
        prop_assert!((joint - split).abs() <= 1e-9 * joint.abs().max(1.0));
    }

    #[test]
    fn orthogonal_intertwining_random_function(sigma in -1i8..=1, w in prop::array::uniform3(-1.0f64..1.0),
                                               t in 0.0f64..2.0) {
        let sys = system(sigma, 1.0, 0.5, 2.0, [2.0, 1.0, 1.5]);
        let f = SymmetricFunctionSpec::Tensor(vec![Factor::SiteWeights(w.to_vec()), Factor::SiteWeights(w.to_vec())]);
        let r = exact_intertwining_discrete(&sys, 2, 3, t, &f, IntertwiningMode::Orthogonal { theta: 0.3 }, 1e-9)
            .unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }
}

#[test]
fn two_site_inclusion_pair_function() {
    let sys = SiteSystem::new(2, vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![1.0, 2.0], 1).unwrap();
    let f = SymmetricFunctionSpec::Tensor(vec![Factor::SiteWeights(vec![1.0, 0.0]), Factor::SiteWeights(vec![0.3, 1.0])]);
    for mode in [IntertwiningMode::Classical, IntertwiningMode::Orthogonal { theta: 0.5 }] {
        let r = exact_intertwining_discrete(&sys, 2, 4, 1.0, &f, mode, 1e-9).unwrap();
        assert!(r.abs_diff < 1e-9, "{r:?}");
        let r = exact_intertwining_discrete(&sys, 2, 4, 0.0, &f, mode, 0.0).unwrap();
        assert_eq!(r.abs_diff, 0.0);
    }
}

#[test]
fn independent_walkers_transport_factorial_measures() {
    // sigma = 0 with alpha = 1: the factorial measure moves with the one-particle kernel
    let c = vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]];
    let sys = SiteSystem::new(3, c, vec![1.0; 3], 0).unwrap();
    let f = SymmetricFunctionSpec::tensor_indicator(&[Region::site(0), Region::site(2)], &[1, 1]).unwrap();
    for n_particles in 2..=4 {
        let r = exact_intertwining_discrete(&sys, 2, n_particles, 0.8, &f, IntertwiningMode::Classical, 1e-10).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn orthogonality_polynomials_degree_one_is_variance() {
    let params = PolyParams::Meixner { a: 1.0, p: 0.5 };
    assert!((params.quadrature(1, 1).unwrap() - 2.0).abs() < 1e-10);
}

#[test]
fn monte_carlo_reports_are_reproducible_across_thread_counts() {
    let model = GsipModel::new(
        AlphaMeasure::new(vec![0.5, 1.5], vec![]).unwrap(),
        ConductanceFn::PiecewiseConstant { d: vec![vec![1.0, 0.5], vec![0.5, 2.0]] },
    )
    .unwrap();
    let f = SymmetricFunctionSpec::Tensor(vec![Factor::CellLevels(vec![1.0, 0.3]), Factor::Indicator(Region::Interval(0.0, 0.7))]);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let a = mc_classical_intertwining_gsip(&model, &[0.1, 0.4, 0.8], &f, 0.5, 3000, 5).unwrap();
            let b = stationarity_check_gsip(&model, 0.4, 0.5, 3000, &uniform_cells(2), 6).unwrap();
            (serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap())
        })
    };
    assert_eq!(run(1), run(4));
}
