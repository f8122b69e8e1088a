//! Property suites over random inputs.

use proptest::prelude::*;

use epsilon_star::distfit::{fit_normal, FittedDistribution, NormalParams};
use epsilon_star::epsilon::{
    branch_log_ratios_at, epsilon_star_discrete, epsilon_star_ecdf, epsilon_star_parametric,
    rate_curve_from_distributions,
};
use epsilon_star::goodness_of_fit::{ks_statistic, ks_two_sample};

fn normal(mu: f64, sigma: f64) -> FittedDistribution {
    NormalParams::new(mu, sigma).unwrap().into()
}

fn normal_pair() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-3.0..3.0f64, -4.0..4.0f64, 0.5..2.0f64, 0.5..2.0f64).prop_map(|(mt, shift, sp, st)| (mt + shift, sp, mt, st))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn epsilon_is_non_increasing_in_delta(
        (mp, sp, mt, st) in normal_pair(),
        d1 in 0.0..0.3f64,
        gap in 0.0..0.3f64,
    ) {
        let (pop, train) = (normal(mp, sp), normal(mt, st));
        let a = epsilon_star_parametric(&pop, &train, d1).unwrap().epsilon_star;
        let b = epsilon_star_parametric(&pop, &train, d1 + gap).unwrap().epsilon_star;
        prop_assert!(b <= a, "δ={d1}: {a}, δ={}: {b}", d1 + gap);
        prop_assert!(b >= 0.0);
    }

    #[test]
    fn swapping_distributions_at_delta_zero_is_symmetric((mp, sp, mt, st) in normal_pair()) {
        let (a, b) = (normal(mp, sp), normal(mt, st));
        let x = epsilon_star_parametric(&a, &b, 0.0).unwrap().epsilon_star;
        let y = epsilon_star_parametric(&b, &a, 0.0).unwrap().epsilon_star;
        prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0), "{x} vs {y}");
    }

    #[test]
    fn fractions_reach_their_endpoint_limits((mp, sp, mt, st) in normal_pair()) {
        // far enough into each tail that every rate has reached its limit
        let delta: f64 = 1e-2;
        let (pop, train) = (normal(mp, sp), normal(mt, st));
        let limit = (1.0 - delta).ln();
        let near_zero = branch_log_ratios_at(&pop, &train, pop.quantile(1e-200).unwrap(), delta);
        let near_one = branch_log_ratios_at(&pop, &train, pop.quantile_upper(1e-200).unwrap(), delta);
        // t -> 0: m2 and m3 tend to 1 - δ, m1 and m4 to -∞
        prop_assert!(near_zero[0].is_none() && near_zero[3].is_none());
        prop_assert!((near_zero[1].unwrap() - limit).abs() < 1e-9);
        prop_assert!((near_zero[2].unwrap() - limit).abs() < 1e-9);
        // t -> 1: m1 and m4 tend to 1 - δ, m2 and m3 to -∞
        prop_assert!(near_one[1].is_none() && near_one[2].is_none());
        prop_assert!((near_one[0].unwrap() - limit).abs() < 1e-9);
        prop_assert!((near_one[3].unwrap() - limit).abs() < 1e-9);
    }

    #[test]
    fn refined_grids_rise_to_the_supremum((mp, sp, mt, st) in normal_pair()) {
        let delta = 1e-3;
        let (pop, train) = (normal(mp, sp), normal(mt, st));
        let sup = epsilon_star_parametric(&pop, &train, delta).unwrap();
        let (lo, hi) = sup.clamp_window;
        prop_assume!(lo < hi);
        let (zl, zh) = ((lo / (1.0 - lo)).ln(), (hi / (1.0 - hi)).ln());
        let mut prev = 0.0;
        let mut last = 0.0;
        // 2^k + 1 points uniform in logit(t); each level contains the previous
        for k in [4u32, 6, 8, 10, 12, 14] {
            let m = 1usize << k;
            let mut grid: Vec<f64> = (0..=m)
                .map(|i| {
                    let z = zl + (zh - zl) * i as f64 / m as f64;
                    1.0 / (1.0 + (-z).exp())
                })
                .collect();
            // saturation near t = 1 can repeat a level
            grid.dedup();
            let curve = rate_curve_from_distributions(&pop, &train, &grid).unwrap();
            let e = epsilon_star_discrete(&curve, delta).unwrap().epsilon_star;
            prop_assert!(e >= prev, "level {k}: {e} < {prev}");
            prop_assert!(e <= sup.epsilon_star + 1e-9, "level {k}: {e} above {}", sup.epsilon_star);
            prev = e;
            last = e;
        }
        prop_assert!(sup.epsilon_star - last < 1e-4, "{} vs {last}", sup.epsilon_star);
    }

    #[test]
    fn ks_is_invariant_under_increasing_maps(
        a in prop::collection::vec(-5.0..5.0f64, 1..60),
        b in prop::collection::vec(-5.0..5.0f64, 1..60),
    ) {
        let g = |x: f64| x.exp();
        let h = |x: f64| x * x * x + x;
        let d = ks_statistic(&a, &b).unwrap();
        let ga: Vec<f64> = a.iter().map(|&x| g(x)).collect();
        let gb: Vec<f64> = b.iter().map(|&x| g(x)).collect();
        let ha: Vec<f64> = a.iter().map(|&x| h(x)).collect();
        let hb: Vec<f64> = b.iter().map(|&x| h(x)).collect();
        prop_assert_eq!(d, ks_statistic(&ga, &gb).unwrap());
        prop_assert_eq!(d, ks_statistic(&ha, &hb).unwrap());
        let r = ks_two_sample(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.p_value));
        prop_assert!((0.0..=1.0).contains(&r.statistic_d));
    }

    #[test]
    fn fit_normal_is_shift_equivariant(
        xs in prop::collection::vec(-10.0..10.0f64, 2..200),
        c in -100.0..100.0f64,
    ) {
        prop_assume!(xs.iter().any(|&x| x != xs[0]));
        let a = fit_normal(&xs).unwrap();
        let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
        let b = fit_normal(&shifted).unwrap();
        prop_assert!((b.mu - a.mu - c).abs() < 1e-9);
        prop_assert!((b.sigma - a.sigma).abs() < 1e-9 * (1.0 + a.sigma));
    }

    #[test]
    fn ecdf_epsilon_is_non_negative_and_zero_on_identical_samples(
        xs in prop::collection::vec(0.0..50.0f64, 50..300),
        delta in 0.0..0.1f64,
    ) {
        let r = epsilon_star_ecdf(&xs, &xs, delta, 2 * xs.len()).unwrap();
        prop_assert_eq!(r.epsilon_star, 0.0);
    }
}
