mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use varlab::ergodic::*;
use varlab::variation::TimeFamily;
use varlab::NormSpec;

prop_compose! {
    fn chains()(k in 2usize..=8)(k in Just(k), w in prop::collection::vec(0.01..1.0f64, k * k)) -> MarkovOperator {
        common::stochastic(k, &w)
    }
}

prop_compose! {
    fn chain_and_fn()(t in chains(), space in common::space_strategy(3))
        (values in prop::collection::vec(-2.0..2.0f64, t.k() * space.dim()), t in Just(t), space in Just(space)) -> (MarkovOperator, StateFn)
    {
        let f = common::state_fn(space, t.k(), &values);
        (t, f)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fractional_averages_low_orders((t, f) in chain_and_fn(), n in 0usize..=64) {
        let p = powers(&t, &f, n).unwrap();
        let m0 = frac_average(&t, Complex64::new(0.0, 0.0), n, &f).unwrap();
        prop_assert!((m0.re.matrix() - &p[n]).abs().max() <= 1e-12);
        let m1 = frac_average(&t, Complex64::new(1.0, 0.0), n, &f).unwrap();
        prop_assert!(m1.re.dist_max(&ergodic_avg(&t, n, &f).unwrap()) <= 1e-12);
    }

    #[test]
    fn summation_by_parts_identities((t, f) in chain_and_fn(), m in 0usize..=3, n in 1usize..=50, ratio in 1.1..3.5f64) {
        if m >= 1 {
            let r = decomposition_formula_residual(&t, m, n, &f).unwrap();
            prop_assert!(r.relative() <= 1e-10, "{r:?}");
        }
        let mut idx = vec![1usize];
        while idx.len() < 8 {
            let next = ((*idx.last().unwrap() as f64) * ratio).ceil() as usize;
            idx.push(next.max(idx.last().unwrap() + 1));
        }
        idx.retain(|&v| v <= 50);
        let r = abc_split_residual(&t, m, &idx, &f).unwrap();
        prop_assert!(r.relative() <= 1e-10, "{r:?}");
    }

    #[test]
    fn lambda_bounds(steps in prop::collection::vec(1usize..40, 1..20), m in 0usize..=3, q0 in prop_oneof![Just(2.0), Just(3.0)]) {
        let mut idx = vec![1usize];
        for s in steps {
            idx.push(idx.last().unwrap() + s);
        }
        let top = 2 * idx.last().unwrap() + 2;
        for j in 1..=top {
            let l = lambda_j(m, q0, &idx, j).unwrap();
            match m {
                1 => prop_assert_eq!(l, 0.0),
                0 => prop_assert!(l <= 2f64.powf(q0)),
                _ => prop_assert!(l <= 2f64.powf((m as f64 - 1.0) * q0)),
            }
        }
    }

    #[test]
    fn weighted_gap_nonnegative(delta in prop::collection::vec(-2.0..2.0f64, 1..14), z in prop::collection::vec(-3.0..3.0f64, 28), q in prop_oneof![Just(2.0), Just(3.0), Just(4.0)]) {
        let n = delta.len();
        let fam = TimeFamily::from_flat(NormSpec::new(3.0, 2).unwrap(), (0..n).map(|i| i as f64).collect(), z[..2 * n].to_vec()).unwrap();
        prop_assert!(weighted_variation_gap(&delta, &fam, q).unwrap() >= -1e-12);
    }

    #[test]
    fn ergodic_averages_contract((t, f) in chain_and_fn(), n in 0usize..40) {
        // doubly stochastic needed for L^p contraction; the sup bound holds for any stochastic T
        let g = ergodic_avg(&t, n, &f).unwrap();
        prop_assert!(g.max_norm() <= f.max_norm() * (1.0 + 1e-12));
    }
}

#[test]
fn negative_order_fractional_average_against_unshifted_difference() {
    let t = common::stochastic(3, &[0.2, 0.5, 0.3, 0.1, 0.1, 0.8, 0.4, 0.4, 0.2]);
    let f = StateFn::scalar(&[1.0, -2.0, 0.5]).unwrap();
    let m = frac_average(&t, Complex64::new(-1.0, 0.0), 5, &f).unwrap();
    let shifted = delta_mn(&t, 1, 4, &f).unwrap();
    let unshifted = delta_mn(&t, 1, 5, &f).unwrap();
    assert!((m.re.matrix() - shifted.matrix() * 6.0).abs().max() < 1e-12);
    assert!((m.re.matrix() - unshifted.matrix() * 6.0).abs().max() > 1e-3);
}
