mod common;

use proptest::prelude::*;
use varlab::normed::{seq_lq, NormSpec, VecB};

proptest! {
    #[test]
    fn reverse_triangle(space in common::space_strategy(6), u in prop::collection::vec(-10.0..10.0f64, 6), v in prop::collection::vec(-10.0..10.0f64, 6)) {
        let d = space.dim();
        let a = VecB::new(space, u[..d].to_vec()).unwrap();
        let b = VecB::new(space, v[..d].to_vec()).unwrap();
        let diff = a.sub(&b).unwrap().norm();
        prop_assert!((a.norm() - b.norm()).abs() <= diff * (1.0 + 1e-12) + 1e-12);
        prop_assert!(a.add(&b).unwrap().norm() <= (a.norm() + b.norm()) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn norm_is_homogeneous(space in common::space_strategy(5), u in prop::collection::vec(-10.0..10.0f64, 5), alpha in -4.0..4.0f64) {
        let a = VecB::new(space, u[..space.dim()].to_vec()).unwrap();
        let lhs = a.scale(alpha).norm();
        prop_assert!((lhs - alpha.abs() * a.norm()).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn seq_lq_nonincreasing_in_q(xs in prop::collection::vec(0.0..5.0f64, 0..20), q in 1.0..6.0f64, dq in 0.0..6.0f64) {
        prop_assert!(seq_lq(&xs, q + dq) <= seq_lq(&xs, q) * (1.0 + 1e-12) + 1e-300);
        prop_assert!(seq_lq(&xs, f64::INFINITY) <= seq_lq(&xs, q) * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn lr_norms_are_nested(u in prop::collection::vec(-3.0..3.0f64, 4), r in 1.0..8.0f64, dr in 0.0..8.0f64) {
        let small = NormSpec::new(r + dr, 4).unwrap().norm(&u).unwrap();
        let big = NormSpec::new(r, 4).unwrap().norm(&u).unwrap();
        prop_assert!(small <= big * (1.0 + 1e-12) + 1e-300);
    }
}
