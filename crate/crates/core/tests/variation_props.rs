mod common;

use proptest::prelude::*;
use varlab::variation::*;
use varlab::NormSpec;

fn family(space: NormSpec, times: Vec<f64>, flat: &[f64]) -> TimeFamily {
    let m = space.dim();
    TimeFamily::from_flat(space, times.clone(), flat[..times.len() * m].to_vec()).unwrap()
}

fn increasing_times(n: usize, gaps: &[f64]) -> Vec<f64> {
    let mut t = 0.0;
    gaps[..n].iter().map(|g| { t += g; t }).collect()
}

prop_compose! {
    fn families(max_n: usize)(space in common::space_strategy(3), n in 1..=max_n)
        (space in Just(space), gaps in prop::collection::vec(0.05..3.0f64, n), flat in prop::collection::vec(-5.0..5.0f64, n * space.dim()))
        -> TimeFamily
    {
        family(space, increasing_times(gaps.len(), &gaps), &flat)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_matches_bruteforce(fam in families(12), q in prop_oneof![Just(1.0), Just(2.0), Just(2.5), Just(4.0)]) {
        let a = vq_norm_exact(&fam, q).unwrap();
        let b = vq_norm_bruteforce(&fam, q).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(f64::MIN_POSITIVE), "{a} vs {b}");
    }

    #[test]
    fn greedy_jump_count_is_optimal(fam in families(12), lambda in 0.05..6.0f64) {
        prop_assert_eq!(jump_count(&fam, lambda).unwrap(), jump_count_bruteforce(&fam, lambda).unwrap());
    }

    #[test]
    fn jump_inequality(fam in families(12), lambda in 0.05..6.0f64, q in 1.0..5.0f64) {
        prop_assert!(jump_variation_gap(&fam, lambda, q).unwrap() >= 0.0);
    }

    #[test]
    fn monotone_in_q(fam in families(12), q in 1.0..5.0f64, dq in 0.0..5.0f64) {
        prop_assert!(vq_norm_exact(&fam, q + dq).unwrap() <= vq_norm_exact(&fam, q).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn subfamilies_have_smaller_variation(fam in families(12), mask in prop::collection::vec(any::<bool>(), 12), q in 1.0..5.0f64) {
        let keep: Vec<usize> = (0..fam.len()).filter(|&i| mask[i]).collect();
        prop_assume!(!keep.is_empty());
        let sub = fam.subfamily(&keep).unwrap();
        prop_assert!(vq_norm_exact(&sub, q).unwrap() <= vq_norm_exact(&fam, q).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn split_is_a_partition(n in 2usize..16, gaps in prop::collection::vec(0.01..20.0f64, 16), start in 0.01..3.0f64) {
        let mut times = vec![start];
        for g in &gaps[..n - 1] {
            times.push(times.last().unwrap() + g);
        }
        let split = split_intervals(&times).unwrap();
        let all = split.all();
        prop_assert!((all[0].lo - times[0]).abs() == 0.0);
        prop_assert!((all.last().unwrap().hi - times[n - 1]).abs() == 0.0);
        for w in all.windows(2) {
            prop_assert_eq!(w[0].hi, w[1].lo);
        }
        for iv in &split.long {
            prop_assert_eq!(iv.lo.log2().fract(), 0.0);
            prop_assert_eq!(iv.hi.log2().fract(), 0.0);
        }
        for (&k, ivs) in &split.short_by_block {
            for iv in ivs {
                prop_assert!(2f64.powi(k) <= iv.lo && iv.hi <= 2f64.powi(k + 1));
            }
        }
    }

    #[test]
    fn split_aggregates_bound_partition(fam in families(14), q in 1.0..5.0f64) {
        prop_assume!(fam.len() >= 2);
        let agg = split_aggregates(&fam, q).unwrap();
        prop_assert!(agg.partition <= 3.0 * (agg.short + agg.long) * (1.0 + 1e-12) + 1e-12);
    }
}
