//! Property tests of the numerical substrate, run at both native and
//! high precision where it matters.

use circlelab::numerics::circle::{mod1, Arc};
use circlelab::numerics::fit::loglog_slope;
use circlelab::numerics::sum::compensated_sum;
use circlelab::{prec_tol, HighReal, Real};
use num_traits::{FromPrimitive, One, Signed, Zero};
use proptest::prelude::*;

fn hp(x: f64) -> HighReal {
    HighReal::from_f64(x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mod1_idempotent_and_in_range(x in -1e6f64..1e6f64) {
        let p = mod1(hp(x)).unwrap();
        prop_assert!(!p.position().is_negative());
        prop_assert!(*p.position() < HighReal::one());
        let again = mod1(p.position().clone()).unwrap();
        prop_assert_eq!(p, again);
    }

    #[test]
    fn arc_lengths_in_range_and_start_is_member(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let arc = Arc::new(mod1(hp(a)).unwrap(), mod1(hp(b)).unwrap());
        prop_assert!(!arc.length().is_negative());
        prop_assert!(*arc.length() < HighReal::one());
        prop_assert!(arc.contains(arc.start()));
        // half-open convention: the end belongs only to degenerate arcs
        if !arc.length().is_zero() {
            prop_assert!(!arc.contains(arc.end()));
        }
    }

    #[test]
    fn compensated_sum_permutation_invariant(
        values in prop::collection::vec(-1e8f64..1e8f64, 2..60),
        rotate in 0usize..59,
    ) {
        let xs: Vec<HighReal> = values.iter().map(|&v| hp(v)).collect();
        let a = compensated_sum(xs.iter().cloned()).unwrap();
        let mut permuted = xs.clone();
        let len = permuted.len();
        permuted.reverse();
        permuted.rotate_left(rotate % len);
        let b = compensated_sum(permuted.into_iter()).unwrap();
        let magnitude = compensated_sum(xs.iter().map(|x| x.abs())).unwrap();
        let scale = magnitude.max_with(&HighReal::one());
        let four_ulp = scale * prec_tol::<HighReal>(1) * hp(4.0);
        prop_assert!((a - b).abs() <= four_ulp);
    }

    #[test]
    fn loglog_slope_recovers_random_power_laws(
        exponent in -3.0f64..3.0,
        scale in 0.1f64..10.0,
    ) {
        let e = hp(exponent);
        let c = hp(scale);
        let pts: Vec<(HighReal, HighReal)> = (1..=9)
            .map(|j| {
                let x = HighReal::two().powi(-j);
                (x.clone(), c.clone() * x.powf(&e))
            })
            .collect();
        let slope = loglog_slope(&pts).unwrap();
        prop_assert!((slope - e).abs() < HighReal::pow10(-12));
    }

    #[test]
    fn f64_fast_mode_agrees_with_high_precision_mod1(x in -100.0f64..100.0) {
        let fast = mod1(x).unwrap();
        let high = mod1(hp(x)).unwrap();
        let diff = (hp(*fast.position()) - high.position().clone()).abs();
        prop_assert!(diff < hp(1e-12));
    }
}
