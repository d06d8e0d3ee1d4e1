mod common;

use common::*;
use proptest::prelude::*;
use tsq_core::stats::{mann_whitney_u_with, UMethod};
use tsq_core::*;

/// Exact lower-tail probability P(U <= u) from the recurrence counts.
fn recurrence_lower_tail(u: usize, m: usize, n: usize) -> f64 {
    let dist = u_distribution(m, n);
    let total: u64 = dist.iter().sum();
    dist[..=u].iter().sum::<u64>() as f64 / total as f64
}

#[test]
fn exact_p_matches_recurrence_for_small_samples() {
    // x takes ranks {1, 3, 4, 8}, y the rest of 1..=9: U_x = 0 + 1 + 1 + 4 = 6.
    let x = [1.0, 3.0, 4.0, 8.0];
    let y = [2.0, 5.0, 6.0, 7.0, 9.0];
    let t = mann_whitney_u_with(&x, &y, Alternative::Less, UMethod::Exact).unwrap();
    assert_eq!(t.u, 6.0);
    assert!((t.p_value - recurrence_lower_tail(6, 4, 5)).abs() < 1e-12);
    let g = mann_whitney_u_with(&x, &y, Alternative::Greater, UMethod::Exact).unwrap();
    let upper = 1.0 - recurrence_lower_tail(5, 4, 5);
    assert!((g.p_value - upper).abs() < 1e-12);
}

#[test]
fn separated_triples_have_p_one_twentieth() {
    let dist = u_distribution(3, 3);
    assert_eq!(dist.iter().sum::<u64>(), 20);
    assert_eq!(dist[0], 1);
    let p = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::Less).unwrap();
    assert!((p - 0.05).abs() < 1e-12);
}

#[test]
fn approximation_uses_tie_correction() {
    // Identical samples sit exactly at the null mean.
    let x = [1.0, 2.0, 3.0];
    let y = [1.0, 2.0, 3.0];
    let t = mann_whitney_u_with(&x, &y, Alternative::TwoSided, UMethod::Auto).unwrap();
    assert!(!t.exact);
    assert_eq!(t.u, 4.5);
    assert_eq!(t.p_value, 1.0);
    // Pooled [1, 2, 2, 3] has one tie of size 2: var = 2*2/12 * (5 - 6/12).
    let x = [1.0, 2.0];
    let y = [2.0, 3.0];
    let t = mann_whitney_u_with(&x, &y, Alternative::Less, UMethod::Asymptotic).unwrap();
    let sd = (4.0f64 / 12.0 * (5.0 - 6.0 / 12.0)).sqrt();
    let z: f64 = (0.5 - 2.0 + 0.5) / sd;
    let expected = 0.5 * erfc_approx(-z / std::f64::consts::SQRT_2);
    assert!((t.p_value - expected).abs() < 1e-6, "{} vs {expected}", t.p_value);
}

/// Complementary error function via the Abramowitz-Stegun 7.1.26 approximation (|err| < 1.5e-7).
fn erfc_approx(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let ax = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * ax);
    let poly = t * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let erf = 1.0 - poly * (-ax * ax).exp();
    1.0 - sign * erf
}

proptest! {
    #[test]
    fn a12_is_antisymmetric(x in prop::collection::vec(0i32..20, 1..12), y in prop::collection::vec(0i32..20, 1..12)) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let y: Vec<f64> = y.into_iter().map(f64::from).collect();
        let a = vargha_delaney_a12(&x, &y).unwrap();
        let b = vargha_delaney_a12(&y, &x).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn a12_ignores_monotone_transforms(x in prop::collection::vec(-50.0f64..50.0, 1..12), y in prop::collection::vec(-50.0f64..50.0, 1..12)) {
        let f = |v: &Vec<f64>| v.iter().map(|z| (z / 10.0).exp() * 3.0 + 1.0).collect::<Vec<_>>();
        prop_assert_eq!(vargha_delaney_a12(&x, &y).unwrap(), vargha_delaney_a12(&f(&x), &f(&y)).unwrap());
    }

    #[test]
    fn exact_and_normal_agree_on_eight_plus_eight(perm in Just((1..=16).collect::<Vec<u32>>()).prop_shuffle()) {
        let x: Vec<f64> = perm[..8].iter().map(|&v| v as f64).collect();
        let y: Vec<f64> = perm[8..].iter().map(|&v| v as f64).collect();
        for alt in [Alternative::Less, Alternative::Greater, Alternative::TwoSided] {
            let e = mann_whitney_u_with(&x, &y, alt, UMethod::Exact).unwrap();
            let a = mann_whitney_u_with(&x, &y, alt, UMethod::Asymptotic).unwrap();
            prop_assert!(e.exact && !a.exact);
            prop_assert!((e.p_value - a.p_value).abs() <= 0.02, "{:?}: {} vs {}", alt, e.p_value, a.p_value);
        }
    }

    #[test]
    fn magnitude_is_total_on_unit_interval(a in 0.0f64..=1.0) {
        prop_assert!(classify_magnitude(a).is_ok());
    }
}
