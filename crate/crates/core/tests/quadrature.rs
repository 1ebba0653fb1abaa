use dlsfem::quadrature::{edge_rule, reference_monomial_moment, triangle_rule, MAX_DEGREE};
use proptest::prelude::*;

fn beta(a: usize, b: usize) -> f64 {
    // ∫₀¹ t^a (1−t)^b dt = a! b! / (a+b+1)!
    let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
    fact(a) * fact(b) / fact(a + b + 1)
}

#[test]
fn reference_moments_match_beta_integrals() {
    // ∫_T ξ^a η^b = a! b! / (a+b+2)!
    let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
    for a in 0..6 {
        for b in 0..6 {
            let exact = fact(a) * fact(b) / fact(a + b + 2);
            approx::assert_relative_eq!(reference_monomial_moment(a, b), exact, max_relative = 1e-14);
        }
    }
}

#[test]
fn weights_are_positive_and_sum_to_area() {
    for d in 0..=MAX_DEGREE {
        let r = triangle_rule(d).unwrap();
        assert!(r.weights.iter().all(|w| *w > 0.0));
        approx::assert_relative_eq!(r.weights.iter().sum::<f64>(), 0.5, max_relative = 1e-13);
        for p in &r.points {
            assert!(p.iter().all(|l| *l >= 0.0 && *l <= 1.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }
}

#[test]
fn too_high_degree_is_an_error() {
    assert!(triangle_rule(MAX_DEGREE + 1).is_err());
}

proptest! {
    #[test]
    fn triangle_rule_is_exact(
        (degree, a, b) in (0usize..=30)
            .prop_flat_map(|d| (Just(d), 0..=d))
            .prop_flat_map(|(d, a)| (Just(d), Just(a), 0..=d - a))
    ) {
        let r = triangle_rule(degree).unwrap();
        let approx: f64 = r.points.iter().zip(&r.weights)
            .map(|(p, w)| w * p[1].powi(a as i32) * p[2].powi(b as i32))
            .sum();
        let exact = reference_monomial_moment(a, b);
        prop_assert!((approx - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn edge_rule_is_exact((degree, a) in (0usize..=30).prop_flat_map(|d| (Just(d), 0..=d))) {
        let r = edge_rule(degree).unwrap();
        let approx: f64 = r.points.iter().zip(&r.weights).map(|(s, w)| w * s.powi(a as i32)).sum();
        prop_assert!((approx - beta(a, 0)).abs() <= 1e-13);
    }
}
