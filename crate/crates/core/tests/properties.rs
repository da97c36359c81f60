use halfline_core::birman_schwinger::{dirichlet_kernel_sup, kernel, robin_sup_factor};
use halfline_core::gfun::{g_envelopes, g_objective, g_value};
use halfline_core::{BoundaryCondition, Complex64};
use proptest::prelude::*;

fn mu_strategy() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -3.1f64..3.1).prop_map(|(lg, arg)| Complex64::from_polar(10f64.powf(lg), arg))
}

fn bc_strategy() -> impl Strategy<Value = BoundaryCondition> {
    prop_oneof![
        Just(BoundaryCondition::Dirichlet),
        Just(BoundaryCondition::Neumann),
        (0.0f64..20.0).prop_map(|sigma| BoundaryCondition::Robin { sigma }),
        Just(BoundaryCondition::WholeLine),
    ]
}

proptest! {
    #[test]
    fn g_is_even(a in -1e3f64..1e3) {
        prop_assert_eq!(g_value(a).unwrap(), g_value(-a).unwrap());
    }

    #[test]
    fn g_is_monotone_in_modulus(a in 1e-3f64..1e3, t in 1.0f64..3.0) {
        prop_assert!(g_value(a * t).unwrap() >= g_value(a).unwrap());
    }

    #[test]
    fn g_dominates_objective(a in -50.0f64..50.0, y in 0.0f64..200.0) {
        prop_assert!(g_value(a).unwrap() >= g_objective(a, y).unwrap());
    }

    #[test]
    fn g_within_envelopes(a in 1e-2f64..1e3) {
        let (lo, hi) = g_envelopes(a).unwrap();
        let v = g_value(a).unwrap();
        prop_assert!(v >= lo && v <= hi.min(2.0));
    }

    #[test]
    fn kernel_is_symmetric(x in 0.0f64..10.0, y in 0.0f64..10.0, mu in mu_strategy(), bc in bc_strategy()) {
        let kxy = kernel(x, y, mu, bc).unwrap();
        let kyx = kernel(y, x, mu, bc).unwrap();
        prop_assert_eq!(kxy, kyx);
    }

    #[test]
    fn dirichlet_kernel_below_sup(x in 0.0f64..20.0, y in 0.0f64..20.0, mu in mu_strategy()) {
        let s = mu.sqrt();
        let k = kernel(x, y, mu, BoundaryCondition::Dirichlet).unwrap();
        prop_assert!((2.0 * s * k).norm() <= dirichlet_kernel_sup(mu).unwrap() + 1e-12);
    }

    #[test]
    fn robin_factor_capped(mu in mu_strategy(), sigma in 0.0f64..1e3) {
        let v = robin_sup_factor(mu, sigma).unwrap();
        prop_assert!((1.0..=2.0 + 1e-12).contains(&v));
    }

    #[test]
    fn robin_kernel_below_factor(x in 0.0f64..10.0, y in 0.0f64..10.0, mu in mu_strategy(), sigma in 0.0f64..10.0) {
        let s = mu.sqrt();
        let k = kernel(x, y, mu, BoundaryCondition::Robin { sigma }).unwrap();
        prop_assert!((2.0 * s * k).norm() <= robin_sup_factor(mu, sigma).unwrap() + 1e-9);
    }
}
