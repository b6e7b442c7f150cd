use hemivar::superpotential::{huber, huber_derivative, FrictionLaw};
use proptest::prelude::*;

fn law_strategy() -> impl Strategy<Value = FrictionLaw> {
    (0.05f64..3.0, 0.01f64..3.0, 0.05f64..5.0).prop_map(|(mu2, gap, alpha)| FrictionLaw::new(mu2 + gap, mu2, alpha).unwrap())
}

fn xi() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), -6.0f64..6.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// `j⁰(ξ; z) = max{η z : η ∈ ∂j(ξ)}` with `∂j(0) = [-μ₁, μ₁]` and
    /// `j'(ξ) = sign ξ (μ₂ + (μ₁ - μ₂) e^{-α|ξ|})` elsewhere.
    #[test]
    fn j0_is_the_support_function(l in law_strategy(), x in xi(), z in -5.0f64..5.0) {
        let (lo, hi) = if x == 0.0 {
            (-l.mu1, l.mu1)
        } else {
            let s = x.signum() * (l.mu2 + (l.mu1 - l.mu2) * (-l.alpha * x.abs()).exp());
            (s, s)
        };
        prop_assert!((l.j0(x, z) - (lo * z).max(hi * z)).abs() <= 1e-14 * (1.0 + z.abs()));
        let c = l.clarke_interval(x);
        prop_assert!(c.lo <= c.hi);
        prop_assert!(c.contains(lo, 1e-14) && c.contains(hi, 1e-14));
    }

    #[test]
    fn j0_is_positively_homogeneous_and_subadditive(l in law_strategy(), x in xi(), z1 in -5.0f64..5.0, z2 in -5.0f64..5.0, s in 0.0f64..10.0) {
        prop_assert!((l.j0(x, s * z1) - s * l.j0(x, z1)).abs() <= 1e-12 * (1.0 + s * z1.abs()));
        prop_assert!(l.j0(x, z1 + z2) <= l.j0(x, z1) + l.j0(x, z2) + 1e-12);
    }

    #[test]
    fn one_sided_lipschitz(l in law_strategy(), y1 in xi(), y2 in xi()) {
        let lhs = l.j0(y1, y2 - y1) + l.j0(y2, y1 - y2);
        prop_assert!(lhs <= l.one_sided_lipschitz() * (y1 - y2).powi(2) + 1e-12);
    }

    #[test]
    fn growth_and_sign_conditions(l in law_strategy(), x in xi()) {
        let (c1, c2) = l.growth_constants();
        let c = l.clarke_interval(x);
        for eta in [c.lo, c.hi] {
            prop_assert!(eta.abs() <= c1 * (1.0 + x.abs()));
            prop_assert!(eta * x >= -c2 * x.abs() - 1e-15);
        }
    }

    /// `j = μ₁|·| + h` with `h` concave and `h'` Lipschitz with constant `c_J`.
    #[test]
    fn concave_split(l in law_strategy(), a in -6.0f64..6.0, b in -6.0f64..6.0) {
        prop_assert!((l.concave_part(a) + l.mu1 * a.abs() - l.j(a)).abs() < 1e-12);
        let (da, db) = (l.concave_part_derivative(a), l.concave_part_derivative(b));
        prop_assert!((da - db) * (a - b) <= 1e-14);
        prop_assert!((da - db).abs() <= l.one_sided_lipschitz() * (a - b).abs() + 1e-14);
        let mid = l.concave_part(0.5 * (a + b));
        prop_assert!(mid >= 0.5 * (l.concave_part(a) + l.concave_part(b)) - 1e-12);
    }

    #[test]
    fn difference_quotients_stay_below_j0(l in law_strategy(), x in xi(), z in -3.0f64..3.0) {
        let t = 1e-7;
        let q = (l.j(x + t * z) - l.j(x)) / t;
        prop_assert!(q <= l.j0(x, z) + 1e-5);
    }

    #[test]
    fn huber_envelope(eps in 1e-4f64..1.0, z in -3.0f64..3.0) {
        prop_assert!(huber(eps, z) <= z.abs());
        prop_assert!(huber(eps, z) >= z.abs() - 0.5 * eps);
        prop_assert!(huber_derivative(eps, z).abs() <= 1.0);
    }
}
