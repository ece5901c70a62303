use hhcert_core::bounds::{
    abs_moment, beta_moment, bound, holder_weighted_moment, moment_c1, moment_c2, BoundSpec,
    DerivativeData, Theorem,
};
use hhcert_core::identity::kernel;
use hhcert_core::oracle::integrate_plain;
use proptest::prelude::*;

fn value(t: Theorem, q: f64, h: f64, d: &DerivativeData) -> f64 {
    bound(&BoundSpec::new(t, q).unwrap(), h, d).unwrap().value
}

fn quad<F: Fn(f64) -> f64>(f: F) -> f64 {
    integrate_plain(f, 0.0, 1.0, 1e-13).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn preinvex_bounds_never_exceed_quasi_counterparts(
        h in prop_oneof![-3.0f64..-0.01, 0.01f64..3.0],
        a3 in 0.0f64..1e3,
        b3 in 0.0f64..1e3,
        q in 1.0001f64..20.0,
    ) {
        let d = DerivativeData::new(a3, b3).unwrap();
        for (lo, hi) in [(Theorem::T2_1, Theorem::T3_1), (Theorem::T2_2, Theorem::T3_2), (Theorem::T2_3, Theorem::T3_3)] {
            let (x, y) = (value(lo, q, h, &d), value(hi, q, h, &d));
            prop_assert!(x <= y * (1.0 + 1e-12), "{lo} {x} > {hi} {y}");
        }
    }

    #[test]
    fn symmetric_data_gives_equal_power_mean_and_max(h in 0.01f64..3.0, a3 in 0.0f64..1e3, q in 1.0f64..20.0) {
        let d = DerivativeData::new(a3, a3).unwrap();
        let (x, y) = (value(Theorem::T2_1, q, h, &d), value(Theorem::T3_1, q, h, &d));
        prop_assert!((x - y).abs() <= 1e-12 * y.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn power_mean_bound_is_nondecreasing_in_q(
        h in 0.01f64..3.0,
        a3 in 0.0f64..1e3,
        b3 in 0.0f64..1e3,
        q1 in 1.0f64..20.0,
        dq in 0.0f64..20.0,
    ) {
        let d = DerivativeData::new(a3, b3).unwrap();
        let lo = value(Theorem::T2_1, q1, h, &d);
        let hi = value(Theorem::T2_1, q1 + dq, h, &d);
        prop_assert!(lo <= hi * (1.0 + 1e-12));
        prop_assert!(hi <= value(Theorem::T3_1, q1, h, &d) * (1.0 + 1e-12));
    }

    #[test]
    fn bounds_scale_with_fourth_power_of_step(h in 0.01f64..3.0, a3 in 0.0f64..1e3, b3 in 0.0f64..1e3, q in 1.5f64..8.0) {
        let d = DerivativeData::new(a3, b3).unwrap();
        for t in Theorem::MAIN {
            let x = value(t, q, h, &d);
            let y = value(t, q, -2.0 * h, &d);
            prop_assert!((y - 16.0 * x).abs() <= 1e-12 * y.max(f64::MIN_POSITIVE));
        }
    }
}

#[test]
fn moments_match_quadrature() {
    assert!((quad(|t| kernel(t).abs()) - moment_c1()).abs() < 1e-10);
    assert!((quad(|t| t * kernel(t).abs()) - moment_c2()).abs() < 1e-10);
    assert!((quad(|t| (1.0 - t) * kernel(t).abs()) - moment_c2()).abs() < 1e-10);
    for p in [1.1, 2.0, 3.0, 7.5] {
        let got = quad(|t| t * (1.0 - t) * (2.0 * t - 1.0).abs().powf(p));
        assert!(
            (got - holder_weighted_moment(p).unwrap()).abs() < 1e-10,
            "p = {p}"
        );
    }
    for p in [1.0, 2.0, 3.5] {
        let got = quad(|t| (t * (1.0 - t)).powf(p));
        assert!((got - beta_moment(p).unwrap()).abs() < 1e-10, "p = {p}");
    }
    for q in [1.0, 2.0, 5.0] {
        let got = quad(|t| (2.0 * t - 1.0).abs().powf(q) * (1.0 - t));
        assert!((got - abs_moment(q).unwrap()).abs() < 1e-10, "q = {q}");
    }
}

#[test]
fn tight_variant_ratio() {
    let d = DerivativeData::new(2.0, 5.0).unwrap();
    for p in [1.5, 2.0, 4.0] {
        let q = p / (p - 1.0);
        let spec = BoundSpec::new(Theorem::T3_3, q).unwrap();
        let printed = bound(&spec, 1.3, &d).unwrap().value;
        let tight = bound(&spec.tight(), 1.3, &d).unwrap().value;
        assert!((printed / tight - 2f64.powf(1.0 / p)).abs() < 1e-12);
    }
}
