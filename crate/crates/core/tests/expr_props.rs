use hhcert_core::{ExprFunction, Jet3};
use proptest::prelude::*;

fn jet() -> impl Strategy<Value = Jet3> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(|[a, b, c, d]| Jet3::new(a, b, c, d))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * 1f64.max(a.abs()).max(b.abs())
}

fn smooth_source() -> impl Strategy<Value = String> {
    (
        -3.0f64..3.0,
        0.2f64..3.0,
        -2.0f64..2.0,
        -1.0f64..1.0,
        prop::collection::vec(-5.0f64..5.0, 5),
    )
        .prop_map(|(c, w, d, l, p)| {
            format!(
                "({c:?})*sin(({w:?})*x) + ({d:?})*exp(({l:?})*x) + ({:?}) + ({:?})*x + ({:?})*x*x + ({:?})*pow(x,3) + ({:?})*pow(x,4)",
                p[0], p[1], p[2], p[3], p[4]
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jets_are_linear(a in jet(), b in jet(), k in -5.0f64..5.0) {
        let lhs = (a + b.scale(k)).as_array();
        let rhs: Vec<f64> = a.as_array().iter().zip(b.as_array()).map(|(x, y)| x + k * y).collect();
        for i in 0..4 {
            prop_assert!(close(lhs[i], rhs[i], 1e-14));
        }
    }

    #[test]
    fn product_follows_leibniz(a in jet(), b in jet()) {
        let p = a * b;
        prop_assert!(close(p.d0, a.d0 * b.d0, 1e-14));
        prop_assert!(close(p.d1, a.d1 * b.d0 + a.d0 * b.d1, 1e-14));
        prop_assert!(close(p.d2, a.d2 * b.d0 + 2.0 * a.d1 * b.d1 + a.d0 * b.d2, 1e-13));
        prop_assert!(close(
            p.d3,
            a.d3 * b.d0 + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.d0 * b.d3,
            1e-13
        ));
    }

    #[test]
    fn cubic_third_derivative_is_constant(
        c in prop::array::uniform4(-5.0f64..5.0),
        x in -10.0f64..10.0,
    ) {
        let src = format!("({:?}) + ({:?})*x + ({:?})*x*x + ({:?})*x*x*x", c[0], c[1], c[2], c[3]);
        let f = ExprFunction::parse(&src).unwrap();
        prop_assert!(close(f.third_derivative(x).unwrap(), 6.0 * c[3], 1e-12));
    }

    #[test]
    fn jets_agree_with_central_differences(src in smooth_source(), x in -2.0f64..2.0) {
        let f = ExprFunction::parse(&src).unwrap();
        let h = 1e-4;
        let lo = f.eval_jet3(x - h).unwrap();
        let hi = f.eval_jet3(x + h).unwrap();
        let mid = f.eval_jet3(x).unwrap();
        let fd = |l: f64, r: f64| (r - l) / (2.0 * h);
        let scale = 1f64.max(mid.d0.abs()).max(mid.d1.abs()).max(mid.d2.abs()).max(mid.d3.abs());
        prop_assert!((fd(lo.d0, hi.d0) - mid.d1).abs() <= 1e-6 * scale);
        prop_assert!((fd(lo.d1, hi.d1) - mid.d2).abs() <= 1e-6 * scale);
        prop_assert!((fd(lo.d2, hi.d2) - mid.d3).abs() <= 1e-6 * scale);
    }

    #[test]
    fn display_round_trips(src in smooth_source(), x in -2.0f64..2.0) {
        let f = ExprFunction::parse(&src).unwrap();
        let g: ExprFunction = f.to_string().parse().unwrap();
        prop_assert_eq!(f.eval(x).unwrap(), g.eval(x).unwrap());
    }

    #[test]
    fn parser_never_panics(s in "[x0-9+*/()a-z,.^ -]{0,24}") {
        let _ = ExprFunction::parse(&s);
    }
}

#[test]
fn parse_errors_report_offsets() {
    let e = ExprFunction::parse("2x").unwrap_err();
    assert_eq!(e.position, 1);
    assert!(ExprFunction::parse("sin(x").is_err());
    assert!(ExprFunction::parse("x + t").is_err());
    assert!(ExprFunction::parse("pow(x, x)").is_err());
}

#[test]
fn domain_errors_are_reported() {
    assert!(ExprFunction::parse("log(x)").unwrap().eval(-1.0).is_err());
    assert!(ExprFunction::parse("1/x").unwrap().eval_jet3(0.0).is_err());
    assert!(ExprFunction::parse("abs(x)")
        .unwrap()
        .eval_jet3(0.0)
        .is_err());
    assert_eq!(
        ExprFunction::parse("abs(x)").unwrap().eval(0.0).unwrap(),
        0.0
    );
}
