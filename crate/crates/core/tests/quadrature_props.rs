use hhcert_core::identity::PathSegment;
use hhcert_core::quadrature::{integrate_certified, true_error, CertificateMode, Refinement};
use hhcert_core::ExprFunction;
use proptest::prelude::*;

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn smooth() -> impl Strategy<Value = ExprFunction> {
    (-5.0f64..5.0, -2.0f64..2.0, -3.0f64..3.0, 0.2f64..3.0, prop::collection::vec(-5.0f64..5.0, 4))
        .prop_map(|(c, l, d, w, p)| {
            ExprFunction::parse(&format!(
                "({c:?})*exp(({l:?})*x) + ({d:?})*sin(({w:?})*x) + ({:?})*pow(x,4) + ({:?})*pow(x,5) + ({:?})*x + ({:?})",
                p[0], p[1], p[2], p[3]
            ))
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sup_certificates_are_sound(f in smooth(), b in -2.0f64..2.0, h in 0.1f64..2.0, n in 1usize..16) {
        let seg = PathSegment::new(b, h).unwrap();
        let r = integrate_certified(&f, &seg, CertificateMode::Sup, Refinement::Fixed(n)).unwrap();
        let err = true_error(&f, &r, 1e-13).unwrap();
        prop_assert!(err <= r.certificate + 1e-11, "err {err} > cert {}", r.certificate);
    }

    #[test]
    fn adaptive_meets_target(f in smooth(), b in -2.0f64..2.0, h in 0.1f64..2.0, e in 3i32..9) {
        let target = 10f64.powi(-e);
        let seg = PathSegment::new(b, -h).unwrap();
        let r = integrate_certified(&f, &seg, CertificateMode::Sup, Refinement::Target(target)).unwrap();
        prop_assert!(r.certificate <= target);
        prop_assert!(true_error(&f, &r, 1e-14).unwrap() <= r.certificate + 1e-12);
    }

    #[test]
    fn hypothesis_mode_is_sound_for_exponentials(c in 0.1f64..5.0, l in -2.0f64..2.0, n in 1usize..32) {
        // |f'''| = c|l|³e^{lx} is convex, so the endpoint certificate applies
        let f = ExprFunction::parse(&format!("({c:?})*exp(({l:?})*x)")).unwrap();
        let seg = PathSegment::new(-1.0, 2.0).unwrap();
        let r = integrate_certified(&f, &seg, CertificateMode::Hypothesis, Refinement::Fixed(n)).unwrap();
        prop_assert!(true_error(&f, &r, 1e-14).unwrap() <= r.certificate * (1.0 + 1e-9) + 1e-14);
    }
}

#[test]
fn exp_certificate_scaling() {
    let f = ExprFunction::parse("exp(x)").unwrap();
    let seg = PathSegment::new(0.0, 1.0).unwrap();
    let ns: Vec<f64> = (3..=10).map(|k| (1usize << k) as f64).collect();
    let mut certs = vec![];
    for &n in &ns {
        let r = integrate_certified(
            &f,
            &seg,
            CertificateMode::Hypothesis,
            Refinement::Fixed(n as usize),
        )
        .unwrap();
        assert!(r.certificate <= std::f64::consts::E / (192.0 * n.powi(3)) * (1.0 + 1e-12));
        certs.push(r.certificate);
    }
    let s = slope(&ns, &certs);
    assert!((-3.1..=-2.9).contains(&s), "slope {s}");
}
