use hhcert_core::identity::{
    corrected_trapezoid, verify_identity, verify_identity_eta, PathSegment, DEFAULT_TOL,
};
use hhcert_core::invex::EtaMap;
use hhcert_core::oracle::AdaptiveSimpson;
use hhcert_core::ExprFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poly(rng: &mut ChaCha8Rng, degree: usize) -> ExprFunction {
    let mut s = String::from("0");
    for k in 0..=degree {
        let c: f64 = rng.random_range(-5.0..=5.0);
        s.push_str(&format!(" + ({c:?})*pow(x,{k})"));
    }
    ExprFunction::parse(&s).unwrap()
}

fn segment(rng: &mut ChaCha8Rng) -> PathSegment {
    let b = rng.random_range(-2.0..=2.0);
    let h: f64 = rng.random_range(0.1..=2.0);
    PathSegment::new(b, if rng.random_bool(0.5) { h } else { -h }).unwrap()
}

#[test]
fn identity_holds_on_random_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..200 {
        let f = poly(&mut rng, 6);
        let seg = segment(&mut rng);
        let r = verify_identity(&f, &seg, DEFAULT_TOL).unwrap();
        assert!(
            (r.lhs - r.rhs).abs() <= 1e-9 * r.lhs.abs().max(1.0),
            "{} on {seg:?}: {r:?}",
            f.source()
        );
    }
}

#[test]
fn identity_holds_on_exp_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let c: f64 = rng.random_range(-5.0..=5.0);
        let l: f64 = rng.random_range(-2.0..=2.0);
        let f = ExprFunction::parse(&format!("({c:?})*exp(({l:?})*x)")).unwrap();
        let seg = segment(&mut rng);
        let r = verify_identity(&f, &seg, DEFAULT_TOL).unwrap();
        assert!(
            (r.lhs - r.rhs).abs() <= 1e-9 * r.lhs.abs().max(1.0),
            "{r:?}"
        );
    }
}

#[test]
fn identity_holds_along_non_difference_paths() {
    let f = ExprFunction::parse("sin(x) + pow(x,5)/20").unwrap();
    for map in [EtaMap::PaperPiecewise, EtaMap::scaled(0.5).unwrap()] {
        for (a, b) in [(1.0, -1.0), (-0.5, 1.5), (2.0, 0.5)] {
            let r = verify_identity_eta(&f, &map, a, b, DEFAULT_TOL).unwrap();
            assert!(r.passed, "{map:?} {a} {b}: {r:?}");
            assert_eq!(r.eta_ab, map.eval(a, b).unwrap());
        }
    }
}

#[test]
fn corrected_trapezoid_is_exact_on_cubics() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let oracle = AdaptiveSimpson::new(1e-14);
    for _ in 0..100 {
        let f = poly(&mut rng, 3);
        let seg = segment(&mut rng);
        let exact = oracle
            .integrate(|x| f.eval(x), seg.b, seg.end())
            .unwrap()
            .value;
        let q = corrected_trapezoid(&f, &seg).unwrap();
        let scale = exact.abs().max(1.0);
        assert!((exact - q).abs() <= 1e-12 * scale, "{} {seg:?}", f.source());
    }
}
