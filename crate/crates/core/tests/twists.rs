use nagaolab::curves;
use nagaolab::finite_field::{legendre, odd_primes_up_to};
use nagaolab::twist_surface::{
    average_trace, nagao_series, peterson_d, verify_factorization, FiberMode, MobiusTransform,
    TwistSurfaceSpec,
};
use nagaolab::IntPolynomial;
use proptest::prelude::*;

fn poly(s: &str) -> IntPolynomial {
    s.parse().unwrap()
}

const SURFACES: &[(&str, &str)] = &[
    ("x^3 + x", "T^3 + T"),
    ("x^3 + x", "T^2 + 1"),
    ("x^3 - x + 1", "T"),
    ("x^3 - x + 1", "T^4 - 3"),
    ("x^3 + 1", "2*T^3 - T + 5"),
    ("x^5 - x + 1", "T^5 - T + 1"),
    ("x^5 - x + 1", "T^2 - 2"),
    ("x^5 + x", "T^6 + 1"),
    ("x^6 + 1", "T^6 + 1"),
    ("x^6 + 10*x^3 - 2", "T^3 + 7"),
    ("x^6 + x^5 + x - 1", "3*T + 1"),
];

#[test]
fn fast_and_fiberwise_modes_agree() {
    for (f, d) in SURFACES {
        let fast = TwistSurfaceSpec::new(poly(f), poly(d), FiberMode::FastTwist).unwrap();
        let slow = fast.clone().with_mode(FiberMode::Fiberwise);
        for p in odd_primes_up_to(2000) {
            if !fast.is_good(p.get()) {
                continue;
            }
            assert_eq!(
                average_trace(&fast, p).unwrap(),
                average_trace(&slow, p).unwrap(),
                "{} / {} at p = {}",
                f,
                d,
                p
            );
        }
    }
}

#[test]
fn self_twist_average_is_minus_trace_squared() {
    for f in [
        "x^3 + x",
        "x^3 - x + 1",
        "x^5 - x + 1",
        "x^5 + 1",
        "x^6 + 1",
        "2*x^6 + x + 3",
    ] {
        let s = TwistSurfaceSpec::self_twist(poly(f), FiberMode::FastTwist).unwrap();
        let even = s.curve().degree().is_multiple_of(2);
        for p in odd_primes_up_to(10_000) {
            if !s.is_good(p.get()) {
                continue;
            }
            let a = curves::trace(s.curve(), p).unwrap().a;
            let extra = if even {
                a * legendre(s.curve().poly().leading(), p) as i64
            } else {
                0
            };
            assert_eq!(
                average_trace(&s, p).unwrap().scaled,
                -a * a - extra,
                "{} at {}",
                f,
                p
            );
        }
    }
}

#[test]
fn nagao_estimators_settle_near_one_for_cm_surface() {
    let s = TwistSurfaceSpec::self_twist(poly("x^3 + x"), FiberMode::FastTwist).unwrap();
    let grid = [1000, 5000, 20_000, 50_000];
    let series = nagao_series(&s, 50_000, &grid).unwrap();
    let first = series.points[0];
    let last = *series.last().unwrap();
    assert!((0.85..=1.15).contains(&last.s2), "{:?}", last);
    assert!((last.s1 - last.s2).abs() < (first.s1 - first.s2).abs());
    assert_eq!(series.records.len() as u64, last.n_primes);
}

#[test]
fn three_cycle_twist_splits_as_two_copies() {
    let f = poly("x^3 - x");
    let sigma: MobiusTransform = "(x+1)/(-3x+1)".parse().unwrap();
    let tw = peterson_d(&f, &sigma).unwrap();
    assert!(verify_factorization(&tw.d, &f, 2, 1000).unwrap().passed());
    assert_eq!(
        verify_factorization(&tw.d, &f, 1, 1000)
            .unwrap()
            .least_failing_prime(),
        Some(5)
    );
}

fn palindromic_quintic() -> impl Strategy<Value = IntPolynomial> {
    (1i64..=4, -6i64..=6, -6i64..=6).prop_filter_map("repeated root", |(e, a, b)| {
        let f = IntPolynomial::new(vec![e, a, b, b, a, e]);
        f.is_squarefree().then_some(f)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn substituting_a_square_doubles_the_trace(f in palindromic_quintic()) {
        let report = verify_factorization(&f.substitute_square(), &f, 2, 1000).unwrap();
        prop_assert!(report.passed(), "{}: {:?}", f, report);
        if f.leading() == 1 {
            let tw = peterson_d(&f, &MobiusTransform::inversion()).unwrap();
            prop_assert_eq!(tw.d, f.substitute_square());
        } else {
            prop_assert!(peterson_d(&f, &MobiusTransform::inversion()).is_err());
        }
    }
}
