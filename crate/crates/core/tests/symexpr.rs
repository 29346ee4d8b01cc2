use proptest::prelude::*;
use tauquant::symexpr::{binding, parse, print};

/// Smooth expressions in x1 and k1 without poles.
fn smooth() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x1".to_string()),
        Just("k1".to_string()),
        (-9i32..=9).prop_map(|c| c.to_string()),
        (1u32..=9).prop_map(|c| format!("0.{c}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            (inner.clone(), 0u32..=3).prop_map(|(a, n)| format!("({a})^{n}")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("-({a})")),
            inner.prop_map(|a| format!("exp(0.1*sin({a}))")),
        ]
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_then_parse_preserves_values(src in smooth(), x in -2.0f64..2.0, k in -2.0f64..2.0) {
        let e = parse(&src).unwrap();
        let text = print(&e);
        let back = parse(&text).unwrap();
        prop_assert_eq!(print(&back), text.clone());
        let b = binding(&[("x1", x), ("k1", k)]);
        let (u, v) = (e.eval(&b).unwrap(), back.eval(&b).unwrap());
        prop_assert!(close(u, v, 1e-12), "{} vs {} for {}", u, v, text);
    }

    #[test]
    fn derivative_matches_central_difference(src in smooth(), x in -1.5f64..1.5, k in -1.5f64..1.5) {
        let e = parse(&src).unwrap();
        let d = e.diff("x1").unwrap();
        let h = 1e-5;
        let at = |x: f64| e.eval(&binding(&[("x1", x), ("k1", k)])).unwrap();
        let fd = (at(x + h) - at(x - h)) / (2.0 * h);
        let exact = d.eval(&binding(&[("x1", x), ("k1", k)])).unwrap();
        let scale = 1.0 + at(x).abs() + at(x + h).abs();
        prop_assert!((fd - exact).abs() <= 1e-5 * scale * (1.0 + exact.abs()), "{} vs {} for {}", fd, exact, src);
    }

    #[test]
    fn derivatives_commute(src in smooth(), x in -1.5f64..1.5, k in -1.5f64..1.5) {
        let e = parse(&src).unwrap();
        let b = binding(&[("x1", x), ("k1", k)]);
        let xy = e.diff("x1").unwrap().diff("k1").unwrap().eval(&b).unwrap();
        let yx = e.diff("k1").unwrap().diff("x1").unwrap().eval(&b).unwrap();
        prop_assert!(close(xy, yx, 1e-10));
    }
}

#[test]
fn unary_minus_binds_tighter_than_power() {
    let e = parse("-2^2").unwrap();
    assert_eq!(e.eval(&binding(&[])).unwrap(), 4.0);
}
