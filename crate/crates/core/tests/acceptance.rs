//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL ...` line.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tauquant::calculus::{
    band_residual, compose_expansion, convert_quantization, dual_quantization, leading_symbol, parametrix, DualKind,
};
use tauquant::discretize::{Grid, GridFunction};
use tauquant::estimates::{cv_bound, garding_check, matrix_norm, CvBox, NormMethod};
use tauquant::heisenberg::{check_symmetry, midpoint, symmetry_tau, HeisPoint, TauMethod, Variant};
use tauquant::quantize::{apply, kn_fast_apply, op_amplitude, op_oracle, op_symbol, OperatorMatrix};
use tauquant::rational::Q;
use tauquant::symbol::ComplexSymbol;
use tauquant::symexpr::Expr;
use tauquant::tau::QuantizingFunction;

const NONLINEAR: &str = "w/2 + 0.1*sin(w)";

fn report(n: u32, ok: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn tau(spec: &str) -> QuantizingFunction {
    QuantizingFunction::from_spec(spec, 1).unwrap()
}

fn sym(re: &str, im: Option<&str>) -> ComplexSymbol {
    ComplexSymbol::parse_symbol(re, im, 1).unwrap()
}

fn opnorm(a: &DMatrix<Complex64>) -> f64 {
    matrix_norm(a, NormMethod::FullDecomposition).unwrap().norm
}

/// Random complex symbol, 2π-periodic in x with a Gaussian band profile in ξ.
fn random_symbol(rng: &mut ChaCha8Rng) -> ComplexSymbol {
    let mut part = || {
        let (p, q) = (rng.gen_range(0..4), rng.gen_range(1..4));
        let (c0, c1, c2) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let lam = rng.gen_range(5.0..9.0);
        format!("({c0:.6} + {c1:.6}*cos({p}*x) + {c2:.6}*sin({q}*x))*(1 + k/{lam:.3})*exp(-((k/{lam:.3})^2))")
    };
    let (re, im) = (part(), part());
    sym(&re, Some(&im))
}

#[test]
fn criterion_01_identity_normalization() {
    let mut worst = 0.0f64;
    for t in ["kn", "akn", "weyl", "linear:0.3", NONLINEAR] {
        for n in [32, 64, 128] {
            let g = Grid::new(1, n, PI).unwrap();
            let a = op_symbol(&ComplexSymbol::one(), &tau(t), &g).unwrap();
            worst = worst.max(a.max_diff(&OperatorMatrix::identity(g)));
        }
    }
    report(1, worst <= 1e-12, format!("max entry error {worst:.2e} (tol 1e-12)"));
}

#[test]
fn criterion_02_weyl_self_adjoint() {
    let g = Grid::new(1, 128, PI).unwrap();
    let weyl = tau("weyl");
    let symbols = [
        "cos(x)*exp(-((k/8)^2))",
        "(2 + sin(2*x))*k^2*exp(-((k/10)^2))",
        "sin(x)*cos(3*x)*k*exp(-((k/9)^2))",
        "exp(cos(x))*exp(-((k/12)^2))",
        "(1 + 0.5*sin(x))^2*(1 + k^2)*exp(-((k/8)^2))",
    ];
    let mut worst = 0.0f64;
    for s in symbols {
        let a = op_symbol(&sym(s, None), &weyl, &g).unwrap();
        worst = worst.max(a.max_diff(&a.adjoint()));
    }
    report(2, worst <= 1e-12, format!("max |A - A^H| {worst:.2e} (tol 1e-12)"));
}

#[test]
fn criterion_03_dual_adjoint_law() {
    let g = Grid::new(1, 128, PI).unwrap();
    let t = tau(NONLINEAR);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let s = random_symbol(&mut rng);
        let a = op_symbol(&s, &t, &g).unwrap();
        let (sa, ta) = dual_quantization(&s, &t, DualKind::Adjoint);
        let b = op_symbol(&sa, &ta, &g).unwrap();
        worst = worst.max(opnorm(&(b.matrix - a.adjoint().matrix)));
    }
    report(3, worst <= 1e-10, format!("operator-norm defect {worst:.2e} (tol 1e-10)"));
}

#[test]
fn criterion_04_exact_termination() {
    let g = Grid::new(1, 128, PI).unwrap();
    let s = sym("x*exp(-((k/8)^2))", None);
    let r = convert_quantization(&s, &tau("kn"), &tau("akn"), 2, 1).unwrap();
    let reference = op_symbol(&s, &tau("kn"), &g).unwrap().matrix;
    let defect = opnorm(&(op_amplitude(&r.amplitude_sum(), &g).unwrap().matrix - &reference));

    // degree 0 is y·g, degree 1 sums to i·g′
    let deg0 = r.terms[0].symbol().unwrap();
    let deg1 = r.terms[1].symbol().unwrap().add(&r.terms[2].symbol().unwrap());
    let mut pointwise = 0.0f64;
    for i in 0..50 {
        let (y, k) = (-3.0 + 0.12 * i as f64, -20.0 + 0.8 * i as f64);
        let gk = (-(k / 8.0) * (k / 8.0)).exp();
        let gp = -2.0 * k / 64.0 * gk;
        let at = [("x1", y), ("k1", k)];
        pointwise = pointwise.max((deg0.eval_at(&at).unwrap() - Complex64::new(y * gk, 0.0)).norm());
        pointwise = pointwise.max((deg1.eval_at(&at).unwrap() - Complex64::new(0.0, gp)).norm());
    }
    report(
        4,
        defect <= 1e-8 && pointwise <= 1e-10,
        format!("operator defect {defect:.2e} (tol 1e-8), pointwise term error {pointwise:.2e} (tol 1e-10)"),
    );
}

#[test]
fn criterion_05_asymptotic_order() {
    let g = Grid::new(1, 256, PI).unwrap();
    let (weyl, kn) = (tau("weyl"), tau("kn"));
    let mut ok = true;
    let mut detail = Vec::new();
    for m in [1u32, 2] {
        let defect = |lam: f64| {
            let s = sym(&format!("sin(x)*exp(-((k/{lam})^2))"), None);
            let b = convert_quantization(&s, &weyl, &kn, m, 1).unwrap().symbol_sum().unwrap();
            let a = op_symbol(&s, &weyl, &g).unwrap().matrix;
            opnorm(&(op_symbol(&b, &kn, &g).unwrap().matrix - a))
        };
        let d: Vec<f64> = [4.0, 8.0, 16.0].iter().map(|&l| defect(l)).collect();
        let target = 2f64.powi(-(m as i32));
        for i in 0..2 {
            let ratio = d[i + 1] / d[i];
            ok &= ratio >= target / 2.0 && ratio <= target * 2.0;
            detail.push(format!("M={m} lambda={} ratio {ratio:.3} (target {target})", 4 << i));
        }
    }
    report(5, ok, detail.join(", "));
}

#[test]
fn criterion_06_composition() {
    let g = Grid::new(1, 128, PI).unwrap();
    let (kn, weyl) = (tau("kn"), tau("weyl"));
    let f = sym("exp(-((k/6)^2))", None);
    let h = sym("k^2*exp(-((k/6)^2))", None);
    let r = compose_expansion(&f, &weyl, &h, &kn, &weyl, 3, 1).unwrap();
    let prod = op_symbol(&f, &weyl, &g).unwrap().matrix * op_symbol(&h, &kn, &g).unwrap().matrix;
    let mult = opnorm(&(op_amplitude(&r.amplitude_sum(), &g).unwrap().matrix - prod));

    let s1 = sym("sin(x)", None);
    let s2 = sym("k*exp(-((k/8)^2))", None);
    let r = compose_expansion(&s1, &kn, &s2, &kn, &kn, 3, 1).unwrap();
    let b = r.symbol_sum().unwrap();
    let prod = op_symbol(&s1, &kn, &g).unwrap().matrix * op_symbol(&s2, &kn, &g).unwrap().matrix;
    let sine = opnorm(&(op_symbol(&b, &kn, &g).unwrap().matrix - prod));
    report(
        6,
        mult <= 1e-12 && sine <= 1e-8,
        format!("multiplier defect {mult:.2e} (tol 1e-12), sin(x)*derivative defect {sine:.2e} (tol 1e-8)"),
    );
}

#[test]
fn criterion_07_parametrix_residual() {
    let g = Grid::new(1, 128, 2.0 * PI).unwrap();
    let weyl = tau("weyl");
    let s = sym("(2 + sin(x))*(1 + k^2)", None);
    let r0 = 5.0;
    let res: Vec<f64> = (1..=3)
        .map(|m| {
            let p = parametrix(&s, &weyl, 2.0, m, r0).unwrap();
            band_residual(&p.kappa, &s, &weyl, &g, 2.0 * r0, g.band() / 2.0).unwrap()
        })
        .collect();
    let ok = res[1] < res[0] && res[2] < res[1] && res[2] <= 0.05;
    report(7, ok, format!("residuals M=1,2,3: {:.3e}, {:.3e}, {:.3e} (M=3 tol 0.05)", res[0], res[1], res[2]));
}

#[test]
fn criterion_08_garding() {
    let g = Grid::new(1, 128, 2.0 * PI).unwrap();
    let s = sym("(2 + sin(x))*(1 + k^2)", None);
    let r = garding_check(&s, &tau("weyl"), 1.0, 0.0, &g).unwrap();
    report(
        8,
        r.c1 >= 0.1 && r.verified,
        format!("C1 {:.4}, C2 {:.4}, min eigenvalue {:.2e}, verified {}", r.c1, r.c2, r.min_eigenvalue, r.verified),
    );
}

/// Random amplitude with bounded derivatives, periodic in x and y.
fn cv_amplitude(seed: u64) -> ComplexSymbol {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for _ in 0..3 {
        let c = rng.gen_range(-1.0..1.0);
        let (p, q) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        let phi = rng.gen_range(0.0..6.28);
        let om = rng.gen_range(0.0..1.0);
        let psi = rng.gen_range(0.0..6.28);
        terms.push(format!("{c:.6}*cos({p}*x + {q}*y + {phi:.4})*cos({om:.4}*k + {psi:.4})/(1 + (k/8)^2)"));
    }
    ComplexSymbol::parse_amplitude(&terms.join(" + "), None, 1).unwrap()
}

#[test]
fn criterion_09_calderon_vaillancourt() {
    let g = Grid::new(1, 64, PI).unwrap();
    let bx = CvBox { x: PI, y: PI, k: g.band() };
    let ratio = |seed: u64| {
        let a = cv_amplitude(seed);
        let norm = opnorm(&op_amplitude(&a, &g).unwrap().matrix);
        let m = cv_bound(&a, 1, &bx, 1024).unwrap().m_val;
        (norm, m)
    };
    let c_cal = (1..=20).map(|s| { let (n, m) = ratio(s); n / m }).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    let mut all = true;
    for s in 101..=120 {
        let (n, m) = ratio(s);
        worst = worst.max(n / m);
        all &= n <= c_cal * m;
    }
    let a = cv_amplitude(7);
    let base = cv_bound(&a, 1, &bx, 512).unwrap().m_val;
    let homog = [2.0, -0.5, 4.0].iter().all(|&c| {
        cv_bound(&a.scale_real(Expr::constant(c)), 1, &bx, 512).unwrap().m_val == c.abs() * base
    });
    report(
        9,
        all && homog,
        format!("C_cal {c_cal:.4}, worst fresh ratio {worst:.4}, homogeneity exact {homog}"),
    );
}

#[test]
fn criterion_10_inversion_and_leading_symbol() {
    let t = tau(NONLINEAR);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (x, w) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let y = t.invert_tau_x(&[x], &[w], 1e-13).unwrap();
        worst = worst.max((t.tau_x(&[x], &y).unwrap()[0] - w).abs());
    }
    let s = sym("(1 + 0.5*cos(x))*exp(-(k^2))", Some("sin(x)*k"));
    let (b, _) = leading_symbol(&s, &tau("weyl")).unwrap();
    let expect = s.substitute(&[("k1".to_string(), Expr::mul(Expr::constant(0.5), Expr::var("k1")))].into());
    let exact = b == expect;
    report(10, worst <= 1e-12 && exact, format!("round-trip error {worst:.2e} (tol 1e-12), Weyl b0 exact {exact}"));
}

fn random_point(rng: &mut ChaCha8Rng, v: Variant) -> HeisPoint {
    let mut r = || Q::new(rng.gen_range(-60..=60), rng.gen_range(1..=24)).unwrap();
    HeisPoint::new(v, r(), r(), r())
}

#[test]
fn criterion_11_heisenberg_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ok = true;
    for v in [Variant::Polarised, Variant::Standard] {
        for _ in 0..1000 {
            let p = random_point(&mut rng, v);
            ok &= symmetry_tau(&p, TauMethod::Integral).unwrap() == symmetry_tau(&p, TauMethod::Closed).unwrap();
            ok &= check_symmetry(&p).unwrap();
        }
    }
    let x = HeisPoint::parse(Variant::Standard, "1,2,5").unwrap();
    let m = midpoint(&x, &x.inv().unwrap()).unwrap();
    let origin_twist = m.point == HeisPoint::parse(Variant::Standard, "0,0,-4/3").unwrap();
    let mut two_path = true;
    for _ in 0..200 {
        let (p, q) = (random_point(&mut rng, Variant::Standard), random_point(&mut rng, Variant::Standard));
        two_path &= midpoint(&p, &q).unwrap().agree == Some(true);
    }
    report(
        11,
        ok && origin_twist && two_path,
        format!("closed = integral and symmetry on 2x1000 points {ok}, m(x, x^-1) = {} , two-path agreement {two_path}", m.point),
    );
}

#[test]
fn criterion_12_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let taus = ["kn", "akn", "weyl", "linear:0.3", NONLINEAR];
    let mut worst = 0.0f64;
    for i in 0..20 {
        let s = random_symbol(&mut rng);
        let t = tau(taus[i % taus.len()]);
        let g = Grid::new(1, [16, 32][i % 2], [PI, 2.0 * PI][(i / 2) % 2]).unwrap();
        let a = op_symbol(&s, &t, &g).unwrap();
        let b = op_oracle(&s, &t, &g).unwrap();
        worst = worst.max(a.max_diff(&b));
    }
    let mut fast = 0.0f64;
    for _ in 0..20 {
        let s = random_symbol(&mut rng);
        let g = Grid::new(1, 64, PI).unwrap();
        let vals: Vec<Complex64> =
            (0..g.size()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let u = GridFunction::new(g, vals).unwrap();
        let a = op_symbol(&s, &tau("kn"), &g).unwrap();
        let v1 = apply(&a, &u).unwrap();
        let v2 = kn_fast_apply(&s, &g, &u).unwrap();
        fast = fast.max(v1.max_abs_diff(&v2));
    }
    report(
        12,
        worst <= 1e-10 && fast <= 1e-10,
        format!("assembly vs oracle {worst:.2e}, fast KN apply vs matrix {fast:.2e} (tol 1e-10)"),
    );
}
