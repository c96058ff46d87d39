use qconv::lattice::{
    delta_convolve, lattice_window, q_derivative, q_derivative_n, q_integral, DiscreteDelta, LatticeFunction, LatticePoint,
};
use qconv::qcore::{big_e_q, e_q, poch, poch_inf, q_binomial, q_number, qpow};
use qconv::series::moments_of;
use qconv::{QContext, C64};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn ctx() -> QContext {
    QContext::new(0.5).unwrap()
}

#[test]
fn pochhammer_values() {
    let ctx = ctx();
    assert_eq!(poch(c(0.3), 0.5, 0), c(1.0));
    assert_eq!(poch_inf(c(1.0), 0.5, &ctx).unwrap(), c(0.0));
    assert!((poch(c(0.5), 0.5, 2) - c(0.375)).norm() < 1e-15);
}

#[test]
fn q_numbers_and_binomials() {
    assert_eq!(q_number(0, 0.5), 0.0);
    assert!((q_number(3, 0.5) - 1.75).abs() < 1e-15);
    assert!((q_binomial(2, 1, 0.5).unwrap() - 1.5).abs() < 1e-15);
}

#[test]
fn exponentials_at_special_points() {
    let ctx = ctx();
    assert_eq!(e_q(c(0.0), 0.5, &ctx).unwrap(), c(1.0));
    assert_eq!(big_e_q(c(0.0), 0.5, &ctx).unwrap(), c(1.0));
    assert_eq!(big_e_q(c(-1.0), 0.25, &ctx).unwrap(), c(0.0));
    let x = c(0.3);
    let lhs = e_q(x, 0.5, &ctx).unwrap() * (c(1.0) - x);
    assert!((lhs - e_q(x * 0.5, 0.5, &ctx).unwrap()).norm() < 1e-14);
}

fn grid() -> Vec<C64> {
    let mut out = Vec::new();
    for r in [0.1, 0.5, 0.9, 1.3, 2.0] {
        for t in 1..8 {
            out.push(C64::from_polar(r, 0.4 * t as f64));
        }
    }
    out
}

#[test]
fn functional_equations_on_grid() {
    let ctx = ctx();
    let q = ctx.q();
    let tol = 10.0 * ctx.rel_tol();
    for x in grid() {
        let a = (c(1.0) - x) * e_q(x, q, &ctx).unwrap();
        let b = e_q(x * q, q, &ctx).unwrap();
        assert!((a - b).norm() <= tol * b.norm(), "e_q at {x}");
        let a = big_e_q(x, q, &ctx).unwrap();
        let b = (c(1.0) + x) * big_e_q(x * q, q, &ctx).unwrap();
        assert!((a - b).norm() <= tol * a.norm(), "E_q at {x}");
        let p = e_q(x, q, &ctx).unwrap() * big_e_q(-x, q, &ctx).unwrap();
        assert!((p - c(1.0)).norm() <= tol, "e_q E_q at {x}");
    }
}

#[test]
fn infinite_pochhammer_splits() {
    let ctx = ctx();
    let q = 0.5;
    for a in [c(0.3), C64::new(-0.7, 0.2), c(1.8)] {
        let whole = poch_inf(a, q, &ctx).unwrap();
        for k in 0..=10 {
            let split = poch(a, q, k) * poch_inf(a * qpow(q, k as i64), q, &ctx).unwrap();
            assert!((whole - split).norm() <= 1e-13 * whole.norm().max(1e-300), "a={a} k={k}");
        }
    }
}

#[test]
fn results_are_reproducible() {
    let a = QContext::new(0.37).unwrap();
    let b = QContext::new(0.37).unwrap();
    let x = C64::new(0.4, -1.1);
    assert_eq!(e_q(x, 0.37, &a).unwrap(), e_q(x, 0.37, &b).unwrap());
    assert_eq!(poch_inf(x, 0.37, &a).unwrap(), poch_inf(x, 0.37, &b).unwrap());
}

fn gaussian_fn(gamma: f64) -> LatticeFunction {
    let ctx = ctx();
    LatticeFunction::from_fn(gamma, None, move |x| C64::new(1.0, 0.0) / big_e_q(x * x, 0.25, &ctx).unwrap())
}

#[test]
fn odd_integrand_integrates_to_zero() {
    let ctx = ctx();
    let g = gaussian_fn(0.9);
    let odd = LatticeFunction::from_fn(0.9, None, move |x| x * g.eval(x, 0.5).unwrap());
    assert_eq!(q_integral(&odd, &ctx).unwrap(), c(0.0));
}

#[test]
fn gaussian_integral_matches_plain_sum() {
    let ctx = ctx();
    let q = 0.5;
    let v = q_integral(&gaussian_fn(1.0), &ctx).unwrap();
    let mut s = 0.0;
    for k in -30..=200 {
        let x = qpow(q, k);
        s += 2.0 * qpow(q, k) / big_e_q(c(x * x), q * q, &ctx).unwrap().re;
    }
    s *= 1.0 - q;
    assert!((v.re - s).abs() < 1e-13 * s);
}

#[test]
fn delta_integral_and_moments() {
    let ctx = ctx();
    let q = 0.5;
    for (sign, p, gamma) in [(1i8, 2i64, 0.9), (-1, -1, 0.7), (1, 0, 1.0)] {
        let d = DiscreteDelta::new(sign, p, gamma).unwrap();
        let f = d.to_lattice_function();
        let v = q_integral(&f, &ctx).unwrap();
        assert!((v.re - (1.0 - q) * qpow(q, p) * gamma).abs() < 1e-15);
        let m = moments_of(&f, 12, false, &ctx).unwrap();
        for k in 0..=12 {
            let want = d.moment(k, q);
            assert!((m.get(k).re - want).abs() <= 1e-14 * want.abs(), "k={k}");
        }
    }
}

#[test]
fn q_derivative_values() {
    let ctx = ctx();
    let sq = |x: C64| x * x;
    assert!((q_derivative(sq, c(1.0), &ctx).unwrap() - c(1.5)).norm() < 1e-15);
    let f = |x: C64| x * x * x;
    assert_eq!(q_derivative_n(f, c(0.7), 0, &ctx).unwrap(), f(c(0.7)));
    assert!((q_derivative_n(f, c(1.0), 2, &ctx).unwrap() - c(2.625)).norm() < 1e-13);
}

/// Repeated single-step differences as the oracle. Both routes lose digits
/// like `(x(1-q))^{-n} q^{-n²/2}`, so the samples sit where that factor is
/// moderate; the polynomial is also checked against its exact derivative.
fn repeated_difference(f: &dyn Fn(C64) -> C64, x: C64, n: usize, q: f64) -> C64 {
    let mut vals: Vec<C64> = (0..=n).map(|j| f(x * qpow(q, j as i64))).collect();
    for step in 0..n {
        for j in 0..n - step {
            vals[j] = (vals[j] - vals[j + 1]) / ((1.0 - q) * x * qpow(q, j as i64));
        }
    }
    vals[0]
}

#[test]
fn ryde_matches_repeated_differencing() {
    let ctx = ctx();
    let q = 0.5;
    let poly = |x: C64| x.powi(9) - x.powi(4) * 2.0 + c(0.5);
    let gauss = |x: C64| c(1.0) / big_e_q(x * x, q * q, &ctx).unwrap();
    for x in [c(3.6), c(-3.6), c(7.2), c(-14.4)] {
        for n in 1..=8 {
            for f in [&poly as &dyn Fn(C64) -> C64, &gauss] {
                let want = repeated_difference(f, x, n, q);
                let ryde = q_derivative_n(f, x, n, &ctx).unwrap();
                assert!((ryde - want).norm() <= 1e-9 * want.norm(), "x={x} n={n}");
            }
        }
    }
    let falling: f64 = (3..=9).map(|j| q_number(j, q)).product();
    let d7 = q_derivative_n(poly, c(0.9), 7, &ctx).unwrap();
    assert!((d7 - c(falling * 0.81)).norm() < 1e-9 * falling);
}

#[test]
fn shift_examples() {
    let ctx = ctx();
    let d = DiscreteDelta::new(1, 3, 0.9).unwrap();
    assert_eq!(d.shift(1), DiscreteDelta::new(1, 2, 0.9).unwrap());
    let g = gaussian_fn(0.9);
    assert_eq!(g.shift(0, 0.5).eval(c(0.45), 0.5).unwrap(), g.eval(c(0.45), 0.5).unwrap());
    let a = q_integral(&g.shift(1, 0.5), &ctx).unwrap();
    let b = q_integral(&g, &ctx).unwrap();
    assert!((a - b * 2.0).norm() < 1e-13 * b.norm());
}

#[test]
fn integral_does_not_depend_on_lattice_representative() {
    let ctx = ctx();
    let base = q_integral(&gaussian_fn(0.9), &ctx).unwrap();
    for k in -3..=3 {
        let v = q_integral(&gaussian_fn(0.9 * qpow(0.5, k)), &ctx).unwrap();
        assert_eq!(v, base, "k={k}");
    }
}

#[test]
fn delta_products_closed_form() {
    let ctx = ctx();
    let q = 0.5;
    let d = |s: i8, p: i64| DiscreteDelta::new(s, p, 1.0).unwrap();
    let p = |s: i8, k: i64| LatticePoint::new(s, k, 1.0).unwrap();
    assert_eq!(delta_convolve(&d(1, 1), &d(1, 2), p(1, 3), &ctx).unwrap(), c(0.0));
    let qq = poch_inf(c(q), q, &ctx).unwrap().re;
    assert!((delta_convolve(&d(1, 0), &d(1, 0), p(1, 0), &ctx).unwrap().re - 0.5 * qq).abs() < 1e-12);
    assert!((0.5 * qq - 0.14439).abs() < 1e-5);
    let (t, s, l) = (3i64, 2i64, 1i64);
    let want = (1.0 - q) * qpow(q, (t + s - l) + (s - l) * (t - l)) * qq
        / (poch(c(q), q, (s - l) as usize).re * poch(c(q), q, (t - l) as usize).re);
    let got = delta_convolve(&d(1, t), &d(1, s), p(1, l), &ctx).unwrap().re;
    assert!((got - want).abs() < 1e-13 * want);
}

#[test]
fn same_sign_deltas_commute() {
    let ctx = ctx();
    let window = lattice_window(0.9, -4..=10);
    for (s, (p1, p2)) in [(1i8, (0i64, 2i64)), (-1, (1, 3)), (1, (-1, 4))] {
        let a = DiscreteDelta::new(s, p1, 0.9).unwrap();
        let b = DiscreteDelta::new(s, p2, 0.9).unwrap();
        for &x in &window {
            let ab = delta_convolve(&a, &b, x, &ctx).unwrap();
            let ba = delta_convolve(&b, &a, x, &ctx).unwrap();
            assert!((ab - ba).norm() <= 1e-13 * ab.norm().max(1e-300));
        }
    }
}
