mod common;

use nalgebra::{dvector, DMatrix, DVector};
use rand::Rng;

use common::{gaussian_vec, rng};
use solsearch::operators::{check_derivatives, rayleigh_quotient};
use solsearch::problems::{suite, Quadratic, Rosenbrock};
use solsearch::{Counted, EvalCounters, Objective};

fn rosenbrock_grad(x: f64, y: f64) -> DVector<f64> {
    // d/dx [100(y − x²)² + (1 − x)²], d/dy of the same
    dvector![-400.0 * x * (y - x * x) - 2.0 * (1.0 - x), 200.0 * (y - x * x)]
}

#[test]
fn rosenbrock_gradient_matches_hand_derivation() {
    let x0 = dvector![-1.2, 1.0];
    let f = Rosenbrock::new(100.0, &x0);
    let g = f.gradient(&x0);
    assert!((g - rosenbrock_grad(-1.2, 1.0)).norm() < 1e-12);
    assert!((f.gradient(&x0) - dvector![-215.6, -88.0]).norm() < 1e-12);
    let rep = check_derivatives(&f, &x0, 1e-6).unwrap();
    assert!(rep.gradient <= 1e-6, "{rep:?}");
}

#[test]
fn rayleigh_quotient_matches_dense() {
    let mut r = rng(5);
    for _ in 0..20 {
        let m = DMatrix::from_fn(5, 5, |_, _| r.random_range(-1.0..1.0));
        let a = &m + m.transpose();
        let q = Quadratic::new(a.clone());
        let obj = Counted::new(&q);
        let x = gaussian_vec(5, &mut r);
        let g = gaussian_vec(5, &mut r);
        let dense = g.dot(&(&a * &g)) / g.dot(&g);
        let rq = rayleigh_quotient(&obj, &x, &g).unwrap();
        assert!((rq - dense).abs() <= 1e-12 * (1.0 + dense.abs()));
        assert_eq!(obj.counters().n_hv, 1);
    }
}

#[test]
fn zero_direction_is_rejected() {
    let q = Quadratic::new(DMatrix::identity(2, 2));
    let obj = Counted::new(&q);
    assert!(rayleigh_quotient(&obj, &dvector![1.0, 0.0], &DVector::zeros(2)).is_err());
}

#[test]
fn hessian_vector_is_linear_and_symmetric() {
    let mut r = rng(11);
    for p in suite().unwrap() {
        let f = p.objective();
        let n = f.dim();
        for _ in 0..100 {
            let x = &p.x0 + gaussian_vec(n, &mut r) * 0.5;
            let (u, v) = (gaussian_vec(n, &mut r), gaussian_vec(n, &mut r));
            let (a, b) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
            let hu = f.hessian_vector(&x, &u);
            let hv = f.hessian_vector(&x, &v);
            let lhs = f.hessian_vector(&x, &(&u * a + &v * b));
            let scale = 1.0 + hu.norm() * a.abs() + hv.norm() * b.abs();
            assert!((lhs - (hu.clone() * a + hv.clone() * b)).norm() <= 1e-10 * scale, "{}", p.id);
            let (uhv, vhu) = (u.dot(&hv), v.dot(&hu));
            assert!((uhv - vhu).abs() <= 1e-10 * (1.0 + uhv.abs()), "{}", p.id);
            if let Some(h) = f.dense_hessian(&x) {
                assert!((h * &u - &hu).norm() <= 1e-10 * (1.0 + hu.norm()), "{}", p.id);
            }
        }
    }
}

#[test]
fn counters_track_each_call() {
    let q = Quadratic::new(DMatrix::identity(3, 3));
    let obj = Counted::new(&q);
    let x = DVector::from_element(3, 1.0);
    obj.value(&x);
    obj.value(&x);
    obj.gradient(&x);
    obj.hessian_vector(&x, &x);
    obj.dense_hessian(&x);
    obj.inner().value(&x);
    assert_eq!(obj.counters(), EvalCounters { n_f: 2, n_grad: 1, n_hv: 1, n_hess: 1 });
    assert_eq!(obj.counters().grad_and_hv(), 2);
}

#[test]
fn derivative_checker_flags_a_wrong_gradient() {
    struct Wrong;
    impl Objective for Wrong {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &DVector<f64>) -> f64 {
            x[0].powi(3)
        }
        fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
            dvector![2.0 * x[0] * x[0]]
        }
        fn hessian_vector(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
            dvector![6.0 * x[0] * v[0]]
        }
    }
    let rep = check_derivatives(&Wrong, &dvector![1.0], 1e-5).unwrap();
    assert!(rep.gradient > 0.3);
    assert!(check_derivatives(&Wrong, &dvector![1.0], 0.0).is_err());
}
