use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use solsearch::bounds::{scalar_root_bound, scalar_root_lhs};
use solsearch::linesearch::backtrack;
use solsearch::problems::Quadratic;
use solsearch::steps::scale_eigvector;
use solsearch::{Counted, Objective, SolverConfig};

proptest! {
    #[test]
    fn scalar_root_inequality(a in 1e-6f64..10.0, b in 1e-6f64..10.0, t in 0.0f64..5.0) {
        prop_assert!(scalar_root_lhs(a, b, t) >= scalar_root_bound(a, b, t));
    }

    #[test]
    fn accepted_steps_satisfy_cubic_decrease(
        diag in prop::collection::vec(-3.0f64..3.0, 1..6),
        seed in prop::collection::vec(-2.0f64..2.0, 6),
        theta in 0.1f64..0.9,
        eta in 0.1f64..5.0,
    ) {
        let n = diag.len();
        let q = Quadratic::new(DMatrix::from_diagonal(&DVector::from_vec(diag)));
        let obj = Counted::new(&q);
        let x = DVector::from_fn(n, |i, _| seed[i]);
        let g = q.gradient(&x);
        prop_assume!(g.norm() > 1e-6);
        let d = -&g;
        let cfg = SolverConfig { theta, eta, max_ls_steps: 2000, ..SolverConfig::default() };
        let ls = backtrack(&obj, &x, q.value(&x), &d, &cfg).unwrap();
        prop_assert!(ls.decrease > eta / 6.0 * (ls.alpha * d.norm()).powi(3));
        let alpha = |j: usize| (0..j).fold(1.0, |a, _| a * theta);
        prop_assert_eq!(ls.alpha, alpha(ls.j));
        if ls.j > 0 {
            let prev = alpha(ls.j - 1);
            let xp = &x + &d * prev;
            prop_assert!(q.value(&x) - q.value(&xp) <= eta / 6.0 * (prev * d.norm()).powi(3));
        }
    }

    #[test]
    fn curvature_step_is_never_ascent(
        v in prop::collection::vec(-1.0f64..1.0, 4),
        g in prop::collection::vec(-1.0f64..1.0, 4),
        lambda in -5.0f64..5.0,
    ) {
        let v = DVector::from_vec(v);
        prop_assume!(v.norm() > 1e-3);
        let v = &v / v.norm();
        let g = DVector::from_vec(g);
        let d = scale_eigvector(&v, lambda, &g);
        prop_assert!(d.dot(&g) <= 0.0);
        prop_assert!((d.norm() - (-lambda).max(0.0)).abs() <= 1e-12);
    }
}
