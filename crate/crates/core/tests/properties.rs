//! Randomized invariants across modules.

use nilquant::berezin::{berezin_matrix, BerezinConfig};
use nilquant::coherent::{weyl, weyl_adjoint, weyl_compose_factor, PhasePoint, Window};
use nilquant::magnetic::{cocycle_flux, mag_translation, VectorPotential};
use nilquant::symbol::Symbol;
use nilquant::tau::{tau_tilde, TauMap};
use nilquant::{Algebra, Complex64, Domain, Field, Grid, OperatorMatrix, XiGrid};
use proptest::prelude::*;

fn vec_in(n: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, n)
}

fn point(n: usize) -> impl Strategy<Value = PhasePoint> {
    (vec_in(n, 1.0), vec_in(n, 1.0)).prop_map(|(z, zeta)| PhasePoint::new(z, zeta))
}

fn packet(n: usize) -> Field {
    let k: Vec<f64> = (0..n).map(|i| 0.3 + 0.2 * i as f64).collect();
    Field::gaussian(Domain::Group, vec![0.1; n], 1.0)
        .map(move |x, v| v * Complex64::from_polar(1.0, x.iter().zip(&k).map(|(a, b)| a * b).sum()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weyl_composition_on_engel(p in point(4), q in point(4), x in vec_in(4, 1.5)) {
        let alg = Algebra::engel();
        let u = packet(4);
        let lhs = weyl(&alg, &p, &weyl(&alg, &q, &u).unwrap()).unwrap().eval(&x);
        let pq = PhasePoint::new(
            alg.bch(&p.z, &q.z).unwrap(),
            p.zeta.iter().zip(&q.zeta).map(|(a, b)| a + b).collect(),
        );
        let rhs = weyl_compose_factor(&alg, &p, &q, &x).unwrap() * weyl(&alg, &pq, &u).unwrap().eval(&x);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn weyl_adjoint_is_inverse(p in point(3), x in vec_in(3, 1.5)) {
        let alg = Algebra::heisenberg(1).unwrap();
        let u = packet(3);
        let back = weyl_adjoint(&alg, &p, &weyl(&alg, &p, &u).unwrap()).unwrap().eval(&x);
        prop_assert!((back - u.eval(&x)).norm() < 1e-13);
    }

    #[test]
    fn magnetic_cocycle_landau(y in vec_in(2, 1.0), z in vec_in(2, 1.0), x in vec_in(2, 1.0), b in -2.0f64..2.0) {
        let alg = Algebra::abelian(2).unwrap();
        let a = VectorPotential::landau(2, b).unwrap();
        let u = packet(2);
        let lhs = mag_translation(&alg, &a, &y, &mag_translation(&alg, &a, &z, &u).unwrap()).unwrap().eval(&x);
        let yz = alg.bch(&y, &z).unwrap();
        let phase = Complex64::from_polar(1.0, cocycle_flux(&alg, &a, &x, &y, &z).unwrap());
        let rhs = phase * mag_translation(&alg, &a, &yz, &u).unwrap().eval(&x);
        prop_assert!((lhs - rhs).norm() < 1e-8);
    }

    #[test]
    fn stokes_for_the_linear_potential(p in vec_in(3, 1.5), q in vec_in(3, 1.5), r in vec_in(3, 1.5), b in -1.0f64..1.0) {
        let a = VectorPotential::linear3(b);
        prop_assert!((a.flux_triangle(&p, &q, &r) - a.boundary_circulation(&p, &q, &r)).abs() < 1e-8);
    }

    #[test]
    fn tau_tilde_is_an_involution(t in 0.0f64..1.0, x in vec_in(3, 2.0)) {
        let alg = Algebra::heisenberg(1).unwrap();
        let tau = TauMap::scaled(t);
        let back = tau_tilde(&alg, &tau_tilde(&alg, &tau));
        let (a, b) = (tau.apply(&x), back.apply(&x));
        prop_assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-12));
    }
}

fn random_op(grid: &Grid, seed: f64) -> OperatorMatrix {
    OperatorMatrix::from_fn(grid, move |x, y| {
        Complex64::new((seed * x[0] + y[0]).sin(), (x[0] - seed * y[0]).cos()) * (-(x[0] * x[0] + y[0] * y[0]) / 4.0).exp()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn schatten_norms_decrease_in_p(seed in -3.0f64..3.0) {
        let grid = Grid::cube(1, 4.0, 16).unwrap();
        let k = random_op(&grid, seed);
        let ps = [1.0, 1.5, 2.0, 4.0, f64::INFINITY];
        let norms: Vec<f64> = ps.iter().map(|&p| k.schatten_norm(p).unwrap()).collect();
        prop_assert!(norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }

    #[test]
    fn trace_is_cyclic(s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let grid = Grid::cube(1, 4.0, 16).unwrap();
        let (a, b) = (random_op(&grid, s), random_op(&grid, t));
        let (ab, ba) = (a.compose(&b).unwrap().trace(), b.compose(&a).unwrap().trace());
        prop_assert!((ab - ba).norm() <= 1e-10 * ab.norm().max(1.0));
    }

    #[test]
    fn berezin_of_real_symbols_is_hermitian_and_positive(
        x0 in -1.0f64..1.0, xi0 in -1.0f64..1.0, sx in 0.6f64..1.5, sxi in 0.6f64..1.5,
    ) {
        let alg = Algebra::abelian(1).unwrap();
        let grid = Grid::cube(1, 6.0, 24).unwrap();
        let xi = XiGrid::cube(1, 6.0, 24, 6.0, 24).unwrap();
        let w = Window::standard(&grid).unwrap();
        let f = Symbol::gaussian(1.0, vec![x0], sx, vec![xi0], sxi);
        let b = berezin_matrix(&BerezinConfig::new(alg, w, grid, xi, f).unwrap()).unwrap();
        prop_assert!(b.hermiticity_residual() <= 1e-10);
        let min = b.hermitian_eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= -1e-8);
    }
}
