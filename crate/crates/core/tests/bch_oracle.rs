//! BCH products against `log(exp X exp Y)` in faithful nilpotent matrix
//! representations, where both series terminate.

use nalgebra::DMatrix;
use nilquant::{Algebra, RationalAlgebra};
use num_rational::Rational64;
use proptest::prelude::*;

fn unit(m: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(m, m);
    e[(i, j)] = 1.0;
    e
}

struct Rep(Vec<DMatrix<f64>>);

impl Rep {
    fn heisenberg() -> Self {
        Rep(vec![unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)])
    }

    fn engel() -> Self {
        Rep(vec![unit(4, 0, 1) + unit(4, 1, 2) + unit(4, 2, 3), unit(4, 2, 3), unit(4, 1, 3), unit(4, 0, 3)])
    }

    fn of(&self, x: &[f64]) -> DMatrix<f64> {
        let m = self.0[0].nrows();
        x.iter().zip(&self.0).fold(DMatrix::zeros(m, m), |a, (c, b)| a + b * *c)
    }

    /// Matrix of the bracket table, to certify the representation.
    fn check_homomorphism(&self, alg: &Algebra) {
        let n = self.0.len();
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&self.0[i], &self.0[j]);
                let c: Vec<f64> = (0..n).map(|k| *alg.constant(i, j, k)).collect();
                assert_eq!(a * b - b * a, self.of(&c), "[e{i}, e{j}]");
            }
        }
    }

    fn exp(&self, x: &[f64]) -> DMatrix<f64> {
        let a = self.of(x);
        let m = a.nrows();
        let (mut term, mut sum) = (DMatrix::identity(m, m), DMatrix::identity(m, m));
        for k in 1..m {
            term = &term * &a / k as f64;
            sum += &term;
        }
        sum
    }

    fn log_coords(&self, u: &DMatrix<f64>) -> Vec<f64> {
        let m = u.nrows();
        let n = u - DMatrix::identity(m, m);
        let (mut p, mut l) = (n.clone(), DMatrix::zeros(m, m));
        for k in 1..m {
            l += &p * (if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64);
            p = &p * &n;
        }
        let a = DMatrix::from_fn(m * m, self.0.len(), |r, c| self.0[c][(r / m, r % m)]);
        let b = DMatrix::from_fn(m * m, 1, |r, _| l[(r / m, r % m)]);
        a.svd(true, true).solve(&b, 1e-14).unwrap().column(0).iter().copied().collect()
    }
}

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn representations_are_faithful_homomorphisms() {
    Rep::heisenberg().check_homomorphism(&Algebra::heisenberg(1).unwrap());
    Rep::engel().check_homomorphism(&Algebra::engel());
}

proptest! {
    #[test]
    fn heisenberg_bch_matches_matrix_exponential(x in coords(3), y in coords(3)) {
        let alg = Algebra::heisenberg(1).unwrap();
        let rep = Rep::heisenberg();
        let want = rep.log_coords(&(rep.exp(&x) * rep.exp(&y)));
        prop_assert!(max_diff(&alg.bch(&x, &y).unwrap(), &want) < 1e-10);
    }

    #[test]
    fn engel_bch_matches_matrix_exponential(x in coords(4), y in coords(4)) {
        let alg = Algebra::engel();
        let rep = Rep::engel();
        let want = rep.log_coords(&(rep.exp(&x) * rep.exp(&y)));
        prop_assert!(max_diff(&alg.bch(&x, &y).unwrap(), &want) < 1e-10);
    }

    #[test]
    fn engel_group_laws(x in coords(4), y in coords(4), z in coords(4)) {
        let alg = Algebra::engel();
        let l = alg.mul(&alg.mul(&x, &y).unwrap(), &z).unwrap();
        let r = alg.mul(&x, &alg.mul(&y, &z).unwrap()).unwrap();
        prop_assert!(max_diff(&l, &r) < 1e-10);
        prop_assert!(max_diff(&alg.mul(&x, &alg.inv(&x)).unwrap(), &[0.0; 4]) < 1e-15);
    }

    #[test]
    fn rational_products_are_exactly_associative(
        a in prop::collection::vec(-9i64..9, 6),
        b in prop::collection::vec(-9i64..9, 6),
        c in prop::collection::vec(-9i64..9, 6),
    ) {
        let alg = RationalAlgebra::upper_triangular(4).unwrap();
        let q = |v: &[i64]| v.iter().map(|&k| Rational64::new(k, 3)).collect::<Vec<_>>();
        let (x, y, z) = (q(&a), q(&b), q(&c));
        let l = alg.mul(&alg.mul(&x, &y).unwrap(), &z).unwrap();
        let r = alg.mul(&x, &alg.mul(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }
}

#[test]
fn triangular_bch_matches_matrix_exponential() {
    // Strictly upper triangular 4×4, basis E_ab in lexicographic order.
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let rep = Rep(pairs.iter().map(|&(a, b)| unit(4, a, b)).collect());
    let alg = Algebra::upper_triangular(4).unwrap();
    rep.check_homomorphism(&alg);
    let x = [0.7, -1.1, 0.4, 1.3, -0.2, 0.9];
    let y = [-0.5, 0.8, 1.2, -0.6, 0.3, -1.4];
    let want = rep.log_coords(&(rep.exp(&x) * rep.exp(&y)));
    assert!(max_diff(&alg.bch(&x, &y).unwrap(), &want) < 1e-12);
}
