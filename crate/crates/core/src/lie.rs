//! Nilpotent Lie algebras in exponential coordinates of the first kind.
//!
//! A group point `x` is stored as `log x`, so `exp` and `log` are the identity
//! on coordinates and the group law is the (finite) Baker–Campbell–Hausdorff
//! product. Haar measure is Lebesgue measure in these coordinates.

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::scalar::{LieScalar, Real};

/// Deepest bracket the BCH table below carries.
pub const MAX_BCH_DEPTH: usize = 6;

/// Largest step for which [`LieAlgebra::dlambda_left`] has a closed form.
pub const DLAMBDA_CLOSED_FORM_MAX_STEP: usize = 2;

/// BCH series `log(e^X e^Y)` through degree 6 as right-nested brackets:
/// the word `XXY` stands for `[X,[X,Y]]`. Coefficients were obtained by exact
/// rational elimination in the free associative algebra.
const BCH_TERMS: &[(&str, i64, i64)] = &[
    ("X", 1, 1),
    ("Y", 1, 1),
    ("XY", 1, 2),
    ("XXY", 1, 12),
    ("YXY", -1, 12),
    ("XYXY", -1, 24),
    ("XXXXY", -1, 720),
    ("XXYXY", -1, 120),
    ("XYYXY", -1, 360),
    ("YXXXY", 1, 360),
    ("YXYXY", 1, 120),
    ("YYYXY", 1, 720),
    ("XXXYXY", -1, 1440),
    ("XXYYXY", -1, 720),
    ("XYXXXY", 1, 720),
    ("XYXYXY", 1, 240),
    ("XYYYXY", 1, 1440),
];

/// Real Lie algebra given by structure constants `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra<T> {
    dim: usize,
    constants: Vec<T>,
    nonzero: Vec<(usize, usize, usize, T)>,
    step: usize,
    name: String,
}

impl<T: LieScalar> LieAlgebra<T> {
    /// Builds an algebra from the full `n×n×n` constant table (index
    /// `(i*n + j)*n + k`). Only shapes are checked here; use
    /// [`LieAlgebra::validate`] for the algebraic axioms.
    pub fn new(dim: usize, constants: Vec<T>, step: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("algebra dimension must be positive".into()));
        }
        check_dim(dim * dim * dim, constants.len())?;
        if step == 0 {
            return Err(Error::InvalidArgument("nilpotency step must be positive".into()));
        }
        let mut nonzero = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let c = &constants[(i * dim + j) * dim + k];
                    if !c.is_zero() {
                        nonzero.push((i, j, k, c.clone()));
                    }
                }
            }
        }
        Ok(Self {
            dim,
            constants,
            nonzero,
            step,
            name: format!("custom:{dim}"),
        })
    }

    /// Builds an antisymmetric table from the brackets `[e_i, e_j] += c e_k`
    /// listed for `i < j`.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, usize, T)], step: usize) -> Result<Self> {
        let mut c = vec![T::zero(); dim * dim * dim];
        for (i, j, k, v) in brackets {
            if *i >= dim || *j >= dim || *k >= dim {
                return Err(Error::InvalidArgument(format!(
                    "bracket index ({i},{j},{k}) out of range for dimension {dim}"
                )));
            }
            c[(i * dim + j) * dim + k] = c[(i * dim + j) * dim + k].clone() + v.clone();
            c[(j * dim + i) * dim + k] = c[(j * dim + i) * dim + k].clone() - v.clone();
        }
        Self::new(dim, c, step)
    }

    pub fn abelian(n: usize) -> Result<Self> {
        Ok(Self::from_brackets(n, &[], 1)?.named(format!("abelian:{n}")))
    }

    /// Heisenberg algebra of dimension `2d+1`: `[e_i, e_{d+i}] = e_{2d}`.
    pub fn heisenberg(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("heisenberg degree must be positive".into()));
        }
        let br: Vec<_> = (0..d).map(|i| (i, d + i, 2 * d, T::one())).collect();
        Ok(Self::from_brackets(2 * d + 1, &br, 2)?.named(format!("heisenberg:{d}")))
    }

    /// Four-dimensional Engel (filiform) algebra: `[e1,e2]=e3`, `[e1,e3]=e4`.
    pub fn engel() -> Self {
        Self::from_brackets(4, &[(0, 1, 2, T::one()), (0, 2, 3, T::one())], 3)
            .expect("engel constants are well formed")
            .named("engel".into())
    }

    /// Strictly upper triangular `m×m` matrices with basis `E_ab` (`a < b`,
    /// lexicographic order). Step `m - 1`.
    pub fn upper_triangular(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument("need m >= 2".into()));
        }
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| ((a + 1)..m).map(move |b| (a, b))).collect();
        let index = |a: usize, b: usize| pairs.iter().position(|&p| p == (a, b));
        let dim = pairs.len();
        let mut c = vec![T::zero(); dim * dim * dim];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            for (j, &(cc, d)) in pairs.iter().enumerate() {
                // [E_ab, E_cd] = δ_bc E_ad - δ_da E_cb
                if b == cc {
                    let k = index(a, d).expect("a < b = c < d");
                    c[(i * dim + j) * dim + k] = c[(i * dim + j) * dim + k].clone() + T::one();
                }
                if d == a {
                    let k = index(cc, b).expect("c < d = a < b");
                    c[(i * dim + j) * dim + k] = c[(i * dim + j) * dim + k].clone() - T::one();
                }
            }
        }
        Ok(Self::new(dim, c, m - 1)?.named(format!("triangular:{m}")))
    }

    /// Named presets: `abelian:n`, `heisenberg:d`, `engel`, `triangular:m`.
    pub fn preset(name: &str) -> Result<Self> {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        let parse = |a: Option<&str>| -> Result<usize> {
            a.ok_or_else(|| Error::InvalidArgument(format!("preset '{name}' needs a numeric argument")))?
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad preset argument in '{name}'")))
        };
        match head {
            "abelian" => Self::abelian(parse(arg)?),
            "heisenberg" => Self::heisenberg(parse(arg)?),
            "engel" if arg.is_none() => Ok(Self::engel()),
            "triangular" => Self::upper_triangular(parse(arg)?),
            _ => Err(Error::InvalidArgument(format!("unknown algebra preset '{name}'"))),
        }
    }

    pub fn named(mut self, name: String) -> Self {
        self.name = name;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &T {
        &self.constants[(i * self.dim + j) * self.dim + k]
    }

    pub fn is_abelian(&self) -> bool {
        self.nonzero.is_empty()
    }

    fn bracket_into(&self, x: &[T], y: &[T], out: &mut [T]) {
        for o in out.iter_mut() {
            *o = T::zero();
        }
        for (i, j, k, c) in &self.nonzero {
            out[*k] = out[*k].clone() + c.clone() * x[*i].clone() * y[*j].clone();
        }
    }

    fn bracket_raw(&self, x: &[T], y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        self.bracket_into(x, y, &mut out);
        out
    }

    /// `[X, Y]`.
    pub fn bracket(&self, x: &[T], y: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, y.len())?;
        Ok(self.bracket_raw(x, y))
    }

    /// Matrix of `ad_X = [X, ·]`, acting on column vectors.
    pub fn ad(&self, x: &[T]) -> Result<DMatrix<T>> {
        check_dim(self.dim, x.len())?;
        let n = self.dim;
        let mut m = DMatrix::from_element(n, n, T::zero());
        for (i, j, k, c) in &self.nonzero {
            m[(*k, *j)] = m[(*k, *j)].clone() + c.clone() * x[*i].clone();
        }
        Ok(m)
    }

    /// BCH product `X•Y = log(exp X exp Y)`, exact for step ≤ 6.
    pub fn bch(&self, x: &[T], y: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, y.len())?;
        if self.step > MAX_BCH_DEPTH {
            return Err(Error::UnsupportedStep {
                step: self.step,
                max: MAX_BCH_DEPTH,
            });
        }
        Ok(self.bch_raw(x, y))
    }

    pub(crate) fn bch_raw(&self, x: &[T], y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        self.bch_into(x, y, &mut out);
        out
    }

    /// Non-allocating BCH for the common step ≤ 2 case; assumes validated
    /// dimensions and step.
    pub(crate) fn bch_into(&self, x: &[T], y: &[T], out: &mut [T]) {
        if self.nonzero.is_empty() || self.step == 1 {
            for ((o, a), b) in out.iter_mut().zip(x).zip(y) {
                *o = a.clone() + b.clone();
            }
            return;
        }
        if self.step == 2 {
            self.bracket_into(x, y, out);
            let half = T::one() / (T::one() + T::one());
            for ((o, a), b) in out.iter_mut().zip(x).zip(y) {
                *o = a.clone() + b.clone() + half.clone() * o.clone();
            }
            return;
        }
        let total = self.bch_series(x, y);
        out.clone_from_slice(&total);
    }

    fn bch_series(&self, x: &[T], y: &[T]) -> Vec<T> {
        let n = self.dim;
        let mut total = vec![T::zero(); n];
        for (word, num, den) in BCH_TERMS {
            if word.len() > self.step {
                continue;
            }
            let letters = word.as_bytes();
            let pick = |c: u8| if c == b'X' { x } else { y };
            let mut acc: Vec<T> = pick(letters[letters.len() - 1]).to_vec();
            for &c in letters[..letters.len() - 1].iter().rev() {
                acc = self.bracket_raw(pick(c), &acc);
            }
            let coeff = T::from_i64(*num).expect("integer coefficient") / T::from_i64(*den).expect("integer coefficient");
            for (t, a) in total.iter_mut().zip(acc) {
                *t = t.clone() + coeff.clone() * a;
            }
        }
        total
    }

    /// Group product `xy` in exponential coordinates.
    pub fn mul(&self, x: &[T], y: &[T]) -> Result<Vec<T>> {
        self.bch(x, y)
    }

    /// Group inverse: coordinate negation.
    pub fn inv(&self, x: &[T]) -> Vec<T> {
        x.iter().map(|v| -v.clone()).collect()
    }

    /// Infinitesimal coadjoint action `γ_x(ζ) = ζ ∘ ad_{-log x}`.
    pub fn coadjoint(&self, x: &[T], zeta: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, zeta.len())?;
        Ok(self.coadjoint_raw(x, zeta))
    }

    fn coadjoint_raw(&self, x: &[T], zeta: &[T]) -> Vec<T> {
        // γ_x(ζ)_j = ζ([-x, e_j]) = -Σ_{i,k} x_i c[i][j][k] ζ_k
        let mut out = vec![T::zero(); self.dim];
        for (i, j, k, c) in &self.nonzero {
            out[*j] = out[*j].clone() - c.clone() * x[*i].clone() * zeta[*k].clone();
        }
        out
    }

    /// Closed form of `(D^L_Z λ_ζ)(x) = ⟨Z | ζ + ½γ_x(ζ) + (1/12)γ_x²(ζ)⟩`,
    /// available for step ≤ 2 where those terms are the whole series.
    pub fn dlambda_left(&self, z: &[T], zeta: &[T], x: &[T]) -> Result<T> {
        check_dim(self.dim, z.len())?;
        check_dim(self.dim, zeta.len())?;
        check_dim(self.dim, x.len())?;
        if self.step > DLAMBDA_CLOSED_FORM_MAX_STEP {
            return Err(Error::ClosedFormUnavailable {
                step: self.step,
                max: DLAMBDA_CLOSED_FORM_MAX_STEP,
            });
        }
        let g1 = self.coadjoint_raw(x, zeta);
        let g2 = self.coadjoint_raw(x, &g1);
        let two = T::one() + T::one();
        let twelve = T::from_i64(12).expect("small integer");
        let mut acc = T::zero();
        for j in 0..self.dim {
            let cov = zeta[j].clone() + g1[j].clone() / two.clone() + g2[j].clone() / twelve.clone();
            acc = acc + z[j].clone() * cov;
        }
        Ok(acc)
    }

    /// Checks antisymmetry and the Jacobi identity and certifies the
    /// nilpotency step through the lower central series.
    pub fn validate(&self) -> AlgebraReport
    where
        T: num_traits::ToPrimitive,
    {
        validate_algebra(self)
    }
}

impl<T: Real> LieAlgebra<T> {
    /// Central finite difference of `t ↦ λ_ζ(exp(tZ)·x)` at `t = 0`.
    pub fn dlambda_left_fd(&self, z: &[T], zeta: &[T], x: &[T], h: T) -> Result<T> {
        check_dim(self.dim, z.len())?;
        check_dim(self.dim, zeta.len())?;
        check_dim(self.dim, x.len())?;
        if h <= T::zero() {
            return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
        }
        let plus: Vec<T> = z.iter().map(|v| *v * h).collect();
        let minus: Vec<T> = z.iter().map(|v| -*v * h).collect();
        let lp = pairing_raw(&self.bch(&plus, x)?, zeta);
        let lm = pairing_raw(&self.bch(&minus, x)?, zeta);
        Ok((lp - lm) / (h + h))
    }
}

fn pairing_raw<T: LieScalar>(x: &[T], xi: &[T]) -> T {
    x.iter().zip(xi).fold(T::zero(), |a, (p, q)| a + p.clone() * q.clone())
}

/// Duality pairing `⟨X | ξ⟩ = ξ(X)`.
pub fn pairing<T: LieScalar>(x: &[T], xi: &[T]) -> Result<T> {
    check_dim(x.len(), xi.len())?;
    Ok(pairing_raw(x, xi))
}

/// Outcome of [`validate_algebra`].
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    pub name: String,
    pub dim: usize,
    pub declared_step: usize,
    pub certified_step: Option<usize>,
    pub antisymmetry_residual: f64,
    pub jacobi_residual: f64,
    pub failures: Vec<String>,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for AlgebraReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algebra {} (dim {})", self.name, self.dim)?;
        writeln!(f, "  antisymmetry residual {:.3e}", self.antisymmetry_residual)?;
        writeln!(f, "  jacobi residual       {:.3e}", self.jacobi_residual)?;
        match self.certified_step {
            Some(s) => writeln!(f, "  certified step {s} (declared {})", self.declared_step)?,
            None => writeln!(f, "  not nilpotent (declared step {})", self.declared_step)?,
        }
        if self.passed() {
            write!(f, "  PASS")
        } else {
            for e in &self.failures {
                writeln!(f, "  FAIL: {e}")?;
            }
            Ok(())
        }
    }
}

fn magnitude<T: LieScalar>(v: &T) -> T {
    if *v < T::zero() {
        -v.clone()
    } else {
        v.clone()
    }
}

/// Antisymmetry, Jacobi and lower-central-series certification.
pub fn validate_algebra<T: LieScalar + num_traits::ToPrimitive>(alg: &LieAlgebra<T>) -> AlgebraReport {
    let n = alg.dim;
    let tol = T::from_f64(1e-12).unwrap_or_else(T::zero);
    let mut failures = Vec::new();

    let mut anti = T::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r = magnitude(&(alg.constant(i, j, k).clone() + alg.constant(j, i, k).clone()));
                if r > anti {
                    anti = r;
                }
            }
        }
    }
    if anti > tol {
        failures.push("structure constants are not antisymmetric".to_string());
    }

    let basis = |i: usize| {
        let mut e = vec![T::zero(); n];
        e[i] = T::one();
        e
    };
    let mut jac = T::zero();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (ea, eb, ec) = (basis(a), basis(b), basis(c));
                let t1 = alg.bracket_raw(&ea, &alg.bracket_raw(&eb, &ec));
                let t2 = alg.bracket_raw(&eb, &alg.bracket_raw(&ec, &ea));
                let t3 = alg.bracket_raw(&ec, &alg.bracket_raw(&ea, &eb));
                for k in 0..n {
                    let r = magnitude(&(t1[k].clone() + t2[k].clone() + t3[k].clone()));
                    if r > jac {
                        jac = r;
                    }
                }
            }
        }
    }
    if jac > tol {
        failures.push("Jacobi identity fails".to_string());
    }

    let certified = lower_central_step(alg, &tol);
    match certified {
        None => failures.push("lower central series does not terminate".to_string()),
        Some(s) if s > alg.step => failures.push(format!(
            "declared step {} but brackets of depth {} survive",
            alg.step, s
        )),
        _ => {}
    }

    AlgebraReport {
        name: alg.name.clone(),
        dim: n,
        declared_step: alg.step,
        certified_step: certified,
        antisymmetry_residual: anti.to_f64().unwrap_or(f64::NAN),
        jacobi_residual: jac.to_f64().unwrap_or(f64::NAN),
        failures,
    }
}

/// Smallest `s` with `g^{s+1} = 0`, where `g^1 = g`, `g^{k+1} = [g, g^k]`.
fn lower_central_step<T: LieScalar>(alg: &LieAlgebra<T>, tol: &T) -> Option<usize> {
    let n = alg.dim;
    let mut current: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            e
        })
        .collect();
    for depth in 1..=n + 1 {
        let mut next = Vec::new();
        for i in 0..n {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            for v in &current {
                next.push(alg.bracket_raw(&e, v));
            }
        }
        let reduced = row_basis(next, tol);
        if reduced.is_empty() {
            return Some(depth);
        }
        current = reduced;
    }
    None
}

/// Gaussian elimination keeping a linearly independent spanning subset.
fn row_basis<T: LieScalar>(rows: Vec<Vec<T>>, tol: &T) -> Vec<Vec<T>> {
    let mut basis: Vec<(usize, Vec<T>)> = Vec::new();
    for mut r in rows {
        for (p, b) in &basis {
            let f = r[*p].clone() / b[*p].clone();
            for (x, y) in r.iter_mut().zip(b) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        let mut best: Option<(usize, T)> = None;
        for (k, v) in r.iter().enumerate() {
            let m = magnitude(v);
            if m > *tol && best.as_ref().is_none_or(|(_, bm)| m > *bm) {
                best = Some((k, m));
            }
        }
        if let Some((p, _)) = best {
            basis.push((p, r));
        }
    }
    basis.into_iter().map(|(_, r)| r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn h1() -> LieAlgebra<f64> {
        LieAlgebra::heisenberg(1).unwrap()
    }

    #[test]
    fn heisenberg_bracket_of_generators() {
        let h = h1();
        assert_eq!(h.bracket(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(h.bracket(&[0.3, -1.0, 2.0], &[0.3, -1.0, 2.0]).unwrap(), vec![0.0; 3]);
        assert!(h.bracket(&[1.0, 0.0], &[0.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn abelian_bracket_vanishes() {
        let a = LieAlgebra::<f64>::abelian(3).unwrap();
        assert_eq!(a.bracket(&[1.0, 2.0, 3.0], &[-4.0, 0.5, 9.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn ad_matrix_on_heisenberg() {
        let h = h1();
        let m = h.ad(&[1.0, 0.0, 0.0]).unwrap();
        let apply = |z: [f64; 3]| m.clone() * nalgebra::DVector::from_row_slice(&z);
        assert_eq!(apply([0.0, 1.0, 0.0]).as_slice(), &[0.0, 0.0, 1.0]);
        assert_eq!(apply([1.0, 0.0, 0.0]).as_slice(), &[0.0; 3]);
        assert_eq!(apply([0.0, 0.0, 1.0]).as_slice(), &[0.0; 3]);
        let m2 = h.ad(&[0.7, -0.2, 1.1]).unwrap();
        assert!((m2.clone() * m2.clone()).iter().all(|v| *v == 0.0));
        assert!(h.ad(&[0.0; 3]).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn engel_ad_cubed_vanishes_but_square_does_not() {
        let e = LieAlgebra::<f64>::engel();
        let m = e.ad(&[1.0, 0.5, -0.3, 0.2]).unwrap();
        let m2 = m.clone() * m.clone();
        let m3 = m2.clone() * m.clone();
        assert!(m2.iter().any(|v| *v != 0.0));
        assert!(m3.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn bch_heisenberg_generators() {
        let h = h1();
        assert_eq!(h.bch(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap(), vec![1.0, 1.0, 0.5]);
        let x = [0.3, -0.7, 1.9];
        assert_eq!(h.bch(&x, &[0.0; 3]).unwrap(), x.to_vec());
        assert_eq!(h.bch(&[0.0; 3], &x).unwrap(), x.to_vec());
        assert_eq!(h.bch(&x, &h.inv(&x)).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn bch_exact_over_rationals_is_associative() {
        let e = LieAlgebra::<Rational64>::engel();
        let r = |a: i64, b: i64| Rational64::new(a, b);
        let x = [r(1, 2), r(-1, 3), r(2, 5), r(1, 7)];
        let y = [r(-3, 4), r(1, 1), r(0, 1), r(5, 2)];
        let z = [r(2, 3), r(1, 9), r(-1, 2), r(1, 3)];
        let left = e.bch(&e.bch(&x, &y).unwrap(), &z).unwrap();
        let right = e.bch(&x, &e.bch(&y, &z).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn bch_rejects_deep_algebras() {
        let t = LieAlgebra::<f64>::upper_triangular(8).unwrap();
        assert_eq!(t.step(), 7);
        let x = vec![0.0; t.dim()];
        match t.bch(&x, &x) {
            Err(Error::UnsupportedStep { step: 7, max: 6 }) => {}
            other => panic!("expected step rejection, got {other:?}"),
        }
    }

    #[test]
    fn group_law_helpers() {
        let h = h1();
        assert_eq!(h.inv(&[1.0, -2.0, 3.0]), vec![-1.0, 2.0, -3.0]);
        let a = LieAlgebra::<f64>::abelian(2).unwrap();
        assert_eq!(a.mul(&[1.0, 2.0], &[0.5, -1.0]).unwrap(), vec![1.5, 1.0]);
    }

    #[test]
    fn pairing_values() {
        assert_eq!(pairing(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap(), 32.0);
        assert_eq!(pairing(&[0.0, 0.0], &[4.0, 5.0]).unwrap(), 0.0);
        for i in 0..3 {
            for j in 0..3 {
                let mut e = [0.0; 3];
                e[i] = 1.0;
                let mut f = [0.0; 3];
                f[j] = 1.0;
                assert_eq!(pairing(&e, &f).unwrap(), if i == j { 1.0 } else { 0.0 });
            }
        }
        assert!(pairing(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn coadjoint_on_heisenberg() {
        let h = h1();
        let (a, b, c) = (0.4, -1.3, 2.0);
        let zeta = [0.7, 0.1, -2.5];
        let g = h.coadjoint(&[a, b, c], &zeta).unwrap();
        let expect = [b * zeta[2], -a * zeta[2], 0.0];
        for k in 0..3 {
            assert!((g[k] - expect[k]).abs() < 1e-15);
        }
        assert_eq!(h.coadjoint(&[0.0; 3], &zeta).unwrap(), vec![0.0; 3]);
        let ab = LieAlgebra::<f64>::abelian(3).unwrap();
        assert_eq!(ab.coadjoint(&[a, b, c], &zeta).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn dlambda_closed_form_examples() {
        let h = h1();
        let v = h.dlambda_left(&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let z = [0.3, -0.2, 1.0];
        let zeta = [1.5, 0.5, -0.25];
        let at_e = h.dlambda_left(&z, &zeta, &[0.0; 3]).unwrap();
        assert!((at_e - pairing(&z, &zeta).unwrap()).abs() < 1e-15);
        let ab = LieAlgebra::<f64>::abelian(3).unwrap();
        let v = ab.dlambda_left(&z, &zeta, &[4.0, -1.0, 2.0]).unwrap();
        assert!((v - pairing(&z, &zeta).unwrap()).abs() < 1e-15);
        assert!(matches!(
            LieAlgebra::<f64>::engel().dlambda_left(&[1.0; 4], &[1.0; 4], &[1.0; 4]),
            Err(Error::ClosedFormUnavailable { .. })
        ));
    }

    #[test]
    fn validation_reports() {
        let r = h1().validate();
        assert!(r.passed(), "{r}");
        assert_eq!(r.certified_step, Some(2));

        let r = LieAlgebra::<f64>::engel().validate();
        assert!(r.passed(), "{r}");
        assert_eq!(r.certified_step, Some(3));

        let mut c = vec![0.0; 27];
        c[5] = 1.0; // c[0][1][2]
        c[11] = 1.0; // c[1][0][2]
        let bad = LieAlgebra::new(3, c, 2).unwrap();
        let r = bad.validate();
        assert!(!r.passed());
        assert!(r.failures.iter().any(|f| f.contains("antisymmetric")));
        assert!(r.antisymmetry_residual >= 2.0);
    }

    #[test]
    fn validation_flags_non_nilpotent_algebra() {
        // sl2-like constants: [h,e]=2e, [h,f]=-2f, [e,f]=h
        let alg = LieAlgebra::from_brackets(
            3,
            &[(0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)],
            2,
        )
        .unwrap();
        let r = alg.validate();
        assert_eq!(r.certified_step, None);
        assert!(!r.passed());
    }

    #[test]
    fn presets_parse() {
        assert_eq!(LieAlgebra::<f64>::preset("abelian:4").unwrap().dim(), 4);
        assert_eq!(LieAlgebra::<f64>::preset("heisenberg:1").unwrap().dim(), 3);
        assert_eq!(LieAlgebra::<f64>::preset("engel").unwrap().step(), 3);
        assert!(LieAlgebra::<f64>::preset("so3").is_err());
        assert!(LieAlgebra::<f64>::preset("abelian:x").is_err());
    }
}
