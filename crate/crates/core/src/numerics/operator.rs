//! Integral operators on L²(G) discretized by kernel samples on a grid.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::field::Field;
use super::grid::Grid;
use crate::error::{check_dim, Error, Result};

/// Kernel samples `K(x_i, y_j)` on a grid; `(Ku)(x_i) = vol · Σ_j K(x_i, y_j) u(y_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    grid: Grid,
    k: DMatrix<Complex64>,
}

/// Anything that can be evaluated as an integral kernel at arbitrary points.
pub trait Kernel: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64], y: &[f64]) -> Complex64;
    /// True when evaluation interpolates sampled data.
    fn is_approximate(&self) -> bool {
        false
    }
}

impl OperatorMatrix {
    pub fn new(grid: Grid, k: DMatrix<Complex64>) -> Result<Self> {
        check_dim(grid.len(), k.nrows())?;
        check_dim(grid.len(), k.ncols())?;
        Ok(Self { grid, k })
    }

    /// Samples `f(x, y)` on all node pairs, rows in parallel.
    pub fn from_fn<F>(grid: &Grid, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> Complex64 + Sync,
    {
        let n = grid.len();
        let rows: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| f(grid.node(i), grid.node(j))).collect())
            .collect();
        Self {
            grid: grid.clone(),
            k: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        Self {
            grid: grid.clone(),
            k: DMatrix::zeros(n, n),
        }
    }

    /// Kernel of the identity: `δ_ij / vol`.
    pub fn identity(grid: &Grid) -> Self {
        let n = grid.len();
        let d = Complex64::new(1.0 / grid.vol(), 0.0);
        Self {
            grid: grid.clone(),
            k: DMatrix::from_diagonal_element(n, n, d),
        }
    }

    /// Multiplication by the sampled function `m`.
    pub fn multiplication(grid: &Grid, m: &[Complex64]) -> Result<Self> {
        check_dim(grid.len(), m.len())?;
        let inv = 1.0 / grid.vol();
        let d: Vec<Complex64> = m.iter().map(|v| v * inv).collect();
        Ok(Self {
            grid: grid.clone(),
            k: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)),
        })
    }

    /// Kernel `u ⊗ conj(v)` of the rank-one map `w ↦ ⟨w, v⟩ u`.
    pub fn rank_one(grid: &Grid, u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        check_dim(grid.len(), u.len())?;
        check_dim(grid.len(), v.len())?;
        let n = grid.len();
        Ok(Self {
            grid: grid.clone(),
            k: DMatrix::from_fn(n, n, |i, j| u[i] * v[j].conj()),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kernel(&self) -> &DMatrix<Complex64> {
        &self.k
    }

    pub fn into_kernel(self) -> DMatrix<Complex64> {
        self.k
    }

    pub fn weight(&self) -> f64 {
        self.grid.vol()
    }

    pub fn len(&self) -> usize {
        self.k.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// The matrix `vol · K` acting on node values.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        &self.k * Complex64::new(self.weight(), 0.0)
    }

    fn check_same_grid(&self, other: &OperatorMatrix) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch("operators live on different grids".into()))
        }
    }

    pub fn apply(&self, u: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.len(), u.len())?;
        let v = nalgebra::DVector::from_column_slice(u);
        let out = &self.k * v * Complex64::new(self.weight(), 0.0);
        Ok(out.as_slice().to_vec())
    }

    pub fn apply_field(&self, u: &Field) -> Result<Vec<Complex64>> {
        self.apply(&u.sample(&self.grid)?)
    }

    /// Kernel of `self ∘ other`: `vol · K₁K₂`.
    pub fn compose(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            k: (&self.k * &other.k) * Complex64::new(self.weight(), 0.0),
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            k: self.k.adjoint(),
        }
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            k: &self.k + &other.k,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            k: &self.k * c,
        }
    }

    /// `vol · Σ_i K(x_i, x_i)`.
    pub fn trace(&self) -> Complex64 {
        self.k.diagonal().iter().sum::<Complex64>() * self.weight()
    }

    /// Kernel of `Mult(l) ∘ K ∘ Mult(r)`.
    pub fn sandwich(&self, left: &[Complex64], right: &[Complex64]) -> Result<Self> {
        check_dim(self.len(), left.len())?;
        check_dim(self.len(), right.len())?;
        let k = DMatrix::from_fn(self.len(), self.len(), |i, j| left[i] * self.k[(i, j)] * right[j]);
        Ok(Self {
            grid: self.grid.clone(),
            k,
        })
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.matrix().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Schatten norm of exponent `p ∈ [1, ∞]` (`f64::INFINITY` for the operator norm).
    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        schatten_from_singular_values(&self.singular_values(), p)
    }

    /// Hilbert–Schmidt norm `vol · (Σ |K|²)^{1/2}`, without an SVD.
    pub fn hs_norm(&self) -> f64 {
        self.weight() * self.k.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Eigenvalues of the Hermitian part of `vol · K`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let m = self.matrix();
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| a.total_cmp(b));
        e
    }

    /// `max |K - K*| / max |K|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let scale = self.k.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.len();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                r = r.max((self.k[(i, j)] - self.k[(j, i)].conj()).norm());
            }
        }
        r / scale
    }

    /// `‖K - K_ref‖_F / ‖K_ref‖_F`.
    pub fn relative_distance(&self, reference: &OperatorMatrix) -> Result<f64> {
        self.check_same_grid(reference)?;
        Ok(relative_frobenius(&self.k, &reference.k))
    }
}

pub(crate) fn relative_frobenius(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let d = (a - b).norm();
    let r = b.norm();
    if r == 0.0 {
        d
    } else {
        d / r
    }
}

pub fn schatten_from_singular_values(s: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidArgument(format!("Schatten exponent must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(s.iter().copied().fold(0.0, f64::max));
    }
    Ok(s.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p))
}

impl Kernel for OperatorMatrix {
    fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Multilinear interpolation in `(x, y)`, zero outside the box.
    fn eval(&self, x: &[f64], y: &[f64]) -> Complex64 {
        let rows = interpolation_weights(&self.grid, x);
        let cols = interpolation_weights(&self.grid, y);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, wi) in &rows {
            for (j, wj) in &cols {
                acc += self.k[(*i, *j)] * (wi * wj);
            }
        }
        acc
    }

    fn is_approximate(&self) -> bool {
        true
    }
}

/// Flat node indices and multilinear weights for a point of the box; empty
/// outside it. Between the outermost nodes and the faces the value is held
/// constant.
pub(crate) fn interpolation_weights(grid: &Grid, p: &[f64]) -> Vec<(usize, f64)> {
    let n = grid.dim();
    if p.len() != n || !grid.contains(p) {
        return Vec::new();
    }
    let counts = grid.counts();
    let mut base = vec![0usize; n];
    let mut frac = vec![0.0; n];
    for a in 0..n {
        if counts[a] == 1 {
            continue;
        }
        let t = (p[a] + grid.half_width()[a]) / grid.spacing()[a] - 0.5;
        let i0 = (t.floor().max(0.0) as usize).min(counts[a] - 2);
        base[a] = i0;
        frac[a] = (t - i0 as f64).clamp(0.0, 1.0);
    }
    let mut out = Vec::with_capacity(1 << n);
    for corner in 0..(1usize << n) {
        let mut w = 1.0;
        let mut flat = 0usize;
        let mut ok = true;
        for a in 0..n {
            let bit = (corner >> (n - 1 - a)) & 1;
            let idx = base[a] + bit;
            if idx >= counts[a] {
                ok = false;
                break;
            }
            w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            flat = flat * counts[a] + idx;
        }
        if ok && w != 0.0 {
            out.push((flat, w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::field::Domain;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_kernel(grid: &Grid) -> OperatorMatrix {
        OperatorMatrix::from_fn(grid, |x, y| {
            c((-(x[0] * x[0] + y[0] * y[0]) / 2.0).exp(), 0.3 * (x[0] - y[0]))
        })
    }

    #[test]
    fn identity_is_a_unit_for_composition() {
        let g = Grid::cube(1, 3.0, 12).unwrap();
        let k = sample_kernel(&g);
        let id = OperatorMatrix::identity(&g);
        assert!(k.compose(&id).unwrap().relative_distance(&k).unwrap() < 1e-14);
        assert!(id.compose(&k).unwrap().relative_distance(&k).unwrap() < 1e-14);
        assert_eq!(k.adjoint().adjoint(), k);
    }

    #[test]
    fn normalized_rank_one_has_unit_trace_and_norms() {
        let g = Grid::cube(1, 8.0, 64).unwrap();
        let w = Field::gaussian(Domain::Group, vec![0.3], 1.0);
        let mut v = w.sample(&g).unwrap();
        let nrm = g.norm(&v).unwrap();
        v.iter_mut().for_each(|x| *x /= nrm);
        let p = OperatorMatrix::rank_one(&g, &v, &v).unwrap();
        assert!((p.trace().re - 1.0).abs() < 1e-12);
        for q in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert!((p.schatten_norm(q).unwrap() - 1.0).abs() < 1e-10);
        }
        assert!(p.schatten_norm(0.5).is_err());
    }

    #[test]
    fn hilbert_schmidt_matches_schatten_two() {
        let g = Grid::cube(1, 3.0, 20).unwrap();
        let k = sample_kernel(&g);
        assert!((k.hs_norm() - k.schatten_norm(2.0).unwrap()).abs() < 1e-12 * k.hs_norm());
        assert_eq!(OperatorMatrix::zeros(&g).schatten_norm(1.0).unwrap(), 0.0);
    }

    #[test]
    fn trace_is_cyclic() {
        let g = Grid::cube(1, 3.0, 15).unwrap();
        let a = sample_kernel(&g);
        let b = OperatorMatrix::from_fn(&g, |x, y| c((x[0] * y[0]).cos(), x[0] * 0.1));
        let ab = a.compose(&b).unwrap().trace();
        let ba = b.compose(&a).unwrap().trace();
        assert!((ab - ba).norm() <= 1e-10 * ab.norm());
    }

    #[test]
    fn multiplication_operator_applies_pointwise() {
        let g = Grid::cube(1, 2.0, 8).unwrap();
        let m: Vec<Complex64> = (0..8).map(|k| c(k as f64, 1.0)).collect();
        let u: Vec<Complex64> = (0..8).map(|k| c(1.0, -(k as f64))).collect();
        let op = OperatorMatrix::multiplication(&g, &m).unwrap();
        let out = op.apply(&u).unwrap();
        for k in 0..8 {
            assert!((out[k] - m[k] * u[k]).norm() < 1e-13);
        }
    }

    #[test]
    fn interpolated_kernel_reproduces_nodes() {
        let g = Grid::cube(1, 3.0, 10).unwrap();
        let k = sample_kernel(&g);
        assert!(Kernel::is_approximate(&k));
        let v = Kernel::eval(&k, g.node(3), g.node(7));
        assert!((v - k.kernel()[(3, 7)]).norm() < 1e-14);
    }

    #[test]
    fn positive_rank_one_has_nonnegative_spectrum() {
        let g = Grid::cube(1, 3.0, 10).unwrap();
        let v: Vec<Complex64> = (0..10).map(|k| c(k as f64 * 0.1, 1.0)).collect();
        let p = OperatorMatrix::rank_one(&g, &v, &v).unwrap();
        assert!(p.hermitian_eigenvalues()[0] > -1e-12);
        assert!(p.hermiticity_residual() < 1e-15);
    }
}
