//! Uniform midpoint grids on boxes in ℝⁿ and on phase space G × g♯.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::scalar::{dual_factor, pairwise_sum};

/// Per-axis description of a box grid, the serialized form of [`Grid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Midpoint grid on `Π_i [-L_i, L_i]` with `N_i` cells per axis.
///
/// Flat node indices are row-major: the last axis varies fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    half_width: Vec<f64>,
    counts: Vec<usize>,
    spacing: Vec<f64>,
    nodes: Vec<f64>,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;
    fn try_from(s: GridSpec) -> Result<Self> {
        Grid::new(s.half_width, s.counts)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            half_width: g.half_width,
            counts: g.counts,
        }
    }
}

impl Grid {
    pub fn new(half_width: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        check_dim(half_width.len(), counts.len())?;
        if half_width.is_empty() {
            return Err(Error::InvalidArgument("grid needs at least one axis".into()));
        }
        if half_width.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidArgument("grid half widths must be positive and finite".into()));
        }
        if counts.contains(&0) {
            return Err(Error::InvalidArgument("grid counts must be positive".into()));
        }
        let spacing: Vec<f64> = half_width.iter().zip(&counts).map(|(l, &c)| 2.0 * l / c as f64).collect();
        let len: usize = counts.iter().product();
        let n = counts.len();
        let mut nodes = vec![0.0; len * n];
        let mut idx = vec![0usize; n];
        for k in 0..len {
            for a in 0..n {
                nodes[k * n + a] = -half_width[a] + spacing[a] * (idx[a] as f64 + 0.5);
            }
            for a in (0..n).rev() {
                idx[a] += 1;
                if idx[a] < counts[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Ok(Self {
            half_width,
            counts,
            spacing,
            nodes,
        })
    }

    /// Same half width and count on every axis.
    pub fn cube(dim: usize, half_width: f64, count: usize) -> Result<Self> {
        Self::new(vec![half_width; dim], vec![count; dim])
    }

    pub fn spec(&self) -> GridSpec {
        self.clone().into()
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn half_width(&self) -> &[f64] {
        &self.half_width
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Cell volume `Π h_i`.
    pub fn vol(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn node(&self, k: usize) -> &[f64] {
        let n = self.dim();
        &self.nodes[k * n..(k + 1) * n]
    }

    /// All nodes, flattened (`len × dim`).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn axis_nodes(&self, axis: usize) -> Vec<f64> {
        (0..self.counts[axis])
            .map(|i| -self.half_width[axis] + self.spacing[axis] * (i as f64 + 0.5))
            .collect()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().zip(&self.half_width).all(|(x, l)| x.abs() <= *l)
    }

    /// Same box with every count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.half_width.clone(), self.counts.iter().map(|c| c * factor).collect())
    }

    /// Midpoint rule `vol · Σ values`, summed pairwise in node order.
    pub fn integrate(&self, values: &[Complex64]) -> Result<Complex64> {
        check_dim(self.len(), values.len())?;
        Ok(pairwise_sum(values) * self.vol())
    }

    /// Samples `f` at every node (in parallel) and integrates.
    pub fn integrate_fn<F>(&self, f: F) -> Complex64
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let v = self.sample(f);
        pairwise_sum(&v) * self.vol()
    }

    pub fn sample<F>(&self, f: F) -> Vec<Complex64>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let n = self.dim();
        self.nodes.par_chunks(n).map(&f).collect()
    }

    /// `vol · Σ u · conj(v)`.
    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
        check_dim(self.len(), u.len())?;
        check_dim(self.len(), v.len())?;
        let prod: Vec<Complex64> = u.iter().zip(v).map(|(a, b)| a * b.conj()).collect();
        Ok(pairwise_sum(&prod) * self.vol())
    }

    pub fn norm(&self, u: &[Complex64]) -> Result<f64> {
        Ok(self.inner(u, u)?.re.max(0.0).sqrt())
    }
}

/// Product grid on phase space `Ξ = G × g♯`.
///
/// Flat index `iz * dual.len() + iζ`; the quadrature weight carries the
/// `(2π)^{-n}` factor of the dual measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiGrid {
    pub g: Grid,
    pub dual: Grid,
}

impl XiGrid {
    pub fn new(g: Grid, dual: Grid) -> Result<Self> {
        check_dim(g.dim(), dual.dim())?;
        Ok(Self { g, dual })
    }

    pub fn cube(dim: usize, half_width: f64, count: usize, dual_half_width: f64, dual_count: usize) -> Result<Self> {
        Self::new(
            Grid::cube(dim, half_width, count)?,
            Grid::cube(dim, dual_half_width, dual_count)?,
        )
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn len(&self) -> usize {
        self.g.len() * self.dual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `vol_G · vol_dual · (2π)^{-n}`.
    pub fn weight(&self) -> f64 {
        self.g.vol() * self.dual.vol() * dual_factor::<f64>(self.dim())
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.dual.len(), k % self.dual.len())
    }

    pub fn node(&self, k: usize) -> (&[f64], &[f64]) {
        let (a, b) = self.split(k);
        (self.g.node(a), self.dual.node(b))
    }

    /// The same nodes viewed as one `2n`-dimensional box grid (same flat order).
    pub fn as_box(&self) -> Grid {
        let mut hw = self.g.half_width().to_vec();
        hw.extend_from_slice(self.dual.half_width());
        let mut c = self.g.counts().to_vec();
        c.extend_from_slice(self.dual.counts());
        Grid::new(hw, c).expect("components are valid grids")
    }

    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.g.refined(factor)?, self.dual.refined(factor)?)
    }

    pub fn integrate(&self, values: &[Complex64]) -> Result<Complex64> {
        check_dim(self.len(), values.len())?;
        Ok(pairwise_sum(values) * self.weight())
    }

    /// Samples `f(x, ξ)` at every node.
    pub fn sample<F>(&self, f: F) -> Vec<Complex64>
    where
        F: Fn(&[f64], &[f64]) -> Complex64 + Sync,
    {
        (0..self.len())
            .into_par_iter()
            .map(|k| {
                let (x, xi) = self.node(k);
                f(x, xi)
            })
            .collect()
    }

    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
        check_dim(self.len(), u.len())?;
        check_dim(self.len(), v.len())?;
        let prod: Vec<Complex64> = u.iter().zip(v).map(|(a, b)| a * b.conj()).collect();
        Ok(pairwise_sum(&prod) * self.weight())
    }

    pub fn norm(&self, u: &[Complex64]) -> Result<f64> {
        Ok(self.inner(u, u)?.re.max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_function_integrates_to_box_volume() {
        let g = Grid::cube(1, 1.0, 10).unwrap();
        let v = g.integrate_fn(|_| Complex64::new(1.0, 0.0));
        assert!((v.re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_density_integrates_to_one() {
        let g = Grid::cube(1, 8.0, 128).unwrap();
        let s = (2.0 * std::f64::consts::PI).sqrt();
        let v = g.integrate_fn(|x| Complex64::new((-x[0] * x[0] / 2.0).exp() / s, 0.0));
        assert!((v.re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn odd_function_integrates_to_zero() {
        let g = Grid::cube(2, 3.0, 17).unwrap();
        let v = g.integrate_fn(|x| Complex64::new(x[0] * (-x[0] * x[0] - x[1] * x[1]).exp(), 0.0));
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn nodes_are_midpoints_in_row_major_order() {
        let g = Grid::new(vec![1.0, 2.0], vec![2, 4]).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.node(0), &[-0.5, -1.5]);
        assert_eq!(g.node(1), &[-0.5, -0.5]);
        assert_eq!(g.node(4), &[0.5, -1.5]);
        assert!((g.vol() - 1.0).abs() < 1e-15);
        assert!((0..g.len()).all(|k| g.contains(g.node(k))));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(vec![1.0], vec![0]).is_err());
        assert!(Grid::new(vec![-1.0], vec![3]).is_err());
        assert!(Grid::new(vec![1.0, 1.0], vec![3]).is_err());
    }

    #[test]
    fn xi_weight_and_box_view_agree() {
        let xi = XiGrid::cube(1, 2.0, 4, 3.0, 6).unwrap();
        let b = xi.as_box();
        assert_eq!(b.len(), xi.len());
        for k in [0, 5, 23] {
            let (x, s) = xi.node(k);
            assert_eq!(&b.node(k)[..1], x);
            assert_eq!(&b.node(k)[1..], s);
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        assert!((xi.weight() - b.vol() / two_pi).abs() < 1e-15);
    }

    #[test]
    fn serde_round_trip_rebuilds_nodes() {
        let g = Grid::new(vec![1.5, 2.0], vec![3, 5]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        let back: Grid = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
        assert!(serde_json::from_str::<Grid>(r#"{"half_width":[1.0],"counts":[0]}"#).is_err());
    }
}
