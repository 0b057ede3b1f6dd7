//! Complex-valued functions on G, g♯ or Ξ.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{Grid, XiGrid};
use crate::error::{check_dim, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// The group G in exponential coordinates.
    Group,
    /// The dual g♯.
    Dual,
    /// Phase space `G × g♯`; points are `(x, ξ)` concatenated.
    PhaseSpace,
}

pub type Evaluator = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Analytic(Evaluator),
    Gridded { grid: Grid, values: Arc<Vec<Complex64>> },
}

/// A function on one of the three domains, either evaluable in closed form
/// or given by samples on a grid.
///
/// Gridded fields interpolate multilinearly inside their box and vanish
/// outside it. Fields derived from gridded data by group translation are
/// flagged approximate.
#[derive(Clone)]
pub struct Field {
    domain: Domain,
    dim: usize,
    repr: Repr,
    approximate: bool,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Analytic(_) => "analytic".to_string(),
            Repr::Gridded { grid, .. } => format!("gridded({} nodes)", grid.len()),
        };
        f.debug_struct("Field")
            .field("domain", &self.domain)
            .field("dim", &self.dim)
            .field("repr", &kind)
            .field("approximate", &self.approximate)
            .finish()
    }
}

impl Field {
    /// `dim` is the number of coordinates of a point (`2n` on phase space).
    pub fn analytic<F>(domain: Domain, dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            domain,
            dim,
            repr: Repr::Analytic(Arc::new(f)),
            approximate: false,
        }
    }

    pub fn gridded(domain: Domain, grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        check_dim(grid.len(), values.len())?;
        Ok(Self {
            domain,
            dim: grid.dim(),
            repr: Repr::Gridded {
                grid,
                values: Arc::new(values),
            },
            approximate: false,
        })
    }

    pub fn constant(domain: Domain, dim: usize, c: Complex64) -> Self {
        Self::analytic(domain, dim, move |_| c)
    }

    /// Unnormalized isotropic Gaussian `exp(-|p - c|² / 2σ²)`.
    pub fn gaussian(domain: Domain, center: Vec<f64>, sigma: f64) -> Self {
        let dim = center.len();
        let s2 = 2.0 * sigma * sigma;
        Self::analytic(domain, dim, move |p| {
            let r2: f64 = p.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum();
            Complex64::new((-r2 / s2).exp(), 0.0)
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_gridded(&self) -> bool {
        matches!(self.repr, Repr::Gridded { .. })
    }

    /// Grid and samples of a gridded field.
    pub fn grid_values(&self) -> Option<(&Grid, &[Complex64])> {
        match &self.repr {
            Repr::Gridded { grid, values } => Some((grid, values.as_slice())),
            Repr::Analytic(_) => None,
        }
    }

    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    pub(crate) fn mark_approximate(mut self, flag: bool) -> Self {
        self.approximate |= flag;
        self
    }

    pub fn eval(&self, p: &[f64]) -> Complex64 {
        match &self.repr {
            Repr::Analytic(f) => f(p),
            Repr::Gridded { grid, values } => interpolate(grid, values, p),
        }
    }

    /// Values at the nodes of `grid`.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        check_dim(self.dim, grid.dim())?;
        Ok(grid.sample(|p| self.eval(p)))
    }

    pub fn sample_xi(&self, xi: &XiGrid) -> Result<Vec<Complex64>> {
        self.expect_domain(Domain::PhaseSpace)?;
        check_dim(self.dim, 2 * xi.dim())?;
        let n = xi.dim();
        Ok(xi.sample(|x, s| {
            let mut p = Vec::with_capacity(2 * n);
            p.extend_from_slice(x);
            p.extend_from_slice(s);
            self.eval(&p)
        }))
    }

    pub fn expect_domain(&self, d: Domain) -> Result<()> {
        if self.domain == d {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!(
                "expected a field on {d:?}, got one on {:?}",
                self.domain
            )))
        }
    }

    /// Midpoint quadrature on a G or g♯ grid. Dual-side integrals carry no
    /// `(2π)^{-n}` here; phase-space integrals go through [`Field::integrate_xi`].
    pub fn integrate(&self, grid: &Grid) -> Result<Complex64> {
        if self.domain == Domain::PhaseSpace {
            return Err(Error::DomainMismatch("phase-space fields integrate over an XiGrid".into()));
        }
        grid.integrate(&self.sample(grid)?)
    }

    pub fn integrate_xi(&self, xi: &XiGrid) -> Result<Complex64> {
        xi.integrate(&self.sample_xi(xi)?)
    }

    pub fn map<F>(&self, f: F) -> Field
    where
        F: Fn(&[f64], Complex64) -> Complex64 + Send + Sync + 'static,
    {
        let inner = self.clone();
        Field::analytic(self.domain, self.dim, move |p| f(p, inner.eval(p))).mark_approximate(self.approximate)
    }

    pub fn conj(&self) -> Field {
        self.map(|_, v| v.conj())
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(move |_, v| v * c)
    }

    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.check_compatible(other)?;
        let o = other.clone();
        Ok(self.map(move |p, v| v * o.eval(p)).mark_approximate(other.approximate))
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.check_compatible(other)?;
        let o = other.clone();
        Ok(self.map(move |p, v| v + o.eval(p)).mark_approximate(other.approximate))
    }

    fn check_compatible(&self, other: &Field) -> Result<()> {
        other.expect_domain(self.domain)?;
        check_dim(self.dim, other.dim)
    }

    /// Quadrature `L²` norm on `grid`.
    pub fn l2_norm(&self, grid: &Grid) -> Result<f64> {
        grid.norm(&self.sample(grid)?)
    }

    /// `⟨u, v⟩ = ∫ u conj(v)` on `grid`.
    pub fn inner(&self, other: &Field, grid: &Grid) -> Result<Complex64> {
        grid.inner(&self.sample(grid)?, &other.sample(grid)?)
    }
}

fn interpolate(grid: &Grid, values: &[Complex64], p: &[f64]) -> Complex64 {
    super::operator::interpolation_weights(grid, p)
        .into_iter()
        .map(|(k, w)| values[k] * w)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gridded_field_interpolates_linear_data_exactly() {
        let g = Grid::new(vec![1.0, 2.0], vec![5, 7]).unwrap();
        let vals = g.sample(|p| c(2.0 * p[0] - 0.5 * p[1] + 1.0));
        let f = Field::gridded(Domain::Group, g, vals).unwrap();
        for p in [[0.1, 0.3], [-0.55, 1.1], [0.0, 0.0]] {
            let v = f.eval(&p);
            assert!((v.re - (2.0 * p[0] - 0.5 * p[1] + 1.0)).abs() < 1e-12, "{p:?}");
        }
        assert_eq!(f.eval(&[1.5, 0.0]), c(0.0));
    }

    #[test]
    fn gridded_field_reproduces_nodes() {
        let g = Grid::cube(1, 3.0, 6).unwrap();
        let vals = g.sample(|p| c(p[0].sin()));
        let f = Field::gridded(Domain::Group, g.clone(), vals.clone()).unwrap();
        for k in 0..g.len() {
            assert!((f.eval(g.node(k)) - vals[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn domain_checks() {
        let f = Field::constant(Domain::PhaseSpace, 2, c(1.0));
        assert!(f.integrate(&Grid::cube(2, 1.0, 2).unwrap()).is_err());
        let xi = XiGrid::cube(1, 1.0, 4, 1.0, 4).unwrap();
        let v = f.integrate_xi(&xi).unwrap();
        assert!((v.re - 4.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-14);
        let g = Field::constant(Domain::Group, 1, c(1.0));
        assert!(g.integrate_xi(&xi).is_err());
        assert!(g.mul(&Field::constant(Domain::Dual, 1, c(1.0))).is_err());
    }

    #[test]
    fn algebra_of_fields() {
        let a = Field::gaussian(Domain::Group, vec![0.0], 1.0);
        let b = a.mul(&a).unwrap().add(&a.scale(c(2.0))).unwrap();
        let x = [0.7];
        let e = (-0.49f64 / 2.0).exp();
        assert!((b.eval(&x).re - (e * e + 2.0 * e)).abs() < 1e-15);
        assert_eq!(a.conj().eval(&x), a.eval(&x));
    }
}
