//! Weyl systems, Fourier–Wigner transforms, coherent states and the
//! Bargmann transform.
//!
//! The plain, τ-ordered and magnetic families share one description: a
//! coherent state at `(z, ζ)` is
//!
//! `ω_{z,ζ}(x) = e^{-i⟨P(z,x)|ζ⟩} · φ(z,x) · ω(zx)`
//!
//! with `P(z,x) = zx` (plain, magnetic) or `τ(z)⁻¹zx` (τ-ordered) and a
//! unimodular factor `φ` that is `1` except in the magnetic case, where it
//! is `e^{-iΓ^A[[zx,x]]}`. Every `x ↦ P(z,x)` is a left translation, so it
//! preserves Haar measure; [`Twist`] carries the choice.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::lie::LieAlgebra;
use crate::magnetic::VectorPotential;
use crate::numerics::fourier::{phase_matrix, separable_apply};
use crate::numerics::{Domain, Field, Grid, OperatorMatrix, XiGrid};
use crate::scalar::{dot, pairwise_sum};
use crate::tau::TauMap;

/// A point `(z, ζ)` of phase space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub z: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl PhasePoint {
    pub fn new(z: Vec<f64>, zeta: Vec<f64>) -> Self {
        Self { z, zeta }
    }

    pub fn origin(dim: usize) -> Self {
        Self::new(vec![0.0; dim], vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }
}

/// An `L²`-normalized window `ω`.
#[derive(Clone, Debug)]
pub struct Window {
    field: Field,
}

impl Window {
    /// `π^{-n/4} σ^{-n/2} e^{-|x - c|²/2σ²}`, renormalized by its quadrature
    /// norm on `grid`.
    pub fn gaussian(sigma: f64, center: Vec<f64>, grid: &Grid) -> Result<Self> {
        check_dim(grid.dim(), center.len())?;
        Self::from_field(Field::gaussian(Domain::Group, center, sigma), grid)
    }

    /// Unit-width Gaussian at the origin.
    pub fn standard(grid: &Grid) -> Result<Self> {
        Self::gaussian(1.0, vec![0.0; grid.dim()], grid)
    }

    /// Normalizes `field` on `grid`.
    pub fn from_field(field: Field, grid: &Grid) -> Result<Self> {
        field.expect_domain(Domain::Group)?;
        let nrm = field.l2_norm(grid)?;
        if !(nrm > 0.0 && nrm.is_finite()) {
            return Err(crate::Error::InvalidArgument("window has zero norm on the grid".into()));
        }
        Ok(Self {
            field: field.scale(Complex64::new(1.0 / nrm, 0.0)),
        })
    }

    /// `e^{iψ} ω` for a real `ψ`; unimodular, so the norm is unchanged.
    pub fn modulated<F>(&self, psi: F) -> Window
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Window {
            field: self.field.map(move |x, v| v * Complex64::from_polar(1.0, psi(x))),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.field.eval(x)
    }
}

/// Which coherent-state family is in use.
#[derive(Clone, Debug, Default)]
pub enum Twist {
    #[default]
    None,
    Tau(TauMap),
    Magnetic(VectorPotential),
}

impl Twist {
    /// Collapses the trivial cases (`τ ≡ e`, `A ≡ 0`) onto the plain family so
    /// that they run the identical code path.
    pub fn normalized(&self) -> Twist {
        match self {
            Twist::Tau(t) if t.is_trivial() => Twist::None,
            Twist::Magnetic(a) if a.is_zero() => Twist::None,
            other => other.clone(),
        }
    }

    pub fn is_plain(&self) -> bool {
        matches!(self.normalized(), Twist::None)
    }

    /// `P(z, x)`.
    pub fn push(&self, alg: &LieAlgebra<f64>, z: &[f64], x: &[f64]) -> Vec<f64> {
        let zx = alg.bch_raw(z, x);
        match self {
            Twist::Tau(t) if !t.is_trivial() => alg.bch_raw(&alg.inv(&t.apply(z)), &zx),
            _ => zx,
        }
    }

    /// Inverse of `x ↦ P(z, x)`.
    pub fn pull(&self, alg: &LieAlgebra<f64>, z: &[f64], y: &[f64]) -> Vec<f64> {
        let y = match self {
            Twist::Tau(t) if !t.is_trivial() => alg.bch_raw(&t.apply(z), y),
            _ => y.to_vec(),
        };
        alg.bch_raw(&alg.inv(z), &y)
    }

    /// Unimodular factor `φ(z, x)`.
    pub fn phase(&self, alg: &LieAlgebra<f64>, z: &[f64], x: &[f64]) -> Complex64 {
        match self {
            Twist::Magnetic(a) if !a.is_zero() => {
                let zx = alg.bch_raw(z, x);
                Complex64::from_polar(1.0, -a.circulation(&zx, x))
            }
            _ => Complex64::new(1.0, 0.0),
        }
    }
}

fn check_point(alg: &LieAlgebra<f64>, p: &PhasePoint) -> Result<()> {
    check_dim(alg.dim(), p.z.len())?;
    check_dim(alg.dim(), p.zeta.len())
}

/// `(W(z,ζ)u)(x) = e^{i⟨x|ζ⟩} u(z⁻¹x)`.
pub fn weyl(alg: &LieAlgebra<f64>, p: &PhasePoint, u: &Field) -> Result<Field> {
    twisted_weyl(alg, &Twist::None, p, u)
}

/// `(W(z,ζ)* u)(y) = e^{-i⟨zy|ζ⟩} u(zy)`.
pub fn weyl_adjoint(alg: &LieAlgebra<f64>, p: &PhasePoint, u: &Field) -> Result<Field> {
    twisted_weyl_adjoint(alg, &Twist::None, p, u)
}

/// Family Weyl operator: `u ↦ e^{i⟨P(z,x')|ζ⟩} conj φ(z,x') u(x')`, `x' = z⁻¹x`.
pub fn twisted_weyl(alg: &LieAlgebra<f64>, twist: &Twist, p: &PhasePoint, u: &Field) -> Result<Field> {
    check_point(alg, p)?;
    u.expect_domain(Domain::Group)?;
    let (a, t, p, u2) = (alg.clone(), twist.normalized(), p.clone(), u.clone());
    let zinv = alg.inv(&p.z);
    Ok(Field::analytic(Domain::Group, alg.dim(), move |x| {
        let xp = a.bch_raw(&zinv, x);
        let ph = dot(&t.push(&a, &p.z, &xp), &p.zeta);
        Complex64::from_polar(1.0, ph) * t.phase(&a, &p.z, &xp).conj() * u2.eval(&xp)
    })
    .mark_approximate(u.is_gridded() || u.is_approximate()))
}

/// Adjoint of [`twisted_weyl`]: `v ↦ e^{-i⟨P(z,y)|ζ⟩} φ(z,y) v(zy)`.
pub fn twisted_weyl_adjoint(alg: &LieAlgebra<f64>, twist: &Twist, p: &PhasePoint, u: &Field) -> Result<Field> {
    check_point(alg, p)?;
    u.expect_domain(Domain::Group)?;
    let (a, t, p, u2) = (alg.clone(), twist.normalized(), p.clone(), u.clone());
    Ok(Field::analytic(Domain::Group, alg.dim(), move |y| {
        let zy = a.bch_raw(&p.z, y);
        let ph = dot(&t.push(&a, &p.z, y), &p.zeta);
        Complex64::from_polar(1.0, -ph) * t.phase(&a, &p.z, y) * u2.eval(&zy)
    })
    .mark_approximate(u.is_gridded() || u.is_approximate()))
}

/// Multiplier `γ(x) = exp{-i⟨x - z⁻¹x|η⟩}` in `W(z,ζ)W(y,η) = Mult(γ) W(zy, ζ+η)`.
pub fn weyl_compose_factor(alg: &LieAlgebra<f64>, p: &PhasePoint, q: &PhasePoint, x: &[f64]) -> Result<Complex64> {
    check_point(alg, p)?;
    check_point(alg, q)?;
    check_dim(alg.dim(), x.len())?;
    let zx = alg.bch(&alg.inv(&p.z), x)?;
    let d: Vec<f64> = x.iter().zip(&zx).map(|(a, b)| a - b).collect();
    Ok(Complex64::from_polar(1.0, -dot(&d, &q.zeta)))
}

/// Coherent state `ω_{z,ζ} = W(z,ζ)* ω`.
pub fn coherent_state(alg: &LieAlgebra<f64>, w: &Window, p: &PhasePoint) -> Result<Field> {
    weyl_adjoint(alg, p, w.field())
}

pub fn twisted_coherent_state(alg: &LieAlgebra<f64>, twist: &Twist, w: &Window, p: &PhasePoint) -> Result<Field> {
    twisted_weyl_adjoint(alg, twist, p, w.field())
}

/// Rank-one projector `Ω_p` with kernel `ω_p ⊗ conj(ω_p)` on `grid`.
pub fn projector(alg: &LieAlgebra<f64>, w: &Window, p: &PhasePoint, grid: &Grid) -> Result<OperatorMatrix> {
    twisted_projector(alg, &Twist::None, w, p, grid)
}

pub fn twisted_projector(
    alg: &LieAlgebra<f64>,
    twist: &Twist,
    w: &Window,
    p: &PhasePoint,
    grid: &Grid,
) -> Result<OperatorMatrix> {
    let v = twisted_coherent_state(alg, twist, w, p)?.sample(grid)?;
    OperatorMatrix::rank_one(grid, &v, &v)
}

/// `⟨ω_p, ω_q⟩` on `grid`.
pub fn reproducing_kernel(alg: &LieAlgebra<f64>, w: &Window, p: &PhasePoint, q: &PhasePoint, grid: &Grid) -> Result<Complex64> {
    coherent_state(alg, w, p)?.inner(&coherent_state(alg, w, q)?, grid)
}

/// `Φ[k][j] = ω^T_{𝒳_k}(x_j)` for every node `𝒳_k` of `xi` (rows, in `xi`
/// order) and every node `x_j` of `grid` (columns).
pub fn coherent_state_matrix(
    alg: &LieAlgebra<f64>,
    twist: &Twist,
    w: &Window,
    xi: &XiGrid,
    grid: &Grid,
) -> Result<DMatrix<Complex64>> {
    check_dim(alg.dim(), xi.dim())?;
    check_dim(alg.dim(), grid.dim())?;
    let t = twist.normalized();
    let (nz, nd, nx) = (xi.g.len(), xi.dual.len(), grid.len());
    let blocks: Vec<Vec<Complex64>> = (0..nz)
        .into_par_iter()
        .map(|iz| {
            let z = xi.g.node(iz);
            let cols: Vec<(Vec<f64>, Complex64)> = (0..nx)
                .map(|j| {
                    let x = grid.node(j);
                    (t.push(alg, z, x), t.phase(alg, z, x) * w.eval(&alg.bch_raw(z, x)))
                })
                .collect();
            let mut out = Vec::with_capacity(nd * nx);
            for id in 0..nd {
                let zeta = xi.dual.node(id);
                out.extend(cols.iter().map(|(p, a)| Complex64::from_polar(1.0, -dot(p, zeta)) * a));
            }
            out
        })
        .collect();
    let flat: Vec<Complex64> = blocks.into_iter().flatten().collect();
    Ok(DMatrix::from_row_slice(nz * nd, nx, &flat))
}

/// `∫ e^{i⟨y|ζ⟩} F(z, y) dy` at every node of `xi`, separably over the axes
/// of `y_grid` (which must be a product grid, as all grids are).
fn wigner_engine<F>(xi: &XiGrid, y_grid: &Grid, integrand: F) -> Result<Vec<Complex64>>
where
    F: Fn(&[f64], &[f64]) -> Complex64 + Sync,
{
    check_dim(xi.dim(), y_grid.dim())?;
    let n = xi.dim();
    let mats: Vec<Vec<Complex64>> = (0..n)
        .map(|a| phase_matrix(&y_grid.axis_nodes(a), &xi.dual.axis_nodes(a), 1.0))
        .collect();
    let shape = y_grid.counts().to_vec();
    let vol = y_grid.vol();
    let per_z: Vec<Vec<Complex64>> = (0..xi.g.len())
        .into_par_iter()
        .map(|iz| {
            let z = xi.g.node(iz);
            let data: Vec<Complex64> = (0..y_grid.len()).map(|k| integrand(z, y_grid.node(k))).collect();
            let m: Vec<(usize, &[Complex64])> = (0..n).map(|a| (xi.dual.counts()[a], mats[a].as_slice())).collect();
            separable_apply(&data, &shape, &m).into_iter().map(|v| v * vol).collect()
        })
        .collect();
    Ok(per_z.into_iter().flatten().collect())
}

/// Samples of `𝒲_{u,v}` for a coherent family, in `xi` node order.
pub fn twisted_wigner_values(
    alg: &LieAlgebra<f64>,
    twist: &Twist,
    u: &Field,
    v: &Field,
    xi: &XiGrid,
    y_grid: &Grid,
) -> Result<Vec<Complex64>> {
    check_dim(alg.dim(), xi.dim())?;
    u.expect_domain(Domain::Group)?;
    v.expect_domain(Domain::Group)?;
    let t = twist.normalized();
    wigner_engine(xi, y_grid, |z, y| {
        let x = t.pull(alg, z, y);
        let zx = alg.bch_raw(z, &x);
        t.phase(alg, z, &x).conj() * u.eval(&x) * v.eval(&zx).conj()
    })
}

/// `𝒲_{u,v}(z,ζ) = ⟨W(z,ζ)u, v⟩` on `xi`, via the change of variables
/// `y = zx` followed by a partial Fourier transform.
pub fn fourier_wigner_values(alg: &LieAlgebra<f64>, u: &Field, v: &Field, xi: &XiGrid, y_grid: &Grid) -> Result<Vec<Complex64>> {
    twisted_wigner_values(alg, &Twist::None, u, v, xi, y_grid)
}

pub fn fourier_wigner(alg: &LieAlgebra<f64>, u: &Field, v: &Field, xi: &XiGrid, y_grid: &Grid) -> Result<Field> {
    Field::gridded(Domain::PhaseSpace, xi.as_box(), fourier_wigner_values(alg, u, v, xi, y_grid)?)
}

/// Literal per-node quadrature of `∫ e^{i⟨y|ζ⟩} u(z⁻¹y) conj v(y) dy`.
pub fn fourier_wigner_direct(alg: &LieAlgebra<f64>, u: &Field, v: &Field, xi: &XiGrid, y_grid: &Grid) -> Result<Field> {
    check_dim(alg.dim(), xi.dim())?;
    check_dim(alg.dim(), y_grid.dim())?;
    let vals: Vec<Complex64> = (0..xi.len())
        .into_par_iter()
        .map(|k| {
            let (z, zeta) = xi.node(k);
            fourier_wigner_at_raw(alg, u, v, z, zeta, y_grid)
        })
        .collect();
    Field::gridded(Domain::PhaseSpace, xi.as_box(), vals)
}

fn fourier_wigner_at_raw(alg: &LieAlgebra<f64>, u: &Field, v: &Field, z: &[f64], zeta: &[f64], y_grid: &Grid) -> Complex64 {
    let zinv = alg.inv(z);
    let terms: Vec<Complex64> = (0..y_grid.len())
        .map(|k| {
            let y = y_grid.node(k);
            Complex64::from_polar(1.0, dot(y, zeta)) * u.eval(&alg.bch_raw(&zinv, y)) * v.eval(y).conj()
        })
        .collect();
    pairwise_sum(&terms) * y_grid.vol()
}

/// `𝒲_{u,v}` at a single phase-space point.
pub fn fourier_wigner_at(alg: &LieAlgebra<f64>, u: &Field, v: &Field, p: &PhasePoint, y_grid: &Grid) -> Result<Complex64> {
    check_point(alg, p)?;
    check_dim(alg.dim(), y_grid.dim())?;
    Ok(fourier_wigner_at_raw(alg, u, v, &p.z, &p.zeta, y_grid))
}

/// `B_ω u = 𝒲_{u,ω}`.
pub fn bargmann(alg: &LieAlgebra<f64>, w: &Window, u: &Field, xi: &XiGrid, y_grid: &Grid) -> Result<Field> {
    fourier_wigner(alg, u, w.field(), xi, y_grid)
}

/// `B†h = ∫∫ h(z,ζ) ω_{z,ζ} dz đζ`, sampled on `target`.
pub fn bargmann_adjoint(alg: &LieAlgebra<f64>, w: &Window, h: &[Complex64], xi: &XiGrid, target: &Grid) -> Result<Field> {
    twisted_bargmann_adjoint(alg, &Twist::None, w, h, xi, target)
}

pub fn twisted_bargmann_adjoint(
    alg: &LieAlgebra<f64>,
    twist: &Twist,
    w: &Window,
    h: &[Complex64],
    xi: &XiGrid,
    target: &Grid,
) -> Result<Field> {
    check_dim(xi.len(), h.len())?;
    check_dim(alg.dim(), xi.dim())?;
    check_dim(alg.dim(), target.dim())?;
    let n = xi.dim();
    let t = twist.normalized();
    let dual_axes: Vec<Vec<f64>> = (0..n).map(|a| xi.dual.axis_nodes(a)).collect();
    let shape = xi.dual.counts().to_vec();
    let nd = xi.dual.len();
    let weight = xi.weight();
    let out: Vec<Complex64> = (0..target.len())
        .into_par_iter()
        .map(|ix| {
            let x = target.node(ix);
            let terms: Vec<Complex64> = (0..xi.g.len())
                .map(|iz| {
                    let z = xi.g.node(iz);
                    let zx = alg.bch_raw(z, x);
                    let amp = t.phase(alg, z, x) * w.eval(&zx);
                    if amp.norm() == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let p = t.push(alg, z, x);
                    let rows: Vec<Vec<Complex64>> = (0..n)
                        .map(|a| dual_axes[a].iter().map(|s| Complex64::from_polar(1.0, -p[a] * s)).collect())
                        .collect();
                    let m: Vec<(usize, &[Complex64])> = rows.iter().map(|r| (1usize, r.as_slice())).collect();
                    let c = separable_apply(&h[iz * nd..(iz + 1) * nd], &shape, &m)[0];
                    amp * c
                })
                .collect();
            pairwise_sum(&terms) * weight
        })
        .collect();
    Field::gridded(Domain::Group, target.clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h1() -> LieAlgebra<f64> {
        LieAlgebra::heisenberg(1).unwrap()
    }

    fn bump(n: usize) -> Field {
        let c: Vec<f64> = (0..n).map(|k| 0.2 - 0.1 * k as f64).collect();
        Field::gaussian(Domain::Group, c, 0.9).map(|x, v| v * Complex64::from_polar(1.0, 0.3 * x[0]))
    }

    #[test]
    fn weyl_identity_and_classical_shift() {
        let ab = LieAlgebra::<f64>::abelian(1).unwrap();
        let u = bump(1);
        let id = weyl(&ab, &PhasePoint::origin(1), &u).unwrap();
        assert_eq!(id.eval(&[0.4]), u.eval(&[0.4]));
        let p = PhasePoint::new(vec![0.7], vec![1.3]);
        let w = weyl(&ab, &p, &u).unwrap();
        for x in [-1.0, 0.0, 0.5] {
            let expect = Complex64::from_polar(1.0, 1.3 * x) * u.eval(&[x - 0.7]);
            assert!((w.eval(&[x]) - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn weyl_adjoint_inverts_weyl_on_heisenberg() {
        let alg = h1();
        let u = bump(3);
        let p = PhasePoint::new(vec![0.4, -0.6, 0.3], vec![1.0, 0.2, -0.7]);
        let back = weyl_adjoint(&alg, &p, &weyl(&alg, &p, &u).unwrap()).unwrap();
        for x in [[0.1, 0.2, 0.3], [-1.0, 0.5, 0.0]] {
            assert!((back.eval(&x) - u.eval(&x)).norm() < 1e-12);
        }
    }

    #[test]
    fn composition_factor_is_trivial_for_zero_eta() {
        let alg = h1();
        let p = PhasePoint::new(vec![0.4, -0.6, 0.3], vec![1.0, 0.2, -0.7]);
        let q = PhasePoint::new(vec![-0.2, 0.1, 0.5], vec![0.0; 3]);
        let g = weyl_compose_factor(&alg, &p, &q, &[0.3, 0.3, 0.3]).unwrap();
        assert!((g - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn separable_and_literal_wigner_agree() {
        let alg = h1();
        let xi = XiGrid::cube(3, 3.0, 4, 3.0, 4).unwrap();
        let y = Grid::cube(3, 4.0, 7).unwrap();
        let u = bump(3);
        let v = Field::gaussian(Domain::Group, vec![0.0; 3], 1.0);
        let a = fourier_wigner(&alg, &u, &v, &xi, &y).unwrap();
        let b = fourier_wigner_direct(&alg, &u, &v, &xi, &y).unwrap();
        let (_, av) = a.grid_values().unwrap();
        let (_, bv) = b.grid_values().unwrap();
        let err = av.iter().zip(bv).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn coherent_states_are_normalized() {
        let g = Grid::cube(1, 10.0, 128).unwrap();
        let ab = LieAlgebra::<f64>::abelian(1).unwrap();
        let w = Window::standard(&g).unwrap();
        let p = PhasePoint::new(vec![1.2], vec![-0.8]);
        let c = coherent_state(&ab, &w, &p).unwrap();
        assert!((c.l2_norm(&g).unwrap() - 1.0).abs() < 1e-10);
        let x = 0.3;
        let expect = Complex64::from_polar(1.0, -(-0.8) * (1.2 + x)) * w.eval(&[1.2 + x]);
        assert!((c.eval(&[x]) - expect).norm() < 1e-15);
        assert!((reproducing_kernel(&ab, &w, &p, &p, &g).unwrap().re - 1.0).abs() < 1e-10);
    }
}
