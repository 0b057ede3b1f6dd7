//! Covariant symbols `cov_ω(T)(𝒳,𝒴) = ⟨Tω_𝒳, ω_𝒴⟩`, the `□`-composition,
//! the Berezin transform and reconstruction of kernels from covariant data.
//!
//! Everything is expressed through the coherent-state matrix
//! `Φ[𝒳][x] = ω_𝒳(x)` on a `Ξ`-grid and a `G`-grid, so that for a kernel `K`
//! with cell volume `v`:
//!
//! * `cov = v² (conj(Φ) K Φᵀ)ᵀ`,
//! * `F □ G = w F G` with `w` the `Ξ` cell weight,
//! * `K_T = w² Φᵀ covᵀ conj(Φ)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::berezin::BerezinConfig;
use crate::coherent::{coherent_state, coherent_state_matrix, PhasePoint, Twist, Window};
use crate::error::{check_dim, Error, Result};
use crate::lie::LieAlgebra;
use crate::numerics::{Grid, Kernel, OperatorMatrix, XiGrid};

/// Ceiling on stored `Ξ × Ξ` entries.
pub const MAX_FULL_ENTRIES: usize = 10_000_000;

/// `⟨Tω_p, ω_q⟩` on the grid of `t`.
pub fn cov(alg: &LieAlgebra<f64>, t: &OperatorMatrix, w: &Window, p: &PhasePoint, q: &PhasePoint) -> Result<Complex64> {
    let g = t.grid();
    let wp = coherent_state(alg, w, p)?.sample(g)?;
    let wq = coherent_state(alg, w, q)?.sample(g)?;
    g.inner(&t.apply(&wp)?, &wq)
}

#[derive(Clone, Debug)]
enum Values {
    Full(DMatrix<Complex64>),
    Diagonal(Vec<Complex64>),
}

/// Samples of a covariant symbol on a `Ξ`-grid (full or diagonal).
#[derive(Clone, Debug)]
pub struct CovSymbol {
    alg: LieAlgebra<f64>,
    window: Window,
    xi: XiGrid,
    values: Values,
}

fn guard(xi: &XiGrid) -> Result<()> {
    let need = xi.len().saturating_mul(xi.len());
    if need > MAX_FULL_ENTRIES {
        return Err(Error::CostGuard {
            what: "full covariant symbol (Ξ nodes²)".into(),
            required: need as f64,
            limit: MAX_FULL_ENTRIES as f64,
        });
    }
    Ok(())
}

impl CovSymbol {
    /// Full `cov_ω(T)` on `xi × xi`.
    pub fn full(alg: &LieAlgebra<f64>, t: &OperatorMatrix, w: &Window, xi: &XiGrid) -> Result<Self> {
        guard(xi)?;
        let g = t.grid();
        let phi = coherent_state_matrix(alg, &Twist::None, w, xi, g)?;
        let v = g.vol();
        let m = (phi.conjugate() * t.kernel() * phi.transpose()).transpose() * Complex64::new(v * v, 0.0);
        Ok(Self {
            alg: alg.clone(),
            window: w.clone(),
            xi: xi.clone(),
            values: Values::Full(m),
        })
    }

    /// Diagonal `Cov_ω(T)(𝒳) = ⟨Tω_𝒳, ω_𝒳⟩`.
    pub fn diagonal(alg: &LieAlgebra<f64>, t: &OperatorMatrix, w: &Window, xi: &XiGrid) -> Result<Self> {
        let g = t.grid();
        let phi = coherent_state_matrix(alg, &Twist::None, w, xi, g)?;
        let v = g.vol();
        let tphi = t.kernel() * phi.transpose();
        let d: Vec<Complex64> = (0..xi.len())
            .into_par_iter()
            .map(|k| {
                let s: Complex64 = (0..g.len()).map(|x| tphi[(x, k)] * phi[(k, x)].conj()).sum();
                s * v * v
            })
            .collect();
        Ok(Self {
            alg: alg.clone(),
            window: w.clone(),
            xi: xi.clone(),
            values: Values::Diagonal(d),
        })
    }

    pub fn from_matrix(alg: &LieAlgebra<f64>, w: &Window, xi: &XiGrid, m: DMatrix<Complex64>) -> Result<Self> {
        check_dim(xi.len(), m.nrows())?;
        check_dim(xi.len(), m.ncols())?;
        Ok(Self {
            alg: alg.clone(),
            window: w.clone(),
            xi: xi.clone(),
            values: Values::Full(m),
        })
    }

    pub fn xi(&self) -> &XiGrid {
        &self.xi
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn is_full(&self) -> bool {
        matches!(self.values, Values::Full(_))
    }

    /// The `Ξ × Ξ` sample matrix, rows `𝒳`, columns `𝒴`.
    pub fn matrix(&self) -> Result<&DMatrix<Complex64>> {
        match &self.values {
            Values::Full(m) => Ok(m),
            Values::Diagonal(_) => Err(Error::Unsupported("diagonal covariant symbol has no off-diagonal data".into())),
        }
    }

    pub fn diagonal_values(&self) -> Vec<Complex64> {
        match &self.values {
            Values::Full(m) => (0..m.nrows()).map(|k| m[(k, k)]).collect(),
            Values::Diagonal(d) => d.clone(),
        }
    }

    /// `L^p(Ξ)` quadrature norm of the diagonal.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p < 1.0 {
            return Err(Error::InvalidArgument(format!("exponent {p} < 1")));
        }
        let d = self.diagonal_values();
        if p.is_infinite() {
            return Ok(d.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        Ok((d.iter().map(|v| v.norm().powf(p)).sum::<f64>() * self.xi.weight()).powf(1.0 / p))
    }

    fn same_grid(&self, other: &CovSymbol) -> Result<()> {
        if self.xi == other.xi {
            Ok(())
        } else {
            Err(Error::GridMismatch("covariant symbols live on different Ξ grids".into()))
        }
    }
}

/// `(F □ G)(𝒳,𝒴) = ∫ F(𝒳,𝒵) G(𝒵,𝒴) d𝒵`.
pub fn square_compose(f: &CovSymbol, g: &CovSymbol) -> Result<CovSymbol> {
    f.same_grid(g)?;
    let m = f.matrix()? * g.matrix()? * Complex64::new(f.xi.weight(), 0.0);
    CovSymbol::from_matrix(&f.alg, &f.window, &f.xi, m)
}

/// `F^□(𝒳,𝒴) = conj F(𝒴,𝒳)`.
pub fn square_adjoint(f: &CovSymbol) -> Result<CovSymbol> {
    CovSymbol::from_matrix(&f.alg, &f.window, &f.xi, f.matrix()?.adjoint())
}

/// Coherent-state overlaps `⟨ω_𝒳, ω_𝒵⟩` over all pairs of `xi` nodes,
/// integrated on `grid`.
pub fn overlap_matrix(alg: &LieAlgebra<f64>, w: &Window, xi: &XiGrid, grid: &Grid) -> Result<DMatrix<Complex64>> {
    guard(xi)?;
    let phi = coherent_state_matrix(alg, &Twist::None, w, xi, grid)?;
    Ok(&phi * phi.adjoint() * Complex64::new(grid.vol(), 0.0))
}

/// `BT_ω(f)(𝒳) = ∫ f(𝒵) |⟨ω_𝒳, ω_𝒵⟩|² d𝒵` at the point `p`, with the
/// overlaps integrated on `y_grid`.
pub fn berezin_transform(cfg: &BerezinConfig, p: &PhasePoint, y_grid: &Grid) -> Result<f64> {
    let wp = coherent_state(&cfg.alg, &cfg.window, p)?;
    let wz = crate::coherent::fourier_wigner_values(&cfg.alg, &wp, cfg.window.field(), &cfg.xi, y_grid)?;
    let f = cfg.symbol.sample(&cfg.xi);
    let s: Complex64 = f.iter().zip(&wz).map(|(a, b)| a * b.norm_sqr()).sum();
    Ok(s.re * cfg.xi.weight())
}

/// `BT_ω(f)` at every node of `cfg.xi` via the overlap matrix.
pub fn berezin_transform_grid(cfg: &BerezinConfig, y_grid: &Grid) -> Result<Vec<Complex64>> {
    let o = overlap_matrix(&cfg.alg, &cfg.window, &cfg.xi, y_grid)?;
    let f = cfg.symbol.sample(&cfg.xi);
    let w = cfg.xi.weight();
    Ok((0..o.nrows())
        .into_par_iter()
        .map(|i| (0..o.ncols()).map(|j| f[j] * o[(i, j)].norm_sqr()).sum::<Complex64>() * w)
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct NormBoundReport {
    pub p: f64,
    /// `∥Cov_ω(T)∥_{L^p(Ξ)}`.
    pub cov_norm: f64,
    /// `∥T∥_{B^p}`.
    pub schatten_norm: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// `∥Cov_ω(T)∥_{L^p} ≤ ∥T∥_{B^p}` up to relative slack `tol`.
pub fn norm_bound_check(alg: &LieAlgebra<f64>, t: &OperatorMatrix, w: &Window, xi: &XiGrid, p: f64, tol: f64) -> Result<NormBoundReport> {
    let c = CovSymbol::diagonal(alg, t, w, xi)?;
    let cov_norm = c.lp_norm(p)?;
    let schatten_norm = t.schatten_norm(p)?;
    let ratio = if schatten_norm > 0.0 { cov_norm / schatten_norm } else { 0.0 };
    Ok(NormBoundReport {
        p,
        cov_norm,
        schatten_norm,
        ratio,
        pass: cov_norm <= schatten_norm * (1.0 + tol) + 1e-300,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    /// Max `|Cov_ω(T)|` over the `ℓ^∞` shell `[r_k, r_{k+1})` in `Ξ`.
    pub shell_max: Vec<f64>,
    pub central: f64,
    /// Shell maxima non-increasing within the slack.
    pub monotone: bool,
    /// Last shell at most a tenth of the central value.
    pub decays: bool,
}

/// Shell scan of the diagonal covariant symbol; a heuristic probe of
/// vanishing at infinity inside a bounded box.
pub fn c0_decay_check(alg: &LieAlgebra<f64>, t: &OperatorMatrix, w: &Window, xi: &XiGrid, radii: &[f64], slack: f64) -> Result<DecayReport> {
    if radii.len() < 2 || radii.windows(2).any(|r| r[1] <= r[0]) {
        return Err(Error::InvalidArgument("radii must be increasing with at least two entries".into()));
    }
    let d = CovSymbol::diagonal(alg, t, w, xi)?.diagonal_values();
    let mut shell_max = vec![0.0f64; radii.len() - 1];
    let mut central: f64 = 0.0;
    for (k, v) in d.iter().enumerate() {
        let (z, zeta) = xi.node(k);
        let r = z.iter().chain(zeta).map(|c| c.abs()).fold(0.0, f64::max);
        if r < radii[0] {
            central = central.max(v.norm());
        }
        for s in 0..radii.len() - 1 {
            if r >= radii[s] && r < radii[s + 1] {
                shell_max[s] = shell_max[s].max(v.norm());
            }
        }
    }
    let scale = central.max(shell_max.iter().cloned().fold(0.0, f64::max));
    let monotone = shell_max.windows(2).all(|p| p[1] <= p[0] + slack * scale);
    let decays = *shell_max.last().expect("non-empty") <= 0.1 * central;
    Ok(DecayReport {
        radii: radii.to_vec(),
        shell_max,
        central,
        monotone,
        decays,
    })
}

/// `K_T(x,y) = ∫∫ cov(𝒵,𝒵') ω_{𝒵'}(x) conj ω_𝒵(y) d𝒵 d𝒵'` on `grid`.
pub fn kernel_from_cov(c: &CovSymbol, grid: &Grid) -> Result<OperatorMatrix> {
    let phi = coherent_state_matrix(&c.alg, &Twist::None, &c.window, &c.xi, grid)?;
    let w = c.xi.weight();
    let k = phi.transpose() * c.matrix()?.transpose() * phi.conjugate() * Complex64::new(w * w, 0.0);
    OperatorMatrix::new(grid.clone(), k)
}

/// The reconstructed kernel as an evaluator at arbitrary points.
pub struct CovKernel {
    alg: LieAlgebra<f64>,
    window: Window,
    xi: XiGrid,
    /// `w² · cov`.
    m: DMatrix<Complex64>,
}

impl CovKernel {
    pub fn new(c: &CovSymbol) -> Result<Self> {
        let w = c.xi.weight();
        Ok(Self {
            alg: c.alg.clone(),
            window: c.window.clone(),
            xi: c.xi.clone(),
            m: c.matrix()? * Complex64::new(w * w, 0.0),
        })
    }

    fn states_at(&self, x: &[f64]) -> Vec<Complex64> {
        (0..self.xi.len())
            .map(|k| {
                let (z, zeta) = self.xi.node(k);
                let zx = self.alg.bch_raw(z, x);
                Complex64::from_polar(1.0, -crate::scalar::dot(&zx, zeta)) * self.window.eval(&zx)
            })
            .collect()
    }
}

impl Kernel for CovKernel {
    fn dim(&self) -> usize {
        self.alg.dim()
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> Complex64 {
        let a = self.states_at(x);
        let b = self.states_at(y);
        let mut acc = Complex64::new(0.0, 0.0);
        for (zi, bz) in b.iter().enumerate() {
            let bz = bz.conj();
            if bz.norm() == 0.0 {
                continue;
            }
            let row: Complex64 = (0..a.len()).map(|zj| self.m[(zi, zj)] * a[zj]).sum();
            acc += bz * row;
        }
        acc
    }
}

/// `a_T` of a regularizing operator from its covariant symbol: kernel
/// reconstruction followed by symbol recovery, on the nodes of `xi_eval`.
pub fn symbol_of_regularizing(c: &CovSymbol, xi_eval: &XiGrid, y_grid: &Grid) -> Result<crate::numerics::Field> {
    let k = CovKernel::new(c)?;
    crate::pseudodiff::symbol_from_kernel(&c.alg, &k, xi_eval, y_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::projector;

    fn setup() -> (LieAlgebra<f64>, Grid, Window, XiGrid) {
        let alg = LieAlgebra::abelian(1).unwrap();
        let g = Grid::cube(1, 8.0, 32).unwrap();
        let w = Window::standard(&g).unwrap();
        let xi = XiGrid::cube(1, 6.0, 12, 6.0, 12).unwrap();
        (alg, g, w, xi)
    }

    #[test]
    fn full_and_diagonal_agree_with_pointwise() {
        let (alg, g, w, xi) = setup();
        let t = projector(&alg, &w, &PhasePoint::new(vec![0.5], vec![-0.3]), &g).unwrap();
        let full = CovSymbol::full(&alg, &t, &w, &xi).unwrap();
        let diag = CovSymbol::diagonal(&alg, &t, &w, &xi).unwrap();
        let k = 17;
        let (z, zeta) = xi.node(k);
        let p = PhasePoint::new(z.to_vec(), zeta.to_vec());
        let (z2, zeta2) = xi.node(40);
        let q = PhasePoint::new(z2.to_vec(), zeta2.to_vec());
        let direct = cov(&alg, &t, &w, &p, &q).unwrap();
        assert!((full.matrix().unwrap()[(k, 40)] - direct).norm() < 1e-12);
        assert!((diag.diagonal_values()[k] - full.matrix().unwrap()[(k, k)]).norm() < 1e-12);
    }

    #[test]
    fn adjoint_symmetry_is_exact() {
        let (alg, g, w, xi) = setup();
        let t = OperatorMatrix::from_fn(&g, |x, y| Complex64::new((-(x[0] * x[0]) - y[0] * y[0]).exp(), x[0] * y[0]));
        let a = CovSymbol::full(&alg, &t, &w, &xi).unwrap();
        let b = CovSymbol::full(&alg, &t.adjoint(), &w, &xi).unwrap();
        let d = (b.matrix().unwrap() - square_adjoint(&a).unwrap().matrix().unwrap()).norm();
        assert!(d < 1e-12 * a.matrix().unwrap().norm());
    }

    #[test]
    fn cov_kernel_matches_matrix_reconstruction() {
        let (alg, g, w, xi) = setup();
        let t = projector(&alg, &w, &PhasePoint::origin(1), &g).unwrap();
        let c = CovSymbol::full(&alg, &t, &w, &xi).unwrap();
        let k = kernel_from_cov(&c, &g).unwrap();
        let e = CovKernel::new(&c).unwrap();
        for (i, j) in [(3, 5), (16, 16), (20, 9)] {
            let v = e.eval(g.node(i), g.node(j));
            assert!((v - k.kernel()[(i, j)]).norm() < 1e-10);
        }
    }

    #[test]
    fn guard_rejects_huge_grids() {
        let (alg, g, w, _) = setup();
        let big = XiGrid::cube(1, 6.0, 64, 6.0, 64).unwrap();
        let t = OperatorMatrix::identity(&g);
        assert!(matches!(CovSymbol::full(&alg, &t, &w, &big), Err(Error::CostGuard { .. })));
    }
}
