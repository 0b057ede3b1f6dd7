//! Pseudo-differential operators `Op(a)` with kernel `ǎ(x, log(xy⁻¹))`,
//! recovery of symbols from kernels, and the symbol `a_ω(f)` of a Berezin
//! operator.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::berezin::BerezinConfig;
use crate::coherent::{Twist, Window};
use crate::error::{check_dim, Error, Result};
use crate::lie::LieAlgebra;
use crate::numerics::fourier::{phase_matrix, separable_apply};
use crate::numerics::{Domain, Field, Grid, Kernel, OperatorMatrix, XiGrid};
use crate::scalar::{dot, dual_factor, pairwise_sum};
use crate::symbol::{DualFactor, Symbol};

/// The multiplier `x ↦ a(x)` when `a` does not depend on `ξ`.
pub fn multiplier_of(a: &Symbol) -> Option<Field> {
    if a.sampled_part().is_some() || !a.deltas().is_empty() || a.terms().is_empty() {
        return None;
    }
    let n = a.dim();
    let x_only = a
        .terms()
        .iter()
        .all(|t| matches!(t.dual.point_mass(n), Some(b) if b.iter().all(|v| *v == 0.0)));
    if !x_only {
        return None;
    }
    let terms: Vec<(Complex64, Field)> = a.terms().iter().map(|t| (t.coeff, t.group.clone())).collect();
    Some(Field::analytic(Domain::Group, n, move |x| terms.iter().map(|(c, g)| c * g.eval(x)).sum()))
}

/// `(c, g, b)` for a symbol that is a single term `c g(x) e^{-i⟨b|ξ⟩}`.
pub(crate) fn single_point_mass(a: &Symbol) -> Result<(Complex64, Field, Vec<f64>)> {
    let n = a.dim();
    match (a.terms(), a.deltas().is_empty(), a.sampled_part().is_none()) {
        ([t], true, true) => match t.dual.point_mass(n) {
            Some(b) => Ok((t.coeff, t.group.clone(), b)),
            None => Err(Error::Unsupported("symbol has a smooth partial transform; use the kernel path".into())),
        },
        _ => Err(Error::Unsupported(
            "the shift-operator path takes a single term g(x)e^{-i⟨b|ξ⟩}".into(),
        )),
    }
}

/// Kernel of `Op(a)` on `grid`.
///
/// `ξ`-independent symbols give multiplication operators; symbols whose
/// partial transform is smooth use the closed form `ǎ(x, log(xy⁻¹))`.
/// Plane-wave factors with `b ≠ 0` act by shifts and go through [`op_apply`].
pub fn op_quantize(alg: &LieAlgebra<f64>, a: &Symbol, grid: &Grid) -> Result<OperatorMatrix> {
    check_dim(alg.dim(), a.dim())?;
    check_dim(alg.dim(), grid.dim())?;
    a.validate()?;
    if let Some(m) = multiplier_of(a) {
        return OperatorMatrix::multiplication(grid, &m.sample(grid)?);
    }
    if !a.has_smooth_transform() {
        return Err(Error::Unsupported(
            "Op(a) on a grid needs a smooth partial transform; point-mass symbols act through op_apply".into(),
        ));
    }
    Ok(OperatorMatrix::from_fn(grid, |x, y| {
        let v = alg.bch_raw(x, &alg.inv(y));
        a.partial_inverse(x, &v).expect("smooth symbol")
    }))
}

/// Kernel of `Op(a)` with the `ξ`-integral done by quadrature over `dual`.
pub fn op_quantize_quadrature(alg: &LieAlgebra<f64>, a: &Symbol, grid: &Grid, dual: &Grid) -> Result<OperatorMatrix> {
    check_dim(alg.dim(), a.dim())?;
    check_dim(alg.dim(), grid.dim())?;
    check_dim(alg.dim(), dual.dim())?;
    Ok(OperatorMatrix::from_fn(grid, |x, y| {
        let v = alg.bch_raw(x, &alg.inv(y));
        a.partial_inverse_quadrature(x, &v, dual)
    }))
}

/// `Op(a)u` for symbols built from terms `c g(x) e^{-i⟨b|ξ⟩}`:
/// `u ↦ Σ c g(x) u(b⁻¹x)`.
pub fn op_apply(alg: &LieAlgebra<f64>, a: &Symbol, u: &Field) -> Result<Field> {
    check_dim(alg.dim(), a.dim())?;
    u.expect_domain(Domain::Group)?;
    let n = a.dim();
    if a.sampled_part().is_some() || !a.deltas().is_empty() {
        return Err(Error::Unsupported("shift path takes closed-form product terms only".into()));
    }
    let mut shifts = Vec::new();
    for t in a.terms() {
        match t.dual.point_mass(n) {
            Some(b) => shifts.push((t.coeff, t.group.clone(), alg.inv(&b))),
            None => return Err(Error::Unsupported("term with a smooth partial transform; use op_quantize".into())),
        }
    }
    let (al, u2) = (alg.clone(), u.clone());
    Ok(Field::analytic(Domain::Group, n, move |x| {
        shifts.iter().map(|(c, g, binv)| c * g.eval(x) * u2.eval(&al.bch_raw(binv, x))).sum()
    })
    .mark_approximate(u.is_approximate() || u.is_gridded()))
}

/// Closed-form kernel `(x, y) ↦ ǎ(x, log(xy⁻¹))` for smooth symbols.
pub struct SymbolKernel {
    alg: LieAlgebra<f64>,
    a: Symbol,
}

impl SymbolKernel {
    pub fn new(alg: &LieAlgebra<f64>, a: &Symbol) -> Result<Self> {
        check_dim(alg.dim(), a.dim())?;
        if !a.has_smooth_transform() {
            return Err(Error::Unsupported("symbol kernel needs a smooth partial transform".into()));
        }
        Ok(Self {
            alg: alg.clone(),
            a: a.clone(),
        })
    }
}

impl Kernel for SymbolKernel {
    fn dim(&self) -> usize {
        self.alg.dim()
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> Complex64 {
        let v = self.alg.bch_raw(x, &self.alg.inv(y));
        self.a.partial_inverse(x, &v).expect("smooth symbol")
    }
}

/// A kernel given by a closure.
pub struct FnKernel<F> {
    dim: usize,
    f: F,
}

impl<F> FnKernel<F>
where
    F: Fn(&[f64], &[f64]) -> Complex64 + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Kernel for FnKernel<F>
where
    F: Fn(&[f64], &[f64]) -> Complex64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> Complex64 {
        (self.f)(x, y)
    }
}

/// `a(x, ξ) = ∫ e^{-i⟨y|ξ⟩} K(x, y⁻¹x) dy` at every node of `xi`, with the
/// `y`-integral over `y_grid`. Interpolated kernels give approximate fields.
pub fn symbol_from_kernel(alg: &LieAlgebra<f64>, k: &dyn Kernel, xi: &XiGrid, y_grid: &Grid) -> Result<Field> {
    check_dim(alg.dim(), k.dim())?;
    check_dim(alg.dim(), xi.dim())?;
    check_dim(alg.dim(), y_grid.dim())?;
    let n = alg.dim();
    let mats: Vec<Vec<Complex64>> = (0..n)
        .map(|ax| phase_matrix(&y_grid.axis_nodes(ax), &xi.dual.axis_nodes(ax), -1.0))
        .collect();
    let shape = y_grid.counts().to_vec();
    let vol = y_grid.vol();
    let vals: Vec<Complex64> = (0..xi.g.len())
        .into_par_iter()
        .flat_map_iter(|ix| {
            let x = xi.g.node(ix);
            let data: Vec<Complex64> = (0..y_grid.len())
                .map(|j| k.eval(x, &alg.bch_raw(&alg.inv(y_grid.node(j)), x)))
                .collect();
            let m: Vec<(usize, &[Complex64])> = (0..n).map(|ax| (xi.dual.counts()[ax], mats[ax].as_slice())).collect();
            separable_apply(&data, &shape, &m).into_iter().map(move |v| v * vol)
        })
        .collect();
    Ok(Field::gridded(Domain::PhaseSpace, xi.as_box(), vals)?.mark_approximate(k.is_approximate()))
}

/// Single-point version of [`symbol_from_kernel`].
pub fn symbol_from_kernel_at(alg: &LieAlgebra<f64>, k: &dyn Kernel, x: &[f64], xi: &[f64], y_grid: &Grid) -> Complex64 {
    let t: Vec<Complex64> = (0..y_grid.len())
        .map(|j| {
            let y = y_grid.node(j);
            Complex64::from_polar(1.0, -dot(y, xi)) * k.eval(x, &alg.bch_raw(&alg.inv(y), x))
        })
        .collect();
    pairwise_sum(&t) * y_grid.vol()
}

/// Analytic evaluator of the Berezin kernel `κ_ω(f)(x, y)` at arbitrary
/// points, for the parts of `f` with a smooth partial transform and for
/// point masses `δ_𝒳`. Terms whose transform is `δ(V)` are excluded; they
/// are multipliers and are returned by [`BerezinKernel::diagonal_multiplier`].
pub struct BerezinKernel {
    cfg: BerezinConfig,
    twist: Twist,
    smooth: Vec<(Complex64, Field, DualFactor)>,
    diagonal: Vec<(Complex64, Field)>,
    deltas: Vec<(Complex64, Field)>,
}

impl BerezinKernel {
    pub fn new(cfg: &BerezinConfig, twist: &Twist) -> Result<Self> {
        let n = cfg.alg.dim();
        if cfg.symbol.sampled_part().is_some() {
            return Err(Error::Unsupported("analytic Berezin kernel needs a closed-form symbol".into()));
        }
        let twist = twist.normalized();
        let mut smooth = Vec::new();
        let mut diagonal = Vec::new();
        for t in cfg.symbol.terms() {
            match t.dual.point_mass(n) {
                None => smooth.push((t.coeff, t.group.clone(), t.dual.clone())),
                Some(b) if b.iter().all(|v| *v == 0.0) => diagonal.push((t.coeff, t.group.clone())),
                Some(_) => return Err(Error::Unsupported("plane-wave factor with b ≠ 0".into())),
            }
        }
        let deltas = cfg
            .symbol
            .deltas()
            .iter()
            .map(|(c, p)| Ok((*c, crate::coherent::twisted_coherent_state(&cfg.alg, &twist, &cfg.window, p)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            cfg: cfg.clone(),
            twist,
            smooth,
            diagonal,
            deltas,
        })
    }

    /// `m(x) = Σ_t c_t ∫ g_t(z) |A(z,x)|² dz` over the `δ(V)` terms.
    pub fn diagonal_multiplier(&self, x: &[f64]) -> Complex64 {
        if self.diagonal.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let (alg, zg) = (&self.cfg.alg, &self.cfg.xi.g);
        let t: Vec<Complex64> = (0..zg.len())
            .map(|k| {
                let z = zg.node(k);
                let a = self.twist.phase(alg, z, x) * self.cfg.window.eval(&alg.bch_raw(z, x));
                let g: Complex64 = self.diagonal.iter().map(|(c, g)| c * g.eval(z)).sum();
                g * a.norm_sqr()
            })
            .collect();
        pairwise_sum(&t) * zg.vol()
    }
}

impl Kernel for BerezinKernel {
    fn dim(&self) -> usize {
        self.cfg.alg.dim()
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> Complex64 {
        let (alg, zg) = (&self.cfg.alg, &self.cfg.xi.g);
        let mut acc = Complex64::new(0.0, 0.0);
        if !self.smooth.is_empty() {
            let t: Vec<Complex64> = (0..zg.len())
                .map(|k| {
                    let z = zg.node(k);
                    let ax = self.twist.phase(alg, z, x) * self.cfg.window.eval(&alg.bch_raw(z, x));
                    let ay = self.twist.phase(alg, z, y) * self.cfg.window.eval(&alg.bch_raw(z, y));
                    if ax.norm() == 0.0 || ay.norm() == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let px = self.twist.push(alg, z, x);
                    let py = self.twist.push(alg, z, y);
                    let d: Vec<f64> = py.iter().zip(&px).map(|(a, b)| a - b).collect();
                    let s: Complex64 = self
                        .smooth
                        .iter()
                        .map(|(c, g, h)| c * g.eval(z) * h.inverse_transform(&d).expect("smooth"))
                        .sum();
                    ax * ay.conj() * s
                })
                .collect();
            acc += pairwise_sum(&t) * zg.vol();
        }
        for (c, v) in &self.deltas {
            acc += c * v.eval(x) * v.eval(y).conj();
        }
        acc
    }
}

/// `a_ω(f)` on the nodes of `xi` through the kernel route: the recovery
/// formula applied to `κ_ω(f)`, plus the multiplier of the `δ(V)` terms.
pub fn berezin_symbol(cfg: &BerezinConfig, xi: &XiGrid, y_grid: &Grid) -> Result<Field> {
    let k = BerezinKernel::new(cfg, &Twist::None)?;
    let base = symbol_from_kernel(&cfg.alg, &k, xi, y_grid)?;
    if k.diagonal.is_empty() {
        return Ok(base);
    }
    let (g, vals) = base.grid_values().expect("gridded");
    let nd = xi.dual.len();
    let out: Vec<Complex64> = vals
        .iter()
        .enumerate()
        .map(|(i, v)| v + k.diagonal_multiplier(xi.g.node(i / nd)))
        .collect();
    Field::gridded(Domain::PhaseSpace, g.clone(), out)
}

/// `a_ω(f)(x, ξ)` by the direct triple integral
/// `∫∫∫ e^{-i⟨y|ξ⟩} e^{i⟨zy⁻¹x - zx|ζ⟩} f(z,ζ) ω(zx) conj ω(zy⁻¹x) dy dz đζ`
/// with the `ζ`-integral by quadrature over `cfg.xi.dual`.
pub fn berezin_symbol_direct(cfg: &BerezinConfig, x: &[f64], xi: &[f64], y_grid: &Grid) -> Result<Complex64> {
    let alg = &cfg.alg;
    check_dim(alg.dim(), x.len())?;
    check_dim(alg.dim(), xi.len())?;
    if !cfg.symbol.deltas().is_empty() {
        return Err(Error::Unsupported("direct route takes functions, not point masses".into()));
    }
    let zg = &cfg.xi.g;
    let dual = &cfg.xi.dual;
    let outer: Vec<Complex64> = (0..y_grid.len())
        .into_par_iter()
        .map(|j| {
            let y = y_grid.node(j);
            let yx = alg.bch_raw(&alg.inv(y), x);
            let inner: Vec<Complex64> = (0..zg.len())
                .map(|k| {
                    let z = zg.node(k);
                    let zx = alg.bch_raw(z, x);
                    let zyx = alg.bch_raw(z, &yx);
                    let amp = cfg.window.eval(&zx) * cfg.window.eval(&zyx).conj();
                    if amp.norm() == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let v: Vec<f64> = zyx.iter().zip(&zx).map(|(a, b)| a - b).collect();
                    amp * cfg.symbol.partial_inverse_quadrature(z, &v, dual)
                })
                .collect();
            Complex64::from_polar(1.0, -dot(y, xi)) * pairwise_sum(&inner) * zg.vol()
        })
        .collect();
    Ok(pairwise_sum(&outer) * y_grid.vol())
}

/// Commutative case: `a_ω(f)(x, ξ) = ∫∫ f(s - x, η - ξ) Q(s, η) ds đη` with
/// `Q(s, η) = ∫ e^{-i⟨y|η⟩} ω(s) conj ω(s - y) dy`, both integrals by
/// quadrature (`(s, η)` over `xi`, `y` over `y_grid`).
pub struct ConvolutionSymbol {
    xi: XiGrid,
    q: Vec<Complex64>,
    f: Symbol,
}

impl ConvolutionSymbol {
    pub fn new(alg: &LieAlgebra<f64>, w: &Window, f: &Symbol, xi: &XiGrid, y_grid: &Grid) -> Result<Self> {
        if !alg.is_abelian() {
            return Err(Error::Unsupported("the convolution form holds on commutative groups".into()));
        }
        check_dim(alg.dim(), xi.dim())?;
        let n = alg.dim();
        let q = xi.sample(|s, eta| {
            let t: Vec<Complex64> = (0..y_grid.len())
                .map(|j| {
                    let y = y_grid.node(j);
                    let sy: Vec<f64> = (0..n).map(|k| s[k] - y[k]).collect();
                    Complex64::from_polar(1.0, -dot(y, eta)) * w.eval(&sy).conj()
                })
                .collect();
            w.eval(s) * pairwise_sum(&t) * y_grid.vol()
        });
        Ok(Self {
            xi: xi.clone(),
            q,
            f: f.clone(),
        })
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        let n = x.len();
        let t: Vec<Complex64> = (0..self.xi.len())
            .map(|k| {
                let (s, eta) = self.xi.node(k);
                let a: Vec<f64> = (0..n).map(|i| s[i] - x[i]).collect();
                let b: Vec<f64> = (0..n).map(|i| eta[i] - xi[i]).collect();
                self.f.eval(&a, &b) * self.q[k]
            })
            .collect();
        pairwise_sum(&t) * self.xi.g.vol() * self.xi.dual.vol() * dual_factor::<f64>(n)
    }
}

/// `∥a∥_{L²(Ξ)}` by quadrature.
pub fn symbol_l2_norm(a: &Symbol, xi: &XiGrid) -> Result<f64> {
    xi.norm(&a.sample(xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::{weyl, PhasePoint};

    #[test]
    fn x_only_symbols_are_multipliers() {
        let alg = LieAlgebra::abelian(1).unwrap();
        let g = Grid::cube(1, 2.0, 8).unwrap();
        let phi = Field::gaussian(Domain::Group, vec![0.3], 1.0);
        let op = op_quantize(&alg, &Symbol::group_only(phi.clone()), &g).unwrap();
        let m = OperatorMatrix::multiplication(&g, &phi.sample(&g).unwrap()).unwrap();
        assert_eq!(op, m);
    }

    #[test]
    fn plane_wave_is_the_weyl_operator() {
        let alg = LieAlgebra::heisenberg(1).unwrap();
        let p = PhasePoint::new(vec![0.4, -0.3, 0.2], vec![0.7, 0.1, -0.5]);
        let u = Field::gaussian(Domain::Group, vec![0.1, 0.2, 0.0], 0.9);
        let a = op_apply(&alg, &Symbol::plane_wave(&p), &u).unwrap();
        let b = weyl(&alg, &p, &u).unwrap();
        for x in [[0.3, 0.1, -0.4], [1.0, -1.0, 0.5]] {
            assert!((a.eval(&x) - b.eval(&x)).norm() < 1e-14);
        }
        assert!(op_quantize(&alg, &Symbol::plane_wave(&p), &Grid::cube(3, 1.0, 2).unwrap()).is_err());
    }

    #[test]
    fn closed_form_kernel_matches_quadrature() {
        let alg = LieAlgebra::heisenberg(1).unwrap();
        let a = Symbol::gaussian(1.0, vec![0.0; 3], 1.0, vec![0.2, 0.0, -0.1], 1.0);
        let g = Grid::cube(3, 1.5, 3).unwrap();
        let dual = Grid::cube(3, 7.0, 40).unwrap();
        let k1 = op_quantize(&alg, &a, &g).unwrap();
        let k2 = op_quantize_quadrature(&alg, &a, &g, &dual).unwrap();
        assert!(k1.relative_distance(&k2).unwrap() < 1e-8);
    }

    #[test]
    fn rank_one_symbol_matches_closed_form() {
        // K = ω ⊗ conj ω with real even ω: a(x, ξ) = ω(x) e^{-ixξ} ω̂(ξ).
        let alg = LieAlgebra::abelian(1).unwrap();
        let y = Grid::cube(1, 10.0, 256).unwrap();
        let w = Window::standard(&y).unwrap();
        let w2 = w.clone();
        let k = FnKernel::new(1, move |x: &[f64], yy: &[f64]| w2.eval(x) * w2.eval(yy).conj());
        let c = std::f64::consts::PI.powf(-0.25);
        for (x, xi) in [(0.3, 0.0), (-0.5, 1.2), (1.0, -0.7)] {
            let exact = c
                * (-x * x / 2.0f64).exp()
                * Complex64::from_polar(1.0, -x * xi)
                * c
                * (2.0 * std::f64::consts::PI).sqrt()
                * (-xi * xi / 2.0f64).exp();
            let got = symbol_from_kernel_at(&alg, &k, &[x], &[xi], &y);
            assert!((got - exact).norm() < 1e-8, "{got} {exact}");
        }
    }
}
