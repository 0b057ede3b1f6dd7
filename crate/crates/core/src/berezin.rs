//! Berezin–Toeplitz operators `Ber_ω(f) = ∫∫ f(z,ζ) Ω_{z,ζ} dz đζ`.
//!
//! The kernel is assembled with the `ζ`-integral done in closed form:
//!
//! `κ(x,y) = ∫ A(z,x) conj A(z,y) Σ_t c_t g_t(z) ȟ_t(P(z,y) - P(z,x)) dz`
//!
//! where `A(z,x) = φ(z,x) ω(zx)` and `P`, `φ` come from the coherent family
//! (see [`crate::coherent::Twist`]). Terms whose `ȟ_t` is the point mass
//! `δ(V)` collapse onto the diagonal, point-mass symbols `δ_𝒳` contribute
//! the projector `Ω_𝒳`, and purely sampled symbols fall back to a sum of
//! rank-one projectors over the `Ξ` nodes.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coherent::{twisted_coherent_state, twisted_wigner_values, PhasePoint, Twist, Window};
use crate::error::{check_dim, Error, Result};
use crate::lie::LieAlgebra;
use crate::numerics::{Domain, Field, Grid, OperatorMatrix, XiGrid};
use crate::scalar::{dot, dual_factor, pairwise_sum};
use crate::symbol::{DualFactor, Symbol};

/// Default ceiling on `N_z · N_x²` pair evaluations for one assembly.
pub const DEFAULT_MAX_WORK: f64 = 5e9;

/// Window values below this are treated as outside the support.
const SUPPORT_CUTOFF: f64 = 1e-13;
/// Gaussian exponents above this are skipped (`e^{-40} ≈ 4e-18`).
const EXPONENT_CUTOFF: f64 = 40.0;

#[derive(Clone, Debug)]
pub struct BerezinConfig {
    pub alg: LieAlgebra<f64>,
    pub window: Window,
    /// Grid carrying the operator kernel.
    pub grid: Grid,
    /// Phase-space quadrature; `xi.g` is the `z`-grid of the assembly.
    pub xi: XiGrid,
    pub symbol: Symbol,
    pub max_work: f64,
}

impl BerezinConfig {
    pub fn new(alg: LieAlgebra<f64>, window: Window, grid: Grid, xi: XiGrid, symbol: Symbol) -> Result<Self> {
        check_dim(alg.dim(), grid.dim())?;
        check_dim(alg.dim(), xi.dim())?;
        check_dim(alg.dim(), symbol.dim())?;
        check_dim(alg.dim(), window.field().dim())?;
        symbol.validate()?;
        Ok(Self {
            alg,
            window,
            grid,
            xi,
            symbol,
            max_work: DEFAULT_MAX_WORK,
        })
    }

    pub fn with_symbol(&self, symbol: Symbol) -> Result<Self> {
        check_dim(self.alg.dim(), symbol.dim())?;
        symbol.validate()?;
        Ok(Self { symbol, ..self.clone() })
    }
}

/// Closed-form `ȟ(V) = amp · e^{-Σ s²(V-b)²/2} · e^{i⟨V-b|c⟩}`.
struct GaussTerm {
    b: Vec<f64>,
    c: Vec<f64>,
    half_s2: Vec<f64>,
    amp: f64,
    oscillates: bool,
}

impl GaussTerm {
    fn from(h: &DualFactor) -> Option<Self> {
        match h {
            DualFactor::Gaussian { b, center, width } => Some(Self {
                b: b.clone(),
                c: center.clone(),
                half_s2: width.iter().map(|s| s * s / 2.0).collect(),
                amp: width.iter().map(|s| s / (2.0 * std::f64::consts::PI).sqrt()).product(),
                oscillates: center.iter().any(|v| *v != 0.0),
            }),
            _ => None,
        }
    }

    #[inline]
    fn eval(&self, d: &[f64]) -> Option<Complex64> {
        let mut q = 0.0;
        for k in 0..d.len() {
            let e = d[k] - self.b[k];
            q += self.half_s2[k] * e * e;
        }
        if q > EXPONENT_CUTOFF {
            return None;
        }
        let m = self.amp * (-q).exp();
        if self.oscillates {
            let th: f64 = (0..d.len()).map(|k| (d[k] - self.b[k]) * self.c[k]).sum();
            Some(Complex64::from_polar(m, th))
        } else {
            Some(Complex64::new(m, 0.0))
        }
    }
}

/// Kernel of the Berezin operator of `cfg` for the family `twist`.
///
/// With `points = Some(p)` the kernel is evaluated at `(p_i, p_j)` instead of
/// the grid nodes; `p_i` must be the image of node `i` under a
/// measure-preserving map (a translation), so point-mass terms stay on the
/// diagonal.
pub(crate) fn assemble(cfg: &BerezinConfig, twist: &Twist, points: Option<&[Vec<f64>]>) -> Result<OperatorMatrix> {
    let alg = &cfg.alg;
    let n = alg.dim();
    let grid = &cfg.grid;
    let np = grid.len();
    let pts: Vec<Vec<f64>> = match points {
        Some(p) => {
            check_dim(np, p.len())?;
            p.to_vec()
        }
        None => (0..np).map(|k| grid.node(k).to_vec()).collect(),
    };
    let twist = twist.normalized();
    let sym = &cfg.symbol;

    let mut smooth = Vec::new();
    let mut diagonal = Vec::new();
    for t in sym.terms() {
        match t.dual.point_mass(n) {
            None => smooth.push((t, GaussTerm::from(&t.dual).expect("smooth factors are Gaussian"))),
            Some(b) if b.iter().all(|v| *v == 0.0) => diagonal.push(t),
            Some(_) => {
                return Err(Error::Unsupported(
                    "symbols with a plane-wave factor e^{-i⟨b|ξ⟩}, b ≠ 0, have no Berezin kernel on a grid".into(),
                ))
            }
        }
    }

    let zg = &cfg.xi.g;
    let nz = zg.len();
    let wz = zg.vol();
    let work = nz as f64 * (np as f64).powi(2) * smooth.len() as f64;
    if work > cfg.max_work {
        return Err(Error::CostGuard {
            what: "Berezin kernel assembly (z-nodes × kernel nodes²)".into(),
            required: work,
            limit: cfg.max_work,
        });
    }

    // Per-z tables: P(z, x) and A(z, x) for every kernel point.
    let tables: Vec<(Vec<f64>, Vec<Complex64>)> = (0..nz)
        .into_par_iter()
        .map(|iz| {
            let z = zg.node(iz);
            let mut p = Vec::with_capacity(np * n);
            let mut a = Vec::with_capacity(np);
            for x in &pts {
                p.extend(twist.push(alg, z, x));
                a.push(twist.phase(alg, z, x) * cfg.window.eval(&alg.bch_raw(z, x)));
            }
            (p, a)
        })
        .collect();
    let support: Vec<Vec<usize>> = tables
        .iter()
        .map(|(_, a)| (0..np).filter(|&k| a[k].norm() > SUPPORT_CUTOFF).collect())
        .collect();
    // Weighted group factors w_z c_t g_t(z).
    let gz: Vec<Vec<Complex64>> = (0..nz)
        .map(|iz| {
            let z = zg.node(iz);
            smooth.iter().map(|(t, _)| t.coeff * t.group.eval(z) * wz).collect()
        })
        .collect();
    let gmax = gz.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let active: Vec<usize> = (0..nz).filter(|&iz| gz[iz].iter().any(|v| v.norm() > 1e-17 * gmax)).collect();

    let mut k = DMatrix::<Complex64>::zeros(np, np);
    if !smooth.is_empty() {
        let rows: Vec<Vec<Complex64>> = (0..np)
            .into_par_iter()
            .map(|ix| {
                let mut row = vec![Complex64::new(0.0, 0.0); np];
                let mut d = vec![0.0; n];
                for &iz in &active {
                    let (p, a) = &tables[iz];
                    let ax = a[ix];
                    if ax.norm() <= SUPPORT_CUTOFF {
                        continue;
                    }
                    let px = &p[ix * n..(ix + 1) * n];
                    for &iy in &support[iz] {
                        let py = &p[iy * n..(iy + 1) * n];
                        for j in 0..n {
                            d[j] = py[j] - px[j];
                        }
                        let mut s = Complex64::new(0.0, 0.0);
                        for (t, (_, g)) in smooth.iter().enumerate() {
                            if let Some(h) = g.eval(&d) {
                                s += gz[iz][t] * h;
                            }
                        }
                        row[iy] += ax * a[iy].conj() * s;
                    }
                }
                row
            })
            .collect();
        for (i, r) in rows.into_iter().enumerate() {
            for (j, v) in r.into_iter().enumerate() {
                k[(i, j)] = v;
            }
        }
    }

    if !diagonal.is_empty() {
        let vol = grid.vol();
        for ix in 0..np {
            let mut m = Complex64::new(0.0, 0.0);
            for (iz, (_, a)) in tables.iter().enumerate() {
                let z = zg.node(iz);
                let g: Complex64 = diagonal.iter().map(|t| t.coeff * t.group.eval(z)).sum();
                m += g * a[ix].norm_sqr() * wz;
            }
            k[(ix, ix)] += m / vol;
        }
    }

    for (c, p) in sym.deltas() {
        let v = twisted_coherent_state(alg, &twist, &cfg.window, p)?;
        let vals: Vec<Complex64> = pts.iter().map(|x| v.eval(x)).collect();
        for i in 0..np {
            for j in 0..np {
                k[(i, j)] += c * vals[i] * vals[j].conj();
            }
        }
    }

    if let Some(f) = sym.sampled_part() {
        let nxi = cfg.xi.len();
        let work = nxi as f64 * (np as f64).powi(2);
        if work > cfg.max_work {
            return Err(Error::CostGuard {
                what: "sampled-symbol Berezin assembly (Ξ nodes × kernel nodes²)".into(),
                required: work,
                limit: cfg.max_work,
            });
        }
        let w = cfg.xi.weight();
        let vecs: Vec<(Complex64, Vec<Complex64>)> = (0..nxi)
            .into_par_iter()
            .filter_map(|kk| {
                let (z, zeta) = cfg.xi.node(kk);
                let mut q = z.to_vec();
                q.extend_from_slice(zeta);
                let fv = f.eval(&q) * w;
                if fv.norm() == 0.0 {
                    return None;
                }
                let p = PhasePoint::new(z.to_vec(), zeta.to_vec());
                let v = twisted_coherent_state(alg, &twist, &cfg.window, &p).ok()?;
                Some((fv, pts.iter().map(|x| v.eval(x)).collect()))
            })
            .collect();
        let rows: Vec<Vec<Complex64>> = (0..np)
            .into_par_iter()
            .map(|i| {
                (0..np)
                    .map(|j| vecs.iter().map(|(fv, v)| fv * v[i] * v[j].conj()).sum())
                    .collect()
            })
            .collect();
        for (i, r) in rows.into_iter().enumerate() {
            for (j, v) in r.into_iter().enumerate() {
                k[(i, j)] += v;
            }
        }
    }

    OperatorMatrix::new(grid.clone(), k)
}

/// Kernel of `Ber_ω(f)` on `cfg.grid`.
pub fn berezin_matrix(cfg: &BerezinConfig) -> Result<OperatorMatrix> {
    assemble(cfg, &Twist::None, None)
}

/// Kernel of the family operator for an arbitrary [`Twist`].
pub fn twisted_berezin_matrix(cfg: &BerezinConfig, twist: &Twist) -> Result<OperatorMatrix> {
    assemble(cfg, twist, None)
}

/// `⟨Ber_ω(f)u, v⟩ = ∫_Ξ f 𝒲_{u,ω} conj 𝒲_{v,ω}` by `Ξ`-quadrature, with
/// the Fourier–Wigner transforms integrated over `y_grid`.
pub fn berezin_weak(cfg: &BerezinConfig, u: &Field, v: &Field, y_grid: &Grid) -> Result<Complex64> {
    twisted_berezin_weak(cfg, &Twist::None, u, v, y_grid)
}

pub fn twisted_berezin_weak(cfg: &BerezinConfig, twist: &Twist, u: &Field, v: &Field, y_grid: &Grid) -> Result<Complex64> {
    let alg = &cfg.alg;
    let om = cfg.window.field();
    let wu = twisted_wigner_values(alg, twist, u, om, &cfg.xi, y_grid)?;
    let wv = twisted_wigner_values(alg, twist, v, om, &cfg.xi, y_grid)?;
    let f = cfg.symbol.sample(&cfg.xi);
    let terms: Vec<Complex64> = (0..f.len()).map(|k| f[k] * wu[k] * wv[k].conj()).collect();
    let mut total = pairwise_sum(&terms) * cfg.xi.weight();
    for (c, p) in cfg.symbol.deltas() {
        let s = twisted_coherent_state(alg, twist, &cfg.window, p)?;
        total += c * u.inner(&s, y_grid)? * s.inner(v, y_grid)?;
    }
    Ok(total)
}

/// Multiplier of `Ber_ω(φ ⊗ 1)`: `x ↦ ∫ φ(z) |ω(zx)|² dz`, by quadrature over
/// `z_grid`.
pub fn berezin_mult_example(alg: &LieAlgebra<f64>, w: &Window, phi: &Field, z_grid: &Grid) -> Result<Field> {
    check_dim(alg.dim(), z_grid.dim())?;
    phi.expect_domain(Domain::Group)?;
    let zs: Vec<(Vec<f64>, Complex64)> = (0..z_grid.len())
        .map(|k| (z_grid.node(k).to_vec(), phi.eval(z_grid.node(k)) * z_grid.vol()))
        .filter(|(_, v)| v.norm() > 0.0)
        .collect();
    let (a, w) = (alg.clone(), w.clone());
    Ok(Field::analytic(Domain::Group, alg.dim(), move |x| {
        let terms: Vec<Complex64> = zs.iter().map(|(z, p)| p * w.eval(&a.bch_raw(z, x)).norm_sqr()).collect();
        pairwise_sum(&terms)
    }))
}

/// Kernel of `Ber_ω(1 ⊗ ψ)`: `∫ ψ̃(zx - zy) ω(zx) conj ω(zy) dz` with
/// `ψ̃(W) = ∫ e^{-i⟨W|ξ⟩} ψ(ξ) đξ` done by quadrature over `dual_grid`.
pub fn berezin_conv_example(
    alg: &LieAlgebra<f64>,
    w: &Window,
    psi: &Field,
    z_grid: &Grid,
    dual_grid: &Grid,
    grid: &Grid,
) -> Result<OperatorMatrix> {
    psi.expect_domain(Domain::Dual)?;
    check_dim(alg.dim(), psi.dim())?;
    check_dim(alg.dim(), grid.dim())?;
    let n = alg.dim();
    let wd = dual_grid.vol() * dual_factor::<f64>(n);
    let psi_vals = psi.sample(dual_grid)?;
    let tilde = |d: &[f64]| -> Complex64 {
        let t: Vec<Complex64> = (0..dual_grid.len())
            .map(|k| psi_vals[k] * Complex64::from_polar(1.0, -dot(d, dual_grid.node(k))))
            .collect();
        pairwise_sum(&t) * wd
    };
    let np = grid.len();
    let nz = z_grid.len();
    let corr = |x: &[f64], y: &[f64]| -> Complex64 {
        let t: Vec<Complex64> = (0..nz)
            .map(|k| {
                let z = z_grid.node(k);
                w.eval(&alg.bch_raw(z, x)) * w.eval(&alg.bch_raw(z, y)).conj()
            })
            .collect();
        pairwise_sum(&t) * z_grid.vol()
    };
    if alg.is_abelian() {
        // zx - zy = x - y: one transform per pair.
        return Ok(OperatorMatrix::from_fn(grid, |x, y| {
            let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            tilde(&diff) * corr(x, y)
        }));
    }
    let work = nz as f64 * (np as f64).powi(2) * dual_grid.len() as f64;
    if work > DEFAULT_MAX_WORK {
        return Err(Error::CostGuard {
            what: "convolution example on a non-commutative group".into(),
            required: work,
            limit: DEFAULT_MAX_WORK,
        });
    }
    Ok(OperatorMatrix::from_fn(grid, |x, y| {
        let t: Vec<Complex64> = (0..nz)
            .map(|k| {
                let z = z_grid.node(k);
                let zx = alg.bch_raw(z, x);
                let zy = alg.bch_raw(z, y);
                let d: Vec<f64> = zx.iter().zip(&zy).map(|(a, b)| a - b).collect();
                tilde(&d) * w.eval(&zx) * w.eval(&zy).conj()
            })
            .collect();
        pairwise_sum(&t) * z_grid.vol()
    }))
}

/// Relative Frobenius residual of `L_z* Ber_ω(f) L_z = Ber_ω(f(·z⁻¹, ·))`.
///
/// The left side is the kernel evaluated at `(zx_i, zx_j)`; the right side
/// is an independent assembly with the translated symbol.
pub fn covariance_check_l(cfg: &BerezinConfig, z: &[f64]) -> Result<f64> {
    let alg = &cfg.alg;
    check_dim(alg.dim(), z.len())?;
    let pts: Vec<Vec<f64>> = (0..cfg.grid.len()).map(|k| alg.bch_raw(z, cfg.grid.node(k))).collect();
    let lhs = assemble(cfg, &Twist::None, Some(&pts))?;
    let rhs = berezin_matrix(&cfg.with_symbol(cfg.symbol.translate_group(alg, z)?)?)?;
    lhs.relative_distance(&rhs)
}

/// `t_ω(f)(𝒳,𝒴) = ∫ f(𝒵) ⟨ω_𝒳,ω_𝒵⟩⟨ω_𝒵,ω_𝒴⟩ d𝒵`.
pub fn toeplitz_kernel(cfg: &BerezinConfig, p: &PhasePoint, q: &PhasePoint, y_grid: &Grid) -> Result<Complex64> {
    let alg = &cfg.alg;
    let wp = twisted_coherent_state(alg, &Twist::None, &cfg.window, p)?;
    let wq = twisted_coherent_state(alg, &Twist::None, &cfg.window, q)?;
    berezin_weak(cfg, &wp, &wq, y_grid)
}

#[derive(Clone, Debug, Serialize)]
pub struct SchattenReport {
    pub s: f64,
    /// `∥Ber_ω(f)∥_{B^s}`.
    pub operator_norm: f64,
    /// `∥f∥_{L^s(Ξ)}`.
    pub symbol_norm: f64,
    pub ratio: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `L^s(Ξ)` quadrature norm of the smooth part of a symbol.
pub fn symbol_lp_norm(sym: &Symbol, xi: &XiGrid, s: f64) -> Result<f64> {
    if s < 1.0 {
        return Err(Error::InvalidArgument(format!("exponent {s} < 1")));
    }
    let v = sym.sample(xi);
    if s.is_infinite() {
        return Ok(v.iter().map(|c| c.norm()).fold(0.0, f64::max));
    }
    let sum: f64 = v.iter().map(|c| c.norm().powf(s)).sum::<f64>() * xi.weight();
    Ok(sum.powf(1.0 / s))
}

/// Compares `∥Ber_ω(f)∥_{B^s}` with `4^{1/s} ∥f∥_{L^s}`, allowing a relative
/// quadrature slack `tol`.
pub fn schatten_bound_check(cfg: &BerezinConfig, s: f64, tol: f64) -> Result<SchattenReport> {
    let op = berezin_matrix(cfg)?;
    schatten_bound_from(&op, &cfg.symbol, &cfg.xi, s, tol)
}

pub fn schatten_bound_from(op: &OperatorMatrix, sym: &Symbol, xi: &XiGrid, s: f64, tol: f64) -> Result<SchattenReport> {
    let operator_norm = op.schatten_norm(s)?;
    let symbol_norm = symbol_lp_norm(sym, xi, s)?;
    let bound = if s.is_infinite() { 1.0 } else { 4f64.powf(1.0 / s) };
    let ratio = if symbol_norm > 0.0 { operator_norm / symbol_norm } else { 0.0 };
    Ok(SchattenReport {
        s,
        operator_norm,
        symbol_norm,
        ratio,
        bound,
        pass: ratio <= bound * (1.0 + tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abelian_cfg(symbol: Symbol) -> BerezinConfig {
        let alg = LieAlgebra::abelian(1).unwrap();
        let grid = Grid::cube(1, 8.0, 64).unwrap();
        let xi = XiGrid::cube(1, 8.0, 64, 8.0, 64).unwrap();
        let w = Window::standard(&grid).unwrap();
        BerezinConfig::new(alg, w, grid, xi, symbol).unwrap()
    }

    #[test]
    fn identity_symbol_gives_identity() {
        let cfg = abelian_cfg(Symbol::one(1));
        let b = berezin_matrix(&cfg).unwrap();
        let u = Field::gaussian(Domain::Group, vec![0.5], 1.2);
        let uv = u.sample(&cfg.grid).unwrap();
        let bu = b.apply(&uv).unwrap();
        let err: f64 = uv.iter().zip(&bu).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn delta_symbol_is_the_projector() {
        let p = PhasePoint::new(vec![0.4], vec![-0.7]);
        let cfg = abelian_cfg(Symbol::delta(p.clone()));
        let b = berezin_matrix(&cfg).unwrap();
        let proj = crate::coherent::projector(&cfg.alg, &cfg.window, &p, &cfg.grid).unwrap();
        assert_eq!(b.kernel(), proj.kernel());
    }

    #[test]
    fn gaussian_symbol_is_hermitian_with_correct_trace() {
        let f = Symbol::gaussian(1.0, vec![0.3], 1.0, vec![-0.2], 1.1);
        let cfg = abelian_cfg(f);
        let b = berezin_matrix(&cfg).unwrap();
        assert!(b.hermiticity_residual() < 1e-12);
        // ∫ f dΞ = (2π)^{-1} · √(2π)·1.0 · √(2π)·1.1
        let tr = b.trace();
        assert!((tr.re - 1.1).abs() < 1e-8 && tr.im.abs() < 1e-12, "{tr}");
    }

    #[test]
    fn plane_waves_are_rejected() {
        let cfg = abelian_cfg(Symbol::plane_wave(&PhasePoint::new(vec![1.0], vec![0.0])));
        assert!(matches!(berezin_matrix(&cfg), Err(Error::Unsupported(_))));
    }

    #[test]
    fn cost_guard_trips() {
        let mut cfg = abelian_cfg(Symbol::gaussian(1.0, vec![0.0], 1.0, vec![0.0], 1.0));
        cfg.max_work = 10.0;
        assert!(matches!(berezin_matrix(&cfg), Err(Error::CostGuard { .. })));
    }

    #[test]
    fn sampled_path_matches_closed_form() {
        let alg = LieAlgebra::abelian(1).unwrap();
        let grid = Grid::cube(1, 6.0, 24).unwrap();
        let xi = XiGrid::cube(1, 6.0, 24, 8.0, 32).unwrap();
        let w = Window::standard(&grid).unwrap();
        let f = Symbol::gaussian(1.0, vec![0.0], 1.0, vec![0.5], 1.0);
        let cfg = BerezinConfig::new(alg, w, grid, xi, f.clone()).unwrap();
        let a = berezin_matrix(&cfg).unwrap();
        let b = berezin_matrix(&cfg.with_symbol(Symbol::sampled(f.as_field()).unwrap()).unwrap()).unwrap();
        let d = a.relative_distance(&b).unwrap();
        assert!(d < 1e-4, "{d}");
    }
}
