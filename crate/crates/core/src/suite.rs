//! Registry of verification suites.
//!
//! Each suite runs a family of identity checks on fixed desk-scale grids
//! and returns one [`CheckResult`] per check. Random inputs come from a
//! ChaCha stream seeded by the caller, so reports are reproducible.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::berezin::{
    berezin_conv_example, berezin_matrix, berezin_mult_example, berezin_weak, covariance_check_l, schatten_bound_check,
    BerezinConfig,
};
use crate::ccr::{trans_l, verify_ccr, CcrContext};
use crate::coherent::{
    bargmann, coherent_state, fourier_wigner_values, twisted_bargmann_adjoint, twisted_wigner_values,
    weyl, weyl_adjoint, weyl_compose_factor, PhasePoint, Twist, Window,
};
use crate::covariant::{
    berezin_transform_grid, c0_decay_check, kernel_from_cov, norm_bound_check, overlap_matrix, square_adjoint,
    square_compose, CovSymbol,
};
use crate::error::{Error, Result};
use crate::lie::{validate_algebra, LieAlgebra};
use crate::magnetic::{cocycle_flux, mag_berezin, mag_coherent, mag_translation, gauge_check, Gauge, VectorPotential};
use crate::numerics::{Domain, Field, Grid, OperatorMatrix, XiGrid};
use crate::pseudodiff::{berezin_symbol, berezin_symbol_direct, op_apply, op_quantize, ConvolutionSymbol};
use crate::report::{CheckResult, VerificationReport};
use crate::scalar::dot;
use crate::symbol::{DualFactor, Symbol};
use crate::tau::{
    berezin_tau, coherent_tau, covariance_check_m, op_quantize_tau, symmetric_tau, tau_e_vs_op, tau_tilde, weyl_tau,
    TauMap,
};

pub const DEFAULT_SEED: u64 = 20240611;

/// Seed, global tolerance scale and per-check tolerance overrides.
#[derive(Clone, Debug)]
pub struct SuiteContext {
    pub seed: u64,
    pub tol_scale: f64,
    pub overrides: BTreeMap<String, f64>,
}

impl Default for SuiteContext {
    fn default() -> Self {
        Self::new(DEFAULT_SEED)
    }
}

impl SuiteContext {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            tol_scale: 1.0,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_tol_scale(mut self, s: f64) -> Self {
        self.tol_scale = s;
        self
    }

    /// An override wins over `base · tol_scale`.
    pub fn tolerance(&self, name: &str, base: f64) -> f64 {
        self.overrides.get(name).copied().unwrap_or(base * self.tol_scale)
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

type SuiteFn = fn(&SuiteContext) -> Vec<CheckResult>;

/// `(name, summary, runner)` in execution order.
pub const SUITES: &[(&str, &str, SuiteFn)] = &[
    ("lie", "BCH against matrix exponentials, associativity", suite_lie),
    ("ccr", "commutation relations of translations, modulations and derivatives", suite_ccr),
    ("weyl", "composition law of the Weyl system", suite_weyl),
    ("orthogonality", "orthogonality relations of the Fourier-Wigner transform", suite_orthogonality),
    ("inversion", "inversion and reproducing formulas", suite_inversion),
    ("berezin", "identity, trace, Hermiticity, positivity and Schatten bounds", suite_berezin),
    ("examples", "multiplier, convolution and point-mass examples", suite_examples),
    ("covariance", "translation and modulation covariance", suite_covariance),
    ("covariant", "covariant symbols, box composition and the Berezin transform", suite_covariant),
    ("pseudodiff", "pseudo-differential calculus and the Berezin symbol", suite_pseudodiff),
    ("tau", "tau-ordered quantization", suite_tau),
    ("magnetic", "magnetic translations, Stokes and gauge covariance", suite_magnetic),
    ("convergence", "residual decay under grid refinement", suite_convergence),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

/// Expands `all`, rejects unknown names and empty lists.
pub fn resolve_suites(names: &[String]) -> Result<Vec<&'static str>> {
    if names.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no suite given; choose from: all, {}",
            suite_names().join(", ")
        )));
    }
    let mut out: Vec<&'static str> = Vec::new();
    for n in names {
        if n == "all" {
            for s in suite_names() {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
            continue;
        }
        match SUITES.iter().find(|s| s.0 == n) {
            Some(s) if !out.contains(&s.0) => out.push(s.0),
            Some(_) => {}
            None => {
                return Err(Error::InvalidArgument(format!(
                    "unknown suite '{n}'; choose from: all, {}",
                    suite_names().join(", ")
                )))
            }
        }
    }
    Ok(out)
}

pub fn run_suite(names: &[String], ctx: &SuiteContext) -> Result<VerificationReport> {
    let list = resolve_suites(names)?;
    let t0 = Instant::now();
    let mut checks = Vec::new();
    for name in &list {
        let run = SUITES.iter().find(|s| s.0 == *name).expect("resolved").2;
        checks.extend(run(ctx));
    }
    Ok(VerificationReport::new(
        list.iter().map(|s| s.to_string()).collect(),
        ctx.seed,
        ctx.tol_scale,
        checks,
        t0.elapsed().as_secs_f64() * 1e3,
    ))
}

struct Checks<'a> {
    ctx: &'a SuiteContext,
    suite: &'static str,
    out: Vec<CheckResult>,
}

impl<'a> Checks<'a> {
    fn new(ctx: &'a SuiteContext, suite: &'static str) -> Self {
        Self {
            ctx,
            suite,
            out: Vec::new(),
        }
    }

    fn name(&self, check: &str) -> String {
        format!("{}.{}", self.suite, check)
    }

    fn at_most<F: FnOnce() -> Result<f64>>(&mut self, check: &str, tol: f64, f: F) {
        let name = self.name(check);
        let tol = self.ctx.tolerance(&name, tol);
        let t = Instant::now();
        let r = match f() {
            Ok(v) => CheckResult::at_most(name, v, tol),
            Err(e) => CheckResult::errored(name, e),
        };
        self.out.push(r.timed(t));
    }

    /// Bitwise comparisons; not affected by tolerance scaling.
    fn exact<F: FnOnce() -> Result<bool>>(&mut self, check: &str, f: F) {
        let name = self.name(check);
        let t = Instant::now();
        let r = match f() {
            Ok(v) => CheckResult::exact(name, v),
            Err(e) => CheckResult::errored(name, e),
        };
        self.out.push(r.timed(t));
    }

    fn finish(self) -> Vec<CheckResult> {
        self.out
    }
}

// ---------------------------------------------------------------------------
// shared setups

struct Desk {
    alg: LieAlgebra<f64>,
    grid: Grid,
    xi: XiGrid,
    window: Window,
}

impl Desk {
    fn new(alg: LieAlgebra<f64>, half_width: f64, count: usize) -> Result<Self> {
        let n = alg.dim();
        let grid = Grid::cube(n, half_width, count)?;
        let xi = XiGrid::cube(n, half_width, count, half_width, count)?;
        let window = Window::standard(&grid)?;
        Ok(Self { alg, grid, xi, window })
    }

    fn abelian() -> Result<Self> {
        Self::new(LieAlgebra::abelian(1)?, 10.0, 128)
    }

    fn heisenberg() -> Result<Self> {
        Self::new(LieAlgebra::heisenberg(1)?, 4.0, 9)
    }

    fn berezin(&self, symbol: Symbol) -> Result<BerezinConfig> {
        BerezinConfig::new(self.alg.clone(), self.window.clone(), self.grid.clone(), self.xi.clone(), symbol)
    }
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-r..r)).collect()
}

/// Seeded Gaussian wave packet `e^{-|x-c|²/2σ²} e^{i⟨x|k⟩}`.
fn packet(rng: &mut ChaCha8Rng, n: usize) -> Field {
    let c = uniform(rng, n, 0.5);
    let k = uniform(rng, n, 1.0);
    let s = rng.random_range(0.8..1.2);
    Field::gaussian(Domain::Group, c, s).map(move |x, v| v * Complex64::from_polar(1.0, dot(x, &k)))
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, r: f64) -> PhasePoint {
    PhasePoint::new(uniform(rng, n, r), uniform(rng, n, r))
}

fn relative_l2(grid: &Grid, got: &[Complex64], want: &[Complex64]) -> Result<f64> {
    let d: Vec<Complex64> = got.iter().zip(want).map(|(a, b)| a - b).collect();
    Ok(grid.norm(&d)? / grid.norm(want)?)
}

/// Relative Frobenius distance restricted to nodes with `max |x_i| ≤ r`.
/// Symbols constant along `G` are truncated by the box near its faces.
fn interior_distance(grid: &Grid, got: &OperatorMatrix, want: &OperatorMatrix, r: f64) -> f64 {
    let idx: Vec<usize> =
        (0..grid.len()).filter(|&k| grid.node(k).iter().all(|c| c.abs() <= r)).collect();
    let (a, b) = (got.kernel(), want.kernel());
    let (mut num, mut den) = (0.0, 0.0);
    for &i in &idx {
        for &j in &idx {
            num += (a[(i, j)] - b[(i, j)]).norm_sqr();
            den += b[(i, j)].norm_sqr();
        }
    }
    (num / den).sqrt()
}

/// `∫ f dΞ` of [`Symbol::gaussian`]: `A (σ_x σ_ξ)^n`.
fn gaussian_symbol_mass(amplitude: f64, sx: f64, sxi: f64, n: usize) -> f64 {
    amplitude * (sx * sxi).powi(n as i32)
}

// ---------------------------------------------------------------------------
// matrix-exponential oracle

/// Faithful matrix representation of a basis, checked against the structure
/// constants of `alg`.
struct MatrixRep {
    basis: Vec<DMatrix<f64>>,
}

fn unit(m: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(m, m);
    e[(i, j)] = 1.0;
    e
}

impl MatrixRep {
    /// `e1 = E01, e2 = E12, e3 = E02` in `3×3`.
    fn heisenberg() -> Self {
        Self {
            basis: vec![unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)],
        }
    }

    /// `e1 = E01 + E12 + E23, e2 = E23, e3 = E13, e4 = E03` in `4×4`.
    fn engel() -> Self {
        Self {
            basis: vec![unit(4, 0, 1) + unit(4, 1, 2) + unit(4, 2, 3), unit(4, 2, 3), unit(4, 1, 3), unit(4, 0, 3)],
        }
    }

    fn matrix(&self, x: &[f64]) -> DMatrix<f64> {
        let m = self.basis[0].nrows();
        x.iter().zip(&self.basis).fold(DMatrix::zeros(m, m), |acc, (c, b)| acc + b * *c)
    }

    /// `max |[ρ(e_i), ρ(e_j)] - Σ_k c_ij^k ρ(e_k)|`.
    fn homomorphism_defect(&self, alg: &LieAlgebra<f64>) -> f64 {
        let n = self.basis.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&self.basis[i], &self.basis[j]);
                let comm = a * b - b * a;
                let c: Vec<f64> = (0..n).map(|k| *alg.constant(i, j, k)).collect();
                worst = worst.max((comm - self.matrix(&c)).amax());
            }
        }
        worst
    }

    fn exp(&self, x: &[f64]) -> DMatrix<f64> {
        let a = self.matrix(x);
        let m = a.nrows();
        let mut term = DMatrix::identity(m, m);
        let mut sum = DMatrix::identity(m, m);
        for k in 1..m {
            term = &term * &a / k as f64;
            sum += &term;
        }
        sum
    }

    fn log(&self, u: &DMatrix<f64>) -> Vec<f64> {
        let m = u.nrows();
        let nmat = u - DMatrix::identity(m, m);
        let mut power = nmat.clone();
        let mut sum = DMatrix::zeros(m, m);
        for k in 1..m {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sum += &power * (sign / k as f64);
            power = &power * &nmat;
        }
        let n = self.basis.len();
        let a = DMatrix::from_fn(m * m, n, |r, c| self.basis[c][(r / m, r % m)]);
        let b = DMatrix::from_fn(m * m, 1, |r, _| sum[(r / m, r % m)]);
        let sol = a.svd(true, true).solve(&b, 1e-14).expect("full-rank basis");
        sol.column(0).iter().copied().collect()
    }

    fn bch(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.log(&(self.exp(x) * self.exp(y)))
    }
}

fn bch_oracle_residual(alg: &LieAlgebra<f64>, rep: &MatrixRep, rng: &mut ChaCha8Rng, pairs: usize) -> Result<f64> {
    let defect = rep.homomorphism_defect(alg);
    if defect > 0.0 {
        return Err(Error::InvalidArgument(format!("matrix representation is not a homomorphism ({defect:e})")));
    }
    let n = alg.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let (x, y) = (uniform(rng, n, 1.5), uniform(rng, n, 1.5));
        let got = alg.bch(&x, &y)?;
        let want = rep.bch(&x, &y);
        worst = worst.max(got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    Ok(worst)
}

fn associativity_residual(alg: &LieAlgebra<f64>, rng: &mut ChaCha8Rng, triples: usize) -> Result<f64> {
    let n = alg.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..triples {
        let (x, y, z) = (uniform(rng, n, 1.5), uniform(rng, n, 1.5), uniform(rng, n, 1.5));
        let l = alg.mul(&alg.mul(&x, &y)?, &z)?;
        let r = alg.mul(&x, &alg.mul(&y, &z)?)?;
        worst = worst.max(l.iter().zip(&r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    Ok(worst)
}

fn suite_lie(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "lie");
    let mut rng = ctx.rng(1);
    let h1 = LieAlgebra::<f64>::heisenberg(1).expect("preset");
    let engel = LieAlgebra::<f64>::engel();
    c.at_most("bch_heisenberg_matrix_exp", 1e-10, || {
        bch_oracle_residual(&h1, &MatrixRep::heisenberg(), &mut rng, 100)
    });
    c.at_most("bch_engel_matrix_exp", 1e-10, || bch_oracle_residual(&engel, &MatrixRep::engel(), &mut rng, 100));
    c.at_most("associativity_heisenberg", 1e-10, || associativity_residual(&h1, &mut rng, 100));
    c.at_most("associativity_engel", 1e-10, || associativity_residual(&engel, &mut rng, 100));
    let step6 = LieAlgebra::<f64>::upper_triangular(7).expect("preset");
    c.at_most("associativity_triangular7", 1e-10, || associativity_residual(&step6, &mut rng, 20));
    c.exact("presets_validate", || {
        Ok(["abelian:2", "heisenberg:1", "heisenberg:2", "engel", "triangular:4"]
            .iter()
            .all(|p| LieAlgebra::<f64>::preset(p).map(|a| validate_algebra(&a).passed()).unwrap_or(false)))
    });
    c.finish()
}

// ---------------------------------------------------------------------------

fn suite_ccr(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "ccr");
    let report = Grid::cube(3, 4.0, 9)
        .and_then(|g| CcrContext::new(LieAlgebra::heisenberg(1)?, g))
        .and_then(|cx| verify_ccr(&cx, 20, ctx.seed, 1e-4));
    let r = match report {
        Ok(r) => r,
        Err(e) => {
            c.at_most("report", 0.0, || Err(e));
            return c.finish();
        }
    };
    c.at_most("modulation_group", 1e-10, || Ok(r.modulation_group));
    c.at_most("left_group", 1e-10, || Ok(r.left_group));
    c.at_most("right_group", 1e-10, || Ok(r.right_group));
    c.at_most("mixed_phase", 1e-10, || Ok(r.mixed));
    c.at_most("left_right_commute", 1e-10, || Ok(r.left_right_commute));
    c.at_most("left_bracket_fd", 1e-5, || Ok(r.left_bracket));
    c.at_most("right_bracket_fd", 1e-5, || Ok(r.right_bracket));
    c.at_most("dlambda_left_closed_form", 1e-6, || Ok(r.generator_lambda));
    c.finish()
}

// ---------------------------------------------------------------------------

fn composition_residual(alg: &LieAlgebra<f64>, rng: &mut ChaCha8Rng, triples: usize, swap: bool) -> Result<f64> {
    let n = alg.dim();
    let u = packet(rng, n);
    let mut worst: f64 = 0.0;
    for _ in 0..triples {
        let (mut p, mut q) = (random_point(rng, n, 1.0), random_point(rng, n, 1.0));
        if swap {
            std::mem::swap(&mut p, &mut q);
        }
        let x = uniform(rng, n, 1.5);
        let lhs = weyl(alg, &p, &weyl(alg, &q, &u)?)?.eval(&x);
        let pq = PhasePoint::new(
            alg.bch(&p.z, &q.z)?,
            p.zeta.iter().zip(&q.zeta).map(|(a, b)| a + b).collect(),
        );
        let rhs = weyl_compose_factor(alg, &p, &q, &x)? * weyl(alg, &pq, &u)?.eval(&x);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

fn suite_weyl(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "weyl");
    let mut rng = ctx.rng(3);
    let h1 = LieAlgebra::<f64>::heisenberg(1).expect("preset");
    c.at_most("composition_pq", 1e-12, || composition_residual(&h1, &mut rng, 20, false));
    c.at_most("composition_qp", 1e-12, || composition_residual(&h1, &mut rng, 20, true));
    c.at_most("adjoint_inverts", 1e-12, || {
        let u = packet(&mut rng, 3);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let p = random_point(&mut rng, 3, 1.0);
            let x = uniform(&mut rng, 3, 1.5);
            let back = weyl_adjoint(&h1, &p, &weyl(&h1, &p, &u)?)?.eval(&x);
            worst = worst.max((back - u.eval(&x)).norm());
        }
        Ok(worst)
    });
    c.finish()
}

// ---------------------------------------------------------------------------

/// `|⟨𝒲_{u,v}, 𝒲_{u',v'}⟩_Ξ - ⟨u,u'⟩⟨v',v⟩| / (∥u∥∥u'∥∥v∥∥v'∥)`, worst over
/// `quads` seeded quadruples.
fn orthogonality_residual(desk: &Desk, rng: &mut ChaCha8Rng, quads: usize) -> Result<f64> {
    let n = desk.alg.dim();
    let fine = desk.grid.refined(3)?;
    let mut worst: f64 = 0.0;
    for _ in 0..quads {
        let (u, v, u2, v2) = (packet(rng, n), packet(rng, n), packet(rng, n), packet(rng, n));
        let a = fourier_wigner_values(&desk.alg, &u, &v, &desk.xi, &desk.grid)?;
        let b = fourier_wigner_values(&desk.alg, &u2, &v2, &desk.xi, &desk.grid)?;
        let lhs = desk.xi.inner(&a, &b)?;
        let rhs = u.inner(&u2, &fine)? * v2.inner(&v, &fine)?;
        let scale = u.l2_norm(&fine)? * u2.l2_norm(&fine)? * v.l2_norm(&fine)? * v2.l2_norm(&fine)?;
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    Ok(worst)
}

fn wigner_bound_ratio(desk: &Desk, rng: &mut ChaCha8Rng) -> Result<f64> {
    let n = desk.alg.dim();
    let (u, v) = (packet(rng, n), packet(rng, n));
    let w = fourier_wigner_values(&desk.alg, &u, &v, &desk.xi, &desk.grid)?;
    let bound = u.l2_norm(&desk.grid)? * v.l2_norm(&desk.grid)?;
    Ok(w.iter().map(|c| c.norm()).fold(0.0, f64::max) / bound)
}

fn suite_orthogonality(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "orthogonality");
    let mut rng = ctx.rng(4);
    match Desk::abelian() {
        Ok(d) => {
            c.at_most("abelian", 2e-2, || orthogonality_residual(&d, &mut rng, 3));
            c.at_most("wigner_bound_abelian", 1.0 + 1e-10, || wigner_bound_ratio(&d, &mut rng));
        }
        Err(e) => c.at_most("abelian", 0.0, || Err(e)),
    }
    match Desk::heisenberg() {
        Ok(d) => {
            c.at_most("heisenberg", 5e-2, || orthogonality_residual(&d, &mut rng, 2));
            c.at_most("wigner_bound_heisenberg", 1.0 + 1e-10, || wigner_bound_ratio(&d, &mut rng));
        }
        Err(e) => c.at_most("heisenberg", 0.0, || Err(e)),
    }
    c.finish()
}

// ---------------------------------------------------------------------------

/// `∥B†_T B_T u - u∥ / ∥u∥` for the coherent family `twist`.
fn inversion_residual(desk: &Desk, twist: &Twist, rng: &mut ChaCha8Rng) -> Result<f64> {
    let u = packet(rng, desk.alg.dim());
    let h = twisted_wigner_values(&desk.alg, twist, &u, desk.window.field(), &desk.xi, &desk.grid)?;
    let back = twisted_bargmann_adjoint(&desk.alg, twist, &desk.window, &h, &desk.xi, &desk.grid)?;
    let (_, got) = back.grid_values().expect("gridded");
    relative_l2(&desk.grid, got, &u.sample(&desk.grid)?)
}

fn isometry_defect(desk: &Desk, rng: &mut ChaCha8Rng) -> Result<f64> {
    let u = packet(rng, desk.alg.dim());
    let b = bargmann(&desk.alg, &desk.window, &u, &desk.xi, &desk.grid)?;
    let (_, vals) = b.grid_values().expect("gridded");
    Ok((desk.xi.norm(vals)? / u.l2_norm(&desk.grid)? - 1.0).abs())
}

/// `(B u)(𝒳) = ∫ (B u)(𝒵) ⟨ω_𝒵, ω_𝒳⟩ d𝒵` at a few seeded nodes.
fn reproducing_residual(desk: &Desk, rng: &mut ChaCha8Rng) -> Result<f64> {
    let alg = &desk.alg;
    let u = packet(rng, alg.dim());
    let bu = bargmann(alg, &desk.window, &u, &desk.xi, &desk.grid)?;
    let (_, bu) = bu.grid_values().expect("gridded");
    let scale = bu.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for _ in 0..4 {
        let p = random_point(rng, alg.dim(), 1.0);
        let wp = coherent_state(alg, &desk.window, &p)?;
        // ⟨W(𝒵) ω_𝒳, ω⟩ = ⟨ω_𝒳, ω_𝒵⟩
        let over = fourier_wigner_values(alg, &wp, desk.window.field(), &desk.xi, &desk.grid)?;
        let s: Complex64 = bu.iter().zip(&over).map(|(h, o)| h * o.conj()).sum::<Complex64>() * desk.xi.weight();
        let direct = u.inner(&wp, &desk.grid)?;
        worst = worst.max((s - direct).norm() / scale);
    }
    Ok(worst)
}

fn suite_inversion(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "inversion");
    let mut rng = ctx.rng(5);
    match Desk::abelian() {
        Ok(d) => {
            c.at_most("abelian", 5e-2, || inversion_residual(&d, &Twist::None, &mut rng));
            c.at_most("isometry_abelian", 2e-2, || isometry_defect(&d, &mut rng));
            c.at_most("reproducing_abelian", 5e-2, || reproducing_residual(&d, &mut rng));
        }
        Err(e) => c.at_most("abelian", 0.0, || Err(e)),
    }
    match Desk::heisenberg() {
        Ok(d) => {
            c.at_most("heisenberg", 5e-2, || inversion_residual(&d, &Twist::None, &mut rng));
            let sym = Twist::Tau(symmetric_tau(&d.alg));
            c.at_most("tau_symmetric_heisenberg", 5e-2, || inversion_residual(&d, &sym, &mut rng));
            c.at_most("isometry_heisenberg", 5e-2, || isometry_defect(&d, &mut rng));
        }
        Err(e) => c.at_most("heisenberg", 0.0, || Err(e)),
    }
    c.finish()
}

// ---------------------------------------------------------------------------

fn berezin_desk() -> Result<Desk> {
    Desk::new(LieAlgebra::abelian(1)?, 8.0, 64)
}

/// Worst `∥Ber(1)u - u∥/∥u∥` over `k` seeded packets.
fn identity_residual(desk: &Desk, rng: &mut ChaCha8Rng, k: usize) -> Result<f64> {
    let b = berezin_matrix(&desk.berezin(Symbol::one(desk.alg.dim()))?)?;
    let mut worst: f64 = 0.0;
    for _ in 0..k {
        let u = packet(rng, desk.alg.dim()).sample(&desk.grid)?;
        worst = worst.max(relative_l2(&desk.grid, &b.apply(&u)?, &u)?);
    }
    Ok(worst)
}

fn trace_residual(desk: &Desk) -> Result<f64> {
    let n = desk.alg.dim();
    let f = Symbol::gaussian(1.0, vec![0.3; n], 1.0, vec![-0.2; n], 1.1);
    let tr = berezin_matrix(&desk.berezin(f)?)?.trace();
    let exact = gaussian_symbol_mass(1.0, 1.0, 1.1, n);
    Ok((tr - exact).norm() / exact)
}

fn suite_berezin(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "berezin");
    let mut rng = ctx.rng(6);
    let desk = match berezin_desk() {
        Ok(d) => d,
        Err(e) => {
            c.at_most("setup", 0.0, || Err(e));
            return c.finish();
        }
    };
    c.at_most("identity", 5e-2, || identity_residual(&desk, &mut rng, 5));
    c.at_most("trace", 2e-2, || trace_residual(&desk));
    let f = Symbol::gaussian(1.0, vec![0.4], 1.2, vec![0.5], 0.9);
    let built = desk.berezin(f.clone()).and_then(|cfg| Ok((berezin_matrix(&cfg)?, cfg)));
    match built {
        Ok((b, cfg)) => {
            c.at_most("hermiticity", 1e-10, || Ok(b.hermiticity_residual()));
            c.at_most("positivity", 1e-8, || {
                let min = b.hermitian_eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
                Ok((-min).max(0.0) / f.sup_norm(&desk.xi))
            });
            for (label, s) in [("schatten_1", 1.0), ("schatten_2", 2.0), ("schatten_inf", f64::INFINITY)] {
                c.at_most(label, 1.0 + 5e-2, || {
                    let r = schatten_bound_check(&cfg, s, 0.0)?;
                    Ok(r.ratio / r.bound)
                });
            }
        }
        Err(e) => c.at_most("assembly", 0.0, || Err(e)),
    }
    match Desk::heisenberg() {
        Ok(h) => {
            let f = Symbol::gaussian(1.0, vec![0.2, -0.1, 0.0], 1.0, vec![0.3, 0.0, -0.2], 1.0);
            match h.berezin(f.clone()).and_then(|cfg| berezin_matrix(&cfg)) {
                Ok(b) => {
                    c.at_most("hermiticity_heisenberg", 1e-10, || Ok(b.hermiticity_residual()));
                    c.at_most("positivity_heisenberg", 1e-8, || {
                        let min = b.hermitian_eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
                        Ok((-min).max(0.0) / f.sup_norm(&h.xi))
                    });
                }
                Err(e) => c.at_most("assembly_heisenberg", 0.0, || Err(e)),
            }
        }
        Err(e) => c.at_most("setup_heisenberg", 0.0, || Err(e)),
    }
    c.finish()
}

// ---------------------------------------------------------------------------

/// `∫ φ(z) |ω(z + x)|² dz` for `φ = e^{-(z-a)²/2s²}` and the unit Gaussian
/// window: the mean of `φ` under `N(-x, 1/2)`.
fn multiplier_closed_form(a: f64, s: f64, x: f64) -> f64 {
    let v = s * s + 0.5;
    s / v.sqrt() * (-(x + a) * (x + a) / (2.0 * v)).exp()
}

/// Kernel of `Ber(1 ⊗ ψ)` for `ψ = e^{-(ξ-c)²/2s²}` and the unit Gaussian
/// window: `e^{-d²/4} (s/√2π) e^{-icd} e^{-s²d²/2}`, `d = x - y`.
fn convolution_closed_form(c: f64, s: f64, x: f64, y: f64) -> Complex64 {
    let d = x - y;
    Complex64::from_polar(
        (-d * d / 4.0).exp() * s / (2.0 * PI).sqrt() * (-s * s * d * d / 2.0).exp(),
        -c * d,
    )
}

fn suite_examples(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "examples");
    let mut rng = ctx.rng(7);
    let desk = match berezin_desk() {
        Ok(d) => d,
        Err(e) => {
            c.at_most("setup", 0.0, || Err(e));
            return c.finish();
        }
    };
    let (a, s) = (0.4, 1.3);
    let phi = Field::gaussian(Domain::Group, vec![a], s);
    let exact_m = desk.grid.sample(|x| Complex64::new(multiplier_closed_form(a, s, x[0]), 0.0));
    c.at_most("multiplier_matrix", 5e-2, || {
        let b = berezin_matrix(&desk.berezin(Symbol::group_only(phi.clone()))?)?;
        b.relative_distance(&OperatorMatrix::multiplication(&desk.grid, &exact_m)?)
    });
    c.at_most("multiplier_quadrature", 5e-2, || {
        let m = berezin_mult_example(&desk.alg, &desk.window, &phi, &desk.xi.g)?.sample(&desk.grid)?;
        relative_l2(&desk.grid, &m, &exact_m)
    });
    c.at_most("multiplier_weak", 5e-2, || {
        let cfg = desk.berezin(Symbol::group_only(phi.clone()))?;
        let (u, v) = (packet(&mut rng, 1), packet(&mut rng, 1));
        let got = berezin_weak(&cfg, &u, &v, &desk.grid)?;
        let mu: Vec<Complex64> = u.sample(&desk.grid)?.iter().zip(&exact_m).map(|(p, q)| p * q).collect();
        let want = desk.grid.inner(&mu, &v.sample(&desk.grid)?)?;
        Ok((got - want).norm() / (u.l2_norm(&desk.grid)? * v.l2_norm(&desk.grid)?))
    });
    let (cc, sc) = (0.6, 0.8);
    let exact_k = OperatorMatrix::from_fn(&desk.grid, |x, y| convolution_closed_form(cc, sc, x[0], y[0]));
    c.at_most("convolution_matrix", 5e-2, || {
        let f = Symbol::dual_only(1, DualFactor::gaussian(vec![cc], vec![sc]));
        Ok(interior_distance(&desk.grid, &berezin_matrix(&desk.berezin(f)?)?, &exact_k, 4.0))
    });
    c.at_most("convolution_quadrature", 5e-2, || {
        let psi = Field::gaussian(Domain::Dual, vec![cc], sc);
        let b = berezin_conv_example(&desk.alg, &desk.window, &psi, &desk.xi.g, &desk.xi.dual, &desk.grid)?;
        Ok(interior_distance(&desk.grid, &b, &exact_k, 4.0))
    });
    c.exact("delta_is_projector", || {
        let p = random_point(&mut rng, 1, 1.0);
        let b = berezin_matrix(&desk.berezin(Symbol::delta(p.clone()))?)?;
        let proj = crate::coherent::projector(&desk.alg, &desk.window, &p, &desk.grid)?;
        Ok(b.kernel() == proj.kernel())
    });
    c.finish()
}

// ---------------------------------------------------------------------------

fn suite_covariance(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "covariance");
    let mut rng = ctx.rng(8);
    for (label, desk) in [("abelian", berezin_desk()), ("heisenberg", Desk::heisenberg())] {
        let desk = match desk {
            Ok(d) => d,
            Err(e) => {
                c.at_most(&format!("setup_{label}"), 0.0, || Err(e));
                continue;
            }
        };
        let n = desk.alg.dim();
        let f = Symbol::gaussian(1.0, uniform(&mut rng, n, 0.3), 1.0, uniform(&mut rng, n, 0.3), 1.0);
        let z = uniform(&mut rng, n, 0.6);
        let zeta = uniform(&mut rng, n, 0.6);
        c.at_most(&format!("left_{label}"), 5e-2, || covariance_check_l(&desk.berezin(f.clone())?, &z));
        c.at_most(&format!("modulation_tau_id_{label}"), 5e-2, || {
            covariance_check_m(&desk.berezin(f.clone())?, &zeta)
        });
    }
    c.finish()
}

// ---------------------------------------------------------------------------

fn covariant_desk() -> Result<(Desk, XiGrid)> {
    let d = Desk::new(LieAlgebra::abelian(1)?, 8.0, 32)?;
    let xi = XiGrid::cube(1, 6.0, 24, 6.0, 24)?;
    Ok((d, xi))
}

/// Smooth trace-class test operators with Gaussian kernels.
fn gaussian_kernel_op(grid: &Grid, a: f64, b: f64, k: f64) -> OperatorMatrix {
    OperatorMatrix::from_fn(grid, move |x, y| {
        let (x, y) = (x[0], y[0]);
        Complex64::from_polar((-(x - a) * (x - a) / 2.0 - (y - b) * (y - b) / 2.0).exp(), k * (x - y))
    })
}

fn suite_covariant(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "covariant");
    let (desk, xi) = match covariant_desk() {
        Ok(d) => d,
        Err(e) => {
            c.at_most("setup", 0.0, || Err(e));
            return c.finish();
        }
    };
    let g = &desk.grid;
    let t = gaussian_kernel_op(g, 0.3, -0.2, 0.5);
    let s = gaussian_kernel_op(g, -0.4, 0.1, -0.3);
    let w = &desk.window;
    c.at_most("box_composition", 5e-2, || {
        let ct = CovSymbol::full(&desk.alg, &t, w, &xi)?;
        let cs = CovSymbol::full(&desk.alg, &s, w, &xi)?;
        let cst = CovSymbol::full(&desk.alg, &s.compose(&t)?, w, &xi)?;
        let boxed = square_compose(&ct, &cs)?;
        let m = cst.matrix()?;
        Ok((boxed.matrix()? - m).norm() / m.norm())
    });
    c.at_most("box_adjoint", 1e-12, || {
        let ct = CovSymbol::full(&desk.alg, &t, w, &xi)?;
        let ca = CovSymbol::full(&desk.alg, &t.adjoint(), w, &xi)?;
        let m = ca.matrix()?;
        Ok((square_adjoint(&ct)?.matrix()? - m).norm() / m.norm())
    });
    c.at_most("trace_norm_bound", 1.0 + 5e-2, || {
        Ok(norm_bound_check(&desk.alg, &t, w, &xi, 1.0, 0.0)?.ratio)
    });
    c.at_most("sup_norm_bound", 1.0 + 5e-2, || {
        Ok(norm_bound_check(&desk.alg, &t, w, &xi, f64::INFINITY, 0.0)?.ratio)
    });
    c.at_most("bt_mass", 2e-2, || {
        let f = Symbol::gaussian(1.0, vec![0.3], 1.0, vec![-0.4], 1.0);
        let cfg = BerezinConfig::new(desk.alg.clone(), w.clone(), g.clone(), xi.clone(), f)?;
        let bt = berezin_transform_grid(&cfg, g)?;
        let mass = xi.integrate(&bt)?;
        let exact = gaussian_symbol_mass(1.0, 1.0, 1.0, 1);
        Ok((mass - exact).norm() / exact)
    });
    c.at_most("bt_one", 5e-2, || {
        let o = overlap_matrix(&desk.alg, w, &xi, g)?;
        // Nodes nearest the origin; the box truncates the others.
        let centre = (0..xi.len())
            .min_by(|&a, &b| {
                let r = |k: usize| {
                    let (z, zeta) = xi.node(k);
                    z[0] * z[0] + zeta[0] * zeta[0]
                };
                r(a).total_cmp(&r(b))
            })
            .expect("non-empty");
        let s: f64 = (0..xi.len()).map(|k| o[(k, centre)].norm_sqr()).sum::<f64>() * xi.weight();
        Ok((s - 1.0).abs())
    });
    c.at_most("kernel_reconstruction", 1e-1, || {
        let ct = CovSymbol::full(&desk.alg, &t, w, &xi)?;
        kernel_from_cov(&ct, g)?.relative_distance(&t)
    });
    c.exact("c0_decay_shells", || {
        let r = c0_decay_check(&desk.alg, &t, w, &xi, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 1e-2)?;
        Ok(r.monotone && r.decays)
    });
    c.finish()
}

// ---------------------------------------------------------------------------

fn suite_pseudodiff(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "pseudodiff");
    let mut rng = ctx.rng(10);
    for (label, alg, l, n) in [
        ("abelian", LieAlgebra::abelian(1), 8.0, 64usize),
        ("heisenberg", LieAlgebra::heisenberg(1), 4.0, 12),
    ] {
        c.at_most(&format!("hs_unitarity_{label}"), 2e-2, || {
            let alg = alg?;
            let d = alg.dim();
            let grid = Grid::cube(d, l, n)?;
            let (sx, sxi) = (1.0, 0.8);
            let a = Symbol::gaussian(1.0, vec![0.0; d], sx, vec![0.2; d], sxi);
            let hs = op_quantize(&alg, &a, &grid)?.hs_norm();
            // ∫|a|² dΞ = (π σ_x σ_ξ / 2π)^n
            let l2 = (PI * sx * sxi / (2.0 * PI)).powi(d as i32).sqrt();
            Ok((hs / l2 - 1.0).abs())
        });
    }
    c.at_most("weyl_is_op_plane_wave", 1e-8, || {
        let h1 = LieAlgebra::heisenberg(1)?;
        let u = packet(&mut rng, 3);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let p = random_point(&mut rng, 3, 1.0);
            let a = op_apply(&h1, &Symbol::plane_wave(&p), &u)?;
            let b = weyl(&h1, &p, &u)?;
            let x = uniform(&mut rng, 3, 1.5);
            worst = worst.max((a.eval(&x) - b.eval(&x)).norm());
        }
        Ok(worst)
    });
    // Symbol of Ber(f): recovery from the assembled kernel against the
    // direct triple integral, and against the commutative convolution form.
    let setup = (|| -> Result<(BerezinConfig, XiGrid, Grid, Vec<Complex64>)> {
        let alg = LieAlgebra::abelian(1)?;
        let grid = Grid::cube(1, 8.0, 48)?;
        let xi = XiGrid::cube(1, 8.0, 48, 8.0, 48)?;
        let w = Window::standard(&grid)?;
        let f = Symbol::gaussian(1.0, vec![0.3], 1.0, vec![-0.2], 0.9);
        let cfg = BerezinConfig::new(alg, w, grid, xi, f)?;
        let eval = XiGrid::cube(1, 1.5, 3, 1.5, 3)?;
        let y = Grid::cube(1, 8.0, 96)?;
        let a = berezin_symbol(&cfg, &eval, &y)?;
        let (_, vals) = a.grid_values().expect("gridded");
        Ok((cfg.clone(), eval, y, vals.to_vec()))
    })();
    match setup {
        Ok((cfg, eval, y, kernel_route)) => {
            let scale = kernel_route.iter().map(|v| v.norm()).fold(0.0, f64::max);
            c.at_most("berezin_symbol_direct", 5e-2, || {
                let mut worst: f64 = 0.0;
                for (k, v) in kernel_route.iter().enumerate() {
                    let (x, xi) = eval.node(k);
                    worst = worst.max((berezin_symbol_direct(&cfg, x, xi, &y)? - v).norm());
                }
                Ok(worst / scale)
            });
            c.at_most("convolution_form", 5e-2, || {
                let conv = ConvolutionSymbol::new(&cfg.alg, &cfg.window, &cfg.symbol, &cfg.xi, &y)?;
                let mut worst: f64 = 0.0;
                for (k, v) in kernel_route.iter().enumerate() {
                    let (x, xi) = eval.node(k);
                    worst = worst.max((conv.eval(x, xi) - v).norm());
                }
                Ok(worst / scale)
            });
        }
        Err(e) => c.at_most("berezin_symbol_setup", 0.0, || Err(e)),
    }
    c.finish()
}

// ---------------------------------------------------------------------------

fn complex_gaussian_symbol(n: usize) -> Symbol {
    Symbol::gaussian(1.0, vec![0.1; n], 0.9, vec![0.3; n], 1.1).scale(Complex64::new(0.6, 0.8))
}

fn suite_tau(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "tau");
    let mut rng = ctx.rng(11);
    let h1 = LieAlgebra::<f64>::heisenberg(1).expect("preset");
    let grid = Grid::cube(3, 2.0, 6).expect("grid");
    for (label, tau) in [("scaled_0.3", TauMap::scaled(0.3)), ("e", TauMap::e()), ("symmetric", symmetric_tau(&h1))] {
        c.at_most(&format!("adjoint_identity_{label}"), 1e-10, || {
            let a = complex_gaussian_symbol(3);
            let lhs = op_quantize_tau(&h1, &a, &tau, &grid)?.adjoint();
            let rhs = op_quantize_tau(&h1, &a.conj(), &tau_tilde(&h1, &tau), &grid)?;
            lhs.relative_distance(&rhs)
        });
    }
    c.at_most("symmetric_fixed_point", 1e-12, || {
        let s = symmetric_tau(&h1);
        let st = tau_tilde(&h1, &s);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let x = uniform(&mut rng, 3, 2.0);
            let d = s.apply(&x).iter().zip(st.apply(&x)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(d);
        }
        Ok(worst)
    });
    c.at_most("symmetric_real_hermitian", 1e-10, || {
        let a = Symbol::gaussian(1.0, vec![0.2, -0.1, 0.1], 0.9, vec![0.4, 0.0, -0.3], 1.1);
        Ok(op_quantize_tau(&h1, &a, &symmetric_tau(&h1), &grid)?.hermiticity_residual())
    });
    c.exact("e_reduction_weyl", || {
        let u = packet(&mut rng, 3);
        let p = random_point(&mut rng, 3, 1.0);
        let (a, b) = (weyl_tau(&h1, &TauMap::e(), &p, &u)?, weyl(&h1, &p, &u)?);
        Ok((0..grid.len()).all(|k| a.eval(grid.node(k)) == b.eval(grid.node(k))))
    });
    c.exact("e_reduction_coherent", || {
        let w = Window::standard(&grid)?;
        let p = random_point(&mut rng, 3, 1.0);
        let (a, b) = (coherent_tau(&h1, &TauMap::e(), &w, &p)?, coherent_state(&h1, &w, &p)?);
        Ok((0..grid.len()).all(|k| a.eval(grid.node(k)) == b.eval(grid.node(k))))
    });
    c.exact("e_reduction_berezin", || {
        let d = Desk::new(LieAlgebra::heisenberg(1)?, 3.0, 6)?;
        let cfg = d.berezin(Symbol::gaussian(1.0, vec![0.0; 3], 1.0, vec![0.1; 3], 1.0))?;
        Ok(berezin_tau(&cfg, &TauMap::e())? == berezin_matrix(&cfg)?)
    });
    c.exact("e_equals_op_abelian", || {
        let ab = LieAlgebra::abelian(1)?;
        Ok(tau_e_vs_op(&ab, &complex_gaussian_symbol(1), &Grid::cube(1, 4.0, 32)?)? == 0.0)
    });
    c.finish()
}

// ---------------------------------------------------------------------------

/// Smooth non-polynomial potential on `H₁` with its analytic field.
fn test_potential() -> VectorPotential {
    VectorPotential::custom_with_field(
        3,
        |x| vec![0.3 * x[1].sin(), 0.2 * x[0] * x[2], 0.1 * x[1] * x[0].cos()],
        |x| {
            let f12 = 0.2 * x[2] - 0.3 * x[1].cos();
            let f13 = -0.1 * x[1] * x[0].sin();
            let f23 = 0.1 * x[0].cos() - 0.2 * x[0];
            vec![0.0, f12, f13, -f12, 0.0, f23, -f13, -f23, 0.0]
        },
    )
}

fn suite_magnetic(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "magnetic");
    let mut rng = ctx.rng(12);
    let h1 = LieAlgebra::<f64>::heisenberg(1).expect("preset");
    let a = test_potential();
    c.at_most("cocycle", 1e-8, || {
        let u = packet(&mut rng, 3);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let (y, z, x) = (uniform(&mut rng, 3, 1.0), uniform(&mut rng, 3, 1.0), uniform(&mut rng, 3, 1.0));
            let lhs = mag_translation(&h1, &a, &y, &mag_translation(&h1, &a, &z, &u)?)?.eval(&x);
            let yz = h1.bch(&y, &z)?;
            let phase = Complex64::from_polar(1.0, cocycle_flux(&h1, &a, &x, &y, &z)?);
            let rhs = phase * mag_translation(&h1, &a, &yz, &u)?.eval(&x);
            worst = worst.max((lhs - rhs).norm());
        }
        Ok(worst)
    });
    c.at_most("stokes", 1e-8, || {
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let (p, q, r) = (uniform(&mut rng, 3, 1.5), uniform(&mut rng, 3, 1.5), uniform(&mut rng, 3, 1.5));
            worst = worst.max((a.flux_triangle(&p, &q, &r) - a.boundary_circulation(&p, &q, &r)).abs());
        }
        Ok(worst)
    });
    let small = || Desk::new(h1.clone(), 3.0, 6);
    let zero = VectorPotential::zero(3);
    c.exact("zero_potential_translation", || {
        let u = packet(&mut rng, 3);
        let z = uniform(&mut rng, 3, 1.0);
        let (p, q) = (mag_translation(&h1, &zero, &z, &u)?, trans_l(&h1, &z, &u)?);
        let g = Grid::cube(3, 2.0, 5)?;
        Ok((0..g.len()).all(|k| p.eval(g.node(k)) == q.eval(g.node(k))))
    });
    c.exact("zero_potential_coherent", || {
        let d = &small()?;
        let p = random_point(&mut rng, 3, 1.0);
        let (x, y) = (mag_coherent(&h1, &zero, &d.window, &p)?, coherent_state(&h1, &d.window, &p)?);
        Ok((0..d.grid.len()).all(|k| x.eval(d.grid.node(k)) == y.eval(d.grid.node(k))))
    });
    c.exact("zero_potential_berezin", || {
        let d = &small()?;
        let cfg = d.berezin(Symbol::gaussian(1.0, vec![0.0; 3], 1.0, vec![0.2; 3], 1.0))?;
        Ok(mag_berezin(&cfg, &zero)? == berezin_matrix(&cfg)?)
    });
    let gauge = Gauge::from_fn(|x| 0.3 * x[0].sin() + 0.2 * x[1] * x[2]);
    let report = Desk::heisenberg().and_then(|d| {
        let cfg = d.berezin(Symbol::gaussian(1.0, vec![0.1, 0.0, -0.1], 1.0, vec![0.2, -0.1, 0.0], 1.0))?;
        let u = packet(&mut rng, 3);
        let z = uniform(&mut rng, 3, 0.8);
        gauge_check(&cfg, &a, &gauge, &z, &u)
    });
    match report {
        Ok(r) => {
            c.at_most("gauge_translation", 1e-8, || Ok(r.translation_residual));
            c.at_most("gauge_berezin", 5e-2, || Ok(r.berezin_residual));
        }
        Err(e) => c.at_most("gauge", 0.0, || Err(e)),
    }
    c.finish()
}

// ---------------------------------------------------------------------------

/// Ratios `r(N)/r(2N)` on the commutative line at fixed half-width. Each
/// pair sits where quadrature, not box truncation or roundoff, dominates:
/// the phase-space transforms need `N` past the aliasing threshold of the
/// matched `G`/dual grids, the Berezin checks a box wide enough that the
/// window tails are negligible.
fn suite_convergence(ctx: &SuiteContext) -> Vec<CheckResult> {
    let mut c = Checks::new(ctx, "convergence");
    let seed = ctx.seed;
    let fresh = move || ChaCha8Rng::seed_from_u64(seed ^ 0xC0FFEE);
    type Residual<'a> = &'a dyn Fn(&Desk) -> Result<f64>;
    let cases: [(&str, f64, usize, Residual); 4] = [
        ("orthogonality_ratio", 8.0, 24, &|d| orthogonality_residual(d, &mut fresh(), 2)),
        ("inversion_ratio", 8.0, 24, &|d| inversion_residual(d, &Twist::None, &mut fresh())),
        ("berezin_identity_ratio", 12.0, 16, &|d| identity_residual(d, &mut fresh(), 5)),
        ("berezin_trace_ratio", 12.0, 16, &trace_residual),
    ];
    for (label, l, n0, f) in cases {
        let name = c.name(label);
        let tol = ctx.tolerance(&name, 2.0);
        let t = Instant::now();
        let run = || -> Result<(f64, f64)> {
            let coarse = f(&Desk::new(LieAlgebra::abelian(1)?, l, n0)?)?;
            let fine = f(&Desk::new(LieAlgebra::abelian(1)?, l, 2 * n0)?)?;
            Ok((coarse, fine))
        };
        let r = match run() {
            Ok((a, b)) => {
                let ratio = if b == 0.0 { f64::INFINITY } else { a / b };
                CheckResult::at_least(name, ratio, tol)
                    .with_note(format!("L={l} N={n0}: {a:.3e}, N={}: {b:.3e}", 2 * n0))
            }
            Err(e) => CheckResult::errored(name, e),
        };
        c.out.push(r.timed(t));
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        assert_eq!(resolve_suites(&["all".into()]).unwrap().len(), SUITES.len());
        assert_eq!(resolve_suites(&["ccr".into(), "ccr".into()]).unwrap(), vec!["ccr"]);
        assert!(resolve_suites(&[]).is_err());
        assert!(resolve_suites(&["nope".into()]).is_err());
    }

    #[test]
    fn oracle_reps_are_homomorphisms() {
        let h1 = LieAlgebra::<f64>::heisenberg(1).unwrap();
        assert_eq!(MatrixRep::heisenberg().homomorphism_defect(&h1), 0.0);
        assert_eq!(MatrixRep::engel().homomorphism_defect(&LieAlgebra::engel()), 0.0);
    }

    #[test]
    fn overrides_beat_scaling() {
        let mut ctx = SuiteContext::new(1).with_tol_scale(10.0);
        ctx.overrides.insert("lie.x".into(), 3.0);
        assert_eq!(ctx.tolerance("lie.x", 1.0), 3.0);
        assert_eq!(ctx.tolerance("lie.y", 1.0), 10.0);
    }

    #[test]
    fn lie_and_weyl_suites_pass() {
        let ctx = SuiteContext::default();
        let r = run_suite(&["lie".into(), "weyl".into()], &ctx).unwrap();
        assert!(r.pass, "{r}");
    }
}
