//! Modulations, translations, their generators and the commutation
//! relations among them.
//!
//! With `D^L_Z u(x) = d/dt u(exp(tZ)x)` the generators are right-invariant
//! vector fields, so `[D^L_Y, D^L_Z] = -D^L_{[Y,Z]}` while
//! `[D^R_Y, D^R_Z] = D^R_{[Y,Z]}`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::lie::{LieAlgebra, DLAMBDA_CLOSED_FORM_MAX_STEP};
use crate::numerics::{Domain, Field, Grid};
use crate::scalar::dot;

/// The algebra and the grid on which `L²` norms are taken.
#[derive(Clone, Debug)]
pub struct CcrContext {
    pub alg: LieAlgebra<f64>,
    pub grid: Grid,
}

impl CcrContext {
    pub fn new(alg: LieAlgebra<f64>, grid: Grid) -> Result<Self> {
        check_dim(alg.dim(), grid.dim())?;
        Ok(Self { alg, grid })
    }
}

/// `λ_ζ(x) = ⟨log x|ζ⟩`.
pub fn lambda_field(zeta: &[f64]) -> Field {
    let z = zeta.to_vec();
    Field::analytic(Domain::Group, zeta.len(), move |x| Complex64::new(dot(x, &z), 0.0))
}

/// `ε_ζ(x) = e^{i⟨log x|ζ⟩}`.
pub fn eps_field(zeta: &[f64]) -> Field {
    let z = zeta.to_vec();
    Field::analytic(Domain::Group, zeta.len(), move |x| Complex64::from_polar(1.0, dot(x, &z)))
}

/// `M_ζ u = ε_ζ u`.
pub fn mult_m(zeta: &[f64], u: &Field) -> Result<Field> {
    u.expect_domain(Domain::Group)?;
    check_dim(u.dim(), zeta.len())?;
    eps_field(zeta).mul(u)
}

/// `Λ_ζ u = λ_ζ u`.
pub fn mult_lambda(zeta: &[f64], u: &Field) -> Result<Field> {
    u.expect_domain(Domain::Group)?;
    check_dim(u.dim(), zeta.len())?;
    lambda_field(zeta).mul(u)
}

/// `(L_z u)(x) = u(z⁻¹x)`.
pub fn trans_l(alg: &LieAlgebra<f64>, z: &[f64], u: &Field) -> Result<Field> {
    check_dim(alg.dim(), z.len())?;
    u.expect_domain(Domain::Group)?;
    let (a, zi, u2) = (alg.clone(), alg.inv(z), u.clone());
    Ok(Field::analytic(Domain::Group, alg.dim(), move |x| u2.eval(&a.bch_raw(&zi, x)))
        .mark_approximate(u.is_gridded() || u.is_approximate()))
}

/// `(R_z u)(x) = u(xz)`.
pub fn trans_r(alg: &LieAlgebra<f64>, z: &[f64], u: &Field) -> Result<Field> {
    check_dim(alg.dim(), z.len())?;
    u.expect_domain(Domain::Group)?;
    let (a, z, u2) = (alg.clone(), z.to_vec(), u.clone());
    Ok(Field::analytic(Domain::Group, alg.dim(), move |x| u2.eval(&a.bch_raw(x, &z)))
        .mark_approximate(u.is_gridded() || u.is_approximate()))
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {h}")))
    }
}

fn scaled(z: &[f64], t: f64) -> Vec<f64> {
    z.iter().map(|v| v * t).collect()
}

/// `D^L_Z u(x) ≈ (u(exp(hZ)x) - u(exp(-hZ)x)) / 2h`.
pub fn deriv_l(alg: &LieAlgebra<f64>, zv: &[f64], u: &Field, h: f64) -> Result<Field> {
    check_step(h)?;
    check_dim(alg.dim(), zv.len())?;
    let (a, p, m, u2) = (alg.clone(), scaled(zv, h), scaled(zv, -h), u.clone());
    Ok(Field::analytic(Domain::Group, alg.dim(), move |x| {
        (u2.eval(&a.bch_raw(&p, x)) - u2.eval(&a.bch_raw(&m, x))) / (2.0 * h)
    }))
}

/// `D^R_Z u(x) ≈ (u(x exp(hZ)) - u(x exp(-hZ))) / 2h`.
pub fn deriv_r(alg: &LieAlgebra<f64>, zv: &[f64], u: &Field, h: f64) -> Result<Field> {
    check_step(h)?;
    check_dim(alg.dim(), zv.len())?;
    let (a, p, m, u2) = (alg.clone(), scaled(zv, h), scaled(zv, -h), u.clone());
    Ok(Field::analytic(Domain::Group, alg.dim(), move |x| {
        (u2.eval(&a.bch_raw(x, &p)) - u2.eval(&a.bch_raw(x, &m))) / (2.0 * h)
    }))
}

/// Max residuals of the relation families, each over the sampled points.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CcrReport {
    /// `M_η M_ζ = M_{η+ζ}`.
    pub modulation_group: f64,
    /// `L_y L_z = L_{yz}`.
    pub left_group: f64,
    /// `R_y R_z = R_{yz}`.
    pub right_group: f64,
    /// `L_z M_ζ = e^{i⟨z⁻¹x - x|ζ⟩} M_ζ L_z`.
    pub mixed: f64,
    /// `L_y R_z = R_z L_y`.
    pub left_right_commute: f64,
    /// `[D^L_Y, D^L_Z] = -D^L_{[Y,Z]}`.
    pub left_bracket: f64,
    /// `[D^R_Y, D^R_Z] = D^R_{[Y,Z]}`.
    pub right_bracket: f64,
    /// `[D^L_Z, Λ_ζ] = Mult(D^L_Z λ_ζ)`.
    pub generator_lambda: f64,
    /// Whether `generator_lambda` used the closed form (step ≤ 2).
    pub closed_form: bool,
    pub samples: usize,
    pub seed: u64,
}

fn rand_vec(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-r..r)).collect()
}

/// Gaussian test vector `e^{-|x - c|²/2} e^{i⟨x|k⟩}` with seeded `c`, `k`.
fn test_vector(rng: &mut ChaCha8Rng, n: usize) -> Field {
    let c = rand_vec(rng, n, 0.5);
    let k = rand_vec(rng, n, 1.0);
    Field::gaussian(Domain::Group, c, 1.0).map(move |x, v| v * Complex64::from_polar(1.0, dot(x, &k)))
}

/// Checks every relation family at `samples` seeded points with step `h`.
pub fn verify_ccr(ctx: &CcrContext, samples: usize, seed: u64, h: f64) -> Result<CcrReport> {
    check_step(h)?;
    let alg = &ctx.alg;
    let n = alg.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = CcrReport {
        closed_form: alg.step() <= DLAMBDA_CLOSED_FORM_MAX_STEP,
        samples,
        seed,
        ..Default::default()
    };
    let bump = |acc: &mut f64, v: f64| *acc = acc.max(v);
    for _ in 0..samples {
        let u = test_vector(&mut rng, n);
        let (y, z) = (rand_vec(&mut rng, n, 1.0), rand_vec(&mut rng, n, 1.0));
        let (eta, zeta) = (rand_vec(&mut rng, n, 1.5), rand_vec(&mut rng, n, 1.5));
        let (yv, zv) = (rand_vec(&mut rng, n, 1.0), rand_vec(&mut rng, n, 1.0));
        let x = rand_vec(&mut rng, n, 1.0);

        let sum: Vec<f64> = eta.iter().zip(&zeta).map(|(a, b)| a + b).collect();
        let d = mult_m(&eta, &mult_m(&zeta, &u)?)?.eval(&x) - mult_m(&sum, &u)?.eval(&x);
        bump(&mut r.modulation_group, d.norm());

        let yz = alg.bch(&y, &z)?;
        let d = trans_l(alg, &y, &trans_l(alg, &z, &u)?)?.eval(&x) - trans_l(alg, &yz, &u)?.eval(&x);
        bump(&mut r.left_group, d.norm());
        let d = trans_r(alg, &y, &trans_r(alg, &z, &u)?)?.eval(&x) - trans_r(alg, &yz, &u)?.eval(&x);
        bump(&mut r.right_group, d.norm());

        let zx = alg.bch(&alg.inv(&z), &x)?;
        let diff: Vec<f64> = zx.iter().zip(&x).map(|(a, b)| a - b).collect();
        let lhs = trans_l(alg, &z, &mult_m(&zeta, &u)?)?.eval(&x);
        let rhs = Complex64::from_polar(1.0, dot(&diff, &zeta)) * mult_m(&zeta, &trans_l(alg, &z, &u)?)?.eval(&x);
        bump(&mut r.mixed, (lhs - rhs).norm());

        let d = trans_l(alg, &y, &trans_r(alg, &z, &u)?)?.eval(&x) - trans_r(alg, &z, &trans_l(alg, &y, &u)?)?.eval(&x);
        bump(&mut r.left_right_commute, d.norm());

        let br = alg.bracket(&yv, &zv)?;
        let dl = |a: &[f64], f: &Field| deriv_l(alg, a, f, h);
        let comm = dl(&yv, &dl(&zv, &u)?)?.eval(&x) - dl(&zv, &dl(&yv, &u)?)?.eval(&x);
        bump(&mut r.left_bracket, (comm + dl(&br, &u)?.eval(&x)).norm());
        let dr = |a: &[f64], f: &Field| deriv_r(alg, a, f, h);
        let comm = dr(&yv, &dr(&zv, &u)?)?.eval(&x) - dr(&zv, &dr(&yv, &u)?)?.eval(&x);
        bump(&mut r.right_bracket, (comm - dr(&br, &u)?.eval(&x)).norm());

        let lu = mult_lambda(&zeta, &u)?;
        let comm = dl(&zv, &lu)?.eval(&x) - mult_lambda(&zeta, &dl(&zv, &u)?)?.eval(&x);
        let dlam = if r.closed_form {
            alg.dlambda_left(&zv, &zeta, &x)?
        } else {
            alg.dlambda_left_fd(&zv, &zeta, &x, h)?
        };
        bump(&mut r.generator_lambda, (comm - u.eval(&x) * dlam).norm());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields() {
        let l = lambda_field(&[2.0]);
        assert_eq!(l.eval(&[1.5]).re, 3.0);
        let e = eps_field(&[0.0, 0.0, 1.0]);
        assert!((e.eval(&[0.3, 0.2, 0.5]) - Complex64::from_polar(1.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn abelian_translation_and_derivative() {
        let alg = LieAlgebra::abelian(1).unwrap();
        let u = Field::gaussian(Domain::Group, vec![0.0], 1.0);
        let lu = trans_l(&alg, &[0.5], &u).unwrap();
        assert_eq!(lu.eval(&[1.0]), u.eval(&[0.5]));
        let du = deriv_l(&alg, &[1.0], &u, 1e-4).unwrap();
        let x = 0.7;
        assert!((du.eval(&[x]).re - (-x * (-x * x / 2.0f64).exp())).abs() < 1e-8);
        assert!(deriv_l(&alg, &[1.0], &u, 0.0).is_err());
    }

    #[test]
    fn relations_on_heisenberg() {
        let ctx = CcrContext::new(LieAlgebra::heisenberg(1).unwrap(), Grid::cube(3, 4.0, 9).unwrap()).unwrap();
        let r = verify_ccr(&ctx, 10, 7, 1e-4).unwrap();
        assert!(r.modulation_group < 1e-12 && r.left_group < 1e-12 && r.mixed < 1e-12);
        assert!(r.left_bracket < 1e-5 && r.right_bracket < 1e-5, "{r:?}");
        assert!(r.generator_lambda < 1e-6, "{r:?}");
    }
}
