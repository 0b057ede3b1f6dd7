//! τ-ordered quantizations.
//!
//! `Op^τ(a)` has kernel `ǎ(τ(xy⁻¹)⁻¹x, log(y⁻¹x))`, where `ǎ` is the partial
//! inverse transform of the symbol in `ξ`. Taking `τ ≡ e` leaves the
//! argument `log(y⁻¹x)`, which differs from the `log(xy⁻¹)` of
//! [`crate::pseudodiff::op_quantize`] off commutative pairs; the two are
//! kept separate (see [`tau_e_vs_op`]).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::berezin::{assemble, BerezinConfig};
use crate::coherent::{twisted_coherent_state, twisted_weyl, twisted_weyl_adjoint, twisted_wigner_values, PhasePoint, Twist, Window};
use crate::error::{check_dim, Error, Result};
use crate::lie::LieAlgebra;
use crate::numerics::{Domain, Field, Grid, OperatorMatrix, XiGrid};
use crate::pseudodiff::op_quantize;
use crate::symbol::Symbol;

type PointMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
enum TauKind {
    /// `x ↦ exp(t log x)`; `t = 0` is `τ ≡ e`, `t = 1` is the identity.
    Scaled(f64),
    Custom(PointMap),
}

/// A continuous map `τ : G → G`.
#[derive(Clone)]
pub struct TauMap {
    name: String,
    kind: TauKind,
}

impl fmt::Debug for TauMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TauMap").field("name", &self.name).finish()
    }
}

impl TauMap {
    /// `τ ≡ e`.
    pub fn e() -> Self {
        Self::scaled_named("e", 0.0)
    }

    /// `τ(x) = x`.
    pub fn id() -> Self {
        Self::scaled_named("id", 1.0)
    }

    /// `τ(x) = exp(t log x)`.
    pub fn scaled(t: f64) -> Self {
        Self::scaled_named(&format!("scaled:{t}"), t)
    }

    fn scaled_named(name: &str, t: f64) -> Self {
        Self {
            name: name.into(),
            kind: TauKind::Scaled(t),
        }
    }

    pub fn custom<F>(name: &str, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            kind: TauKind::Custom(Arc::new(f)),
        }
    }

    /// `"e"`, `"id"`, `"symmetric"` or `"scaled:t"`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "e" => Ok(Self::e()),
            "id" => Ok(Self::id()),
            "symmetric" => Ok(Self::scaled_named("symmetric", 0.5)),
            _ => match name.strip_prefix("scaled:").map(str::parse::<f64>) {
                Some(Ok(t)) => Ok(Self::scaled(t)),
                _ => Err(Error::InvalidArgument(format!("unknown τ map `{name}`"))),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// True for `τ ≡ e`.
    pub fn is_trivial(&self) -> bool {
        matches!(self.kind, TauKind::Scaled(t) if t == 0.0)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            TauKind::Scaled(t) if *t == 0.0 => vec![0.0; x.len()],
            TauKind::Scaled(t) if *t == 1.0 => x.to_vec(),
            TauKind::Scaled(t) => x.iter().map(|v| t * v).collect(),
            TauKind::Custom(f) => f(x),
        }
    }
}

/// `∫₀¹ exp[s log x] ds` evaluated in the exponential chart: `x ↦ exp(½ log x)`.
pub fn symmetric_tau(_alg: &LieAlgebra<f64>) -> TauMap {
    TauMap::scaled_named("symmetric", 0.5)
}

/// `τ̃(x) = τ(x⁻¹) x`.
///
/// For `τ(x) = exp(t log x)` both factors lie on the one-parameter subgroup
/// through `x`, so `τ̃(x) = exp((1 - t) log x)` and the result stays in
/// closed form.
pub fn tau_tilde(alg: &LieAlgebra<f64>, tau: &TauMap) -> TauMap {
    match &tau.kind {
        TauKind::Scaled(t) => {
            let name = match tau.name.as_str() {
                "e" => "id".to_string(),
                "id" => "e".to_string(),
                "symmetric" => "symmetric".to_string(),
                other => format!("tilde({other})"),
            };
            TauMap::scaled_named(&name, 1.0 - t)
        }
        TauKind::Custom(f) => {
            let (a, f) = (alg.clone(), f.clone());
            TauMap::custom(&format!("tilde({})", tau.name), move |x| a.bch_raw(&f(&a.inv(x)), x))
        }
    }
}

/// Kernel of `Op^τ(a)` on `grid`: `ǎ(τ(xy⁻¹)⁻¹x, log(y⁻¹x))`.
///
/// Symbols depending on `x` only are multiplication operators for every τ
/// (the partial transform is `δ(V)`, which forces `y = x`).
pub fn op_quantize_tau(alg: &LieAlgebra<f64>, a: &Symbol, tau: &TauMap, grid: &Grid) -> Result<OperatorMatrix> {
    check_dim(alg.dim(), a.dim())?;
    check_dim(alg.dim(), grid.dim())?;
    a.validate()?;
    if let Some(m) = crate::pseudodiff::multiplier_of(a) {
        return OperatorMatrix::multiplication(grid, &m.sample(grid)?);
    }
    if !a.has_smooth_transform() {
        return Err(Error::Unsupported(
            "Op^τ on a grid needs a symbol with a smooth partial transform; point-mass symbols act through op_apply_tau".into(),
        ));
    }
    Ok(OperatorMatrix::from_fn(grid, |x, y| {
        let xy = alg.bch_raw(x, &alg.inv(y));
        let arg = alg.bch_raw(&alg.inv(&tau.apply(&xy)), x);
        let v = alg.bch_raw(&alg.inv(y), x);
        a.partial_inverse(&arg, &v).expect("smooth symbol")
    }))
}

/// `Op^τ(a) u` for a single product term with a point-mass partial transform,
/// `a(x, ξ) = g(x) e^{-i⟨b|ξ⟩}`: `u ↦ g(τ(xbx⁻¹)⁻¹x) u(xb⁻¹)`.
pub fn op_apply_tau(alg: &LieAlgebra<f64>, a: &Symbol, tau: &TauMap, u: &Field) -> Result<Field> {
    check_dim(alg.dim(), a.dim())?;
    let (coeff, g, b) = crate::pseudodiff::single_point_mass(a)?;
    let (al, t, u2) = (alg.clone(), tau.clone(), u.clone());
    let binv = alg.inv(&b);
    Ok(Field::analytic(Domain::Group, alg.dim(), move |x| {
        let xbx = al.bch_raw(&al.bch_raw(x, &b), &al.inv(x));
        let arg = al.bch_raw(&al.inv(&t.apply(&xbx)), x);
        coeff * g.eval(&arg) * u2.eval(&al.bch_raw(x, &binv))
    }))
}

/// Relative distance between `Op^{τ≡e}(a)` and `Op(a)` on `grid`; zero on
/// commutative groups.
pub fn tau_e_vs_op(alg: &LieAlgebra<f64>, a: &Symbol, grid: &Grid) -> Result<f64> {
    op_quantize_tau(alg, a, &TauMap::e(), grid)?.relative_distance(&op_quantize(alg, a, grid)?)
}

/// `W^τ(z,ζ)u(x) = e^{i⟨τ(z)⁻¹x|ζ⟩} u(z⁻¹x)`.
pub fn weyl_tau(alg: &LieAlgebra<f64>, tau: &TauMap, p: &PhasePoint, u: &Field) -> Result<Field> {
    twisted_weyl(alg, &Twist::Tau(tau.clone()), p, u)
}

pub fn weyl_tau_adjoint(alg: &LieAlgebra<f64>, tau: &TauMap, p: &PhasePoint, u: &Field) -> Result<Field> {
    twisted_weyl_adjoint(alg, &Twist::Tau(tau.clone()), p, u)
}

/// `ω^τ_{z,ζ}(x) = e^{-i⟨τ(z)⁻¹zx|ζ⟩} ω(zx)`.
pub fn coherent_tau(alg: &LieAlgebra<f64>, tau: &TauMap, w: &Window, p: &PhasePoint) -> Result<Field> {
    twisted_coherent_state(alg, &Twist::Tau(tau.clone()), w, p)
}

/// `𝒲^τ_{u,v}(z,ζ) = ⟨W^τ(z,ζ)u, v⟩` on `xi`.
pub fn wigner_tau(
    alg: &LieAlgebra<f64>,
    tau: &TauMap,
    u: &Field,
    v: &Field,
    xi: &XiGrid,
    y_grid: &Grid,
) -> Result<Field> {
    let vals = twisted_wigner_values(alg, &Twist::Tau(tau.clone()), u, v, xi, y_grid)?;
    Field::gridded(Domain::PhaseSpace, xi.as_box(), vals)
}

/// τ-ordered Berezin operator on `cfg.grid`.
pub fn berezin_tau(cfg: &BerezinConfig, tau: &TauMap) -> Result<OperatorMatrix> {
    assemble(cfg, &Twist::Tau(tau.clone()), None)
}

/// Relative Frobenius residual of `M_ζ* Ber^{id}(f) M_ζ = Ber^{id}(f(·,·-ζ))`.
pub fn covariance_check_m(cfg: &BerezinConfig, zeta: &[f64]) -> Result<f64> {
    check_dim(cfg.alg.dim(), zeta.len())?;
    let id = TauMap::id();
    let lhs = berezin_tau(cfg, &id)?;
    let m = |sign: f64| -> Vec<Complex64> {
        (0..cfg.grid.len())
            .map(|k| Complex64::from_polar(1.0, sign * crate::scalar::dot(cfg.grid.node(k), zeta)))
            .collect()
    };
    let lhs = lhs.sandwich(&m(-1.0), &m(1.0))?;
    let shifted = BerezinConfig {
        symbol: cfg.symbol.shift_dual(zeta)?,
        ..cfg.clone()
    };
    lhs.relative_distance(&berezin_tau(&shifted, &id)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tilde_of_named_maps() {
        let alg = LieAlgebra::<f64>::heisenberg(1).unwrap();
        assert_eq!(tau_tilde(&alg, &TauMap::e()).name(), "id");
        assert_eq!(tau_tilde(&alg, &TauMap::id()).name(), "e");
        let s = symmetric_tau(&alg);
        assert_eq!(s.apply(&[2.0, -4.0, 1.0]), vec![1.0, -2.0, 0.5]);
        let x = [0.3, -0.8, 0.5];
        assert_eq!(tau_tilde(&alg, &s).apply(&x), s.apply(&x));
    }

    #[test]
    fn custom_tilde_is_an_involution() {
        let alg = LieAlgebra::<f64>::heisenberg(1).unwrap();
        let t = TauMap::custom("twist", |x| vec![x[1], 0.5 * x[0], x[2] * x[2]]);
        let tt = tau_tilde(&alg, &tau_tilde(&alg, &t));
        for x in [[0.3, -0.8, 0.5], [1.0, 2.0, -1.0]] {
            let d: f64 = tt.apply(&x).iter().zip(t.apply(&x)).map(|(a, b)| (a - b).abs()).sum();
            assert!(d < 1e-13);
        }
        // The generic path agrees with the closed form on scaled maps.
        let sc = TauMap::custom("s", |x| x.iter().map(|v| 0.3 * v).collect());
        let x = [0.4, 0.1, -0.2];
        let a = tau_tilde(&alg, &sc).apply(&x);
        let b = tau_tilde(&alg, &TauMap::scaled(0.3)).apply(&x);
        assert!(a.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-15));
    }

    #[test]
    fn names_parse() {
        assert!(TauMap::by_name("e").unwrap().is_trivial());
        assert_eq!(TauMap::by_name("scaled:0.25").unwrap().apply(&[4.0]), vec![1.0]);
        assert!(TauMap::by_name("weird").is_err());
    }

    #[test]
    fn weyl_tau_shapes() {
        let ab = LieAlgebra::<f64>::abelian(1).unwrap();
        let u = Field::gaussian(Domain::Group, vec![0.2], 0.8);
        let p = PhasePoint::new(vec![0.6], vec![1.7]);
        let half = TauMap::scaled(0.5);
        let w = weyl_tau(&ab, &half, &p, &u).unwrap();
        let x = 0.4;
        let expect = Complex64::from_polar(1.0, 1.7 * (x - 0.3)) * u.eval(&[x - 0.6]);
        assert!((w.eval(&[x]) - expect).norm() < 1e-15);
        // τ = id gives L_z M_ζ.
        let h1 = LieAlgebra::<f64>::heisenberg(1).unwrap();
        let u3 = Field::gaussian(Domain::Group, vec![0.1, 0.0, -0.2], 1.0);
        let p3 = PhasePoint::new(vec![0.5, -0.4, 0.3], vec![0.2, 0.9, -0.6]);
        let w = weyl_tau(&h1, &TauMap::id(), &p3, &u3).unwrap();
        let x = [0.3, 0.7, -0.1];
        let zx = h1.bch(&h1.inv(&p3.z), &x).unwrap();
        let expect = Complex64::from_polar(1.0, crate::scalar::dot(&zx, &p3.zeta)) * u3.eval(&zx);
        assert!((w.eval(&x) - expect).norm() < 1e-14);
    }
}
