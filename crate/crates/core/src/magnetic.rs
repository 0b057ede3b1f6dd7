//! Magnetic quantization: BCH segments, circulations of a vector potential,
//! fluxes through chart-flat triangles, magnetic translations, the magnetic
//! Weyl system and Berezin operators, and gauge covariance.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::berezin::{assemble, BerezinConfig};
use crate::coherent::{twisted_coherent_state, twisted_weyl, twisted_wigner_values, PhasePoint, Twist, Window};
use crate::error::{check_dim, Error, Result};
use crate::lie::LieAlgebra;
use crate::numerics::gauss::GaussLegendre;
use crate::numerics::{Domain, Field, Grid, OperatorMatrix, XiGrid};

type CovectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// `[x,y]_s = exp[(1-s) log x + s log y]`.
pub fn segment(x: &[f64], y: &[f64], s: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| (1.0 - s) * a + s * b).collect()
}

/// A smooth real function `ψ` with its gradient.
#[derive(Clone)]
pub struct Gauge {
    psi: ScalarFn,
    grad: CovectorFn,
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Gauge")
    }
}

impl Gauge {
    pub fn new<P, G>(psi: P, grad: G) -> Self
    where
        P: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            psi: Arc::new(psi),
            grad: Arc::new(grad),
        }
    }

    /// Gradient by five-point central differences.
    pub fn from_fn<P>(psi: P) -> Self
    where
        P: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let psi: ScalarFn = Arc::new(psi);
        let p = psi.clone();
        Self {
            psi,
            grad: Arc::new(move |x| five_point_gradient(&*p, x, 1e-3)),
        }
    }

    pub fn psi(&self, x: &[f64]) -> f64 {
        (self.psi)(x)
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        (self.grad)(x)
    }

    /// `e^{iψ}` as a field.
    pub fn phase_field(&self, dim: usize, sign: f64) -> Field {
        let p = self.psi.clone();
        Field::analytic(Domain::Group, dim, move |x| Complex64::from_polar(1.0, sign * p(x)))
    }
}

fn five_point_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            let mut at = |t: f64| {
                p[i] = x[i] + t;
                let v = f(&p);
                p[i] = x[i];
                v
            };
            (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
        })
        .collect()
}

#[derive(Clone)]
enum PotentialKind {
    Zero,
    /// `A = (-b x₂/2, b x₁/2, 0, …)`.
    Landau(f64),
    /// `A_j = ½ Σ_i x_i F_ij` with `F₁₂ = F₁₃ = F₂₃ = b`.
    Linear3(f64),
    Constant(Vec<f64>),
    Custom { a: CovectorFn, curl: Option<CovectorFn> },
    Gauged(Box<VectorPotential>, Gauge),
}

/// A 1-form `A : G → g♯` in exponential coordinates.
#[derive(Clone)]
pub struct VectorPotential {
    name: String,
    dim: usize,
    kind: PotentialKind,
}

impl fmt::Debug for VectorPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorPotential")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish()
    }
}

impl VectorPotential {
    pub fn zero(dim: usize) -> Self {
        Self {
            name: "zero".into(),
            dim,
            kind: PotentialKind::Zero,
        }
    }

    /// Symmetric-gauge constant field `b dx₁∧dx₂`.
    pub fn landau(dim: usize, b: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument("the Landau potential needs dimension ≥ 2".into()));
        }
        Ok(Self {
            name: format!("landau:{b}"),
            dim,
            kind: PotentialKind::Landau(b),
        })
    }

    /// Linear potential of the constant 2-form with `F₁₂ = F₁₃ = F₂₃ = b`.
    pub fn linear3(b: f64) -> Self {
        Self {
            name: format!("linear3:{b}"),
            dim: 3,
            kind: PotentialKind::Linear3(b),
        }
    }

    pub fn constant(alpha: Vec<f64>) -> Self {
        Self {
            name: "constant".into(),
            dim: alpha.len(),
            kind: PotentialKind::Constant(alpha),
        }
    }

    /// Arbitrary potential; the field strength is taken by finite differences.
    pub fn custom<F>(dim: usize, a: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            name: "custom".into(),
            dim,
            kind: PotentialKind::Custom {
                a: Arc::new(a),
                curl: None,
            },
        }
    }

    /// Arbitrary potential with its field strength `F_ij = ∂_iA_j - ∂_jA_i`
    /// (row-major `n × n`).
    pub fn custom_with_field<F, B>(dim: usize, a: F, b: B) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        B: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            name: "custom".into(),
            dim,
            kind: PotentialKind::Custom {
                a: Arc::new(a),
                curl: Some(Arc::new(b)),
            },
        }
    }

    /// `"zero"`, `"landau:b"` or `"linear3:b"`.
    pub fn preset(name: &str, dim: usize) -> Result<Self> {
        let (head, arg) = name.split_once(':').unwrap_or((name, ""));
        let b = || {
            arg.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("potential preset `{name}` needs a numeric field strength")))
        };
        let p = match head {
            "zero" => Self::zero(dim),
            "landau" => Self::landau(dim, b()?)?,
            "linear3" => {
                check_dim(3, dim)?;
                Self::linear3(b()?)
            }
            _ => return Err(Error::InvalidArgument(format!("unknown potential preset `{name}`"))),
        };
        Ok(p)
    }

    /// `A + dψ`.
    pub fn with_gauge(&self, g: Gauge) -> Self {
        Self {
            name: format!("{}+dψ", self.name),
            dim: self.dim,
            kind: PotentialKind::Gauged(Box::new(self.clone()), g),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True only for the literal zero potential.
    pub fn is_zero(&self) -> bool {
        matches!(self.kind, PotentialKind::Zero)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        match &self.kind {
            PotentialKind::Zero => vec![0.0; n],
            PotentialKind::Landau(b) => {
                let mut a = vec![0.0; n];
                a[0] = -b * x[1] / 2.0;
                a[1] = b * x[0] / 2.0;
                a
            }
            PotentialKind::Linear3(b) => {
                let f = linear3_field(*b);
                (0..3).map(|j| 0.5 * (0..3).map(|i| x[i] * f[i * 3 + j]).sum::<f64>()).collect()
            }
            PotentialKind::Constant(a) => a.clone(),
            PotentialKind::Custom { a, .. } => a(x),
            PotentialKind::Gauged(base, g) => {
                let mut a = base.eval(x);
                a.iter_mut().zip(g.grad(x)).for_each(|(p, q)| *p += q);
                a
            }
        }
    }

    /// Field strength `F_ij(x) = ∂_iA_j - ∂_jA_i`, row-major.
    pub fn field_at(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        match &self.kind {
            PotentialKind::Zero | PotentialKind::Constant(_) => vec![0.0; n * n],
            PotentialKind::Landau(b) => {
                let mut f = vec![0.0; n * n];
                f[1] = *b;
                f[n] = -b;
                f
            }
            PotentialKind::Linear3(b) => linear3_field(*b).to_vec(),
            PotentialKind::Custom { curl: Some(c), .. } => c(x),
            PotentialKind::Custom { a, curl: None } => {
                let mut p = x.to_vec();
                let h = 1e-2;
                // d[i][j] = ∂_i A_j
                let mut d = vec![0.0; n * n];
                for i in 0..n {
                    let mut at = |t: f64| {
                        p[i] = x[i] + t;
                        let v = a(&p);
                        p[i] = x[i];
                        v
                    };
                    let (a2, a1, m1, m2) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
                    for j in 0..n {
                        d[i * n + j] = (-a2[j] + 8.0 * a1[j] - 8.0 * m1[j] + m2[j]) / (12.0 * h);
                    }
                }
                (0..n * n).map(|k| d[k] - d[(k % n) * n + k / n]).collect()
            }
            PotentialKind::Gauged(base, _) => base.field_at(x),
        }
    }

    /// `Γ^A[[x,y]] = ∫₀¹ ⟨y - x | A([x,y]_s)⟩ ds` with the default rule.
    pub fn circulation(&self, x: &[f64], y: &[f64]) -> f64 {
        self.circulation_with(GaussLegendre::default_rule(), x, y)
    }

    pub fn circulation_with(&self, rule: &GaussLegendre, x: &[f64], y: &[f64]) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Constant(a) => x.iter().zip(y).zip(a).map(|((p, q), c)| (q - p) * c).sum(),
            _ => {
                let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - a).collect();
                rule.integrate(|s| {
                    let a = self.eval(&segment(x, y, s));
                    d.iter().zip(&a).map(|(p, q)| p * q).sum()
                })
            }
        }
    }

    /// Flux of `B = dA` through the flat triangle with corners `a, b, c`,
    /// oriented by `(b - a, c - a)`.
    pub fn flux_triangle(&self, a: &[f64], b: &[f64], c: &[f64]) -> f64 {
        self.flux_triangle_with(GaussLegendre::default_rule(), a, b, c)
    }

    pub fn flux_triangle_with(&self, rule: &GaussLegendre, a: &[f64], b: &[f64], c: &[f64]) -> f64 {
        let n = self.dim;
        let e1: Vec<f64> = b.iter().zip(a).map(|(p, q)| p - q).collect();
        let e2: Vec<f64> = c.iter().zip(a).map(|(p, q)| p - q).collect();
        // Duffy map u = s, v = (1 - s) t on the unit simplex.
        rule.integrate(|s| {
            (1.0 - s)
                * rule.integrate(|t| {
                    let v = (1.0 - s) * t;
                    let p: Vec<f64> = (0..n).map(|k| a[k] + s * e1[k] + v * e2[k]).collect();
                    let f = self.field_at(&p);
                    let mut acc = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            acc += f[i * n + j] * e1[i] * e2[j];
                        }
                    }
                    acc
                })
        })
    }

    /// Circulation around the closed boundary `a → b → c → a`.
    pub fn boundary_circulation(&self, a: &[f64], b: &[f64], c: &[f64]) -> f64 {
        self.circulation(a, b) + self.circulation(b, c) + self.circulation(c, a)
    }
}

fn linear3_field(b: f64) -> [f64; 9] {
    [0.0, b, b, -b, 0.0, b, -b, -b, 0.0]
}

/// `Γ^B(x; y, z)`: flux through the triangle `x, y⁻¹x, z⁻¹y⁻¹x`.
pub fn cocycle_flux(alg: &LieAlgebra<f64>, a: &VectorPotential, x: &[f64], y: &[f64], z: &[f64]) -> Result<f64> {
    check_dim(alg.dim(), a.dim())?;
    let p = alg.bch(&alg.inv(y), x)?;
    let q = alg.bch(&alg.inv(z), &p)?;
    Ok(a.flux_triangle(x, &p, &q))
}

/// `(L^A_z u)(x) = e^{iΓ^A[[x, z⁻¹x]]} u(z⁻¹x)`.
pub fn mag_translation(alg: &LieAlgebra<f64>, a: &VectorPotential, z: &[f64], u: &Field) -> Result<Field> {
    twisted_weyl(alg, &Twist::Magnetic(a.clone()), &PhasePoint::new(z.to_vec(), vec![0.0; z.len()]), u)
}

/// `W^A(z,ζ) = M_ζ L^A_z`.
pub fn mag_weyl(alg: &LieAlgebra<f64>, a: &VectorPotential, p: &PhasePoint, u: &Field) -> Result<Field> {
    twisted_weyl(alg, &Twist::Magnetic(a.clone()), p, u)
}

/// `ω^A_{z,ζ}(x) = e^{-i⟨zx|ζ⟩} e^{-iΓ^A[[zx,x]]} ω(zx)`.
pub fn mag_coherent(alg: &LieAlgebra<f64>, a: &VectorPotential, w: &Window, p: &PhasePoint) -> Result<Field> {
    twisted_coherent_state(alg, &Twist::Magnetic(a.clone()), w, p)
}

/// `𝒲^A_{u,v}(z,ζ) = ⟨W^A(z,ζ)u, v⟩` on `xi`.
pub fn mag_wigner(
    alg: &LieAlgebra<f64>,
    a: &VectorPotential,
    u: &Field,
    v: &Field,
    xi: &XiGrid,
    y_grid: &Grid,
) -> Result<Field> {
    let vals = twisted_wigner_values(alg, &Twist::Magnetic(a.clone()), u, v, xi, y_grid)?;
    Field::gridded(Domain::PhaseSpace, xi.as_box(), vals)
}

/// Magnetic Berezin operator on `cfg.grid`.
pub fn mag_berezin(cfg: &BerezinConfig, a: &VectorPotential) -> Result<OperatorMatrix> {
    check_dim(cfg.alg.dim(), a.dim())?;
    assemble(cfg, &Twist::Magnetic(a.clone()), None)
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeReport {
    /// Max pointwise `|L^{A+dψ}_z u - e^{-iψ} L^A_z (e^{iψ} u)|`.
    pub translation_residual: f64,
    /// Relative Frobenius distance of the two Berezin matrices.
    pub berezin_residual: f64,
}

/// Checks `L^{A+dψ}_z = e^{-iψ} L^A_z e^{iψ}` at the nodes of `cfg.grid`
/// and `Ber^{A+dψ}_ω(f) = e^{-iψ} Ber^A_{e^{iψ}ω}(f) e^{iψ}`.
pub fn gauge_check(cfg: &BerezinConfig, a: &VectorPotential, g: &Gauge, z: &[f64], u: &Field) -> Result<GaugeReport> {
    let alg = &cfg.alg;
    let n = alg.dim();
    let ag = a.with_gauge(g.clone());
    let lhs = mag_translation(alg, &ag, z, u)?;
    let plus = g.phase_field(n, 1.0);
    let minus = g.phase_field(n, -1.0);
    let rhs = minus.mul(&mag_translation(alg, a, z, &plus.mul(u)?)?)?;
    let translation_residual = (0..cfg.grid.len())
        .map(|k| {
            let x = cfg.grid.node(k);
            (lhs.eval(x) - rhs.eval(x)).norm()
        })
        .fold(0.0, f64::max);

    let left = mag_berezin(cfg, &ag)?;
    let gg = g.clone();
    let twisted = Window::from_field(cfg.window.modulated(move |x| gg.psi(x)).field().clone(), &cfg.grid)?;
    let inner = BerezinConfig {
        window: twisted,
        ..cfg.clone()
    };
    let right = mag_berezin(&inner, a)?;
    let right = right.sandwich(&minus.sample(&cfg.grid)?, &plus.sample(&cfg.grid)?)?;
    Ok(GaugeReport {
        translation_residual,
        berezin_residual: left.relative_distance(&right)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments() {
        assert_eq!(segment(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 0.5), vec![0.5, 0.5, 0.0]);
        assert_eq!(segment(&[1.0, 2.0], &[3.0, 4.0], 0.0), vec![1.0, 2.0]);
        assert_eq!(segment(&[1.0, 2.0], &[3.0, 4.0], 1.0), vec![3.0, 4.0]);
    }

    #[test]
    fn circulation_cases() {
        let c = VectorPotential::constant(vec![0.5, -1.0]);
        assert!((c.circulation(&[0.0, 0.0], &[2.0, 1.0]) - 0.0).abs() < 1e-15);
        assert!((c.circulation(&[0.0, 0.0], &[2.0, 0.0]) - 1.0).abs() < 1e-15);
        let l = VectorPotential::landau(2, 2.0).unwrap();
        // Radial segments from the origin carry no circulation.
        assert!(l.circulation(&[0.0, 0.0], &[1.0, 1.0]).abs() < 1e-15);
        // x = (1,0) to y = (0,1): ∫ ⟨(-1,1) | (-(s)b/2, (1-s)b/2)⟩ ds = b/2.
        let v = l.circulation(&[1.0, 0.0], &[0.0, 1.0]);
        assert!((v - 1.0).abs() < 1e-14, "{v}");
        assert!((l.circulation(&[0.0, 1.0], &[1.0, 0.0]) + v).abs() < 1e-14);
    }

    #[test]
    fn flux_is_field_times_area_and_matches_boundary() {
        let l = VectorPotential::landau(2, 3.0).unwrap();
        let (a, b, c) = ([0.2, -0.1], [1.0, 0.3], [-0.4, 0.9]);
        let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
        assert!((l.flux_triangle(&a, &b, &c) - 3.0 * area).abs() < 1e-12);
        assert!((l.boundary_circulation(&a, &b, &c) - 3.0 * area).abs() < 1e-12);
        assert!(l.flux_triangle(&a, &[0.4, 0.0], &[0.6, 0.1]).abs() < 1e-14);
    }

    #[test]
    fn finite_difference_field_of_polynomial_potential() {
        let p = VectorPotential::custom(3, |x| vec![x[1] * x[2], -x[0] * x[0], 0.5 * x[0] * x[1]]);
        let x = [0.3, -0.7, 1.1];
        let f = p.field_at(&x);
        // F_12 = ∂_1A_2 - ∂_2A_1 = -2x₁ - x₃.
        assert!((f[1] - (-2.0 * x[0] - x[2])).abs() < 1e-9);
        assert!((f[3] + f[1]).abs() < 1e-12);
        let l3 = VectorPotential::linear3(0.7);
        let fd = VectorPotential::custom(3, move |x| l3.eval(x)).field_at(&x);
        assert!(fd.iter().zip(linear3_field(0.7)).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn presets_parse() {
        assert!(VectorPotential::preset("zero", 2).unwrap().is_zero());
        assert_eq!(VectorPotential::preset("landau:1.5", 2).unwrap().name(), "landau:1.5");
        assert!(VectorPotential::preset("linear3:1", 2).is_err());
        assert!(VectorPotential::preset("landau", 2).is_err());
        assert!(VectorPotential::preset("helix:1", 3).is_err());
    }

    #[test]
    fn gradient_circulation_telescopes() {
        let g = Gauge::from_fn(|x| x[0] * x[1]);
        let a = VectorPotential::zero(2).with_gauge(g.clone());
        let (x, y) = ([0.3, -0.2], [1.1, 0.8]);
        let v = a.circulation(&x, &y);
        assert!((v - (g.psi(&y) - g.psi(&x))).abs() < 1e-9);
    }
}
