//! Phase-space symbols `f(x, ξ)` with closed-form partial Fourier transforms.
//!
//! A closed-form symbol is a finite sum `Σ_t c_t g_t(x) h_t(ξ)` where every
//! dual factor `h_t` is one of
//!
//! * `1`, whose partial inverse transform is the point mass `δ(V)`,
//! * `e^{-i⟨b|ξ⟩}`, giving `δ(V - b)`,
//! * `e^{-i⟨b|ξ⟩} exp(-Σ_k (ξ_k - c_k)² / 2s_k²)`, giving
//!   `Π_k s_k/√(2π) · e^{i(V_k - b_k)c_k} · e^{-s_k²(V_k - b_k)²/2}`,
//!
//! with `ȟ(V) = ∫ e^{i⟨V|ξ⟩} h(ξ) đξ`. Point masses at phase-space points
//! (`δ_𝒳`) and purely sampled symbols are carried alongside.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherent::PhasePoint;
use crate::error::{check_dim, Error, Result};
use crate::lie::LieAlgebra;
use crate::numerics::{Domain, Field, Grid, XiGrid};
use crate::scalar::{dot, dual_factor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DualFactor {
    One,
    Plane {
        b: Vec<f64>,
    },
    Gaussian {
        b: Vec<f64>,
        center: Vec<f64>,
        width: Vec<f64>,
    },
}

impl DualFactor {
    pub fn gaussian(center: Vec<f64>, width: Vec<f64>) -> Self {
        let b = vec![0.0; center.len()];
        DualFactor::Gaussian { b, center, width }
    }

    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        match self {
            DualFactor::One => Complex64::new(1.0, 0.0),
            DualFactor::Plane { b } => Complex64::from_polar(1.0, -dot(b, xi)),
            DualFactor::Gaussian { b, center, width } => {
                let q: f64 = xi
                    .iter()
                    .zip(center)
                    .zip(width)
                    .map(|((x, c), s)| (x - c) * (x - c) / (2.0 * s * s))
                    .sum();
                Complex64::from_polar((-q).exp(), -dot(b, xi))
            }
        }
    }

    /// Location of the point mass `ȟ = δ(· - b)`, if the transform is one.
    pub fn point_mass(&self, dim: usize) -> Option<Vec<f64>> {
        match self {
            DualFactor::One => Some(vec![0.0; dim]),
            DualFactor::Plane { b } => Some(b.clone()),
            DualFactor::Gaussian { .. } => None,
        }
    }

    /// `ȟ(V)` for the Gaussian case.
    pub fn inverse_transform(&self, v: &[f64]) -> Option<Complex64> {
        match self {
            DualFactor::Gaussian { b, center, width } => {
                let mut amp = 1.0;
                let mut q = 0.0;
                let mut th = 0.0;
                for k in 0..v.len() {
                    let d = v[k] - b[k];
                    amp *= width[k] / (2.0 * std::f64::consts::PI).sqrt();
                    q += width[k] * width[k] * d * d / 2.0;
                    th += d * center[k];
                }
                Some(Complex64::from_polar(amp * (-q).exp(), th))
            }
            _ => None,
        }
    }

    /// `h(ξ - ζ) = phase · h'(ξ)`; returns `(h', phase)`.
    pub fn shifted(&self, zeta: &[f64]) -> (DualFactor, Complex64) {
        match self {
            DualFactor::One => (DualFactor::One, Complex64::new(1.0, 0.0)),
            DualFactor::Plane { b } => (self.clone(), Complex64::from_polar(1.0, dot(b, zeta))),
            DualFactor::Gaussian { b, center, width } => (
                DualFactor::Gaussian {
                    b: b.clone(),
                    center: center.iter().zip(zeta).map(|(c, z)| c + z).collect(),
                    width: width.clone(),
                },
                Complex64::from_polar(1.0, dot(b, zeta)),
            ),
        }
    }

    pub fn conj(&self) -> DualFactor {
        let neg = |b: &Vec<f64>| b.iter().map(|v| -v).collect::<Vec<_>>();
        match self {
            DualFactor::One => DualFactor::One,
            DualFactor::Plane { b } => DualFactor::Plane { b: neg(b) },
            DualFactor::Gaussian { b, center, width } => DualFactor::Gaussian {
                b: neg(b),
                center: center.clone(),
                width: width.clone(),
            },
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            DualFactor::One => None,
            DualFactor::Plane { b } => Some(b.len()),
            DualFactor::Gaussian { b, center, width } => {
                if b.len() == center.len() && center.len() == width.len() {
                    Some(b.len())
                } else {
                    Some(usize::MAX)
                }
            }
        }
    }
}

/// One product term `c · g(x) · h(ξ)`.
#[derive(Clone, Debug)]
pub struct SymbolTerm {
    pub coeff: Complex64,
    pub group: Field,
    pub dual: DualFactor,
}

/// A symbol on `Ξ`.
#[derive(Clone, Debug)]
pub struct Symbol {
    dim: usize,
    terms: Vec<SymbolTerm>,
    deltas: Vec<(Complex64, PhasePoint)>,
    sampled: Option<Field>,
    real: bool,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl Symbol {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
            deltas: Vec::new(),
            sampled: None,
            real: true,
        }
    }

    /// `f ≡ 1`.
    pub fn one(dim: usize) -> Self {
        Self::product(Field::constant(Domain::Group, dim, one()), DualFactor::One).assume_real()
    }

    pub fn product(group: Field, dual: DualFactor) -> Self {
        let dim = group.dim();
        Self {
            dim,
            terms: vec![SymbolTerm {
                coeff: one(),
                group,
                dual,
            }],
            deltas: Vec::new(),
            sampled: None,
            real: false,
        }
    }

    /// `φ ⊗ 1`.
    pub fn group_only(phi: Field) -> Self {
        Self::product(phi, DualFactor::One)
    }

    /// `1 ⊗ h`.
    pub fn dual_only(dim: usize, h: DualFactor) -> Self {
        Self::product(Field::constant(Domain::Group, dim, one()), h)
    }

    /// Real Gaussian `A · exp(-|x - x₀|²/2s² - Σ(ξ - ξ₀)²/2t²)`.
    pub fn gaussian(amplitude: f64, x0: Vec<f64>, sx: f64, xi0: Vec<f64>, sxi: f64) -> Self {
        let n = x0.len();
        let mut s = Self::product(
            Field::gaussian(Domain::Group, x0, sx).scale(Complex64::new(amplitude, 0.0)),
            DualFactor::gaussian(xi0, vec![sxi; n]),
        );
        s.real = true;
        s
    }

    /// `ε_{z,ζ}(x, ξ) = e^{i⟨x|ζ⟩} e^{-i⟨z|ξ⟩}`.
    pub fn plane_wave(p: &PhasePoint) -> Self {
        let zeta = p.zeta.clone();
        let n = zeta.len();
        Self::product(
            Field::analytic(Domain::Group, n, move |x| Complex64::from_polar(1.0, dot(x, &zeta))),
            DualFactor::Plane { b: p.z.clone() },
        )
    }

    /// Unit point mass `δ_𝒳`.
    pub fn delta(p: PhasePoint) -> Self {
        Self {
            dim: p.z.len(),
            terms: Vec::new(),
            deltas: vec![(one(), p)],
            sampled: None,
            real: true,
        }
    }

    /// A symbol known only through an evaluator on `Ξ` (`2n` coordinates).
    pub fn sampled(field: Field) -> Result<Self> {
        field.expect_domain(Domain::PhaseSpace)?;
        if !field.dim().is_multiple_of(2) {
            return Err(Error::InvalidArgument("phase-space fields have an even number of coordinates".into()));
        }
        Ok(Self {
            dim: field.dim() / 2,
            terms: Vec::new(),
            deltas: Vec::new(),
            sampled: Some(field),
            real: false,
        })
    }

    /// Declares the symbol real-valued (enables Hermiticity expectations).
    pub fn assume_real(mut self) -> Self {
        self.real = true;
        self
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[SymbolTerm] {
        &self.terms
    }

    pub fn deltas(&self) -> &[(Complex64, PhasePoint)] {
        &self.deltas
    }

    pub fn sampled_part(&self) -> Option<&Field> {
        self.sampled.as_ref()
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            check_dim(self.dim, t.group.dim())?;
            t.group.expect_domain(Domain::Group)?;
            if let Some(d) = t.dual.dim() {
                check_dim(self.dim, d)?;
            }
        }
        for (_, p) in &self.deltas {
            check_dim(self.dim, p.z.len())?;
            check_dim(self.dim, p.zeta.len())?;
        }
        Ok(())
    }

    pub fn plus(mut self, other: Symbol) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        self.terms.extend(other.terms);
        self.deltas.extend(other.deltas);
        self.sampled = match (self.sampled, other.sampled) {
            (None, s) | (s, None) => s,
            (Some(a), Some(b)) => Some(a.add(&b)?),
        };
        self.real &= other.real;
        Ok(self)
    }

    pub fn scale(mut self, c: Complex64) -> Self {
        for t in &mut self.terms {
            t.coeff *= c;
        }
        for d in &mut self.deltas {
            d.0 *= c;
        }
        self.sampled = self.sampled.map(|f| f.scale(c));
        self.real &= c.im == 0.0;
        self
    }

    /// Pointwise value; point masses are not functions and contribute nothing.
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        let mut v: Complex64 = self
            .terms
            .iter()
            .map(|t| t.coeff * t.group.eval(x) * t.dual.eval(xi))
            .sum();
        if let Some(f) = &self.sampled {
            let mut p = x.to_vec();
            p.extend_from_slice(xi);
            v += f.eval(&p);
        }
        v
    }

    pub fn as_field(&self) -> Field {
        let s = self.clone();
        let n = self.dim;
        Field::analytic(Domain::PhaseSpace, 2 * n, move |p| s.eval(&p[..n], &p[n..]))
    }

    pub fn sample(&self, xi: &XiGrid) -> Vec<Complex64> {
        xi.sample(|x, s| self.eval(x, s))
    }

    /// True when every term has a closed-form partial transform, possibly a
    /// point mass, and nothing is sampled.
    pub fn is_closed_form(&self) -> bool {
        self.sampled.is_none()
    }

    /// True when no term has a point-mass partial transform.
    pub fn has_smooth_transform(&self) -> bool {
        self.sampled.is_none()
            && self.deltas.is_empty()
            && self.terms.iter().all(|t| t.dual.point_mass(self.dim).is_none())
    }

    /// `ǎ(x, V) = ∫ e^{i⟨V|ξ⟩} a(x, ξ) đξ` for smooth closed forms.
    pub fn partial_inverse(&self, x: &[f64], v: &[f64]) -> Option<Complex64> {
        if !self.has_smooth_transform() {
            return None;
        }
        Some(
            self.terms
                .iter()
                .map(|t| t.coeff * t.group.eval(x) * t.dual.inverse_transform(v).expect("smooth dual factor"))
                .sum(),
        )
    }

    /// `ǎ(x, V)` by midpoint quadrature over `dual`; works for any symbol
    /// without point masses.
    pub fn partial_inverse_quadrature(&self, x: &[f64], v: &[f64], dual: &Grid) -> Complex64 {
        let n = self.dim;
        let w = dual.vol() * dual_factor::<f64>(n);
        let vals: Vec<Complex64> = (0..dual.len())
            .map(|k| {
                let xi = dual.node(k);
                self.eval(x, xi) * Complex64::from_polar(1.0, dot(v, xi))
            })
            .collect();
        crate::scalar::pairwise_sum(&vals) * w
    }

    pub fn conj(&self) -> Symbol {
        let terms = self
            .terms
            .iter()
            .map(|t| SymbolTerm {
                coeff: t.coeff.conj(),
                group: t.group.conj(),
                dual: t.dual.conj(),
            })
            .collect();
        Symbol {
            dim: self.dim,
            terms,
            deltas: self.deltas.iter().map(|(c, p)| (c.conj(), p.clone())).collect(),
            sampled: self.sampled.as_ref().map(|f| f.conj()),
            real: self.real,
        }
    }

    /// `(x, ξ) ↦ f(x, ξ - ζ)`.
    pub fn shift_dual(&self, zeta: &[f64]) -> Result<Symbol> {
        check_dim(self.dim, zeta.len())?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let (dual, ph) = t.dual.shifted(zeta);
                SymbolTerm {
                    coeff: t.coeff * ph,
                    group: t.group.clone(),
                    dual,
                }
            })
            .collect();
        let deltas = self
            .deltas
            .iter()
            .map(|(c, p)| {
                let mut q = p.clone();
                q.zeta.iter_mut().zip(zeta).for_each(|(a, b)| *a += b);
                (*c, q)
            })
            .collect();
        let sampled = self.sampled.as_ref().map(|f| {
            let n = self.dim;
            let z = zeta.to_vec();
            let f = f.clone();
            Field::analytic(Domain::PhaseSpace, 2 * n, move |p| {
                let mut q = p.to_vec();
                q[n..].iter_mut().zip(&z).for_each(|(a, b)| *a -= b);
                f.eval(&q)
            })
        });
        Ok(Symbol {
            dim: self.dim,
            terms,
            deltas,
            sampled,
            real: self.real,
        })
    }

    /// `(x, ξ) ↦ f(x z⁻¹, ξ)`.
    pub fn translate_group(&self, alg: &LieAlgebra<f64>, z: &[f64]) -> Result<Symbol> {
        check_dim(self.dim, z.len())?;
        check_dim(self.dim, alg.dim())?;
        let zinv = alg.inv(z);
        let right = |g: &Field| {
            let a = alg.clone();
            let zi = zinv.clone();
            let approx = g.is_approximate();
            let g = g.clone();
            Field::analytic(Domain::Group, g.dim(), move |x| g.eval(&a.bch_raw(x, &zi))).mark_approximate(approx)
        };
        let terms = self
            .terms
            .iter()
            .map(|t| SymbolTerm {
                coeff: t.coeff,
                group: right(&t.group),
                dual: t.dual.clone(),
            })
            .collect();
        // δ_{(w,ω)}(x z⁻¹, ·) = δ_{(wz, ω)}
        let deltas = self
            .deltas
            .iter()
            .map(|(c, p)| {
                (
                    *c,
                    PhasePoint {
                        z: alg.bch_raw(&p.z, z),
                        zeta: p.zeta.clone(),
                    },
                )
            })
            .collect();
        let sampled = self.sampled.as_ref().map(|f| {
            let n = self.dim;
            let a = alg.clone();
            let zi = zinv.clone();
            let f = f.clone();
            Field::analytic(Domain::PhaseSpace, 2 * n, move |p| {
                let mut q = a.bch_raw(&p[..n], &zi);
                q.extend_from_slice(&p[n..]);
                f.eval(&q)
            })
        });
        Ok(Symbol {
            dim: self.dim,
            terms,
            deltas,
            sampled,
            real: self.real,
        })
    }

    /// `max |f|` over the nodes of `xi`.
    pub fn sup_norm(&self, xi: &XiGrid) -> f64 {
        self.sample(xi).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_inverse_transform_matches_quadrature() {
        let h = DualFactor::Gaussian {
            b: vec![0.3],
            center: vec![-0.4],
            width: vec![1.3],
        };
        let s = Symbol::dual_only(1, h.clone());
        let dual = Grid::cube(1, 14.0, 400).unwrap();
        for v in [-1.0, 0.0, 0.7, 2.0] {
            let exact = h.inverse_transform(&[v]).unwrap();
            let quad = s.partial_inverse_quadrature(&[0.0], &[v], &dual);
            assert!((exact - quad).norm() < 1e-10, "v={v}");
        }
    }

    #[test]
    fn point_masses_are_detected() {
        assert_eq!(DualFactor::One.point_mass(2), Some(vec![0.0, 0.0]));
        assert!(!Symbol::one(2).has_smooth_transform());
        assert!(Symbol::gaussian(1.0, vec![0.0], 1.0, vec![0.0], 1.0).has_smooth_transform());
        let p = PhasePoint::new(vec![1.0], vec![2.0]);
        let e = Symbol::plane_wave(&p);
        let v = e.eval(&[0.5], &[0.25]);
        assert!((v - Complex64::from_polar(1.0, 0.5 * 2.0 - 0.25)).norm() < 1e-15);
    }

    #[test]
    fn dual_shift_moves_the_gaussian() {
        let h = DualFactor::Gaussian {
            b: vec![0.7],
            center: vec![0.2],
            width: vec![0.9],
        };
        let s = Symbol::dual_only(1, h);
        let t = s.shift_dual(&[1.1]).unwrap();
        for xi in [-1.0, 0.3, 2.0] {
            assert!((t.eval(&[0.0], &[xi]) - s.eval(&[0.0], &[xi - 1.1])).norm() < 1e-14);
        }
    }

    #[test]
    fn group_translation_and_conjugation() {
        let alg = LieAlgebra::<f64>::heisenberg(1).unwrap();
        let s = Symbol::gaussian(2.0, vec![0.1, 0.0, -0.2], 1.0, vec![0.0; 3], 1.0);
        let z = [0.5, -0.3, 0.2];
        let t = s.translate_group(&alg, &z).unwrap();
        let x = [0.3, 0.4, -0.1];
        let xz = alg.bch(&x, &alg.inv(&z)).unwrap();
        assert!((t.eval(&x, &[0.1; 3]) - s.eval(&xz, &[0.1; 3])).norm() < 1e-15);
        let c = Symbol::plane_wave(&PhasePoint::new(vec![1.0], vec![0.5])).conj();
        let v = c.eval(&[0.3], &[0.8]);
        assert!((v - Complex64::from_polar(1.0, -(0.3 * 0.5 - 0.8))).norm() < 1e-15);
    }

    #[test]
    fn closed_form_normalization() {
        // ∫ ȟ(V) dV = h(0) for the (2π)^{-n}-normalized transform pair.
        let h = DualFactor::gaussian(vec![0.0], vec![0.8]);
        let g = Grid::cube(1, 20.0, 800).unwrap();
        let total: f64 = (0..g.len())
            .map(|k| h.inverse_transform(g.node(k)).unwrap().re)
            .sum::<f64>()
            * g.vol();
        assert!((total - 1.0).abs() < 1e-10);
    }
}
