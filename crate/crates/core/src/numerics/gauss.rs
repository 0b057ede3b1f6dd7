//! Gauss–Legendre rules.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// `m`-point Gauss–Legendre rule mapped to `[0, 1]`; exact for polynomials
/// of degree below `2m`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub const DEFAULT_ORDER: usize = 32;

impl GaussLegendre {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("Gauss-Legendre order must be at least 1".into()));
        }
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        // Newton iteration on P_m from the Chebyshev-like initial guesses;
        // roots are symmetric so only half are computed.
        for i in 0..m.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(m, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        Ok(Self {
            nodes: nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
            weights: weights.iter().map(|w| 0.5 * w).collect(),
        })
    }

    /// Shared default rule of order [`DEFAULT_ORDER`].
    pub fn default_rule() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(DEFAULT_ORDER).expect("positive order"))
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `∫₀¹ f(s) ds`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(s, w)| w * f(*s)).sum()
    }
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_below_twice_the_order() {
        for m in [1, 2, 5, 32] {
            let r = GaussLegendre::new(m).unwrap();
            for deg in 0..(2 * m) {
                let v = r.integrate(|s| s.powi(deg as i32));
                assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "m={m} deg={deg}");
            }
        }
    }

    #[test]
    fn weights_positive_and_nodes_inside() {
        let r = GaussLegendre::default_rule();
        assert_eq!(r.order(), 32);
        assert!(r.weights.iter().all(|w| *w > 0.0));
        assert!(r.nodes.iter().all(|s| *s > 0.0 && *s < 1.0));
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn smooth_integrand() {
        let r = GaussLegendre::new(16).unwrap();
        let v = r.integrate(|s| (3.0 * s).cos());
        assert!((v - (3.0f64).sin() / 3.0).abs() < 1e-14);
        assert!(GaussLegendre::new(0).is_err());
    }
}
