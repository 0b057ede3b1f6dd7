//! Quadrature Fourier transforms between g and g♯.
//!
//! `F h(ξ) = ∫ e^{-i⟨X|ξ⟩} h(X) dX` and `F⁻¹ w(X) = ∫ e^{i⟨X|ξ⟩} w(ξ) đξ`
//! with `đξ = (2π)^{-n} dξ`. Since exp is the identity on coordinates, the
//! group-side transform 𝓕 = F∘Exp coincides with F.

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{Domain, Field};
use super::grid::Grid;
use crate::error::{check_dim, Result};
use crate::scalar::{dot, dual_factor, pairwise_sum};

fn plane_wave_sum(nodes: &[f64], values: &[Complex64], dim: usize, point: &[f64], sign: f64) -> Complex64 {
    let terms: Vec<Complex64> = nodes
        .chunks(dim)
        .zip(values)
        .map(|(x, v)| v * Complex64::from_polar(1.0, sign * dot(x, point)))
        .collect();
    pairwise_sum(&terms)
}

/// `(F h)(ξ)` at one dual point, integrating over `grid`.
pub fn fourier_at(h: &Field, grid: &Grid, xi: &[f64]) -> Result<Complex64> {
    h.expect_domain(Domain::Group)?;
    check_dim(grid.dim(), xi.len())?;
    let vals = h.sample(grid)?;
    Ok(plane_wave_sum(grid.nodes(), &vals, grid.dim(), xi, -1.0) * grid.vol())
}

/// `F h` sampled on `target`, returned as a gridded field on g♯.
pub fn fourier(h: &Field, grid: &Grid, target: &Grid) -> Result<Field> {
    h.expect_domain(Domain::Group)?;
    check_dim(grid.dim(), target.dim())?;
    let vals = h.sample(grid)?;
    let n = grid.dim();
    let out: Vec<Complex64> = target
        .nodes()
        .par_chunks(n)
        .map(|xi| plane_wave_sum(grid.nodes(), &vals, n, xi, -1.0) * grid.vol())
        .collect();
    Field::gridded(Domain::Dual, target.clone(), out)
}

/// `(F⁻¹ w)(x)` at one group point, integrating over the dual grid.
pub fn inverse_fourier_at(w: &Field, dual_grid: &Grid, x: &[f64]) -> Result<Complex64> {
    w.expect_domain(Domain::Dual)?;
    check_dim(dual_grid.dim(), x.len())?;
    let vals = w.sample(dual_grid)?;
    let n = dual_grid.dim();
    Ok(plane_wave_sum(dual_grid.nodes(), &vals, n, x, 1.0) * (dual_grid.vol() * dual_factor::<f64>(n)))
}

/// `F⁻¹ w` sampled on `target`.
pub fn inverse_fourier(w: &Field, dual_grid: &Grid, target: &Grid) -> Result<Field> {
    w.expect_domain(Domain::Dual)?;
    check_dim(dual_grid.dim(), target.dim())?;
    let vals = w.sample(dual_grid)?;
    let n = dual_grid.dim();
    let scale = dual_grid.vol() * dual_factor::<f64>(n);
    let out: Vec<Complex64> = target
        .nodes()
        .par_chunks(n)
        .map(|x| plane_wave_sum(dual_grid.nodes(), &vals, n, x, 1.0) * scale)
        .collect();
    Field::gridded(Domain::Group, target.clone(), out)
}

/// 𝓕 = F ∘ Exp; identical to [`fourier`] in exponential coordinates.
pub fn script_fourier(u: &Field, grid: &Grid, target: &Grid) -> Result<Field> {
    fourier(u, grid, target)
}

/// 𝓕⁻¹; identical to [`inverse_fourier`].
pub fn script_fourier_inv(w: &Field, dual_grid: &Grid, target: &Grid) -> Result<Field> {
    inverse_fourier(w, dual_grid, target)
}

/// Phase matrix `P[m][j] = e^{i·sign·a_j·b_m}` for a separable transform
/// from nodes `a` to nodes `b` along one axis.
pub(crate) fn phase_matrix(from: &[f64], to: &[f64], sign: f64) -> Vec<Complex64> {
    let mut p = Vec::with_capacity(from.len() * to.len());
    for b in to {
        for a in from {
            p.push(Complex64::from_polar(1.0, sign * a * b));
        }
    }
    p
}

/// Applies one dense matrix per axis to a row-major array.
///
/// `shape[k]` is the input extent along axis `k`; `mats[k]` is an
/// `out_k × shape[k]` matrix stored row-major. Axes are processed in order.
pub(crate) fn separable_apply(data: &[Complex64], shape: &[usize], mats: &[(usize, &[Complex64])]) -> Vec<Complex64> {
    let mut cur = data.to_vec();
    let mut dims = shape.to_vec();
    for (axis, (out_len, m)) in mats.iter().enumerate() {
        let nin = dims[axis];
        let outer: usize = dims[..axis].iter().product();
        let inner: usize = dims[axis + 1..].iter().product();
        let mut next = vec![Complex64::new(0.0, 0.0); outer * out_len * inner];
        for o in 0..outer {
            let src = &cur[o * nin * inner..(o + 1) * nin * inner];
            let dst = &mut next[o * out_len * inner..(o + 1) * out_len * inner];
            for mo in 0..*out_len {
                let row = &m[mo * nin..(mo + 1) * nin];
                let d = &mut dst[mo * inner..(mo + 1) * inner];
                for (j, pj) in row.iter().enumerate() {
                    let s = &src[j * inner..(j + 1) * inner];
                    for (a, b) in d.iter_mut().zip(s) {
                        *a += pj * b;
                    }
                }
            }
        }
        cur = next;
        dims[axis] = *out_len;
    }
    cur
}
