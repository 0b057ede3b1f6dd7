//! Runs one quantization experiment and writes its artifacts.
//!
//! Output directory layout:
//!
//! * `matrix.bin` + `matrix.bin.json`: kernel samples (little-endian
//!   complex128, row-major) and the grid/scheme sidecar,
//! * `window.csv`: the window on the kernel grid,
//! * `symbol.csv`: pointwise values of the symbol on `Ξ` (coarsened when
//!   `Ξ` is large; point masses are not pointwise and do not appear),
//! * `summary.json`: see [`Summary`].

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::berezin::{berezin_matrix, BerezinConfig};
use crate::coherent::Window;
use crate::config::{ExperimentConfig, Scheme, SymbolSpec};
use crate::error::{Error, Result};
use crate::magnetic::mag_berezin;
use crate::numerics::export::{write_field_csv, write_matrix_binary};
use crate::numerics::{Domain, Field, Grid, OperatorMatrix, XiGrid};
use crate::pseudodiff::{op_apply, op_quantize};
use crate::tau::op_quantize_tau;

/// Largest `Ξ` written node by node to `symbol.csv`.
const MAX_SYMBOL_ROWS: usize = 200_000;
/// Unitarity threshold on singular values.
const UNITARY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchattenNorms {
    pub s1: f64,
    pub s2: f64,
    pub s_inf: f64,
}

/// Singular values of a shift-class `Op(a)` on a packet subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryCheck {
    pub test_vectors: usize,
    pub singular_values: Vec<f64>,
    /// `max |σ - 1|`.
    pub defect: f64,
    pub unitary: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scheme: String,
    pub group: String,
    pub dim: usize,
    pub kernel_nodes: usize,
    pub xi_nodes: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<ComplexValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schatten: Option<SchattenNorms>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hermiticity_residual: Option<f64>,
    /// `∥Ber(1) - Id∥_F / ∥Id∥_F` for the constant symbol.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isometry: Option<IsometryCheck>,
    pub files: Vec<String>,
    pub notes: Vec<String>,
    pub wall_ms: f64,
}

pub fn window_of(cfg: &ExperimentConfig) -> Result<Window> {
    Window::gaussian(cfg.window_sigma, cfg.window_center.clone(), &cfg.grid)
}

pub fn berezin_config(cfg: &ExperimentConfig) -> Result<BerezinConfig> {
    let mut b = BerezinConfig::new(cfg.alg.clone(), window_of(cfg)?, cfg.grid.clone(), cfg.xi.clone(), cfg.symbol.clone())?;
    if cfg.override_cost_guard {
        b.max_work = f64::INFINITY;
    }
    Ok(b)
}

fn is_shift_class(spec: &SymbolSpec) -> bool {
    matches!(spec, SymbolSpec::PlaneWave { .. })
}

/// The operator of the configured scheme, or `None` for shift-class `Op`
/// symbols, which have no kernel on a grid.
pub fn quantize(cfg: &ExperimentConfig) -> Result<Option<OperatorMatrix>> {
    let op = match cfg.scheme {
        Scheme::Berezin => berezin_matrix(&berezin_config(cfg)?)?,
        Scheme::Magnetic => mag_berezin(&berezin_config(cfg)?, &cfg.potential)?,
        Scheme::Tau => op_quantize_tau(&cfg.alg, &cfg.symbol, &cfg.tau, &cfg.grid)?,
        Scheme::Op if is_shift_class(&cfg.symbol_spec) => return Ok(None),
        Scheme::Op => op_quantize(&cfg.alg, &cfg.symbol, &cfg.grid)?,
    };
    Ok(Some(op))
}

/// Gaussian packets `e^{-|x-c|²/2} e^{i⟨x|k⟩}` with centres in the
/// inner half of the box.
fn test_packets(grid: &Grid) -> Vec<Field> {
    let n = grid.dim();
    let hw = grid.half_width().to_vec();
    let mut out = Vec::new();
    for (sign, k) in [(1.0, 0.0), (-1.0, 0.0), (1.0, 0.7), (-1.0, -0.7), (0.0, 0.0), (0.0, 1.0)] {
        let c: Vec<f64> = hw.iter().enumerate().map(|(a, h)| sign * h * 0.25 * if a % 2 == 0 { 1.0 } else { -0.5 }).collect();
        let kv = vec![k; n];
        out.push(Field::gaussian(Domain::Group, c, 1.0).map(move |x, v| {
            v * Complex64::from_polar(1.0, x.iter().zip(&kv).map(|(a, b)| a * b).sum())
        }));
    }
    out
}

/// Gram matrix `G_ij = ⟨u_j, u_i⟩` on `grid`.
fn gram(grid: &Grid, vals: &[Vec<Complex64>]) -> Result<DMatrix<Complex64>> {
    let k = vals.len();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = grid.inner(&vals[j], &vals[i])?;
        }
    }
    Ok(g)
}

/// Singular values of `Op(a)` restricted to the span of the test packets:
/// with `G` the Gram matrix of the packets and `H` that of their images,
/// `σ² = eig(L⁻¹ H L⁻*)` for `G = L L*`. The packets are analytic, so the
/// inner products use a box wide enough to hold their shifted tails.
pub fn isometry_check(cfg: &ExperimentConfig) -> Result<IsometryCheck> {
    let reach = match &cfg.symbol_spec {
        SymbolSpec::PlaneWave { z: Some(z), .. } => z.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        _ => 0.0,
    };
    let hw: Vec<f64> = cfg.grid.half_width().iter().map(|h| h + 2.0 * reach + 8.0).collect();
    let counts = hw.iter().map(|h| (h / 0.25).ceil() as usize).collect();
    let fine = Grid::new(hw, counts)?;
    let packets = test_packets(&cfg.grid);
    let mut u = Vec::new();
    let mut image = Vec::new();
    for p in &packets {
        u.push(p.sample(&fine)?);
        image.push(op_apply(&cfg.alg, &cfg.symbol, p)?.sample(&fine)?);
    }
    let g = gram(&fine, &u)?;
    let h = gram(&fine, &image)?;
    let l = g
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("test packets are linearly dependent on this grid".into()))?
        .l();
    let linv = l
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("singular packet Gram matrix".into()))?;
    let m = &linv * h * linv.adjoint();
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut sv: Vec<f64> = m.symmetric_eigenvalues().iter().map(|e| e.max(0.0).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let defect = sv.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    Ok(IsometryCheck {
        test_vectors: packets.len(),
        singular_values: sv,
        defect,
        unitary: defect <= UNITARY_TOL,
    })
}

/// The `Ξ` grid used for `symbol.csv`: `Ξ` itself when small, otherwise the
/// same box with at most 8 nodes per axis.
pub fn symbol_export_grid(xi: &XiGrid) -> Result<(XiGrid, bool)> {
    if xi.len() <= MAX_SYMBOL_ROWS {
        return Ok((xi.clone(), false));
    }
    let coarse = |g: &Grid| Grid::new(g.half_width().to_vec(), g.counts().iter().map(|&c| c.min(8)).collect());
    Ok((XiGrid::new(coarse(&xi.g)?, coarse(&xi.dual)?)?, true))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Summary> {
    run_experiment_in(cfg, &cfg.output_dir)
}

pub fn run_experiment_in(cfg: &ExperimentConfig, dir: &Path) -> Result<Summary> {
    let t0 = Instant::now();
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let mut files: Vec<PathBuf> = Vec::new();
    let mut notes = Vec::new();
    let mut summary = Summary {
        scheme: cfg.scheme.name().into(),
        group: cfg.alg.name().into(),
        dim: cfg.alg.dim(),
        kernel_nodes: cfg.grid.len(),
        xi_nodes: cfg.xi.len(),
        seed: cfg.seed,
        trace: None,
        schatten: None,
        hermiticity_residual: None,
        identity_residual: None,
        isometry: None,
        files: Vec::new(),
        notes: Vec::new(),
        wall_ms: 0.0,
    };

    match quantize(cfg)? {
        Some(op) => {
            let path = dir.join("matrix.bin");
            write_matrix_binary(&path, &op, cfg.scheme.name())?;
            files.push(path.clone());
            files.push(crate::numerics::export::sidecar_path(&path));
            summary.trace = Some(op.trace().into());
            summary.schatten = Some(SchattenNorms {
                s1: op.schatten_norm(1.0)?,
                s2: op.schatten_norm(2.0)?,
                s_inf: op.schatten_norm(f64::INFINITY)?,
            });
            summary.hermiticity_residual = Some(op.hermiticity_residual());
            if matches!(cfg.symbol_spec, SymbolSpec::One) && matches!(cfg.scheme, Scheme::Berezin | Scheme::Magnetic) {
                summary.identity_residual = Some(op.relative_distance(&OperatorMatrix::identity(&cfg.grid))?);
            }
        }
        None => {
            notes.push("shift-class symbol: Op(a) has no grid kernel, checked on a packet subspace".into());
            summary.isometry = Some(isometry_check(cfg)?);
        }
    }

    let window = window_of(cfg)?;
    let path = dir.join("window.csv");
    write_field_csv(&path, &cfg.grid, &window.field().sample(&cfg.grid)?)?;
    files.push(path);

    let (sg, coarsened) = symbol_export_grid(&cfg.xi)?;
    if coarsened {
        notes.push(format!("symbol.csv sampled on a coarsened Ξ grid ({} nodes)", sg.len()));
    }
    if matches!(cfg.symbol_spec, SymbolSpec::Delta { .. }) {
        notes.push("point-mass symbol: symbol.csv holds its (zero) pointwise density".into());
    }
    let path = dir.join("symbol.csv");
    write_field_csv(&path, &sg.as_box(), &cfg.symbol.sample(&sg))?;
    files.push(path);

    summary.files = files.iter().map(|p| p.display().to_string()).collect();
    summary.notes = notes;
    summary.wall_ms = t0.elapsed().as_secs_f64() * 1e3;
    let path = dir.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summary)?).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn run(text: &str) -> (Summary, tempfile::TempDir) {
        let dir = tempfile::tempdir().unwrap();
        let cfg = parse_config(text).unwrap();
        (run_experiment_in(&cfg, dir.path()).unwrap(), dir)
    }

    #[test]
    fn berezin_of_one_reports_identity_residual() {
        let (s, dir) = run(
            r#"{"group": "abelian:1", "grid": {"half_width": 8, "count": 48},
                "xi": {"half_width": 14, "count": 84, "dual_half_width": 8, "dual_count": 48},
                "symbol": {"kind": "one"}}"#,
        );
        assert!(s.identity_residual.unwrap() < 5e-2, "{s:?}");
        for f in ["matrix.bin", "matrix.bin.json", "window.csv", "symbol.csv", "summary.json"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }

    #[test]
    fn plane_wave_op_is_flagged_unitary() {
        let (s, _d) = run(
            r#"{"group": "heisenberg:1", "scheme": "op", "grid": {"half_width": 4, "count": 9},
                "symbol": {"kind": "plane_wave", "z": [0.3, -0.2, 0.1], "zeta": [0.5, 0.0, -0.4]}}"#,
        );
        let iso = s.isometry.unwrap();
        assert!(iso.unitary, "{iso:?}");
        assert!(s.trace.is_none());
    }

    #[test]
    fn zero_potential_matrix_is_byte_identical() {
        let base = r#""group": "abelian:2", "grid": {"half_width": 4, "count": 8},
            "xi": {"half_width": 4, "count": 8, "dual_half_width": 4, "dual_count": 8}"#;
        let (_, a) = run(&format!("{{{base}}}"));
        let (_, b) = run(&format!(r#"{{{base}, "scheme": "magnetic", "potential": "zero"}}"#));
        let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("matrix.bin")).unwrap();
        assert_eq!(read(&a), read(&b));
    }
}
