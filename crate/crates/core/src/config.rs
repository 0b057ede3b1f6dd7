//! Experiment configuration: JSON parsing, defaults and validation.
//!
//! Every field has a default, so `{"group": "heisenberg:1"}` is a complete
//! config. Validation collects all violations before failing.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::berezin::DEFAULT_MAX_WORK;
use crate::coherent::PhasePoint;
use crate::lie::{validate_algebra, LieAlgebra, MAX_BCH_DEPTH as MAX_STEP};
use crate::magnetic::VectorPotential;
use crate::numerics::{Domain, Field, Grid, XiGrid};
use crate::symbol::{DualFactor, Symbol};
use crate::tau::TauMap;

/// Largest number of `Ξ` quadrature nodes accepted without an override.
pub const MAX_XI_NODES: f64 = 2e7;
/// Largest kernel grid (the matrix has this many rows).
pub const MAX_KERNEL_NODES: f64 = 8192.0;
/// Largest Berezin assembly estimate, `z`-nodes × kernel nodes².
pub const MAX_WORK: f64 = DEFAULT_MAX_WORK;

/// Name of the config key (and CLI flag) that lifts the cost guards.
pub const OVERRIDE_KEY: &str = "override_cost_guard";

/// Every violation found while parsing or validating a config.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid config ({} problem(s)):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    fn one(msg: impl Into<String>) -> Self {
        Self {
            violations: vec![msg.into()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    /// `abelian:n`, `heisenberg:d`, `engel`, `triangular:m`.
    Preset(String),
    /// Full table `structure_constants[i][j][k] = c_ij^k`.
    Inline {
        structure_constants: Vec<Vec<Vec<f64>>>,
        step: usize,
        #[serde(default)]
        name: Option<String>,
    },
}

/// A scalar applies to every axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerAxis<T> {
    All(T),
    Axes(Vec<T>),
}

impl<T: Clone> PerAxis<T> {
    fn expand(&self, n: usize, what: &str, errs: &mut Vec<String>) -> Vec<T> {
        match self {
            PerAxis::All(v) => vec![v.clone(); n],
            PerAxis::Axes(v) if v.len() == n => v.clone(),
            PerAxis::Axes(v) => {
                errs.push(format!("{what}: {} entries for a {n}-dimensional group", v.len()));
                vec![v[0].clone(); n]
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: PerAxis<f64>,
    pub count: PerAxis<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiSpec {
    pub half_width: PerAxis<f64>,
    pub count: PerAxis<usize>,
    pub dual_half_width: PerAxis<f64>,
    pub dual_count: PerAxis<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default)]
    pub center: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolSpec {
    One,
    /// `A e^{-|x-x₀|²/2σ_x²} e^{-|ξ-ξ₀|²/2σ_ξ²}`.
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        x0: Option<Vec<f64>>,
        #[serde(default = "one")]
        sx: f64,
        #[serde(default)]
        xi0: Option<Vec<f64>>,
        #[serde(default = "one")]
        sxi: f64,
    },
    /// `φ ⊗ 1` with a Gaussian `φ`.
    GroupGaussian {
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default = "one")]
        sigma: f64,
    },
    /// `1 ⊗ ψ` with a Gaussian `ψ`.
    DualGaussian {
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default = "one")]
        width: f64,
    },
    /// Point mass at `(z, ζ)`.
    Delta {
        #[serde(default)]
        z: Option<Vec<f64>>,
        #[serde(default)]
        zeta: Option<Vec<f64>>,
    },
    /// `ε_{z,ζ}(x, ξ) = e^{i⟨x|ζ⟩ - i⟨z|ξ⟩}`.
    PlaneWave {
        #[serde(default)]
        z: Option<Vec<f64>>,
        #[serde(default)]
        zeta: Option<Vec<f64>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Berezin,
    Op,
    Tau,
    Magnetic,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Berezin => "berezin",
            Scheme::Op => "op",
            Scheme::Tau => "tau",
            Scheme::Magnetic => "magnetic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Raw config as written, before defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
struct RawConfig {
    group: Option<GroupSpec>,
    grid: Option<GridSpec>,
    xi: Option<XiSpec>,
    window: Option<WindowSpec>,
    symbol: Option<SymbolSpec>,
    scheme: Option<Scheme>,
    tau: Option<String>,
    potential: Option<String>,
    output: Option<OutputSpec>,
    seed: Option<u64>,
    tolerances: Option<BTreeMap<String, f64>>,
    override_cost_guard: Option<bool>,
}

/// Allowed keys per object; `None` for free-form maps such as `tolerances`.
fn allowed_keys(path: &str) -> Option<&'static [&'static str]> {
    Some(match path {
        "" => &[
            "group",
            "grid",
            "xi",
            "window",
            "symbol",
            "scheme",
            "tau",
            "potential",
            "output",
            "seed",
            "tolerances",
            "override_cost_guard",
        ],
        "group" => &["structure_constants", "step", "name"],
        "grid" => &["half_width", "count"],
        "xi" => &["half_width", "count", "dual_half_width", "dual_count"],
        "window" => &["sigma", "center"],
        "symbol" => &["kind", "amplitude", "x0", "sx", "xi0", "sxi", "center", "sigma", "width", "z", "zeta"],
        "symbol:one" => &["kind"],
        "symbol:gaussian" => &["kind", "amplitude", "x0", "sx", "xi0", "sxi"],
        "symbol:group_gaussian" => &["kind", "center", "sigma"],
        "symbol:dual_gaussian" => &["kind", "center", "width"],
        "symbol:delta" | "symbol:plane_wave" => &["kind", "z", "zeta"],
        "output" => &["dir"],
        _ => return None,
    })
}

fn unknown_keys(v: &Value, path: &str, out: &mut Vec<String>) {
    let Value::Object(map) = v else { return };
    let kinded = match (path, map.get("kind").and_then(Value::as_str)) {
        ("symbol", Some(kind)) => allowed_keys(&format!("symbol:{kind}")),
        _ => None,
    };
    let Some(allowed) = kinded.or_else(|| allowed_keys(path)) else { return };
    for (k, child) in map {
        let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
        if !allowed.contains(&k.as_str()) {
            out.push(format!("unknown key `{p}`"));
        } else if path.is_empty() {
            unknown_keys(child, &p, out);
        }
    }
}

/// Validated experiment with all defaults filled in.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub alg: LieAlgebra<f64>,
    pub grid: Grid,
    pub xi: XiGrid,
    pub window_sigma: f64,
    pub window_center: Vec<f64>,
    pub symbol_spec: SymbolSpec,
    pub symbol: Symbol,
    pub scheme: Scheme,
    pub tau: TauMap,
    pub potential: VectorPotential,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub override_cost_guard: bool,
}

/// Default `(half_width, count)` for the kernel grid, also used for both
/// factors of `Ξ`.
pub fn default_grid(n: usize) -> (f64, usize) {
    match n {
        1 => (10.0, 128),
        2 => (6.0, 24),
        3 => (4.0, 9),
        _ => (3.5, 6),
    }
}

/// Parses and validates `text`; `force_override` has the effect of
/// `"override_cost_guard": true`.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_with(text, false)
}

pub fn parse_config_with(text: &str, force_override: bool) -> Result<ExperimentConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::one(format!("not valid JSON: {e}")))?;
    if !value.is_object() {
        return Err(ConfigError::one("config must be a JSON object"));
    }
    let mut errs = Vec::new();
    unknown_keys(&value, "", &mut errs);
    let raw: RawConfig = match serde_json::from_value(strip_unknown(&value)) {
        Ok(r) => r,
        Err(e) => {
            errs.push(format!("malformed field: {e}"));
            return Err(ConfigError { violations: errs });
        }
    };
    let cfg = build(raw, force_override, &mut errs);
    match cfg {
        Some(c) if errs.is_empty() => Ok(c),
        _ => Err(ConfigError { violations: errs }),
    }
}

/// Drops unknown keys so that type errors in known fields still surface.
fn strip_unknown(v: &Value) -> Value {
    let mut v = v.clone();
    if let Value::Object(root) = &mut v {
        root.retain(|k, _| allowed_keys("").unwrap().contains(&k.as_str()));
        for (k, child) in root.iter_mut() {
            if let (Value::Object(m), Some(allowed)) = (child, allowed_keys(k)) {
                m.retain(|k, _| allowed.contains(&k.as_str()));
            }
        }
    }
    v
}

/// The algebra named by the `group` key of `text`, checked for shape and
/// step only, so that its axioms can be reported by [`validate_algebra`].
pub fn parse_group(text: &str) -> Result<LieAlgebra<f64>, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::one(format!("not valid JSON: {e}")))?;
    let spec = match value.get("group") {
        None => GroupSpec::Preset("heisenberg:1".into()),
        Some(g) => serde_json::from_value(g.clone()).map_err(|e| ConfigError::one(format!("malformed group: {e}")))?,
    };
    let mut errs = Vec::new();
    let alg = match &spec {
        GroupSpec::Preset(_) => build_algebra(&spec, &mut errs),
        GroupSpec::Inline { structure_constants, step, name } => {
            let n = structure_constants.len();
            let flat: Vec<f64> = structure_constants.iter().flatten().flatten().copied().collect();
            if *step > MAX_STEP {
                errs.push(format!("group.step {step} exceeds the supported maximum {MAX_STEP}"));
            }
            match LieAlgebra::new(n, flat, *step) {
                Ok(a) => Some(a.named(name.clone().unwrap_or_else(|| format!("custom:{n}")))),
                Err(e) => {
                    errs.push(format!("group: {e}"));
                    None
                }
            }
        }
    };
    match alg {
        Some(a) if errs.is_empty() => Ok(a),
        _ => Err(ConfigError { violations: errs }),
    }
}

fn build_algebra(spec: &GroupSpec, errs: &mut Vec<String>) -> Option<LieAlgebra<f64>> {
    match spec {
        GroupSpec::Preset(name) => match LieAlgebra::preset(name) {
            Ok(a) => Some(a),
            Err(e) => {
                errs.push(format!("group: {e}"));
                None
            }
        },
        GroupSpec::Inline {
            structure_constants: c,
            step,
            name,
        } => {
            let n = c.len();
            let mut ok = n > 0;
            for (i, row) in c.iter().enumerate() {
                if row.len() != n {
                    errs.push(format!("group.structure_constants[{i}] has {} entries, expected {n}", row.len()));
                    ok = false;
                }
                for (j, col) in row.iter().enumerate() {
                    if col.len() != n {
                        errs.push(format!(
                            "group.structure_constants[{i}][{j}] has {} entries, expected {n}",
                            col.len()
                        ));
                        ok = false;
                    }
                }
            }
            if n == 0 {
                errs.push("group.structure_constants is empty".into());
            }
            if *step > MAX_STEP {
                errs.push(format!("group.step {step} exceeds the supported maximum {MAX_STEP}"));
                ok = false;
            }
            if !ok {
                return None;
            }
            let flat: Vec<f64> = c.iter().flatten().flatten().copied().collect();
            let alg = match LieAlgebra::new(n, flat, *step) {
                Ok(a) => a.named(name.clone().unwrap_or_else(|| format!("custom:{n}"))),
                Err(e) => {
                    errs.push(format!("group: {e}"));
                    return None;
                }
            };
            let report = validate_algebra(&alg);
            for f in &report.failures {
                errs.push(format!("group: {f}"));
            }
            report.passed().then_some(alg)
        }
    }
}

fn vector_or_zero(v: &Option<Vec<f64>>, n: usize, what: &str, errs: &mut Vec<String>) -> Vec<f64> {
    match v {
        None => vec![0.0; n],
        Some(v) if v.len() == n => v.clone(),
        Some(v) => {
            errs.push(format!("{what}: {} entries for a {n}-dimensional group", v.len()));
            vec![0.0; n]
        }
    }
}

fn positive(v: f64, what: &str, errs: &mut Vec<String>) {
    if !(v.is_finite() && v > 0.0) {
        errs.push(format!("{what} must be positive and finite, got {v}"));
    }
}

pub fn build_symbol(spec: &SymbolSpec, n: usize, errs: &mut Vec<String>) -> Symbol {
    match spec {
        SymbolSpec::One => Symbol::one(n),
        SymbolSpec::Gaussian {
            amplitude,
            x0,
            sx,
            xi0,
            sxi,
        } => {
            positive(*sx, "symbol.sx", errs);
            positive(*sxi, "symbol.sxi", errs);
            let x0 = vector_or_zero(x0, n, "symbol.x0", errs);
            let xi0 = vector_or_zero(xi0, n, "symbol.xi0", errs);
            Symbol::gaussian(*amplitude, x0, *sx, xi0, *sxi)
        }
        SymbolSpec::GroupGaussian { center, sigma } => {
            positive(*sigma, "symbol.sigma", errs);
            let c = vector_or_zero(center, n, "symbol.center", errs);
            Symbol::group_only(Field::gaussian(Domain::Group, c, *sigma)).assume_real()
        }
        SymbolSpec::DualGaussian { center, width } => {
            positive(*width, "symbol.width", errs);
            let c = vector_or_zero(center, n, "symbol.center", errs);
            Symbol::dual_only(n, DualFactor::gaussian(c, vec![*width; n])).assume_real()
        }
        SymbolSpec::Delta { z, zeta } => Symbol::delta(PhasePoint::new(
            vector_or_zero(z, n, "symbol.z", errs),
            vector_or_zero(zeta, n, "symbol.zeta", errs),
        )),
        SymbolSpec::PlaneWave { z, zeta } => Symbol::plane_wave(&PhasePoint::new(
            vector_or_zero(z, n, "symbol.z", errs),
            vector_or_zero(zeta, n, "symbol.zeta", errs),
        )),
    }
}

/// Potential preset name, or a path to a JSON file `{"linear": M}` giving
/// `A_j(x) = Σ_i M[j][i] x_i`.
fn build_potential(spec: &str, n: usize, errs: &mut Vec<String>) -> VectorPotential {
    if spec.ends_with(".json") {
        return match potential_from_file(spec, n) {
            Ok(p) => p,
            Err(e) => {
                errs.push(format!("potential: {e}"));
                VectorPotential::zero(n)
            }
        };
    }
    VectorPotential::preset(spec, n).unwrap_or_else(|e| {
        errs.push(format!("potential: {e}"));
        VectorPotential::zero(n)
    })
}

fn potential_from_file(path: &str, n: usize) -> Result<VectorPotential, String> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct LinearFile {
        linear: Vec<Vec<f64>>,
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    let f: LinearFile = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
    if f.linear.len() != n || f.linear.iter().any(|r| r.len() != n) {
        return Err(format!("{path}: `linear` must be {n}×{n}"));
    }
    let m = f.linear;
    // F_ij = ∂_i A_j - ∂_j A_i = M[j][i] - M[i][j]
    let field: Vec<f64> = (0..n * n).map(|k| m[k % n][k / n] - m[k / n][k % n]).collect();
    let m2 = m.clone();
    Ok(VectorPotential::custom_with_field(
        n,
        move |x| m2.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect(),
        move |_| field.clone(),
    ))
}

fn guard(what: &str, required: f64, limit: f64, over: bool, errs: &mut Vec<String>) {
    if required > limit && !over {
        errs.push(format!(
            "cost guard: {what} needs {required:.3e}, limit {limit:.1e}; set \"{OVERRIDE_KEY}\": true \
             (or pass --override-cost-guard) to run anyway"
        ));
    }
}

fn build(raw: RawConfig, force_override: bool, errs: &mut Vec<String>) -> Option<ExperimentConfig> {
    let group = raw.group.unwrap_or_else(|| GroupSpec::Preset("heisenberg:1".into()));
    let alg = build_algebra(&group, errs)?;
    let n = alg.dim();
    let (dl, dn) = default_grid(n);

    let gspec = raw.grid.unwrap_or(GridSpec {
        half_width: PerAxis::All(dl),
        count: PerAxis::All(dn),
    });
    let (ghw, gn) = (gspec.half_width.expand(n, "grid.half_width", errs), gspec.count.expand(n, "grid.count", errs));
    let xspec = raw.xi.unwrap_or(XiSpec {
        half_width: PerAxis::All(dl),
        count: PerAxis::All(dn),
        dual_half_width: PerAxis::All(dl),
        dual_count: PerAxis::All(dn),
    });
    let xhw = xspec.half_width.expand(n, "xi.half_width", errs);
    let xn = xspec.count.expand(n, "xi.count", errs);
    let dhw = xspec.dual_half_width.expand(n, "xi.dual_half_width", errs);
    let dcount = xspec.dual_count.expand(n, "xi.dual_count", errs);
    for (name, v) in [("grid.half_width", &ghw), ("xi.half_width", &xhw), ("xi.dual_half_width", &dhw)] {
        for x in v {
            positive(*x, name, errs);
        }
    }
    for (name, v) in [("grid.count", &gn), ("xi.count", &xn), ("xi.dual_count", &dcount)] {
        if v.contains(&0) {
            errs.push(format!("{name} must be positive"));
        }
    }

    let over = force_override || raw.override_cost_guard.unwrap_or(false);
    let kernel_nodes: f64 = gn.iter().map(|&c| c as f64).product();
    let z_nodes: f64 = xn.iter().map(|&c| c as f64).product();
    let xi_nodes = z_nodes * dcount.iter().map(|&c| c as f64).product::<f64>();
    guard("kernel grid (nodes)", kernel_nodes, MAX_KERNEL_NODES, over, errs);
    guard("Ξ grid (nodes)", xi_nodes, MAX_XI_NODES, over, errs);
    let scheme = raw.scheme.unwrap_or(Scheme::Berezin);
    if matches!(scheme, Scheme::Berezin | Scheme::Magnetic) {
        guard("Berezin assembly (z-nodes × kernel nodes²)", z_nodes * kernel_nodes * kernel_nodes, MAX_WORK, over, errs);
    }

    let win = raw.window.unwrap_or(WindowSpec {
        sigma: 1.0,
        center: None,
    });
    positive(win.sigma, "window.sigma", errs);
    let window_center = vector_or_zero(&win.center, n, "window.center", errs);

    let symbol_spec = raw.symbol.unwrap_or(SymbolSpec::Gaussian {
        amplitude: 1.0,
        x0: None,
        sx: 1.0,
        xi0: None,
        sxi: 1.0,
    });
    let symbol = build_symbol(&symbol_spec, n, errs);

    let tau = match raw.tau.as_deref() {
        None => TauMap::e(),
        Some(t) => TauMap::by_name(t).unwrap_or_else(|e| {
            errs.push(format!("tau: {e}"));
            TauMap::e()
        }),
    };
    if raw.tau.is_some() && scheme != Scheme::Tau {
        errs.push("tau is only used by the tau scheme".into());
    }
    let potential = match raw.potential.as_deref() {
        None => VectorPotential::zero(n),
        Some(p) => build_potential(p, n, errs),
    };
    if raw.potential.is_some() && scheme != Scheme::Magnetic {
        errs.push("potential is only used by the magnetic scheme".into());
    }
    let tolerances = raw.tolerances.unwrap_or_default();
    for (k, v) in &tolerances {
        if !(v.is_finite() && *v >= 0.0) {
            errs.push(format!("tolerances.{k} must be a non-negative number"));
        }
    }

    if !errs.is_empty() {
        return None;
    }
    let grid = Grid::new(ghw, gn).map_err(|e| errs.push(format!("grid: {e}"))).ok()?;
    let xi = XiGrid::new(Grid::new(xhw, xn).ok()?, Grid::new(dhw, dcount).ok()?)
        .map_err(|e| errs.push(format!("xi: {e}")))
        .ok()?;
    Some(ExperimentConfig {
        alg,
        grid,
        xi,
        window_sigma: win.sigma,
        window_center,
        symbol_spec,
        symbol,
        scheme,
        tau,
        potential,
        output_dir: raw.output.map(|o| o.dir).unwrap_or_else(default_out),
        seed: raw.seed.unwrap_or(crate::suite::DEFAULT_SEED),
        tolerances,
        override_cost_guard: over,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse_config(r#"{"group": "heisenberg:1"}"#).unwrap();
        assert_eq!(c.alg.dim(), 3);
        assert_eq!(c.grid.len(), 729);
        assert_eq!(c.scheme, Scheme::Berezin);
        assert_eq!(c.window_sigma, 1.0);
        assert!(!c.override_cost_guard);
    }

    #[test]
    fn every_violation_is_listed() {
        let e = parse_config(
            r#"{"group": "abelian:2", "colour": 1, "grid": {"half_width": 3, "count": 8, "extra": 0},
                "window": {"sigma": -1}, "symbol": {"kind": "gaussian", "x0": [1, 2, 3]}}"#,
        )
        .unwrap_err();
        let all = e.violations.join("\n");
        assert!(all.contains("`colour`"), "{all}");
        assert!(all.contains("`grid.extra`"), "{all}");
        assert!(all.contains("window.sigma"), "{all}");
        assert!(all.contains("symbol.x0"), "{all}");
        assert_eq!(e.violations.len(), 4);
        let e = parse_config(r#"{"group": "abelian:1", "symbol": {"kind": "one", "sigma": 2}}"#).unwrap_err();
        assert!(e.violations[0].contains("`symbol.sigma`"), "{e}");
    }

    #[test]
    fn antisymmetry_is_enforced() {
        // c[0][1][2] = 1 without c[1][0][2] = -1
        let mut c = vec![vec![vec![0.0; 3]; 3]; 3];
        c[0][1][2] = 1.0;
        let text = serde_json::json!({"group": {"structure_constants": c, "step": 2}}).to_string();
        let e = parse_config(&text).unwrap_err();
        assert!(e.violations.iter().any(|v| v.contains("antisym")), "{e}");
    }

    #[test]
    fn step_above_six_is_rejected() {
        let c = vec![vec![vec![0.0; 2]; 2]; 2];
        let text = serde_json::json!({"group": {"structure_constants": c, "step": 7}}).to_string();
        assert!(parse_config(&text).unwrap_err().violations[0].contains("step"));
    }

    #[test]
    fn large_xi_grid_needs_override() {
        let text = r#"{"group": "heisenberg:1", "grid": {"half_width": 4, "count": 9},
            "xi": {"half_width": 4, "count": 64, "dual_half_width": 4, "dual_count": 64}}"#;
        let e = parse_config(text).unwrap_err();
        assert!(e.violations.iter().any(|v| v.contains(OVERRIDE_KEY) && v.contains("Ξ grid")), "{e}");
        assert!(parse_config_with(text, true).is_ok());
    }

    #[test]
    fn inline_group_matches_preset() {
        let mut c = vec![vec![vec![0.0; 3]; 3]; 3];
        c[0][1][2] = 1.0;
        c[1][0][2] = -1.0;
        let text = serde_json::json!({"group": {"structure_constants": c, "step": 2}}).to_string();
        let cfg = parse_config(&text).unwrap();
        let h = LieAlgebra::<f64>::heisenberg(1).unwrap();
        assert_eq!(cfg.alg.bch(&[0.3, 0.1, 0.0], &[-0.2, 0.5, 0.0]).unwrap(), h.bch(&[0.3, 0.1, 0.0], &[-0.2, 0.5, 0.0]).unwrap());
    }

    #[test]
    fn scheme_options_are_checked() {
        let e = parse_config(r#"{"group": "abelian:2", "tau": "symmetric"}"#).unwrap_err();
        assert!(e.violations[0].contains("tau scheme"));
        assert!(parse_config(r#"{"group": "abelian:2", "scheme": "magnetic", "potential": "landau:1"}"#).is_ok());
        assert!(parse_config(r#"{"group": "abelian:2", "scheme": "magnetic", "potential": "swirl"}"#).is_err());
    }
}
