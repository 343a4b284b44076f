//! Simulation parameters and the `key = value` configuration format.
//!
//! A configuration file is UTF-8 text, one assignment per line. Everything
//! after `#` is a comment. Required keys:
//!
//! `Lx, Ly, nx, ny, T, dt, K, beta, mu_e, D, kappa, R`
//!
//! Optional keys (defaults in parentheses):
//!
//! * `trunc_level` (none) - clamp level for the viscosity argument
//! * `fx`, `fy` (0) - constant body force
//! * `u0x`, `u0y` (0) - constant initial velocity
//! * `c0_mode` (`const`) - `const` or `step`
//! * `c0_value` (0) - constant value, or the plateau value of the step
//! * `step_xlo`, `step_xhi` - extent of the step plateau in x (required for `step`)
//! * `dt_mode` (`adaptive`) - `adaptive` caps `dt` by the stability bound,
//!   `fixed` uses `dt` as-is and fails if it exceeds the bound
//!
//! Unknown keys are rejected.

use std::collections::HashMap;

use crate::error::ConfigError;

/// Time step selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    /// Every step uses exactly this size (except the last, which lands on `T`).
    Fixed(f64),
    /// Steps use `min(max, stable_dt)`.
    Adaptive { max: f64 },
}

impl DtPolicy {
    pub fn nominal(&self) -> f64 {
        match *self {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Adaptive { max } => max,
        }
    }
}

/// A scalar coefficient that is either uniform or given per cell.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarField {
    Constant(f64),
    PerCell(Vec<f64>),
}

impl ScalarField {
    #[inline]
    pub fn at(&self, cell: usize) -> f64 {
        match self {
            ScalarField::Constant(v) => *v,
            ScalarField::PerCell(values) => values[cell],
        }
    }

    pub fn min(&self) -> f64 {
        match self {
            ScalarField::Constant(v) => *v,
            ScalarField::PerCell(values) => values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            ScalarField::Constant(v) => *v,
            ScalarField::PerCell(values) => {
                values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    fn len(&self) -> Option<usize> {
        match self {
            ScalarField::Constant(_) => None,
            ScalarField::PerCell(values) => Some(values.len()),
        }
    }

    fn all_finite(&self) -> bool {
        match self {
            ScalarField::Constant(v) => v.is_finite(),
            ScalarField::PerCell(values) => values.iter().all(|v| v.is_finite()),
        }
    }
}

/// A cell-centered vector field (body force).
#[derive(Debug, Clone, PartialEq)]
pub enum VectorField {
    Zero,
    Constant(f64, f64),
    PerCell(Vec<[f64; 2]>),
}

impl VectorField {
    #[inline]
    pub fn at(&self, cell: usize) -> [f64; 2] {
        match self {
            VectorField::Zero => [0.0, 0.0],
            VectorField::Constant(x, y) => [*x, *y],
            VectorField::PerCell(values) => values[cell],
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            VectorField::Zero => true,
            VectorField::Constant(x, y) => *x == 0.0 && *y == 0.0,
            VectorField::PerCell(values) => values.iter().all(|f| f[0] == 0.0 && f[1] == 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialVelocity {
    Constant(f64, f64),
    /// Face-normal values on the u-faces and v-faces of the grid.
    PerFace {
        u: Vec<f64>,
        v: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialConcentration {
    Constant(f64),
    /// `value` on cells whose center has `x_lo <= x < x_hi`, zero elsewhere.
    Step {
        value: f64,
        x_lo: f64,
        x_hi: f64,
    },
    PerCell(Vec<f64>),
}

/// All physical and numerical parameters of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// `(Lx, Ly)`: the domain is `(0, Lx) x (0, Ly)`.
    pub domain_extent: (f64, f64),
    /// `(nx, ny)` cell counts.
    pub resolution: (usize, usize),
    pub end_time: f64,
    pub dt_policy: DtPolicy,
    /// Permeability `K`.
    pub permeability: f64,
    /// Forchheimer coefficient `beta`.
    pub forchheimer: ScalarField,
    /// Brinkman viscosity `mu_e`.
    pub effective_viscosity: f64,
    /// Molecular diffusion `D`.
    pub diffusion: f64,
    /// Reaction rate `kappa`.
    pub reaction_rate: ScalarField,
    /// Exponent `R` in `mu(c) = exp(R c)`.
    pub viscosity_contrast: f64,
    pub viscosity_truncation: Option<f64>,
    pub forcing: VectorField,
    pub initial_velocity: InitialVelocity,
    pub initial_concentration: InitialConcentration,
}

impl SimConfig {
    /// The reference porous-medium setup: `(0,400) x (0,200)` on a 100x50
    /// grid, `D = 0.005`, `R = 1`, `kappa = 0.01`, unit `K`, `beta`, `mu_e`,
    /// initial velocity `(0.1, 0)` and a step of height 0.8 on `50 <= x <= 150`.
    pub fn reference() -> Self {
        SimConfig {
            domain_extent: (400.0, 200.0),
            resolution: (100, 50),
            end_time: 2000.0,
            dt_policy: DtPolicy::Adaptive { max: 1.0 },
            permeability: 1.0,
            forchheimer: ScalarField::Constant(1.0),
            effective_viscosity: 1.0,
            diffusion: 0.005,
            reaction_rate: ScalarField::Constant(0.01),
            viscosity_contrast: 1.0,
            viscosity_truncation: None,
            forcing: VectorField::Zero,
            initial_velocity: InitialVelocity::Constant(0.1, 0.0),
            initial_concentration: InitialConcentration::Step {
                value: 0.8,
                x_lo: 50.0,
                x_hi: 150.0,
            },
        }
    }

    pub fn cell_count(&self) -> usize {
        self.resolution.0 * self.resolution.1
    }

    /// Lower and upper bounds `(kappa_1, kappa_2)` of the reaction rate.
    pub fn kappa_bounds(&self) -> (f64, f64) {
        (self.reaction_rate.min(), self.reaction_rate.max())
    }

    pub fn domain_measure(&self) -> f64 {
        self.domain_extent.0 * self.domain_extent.1
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |msg: String| Err(ConfigError::constraint(msg));
        let (lx, ly) = self.domain_extent;
        let (nx, ny) = self.resolution;
        if !(lx > 0.0 && lx.is_finite() && ly > 0.0 && ly.is_finite()) {
            return err(format!("domain extents must be positive, got ({lx}, {ly})"));
        }
        if nx < 2 || ny < 2 {
            return err(format!("nx and ny must be >= 2, got ({nx}, {ny})"));
        }
        if !(self.end_time > 0.0 && self.end_time.is_finite()) {
            return err(format!("T must be positive, got {}", self.end_time));
        }
        let dt = self.dt_policy.nominal();
        if !(dt > 0.0 && dt.is_finite()) {
            return err(format!("dt must be positive, got {dt}"));
        }
        if !(self.permeability > 0.0 && self.permeability.is_finite()) {
            return err(format!("K must be positive, got {}", self.permeability));
        }
        if !(self.effective_viscosity > 0.0 && self.effective_viscosity.is_finite()) {
            return err(format!(
                "mu_e must be positive, got {}",
                self.effective_viscosity
            ));
        }
        if !(self.diffusion > 0.0 && self.diffusion.is_finite()) {
            return err(format!("D must be positive, got {}", self.diffusion));
        }
        if !self.viscosity_contrast.is_finite() {
            return err(format!("R must be finite, got {}", self.viscosity_contrast));
        }
        if let Some(level) = self.viscosity_truncation {
            if !(level > 0.0 && level.is_finite()) {
                return err(format!("trunc_level must be positive, got {level}"));
            }
        }

        let ncells = nx * ny;
        for (name, field) in [("beta", &self.forchheimer), ("kappa", &self.reaction_rate)] {
            if let Some(len) = field.len() {
                if len != ncells {
                    return err(format!("{name} has {len} values, grid has {ncells} cells"));
                }
            }
            if !field.all_finite() {
                return err(format!("{name} must be finite"));
            }
        }
        if self.forchheimer.min() < 0.0 {
            return err("beta must be >= 0 everywhere".to_string());
        }
        let (k1, k2) = self.kappa_bounds();
        if !(k1 > 0.0) || k1 > k2 {
            return err(format!(
                "kappa must satisfy 0 < kappa_1 <= kappa_2, got [{k1}, {k2}]"
            ));
        }

        match &self.forcing {
            VectorField::PerCell(values) if values.len() != ncells => {
                return err(format!(
                    "forcing has {} values, grid has {ncells} cells",
                    values.len()
                ));
            }
            VectorField::Constant(x, y) if !(x.is_finite() && y.is_finite()) => {
                return err("forcing must be finite".to_string());
            }
            _ => {}
        }
        match &self.initial_velocity {
            InitialVelocity::Constant(x, y) if !(x.is_finite() && y.is_finite()) => {
                return err("initial velocity must be finite".to_string());
            }
            InitialVelocity::PerFace { u, v } => {
                let (nu, nv) = ((nx + 1) * ny, nx * (ny + 1));
                if u.len() != nu || v.len() != nv {
                    return err(format!(
                        "initial velocity needs {nu} u-faces and {nv} v-faces, got {} and {}",
                        u.len(),
                        v.len()
                    ));
                }
            }
            _ => {}
        }
        match &self.initial_concentration {
            InitialConcentration::Constant(v) if !v.is_finite() => {
                return err("c0_value must be finite".to_string());
            }
            InitialConcentration::Step { value, x_lo, x_hi } => {
                if !value.is_finite() {
                    return err("c0_value must be finite".to_string());
                }
                if !(0.0 <= *x_lo && x_lo < x_hi && *x_hi <= lx) {
                    return err(format!(
                        "step requires 0 <= step_xlo < step_xhi <= Lx, got [{x_lo}, {x_hi}]"
                    ));
                }
            }
            InitialConcentration::PerCell(values) if values.len() != ncells => {
                return err(format!(
                    "initial concentration has {} values, grid has {ncells} cells",
                    values.len()
                ));
            }
            _ => {}
        }
        Ok(())
    }
}

const REQUIRED: [&str; 12] = [
    "Lx", "Ly", "nx", "ny", "T", "dt", "K", "beta", "mu_e", "D", "kappa", "R",
];
const OPTIONAL: [&str; 10] = [
    "trunc_level",
    "fx",
    "fy",
    "u0x",
    "u0y",
    "c0_mode",
    "c0_value",
    "step_xlo",
    "step_xhi",
    "dt_mode",
];

struct Entry {
    line: usize,
    value: String,
}

struct Entries(HashMap<String, Entry>);

impl Entries {
    fn number(&self, key: &'static str) -> Result<Option<(f64, usize)>, ConfigError> {
        let Some(entry) = self.0.get(key) else {
            return Ok(None);
        };
        let value: f64 = entry.value.parse().map_err(|_| ConfigError::BadValue {
            line: entry.line,
            key: key.to_string(),
            value: entry.value.clone(),
        })?;
        if !value.is_finite() {
            return Err(ConfigError::BadValue {
                line: entry.line,
                key: key.to_string(),
                value: entry.value.clone(),
            });
        }
        Ok(Some((value, entry.line)))
    }

    fn required(&self, key: &'static str) -> Result<(f64, usize), ConfigError> {
        self.number(key)?.ok_or(ConfigError::MissingKey(key))
    }

    fn count(&self, key: &'static str) -> Result<usize, ConfigError> {
        let entry = self.0.get(key).ok_or(ConfigError::MissingKey(key))?;
        let value: i64 = entry.value.parse().map_err(|_| ConfigError::BadValue {
            line: entry.line,
            key: key.to_string(),
            value: entry.value.clone(),
        })?;
        if value < 2 {
            return Err(ConfigError::Constraint {
                line: Some(entry.line),
                message: format!("{key} must be an integer >= 2, got {value}"),
            });
        }
        Ok(value as usize)
    }

    fn positive(&self, key: &'static str) -> Result<f64, ConfigError> {
        let (value, line) = self.required(key)?;
        if value <= 0.0 {
            return Err(ConfigError::Constraint {
                line: Some(line),
                message: format!("{key} must be positive, got {value}"),
            });
        }
        Ok(value)
    }

    fn word(&self, key: &'static str) -> Option<(&str, usize)> {
        self.0.get(key).map(|e| (e.value.as_str(), e.line))
    }
}

/// Parses the `key = value` configuration format into a validated [`SimConfig`].
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let mut entries = HashMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if !REQUIRED.contains(&key) && !OPTIONAL.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        }
        let previous = entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
        if previous.is_some() {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
            });
        }
    }
    let entries = Entries(entries);

    let lx = entries.positive("Lx")?;
    let ly = entries.positive("Ly")?;
    let nx = entries.count("nx")?;
    let ny = entries.count("ny")?;
    let end_time = entries.positive("T")?;
    let dt = entries.positive("dt")?;
    let permeability = entries.positive("K")?;
    let (beta, beta_line) = entries.required("beta")?;
    if beta < 0.0 {
        return Err(ConfigError::Constraint {
            line: Some(beta_line),
            message: format!("beta must be >= 0, got {beta}"),
        });
    }
    let mu_e = entries.positive("mu_e")?;
    let diffusion = entries.positive("D")?;
    let kappa = entries.positive("kappa")?;
    let (contrast, _) = entries.required("R")?;

    let viscosity_truncation = match entries.number("trunc_level")? {
        Some((level, line)) if level <= 0.0 => {
            return Err(ConfigError::Constraint {
                line: Some(line),
                message: format!("trunc_level must be positive, got {level}"),
            })
        }
        other => other.map(|(level, _)| level),
    };
    let fx = entries.number("fx")?.map_or(0.0, |v| v.0);
    let fy = entries.number("fy")?.map_or(0.0, |v| v.0);
    let forcing = if fx == 0.0 && fy == 0.0 {
        VectorField::Zero
    } else {
        VectorField::Constant(fx, fy)
    };
    let u0x = entries.number("u0x")?.map_or(0.0, |v| v.0);
    let u0y = entries.number("u0y")?.map_or(0.0, |v| v.0);

    let c0_value = entries.number("c0_value")?.map_or(0.0, |v| v.0);
    let initial_concentration = match entries.word("c0_mode") {
        None | Some(("const", _)) => InitialConcentration::Constant(c0_value),
        Some(("step", line)) => {
            let (x_lo, _) = entries
                .number("step_xlo")?
                .ok_or(ConfigError::MissingKey("step_xlo"))?;
            let (x_hi, _) = entries
                .number("step_xhi")?
                .ok_or(ConfigError::MissingKey("step_xhi"))?;
            if !(0.0 <= x_lo && x_lo < x_hi && x_hi <= lx) {
                return Err(ConfigError::Constraint {
                    line: Some(line),
                    message: format!(
                        "step requires 0 <= step_xlo < step_xhi <= Lx, got [{x_lo}, {x_hi}]"
                    ),
                });
            }
            InitialConcentration::Step {
                value: c0_value,
                x_lo,
                x_hi,
            }
        }
        Some((other, line)) => {
            return Err(ConfigError::BadValue {
                line,
                key: "c0_mode".to_string(),
                value: other.to_string(),
            })
        }
    };
    let dt_policy = match entries.word("dt_mode") {
        None | Some(("adaptive", _)) => DtPolicy::Adaptive { max: dt },
        Some(("fixed", _)) => DtPolicy::Fixed(dt),
        Some((other, line)) => {
            return Err(ConfigError::BadValue {
                line,
                key: "dt_mode".to_string(),
                value: other.to_string(),
            })
        }
    };

    let config = SimConfig {
        domain_extent: (lx, ly),
        resolution: (nx, ny),
        end_time,
        dt_policy,
        permeability,
        forchheimer: ScalarField::Constant(beta),
        effective_viscosity: mu_e,
        diffusion,
        reaction_rate: ScalarField::Constant(kappa),
        viscosity_contrast: contrast,
        viscosity_truncation,
        forcing,
        initial_velocity: InitialVelocity::Constant(u0x, u0y),
        initial_concentration,
    };
    config.validate()?;
    Ok(config)
}

/// Renders a configuration in the text format. Only uniform coefficients and
/// constant/step initial data are representable.
pub fn format_config(config: &SimConfig) -> Option<String> {
    let ScalarField::Constant(beta) = config.forchheimer else {
        return None;
    };
    let ScalarField::Constant(kappa) = config.reaction_rate else {
        return None;
    };
    let InitialVelocity::Constant(u0x, u0y) = config.initial_velocity else {
        return None;
    };
    let (fx, fy) = match config.forcing {
        VectorField::Zero => (0.0, 0.0),
        VectorField::Constant(x, y) => (x, y),
        VectorField::PerCell(_) => return None,
    };
    let mut out = String::new();
    let mut put = |key: &str, value: String| {
        out.push_str(key);
        out.push_str(" = ");
        out.push_str(&value);
        out.push('\n');
    };
    put("Lx", config.domain_extent.0.to_string());
    put("Ly", config.domain_extent.1.to_string());
    put("nx", config.resolution.0.to_string());
    put("ny", config.resolution.1.to_string());
    put("T", config.end_time.to_string());
    put("dt", config.dt_policy.nominal().to_string());
    if let DtPolicy::Fixed(_) = config.dt_policy {
        put("dt_mode", "fixed".to_string());
    }
    put("K", config.permeability.to_string());
    put("beta", beta.to_string());
    put("mu_e", config.effective_viscosity.to_string());
    put("D", config.diffusion.to_string());
    put("kappa", kappa.to_string());
    put("R", config.viscosity_contrast.to_string());
    if let Some(level) = config.viscosity_truncation {
        put("trunc_level", level.to_string());
    }
    put("fx", fx.to_string());
    put("fy", fy.to_string());
    put("u0x", u0x.to_string());
    put("u0y", u0y.to_string());
    match config.initial_concentration {
        InitialConcentration::Constant(v) => {
            put("c0_mode", "const".to_string());
            put("c0_value", v.to_string());
        }
        InitialConcentration::Step { value, x_lo, x_hi } => {
            put("c0_mode", "step".to_string());
            put("c0_value", value.to_string());
            put("step_xlo", x_lo.to_string());
            put("step_xhi", x_hi.to_string());
        }
        InitialConcentration::PerCell(_) => return None,
    }
    Some(out)
}
