//! Configuration: paper-valued defaults, strict key=value config files, and
//! flag overrides (flags win over the file, the file over defaults).
//!
//! Units at this boundary follow the quoted experimental values: frequencies
//! in GHz and rates in MHz (both as cycles, i.e. divided by 2π), detunings,
//! drive and gain as κm multiples, temperature in mK, sphere diameter in µm.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cavmag::model::{units, SystemParams};
use cavmag::sweep::{Axis, AxisParam, GridSpec, Spacing};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Physical-parameter overrides in user units. `None` = keep the value the
/// preset or the paper default provides.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParamOverrides {
    pub omega1_ghz: Option<f64>,
    pub kappa_m_mhz: Option<f64>,
    pub kappa1_mhz: Option<f64>,
    pub kappa2_mhz: Option<f64>,
    pub g1_mhz: Option<f64>,
    pub g2_mhz: Option<f64>,
    pub delta1_km: Option<f64>,
    pub delta2_km: Option<f64>,
    pub delta_m_km: Option<f64>,
    pub eps_p_km: Option<f64>,
    pub gain_km: Option<f64>,
    pub temperature_mk: Option<f64>,
    pub sphere_diameter_um: Option<f64>,
    pub spin_density: Option<f64>,
    pub spin_number: Option<f64>,
}

impl ParamOverrides {
    /// Layer `other` on top of `self` (`other` wins where set).
    pub fn merged_with(mut self, other: &ParamOverrides) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            omega1_ghz, kappa_m_mhz, kappa1_mhz, kappa2_mhz, g1_mhz, g2_mhz, delta1_km,
            delta2_km, delta_m_km, eps_p_km, gain_km, temperature_mk, sphere_diameter_um,
            spin_density, spin_number
        );
        self
    }

    /// Apply to a parameter set. κm-relative values are resolved against the
    /// (possibly overridden) κm, so overrides are order-independent.
    pub fn apply_to(&self, p: &mut SystemParams) {
        if let Some(v) = self.omega1_ghz {
            p.omega1 = units::ghz(v);
        }
        if let Some(v) = self.kappa_m_mhz {
            p.kappa_m = units::mhz(v);
        }
        let km = p.kappa_m;
        if let Some(v) = self.kappa1_mhz {
            p.kappa1 = units::mhz(v);
        }
        if let Some(v) = self.kappa2_mhz {
            p.kappa2 = units::mhz(v);
        }
        if let Some(v) = self.g1_mhz {
            p.g1 = units::mhz(v);
        }
        if let Some(v) = self.g2_mhz {
            p.g2 = units::mhz(v);
        }
        if let Some(v) = self.delta1_km {
            p.delta1 = v * km;
        }
        if let Some(v) = self.delta2_km {
            p.delta2 = v * km;
        }
        if let Some(v) = self.delta_m_km {
            p.delta_m = v * km;
        }
        if let Some(v) = self.eps_p_km {
            p.eps_p = v * km;
        }
        if let Some(v) = self.gain_km {
            p.gain = v * km;
        }
        if let Some(v) = self.temperature_mk {
            p.temperature = units::millikelvin(v);
        }
        if let Some(v) = self.sphere_diameter_um {
            p.sphere.diameter = v * 1e-6;
        }
        if let Some(v) = self.spin_density {
            p.sphere.spin_density = v;
        }
        if let Some(v) = self.spin_number {
            p.sphere.spin_number = v;
        }
    }

    pub fn to_params(&self) -> SystemParams {
        let mut p = SystemParams::paper_defaults();
        self.apply_to(&mut p);
        p
    }
}

/// Axis description string `param:min:max:count[:log]`.
#[derive(Debug, Clone)]
pub struct AxisSpec(pub Axis);

impl FromStr for AxisSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 && parts.len() != 5 {
            return err(format!(
                "axis `{s}` must be param:min:max:count[:log] \
                 (params: delta1, delta2, deltaM, gain, g2_over_g1, temperature, epsP)"
            ));
        }
        let param: AxisParam = parts[0]
            .parse()
            .map_err(|e| ConfigError(format!("axis `{s}`: {e}")))?;
        let min: f64 = parts[1]
            .parse()
            .map_err(|_| ConfigError(format!("axis `{s}`: bad min `{}`", parts[1])))?;
        let max: f64 = parts[2]
            .parse()
            .map_err(|_| ConfigError(format!("axis `{s}`: bad max `{}`", parts[2])))?;
        let count: usize = parts[3]
            .parse()
            .map_err(|_| ConfigError(format!("axis `{s}`: bad count `{}`", parts[3])))?;
        let spacing = match parts.get(4) {
            None => Spacing::Linear,
            Some(&"log") => Spacing::Log,
            Some(other) => return err(format!("axis `{s}`: unknown spacing `{other}`")),
        };
        Ok(AxisSpec(Axis {
            param,
            min,
            max,
            count,
            spacing,
        }))
    }
}

/// Everything a run can configure. Defaults mirror the experimental working
/// point; see `ParamOverrides` for units.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub params: ParamOverrides,
    pub preset: Option<String>,
    pub axis1: Option<Axis>,
    pub axis2: Option<Axis>,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn merged_with(mut self, other: RunConfig) -> Self {
        self.params = self.params.merged_with(&other.params);
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(preset, axis1, axis2, out_csv, out_json, workers);
        self
    }

    /// Resolve the sweep spec: a preset (with parameter and axis overrides
    /// layered on top) or a fully explicit axis1[/axis2] pair.
    pub fn to_grid_spec(&self) -> Result<GridSpec, ConfigError> {
        let mut spec = match &self.preset {
            Some(name) => cavmag::sweep::figure_preset(name).map_err(|e| ConfigError(e.to_string()))?,
            None => {
                let axis1 = self.axis1.ok_or_else(|| {
                    ConfigError("sweep needs --preset or --axis1 (and optional --axis2)".into())
                })?;
                GridSpec {
                    base: SystemParams::paper_defaults(),
                    axis1,
                    axis2: self.axis2,
                }
            }
        };
        self.params.apply_to(&mut spec.base);
        if self.preset.is_some() {
            if let Some(ax) = self.axis1 {
                spec.axis1 = ax;
            }
            if let Some(ax) = self.axis2 {
                spec.axis2 = Some(ax);
            }
        }
        spec.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(spec)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "omega1", "kappa_m", "kappa1", "kappa2", "g1", "g2", "delta1", "delta2", "delta_m", "eps_p",
    "gain", "temperature", "sphere_diameter", "spin_density", "spin_number", "preset", "axis1",
    "axis2", "out_csv", "out_json", "workers",
];

/// Strict `key = value` config file: `#` comments, unknown or duplicate keys
/// are hard errors, never silent defaults.
pub fn load_config_file(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::default();
    let mut seen = BTreeSet::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(format!(
                "{}:{}: expected `key = value`, got `{raw}`",
                path.display(),
                lineno + 1
            ));
        };
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return err(format!(
                "{}:{}: unknown key `{key}` (known keys: {})",
                path.display(),
                lineno + 1,
                KNOWN_KEYS.join(", ")
            ));
        }
        if !seen.insert(key.to_string()) {
            return err(format!(
                "{}:{}: duplicate key `{key}`",
                path.display(),
                lineno + 1
            ));
        }
        let num = |v: &str| -> Result<f64, ConfigError> {
            v.parse()
                .map_err(|_| ConfigError(format!("{}:{}: `{key}` needs a number, got `{v}`", path.display(), lineno + 1)))
        };
        match key {
            "omega1" => cfg.params.omega1_ghz = Some(num(value)?),
            "kappa_m" => cfg.params.kappa_m_mhz = Some(num(value)?),
            "kappa1" => cfg.params.kappa1_mhz = Some(num(value)?),
            "kappa2" => cfg.params.kappa2_mhz = Some(num(value)?),
            "g1" => cfg.params.g1_mhz = Some(num(value)?),
            "g2" => cfg.params.g2_mhz = Some(num(value)?),
            "delta1" => cfg.params.delta1_km = Some(num(value)?),
            "delta2" => cfg.params.delta2_km = Some(num(value)?),
            "delta_m" => cfg.params.delta_m_km = Some(num(value)?),
            "eps_p" => cfg.params.eps_p_km = Some(num(value)?),
            "gain" => cfg.params.gain_km = Some(num(value)?),
            "temperature" => cfg.params.temperature_mk = Some(num(value)?),
            "sphere_diameter" => cfg.params.sphere_diameter_um = Some(num(value)?),
            "spin_density" => cfg.params.spin_density = Some(num(value)?),
            "spin_number" => cfg.params.spin_number = Some(num(value)?),
            "preset" => cfg.preset = Some(value.to_string()),
            "axis1" => cfg.axis1 = Some(value.parse::<AxisSpec>()?.0),
            "axis2" => cfg.axis2 = Some(value.parse::<AxisSpec>()?.0),
            "out_csv" => cfg.out_csv = Some(PathBuf::from(value)),
            "out_json" => cfg.out_json = Some(PathBuf::from(value)),
            "workers" => {
                cfg.workers = Some(value.parse().map_err(|_| {
                    ConfigError(format!(
                        "{}:{}: `workers` needs a non-negative integer, got `{value}`",
                        path.display(),
                        lineno + 1
                    ))
                })?)
            }
            _ => unreachable!("key membership checked above"),
        }
    }
    Ok(cfg)
}
