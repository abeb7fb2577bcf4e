//! Run configuration from a `key = value` file and command-line overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{FksError, Result};
use crate::grid::{Boundary, SpatialGrid, VelocityGrid};
use crate::presets::{Preset, PresetName};
use crate::solver::{SolverConfig, SplittingOrder};

/// Keys accepted in config files and as flags.
pub const KEYS: [&str; 14] = [
    "preset", "nx", "nv", "vmin", "vmax", "tau", "tfinal", "cfl", "order", "bc", "out", "format",
    "ref", "report",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Vtk,
}

impl FromStr for OutputFormat {
    type Err = FksError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "vtk" => Ok(OutputFormat::Vtk),
            other => Err(config_error(
                "format",
                format!("expected `csv` or `vtk`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    Riemann,
    Upwind,
    None,
}

impl FromStr for Reference {
    type Err = FksError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "riemann" => Ok(Reference::Riemann),
            "upwind" => Ok(Reference::Upwind),
            "none" => Ok(Reference::None),
            other => Err(config_error(
                "ref",
                format!("expected `riemann`, `upwind` or `none`, got `{other}`"),
            )),
        }
    }
}

fn config_error(key: &str, reason: impl Into<String>) -> FksError {
    FksError::Config {
        key: key.into(),
        reason: reason.into(),
    }
}

/// Fully resolved run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub nx: usize,
    pub nv: usize,
    pub vmin: f64,
    pub vmax: f64,
    pub tau: f64,
    pub tfinal: f64,
    pub cfl: f64,
    pub order: SplittingOrder,
    pub boundary: Boundary,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub reference: Reference,
    pub report: Option<PathBuf>,
}

/// Parses `key = value` lines; `#` starts a comment. Repeated keys are an error.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            config_error(line, format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if let Some(prev) = seen.insert(key.clone(), value.clone()) {
            if prev != value {
                return Err(config_error(
                    &key,
                    format!("conflicting values `{prev}` and `{value}`"),
                ));
            }
            continue;
        }
        out.push((key, value));
    }
    Ok(out)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| config_error(key, format!("cannot parse `{value}`")))
}

impl RunConfig {
    /// Merges file entries with overrides (overrides win) and validates.
    pub fn from_sources(file: Option<&str>, overrides: &[(String, String)]) -> Result<Self> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        if let Some(text) = file {
            for (k, v) in parse_key_values(text)? {
                map.insert(k, v);
            }
        }
        for (k, v) in overrides {
            map.insert(k.clone(), v.clone());
        }
        for key in map.keys() {
            if !KEYS.contains(&key.as_str()) {
                return Err(config_error(key, "unknown key"));
            }
        }

        let name: PresetName = map
            .get("preset")
            .ok_or_else(|| config_error("preset", "a preset is required"))?
            .parse()?;
        let preset = Preset::new(name);
        let get = |key: &str| map.get(key).map(String::as_str);

        let cfg = RunConfig {
            nx: get("nx")
                .map(|v| parse_value("nx", v))
                .transpose()?
                .unwrap_or(preset.nx),
            nv: get("nv")
                .map(|v| parse_value("nv", v))
                .transpose()?
                .unwrap_or(preset.nv),
            vmin: get("vmin")
                .map(|v| parse_value("vmin", v))
                .transpose()?
                .unwrap_or(preset.vmin),
            vmax: get("vmax")
                .map(|v| parse_value("vmax", v))
                .transpose()?
                .unwrap_or(preset.vmax),
            tau: get("tau")
                .map(|v| parse_value("tau", v))
                .transpose()?
                .unwrap_or(preset.tau),
            tfinal: get("tfinal")
                .map(|v| parse_value("tfinal", v))
                .transpose()?
                .unwrap_or(preset.tfinal),
            cfl: get("cfl")
                .map(|v| parse_value("cfl", v))
                .transpose()?
                .unwrap_or(preset.safety),
            order: get("order")
                .map(|v| parse_value::<u32>("order", v))
                .transpose()?
                .map(SplittingOrder::try_from)
                .transpose()?
                .unwrap_or(SplittingOrder::First),
            boundary: get("bc")
                .map(str::parse)
                .transpose()?
                .unwrap_or(preset.boundary),
            out: get("out").map(PathBuf::from),
            format: get("format")
                .map(str::parse)
                .transpose()?
                .unwrap_or(OutputFormat::Csv),
            reference: get("ref")
                .map(str::parse)
                .transpose()?
                .unwrap_or(Reference::None),
            report: get("report").map(PathBuf::from),
            preset,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(config_error(
                "cfl",
                format!("safety must be in (0, 1], got {}", self.cfl),
            ));
        }
        if self.nx == 0 {
            return Err(config_error("nx", "need at least one cell"));
        }
        if self.nv < 2 {
            return Err(config_error(
                "nv",
                "need at least two velocity points per axis",
            ));
        }
        if !(self.vmin.is_finite() && self.vmax.is_finite() && self.vmax > self.vmin) {
            return Err(config_error(
                "vmax",
                "velocity bounds must satisfy vmin < vmax",
            ));
        }
        if !(self.tau >= 0.0) {
            return Err(config_error("tau", "relaxation time must be >= 0"));
        }
        if !(self.tfinal > 0.0 && self.tfinal.is_finite()) {
            return Err(config_error("tfinal", "final time must be positive"));
        }
        if self.format == OutputFormat::Vtk && self.preset.dim != 3 {
            return Err(config_error("format", "vtk output needs a 3D preset"));
        }
        let planar = self.preset.riemann_reference().is_some();
        if self.reference == Reference::Riemann && !planar {
            return Err(config_error(
                "ref",
                "riemann reference needs a planar Sod preset",
            ));
        }
        if self.reference == Reference::Upwind && self.preset.name != PresetName::Sod1d {
            return Err(config_error(
                "ref",
                "upwind reference needs the sod1d preset",
            ));
        }
        let grid = self
            .spatial_grid()
            .map_err(|e| config_error("bc", e.to_string()))?;
        if grid.has_reflecting_face() && self.vmin != -self.vmax {
            return Err(config_error("vmin", "reflecting faces need vmin = -vmax"));
        }
        Ok(())
    }

    pub fn velocity_grid(&self) -> Result<VelocityGrid> {
        VelocityGrid::new(self.preset.dim, self.nv, self.vmin, self.vmax)
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid> {
        self.preset.spatial_grid(self.nx, self.boundary)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            tau: self.tau,
            tfinal: self.tfinal,
            safety: self.cfl,
            order: self.order,
            fixed_dt: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn reflecting_faces_need_symmetric_bounds() {
        let err = RunConfig::from_sources(None, &flags(&[("preset", "sod3d"), ("vmin", "-9")]))
            .unwrap_err();
        assert!(err.to_string().contains("vmin"), "{err}");
        let err = RunConfig::from_sources(None, &flags(&[("preset", "sod3d"), ("bc", "periodic")]))
            .unwrap_err();
        assert!(err.to_string().contains("bc"), "{err}");
        RunConfig::from_sources(None, &flags(&[("preset", "sod1d"), ("bc", "reflect")])).unwrap();
    }

    #[test]
    fn sod1d_defaults_from_preset() {
        let c = RunConfig::from_sources(None, &flags(&[("preset", "sod1d")])).unwrap();
        assert_eq!(
            (c.nx, c.nv, c.vmin, c.vmax, c.tfinal),
            (300, 100, -15.0, 15.0, 0.05)
        );
        assert_eq!(c.cfl, 0.95);
        assert_eq!(c.order, SplittingOrder::First);
    }

    #[test]
    fn sod3d_table_row() {
        let c = RunConfig::from_sources(
            None,
            &flags(&[
                ("preset", "sod3d"),
                ("nx", "25"),
                ("nv", "12"),
                ("vmin", "-10"),
                ("vmax", "10"),
            ]),
        )
        .unwrap();
        assert_eq!(c.spatial_grid().unwrap().num_cells(), 25 * 25 * 25);
        assert_eq!(c.velocity_grid().unwrap().len(), 1728);
    }

    #[test]
    fn bad_cfl_rejected() {
        let err = RunConfig::from_sources(None, &flags(&[("preset", "sod1d"), ("cfl", "1.5")]))
            .unwrap_err();
        assert!(matches!(err, FksError::Config { ref key, .. } if key == "cfl"));
    }

    #[test]
    fn file_with_comments_and_overrides() {
        let text = "# sod run\npreset = sod1d\nnx = 150 # coarse\n\ntau = 1e-2\n";
        let c = RunConfig::from_sources(Some(text), &flags(&[("nx", "600")])).unwrap();
        assert_eq!(c.nx, 600);
        assert_eq!(c.tau, 1e-2);
    }

    #[test]
    fn unknown_and_conflicting_keys() {
        let err = RunConfig::from_sources(Some("preset = sod1d\ncolor = red\n"), &[]).unwrap_err();
        assert!(matches!(err, FksError::Config { ref key, .. } if key == "color"));
        let err = parse_key_values("nx = 1\nnx = 2\n").unwrap_err();
        assert!(matches!(err, FksError::Config { ref key, .. } if key == "nx"));
        assert!(parse_key_values("nx 3").is_err());
    }

    #[test]
    fn invalid_combinations() {
        assert!(
            RunConfig::from_sources(None, &flags(&[("preset", "sod1d"), ("format", "vtk")]))
                .is_err()
        );
        assert!(
            RunConfig::from_sources(None, &flags(&[("preset", "sod3d"), ("ref", "riemann")]))
                .is_err()
        );
        assert!(
            RunConfig::from_sources(None, &flags(&[("preset", "sod1d"), ("order", "3")])).is_err()
        );
        assert!(
            RunConfig::from_sources(None, &flags(&[("preset", "sod1d"), ("bc", "wall")])).is_err()
        );
        assert!(RunConfig::from_sources(None, &flags(&[("nx", "10")])).is_err());
        let inf =
            RunConfig::from_sources(None, &flags(&[("preset", "sod1d"), ("tau", "inf")])).unwrap();
        assert_eq!(inf.tau, f64::INFINITY);
    }
}
