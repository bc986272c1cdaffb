//! Run configuration: defaults ← config file ← command-line flags.
//!
//! The JSON config file and the flags both feed a [`PartialConfig`]; later
//! layers override earlier ones field by field. Parsing is strict: unknown
//! keys in the file are errors, so typos cannot silently fall back to
//! defaults.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use kaclab_core::analysis::MonitorTolerances;

/// Default grid for custom initial data (presets carry their own).
pub const DEFAULT_V_MAX: f64 = 8.0;
pub const DEFAULT_N_CELLS: usize = 400;

/// Profile specification for custom initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// Piecewise-linear interpolation through `(v, f)` points, zero outside.
    Table { points: Vec<(f64, f64)> },
    /// Sum of Gaussian bumps `amplitude · exp(-(v-center)²/(2 sigma²))`.
    Gaussians { components: Vec<GaussianSpec> },
    /// A Bose distribution with the given parameters.
    Bose { lambda1: f64, fugacity: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    pub amplitude: f64,
    pub center: f64,
    pub sigma: f64,
}

/// One override layer; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialConfig {
    pub preset: Option<u32>,
    pub custom_initial: Option<ProfileSpec>,
    pub v_max: Option<f64>,
    pub n_cells: Option<usize>,
    pub t_end: Option<f64>,
    pub output_interval: Option<f64>,
    pub dt_initial: Option<f64>,
    pub dt_max: Option<f64>,
    pub safety: Option<f64>,
    pub dt_growth: Option<f64>,
    pub max_rejects_per_step: Option<u32>,
    pub positivity_floor: Option<f64>,
    pub fit_window: Option<(f64, f64)>,
    pub output_dir: Option<PathBuf>,
    pub tolerances: Option<MonitorTolerances>,
    /// How many profile snapshots to spread over the run (first and last
    /// records always included).
    pub profile_snapshots: Option<usize>,
}

impl PartialConfig {
    /// Later layer wins field by field.
    pub fn overlay(mut self, over: PartialConfig) -> PartialConfig {
        macro_rules! take {
            ($($f:ident),* $(,)?) => {
                $(if over.$f.is_some() { self.$f = over.$f; })*
            };
        }
        take!(
            preset,
            custom_initial,
            v_max,
            n_cells,
            t_end,
            output_interval,
            dt_initial,
            dt_max,
            safety,
            dt_growth,
            max_rejects_per_step,
            positivity_floor,
            fit_window,
            output_dir,
            tolerances,
            profile_snapshots,
        );
        self
    }
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub preset: Option<u32>,
    pub custom_initial: Option<ProfileSpec>,
    pub v_max: f64,
    pub n_cells: usize,
    pub t_end: f64,
    pub output_interval: f64,
    /// `None` means "use the stability heuristic at the initial state".
    pub dt_initial: Option<f64>,
    pub dt_max: f64,
    pub safety: f64,
    pub dt_growth: f64,
    pub max_rejects_per_step: u32,
    pub positivity_floor: f64,
    pub fit_window: (f64, f64),
    pub output_dir: PathBuf,
    pub tolerances: MonitorTolerances,
    pub profile_snapshots: usize,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Resolve layered partials into a concrete config.
///
/// Exactly one of `preset` / `custom_initial` must be set. Preset runs pull
/// their grid, horizon and fit window from the preset defaults; custom runs
/// use the global grid defaults and require an explicit `t_end`.
pub fn resolve(merged: PartialConfig, env_out: Option<PathBuf>) -> Result<RunConfig, ConfigError> {
    match (merged.preset.is_some(), merged.custom_initial.is_some()) {
        (true, true) => {
            return Err(ConfigError(
                "exactly one of `preset` and `custom_initial` may be set, got both".into(),
            ))
        }
        (false, false) => {
            return Err(ConfigError(
                "one of `preset` (1..=5) or `custom_initial` is required".into(),
            ))
        }
        _ => {}
    }

    let (v_max, n_cells, t_end, output_interval, fit_window, dt_max);
    if let Some(k) = merged.preset {
        let d = kaclab_core::presets::preset_defaults(k)
            .map_err(|e| ConfigError(e.to_string()))?;
        v_max = merged.v_max.unwrap_or(d.v_max);
        n_cells = merged.n_cells.unwrap_or(d.n_cells);
        t_end = merged.t_end.unwrap_or(d.t_end);
        output_interval = merged.output_interval.unwrap_or(d.output_interval);
        fit_window = merged.fit_window.unwrap_or(d.fit_window);
        dt_max = merged.dt_max.unwrap_or(d.dt_max);
    } else {
        v_max = merged.v_max.unwrap_or(DEFAULT_V_MAX);
        n_cells = merged.n_cells.unwrap_or(DEFAULT_N_CELLS);
        t_end = merged
            .t_end
            .ok_or_else(|| ConfigError("custom runs require `t_end` (--tend)".into()))?;
        output_interval = merged.output_interval.unwrap_or(t_end / 200.0);
        fit_window = merged
            .fit_window
            .unwrap_or((0.1 * t_end, 0.9 * t_end));
        dt_max = merged.dt_max.unwrap_or(output_interval);
    }

    let output_dir = merged
        .output_dir
        .or(env_out)
        .unwrap_or_else(|| PathBuf::from("kaclab_out"));

    Ok(RunConfig {
        preset: merged.preset,
        custom_initial: merged.custom_initial,
        v_max,
        n_cells,
        t_end,
        output_interval,
        dt_initial: merged.dt_initial,
        dt_max,
        safety: merged.safety.unwrap_or(0.5),
        dt_growth: merged.dt_growth.unwrap_or(1.1),
        max_rejects_per_step: merged.max_rejects_per_step.unwrap_or(40),
        positivity_floor: merged.positivity_floor.unwrap_or(0.0),
        fit_window,
        output_dir,
        tolerances: merged.tolerances.unwrap_or_default(),
        profile_snapshots: merged.profile_snapshots.unwrap_or(20),
    })
}

/// Parse a config file (strict JSON).
pub fn parse_file(path: &std::path::Path) -> Result<PartialConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| ConfigError(format!("config {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_prefers_later_layer() {
        let base = PartialConfig {
            preset: Some(3),
            t_end: Some(5.0),
            ..PartialConfig::default()
        };
        let over = PartialConfig {
            t_end: Some(15.0),
            ..PartialConfig::default()
        };
        let merged = base.overlay(over);
        assert_eq!(merged.t_end, Some(15.0));
        assert_eq!(merged.preset, Some(3));
    }

    #[test]
    fn resolve_requires_exactly_one_source() {
        assert!(resolve(PartialConfig::default(), None).is_err());
        let both = PartialConfig {
            preset: Some(1),
            custom_initial: Some(ProfileSpec::Bose {
                lambda1: 1.0,
                fugacity: 0.5,
            }),
            ..PartialConfig::default()
        };
        assert!(resolve(both, None).is_err());
    }

    #[test]
    fn preset_defaults_flow_through() {
        let cfg = resolve(
            PartialConfig {
                preset: Some(1),
                ..PartialConfig::default()
            },
            None,
        )
        .unwrap();
        let d = kaclab_core::presets::preset_defaults(1).unwrap();
        assert_eq!(cfg.v_max, d.v_max);
        assert_eq!(cfg.n_cells, d.n_cells);
        assert_eq!(cfg.t_end, d.t_end);
        assert_eq!(cfg.fit_window, d.fit_window);
    }

    #[test]
    fn env_out_is_fallback_only() {
        let cfg = resolve(
            PartialConfig {
                preset: Some(1),
                output_dir: Some(PathBuf::from("explicit")),
                ..PartialConfig::default()
            },
            Some(PathBuf::from("from_env")),
        )
        .unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("explicit"));

        let cfg = resolve(
            PartialConfig {
                preset: Some(1),
                ..PartialConfig::default()
            },
            Some(PathBuf::from("from_env")),
        )
        .unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("from_env"));
    }

    #[test]
    fn strict_json_rejects_unknown_keys() {
        let err = serde_json::from_str::<PartialConfig>(r#"{"tendd": 5.0}"#).unwrap_err();
        assert!(err.to_string().contains("tendd"));
    }

    #[test]
    fn custom_needs_t_end() {
        let partial = PartialConfig {
            custom_initial: Some(ProfileSpec::Bose {
                lambda1: 1.0,
                fugacity: 0.5,
            }),
            ..PartialConfig::default()
        };
        assert!(resolve(partial.clone(), None).is_err());
        let ok = resolve(
            PartialConfig {
                t_end: Some(1.0),
                ..partial
            },
            None,
        )
        .unwrap();
        assert_eq!(ok.v_max, DEFAULT_V_MAX);
        assert_eq!(ok.n_cells, DEFAULT_N_CELLS);
    }
}
