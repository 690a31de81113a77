//! Run configuration: a flat `section.key = value` dialect with `#` comments.
//!
//! Every key has a default, unknown keys are rejected, and a key left empty
//! reports the default it would take, so a config file can be built up by
//! running and reading the errors.

use std::path::Path;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum ConfigError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {0}: expected 'section.key = value', got '{1}'")]
    Syntax(usize, String),
    #[error("{}unknown key '{key}'", fmt_line(.line))]
    UnknownKey { line: Option<usize>, key: String },
    #[error("key '{key}' has no value; its default is '{default}'")]
    MissingValue { key: String, default: String },
    #[error("{}key '{key}': {msg}", fmt_line(.line))]
    BadValue { line: Option<usize>, key: String, msg: String },
}

fn fmt_line(line: &Option<usize>) -> String {
    match line {
        Some(n) => format!("line {n}: "),
        None => String::new(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraCfg {
    pub width: u32,
    pub height: u32,
    pub fx: f64,
    pub fy: f64,
    pub cx: Option<f64>,
    pub cy: Option<f64>,
    pub contrast_threshold: f64,
    pub refractory_us: u64,
    pub log_eps: f64,
    pub noise_rate_hz: f64,
    pub bus_cap_events_per_s: f64,
    pub bus_bucket_us: u64,
    pub seed: u64,
}

impl Default for CameraCfg {
    fn default() -> Self {
        Self {
            width: 640,
            height: 480,
            fx: 600.0,
            fy: 600.0,
            cx: None,
            cy: None,
            contrast_threshold: 0.15,
            refractory_us: 0,
            log_eps: 1e-3,
            noise_rate_hz: 0.0,
            bus_cap_events_per_s: 1e9,
            bus_bucket_us: 1000,
            seed: 1,
        }
    }
}

impl CameraCfg {
    pub fn cx(&self) -> f64 {
        self.cx.unwrap_or((self.width as f64 - 1.0) / 2.0)
    }

    pub fn cy(&self) -> f64 {
        self.cy.unwrap_or((self.height as f64 - 1.0) / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorCfg {
    pub width: u32,
    pub height: u32,
    pub fx: f64,
    pub fy: f64,
    pub cx: Option<f64>,
    pub cy: Option<f64>,
    pub baseline_m: f64,
    pub switch_rate_hz: f64,
    pub power_r: f64,
    pub power_g: f64,
    pub power_b: f64,
    pub duty: f64,
}

impl Default for ProjectorCfg {
    fn default() -> Self {
        Self {
            width: 912,
            height: 1140,
            fx: 1100.0,
            fy: 1100.0,
            cx: None,
            cy: None,
            baseline_m: 0.1,
            switch_rate_hz: 4225.0,
            power_r: 1.0,
            power_g: 1.0,
            power_b: 1.0,
            duty: 0.5,
        }
    }
}

impl ProjectorCfg {
    pub fn cx(&self) -> f64 {
        self.cx.unwrap_or((self.width as f64 - 1.0) / 2.0)
    }

    pub fn cy(&self) -> f64 {
        self.cy.unwrap_or((self.height as f64 - 1.0) / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneCfg {
    pub distance_m: f64,
    pub tilt_y_deg: f64,
    /// `builtin:chart24`, `builtin:gray`, `builtin:wheel`, or a PPM path.
    pub albedo: String,
    pub width_m: f64,
    pub ambient: f64,
    pub inverse_square: bool,
}

impl Default for SceneCfg {
    fn default() -> Self {
        Self {
            distance_m: 1.6,
            tilt_y_deg: 0.0,
            albedo: "builtin:chart24".into(),
            width_m: 2.2,
            ambient: 0.01,
            inverse_square: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternCfg {
    /// dots | lines | moving | solid
    pub kind: String,
    pub rows: u32,
    pub cols: u32,
    pub dot_size: u32,
    pub count: u32,
    pub line_width: u32,
    /// vertical | horizontal
    pub orientation: String,
    pub steps: u32,
    pub cycles: u32,
}

impl Default for PatternCfg {
    fn default() -> Self {
        Self {
            kind: "dots".into(),
            rows: 25,
            cols: 40,
            dot_size: 4,
            count: 64,
            line_width: 1,
            orientation: "vertical".into(),
            steps: 3,
            cycles: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconCfg {
    /// Counts-to-value scale; 0 selects automatic percentile exposure.
    pub scale: f64,
    pub gain_r: f64,
    pub gain_g: f64,
    pub gain_b: f64,
}

impl Default for ReconCfg {
    fn default() -> Self {
        Self { scale: 0.0, gain_r: 1.0, gain_g: 1.0, gain_b: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WbCfg {
    pub region_x: u32,
    pub region_y: u32,
    /// Zero width or height selects the full frame.
    pub region_w: u32,
    pub region_h: u32,
}

impl Default for WbCfg {
    fn default() -> Self {
        Self { region_x: 0, region_y: 0, region_w: 0, region_h: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthCfg {
    pub min_count: u32,
    pub gap_max_m: f64,
    pub tie_tolerance_px: f64,
    pub prior_distance_m: f64,
}

impl Default for DepthCfg {
    fn default() -> Self {
        Self { min_count: 3, gap_max_m: 0.01, tie_tolerance_px: 2.0, prior_distance_m: 1.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AslCfg {
    pub budget_events_per_s: f64,
    pub margin: f64,
    pub beta_low: f64,
    pub beta_high: f64,
    pub dwell: u32,
    pub decisions: u32,
    /// Scripted motion-rate ramp over the run.
    pub rm_start: f64,
    pub rm_end: f64,
}

impl Default for AslCfg {
    fn default() -> Self {
        Self {
            budget_events_per_s: 2e6,
            margin: 0.9,
            beta_low: 0.5,
            beta_high: 0.85,
            dwell: 3,
            decisions: 40,
            rm_start: 0.0,
            rm_end: 1.5e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCfg {
    pub coverages: Vec<f64>,
    pub windows_ms: Vec<f64>,
    pub frames: u32,
}

impl Default for SweepCfg {
    fn default() -> Self {
        Self {
            coverages: vec![0.0154, 0.0222, 0.0702],
            windows_ms: vec![2.5, 7.14],
            frames: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub camera: CameraCfg,
    pub projector: ProjectorCfg,
    pub scene: SceneCfg,
    pub pattern: PatternCfg,
    pub recon: ReconCfg,
    pub wb: WbCfg,
    pub depth: DepthCfg,
    pub asl: AslCfg,
    pub sweep: SweepCfg,
}

fn pf64(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse().map_err(|e| ConfigError::BadValue {
        line: None,
        key: key.into(),
        msg: format!("expected a number: {e}"),
    })
}

fn pu32(key: &str, v: &str) -> Result<u32, ConfigError> {
    v.parse().map_err(|e| ConfigError::BadValue {
        line: None,
        key: key.into(),
        msg: format!("expected a non-negative integer: {e}"),
    })
}

fn pu64(key: &str, v: &str) -> Result<u64, ConfigError> {
    v.parse().map_err(|e| ConfigError::BadValue {
        line: None,
        key: key.into(),
        msg: format!("expected a non-negative integer: {e}"),
    })
}

fn pbool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::BadValue {
            line: None,
            key: key.into(),
            msg: format!("expected true or false, got '{v}'"),
        }),
    }
}

fn plist(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',')
        .map(|s| pf64(key, s.trim()))
        .collect::<Result<Vec<_>, _>>()
        .and_then(|list| {
            if list.is_empty() {
                Err(ConfigError::BadValue {
                    line: None,
                    key: key.into(),
                    msg: "expected a comma-separated list".into(),
                })
            } else {
                Ok(list)
            }
        })
}

fn popt(key: &str, v: &str) -> Result<Option<f64>, ConfigError> {
    if v == "auto" {
        Ok(None)
    } else {
        pf64(key, v).map(Some)
    }
}

fn fopt(v: &Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => "auto".into(),
    }
}

fn flist(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax(lineno, raw.trim().into()));
            };
            cfg.set(key.trim(), value.trim()).map_err(|e| match e {
                ConfigError::UnknownKey { key, .. } => {
                    ConfigError::UnknownKey { line: Some(lineno), key }
                }
                ConfigError::BadValue { key, msg, .. } => {
                    ConfigError::BadValue { line: Some(lineno), key, msg }
                }
                other => other,
            })?;
        }
        Ok(cfg)
    }

    /// Sets one key from its text form. An empty value reports the default.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if value.is_empty() {
            let default = Self::default()
                .get(key)
                .ok_or_else(|| ConfigError::UnknownKey { line: None, key: key.into() })?;
            return Err(ConfigError::MissingValue { key: key.into(), default });
        }
        match key {
            "camera.width" => self.camera.width = pu32(key, value)?,
            "camera.height" => self.camera.height = pu32(key, value)?,
            "camera.fx" => self.camera.fx = pf64(key, value)?,
            "camera.fy" => self.camera.fy = pf64(key, value)?,
            "camera.cx" => self.camera.cx = popt(key, value)?,
            "camera.cy" => self.camera.cy = popt(key, value)?,
            "camera.contrast_threshold" => self.camera.contrast_threshold = pf64(key, value)?,
            "camera.refractory_us" => self.camera.refractory_us = pu64(key, value)?,
            "camera.log_eps" => self.camera.log_eps = pf64(key, value)?,
            "camera.noise_rate_hz" => self.camera.noise_rate_hz = pf64(key, value)?,
            "camera.bus_cap_events_per_s" => {
                self.camera.bus_cap_events_per_s = pf64(key, value)?
            }
            "camera.bus_bucket_us" => self.camera.bus_bucket_us = pu64(key, value)?,
            "camera.seed" => self.camera.seed = pu64(key, value)?,
            "projector.width" => self.projector.width = pu32(key, value)?,
            "projector.height" => self.projector.height = pu32(key, value)?,
            "projector.fx" => self.projector.fx = pf64(key, value)?,
            "projector.fy" => self.projector.fy = pf64(key, value)?,
            "projector.cx" => self.projector.cx = popt(key, value)?,
            "projector.cy" => self.projector.cy = popt(key, value)?,
            "projector.baseline_m" => self.projector.baseline_m = pf64(key, value)?,
            "projector.switch_rate_hz" => self.projector.switch_rate_hz = pf64(key, value)?,
            "projector.power_r" => self.projector.power_r = pf64(key, value)?,
            "projector.power_g" => self.projector.power_g = pf64(key, value)?,
            "projector.power_b" => self.projector.power_b = pf64(key, value)?,
            "projector.duty" => self.projector.duty = pf64(key, value)?,
            "scene.distance_m" => self.scene.distance_m = pf64(key, value)?,
            "scene.tilt_y_deg" => self.scene.tilt_y_deg = pf64(key, value)?,
            "scene.albedo" => self.scene.albedo = value.into(),
            "scene.width_m" => self.scene.width_m = pf64(key, value)?,
            "scene.ambient" => self.scene.ambient = pf64(key, value)?,
            "scene.inverse_square" => self.scene.inverse_square = pbool(key, value)?,
            "pattern.kind" => self.pattern.kind = value.into(),
            "pattern.rows" => self.pattern.rows = pu32(key, value)?,
            "pattern.cols" => self.pattern.cols = pu32(key, value)?,
            "pattern.dot_size" => self.pattern.dot_size = pu32(key, value)?,
            "pattern.count" => self.pattern.count = pu32(key, value)?,
            "pattern.line_width" => self.pattern.line_width = pu32(key, value)?,
            "pattern.orientation" => self.pattern.orientation = value.into(),
            "pattern.steps" => self.pattern.steps = pu32(key, value)?,
            "pattern.cycles" => self.pattern.cycles = pu32(key, value)?,
            "recon.scale" => self.recon.scale = pf64(key, value)?,
            "recon.gain_r" => self.recon.gain_r = pf64(key, value)?,
            "recon.gain_g" => self.recon.gain_g = pf64(key, value)?,
            "recon.gain_b" => self.recon.gain_b = pf64(key, value)?,
            "wb.region_x" => self.wb.region_x = pu32(key, value)?,
            "wb.region_y" => self.wb.region_y = pu32(key, value)?,
            "wb.region_w" => self.wb.region_w = pu32(key, value)?,
            "wb.region_h" => self.wb.region_h = pu32(key, value)?,
            "depth.min_count" => self.depth.min_count = pu32(key, value)?,
            "depth.gap_max_m" => self.depth.gap_max_m = pf64(key, value)?,
            "depth.tie_tolerance_px" => self.depth.tie_tolerance_px = pf64(key, value)?,
            "depth.prior_distance_m" => self.depth.prior_distance_m = pf64(key, value)?,
            "asl.budget_events_per_s" => self.asl.budget_events_per_s = pf64(key, value)?,
            "asl.margin" => self.asl.margin = pf64(key, value)?,
            "asl.beta_low" => self.asl.beta_low = pf64(key, value)?,
            "asl.beta_high" => self.asl.beta_high = pf64(key, value)?,
            "asl.dwell" => self.asl.dwell = pu32(key, value)?,
            "asl.decisions" => self.asl.decisions = pu32(key, value)?,
            "asl.rm_start" => self.asl.rm_start = pf64(key, value)?,
            "asl.rm_end" => self.asl.rm_end = pf64(key, value)?,
            "sweep.coverages" => self.sweep.coverages = plist(key, value)?,
            "sweep.windows_ms" => self.sweep.windows_ms = plist(key, value)?,
            "sweep.frames" => self.sweep.frames = pu32(key, value)?,
            _ => return Err(ConfigError::UnknownKey { line: None, key: key.into() }),
        }
        Ok(())
    }

    /// Current value of one key as text, `None` for unknown keys.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "camera.width" => self.camera.width.to_string(),
            "camera.height" => self.camera.height.to_string(),
            "camera.fx" => self.camera.fx.to_string(),
            "camera.fy" => self.camera.fy.to_string(),
            "camera.cx" => fopt(&self.camera.cx),
            "camera.cy" => fopt(&self.camera.cy),
            "camera.contrast_threshold" => self.camera.contrast_threshold.to_string(),
            "camera.refractory_us" => self.camera.refractory_us.to_string(),
            "camera.log_eps" => self.camera.log_eps.to_string(),
            "camera.noise_rate_hz" => self.camera.noise_rate_hz.to_string(),
            "camera.bus_cap_events_per_s" => self.camera.bus_cap_events_per_s.to_string(),
            "camera.bus_bucket_us" => self.camera.bus_bucket_us.to_string(),
            "camera.seed" => self.camera.seed.to_string(),
            "projector.width" => self.projector.width.to_string(),
            "projector.height" => self.projector.height.to_string(),
            "projector.fx" => self.projector.fx.to_string(),
            "projector.fy" => self.projector.fy.to_string(),
            "projector.cx" => fopt(&self.projector.cx),
            "projector.cy" => fopt(&self.projector.cy),
            "projector.baseline_m" => self.projector.baseline_m.to_string(),
            "projector.switch_rate_hz" => self.projector.switch_rate_hz.to_string(),
            "projector.power_r" => self.projector.power_r.to_string(),
            "projector.power_g" => self.projector.power_g.to_string(),
            "projector.power_b" => self.projector.power_b.to_string(),
            "projector.duty" => self.projector.duty.to_string(),
            "scene.distance_m" => self.scene.distance_m.to_string(),
            "scene.tilt_y_deg" => self.scene.tilt_y_deg.to_string(),
            "scene.albedo" => self.scene.albedo.clone(),
            "scene.width_m" => self.scene.width_m.to_string(),
            "scene.ambient" => self.scene.ambient.to_string(),
            "scene.inverse_square" => self.scene.inverse_square.to_string(),
            "pattern.kind" => self.pattern.kind.clone(),
            "pattern.rows" => self.pattern.rows.to_string(),
            "pattern.cols" => self.pattern.cols.to_string(),
            "pattern.dot_size" => self.pattern.dot_size.to_string(),
            "pattern.count" => self.pattern.count.to_string(),
            "pattern.line_width" => self.pattern.line_width.to_string(),
            "pattern.orientation" => self.pattern.orientation.clone(),
            "pattern.steps" => self.pattern.steps.to_string(),
            "pattern.cycles" => self.pattern.cycles.to_string(),
            "recon.scale" => self.recon.scale.to_string(),
            "recon.gain_r" => self.recon.gain_r.to_string(),
            "recon.gain_g" => self.recon.gain_g.to_string(),
            "recon.gain_b" => self.recon.gain_b.to_string(),
            "wb.region_x" => self.wb.region_x.to_string(),
            "wb.region_y" => self.wb.region_y.to_string(),
            "wb.region_w" => self.wb.region_w.to_string(),
            "wb.region_h" => self.wb.region_h.to_string(),
            "depth.min_count" => self.depth.min_count.to_string(),
            "depth.gap_max_m" => self.depth.gap_max_m.to_string(),
            "depth.tie_tolerance_px" => self.depth.tie_tolerance_px.to_string(),
            "depth.prior_distance_m" => self.depth.prior_distance_m.to_string(),
            "asl.budget_events_per_s" => self.asl.budget_events_per_s.to_string(),
            "asl.margin" => self.asl.margin.to_string(),
            "asl.beta_low" => self.asl.beta_low.to_string(),
            "asl.beta_high" => self.asl.beta_high.to_string(),
            "asl.dwell" => self.asl.dwell.to_string(),
            "asl.decisions" => self.asl.decisions.to_string(),
            "asl.rm_start" => self.asl.rm_start.to_string(),
            "asl.rm_end" => self.asl.rm_end.to_string(),
            "sweep.coverages" => flist(&self.sweep.coverages),
            "sweep.windows_ms" => flist(&self.sweep.windows_ms),
            "sweep.frames" => self.sweep.frames.to_string(),
            _ => return None,
        })
    }

    pub const KEYS: &'static [&'static str] = &[
        "camera.width",
        "camera.height",
        "camera.fx",
        "camera.fy",
        "camera.cx",
        "camera.cy",
        "camera.contrast_threshold",
        "camera.refractory_us",
        "camera.log_eps",
        "camera.noise_rate_hz",
        "camera.bus_cap_events_per_s",
        "camera.bus_bucket_us",
        "camera.seed",
        "projector.width",
        "projector.height",
        "projector.fx",
        "projector.fy",
        "projector.cx",
        "projector.cy",
        "projector.baseline_m",
        "projector.switch_rate_hz",
        "projector.power_r",
        "projector.power_g",
        "projector.power_b",
        "projector.duty",
        "scene.distance_m",
        "scene.tilt_y_deg",
        "scene.albedo",
        "scene.width_m",
        "scene.ambient",
        "scene.inverse_square",
        "pattern.kind",
        "pattern.rows",
        "pattern.cols",
        "pattern.dot_size",
        "pattern.count",
        "pattern.line_width",
        "pattern.orientation",
        "pattern.steps",
        "pattern.cycles",
        "recon.scale",
        "recon.gain_r",
        "recon.gain_g",
        "recon.gain_b",
        "wb.region_x",
        "wb.region_y",
        "wb.region_w",
        "wb.region_h",
        "depth.min_count",
        "depth.gap_max_m",
        "depth.tie_tolerance_px",
        "depth.prior_distance_m",
        "asl.budget_events_per_s",
        "asl.margin",
        "asl.beta_low",
        "asl.beta_high",
        "asl.dwell",
        "asl.decisions",
        "asl.rm_start",
        "asl.rm_end",
        "sweep.coverages",
        "sweep.windows_ms",
        "sweep.frames",
    ];

    /// Renders the full configuration, one key per line, parseable back.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut section = "";
        for key in Self::KEYS {
            let this_section = key.split('.').next().unwrap();
            if this_section != section {
                if !section.is_empty() {
                    out.push('\n');
                }
                section = this_section;
            }
            out.push_str(&format!("{key} = {}\n", self.get(key).unwrap()));
        }
        out
    }

    /// Applies one `section.key=value` override, as given on a command line.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ConfigError> {
        let Some((key, value)) = spec.split_once('=') else {
            return Err(ConfigError::Syntax(0, spec.into()));
        };
        self.set(key.trim(), value.trim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_text() {
        let cfg = RunConfig::default();
        let text = cfg.to_text();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = RunConfig::parse(
            "# a full-line comment\n\
             \n\
             camera.fx = 800 # trailing comment\n\
             scene.albedo = builtin:gray\n",
        )
        .unwrap();
        assert_eq!(cfg.camera.fx, 800.0);
        assert_eq!(cfg.scene.albedo, "builtin:gray");
        assert_eq!(cfg.camera.fy, 600.0, "unset keys keep defaults");
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_line() {
        match RunConfig::parse("camera.fx = 1\ncamera.zoom = 2\n") {
            Err(ConfigError::UnknownKey { line: Some(2), key }) => {
                assert_eq!(key, "camera.zoom");
            }
            other => panic!("expected UnknownKey at line 2, got {other:?}"),
        }
    }

    #[test]
    fn empty_value_reports_the_default() {
        match RunConfig::parse("camera.contrast_threshold =\n") {
            Err(ConfigError::MissingValue { key, default }) => {
                assert_eq!(key, "camera.contrast_threshold");
                assert_eq!(default, "0.15");
            }
            other => panic!("expected MissingValue, got {other:?}"),
        }
        match RunConfig::parse("camera.cx = \n") {
            Err(ConfigError::MissingValue { default, .. }) => assert_eq!(default, "auto"),
            other => panic!("expected MissingValue, got {other:?}"),
        }
    }

    #[test]
    fn bad_values_name_key_and_line() {
        match RunConfig::parse("camera.width = fast\n") {
            Err(ConfigError::BadValue { line: Some(1), key, .. }) => {
                assert_eq!(key, "camera.width");
            }
            other => panic!("expected BadValue, got {other:?}"),
        }
        assert!(RunConfig::parse("scene.inverse_square = yes\n").is_err());
        assert!(RunConfig::parse("just some text\n").is_err());
    }

    #[test]
    fn lists_parse_with_spaces() {
        let cfg = RunConfig::parse("sweep.windows_ms = 2.5, 4.34, 7.14\n").unwrap();
        assert_eq!(cfg.sweep.windows_ms, vec![2.5, 4.34, 7.14]);
    }

    #[test]
    fn overrides_change_single_keys() {
        let mut cfg = RunConfig::default();
        cfg.apply_override("asl.dwell=5").unwrap();
        assert_eq!(cfg.asl.dwell, 5);
        cfg.apply_override(" camera.cx = 320 ").unwrap();
        assert_eq!(cfg.camera.cx, Some(320.0));
        assert!(cfg.apply_override("no-equals-sign").is_err());
        assert!(cfg.apply_override("bogus.key=1").is_err());
    }

    #[test]
    fn every_key_is_gettable_and_settable() {
        let mut cfg = RunConfig::default();
        for key in RunConfig::KEYS {
            let value = cfg.get(key).unwrap_or_else(|| panic!("get {key}"));
            cfg.set(key, &value).unwrap_or_else(|e| panic!("set {key}: {e}"));
        }
    }

    #[test]
    fn principal_points_default_to_frame_center() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.camera.cx(), 319.5);
        assert_eq!(cfg.camera.cy(), 239.5);
        assert_eq!(cfg.projector.cx(), 455.5);
        assert_eq!(cfg.projector.cy(), 569.5);
    }
}
