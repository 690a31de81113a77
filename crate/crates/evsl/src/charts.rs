//! Built-in test surfaces: a 24-patch color chart whose every patch has an
//! unambiguous dominant channel, a neutral gray card, and an HSV color
//! wheel. All are albedo maps, so values live in [0, 1].

use std::path::Path;

use thiserror::Error;

use crate::geometry::AlbedoMap;
use crate::io::{netpbm, FormatError};

#[derive(Error, Debug)]
pub enum ChartError {
    #[error("unknown builtin surface '{0}', expected chart24, gray or wheel")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// The 24 chart colors, row-major: eight red-dominant, eight green-dominant,
/// eight blue-dominant. Every patch keeps its largest channel at least 1.3x
/// the runner-up so channel ordering survives moderate crosstalk.
pub const CHART24_COLORS: [[f64; 3]; 24] = [
    [0.90, 0.20, 0.15],
    [0.80, 0.35, 0.10],
    [0.70, 0.15, 0.30],
    [0.85, 0.50, 0.20],
    [0.60, 0.25, 0.40],
    [0.95, 0.60, 0.30],
    [0.75, 0.30, 0.55],
    [0.65, 0.45, 0.15],
    [0.20, 0.85, 0.25],
    [0.35, 0.70, 0.15],
    [0.15, 0.60, 0.40],
    [0.45, 0.90, 0.30],
    [0.30, 0.65, 0.50],
    [0.10, 0.50, 0.35],
    [0.50, 0.80, 0.60],
    [0.25, 0.75, 0.45],
    [0.20, 0.30, 0.90],
    [0.15, 0.45, 0.70],
    [0.35, 0.20, 0.60],
    [0.40, 0.55, 0.85],
    [0.10, 0.25, 0.50],
    [0.30, 0.50, 0.95],
    [0.55, 0.35, 0.80],
    [0.45, 0.60, 0.90],
];

/// Reflectance of the neutral border and the gray card.
pub const NEUTRAL_GRAY: f64 = 0.6;

pub const CHART24_PATCH_PX: u32 = 100;
pub const CHART24_BORDER_PX: u32 = 30;
pub const CHART24_COLS: u32 = 6;
pub const CHART24_ROWS: u32 = 4;

/// 660x460 chart: a 6x4 grid of 100px patches inside a 30px neutral border.
/// The border doubles as a white-balance reference.
pub fn chart24() -> AlbedoMap {
    let width = CHART24_COLS * CHART24_PATCH_PX + 2 * CHART24_BORDER_PX;
    let height = CHART24_ROWS * CHART24_PATCH_PX + 2 * CHART24_BORDER_PX;
    AlbedoMap::from_fn(width, height, |x, y| {
        let inside_x = x >= CHART24_BORDER_PX && x < width - CHART24_BORDER_PX;
        let inside_y = y >= CHART24_BORDER_PX && y < height - CHART24_BORDER_PX;
        if !(inside_x && inside_y) {
            return [NEUTRAL_GRAY; 3];
        }
        let col = (x - CHART24_BORDER_PX) / CHART24_PATCH_PX;
        let row = (y - CHART24_BORDER_PX) / CHART24_PATCH_PX;
        CHART24_COLORS[(row * CHART24_COLS + col) as usize]
    })
}

/// Texel rectangle of one chart patch, for sampling its interior.
pub fn chart24_patch_rect(index: usize) -> (u32, u32, u32, u32) {
    assert!(index < 24);
    let col = index as u32 % CHART24_COLS;
    let row = index as u32 / CHART24_COLS;
    (
        CHART24_BORDER_PX + col * CHART24_PATCH_PX,
        CHART24_BORDER_PX + row * CHART24_PATCH_PX,
        CHART24_PATCH_PX,
        CHART24_PATCH_PX,
    )
}

/// Uniform neutral card.
pub fn gray_card() -> AlbedoMap {
    AlbedoMap::from_fn(64, 64, |_, _| [NEUTRAL_GRAY; 3])
}

/// 256x256 HSV wheel: hue by angle, saturation by radius, full value inside
/// the disc, neutral gray outside.
pub fn color_wheel() -> AlbedoMap {
    let size = 256u32;
    let center = (size as f64 - 1.0) / 2.0;
    let radius = size as f64 / 2.0;
    AlbedoMap::from_fn(size, size, |x, y| {
        let dx = x as f64 - center;
        let dy = y as f64 - center;
        let r = (dx * dx + dy * dy).sqrt();
        if r > radius {
            return [NEUTRAL_GRAY; 3];
        }
        let hue_deg = dy.atan2(dx).to_degrees().rem_euclid(360.0);
        let sat = (r / radius).min(1.0);
        hsv_to_rgb(hue_deg, sat, 1.0)
    })
}

/// Standard six-sector HSV to RGB, all components in [0, 1].
fn hsv_to_rgb(h_deg: f64, s: f64, v: f64) -> [f64; 3] {
    let c = v * s;
    let hp = h_deg / 60.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [r1 + m, g1 + m, b1 + m]
}

/// Resolves an albedo source: `builtin:chart24`, `builtin:gray`,
/// `builtin:wheel`, or a PPM file path (values scaled to [0, 1]).
pub fn resolve_albedo(source: &str) -> Result<AlbedoMap, ChartError> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return match name {
            "chart24" => Ok(chart24()),
            "gray" => Ok(gray_card()),
            "wheel" => Ok(color_wheel()),
            other => Err(ChartError::UnknownBuiltin(other.into())),
        };
    }
    let frame = netpbm::read_ppm(Path::new(source))?;
    Ok(AlbedoMap::from_fn(frame.width, frame.height, |x, y| {
        let [r, g, b] = frame.at(x, y);
        [r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0]
    }))
}
