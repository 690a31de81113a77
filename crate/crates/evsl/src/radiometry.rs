//! Lambertian irradiance rendering of one projector slot into the camera.
//!
//! For a camera pixel looking at plane point p with reflectance S_ref, lit by
//! the projector's active channel with source power S_pow, the reflected
//! irradiance is `S_ref * S_pow * max(0, n . b)` where n is the plane normal
//! and b the unit vector from p toward the projector aperture. Unlit pixels
//! see only the ambient level. The projector is treated as a point source;
//! optional 1/r^2 falloff is off by default.

use std::sync::Arc;

use nalgebra::Vector3;
use thiserror::Error;

use crate::geometry::{intersect_ray_plane, GeometryError, PinholeModel, ScenePlane};
use crate::pattern::{Channel, Pattern};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum RenderError {
    #[error("scene plane is not visible to the {device}: {source}")]
    PlaneNotVisible {
        device: &'static str,
        source: GeometryError,
    },
    #[error("pattern resolution {got:?} does not match projector {expected:?}")]
    PatternResolution { expected: (u32, u32), got: (u32, u32) },
}

/// Per-channel source power of the projector lamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPower {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl SpectralPower {
    pub const WHITE: SpectralPower = SpectralPower { r: 1.0, g: 1.0, b: 1.0 };

    pub fn channel(&self, c: Channel) -> f64 {
        match c {
            Channel::R => self.r,
            Channel::G => self.g,
            Channel::B => self.b,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    /// Irradiance every pixel receives regardless of the pattern.
    pub ambient: f64,
    /// Scale reflected light by 1 / distance^2 to the projector.
    pub inverse_square: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { ambient: 0.01, inverse_square: false }
    }
}

/// Camera-resolution buffer of linear irradiance values.
#[derive(Debug, Clone)]
pub struct IrradianceMap {
    pub width: u32,
    pub height: u32,
    pub values: Arc<Vec<f64>>,
}

impl IrradianceMap {
    pub fn uniform(width: u32, height: u32, value: f64) -> Self {
        Self { width, height, values: Arc::new(vec![value; width as usize * height as usize]) }
    }

    pub fn at(&self, x: u32, y: u32) -> f64 {
        self.values[y as usize * self.width as usize + x as usize]
    }
}

/// One timed entry of the sensor input: the camera sees `map` over
/// `[start_us, end_us)`. `trigger` marks the entries that open a new
/// projector slot (the dark reset phase of the same slot carries the same
/// slot metadata with `trigger = false`).
#[derive(Debug, Clone)]
pub struct IrradianceFrame {
    pub map: IrradianceMap,
    pub start_us: u64,
    pub end_us: u64,
    pub slot: u32,
    pub channel: Channel,
    pub pattern_id: u32,
    pub trigger: bool,
}

/// Lambertian shading of one surface point.
pub fn shade_lambertian(s_ref: f64, s_pow: f64, normal: &Vector3<f64>, beam: &Vector3<f64>) -> f64 {
    s_ref * s_pow * normal.dot(beam).max(0.0)
}

fn check_visibility(
    device: &'static str,
    model: &PinholeModel,
    plane: &ScenePlane,
) -> Result<(), RenderError> {
    let axis = model.backproject(model.cx, model.cy);
    intersect_ray_plane(&axis, plane)
        .map(|_| ())
        .map_err(|source| RenderError::PlaneNotVisible { device, source })
}

/// Renders the irradiance the camera sees while `pattern` is projected
/// through `channel`. Pixels whose ray misses the plane fall back to ambient.
pub fn render_slot(
    scene: &ScenePlane,
    projector: &PinholeModel,
    camera: &PinholeModel,
    pattern: &Pattern,
    channel: Channel,
    s_pow: &SpectralPower,
    opts: &RenderOptions,
) -> Result<IrradianceMap, RenderError> {
    if (pattern.width, pattern.height) != (projector.width, projector.height) {
        return Err(RenderError::PatternResolution {
            expected: (projector.width, projector.height),
            got: (pattern.width, pattern.height),
        });
    }
    check_visibility("camera", camera, scene)?;
    check_visibility("projector", projector, scene)?;

    let power = s_pow.channel(channel);
    let ch = channel.index();
    let proj_center = projector.center();
    let mut values = vec![opts.ambient; camera.width as usize * camera.height as usize];
    for y in 0..camera.height {
        for x in 0..camera.width {
            let ray = camera.backproject(x as f64, y as f64);
            let Ok(hit) = intersect_ray_plane(&ray, scene) else { continue };
            let Ok((pu, pv)) = projector.project(hit.point) else { continue };
            let (pi, pj) = (pu.round(), pv.round());
            if pi < 0.0
                || pj < 0.0
                || pi >= projector.width as f64
                || pj >= projector.height as f64
            {
                continue;
            }
            if !pattern.lit(pi as u32, pj as u32) {
                continue;
            }
            let to_proj = proj_center - hit.point;
            let dist2 = to_proj.norm_squared();
            let beam = to_proj / dist2.sqrt();
            let albedo = scene.albedo_at(hit.point)[ch];
            let mut lit = shade_lambertian(albedo, power, &scene.normal, &beam);
            if opts.inverse_square {
                lit /= dist2;
            }
            values[y as usize * camera.width as usize + x as usize] += lit;
        }
    }
    Ok(IrradianceMap { width: camera.width, height: camera.height, values: Arc::new(values) })
}

/// Camera-pixel mask of the projected pattern: true where the slot rendering
/// would receive reflected pattern light. Channel-independent.
pub fn pattern_footprint(
    scene: &ScenePlane,
    projector: &PinholeModel,
    camera: &PinholeModel,
    pattern: &Pattern,
) -> Result<Vec<bool>, RenderError> {
    let lit = render_slot(
        scene,
        projector,
        camera,
        pattern,
        Channel::G,
        &SpectralPower::WHITE,
        &RenderOptions { ambient: 0.0, inverse_square: false },
    )?;
    Ok(lit.values.iter().map(|&v| v > 0.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AlbedoMap;
    use crate::pattern::Rect;

    fn camera_1px() -> PinholeModel {
        PinholeModel::axis_aligned(1.0, 1.0, 0.0, 0.0, 1, 1, Vector3::zeros()).unwrap()
    }

    fn projector_at_baseline(baseline: f64) -> PinholeModel {
        PinholeModel::axis_aligned(
            1100.0,
            1100.0,
            455.5,
            569.5,
            912,
            1140,
            Vector3::new(baseline, 0.0, 0.0),
        )
        .unwrap()
    }

    fn uniform_plane(albedo: [f64; 3], distance: f64) -> ScenePlane {
        ScenePlane::frontal(distance, 0.0, AlbedoMap::from_fn(4, 4, |_, _| albedo), 4.0).unwrap()
    }

    #[test]
    fn single_pixel_matches_closed_form_shading() {
        // Camera axis pixel hits the plane at (0,0,2); the beam back to the
        // projector at (0.1,0,0) makes cos(theta) = 2 / sqrt(0.1^2 + 2^2).
        let cam = camera_1px();
        let proj = projector_at_baseline(0.1);
        let scene = uniform_plane([0.5, 0.25, 0.75], 2.0);
        let pat = Pattern::full(912, 1140);
        let opts = RenderOptions { ambient: 0.0, inverse_square: false };
        let map =
            render_slot(&scene, &proj, &cam, &pat, Channel::R, &SpectralPower::WHITE, &opts)
                .unwrap();
        let cos = 2.0 / (0.1f64 * 0.1 + 4.0).sqrt();
        let expected = 0.5 * 1.0 * cos;
        assert!(
            (map.at(0, 0) - expected).abs() < 1e-12,
            "got {}, closed form {expected}",
            map.at(0, 0)
        );
    }

    #[test]
    fn channel_selects_albedo_component_and_power() {
        let cam = camera_1px();
        let proj = projector_at_baseline(0.1);
        let scene = uniform_plane([0.5, 0.25, 0.75], 2.0);
        let pat = Pattern::full(912, 1140);
        let opts = RenderOptions { ambient: 0.0, inverse_square: false };
        let pow = SpectralPower { r: 1.0, g: 2.0, b: 0.5 };
        let cos = 2.0 / (0.1f64 * 0.1 + 4.0).sqrt();
        for (c, want) in [
            (Channel::R, 0.5 * 1.0 * cos),
            (Channel::G, 0.25 * 2.0 * cos),
            (Channel::B, 0.75 * 0.5 * cos),
        ] {
            let map = render_slot(&scene, &proj, &cam, &pat, c, &pow, &opts).unwrap();
            assert!((map.at(0, 0) - want).abs() < 1e-12, "channel {c}");
        }
    }

    #[test]
    fn dark_pattern_leaves_only_ambient() {
        let cam = PinholeModel::axis_aligned(50.0, 50.0, 15.5, 11.5, 32, 24, Vector3::zeros())
            .unwrap();
        let proj = projector_at_baseline(0.1);
        let scene = uniform_plane([1.0, 1.0, 1.0], 2.0);
        let pat = Pattern::dark(912, 1140);
        let opts = RenderOptions { ambient: 0.01, inverse_square: false };
        let map =
            render_slot(&scene, &proj, &cam, &pat, Channel::G, &SpectralPower::WHITE, &opts)
                .unwrap();
        assert!(map.values.iter().all(|&v| v == 0.01));
    }

    #[test]
    fn reflected_light_scales_linearly_with_power() {
        let cam = PinholeModel::axis_aligned(80.0, 80.0, 15.5, 11.5, 32, 24, Vector3::zeros())
            .unwrap();
        let proj = projector_at_baseline(0.1);
        let scene = uniform_plane([0.5, 0.5, 0.5], 1.6);
        let pat = Pattern::full(912, 1140);
        let opts = RenderOptions { ambient: 0.02, inverse_square: false };
        let one = render_slot(&scene, &proj, &cam, &pat, Channel::G, &SpectralPower::WHITE, &opts)
            .unwrap();
        let twice = SpectralPower { r: 1.0, g: 2.0, b: 1.0 };
        let two =
            render_slot(&scene, &proj, &cam, &pat, Channel::G, &twice, &opts).unwrap();
        for (a, b) in one.values.iter().zip(two.values.iter()) {
            assert!((b - 0.02) - 2.0 * (a - 0.02) < 1e-12);
        }
    }

    #[test]
    fn surface_facing_away_reflects_nothing() {
        // Plane z = 2 with its normal pointing away from the devices: the
        // clamp in the shading term zeroes the reflection, ambient remains.
        let albedo = AlbedoMap::from_fn(2, 2, |_, _| [1.0; 3]);
        let frame = crate::geometry::PlaneFrame {
            origin: Vector3::new(-1.0, -1.0, 2.0),
            u_step: Vector3::new(1.0, 0.0, 0.0),
            v_step: Vector3::new(0.0, 1.0, 0.0),
        };
        let plane =
            ScenePlane::new(Vector3::new(0.0, 0.0, 1.0), 2.0, albedo, frame).unwrap();
        let cam = camera_1px();
        let proj = projector_at_baseline(0.1);
        let pat = Pattern::full(912, 1140);
        let opts = RenderOptions { ambient: 0.03, inverse_square: false };
        let map = render_slot(&plane, &proj, &cam, &pat, Channel::R, &SpectralPower::WHITE, &opts)
            .unwrap();
        assert_eq!(map.at(0, 0), 0.03);
    }

    #[test]
    fn plane_behind_camera_is_an_error() {
        let albedo = AlbedoMap::from_fn(2, 2, |_, _| [1.0; 3]);
        let frame = crate::geometry::PlaneFrame {
            origin: Vector3::new(-1.0, -1.0, -1.0),
            u_step: Vector3::new(1.0, 0.0, 0.0),
            v_step: Vector3::new(0.0, 1.0, 0.0),
        };
        let behind =
            ScenePlane::new(Vector3::new(0.0, 0.0, -1.0), 1.0, albedo, frame).unwrap();
        let cam = camera_1px();
        let proj = projector_at_baseline(0.1);
        let pat = Pattern::full(912, 1140);
        let err = render_slot(
            &behind,
            &proj,
            &cam,
            &pat,
            Channel::R,
            &SpectralPower::WHITE,
            &RenderOptions::default(),
        );
        assert!(matches!(err, Err(RenderError::PlaneNotVisible { device: "camera", .. })));
    }

    #[test]
    fn inverse_square_divides_by_squared_distance() {
        let cam = camera_1px();
        let proj = projector_at_baseline(0.1);
        let scene = uniform_plane([1.0, 1.0, 1.0], 2.0);
        let pat = Pattern::full(912, 1140);
        let flat = render_slot(
            &scene,
            &proj,
            &cam,
            &pat,
            Channel::R,
            &SpectralPower::WHITE,
            &RenderOptions { ambient: 0.0, inverse_square: false },
        )
        .unwrap();
        let falloff = render_slot(
            &scene,
            &proj,
            &cam,
            &pat,
            Channel::R,
            &SpectralPower::WHITE,
            &RenderOptions { ambient: 0.0, inverse_square: true },
        )
        .unwrap();
        let dist2 = 0.1f64 * 0.1 + 4.0;
        assert!((falloff.at(0, 0) - flat.at(0, 0) / dist2).abs() < 1e-12);
    }

    #[test]
    fn dot_pattern_lights_the_forward_projected_dot_images() {
        // Forward oracle: push every dot center through projector -> plane ->
        // camera and check a lit pixel sits at the predicted spot; conversely
        // every lit camera pixel must trace back to a lit projector pixel.
        let cam = PinholeModel::axis_aligned(
            600.0,
            600.0,
            319.5,
            239.5,
            640,
            480,
            Vector3::zeros(),
        )
        .unwrap();
        let proj = projector_at_baseline(0.1);
        let scene = uniform_plane([1.0, 1.0, 1.0], 1.6);
        let pat = Pattern::dot_grid(6, 8, 6, 912, 1140).unwrap();
        let opts = RenderOptions { ambient: 0.0, inverse_square: false };
        let map = render_slot(&scene, &proj, &cam, &pat, Channel::R, &SpectralPower::WHITE, &opts)
            .unwrap();

        let lit_pixels: Vec<(u32, u32)> = (0..480u32)
            .flat_map(|y| (0..640u32).map(move |x| (x, y)))
            .filter(|&(x, y)| map.at(x, y) > 0.0)
            .collect();
        assert!(!lit_pixels.is_empty());

        // Every lit camera pixel round-trips to a lit projector pixel.
        for &(x, y) in &lit_pixels {
            let hit = intersect_ray_plane(&cam.backproject(x as f64, y as f64), &scene).unwrap();
            let (pu, pv) = proj.project(hit.point).unwrap();
            assert!(pat.lit(pu.round() as u32, pv.round() as u32), "stray pixel ({x},{y})");
        }

        // Every dot center whose image lands inside the camera frame must hit
        // a lit pixel. The projector covers a taller field than the camera at
        // this range, so outer dots may fall out of view; most should not.
        let crate::pattern::PatternSpec::DotGrid { rows, cols, .. } = pat.spec else {
            unreachable!();
        };
        let mut in_view = 0;
        for i in 0..rows {
            for j in 0..cols {
                let cxp = (j as f64 + 0.5) * 912.0 / cols as f64;
                let cyp = (i as f64 + 0.5) * 1140.0 / rows as f64;
                let ray = proj.backproject(cxp, cyp);
                let hit = intersect_ray_plane(&ray, &scene).unwrap();
                let (u, v) = cam.project(hit.point).unwrap();
                if !cam.contains_pixel(u.round(), v.round()) {
                    continue;
                }
                in_view += 1;
                let (ui, vi) = (u.round() as u32, v.round() as u32);
                assert!(
                    map.at(ui, vi) > 0.0,
                    "dot ({i},{j}) projected to dark pixel ({ui},{vi})"
                );
            }
        }
        assert!(
            in_view >= (rows * cols) / 2,
            "only {in_view} of {} dot centers visible",
            rows * cols
        );
    }

    #[test]
    fn footprint_matches_lit_rendering() {
        let cam = PinholeModel::axis_aligned(120.0, 120.0, 31.5, 23.5, 64, 48, Vector3::zeros())
            .unwrap();
        let proj = projector_at_baseline(0.1);
        let scene = uniform_plane([0.8, 0.8, 0.8], 1.6);
        let pat = Pattern::solid(Rect { x: 300, y: 400, w: 200, h: 180 }, 912, 1140).unwrap();
        let fp = pattern_footprint(&scene, &proj, &cam, &pat).unwrap();
        let map = render_slot(
            &scene,
            &proj,
            &cam,
            &pat,
            Channel::B,
            &SpectralPower::WHITE,
            &RenderOptions { ambient: 0.5, inverse_square: false },
        )
        .unwrap();
        for (i, &masked) in fp.iter().enumerate() {
            assert_eq!(masked, map.values[i] > 0.5, "pixel {i}");
        }
    }
}
