//! Casts projector rays onto a plane, finds where the camera sees the hits,
//! and triangulates camera ray against projector ray back into world points.
//! The recovered points should match the true intersections to numerical
//! precision, for a fronto-parallel plane and a tilted one alike.

use evsl::geometry::{intersect_ray_plane, triangulate_rays, AlbedoMap, ScenePlane};
use evsl::PinholeModel;
use nalgebra::Vector3;

fn main() {
    let camera =
        PinholeModel::axis_aligned(600.0, 600.0, 319.5, 239.5, 640, 480, Vector3::zeros())
            .expect("camera intrinsics");
    let projector = PinholeModel::axis_aligned(
        1100.0,
        1100.0,
        455.5,
        569.5,
        912,
        1140,
        Vector3::new(0.1, 0.0, 0.0),
    )
    .expect("projector intrinsics");

    for tilt_deg in [0.0, 12.0] {
        let gray = AlbedoMap::from_fn(1, 1, |_, _| [0.5; 3]);
        let plane = ScenePlane::frontal(1.6, tilt_deg, gray, 2.2).expect("scene plane");

        let mut checked = 0u32;
        let mut worst = 0.0f64;
        for py in (100..1040).step_by(94) {
            for px in (100..812).step_by(71) {
                let proj_ray = projector.backproject(px as f64, py as f64);
                let Ok(hit) = intersect_ray_plane(&proj_ray, &plane) else { continue };
                let Ok((cx, cy)) = camera.project(hit.point) else { continue };
                if !camera.contains_pixel(cx, cy) {
                    continue;
                }
                let cam_ray = camera.backproject(cx, cy);
                let (point, gap) =
                    triangulate_rays(&cam_ray, &proj_ray).expect("baseline keeps rays skew");
                worst = worst.max((point - hit.point).norm()).max(gap);
                checked += 1;
            }
        }
        println!(
            "tilt {tilt_deg:4.1} deg: {checked} projector pixels round-tripped, \
             worst position error {worst:.2e} m"
        );
    }
}
