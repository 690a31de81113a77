//! Flashes a full projector frame at the 24-patch chart once per color
//! channel and writes the camera-plane irradiance as 16-bit PGMs. The lamp
//! is deliberately unbalanced so the three channels differ.

use evsl::charts::chart24;
use evsl::geometry::ScenePlane;
use evsl::io::netpbm::write_pgm16;
use evsl::radiometry::{render_slot, RenderOptions, SpectralPower};
use evsl::{Channel, Pattern, PinholeModel};
use nalgebra::Vector3;
use std::fs;
use std::path::Path;

fn main() {
    let out = Path::new("target/example-out/render_irradiance");
    fs::create_dir_all(out).expect("create output dir");

    let camera =
        PinholeModel::axis_aligned(300.0, 300.0, 159.5, 119.5, 320, 240, Vector3::zeros())
            .expect("camera intrinsics");
    let projector = PinholeModel::axis_aligned(
        550.0,
        550.0,
        227.5,
        284.5,
        456,
        570,
        Vector3::new(0.1, 0.0, 0.0),
    )
    .expect("projector intrinsics");
    let plane = ScenePlane::frontal(1.6, 0.0, chart24(), 2.2).expect("scene plane");

    let pattern = Pattern::full(456, 570);
    let power = SpectralPower { r: 0.8, g: 1.0, b: 1.2 };
    let opts = RenderOptions { ambient: 0.01, inverse_square: false };

    for channel in Channel::ALL {
        let map = render_slot(&plane, &projector, &camera, &pattern, channel, &power, &opts)
            .expect("render");
        let mean = map.values.iter().sum::<f64>() / map.values.len() as f64;
        let peak = map.values.iter().fold(0.0f64, |m, &v| m.max(v));
        let floor = map.values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        println!(
            "{} flash: min {floor:.4}  mean {mean:.4}  peak {peak:.4}",
            channel.letter()
        );
        write_pgm16(
            &out.join(format!("irradiance_{}.pgm", channel.letter())),
            &map.values,
            map.width,
            map.height,
        )
        .expect("write pgm");
    }
    println!(
        "pixels off the chart stay at the ambient floor ({})",
        opts.ambient
    );
    println!("rasters under {}", out.display());
}
