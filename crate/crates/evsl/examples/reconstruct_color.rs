//! End to end color imaging: flash the 24-patch chart with a solid pattern,
//! count ON events per channel slot, and rebuild an RGB frame scored against
//! the rendered ground truth.
//!
//! The rig is tuned so one noiseless cycle is nearly pixel-exact: a strong
//! bias light keeps the log response linear in reflectance, a very fine
//! contrast threshold makes count quantization finer than one 8-bit step,
//! and a narrow lens keeps shading flat across the frame.

use evsl::io::config::RunConfig;
use evsl::io::netpbm::write_ppm;
use evsl::metrics::metric_report;
use evsl::pipeline::{reconstruct_cycles, simulate};
use std::fs;
use std::path::Path;

fn main() {
    let out = Path::new("target/example-out/reconstruct_color");
    fs::create_dir_all(out).expect("create output dir");

    let mut cfg = RunConfig::default();
    cfg.camera.width = 48;
    cfg.camera.height = 36;
    cfg.camera.fx = 1375.0;
    cfg.camera.fy = 1375.0;
    cfg.camera.contrast_threshold = 5e-7;
    cfg.camera.bus_cap_events_per_s = 1e12;
    cfg.projector.width = 456;
    cfg.projector.height = 570;
    cfg.projector.fx = 550.0;
    cfg.projector.fy = 550.0;
    cfg.projector.baseline_m = 0.0;
    cfg.scene.ambient = 1000.0;
    cfg.scene.width_m = 0.056;
    cfg.pattern.kind = "solid".into();
    cfg.pattern.cycles = 1;

    // Exposure calibrated so a full-reflectance surface maps to 255. Counts
    // quantize downward, so a slight upward bias keeps values from landing
    // under their rounding boundary.
    let full_scale_count = ((cfg.scene.ambient + cfg.camera.log_eps + 1.0)
        / (cfg.scene.ambient + cfg.camera.log_eps))
        .ln()
        / cfg.camera.contrast_threshold;
    cfg.recon.scale = 255.0 * 1.0009 / full_scale_count;

    let sim = simulate(&cfg).expect("simulate");
    let frames = reconstruct_cycles(&sim.events, &sim.triggers, &cfg).expect("reconstruct");
    println!(
        "{} events over {} triggers -> {} complete color frame(s)",
        sim.events.len(),
        sim.triggers.len(),
        frames.len()
    );

    let cycle = &frames[0];
    println!(
        "frame window [{}, {}) us, exposure scale {:.6}",
        cycle.window.0, cycle.window.1, cycle.scale
    );
    let report = metric_report(&cycle.frame, &sim.ground_truth).expect("metrics");
    println!(
        "vs ground truth: rmse r/g/b {:.3}/{:.3}/{:.3} overall {:.3}, psnr {:.1} dB, hc {:.4}",
        report.rmse.r, report.rmse.g, report.rmse.b, report.rmse.overall, report.psnr_db, report.hc
    );

    write_ppm(&out.join("reconstructed.ppm"), &cycle.frame).expect("write frame");
    write_ppm(&out.join("ground_truth.ppm"), &sim.ground_truth).expect("write truth");
    println!("frames under {}", out.display());
}
