//! Calibrates per-channel gains on a gray card under an unbalanced lamp,
//! then shows what the gains buy on the color chart: average per-channel
//! RMSE against the true albedo, with and without the calibration.

use evsl::io::config::RunConfig;
use evsl::metrics::rmse_per_channel;
use evsl::pipeline::{calibrate_wb, reconstruct_cycles, simulate};

fn rig(albedo: &str) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.camera.width = 160;
    cfg.camera.height = 120;
    // Narrow lens: every camera pixel stays inside the projector footprint.
    cfg.camera.fx = 240.0;
    cfg.camera.fy = 240.0;
    cfg.camera.contrast_threshold = 0.004;
    cfg.camera.bus_cap_events_per_s = 1e12;
    cfg.projector.width = 456;
    cfg.projector.height = 570;
    cfg.projector.fx = 550.0;
    cfg.projector.fy = 550.0;
    cfg.projector.power_r = 0.8;
    cfg.projector.power_g = 1.0;
    cfg.projector.power_b = 1.2;
    cfg.scene.ambient = 8.0;
    cfg.scene.albedo = albedo.into();
    cfg.pattern.kind = "solid".into();
    cfg.pattern.cycles = 1;
    cfg
}

fn main() {
    let gray = rig("builtin:gray");
    let sim = simulate(&gray).expect("gray-card run");
    let gains = calibrate_wb(&sim.events, &sim.triggers, &gray).expect("calibrate");
    println!(
        "lamp power (r,g,b) = (0.8, 1.0, 1.2) -> gains (r,g,b) = ({:.4}, {:.4}, {:.4})",
        gains.r, gains.g, gains.b
    );

    let chart = rig("builtin:chart24");
    let sim = simulate(&chart).expect("chart run");
    let mut scores = Vec::new();
    for (label, g) in [("uncalibrated", None), ("calibrated", Some(&gains))] {
        let mut cfg = chart.clone();
        if let Some(g) = g {
            cfg.recon.gain_r = g.r;
            cfg.recon.gain_g = g.g;
            cfg.recon.gain_b = g.b;
        }
        let frames = reconstruct_cycles(&sim.events, &sim.triggers, &cfg).expect("reconstruct");
        let rmse = rmse_per_channel(&frames[0].frame, &sim.ground_truth).expect("rmse");
        let avg = (rmse.r + rmse.g + rmse.b) / 3.0;
        println!("{label:>13}: rmse r/g/b {:.2}/{:.2}/{:.2}, average {avg:.2}", rmse.r, rmse.g, rmse.b);
        scores.push(avg);
    }
    println!(
        "white balance improves average per-channel RMSE by {:.1}%",
        100.0 * (scores[0] - scores[1]) / scores[0]
    );
}
