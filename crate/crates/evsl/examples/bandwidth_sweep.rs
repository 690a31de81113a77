//! Sweeps line-pattern coverage against accumulation window length, scoring
//! each cell's reconstructions against a long-exposure reference of the same
//! pattern. The result is the quality-versus-bandwidth table behind the
//! pattern ladder.

use evsl::io::config::RunConfig;
use evsl::pipeline::run_sweep;
use std::fs;
use std::path::Path;

fn main() {
    let out = Path::new("target/example-out/bandwidth_sweep");
    fs::create_dir_all(out).expect("create output dir");

    let mut cfg = RunConfig::default();
    cfg.camera.width = 160;
    cfg.camera.height = 120;
    cfg.camera.fx = 150.0;
    cfg.camera.fy = 150.0;
    cfg.projector.width = 456;
    cfg.projector.height = 570;
    cfg.projector.fx = 550.0;
    cfg.projector.fy = 550.0;
    cfg.sweep.coverages = vec![0.0154, 0.0702];
    cfg.sweep.windows_ms = vec![2.5, 7.14];
    cfg.sweep.frames = 20;

    let sweep = run_sweep(&cfg).expect("sweep");
    print!("{}", sweep.csv);
    for row in &sweep.rows {
        println!(
            "cp {:.4} at {:5.2} ms ({:6.1} fps equivalent): avg rmse {:.3}, avg hc {:.4}",
            row.cp_actual, row.window_ms, row.equivalent_fps, row.avg_rmse, row.avg_hc
        );
    }

    fs::write(out.join("sweep.csv"), &sweep.csv).expect("write csv");
    println!("table at {}", out.join("sweep.csv").display());
}
