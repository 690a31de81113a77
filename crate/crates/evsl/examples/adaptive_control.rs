//! Replays the bandwidth controller against a scripted motion ramp. The run
//! first calibrates how many events one unit of pattern coverage costs per
//! cycle, then logs every rung decision as motion eats the budget.

use evsl::io::config::RunConfig;
use evsl::pipeline::run_asl;
use std::fs;
use std::path::Path;

fn main() {
    let out = Path::new("target/example-out/adaptive_control");
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
    cfg.asl.budget_events_per_s = 1.2e9;
    cfg.asl.rm_start = 0.0;
    cfg.asl.rm_end = 9e8;
    cfg.asl.decisions = 30;

    let run = run_asl(&cfg).expect("controller run");
    println!(
        "fitted cost: {:.3e} events per cycle per unit coverage",
        run.alpha
    );

    let mut last = usize::MAX;
    for row in &run.rows {
        if row.rung != last || row.budget_infeasible {
            println!(
                "t={:7} us  rung {}  coverage {:.4}  motion {:.2e} ev/s  utilization {:.2}{}",
                row.t_us,
                row.rung,
                row.coverage,
                row.r_m,
                row.utilization,
                if row.budget_infeasible { "  BUDGET INFEASIBLE" } else { "" }
            );
            last = row.rung;
        }
    }
    let peak = run.rows.iter().map(|r| r.rung).max().unwrap();
    println!(
        "\nclimbed to rung {peak}, ended on rung {} after {} decisions",
        run.rows.last().unwrap().rung,
        run.rows.len()
    );

    fs::write(out.join("decisions.csv"), &run.csv).expect("write csv");
    println!("full log at {}", out.join("decisions.csv").display());
}
