//! Builds one pattern of each family at projector resolution, reports its
//! coverage, and writes the bitmaps as PBM files. Also schedules a sequence
//! plan and prints the equivalent color frame rate.

use evsl::io::netpbm::write_pbm;
use evsl::pattern::{Orientation, Rect};
use evsl::{Pattern, SequencePlan};
use std::fs;
use std::path::Path;

fn main() {
    let out = Path::new("target/example-out/generate_patterns");
    fs::create_dir_all(out).expect("create output dir");

    let (w, h) = (912u32, 1140u32);
    let named: Vec<(&str, Pattern)> = vec![
        ("dot_grid_25x40", Pattern::dot_grid(25, 40, 4, w, h).expect("dot grid")),
        ("lines_64", Pattern::multi_line(64, 1, Orientation::Vertical, w, h).expect("lines")),
        (
            "moving_step1_of_3",
            Pattern::moving_line(1, 3, 320, Orientation::Vertical, w, h).expect("moving line"),
        ),
        ("solid_roi", Pattern::solid(Rect { x: 228, y: 285, w: 456, h: 570 }, w, h).expect("roi")),
        ("full", Pattern::full(w, h)),
    ];

    for (name, p) in &named {
        println!("{name:>18}: {:7} lit pixels, coverage {:.4}", p.ones(), p.coverage);
        write_pbm(&out.join(format!("{name}.pbm")), p).expect("write pbm");
    }

    let plan = SequencePlan::build(
        named.into_iter().map(|(_, p)| p).collect(),
        4225.0,
        1,
    )
    .expect("sequence plan");
    println!(
        "\n{} slots at {} Hz -> {:.2} equivalent fps, {} us total",
        plan.slots.len(),
        plan.switch_rate_hz,
        plan.equivalent_fps(),
        plan.total_duration_us()
    );
    for slot in plan.slots.iter().take(6) {
        println!(
            "  slot {:2}: [{:4}, {:4}) us  channel {}  pattern {}",
            slot.index,
            slot.start_us,
            slot.end_us,
            slot.channel.letter(),
            slot.pattern_id
        );
    }
    println!("bitmaps under {}", out.display());
}
