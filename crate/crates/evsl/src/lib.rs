//! Desk-scale simulator and processing toolkit for RGB-D sensing with a
//! monochrome event camera watching an RGB structured-light projector.
//!
//! The projector cycles binary patterns through its red, green and blue
//! channels at a few kHz. A Lambertian plane scene reflects each flash into
//! the camera, whose pixels fire polarity events whenever log intensity moves
//! by more than a contrast threshold. Counting ON events per channel slot
//! rebuilds a color image; triangulating dot or scanning-line patterns against
//! the projector geometry rebuilds depth; an adaptive controller picks the
//! densest pattern the event-bus budget allows.
//!
//! The crate is organized as a library plus runnable examples, one per
//! capability:
//!
//! ```text
//! cargo run --release --example project_and_triangulate
//! cargo run --release --example generate_patterns
//! cargo run --release --example render_irradiance
//! cargo run --release --example simulate_events
//! cargo run --release --example reconstruct_color
//! cargo run --release --example white_balance
//! cargo run --release --example compare_metrics
//! cargo run --release --example adaptive_control
//! cargo run --release --example depth_point_cloud
//! cargo run --release --example bandwidth_sweep
//! ```
//!
//! The same functionality is scriptable through the thin `evsl` binary
//! (`simulate`, `reconstruct`, `calibrate-wb`, `metrics`, `depth`, `asl-run`,
//! `sweep`); see the README for the file formats and config keys.

pub mod asl;
pub mod charts;
pub mod cli;
pub mod color;
pub mod depth;
pub mod io;
pub mod geometry;
pub mod metrics;
pub mod pattern;
pub mod pipeline;
pub mod radiometry;
pub mod sensor;

pub use geometry::{PinholeModel, Ray, ScenePlane};
pub use pattern::{Channel, Pattern, SequencePlan};
pub use sensor::{Event, Polarity, TriggerPulse};
