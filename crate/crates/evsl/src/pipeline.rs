//! End-to-end runs driven by a [`RunConfig`]: build the rig, render the slot
//! schedule, sense events, and feed the downstream stages (color
//! reconstruction, white balance, depth, bandwidth control, quality sweeps).

use std::collections::HashMap;

use nalgebra::Vector3;
use thiserror::Error;

use crate::asl::{
    fit_sl_cost, select_pattern, AslError, ControllerParams, ControllerState, PatternLadder,
};
use crate::charts::{resolve_albedo, ChartError};
use crate::color::{
    accumulate_channels, auto_scale, calibrate_white_balance, counts_to_frame, ChannelCounts,
    ColorError, Rgb8Frame, WhiteBalanceGains,
};
use crate::depth::{
    cluster_dots, colorize, correspond_and_triangulate, depth_from_moving_line, DepthError,
    DepthSample, LineSlot, MatchOptions, PointCloud,
};
use crate::geometry::{
    intersect_ray_plane, AlbedoMap, GeometryError, PinholeModel, ScenePlane,
};
use crate::io::config::{ConfigError, RunConfig};
use crate::metrics::{histogram_correlation, rmse_per_channel, MetricsError};
use crate::pattern::{Channel, Orientation, Pattern, PatternError, Rect, SequencePlan};
use crate::radiometry::{
    render_slot, IrradianceFrame, IrradianceMap, RenderError, RenderOptions, SpectralPower,
};
use crate::sensor::{DropStats, Event, EventSensor, SensorConfig, SensorError, TriggerPulse};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("pattern: {0}")]
    Pattern(#[from] PatternError),
    #[error("render: {0}")]
    Render(#[from] RenderError),
    #[error("sensor: {0}")]
    Sensor(#[from] SensorError),
    #[error("color: {0}")]
    Color(#[from] ColorError),
    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),
    #[error("depth: {0}")]
    Depth(#[from] DepthError),
    #[error("bandwidth control: {0}")]
    Asl(#[from] AslError),
    #[error("albedo chart: {0}")]
    Chart(#[from] ChartError),
    #[error("{0}")]
    BadConfig(String),
}

/// Devices, scene and per-run knobs resolved from a [`RunConfig`].
pub struct SceneSetup {
    pub camera: PinholeModel,
    pub projector: PinholeModel,
    pub plane: ScenePlane,
    pub sensor: SensorConfig,
    pub power: SpectralPower,
    pub render: RenderOptions,
    /// Lit fraction of each slot; the rest is the dark reset phase.
    pub duty: f64,
    pub switch_rate_hz: f64,
}

impl SceneSetup {
    pub fn from_config(cfg: &RunConfig) -> Result<SceneSetup, PipelineError> {
        let cam = &cfg.camera;
        let proj = &cfg.projector;
        if !(proj.duty > 0.0 && proj.duty <= 1.0) {
            return Err(PipelineError::BadConfig(format!(
                "projector.duty must be in (0, 1], got {}",
                proj.duty
            )));
        }
        let camera = PinholeModel::axis_aligned(
            cam.fx,
            cam.fy,
            cam.cx(),
            cam.cy(),
            cam.width,
            cam.height,
            Vector3::zeros(),
        )?;
        let projector = PinholeModel::axis_aligned(
            proj.fx,
            proj.fy,
            proj.cx(),
            proj.cy(),
            proj.width,
            proj.height,
            Vector3::new(proj.baseline_m, 0.0, 0.0),
        )?;
        let albedo = resolve_albedo(&cfg.scene.albedo)?;
        let plane =
            ScenePlane::frontal(cfg.scene.distance_m, cfg.scene.tilt_y_deg, albedo, cfg.scene.width_m)?;
        let sensor = SensorConfig {
            contrast_threshold: cam.contrast_threshold,
            refractory_us: cam.refractory_us,
            log_eps: cam.log_eps,
            noise_rate_hz: cam.noise_rate_hz,
            bus_cap_events_per_s: cam.bus_cap_events_per_s,
            bus_bucket_us: cam.bus_bucket_us,
            seed: cam.seed,
        };
        Ok(SceneSetup {
            camera,
            projector,
            plane,
            sensor,
            power: SpectralPower { r: proj.power_r, g: proj.power_g, b: proj.power_b },
            render: RenderOptions { ambient: cfg.scene.ambient, inverse_square: cfg.scene.inverse_square },
            duty: proj.duty,
            switch_rate_hz: proj.switch_rate_hz,
        })
    }
}

pub fn parse_orientation(s: &str) -> Result<Orientation, PipelineError> {
    match s {
        "vertical" => Ok(Orientation::Vertical),
        "horizontal" => Ok(Orientation::Horizontal),
        other => Err(PipelineError::BadConfig(format!(
            "unknown orientation '{other}' (vertical, horizontal)"
        ))),
    }
}

/// Builds the projected pattern list the config describes: one pattern for
/// `dots`, `lines` and `solid`, one per step for `moving`.
pub fn patterns_from_config(cfg: &RunConfig) -> Result<Vec<Pattern>, PipelineError> {
    let p = &cfg.pattern;
    let (w, h) = (cfg.projector.width, cfg.projector.height);
    match p.kind.as_str() {
        "dots" => Ok(vec![Pattern::dot_grid(p.rows, p.cols, p.dot_size, w, h)?]),
        "lines" => Ok(vec![Pattern::multi_line(
            p.count,
            p.line_width,
            parse_orientation(&p.orientation)?,
            w,
            h,
        )?]),
        "moving" => {
            let orientation = parse_orientation(&p.orientation)?;
            (0..p.steps)
                .map(|s| {
                    Pattern::moving_line(s, p.steps, p.line_width, orientation, w, h)
                        .map_err(PipelineError::from)
                })
                .collect()
        }
        "solid" => Ok(vec![Pattern::solid(Rect { x: 0, y: 0, w, h }, w, h)?]),
        other => Err(PipelineError::BadConfig(format!(
            "unknown pattern kind '{other}' (dots, lines, moving, solid)"
        ))),
    }
}

/// Nominal slot length at a switch rate, microseconds.
pub fn slot_duration_us(switch_rate_hz: f64) -> u64 {
    (1e6 / switch_rate_hz).round() as u64
}

fn lit_end_us(start_us: u64, end_us: u64, duty: f64) -> u64 {
    let dur = end_us - start_us;
    let lit = ((dur as f64 * duty).round() as u64).clamp(1, dur);
    start_us + lit
}

/// Expands a slot plan into the sensor's frame schedule: every slot becomes a
/// lit phase carrying the trigger and a dark reset phase at ambient light.
/// Renderings are shared across repeats of the same (pattern, channel) slot.
pub fn schedule_frames(
    setup: &SceneSetup,
    plan: &SequencePlan,
) -> Result<Vec<IrradianceFrame>, PipelineError> {
    let dark = IrradianceMap::uniform(setup.camera.width, setup.camera.height, setup.render.ambient);
    let mut cache: HashMap<(u32, usize), IrradianceMap> = HashMap::new();
    let mut frames = Vec::with_capacity(plan.slots.len() * 2);
    for slot in &plan.slots {
        if slot.end_us <= slot.start_us {
            return Err(PipelineError::BadConfig(format!(
                "slot {} has no duration; lower projector.switch_rate_hz",
                slot.index
            )));
        }
        let key = (slot.pattern_id, slot.channel.index());
        let lit = match cache.get(&key) {
            Some(m) => m.clone(),
            None => {
                let m = render_slot(
                    &setup.plane,
                    &setup.projector,
                    &setup.camera,
                    &plan.patterns[slot.pattern_id as usize],
                    slot.channel,
                    &setup.power,
                    &setup.render,
                )?;
                cache.insert(key, m.clone());
                m
            }
        };
        let mid = lit_end_us(slot.start_us, slot.end_us, setup.duty);
        frames.push(IrradianceFrame {
            map: lit,
            start_us: slot.start_us,
            end_us: mid,
            slot: slot.index,
            channel: slot.channel,
            pattern_id: slot.pattern_id,
            trigger: true,
        });
        if slot.end_us > mid {
            frames.push(IrradianceFrame {
                map: dark.clone(),
                start_us: mid,
                end_us: slot.end_us,
                slot: slot.index,
                channel: slot.channel,
                pattern_id: slot.pattern_id,
                trigger: false,
            });
        }
    }
    Ok(frames)
}

/// What the scene looks like to the camera under even white light: the plane's
/// albedo sampled through the camera model, 8 bits per channel. Rays that miss
/// the plane give black. This is the reference image reconstructions are
/// scored against.
pub fn ground_truth_frame(setup: &SceneSetup) -> Rgb8Frame {
    let mut frame = Rgb8Frame::new(setup.camera.width, setup.camera.height);
    for y in 0..setup.camera.height {
        for x in 0..setup.camera.width {
            let ray = setup.camera.backproject(x as f64, y as f64);
            let Ok(hit) = intersect_ray_plane(&ray, &setup.plane) else { continue };
            let a = setup.plane.albedo_at(hit.point);
            frame.set(x, y, [
                (a[0] * 255.0).round() as u8,
                (a[1] * 255.0).round() as u8,
                (a[2] * 255.0).round() as u8,
            ]);
        }
    }
    frame
}

pub struct SimulationOutput {
    pub plan: SequencePlan,
    pub events: Vec<Event>,
    pub triggers: Vec<TriggerPulse>,
    pub stats: DropStats,
    pub ground_truth: Rgb8Frame,
}

/// Full in-memory simulation of the configured run: every pattern cycle is
/// rendered, scheduled lit/dark, and pushed through the event sensor.
pub fn simulate(cfg: &RunConfig) -> Result<SimulationOutput, PipelineError> {
    let setup = SceneSetup::from_config(cfg)?;
    let patterns = patterns_from_config(cfg)?;
    let plan = SequencePlan::build(patterns, setup.switch_rate_hz, cfg.pattern.cycles)?;
    let frames = schedule_frames(&setup, &plan)?;
    let baseline = vec![
        setup.render.ambient;
        setup.camera.width as usize * setup.camera.height as usize
    ];
    let (events, triggers, stats) = crate::sensor::sense(&frames, &baseline, &setup.sensor)?;
    let ground_truth = ground_truth_frame(&setup);
    Ok(SimulationOutput { plan, events, triggers, stats, ground_truth })
}

/// Complete R,G,B trigger runs. Each entry is the index of the R trigger and
/// the cycle's accumulation window; the window closes at the next trigger, or
/// one nominal slot after the last one.
pub fn complete_cycles(triggers: &[TriggerPulse], slot_us: u64) -> Vec<(usize, (u64, u64))> {
    let mut out = Vec::new();
    let mut i = 0;
    while i + 3 <= triggers.len() {
        let chans = [triggers[i].channel, triggers[i + 1].channel, triggers[i + 2].channel];
        if chans == [Channel::R, Channel::G, Channel::B] {
            let start = triggers[i].t_us;
            let end = match triggers.get(i + 3) {
                Some(t) => t.t_us,
                None => triggers[i + 2].t_us + slot_us,
            };
            out.push((i, (start, end)));
            i += 3;
        } else {
            i += 1;
        }
    }
    out
}

pub fn gains_from_config(cfg: &RunConfig) -> WhiteBalanceGains {
    WhiteBalanceGains { r: cfg.recon.gain_r, g: cfg.recon.gain_g, b: cfg.recon.gain_b }
}

pub struct CycleFrame {
    pub frame: Rgb8Frame,
    pub counts: ChannelCounts,
    pub window: (u64, u64),
    pub scale: f64,
}

fn window_slice<'e>(events: &'e [Event], window: (u64, u64)) -> &'e [Event] {
    let a = events.partition_point(|e| e.t_us < window.0);
    let b = events.partition_point(|e| e.t_us < window.1);
    &events[a..b]
}

/// One color frame per complete R,G,B cycle found in the trigger stream,
/// using the configured gains and exposure scale (0 = automatic).
pub fn reconstruct_cycles(
    events: &[Event],
    triggers: &[TriggerPulse],
    cfg: &RunConfig,
) -> Result<Vec<CycleFrame>, PipelineError> {
    let gains = gains_from_config(cfg);
    let slot_us = slot_duration_us(cfg.projector.switch_rate_hz);
    let (w, h) = (cfg.camera.width, cfg.camera.height);
    let mut out = Vec::new();
    for (i, window) in complete_cycles(triggers, slot_us) {
        let counts =
            accumulate_channels(window_slice(events, window), &triggers[i..i + 3], window, w, h)?;
        let scale =
            if cfg.recon.scale > 0.0 { cfg.recon.scale } else { auto_scale(&counts, &gains) };
        let frame = counts_to_frame(&counts, &gains, scale)?;
        out.push(CycleFrame { frame, counts, window, scale });
    }
    Ok(out)
}

/// Pixels of the white-balance reference region; zero width or height selects
/// the full frame. The region is clipped to the frame.
pub fn wb_region(cfg: &RunConfig) -> Vec<(u32, u32)> {
    let (w, h) = (cfg.camera.width, cfg.camera.height);
    let (rx, ry, rw, rh) = if cfg.wb.region_w == 0 || cfg.wb.region_h == 0 {
        (0, 0, w, h)
    } else {
        (cfg.wb.region_x, cfg.wb.region_y, cfg.wb.region_w, cfg.wb.region_h)
    };
    let mut px = Vec::new();
    for y in ry..(ry + rh).min(h) {
        for x in rx..(rx + rw).min(w) {
            px.push((x, y));
        }
    }
    px
}

/// Gains that equalize the configured reference region across the whole
/// recorded stream.
pub fn calibrate_wb(
    events: &[Event],
    triggers: &[TriggerPulse],
    cfg: &RunConfig,
) -> Result<WhiteBalanceGains, PipelineError> {
    let slot_us = slot_duration_us(cfg.projector.switch_rate_hz);
    let start = triggers.first().map(|t| t.t_us).unwrap_or(0);
    let end = triggers.last().map(|t| t.t_us + slot_us).unwrap_or(0);
    let counts = accumulate_channels(
        window_slice(events, (start, end)),
        triggers,
        (start, end),
        cfg.camera.width,
        cfg.camera.height,
    )?;
    Ok(calibrate_white_balance(&counts, &wb_region(cfg))?)
}

pub struct DepthOutput {
    pub samples: Vec<DepthSample>,
    pub cloud: PointCloud,
    /// Samples whose pixel fell outside the color frame.
    pub color_dropped: usize,
    pub dots_ambiguous: usize,
    pub dots_gap_rejected: usize,
    pub dots_unmatched: usize,
    pub line_out_of_schedule: u64,
}

fn prior_plane(cfg: &RunConfig) -> Result<ScenePlane, PipelineError> {
    let gray = AlbedoMap::from_fn(1, 1, |_, _| [0.5; 3]);
    Ok(ScenePlane::frontal(cfg.depth.prior_distance_m, 0.0, gray, cfg.scene.width_m)?)
}

/// Depth recovery for the configured pattern: dot grids are clustered over the
/// first complete cycle and triangulated against the prior plane; a moving
/// line converts each slot to a light plane. Points take their color from
/// `color`.
pub fn depth_run(
    cfg: &RunConfig,
    events: &[Event],
    triggers: &[TriggerPulse],
    color: &Rgb8Frame,
) -> Result<DepthOutput, PipelineError> {
    let setup = SceneSetup::from_config(cfg)?;
    let slot_us = slot_duration_us(cfg.projector.switch_rate_hz);
    match cfg.pattern.kind.as_str() {
        "dots" => {
            let pattern = patterns_from_config(cfg)?.remove(0);
            let (_, window) = *complete_cycles(triggers, slot_us)
                .first()
                .ok_or(ColorError::NoCompleteCycle(0, 0))
                .map_err(PipelineError::Color)?;
            let obs = cluster_dots(
                window_slice(events, window),
                cfg.camera.width,
                cfg.camera.height,
                cfg.depth.min_count,
            )?;
            let prior = prior_plane(cfg)?;
            let opts = MatchOptions {
                gap_max_m: cfg.depth.gap_max_m,
                tie_tolerance_px: cfg.depth.tie_tolerance_px,
            };
            let res = correspond_and_triangulate(
                &obs,
                &pattern,
                &setup.camera,
                &setup.projector,
                &prior,
                &opts,
            )?;
            let (cloud, color_dropped) = colorize(&res.samples, color);
            Ok(DepthOutput {
                samples: res.samples,
                cloud,
                color_dropped,
                dots_ambiguous: res.ambiguous,
                dots_gap_rejected: res.gap_rejected,
                dots_unmatched: res.unmatched_dots,
                line_out_of_schedule: 0,
            })
        }
        "moving" => {
            let orientation = parse_orientation(&cfg.pattern.orientation)?;
            let extent = match orientation {
                Orientation::Vertical => cfg.projector.width,
                Orientation::Horizontal => cfg.projector.height,
            };
            if cfg.pattern.steps == 0 {
                return Err(PipelineError::BadConfig("pattern.steps must be >= 1".into()));
            }
            let schedule: Vec<LineSlot> = triggers
                .iter()
                .map(|t| {
                    let coord = Pattern::moving_line_start(
                        t.pattern_id,
                        cfg.pattern.steps,
                        cfg.pattern.line_width,
                        extent,
                    );
                    LineSlot {
                        start_us: t.t_us,
                        end_us: lit_end_us(t.t_us, t.t_us + slot_us, cfg.projector.duty),
                        coord,
                        line_width: cfg.pattern.line_width,
                        orientation,
                    }
                })
                .collect();
            let res =
                depth_from_moving_line(events, &schedule, &setup.camera, &setup.projector)?;
            let (cloud, color_dropped) = colorize(&res.samples, color);
            Ok(DepthOutput {
                samples: res.samples,
                cloud,
                color_dropped,
                dots_ambiguous: 0,
                dots_gap_rejected: 0,
                dots_unmatched: 0,
                line_out_of_schedule: res.out_of_schedule,
            })
        }
        other => Err(PipelineError::BadConfig(format!(
            "depth needs pattern.kind dots or moving, got '{other}'"
        ))),
    }
}

pub struct AslDecisionRow {
    pub decision: u32,
    pub t_us: u64,
    pub rung: usize,
    pub coverage: f64,
    pub r_m: f64,
    pub r_sl: f64,
    pub utilization: f64,
    pub changed: bool,
    pub budget_infeasible: bool,
}

pub struct AslRunOutput {
    /// Fitted structured-light cost: events per cycle per unit coverage.
    pub alpha: f64,
    pub rows: Vec<AslDecisionRow>,
    pub csv: String,
}

pub const ASL_CSV_HEADER: &str = "time_us,rung,cp,r_sl,r_m,utilization,flag";

/// Calibrates the event cost of coverage by simulating one cycle per ladder
/// rung, then replays the controller against a linear motion-rate ramp from
/// `asl.rm_start` to `asl.rm_end` and logs every decision.
pub fn run_asl(cfg: &RunConfig) -> Result<AslRunOutput, PipelineError> {
    let setup = SceneSetup::from_config(cfg)?;
    let ladder = PatternLadder::standard(cfg.projector.width, cfg.projector.height)?;
    let cycle_rate = setup.switch_rate_hz / 3.0;

    let mut history = Vec::with_capacity(ladder.len());
    let baseline = vec![
        setup.render.ambient;
        setup.camera.width as usize * setup.camera.height as usize
    ];
    for rung in 0..ladder.len() {
        let plan = SequencePlan::build(vec![ladder.pattern(rung)?], setup.switch_rate_hz, 1)?;
        let frames = schedule_frames(&setup, &plan)?;
        let (events, _, _) = crate::sensor::sense(&frames, &baseline, &setup.sensor)?;
        history.push((ladder.rungs[rung].coverage, events.len() as f64));
    }
    let alpha = fit_sl_cost(&history)?;

    let params = ControllerParams {
        budget_events_per_s: cfg.asl.budget_events_per_s,
        margin: cfg.asl.margin,
        beta_low: cfg.asl.beta_low,
        beta_high: cfg.asl.beta_high,
        dwell_decisions: cfg.asl.dwell,
        cycle_rate_hz: cycle_rate,
    };
    params.validate()?;
    let mut state = ControllerState::new(0, &ladder)?;
    let cycle_us = 3 * slot_duration_us(setup.switch_rate_hz);
    let n = cfg.asl.decisions;
    let mut rows = Vec::with_capacity(n as usize);
    let mut csv = String::from(ASL_CSV_HEADER);
    csv.push('\n');
    for d in 0..n {
        let frac = if n > 1 { d as f64 / (n - 1) as f64 } else { 0.0 };
        let r_m = cfg.asl.rm_start + frac * (cfg.asl.rm_end - cfg.asl.rm_start);
        let decision = select_pattern(&mut state, &ladder, alpha, r_m, &params)?;
        let row = AslDecisionRow {
            decision: d,
            t_us: d as u64 * cycle_us,
            rung: decision.rung,
            coverage: ladder.rungs[decision.rung].coverage,
            r_m,
            r_sl: decision.r_sl_projected,
            utilization: decision.utilization,
            changed: decision.changed,
            budget_infeasible: decision.budget_infeasible,
        };
        csv.push_str(&format!(
            "{},{},{:.6},{:.3},{:.3},{:.6},{}\n",
            row.t_us,
            row.rung,
            row.coverage,
            row.r_sl,
            row.r_m,
            row.utilization,
            row.budget_infeasible as u8,
        ));
        rows.push(row);
    }
    Ok(AslRunOutput { alpha, rows, csv })
}

pub struct SweepRow {
    pub cp_requested: f64,
    pub cp_actual: f64,
    pub window_ms: f64,
    pub equivalent_fps: f64,
    pub frames: u32,
    pub avg_rmse: f64,
    pub avg_hc: f64,
    /// Cycles whose reconstruction had no usable histogram.
    pub hc_degenerate: u32,
    /// Requested coverage missed by more than 2% relative.
    pub coverage_flag: bool,
}

pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub csv: String,
}

pub const SWEEP_CSV_HEADER: &str =
    "cp_requested,cp_actual,window_ms,equivalent_fps,frames,avg_rmse,avg_hc,hc_degenerate,coverage_flag";

/// Streams `cycles` repetitions of one pattern through a fresh sensor at the
/// given switch rate, handing each cycle's channel counts to `per_cycle` as
/// soon as they exist. Only one cycle of events is alive at a time.
fn stream_pattern_cycles(
    setup: &SceneSetup,
    lit_maps: &[IrradianceMap],
    dark: &IrradianceMap,
    baseline: &[f64],
    pattern: &Pattern,
    rate: f64,
    cycles: u32,
    mut per_cycle: impl FnMut(ChannelCounts) -> Result<(), PipelineError>,
) -> Result<(), PipelineError> {
    let (w, h) = (setup.camera.width, setup.camera.height);
    let plan = SequencePlan::build(vec![pattern.clone()], rate, cycles)?;
    let mut sensor = EventSensor::new(w, h, baseline, &setup.sensor)?;
    for cycle in 0..cycles {
        let mut cyc_events = Vec::new();
        let mut cyc_triggers = Vec::new();
        for k in 0..3 {
            let slot = &plan.slots[(cycle * 3 + k) as usize];
            if slot.end_us <= slot.start_us {
                return Err(PipelineError::BadConfig(format!(
                    "slot {} has no duration; widen the window",
                    slot.index
                )));
            }
            let mid = lit_end_us(slot.start_us, slot.end_us, setup.duty);
            cyc_triggers.push(TriggerPulse {
                t_us: slot.start_us,
                slot: slot.index,
                channel: slot.channel,
                pattern_id: slot.pattern_id,
            });
            cyc_events.extend(sensor.feed(&IrradianceFrame {
                map: lit_maps[slot.channel.index()].clone(),
                start_us: slot.start_us,
                end_us: mid,
                slot: slot.index,
                channel: slot.channel,
                pattern_id: slot.pattern_id,
                trigger: true,
            })?);
            if slot.end_us > mid {
                cyc_events.extend(sensor.feed(&IrradianceFrame {
                    map: dark.clone(),
                    start_us: mid,
                    end_us: slot.end_us,
                    slot: slot.index,
                    channel: slot.channel,
                    pattern_id: slot.pattern_id,
                    trigger: false,
                })?);
            }
        }
        let window = (
            plan.slots[(cycle * 3) as usize].start_us,
            plan.slots[(cycle * 3 + 2) as usize].end_us,
        );
        per_cycle(accumulate_channels(&cyc_events, &cyc_triggers, window, w, h)?)?;
    }
    Ok(())
}

/// Quality versus bandwidth grid. For every requested coverage a single-pixel
/// vertical line pattern is built; its reference frame accumulates events over
/// a one-second window, mirroring how a long exposure converges. Every
/// (coverage, cycle window) cell then re-senses the scene for `sweep.frames`
/// cycles and scores each cycle's reconstruction against the reference.
/// Cycles are simulated and scored one at a time, so memory stays flat no
/// matter how long a cell runs.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepOutput, PipelineError> {
    if cfg.sweep.frames == 0 {
        return Err(PipelineError::BadConfig("sweep.frames must be >= 1".into()));
    }
    let Some(&first_window_ms) = cfg.sweep.windows_ms.first() else {
        return Err(PipelineError::BadConfig("sweep.windows_ms must not be empty".into()));
    };
    for &window_ms in &cfg.sweep.windows_ms {
        if !(window_ms > 0.0) {
            return Err(PipelineError::BadConfig(format!(
                "sweep window must be positive, got {window_ms} ms"
            )));
        }
    }
    let setup = SceneSetup::from_config(cfg)?;
    let gains = gains_from_config(cfg);
    let (w, h) = (setup.camera.width, setup.camera.height);
    let n = w as usize * h as usize;
    let baseline = vec![setup.render.ambient; n];
    let dark = IrradianceMap::uniform(w, h, setup.render.ambient);
    let scale_for = |counts: &ChannelCounts| {
        if cfg.recon.scale > 0.0 {
            cfg.recon.scale
        } else {
            auto_scale(counts, &gains)
        }
    };

    let mut rows = Vec::new();
    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    for &cp in &cfg.sweep.coverages {
        if !(cp > 0.0 && cp <= 1.0) {
            return Err(PipelineError::BadConfig(format!(
                "sweep coverage must be in (0, 1], got {cp}"
            )));
        }
        let count = ((cp * cfg.projector.width as f64).round() as u32).max(1);
        let pattern = Pattern::multi_line(
            count,
            1,
            Orientation::Vertical,
            cfg.projector.width,
            cfg.projector.height,
        )?;
        let cp_actual = pattern.coverage;
        let coverage_flag = (cp_actual - cp).abs() / cp > 0.02;
        let lit_maps: Vec<IrradianceMap> = Channel::ALL
            .iter()
            .map(|&c| {
                render_slot(
                    &setup.plane,
                    &setup.projector,
                    &setup.camera,
                    &pattern,
                    c,
                    &setup.power,
                    &setup.render,
                )
            })
            .collect::<Result<_, _>>()?;

        // Reference: one second of cycles at the first window's rate, summed
        // into a single long accumulation.
        let gt_cycles = ((1000.0 / first_window_ms).round() as u32).max(1);
        let mut sum = [vec![0u64; n], vec![0u64; n], vec![0u64; n]];
        let mut span = (u64::MAX, 0u64);
        stream_pattern_cycles(
            &setup,
            &lit_maps,
            &dark,
            &baseline,
            &pattern,
            3000.0 / first_window_ms,
            gt_cycles,
            |counts| {
                for c in 0..3 {
                    for (s, &v) in sum[c].iter_mut().zip(&counts.counts[c]) {
                        *s += v as u64;
                    }
                }
                span = (span.0.min(counts.start_us), span.1.max(counts.end_us));
                Ok(())
            },
        )?;
        let mut accumulated = 0u64;
        let gt_counts = ChannelCounts {
            width: w,
            height: h,
            counts: sum.map(|ch| {
                ch.into_iter()
                    .map(|v| {
                        accumulated += v;
                        u32::try_from(v).expect("per-pixel count fits 32 bits over one second")
                    })
                    .collect()
            }),
            start_us: span.0.min(span.1),
            end_us: span.1,
            cycles: gt_cycles,
            accumulated,
            discarded: 0,
        };
        let gt = counts_to_frame(&gt_counts, &gains, scale_for(&gt_counts))?;

        for &window_ms in &cfg.sweep.windows_ms {
            let mut sum_rmse = 0.0;
            let mut sum_hc = 0.0;
            let mut hc_cycles = 0u32;
            let mut hc_degenerate = 0u32;
            stream_pattern_cycles(
                &setup,
                &lit_maps,
                &dark,
                &baseline,
                &pattern,
                3000.0 / window_ms,
                cfg.sweep.frames,
                |counts| {
                    let frame = counts_to_frame(&counts, &gains, scale_for(&counts))?;
                    sum_rmse += rmse_per_channel(&frame, &gt)?.overall;
                    match histogram_correlation(&frame, &gt) {
                        Ok(hc) => {
                            sum_hc += hc;
                            hc_cycles += 1;
                        }
                        Err(MetricsError::DegenerateHistogram(_)) => hc_degenerate += 1,
                        Err(e) => return Err(e.into()),
                    }
                    Ok(())
                },
            )?;
            let row = SweepRow {
                cp_requested: cp,
                cp_actual,
                window_ms,
                equivalent_fps: 1000.0 / window_ms,
                frames: cfg.sweep.frames,
                avg_rmse: sum_rmse / cfg.sweep.frames as f64,
                avg_hc: if hc_cycles > 0 { sum_hc / hc_cycles as f64 } else { 0.0 },
                hc_degenerate,
                coverage_flag,
            };
            csv.push_str(&format!(
                "{:.6},{:.6},{:.3},{:.3},{},{:.4},{:.4},{},{}\n",
                row.cp_requested,
                row.cp_actual,
                row.window_ms,
                row.equivalent_fps,
                row.frames,
                row.avg_rmse,
                row.avg_hc,
                row.hc_degenerate,
                row.coverage_flag as u8,
            ));
            rows.push(row);
        }
    }
    Ok(SweepOutput { rows, csv })
}
