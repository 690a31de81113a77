//! Per-channel event accumulation, white balance and frame assembly.
//!
//! ON events landing inside a slot are counted into that slot's color
//! channel; OFF events (the pattern turning off again) carry no extra
//! information and are discarded, but every input event is accounted for:
//! accumulated + discarded always equals the input size.

use thiserror::Error;

use crate::pattern::Channel;
use crate::sensor::{Event, Polarity, TriggerPulse};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ColorError {
    #[error("window [{0}, {1}) contains no complete R,G,B cycle")]
    NoCompleteCycle(u64, u64),
    #[error("trigger stream is not strictly increasing at index {0}")]
    UnorderedTriggers(usize),
    #[error("event stream is not sorted at index {0}")]
    UnorderedEvents(usize),
    #[error("event at ({x}, {y}) outside {width}x{height} sensor")]
    EventOutOfBounds { x: u16, y: u16, width: u32, height: u32 },
    #[error("reference region has zero mean in channel {0}")]
    InsufficientReference(Channel),
    #[error("reference region is empty or outside the frame")]
    EmptyReference,
    #[error("{0} must be positive and finite, got {1}")]
    BadScalar(&'static str, f64),
}

/// Per-pixel ON-event counts for each channel over an accumulation window.
#[derive(Debug, Clone)]
pub struct ChannelCounts {
    pub width: u32,
    pub height: u32,
    /// Indexed by `Channel::index()`.
    pub counts: [Vec<u32>; 3],
    pub start_us: u64,
    pub end_us: u64,
    /// Complete R,G,B cycles inside the window.
    pub cycles: u32,
    /// ON events counted into a channel raster.
    pub accumulated: u64,
    /// Everything else: OFF events, events outside the window or outside any
    /// complete cycle's slots.
    pub discarded: u64,
}

impl ChannelCounts {
    pub fn count(&self, c: Channel, x: u32, y: u32) -> u32 {
        self.counts[c.index()][y as usize * self.width as usize + x as usize]
    }
}

/// 8-bit RGB image, row-major interleaved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rgb8Frame {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl Rgb8Frame {
    pub fn new(width: u32, height: u32) -> Self {
        Self { width, height, data: vec![0; width as usize * height as usize * 3] }
    }

    pub fn from_data(width: u32, height: u32, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), width as usize * height as usize * 3);
        Self { width, height, data }
    }

    pub fn at(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }
}

/// White-balance gains; green is the anchor and always 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhiteBalanceGains {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl WhiteBalanceGains {
    pub const UNITY: WhiteBalanceGains = WhiteBalanceGains { r: 1.0, g: 1.0, b: 1.0 };

    pub fn channel(&self, c: Channel) -> f64 {
        match c {
            Channel::R => self.r,
            Channel::G => self.g,
            Channel::B => self.b,
        }
    }
}

/// Accumulates ON events into per-channel rasters over `[start_us, end_us)`.
///
/// Slot spans are derived from the trigger stream: slot i runs from its
/// trigger to the next trigger (the final slot is closed by the window end).
/// Only slots belonging to complete R,G,B cycles are counted; the window must
/// contain at least one complete cycle.
pub fn accumulate_channels(
    events: &[Event],
    triggers: &[TriggerPulse],
    window: (u64, u64),
    width: u32,
    height: u32,
) -> Result<ChannelCounts, ColorError> {
    let (start, end) = window;
    for (i, w) in triggers.windows(2).enumerate() {
        if w[0].t_us >= w[1].t_us {
            return Err(ColorError::UnorderedTriggers(i + 1));
        }
    }
    for (i, w) in events.windows(2).enumerate() {
        if w[0] > w[1] {
            return Err(ColorError::UnorderedEvents(i + 1));
        }
    }

    // Slots whose trigger falls inside the window, each clipped to it.
    struct SlotSpan {
        start: u64,
        end: u64,
        channel: Channel,
        counted: bool,
    }
    let mut spans: Vec<SlotSpan> = Vec::new();
    for (i, t) in triggers.iter().enumerate() {
        if t.t_us < start || t.t_us >= end {
            continue;
        }
        let natural_end = triggers.get(i + 1).map_or(u64::MAX, |n| n.t_us);
        spans.push(SlotSpan {
            start: t.t_us,
            end: natural_end.min(end),
            channel: t.channel,
            counted: false,
        });
    }

    // Mark complete R,G,B runs.
    let mut cycles = 0u32;
    let mut i = 0;
    while i + 3 <= spans.len() {
        if spans[i].channel == Channel::R
            && spans[i + 1].channel == Channel::G
            && spans[i + 2].channel == Channel::B
        {
            spans[i].counted = true;
            spans[i + 1].counted = true;
            spans[i + 2].counted = true;
            cycles += 1;
            i += 3;
        } else {
            i += 1;
        }
    }
    if cycles == 0 {
        return Err(ColorError::NoCompleteCycle(start, end));
    }

    let n = width as usize * height as usize;
    let mut counts = [vec![0u32; n], vec![0u32; n], vec![0u32; n]];
    let mut accumulated = 0u64;
    let mut discarded = 0u64;
    let mut span_idx = 0;
    for e in events {
        if e.polarity == Polarity::Off {
            discarded += 1;
            continue;
        }
        while span_idx < spans.len() && spans[span_idx].end <= e.t_us {
            span_idx += 1;
        }
        let Some(span) = spans.get(span_idx) else {
            discarded += 1;
            continue;
        };
        if e.t_us < span.start || !span.counted {
            discarded += 1;
            continue;
        }
        if e.x as u32 >= width || e.y as u32 >= height {
            return Err(ColorError::EventOutOfBounds { x: e.x, y: e.y, width, height });
        }
        counts[span.channel.index()][e.y as usize * width as usize + e.x as usize] += 1;
        accumulated += 1;
    }

    Ok(ChannelCounts {
        width,
        height,
        counts,
        start_us: start,
        end_us: end,
        cycles,
        accumulated,
        discarded,
    })
}

/// Per-channel means over a pixel region, used for white balance.
fn region_means(
    counts: &ChannelCounts,
    region: &[(u32, u32)],
) -> Result<[f64; 3], ColorError> {
    if region.is_empty() {
        return Err(ColorError::EmptyReference);
    }
    let mut sums = [0.0f64; 3];
    for &(x, y) in region {
        if x >= counts.width || y >= counts.height {
            return Err(ColorError::EmptyReference);
        }
        for c in Channel::ALL {
            sums[c.index()] += counts.count(c, x, y) as f64;
        }
    }
    Ok(sums.map(|s| s / region.len() as f64))
}

/// Derives white-balance gains from a neutral reference region: each channel
/// is scaled so its region mean matches green's.
pub fn calibrate_white_balance(
    counts: &ChannelCounts,
    region: &[(u32, u32)],
) -> Result<WhiteBalanceGains, ColorError> {
    let means = region_means(counts, region)?;
    for c in Channel::ALL {
        if means[c.index()] == 0.0 {
            return Err(ColorError::InsufficientReference(c));
        }
    }
    Ok(WhiteBalanceGains { r: means[1] / means[0], g: 1.0, b: means[1] / means[2] })
}

/// Pixel values map linearly from counts: `clamp(round(gain * scale * n))`.
pub fn counts_to_frame(
    counts: &ChannelCounts,
    gains: &WhiteBalanceGains,
    scale: f64,
) -> Result<Rgb8Frame, ColorError> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(ColorError::BadScalar("scale", scale));
    }
    for c in Channel::ALL {
        let g = gains.channel(c);
        if !(g > 0.0) || !g.is_finite() {
            return Err(ColorError::BadScalar("gain", g));
        }
    }
    let mut frame = Rgb8Frame::new(counts.width, counts.height);
    let n = counts.width as usize * counts.height as usize;
    for i in 0..n {
        let mut rgb = [0u8; 3];
        for c in Channel::ALL {
            let v = (gains.channel(c) * scale * counts.counts[c.index()][i] as f64).round();
            rgb[c.index()] = v.clamp(0.0, 255.0) as u8;
        }
        let (x, y) = ((i % counts.width as usize) as u32, (i / counts.width as usize) as u32);
        frame.set(x, y, rgb);
    }
    Ok(frame)
}

/// Auto-exposure scale: maps the 99th-percentile gained count to 255
/// (nearest-rank percentile). Falls back to the maximum when the percentile
/// is zero, and to 1.0 for an all-zero raster.
pub fn auto_scale(counts: &ChannelCounts, gains: &WhiteBalanceGains) -> f64 {
    let mut values: Vec<f64> = Vec::with_capacity(counts.counts[0].len() * 3);
    for c in Channel::ALL {
        let g = gains.channel(c);
        values.extend(counts.counts[c.index()].iter().map(|&n| g * n as f64));
    }
    let idx = (values.len() * 99).div_ceil(100).saturating_sub(1);
    let (_, &mut nth, _) =
        values.select_nth_unstable_by(idx, |a, b| a.partial_cmp(b).expect("counts are finite"));
    let mut pivot = nth;
    if pivot == 0.0 {
        pivot = values.iter().fold(0.0f64, |m, &v| m.max(v));
    }
    if pivot == 0.0 {
        1.0
    } else {
        255.0 / pivot
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trig(t: u64, slot: u32, channel: Channel) -> TriggerPulse {
        TriggerPulse { t_us: t, slot, channel, pattern_id: 0 }
    }

    fn ev(t: u64, x: u16, y: u16, polarity: Polarity) -> Event {
        Event { t_us: t, x, y, polarity }
    }

    fn rgb_cycle_triggers() -> Vec<TriggerPulse> {
        vec![trig(0, 0, Channel::R), trig(100, 1, Channel::G), trig(200, 2, Channel::B)]
    }

    #[test]
    fn events_land_in_their_slot_channel() {
        let triggers = rgb_cycle_triggers();
        let events = vec![
            ev(10, 2, 1, Polarity::On),
            ev(20, 2, 1, Polarity::On),
            ev(50, 2, 1, Polarity::Off),
            ev(110, 3, 0, Polarity::On),
            ev(250, 2, 1, Polarity::On),
        ];
        let counts = accumulate_channels(&events, &triggers, (0, 300), 4, 2).unwrap();
        assert_eq!(counts.count(Channel::R, 2, 1), 2);
        assert_eq!(counts.count(Channel::G, 3, 0), 1);
        assert_eq!(counts.count(Channel::B, 2, 1), 1);
        assert_eq!(counts.cycles, 1);
        assert_eq!(counts.accumulated, 4);
        assert_eq!(counts.discarded, 1, "the OFF event is discarded but accounted");
        assert_eq!(counts.accumulated + counts.discarded, events.len() as u64);
    }

    #[test]
    fn events_outside_window_are_discarded_exactly() {
        let triggers = rgb_cycle_triggers();
        let events = vec![
            ev(10, 0, 0, Polarity::On),
            ev(299, 0, 0, Polarity::On),
            ev(300, 0, 0, Polarity::On),
            ev(999, 1, 1, Polarity::On),
        ];
        let counts = accumulate_channels(&events, &triggers, (0, 300), 2, 2).unwrap();
        assert_eq!(counts.accumulated, 2);
        assert_eq!(counts.discarded, 2);
    }

    #[test]
    fn window_without_complete_cycle_is_an_error() {
        let triggers = rgb_cycle_triggers();
        // Window sees only the R and G triggers.
        match accumulate_channels(&[], &triggers, (0, 150), 2, 2) {
            Err(ColorError::NoCompleteCycle(0, 150)) => {}
            other => panic!("expected NoCompleteCycle, got {other:?}"),
        }
        // Window starting mid-cycle sees G,B only.
        assert!(accumulate_channels(&[], &triggers, (100, 300), 2, 2).is_err());
    }

    #[test]
    fn full_window_equals_sum_of_cycle_windows() {
        let mut triggers = Vec::new();
        for cycle in 0..3u64 {
            for (i, c) in Channel::ALL.iter().enumerate() {
                triggers.push(trig(cycle * 300 + i as u64 * 100, 0, *c));
            }
        }
        let events: Vec<Event> = (0..90u64)
            .map(|i| ev(i * 10, (i % 3) as u16, (i % 2) as u16, Polarity::On))
            .collect();
        let whole = accumulate_channels(&events, &triggers, (0, 900), 3, 2).unwrap();
        assert_eq!(whole.cycles, 3);
        let mut summed = [vec![0u32; 6], vec![0u32; 6], vec![0u32; 6]];
        for k in 0..3u64 {
            let part =
                accumulate_channels(&events, &triggers, (k * 300, (k + 1) * 300), 3, 2).unwrap();
            for c in 0..3 {
                for i in 0..6 {
                    summed[c][i] += part.counts[c][i];
                }
            }
        }
        assert_eq!(whole.counts, summed);
    }

    fn synthetic_counts(means: [u32; 3]) -> ChannelCounts {
        let n = 16;
        ChannelCounts {
            width: 4,
            height: 4,
            counts: [vec![means[0]; n], vec![means[1]; n], vec![means[2]; n]],
            start_us: 0,
            end_us: 100,
            cycles: 1,
            accumulated: 0,
            discarded: 0,
        }
    }

    fn full_region(w: u32, h: u32) -> Vec<(u32, u32)> {
        (0..h).flat_map(|y| (0..w).map(move |x| (x, y))).collect()
    }

    #[test]
    fn gains_equalize_channel_means_to_green() {
        let counts = synthetic_counts([80, 100, 125]);
        let gains = calibrate_white_balance(&counts, &full_region(4, 4)).unwrap();
        assert_eq!(gains.g, 1.0);
        assert!((gains.r - 1.25).abs() < 1e-12);
        assert!((gains.b - 0.8).abs() < 1e-12);
    }

    #[test]
    fn calibration_is_idempotent_on_balanced_counts() {
        let counts = synthetic_counts([100, 100, 100]);
        let gains = calibrate_white_balance(&counts, &full_region(4, 4)).unwrap();
        assert!((gains.r - 1.0).abs() < 1e-9);
        assert!((gains.b - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dark_reference_region_is_rejected() {
        let counts = synthetic_counts([80, 100, 0]);
        match calibrate_white_balance(&counts, &full_region(4, 4)) {
            Err(ColorError::InsufficientReference(Channel::B)) => {}
            other => panic!("expected InsufficientReference, got {other:?}"),
        }
        assert!(matches!(
            calibrate_white_balance(&synthetic_counts([1, 1, 1]), &[]),
            Err(ColorError::EmptyReference)
        ));
    }

    #[test]
    fn frame_values_round_and_clamp() {
        let mut counts = synthetic_counts([0, 0, 0]);
        counts.counts[0][0] = 10;
        counts.counts[1][0] = 300;
        counts.counts[2][5] = 7;
        let frame = counts_to_frame(&counts, &WhiteBalanceGains::UNITY, 1.5).unwrap();
        assert_eq!(frame.at(0, 0), [15, 255, 0], "255 clamps, 10*1.5 rounds to 15");
        assert_eq!(frame.at(1, 1), [0, 0, 11], "7*1.5 = 10.5 rounds to 11");
    }

    #[test]
    fn doubling_scale_doubles_unclamped_values() {
        let mut counts = synthetic_counts([0, 0, 0]);
        counts.counts[0][3] = 20;
        counts.counts[2][9] = 41;
        let a = counts_to_frame(&counts, &WhiteBalanceGains::UNITY, 1.0).unwrap();
        let b = counts_to_frame(&counts, &WhiteBalanceGains::UNITY, 2.0).unwrap();
        assert_eq!(b.at(3, 0)[0], 2 * a.at(3, 0)[0]);
        assert_eq!(b.at(1, 2)[2], 2 * a.at(1, 2)[2]);
    }

    #[test]
    fn count_argmax_survives_frame_mapping() {
        let mut counts = synthetic_counts([0, 0, 0]);
        counts.counts[0][0] = 50;
        counts.counts[1][0] = 20;
        counts.counts[2][0] = 10;
        let frame = counts_to_frame(&counts, &WhiteBalanceGains::UNITY, 2.0).unwrap();
        let rgb = frame.at(0, 0);
        assert!(rgb[0] > rgb[1] && rgb[1] > rgb[2]);
    }

    #[test]
    fn auto_scale_uses_percentile_then_max() {
        // 48 values total; nearest-rank P99 picks the top value here.
        let mut counts = synthetic_counts([0, 0, 0]);
        counts.counts[1][7] = 100;
        let s = auto_scale(&counts, &WhiteBalanceGains::UNITY);
        assert!((s - 2.55).abs() < 1e-12, "fallback to max: 255/100");
        let zeros = synthetic_counts([0, 0, 0]);
        assert_eq!(auto_scale(&zeros, &WhiteBalanceGains::UNITY), 1.0);
    }

    #[test]
    fn auto_scale_maps_percentile_to_255() {
        let mut counts = synthetic_counts([10, 10, 10]);
        counts.counts[0][0] = 1000;
        let s = auto_scale(&counts, &WhiteBalanceGains::UNITY);
        // 48 values: one outlier at 1000, the rest 10. P99 index 47 hits the
        // outlier, so the scale protects against it only at higher ranks;
        // with this layout the percentile IS the outlier.
        assert!((s - 255.0 / 1000.0).abs() < 1e-12);
        let frame =
            counts_to_frame(&counts, &WhiteBalanceGains::UNITY, s).unwrap();
        assert_eq!(frame.at(0, 0)[0], 255);
    }

    #[test]
    fn bad_scalars_are_rejected() {
        let counts = synthetic_counts([1, 1, 1]);
        assert!(counts_to_frame(&counts, &WhiteBalanceGains::UNITY, 0.0).is_err());
        let bad = WhiteBalanceGains { r: f64::NAN, g: 1.0, b: 1.0 };
        assert!(counts_to_frame(&counts, &bad, 1.0).is_err());
    }
}
