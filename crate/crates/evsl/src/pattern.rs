//! Binary projector patterns and the R/G/B slot schedule.
//!
//! A pattern is a 1-bit frame at projector resolution; its coverage
//! percentage (CP) is the lit fraction of the frame and is always computed
//! from the actual bitmap, so stored coverage can never drift from the bits.

use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum PatternError {
    #[error("pattern overflow: {0}")]
    Overflow(String),
    #[error("step {step} out of range, total_steps = {total_steps}")]
    StepOutOfRange { step: u32, total_steps: u32 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}

/// Projector color channel, in emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    R,
    G,
    B,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::R, Channel::G, Channel::B];

    pub fn index(self) -> usize {
        match self {
            Channel::R => 0,
            Channel::G => 1,
            Channel::B => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Channel::R => 'R',
            Channel::G => 'G',
            Channel::B => 'B',
        }
    }

    pub fn from_letter(c: char) -> Option<Channel> {
        match c {
            'R' => Some(Channel::R),
            'G' => Some(Channel::G),
            'B' => Some(Channel::B),
            _ => None,
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Stripe direction: vertical stripes vary along x, horizontal along y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

/// Pixel-aligned rectangle, `x..x+w` by `y..y+h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

/// Generator parameters a pattern was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum PatternSpec {
    DotGrid { rows: u32, cols: u32, dot_size: u32 },
    MultiLine { count: u32, line_width: u32, orientation: Orientation },
    MovingLine { step: u32, total_steps: u32, line_width: u32, orientation: Orientation },
    Solid { roi: Rect },
}

impl PatternSpec {
    pub fn generate(&self, width: u32, height: u32) -> Result<Pattern, PatternError> {
        match *self {
            PatternSpec::DotGrid { rows, cols, dot_size } => {
                Pattern::dot_grid(rows, cols, dot_size, width, height)
            }
            PatternSpec::MultiLine { count, line_width, orientation } => {
                Pattern::multi_line(count, line_width, orientation, width, height)
            }
            PatternSpec::MovingLine { step, total_steps, line_width, orientation } => {
                Pattern::moving_line(step, total_steps, line_width, orientation, width, height)
            }
            PatternSpec::Solid { roi } => Pattern::solid(roi, width, height),
        }
    }
}

/// 1-bit projector frame plus the parameters that generated it.
#[derive(Debug, Clone)]
pub struct Pattern {
    pub spec: PatternSpec,
    pub width: u32,
    pub height: u32,
    bits: Vec<u8>,
    /// Lit fraction of the frame, exactly ones/(width*height).
    pub coverage: f64,
}

impl Pattern {
    fn from_bits(spec: PatternSpec, width: u32, height: u32, bits: Vec<u8>) -> Self {
        debug_assert_eq!(bits.len(), width as usize * height as usize);
        let ones: u64 = bits.iter().map(|&b| b as u64).sum();
        let coverage = ones as f64 / (width as f64 * height as f64);
        Self { spec, width, height, bits, coverage }
    }

    pub fn lit(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize] != 0
    }

    /// Number of lit pixels.
    pub fn ones(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.bits.chunks(self.width as usize)
    }

    fn fill_rect(bits: &mut [u8], width: u32, r: Rect) {
        for y in r.y..r.y + r.h {
            let row = y as usize * width as usize;
            for x in r.x..r.x + r.w {
                bits[row + x as usize] = 1;
            }
        }
    }

    /// Grid of `rows` x `cols` square dots with uniformly spaced centers.
    ///
    /// Requiring `dot_size <= floor(extent / n)` on both axes guarantees the
    /// rounded placements never overlap or leave the frame, so the lit count
    /// is exactly `rows * cols * dot_size^2`.
    pub fn dot_grid(
        rows: u32,
        cols: u32,
        dot_size: u32,
        width: u32,
        height: u32,
    ) -> Result<Pattern, PatternError> {
        if rows == 0 || cols == 0 || dot_size == 0 {
            return Err(PatternError::Overflow(format!(
                "dot grid needs rows, cols and dot size >= 1, got {rows}x{cols} size {dot_size}"
            )));
        }
        if dot_size > width / cols || dot_size > height / rows {
            return Err(PatternError::Overflow(format!(
                "{dot_size}px dots do not fit a {rows}x{cols} grid in {width}x{height}"
            )));
        }
        let mut bits = vec![0u8; width as usize * height as usize];
        let sx = width as f64 / cols as f64;
        let sy = height as f64 / rows as f64;
        let half = dot_size as f64 / 2.0;
        for i in 0..rows {
            let y0 = ((i as f64 + 0.5) * sy - half).round() as u32;
            for j in 0..cols {
                let x0 = ((j as f64 + 0.5) * sx - half).round() as u32;
                Self::fill_rect(&mut bits, width, Rect { x: x0, y: y0, w: dot_size, h: dot_size });
            }
        }
        Ok(Self::from_bits(PatternSpec::DotGrid { rows, cols, dot_size }, width, height, bits))
    }

    /// Pixel-space centers of every dot, row-major, for dot-grid patterns;
    /// `None` for any other pattern family.
    pub fn dot_centers(&self) -> Option<Vec<(f64, f64)>> {
        let PatternSpec::DotGrid { rows, cols, dot_size } = self.spec else {
            return None;
        };
        let sx = self.width as f64 / cols as f64;
        let sy = self.height as f64 / rows as f64;
        let half = dot_size as f64 / 2.0;
        let offset = (dot_size as f64 - 1.0) / 2.0;
        let mut centers = Vec::with_capacity(rows as usize * cols as usize);
        for i in 0..rows {
            let y0 = ((i as f64 + 0.5) * sy - half).round();
            for j in 0..cols {
                let x0 = ((j as f64 + 0.5) * sx - half).round();
                centers.push((x0 + offset, y0 + offset));
            }
        }
        Some(centers)
    }

    /// `count` full-length parallel stripes of `line_width` pixels with
    /// uniformly spaced centers. `count == 0` yields an all-dark frame.
    pub fn multi_line(
        count: u32,
        line_width: u32,
        orientation: Orientation,
        width: u32,
        height: u32,
    ) -> Result<Pattern, PatternError> {
        if line_width == 0 {
            return Err(PatternError::Overflow("line width must be >= 1".into()));
        }
        let extent = match orientation {
            Orientation::Vertical => width,
            Orientation::Horizontal => height,
        };
        if count as u64 * line_width as u64 > extent as u64 {
            return Err(PatternError::Overflow(format!(
                "{count} stripes of width {line_width} exceed extent {extent}"
            )));
        }
        let mut bits = vec![0u8; width as usize * height as usize];
        let stride = extent as f64 / count.max(1) as f64;
        let half = line_width as f64 / 2.0;
        for k in 0..count {
            let s = ((k as f64 + 0.5) * stride - half).round() as u32;
            let r = match orientation {
                Orientation::Vertical => Rect { x: s, y: 0, w: line_width, h: height },
                Orientation::Horizontal => Rect { x: 0, y: s, w: width, h: line_width },
            };
            Self::fill_rect(&mut bits, width, r);
        }
        Ok(Self::from_bits(
            PatternSpec::MultiLine { count, line_width, orientation },
            width,
            height,
            bits,
        ))
    }

    /// Single stripe whose position advances with `step`; successive steps
    /// tile the frame, and when `total_steps * line_width >= extent` the union
    /// over all steps covers every position at least once. The stripe is kept
    /// fully inside the frame so every step has identical coverage.
    pub fn moving_line(
        step: u32,
        total_steps: u32,
        line_width: u32,
        orientation: Orientation,
        width: u32,
        height: u32,
    ) -> Result<Pattern, PatternError> {
        if total_steps == 0 || step >= total_steps {
            return Err(PatternError::StepOutOfRange { step, total_steps });
        }
        let extent = match orientation {
            Orientation::Vertical => width,
            Orientation::Horizontal => height,
        };
        if line_width == 0 || line_width > extent {
            return Err(PatternError::Overflow(format!(
                "stripe width {line_width} does not fit extent {extent}"
            )));
        }
        let s = Self::moving_line_start(step, total_steps, line_width, extent);
        let mut bits = vec![0u8; width as usize * height as usize];
        let r = match orientation {
            Orientation::Vertical => Rect { x: s, y: 0, w: line_width, h: height },
            Orientation::Horizontal => Rect { x: 0, y: s, w: width, h: line_width },
        };
        Self::fill_rect(&mut bits, width, r);
        Ok(Self::from_bits(
            PatternSpec::MovingLine { step, total_steps, line_width, orientation },
            width,
            height,
            bits,
        ))
    }

    /// First lit position of a moving-line step along its travel axis.
    pub fn moving_line_start(step: u32, total_steps: u32, line_width: u32, extent: u32) -> u32 {
        let nominal = (step as f64 * extent as f64 / total_steps as f64).round() as u32;
        nominal.min(extent - line_width)
    }

    /// Everything inside `roi` lit.
    pub fn solid(roi: Rect, width: u32, height: u32) -> Result<Pattern, PatternError> {
        if roi.w == 0 || roi.h == 0 {
            return Err(PatternError::Overflow("solid region must be non-empty".into()));
        }
        if roi.x + roi.w > width || roi.y + roi.h > height {
            return Err(PatternError::Overflow(format!(
                "region {roi:?} exceeds {width}x{height} frame"
            )));
        }
        let mut bits = vec![0u8; width as usize * height as usize];
        Self::fill_rect(&mut bits, width, roi);
        Ok(Self::from_bits(PatternSpec::Solid { roi }, width, height, bits))
    }

    /// Full-frame solid flash.
    pub fn full(width: u32, height: u32) -> Pattern {
        Self::solid(Rect { x: 0, y: 0, w: width, h: height }, width, height)
            .expect("full-frame region always fits")
    }

    /// All-dark frame (a zero-count multi-line).
    pub fn dark(width: u32, height: u32) -> Pattern {
        Self::multi_line(0, 1, Orientation::Vertical, width, height)
            .expect("empty pattern always fits")
    }
}

/// One projector slot: a pattern shown through one color channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub index: u32,
    pub start_us: u64,
    pub end_us: u64,
    pub channel: Channel,
    pub pattern_id: u32,
}

/// Timed slot schedule. Every pattern is emitted once per channel (R, then G,
/// then B) before the next pattern; the whole list repeats `repetitions`
/// times. Slot boundaries are rounded to integer microseconds, staying within
/// 1 us of the nominal `1/switch_rate` duration while keeping the schedule
/// gapless.
#[derive(Debug, Clone)]
pub struct SequencePlan {
    pub patterns: Vec<Pattern>,
    pub slots: Vec<Slot>,
    pub switch_rate_hz: f64,
}

impl SequencePlan {
    pub const CHANNELS_PER_CYCLE: u32 = 3;

    pub fn build(
        patterns: Vec<Pattern>,
        switch_rate_hz: f64,
        repetitions: u32,
    ) -> Result<SequencePlan, PatternError> {
        if patterns.is_empty() {
            return Err(PatternError::InvalidSchedule("no patterns given".into()));
        }
        if repetitions == 0 {
            return Err(PatternError::InvalidSchedule("repetitions must be >= 1".into()));
        }
        if !(switch_rate_hz > 0.0) || !switch_rate_hz.is_finite() {
            return Err(PatternError::InvalidSchedule(format!(
                "switch rate must be positive and finite, got {switch_rate_hz}"
            )));
        }
        let (w, h) = (patterns[0].width, patterns[0].height);
        if patterns.iter().any(|p| p.width != w || p.height != h) {
            return Err(PatternError::InvalidSchedule(
                "patterns must share one resolution".into(),
            ));
        }
        let slot_us = 1e6 / switch_rate_hz;
        let n_slots = repetitions as u64 * patterns.len() as u64 * 3;
        let mut slots = Vec::with_capacity(n_slots as usize);
        let mut k = 0u64;
        for _ in 0..repetitions {
            for (pid, _) in patterns.iter().enumerate() {
                for channel in Channel::ALL {
                    slots.push(Slot {
                        index: k as u32,
                        start_us: (k as f64 * slot_us).round() as u64,
                        end_us: ((k + 1) as f64 * slot_us).round() as u64,
                        channel,
                        pattern_id: pid as u32,
                    });
                    k += 1;
                }
            }
        }
        Ok(SequencePlan { patterns, slots, switch_rate_hz })
    }

    /// Color frame rate: one frame per R,G,B cycle.
    pub fn equivalent_fps(&self) -> f64 {
        let (num, den) = self.equivalent_fps_ratio();
        num / den as f64
    }

    /// Frame rate as the exact ratio (switch rate, channels per cycle), so
    /// `fps * 3 == switch rate` holds without floating-point drift.
    pub fn equivalent_fps_ratio(&self) -> (f64, u32) {
        (self.switch_rate_hz, Self::CHANNELS_PER_CYCLE)
    }

    pub fn total_duration_us(&self) -> u64 {
        self.slots.last().map_or(0, |s| s.end_us)
    }

    /// Number of complete R,G,B cycles in the schedule.
    pub fn cycles(&self) -> usize {
        self.slots.len() / 3
    }

    /// Time window `[start, end)` of the i-th R,G,B cycle.
    pub fn cycle_window(&self, i: usize) -> (u64, u64) {
        (self.slots[i * 3].start_us, self.slots[i * 3 + 2].end_us)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent bit recount used by the coverage tests.
    fn recount(p: &Pattern) -> u64 {
        let mut n = 0;
        for y in 0..p.height {
            for x in 0..p.width {
                if p.lit(x, y) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn dot_grid_lit_count_is_rows_cols_dotsize_squared() {
        let p = Pattern::dot_grid(25, 40, 4, 912, 1140).unwrap();
        assert_eq!(p.ones(), 25 * 40 * 16);
        assert_eq!(recount(&p), p.ones());
        assert!((p.coverage - (25.0 * 40.0 * 16.0) / (912.0 * 1140.0)).abs() < 1e-15);
    }

    #[test]
    fn dot_grid_rejects_oversized_dots() {
        // 40 columns on 912 px leave floor(912/40) = 22 px per cell.
        assert!(Pattern::dot_grid(25, 40, 23, 912, 1140).is_err());
        assert!(Pattern::dot_grid(1, 1, 0, 16, 16).is_err());
        assert!(Pattern::dot_grid(0, 4, 2, 16, 16).is_err());
    }

    #[test]
    fn single_full_frame_dot_is_solid() {
        let p = Pattern::dot_grid(1, 1, 8, 8, 8).unwrap();
        assert_eq!(p.ones(), 64);
        assert!((p.coverage - 1.0).abs() < 1e-15);
    }

    #[test]
    fn multi_line_coverage_is_count_width_over_extent() {
        for count in [1u32, 7, 64, 128, 256] {
            let p = Pattern::multi_line(count, 1, Orientation::Vertical, 912, 1140).unwrap();
            assert_eq!(p.ones(), count as u64 * 1140, "count = {count}");
            assert!((p.coverage - count as f64 / 912.0).abs() < 1e-12);
        }
    }

    #[test]
    fn doubling_line_count_doubles_lit_pixels() {
        let a = Pattern::multi_line(32, 2, Orientation::Horizontal, 912, 1140).unwrap();
        let b = Pattern::multi_line(64, 2, Orientation::Horizontal, 912, 1140).unwrap();
        assert_eq!(b.ones(), 2 * a.ones());
    }

    #[test]
    fn zero_lines_gives_dark_frame() {
        let p = Pattern::multi_line(0, 3, Orientation::Vertical, 64, 48).unwrap();
        assert_eq!(p.ones(), 0);
        assert_eq!(p.coverage, 0.0);
    }

    #[test]
    fn multi_line_rejects_overfull_frame() {
        assert!(Pattern::multi_line(100, 10, Orientation::Vertical, 912, 1140).is_err());
    }

    #[test]
    fn moving_line_slot_coverage_is_width_over_extent() {
        let p = Pattern::moving_line(3, 10, 4, Orientation::Vertical, 100, 50).unwrap();
        assert_eq!(p.ones(), 4 * 50);
        assert!((p.coverage - 4.0 / 100.0).abs() < 1e-15);
    }

    #[test]
    fn moving_line_steps_union_covers_every_column() {
        // OR the per-step bitmaps together; with total_steps * width >= extent
        // no column may stay dark.
        let (w, h, steps, width) = (100u32, 8u32, 27u32, 4u32);
        assert!(steps * width >= w);
        let mut covered = vec![false; w as usize];
        for step in 0..steps {
            let p = Pattern::moving_line(step, steps, width, Orientation::Vertical, w, h).unwrap();
            for x in 0..w {
                if p.lit(x, 0) {
                    covered[x as usize] = true;
                }
            }
        }
        let missing: Vec<usize> =
            covered.iter().enumerate().filter(|(_, &c)| !c).map(|(i, _)| i).collect();
        assert!(missing.is_empty(), "columns never lit: {missing:?}");
    }

    #[test]
    fn moving_line_rejects_bad_step() {
        assert!(matches!(
            Pattern::moving_line(10, 10, 2, Orientation::Vertical, 64, 48),
            Err(PatternError::StepOutOfRange { .. })
        ));
    }

    #[test]
    fn solid_region_coverage_is_area_ratio() {
        let p = Pattern::solid(Rect { x: 2, y: 3, w: 10, h: 5 }, 64, 48).unwrap();
        assert_eq!(p.ones(), 50);
        assert!((p.coverage - 50.0 / (64.0 * 48.0)).abs() < 1e-15);
        assert!((Pattern::full(64, 48).coverage - 1.0).abs() < 1e-15);
        assert!(Pattern::solid(Rect { x: 60, y: 0, w: 10, h: 5 }, 64, 48).is_err());
    }

    #[test]
    fn sequence_at_projector_switch_rate_reports_1408_fps() {
        let plan = SequencePlan::build(vec![Pattern::full(8, 8)], 4225.0, 2).unwrap();
        let fps = plan.equivalent_fps();
        assert!((fps - 4225.0 / 3.0).abs() < 1e-12, "fps = {fps}");
        assert!((fps - 1408.33).abs() < 0.01);
        let (num, den) = plan.equivalent_fps_ratio();
        assert_eq!((num, den), (4225.0, 3));
    }

    #[test]
    fn sequence_slots_are_gapless_and_near_nominal() {
        let plan = SequencePlan::build(vec![Pattern::full(8, 8)], 4225.0, 40).unwrap();
        let nominal = 1e6 / 4225.0;
        for w in plan.slots.windows(2) {
            assert_eq!(w[0].end_us, w[1].start_us, "gap after slot {}", w[0].index);
        }
        for s in &plan.slots {
            let dur = (s.end_us - s.start_us) as f64;
            assert!((dur - nominal).abs() <= 1.0, "slot {} duration {dur}", s.index);
        }
    }

    #[test]
    fn sequence_cycles_channels_in_rgb_order() {
        let pats = vec![Pattern::full(8, 8), Pattern::dark(8, 8)];
        let plan = SequencePlan::build(pats, 3000.0, 3).unwrap();
        assert_eq!(plan.slots.len(), 2 * 3 * 3);
        for (i, slot) in plan.slots.iter().enumerate() {
            assert_eq!(slot.channel, Channel::ALL[i % 3], "slot {i}");
        }
        // Pattern advances only after its B slot.
        let ids: Vec<u32> = plan.slots.iter().map(|s| s.pattern_id).collect();
        assert_eq!(&ids[..6], &[0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn sequence_rejects_degenerate_inputs() {
        assert!(SequencePlan::build(vec![], 1000.0, 1).is_err());
        assert!(SequencePlan::build(vec![Pattern::full(8, 8)], 0.0, 1).is_err());
        assert!(SequencePlan::build(vec![Pattern::full(8, 8)], 1000.0, 0).is_err());
        let mixed = vec![Pattern::full(8, 8), Pattern::full(16, 8)];
        assert!(SequencePlan::build(mixed, 1000.0, 1).is_err());
    }

    proptest! {
        /// Stored coverage always equals an independent bit recount.
        #[test]
        fn coverage_matches_recount(
            rows in 1u32..6,
            cols in 1u32..6,
            dot in 1u32..5,
            count in 0u32..12,
            lw in 1u32..4,
        ) {
            let (w, h) = (60u32, 48u32);
            if let Ok(p) = Pattern::dot_grid(rows, cols, dot, w, h) {
                let ones = recount(&p);
                prop_assert_eq!(ones, p.ones());
                prop_assert_eq!(p.coverage, ones as f64 / (w as f64 * h as f64));
            }
            if let Ok(p) = Pattern::multi_line(count, lw, Orientation::Vertical, w, h) {
                let ones = recount(&p);
                prop_assert_eq!(p.coverage, ones as f64 / (w as f64 * h as f64));
            }
        }

        /// More dots means strictly more lit pixels until the grid overflows.
        #[test]
        fn denser_grids_have_strictly_larger_coverage(
            rows in 1u32..8,
            cols in 1u32..8,
            dot in 1u32..4,
        ) {
            let (w, h) = (64u32, 64u32);
            let a = Pattern::dot_grid(rows, cols, dot, w, h).unwrap();
            if let Ok(b) = Pattern::dot_grid(rows, cols + 1, dot, w, h) {
                prop_assert!(b.coverage > a.coverage);
            }
        }

        /// Slot schedule is a contiguous partition with cycling channels.
        #[test]
        fn schedule_partitions_time(rate in 500.0f64..10_000.0, reps in 1u32..5) {
            let plan = SequencePlan::build(vec![Pattern::full(4, 4)], rate, reps).unwrap();
            let nominal = 1e6 / rate;
            prop_assert_eq!(plan.slots[0].start_us, 0);
            for w in plan.slots.windows(2) {
                prop_assert_eq!(w[0].end_us, w[1].start_us);
            }
            for s in &plan.slots {
                let dur = (s.end_us - s.start_us) as f64;
                prop_assert!((dur - nominal).abs() <= 1.0);
                prop_assert_eq!(s.channel, Channel::ALL[s.index as usize % 3]);
            }
        }
    }
}
