//! Adaptive structured-light control: picks the densest projector pattern
//! whose projected event rate fits the bus budget.
//!
//! The controller works on a ladder of patterns ordered by coverage. Each
//! decision it estimates motion and pattern event rates from the recent
//! stream, projects the structured-light load of every rung through a fitted
//! per-coverage cost, and steps at most one rung with hysteresis and a dwell
//! countdown so it settles instead of oscillating.

use thiserror::Error;

use crate::pattern::{Orientation, Pattern, PatternError, PatternSpec, Rect};
use crate::sensor::{Event, TriggerPulse};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum AslError {
    #[error("ladder needs at least two rungs, got {0}")]
    TooFewRungs(usize),
    #[error("ladder coverage must strictly increase: rung {0} has {1}, rung {2} has {3}")]
    NotAscending(usize, f64, usize, f64),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("{0} must be positive and finite, got {1}")]
    BadParam(&'static str, f64),
    #[error("hysteresis thresholds need 0 <= low < high <= 1, got {0} and {1}")]
    BadHysteresis(f64, f64),
    #[error("rate estimation window is empty")]
    EmptyWindow,
    #[error("cost fit needs at least one sample with nonzero coverage")]
    AllCoverageZero,
    #[error("event at t={0} is newer than the estimation clock {1}")]
    EventAfterNow(u64, u64),
    #[error("pattern id {0} has no footprint (only {1} provided)")]
    MissingFootprint(u32, usize),
    #[error("start rung {0} outside ladder of {1}")]
    RungOutOfRange(usize, usize),
}

/// One ladder entry: a pattern family instance and its exact coverage.
#[derive(Debug, Clone)]
pub struct LadderRung {
    pub spec: PatternSpec,
    pub coverage: f64,
}

/// Patterns ordered by strictly increasing coverage.
#[derive(Debug, Clone)]
pub struct PatternLadder {
    pub rungs: Vec<LadderRung>,
    pub width: u32,
    pub height: u32,
}

impl PatternLadder {
    /// Builds a ladder, generating every pattern once to take its coverage
    /// from the actual bitmap.
    pub fn new(specs: Vec<PatternSpec>, width: u32, height: u32) -> Result<Self, AslError> {
        if specs.len() < 2 {
            return Err(AslError::TooFewRungs(specs.len()));
        }
        let mut rungs = Vec::with_capacity(specs.len());
        for spec in specs {
            let coverage = spec.generate(width, height)?.coverage;
            rungs.push(LadderRung { spec, coverage });
        }
        for i in 1..rungs.len() {
            if rungs[i].coverage <= rungs[i - 1].coverage {
                return Err(AslError::NotAscending(
                    i - 1,
                    rungs[i - 1].coverage,
                    i,
                    rungs[i].coverage,
                ));
            }
        }
        Ok(Self { rungs, width, height })
    }

    /// Default six-rung ladder, from sparse dot grids (about 1.5% coverage)
    /// through line sets and a wide scanning stripe up to full illumination.
    pub fn standard(width: u32, height: u32) -> Result<Self, AslError> {
        let stripe = (width as f64 * 0.3509).round() as u32;
        Self::new(
            vec![
                PatternSpec::DotGrid { rows: 25, cols: 40, dot_size: 4 },
                PatternSpec::DotGrid { rows: 30, cols: 48, dot_size: 4 },
                PatternSpec::MultiLine {
                    count: 64,
                    line_width: 1,
                    orientation: Orientation::Vertical,
                },
                PatternSpec::MultiLine {
                    count: 128,
                    line_width: 1,
                    orientation: Orientation::Vertical,
                },
                PatternSpec::MovingLine {
                    step: 0,
                    total_steps: 3,
                    line_width: stripe,
                    orientation: Orientation::Vertical,
                },
                PatternSpec::Solid { roi: Rect { x: 0, y: 0, w: width, h: height } },
            ],
            width,
            height,
        )
    }

    pub fn len(&self) -> usize {
        self.rungs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rungs.is_empty()
    }

    pub fn pattern(&self, rung: usize) -> Result<Pattern, AslError> {
        Ok(self.rungs[rung].spec.generate(self.width, self.height)?)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ControllerParams {
    /// Bus budget in events per second.
    pub budget_events_per_s: f64,
    /// Feasibility headroom: a rung fits if its projected rate stays below
    /// `margin * budget`.
    pub margin: f64,
    /// Step up only while utilization is below this fraction of budget.
    pub beta_low: f64,
    /// Step down only once utilization exceeds this fraction.
    pub beta_high: f64,
    /// Decisions to hold after any change before moving again.
    pub dwell_decisions: u32,
    /// Full R,G,B pattern cycles per second.
    pub cycle_rate_hz: f64,
}

impl ControllerParams {
    pub fn new(budget_events_per_s: f64, cycle_rate_hz: f64) -> Result<Self, AslError> {
        let p = Self {
            budget_events_per_s,
            margin: 0.9,
            beta_low: 0.5,
            beta_high: 0.85,
            dwell_decisions: 3,
            cycle_rate_hz,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), AslError> {
        for (name, v) in [
            ("budget_events_per_s", self.budget_events_per_s),
            ("cycle_rate_hz", self.cycle_rate_hz),
            ("margin", self.margin),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(AslError::BadParam(name, v));
            }
        }
        if self.margin > 1.0 {
            return Err(AslError::BadParam("margin", self.margin));
        }
        if !(0.0..1.0).contains(&self.beta_low)
            || self.beta_high <= self.beta_low
            || self.beta_high > 1.0
        {
            return Err(AslError::BadHysteresis(self.beta_low, self.beta_high));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ControllerState {
    pub rung: usize,
    pub dwell_remaining: u32,
}

impl ControllerState {
    pub fn new(start_rung: usize, ladder: &PatternLadder) -> Result<Self, AslError> {
        if start_rung >= ladder.len() {
            return Err(AslError::RungOutOfRange(start_rung, ladder.len()));
        }
        Ok(Self { rung: start_rung, dwell_remaining: 0 })
    }
}

/// Record of one controller decision.
#[derive(Debug, Clone, Copy)]
pub struct Decision {
    pub rung_before: usize,
    pub rung: usize,
    /// Projected utilization of the rung held when the decision was made.
    pub utilization: f64,
    pub r_m: f64,
    /// Projected structured-light rate of the rung held at decision time.
    pub r_sl_projected: f64,
    /// The selected rung still exceeds the budget. Raised while parked on
    /// the sparsest rung with nothing feasible, and on each step of a
    /// multi-rung descent until a feasible rung is reached.
    pub budget_infeasible: bool,
    pub changed: bool,
    /// Decision was frozen by the dwell countdown.
    pub held_by_dwell: bool,
}

/// Observed event rates split into structured-light and motion components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub r_sl_events_per_s: f64,
    pub r_m_events_per_s: f64,
    pub sl_events: u64,
    pub m_events: u64,
    pub window_us: u64,
}

/// Splits the recent stream into pattern-caused and motion-caused rates.
///
/// An event counts as structured light when it falls at a pixel inside the
/// active pattern's camera footprint during (or after) some trigger's slot;
/// everything else, including events before the first trigger, is motion.
/// The window is `[now - horizon, now)`, clipped at zero.
pub fn estimate_rates(
    events: &[Event],
    triggers: &[TriggerPulse],
    footprints: &[Vec<bool>],
    width: u32,
    now_us: u64,
    horizon_us: u64,
) -> Result<RateEstimate, AslError> {
    let start = now_us.saturating_sub(horizon_us);
    let window_us = now_us - start;
    if window_us == 0 {
        return Err(AslError::EmptyWindow);
    }
    let mut sl = 0u64;
    let mut m = 0u64;
    let mut trig_idx = 0usize;
    let mut active: Option<&TriggerPulse> = None;
    for e in events {
        if e.t_us >= now_us {
            return Err(AslError::EventAfterNow(e.t_us, now_us));
        }
        while trig_idx < triggers.len() && triggers[trig_idx].t_us <= e.t_us {
            active = Some(&triggers[trig_idx]);
            trig_idx += 1;
        }
        if e.t_us < start {
            continue;
        }
        let is_sl = match active {
            None => false,
            Some(t) => {
                let fp = footprints
                    .get(t.pattern_id as usize)
                    .ok_or(AslError::MissingFootprint(t.pattern_id, footprints.len()))?;
                fp[e.y as usize * width as usize + e.x as usize]
            }
        };
        if is_sl {
            sl += 1;
        } else {
            m += 1;
        }
    }
    let secs = window_us as f64 / 1e6;
    Ok(RateEstimate {
        r_sl_events_per_s: sl as f64 / secs,
        r_m_events_per_s: m as f64 / secs,
        sl_events: sl,
        m_events: m,
        window_us,
    })
}

/// Fits the per-cycle structured-light event cost against pattern coverage
/// with a least-squares line through the origin.
pub fn fit_sl_cost(history: &[(f64, f64)]) -> Result<f64, AslError> {
    let num: f64 = history.iter().map(|(cp, e)| cp * e).sum();
    let den: f64 = history.iter().map(|(cp, _)| cp * cp).sum();
    if den == 0.0 {
        return Err(AslError::AllCoverageZero);
    }
    Ok(num / den)
}

/// One control step: estimates load, finds the densest rung that fits, and
/// moves at most one rung with hysteresis. When nothing fits, it parks on the
/// sparsest rung. `budget_infeasible` is raised whenever the rung the
/// decision lands on (or holds through dwell) still exceeds the budget, so
/// every emitted decision either satisfies the feasibility inequality or
/// carries the flag.
pub fn select_pattern(
    state: &mut ControllerState,
    ladder: &PatternLadder,
    alpha_events_per_cycle_coverage: f64,
    r_m_events_per_s: f64,
    params: &ControllerParams,
) -> Result<Decision, AslError> {
    params.validate()?;
    if state.rung >= ladder.len() {
        return Err(AslError::RungOutOfRange(state.rung, ladder.len()));
    }
    let alpha = alpha_events_per_cycle_coverage;
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(AslError::BadParam("alpha", alpha));
    }
    if !(r_m_events_per_s >= 0.0) || !r_m_events_per_s.is_finite() {
        return Err(AslError::BadParam("r_m", r_m_events_per_s));
    }

    let projected_sl =
        |rung: usize| alpha * ladder.rungs[rung].coverage * params.cycle_rate_hz;
    let load = |rung: usize| r_m_events_per_s + projected_sl(rung);
    let feasible = |rung: usize| load(rung) <= params.margin * params.budget_events_per_s;

    let before = state.rung;
    let utilization = load(before) / params.budget_events_per_s;
    let r_sl_projected = projected_sl(before);

    if state.dwell_remaining > 0 {
        state.dwell_remaining -= 1;
        return Ok(Decision {
            rung_before: before,
            rung: before,
            utilization,
            r_m: r_m_events_per_s,
            r_sl_projected,
            budget_infeasible: !feasible(before),
            changed: false,
            held_by_dwell: true,
        });
    }

    let target = (0..ladder.len()).rev().find(|&r| feasible(r));
    let next = match target {
        None => 0,
        Some(t) => {
            if t > before && utilization < params.beta_low {
                before + 1
            } else if (t < before && utilization > params.beta_high) || !feasible(before) {
                before.saturating_sub(1)
            } else {
                before
            }
        }
    };
    let infeasible = !feasible(next);

    let changed = next != before;
    state.rung = next;
    if changed {
        state.dwell_remaining = params.dwell_decisions;
    }
    Ok(Decision {
        rung_before: before,
        rung: next,
        utilization,
        r_m: r_m_events_per_s,
        r_sl_projected,
        budget_infeasible: infeasible,
        changed,
        held_by_dwell: false,
    })
}
