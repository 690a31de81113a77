//! Event and trigger CSV files.
//!
//! Events: header `t_us,x,y,p`, one row per event, polarity written as `1`
//! or `-1`, rows sorted by (t, y, x, polarity). Triggers: header
//! `t_us,slot,channel,pattern_id` with the channel as a letter R/G/B.

use std::path::Path;

use super::{write_atomic, FormatError};
use crate::pattern::Channel;
use crate::sensor::{Event, Polarity, TriggerPulse};

pub const EVENTS_HEADER: &str = "t_us,x,y,p";
pub const TRIGGERS_HEADER: &str = "t_us,slot,channel,pattern_id";

pub fn events_to_csv(events: &[Event]) -> String {
    let mut out = String::with_capacity(16 + events.len() * 16);
    out.push_str(EVENTS_HEADER);
    out.push('\n');
    for e in events {
        out.push_str(&format!("{},{},{},{}\n", e.t_us, e.x, e.y, e.polarity.as_i8()));
    }
    out
}

pub fn write_events_csv(path: &Path, events: &[Event]) -> Result<(), FormatError> {
    write_atomic(path, events_to_csv(events).as_bytes())
}

pub fn read_events_csv(path: &Path) -> Result<Vec<Event>, FormatError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == EVENTS_HEADER => {}
        Some((_, h)) => {
            return Err(FormatError::header(path, format!("expected '{EVENTS_HEADER}', got '{h}'")))
        }
        None => return Err(FormatError::header(path, "empty file")),
    }
    let mut events = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut field = |name: &str| {
            parts
                .next()
                .ok_or_else(|| FormatError::parse(path, lineno, format!("missing field {name}")))
        };
        let t_us = field("t_us")?
            .parse::<u64>()
            .map_err(|e| FormatError::parse(path, lineno, format!("t_us: {e}")))?;
        let x = field("x")?
            .parse::<u16>()
            .map_err(|e| FormatError::parse(path, lineno, format!("x: {e}")))?;
        let y = field("y")?
            .parse::<u16>()
            .map_err(|e| FormatError::parse(path, lineno, format!("y: {e}")))?;
        let p_raw = field("p")?
            .parse::<i8>()
            .map_err(|e| FormatError::parse(path, lineno, format!("p: {e}")))?;
        let polarity = Polarity::from_i8(p_raw)
            .ok_or_else(|| FormatError::parse(path, lineno, format!("p must be 1 or -1, got {p_raw}")))?;
        if parts.next().is_some() {
            return Err(FormatError::parse(path, lineno, "too many fields"));
        }
        let event = Event { t_us, x, y, polarity };
        if let Some(prev) = events.last() {
            if event < *prev {
                return Err(FormatError::Unsorted { path: path.display().to_string(), line: lineno });
            }
        }
        events.push(event);
    }
    Ok(events)
}

pub fn triggers_to_csv(triggers: &[TriggerPulse]) -> String {
    let mut out = String::with_capacity(32 + triggers.len() * 16);
    out.push_str(TRIGGERS_HEADER);
    out.push('\n');
    for t in triggers {
        out.push_str(&format!("{},{},{},{}\n", t.t_us, t.slot, t.channel.letter(), t.pattern_id));
    }
    out
}

pub fn write_triggers_csv(path: &Path, triggers: &[TriggerPulse]) -> Result<(), FormatError> {
    write_atomic(path, triggers_to_csv(triggers).as_bytes())
}

pub fn read_triggers_csv(path: &Path) -> Result<Vec<TriggerPulse>, FormatError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == TRIGGERS_HEADER => {}
        Some((_, h)) => {
            return Err(FormatError::header(
                path,
                format!("expected '{TRIGGERS_HEADER}', got '{h}'"),
            ))
        }
        None => return Err(FormatError::header(path, "empty file")),
    }
    let mut triggers: Vec<TriggerPulse> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(FormatError::parse(path, lineno, format!("expected 4 fields, got {}", parts.len())));
        }
        let t_us = parts[0]
            .parse::<u64>()
            .map_err(|e| FormatError::parse(path, lineno, format!("t_us: {e}")))?;
        let slot = parts[1]
            .parse::<u32>()
            .map_err(|e| FormatError::parse(path, lineno, format!("slot: {e}")))?;
        let channel = match parts[2].chars().collect::<Vec<char>>()[..] {
            [c] => Channel::from_letter(c),
            _ => None,
        }
        .ok_or_else(|| {
            FormatError::parse(path, lineno, format!("channel must be R, G or B, got '{}'", parts[2]))
        })?;
        let pattern_id = parts[3]
            .parse::<u32>()
            .map_err(|e| FormatError::parse(path, lineno, format!("pattern_id: {e}")))?;
        if let Some(prev) = triggers.last() {
            if t_us <= prev.t_us {
                return Err(FormatError::Unsorted { path: path.display().to_string(), line: lineno });
            }
        }
        triggers.push(TriggerPulse { t_us, slot, channel, pattern_id });
    }
    Ok(triggers)
}
