//! Depth recovery by triangulating camera observations against known
//! projector geometry, for two pattern families: dot grids (cluster the
//! events, match clusters to dots, intersect the two rays) and a scanning
//! line (each event's timestamp names the projector column, whose light
//! plane the camera ray is cut with). Samples can then be colored from a
//! reconstructed frame into a point cloud.

use nalgebra::Vector3;
use thiserror::Error;

use crate::color::Rgb8Frame;
use crate::geometry::{
    intersect_ray_plane, intersect_ray_raw_plane, triangulate_rays, GeometryError, PinholeModel,
    ScenePlane,
};
use crate::pattern::{Orientation, Pattern};
use crate::sensor::{Event, Polarity};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum DepthError {
    #[error("no dot clusters survived the {0}-event minimum")]
    NoClusters(u32),
    #[error("pattern is not a dot grid")]
    NotADotGrid,
    #[error("no observation matched a projected dot")]
    NoMatches,
    #[error("{0} must be positive and finite, got {1}")]
    BadParam(&'static str, f64),
    #[error("line schedule is empty")]
    EmptyLineSchedule,
    #[error("line schedule overlaps at entry {0}")]
    OverlappingSchedule(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A blob of events assumed to be one dot's image: count-weighted centroid
/// in camera pixels plus its total event count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DotObservation {
    pub cx: f64,
    pub cy: f64,
    pub count: u32,
}

/// Groups ON events into 8-connected blobs and returns one count-weighted
/// centroid per blob with at least `min_count` events, sorted by (cy, cx).
pub fn cluster_dots(
    events: &[Event],
    width: u32,
    height: u32,
    min_count: u32,
) -> Result<Vec<DotObservation>, DepthError> {
    let (w, h) = (width as usize, height as usize);
    let mut grid = vec![0u32; w * h];
    for e in events {
        if e.polarity == Polarity::On {
            grid[e.y as usize * w + e.x as usize] += 1;
        }
    }

    let mut seen = vec![false; w * h];
    let mut observations = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if grid[start] == 0 || seen[start] {
            continue;
        }
        stack.push(start);
        seen[start] = true;
        let mut total = 0u64;
        let mut sx = 0.0f64;
        let mut sy = 0.0f64;
        while let Some(i) = stack.pop() {
            let c = grid[i] as u64;
            total += c;
            let (x, y) = (i % w, i / w);
            sx += c as f64 * x as f64;
            sy += c as f64 * y as f64;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let ni = ny as usize * w + nx as usize;
                    if grid[ni] > 0 && !seen[ni] {
                        seen[ni] = true;
                        stack.push(ni);
                    }
                }
            }
        }
        if total >= min_count as u64 {
            observations.push(DotObservation {
                cx: sx / total as f64,
                cy: sy / total as f64,
                count: total as u32,
            });
        }
    }
    if observations.is_empty() {
        return Err(DepthError::NoClusters(min_count));
    }
    observations.sort_by(|a, b| {
        (a.cy, a.cx).partial_cmp(&(b.cy, b.cx)).expect("centroids are finite")
    });
    Ok(observations)
}

#[derive(Debug, Clone, Copy)]
pub struct MatchOptions {
    /// Discard triangulations whose ray-to-ray gap exceeds this.
    pub gap_max_m: f64,
    /// An observation is ambiguous when its two best dot candidates are
    /// closer than this in predicted-pixel distance.
    pub tie_tolerance_px: f64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self { gap_max_m: 0.01, tie_tolerance_px: 2.0 }
    }
}

/// One triangulated surface point, tagged with the camera pixel it came from.
#[derive(Debug, Clone, Copy)]
pub struct DepthSample {
    pub px: f64,
    pub py: f64,
    pub point: Vector3<f64>,
    /// Triangulation gap (dots) or zero (line planes).
    pub gap_m: f64,
}

#[derive(Debug, Clone)]
pub struct CorrespondenceResult {
    pub samples: Vec<DepthSample>,
    /// Observations whose best two candidate dots were too close to call.
    pub ambiguous: usize,
    /// Matches discarded because the triangulation gap was too wide.
    pub gap_rejected: usize,
    /// Dots with no surviving observation.
    pub unmatched_dots: usize,
}

/// Matches dot-cluster observations to the dots of a grid pattern and
/// triangulates each match.
///
/// Dot identity comes from a coarse prior: each dot center is pushed through
/// the projector onto `prior` and into the camera, and every observation
/// claims its nearest predicted image. Ties are dropped as ambiguous; when
/// several observations claim one dot only the closest survives. Matched
/// pairs are triangulated camera-ray against projector-ray, so the recovered
/// depth does not inherit the prior plane, only the correspondence does.
pub fn correspond_and_triangulate(
    observations: &[DotObservation],
    pattern: &Pattern,
    camera: &PinholeModel,
    projector: &PinholeModel,
    prior: &ScenePlane,
    opts: &MatchOptions,
) -> Result<CorrespondenceResult, DepthError> {
    if !(opts.gap_max_m > 0.0) || !opts.gap_max_m.is_finite() {
        return Err(DepthError::BadParam("gap_max_m", opts.gap_max_m));
    }
    if !(opts.tie_tolerance_px >= 0.0) || !opts.tie_tolerance_px.is_finite() {
        return Err(DepthError::BadParam("tie_tolerance_px", opts.tie_tolerance_px));
    }
    let centers = pattern.dot_centers().ok_or(DepthError::NotADotGrid)?;

    // Predicted camera image of every dot under the prior plane. Dots whose
    // prediction leaves the frame stay in the list (index-aligned) but can
    // never win a nearest-neighbor query inside it.
    let mut predicted: Vec<Option<(f64, f64)>> = Vec::with_capacity(centers.len());
    for &(du, dv) in &centers {
        let ray = projector.backproject(du, dv);
        let image = intersect_ray_plane(&ray, prior)
            .ok()
            .and_then(|hit| camera.project(hit.point).ok());
        predicted.push(image);
    }

    // Each observation picks its nearest predicted dot; ties are ambiguous.
    let mut claims: Vec<Option<(usize, f64)>> = vec![None; observations.len()];
    let mut ambiguous = 0usize;
    for (oi, obs) in observations.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        let mut second = f64::INFINITY;
        for (di, p) in predicted.iter().enumerate() {
            let Some((px, py)) = p else { continue };
            let d = ((obs.cx - px).powi(2) + (obs.cy - py).powi(2)).sqrt();
            match best {
                Some((_, bd)) if d < bd => {
                    second = bd;
                    best = Some((di, d));
                }
                Some(_) => second = second.min(d),
                None => best = Some((di, d)),
            }
        }
        match best {
            Some((di, d)) if second - d >= opts.tie_tolerance_px => {
                claims[oi] = Some((di, d));
            }
            Some(_) => ambiguous += 1,
            None => ambiguous += 1,
        }
    }

    // Resolve contested dots: the closest claimant wins, others drop out.
    let mut winner: Vec<Option<(usize, f64)>> = vec![None; centers.len()];
    for (oi, claim) in claims.iter().enumerate() {
        let Some((di, d)) = claim else { continue };
        match winner[*di] {
            Some((_, wd)) if *d >= wd => ambiguous += 1,
            other => {
                if other.is_some() {
                    ambiguous += 1;
                }
                winner[*di] = Some((oi, *d));
            }
        }
    }

    let mut samples = Vec::new();
    let mut gap_rejected = 0usize;
    let mut unmatched_dots = 0usize;
    for (di, win) in winner.iter().enumerate() {
        let Some((oi, _)) = win else {
            unmatched_dots += 1;
            continue;
        };
        let obs = &observations[*oi];
        let cam_ray = camera.backproject(obs.cx, obs.cy);
        let (du, dv) = centers[di];
        let proj_ray = projector.backproject(du, dv);
        match triangulate_rays(&cam_ray, &proj_ray) {
            Ok((point, gap)) if gap <= opts.gap_max_m => {
                samples.push(DepthSample { px: obs.cx, py: obs.cy, point, gap_m: gap });
            }
            Ok(_) => gap_rejected += 1,
            Err(_) => gap_rejected += 1,
        }
    }
    if samples.is_empty() {
        return Err(DepthError::NoMatches);
    }
    Ok(CorrespondenceResult { samples, ambiguous, gap_rejected, unmatched_dots })
}

/// One scanning-line slot: while `[start_us, end_us)` is active the line's
/// leading edge sits at pixel `coord` of the projector.
#[derive(Debug, Clone, Copy)]
pub struct LineSlot {
    pub start_us: u64,
    pub end_us: u64,
    /// First projector column (vertical lines) or row (horizontal).
    pub coord: u32,
    pub line_width: u32,
    pub orientation: Orientation,
}

#[derive(Debug, Clone)]
pub struct LineDepthResult {
    pub samples: Vec<DepthSample>,
    /// ON events that fell outside every schedule entry.
    pub out_of_schedule: u64,
    /// ON events folded into samples.
    pub used: u64,
}

/// Depth from a scanning line: each ON event is dated to a schedule slot,
/// the slot names the projector line center, and the camera ray is cut with
/// that line's light plane (the plane spanned by the projector rays through
/// the line center). Events at the same pixel average their points.
pub fn depth_from_moving_line(
    events: &[Event],
    schedule: &[LineSlot],
    camera: &PinholeModel,
    projector: &PinholeModel,
) -> Result<LineDepthResult, DepthError> {
    if schedule.is_empty() {
        return Err(DepthError::EmptyLineSchedule);
    }
    for (i, w) in schedule.windows(2).enumerate() {
        if w[0].end_us > w[1].start_us {
            return Err(DepthError::OverlappingSchedule(i + 1));
        }
    }

    // Light plane per slot: two rays through the line's center coordinate.
    let mut planes = Vec::with_capacity(schedule.len());
    for slot in schedule {
        let c = slot.coord as f64 + (slot.line_width as f64 - 1.0) / 2.0;
        let (a, b) = match slot.orientation {
            Orientation::Vertical => (
                projector.backproject(c, 0.0),
                projector.backproject(c, projector.height as f64 - 1.0),
            ),
            Orientation::Horizontal => (
                projector.backproject(0.0, c),
                projector.backproject(projector.width as f64 - 1.0, c),
            ),
        };
        let normal = a.direction.cross(&b.direction);
        let normal = if normal.norm() <= 1e-12 {
            return Err(DepthError::Geometry(GeometryError::RaysNearParallel));
        } else {
            normal.normalize()
        };
        let d = normal.dot(&a.origin);
        planes.push((normal, d));
    }

    let mut acc: std::collections::HashMap<(u16, u16), (Vector3<f64>, u64)> =
        std::collections::HashMap::new();
    let mut out_of_schedule = 0u64;
    let mut used = 0u64;
    let mut slot_idx = 0usize;
    for e in events {
        if e.polarity == Polarity::Off {
            continue;
        }
        while slot_idx < schedule.len() && schedule[slot_idx].end_us <= e.t_us {
            slot_idx += 1;
        }
        let in_slot = slot_idx < schedule.len() && e.t_us >= schedule[slot_idx].start_us;
        if !in_slot {
            out_of_schedule += 1;
            continue;
        }
        let ray = camera.backproject(e.x as f64, e.y as f64);
        let (normal, d) = planes[slot_idx];
        match intersect_ray_raw_plane(&ray, &normal, d) {
            Ok((point, _)) => {
                let entry = acc.entry((e.x, e.y)).or_insert((Vector3::zeros(), 0));
                entry.0 += point;
                entry.1 += 1;
                used += 1;
            }
            Err(_) => out_of_schedule += 1,
        }
    }

    let mut samples: Vec<DepthSample> = acc
        .into_iter()
        .map(|((x, y), (sum, n))| DepthSample {
            px: x as f64,
            py: y as f64,
            point: sum / n as f64,
            gap_m: 0.0,
        })
        .collect();
    samples.sort_by(|a, b| (a.py, a.px).partial_cmp(&(b.py, b.px)).expect("pixels are finite"));
    Ok(LineDepthResult { samples, out_of_schedule, used })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudPoint {
    pub position: Vector3<f64>,
    pub rgb: [u8; 3],
}

#[derive(Debug, Clone, Default)]
pub struct PointCloud {
    pub points: Vec<CloudPoint>,
}

/// Colors each depth sample from the reconstructed frame at its pixel.
/// Samples whose pixel rounds outside the frame are dropped and counted.
pub fn colorize(samples: &[DepthSample], frame: &Rgb8Frame) -> (PointCloud, usize) {
    let mut cloud = PointCloud::default();
    let mut dropped = 0usize;
    for s in samples {
        let (x, y) = (s.px.round(), s.py.round());
        if x < 0.0 || y < 0.0 || x >= frame.width as f64 || y >= frame.height as f64 {
            dropped += 1;
            continue;
        }
        cloud.points.push(CloudPoint {
            position: s.point,
            rgb: frame.at(x as u32, y as u32),
        });
    }
    (cloud, dropped)
}
