//! Image-quality metrics for comparing reconstructed frames against ground
//! truth: per-channel RMSE, PSNR, and an HSV histogram-correlation score that
//! rewards getting the color distribution right even when intensity drifts.

use thiserror::Error;

use crate::color::Rgb8Frame;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum MetricsError {
    #[error("frame dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("frames are empty")]
    EmptyFrame,
    #[error("histogram correlation undefined: {0}")]
    DegenerateHistogram(&'static str),
}

/// Root-mean-square error per channel; `overall` pools the three channels'
/// squared errors before the root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRmse {
    pub r: f64,
    pub g: f64,
    pub b: f64,
    pub overall: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub rmse: ChannelRmse,
    /// Infinite for identical frames.
    pub psnr_db: f64,
    pub hc: f64,
}

fn check_dims(a: &Rgb8Frame, b: &Rgb8Frame) -> Result<usize, MetricsError> {
    if a.width != b.width || a.height != b.height {
        return Err(MetricsError::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    let n = a.width as usize * a.height as usize;
    if n == 0 {
        return Err(MetricsError::EmptyFrame);
    }
    Ok(n)
}

pub fn rmse_per_channel(a: &Rgb8Frame, b: &Rgb8Frame) -> Result<ChannelRmse, MetricsError> {
    let n = check_dims(a, b)?;
    let mut sq = [0.0f64; 3];
    for (pa, pb) in a.pixels().zip(b.pixels()) {
        for c in 0..3 {
            let d = pa[c] as f64 - pb[c] as f64;
            sq[c] += d * d;
        }
    }
    let mse = sq.map(|s| s / n as f64);
    Ok(ChannelRmse {
        r: mse[0].sqrt(),
        g: mse[1].sqrt(),
        b: mse[2].sqrt(),
        overall: ((mse[0] + mse[1] + mse[2]) / 3.0).sqrt(),
    })
}

/// Peak signal-to-noise ratio in dB over the pooled MSE, with a 255 peak.
pub fn psnr_db(a: &Rgb8Frame, b: &Rgb8Frame) -> Result<f64, MetricsError> {
    let rmse = rmse_per_channel(a, b)?;
    let mse = rmse.overall * rmse.overall;
    if mse == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
    }
}

/// RGB to 8-bit HSV. Hue uses the usual six-sector formula scaled so a full
/// turn spans 0..=255; saturation and value are 0..=255. Gray pixels get
/// hue 0 and saturation 0.
pub fn hsv8(rgb: [u8; 3]) -> [u8; 3] {
    let [r, g, b] = rgb.map(|v| v as f64);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let v = max;
    let s = if max == 0.0 { 0.0 } else { (255.0 * delta / max).round() };
    let h_deg = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / delta).rem_euclid(6.0))
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    let h = (h_deg * 255.0 / 360.0).round();
    [h as u8, s as u8, v as u8]
}

fn hsv_histograms(frame: &Rgb8Frame) -> [[u64; 256]; 3] {
    let mut hist = [[0u64; 256]; 3];
    for p in frame.pixels() {
        let hsv = hsv8(p);
        for c in 0..3 {
            hist[c][hsv[c] as usize] += 1;
        }
    }
    hist
}

fn pearson(a: &[u64; 256], b: &[u64; 256]) -> Result<f64, MetricsError> {
    let n = 256.0;
    let mean_a = a.iter().sum::<u64>() as f64 / n;
    let mean_b = b.iter().sum::<u64>() as f64 / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for i in 0..256 {
        let da = a[i] as f64 - mean_a;
        let db = b[i] as f64 - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    let denom = (var_a * var_b).sqrt();
    if denom == 0.0 {
        return Err(MetricsError::DegenerateHistogram("zero-variance histogram"));
    }
    Ok(cov / denom)
}

fn is_constant(frame: &Rgb8Frame) -> bool {
    let mut px = frame.pixels();
    let Some(first) = px.next() else { return true };
    px.all(|p| p == first)
}

/// Mean Pearson correlation of the H, S and V histograms of two frames.
///
/// Constant-valued frames are rejected: a single-spike histogram pair scores
/// a meaningless correlation, so the comparison is declared degenerate.
pub fn histogram_correlation(a: &Rgb8Frame, b: &Rgb8Frame) -> Result<f64, MetricsError> {
    check_dims(a, b)?;
    if is_constant(a) || is_constant(b) {
        return Err(MetricsError::DegenerateHistogram("constant-valued frame"));
    }
    let ha = hsv_histograms(a);
    let hb = hsv_histograms(b);
    let mut sum = 0.0;
    for c in 0..3 {
        sum += pearson(&ha[c], &hb[c])?;
    }
    Ok(sum / 3.0)
}

/// Bundles RMSE, PSNR and histogram correlation for one frame pair.
pub fn metric_report(reconstructed: &Rgb8Frame, truth: &Rgb8Frame) -> Result<MetricReport, MetricsError> {
    Ok(MetricReport {
        rmse: rmse_per_channel(reconstructed, truth)?,
        psnr_db: psnr_db(reconstructed, truth)?,
        hc: histogram_correlation(reconstructed, truth)?,
    })
}
