//! Binary netpbm images: P6 color frames, P4 pattern bitmaps (lit pixels
//! white), and P5 16-bit grayscale for depth or irradiance dumps.

use std::path::Path;

use super::{write_atomic, FormatError};
use crate::color::Rgb8Frame;
use crate::pattern::Pattern;

pub fn ppm_bytes(frame: &Rgb8Frame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend_from_slice(&frame.data);
    out
}

pub fn write_ppm(path: &Path, frame: &Rgb8Frame) -> Result<(), FormatError> {
    write_atomic(path, &ppm_bytes(frame))
}

/// Reads tokens from a netpbm header: whitespace separated, `#` comments run
/// to end of line. Returns the token and the index just past it.
fn next_token(bytes: &[u8], mut i: usize) -> Option<(String, usize)> {
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i < bytes.len() && bytes[i] == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        break;
    }
    if i >= bytes.len() {
        return None;
    }
    let start = i;
    while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
        i += 1;
    }
    Some((String::from_utf8_lossy(&bytes[start..i]).into_owned(), i))
}

pub fn read_ppm(path: &Path) -> Result<Rgb8Frame, FormatError> {
    let bytes = std::fs::read(path)?;
    let (magic, i) = next_token(&bytes, 0).ok_or_else(|| FormatError::header(path, "empty file"))?;
    if magic != "P6" {
        return Err(FormatError::header(path, format!("expected P6, got {magic}")));
    }
    let (w, i) = next_token(&bytes, i).ok_or_else(|| FormatError::header(path, "missing width"))?;
    let (h, i) = next_token(&bytes, i).ok_or_else(|| FormatError::header(path, "missing height"))?;
    let (maxval, i) =
        next_token(&bytes, i).ok_or_else(|| FormatError::header(path, "missing maxval"))?;
    let width: u32 =
        w.parse().map_err(|e| FormatError::header(path, format!("width: {e}")))?;
    let height: u32 =
        h.parse().map_err(|e| FormatError::header(path, format!("height: {e}")))?;
    if maxval != "255" {
        return Err(FormatError::header(path, format!("only maxval 255 supported, got {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    let data_start = i + 1;
    let need = width as usize * height as usize * 3;
    if bytes.len() < data_start + need {
        return Err(FormatError::header(
            path,
            format!("raster truncated: need {need} bytes, have {}", bytes.len().saturating_sub(data_start)),
        ));
    }
    Ok(Rgb8Frame::from_data(width, height, bytes[data_start..data_start + need].to_vec()))
}

/// P4 bitmap with lit pattern pixels written white (bit 0) on black.
pub fn pbm_bytes(pattern: &Pattern) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", pattern.width, pattern.height).into_bytes();
    let row_bytes = (pattern.width as usize).div_ceil(8);
    for y in 0..pattern.height {
        let mut row = vec![0u8; row_bytes];
        for x in 0..pattern.width {
            if !pattern.lit(x, y) {
                row[x as usize / 8] |= 0x80 >> (x % 8);
            }
        }
        out.extend_from_slice(&row);
    }
    out
}

pub fn write_pbm(path: &Path, pattern: &Pattern) -> Result<(), FormatError> {
    write_atomic(path, &pbm_bytes(pattern))
}

/// Reads a P4 bitmap back as (width, height, lit flags) where white means
/// lit, matching `write_pbm`.
pub fn read_pbm(path: &Path) -> Result<(u32, u32, Vec<u8>), FormatError> {
    let bytes = std::fs::read(path)?;
    let (magic, i) = next_token(&bytes, 0).ok_or_else(|| FormatError::header(path, "empty file"))?;
    if magic != "P4" {
        return Err(FormatError::header(path, format!("expected P4, got {magic}")));
    }
    let (w, i) = next_token(&bytes, i).ok_or_else(|| FormatError::header(path, "missing width"))?;
    let (h, i) = next_token(&bytes, i).ok_or_else(|| FormatError::header(path, "missing height"))?;
    let width: u32 = w.parse().map_err(|e| FormatError::header(path, format!("width: {e}")))?;
    let height: u32 = h.parse().map_err(|e| FormatError::header(path, format!("height: {e}")))?;
    let data_start = i + 1;
    let row_bytes = (width as usize).div_ceil(8);
    let need = row_bytes * height as usize;
    if bytes.len() < data_start + need {
        return Err(FormatError::header(path, "raster truncated"));
    }
    let mut lit = vec![0u8; width as usize * height as usize];
    for y in 0..height as usize {
        let row = &bytes[data_start + y * row_bytes..data_start + (y + 1) * row_bytes];
        for x in 0..width as usize {
            let black = row[x / 8] & (0x80 >> (x % 8)) != 0;
            lit[y * width as usize + x] = (!black) as u8;
        }
    }
    Ok((width, height, lit))
}

/// P5 with maxval 65535, big-endian samples, values normalized so the
/// largest input maps to 65535. An all-zero input stays all zero.
pub fn pgm16_bytes(values: &[f64], width: u32, height: u32) -> Vec<u8> {
    assert_eq!(values.len(), width as usize * height as usize);
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    let scale = if max > 0.0 { 65535.0 / max } else { 0.0 };
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    for v in values {
        let q = (v.max(0.0) * scale).round() as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    out
}

pub fn write_pgm16(path: &Path, values: &[f64], width: u32, height: u32) -> Result<(), FormatError> {
    write_atomic(path, &pgm16_bytes(values, width, height))
}
