//! ASCII PLY point clouds: float x,y,z plus uchar red,green,blue.

use std::path::Path;

use nalgebra::Vector3;

use super::{write_atomic, FormatError};
use crate::depth::{CloudPoint, PointCloud};

pub fn ply_bytes(cloud: &PointCloud) -> Vec<u8> {
    let mut out = String::with_capacity(128 + cloud.points.len() * 40);
    out.push_str("ply\nformat ascii 1.0\n");
    out.push_str(&format!("element vertex {}\n", cloud.points.len()));
    out.push_str("property float x\nproperty float y\nproperty float z\n");
    out.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    out.push_str("end_header\n");
    for p in &cloud.points {
        out.push_str(&format!(
            "{} {} {} {} {} {}\n",
            p.position.x as f32, p.position.y as f32, p.position.z as f32,
            p.rgb[0], p.rgb[1], p.rgb[2]
        ));
    }
    out.into_bytes()
}

pub fn write_ply(path: &Path, cloud: &PointCloud) -> Result<(), FormatError> {
    write_atomic(path, &ply_bytes(cloud))
}

pub fn read_ply(path: &Path) -> Result<PointCloud, FormatError> {
    let text = std::fs::read_to_string(path)?;
    let lines: Vec<&str> = text.lines().collect();
    let mut cursor = 0usize;
    let expect = |cursor: &mut usize, want: &str| -> Result<(), FormatError> {
        match lines.get(*cursor) {
            Some(got) if got.trim_end() == want => {
                *cursor += 1;
                Ok(())
            }
            Some(got) => {
                Err(FormatError::parse(path, *cursor + 1, format!("expected '{want}', got '{got}'")))
            }
            None => Err(FormatError::header(path, format!("truncated header, expected '{want}'"))),
        }
    };
    expect(&mut cursor, "ply")?;
    expect(&mut cursor, "format ascii 1.0")?;
    let count: usize = match lines.get(cursor) {
        Some(line) => {
            let rest = line.strip_prefix("element vertex ").ok_or_else(|| {
                FormatError::parse(path, cursor + 1, format!("expected vertex count, got '{line}'"))
            })?;
            let n = rest
                .trim()
                .parse()
                .map_err(|e| FormatError::parse(path, cursor + 1, format!("vertex count: {e}")))?;
            cursor += 1;
            n
        }
        None => return Err(FormatError::header(path, "missing element line")),
    };
    for want in [
        "property float x",
        "property float y",
        "property float z",
        "property uchar red",
        "property uchar green",
        "property uchar blue",
        "end_header",
    ] {
        expect(&mut cursor, want)?;
    }
    let mut cloud = PointCloud::default();
    for _ in 0..count {
        let line = *lines
            .get(cursor)
            .ok_or_else(|| FormatError::header(path, format!("expected {count} vertices")))?;
        let lineno = cursor + 1;
        cursor += 1;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return Err(FormatError::parse(path, lineno, format!("expected 6 fields, got {}", f.len())));
        }
        let fv = |s: &str| -> Result<f64, FormatError> {
            s.parse::<f64>().map_err(|e| FormatError::parse(path, lineno, format!("{e}")))
        };
        let cv = |s: &str| -> Result<u8, FormatError> {
            s.parse::<u8>().map_err(|e| FormatError::parse(path, lineno, format!("{e}")))
        };
        cloud.points.push(CloudPoint {
            position: Vector3::new(fv(f[0])?, fv(f[1])?, fv(f[2])?),
            rgb: [cv(f[3])?, cv(f[4])?, cv(f[5])?],
        });
    }
    Ok(cloud)
}
