//! Binary little-endian PLY 1.0 export of point clouds.
//!
//! ```text
//! ply
//! format binary_little_endian 1.0
//! element vertex <N>
//! property float x
//! property float y
//! property float z
//! property uchar red      (only with colors)
//! property uchar green
//! property uchar blue
//! end_header
//! ```
//!
//! followed by `N` records of three `f32` (12 bytes) or three `f32` and three
//! `u8` (15 bytes).

use std::fs;
use std::path::Path;

use depthgeo_core::geometry::PointCloud;

use crate::error::{Error, Result};

pub fn encode(cloud: &PointCloud) -> Result<Vec<u8>> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let mut header = format!(
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\n\
         property float x\nproperty float y\nproperty float z\n",
        cloud.len()
    );
    if cloud.colors().is_some() {
        header.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    }
    header.push_str("end_header\n");

    let stride = if cloud.colors().is_some() { 15 } else { 12 };
    let mut out = header.into_bytes();
    out.reserve(stride * cloud.len());
    for (i, p) in cloud.points().iter().enumerate() {
        for &c in p {
            out.extend_from_slice(&(c as f32).to_le_bytes());
        }
        if let Some(colors) = cloud.colors() {
            out.extend_from_slice(&colors[i]);
        }
    }
    Ok(out)
}

pub fn write(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(cloud)?).map_err(|e| Error::io(path, e))
}

/// Reads back files in exactly the layout produced by [`encode`].
pub fn decode(bytes: &[u8]) -> Result<PointCloud> {
    const END: &[u8] = b"end_header\n";
    let end = bytes
        .windows(END.len())
        .position(|w| w == END)
        .ok_or_else(|| Error::format("PLY header has no end_header"))?;
    let header =
        std::str::from_utf8(&bytes[..end]).map_err(|_| Error::format("PLY header is not UTF-8"))?;
    let mut lines = header.lines();
    if lines.next() != Some("ply") || lines.next() != Some("format binary_little_endian 1.0") {
        return Err(Error::format("not a binary little-endian PLY file"));
    }
    let mut count = None;
    let mut props = Vec::new();
    for line in lines {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["element", "vertex", n] => {
                count = Some(
                    n.parse::<usize>()
                        .map_err(|_| Error::format("bad vertex count"))?,
                )
            }
            ["property", ty, name] => props.push((ty.to_string(), name.to_string())),
            _ => {
                return Err(Error::format(format!(
                    "unsupported PLY header line: {line}"
                )))
            }
        }
    }
    let count = count.ok_or_else(|| Error::format("PLY header declares no vertices"))?;
    let xyz = props[..3.min(props.len())]
        .iter()
        .map(|(t, n)| (t.as_str(), n.as_str()))
        .eq([("float", "x"), ("float", "y"), ("float", "z")]);
    let colored = match props.len() {
        3 => false,
        6 => props[3..]
            .iter()
            .map(|(t, n)| (t.as_str(), n.as_str()))
            .eq([("uchar", "red"), ("uchar", "green"), ("uchar", "blue")]),
        _ => return Err(Error::format("unsupported PLY vertex properties")),
    };
    if !xyz || (props.len() == 6 && !colored) {
        return Err(Error::format("unsupported PLY vertex properties"));
    }
    let stride = if colored { 15 } else { 12 };
    let body = &bytes[end + END.len()..];
    if body.len() != count * stride {
        return Err(Error::format(format!(
            "PLY payload has {} bytes, expected {}",
            body.len(),
            count * stride
        )));
    }
    let mut points = Vec::with_capacity(count);
    let mut colors = colored.then(|| Vec::with_capacity(count));
    for rec in body.chunks_exact(stride) {
        let f = |k: usize| {
            f32::from_le_bytes([rec[4 * k], rec[4 * k + 1], rec[4 * k + 2], rec[4 * k + 3]]) as f64
        };
        points.push([f(0), f(1), f(2)]);
        if let Some(c) = colors.as_mut() {
            c.push([rec[12], rec[13], rec[14]]);
        }
    }
    Ok(PointCloud::new(points, colors)?)
}

pub fn read(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    decode(&fs::read(path).map_err(|e| Error::io(path, e))?)
}
