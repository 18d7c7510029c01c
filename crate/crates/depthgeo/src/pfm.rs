//! Single-channel PFM (Portable Float Map) reading and writing.
//!
//! Layout: `Pf\n`, `W H\n`, a scale line whose sign gives the byte order
//! (negative = little-endian), then `W * H` 32-bit floats, bottom row first.
//! Non-finite samples mark invalid pixels. Files are always written
//! little-endian with scale `-1.0`.

use std::fs;
use std::path::Path;

use depthgeo_core::{DepthKind, DepthMap, DisparityMap, MaskedMap};

use crate::error::{Error, Result};

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::format("truncated PFM header"));
    }
    Ok(&bytes[start..*pos])
}

fn parse<T: std::str::FromStr>(token: &[u8], what: &str) -> Result<T> {
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| {
            Error::format(format!(
                "bad PFM {what}: {:?}",
                String::from_utf8_lossy(token)
            ))
        })
}

/// Decodes a PFM byte buffer. The mask is "sample is finite".
pub fn decode(bytes: &[u8]) -> Result<MaskedMap> {
    let mut pos = 0;
    match next_token(bytes, &mut pos)? {
        b"Pf" => {}
        b"PF" => return Err(Error::format("color PFM is not supported")),
        other => {
            return Err(Error::format(format!(
                "not a PFM file (magic {:?})",
                String::from_utf8_lossy(other)
            )))
        }
    }
    let width: usize = parse(next_token(bytes, &mut pos)?, "width")?;
    let height: usize = parse(next_token(bytes, &mut pos)?, "height")?;
    let scale: f64 = parse(next_token(bytes, &mut pos)?, "scale")?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::format("PFM scale must be non-zero"));
    }
    // Exactly one whitespace byte separates the header from the samples.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::format("truncated PFM header"));
    }
    pos += 1;

    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::format("PFM dimensions overflow"))?;
    let data = &bytes[pos..];
    if data.len() < count * 4 {
        return Err(Error::format(format!(
            "PFM payload has {} bytes, expected {}",
            data.len(),
            count * 4
        )));
    }
    let little = scale < 0.0;
    let mut values = vec![0.0f64; count];
    for (k, chunk) in data[..count * 4].chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        // file rows run bottom to top
        let (file_row, x) = (k / width, k % width);
        let y = height - 1 - file_row;
        values[y * width + x] = v as f64;
    }
    Ok(MaskedMap::from_values(width, height, values)?)
}

/// Encodes a map as little-endian PFM; invalid pixels are written as NaN.
pub fn encode(map: &MaskedMap) -> Result<Vec<u8>> {
    let (w, h) = map.dims();
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(w * h * 4);
    for y in (0..h).rev() {
        for x in 0..w {
            let v = match map.get(x, y) {
                Some(v) => {
                    let f = v as f32;
                    if !f.is_finite() {
                        return Err(Error::format(format!(
                            "value {v} at ({x}, {y}) does not fit in a 32-bit float"
                        )));
                    }
                    f
                }
                None => f32::NAN,
            };
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn read(path: impl AsRef<Path>) -> Result<MaskedMap> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write(path: impl AsRef<Path>, map: &MaskedMap) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(map)?).map_err(|e| Error::io(path, e))
}

pub fn read_depth(path: impl AsRef<Path>, kind: DepthKind) -> Result<DepthMap> {
    Ok(DepthMap::new(read(path)?, kind)?)
}

pub fn read_disparity(path: impl AsRef<Path>, kind: DepthKind) -> Result<DisparityMap> {
    Ok(DisparityMap::new(read(path)?, kind)?)
}
