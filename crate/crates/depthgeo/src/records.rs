//! Small line-oriented text records: camera intrinsics and ordinal pairs.

use std::fs;
use std::path::Path;

use depthgeo_core::geometry::CameraIntrinsics;
use depthgeo_core::{OrdinalPair, Relation};

use crate::error::{Error, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses `fx`, `fy`, `cx`, `cy` given one per line as `key = value`,
/// `key: value` or `key value`. `#` starts a comment.
pub fn parse_intrinsics(text: &str) -> Result<CameraIntrinsics> {
    let mut vals: [Option<f64>; 4] = [None; 4];
    for (n, line) in content_lines(text) {
        let (key, value) = line
            .split_once(['=', ':'])
            .or_else(|| line.split_once(char::is_whitespace))
            .ok_or_else(|| Error::format(format!("intrinsics line {n}: expected `key = value`")))?;
        let slot = match key.trim() {
            "fx" => 0,
            "fy" => 1,
            "cx" => 2,
            "cy" => 3,
            other => {
                return Err(Error::format(format!(
                    "intrinsics line {n}: unknown key `{other}`"
                )))
            }
        };
        let v: f64 = value.trim().parse().map_err(|_| {
            Error::format(format!(
                "intrinsics line {n}: bad number `{}`",
                value.trim()
            ))
        })?;
        vals[slot] = Some(v);
    }
    match vals {
        [Some(fx), Some(fy), Some(cx), Some(cy)] => Ok(CameraIntrinsics::new(fx, fy, cx, cy)?),
        _ => Err(Error::format("intrinsics record needs fx, fy, cx and cy")),
    }
}

pub fn read_intrinsics(path: impl AsRef<Path>) -> Result<CameraIntrinsics> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_intrinsics(&text)
}

/// Parses ordinal pairs, one per line: `xa ya xb yb rel` where `rel` is `A`
/// (pixel a is closer) or `B` (pixel b is closer).
pub fn parse_pairs(text: &str) -> Result<Vec<OrdinalPair>> {
    content_lines(text)
        .map(|(n, line)| {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::format(format!("pairs line {n}: expected `xa ya xb yb A|B`"));
            if f.len() != 5 {
                return Err(bad());
            }
            let c = |s: &str| s.parse::<usize>().map_err(|_| bad());
            let relation = match f[4] {
                "A" | "a" => Relation::ACloser,
                "B" | "b" => Relation::BCloser,
                _ => return Err(bad()),
            };
            Ok(OrdinalPair::new(
                (c(f[0])?, c(f[1])?),
                (c(f[2])?, c(f[3])?),
                relation,
            ))
        })
        .collect()
}

pub fn read_pairs(path: impl AsRef<Path>) -> Result<Vec<OrdinalPair>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pairs(&text)
}
