#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use depthgeo::core::MaskedMap;
use depthgeo::pfm;

pub fn depthgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depthgeo"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn write_full(path: &Path, w: usize, h: usize, values: Vec<f64>) {
    pfm::write(path, &MaskedMap::full(w, h, values).unwrap()).unwrap();
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Left-to-right disparity `y` at every pixel of a `w x h` frame with the
/// matching right-to-left map: every in-bounds correspondence agrees
/// exactly, and pixels with `x < y` fall outside the image.
pub fn consistent_pair(w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let d: Vec<f64> = (0..w * h).map(|i| (i / w) as f64).collect();
    (d.clone(), d)
}
