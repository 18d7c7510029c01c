//! Pinhole back-projection and the line-distortion witness for the disparity
//! shift ambiguity.
//!
//! Pixel coordinates are integer pixel centers: `x` grows to the right, `y`
//! grows downward, matching row-major storage.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::map::{DepthMap, MaskedMap};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<Self> {
        if !(fx > 0.0 && fy > 0.0 && fx.is_finite() && fy.is_finite()) {
            return Err(Error::InvalidParameter("focal lengths must be positive"));
        }
        if !(cx.is_finite() && cy.is_finite()) {
            return Err(Error::InvalidParameter("principal point must be finite"));
        }
        Ok(CameraIntrinsics { fx, fy, cx, cy })
    }

    /// `fx = fy = 1`, principal point at the origin.
    pub fn unit() -> Self {
        CameraIntrinsics {
            fx: 1.0,
            fy: 1.0,
            cx: 0.0,
            cy: 0.0,
        }
    }
}

/// Camera-frame 3D points with optional RGB colors.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<[f64; 3]>,
    colors: Option<Vec<[u8; 3]>>,
}

impl PointCloud {
    pub fn new(points: Vec<[f64; 3]>, colors: Option<Vec<[u8; 3]>>) -> Result<Self> {
        if let Some(c) = &colors {
            if c.len() != points.len() {
                return Err(Error::InvalidParameter(
                    "color count must match point count",
                ));
            }
        }
        if let Some(index) = points.iter().position(|p| !(p[2] > 0.0)) {
            return Err(Error::NonPositiveValue {
                index,
                value: points[index][2],
            });
        }
        Ok(PointCloud { points, colors })
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn colors(&self) -> Option<&[[u8; 3]]> {
        self.colors.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Attaches per-point colors.
    pub fn with_colors(self, colors: Vec<[u8; 3]>) -> Result<Self> {
        PointCloud::new(self.points, Some(colors))
    }
}

/// Lifts every valid pixel `(x, y, d)` to `((x-cx) d/fx, (y-cy) d/fy, d)`,
/// in row-major order.
pub fn backproject(depth: &DepthMap, intr: &CameraIntrinsics) -> Result<PointCloud> {
    let m = depth.map();
    m.check_positive()?;
    let mut points = Vec::with_capacity(m.valid_count());
    for y in 0..m.height() {
        for x in 0..m.width() {
            if let Some(d) = m.get(x, y) {
                points.push([
                    (x as f64 - intr.cx) * d / intr.fx,
                    (y as f64 - intr.cy) * d / intr.fy,
                    d,
                ]);
            }
        }
    }
    PointCloud::new(points, None)
}

/// Planar depth field `d = a x + b y + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LineModel {
    pub fn depth_at(&self, x: usize, y: usize) -> f64 {
        self.a * x as f64 + self.b * y as f64 + self.c
    }
}

/// Depth map holding `line` at the requested pixels and invalid elsewhere.
/// The map spans the bounding box of the pixel set anchored at the origin.
pub fn synth_line_depth(line: &LineModel, pixels: &[(usize, usize)]) -> Result<DepthMap> {
    if pixels.is_empty() {
        return Err(Error::EmptyMask);
    }
    let width = pixels.iter().map(|p| p.0).max().unwrap_or(0) + 1;
    let height = pixels.iter().map(|p| p.1).max().unwrap_or(0) + 1;
    let mut values = alloc::vec![f64::NAN; width * height];
    let mut mask = alloc::vec![false; width * height];
    for &(x, y) in pixels {
        let d = line.depth_at(x, y);
        let i = y * width + x;
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NonPositiveValue { index: i, value: d });
        }
        values[i] = d;
        mask[i] = true;
    }
    DepthMap::new(
        MaskedMap::new(width, height, values, mask)?,
        crate::map::DepthKind::Absolute,
    )
}

/// Unknown scale `c1` and shift `c2` of inverse depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtssDistortion {
    pub c1: f64,
    pub c2: f64,
}

/// `d' = d / (c1 + c2 d)` at every valid pixel, i.e. `1/d' = c1/d + c2`.
pub fn apply_utss_distortion(depth: &DepthMap, dist: &UtssDistortion) -> Result<DepthMap> {
    if !(dist.c1 > 0.0) || !dist.c2.is_finite() {
        return Err(Error::InvalidParameter(
            "distortion needs c1 > 0 and finite c2",
        ));
    }
    let m = depth.map();
    for (index, (&d, &valid)) in m.values().iter().zip(m.mask()).enumerate() {
        let denominator = dist.c1 + dist.c2 * d;
        if valid && !(denominator > 0.0) {
            return Err(Error::DistortionPole { index, denominator });
        }
    }
    let map = m.map_valid(|d| d / (dist.c1 + dist.c2 * d))?;
    DepthMap::new(map, depth.kind())
}

/// Dominant eigenvector of a symmetric positive semi-definite 3x3 matrix by
/// power iteration. `None` when the matrix is zero.
fn dominant_eigenvector(s: &[[f64; 3]; 3]) -> Option<[f64; 3]> {
    const TOL: f64 = 1e-12;
    const MAX_ITERS: usize = 10_000;

    let norm = |v: &[f64; 3]| libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    let mul = |v: &[f64; 3]| {
        let mut out = [0.0; 3];
        for (r, row) in s.iter().enumerate() {
            out[r] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        }
        out
    };

    // Start from the column with the largest diagonal entry.
    let k = (0..3).fold(0, |best, i| if s[i][i] > s[best][best] { i } else { best });
    let mut v = [s[0][k], s[1][k], s[2][k]];
    let n = norm(&v);
    if !(n > 0.0) {
        return None;
    }
    v.iter_mut().for_each(|c| *c /= n);

    for _ in 0..MAX_ITERS {
        let mut w = mul(&v);
        let n = norm(&w);
        if !(n > 0.0) {
            return Some(v);
        }
        w.iter_mut().for_each(|c| *c /= n);
        let delta = libm::sqrt(
            (w[0] - v[0]) * (w[0] - v[0])
                + (w[1] - v[1]) * (w[1] - v[1])
                + (w[2] - v[2]) * (w[2] - v[2]),
        );
        v = w;
        if delta < TOL {
            break;
        }
    }
    Some(v)
}

/// Largest distance from any point to the best-fit 3D line, divided by the
/// diagonal of the cloud's bounding box. Zero iff the points are collinear.
///
/// The line passes through the centroid along the dominant eigenvector of the
/// scatter matrix.
pub fn collinearity_deviation(cloud: &PointCloud) -> Result<f64> {
    let pts = cloud.points();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    let n = pts.len() as f64;
    let mut centroid = [0.0; 3];
    for p in pts {
        for k in 0..3 {
            centroid[k] += p[k] / n;
        }
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    let mut scatter = [[0.0; 3]; 3];
    for p in pts {
        let q = [p[0] - centroid[0], p[1] - centroid[1], p[2] - centroid[2]];
        for r in 0..3 {
            lo[r] = libm::fmin(lo[r], p[r]);
            hi[r] = libm::fmax(hi[r], p[r]);
            for c in 0..3 {
                scatter[r][c] += q[r] * q[c];
            }
        }
    }
    let diag = libm::sqrt(
        (hi[0] - lo[0]) * (hi[0] - lo[0])
            + (hi[1] - lo[1]) * (hi[1] - lo[1])
            + (hi[2] - lo[2]) * (hi[2] - lo[2]),
    );
    let Some(dir) = dominant_eigenvector(&scatter) else {
        // All points coincide.
        return Ok(0.0);
    };
    if !(diag > 0.0) {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for p in pts {
        let q = [p[0] - centroid[0], p[1] - centroid[1], p[2] - centroid[2]];
        let t = q[0] * dir[0] + q[1] * dir[1] + q[2] * dir[2];
        let off = [q[0] - t * dir[0], q[1] - t * dir[1], q[2] - t * dir[2]];
        worst = libm::fmax(
            worst,
            libm::sqrt(off[0] * off[0] + off[1] * off[1] + off[2] * off[2]),
        );
    }
    Ok(worst / diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::DepthKind;
    use alloc::vec;

    fn depth(w: usize, h: usize, v: Vec<f64>) -> DepthMap {
        DepthMap::new(
            MaskedMap::from_values(w, h, v).unwrap(),
            DepthKind::Absolute,
        )
        .unwrap()
    }

    #[test]
    fn backproject_examples() {
        let mut v = vec![f64::NAN; 12];
        v[3 * 3 + 2] = 4.0;
        let cloud = backproject(&depth(3, 4, v), &CameraIntrinsics::unit()).unwrap();
        assert_eq!(cloud.points(), &[[8.0, 12.0, 4.0]]);

        let intr = CameraIntrinsics::new(500.0, 480.0, 1.0, 0.0).unwrap();
        let cloud = backproject(&depth(2, 1, vec![f64::NAN, 7.5]), &intr).unwrap();
        assert_eq!(cloud.points(), &[[0.0, 0.0, 7.5]]);
    }

    #[test]
    fn point_count_is_valid_count() {
        let d = depth(2, 2, vec![1.0, f64::NAN, 2.0, 3.0]);
        assert_eq!(backproject(&d, &CameraIntrinsics::unit()).unwrap().len(), 3);
    }

    #[test]
    fn bad_intrinsics() {
        assert!(CameraIntrinsics::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(CameraIntrinsics::new(1.0, 1.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn synth_line_examples() {
        let line = LineModel {
            a: 1.0,
            b: 0.0,
            c: 1.0,
        };
        let d = synth_line_depth(&line, &[(0, 0), (1, 0), (2, 0)]).unwrap();
        assert_eq!(d.map().values(), &[1.0, 2.0, 3.0]);

        let flat = LineModel {
            a: 0.0,
            b: 0.0,
            c: 2.5,
        };
        let d = synth_line_depth(&flat, &[(0, 1), (3, 2)]).unwrap();
        assert_eq!(d.map().masked_values().unwrap().values, vec![2.5, 2.5]);

        let neg = LineModel {
            a: -1.0,
            b: 0.0,
            c: 1.0,
        };
        assert!(matches!(
            synth_line_depth(&neg, &[(0, 0), (2, 0)]),
            Err(Error::NonPositiveValue { .. })
        ));
    }

    #[test]
    fn distortion_examples() {
        let d = depth(1, 1, vec![2.0]);
        let same = apply_utss_distortion(&d, &UtssDistortion { c1: 1.0, c2: 0.0 }).unwrap();
        assert_eq!(same.map().values(), &[2.0]);
        let shifted = apply_utss_distortion(&d, &UtssDistortion { c1: 1.0, c2: 0.5 }).unwrap();
        assert_eq!(shifted.map().values(), &[1.0]);
        let scaled = apply_utss_distortion(&d, &UtssDistortion { c1: 4.0, c2: 0.0 }).unwrap();
        assert_eq!(scaled.map().values(), &[0.5]);
        assert!(matches!(
            apply_utss_distortion(&d, &UtssDistortion { c1: 1.0, c2: -0.5 }),
            Err(Error::DistortionPole { index: 0, .. })
        ));
    }

    #[test]
    fn collinear_points() {
        let cloud = PointCloud::new(
            vec![[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [5.0, 0.0, 1.0]],
            None,
        )
        .unwrap();
        assert!(collinearity_deviation(&cloud).unwrap() < 1e-12);

        let bent = PointCloud::new(
            vec![[0.0, 0.0, 1.0], [1.0, 1.0, 1.0], [2.0, 0.0, 1.0]],
            None,
        )
        .unwrap();
        assert!(collinearity_deviation(&bent).unwrap() > 0.1);

        let two = PointCloud::new(vec![[0.0, 0.0, 1.0]; 2], None).unwrap();
        assert_eq!(
            collinearity_deviation(&two).unwrap_err(),
            Error::TooFewPoints(2)
        );
    }

    #[test]
    fn cloud_invariants() {
        assert!(PointCloud::new(vec![[0.0, 0.0, 0.0]], None).is_err());
        assert!(PointCloud::new(vec![[0.0, 0.0, 1.0]], Some(vec![])).is_err());
    }
}
