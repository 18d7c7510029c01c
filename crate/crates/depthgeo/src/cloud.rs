use std::path::Path;

use depthgeo_core::geometry::{backproject, PointCloud};
use depthgeo_core::DepthKind;

use crate::error::Result;
use crate::{pfm, ply, records};

/// Back-projects a depth PFM with the given intrinsics record and writes a
/// binary PLY.
pub fn cmd_backproject(depth: &Path, intrinsics: &Path, out: &Path) -> Result<PointCloud> {
    let depth = pfm::read_depth(depth, DepthKind::Absolute)?;
    let intr = records::read_intrinsics(intrinsics)?;
    let cloud = backproject(&depth, &intr)?;
    ply::write(out, &cloud)?;
    Ok(cloud)
}
