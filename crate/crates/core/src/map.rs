//! Dense masked maps and the depth / disparity / log-domain conversions.
//!
//! Values live in row-major order. A pixel participates in computations only
//! when its mask entry is `true`; the value stored under a `false` mask entry
//! is ignored (I/O writes it back as NaN).

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Which ambiguity a depth or disparity map carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DepthKind {
    /// Metric depth.
    Absolute,
    /// Depth known up to a positive scale.
    Uts,
    /// Inverse depth known up to a positive scale and a shift.
    Utss,
    /// Only pairwise closer/farther relations; carries no dense values.
    Ordinal,
}

impl DepthKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DepthKind::Absolute => "absolute",
            DepthKind::Uts => "UTS",
            DepthKind::Utss => "UTSS",
            DepthKind::Ordinal => "ordinal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "absolute" | "abs" => Some(DepthKind::Absolute),
            "uts" => Some(DepthKind::Uts),
            "utss" => Some(DepthKind::Utss),
            "ordinal" => Some(DepthKind::Ordinal),
            _ => None,
        }
    }
}

/// A real-valued `width x height` map with a per-pixel validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
    mask: Vec<bool>,
}

/// The valid entries of a map in row-major order, with their pixel indices.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedValues {
    pub values: Vec<f64>,
    pub indices: Vec<usize>,
}

impl MaskedValues {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl MaskedMap {
    /// Builds a map with an explicit mask. Every valid pixel must be finite.
    pub fn new(width: usize, height: usize, values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        let len = width
            .checked_mul(height)
            .ok_or(Error::InvalidParameter("map size overflows usize"))?;
        if values.len() != len || mask.len() != len {
            return Err(Error::BadDimensions {
                width,
                height,
                len: values.len().max(mask.len()),
            });
        }
        if let Some(index) = values
            .iter()
            .zip(&mask)
            .position(|(v, &m)| m && !v.is_finite())
        {
            return Err(Error::NonFinite { index });
        }
        Ok(MaskedMap {
            width,
            height,
            values,
            mask,
        })
    }

    /// Builds a map whose mask is "value is finite".
    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        let mask = values.iter().map(|v| v.is_finite()).collect();
        Self::new(width, height, values, mask)
    }

    /// Builds a map where every pixel is valid.
    pub fn full(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        let mask = alloc::vec![true; values.len()];
        Self::new(width, height, values, mask)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        if x >= self.width || y >= self.height {
            return None;
        }
        let i = self.index(x, y);
        self.mask[i].then(|| self.values[i])
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Same values, different mask. Newly validated pixels must be finite.
    pub fn with_mask(&self, mask: Vec<bool>) -> Result<Self> {
        Self::new(self.width, self.height, self.values.clone(), mask)
    }

    /// Intersects this map's mask with another one of the same size.
    pub fn restrict(&self, mask: &[bool]) -> Result<Self> {
        if mask.len() != self.mask.len() {
            return Err(Error::BadDimensions {
                width: self.width,
                height: self.height,
                len: mask.len(),
            });
        }
        let joint = self.mask.iter().zip(mask).map(|(&a, &b)| a && b).collect();
        self.with_mask(joint)
    }

    /// Mask that is valid where both maps are valid.
    pub fn joint_mask(&self, other: &MaskedMap) -> Result<Vec<bool>> {
        self.check_same_dims(other)?;
        Ok(self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(&a, &b)| a && b)
            .collect())
    }

    pub fn check_same_dims(&self, other: &MaskedMap) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(())
    }

    /// Applies `f` to every valid pixel. Invalid pixels are left untouched.
    /// Fails if `f` produces a non-finite value on a valid pixel.
    pub fn map_valid(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let mut values = self.values.clone();
        for (i, (v, &m)) in values.iter_mut().zip(&self.mask).enumerate() {
            if m {
                *v = f(*v);
                if !v.is_finite() {
                    return Err(Error::NonFinite { index: i });
                }
            }
        }
        Ok(MaskedMap {
            width: self.width,
            height: self.height,
            values,
            mask: self.mask.clone(),
        })
    }

    /// Fails with `NonPositiveValue` at the first valid pixel that is `<= 0`.
    pub fn check_positive(&self) -> Result<()> {
        match self
            .values
            .iter()
            .zip(&self.mask)
            .position(|(&v, &m)| m && !(v > 0.0))
        {
            Some(index) => Err(Error::NonPositiveValue {
                index,
                value: self.values[index],
            }),
            None => Ok(()),
        }
    }

    /// Elementwise natural logarithm on the valid pixels.
    pub fn to_log(&self) -> Result<Self> {
        self.check_positive()?;
        self.map_valid(libm::log)
    }

    /// Elementwise exponential on the valid pixels.
    pub fn to_exp(&self) -> Result<Self> {
        self.map_valid(libm::exp)
    }

    /// Extracts the valid values in row-major order.
    pub fn masked_values(&self) -> Result<MaskedValues> {
        let mut values = Vec::new();
        let mut indices = Vec::new();
        for (i, (&v, &m)) in self.values.iter().zip(&self.mask).enumerate() {
            if m {
                values.push(v);
                indices.push(i);
            }
        }
        if values.is_empty() {
            return Err(Error::EmptyMask);
        }
        Ok(MaskedValues { values, indices })
    }
}

/// Depth map. Every valid pixel is finite and strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    map: MaskedMap,
    kind: DepthKind,
}

/// Disparity (inverse depth) map. Absolute and UTS disparities are strictly
/// positive; UTSS disparities may be zero or negative after the shift.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap {
    map: MaskedMap,
    kind: DepthKind,
}

fn check_dense_kind(kind: DepthKind) -> Result<()> {
    if kind == DepthKind::Ordinal {
        return Err(Error::KindMismatch(kind));
    }
    Ok(())
}

impl DepthMap {
    pub fn new(map: MaskedMap, kind: DepthKind) -> Result<Self> {
        check_dense_kind(kind)?;
        map.check_positive()?;
        Ok(DepthMap { map, kind })
    }

    pub fn kind(&self) -> DepthKind {
        self.kind
    }

    pub fn map(&self) -> &MaskedMap {
        &self.map
    }

    pub fn into_map(self) -> MaskedMap {
        self.map
    }

    pub fn with_kind(self, kind: DepthKind) -> Result<Self> {
        DepthMap::new(self.map, kind)
    }

    /// `D_i = 1 / d_i` on every valid pixel.
    pub fn to_inverse(&self) -> Result<DisparityMap> {
        let map = self.map.map_valid(|v| 1.0 / v)?;
        DisparityMap::new(map, self.kind)
    }

    pub fn to_log(&self) -> Result<MaskedMap> {
        self.map.to_log()
    }
}

impl DisparityMap {
    pub fn new(map: MaskedMap, kind: DepthKind) -> Result<Self> {
        check_dense_kind(kind)?;
        if kind != DepthKind::Utss {
            map.check_positive()?;
        }
        Ok(DisparityMap { map, kind })
    }

    pub fn kind(&self) -> DepthKind {
        self.kind
    }

    pub fn map(&self) -> &MaskedMap {
        &self.map
    }

    pub fn into_map(self) -> MaskedMap {
        self.map
    }

    /// `d_i = 1 / D_i`; fails for non-positive disparities.
    pub fn to_inverse(&self) -> Result<DepthMap> {
        self.map.check_positive()?;
        let map = self.map.map_valid(|v| 1.0 / v)?;
        DepthMap::new(map, self.kind)
    }

    pub fn to_log(&self) -> Result<MaskedMap> {
        self.map.to_log()
    }
}

impl AsRef<MaskedMap> for MaskedMap {
    fn as_ref(&self) -> &MaskedMap {
        self
    }
}

impl AsRef<MaskedMap> for DepthMap {
    fn as_ref(&self) -> &MaskedMap {
        &self.map
    }
}

impl AsRef<MaskedMap> for DisparityMap {
    fn as_ref(&self) -> &MaskedMap {
        &self.map
    }
}

/// Annotated relation of an ordinal pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    ACloser,
    BCloser,
}

/// Two pixels `(x, y)` with a ground-truth closer/farther relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrdinalPair {
    pub pixel_a: (usize, usize),
    pub pixel_b: (usize, usize),
    pub relation: Relation,
}

impl OrdinalPair {
    pub fn new(pixel_a: (usize, usize), pixel_b: (usize, usize), relation: Relation) -> Self {
        OrdinalPair {
            pixel_a,
            pixel_b,
            relation,
        }
    }

    pub fn check_bounds(&self, width: usize, height: usize) -> Result<()> {
        for &(x, y) in [self.pixel_a, self.pixel_b].iter() {
            if x >= width || y >= height {
                return Err(Error::PairOutOfBounds { x, y });
            }
        }
        Ok(())
    }
}
