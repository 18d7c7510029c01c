use thiserror::Error;

/// Errors raised by the numeric core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("map dimensions {width}x{height} do not match {len} values")]
    BadDimensions {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("non-positive or non-finite value {value} at pixel {index}")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("non-finite value at pixel {index}")]
    NonFinite { index: usize },
    #[error("mask has no valid pixels")]
    EmptyMask,
    #[error("need at least {required} valid pixels, got {got}")]
    TooFewPixels { required: usize, got: usize },
    #[error("brute-force oracle limited to {limit} pixels, got {got}")]
    OracleSizeExceeded { limit: usize, got: usize },
    #[error("disparity has (near) zero deviation: sigma = {sigma}")]
    DegenerateDisparity { sigma: f64 },
    #[error("prediction is constant on the mask; least-squares alignment is singular")]
    DegeneratePrediction,
    #[error("depth kind {0:?} is not accepted here")]
    KindMismatch(crate::DepthKind),
    #[error("ground truth is zero at pixel {index}")]
    ZeroGroundTruth { index: usize },
    #[error("no ordinal pairs given")]
    NoPairs,
    #[error("ordinal pair pixel ({x}, {y}) is outside the image or invalid")]
    PairOutOfBounds { x: usize, y: usize },
    #[error("UTSS distortion has a pole: denominator {denominator} at pixel {index}")]
    DistortionPole { index: usize, denominator: f64 },
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
