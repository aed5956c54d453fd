use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: image is {image_w}x{image_h}, mask is {mask_w}x{mask_h}")]
    DimensionMismatch {
        image_w: usize,
        image_h: usize,
        mask_w: usize,
        mask_h: usize,
    },
    #[error("shape mismatch: {0:?} vs {1:?} (width, height, channels)")]
    ShapeMismatch((usize, usize, usize), (usize, usize, usize)),
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("every pixel is masked; nothing to interpolate from")]
    FullyMasked,
    #[error("empty mask")]
    EmptyMask,
    #[error("variogram needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("no sample pair within max lag {0}")]
    NoPairs(f64),
    #[error("duplicate sample position ({0}, {1})")]
    DuplicatePosition(usize, usize),
    #[error("length mismatch: {0} weights vs {1} values")]
    LengthMismatch(usize, usize),
    #[error("image too small for mask generation: {0}x{1} (minimum 16x16)")]
    TooSmall(usize, usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
