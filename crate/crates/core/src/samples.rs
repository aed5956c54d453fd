//! A small reference patch (8 rows x 9 columns) cut from the Lena test image,
//! and a copy of it with a diagonal scratch zeroed out.

use crate::raster::{DamageMask, RasterImage};

pub const LENA_PATCH: [[u8; 9]; 8] = [
    [123, 124, 125, 115, 119, 113, 121, 125, 124],
    [123, 122, 125, 120, 121, 122, 125, 123, 124],
    [121, 122, 124, 126, 122, 120, 127, 124, 121],
    [121, 122, 120, 124, 121, 123, 125, 126, 128],
    [121, 123, 122, 123, 121, 125, 133, 122, 123],
    [122, 118, 126, 127, 123, 124, 121, 125, 125],
    [123, 120, 121, 129, 119, 125, 123, 126, 129],
    [125, 123, 118, 121, 122, 122, 123, 133, 128],
];

/// [`LENA_PATCH`] with the scratched pixels set to 0.
pub const LENA_PATCH_DAMAGED: [[u8; 9]; 8] = [
    [123, 124, 125, 115, 119, 113, 121, 125, 124],
    [0, 122, 125, 120, 121, 122, 125, 0, 0],
    [0, 122, 124, 126, 0, 0, 0, 124, 121],
    [121, 0, 0, 0, 121, 123, 125, 126, 128],
    [0, 0, 122, 123, 121, 125, 133, 122, 123],
    [122, 118, 0, 127, 123, 124, 121, 125, 125],
    [123, 120, 0, 129, 119, 125, 123, 126, 129],
    [125, 123, 118, 0, 122, 122, 123, 133, 128],
];

pub fn lena_patch() -> RasterImage {
    RasterImage::from_fn(9, 8, |r, c| LENA_PATCH[r][c]).expect("static patch")
}

/// The scratch: every zero of [`LENA_PATCH_DAMAGED`] (the clean patch has none).
pub fn lena_patch_scratch() -> DamageMask {
    DamageMask::from_fn(9, 8, |r, c| LENA_PATCH_DAMAGED[r][c] == 0)
}
