//! Image, mask and block data model.
//!
//! Images are stored planar: each channel is a full row-major plane of
//! `width * height` samples. A [`DamageMask`] is a separate binary raster and
//! applies to every channel alike.

use crate::error::{Error, Result};

/// 8-bit raster with 1 or 3 channels, stored as one row-major plane per channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<u8>,
}

impl RasterImage {
    /// Builds an image from planar samples (all of channel 0, then channel 1, ...).
    pub fn from_planes(width: usize, height: usize, channels: usize, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!("empty dimensions {width}x{height}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!("unsupported channel count {channels}")));
        }
        if samples.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "expected {} samples, got {}",
                width * height * channels,
                samples.len()
            )));
        }
        Ok(Self { width, height, channels, samples })
    }

    /// Builds an image from pixel-interleaved samples (RGBRGB... for color).
    pub fn from_interleaved(width: usize, height: usize, channels: usize, data: &[u8]) -> Result<Self> {
        if data.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "expected {} samples, got {}",
                width * height * channels,
                data.len()
            )));
        }
        let plane = width * height;
        let mut samples = vec![0u8; data.len()];
        for (i, px) in data.chunks_exact(channels.max(1)).enumerate() {
            for (c, &v) in px.iter().enumerate() {
                samples[c * plane + i] = v;
            }
        }
        Self::from_planes(width, height, channels, samples)
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        Self::from_planes(width, height, channels, vec![value; width * height * channels])
    }

    /// Single-channel image from a closure over `(row, col)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                samples.push(f(r, c));
            }
        }
        Self::from_planes(width, height, 1, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// `(width, height, channels)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn plane(&self, channel: usize) -> &[u8] {
        let n = self.width * self.height;
        &self.samples[channel * n..(channel + 1) * n]
    }

    pub fn plane_mut(&mut self, channel: usize) -> &mut [u8] {
        let n = self.width * self.height;
        &mut self.samples[channel * n..(channel + 1) * n]
    }

    pub fn get(&self, channel: usize, row: usize, col: usize) -> u8 {
        self.samples[channel * self.width * self.height + row * self.width + col]
    }

    pub fn set(&mut self, channel: usize, row: usize, col: usize, value: u8) {
        let idx = channel * self.width * self.height + row * self.width + col;
        self.samples[idx] = value;
    }

    /// Pixel-interleaved copy of the samples, the layout image codecs expect.
    pub fn to_interleaved(&self) -> Vec<u8> {
        let plane = self.width * self.height;
        let mut out = vec![0u8; self.samples.len()];
        for c in 0..self.channels {
            for i in 0..plane {
                out[i * self.channels + c] = self.samples[c * plane + i];
            }
        }
        out
    }
}

/// Binary raster; `true` marks a damaged (unknown) pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DamageMask {
    width: usize,
    height: usize,
    flags: Vec<bool>,
}

impl DamageMask {
    pub fn new(width: usize, height: usize, flags: Vec<bool>) -> Result<Self> {
        if flags.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "mask expects {} flags, got {}",
                width * height,
                flags.len()
            )));
        }
        Ok(Self { width, height, flags })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self { width, height, flags: vec![false; width * height] }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self { width, height, flags: vec![true; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut flags = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                flags.push(f(r, c));
            }
        }
        Self { width, height, flags }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn is_damaged(&self, row: usize, col: usize) -> bool {
        self.flags[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, damaged: bool) {
        self.flags[row * self.width + col] = damaged;
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.flags.iter().any(|&f| f)
    }

    /// True when every flag of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &DamageMask) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.flags.iter().zip(&other.flags).all(|(&a, &b)| !a || b)
    }
}

/// A known pixel used as Kriging input. Positions are absolute image coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelSample {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl PixelSample {
    pub fn new(row: usize, col: usize, value: f64) -> Self {
        Self { row, col, value }
    }

    pub fn distance_to(&self, row: usize, col: usize) -> f64 {
        distance((self.row, self.col), (row, col))
    }
}

pub(crate) fn distance(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dr = a.0 as f64 - b.0 as f64;
    let dc = a.1 as f64 - b.1 as f64;
    (dr * dr + dc * dc).sqrt()
}

/// One tile of the image: a core region that the tile is responsible for
/// filling, plus a context margin clipped at the image border.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRegion {
    /// `(row, col)` of the core's top-left pixel.
    pub origin: (usize, usize),
    pub core_rows: usize,
    pub core_cols: usize,
    pub margin: usize,
    image_width: usize,
    image_height: usize,
}

impl BlockRegion {
    pub fn new(origin: (usize, usize), core_rows: usize, core_cols: usize, margin: usize, image_width: usize, image_height: usize) -> Self {
        Self { origin, core_rows, core_cols, margin, image_width, image_height }
    }

    /// Half-open row range of the core.
    pub fn core_rows_range(&self) -> std::ops::Range<usize> {
        self.origin.0..self.origin.0 + self.core_rows
    }

    pub fn core_cols_range(&self) -> std::ops::Range<usize> {
        self.origin.1..self.origin.1 + self.core_cols
    }

    /// Half-open row range of core plus margin, clipped to the image.
    pub fn context_rows(&self) -> std::ops::Range<usize> {
        self.origin.0.saturating_sub(self.margin)..(self.origin.0 + self.core_rows + self.margin).min(self.image_height)
    }

    pub fn context_cols(&self) -> std::ops::Range<usize> {
        self.origin.1.saturating_sub(self.margin)..(self.origin.1 + self.core_cols + self.margin).min(self.image_width)
    }

    pub fn core_contains(&self, row: usize, col: usize) -> bool {
        self.core_rows_range().contains(&row) && self.core_cols_range().contains(&col)
    }

    pub fn context_contains(&self, row: usize, col: usize) -> bool {
        self.context_rows().contains(&row) && self.context_cols().contains(&col)
    }

    /// Diagonal length of the context window, used as the default max lag.
    pub fn context_diagonal(&self) -> f64 {
        let r = self.context_rows().len().saturating_sub(1) as f64;
        let c = self.context_cols().len().saturating_sub(1) as f64;
        (r * r + c * c).sqrt()
    }
}

/// Partitions a `width x height` image into `k x k` cores in row-major order.
/// Edge tiles keep whatever remains rather than being padded.
pub fn tile_blocks(width: usize, height: usize, k: usize, margin: usize) -> Result<Vec<BlockRegion>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("block size must be at least 2, got {k}")));
    }
    let mut blocks = Vec::with_capacity(width.div_ceil(k) * height.div_ceil(k));
    for r in (0..height).step_by(k) {
        for c in (0..width).step_by(k) {
            blocks.push(BlockRegion::new((r, c), k.min(height - r), k.min(width - c), margin, width, height));
        }
    }
    Ok(blocks)
}

/// Renders a damaged copy: flagged pixels get `sentinel` in every channel.
pub fn apply_mask(image: &RasterImage, mask: &DamageMask, sentinel: u8) -> Result<RasterImage> {
    check_dims(image, mask)?;
    let mut out = image.clone();
    let plane = image.width * image.height;
    for c in 0..image.channels {
        for (i, _) in mask.flags.iter().enumerate().filter(|(_, &f)| f) {
            out.samples[c * plane + i] = sentinel;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairReport {
    pub damaged: usize,
    pub total: usize,
    pub fraction: f64,
}

/// Checks that `mask` fits `image` and reports how much of it is damaged.
pub fn validate_pair(image: &RasterImage, mask: &DamageMask) -> Result<PairReport> {
    check_dims(image, mask)?;
    let damaged = mask.count();
    let total = mask.flags.len();
    Ok(PairReport { damaged, total, fraction: damaged as f64 / total as f64 })
}

pub(crate) fn check_dims(image: &RasterImage, mask: &DamageMask) -> Result<()> {
    if image.width != mask.width || image.height != mask.height {
        return Err(Error::DimensionMismatch {
            image_w: image.width,
            image_h: image.height,
            mask_w: mask.width,
            mask_h: mask.height,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{lena_patch, lena_patch_scratch, LENA_PATCH_DAMAGED};
    use proptest::prelude::*;

    #[test]
    fn single_tile() {
        let blocks = tile_blocks(8, 8, 8, 0).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].origin, (0, 0));
        assert_eq!((blocks[0].core_rows, blocks[0].core_cols), (8, 8));
    }

    #[test]
    fn remainder_tile_is_narrow() {
        let blocks = tile_blocks(9, 8, 8, 0).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!((blocks[0].origin, blocks[0].core_rows, blocks[0].core_cols), ((0, 0), 8, 8));
        assert_eq!((blocks[1].origin, blocks[1].core_rows, blocks[1].core_cols), ((0, 8), 8, 1));
    }

    #[test]
    fn margin_is_clipped() {
        let blocks = tile_blocks(16, 16, 8, 2).unwrap();
        assert_eq!(blocks.len(), 4);
        let b = blocks.iter().find(|b| b.origin == (8, 8)).unwrap();
        assert_eq!(b.context_rows(), 6..16);
        assert_eq!(b.context_cols(), 6..16);
        assert_eq!(blocks[0].context_rows(), 0..10);
    }

    #[test]
    fn rejects_tiny_blocks() {
        assert!(tile_blocks(8, 8, 1, 0).is_err());
    }

    #[test]
    fn masking_the_lena_patch() {
        let damaged = apply_mask(&lena_patch(), &lena_patch_scratch(), 0).unwrap();
        let expected: Vec<u8> = LENA_PATCH_DAMAGED.iter().flatten().copied().collect();
        assert_eq!(damaged.samples(), &expected[..]);
    }

    #[test]
    fn apply_mask_edges() {
        let img = RasterImage::filled(1, 1, 1, 7).unwrap();
        let out = apply_mask(&img, &DamageMask::full(1, 1), 0).unwrap();
        assert_eq!(out.samples(), &[0]);
        let patch = lena_patch();
        assert_eq!(apply_mask(&patch, &DamageMask::empty(9, 8), 0).unwrap(), patch);
    }

    #[test]
    fn validate_reports_counts() {
        let rep = validate_pair(&lena_patch(), &lena_patch_scratch()).unwrap();
        assert_eq!(rep.damaged, 15);
        assert_eq!(rep.total, 72);

        let err = validate_pair(&lena_patch(), &DamageMask::empty(8, 8)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { image_w: 9, image_h: 8, mask_w: 8, mask_h: 8 });
        assert!(err.to_string().contains("9x8") && err.to_string().contains("8x8"));

        let rep = validate_pair(&lena_patch(), &DamageMask::full(9, 8)).unwrap();
        assert_eq!(rep.fraction, 1.0);
    }

    #[test]
    fn interleave_round_trip() {
        let data: Vec<u8> = (0..24).collect();
        let img = RasterImage::from_interleaved(4, 2, 3, &data).unwrap();
        assert_eq!(img.get(1, 0, 0), 1);
        assert_eq!(img.get(2, 1, 3), 23);
        assert_eq!(img.to_interleaved(), data);
    }

    #[test]
    fn rejects_bad_images() {
        assert!(RasterImage::from_planes(0, 4, 1, vec![]).is_err());
        assert!(RasterImage::from_planes(2, 2, 2, vec![0; 8]).is_err());
        assert!(RasterImage::from_planes(2, 2, 1, vec![0; 3]).is_err());
    }

    proptest! {
        #[test]
        fn tiles_partition_the_image(w in 1usize..70, h in 1usize..70, k in 2usize..20, margin in 0usize..6) {
            let blocks = tile_blocks(w, h, k, margin).unwrap();
            let mut hits = vec![0u32; w * h];
            for b in &blocks {
                for r in b.core_rows_range() {
                    for c in b.core_cols_range() {
                        hits[r * w + c] += 1;
                    }
                }
                prop_assert!(b.context_rows().end <= h && b.context_cols().end <= w);
            }
            prop_assert!(hits.iter().all(|&n| n == 1));
            let origins: Vec<_> = blocks.iter().map(|b| b.origin).collect();
            let mut sorted = origins.clone();
            sorted.sort();
            prop_assert_eq!(origins, sorted);
        }

        #[test]
        fn apply_mask_touches_only_flagged(
            (w, h, pixels, flags) in (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
                (Just(w), Just(h), proptest::collection::vec(any::<u8>(), w * h * 3), proptest::collection::vec(any::<bool>(), w * h))
            }),
            sentinel in any::<u8>(),
        ) {
            let img = RasterImage::from_planes(w, h, 3, pixels).unwrap();
            let mask = DamageMask::new(w, h, flags).unwrap();
            let out = apply_mask(&img, &mask, sentinel).unwrap();
            for ch in 0..3 {
                for r in 0..h {
                    for c in 0..w {
                        let expect = if mask.is_damaged(r, c) { sentinel } else { img.get(ch, r, c) };
                        prop_assert_eq!(out.get(ch, r, c), expect);
                    }
                }
            }
            prop_assert_eq!(apply_mask(&img, &DamageMask::empty(w, h), sentinel).unwrap(), img);
        }
    }
}
