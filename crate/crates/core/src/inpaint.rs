//! Block-wise inpainting driver.
//!
//! The image is tiled into `k x k` cores. Every tile whose core holds damaged
//! pixels fits one variogram per channel from the known pixels of its core
//! plus margin, then kriges each damaged pixel from its nearest known
//! neighbours in that window. Predictions within a tile never feed each other.
//! Tiles whose window holds no known pixel at all are left to the onion-peel
//! pass, which fills from the damage boundary inwards one ring at a time.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kriging::{assemble_system, predict, solve_weights};
use crate::raster::{check_dims, tile_blocks, BlockRegion, DamageMask, PixelSample, RasterImage};
use crate::variogram::{empirical_variogram, fit_model, EmpiricalVariogram, VariogramModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InpaintConfig {
    pub block_size: usize,
    pub margin: usize,
    pub max_neighbors: usize,
    pub bin_width: f64,
    /// Worker threads for tile processing; 0 uses the global rayon pool.
    pub workers: usize,
}

impl Default for InpaintConfig {
    fn default() -> Self {
        Self { block_size: 8, margin: 4, max_neighbors: 64, bin_width: 1.0, workers: 0 }
    }
}

impl InpaintConfig {
    pub fn validate(&self) -> Result<()> {
        if self.block_size < 2 {
            return Err(Error::InvalidParameter(format!("block size must be at least 2, got {}", self.block_size)));
        }
        if self.max_neighbors < 1 {
            return Err(Error::InvalidParameter("max_neighbors must be at least 1".into()));
        }
        if !(self.bin_width > 0.0) {
            return Err(Error::InvalidParameter(format!("bin width must be positive, got {}", self.bin_width)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockStats {
    pub origin: (usize, usize),
    /// Damaged pixels filled by this tile.
    pub filled: usize,
    /// Mean Kriging variance over the tile's predictions, all channels.
    pub mean_variance: f64,
    /// Fitted model per channel.
    pub models: Vec<VariogramModel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InpaintReport {
    pub blocks_total: usize,
    pub blocks_inpainted: usize,
    pub pixels_filled: usize,
    /// Solves (pixel x channel) that fell back to inverse-distance weights.
    pub degraded_solves: usize,
    /// Pixels filled by the onion-peel pass rather than by their own tile.
    pub onion_peel_pixels: usize,
    pub onion_peel_rings: usize,
    pub blocks: Vec<BlockStats>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilledPixel {
    pub row: usize,
    pub col: usize,
    pub channel: usize,
    /// Rounded and clamped prediction.
    pub value: u8,
    /// Raw Kriging estimate.
    pub estimate: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockFill {
    pub pixels: Vec<FilledPixel>,
    pub stats: BlockStats,
    pub degraded: usize,
}

/// Rounds half-to-even and clamps into the 8-bit range.
pub fn quantize(estimate: f64) -> u8 {
    if estimate.is_nan() {
        return 0;
    }
    estimate.round_ties_even().clamp(0.0, 255.0) as u8
}

/// Known pixels of one channel inside the tile window, in row-major order.
fn window_samples(block: &BlockRegion, image: &RasterImage, channel: usize, known: &[bool]) -> Vec<PixelSample> {
    let w = image.width();
    let plane = image.plane(channel);
    let mut out = Vec::new();
    for r in block.context_rows() {
        for c in block.context_cols() {
            if known[r * w + c] {
                out.push(PixelSample::new(r, c, plane[r * w + c] as f64));
            }
        }
    }
    out
}

/// Variogram model for a tile window. Windows with too little data get the
/// flat constant-field model.
pub fn window_model(block: &BlockRegion, samples: &[PixelSample], bin_width: f64) -> VariogramModel {
    let max_lag = block.context_diagonal().max(1.0);
    match empirical_variogram(samples, max_lag, bin_width) {
        Ok(ev) => fit_model(&ev),
        Err(_) => VariogramModel::constant_field(max_lag),
    }
}

/// The empirical variogram and fitted model the engine uses for one channel
/// of `block`. The empirical part is `None` when the window has fewer than two
/// known pixels or no pair within the max lag.
pub fn block_variogram(
    block: &BlockRegion,
    image: &RasterImage,
    channel: usize,
    mask: &DamageMask,
    bin_width: f64,
) -> Result<(Option<EmpiricalVariogram>, VariogramModel, usize)> {
    check_dims(image, mask)?;
    let known: Vec<bool> = mask.flags().iter().map(|&f| !f).collect();
    let samples = window_samples(block, image, channel, &known);
    let max_lag = block.context_diagonal().max(1.0);
    let empirical = empirical_variogram(&samples, max_lag, bin_width).ok();
    Ok((empirical, window_model(block, &samples, bin_width), samples.len()))
}

/// The `max_neighbors` samples nearest to `target`, ties broken row-major.
fn nearest(samples: &[PixelSample], target: (usize, usize), max_neighbors: usize) -> Vec<PixelSample> {
    let d2 = |p: &PixelSample| {
        let dr = p.row.abs_diff(target.0);
        let dc = p.col.abs_diff(target.1);
        dr * dr + dc * dc
    };
    let mut keyed: Vec<(usize, usize, usize, PixelSample)> = samples.iter().map(|p| (d2(p), p.row, p.col, *p)).collect();
    let key = |a: &(usize, usize, usize, PixelSample)| (a.0, a.1, a.2);
    if keyed.len() > max_neighbors {
        keyed.select_nth_unstable_by_key(max_neighbors - 1, key);
        keyed.truncate(max_neighbors);
    }
    keyed.sort_unstable_by_key(key);
    keyed.into_iter().map(|k| k.3).collect()
}

/// Known pixels of the tile window (core plus margin) of one channel, nearest
/// first, at most `max_neighbors` of them.
pub fn select_neighborhood(
    block: &BlockRegion,
    image: &RasterImage,
    channel: usize,
    mask: &DamageMask,
    target: (usize, usize),
    max_neighbors: usize,
) -> Result<Vec<PixelSample>> {
    check_dims(image, mask)?;
    if !block.core_contains(target.0, target.1) {
        return Err(Error::InvalidParameter(format!("target {target:?} is outside block at {:?}", block.origin)));
    }
    let known: Vec<bool> = mask.flags().iter().map(|&f| !f).collect();
    Ok(nearest(&window_samples(block, image, channel, &known), target, max_neighbors))
}

/// Kriges one damaged pixel against the supplied window samples.
fn solve_pixel(samples: &[PixelSample], model: &VariogramModel, target: (usize, usize), max_neighbors: usize) -> (f64, f64, bool) {
    let hood = nearest(samples, target, max_neighbors);
    let system = assemble_system(&hood, target, model).expect("window samples have distinct positions");
    let weights = solve_weights(&system);
    let values: Vec<f64> = hood.iter().map(|p| p.value).collect();
    let (estimate, variance) = predict(&weights, &values).expect("lengths agree");
    (estimate, variance, weights.degraded)
}

/// Fills the damaged core pixels of one tile from the known pixels of its window.
/// Returns `None` when the window holds no known pixel.
fn fill_block_known(block: &BlockRegion, image: &RasterImage, known: &[bool], targets: &[(usize, usize)], config: &InpaintConfig) -> Option<BlockFill> {
    let mut pixels = Vec::with_capacity(targets.len() * image.channels());
    let mut models = Vec::with_capacity(image.channels());
    let mut degraded = 0;
    for channel in 0..image.channels() {
        let samples = window_samples(block, image, channel, known);
        if samples.is_empty() {
            return None;
        }
        let model = window_model(block, &samples, config.bin_width);
        for &(row, col) in targets {
            let (estimate, variance, deg) = solve_pixel(&samples, &model, (row, col), config.max_neighbors);
            degraded += deg as usize;
            pixels.push(FilledPixel { row, col, channel, value: quantize(estimate), estimate, variance });
        }
        models.push(model);
    }
    let mean_variance = if pixels.is_empty() { 0.0 } else { pixels.iter().map(|p| p.variance).sum::<f64>() / pixels.len() as f64 };
    Some(BlockFill { stats: BlockStats { origin: block.origin, filled: targets.len(), mean_variance, models }, pixels, degraded })
}

/// Predicts every damaged pixel in the core of `block`.
///
/// Returns `Ok(None)` when neither the core nor the margin holds a known
/// pixel; such tiles have to go through [`onion_peel_fallback`].
pub fn fill_block(block: &BlockRegion, image: &RasterImage, mask: &DamageMask, config: &InpaintConfig) -> Result<Option<BlockFill>> {
    check_dims(image, mask)?;
    config.validate()?;
    let known: Vec<bool> = mask.flags().iter().map(|&f| !f).collect();
    let targets = damaged_in_core(block, mask);
    Ok(fill_block_known(block, image, &known, &targets, config))
}

fn damaged_in_core(block: &BlockRegion, mask: &DamageMask) -> Vec<(usize, usize)> {
    block
        .core_rows_range()
        .flat_map(|r| block.core_cols_range().map(move |c| (r, c)))
        .filter(|&(r, c)| mask.is_damaged(r, c))
        .collect()
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PeelStats {
    pub rings: usize,
    pub pixels: usize,
    pub degraded: usize,
}

/// Fills `mask` from its boundary inwards. Each ring is the set of damaged
/// pixels with at least one known 8-neighbour; its pixels are kriged from the
/// pixels known before the ring started and then become known themselves.
pub fn onion_peel_fallback(image: &RasterImage, mask: &DamageMask, config: &InpaintConfig) -> Result<(RasterImage, PeelStats)> {
    check_dims(image, mask)?;
    config.validate()?;
    let (w, h) = (image.width(), image.height());
    let mut out = image.clone();
    let mut known: Vec<bool> = mask.flags().iter().map(|&f| !f).collect();
    let mut remaining = mask.count();
    if remaining == 0 {
        return Ok((out, PeelStats::default()));
    }
    if remaining == w * h {
        return Err(Error::FullyMasked);
    }
    let blocks = tile_blocks(w, h, config.block_size, config.margin)?;
    let per_row = w.div_ceil(config.block_size);
    let mut stats = PeelStats::default();

    while remaining > 0 {
        let ring: Vec<(usize, usize)> = (0..h)
            .flat_map(|r| (0..w).map(move |c| (r, c)))
            .filter(|&(r, c)| !known[r * w + c] && has_known_neighbor(&known, w, h, r, c))
            .collect();
        if ring.is_empty() {
            return Err(Error::FullyMasked);
        }

        let snapshot = &out;
        let known_now = &known;
        let mut models: HashMap<(usize, usize), (Vec<PixelSample>, VariogramModel)> = HashMap::new();
        let predictions: Vec<Vec<(f64, bool)>> = ring
            .iter()
            .map(|&(r, c)| {
                let bi = (r / config.block_size) * per_row + c / config.block_size;
                let block = &blocks[bi];
                (0..image.channels())
                    .map(|ch| {
                        let (samples, model) = models.entry((bi, ch)).or_insert_with(|| {
                            let s = window_samples(block, snapshot, ch, known_now);
                            let m = window_model(block, &s, config.bin_width);
                            (s, m)
                        });
                        if samples.is_empty() {
                            // the known neighbour sits outside this tile's window
                            let local = neighbor_samples(snapshot, ch, known_now, r, c);
                            let (e, _, d) = solve_pixel(&local, &VariogramModel::constant_field(1.5), (r, c), config.max_neighbors);
                            (e, d)
                        } else {
                            let (e, _, d) = solve_pixel(samples, model, (r, c), config.max_neighbors);
                            (e, d)
                        }
                    })
                    .collect()
            })
            .collect();

        for (&(r, c), preds) in ring.iter().zip(&predictions) {
            for (ch, &(estimate, degraded)) in preds.iter().enumerate() {
                out.set(ch, r, c, quantize(estimate));
                stats.degraded += degraded as usize;
            }
        }
        for &(r, c) in &ring {
            known[r * w + c] = true;
        }
        remaining -= ring.len();
        stats.pixels += ring.len();
        stats.rings += 1;
    }
    Ok((out, stats))
}

fn neighbors8(w: usize, h: usize, r: usize, c: usize) -> impl Iterator<Item = (usize, usize)> {
    (r.saturating_sub(1)..=(r + 1).min(h - 1))
        .flat_map(move |rr| (c.saturating_sub(1)..=(c + 1).min(w - 1)).map(move |cc| (rr, cc)))
        .filter(move |&p| p != (r, c))
}

fn has_known_neighbor(known: &[bool], w: usize, h: usize, r: usize, c: usize) -> bool {
    neighbors8(w, h, r, c).any(|(rr, cc)| known[rr * w + cc])
}

fn neighbor_samples(image: &RasterImage, channel: usize, known: &[bool], r: usize, c: usize) -> Vec<PixelSample> {
    let w = image.width();
    neighbors8(w, image.height(), r, c)
        .filter(|&(rr, cc)| known[rr * w + cc])
        .map(|(rr, cc)| PixelSample::new(rr, cc, image.get(channel, rr, cc) as f64))
        .collect()
}

/// Restores every damaged pixel of `image`. Undamaged samples are copied
/// through untouched, and the result does not depend on the worker count.
pub fn inpaint(image: &RasterImage, mask: &DamageMask, config: &InpaintConfig) -> Result<(RasterImage, InpaintReport)> {
    check_dims(image, mask)?;
    config.validate()?;
    let (w, h) = (image.width(), image.height());
    let damaged = mask.count();
    if damaged == w * h {
        return Err(Error::FullyMasked);
    }
    let blocks = tile_blocks(w, h, config.block_size, config.margin)?;
    let mut report = InpaintReport {
        blocks_total: blocks.len(),
        blocks_inpainted: 0,
        pixels_filled: 0,
        degraded_solves: 0,
        onion_peel_pixels: 0,
        onion_peel_rings: 0,
        blocks: Vec::new(),
    };
    if damaged == 0 {
        return Ok((image.clone(), report));
    }

    let known: Vec<bool> = mask.flags().iter().map(|&f| !f).collect();
    let work: Vec<(&BlockRegion, Vec<(usize, usize)>)> = blocks
        .iter()
        .map(|b| (b, damaged_in_core(b, mask)))
        .filter(|(_, t)| !t.is_empty())
        .collect();
    let fills: Vec<Option<BlockFill>> = with_pool(config.workers, || {
        work.par_iter().map(|(b, targets)| fill_block_known(b, image, &known, targets, config)).collect()
    });

    let mut out = image.clone();
    let mut leftover = DamageMask::empty(w, h);
    for ((_, targets), fill) in work.iter().zip(fills) {
        match fill {
            Some(fill) => {
                for p in &fill.pixels {
                    out.set(p.channel, p.row, p.col, p.value);
                }
                report.blocks_inpainted += 1;
                report.pixels_filled += fill.stats.filled;
                report.degraded_solves += fill.degraded;
                report.blocks.push(fill.stats);
            }
            None => {
                for &(r, c) in targets {
                    leftover.set(r, c, true);
                }
            }
        }
    }

    if !leftover.is_empty() {
        let (peeled, stats) = onion_peel_fallback(&out, &leftover, config)?;
        out = peeled;
        report.pixels_filled += stats.pixels;
        report.degraded_solves += stats.degraded;
        report.onion_peel_pixels = stats.pixels;
        report.onion_peel_rings = stats.rings;
    }
    Ok((out, report))
}
