//! Image inpainting by block-wise ordinary Kriging.
//!
//! Damaged pixels, given by a [`DamageMask`], are predicted tile by tile: a
//! semivariogram is estimated from the known pixels around each tile, a
//! spherical model is fitted to it, and every damaged pixel is kriged from its
//! nearest known neighbours. Known pixels are never modified.
//!
//! ```
//! use kriging_inpaint::{inpaint, DamageMask, InpaintConfig, RasterImage};
//!
//! let image = RasterImage::from_fn(32, 32, |r, c| (r * 4 + c * 3) as u8).unwrap();
//! let mask = DamageMask::from_fn(32, 32, |r, c| r == c);
//! let (restored, report) = inpaint(&image, &mask, &InpaintConfig::default()).unwrap();
//! assert_eq!(report.pixels_filled, 32);
//! assert_eq!(restored.get(0, 0, 1), image.get(0, 0, 1));
//! ```

pub mod error;
pub mod inpaint;
pub mod kriging;
pub mod linalg;
pub mod maskgen;
pub mod metrics;
pub mod raster;
pub mod samples;
pub mod synth;
pub mod variogram;

pub use error::{Error, Result};
pub use inpaint::{block_variogram, fill_block, inpaint, onion_peel_fallback, select_neighborhood, InpaintConfig, InpaintReport};
pub use kriging::{assemble_system, krige, predict, solve_weights, KrigingSolution, KrigingSystem, KrigingWeights};
pub use maskgen::{generate_mask, mask_stats, MaskCategory, MaskSpec, MaskStats};
pub use metrics::{masked_psnr, mse, psnr, Psnr, QualityScore};
pub use raster::{apply_mask, tile_blocks, validate_pair, BlockRegion, DamageMask, PixelSample, RasterImage};
pub use variogram::{empirical_variogram, fit_model, model_gamma, EmpiricalVariogram, ModelFamily, VariogramModel};
