use std::path::Path;

use image::{DynamicImage, ExtendedColorType};
use kriging_inpaint::{DamageMask, RasterImage};

use crate::{CliError, CliResult};

fn open(path: &Path) -> CliResult<DynamicImage> {
    image::open(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

/// Loads an 8-bit image as grayscale or RGB. Alpha is discarded.
pub fn load_image(path: &Path) -> CliResult<RasterImage> {
    let img = open(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let raster = if img.color().has_color() {
        RasterImage::from_interleaved(w, h, 3, img.to_rgb8().as_raw())
    } else {
        RasterImage::from_interleaved(w, h, 1, img.to_luma8().as_raw())
    };
    raster.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Loads a mask image; any nonzero luma marks a damaged pixel.
pub fn load_mask(path: &Path) -> CliResult<DamageMask> {
    let luma = open(path)?.to_luma8();
    let (w, h) = (luma.width() as usize, luma.height() as usize);
    DamageMask::new(w, h, luma.as_raw().iter().map(|&v| v != 0).collect())
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn save_image(image: &RasterImage, path: &Path) -> CliResult<()> {
    let color = if image.channels() == 3 { ExtendedColorType::Rgb8 } else { ExtendedColorType::L8 };
    image::save_buffer_with_format(
        path,
        &image.to_interleaved(),
        image.width() as u32,
        image.height() as u32,
        color,
        image::ImageFormat::Png,
    )
    .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Writes a mask as a single-channel PNG, 255 for damaged pixels.
pub fn save_mask(mask: &DamageMask, path: &Path) -> CliResult<()> {
    let data: Vec<u8> = mask.flags().iter().map(|&f| if f { 255 } else { 0 }).collect();
    let raster = RasterImage::from_planes(mask.width(), mask.height(), 1, data).expect("mask dimensions are valid");
    save_image(&raster, path)
}
