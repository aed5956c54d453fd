//! Mean squared error and peak signal-to-noise ratio for 8-bit images.

use std::fmt;

use crate::error::{Error, Result};
use crate::raster::{DamageMask, RasterImage};

pub const PEAK: f64 = 255.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    /// The images are equal, so the ratio is unbounded.
    Identical,
    Db(f64),
}

impl Psnr {
    pub fn from_mse(mse: f64) -> Self {
        if mse == 0.0 {
            Psnr::Identical
        } else {
            Psnr::Db(20.0 * (PEAK / mse.sqrt()).log10())
        }
    }

    pub fn db(&self) -> Option<f64> {
        match self {
            Psnr::Identical => None,
            Psnr::Db(v) => Some(*v),
        }
    }

    /// Orders `Identical` above every finite value.
    pub fn as_f64(&self) -> f64 {
        self.db().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Identical => f.write_str("identical"),
            Psnr::Db(v) => write!(f, "{v:.4}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityScore {
    pub mse: f64,
    pub psnr: Psnr,
}

impl QualityScore {
    pub fn from_mse(mse: f64) -> Self {
        Self { mse, psnr: Psnr::from_mse(mse) }
    }
}

fn check_shapes(f: &RasterImage, g: &RasterImage) -> Result<()> {
    if f.shape() != g.shape() {
        return Err(Error::ShapeMismatch(f.shape(), g.shape()));
    }
    Ok(())
}

/// Mean squared difference over every sample of every channel.
pub fn mse(f: &RasterImage, g: &RasterImage) -> Result<f64> {
    check_shapes(f, g)?;
    let sum: u64 = f
        .samples()
        .iter()
        .zip(g.samples())
        .map(|(&a, &b)| {
            let d = a.abs_diff(b) as u64;
            d * d
        })
        .sum();
    Ok(sum as f64 / f.samples().len() as f64)
}

pub fn psnr(f: &RasterImage, g: &RasterImage) -> Result<Psnr> {
    Ok(Psnr::from_mse(mse(f, g)?))
}

pub fn score(f: &RasterImage, g: &RasterImage) -> Result<QualityScore> {
    Ok(QualityScore::from_mse(mse(f, g)?))
}

/// MSE restricted to the flagged pixels (all channels).
pub fn masked_mse(f: &RasterImage, g: &RasterImage, mask: &DamageMask) -> Result<f64> {
    check_shapes(f, g)?;
    crate::raster::check_dims(f, mask)?;
    let n = mask.count();
    if n == 0 {
        return Err(Error::EmptyMask);
    }
    let mut sum = 0u64;
    for ch in 0..f.channels() {
        for ((&a, &b), &flag) in f.plane(ch).iter().zip(g.plane(ch)).zip(mask.flags()) {
            if flag {
                let d = a.abs_diff(b) as u64;
                sum += d * d;
            }
        }
    }
    Ok(sum as f64 / (n * f.channels()) as f64)
}

pub fn masked_psnr(f: &RasterImage, g: &RasterImage, mask: &DamageMask) -> Result<Psnr> {
    Ok(Psnr::from_mse(masked_mse(f, g, mask)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gray(w: usize, h: usize, v: Vec<u8>) -> RasterImage {
        RasterImage::from_planes(w, h, 1, v).unwrap()
    }

    #[test]
    fn small_fixtures() {
        let f = gray(2, 2, vec![10, 20, 30, 40]);
        let g = gray(2, 2, vec![10, 22, 30, 40]);
        assert_eq!(mse(&f, &f).unwrap(), 0.0);
        assert_eq!(mse(&f, &g).unwrap(), 1.0);
        let p = psnr(&f, &g).unwrap().db().unwrap();
        assert!((p - 48.1308).abs() < 1e-3, "{p}");
        assert_eq!(psnr(&f, &f).unwrap(), Psnr::Identical);
        assert_eq!(psnr(&f, &f).unwrap().to_string(), "identical");

        let black = gray(3, 3, vec![0; 9]);
        let white = gray(3, 3, vec![255; 9]);
        assert_eq!(mse(&black, &white).unwrap(), 65025.0);
        assert_eq!(psnr(&black, &white).unwrap(), Psnr::Db(0.0));
    }

    #[test]
    fn naive_loop_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a: Vec<u8> = (0..64 * 64).map(|_| rng.gen()).collect();
        let b: Vec<u8> = (0..64 * 64).map(|_| rng.gen()).collect();
        let (f, g) = (gray(64, 64, a.clone()), gray(64, 64, b.clone()));
        let mut acc = 0.0f64;
        for y in 0..64 {
            for x in 0..64 {
                let d = a[y * 64 + x] as f64 - b[y * 64 + x] as f64;
                acc += d * d;
            }
        }
        assert_eq!(mse(&f, &g).unwrap(), acc / 4096.0);
    }

    #[test]
    fn masked_variants() {
        let f = gray(2, 2, vec![10, 20, 30, 40]);
        let g = gray(2, 2, vec![12, 20, 31, 40]);
        assert_eq!(masked_psnr(&f, &g, &DamageMask::full(2, 2)).unwrap(), psnr(&f, &g).unwrap());
        assert_eq!(masked_psnr(&f, &g, &DamageMask::empty(2, 2)), Err(Error::EmptyMask));

        let h = gray(2, 2, vec![10, 20, 30, 40 - 40]);
        let k = gray(2, 2, vec![10, 20, 30, 255]);
        let one = DamageMask::from_fn(2, 2, |r, c| (r, c) == (1, 1));
        assert_eq!(masked_psnr(&h, &k, &one).unwrap(), Psnr::Db(0.0));
    }

    #[test]
    fn shape_mismatch() {
        let f = gray(2, 2, vec![0; 4]);
        let g = RasterImage::filled(2, 2, 3, 0).unwrap();
        assert_eq!(mse(&f, &g), Err(Error::ShapeMismatch((2, 2, 1), (2, 2, 3))));
    }

    proptest! {
        #[test]
        fn symmetric_and_monotone(
            (a, b) in (proptest::collection::vec(any::<u8>(), 48), proptest::collection::vec(any::<u8>(), 48)),
            idx in 0usize..48,
        ) {
            let f = RasterImage::from_planes(4, 4, 3, a.clone()).unwrap();
            let g = RasterImage::from_planes(4, 4, 3, b.clone()).unwrap();
            prop_assert_eq!(mse(&f, &g).unwrap(), mse(&g, &f).unwrap());
            prop_assert_eq!(psnr(&f, &g).unwrap(), psnr(&g, &f).unwrap());
            prop_assert_eq!(mse(&f, &f).unwrap(), 0.0);

            // widen one gap by one step, away from f
            let mut wider = b.clone();
            if b[idx] >= a[idx] && b[idx] < 255 {
                wider[idx] += 1;
            } else if b[idx] < a[idx] && b[idx] > 0 {
                wider[idx] -= 1;
            } else {
                return Ok(());
            }
            let w = RasterImage::from_planes(4, 4, 3, wider).unwrap();
            prop_assert!(mse(&f, &w).unwrap() > mse(&f, &g).unwrap());
            prop_assert!(psnr(&f, &w).unwrap().as_f64() < psnr(&f, &g).unwrap().as_f64());
        }
    }
}
