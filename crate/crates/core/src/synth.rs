//! Procedural stand-ins for classic test photographs.
//!
//! [`smooth_scene`] resembles a portrait-style image: soft gradients, a few
//! large shapes with slightly blurred edges, and a little sensor noise.
//! [`textured_scene`] resembles fur or foliage: several octaves of value noise
//! dominated by the fine scales.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::raster::RasterImage;

/// Bilinearly interpolated lattice noise with smoothstep easing, in `[-1, 1]`.
struct ValueNoise {
    cells_x: usize,
    cells_y: usize,
    spacing: f64,
    lattice: Vec<f64>,
}

impl ValueNoise {
    fn new(rng: &mut ChaCha8Rng, width: usize, height: usize, spacing: f64) -> Self {
        let cells_x = (width as f64 / spacing).ceil() as usize + 2;
        let cells_y = (height as f64 / spacing).ceil() as usize + 2;
        let lattice = (0..cells_x * cells_y).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Self { cells_x, cells_y, spacing, lattice }
    }

    fn at(&self, row: usize, col: usize) -> f64 {
        let fx = col as f64 / self.spacing;
        let fy = row as f64 / self.spacing;
        let (x0, y0) = (fx.floor() as usize, fy.floor() as usize);
        let ease = |t: f64| t * t * (3.0 - 2.0 * t);
        let (tx, ty) = (ease(fx - x0 as f64), ease(fy - y0 as f64));
        let v = |x: usize, y: usize| self.lattice[y.min(self.cells_y - 1) * self.cells_x + x.min(self.cells_x - 1)];
        let top = v(x0, y0) * (1.0 - tx) + v(x0 + 1, y0) * tx;
        let bottom = v(x0, y0 + 1) * (1.0 - tx) + v(x0 + 1, y0 + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

struct Blob {
    cy: f64,
    cx: f64,
    ry: f64,
    rx: f64,
    level: [f64; 3],
}

/// Smooth, portrait-like content. `channels` is 1 or 3.
pub fn smooth_scene(width: usize, height: usize, channels: usize, seed: u64) -> Result<RasterImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width as f64, height as f64);
    let base: [f64; 3] = [rng.gen_range(90.0..130.0), rng.gen_range(70.0..110.0), rng.gen_range(60.0..100.0)];
    let grad = (rng.gen_range(-60.0..60.0), rng.gen_range(-60.0..60.0));
    let blobs: Vec<Blob> = (0..6)
        .map(|_| Blob {
            cy: rng.gen_range(0.0..h),
            cx: rng.gen_range(0.0..w),
            ry: rng.gen_range(0.08..0.3) * h,
            rx: rng.gen_range(0.08..0.3) * w,
            level: [rng.gen_range(-70.0..70.0), rng.gen_range(-70.0..70.0), rng.gen_range(-70.0..70.0)],
        })
        .collect();
    let shading = ValueNoise::new(&mut rng, width, height, (w.max(h) / 6.0).max(4.0));
    let detail = ValueNoise::new(&mut rng, width, height, 12.0);
    let grain = ValueNoise::new(&mut rng, width, height, 4.0);

    let plane = width * height;
    let mut samples = vec![0u8; plane * channels];
    for r in 0..height {
        for c in 0..width {
            let mut v = [0.0; 3];
            let g = grad.0 * (r as f64 / h - 0.5) + grad.1 * (c as f64 / w - 0.5);
            let s = 25.0 * shading.at(r, c) + 12.0 * detail.at(r, c) + 6.0 * grain.at(r, c);
            for (ch, out) in v.iter_mut().enumerate() {
                *out = base[ch] + g + s;
            }
            for b in &blobs {
                let d = (((r as f64 - b.cy) / b.ry).powi(2) + ((c as f64 - b.cx) / b.rx).powi(2)).sqrt();
                // logistic edge about 3 px wide
                let edge = 1.0 / (1.0 + ((d - 1.0) * b.rx.min(b.ry) / 1.5).exp());
                for (ch, out) in v.iter_mut().enumerate() {
                    *out += b.level[ch] * edge;
                }
            }
            let noise = 2.0 * gaussian(&mut rng);
            for ch in 0..channels {
                samples[ch * plane + r * width + c] = to_u8(v[ch] + noise);
            }
        }
    }
    RasterImage::from_planes(width, height, channels, samples)
}

/// Fine-grained, high-variance texture. `channels` is 1 or 3.
pub fn textured_scene(width: usize, height: usize, channels: usize, seed: u64) -> Result<RasterImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let octaves: Vec<(ValueNoise, f64)> = [(48.0, 30.0), (16.0, 25.0), (6.0, 30.0), (3.0, 35.0), (1.5, 35.0)]
        .into_iter()
        .map(|(spacing, amp)| (ValueNoise::new(&mut rng, width, height, spacing), amp))
        .collect();
    let tint: Vec<(f64, f64)> = (0..3).map(|_| (rng.gen_range(100.0..150.0), rng.gen_range(0.7..1.2))).collect();
    let plane = width * height;
    let mut samples = vec![0u8; plane * channels];
    for r in 0..height {
        for c in 0..width {
            let v: f64 = octaves.iter().map(|(n, a)| a * n.at(r, c)).sum();
            for ch in 0..channels {
                let (offset, gain) = tint[ch];
                samples[ch * plane + r * width + c] = to_u8(offset + gain * v);
            }
        }
    }
    RasterImage::from_planes(width, height, channels, samples)
}
