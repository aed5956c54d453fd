//! Synthetic damage masks in four escalating categories: thin and thick
//! scratches (random polylines) and light or heavy overlaid text (rows of
//! blocky pseudo-glyphs). Masks are pure functions of category, seed and size.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::raster::DamageMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MaskCategory {
    ThickScratch,
    ThinScratch,
    LowText,
    HeavyText,
}

impl MaskCategory {
    /// Column order used in reports.
    pub const ALL: [MaskCategory; 4] =
        [MaskCategory::ThickScratch, MaskCategory::ThinScratch, MaskCategory::LowText, MaskCategory::HeavyText];

    pub fn name(&self) -> &'static str {
        match self {
            MaskCategory::ThickScratch => "thick_scratch",
            MaskCategory::ThinScratch => "thin_scratch",
            MaskCategory::LowText => "low_text",
            MaskCategory::HeavyText => "heavy_text",
        }
    }

    /// Default coverage target range.
    fn coverage_range(&self) -> (f64, f64) {
        match self {
            MaskCategory::ThinScratch => (0.010, 0.020),
            MaskCategory::ThickScratch => (0.050, 0.090),
            MaskCategory::LowText => (0.025, 0.045),
            MaskCategory::HeavyText => (0.120, 0.180),
        }
    }

    fn salt(&self) -> u64 {
        match self {
            MaskCategory::ThickScratch => 0x7468_6963_6b00_0001,
            MaskCategory::ThinScratch => 0x7468_696e_0000_0002,
            MaskCategory::LowText => 0x6c6f_7700_0000_0003,
            MaskCategory::HeavyText => 0x6865_6176_7900_0004,
        }
    }
}

impl fmt::Display for MaskCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MaskCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MaskCategory::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mask category '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskSpec {
    pub category: MaskCategory,
    pub seed: u64,
    /// Target damaged fraction in `(0, 0.5]`; `None` draws one from the
    /// category's default range.
    pub coverage: Option<f64>,
}

impl MaskSpec {
    pub fn new(category: MaskCategory, seed: u64) -> Self {
        Self { category, seed, coverage: None }
    }
}

/// Incrementally painted mask that tracks its own flag count.
struct Canvas {
    mask: DamageMask,
    count: usize,
}

impl Canvas {
    fn paint(&mut self, row: isize, col: isize) {
        let (w, h) = (self.mask.width() as isize, self.mask.height() as isize);
        if row < 0 || col < 0 || row >= h || col >= w {
            return;
        }
        let (r, c) = (row as usize, col as usize);
        if !self.mask.is_damaged(r, c) {
            self.mask.set(r, c, true);
            self.count += 1;
        }
    }

    fn rect(&mut self, row: isize, col: isize, rows: isize, cols: isize) {
        for r in row..row + rows {
            for c in col..col + cols {
                self.paint(r, c);
            }
        }
    }

    fn coverage(&self) -> f64 {
        self.count as f64 / (self.mask.width() * self.mask.height()) as f64
    }
}

pub fn generate_mask(spec: &MaskSpec, width: usize, height: usize) -> Result<DamageMask> {
    if width < 16 || height < 16 {
        return Err(Error::TooSmall(width, height));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ spec.category.salt());
    let target = match spec.coverage {
        Some(c) if c > 0.0 && c <= 0.5 => c,
        Some(c) => return Err(Error::InvalidParameter(format!("coverage hint {c} outside (0, 0.5]"))),
        None => {
            let (lo, hi) = spec.category.coverage_range();
            rng.gen_range(lo..hi)
        }
    };
    let mut canvas = Canvas { mask: DamageMask::empty(width, height), count: 0 };
    match spec.category {
        MaskCategory::ThinScratch => scratches(&mut canvas, &mut rng, target, 1..=2),
        MaskCategory::ThickScratch => scratches(&mut canvas, &mut rng, target, 4..=8),
        MaskCategory::LowText => text(&mut canvas, &mut rng, target, 6..=9),
        MaskCategory::HeavyText => text(&mut canvas, &mut rng, target, 9..=14),
    }
    Ok(canvas.mask)
}

const MAX_STROKES: usize = 100_000;

fn scratches(canvas: &mut Canvas, rng: &mut ChaCha8Rng, target: f64, widths: std::ops::RangeInclusive<usize>) {
    let (w, h) = (canvas.mask.width() as f64, canvas.mask.height() as f64);
    let span = w.min(h);
    for _ in 0..MAX_STROKES {
        if canvas.coverage() >= target {
            break;
        }
        let width = rng.gen_range(widths.clone()) as isize;
        let mut x = rng.gen_range(0.0..w);
        let mut y = rng.gen_range(0.0..h);
        let mut heading = rng.gen_range(0.0..std::f64::consts::TAU);
        for _ in 0..rng.gen_range(2..=5) {
            heading += rng.gen_range(-0.6..0.6);
            let len = rng.gen_range(0.08..0.25) * span;
            let (nx, ny) = ((x + len * heading.cos()).clamp(0.0, w - 1.0), (y + len * heading.sin()).clamp(0.0, h - 1.0));
            stroke(canvas, (x, y), (nx, ny), width);
            (x, y) = (nx, ny);
            if canvas.coverage() >= target {
                break;
            }
        }
    }
}

/// Stamps a `width x width` square along the segment every quarter pixel.
fn stroke(canvas: &mut Canvas, from: (f64, f64), to: (f64, f64), width: isize) {
    let len = ((to.0 - from.0).powi(2) + (to.1 - from.1).powi(2)).sqrt();
    let steps = (len * 4.0).ceil().max(1.0) as usize;
    let lo = (width - 1) / 2;
    let mut last = None;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let cx = (from.0 + t * (to.0 - from.0)).round() as isize;
        let cy = (from.1 + t * (to.1 - from.1)).round() as isize;
        if last == Some((cx, cy)) {
            continue;
        }
        last = Some((cx, cy));
        canvas.rect(cy - lo, cx - lo, width, width);
    }
}

/// Lines of words built from blocky glyphs of the given heights.
fn text(canvas: &mut Canvas, rng: &mut ChaCha8Rng, target: f64, heights: std::ops::RangeInclusive<usize>) {
    let (w, h) = (canvas.mask.width() as isize, canvas.mask.height() as isize);
    for _ in 0..MAX_STROKES {
        if canvas.coverage() >= target {
            break;
        }
        let gh = rng.gen_range(heights.clone()) as isize;
        let gw = (gh * 3 / 5).max(3);
        let thick = if gh >= 10 { 2 } else { 1 };
        let mut col = rng.gen_range(0..w);
        let row = rng.gen_range(0..h);
        let line_end = (col + rng.gen_range(w / 4..=w)).min(w);
        while col + gw <= line_end && canvas.coverage() < target {
            for _ in 0..rng.gen_range(2..=7) {
                if col + gw > line_end {
                    break;
                }
                glyph(canvas, rng, row, col, gw, gh, thick);
                col += gw + (gw / 3).max(1);
            }
            col += gw;
        }
    }
}

/// One pseudo-glyph: two to four bars picked from the cell's edges and midlines.
fn glyph(canvas: &mut Canvas, rng: &mut ChaCha8Rng, row: isize, col: isize, gw: isize, gh: isize, t: isize) {
    let bars = rng.gen_range(2..=4);
    for _ in 0..bars {
        match rng.gen_range(0..7) {
            0 => canvas.rect(row, col, gh, t),
            1 => canvas.rect(row, col + gw - t, gh, t),
            2 => canvas.rect(row, col + (gw - t) / 2, gh, t),
            3 => canvas.rect(row, col, t, gw),
            4 => canvas.rect(row + (gh - t) / 2, col, t, gw),
            5 => canvas.rect(row + gh - t, col, t, gw),
            _ => {
                // short descender or dot
                let len = gh / 3;
                canvas.rect(row + gh, col + (gw - t) / 2, len.max(1), t);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskStats {
    pub coverage: f64,
    /// Number of 8-connected damaged components.
    pub components: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn mask_stats(mask: &DamageMask) -> MaskStats {
    let (w, h) = (mask.width(), mask.height());
    let total = w * h;
    if total == 0 {
        return MaskStats { coverage: 0.0, components: 0 };
    }
    let flags = mask.flags();
    let mut uf = UnionFind { parent: (0..total).collect() };
    let mut count = 0;
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if !flags[i] {
                continue;
            }
            count += 1;
            // already-visited neighbours: W, NW, N, NE
            if c > 0 && flags[i - 1] {
                uf.union(i, i - 1);
            }
            if r > 0 {
                if c > 0 && flags[i - w - 1] {
                    uf.union(i, i - w - 1);
                }
                if flags[i - w] {
                    uf.union(i, i - w);
                }
                if c + 1 < w && flags[i - w + 1] {
                    uf.union(i, i - w + 1);
                }
            }
        }
    }
    let components = (0..total).filter(|&i| flags[i] && uf.find(i) == i).count();
    MaskStats { coverage: count as f64 / total as f64, components }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_fixtures() {
        assert_eq!(mask_stats(&DamageMask::empty(8, 8)), MaskStats { coverage: 0.0, components: 0 });
        assert_eq!(mask_stats(&DamageMask::full(8, 8)), MaskStats { coverage: 1.0, components: 1 });
        let two = DamageMask::from_fn(8, 8, |r, c| (r < 2 && c < 2) || ((5..7).contains(&r) && (4..6).contains(&c)));
        assert_eq!(mask_stats(&two), MaskStats { coverage: 8.0 / 64.0, components: 2 });
        // diagonal contact joins components
        let diag = DamageMask::from_fn(4, 4, |r, c| r == c);
        assert_eq!(mask_stats(&diag).components, 1);
        let anti = DamageMask::from_fn(4, 4, |r, c| r + c == 3);
        assert_eq!(mask_stats(&anti).components, 1);
    }

    #[test]
    fn thin_scratch_coverage() {
        let m = generate_mask(&MaskSpec::new(MaskCategory::ThinScratch, 1), 512, 512).unwrap();
        let cov = mask_stats(&m).coverage;
        assert!((0.005..=0.03).contains(&cov), "{cov}");
    }

    #[test]
    fn deterministic() {
        for cat in MaskCategory::ALL {
            let spec = MaskSpec::new(cat, 99);
            assert_eq!(generate_mask(&spec, 64, 48).unwrap(), generate_mask(&spec, 64, 48).unwrap());
        }
    }

    #[test]
    fn seeds_differ() {
        let masks: Vec<_> = (0..100).map(|s| generate_mask(&MaskSpec::new(MaskCategory::LowText, s), 64, 64).unwrap()).collect();
        for i in 0..masks.len() {
            for j in i + 1..masks.len() {
                assert_ne!(masks[i], masks[j], "seeds {i} and {j}");
            }
        }
    }

    #[test]
    fn coverage_ordering() {
        for seed in 0..10 {
            let cov = |cat| mask_stats(&generate_mask(&MaskSpec::new(cat, seed), 256, 256).unwrap()).coverage;
            assert!(cov(MaskCategory::HeavyText) > cov(MaskCategory::LowText));
            assert!(cov(MaskCategory::ThickScratch) > cov(MaskCategory::ThinScratch));
        }
    }

    #[test]
    fn coverage_hint_and_errors() {
        let spec = MaskSpec { coverage: Some(0.3), ..MaskSpec::new(MaskCategory::ThickScratch, 4) };
        let cov = mask_stats(&generate_mask(&spec, 128, 128).unwrap()).coverage;
        assert!((0.3..0.36).contains(&cov), "{cov}");
        assert_eq!(generate_mask(&MaskSpec::new(MaskCategory::LowText, 0), 15, 64), Err(Error::TooSmall(15, 64)));
        let bad = MaskSpec { coverage: Some(0.7), ..spec };
        assert!(generate_mask(&bad, 64, 64).is_err());
        assert_eq!("heavy_text".parse::<MaskCategory>().unwrap(), MaskCategory::HeavyText);
        assert!("medium_text".parse::<MaskCategory>().is_err());
    }
}
