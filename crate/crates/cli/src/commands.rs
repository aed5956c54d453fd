use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use kriging_inpaint::maskgen::{generate_mask, mask_stats, MaskCategory, MaskSpec};
use kriging_inpaint::metrics::{masked_psnr, psnr, score, Psnr, QualityScore};
use kriging_inpaint::{apply_mask, block_variogram, inpaint, tile_blocks, validate_pair, InpaintConfig, InpaintReport, VariogramModel};
use serde::{Deserialize, Serialize};

use crate::config::ConfigSnapshot;
use crate::io::{load_image, load_mask, save_image, save_mask};
use crate::{CliError, CliResult};

/// Value written into damaged pixels of the "before" images.
pub const SENTINEL: u8 = 0;

/// PSNR as a CSV field: a plain number, or `identical`.
pub mod psnr_field {
    use kriging_inpaint::Psnr;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Psnr, s: S) -> Result<S::Ok, S::Error> {
        match p {
            Psnr::Identical => s.serialize_str("identical"),
            Psnr::Db(v) => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Psnr, D::Error> {
        let s = String::deserialize(d)?;
        if s == "identical" {
            return Ok(Psnr::Identical);
        }
        s.parse().map(Psnr::Db).map_err(D::Error::custom)
    }
}

pub struct InpaintOutcome {
    pub report: InpaintReport,
    pub seconds: f64,
}

impl InpaintOutcome {
    pub fn summary(&self) -> String {
        format!(
            "pixels_filled={} degraded_solves={} blocks_inpainted={}/{} elapsed={:.3}s",
            self.report.pixels_filled,
            self.report.degraded_solves,
            self.report.blocks_inpainted,
            self.report.blocks_total,
            self.seconds
        )
    }
}

pub fn cmd_inpaint(image: &Path, mask: &Path, out: &Path, config: &InpaintConfig) -> CliResult<InpaintOutcome> {
    let img = load_image(image)?;
    let mask = load_mask(mask)?;
    validate_pair(&img, &mask)?;
    let start = Instant::now();
    let (restored, report) = inpaint(&img, &mask, config)?;
    let seconds = start.elapsed().as_secs_f64();
    save_image(&restored, out)?;
    Ok(InpaintOutcome { report, seconds })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub original: String,
    pub restored: String,
    pub mse: f64,
    #[serde(with = "psnr_field")]
    pub psnr: Psnr,
}

impl EvaluationRow {
    pub fn summary(&self) -> String {
        match self.psnr {
            Psnr::Identical => format!("MSE: {:.4}\nPSNR: identical", self.mse),
            Psnr::Db(v) => format!("MSE: {:.4}\nPSNR: {v:.4} dB", self.mse),
        }
    }
}

pub fn cmd_evaluate(original: &Path, restored: &Path, csv: Option<&Path>) -> CliResult<EvaluationRow> {
    let f = load_image(original)?;
    let g = load_image(restored)?;
    let QualityScore { mse, psnr } = score(&f, &g)?;
    let row = EvaluationRow { original: original.display().to_string(), restored: restored.display().to_string(), mse, psnr };
    if let Some(path) = csv {
        write_csv(path, std::slice::from_ref(&row))?;
    }
    Ok(row)
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let io_err = |e: csv::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(io_err)?;
    for row in rows {
        w.serialize(row).map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<Vec<T>> {
    let io_err = |e: csv::Error| CliError::Io(format!("cannot read {}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(io_err)?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(io_err)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub image: String,
    pub category: String,
    pub seed: u64,
    pub coverage: f64,
    pub pixels_filled: usize,
    pub degraded_solves: usize,
    #[serde(with = "psnr_field")]
    pub damaged_psnr: Psnr,
    #[serde(with = "psnr_field")]
    pub restored_psnr: Psnr,
    pub restored_mse: f64,
    #[serde(with = "psnr_field")]
    pub masked_psnr: Psnr,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageTiming {
    pub image: String,
    pub category: String,
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub mask_specs: Vec<String>,
    pub config: ConfigSnapshot,
    pub outputs: Vec<String>,
    pub rows: Vec<BenchmarkRow>,
    pub timings: Vec<StageTiming>,
}

#[derive(Debug, Clone)]
pub struct BenchmarkArgs {
    pub corpus: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub categories: Vec<MaskCategory>,
    pub config: InpaintConfig,
    /// Also write masks, damaged and restored images.
    pub save_images: bool,
}

pub struct BenchmarkOutcome {
    pub rows: Vec<BenchmarkRow>,
    pub table: String,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "bmp"))
        .unwrap_or(false)
}

/// Sorted list of PNG/BMP files in `dir`.
pub fn list_corpus(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Io(format!("cannot read corpus {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.is_file() && is_image(p)).collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Io(format!("no PNG or BMP images in {}", dir.display())));
    }
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Damage every corpus image with every mask category, restore, and score.
pub fn cmd_benchmark(args: &BenchmarkArgs) -> CliResult<BenchmarkOutcome> {
    let files = list_corpus(&args.corpus)?;
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.out.display())))?;

    let mut rows = Vec::new();
    let mut timings = Vec::new();
    let mut outputs = Vec::new();
    let mut time = |image: &str, category: MaskCategory, stage: &str, start: Instant| {
        timings.push(StageTiming { image: image.into(), category: category.to_string(), stage: stage.into(), seconds: start.elapsed().as_secs_f64() });
    };

    for file in &files {
        let name = stem(file);
        let original = load_image(file)?;
        for &category in &args.categories {
            let t = Instant::now();
            let mask = generate_mask(&MaskSpec::new(category, args.seed), original.width(), original.height())?;
            let damaged = apply_mask(&original, &mask, SENTINEL)?;
            time(&name, category, "mask", t);

            let t = Instant::now();
            let (restored, report) = inpaint(&damaged, &mask, &args.config)?;
            time(&name, category, "inpaint", t);

            let t = Instant::now();
            rows.push(BenchmarkRow {
                image: name.clone(),
                category: category.to_string(),
                seed: args.seed,
                coverage: mask_stats(&mask).coverage,
                pixels_filled: report.pixels_filled,
                degraded_solves: report.degraded_solves,
                damaged_psnr: psnr(&original, &damaged)?,
                restored_psnr: psnr(&original, &restored)?,
                restored_mse: kriging_inpaint::mse(&original, &restored)?,
                masked_psnr: masked_psnr(&original, &restored, &mask)?,
            });
            time(&name, category, "score", t);

            if args.save_images {
                for (suffix, img) in [("damaged", &damaged), ("restored", &restored)] {
                    let p = args.out.join(format!("{name}_{category}_{suffix}.png"));
                    save_image(img, &p)?;
                    outputs.push(p.display().to_string());
                }
                let p = args.out.join(format!("{name}_{category}_mask.png"));
                save_mask(&mask, &p)?;
                outputs.push(p.display().to_string());
            }
        }
    }

    let csv_path = args.out.join("benchmark.csv");
    write_csv(&csv_path, &rows)?;
    let table = render_table(&rows, &args.categories);
    let table_path = args.out.join("table.txt");
    std::fs::write(&table_path, &table).map_err(|e| CliError::Io(format!("cannot write {}: {e}", table_path.display())))?;
    outputs.splice(0..0, [csv_path.display().to_string(), table_path.display().to_string()]);

    let manifest_path = args.out.join("manifest.json");
    let manifest = RunManifest {
        command: "benchmark".into(),
        inputs: files.iter().map(|p| p.display().to_string()).collect(),
        mask_specs: args.categories.iter().map(|c| format!("{c}:seed={}", args.seed)).collect(),
        config: ConfigSnapshot::from(&args.config),
        outputs,
        rows: rows.clone(),
        timings,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, json).map_err(|e| CliError::Io(format!("cannot write {}: {e}", manifest_path.display())))?;

    Ok(BenchmarkOutcome { rows, table, csv_path, manifest_path })
}

/// Restored PSNR per image (rows) and mask category (columns), with the
/// damaged fraction of each mask in a trailing column.
pub fn render_table(rows: &[BenchmarkRow], categories: &[MaskCategory]) -> String {
    let mut images: Vec<&str> = Vec::new();
    for r in rows {
        if !images.contains(&r.image.as_str()) {
            images.push(&r.image);
        }
    }
    let name_w = images.iter().map(|s| s.len()).max().unwrap_or(5).max(5);
    let mut out = String::new();
    let _ = write!(out, "{:<name_w$}", "Image");
    for c in categories {
        let _ = write!(out, "  {:>13}", c.name());
    }
    let _ = writeln!(out, "  coverage %");
    for img in images {
        let _ = write!(out, "{img:<name_w$}");
        let mut cover = Vec::new();
        for c in categories {
            match rows.iter().find(|r| r.image == img && r.category == c.name()) {
                Some(r) => {
                    let _ = write!(out, "  {:>13}", r.restored_psnr.to_string());
                    cover.push(format!("{:.1}", 100.0 * r.coverage));
                }
                None => {
                    let _ = write!(out, "  {:>13}", "-");
                    cover.push("-".into());
                }
            }
        }
        let _ = writeln!(out, "  {}", cover.join("/"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariogramRow {
    pub channel: usize,
    pub lag: f64,
    pub gamma: f64,
    pub pair_count: usize,
}

#[derive(Debug, Clone)]
pub struct VariogramDump {
    pub origin: (usize, usize),
    pub rows: Vec<VariogramRow>,
    /// Fitted model and known-pixel count per channel.
    pub models: Vec<(VariogramModel, usize)>,
}

impl VariogramDump {
    pub fn summary(&self) -> String {
        let mut s = format!("block origin ({}, {})\n", self.origin.0, self.origin.1);
        for (ch, (m, known)) in self.models.iter().enumerate() {
            let _ = writeln!(
                s,
                "channel {ch}: {} nugget={:.6} sill={:.6} range={:.6} (known pixels {known})",
                m.family, m.nugget, m.sill, m.range
            );
        }
        s
    }
}

/// Dumps the variogram the engine would use for tile `(block_row, block_col)`.
pub fn cmd_variogram(image: &Path, mask: &Path, block: (usize, usize), out: &Path, config: &InpaintConfig) -> CliResult<VariogramDump> {
    let img = load_image(image)?;
    let mask = load_mask(mask)?;
    validate_pair(&img, &mask)?;
    let k = config.block_size;
    let (rows_n, cols_n) = (img.height().div_ceil(k), img.width().div_ceil(k));
    if block.0 >= rows_n || block.1 >= cols_n {
        return Err(CliError::Shape(format!(
            "block ({}, {}) is outside the {rows_n}x{cols_n} block grid of a {}x{} image",
            block.0,
            block.1,
            img.width(),
            img.height()
        )));
    }
    let region = tile_blocks(img.width(), img.height(), k, config.margin)?[block.0 * cols_n + block.1];

    let mut rows = Vec::new();
    let mut models = Vec::new();
    for ch in 0..img.channels() {
        let (empirical, model, known) = block_variogram(&region, &img, ch, &mask, config.bin_width)?;
        if known < 2 {
            return Err(CliError::FullyMasked(format!("block ({}, {}) has {known} known pixels; need at least 2", block.0, block.1)));
        }
        for b in empirical.iter().flat_map(|e| &e.bins) {
            rows.push(VariogramRow { channel: ch, lag: b.lag, gamma: b.gamma, pair_count: b.pair_count });
        }
        models.push((model, known));
    }
    write_csv(out, &rows)?;
    Ok(VariogramDump { origin: region.origin, rows, models })
}

/// Writes the procedural smooth and textured test scenes into `out`.
pub fn cmd_synth(out: &Path, size: usize, channels: usize, seed: u64) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
    let smooth = kriging_inpaint::synth::smooth_scene(size, size, channels, seed)?;
    let textured = kriging_inpaint::synth::textured_scene(size, size, channels, seed)?;
    let paths = vec![out.join("smooth.png"), out.join("textured.png")];
    save_image(&smooth, &paths[0])?;
    save_image(&textured, &paths[1])?;
    Ok(paths)
}
