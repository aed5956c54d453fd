use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kriging_inpaint::MaskCategory;
use kriging_inpaint_cli::commands::{cmd_benchmark, cmd_evaluate, cmd_inpaint, cmd_synth, cmd_variogram, BenchmarkArgs};
use kriging_inpaint_cli::config::{resolve, ConfigLayer};
use kriging_inpaint_cli::{CliError, CliResult};

/// Restore damaged image regions with block-wise ordinary Kriging.
#[derive(Parser, Debug)]
#[command(author, version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct EngineFlags {
    /// JSON file with engine settings; flags given here take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tile side k in pixels
    #[arg(long)]
    block_size: Option<usize>,
    /// Context border around each tile in pixels
    #[arg(long)]
    margin: Option<usize>,
    /// Nearest known pixels used per prediction
    #[arg(long)]
    max_neighbors: Option<usize>,
    /// Variogram lag bin width in pixels
    #[arg(long)]
    bin_width: Option<f64>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    workers: Option<usize>,
}

impl EngineFlags {
    fn resolve(&self) -> CliResult<kriging_inpaint::InpaintConfig> {
        let flags = ConfigLayer {
            block_size: self.block_size,
            margin: self.margin,
            max_neighbors: self.max_neighbors,
            bin_width: self.bin_width,
            workers: self.workers,
        };
        resolve(self.config.as_deref(), &flags)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fill the masked pixels of an image
    Inpaint {
        #[arg(long)]
        image: PathBuf,
        /// Single-channel mask, nonzero = damaged
        #[arg(long)]
        mask: PathBuf,
        /// Output PNG
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Print MSE and PSNR of a restored image against its original
    Evaluate {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        restored: PathBuf,
        /// Also write the scores as a CSV row
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Damage, restore and score every image of a corpus with generated masks
    Benchmark {
        /// Directory of PNG/BMP images
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated subset of thick_scratch,thin_scratch,low_text,heavy_text
        #[arg(long, value_delimiter = ',')]
        categories: Option<Vec<String>>,
        /// Also write masks, damaged and restored images
        #[arg(long)]
        save_images: bool,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Dump the empirical variogram and fitted model of one tile
    Variogram {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        /// Tile coordinate as ROW,COL in units of tiles
        #[arg(long, value_parser = parse_block)]
        block: (usize, usize),
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Write the procedural smooth and textured test scenes
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 512)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write RGB instead of grayscale
        #[arg(long)]
        color: bool,
    },
}

fn parse_block(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s.split_once(',').ok_or_else(|| format!("expected ROW,COL, got '{s}'"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("bad block coordinate '{v}': {e}"));
    Ok((parse(r)?, parse(c)?))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Inpaint { image, mask, out, engine } => {
            let outcome = cmd_inpaint(&image, &mask, &out, &engine.resolve()?)?;
            println!("{}", outcome.summary());
        }
        Command::Evaluate { original, restored, csv } => {
            println!("{}", cmd_evaluate(&original, &restored, csv.as_deref())?.summary());
        }
        Command::Benchmark { corpus, out, seed, categories, save_images, engine } => {
            let categories = match categories {
                Some(list) => list.iter().map(|s| s.parse::<MaskCategory>()).collect::<Result<Vec<_>, _>>()?,
                None => MaskCategory::ALL.to_vec(),
            };
            let args = BenchmarkArgs { corpus, out, seed, categories, config: engine.resolve()?, save_images };
            let outcome = cmd_benchmark(&args)?;
            print!("{}", outcome.table);
            println!("wrote {} and {}", outcome.csv_path.display(), outcome.manifest_path.display());
        }
        Command::Variogram { image, mask, block, out, engine } => {
            print!("{}", cmd_variogram(&image, &mask, block, &out, &engine.resolve()?)?.summary());
        }
        Command::Synth { out, size, seed, color } => {
            if size < 16 {
                return Err(CliError::Usage(format!("size must be at least 16, got {size}")));
            }
            for p in cmd_synth(&out, size, if color { 3 } else { 1 }, seed)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
