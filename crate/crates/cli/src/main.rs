use std::fs::OpenOptions;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use vqhull::bench::{llc_bytes, run_bench, stream_scale_baseline, BenchReport, DEFAULT_REPS};
use vqhull::io::{read_points, write_points, Format};
use vqhull::verify::verify_hull;
use vqhull::{
    DatasetKind, DatasetSpec, Error, ExtractConfig, HullConfig, HullEngine, LaneWidth, PointSet,
    SimdBackend,
};

#[derive(Parser)]
#[command(
    name = "vqhull",
    version,
    about = "Planar convex hulls with vectorized Quickhull"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set.
    Gen {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
        /// Defaults to binary for `.bin` paths, text otherwise.
        #[arg(long)]
        format: Option<Format>,
    },
    /// Compute a hull and optionally write its vertices.
    Hull {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        hull: HullArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Time repeated hull runs and report bandwidth.
    Bench {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        hull: HullArgs,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        /// Append one row per run to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        no_baseline: bool,
    },
    /// Check a hull against its point set.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Hull vertices to check; recomputed when absent.
        #[arg(long)]
        hull: Option<PathBuf>,
        #[command(flatten)]
        hull_args: HullArgs,
    },
    /// Measure in-place Scale bandwidth.
    Baseline {
        /// Buffer size in MiB; defaults to four times the last-level cache.
        #[arg(long)]
        buffer_mib: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        #[arg(long, env = "VQHULL_WORKERS", default_value_t = 1)]
        workers: usize,
    },
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    dataset: Option<DatasetKind>,
    /// Point count; accepts forms like 1e7.
    #[arg(long, value_parser = parse_count)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Read points from a file instead of generating them.
    #[arg(long = "in", conflicts_with = "dataset")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct HullArgs {
    #[arg(long, env = "VQHULL_WORKERS", default_value_t = 1)]
    workers: usize,
    #[arg(long, env = "VQHULL_BLOCK", default_value_t = vqhull::parallel::DEFAULT_BLOCK)]
    block_size: usize,
    #[arg(long, env = "VQHULL_LANES", default_value = "8", value_parser = parse_lanes)]
    lanes: LaneWidth,
    #[arg(long, default_value = "auto", value_parser = parse_backend)]
    backend: SimdBackend,
    /// Stage compressed writes and flush whole cachelines.
    #[arg(long)]
    write_combining: bool,
}

fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e18 => Ok(v as usize),
        _ => Err(format!("`{s}` is not a point count")),
    }
}

fn parse_lanes(s: &str) -> Result<LaneWidth, String> {
    let d: usize = s
        .parse()
        .map_err(|_| format!("`{s}` is not a lane width"))?;
    LaneWidth::from_lanes(d).map_err(|e| e.to_string())
}

fn parse_backend(s: &str) -> Result<SimdBackend, String> {
    match s {
        "auto" => Ok(SimdBackend::Auto),
        "portable" => Ok(SimdBackend::Portable),
        "avx2" => Ok(SimdBackend::Avx2),
        "avx512" => Ok(SimdBackend::Avx512),
        _ => Err(format!(
            "unknown backend `{s}` (auto, portable, avx2, avx512)"
        )),
    }
}

impl HullArgs {
    fn config(&self) -> HullConfig {
        HullConfig {
            workers: self.workers,
            block: self.block_size,
            extract: ExtractConfig {
                lanes: self.lanes,
                backend: self.backend,
                write_combining: self.write_combining,
                ..ExtractConfig::default()
            },
            ..HullConfig::default()
        }
    }
}

impl DataArgs {
    fn load(&self) -> vqhull::Result<(PointSet, String, Option<DatasetSpec>)> {
        match (&self.input, self.dataset) {
            (Some(path), _) => Ok((load_file(path)?, path.display().to_string(), None)),
            (None, Some(kind)) => {
                let n = self
                    .n
                    .ok_or_else(|| Error::InvalidConfig("--n is required with --dataset".into()))?;
                let spec = DatasetSpec::new(kind, n, self.seed);
                Ok((spec.generate(), kind.to_string(), Some(spec)))
            }
            (None, None) => Err(Error::InvalidConfig("give --dataset or --in".into())),
        }
    }
}

fn load_file(path: &Path) -> vqhull::Result<PointSet> {
    read_points(path).map_err(|e| match e {
        Error::Io(io) => Error::Load(format!("{}: {io}", path.display())),
        other => other,
    })
}

fn format_for(path: &Path, format: Option<Format>) -> Format {
    format.unwrap_or_else(|| Format::from_path(path))
}

/// Sidecar holding the generator parameters of a dataset file.
fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    dataset: &'a str,
    n: usize,
    seed: Option<u64>,
    workers: usize,
    lanes: usize,
    block: usize,
    reps: usize,
    mean_s: f64,
    stddev_s: f64,
    min_s: f64,
    bytes: u64,
    bandwidth_gbs: f64,
    hull_vertices: usize,
    baseline_gbs: Option<f64>,
    baseline_fraction: Option<f64>,
    energy_j: Option<f64>,
    idle_energy_j: Option<f64>,
}

impl<'a> From<&'a BenchReport> for CsvRow<'a> {
    fn from(r: &'a BenchReport) -> Self {
        CsvRow {
            dataset: &r.dataset,
            n: r.n,
            seed: r.seed,
            workers: r.workers,
            lanes: r.lanes,
            block: r.block,
            reps: r.reps,
            mean_s: r.mean_s,
            stddev_s: r.stddev_s,
            min_s: r.times.iter().copied().fold(f64::INFINITY, f64::min),
            bytes: r.bytes,
            bandwidth_gbs: r.bandwidth_gbs,
            hull_vertices: r.hull_vertices,
            baseline_gbs: r.baseline_gbs,
            baseline_fraction: r.baseline_fraction(),
            energy_j: None,
            idle_energy_j: None,
        }
    }
}

fn append_csv(path: &Path, report: &BenchReport) -> vqhull::Result<()> {
    let fresh = std::fs::metadata(path)
        .map(|m| m.len() == 0)
        .unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(fresh)
        .from_writer(file);
    w.serialize(CsvRow::from(report))
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    w.flush()?;
    Ok(())
}

fn print_table(r: &BenchReport) {
    let line = |k: &str, v: String| println!("{k:<16}{v}");
    line("dataset", r.dataset.clone());
    line("points", r.n.to_string());
    if let Some(seed) = r.seed {
        line("seed", seed.to_string());
    }
    line("workers", r.workers.to_string());
    line("lanes", r.lanes.to_string());
    line("block", r.block.to_string());
    line("reps", r.reps.to_string());
    line("mean", format!("{:.6} s", r.mean_s));
    line("stddev", format!("{:.6} s", r.stddev_s));
    line("modeled bytes", r.bytes.to_string());
    line("bandwidth", format!("{:.3} GB/s", r.bandwidth_gbs));
    line("hull vertices", r.hull_vertices.to_string());
    if let (Some(b), Some(f)) = (r.baseline_gbs, r.baseline_fraction()) {
        line("scale baseline", format!("{b:.3} GB/s"));
        line("of baseline", format!("{:.1} %", 100.0 * f));
    }
}

/// Returns the process exit code for a successfully parsed command.
fn run(cli: Cli) -> vqhull::Result<u8> {
    match cli.command {
        Command::Gen { data, out, format } => {
            let (set, _, spec) = data.load()?;
            write_points(&out, &set, format_for(&out, format))?;
            if let Some(spec) = spec {
                let meta = serde_json::to_string_pretty(&spec).expect("serializable");
                std::fs::write(meta_path(&out), meta + "\n")?;
            }
            println!("wrote {} points to {}", set.len(), out.display());
        }
        Command::Hull {
            data,
            hull,
            out,
            format,
        } => {
            let (mut set, label, _) = data.load()?;
            let engine = HullEngine::new(hull.config())?;
            let start = Instant::now();
            let run = engine.run_in_place(set.as_mut())?;
            let secs = start.elapsed().as_secs_f64();
            println!(
                "{label}: {} hull vertices in {secs:.6} s",
                run.polygon.len()
            );
            if let Some(out) = out {
                let vertices = PointSet::from_points(run.polygon.into_vertices());
                write_points(&out, &vertices, format_for(&out, format))?;
            }
        }
        Command::Bench {
            data,
            hull,
            reps,
            csv,
            json,
            no_baseline,
        } => {
            let (set, label, spec) = data.load()?;
            let cfg = hull.config();
            let mut report = run_bench(&set, &label, spec, &cfg, reps)?;
            if !no_baseline {
                report.baseline_gbs =
                    Some(stream_scale_baseline(4 * llc_bytes(), reps, cfg.workers)?);
            }
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                print_table(&report);
            }
            if let Some(path) = csv {
                append_csv(&path, &report)?;
            }
        }
        Command::Verify {
            input,
            hull,
            hull_args,
        } => {
            let set = load_file(&input)?;
            let vertices = match hull {
                Some(path) => load_file(&path)?.iter().collect(),
                None => HullEngine::new(hull_args.config())?
                    .run(&set)?
                    .polygon
                    .into_vertices(),
            };
            let report = verify_hull(&set, &vertices);
            println!("{report}");
            if !report.passed() {
                return Ok(1);
            }
        }
        Command::Baseline {
            buffer_mib,
            reps,
            workers,
        } => {
            let bytes = buffer_mib.map_or_else(|| 4 * llc_bytes(), |m| m << 20);
            let gbs = stream_scale_baseline(bytes, reps, workers)?;
            println!(
                "scale: {gbs:.3} GB/s ({} MiB buffer, best of {reps}, {workers} workers)",
                bytes >> 20
            );
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
