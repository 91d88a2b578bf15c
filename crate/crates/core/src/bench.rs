//! Timing harness and the in-place Scale bandwidth baseline.

use std::hint::black_box;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::DatasetSpec;
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::hull::{HullConfig, HullEngine};
use crate::traffic::counted_bytes;

pub const DEFAULT_REPS: usize = 10;
/// Used when the last-level cache size cannot be read.
pub const FALLBACK_LLC_BYTES: usize = 32 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub dataset: String,
    pub n: usize,
    pub seed: Option<u64>,
    pub workers: usize,
    pub lanes: usize,
    pub block: usize,
    pub reps: usize,
    pub times: Vec<f64>,
    pub mean_s: f64,
    pub stddev_s: f64,
    pub bytes: u64,
    pub bandwidth_gbs: f64,
    pub hull_vertices: usize,
    pub baseline_gbs: Option<f64>,
}

impl BenchReport {
    /// Achieved bandwidth as a fraction of the baseline.
    pub fn baseline_fraction(&self) -> Option<f64> {
        self.baseline_gbs.map(|b| self.bandwidth_gbs / b)
    }
}

pub fn mean_stddev(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (mean, var.sqrt())
}

/// Runs the hull `reps` times, each on a fresh copy of `points`. Only the
/// hull computation itself is timed.
pub fn run_bench(
    points: &PointSet,
    label: &str,
    spec: Option<DatasetSpec>,
    cfg: &HullConfig,
    reps: usize,
) -> Result<BenchReport> {
    if reps == 0 {
        return Err(Error::InvalidConfig(
            "repetitions must be at least 1".into(),
        ));
    }
    let engine = HullEngine::new(*cfg)?;
    let mut times = Vec::with_capacity(reps);
    let mut bytes = 0;
    let mut vertices = 0;
    for rep in 0..reps {
        let mut work = points.clone();
        let start = Instant::now();
        let run = engine.run_in_place(work.as_mut())?;
        times.push(start.elapsed().as_secs_f64());
        let b = counted_bytes(&run.stats);
        if rep == 0 {
            bytes = b;
            vertices = run.polygon.len();
        } else if b != bytes || run.polygon.len() != vertices {
            return Err(Error::InvalidConfig("repetitions disagree".into()));
        }
    }
    let (mean, stddev) = mean_stddev(&times);
    Ok(BenchReport {
        dataset: label.to_string(),
        n: points.len(),
        seed: spec.map(|s| s.seed),
        workers: cfg.workers,
        lanes: cfg.extract.lanes.get(),
        block: cfg.block,
        reps,
        times,
        mean_s: mean,
        stddev_s: stddev,
        bytes,
        bandwidth_gbs: if mean > 0.0 {
            bytes as f64 / mean / 1e9
        } else {
            0.0
        },
        hull_vertices: vertices,
        baseline_gbs: None,
    })
}

/// Size of the last-level cache, from sysfs when available.
pub fn llc_bytes() -> usize {
    (0..8)
        .rev()
        .find_map(|i| {
            std::fs::read_to_string(format!("/sys/devices/system/cpu/cpu0/cache/index{i}/size"))
                .ok()
        })
        .and_then(|s| parse_cache_size(s.trim()))
        .unwrap_or(FALLBACK_LLC_BYTES)
}

fn parse_cache_size(s: &str) -> Option<usize> {
    let (num, mult) = match s.chars().last()? {
        'K' | 'k' => (&s[..s.len() - 1], 1 << 10),
        'M' | 'm' => (&s[..s.len() - 1], 1 << 20),
        'G' | 'g' => (&s[..s.len() - 1], 1 << 30),
        _ => (s, 1),
    };
    num.parse::<usize>().ok().map(|v| v * mult)
}

/// Best-of-`reps` bandwidth in GB/s of `a[i] = s * a[i]` over a buffer of
/// `buffer_bytes`, counting 16 bytes per element. Runs on the current rayon
/// pool when `threads > 1`.
pub fn stream_scale_baseline(buffer_bytes: usize, reps: usize, threads: usize) -> Result<f64> {
    let len = (buffer_bytes / 8).max(1);
    let mut a: Vec<f64> = Vec::new();
    a.try_reserve_exact(len)
        .map_err(|e| Error::InvalidConfig(format!("cannot allocate {buffer_bytes} bytes: {e}")))?;
    a.resize(len, 1.0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let s = black_box(1.000_000_1);
    let mut best = f64::INFINITY;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        if threads > 1 {
            pool.install(|| {
                a.par_chunks_mut(1 << 16)
                    .for_each(|c| c.iter_mut().for_each(|v| *v *= s))
            });
        } else {
            a.iter_mut().for_each(|v| *v *= s);
        }
        black_box(&mut a);
        best = best.min(start.elapsed().as_secs_f64());
    }
    Ok(16.0 * len as f64 / best / 1e9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{gen_disk, DatasetKind};

    #[test]
    fn cache_size_strings() {
        assert_eq!(parse_cache_size("32768K"), Some(32 << 20));
        assert_eq!(parse_cache_size("2M"), Some(2 << 20));
        assert_eq!(parse_cache_size("512"), Some(512));
        assert_eq!(parse_cache_size("abc"), None);
        assert!(llc_bytes() > 0);
    }

    #[test]
    fn stats() {
        assert_eq!(mean_stddev(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_stddev(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - 1.2909944487358056).abs() < 1e-12);
    }

    #[test]
    fn report_fields() {
        let spec = DatasetSpec::new(DatasetKind::Disk, 2000, 3);
        let pts = gen_disk(2000, 3);
        let r = run_bench(&pts, "disk", Some(spec), &HullConfig::default(), 3).unwrap();
        assert_eq!(r.times.len(), 3);
        assert_eq!(r.seed, Some(3));
        assert!(r.bytes > 16 * 2000);
        assert!(
            (r.bandwidth_gbs - r.bytes as f64 / r.mean_s / 1e9).abs()
                < 1e-9 * r.bandwidth_gbs.max(1.0)
        );
        let r4 = run_bench(&pts, "disk", None, &HullConfig::with_workers(4), 1).unwrap();
        assert_eq!(r4.hull_vertices, r.hull_vertices);
        assert!(run_bench(&pts, "disk", None, &HullConfig::default(), 0).is_err());
    }

    #[test]
    fn baseline_is_positive() {
        assert!(stream_scale_baseline(1 << 20, 2, 1).unwrap() > 0.0);
    }
}
