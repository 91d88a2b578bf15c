//! Deterministic point generators.
//!
//! Point `i` draws two 64-bit words from a ChaCha8 stream at word offset
//! `4 i`, so any sharding of the index range yields the same bytes.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::PointSet;

const SHARD: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Kuzmin,
    Circle,
    Disk,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 3] = [DatasetKind::Kuzmin, DatasetKind::Circle, DatasetKind::Disk];

    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Kuzmin => "kuzmin",
            DatasetKind::Circle => "circle",
            DatasetKind::Disk => "disk",
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        DatasetKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown dataset `{s}` (expected kuzmin, circle or disk)"
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    pub n: usize,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn new(kind: DatasetKind, n: usize, seed: u64) -> Self {
        DatasetSpec { kind, n, seed }
    }

    pub fn generate(&self) -> PointSet {
        match self.kind {
            DatasetKind::Kuzmin => gen_kuzmin(self.n, self.seed),
            DatasetKind::Circle => gen_circle(self.n, self.seed),
            DatasetKind::Disk => gen_disk(self.n, self.seed),
        }
    }
}

/// Uniform in `[0, 1)` from the top 53 bits.
#[inline]
fn unit(w: u64) -> f64 {
    (w >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn generate(n: usize, seed: u64, point: impl Fn(f64, f64) -> (f64, f64) + Sync) -> PointSet {
    let mut xs = vec![0.0; n];
    let mut ys = vec![0.0; n];
    xs.par_chunks_mut(SHARD)
        .zip(ys.par_chunks_mut(SHARD))
        .enumerate()
        .for_each(|(c, (cx, cy))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_word_pos(4 * (c * SHARD) as u128);
            for (x, y) in cx.iter_mut().zip(cy.iter_mut()) {
                let u1 = unit(rng.next_u64());
                let u2 = unit(rng.next_u64());
                (*x, *y) = point(u1, u2);
            }
        });
    PointSet::from_coords(xs, ys).expect("equal lengths")
}

fn angle(u: f64) -> (f64, f64) {
    let t = 2.0 * std::f64::consts::PI * u;
    (libm::cos(t), libm::sin(t))
}

/// Uniform on the unit disk.
pub fn gen_disk(n: usize, seed: u64) -> PointSet {
    generate(n, seed, |u1, u2| {
        let r = u1.sqrt();
        let (c, s) = angle(u2);
        (r * c, r * s)
    })
}

/// Uniform angle on the unit circle.
pub fn gen_circle(n: usize, seed: u64) -> PointSet {
    generate(n, seed, |_, u2| angle(u2))
}

/// Kuzmin disk: radial CDF `1 - (1 + r^2)^(-1/2)`, uniform angle.
pub fn gen_kuzmin(n: usize, seed: u64) -> PointSet {
    generate(n, seed, |u1, u2| {
        let a = 1.0 / (1.0 - u1);
        let r = (a * a - 1.0).sqrt();
        let (c, s) = angle(u2);
        (r * c, r * s)
    })
}
