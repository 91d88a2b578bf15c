//! Vectorized, in-place, multi-worker Quickhull for planar point sets.

pub mod bench;
pub mod datasets;
pub mod error;
pub mod extract;
pub mod ffi;
pub mod geometry;
pub mod hull;
pub mod io;
pub mod parallel;
pub mod reference;
pub mod traffic;
pub mod verify;

pub use datasets::{gen_circle, gen_disk, gen_kuzmin, DatasetKind, DatasetSpec};
pub use error::{Error, Result};
pub use extract::{
    classify_block, compress_select, extract_subsets, ExtractConfig, ExtractOutcome, ExtractStats,
    LaneWidth, SimdBackend,
};
pub use geometry::{
    find_extremes, find_extremes_par, is_better_apex, is_farther, is_left_of, DirectedEdge, Point,
    PointSet, PointsMut,
};
pub use hull::{
    convex_hull, split_budget, CallRecord, HullConfig, HullEngine, HullPolygon, HullRun, HullStats,
};
pub use parallel::{parallel_extract, WorkerLayout};
pub use traffic::{bytes_model, TrafficModel};
