//! Memory-traffic model of a hull run.
//!
//! Each coordinate costs 8 bytes. The extremes pass reads every point once;
//! a partition step reads its range and writes both subsets; assembly moves
//! the second chain.

use serde::{Deserialize, Serialize};

use crate::hull::{CallRecord, HullRun, HullStats};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficModel {
    pub n: usize,
    pub calls: Vec<CallRecord>,
}

impl TrafficModel {
    /// Needs a run made with tracing enabled.
    pub fn from_run(n: usize, run: &HullRun) -> Self {
        TrafficModel {
            n,
            calls: run.trace.clone(),
        }
    }

    pub fn total_bytes(&self) -> u64 {
        bytes_model(self.n, &self.calls)
    }
}

/// `8 n + sum over calls of 8 (|P| + |S1| + |S2|) + 8 |CH(S2)|`.
pub fn bytes_model(n: usize, calls: &[CallRecord]) -> u64 {
    let per_call: u64 = calls
        .iter()
        .map(|c| 8 * (c.size + c.s1 + c.s2) as u64 + 8 * c.chain2 as u64)
        .sum();
    8 * n as u64 + per_call
}

/// The same total from the counters kept during the run.
pub fn counted_bytes(stats: &HullStats) -> u64 {
    8 * (stats.extreme_reads + stats.extract.reads + stats.extract.writes + stats.chain_moves)
}
